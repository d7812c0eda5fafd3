"""Acceptance checks, one per numbered criterion.

Each check returns ``(ok, detail)``.  Under pytest every check is a test and
the pass/fail lines are printed in the terminal summary; run this file
directly (``python tests/test_acceptance.py``) to print the lines alone.
"""
from __future__ import annotations

import time
from fractions import Fraction

import pytest

from tfne import verify
from tfne.crypto import ToyOWP, binding_failures, completeness_failures, guesser_registry, hiding_advantage, make_scheme
from tfne.equilibria import bimatrix_ne_enumerate, ce_hull_dominated
from tfne.game import StrategyProfile, expected_payoffs
from tfne.protocols import coinflip, dhr, owp
from tfne.protocols.base import check_ctfne_at, empirical_outcome_distribution
from tfne.threats import EpsilonThreatCalculus, is_eps_threat_at_round

RESULTS: dict = {}
SEED = 7


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def criterion_1():
    res, secs = _timed(lambda: verify.prop1(200, SEED))
    ok = res.passed == 200 and res.total == 200 and secs < 120
    return ok, f"{res.summary} in {secs:.1f}s"


def criterion_2():
    res, secs = _timed(lambda: verify.prop2(200, SEED))
    ok = res.ok and res.total > 0
    return ok, f"{res.summary} in {secs:.1f}s"


def criterion_3():
    f = ToyOWP.random(2, seed=1)
    g = owp.modified_game(f)
    flt = owp.filters(f)
    fams = (owp.p1_family(f), owp.p2_family(f))

    def run():
        a = check_ctfne_at(2, 0, owp.claim_instance(f, "i"), flt, fams, g)
        b = check_ctfne_at(2, 0, owp.claim_instance(f, "ii"), flt, fams, g)
        return a, b

    (a, b), secs = _timed(run)
    witness = b.detail.threats[0] if not b and b.detail.threats else None
    ok = bool(a) and not b and witness is not None and witness.site == 1 and witness.player == 1 and secs < 1
    where = f"round {witness.site}, player {witness.player}, gap {witness.gap}" if witness else "none"
    return ok, f"(i) {'passes' if a else 'fails'}; (ii) {'passes' if b else 'fails'} with threat at {where}; {secs:.2f}s"


def criterion_4():
    parts = []
    ok = True
    for k in (2, 3):
        s = make_scheme("ideal", k)
        g, m1, m2 = coinflip.build_coinflip_game(k, s)
        flt = coinflip.filters(s)
        v = check_ctfne_at(k, 0, (m1, m2), flt, (coinflip.p1_family(s), coinflip.p2_family(s)), g)
        u = expected_payoffs(g, v.profile)
        calc = EpsilonThreatCalculus(g, v.constraints, 0)
        rounds = [bool(is_eps_threat_at_round(g, v.constraints, v.profile, r, 0, calc=calc)) for r in (1, 2, 3)]
        ok = ok and bool(v) and u == (Fraction(1, 2), Fraction(1, 2)) and not any(rounds)
        parts.append(f"k={k}: {'pass' if v else 'fail'}, payoffs ({u[0]},{u[1]}), round threats {rounds}")
    toy = make_scheme("toy", 2)
    brute = next(m for m in coinflip.p2_family(toy) if m.name == "brute-invert")
    rejected = coinflip.coinflip_filter(2, brute, 2, Fraction(1, 4), toy).rejected
    ok = ok and rejected
    parts.append(f"toy brute inverter {'filtered' if rejected else 'accepted'} at 1/4")
    return ok, "; ".join(parts)


def criterion_5():
    def run():
        nf = dhr.battle_of_the_sexes()
        eqs = bimatrix_ne_enumerate(nf)
        pure = [i for i, e in enumerate(eqs) if e.is_pure()]
        d = dhr.decompose_ce(nf, eqs, {pure[0]: Fraction(1, 2), pure[1]: Fraction(1, 2)})
        dominated = bool(ce_hull_dominated(nf, eqs, d.payoffs()))
        s = make_scheme("ideal", 2)
        proto, gg, pruned = dhr.dhr_setting(nf, d, 2, s)
        m1, m2 = dhr.honest_p1(s, d.ell), dhr.honest_p2(d.ell)
        flt = dhr.filters(nf, d, s)
        v = check_ctfne_at(2, 0, (m1, m2), flt, (dhr.p1_family(s, d.ell), dhr.p2_family(s, d.ell, proto)), gg)
        honest = expected_payoffs(pruned, v.profile)
        worst_gain = None
        for i, fam in ((1, dhr.p1_family(s, d.ell)), (2, dhr.p2_family(s, d.ell, proto))):
            for m in fam:
                if "abort" not in m.name:
                    continue
                rep = flt[i - 1](m, 2, 0).strategy
                u = expected_payoffs(pruned, v.profile.replace(i, rep))
                gain = u[i - 1] - honest[i - 1]
                worst_gain = gain if worst_gain is None else max(worst_gain, gain)
        runs = 100_000
        freq = empirical_outcome_distribution(proto, (m1, m2), 2, runs, SEED)["labels"]
        n = len(d.sequence)
        tv = sum(abs(Fraction(freq.get(f"index-{j}", 0), runs) - Fraction(1, n)) for j in range(n)) / 2
        return dominated, v, honest, worst_gain, tv

    (dominated, v, honest, worst_gain, tv), secs = _timed(run)
    ok = not dominated and bool(v) and worst_gain is not None and worst_gain <= 0 and tv < Fraction(2, 100) and secs < 60
    return ok, (
        f"dominated={dominated}; ctfne {'passes' if v else 'fails'}; honest ({honest[0]},{honest[1]}); "
        f"best abort gain {worst_gain}; TV {float(tv):.4f}; {secs:.1f}s"
    )


def criterion_6():
    a = verify.general(200, SEED)
    b = verify.zerosum(100, SEED)
    ok = a.ok and b.ok and a.total > 0 and b.total > 0
    return ok, f"{a.summary}; {b.summary}"


def criterion_7():
    res = verify.tfne_spe(100, SEED)
    return res.ok and res.total > 0, res.summary


def criterion_8():
    res = verify.mixbeh(100, SEED)
    return res.ok and res.total == 100, res.summary


def criterion_9():
    bad = 0
    for k in (2, 3):
        for name in ("ideal", "toy"):
            s = make_scheme(name, k)
            bad += len(completeness_failures(s)) + len(binding_failures(s))
    advs = [hiding_advantage(s, m) for s in (make_scheme("ideal", 2), make_scheme("ideal", 3)) for m in guesser_registry(s)]
    ok = bad == 0 and all(a == 0 for a in advs)
    return ok, f"{bad} completeness/binding failures; ideal hiding advantages all zero over {len(advs)} guesser runs: {all(a == 0 for a in advs)}"


CRITERIA = {
    1: ("threat-free continuation uniqueness", criterion_1),
    2: ("existence of ε-threat-free continuations", criterion_2),
    3: ("modified permutation game instance", criterion_3),
    4: ("coin-flip instance", criterion_4),
    5: ("mediator-removal instance", criterion_5),
    6: ("Pareto + safe + NE implies ε-TFNE; zero-sum case", criterion_6),
    7: ("TFNE outcomes equal the backward-induction outcome", criterion_7),
    8: ("mixed to behavioral outcome equivalence", criterion_8),
    9: ("commitment completeness, binding and ideal hiding", criterion_9),
}


def _line(n, ok, detail):
    return f"criterion {n} ({CRITERIA[n][0]}): {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, detail = CRITERIA[n][1]()
    RESULTS[n] = _line(n, ok, detail)
    print(RESULTS[n])
    assert ok, RESULTS[n]


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n][1]()
        failed += not ok
        print(_line(n, ok, detail), flush=True)
    raise SystemExit(1 if failed else 0)
