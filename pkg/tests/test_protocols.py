from fractions import Fraction

import pytest

from tfne.crypto import ToyOWP, commit, make_scheme
from tfne.equilibria import bimatrix_ne_enumerate
from tfne.errors import MachineFiltered, NotAConvexCombination, NotDyadic
from tfne.game import ABORT, StrategyProfile, enumerate_pure_reduced, expected_payoffs, outcome_distribution, validate_game
from tfne.machine import MachineSpec
from tfne.protocols import coinflip, dhr, owp
from tfne.protocols.base import (
    check_ctfne_at,
    covering_check,
    empirical_outcome_distribution,
    machine_outcome_distribution,
    run_protocol,
    strategic_representation,
    tractable_set,
)

F = Fraction


# ---------------------------------------------------------------------------
# permutation games


@pytest.mark.parametrize("n", [2, 3])
def test_owp_builders_are_valid(n):
    f = ToyOWP.random(n, seed=5)
    plain = owp.build_owp_game(n, f)
    mod = owp.build_modified_owp_game(n, f)
    assert validate_game(plain) == [] and validate_game(mod) == []
    assert len(plain.terminals()) == len(mod.terminals()) == 4 ** n


def test_owp_payoffs():
    f = ToyOWP.random(2, seed=1)
    g = owp.build_owp_game(2, f)
    mod = owp.build_modified_owp_game(2, f)
    y = f("01")
    assert g.payoff((y, "01")) == (-1, 1)
    assert g.payoff((y, "10")) == (1, -1)
    assert mod.payoff(("00", "00")) == (2, 2)
    assert mod.payoff(("00", "11")) == (-2, -2)
    assert mod.payoff((y, "00")) == (-2, -2)
    assert mod.payoff((y, "01")) == (-1, 1)


def test_owp_filter_thresholds():
    f = ToyOWP.random(2, seed=1)
    f1, f2 = owp.filters(f)
    assert not f2(owp.p2_invert(f), 2, 0)
    assert f2(owp.p2_uniform_after_zero(f), 2, 0)
    assert owp.inversion_probability(owp.p2_uniform_after_zero(f), f) == F(1, 3)
    assert all(f1(m, 2, 0) for m in owp.p1_family(f))


def test_owp_claims():
    f = ToyOWP.random(2, seed=1)
    g = owp.modified_game(f)
    flt = owp.filters(f)
    fams = (owp.p1_family(f), owp.p2_family(f))
    assert check_ctfne_at(2, 0, owp.claim_instance(f, "i"), flt, fams, g)
    v = check_ctfne_at(2, 0, owp.claim_instance(f, "ii"), flt, fams, g)
    assert not v
    w = v.detail.threats[0]
    assert w.site == 1 and w.player == 1
    with pytest.raises(ValueError):
        owp.claim_instance(f, "iii")


def test_prescribed_inverter_is_filtered():
    f = ToyOWP.random(2, seed=1)
    machines = (owp.p1_uniform(f), owp.p2_invert(f))
    with pytest.raises(MachineFiltered) as e:
        check_ctfne_at(2, 0, machines, owp.filters(f), (owp.p1_family(f), owp.p2_family(f)), owp.modified_game(f))
    assert e.value.player == 2


# ---------------------------------------------------------------------------
# coin flipping


@pytest.mark.parametrize("name", ["ideal", "toy"])
def test_coinflip_game_is_valid(name):
    g, _, _ = coinflip.build_coinflip_game(2, make_scheme(name, 2))
    assert validate_game(g) == []


def test_coinflip_abort_and_bad_opening_payoffs():
    s = make_scheme("ideal", 2)
    proto = coinflip.coinflip_protocol(2, s)
    com, dec = commit(s, 0, "01")
    assert proto.outcome((ABORT,)) == (0, 1)
    assert proto.outcome((com, ABORT)) == (1, 0)
    assert proto.outcome((com, "0", ABORT)) == (0, 1)
    assert proto.outcome((com, "1", dec)) == (1, 0)
    assert proto.outcome((com, "0", dec)) == (0, 1)
    _, other = commit(s, 1, "10")
    assert proto.outcome((com, "1", other)) == (0, 1)


def test_coinflip_filters():
    toy = make_scheme("toy", 2)
    f1, f2 = coinflip.filters(toy)
    fam2 = {m.name: m for m in coinflip.p2_family(toy)}
    assert f2(fam2["honest"], 2, F(1, 4))
    assert not f2(fam2["brute-invert"], 2, F(1, 4))
    assert all(f1(m, 2, 0) for m in coinflip.p1_family(toy))


def test_representation_matches_machine_runs():
    s = make_scheme("ideal", 2)
    proto, g = coinflip._setting(2, s)
    for m in coinflip.p1_family(s)[:4]:
        rep = strategic_representation(m, 2, g, view=proto.view)
        for opp in enumerate_pure_reduced(g, 2):
            direct = machine_outcome_distribution(m, 2, g, opp, view=proto.view)
            assert outcome_distribution(g, StrategyProfile(rep, opp)) == direct


def test_honest_committer_representation():
    s = make_scheme("ideal", 2)
    rep = coinflip.representation(coinflip.honest_p1(s), 2, s)
    first = rep[()]
    assert ABORT not in first and sum(first.values()) == 1
    assert len(first) == 8 and set(first.values()) == {F(1, 8)}
    # after committing to 0 and seeing 1, the honest machine opens
    com, dec = commit(s, 0, "00")
    assert rep[(com, "1")] == {dec: 1}


@pytest.mark.parametrize("name", ["ideal", "toy"])
def test_tractable_set_and_covering(name):
    s = make_scheme(name, 2)
    f1, f2 = coinflip.filters(s)
    t2 = tractable_set(f2, coinflip.p2_family(s), 2, 0)
    assert coinflip.representation(coinflip.honest_p2(s), 2, s) in t2
    ks = (2, 3, 4)
    report = covering_check(lambda m, k, eps: coinflip.coinflip_filter(2, m, k, eps, make_scheme("ideal", k)),
                            [coinflip.honest_p2(s)], 0, ks)
    assert report == {"honest": 2}


@pytest.mark.parametrize("k", [2, 3])
def test_coinflip_honest_pair_passes(k):
    s = make_scheme("ideal", k)
    g, m1, m2 = coinflip.build_coinflip_game(k, s)
    v = check_ctfne_at(k, 0, (m1, m2), coinflip.filters(s), (coinflip.p1_family(s), coinflip.p2_family(s)), g)
    assert v and v.describe() == "passes"
    assert expected_payoffs(g, v.profile) == (F(1, 2), F(1, 2))


def test_run_protocol_is_deterministic():
    s = make_scheme("ideal", 2)
    proto = coinflip.coinflip_protocol(2, s)
    ms = (coinflip.honest_p1(s), coinflip.honest_p2(s))
    a, b = run_protocol(proto, ms, 2, 42), run_protocol(proto, ms, 2, 42)
    assert a == b and a.text() == b.text()
    assert len(a.transcript) == 3


def test_coinflip_monte_carlo_is_fair():
    s = make_scheme("ideal", 2)
    proto = coinflip.coinflip_protocol(2, s)
    runs = 100_000
    res = empirical_outcome_distribution(proto, (coinflip.honest_p1(s), coinflip.honest_p2(s)), 2, runs, 1)
    assert abs(res["labels"]["p1-wins"] / runs - 0.5) < 0.01


# ---------------------------------------------------------------------------
# correlated equilibrium sampling


def _bos():
    nf = dhr.battle_of_the_sexes()
    return nf, bimatrix_ne_enumerate(nf)


def test_decompose_single_equilibrium():
    nf, eqs = _bos()
    d = dhr.decompose_ce(nf, eqs, {1: 1})
    assert d.ell == 0 and d.sequence == (eqs[1],)
    assert dhr.recompose(d) == {(1, 1): 1}


def test_decompose_halves_and_quarters():
    nf, eqs = _bos()
    d = dhr.decompose_ce(nf, eqs, {0: F(1, 2), 1: F(1, 2)})
    assert d.ell == 1 and d.indices == (0, 1)
    assert dhr.recompose(d) == {(0, 0): F(1, 2), (1, 1): F(1, 2)}
    assert d.payoffs() == (F(3, 2), F(3, 2))
    q = dhr.decompose_ce(nf, eqs, {0: F(3, 4), 1: F(1, 4)})
    assert q.ell == 2 and q.indices == (0, 0, 0, 1)
    assert q.weights() == {0: F(3, 4), 1: F(1, 4)}
    assert dhr.recompose(q) == {(0, 0): F(3, 4), (1, 1): F(1, 4)}


def test_decompose_errors():
    nf, eqs = _bos()
    with pytest.raises(NotDyadic):
        dhr.decompose_ce(nf, eqs, {0: F(1, 3), 1: F(2, 3)})
    for bad in ({0: F(1, 2)}, {0: F(3, 2), 1: F(-1, 2)}, {7: 1}, [(0, F(1, 2)), (0, F(1, 2))], {}):
        with pytest.raises(NotAConvexCombination):
            dhr.decompose_ce(nf, eqs, bad)


def _dhr_setup():
    nf, eqs = _bos()
    d = dhr.decompose_ce(nf, eqs, {0: F(1, 2), 1: F(1, 2)})
    s = make_scheme("ideal", 2)
    proto, gg, pruned = dhr.dhr_setting(nf, d, 2, s)
    return nf, eqs, d, s, proto, gg, pruned


def test_dhr_leaves_route_to_punishments():
    nf, eqs, d, s, proto, gg, pruned = _dhr_setup()
    assert proto.outcome_label((ABORT,)) == "punish-1"
    assert proto.assigned((ABORT,)) == proto.punish[1]
    com, dec = commit(s, 0, "00")
    assert proto.outcome_label((com, ABORT)) == "punish-2"
    assert proto.outcome_label((com, "1", ABORT)) == "punish-1"
    _, wrong = commit(s, 1, "11")
    assert proto.outcome_label((com, "1", wrong)) == "punish-1"
    assert proto.outcome_label((com, "1", dec)) == "index-1"
    assert proto.outcome_label((com, "0", dec)) == "index-0"
    # the punishing equilibrium is the mixed one, worth 2/3 to each side
    assert proto.punish[1].payoffs == (F(2, 3), F(2, 3))


def test_dhr_honest_leaf_index_is_uniform():
    nf, eqs, d, s, proto, gg, pruned = _dhr_setup()
    m1, m2 = dhr.honest_p1(s, 1), dhr.honest_p2(1)
    r1 = dhr.representation(m1, nf, d, 2, s)
    r2 = dhr.representation(m2, nf, d, 2, s)
    dist = outcome_distribution(gg.tree, StrategyProfile(r1, r2))
    by_label: dict = {}
    for z, q in dist.items():
        by_label[proto.outcome_label(z)] = by_label.get(proto.outcome_label(z), 0) + q
    assert by_label == {"index-0": F(1, 2), "index-1": F(1, 2)}


def test_dhr_aborts_never_pay():
    nf, eqs, d, s, proto, gg, pruned = _dhr_setup()
    flt = dhr.filters(nf, d, s)
    m1, m2 = dhr.honest_p1(s, 1), dhr.honest_p2(1)
    fams = (dhr.p1_family(s, 1), dhr.p2_family(s, 1, proto))
    v = check_ctfne_at(2, 0, (m1, m2), flt, fams, gg)
    assert v
    honest = expected_payoffs(pruned, v.profile)
    assert honest == (F(3, 2), F(3, 2))
    for i, fam in enumerate(fams, start=1):
        for m in fam:
            if "abort" in m.name:
                u = expected_payoffs(pruned, v.profile.replace(i, flt[i - 1](m, 2, 0).strategy))
                assert u[i - 1] <= honest[i - 1]


def test_dhr_dominated_target_has_a_threat():
    nf, eqs = _bos()
    mixed = next(i for i, e in enumerate(eqs) if not e.is_pure())
    d = dhr.decompose_ce(nf, eqs, {0: F(1, 2), mixed: F(1, 2)})
    s = make_scheme("ideal", 2)
    proto, gg, _ = dhr.dhr_setting(nf, d, 2, s)
    v = check_ctfne_at(2, 0, (dhr.honest_p1(s, 1), dhr.honest_p2(1)), dhr.filters(nf, d, s),
                       (dhr.p1_family(s, 1), dhr.p2_family(s, 1, proto)), gg)
    assert not v


def test_dhr_needs_two_equilibria():
    nf, eqs = _bos()
    d = dhr.decompose_ce(nf, eqs, {0: 1})
    with pytest.raises(ValueError):
        dhr.DHRProtocol(nf, d, 2, make_scheme("ideal", 2))


def test_dhr_monte_carlo_is_deterministic_and_balanced():
    nf, eqs, d, s, proto, gg, pruned = _dhr_setup()
    ms = (dhr.honest_p1(s, 1), dhr.honest_p2(1))
    a = empirical_outcome_distribution(proto, ms, 2, 2000, 3)
    b = empirical_outcome_distribution(proto, ms, 2, 2000, 3)
    assert a == b
    assert abs(a["labels"]["index-0"] / 2000 - 0.5) < 0.05


def test_illegal_message_is_read_as_abort():
    s = make_scheme("ideal", 2)
    proto = coinflip.coinflip_protocol(2, s)
    junk = MachineSpec("junk", 1, 0, lambda k, coins, view: "not-a-commitment")
    res = run_protocol(proto, (junk, coinflip.honest_p2(s)), 2, 0)
    assert res.leaf == (ABORT,) and res.outcome == (0, 1)
