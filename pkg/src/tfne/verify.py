"""Randomized property suites that cross-check the fast routines against oracles.

Every suite is seeded, uses exact arithmetic and returns a :class:`SuiteResult`
listing the failing trials.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .equilibria import (
    is_epsilon_ne,
    is_epsilon_safe,
    is_weakly_pareto_optimal,
    spe_backward_induction,
)
from .game import (
    StrategyProfile,
    count_pure_reduced,
    enumerate_pure_reduced,
    mixed_to_behavioral,
    outcome_distribution,
)
from .oracles import BruteRoundThreats, Prop1Oracle, all_pure_profiles, assignment_count
from .random_games import (
    random_behavioral,
    random_constraint_set,
    random_distribution,
    random_game,
    random_mixed_reduced,
)
from .threats import EpsilonThreatCalculus, RoundStrategy, enumerate_cont, is_eps_tfne, is_tfne, threat_free_continuation

EPSILONS = (Fraction(0), Fraction(1, 10))


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)
    summary: str = ""

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed == self.total


def prop1(trials: int = 200, seed: int = 7, max_assignments: int = 4096) -> SuiteResult:
    """Unique threat-free continuation versus brute-force filtering.

    Each trial draws a generic game of depth at most 4 and branching at most 3,
    a full random profile, a decision history whose subtree can be enumerated,
    and a deviation distribution.  The brute-force filter must find exactly one
    threat-free continuation and it must equal the constructed one.
    """
    rng = random.Random(seed)
    res = SuiteResult("prop1")
    for trial in range(trials):
        g = random_game(rng, depth=rng.randint(1, 4), branching=3)
        sigma = StrategyProfile(random_behavioral(rng, g, 1), random_behavioral(rng, g, 2))
        sites = [h for h in g.nonterminals() if assignment_count(g, h) <= max_assignments]
        h = rng.choice(sites)
        tau = random_distribution(rng, g.actions(h))
        mine = threat_free_continuation(g, sigma, h, tau)
        found = Prop1Oracle(g, limit=max_assignments).continuations(sigma, h, tau)
        res.total += 1
        if len(found) == 1 and found[0] == mine:
            res.passed += 1
        else:
            res.failures.append((trial, h, len(found)))
    res.summary = f"{res.passed}/{res.total} unique threat-free continuations matched"
    return res


def prop2(trials: int = 200, seed: int = 7, max_size: int = 6) -> SuiteResult:
    """Existence of ε-threat-free continuations in every nonempty continuation set.

    For every profile, round and candidate last-round behaviour drawn from the
    constraint set, the continuation set is enumerated by direct filtering, the
    constructive witness is taken from the calculus, and the witness is
    rechecked by the literal recursion of the brute-force oracle.
    """
    rng = random.Random(seed)
    res = SuiteResult("prop2")
    empty = 0
    for trial in range(trials):
        g = random_game(rng, depth=rng.randint(2, 4), branching=3)
        t = random_constraint_set(rng, g, rng.randint(1, max_size), rng.randint(1, max_size))
        for eps in EPSILONS:
            calc = EpsilonThreatCalculus(g, t, eps)
            brute = BruteRoundThreats(g, t, eps)
            seen = set()
            for p in calc.profiles:
                prof = calc.profile(p)
                for r in range(1, calc.n + 1):
                    prefix = tuple(RoundStrategy.of(prof[g.round_owner(s)], s) for s in range(1, r))
                    i = g.round_owner(r)
                    lasts = {RoundStrategy.of(s, r) for s in t[i]}
                    for last in lasts:
                        key = (tuple(x.key() for x in prefix), last.key(), r)
                        if key in seen:
                            continue
                        seen.add(key)
                        cont = enumerate_cont(g, t, prefix, last)
                        wit = calc.exists_tf([x.key() for x in prefix], last.key())
                        if not cont.members:
                            empty += 1
                            if wit is not None:
                                res.failures.append((trial, eps, r, "witness for an empty set"))
                            continue
                        res.total += 1
                        if wit is None:
                            res.failures.append((trial, eps, r, "no witness"))
                            continue
                        w = calc.profile(wit)
                        if w not in cont.members:
                            res.failures.append((trial, eps, r, "witness outside the set"))
                        elif not brute.threat_free(brute.index(w), r):
                            res.failures.append((trial, eps, r, "witness not threat-free"))
                        else:
                            res.passed += 1
    res.summary = f"{res.passed}/{res.total} nonempty continuation sets had a certified threat-free member ({empty} empty sets seen)"
    return res


def general(trials: int = 200, seed: int = 7, max_size: int = 4) -> SuiteResult:
    """ε-NE, weak Pareto optimality and ε-safety together imply ε-TFNE."""
    rng = random.Random(seed)
    res = SuiteResult("general")
    checked = 0
    for trial in range(trials):
        g = random_game(rng, depth=rng.randint(2, 4), branching=3, generic=rng.random() < 0.5)
        t = random_constraint_set(rng, g, rng.randint(1, max_size), rng.randint(1, max_size))
        eps = rng.choice(EPSILONS)
        calc = EpsilonThreatCalculus(g, t, eps)
        for p in t.profiles():
            checked += 1
            if not (is_epsilon_ne(g, t, p, eps) and is_weakly_pareto_optimal(g, t, p) and is_epsilon_safe(g, t, p, eps)):
                continue
            res.total += 1
            if is_eps_tfne(g, t, p, eps, calc=calc):
                res.passed += 1
            else:
                res.failures.append((trial, eps, p))
    res.summary = f"{res.passed}/{res.total} profiles meeting the hypotheses were ε-threat-free ({checked} profiles scanned)"
    return res


def zerosum(trials: int = 100, seed: int = 7, max_size: int = 4) -> SuiteResult:
    """In zero-sum constrained games every ε-NE in the constraint set is ε-threat-free."""
    rng = random.Random(seed)
    res = SuiteResult("zerosum")
    for trial in range(trials):
        g = random_game(rng, depth=rng.randint(2, 4), branching=3, zero_sum=True, generic=rng.random() < 0.5)
        t = random_constraint_set(rng, g, rng.randint(1, max_size), rng.randint(1, max_size))
        eps = rng.choice(EPSILONS)
        calc = EpsilonThreatCalculus(g, t, eps)
        for p in t.profiles():
            if not is_epsilon_ne(g, t, p, eps):
                continue
            res.total += 1
            if is_eps_tfne(g, t, p, eps, calc=calc):
                res.passed += 1
            else:
                res.failures.append((trial, eps, p))
    res.summary = f"{res.passed}/{res.total} zero-sum ε-equilibria were ε-threat-free"
    return res


def tfne_spe(trials: int = 100, seed: int = 7, mode: str = "unconditional") -> SuiteResult:
    """Every pure threat-free equilibrium has the backward-induction outcome."""
    rng = random.Random(seed)
    res = SuiteResult("tfne-spe")
    scanned = 0
    for trial in range(trials):
        g = random_game(rng, depth=rng.randint(1, 3), branching=3)
        target = outcome_distribution(g, spe_backward_induction(g))
        for p in all_pure_profiles(g):
            scanned += 1
            if not is_tfne(g, p, mode=mode):
                continue
            res.total += 1
            if outcome_distribution(g, p) == target:
                res.passed += 1
            else:
                res.failures.append((trial, p))
    res.summary = f"{res.passed}/{res.total} pure threat-free equilibria matched the backward-induction outcome ({scanned} profiles scanned)"
    return res


def mixbeh(trials: int = 100, seed: int = 7, max_opponents: int = 3000) -> SuiteResult:
    """Mixed reduced strategies and their behavioral form give identical outcomes.

    Depth-4 games whose opponent has more than ``max_opponents`` pure reduced
    strategies are redrawn, so that the opponent side can be enumerated.
    """
    rng = random.Random(seed)
    res = SuiteResult("mixbeh")
    for trial in range(trials):
        player = rng.choice((1, 2))
        while True:
            g = random_game(rng, depth=4, branching=3, stop_prob=0.3)
            if count_pure_reduced(g, 3 - player) <= max_opponents:
                break
        m = random_mixed_reduced(rng, g, player)
        b = mixed_to_behavioral(g, m)
        res.total += 1
        bad = None
        for opp in enumerate_pure_reduced(g, 3 - player):
            want: dict = {}
            for s, w in m.support:
                prof = StrategyProfile(s, opp) if player == 1 else StrategyProfile(opp, s)
                for z, q in outcome_distribution(g, prof).items():
                    want[z] = want.get(z, 0) + w * q
            want = {z: q for z, q in want.items() if q}
            got = outcome_distribution(g, StrategyProfile(b, opp) if player == 1 else StrategyProfile(opp, b))
            if got != want:
                bad = opp
                break
        if bad is None:
            res.passed += 1
        else:
            res.failures.append((trial, bad))
    res.summary = f"{res.passed}/{res.total} behavioral forms were outcome-equivalent to their mixtures"
    return res


SUITES = {
    "prop1": prop1,
    "prop2": prop2,
    "general": general,
    "zerosum": zerosum,
    "tfne-spe": tfne_spe,
    "mixbeh": mixbeh,
}
