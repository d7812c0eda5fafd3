"""Slow, definition-literal reference implementations.

These enumerate instead of reasoning and are only meant for cross-checking the
fast routines on small games.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .errors import EnumerationTooLarge
from .game import (
    BehavioralStrategy,
    ConstraintSet,
    ExtensiveGame,
    StrategyProfile,
    as_fraction,
    expected_payoffs,
    pure_strategy,
)

# ---------------------------------------------------------------------------
# vanilla threats, conditional semantics, by enumeration


def _strict_desc(g, h):
    n = len(h)
    return [x for x in g.nonterminals() if len(x) > n and x[:n] == h]


def _trace(g, h, first, assignment):
    x = h + (first,)
    while not g.is_terminal(x):
        x = x + (assignment[x],)
    return g.payoff(x)


def _assignments(g, nodes, limit):
    total = 1
    for x in nodes:
        total *= len(g.actions(x))
        if total > limit:
            raise EnumerationTooLarge(f"more than {limit} pure continuations")
    for combo in product(*(g.actions(x) for x in nodes)):
        yield dict(zip(nodes, combo))


def assignment_count(g: ExtensiveGame, h) -> int:
    total = 1
    for x in _strict_desc(g, tuple(h)):
        total *= len(g.actions(x))
    return total


class Prop1Oracle:
    """Enumerates every pure continuation below a history and filters threat-freeness.

    Threats compare conditional payoffs from the threatened history.  The set of
    threat-free members of Cont(y, ., a) is computed by enumeration and must be
    a singleton for the definition to make sense; violations are recorded.
    """

    def __init__(self, g: ExtensiveGame, limit: int = 20_000):
        self.g = g
        self.limit = limit
        self._members: dict = {}
        self._threat: dict = {}
        self.anomalies = []

    def tf_members(self, y, a):
        """Pure assignments below ``y`` that, with ``a`` at ``y``, are threat-free on ``y``."""
        key = (y, a)
        if key not in self._members:
            nodes = _strict_desc(self.g, y)
            found = [beta for beta in _assignments(self.g, nodes, self.limit) if self.is_tf(nodes, beta)]
            if len(found) != 1:
                self.anomalies.append((y, a, len(found)))
            self._members[key] = found
        return self._members[key]

    def is_tf(self, nodes, beta) -> bool:
        return all(not self.threatened(z, beta[z]) for z in nodes)

    def value(self, y, a):
        i = self.g.player(y)
        vals = [_trace(self.g, y, a, beta)[i - 1] for beta in self.tf_members(y, a)]
        return vals[0] if vals else None

    def threatened(self, y, prescribed) -> bool:
        key = (y, prescribed)
        if key not in self._threat:
            base = self.value(y, prescribed)
            self._threat[key] = any(self.value(y, a) > base for a in self.g.actions(y) if a != prescribed)
        return self._threat[key]

    def continuations(self, sigma: StrategyProfile, h, tau) -> list:
        """All threat-free members of Cont(h, sigma, tau) as profiles."""
        h = tuple(h)
        if isinstance(tau, str):
            tau = {tau: 1}
        nodes = _strict_desc(self.g, h)
        out = []
        n = len(h)
        for beta in _assignments(self.g, nodes, self.limit):
            if not self.is_tf(nodes, beta):
                continue
            parts = []
            for i in (1, 2):
                choice = {x: d for x, d in sigma[i].items() if x[:n] != h}
                if self.g.player(h) == i:
                    choice[h] = tau
                for x, a in beta.items():
                    if self.g.player(x) == i:
                        choice[x] = {a: 1}
                parts.append(BehavioralStrategy(i, choice))
            out.append(StrategyProfile(*parts))
        return out


# ---------------------------------------------------------------------------
# round-parameterised threats by direct recursion


def _component(s: BehavioralStrategy, r: int) -> dict:
    return {h: dict(d) for h, d in s.items() if len(h) == r - 1}


class BruteRoundThreats:
    """Literal recursion over all profiles of a constraint set.

    ``cache`` stores results for the lifetime of the object only; with
    ``cache=False`` every query recomputes from scratch.
    """

    def __init__(self, g: ExtensiveGame, t: ConstraintSet, eps=0, cache: bool = True):
        self.g = g
        self.t = t
        self.eps = as_fraction(eps)
        self.cache = {} if cache else None
        self.n = g.num_rounds
        self.profiles = [StrategyProfile(a, b) for a in t.t1 for b in t.t2]
        self.pay = [expected_payoffs(g, p) for p in self.profiles]
        self.comp = [
            {r: (_component(p.s1, r), _component(p.s2, r)) for r in range(1, self.n + 1)}
            for p in self.profiles
        ]

    def owner(self, r):
        return self.g.round_owner(r)

    def same(self, q, p, r) -> bool:
        i = self.owner(r)
        return self.comp[q][r][i - 1] == self.comp[p][r][i - 1]

    def threatened(self, p: int, s: int) -> bool:
        if self.cache is not None and (p, s) in self.cache:
            return self.cache[(p, s)]
        i = self.owner(s)
        base = [q for q in range(len(self.profiles)) if all(self.same(q, p, r) for r in range(1, s))]
        stay = [q for q in base if self.same(q, p, s) and self.threat_free(q, s)]
        verdict = False
        for d in base:
            dev = [q for q in base if self.same(q, d, s) and self.threat_free(q, s)]
            if dev and all(self.pay[a][i - 1] > self.pay[b][i - 1] + self.eps for a in dev for b in stay):
                verdict = True
                break
        if self.cache is not None:
            self.cache[(p, s)] = verdict
        return verdict

    def threat_free(self, p: int, r: int) -> bool:
        return all(not self.threatened(p, s) for s in range(r + 1, self.n + 1))

    def index(self, prof: StrategyProfile) -> int:
        return self.profiles.index(prof)


# ---------------------------------------------------------------------------
# other oracles


def tree_walk_payoff(g: ExtensiveGame, p: StrategyProfile, i: int, h=()) -> Fraction:
    """Expected payoff by plain recursion (independent of the outcome routines)."""
    if g.is_terminal(h):
        return g.payoff(h)[i - 1]
    d = p[g.player(h)][h]
    return sum((w * tree_walk_payoff(g, p, i, h + (a,)) for a, w in d.items()), Fraction(0))


def monte_carlo_outcomes(g: ExtensiveGame, p: StrategyProfile, runs: int, seed: int) -> dict:
    """Empirical leaf frequencies from sampled plays."""
    rng = np.random.default_rng(seed)
    counts: dict = {}
    for _ in range(runs):
        h = ()
        while not g.is_terminal(h):
            d = p[g.player(h)][h]
            acts = list(d)
            probs = np.array([float(d[a]) for a in acts])
            h = h + (acts[rng.choice(len(acts), p=probs / probs.sum())],)
        counts[h] = counts.get(h, 0) + 1
    return counts


def all_pure_profiles(g: ExtensiveGame, limit: int = 200_000):
    """Every pure full profile of a small game."""
    nodes = g.nonterminals()
    for beta in _assignments(g, nodes, limit):
        yield StrategyProfile(
            pure_strategy(1, {x: a for x, a in beta.items() if g.player(x) == 1}),
            pure_strategy(2, {x: a for x, a in beta.items() if g.player(x) == 2}),
        )
