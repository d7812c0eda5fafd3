"""Random games and strategies for property checks.

Everything takes a ``random.Random`` so runs are reproducible from a seed.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .game import (
    ROOT,
    BehavioralStrategy,
    ConstraintSet,
    ExtensiveGame,
    MixedReducedStrategy,
    NormalFormGame,
    count_pure_reduced,
    enumerate_pure_reduced,
)

LABELS = "abcdefgh"


def random_game(
    rng: random.Random,
    depth: int = 3,
    branching: int = 3,
    min_branching: int = 2,
    alternating: bool = True,
    first: int = 1,
    generic: bool = True,
    zero_sum: bool = False,
    stop_prob: float = 0.2,
    spread: int = 60,
) -> ExtensiveGame:
    """A random tree of the given maximum depth.

    Owners alternate by depth when ``alternating`` is set.  With ``generic``
    each player's leaf payoffs are pairwise distinct integers.
    """
    actions, owner, leaves = {}, {}, []

    def grow(h, d):
        if d == depth or (h and rng.random() < stop_prob):
            leaves.append(h)
            return
        k = rng.randint(min_branching, branching)
        actions[h] = tuple(LABELS[:k])
        if alternating:
            owner[h] = first if d % 2 == 0 else 3 - first
        else:
            owner[h] = rng.choice((1, 2))
        for a in actions[h]:
            grow(h + (a,), d + 1)

    grow(ROOT, 0)
    n = len(leaves)
    if generic:
        u1 = rng.sample(range(-spread, spread + 1), n)
        u2 = [-x for x in u1] if zero_sum else rng.sample(range(-spread, spread + 1), n)
    else:
        u1 = [rng.randint(-3, 3) for _ in range(n)]
        u2 = [-x for x in u1] if zero_sum else [rng.randint(-3, 3) for _ in range(n)]
    payoffs = {z: (Fraction(a), Fraction(b)) for z, a, b in zip(leaves, u1, u2)}
    return ExtensiveGame(actions, owner, payoffs)


def random_distribution(rng: random.Random, actions, pure_prob: float = 0.5, denominator: int = 0) -> dict:
    """A point mass with probability ``pure_prob``, else random rational weights."""
    actions = list(actions)
    if len(actions) == 1 or rng.random() < pure_prob:
        return {rng.choice(actions): Fraction(1)}
    denominator = denominator or rng.choice((2, 3, 4, 6, 8))
    while True:
        cuts = sorted(rng.randint(0, denominator) for _ in range(len(actions) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
        if sum(1 for p in parts if p) >= 2:
            break
    return {a: Fraction(p, denominator) for a, p in zip(actions, parts) if p}


def random_behavioral(rng: random.Random, g: ExtensiveGame, player: int, pure_prob: float = 0.5) -> BehavioralStrategy:
    """A full behavioral strategy (defined at every owned history)."""
    return BehavioralStrategy(
        player, {h: random_distribution(rng, g.actions(h), pure_prob) for h in g.owned_by(player)}
    )


def random_reduced(rng: random.Random, g: ExtensiveGame, player: int, pure_prob: float = 0.5) -> BehavioralStrategy:
    return random_behavioral(rng, g, player, pure_prob).restrict(g)


def _mutate_from(rng, g, s: BehavioralStrategy, start_round: int, pure_prob):
    choice = {h: d for h, d in s.items() if len(h) < start_round - 1}
    for h in g.owned_by(s.player):
        if len(h) >= start_round - 1:
            choice[h] = random_distribution(rng, g.actions(h), pure_prob)
    # fill own histories that the copied prefix may now reach
    for h in g.owned_by(s.player):
        if h not in choice:
            choice[h] = random_distribution(rng, g.actions(h), pure_prob)
    return BehavioralStrategy(s.player, choice).restrict(g)


def random_constraint_set(
    rng: random.Random, g: ExtensiveGame, size1: int = 4, size2: int = 4, pure_prob: float = 0.6
) -> ConstraintSet:
    """Constraint lists whose members often share early-round behaviour.

    Each new member copies an earlier one up to a random round and is
    re-randomised from there, so continuation sets are usually not singletons.
    """
    rounds = max(g.num_rounds, 1)
    sides = []
    for player, size in ((1, size1), (2, size2)):
        members = []
        seen = set()
        tries = 0
        while len(members) < size and tries < 20 * size:
            tries += 1
            if members and rng.random() < 0.7:
                s = _mutate_from(rng, g, rng.choice(members), rng.randint(1, rounds), pure_prob)
            else:
                s = random_reduced(rng, g, player, pure_prob)
            if s not in seen:
                seen.add(s)
                members.append(s)
        sides.append(tuple(members))
    return ConstraintSet(*sides)


def random_mixed_reduced(rng: random.Random, g: ExtensiveGame, player: int, max_support: int = 4, limit: int = 50_000) -> MixedReducedStrategy:
    """A mixture over at most ``max_support`` distinct pure reduced strategies."""
    if count_pure_reduced(g, player) <= limit:
        pool = enumerate_pure_reduced(g, player, limit)
        k = min(len(pool), rng.randint(1, max_support))
        picks = rng.sample(pool, k)
    else:
        picks, seen = [], set()
        while len(picks) < rng.randint(1, max_support):
            s = random_reduced(rng, g, player, pure_prob=1.0)
            if s not in seen:
                seen.add(s)
                picks.append(s)
    raw = [rng.randint(1, 6) for _ in picks]
    total = sum(raw)
    return MixedReducedStrategy(player, tuple((s, Fraction(w, total)) for s, w in zip(picks, raw)))


def random_bimatrix(rng: random.Random, rows: int = 2, cols: int = 2, spread: int = 9) -> NormalFormGame:
    a = [[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)]
    b = [[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)]
    return NormalFormGame.from_matrices(a, b)
