"""Protocol rules, machine execution and strategic representations."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import EnumerationTooLarge, MachineFiltered, TooLarge
from ..game import (
    ABORT,
    ROOT,
    BehavioralStrategy,
    ConstraintSet,
    ExtensiveGame,
    GSMLGame,
    LeafGame,
    MixedReducedStrategy,
    StrategyProfile,
    mixed_to_behavioral,
    pure_strategy,
)
from ..machine import MachineSpec
from ..threats import is_eps_tfne, is_gsml_eps_tfne


class Protocol:
    """Message rules of a two-party protocol at a fixed parameter.

    Subclasses describe legality and outcomes history by history, so machines
    can be run without building the tree.  :meth:`materialize` builds the full
    game for exhaustive analysis.
    """

    max_leaves = 100_000

    def is_terminal(self, h) -> bool:
        raise NotImplementedError

    def owner(self, h) -> int:
        raise NotImplementedError

    def all_actions(self, h) -> tuple:
        raise NotImplementedError

    def is_legal(self, h, a) -> bool:
        return a in self.all_actions(h)

    def outcome(self, h):
        """Payoff pair, or a :class:`LeafGame` for protocols ending in stage games."""
        raise NotImplementedError

    def outcome_label(self, h) -> str:
        return "/".join(h)

    def view(self, player: int, h) -> tuple:
        return tuple(h)

    def count_leaves(self) -> int:
        def count(h):
            if self.is_terminal(h):
                return 1
            return sum(count(h + (a,)) for a in self.all_actions(h))

        return count(ROOT)

    def materialize(self):
        actions, owner, payoffs, stage = {}, {}, {}, {}
        n = 0
        stack = [ROOT]
        while stack:
            h = stack.pop()
            if self.is_terminal(h):
                n += 1
                if n > self.max_leaves:
                    raise TooLarge(f"game tree exceeds {self.max_leaves} leaves")
                out = self.outcome(h)
                if isinstance(out, LeafGame):
                    stage[h] = out
                else:
                    payoffs[h] = out
                continue
            acts = tuple(self.all_actions(h))
            actions[h] = acts
            owner[h] = self.owner(h)
            stack.extend(h + (a,) for a in reversed(acts))
        g = ExtensiveGame(actions, owner, payoffs)
        if stage:
            return GSMLGame(g, stage)
        return g


def _tree(game):
    return game.tree if isinstance(game, GSMLGame) else game


def _respond(m: MachineSpec, k, coins, view, legal, h):
    msg = m.next_message(k, coins, view)
    if legal(h, msg):
        return msg
    if legal(h, ABORT):
        return ABORT
    raise ValueError(f"machine {m.name!r} sent illegal {msg!r} at {'/'.join(h) or '/'} and abort is unavailable")


def induced_pure_strategies(m: MachineSpec, k: int, game, view=None, limit: int = 1 << 20) -> Counter:
    """Counts of the pure reduced strategies a machine plays over its coin space."""
    g = _tree(game)
    view = view or (lambda player, h: tuple(h))
    counts: Counter = Counter()
    legal = lambda h, a: a in g.actions(h)
    for coins in m.coin_space(k, limit):
        moves = {}
        cache = {}
        stack = [ROOT]
        while stack:
            h = stack.pop()
            if g.is_terminal(h):
                continue
            if g.player(h) == m.player:
                v = view(m.player, h)
                if v not in cache:
                    cache[v] = m.next_message(k, coins, v)
                a = cache[v]
                if not legal(h, a):
                    a = _respond(m, k, coins, v, legal, h)
                moves[h] = a
                stack.append(h + (a,))
            else:
                stack.extend(g.children(h))
        counts[frozenset(moves.items())] += 1
    return counts


def strategic_representation(m: MachineSpec, k: int, game, view=None, limit: int = 1 << 20) -> BehavioralStrategy:
    """The behavioral reduced strategy outcome-equivalent to the machine.

    Every coin vector yields one pure reduced strategy; the uniform mixture over
    coin vectors is converted to behavioral form.
    """
    g = _tree(game)
    counts = induced_pure_strategies(m, k, game, view, limit)
    total = sum(counts.values())
    mix = MixedReducedStrategy(
        m.player,
        tuple((pure_strategy(m.player, dict(moves)), Fraction(c, total)) for moves, c in counts.items()),
    )
    return mixed_to_behavioral(g, mix)


def machine_outcome_distribution(m: MachineSpec, k: int, game, opponent: BehavioralStrategy, view=None) -> dict:
    """Exact leaf distribution from running the machine on every coin vector."""
    g = _tree(game)
    view = view or (lambda player, h: tuple(h))
    out: dict = {}
    space = list(m.coin_space(k))
    weight = Fraction(1, len(space))
    legal = lambda h, a: a in g.actions(h)
    for coins in space:
        stack = [(ROOT, weight)]
        while stack:
            h, w = stack.pop()
            if g.is_terminal(h):
                out[h] = out.get(h, 0) + w
                continue
            if g.player(h) == m.player:
                a = _respond(m, k, coins, view(m.player, h), legal, h)
                stack.append((h + (a,), w))
            else:
                for a, q in opponent[h].items():
                    stack.append((h + (a,), w * q))
    return out


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class RunResult:
    transcript: tuple
    leaf: tuple
    outcome: object

    def text(self) -> str:
        return "".join(line + "\n" for line in self.transcript)


def _run_once(protocol: Protocol, machines, k, coins):
    h = ROOT
    lines = []
    while not protocol.is_terminal(h):
        i = protocol.owner(h)
        a = _respond(machines[i - 1], k, coins[i - 1], protocol.view(i, h), protocol.is_legal, h)
        lines.append(f"round {len(h) + 1} player {i}: {a}")
        h = h + (a,)
    return tuple(lines), h


def run_protocol(protocol: Protocol, machines, k: int, seed: int) -> RunResult:
    """One seeded execution; identical seeds give identical transcripts."""
    rng = np.random.default_rng(seed)
    coins = [tuple(int(c) for c in rng.integers(0, m.coin_base, size=m.coin_count(k))) for m in machines]
    lines, leaf = _run_once(protocol, machines, k, coins)
    return RunResult(lines, leaf, protocol.outcome(leaf))


def empirical_outcome_distribution(protocol: Protocol, machines, k: int, runs: int, seed: int) -> dict:
    """Frequencies over leaves and over outcome labels from ``runs`` seeded executions."""
    rng = np.random.default_rng(seed)
    tables = [rng.integers(0, m.coin_base, size=(runs, m.coin_count(k))).tolist() for m in machines]
    leaves: Counter = Counter()
    labels: Counter = Counter()
    for r in range(runs):
        _, leaf = _run_once(protocol, machines, k, [tuple(tables[0][r]), tuple(tables[1][r])])
        leaves[leaf] += 1
    for leaf, c in leaves.items():
        labels[protocol.outcome_label(leaf)] += c
    return {"runs": runs, "leaves": leaves, "labels": labels}


# ---------------------------------------------------------------------------
# filters and tractable sets


@dataclass(frozen=True)
class FilterOutcome:
    """Either a rejection or the machine's strategic representation."""

    machine: str
    rejected: bool
    strategy: BehavioralStrategy | None = None
    detail: str = ""

    def __bool__(self):
        return not self.rejected


def tractable_set(flt, family, k: int, eps) -> tuple:
    """Distinct non-rejected filter outputs over the family, in family order."""
    out, seen = [], set()
    for m in family:
        res = flt(m, k, eps)
        if not res.rejected and res.strategy not in seen:
            seen.add(res.strategy)
            out.append(res.strategy)
    return tuple(out)


def covering_check(flt, family, eps, k_range) -> dict:
    """Per machine, the least ``k`` in the range from which it is never rejected (None if rejected at the end)."""
    ks = sorted(k_range)
    report = {}
    for m in family:
        ok = [not flt(m, k, eps).rejected for k in ks]
        k0 = None
        for idx in range(len(ks) - 1, -1, -1):
            if not ok[idx]:
                break
            k0 = ks[idx]
        report[m.name] = k0
    return report


@dataclass(frozen=True)
class CTFNEVerdict:
    holds: bool
    constraints: ConstraintSet
    profile: StrategyProfile
    detail: object = field(default=None)

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        return "passes" if self.holds else self.detail.describe()


def check_ctfne_at(k: int, eps, machines, filters, families, game, calc=None) -> CTFNEVerdict:
    """The single-(k, eps) instance of the computational TFNE condition.

    Both prescribed machines must survive their filters; the constraint sets are
    the tractable sets of the families, and the prescribed representations must
    form an ε-TFNE of the constrained game.
    """
    reps = []
    for i, (m, flt) in enumerate(zip(machines, filters), start=1):
        res = flt(m, k, eps)
        if res.rejected:
            raise MachineFiltered(i, m.name)
        reps.append(res.strategy)
    sides = []
    for i, (flt, fam) in enumerate(zip(filters, families), start=1):
        side = tractable_set(flt, fam, k, eps)
        if reps[i - 1] not in side:
            side = (reps[i - 1],) + side
        sides.append(side)
    t = ConstraintSet(*sides)
    sigma = StrategyProfile(*reps)
    if isinstance(game, GSMLGame):
        verdict = is_gsml_eps_tfne(game, t, sigma, eps, calc=calc)
    else:
        verdict = is_eps_tfne(game, t, sigma, eps, calc=calc)
    return CTFNEVerdict(bool(verdict), t, sigma, verdict)
