"""Exact finite two-player extensive games, strategies and outcomes.

Histories are tuples of action labels.  All probabilities and payoffs are
``fractions.Fraction``; floats are rejected so that strict comparisons stay
meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping

from .errors import (
    EnumerationTooLarge,
    NotAHistory,
    TerminalHistory,
    UncoveredHistory,
    format_history,
)

History = tuple
ROOT: History = ()
ABORT = "abort"


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"inexact value {x!r}; use int, Fraction or 'a/b'")


def other(player: int) -> int:
    return 3 - player


# ---------------------------------------------------------------------------
# games


class ExtensiveGame:
    """A finite game tree ``(H, P, A, u)``.

    ``actions`` maps every non-terminal history to its ordered action labels,
    ``owner`` maps it to the mover, and ``payoffs`` maps terminal histories to
    ``(u1, u2)``.  The constructor does not reject malformed input; call
    :func:`validate_game` for a report.
    """

    def __init__(self, actions: Mapping, owner: Mapping, payoffs: Mapping, alternating: bool | None = None):
        self._actions = {tuple(h): tuple(a) for h, a in actions.items()}
        self._owner = {tuple(h): int(p) for h, p in owner.items()}
        self._payoffs = {
            tuple(h): (as_fraction(u[0]), as_fraction(u[1])) for h, u in payoffs.items()
        }
        order = []
        stack = [ROOT]
        while stack:
            h = stack.pop()
            order.append(h)
            for a in reversed(self._actions.get(h, ())):
                stack.append(h + (a,))
        self._order = order
        self._set = frozenset(order)
        self._alternating_flag = alternating
        self._round_owner = self._detect_rounds()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_tree(cls, tree, alternating=None) -> "ExtensiveGame":
        """Build from nested :func:`node` / :func:`leaf` values."""
        actions, owner, payoffs = {}, {}, {}

        def walk(h, t):
            if isinstance(t, _Leaf):
                payoffs[h] = t.payoff
                return
            owner[h] = t.player
            actions[h] = tuple(t.children)
            for a, child in t.children.items():
                walk(h + (a,), child)

        walk(ROOT, tree)
        return cls(actions, owner, payoffs, alternating=alternating)

    # -- structure --------------------------------------------------------------

    def histories(self) -> list:
        """All histories in depth-first preorder (children in action order)."""
        return list(self._order)

    def nonterminals(self) -> list:
        return [h for h in self._order if h in self._actions]

    def terminals(self) -> list:
        return [h for h in self._order if h not in self._actions]

    def __contains__(self, h) -> bool:
        return tuple(h) in self._set

    def __len__(self) -> int:
        return len(self._order)

    def is_terminal(self, h) -> bool:
        h = tuple(h)
        if h not in self._set:
            raise NotAHistory(f"{format_history(h)} is not a history of the game")
        return h not in self._actions

    def actions(self, h) -> tuple:
        return self._actions.get(tuple(h), ())

    def player(self, h) -> int:
        return self._owner[tuple(h)]

    def payoff(self, h) -> tuple:
        return self._payoffs[tuple(h)]

    def has_payoff(self, h) -> bool:
        return tuple(h) in self._payoffs

    def children(self, h) -> list:
        h = tuple(h)
        return [h + (a,) for a in self._actions.get(h, ())]

    def subtree(self, h) -> list:
        """``h`` and all its descendants, preorder."""
        h = tuple(h)
        n = len(h)
        return [x for x in self._order if x[:n] == h]

    def owned_by(self, player: int) -> list:
        return [h for h in self._order if h in self._actions and self._owner.get(h) == player]

    @property
    def raw(self):
        return self._actions, self._owner, self._payoffs

    # -- rounds -----------------------------------------------------------------

    def _detect_rounds(self):
        by_round: dict[int, set] = {}
        for h in self._order:
            if h in self._actions:
                by_round.setdefault(len(h) + 1, set()).add(self._owner.get(h))
        rounds = {}
        for r in sorted(by_round):
            owners = by_round[r]
            if len(owners) != 1:
                return None
            rounds[r] = next(iter(owners))
        keys = sorted(rounds)
        if keys != list(range(1, len(keys) + 1)):
            return None
        for r in keys[1:]:
            if rounds[r] == rounds[r - 1]:
                return None
        return rounds

    @property
    def alternating(self) -> bool:
        if self._alternating_flag is not None:
            return self._alternating_flag
        return self._round_owner is not None

    @property
    def num_rounds(self) -> int:
        depths = [len(h) for h in self._actions if h in self._set]
        return max(depths) + 1 if depths else 0

    def round_owner(self, r: int) -> int:
        if self._round_owner is None:
            raise ValueError("rounds are only defined for alternating games")
        return self._round_owner[r]

    def is_generic(self) -> bool:
        """Each player's payoffs are pairwise distinct across leaves."""
        leaves = self.terminals()
        for i in (0, 1):
            vals = [self._payoffs[z][i] for z in leaves if z in self._payoffs]
            if len(set(vals)) != len(vals):
                return False
        return True

    def is_zero_sum(self) -> bool:
        return all(u[0] + u[1] == 0 for u in self._payoffs.values())

    # -- comparison ---------------------------------------------------------------

    def _key(self):
        return (
            tuple((h, self._owner.get(h), self._actions[h]) for h in self._order if h in self._actions),
            tuple((z, self._payoffs.get(z)) for z in self._order if z not in self._actions),
        )

    def __eq__(self, other):
        if not isinstance(other, ExtensiveGame):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"ExtensiveGame({len(self.nonterminals())} decision nodes, {len(self.terminals())} leaves)"


@dataclass(frozen=True)
class _Leaf:
    payoff: tuple


@dataclass(frozen=True)
class _Node:
    player: int
    children: dict


def leaf(u1, u2) -> _Leaf:
    return _Leaf((as_fraction(u1), as_fraction(u2)))


def node(player: int, children: Mapping) -> _Node:
    return _Node(int(player), dict(children))


def validate_game(g: ExtensiveGame) -> list[str]:
    """Return a list of violations; empty iff ``g`` is well formed."""
    actions, owner, payoffs = g.raw
    problems = []
    for h in g.histories():
        if h in actions:
            acts = actions[h]
            if not acts:
                problems.append(f"{format_history(h)}: non-terminal history has no actions")
            if len(set(acts)) != len(acts):
                problems.append(f"{format_history(h)}: duplicate action labels")
            if owner.get(h) not in (1, 2):
                problems.append(f"{format_history(h)}: owner must be 1 or 2, got {owner.get(h)!r}")
            if h in payoffs:
                problems.append(f"{format_history(h)}: non-terminal history carries payoffs")
            for a in acts:
                if not isinstance(a, str) or not a:
                    problems.append(f"{format_history(h)}: action label {a!r} is not a nonempty string")
        elif h not in payoffs:
            problems.append(f"{format_history(h)}: terminal history lacks payoffs")
    reachable = set(g.histories())
    for h in payoffs:
        if h not in reachable:
            problems.append(f"{format_history(h)}: payoff attached to a history outside the tree")
    for h in actions:
        if h not in reachable:
            problems.append(f"{format_history(h)}: actions attached to a history outside the tree")
    if g._alternating_flag and g._round_owner is None:
        problems.append("/: game is flagged alternating but owners do not alternate by round")
    return problems


def subgame(g: ExtensiveGame, h) -> ExtensiveGame:
    """The game that starts at the non-terminal history ``h``."""
    h = tuple(h)
    if h not in g:
        raise NotAHistory(f"{format_history(h)} is not a history of the game")
    if g.is_terminal(h):
        raise TerminalHistory(f"{format_history(h)} is terminal")
    n = len(h)
    actions, owner, payoffs = g.raw
    sub = g.subtree(h)
    return ExtensiveGame(
        {x[n:]: actions[x] for x in sub if x in actions},
        {x[n:]: owner[x] for x in sub if x in actions},
        {x[n:]: payoffs[x] for x in sub if x in payoffs},
    )


# ---------------------------------------------------------------------------
# strategies


def _freeze_dist(dist: Mapping) -> dict:
    out = {}
    for a, w in dist.items():
        w = as_fraction(w)
        if w < 0:
            raise ValueError(f"negative probability {w} for action {a!r}")
        if w:
            out[a] = w
    if sum(out.values()) != 1:
        raise ValueError(f"distribution {dict(dist)!r} does not sum to 1")
    return out


class BehavioralStrategy:
    """Per-history action distributions for one player.

    The domain may be partial.  A *reduced* strategy is defined exactly on the
    owned histories that its own earlier positive-probability choices do not
    rule out; :meth:`restrict` produces that form from any larger domain.
    """

    __slots__ = ("player", "_choice", "_key")

    def __init__(self, player: int, choice: Mapping):
        if player not in (1, 2):
            raise ValueError("player must be 1 or 2")
        self.player = player
        self._choice = {tuple(h): _freeze_dist(d) for h, d in choice.items()}
        self._key = None

    def __getitem__(self, h) -> dict:
        return self._choice[tuple(h)]

    def get(self, h, default=None):
        return self._choice.get(tuple(h), default)

    def __contains__(self, h) -> bool:
        return tuple(h) in self._choice

    def domain(self) -> list:
        return list(self._choice)

    def items(self):
        return self._choice.items()

    def __len__(self):
        return len(self._choice)

    def is_pure(self) -> bool:
        return all(len(d) == 1 for d in self._choice.values())

    def action(self, h) -> str:
        d = self._choice[tuple(h)]
        if len(d) != 1:
            raise ValueError(f"strategy is mixed at {format_history(h)}")
        return next(iter(d))

    def prob(self, h, a) -> Fraction:
        return self._choice[tuple(h)].get(a, Fraction(0))

    def restrict(self, g: ExtensiveGame) -> "BehavioralStrategy":
        """Drop every history its own earlier choices make unreachable."""
        keep = {}
        stack = [ROOT]
        while stack:
            h = stack.pop()
            if g.is_terminal(h):
                continue
            if g.player(h) == self.player:
                if h not in self._choice:
                    continue
                d = self._choice[h]
                keep[h] = d
                stack.extend(h + (a,) for a in d)
            else:
                stack.extend(g.children(h))
        return BehavioralStrategy(self.player, keep)

    def replaced(self, updates: Mapping, drop: Iterable = ()) -> "BehavioralStrategy":
        choice = dict(self._choice)
        for h in drop:
            choice.pop(tuple(h), None)
        for h, d in updates.items():
            choice[tuple(h)] = d
        return BehavioralStrategy(self.player, choice)

    def key(self):
        if self._key is None:
            self._key = (
                self.player,
                frozenset((h, frozenset(d.items())) for h, d in self._choice.items()),
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, BehavioralStrategy):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        body = ", ".join(
            f"{format_history(h)}: {{{', '.join(f'{a}={w}' for a, w in d.items())}}}"
            for h, d in sorted(self._choice.items())
        )
        return f"BehavioralStrategy(player={self.player}, {{{body}}})"


ReducedBehavioralStrategy = BehavioralStrategy


def pure_strategy(player: int, moves: Mapping) -> BehavioralStrategy:
    return BehavioralStrategy(player, {h: {a: 1} for h, a in moves.items()})


def validate_strategy(g: ExtensiveGame, s: BehavioralStrategy, reduced: bool = True) -> list[str]:
    problems = []
    for h, d in s.items():
        if h not in g or g.is_terminal(h):
            problems.append(f"{format_history(h)}: not a decision history")
            continue
        if g.player(h) != s.player:
            problems.append(f"{format_history(h)}: owned by player {g.player(h)}")
        bad = set(d) - set(g.actions(h))
        if bad:
            problems.append(f"{format_history(h)}: unknown actions {sorted(bad)}")
    if reduced and not problems and s.restrict(g) != s:
        problems.append("domain violates the reduced-strategy closure condition")
    return problems


@dataclass(frozen=True)
class MixedReducedStrategy:
    """A finite distribution over pure reduced strategies of one player."""

    player: int
    support: tuple

    def __post_init__(self):
        items = tuple((s, as_fraction(w)) for s, w in self.support)
        object.__setattr__(self, "support", items)
        if any(s.player != self.player for s, _ in items):
            raise ValueError("support strategies belong to another player")
        if any(not s.is_pure() for s, _ in items):
            raise ValueError("support must consist of pure reduced strategies")
        if any(w < 0 for _, w in items) or sum(w for _, w in items) != 1:
            raise ValueError("mixture weights must be a probability vector")


@dataclass(frozen=True)
class StrategyProfile:
    s1: BehavioralStrategy
    s2: BehavioralStrategy

    def __post_init__(self):
        if self.s1.player != 1 or self.s2.player != 2:
            raise ValueError("profile components must belong to players 1 and 2")

    def __getitem__(self, player: int) -> BehavioralStrategy:
        if player == 1:
            return self.s1
        if player == 2:
            return self.s2
        raise IndexError(player)

    def replace(self, player: int, s: BehavioralStrategy) -> "StrategyProfile":
        return StrategyProfile(s, self.s2) if player == 1 else StrategyProfile(self.s1, s)

    def restrict(self, g: ExtensiveGame) -> "StrategyProfile":
        return StrategyProfile(self.s1.restrict(g), self.s2.restrict(g))


@dataclass(frozen=True)
class ConstraintSet:
    """Finite strategy lists ``T1`` and ``T2`` of a constrained game."""

    t1: tuple
    t2: tuple

    def __post_init__(self):
        object.__setattr__(self, "t1", tuple(self.t1))
        object.__setattr__(self, "t2", tuple(self.t2))
        if not self.t1 or not self.t2:
            raise ValueError("constraint sets must be nonempty")
        if any(s.player != 1 for s in self.t1) or any(s.player != 2 for s in self.t2):
            raise ValueError("constraint set members belong to the wrong player")

    def __getitem__(self, player: int) -> tuple:
        return self.t1 if player == 1 else self.t2

    def profiles(self) -> Iterator[StrategyProfile]:
        for a in self.t1:
            for b in self.t2:
                yield StrategyProfile(a, b)

    def restrict(self, g: ExtensiveGame) -> "ConstraintSet":
        return ConstraintSet(_dedupe(s.restrict(g) for s in self.t1), _dedupe(s.restrict(g) for s in self.t2))


def _dedupe(items):
    seen, out = set(), []
    for s in items:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return tuple(out)


# ---------------------------------------------------------------------------
# outcomes


def _walk(g: ExtensiveGame, p: StrategyProfile, start: History):
    out: dict = {}
    stack = [(start, Fraction(1))]
    while stack:
        h, w = stack.pop()
        if g.is_terminal(h):
            out[h] = out.get(h, 0) + w
            continue
        i = g.player(h)
        d = p[i].get(h)
        if d is None:
            raise UncoveredHistory(h, i)
        for a, q in d.items():
            stack.append((h + (a,), w * q))
    return out


def outcome_distribution(g: ExtensiveGame, p: StrategyProfile) -> dict:
    """Exact distribution over terminal histories induced by ``p``."""
    return _walk(g, p, ROOT)


def conditional_outcome(g: ExtensiveGame, p: StrategyProfile, h) -> dict:
    """Outcome when play starts at ``h`` and follows ``p`` thereafter."""
    h = tuple(h)
    if h not in g:
        raise NotAHistory(f"{format_history(h)} is not a history of the game")
    return _walk(g, p, h)


def reach_probability(g: ExtensiveGame, p: StrategyProfile, h) -> Fraction:
    h = tuple(h)
    if h not in g:
        raise NotAHistory(f"{format_history(h)} is not a history of the game")
    w = Fraction(1)
    for k in range(len(h)):
        pre = h[:k]
        d = p[g.player(pre)].get(pre)
        if d is None:
            if w:
                raise UncoveredHistory(pre, g.player(pre))
            return w
        w *= d.get(h[k], 0)
        if not w:
            return w
    return w


def expected_payoffs(g: ExtensiveGame, p: StrategyProfile, start=ROOT) -> tuple:
    dist = _walk(g, p, tuple(start))
    u1 = sum((w * g.payoff(z)[0] for z, w in dist.items()), Fraction(0))
    u2 = sum((w * g.payoff(z)[1] for z, w in dist.items()), Fraction(0))
    return u1, u2


def expected_payoff(g: ExtensiveGame, p: StrategyProfile, i: int) -> Fraction:
    return expected_payoffs(g, p)[i - 1]


def payoff_of(g: ExtensiveGame, dist: Mapping, i: int) -> Fraction:
    return sum((w * g.payoff(z)[i - 1] for z, w in dist.items()), Fraction(0))


# ---------------------------------------------------------------------------
# pure reduced strategies and the mixed-to-behavioral conversion


def count_pure_reduced(g: ExtensiveGame, player: int, h=ROOT) -> int:
    h = tuple(h)
    if g.is_terminal(h):
        return 1
    counts = [count_pure_reduced(g, player, c) for c in g.children(h)]
    if g.player(h) == player:
        return sum(counts)
    out = 1
    for c in counts:
        out *= c
    return out


def enumerate_pure_reduced(g: ExtensiveGame, player: int, limit: int = 100_000) -> list:
    """Every pure reduced strategy of ``player``, in a deterministic order."""
    n = count_pure_reduced(g, player)
    if n > limit:
        raise EnumerationTooLarge(f"{n} pure reduced strategies exceed the limit {limit}")

    def rec(h):
        if g.is_terminal(h):
            return [{}]
        if g.player(h) == player:
            out = []
            for a in g.actions(h):
                for rest in rec(h + (a,)):
                    out.append({h: a, **rest})
            return out
        parts = [rec(c) for c in g.children(h)]
        out = []
        for combo in product(*parts):
            merged = {}
            for m in combo:
                merged.update(m)
            out.append(merged)
        return out

    return [pure_strategy(player, m) for m in rec(ROOT)]


def mixed_to_behavioral(g: ExtensiveGame, m: MixedReducedStrategy) -> BehavioralStrategy:
    """Outcome-equivalent behavioral reduced strategy of a mixture.

    At each own history the action weights are the mixture mass of pure
    strategies that reach it and choose that action, normalised by the mass
    that reaches it at all.
    """
    reach: dict = {}
    pick: dict = {}
    for s, w in m.support:
        if not w:
            continue
        for h in s.domain():
            a = s.action(h)
            reach[h] = reach.get(h, 0) + w
            bucket = pick.setdefault(h, {})
            bucket[a] = bucket.get(a, 0) + w
    choice = {h: {a: v / reach[h] for a, v in pick[h].items()} for h in reach}
    return BehavioralStrategy(m.player, choice).restrict(g)


# ---------------------------------------------------------------------------
# normal-form games


@dataclass(frozen=True)
class NormalFormGame:
    rows: tuple
    cols: tuple
    payoffs: tuple  # payoffs[i][j] == (u1, u2)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        mat = tuple(tuple((as_fraction(c[0]), as_fraction(c[1])) for c in row) for row in self.payoffs)
        object.__setattr__(self, "payoffs", mat)
        if len(mat) != len(self.rows) or any(len(r) != len(self.cols) for r in mat):
            raise ValueError("payoff matrix dimensions do not match the action lists")

    @classmethod
    def from_matrices(cls, a, b, rows=None, cols=None) -> "NormalFormGame":
        m, n = len(a), len(a[0])
        rows = rows or tuple(f"r{i}" for i in range(m))
        cols = cols or tuple(f"c{j}" for j in range(n))
        return cls(rows, cols, tuple(tuple((a[i][j], b[i][j]) for j in range(n)) for i in range(m)))

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def expected(self, x, y) -> tuple:
        u1 = u2 = Fraction(0)
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if yj:
                    c = self.payoffs[i][j]
                    u1 += xi * yj * c[0]
                    u2 += xi * yj * c[1]
        return u1, u2


@dataclass(frozen=True)
class LeafGame:
    """A simultaneous-move stage game at a GSML leaf with its assigned profile."""

    game: NormalFormGame
    row: tuple
    col: tuple

    def __post_init__(self):
        object.__setattr__(self, "row", tuple(as_fraction(v) for v in self.row))
        object.__setattr__(self, "col", tuple(as_fraction(v) for v in self.col))
        m, n = self.game.shape
        if len(self.row) != m or len(self.col) != n:
            raise ValueError("assigned mixed profile does not match the stage game")
        for vec in (self.row, self.col):
            if any(v < 0 for v in vec) or sum(vec) != 1:
                raise ValueError("assigned mixed profile is not a pair of distributions")


@dataclass(frozen=True)
class GSMLGame:
    """An extensive game whose listed leaves hold stage games instead of payoffs."""

    tree: ExtensiveGame
    leaves: Mapping  # history -> LeafGame

    def validate(self) -> list[str]:
        problems = []
        for p in validate_game(self.tree):
            if p.endswith("terminal history lacks payoffs"):
                h = p.split(":")[0]
                if any(format_history(z) == h for z in self.leaves):
                    continue
            problems.append(p)
        terminals = set(self.tree.terminals())
        for z in self.leaves:
            if z not in terminals:
                problems.append(f"{format_history(z)}: stage game attached to a non-terminal history")
        return problems
