"""Threats and threat-free equilibria.

Two calculi live here.  The vanilla one works history by history on generic
unconstrained games: the threat-free continuation below a history is obtained
by backward induction, which is unique because per-player payoffs differ.  The
round-parameterised one works on alternating games whose strategy spaces are
restricted to finite lists; a player is threatened at a round if some
deviation beats the prescription on *every* pair of continuations that are
themselves threat-free on later rounds, by more than the slack.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .equilibria import NEVerdict, is_bimatrix_ne, is_epsilon_ne
from .errors import (
    LeafAssignmentNotNE,
    NonGenericGame,
    NotAHistory,
    ProfileNotInConstraints,
    TerminalHistory,
    format_history,
)
from .game import (
    BehavioralStrategy,
    ConstraintSet,
    ExtensiveGame,
    GSMLGame,
    StrategyProfile,
    as_fraction,
    conditional_outcome,
    expected_payoffs,
    other,
    payoff_of,
    reach_probability,
)

MODES = ("unconditional", "conditional")


@dataclass(frozen=True)
class ThreatReport:
    """Outcome of a threat query.

    ``site`` is a history (vanilla) or a round number.  When ``threatened`` is
    true, ``gap`` is the amount by which the deviation's threat-free payoff
    exceeds the prescription's, and it is strictly larger than the slack.
    """

    threatened: bool
    site: object
    player: int
    deviation: object = None
    gap: Fraction | None = None
    continuations: tuple = ()
    note: str = ""

    def __bool__(self):
        return self.threatened

    def describe(self) -> str:
        where = format_history(self.site) if isinstance(self.site, tuple) else f"round {self.site}"
        if not self.threatened:
            return f"player {self.player} faces no threat at {where}" + (f" ({self.note})" if self.note else "")
        return f"player {self.player} is threatened at {where}: deviation {self.deviation!r} gains {self.gap}"


# ---------------------------------------------------------------------------
# vanilla calculus


def _as_dist(g, h, tau):
    if isinstance(tau, str):
        tau = {tau: 1}
    tau = {a: as_fraction(w) for a, w in dict(tau).items() if as_fraction(w)}
    bad = set(tau) - set(g.actions(h))
    if bad:
        raise ValueError(f"actions {sorted(bad)} are not available at {format_history(h)}")
    if sum(tau.values()) != 1 or any(w < 0 for w in tau.values()):
        raise ValueError("deviation is not a probability distribution")
    return tau


def _check_decision(g, h):
    h = tuple(h)
    if h not in g:
        raise NotAHistory(f"{format_history(h)} is not a history of the game")
    if g.is_terminal(h):
        raise TerminalHistory(f"{format_history(h)} is terminal")
    return h


def backward_induction_below(g: ExtensiveGame, h):
    """Pure backward-induction moves at every strict descendant of ``h``.

    Returns ``(moves, values)`` where ``values[x]`` is the payoff pair reached
    from ``x``.  Raises :class:`NonGenericGame` if a mover's maximum is tied.
    """
    moves, values = {}, {}

    def solve(x):
        if g.is_terminal(x):
            return g.payoff(x)
        i = g.player(x)
        kids = [(a, solve(x + (a,))) for a in g.actions(x)]
        best = max(u[i - 1] for _, u in kids)
        winners = [(a, u) for a, u in kids if u[i - 1] == best]
        if len(winners) > 1:
            raise NonGenericGame(f"player {i} is indifferent between {[a for a, _ in winners]} at {format_history(x)}")
        moves[x] = winners[0][0]
        values[x] = winners[0][1]
        return values[x]

    for a in g.actions(h):
        solve(h + (a,))
    return moves, values


def threat_free_continuation(g: ExtensiveGame, sigma: StrategyProfile, h, tau, _below=None) -> StrategyProfile:
    """The member of Cont(h, sigma, tau) with no threat strictly below ``h``.

    Outside the subtree at ``h`` the profile follows ``sigma``; at ``h`` it
    plays ``tau``; below ``h`` every mover picks the unique payoff-maximising
    continuation.
    """
    h = _check_decision(g, h)
    tau = _as_dist(g, h, tau)
    moves, _ = _below if _below is not None else backward_induction_below(g, h)
    n = len(h)
    out = []
    for i in (1, 2):
        choice = {x: d for x, d in sigma[i].items() if x[:n] != h}
        if g.player(h) == i:
            choice[h] = tau
        for x, a in moves.items():
            if g.player(x) == i:
                choice[x] = {a: 1}
        out.append(BehavioralStrategy(i, choice))
    return StrategyProfile(*out)


def _dyadic_grid(actions, denom=8):
    k = len(actions)
    if k == 1:
        yield {actions[0]: Fraction(1)}
        return

    def parts(total, slots):
        if slots == 1:
            yield (total,)
            return
        for x in range(total + 1):
            for rest in parts(total - x, slots - 1):
                yield (x,) + rest

    for c in parts(denom, k):
        yield {a: Fraction(x, denom) for a, x in zip(actions, c) if x}


def is_threat_at(g: ExtensiveGame, sigma: StrategyProfile, h, mode: str = "unconditional", grid: bool = False) -> ThreatReport:
    """Whether ``P(h)`` faces a threat at ``h`` with respect to ``sigma``.

    Deviations searched: each pure action and ``sigma(h)`` itself.  With
    ``grid`` the dyadic mixtures with denominator 8 are searched as well and
    any improvement over the pure search is noted in the report.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    h = _check_decision(g, h)
    i = g.player(h)
    own = sigma[i].get(h)
    if mode == "unconditional":
        if reach_probability(g, sigma, h) == 0:
            return ThreatReport(False, h, i, note="history is reached with probability 0")
    if own is None:
        return ThreatReport(False, h, i, note="history lies outside the reduced domain")

    below = backward_induction_below(g, h)

    def value(tau):
        pi = threat_free_continuation(g, sigma, h, tau, _below=below)
        if mode == "unconditional":
            return expected_payoffs(g, pi)[i - 1], pi
        return payoff_of(g, conditional_outcome(g, pi, h), i), pi

    base, pi0 = value(own)
    best = None
    for a in g.actions(h):
        v, pi = value({a: 1})
        if v > base and (best is None or v > best[0]):
            best = (v, {a: Fraction(1)}, pi)
    note = ""
    if grid:
        top = best[0] if best else base
        for tau in _dyadic_grid(g.actions(h)):
            v, pi = value(tau)
            if v > top:
                note = f"mixed deviation {tau} beats every pure deviation"
                top = v
                best = (v, tau, pi)
    if best is None:
        return ThreatReport(False, h, i, note=note)
    return ThreatReport(True, h, i, best[1], best[0] - base, (best[2], pi0), note)


@dataclass(frozen=True)
class TFNEVerdict:
    holds: bool
    ne: NEVerdict
    threat: ThreatReport | None = None

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "threat-free Nash equilibrium"
        if not self.ne:
            return "not a Nash equilibrium: " + self.ne.describe()
        return self.threat.describe()


def is_tfne(g: ExtensiveGame, sigma: StrategyProfile, mode: str = "unconditional") -> TFNEVerdict:
    ne = is_epsilon_ne(g, None, sigma, 0)
    if not ne:
        return TFNEVerdict(False, ne)
    for h in g.nonterminals():
        rep = is_threat_at(g, sigma, h, mode=mode)
        if rep:
            return TFNEVerdict(False, ne, rep)
    return TFNEVerdict(True, ne)


# ---------------------------------------------------------------------------
# round-parameterised calculus


def _round_key(s: BehavioralStrategy, r: int):
    return frozenset((h, frozenset(d.items())) for h, d in s.items() if len(h) == r - 1)


@dataclass(frozen=True)
class RoundStrategy:
    """A player's behaviour on the histories of one round."""

    player: int
    round: int
    choice: dict = field(hash=False, compare=False)

    @classmethod
    def of(cls, s: BehavioralStrategy, r: int) -> "RoundStrategy":
        return cls(s.player, r, {h: dict(d) for h, d in s.items() if len(h) == r - 1})

    @classmethod
    def from_key(cls, player, r, key) -> "RoundStrategy":
        return cls(player, r, {h: dict(d) for h, d in key})

    def key(self):
        return frozenset((tuple(h), frozenset((a, as_fraction(w)) for a, w in d.items() if as_fraction(w))) for h, d in self.choice.items())

    def __eq__(self, other):
        if not isinstance(other, RoundStrategy):
            return NotImplemented
        return (self.player, self.round, self.key()) == (other.player, other.round, other.key())

    def __hash__(self):
        return hash((self.player, self.round, self.key()))


@dataclass(frozen=True)
class ContinuationSet:
    prefix: tuple
    last: RoundStrategy
    members: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _index_of(s, pool, g):
    for k, x in enumerate(pool):
        if x == s:
            return k
    r = s.restrict(g)
    for k, x in enumerate(pool):
        if x.restrict(g) == r:
            return k
    return None


class EpsilonThreatCalculus:
    """Memoised ε-threat queries for one constrained alternating game.

    Whether a round-S threat exists depends on a profile only through its
    behaviour on rounds 1..S, so results are cached by that prefix.  The cache
    lives on the instance; build one per query batch.
    """

    def __init__(self, g: ExtensiveGame, t: ConstraintSet, eps=0):
        if not g.alternating:
            raise ValueError("round-based threats need a game whose owners alternate by round")
        self.g = g
        self.t = t
        self.eps = as_fraction(eps)
        self.n = g.num_rounds
        self.owner = {r: g.round_owner(r) for r in range(1, self.n + 1)}
        self.rk = {
            i: [[None] + [_round_key(s, r) for r in range(1, self.n + 1)] for s in t[i]]
            for i in (1, 2)
        }
        self.profiles = [(a, b) for a in range(len(t.t1)) for b in range(len(t.t2))]
        self._u: dict = {}
        self.buckets = []
        for s in range(self.n + 1):
            table: dict = {}
            for p in self.profiles:
                table.setdefault(self.pk(p, s), []).append(p)
            self.buckets.append(table)
        self._threat: dict = {}

    # -- plumbing ---------------------------------------------------------------

    def profile(self, p) -> StrategyProfile:
        return StrategyProfile(self.t.t1[p[0]], self.t.t2[p[1]])

    def u(self, p):
        if p not in self._u:
            self._u[p] = expected_payoffs(self.g, self.profile(p))
        return self._u[p]

    def pk(self, p, s):
        return tuple(self.rk[self.owner[r]][p[self.owner[r] - 1]][r] for r in range(1, s + 1))

    def locate(self, sigma: StrategyProfile):
        a = _index_of(sigma.s1, self.t.t1, self.g)
        b = _index_of(sigma.s2, self.t.t2, self.g)
        if a is None or b is None:
            raise ProfileNotInConstraints("profile is not a member of the constraint set")
        return (a, b)

    # -- the definitions ----------------------------------------------------------

    def threat_free(self, p, r) -> bool:
        """No round after ``r`` carries a threat with respect to ``p``."""
        return all(not self.threat_at(self.pk(p, s), s)[0] for s in range(r + 1, self.n + 1))

    def threat_at(self, key, s):
        """``(threatened, deviation_key, gap, witness_pair)`` for a round-``s`` prefix key."""
        memo = self._threat.get((key, s))
        if memo is not None:
            return memo
        i = self.owner[s]
        prefix = key[:-1]
        stay = [p for p in self.buckets[s][key] if self.threat_free(p, s)]
        if not stay:
            raise AssertionError("no threat-free continuation of the prescription exists")
        hi = max(stay, key=lambda p: self.u(p)[i - 1])
        result = (False, None, None, None)
        cands = []
        for p in self.buckets[s - 1][prefix]:
            k = self.pk(p, s)
            if k != key and k not in cands:
                cands.append(k)
        best = None
        for k in cands:
            dev = [p for p in self.buckets[s][k] if self.threat_free(p, s)]
            if not dev:
                raise AssertionError("no threat-free continuation of a deviation exists")
            lo = min(dev, key=lambda p: self.u(p)[i - 1])
            gap = self.u(lo)[i - 1] - self.u(hi)[i - 1]
            if gap > self.eps and (best is None or gap > best[2]):
                best = (True, k[-1], gap, (lo, hi))
        if best is not None:
            result = best
        self._threat[(key, s)] = result
        return result

    def report(self, p, r) -> ThreatReport:
        i = self.owner[r]
        hit, k, gap, pair = self.threat_at(self.pk(p, r), r)
        if not hit:
            return ThreatReport(False, r, i)
        return ThreatReport(
            True, r, i, RoundStrategy.from_key(i, r, k), gap,
            (self.profile(pair[0]), self.profile(pair[1])),
        )

    def cont(self, prefix_keys, last_key):
        key = tuple(prefix_keys) + (last_key,)
        return list(self.buckets[len(key)].get(key, []))

    def exists_tf(self, prefix_keys, last_key):
        """A member of the continuation set that is threat-free on its round, or None."""
        r = len(prefix_keys) + 1
        members = self.cont(prefix_keys, last_key)
        if not members:
            return None
        if r == self.n:
            return members[0]
        j = self.owner[r + 1]
        tf = [p for p in members if self.threat_free(p, r + 1)]
        top = max(self.u(p)[j - 1] for p in tf)
        for p in tf:
            if self.u(p)[j - 1] >= top - self.eps:
                return p
        raise AssertionError("unreachable")


def _calc(g, t, eps, calc):
    if calc is not None:
        return calc
    return EpsilonThreatCalculus(g, t, eps)


def is_eps_threat_at_round(g: ExtensiveGame, t: ConstraintSet, sigma: StrategyProfile, r: int, eps=0, calc=None) -> ThreatReport:
    c = _calc(g, t, eps, calc)
    if not 1 <= r <= c.n:
        raise ValueError(f"round {r} is outside 1..{c.n}")
    return c.report(c.locate(sigma), r)


@dataclass(frozen=True)
class EpsTFNEVerdict:
    holds: bool
    ne: NEVerdict
    threats: tuple = ()

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "ε-threat-free Nash equilibrium"
        if not self.ne:
            return "not an ε-Nash equilibrium: " + self.ne.describe()
        return "; ".join(t.describe() for t in self.threats)


def is_eps_tfne(g: ExtensiveGame, t: ConstraintSet, sigma: StrategyProfile, eps=0, calc=None) -> EpsTFNEVerdict:
    """Constrained ε-NE with no ε-threat at any round."""
    eps = as_fraction(eps)
    c = _calc(g, t, eps, calc)
    p = c.locate(sigma)
    ne = is_epsilon_ne(g, t, sigma, eps)
    threats = tuple(rep for rep in (c.report(p, r) for r in range(1, c.n + 1)) if rep)
    return EpsTFNEVerdict(bool(ne) and not threats, ne, threats)


def enumerate_cont(g: ExtensiveGame, t: ConstraintSet, prefix, last: RoundStrategy) -> ContinuationSet:
    """Profiles of ``t`` matching ``prefix`` on earlier rounds and ``last`` on its round.

    Filters the full product directly, without the calculus' bucket tables.
    """
    prefix = tuple(prefix)
    for r, rs in enumerate(prefix, start=1):
        if rs.round != r:
            raise ValueError("prefix round strategies must cover rounds 1..R-1 in order")
    if last.round != len(prefix) + 1:
        raise ValueError("last round strategy must follow the prefix")
    wanted = prefix + (last,)
    members = []
    for a, b in product(t.t1, t.t2):
        prof = StrategyProfile(a, b)
        if all(RoundStrategy.of(prof[rs.player], rs.round) == rs for rs in wanted):
            members.append(prof)
    return ContinuationSet(prefix, last, tuple(members))


def exists_tf_in_cont(g: ExtensiveGame, t: ConstraintSet, prefix, last: RoundStrategy, eps=0, calc=None):
    """A continuation that is ε-threat-free on ``last.round``, or None if the set is empty.

    At the last round any member qualifies.  Otherwise the members that are
    threat-free on the next round are collected and the first one whose
    next-round mover is within ε of that mover's best payoff is returned.
    """
    c = _calc(g, t, eps, calc)
    keys = [rs.key() for rs in prefix]
    p = c.exists_tf(keys, last.key())
    return None if p is None else c.profile(p)


# ---------------------------------------------------------------------------
# games with stage games at the leaves


def prune_gsml(gg: GSMLGame, sigma: StrategyProfile | None = None):
    """Replace every stage-game leaf by the expected payoffs of its assigned profile."""
    actions, owner, payoffs = gg.tree.raw
    pay = dict(payoffs)
    for z, lg in gg.leaves.items():
        pay[tuple(z)] = lg.game.expected(lg.row, lg.col)
    pruned = ExtensiveGame(actions, owner, pay)
    return pruned, sigma


def check_leaf_assignments(gg: GSMLGame):
    for z, lg in gg.leaves.items():
        if not is_bimatrix_ne(lg.game, lg.row, lg.col):
            raise LeafAssignmentNotNE(z)


def is_gsml_eps_tfne(gg: GSMLGame, t: ConstraintSet, sigma: StrategyProfile, eps=0, calc=None) -> EpsTFNEVerdict:
    check_leaf_assignments(gg)
    pruned, _ = prune_gsml(gg)
    return is_eps_tfne(pruned, t, sigma, eps, calc=calc)
