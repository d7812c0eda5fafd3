"""Equilibrium and dominance checks for extensive and bimatrix games."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import ProfileNotInConstraints, UncoveredHistory
from .game import (
    ROOT,
    BehavioralStrategy,
    ConstraintSet,
    ExtensiveGame,
    NormalFormGame,
    StrategyProfile,
    as_fraction,
    conditional_outcome,
    expected_payoffs,
    other,
    payoff_of,
    pure_strategy,
)


@dataclass(frozen=True)
class NEVerdict:
    """Result of an existential check; ``witness`` is set exactly when it fails.

    ``witness`` is ``(player, strategy, gain)``; ``site`` optionally names the
    history where the violation was found.
    """

    holds: bool
    witness: tuple | None = None
    site: tuple | None = None

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "holds"
        player, strategy, gain = self.witness
        where = "" if self.site is None else f" at {'/'.join(self.site) or '/'}"
        return f"fails: player {player} gains {gain}{where} by deviating to {strategy!r}"


# ---------------------------------------------------------------------------
# best responses in extensive games


def best_response(g: ExtensiveGame, opponent: BehavioralStrategy, player: int, start=ROOT):
    """Optimal value and a pure best reply for ``player`` from ``start``.

    Computed by backward induction against the fixed opponent strategy.  Ties
    go to the first action in the game's order.  Opponent histories reached
    with positive probability must be covered.
    """
    moves: dict = {}

    def value(h):
        if g.is_terminal(h):
            return g.payoff(h)[player - 1]
        if g.player(h) == player:
            best, arg = None, None
            for a in g.actions(h):
                v = value(h + (a,))
                if best is None or v > best:
                    best, arg = v, a
            moves[h] = arg
            return best
        d = opponent.get(h)
        if d is None:
            raise UncoveredHistory(h, other(player))
        return sum((w * value(h + (a,)) for a, w in d.items()), Fraction(0))

    v = value(tuple(start))
    return v, pure_strategy(player, moves).restrict(g) if tuple(start) == ROOT else pure_strategy(player, moves)


def _member(s: BehavioralStrategy, pool, g: ExtensiveGame) -> bool:
    if s in pool:
        return True
    r = s.restrict(g)
    return any(r == x.restrict(g) for x in pool)


def _check_members(g, t: ConstraintSet, p: StrategyProfile):
    for i in (1, 2):
        if not _member(p[i], t[i], g):
            raise ProfileNotInConstraints(f"player {i}'s strategy is not in the constraint set")


def is_epsilon_ne(g: ExtensiveGame, t: ConstraintSet | None, p: StrategyProfile, eps=0) -> NEVerdict:
    """No unilateral deviation (within ``t`` if given) gains more than ``eps``."""
    eps = as_fraction(eps)
    base = expected_payoffs(g, p)
    if t is not None:
        _check_members(g, t, p)
    worst = None
    for i in (1, 2):
        if t is None:
            v, dev = best_response(g, p[other(i)], i)
            gain = v - base[i - 1]
        else:
            gain, dev = None, None
            for s in t[i]:
                gi = expected_payoffs(g, p.replace(i, s))[i - 1] - base[i - 1]
                if gain is None or gi > gain:
                    gain, dev = gi, s
        if gain > eps and (worst is None or gain > worst[2]):
            worst = (i, dev, gain)
    if worst is None:
        return NEVerdict(True)
    return NEVerdict(False, worst)


def spe_backward_induction(g: ExtensiveGame) -> StrategyProfile:
    """A pure full subgame-perfect profile; ties broken by first action."""
    moves = {1: {}, 2: {}}
    values: dict = {}

    def solve(h):
        if g.is_terminal(h):
            return g.payoff(h)
        i = g.player(h)
        best, arg = None, None
        for a in g.actions(h):
            u = solve(h + (a,))
            if best is None or u[i - 1] > best[i - 1]:
                best, arg = u, a
        moves[i][h] = arg
        values[h] = best
        return best

    solve(ROOT)
    return StrategyProfile(pure_strategy(1, moves[1]), pure_strategy(2, moves[2]))


def is_spe(g: ExtensiveGame, p: StrategyProfile, eps=0) -> NEVerdict:
    """The NE inequality with slack ``eps`` in every subgame.

    Needs strategies defined at every history of the subgames it inspects.
    """
    eps = as_fraction(eps)
    for h in g.nonterminals():
        i = g.player(h)
        dist = conditional_outcome(g, p, h)
        current = payoff_of(g, dist, i)
        best, dev = best_response(g, p[other(i)], i, start=h)
        if best - current > eps:
            return NEVerdict(False, (i, dev, best - current), site=h)
    return NEVerdict(True)


# ---------------------------------------------------------------------------
# dominance notions over a finite constraint set


def is_weakly_pareto_optimal(g: ExtensiveGame, t: ConstraintSet, p: StrategyProfile) -> NEVerdict:
    """No profile in ``t`` gives both players strictly more."""
    _check_members(g, t, p)
    u = expected_payoffs(g, p)
    for q in t.profiles():
        v = expected_payoffs(g, q)
        if v[0] > u[0] and v[1] > u[1]:
            return NEVerdict(False, (q, v, min(v[0] - u[0], v[1] - u[1])))
    return NEVerdict(True)


def is_epsilon_safe(g: ExtensiveGame, t: ConstraintSet, p: StrategyProfile, eps=0) -> NEVerdict:
    """No unilateral deviation in ``t`` lowers the other player's payoff by more than ``eps``."""
    eps = as_fraction(eps)
    _check_members(g, t, p)
    u = expected_payoffs(g, p)
    for i in (1, 2):
        j = other(i)
        for s in t[i]:
            v = expected_payoffs(g, p.replace(i, s))
            if u[j - 1] - v[j - 1] > eps:
                return NEVerdict(False, (i, s, u[j - 1] - v[j - 1]))
    return NEVerdict(True)


# ---------------------------------------------------------------------------
# bimatrix games


@dataclass(frozen=True)
class BimatrixEquilibrium:
    row: tuple
    col: tuple
    payoffs: tuple

    def support(self):
        return (
            tuple(i for i, x in enumerate(self.row) if x),
            tuple(j for j, y in enumerate(self.col) if y),
        )

    def is_pure(self) -> bool:
        return sum(1 for x in self.row if x) == 1 and sum(1 for y in self.col if y) == 1


class EquilibriumList(list):
    """A list of equilibria carrying a ``degenerate`` flag."""

    degenerate: bool = False


def _solve(rows):
    """Gaussian elimination over Fractions on an augmented matrix.

    Returns ``("unique", x)``, ``("none", None)`` or ``("many", None)``.
    """
    m = [list(r) for r in rows]
    n_eq = len(m)
    n_var = len(m[0]) - 1
    pivots = []
    r = 0
    for c in range(n_var):
        piv = next((i for i in range(r, n_eq) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_eq):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_eq:
            break
    for i in range(r, n_eq):
        if m[i][-1] != 0:
            return "none", None
    if len(pivots) < n_var:
        return "many", None
    x = [Fraction(0)] * n_var
    for i, c in enumerate(pivots):
        x[c] = m[i][-1]
    return "unique", x


def _indifference(mat, own, opp, n_opp):
    """Solve for the opponent mix over ``opp`` making every ``own`` action equal.

    ``mat[a][b]`` is the payoff of own action ``a`` against opponent action ``b``.
    Unknowns are the weights on ``opp`` followed by the common value.
    """
    k = len(opp)
    rows = []
    for a in own:
        rows.append([mat[a][b] for b in opp] + [Fraction(-1), Fraction(0)])
    rows.append([Fraction(1)] * k + [Fraction(0), Fraction(1)])
    status, sol = _solve(rows)
    if status != "unique":
        return status, None, None
    mix = [Fraction(0)] * n_opp
    for b, w in zip(opp, sol[:k]):
        mix[b] = w
    return status, mix, sol[k]


def bimatrix_ne_enumerate(nf: NormalFormGame, max_size: int = 5) -> EquilibriumList:
    """All equilibria found by support enumeration, in a deterministic order.

    Only support pairs whose indifference systems have a unique solution
    contribute.  If some consistent system is underdetermined the game is
    degenerate: the returned list then holds the isolated solutions only and
    its ``degenerate`` attribute is set.
    """
    m, n = nf.shape
    if m > max_size or n > max_size:
        raise ValueError(f"bimatrix games larger than {max_size}x{max_size} are not supported")
    a = [[nf.payoffs[i][j][0] for j in range(n)] for i in range(m)]
    bt = [[nf.payoffs[i][j][1] for i in range(m)] for j in range(n)]
    found = EquilibriumList()
    seen = set()
    degenerate = False
    for size_r in range(1, m + 1):
        for rs in combinations(range(m), size_r):
            for size_c in range(1, n + 1):
                for cs in combinations(range(n), size_c):
                    st_y, y, v = _indifference(a, rs, cs, n)
                    st_x, x, w = _indifference(bt, cs, rs, m)
                    if "many" in (st_x, st_y) and "none" not in (st_x, st_y):
                        degenerate = True
                    if st_x != "unique" or st_y != "unique":
                        continue
                    if any(y[j] <= 0 for j in cs) or any(x[i] <= 0 for i in rs):
                        continue
                    if any(sum(a[i][j] * y[j] for j in range(n)) > v for i in range(m)):
                        continue
                    if any(sum(bt[j][i] * x[i] for i in range(m)) > w for j in range(n)):
                        continue
                    key = (tuple(x), tuple(y))
                    if key in seen:
                        continue
                    seen.add(key)
                    found.append(BimatrixEquilibrium(tuple(x), tuple(y), nf.expected(x, y)))
    found.degenerate = degenerate
    if degenerate:
        warnings.warn("degenerate bimatrix game: only isolated equilibria are listed", stacklevel=2)
    return found


def is_bimatrix_ne(nf: NormalFormGame, row, col, eps=0) -> bool:
    """Exact mutual best-response check against every pure deviation."""
    eps = as_fraction(eps)
    m, n = nf.shape
    u1, u2 = nf.expected(row, col)
    for i in range(m):
        e = [Fraction(0)] * m
        e[i] = Fraction(1)
        if nf.expected(e, col)[0] > u1 + eps:
            return False
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        if nf.expected(row, e)[1] > u2 + eps:
            return False
    return True


def worst_ne_for(nf: NormalFormGame, player: int, equilibria) -> BimatrixEquilibrium:
    """The listed equilibrium minimising ``player``'s payoff; first one on ties."""
    if not equilibria:
        raise ValueError("empty equilibrium list")
    best = None
    for e in equilibria:
        if best is None or e.payoffs[player - 1] < best.payoffs[player - 1]:
            best = e
    return best


@dataclass(frozen=True)
class HullDominance:
    dominated: bool
    weights: tuple = field(default=())  # convex weights over the equilibrium list
    margin: Fraction = Fraction(0)

    def __bool__(self):
        return self.dominated


def ce_hull_dominated(nf: NormalFormGame, equilibria, target) -> HullDominance:
    """Whether a convex combination of the listed equilibria beats ``target`` in both coordinates.

    The best worst-coordinate margin over the simplex is attained at a vertex
    or where the two coordinate margins cross on an edge, so checking those
    points decides the question exactly.
    """
    if not equilibria:
        raise ValueError("empty equilibrium list")
    t1, t2 = as_fraction(target[0]), as_fraction(target[1])
    pts = [(e.payoffs[0] - t1, e.payoffs[1] - t2) for e in equilibria]
    n = len(pts)
    best_margin, best_w = None, None

    def consider(weights):
        nonlocal best_margin, best_w
        d1 = sum(w * p[0] for w, p in zip(weights, pts))
        d2 = sum(w * p[1] for w, p in zip(weights, pts))
        mg = min(d1, d2)
        if best_margin is None or mg > best_margin:
            best_margin, best_w = mg, tuple(weights)

    for i in range(n):
        w = [Fraction(0)] * n
        w[i] = Fraction(1)
        consider(w)
    for i in range(n):
        for j in range(i + 1, n):
            # margin difference along the edge: g(s) = (1-s) gi + s gj
            gi = pts[i][0] - pts[i][1]
            gj = pts[j][0] - pts[j][1]
            if gi == gj:
                continue
            s = gi / (gi - gj)
            if 0 < s < 1:
                w = [Fraction(0)] * n
                w[i], w[j] = 1 - s, s
                consider(w)
    return HullDominance(best_margin > 0, best_w, best_margin)
