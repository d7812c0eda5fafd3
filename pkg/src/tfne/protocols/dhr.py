"""Mediator removal for correlated equilibria in the hull of Nash equilibria.

A dyadic mixture of bimatrix equilibria is written as a uniform sequence of
length ``2^l``.  Player 1 commits to a random index ``r``, player 2 answers
with a random ``r'``, player 1 opens, and the players then play equilibrium
number ``r xor r'``.  Aborts and failed openings are punished with the
equilibrium that is worst for the offender.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from ..crypto import CommitmentScheme, commit, make_scheme
from ..equilibria import BimatrixEquilibrium, bimatrix_ne_enumerate, worst_ne_for
from ..errors import NotAConvexCombination, NotDyadic
from ..game import ABORT, LeafGame, NormalFormGame, StrategyProfile, as_fraction, expected_payoffs
from ..machine import MachineSpec, bits
from ..threats import prune_gsml
from .base import FilterOutcome, Protocol, strategic_representation

SEP = ","


@dataclass(frozen=True)
class CorrelatedEquilibriumDecomposition:
    """``2^ell`` equilibria whose uniform mixture is the target distribution."""

    ell: int
    sequence: tuple
    indices: tuple = ()

    def __post_init__(self):
        if len(self.sequence) != 1 << self.ell:
            raise ValueError("sequence length must be 2^ell")

    def weights(self) -> dict:
        """Weight of each listed equilibrium index in the uniform mixture."""
        out: dict = {}
        for i in self.indices:
            out[i] = out.get(i, 0) + Fraction(1, len(self.indices))
        return out

    def payoffs(self) -> tuple:
        n = len(self.sequence)
        return (
            sum((e.payoffs[0] for e in self.sequence), Fraction(0)) / n,
            sum((e.payoffs[1] for e in self.sequence), Fraction(0)) / n,
        )


def recompose(d: CorrelatedEquilibriumDecomposition) -> dict:
    """Joint action distribution of the uniform mixture over the sequence."""
    out: dict = {}
    w = Fraction(1, len(d.sequence))
    for e in d.sequence:
        for i, x in enumerate(e.row):
            for j, y in enumerate(e.col):
                if x and y:
                    out[(i, j)] = out.get((i, j), 0) + w * x * y
    return out


def _log2_denominator(w: Fraction) -> int:
    d = w.denominator
    if d & (d - 1):
        raise NotDyadic(f"weight {w} does not have a power-of-two denominator")
    return d.bit_length() - 1


def decompose_ce(nf: NormalFormGame, equilibria, ce) -> CorrelatedEquilibriumDecomposition:
    """Expand dyadic weights over listed equilibria into a uniform sequence of minimal length."""
    items = sorted((int(i), as_fraction(w)) for i, w in (ce.items() if hasattr(ce, "items") else ce))
    if not items:
        raise NotAConvexCombination("no weights given")
    seen = set()
    for i, w in items:
        if not 0 <= i < len(equilibria):
            raise NotAConvexCombination(f"equilibrium index {i} is out of range")
        if i in seen:
            raise NotAConvexCombination(f"equilibrium index {i} listed twice")
        seen.add(i)
        if w < 0:
            raise NotAConvexCombination(f"negative weight {w}")
    if sum(w for _, w in items) != 1:
        raise NotAConvexCombination("weights do not sum to 1")
    ell = max(_log2_denominator(w) for _, w in items)
    seq, idx = [], []
    for i, w in items:
        count = int(w * (1 << ell))
        seq += [equilibria[i]] * count
        idx += [i] * count
    return CorrelatedEquilibriumDecomposition(ell, tuple(seq), tuple(idx))


class DHRProtocol(Protocol):
    def __init__(self, nf: NormalFormGame, d: CorrelatedEquilibriumDecomposition, k: int, scheme: CommitmentScheme, equilibria=None):
        if d.ell < 1:
            raise ValueError("a single equilibrium needs no sampling protocol")
        self.nf = nf
        self.d = d
        self.ell = d.ell
        self.k = k
        self.scheme = scheme
        eqs = list(equilibria) if equilibria is not None else list(bimatrix_ne_enumerate(nf))
        self.punish = {1: worst_ne_for(nf, 1, eqs), 2: worst_ne_for(nf, 2, eqs)}
        self._strings = ["".join(p) for p in product("01", repeat=self.ell)]

    # -- message grammar ----------------------------------------------------------

    def is_terminal(self, h):
        return len(h) == 3 or (len(h) > 0 and h[-1] == ABORT)

    def owner(self, h):
        return 2 if len(h) == 1 else 1

    def all_actions(self, h):
        if len(h) == 0:
            coms = self.scheme.commitments()
            return tuple(SEP.join(c) for c in product(coms, repeat=self.ell)) + (ABORT,)
        if len(h) == 1:
            return tuple(self._strings) + (ABORT,)
        decs = self.scheme.decommitments()
        return tuple(SEP.join(c) for c in product(decs, repeat=self.ell)) + (ABORT,)

    def is_legal(self, h, a):
        if a == ABORT:
            return True
        if len(h) == 1:
            return a in self._strings
        parts = a.split(SEP)
        if len(parts) != self.ell:
            return False
        if len(h) == 0:
            return all(self.scheme.is_commitment(p) for p in parts)
        return all(self.scheme.is_decommitment(p) for p in parts)

    # -- outcomes -------------------------------------------------------------------

    def leaf_kind(self, h):
        """``("punish", i)`` or ``("play", index)`` for a terminal history."""
        if h[-1] == ABORT:
            return ("punish", 2) if len(h) == 2 else ("punish", 1)
        coms, r2, decs = h[0].split(SEP), h[1], h[2].split(SEP)
        r = []
        for c, dec in zip(coms, decs):
            b = self.scheme.verify(c, dec)
            if b is None:
                return ("punish", 1)
            r.append(b)
        idx = int("".join(str(b ^ int(x)) for b, x in zip(r, r2)), 2)
        return ("play", idx)

    def assigned(self, h) -> BimatrixEquilibrium:
        kind, v = self.leaf_kind(h)
        return self.punish[v] if kind == "punish" else self.d.sequence[v]

    def outcome(self, h):
        e = self.assigned(h)
        return LeafGame(self.nf, e.row, e.col)

    def outcome_label(self, h):
        kind, v = self.leaf_kind(h)
        return f"punish-{v}" if kind == "punish" else f"index-{v}"

    def view(self, player, h):
        if player == 2 and h and h[0] != ABORT:
            return (SEP.join(self.scheme.receiver_view(c) for c in h[0].split(SEP)),) + tuple(h[1:])
        return tuple(h)


# ---------------------------------------------------------------------------
# machines


def _p1(scheme, ell, open_rule, name, fixed=None):
    """Player 1: commit to ``ell`` bits (coins or ``fixed``), then open per ``open_rule``."""
    k = scheme.k

    def split(coins):
        if fixed is not None:
            rs = [int(c) for c in fixed]
            rest = coins
        else:
            rs = list(coins[:ell])
            rest = coins[ell:]
        cs = [bits(rest[i * k:(i + 1) * k]) for i in range(ell)]
        return rs, cs

    def step(_k, coins, view):
        rs, cs = split(coins)
        pairs = [commit(scheme, b, c) for b, c in zip(rs, cs)]
        if len(view) == 0:
            return SEP.join(p[0] for p in pairs)
        return open_rule(pairs, view)

    budget = ell * k if fixed is not None else ell * (1 + k)
    return MachineSpec(name, 1, budget, step)


def _open(pairs, view):
    return SEP.join(p[1] for p in pairs)


def honest_p1(scheme, ell):
    return _p1(scheme, ell, _open, "honest")


def p1_family(scheme, ell) -> list:
    def garbage(pairs, view):
        flipped = []
        for com, dec in pairs:
            alt = format(int(dec, 2) ^ 1, f"0{len(dec)}b")
            flipped.append(alt)
        return SEP.join(flipped)

    fam = [
        honest_p1(scheme, ell),
        MachineSpec("abort-at-1", 1, 0, lambda _k, coins, view: ABORT),
        _p1(scheme, ell, lambda pairs, view: ABORT, "abort-at-3"),
        _p1(scheme, ell, garbage, "bad-opening"),
    ]
    for r in ("".join(p) for p in product("01", repeat=ell)):
        fam.append(_p1(scheme, ell, _open, f"commit-{r}", fixed=r))
    return fam


def honest_p2(ell):
    return MachineSpec("honest", 2, ell, lambda _k, coins, view: bits(coins))


def p2_family(scheme, ell, protocol=None) -> list:
    fam = [honest_p2(ell), MachineSpec("abort-at-2", 2, 0, lambda _k, coins, view: ABORT)]
    for r in ("".join(p) for p in product("01", repeat=ell)):
        fam.append(MachineSpec(f"const-{r}", 2, 0, lambda _k, coins, view, r=r: r))
    if protocol is not None:
        def brute(_k, coins, view):
            opened = [scheme.brute_open(v) for v in view[0].split(SEP)]
            if any(b is None for b in opened):
                return "0" * ell
            best, arg = None, None
            for r2 in protocol._strings:
                idx = int("".join(str(b ^ int(x)) for b, x in zip(opened, r2)), 2)
                u2 = protocol.d.sequence[idx].payoffs[1]
                if best is None or u2 > best:
                    best, arg = u2, r2
            return arg

        fam.append(MachineSpec("brute-invert", 2, 0, brute))
    return fam


# ---------------------------------------------------------------------------
# building and filtering


@lru_cache(maxsize=8)
def _build(nf, d, k, scheme):
    proto = DHRProtocol(nf, d, k, scheme)
    gg = proto.materialize()
    pruned, _ = prune_gsml(gg)
    return proto, gg, pruned


def build_dhr_game(nf: NormalFormGame, d: CorrelatedEquilibriumDecomposition, k: int, scheme: CommitmentScheme | str = "ideal"):
    """The stage-game-leaf tree plus the honest machine pair."""
    if isinstance(scheme, str):
        scheme = make_scheme(scheme, k)
    proto, gg, _ = _build(nf, d, k, scheme)
    return gg, honest_p1(scheme, d.ell), honest_p2(d.ell)


def dhr_setting(nf, d, k, scheme):
    """``(protocol, gsml_game, pruned_game)`` for the given parameters, cached."""
    return _build(nf, d, k, scheme)


def representation(m, nf, d, k, scheme):
    proto, gg, _ = _build(nf, d, k, scheme)
    return strategic_representation(m, k, gg, view=proto.view)


def dhr_filter_p2(m: MachineSpec, k: int, eps, nf, d, scheme) -> FilterOutcome:
    """Reject iff the machine's representation beats honest play by more than ``eps`` against honest player 1."""
    proto, gg, pruned = _build(nf, d, k, scheme)
    s1 = representation(honest_p1(scheme, d.ell), nf, d, k, scheme)
    s2 = representation(honest_p2(d.ell), nf, d, k, scheme)
    sm = representation(m, nf, d, k, scheme)
    honest = expected_payoffs(pruned, StrategyProfile(s1, s2))[1]
    dev = expected_payoffs(pruned, StrategyProfile(s1, sm))[1]
    if dev > honest + as_fraction(eps):
        return FilterOutcome(m.name, True, detail=f"earns {dev} against honest play worth {honest}")
    return FilterOutcome(m.name, False, sm, f"earns {dev}")


def filters(nf, d, scheme):
    return (
        lambda m, k, eps: FilterOutcome(m.name, False, representation(m, nf, d, k, scheme)),
        lambda m, k, eps: dhr_filter_p2(m, k, eps, nf, d, scheme),
    )


def battle_of_the_sexes() -> NormalFormGame:
    return NormalFormGame.from_matrices([[2, 0], [0, 1]], [[1, 0], [0, 2]], rows=("opera", "football"), cols=("opera", "football"))
