"""Two-message games built on a one-way permutation.

Player 1 picks ``x`` and sends ``f(x)``; player 2 answers with a string ``z``.
In the plain game player 2 wins iff ``z = x``.  The modified game adds a
coordination option on the all-zero message: both sending it pays (2, 2),
exactly one sending it pays (-2, -2).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..crypto import ToyOWP, owp_brute_invert, owp_eval
from ..errors import TooLarge
from ..game import StrategyProfile
from ..machine import MachineSpec, bits
from .base import FilterOutcome, Protocol, strategic_representation

MAX_N = 8


class OWPProtocol(Protocol):
    def __init__(self, f: ToyOWP, modified: bool = False):
        self.f = f
        self.n = f.n
        self.modified = modified
        self.zero = "0" * f.n
        self._messages = tuple(owp_eval(f, x) for x in f.strings())
        self._inverse = {owp_eval(f, x): x for x in f.strings()}

    def is_terminal(self, h):
        return len(h) == 2

    def owner(self, h):
        return len(h) + 1

    def all_actions(self, h):
        return self._messages if len(h) == 0 else tuple(self.f.strings())

    def is_legal(self, h, a):
        return a in self._inverse

    def outcome(self, h):
        m, z = h
        x = self._inverse[m]
        if self.modified:
            zeros = (m == self.zero) + (z == self.zero)
            if zeros == 2:
                return (Fraction(2), Fraction(2))
            if zeros == 1:
                return (Fraction(-2), Fraction(-2))
        if z == x:
            return (Fraction(-1), Fraction(1))
        return (Fraction(1), Fraction(-1))


def _check_n(n):
    if not 2 <= n <= MAX_N:
        raise TooLarge(f"permutation games are built for 2 <= n <= {MAX_N}")


def build_owp_game(n: int, f: ToyOWP):
    _check_n(n)
    if f.n != n:
        raise ValueError("permutation width does not match n")
    return OWPProtocol(f).materialize()


def build_modified_owp_game(n: int, f: ToyOWP):
    _check_n(n)
    if f.n != n:
        raise ValueError("permutation width does not match n")
    return OWPProtocol(f, modified=True).materialize()


# ---------------------------------------------------------------------------
# machines
#
# Coins with base 2^n - 1 give exact uniform choices over the nonzero strings.


def _nonzero(f: ToyOWP, c: int) -> str:
    return format(c + 1, f"0{f.n}b")


def p1_send(f: ToyOWP, x: str, name=None):
    return MachineSpec(name or f"send-{x}", 1, 0, lambda k, coins, view: owp_eval(f, x))


def p1_uniform_nonzero(f: ToyOWP):
    return MachineSpec(
        "uniform-nonzero", 1, 1, lambda k, coins, view: owp_eval(f, _nonzero(f, coins[0])), coin_base=(1 << f.n) - 1
    )


def p1_uniform(f: ToyOWP):
    return MachineSpec("uniform", 1, f.n, lambda k, coins, view: owp_eval(f, bits(coins)))


def p1_family(f: ToyOWP) -> list:
    return [p1_send(f, x) for x in f.strings()] + [p1_uniform_nonzero(f), p1_uniform(f)]


def p2_zero_then_uniform(f: ToyOWP):
    """Answer 0 to message 0, otherwise a uniformly random string."""
    zero = "0" * f.n

    def step(k, coins, view):
        return zero if view[0] == zero else bits(coins)

    return MachineSpec("zero-then-uniform", 2, f.n, step)


def p2_uniform_after_zero(f: ToyOWP):
    """Uniform over all strings after message 0, uniform over nonzero strings otherwise.

    A single coin with ``(2^n - 1) * 2^n`` faces is split into the two picks.
    """
    zero = "0" * f.n
    base = (1 << f.n) - 1

    def step(k, coins, view):
        pick_nonzero, pick_any = coins[0] % base, coins[0] // base
        if view[0] == zero:
            return format(pick_any, f"0{f.n}b")
        return _nonzero(f, pick_nonzero)

    return MachineSpec("uniform-after-zero", 2, 1, step, coin_base=base << f.n)


def p2_uniform(f: ToyOWP):
    return MachineSpec("uniform", 2, f.n, lambda k, coins, view: bits(coins))


def p2_invert(f: ToyOWP):
    return MachineSpec("invert", 2, 0, lambda k, coins, view: owp_brute_invert(f, view[0]))


def p2_zero_then_invert(f: ToyOWP):
    zero = "0" * f.n
    return MachineSpec(
        "zero-then-invert", 2, 0, lambda k, coins, view: zero if view[0] == zero else owp_brute_invert(f, view[0])
    )


def p2_constant(f: ToyOWP, z: str):
    return MachineSpec(f"const-{z}", 2, 0, lambda k, coins, view: z)


def p2_hardwired(f: ToyOWP, x0: str, fallback: str):
    """Knows the preimage of one message and answers ``fallback`` elsewhere."""
    y0 = owp_eval(f, x0)
    return MachineSpec(f"hardwired-{x0}", 2, 0, lambda k, coins, view: x0 if view[0] == y0 else fallback)


def p2_family(f: ToyOWP) -> list:
    zero = "0" * f.n
    fam = [p2_zero_then_uniform(f), p2_uniform_after_zero(f), p2_uniform(f), p2_invert(f), p2_zero_then_invert(f)]
    fam += [p2_constant(f, z) for z in f.strings()]
    nonzero = [x for x in f.strings() if x != zero]
    fam += [p2_hardwired(f, x0, zero) for x0 in nonzero]
    return fam


# ---------------------------------------------------------------------------
# filters


@lru_cache(maxsize=16)
def _setting(f: ToyOWP):
    proto = OWPProtocol(f, modified=True)
    return proto, proto.materialize()


def inversion_probability(m: MachineSpec, f: ToyOWP) -> Fraction:
    """Pr over uniform nonzero ``x`` and the machine's coins that it answers ``f(x)`` with ``x``."""
    zero = "0" * f.n
    hits = total = 0
    for x in f.strings():
        if x == zero:
            continue
        view = (owp_eval(f, x),)
        for coins in m.coin_space(f.n):
            total += 1
            hits += m.next_message(f.n, coins, view) == x
    return Fraction(hits, total)


def owp_filter(player: int, m: MachineSpec, eps, f: ToyOWP) -> FilterOutcome:
    """Player 2 is rejected iff it inverts a random nonzero message better than blind guessing plus ``eps``."""
    proto, g = _setting(f)
    eps = Fraction(eps)
    detail = ""
    if player == 2:
        p = inversion_probability(m, f)
        blind = Fraction(1, (1 << f.n) - 1)
        if p > blind + eps:
            return FilterOutcome(m.name, True, detail=f"inverts with probability {p}")
        detail = f"inversion probability {p}"
    return FilterOutcome(m.name, False, strategic_representation(m, f.n, g, view=proto.view), detail)


def filters(f: ToyOWP):
    return (
        lambda m, k, eps: owp_filter(1, m, eps, f),
        lambda m, k, eps: owp_filter(2, m, eps, f),
    )


def claim_instance(f: ToyOWP, variant: str = "i"):
    """Prescribed machines for the two coordination claims.

    Variant ``"i"``: player 1 sends 0, player 2 answers 0 to 0 and randomly
    otherwise.  Variant ``"ii"``: player 1 sends a uniform nonzero message and
    player 2 answers message 0 uniformly at random.
    """
    zero = "0" * f.n
    if variant == "i":
        return p1_send(f, zero, "send-zero"), p2_zero_then_uniform(f)
    if variant == "ii":
        return p1_uniform_nonzero(f), p2_uniform_after_zero(f)
    raise ValueError("variant must be 'i' or 'ii'")


def modified_game(f: ToyOWP):
    return _setting(f)[1]
