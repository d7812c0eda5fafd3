"""The commit-then-reveal coin-flipping game.

Round 1: player 1 sends a commitment (or aborts).  Round 2: player 2 sends a
bit (or aborts).  Round 3: player 1 opens the commitment (or aborts).  Player 1
wins exactly when the opening is valid and reveals the complement of player
2's bit; any abort makes the aborting player lose.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..crypto import CommitmentScheme, commit, make_scheme
from ..errors import TooLarge
from ..game import ABORT
from ..machine import MachineSpec, bits
from .base import FilterOutcome, Protocol, strategic_representation

MAX_K = 4
WIN1 = (Fraction(1), Fraction(0))
WIN2 = (Fraction(0), Fraction(1))


class CoinFlipProtocol(Protocol):
    def __init__(self, k: int, scheme: CommitmentScheme):
        self.k = k
        self.scheme = scheme

    def is_terminal(self, h):
        return len(h) == 3 or (len(h) > 0 and h[-1] == ABORT)

    def owner(self, h):
        return 2 if len(h) == 1 else 1

    def all_actions(self, h):
        if len(h) == 0:
            return tuple(self.scheme.commitments()) + (ABORT,)
        if len(h) == 1:
            return ("0", "1", ABORT)
        return tuple(self.scheme.decommitments()) + (ABORT,)

    def is_legal(self, h, a):
        if a == ABORT:
            return True
        if len(h) == 0:
            return self.scheme.is_commitment(a)
        if len(h) == 1:
            return a in ("0", "1")
        return self.scheme.is_decommitment(a)

    def outcome(self, h):
        if h[-1] == ABORT:
            return WIN1 if len(h) == 2 else WIN2
        com, r2, decom = h
        return WIN1 if self.scheme.verify(com, decom) == 1 - int(r2) else WIN2

    def outcome_label(self, h):
        return "p1-wins" if self.outcome(h) == WIN1 else "p2-wins"

    def view(self, player, h):
        if player == 2 and h and h[0] != ABORT:
            return (self.scheme.receiver_view(h[0]),) + tuple(h[1:])
        return tuple(h)


# ---------------------------------------------------------------------------
# machines


def _committer(scheme: CommitmentScheme, fixed_bit, open_rule, name):
    """Player 1 machine: commit to a bit, then open when ``open_rule(bit, r2)`` holds.

    The bit is the first coin unless ``fixed_bit`` is given.
    """
    k = scheme.k

    def split(coins):
        if fixed_bit is not None:
            return fixed_bit, bits(coins)
        return coins[0], bits(coins[1:])

    def step(_k, coins, view):
        b, c = split(coins)
        com, dec = commit(scheme, b, c)
        if len(view) == 0:
            return com
        return dec if open_rule(b, int(view[1])) else ABORT

    return MachineSpec(name, 1, k if fixed_bit is not None else 1 + k, step)


def honest_p1(scheme):
    return _committer(scheme, None, lambda b, r2: b != r2, "honest")


def p1_family(scheme: CommitmentScheme) -> list:
    return [
        honest_p1(scheme),
        MachineSpec("abort-at-1", 1, 0, lambda _k, coins, view: ABORT),
        _committer(scheme, None, lambda b, r2: False, "abort-at-3"),
        _committer(scheme, None, lambda b, r2: True, "always-open"),
        _committer(scheme, None, lambda b, r2: b == r2, "open-when-equal"),
        _committer(scheme, 0, lambda b, r2: b != r2, "commit-0"),
        _committer(scheme, 1, lambda b, r2: b != r2, "commit-1"),
    ]


def honest_p2(scheme):
    return MachineSpec("honest", 2, 1, lambda _k, coins, view: str(coins[0]))


def p2_family(scheme: CommitmentScheme) -> list:
    def brute(_k, coins, view):
        b = scheme.brute_open(view[0])
        return "0" if b is None else str(b)

    def anti(_k, coins, view):
        b = scheme.brute_open(view[0])
        return "1" if b is None else str(1 - b)

    return [
        honest_p2(scheme),
        MachineSpec("abort-at-2", 2, 0, lambda _k, coins, view: ABORT),
        MachineSpec("const-0", 2, 0, lambda _k, coins, view: "0"),
        MachineSpec("const-1", 2, 0, lambda _k, coins, view: "1"),
        MachineSpec("brute-invert", 2, 0, brute),
        MachineSpec("anti-invert", 2, 0, anti),
    ]


# ---------------------------------------------------------------------------
# building and filtering


@lru_cache(maxsize=16)
def _setting(k, scheme):
    proto = CoinFlipProtocol(k, scheme)
    return proto, proto.materialize()


def build_coinflip_game(k: int, scheme: CommitmentScheme | str = "ideal"):
    """The full game tree and the honest machine pair."""
    if k > MAX_K:
        raise TooLarge(f"coin-flip trees are only built for k <= {MAX_K}")
    if isinstance(scheme, str):
        scheme = make_scheme(scheme, k)
    proto, g = _setting(k, scheme)
    return g, honest_p1(scheme), honest_p2(scheme)


def coinflip_protocol(k, scheme) -> CoinFlipProtocol:
    return CoinFlipProtocol(k, scheme)


def representation(m: MachineSpec, k: int, scheme: CommitmentScheme):
    proto, g = _setting(k, scheme)
    return strategic_representation(m, k, g, view=proto.view)


def guess_probability(m: MachineSpec, k: int, scheme: CommitmentScheme) -> Fraction:
    """Probability that ``m``'s round-2 reply equals the committed bit of a random commitment."""
    hits = total = 0
    for b in (0, 1):
        for c in scheme.coin_strings():
            view = (scheme.receiver_view(commit(scheme, b, c)[0]),)
            for coins in m.coin_space(k):
                total += 1
                hits += m.next_message(k, coins, view) == str(b)
    return Fraction(hits, total)


def coinflip_filter(player: int, m: MachineSpec, k: int, eps, scheme: CommitmentScheme) -> FilterOutcome:
    """Player 1 is never rejected; player 2 is rejected iff it guesses the bit with probability above 1/2 + eps."""
    eps = Fraction(eps)
    if player == 2:
        p = guess_probability(m, k, scheme)
        if p > Fraction(1, 2) + eps:
            return FilterOutcome(m.name, True, detail=f"guesses the committed bit with probability {p}")
        detail = f"guess probability {p}"
    else:
        detail = ""
    return FilterOutcome(m.name, False, representation(m, k, scheme), detail)


def filters(scheme: CommitmentScheme):
    return (
        lambda m, k, eps: coinflip_filter(1, m, k, eps, scheme),
        lambda m, k, eps: coinflip_filter(2, m, k, eps, scheme),
    )
