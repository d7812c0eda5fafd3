"""Toy one-way permutations and perfectly binding bit commitments.

Hardness is not assumed anywhere.  Instead the exact guessing advantage of a
given machine is measured by enumerating every coin, which is what the
strategy filters consume.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .errors import BadCoinLength, BadLength, EnumerationTooLarge, ParseError
from .machine import MachineSpec, bits


def _bitstring(x: int, n: int) -> str:
    return format(x, f"0{n}b")


def parity(s: str) -> int:
    return s.count("1") % 2


# ---------------------------------------------------------------------------
# permutations


class ToyOWP:
    """An explicit permutation of ``{0,1}^n`` stored as a table."""

    def __init__(self, n: int, table):
        if not 1 <= n <= 16:
            raise ValueError("permutation width must be between 1 and 16 bits")
        table = tuple(int(v) for v in table)
        if sorted(table) != list(range(1 << n)):
            raise ValueError("table is not a bijection of {0,1}^n")
        self.n = n
        self.table = table
        inv = [0] * (1 << n)
        for x, y in enumerate(table):
            inv[y] = x
        self._inv = tuple(inv)

    @classmethod
    def identity(cls, n: int) -> "ToyOWP":
        return cls(n, range(1 << n))

    @classmethod
    def random(cls, n: int, seed: int = 0, fix_zero: bool = True) -> "ToyOWP":
        """A seeded random permutation; with ``fix_zero`` it maps 0 to 0."""
        perm = np.random.default_rng(seed).permutation(1 << n).tolist()
        if fix_zero:
            j = perm.index(0)
            perm[0], perm[j] = perm[j], perm[0]
        return cls(n, perm)

    @classmethod
    def parse(cls, text: str) -> "ToyOWP":
        """Read lines ``x y`` (binary strings) into a permutation."""
        pairs = {}
        n = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or any(set(p) - {"0", "1"} for p in parts):
                raise ParseError(lineno, "expected two binary strings 'x y'")
            if n is None:
                n = len(parts[0])
            if len(parts[0]) != n or len(parts[1]) != n:
                raise ParseError(lineno, f"strings must have length {n}")
            x = int(parts[0], 2)
            if x in pairs:
                raise ParseError(lineno, f"input {parts[0]} listed twice")
            pairs[x] = int(parts[1], 2)
        if n is None:
            raise ParseError(0, "empty permutation file")
        if sorted(pairs) != list(range(1 << n)):
            raise ParseError(0, "not every input is listed")
        if sorted(pairs.values()) != list(range(1 << n)):
            raise ParseError(0, "outputs repeat, so the table is not a permutation")
        return cls(n, [pairs[x] for x in range(1 << n)])

    def emit(self) -> str:
        return "".join(f"{_bitstring(x, self.n)} {_bitstring(y, self.n)}\n" for x, y in enumerate(self.table))

    def strings(self):
        return [_bitstring(x, self.n) for x in range(1 << self.n)]

    def __call__(self, x: str) -> str:
        return owp_eval(self, x)

    def __eq__(self, other):
        return isinstance(other, ToyOWP) and self.table == other.table

    def __hash__(self):
        return hash(self.table)


def _check(f: ToyOWP, x: str) -> int:
    if not isinstance(x, str) or len(x) != f.n or set(x) - {"0", "1"}:
        raise BadLength(f"expected a {f.n}-bit string, got {x!r}")
    return int(x, 2)


def owp_eval(f: ToyOWP, x: str) -> str:
    return _bitstring(f.table[_check(f, x)], f.n)


def owp_brute_invert(f: ToyOWP, y: str) -> str:
    """Scan the whole table for the preimage of ``y``."""
    target = _check(f, y)
    for x, v in enumerate(f.table):
        if v == target:
            return _bitstring(x, f.n)
    raise AssertionError("permutation table is not onto")


# ---------------------------------------------------------------------------
# commitments


class CommitmentScheme:
    """Non-interactive bit commitment: one message to commit, one to open."""

    k: int
    name: str

    def coin_bits(self) -> int:
        raise NotImplementedError

    def _commit(self, b: int, coins: str):
        raise NotImplementedError

    def verify(self, com: str, decom: str):
        """The committed bit, or ``None`` to reject."""
        raise NotImplementedError

    def receiver_view(self, com: str) -> str:
        return com

    def brute_open(self, view: str):
        """Recover the bit from what the receiver sees, if an unbounded guesser can."""
        return None

    def commitments(self) -> list:
        """All commitment strings the honest sender can produce, sorted."""
        return sorted({self._commit(b, c)[0] for b in (0, 1) for c in self.coin_strings()})

    def decommitments(self) -> list:
        return self.coin_strings()

    def coin_strings(self) -> list:
        n = self.coin_bits()
        return [_bitstring(x, n) for x in range(1 << n)]

    def is_commitment(self, com: str) -> bool:
        return com in self._commitment_set()

    def is_decommitment(self, decom: str) -> bool:
        return isinstance(decom, str) and len(decom) == self.coin_bits() and not set(decom) - {"0", "1"}

    def _commitment_set(self):
        cache = getattr(self, "_coms", None)
        if cache is None:
            cache = frozenset(self.commitments())
            self._coms = cache
        return cache


class IdealCommitment(CommitmentScheme):
    """Opaque tokens standing in for a perfectly hiding, perfectly binding scheme.

    Every ``(bit, coins)`` pair has its own token, assigned by a fixed scramble
    so the token order says nothing about the bit.  The receiver only ever sees
    the placeholder ``"com"``; opening looks the token up in the issuing table.
    """

    name = "ideal"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self._width = len(str((1 << (k + 1)) - 1))
        size = 1 << (k + 1)
        self._issue = {}
        self._ledger = {}
        for b in (0, 1):
            for c in range(1 << k):
                v = (b << k) | c
                idx = (5 * v + 3) % size
                tok = f"t{idx:0{self._width}d}"
                self._issue[(b, c)] = tok
                self._ledger[tok] = (b, _bitstring(c, k))

    def coin_bits(self) -> int:
        return self.k

    def _commit(self, b, coins):
        return self._issue[(b, int(coins, 2))], coins

    def verify(self, com, decom):
        entry = self._ledger.get(com)
        if entry is None or entry[1] != decom:
            return None
        return entry[0]

    def receiver_view(self, com):
        return "com"


class ToyCommitment(CommitmentScheme):
    """``commit(b, x) = f(x):(b xor parity(x))`` opened by revealing ``x``.

    Binding is perfect because ``f`` is a permutation; hiding is as weak as
    ``f`` is easy to invert, which at toy sizes is always.
    """

    name = "toy"

    def __init__(self, f: ToyOWP):
        self.f = f
        self.k = f.n

    def coin_bits(self) -> int:
        return self.k

    def _commit(self, b, coins):
        return f"{owp_eval(self.f, coins)}:{b ^ parity(coins)}", coins

    def verify(self, com, decom):
        try:
            y, c = com.split(":")
            if owp_eval(self.f, decom) != y or c not in ("0", "1"):
                return None
        except (ValueError, BadLength):
            return None
        return int(c) ^ parity(decom)

    def brute_open(self, view):
        try:
            y, c = view.split(":")
            return int(c) ^ parity(owp_brute_invert(self.f, y))
        except (ValueError, BadLength):
            return None


def make_scheme(name: str, k: int, seed: int = 0) -> CommitmentScheme:
    if name == "ideal":
        return IdealCommitment(k)
    if name == "toy":
        return ToyCommitment(ToyOWP.random(k, seed=seed))
    raise ValueError(f"unknown commitment scheme {name!r}")


def commit(s: CommitmentScheme, b: int, coins: str):
    if b not in (0, 1):
        raise ValueError("can only commit to a bit")
    if not isinstance(coins, str) or len(coins) != s.coin_bits() or set(coins) - {"0", "1"}:
        raise BadCoinLength(f"scheme needs exactly {s.coin_bits()} coin bits")
    return s._commit(b, coins)


def verify(s: CommitmentScheme, com: str, decom: str):
    return s.verify(com, decom)


def completeness_failures(s: CommitmentScheme) -> list:
    """Every ``(bit, coins)`` whose honest opening does not verify to the bit."""
    bad = []
    for b in (0, 1):
        for c in s.coin_strings():
            com, dec = commit(s, b, c)
            if s.verify(com, dec) != b:
                bad.append((b, c))
    return bad


def binding_failures(s: CommitmentScheme, candidates=None) -> list:
    """Commitment strings that open to both bits, by scanning every decommitment."""
    bad = []
    for com in candidates if candidates is not None else s.commitments():
        opened = {s.verify(com, d) for d in s.decommitments()} - {None}
        if len(opened) > 1:
            bad.append(com)
    return bad


def hiding_advantage(s: CommitmentScheme, guesser: MachineSpec, limit: int = 1 << 24) -> Fraction:
    """Exact ``Pr[guess = b] - 1/2`` over the bit, the scheme's coins and the guesser's coins.

    The guesser is called as ``next_message(k, coins, (view,))`` and must output
    ``"0"`` or ``"1"``; anything else counts as a wrong guess.
    """
    g_space = guesser.space_size(s.k)
    total = 2 * (1 << s.coin_bits()) * g_space
    if total > limit:
        raise EnumerationTooLarge(f"{total} joint coin outcomes exceed {limit}")
    hits = 0
    g_coins = list(product(range(guesser.coin_base), repeat=guesser.coin_count(s.k)))
    for b in (0, 1):
        for c in s.coin_strings():
            view = s.receiver_view(commit(s, b, c)[0])
            for gc in g_coins:
                if guesser.next_message(s.k, gc, (view,)) == str(b):
                    hits += 1
    return Fraction(hits, total) - Fraction(1, 2)


def guesser_registry(s: CommitmentScheme) -> list:
    """A fixed family of bit guessers used to probe hiding."""

    def const(v):
        return lambda k, coins, view: v

    def coin(k, coins, view):
        return str(coins[0])

    def view_parity(k, coins, view):
        return str(parity(view[0]))

    def first_char(k, coins, view):
        return "1" if view[0][:1] == "1" else "0"

    def last_char(k, coins, view):
        return "1" if view[0][-1:] == "1" else "0"

    def ord_sum(k, coins, view):
        return str(sum(map(ord, view[0])) % 2)

    def length_parity(k, coins, view):
        return str(len(view[0]) % 2)

    def brute(k, coins, view):
        b = s.brute_open(view[0])
        return "0" if b is None else str(b)

    def brute_or_coin(k, coins, view):
        b = s.brute_open(view[0])
        return str(coins[0]) if b is None else str(b)

    def anti_brute(k, coins, view):
        b = s.brute_open(view[0])
        return "1" if b is None else str(1 - b)

    return [
        MachineSpec("const0", 2, 0, const("0")),
        MachineSpec("const1", 2, 0, const("1")),
        MachineSpec("coin", 2, 1, coin),
        MachineSpec("view-parity", 2, 0, view_parity),
        MachineSpec("first-char", 2, 0, first_char),
        MachineSpec("last-char", 2, 0, last_char),
        MachineSpec("ord-sum", 2, 0, ord_sum),
        MachineSpec("length-parity", 2, 0, length_parity),
        MachineSpec("brute-invert", 2, 0, brute),
        MachineSpec("brute-or-coin", 2, 1, brute_or_coin),
        MachineSpec("anti-brute", 2, 0, anti_brute),
    ]


__all__ = [
    "ToyOWP",
    "owp_eval",
    "owp_brute_invert",
    "CommitmentScheme",
    "IdealCommitment",
    "ToyCommitment",
    "make_scheme",
    "commit",
    "verify",
    "completeness_failures",
    "binding_failures",
    "hiding_advantage",
    "guesser_registry",
    "parity",
    "bits",
]
