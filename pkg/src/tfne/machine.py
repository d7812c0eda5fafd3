"""Deterministic next-message machines with an explicit coin budget."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

from .errors import EnumerationTooLarge


@dataclass(frozen=True)
class MachineSpec:
    """A player's program: ``next_message(k, coins, view) -> label``.

    ``coins`` is a tuple of integers in ``range(coin_base)`` whose length is
    ``coin_count(k)``; ``view`` is the part of the message history the player
    can see.  Any output that is not a legal action is read as an abort.
    """

    name: str
    player: int
    coins: int | Callable[[int], int]
    next_message: Callable
    coin_base: int = 2

    def coin_count(self, k: int) -> int:
        return self.coins(k) if callable(self.coins) else int(self.coins)

    def space_size(self, k: int) -> int:
        return self.coin_base ** self.coin_count(k)

    def coin_space(self, k: int, limit: int = 1 << 20):
        n = self.space_size(k)
        if n > limit:
            raise EnumerationTooLarge(f"machine {self.name!r} has {n} coin vectors at k={k}")
        return product(range(self.coin_base), repeat=self.coin_count(k))

    def __repr__(self):
        return f"MachineSpec({self.name!r}, player={self.player})"


def bits(coins) -> str:
    return "".join(str(c) for c in coins)
