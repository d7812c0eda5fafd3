"""Exception types shared across the package."""


class TfneError(Exception):
    """Base class for all errors raised by this package."""


class UncoveredHistory(TfneError, KeyError):
    """A history reached with positive probability lies outside a reduced domain."""

    def __init__(self, history, player=None):
        self.history = tuple(history)
        self.player = player
        super().__init__(f"history {format_history(self.history)} not covered by player {player}")

    def __str__(self):
        return self.args[0]


class NotAHistory(TfneError, ValueError):
    pass


class TerminalHistory(TfneError, ValueError):
    pass


class NonGenericGame(TfneError, ValueError):
    """A maximiser needed by the threat-free construction is not unique."""


class ProfileNotInConstraints(TfneError, ValueError):
    pass


class BadCoinLength(TfneError, ValueError):
    pass


class BadLength(TfneError, ValueError):
    pass


class EnumerationTooLarge(TfneError, ValueError):
    pass


class TooLarge(TfneError, ValueError):
    pass


class NotDyadic(TfneError, ValueError):
    pass


class NotAConvexCombination(TfneError, ValueError):
    pass


class LeafAssignmentNotNE(TfneError, ValueError):
    def __init__(self, leaf):
        self.leaf = tuple(leaf)
        super().__init__(f"assigned profile at leaf {format_history(self.leaf)} is not a Nash equilibrium")


class MachineFiltered(TfneError):
    def __init__(self, player, name=""):
        self.player = player
        super().__init__(f"prescribed machine {name!r} of player {player} is rejected by its filter")


class ParseError(TfneError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


def format_history(h):
    return "/" if not h else "/".join(h)
