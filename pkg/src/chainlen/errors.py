"""Exception hierarchy for the chainlen toolkit.

Every error that crosses a module boundary derives from ChainlenError so
callers (CLI, fuzz drivers) can map failures onto the exit-code contract:
0 ok / 1 verification failure / 2 precondition violation / 3 precision.
"""


class ChainlenError(Exception):
    """Base class for all toolkit errors."""


class DivisionByZero(ChainlenError):
    """Division or inversion of a zero field element."""


class PrecisionExhausted(ChainlenError):
    """A p-adic result's unit is known to fewer than one digit.

    Raised when cancellation in a sum eats every tracked digit.  The caller
    is expected to rebuild its inputs at doubled precision and retry.
    """


class NotASquare(ChainlenError):
    """sqrt() called on a non-square element."""


class NotRepresented(ChainlenError):
    """A diagonal form does not represent the requested value."""


class NotIsometric(ChainlenError):
    """Chain endpoints have non-isometric underlying forms."""


class InvalidDashed(ChainlenError):
    """Dashed move with a_i + a_j = 0, or no valid swap route exists."""


class InvalidEdge(ChainlenError):
    """step_symbol() received vertices that are not joined by the move."""


class ChainNotFound(ChainlenError):
    """BFS exhausted the depth budget without reaching the target."""


class ExponentTooLarge(ChainlenError):
    """Input class has full order 2^m; decomposition requires exponent 2^(m-1)."""


class PresentationMismatch(ChainlenError):
    """Supplied presentation is not isometric to the input form."""


class DegenerateTrace(ChainlenError):
    """A trace appearing in the 14-dimensional construction vanished."""
