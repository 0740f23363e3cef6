"""Exception types shared across the package."""


class LgqaoaError(Exception):
    """Base class for all package errors."""


class SpecError(LgqaoaError, ValueError):
    """Invalid graph specification."""


class DisconnectedSum(SpecError):
    """The union of all atom edge sets is disconnected."""


class BadAtom(SpecError):
    """An atom is empty, has a self loop, or is disconnected after
    removing isolated vertices."""


class DuplicateEdge(SpecError):
    """An atom contains the same edge twice."""


class InvalidAddress(SpecError):
    """A vertex address string violates the construction rules."""


class PatchTooSmall(LgqaoaError, RuntimeError):
    """Internal tiling patch growth hit its cap before every lightcone
    became boundary free.  Signals a bug, not a user error."""


class DepthOverflow(LgqaoaError, ValueError):
    """Requested recursion depth exceeds the circuit depth p."""


class NonRealResult(LgqaoaError, ArithmeticError):
    """An expectation came out with a non-negligible imaginary part."""


class TooLarge(LgqaoaError, ValueError):
    """Subgraph exceeds the statevector qubit cap."""


class WidthOverflow(LgqaoaError, MemoryError):
    """Projected contraction memory exceeds the budget."""


class RadiusTooSmall(LgqaoaError, ValueError):
    """Lightcone radius is too small for the requested locality."""


class BadRange(LgqaoaError, ValueError):
    """Parameter outside its legal range."""
