"""Exception hierarchy shared by all modules."""


class HoloshearError(Exception):
    """Base class for every error raised by the package."""


class LambdaMismatchError(HoloshearError, ValueError):
    """Operands live in algebras with different Λ."""


class ZeroDivisorError(HoloshearError, ZeroDivisionError):
    """Inversion of an element with vanishing norm."""


class DomainError(HoloshearError, ValueError):
    """Argument outside the domain or on the branch locus of a function.

    ``part`` names the offending component (``"re"``, ``"re+im"``, ...).
    """

    def __init__(self, message, part=None):
        super().__init__(message)
        self.part = part


class NonHyperbolicError(HoloshearError, ValueError):
    """Trace too small for a hyperbolic element."""


class DeterminantError(HoloshearError, ValueError):
    """Matrix does not have unit determinant."""


class GraphError(HoloshearError, ValueError):
    """Malformed or invalid fat graph."""


class PathError(HoloshearError, ValueError):
    """Edge path is open, not incident, or backtracks."""


class UnsupportedMoveError(HoloshearError, ValueError):
    """Whitehead move requested on a loop edge."""


class GraphMismatchError(HoloshearError, ValueError):
    """Objects bound to different graphs were combined."""


class GaugeError(HoloshearError, ValueError):
    """Gauge matrix missing or not admissible."""


class RankError(HoloshearError, ValueError):
    """Constraint matrix is rank deficient."""


class ConstraintError(HoloshearError, ValueError):
    """Coordinate vector violates its face constraints."""


class DegenerateSystemError(HoloshearError, ArithmeticError):
    """Linear system is singular at this point; resample."""
