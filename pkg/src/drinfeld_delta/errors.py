"""Exception types shared across the package.

Everything here derives from DrinfeldDeltaError so callers can catch the
package's failures with one handler.  The precision-related errors are part
of the arithmetic contract: a computation either certifies its answer at the
requested z-adic precision or raises.
"""


class DrinfeldDeltaError(Exception):
    pass


class ValidationError(DrinfeldDeltaError):
    """Malformed input (bad field data, inconsistent shapes, bad arguments)."""


class ParseError(DrinfeldDeltaError):
    """Unreadable or schema-violating config/report data."""


class DivisionByZero(DrinfeldDeltaError, ZeroDivisionError):
    """Division by an exactly-zero quantity (field elements only; series are
    never known to be exactly zero, see PrecisionExhausted)."""


class PrecisionExhausted(DrinfeldDeltaError):
    """The requested operation or decision cannot be certified at the
    available z-adic precision."""


class NotDivisible(DrinfeldDeltaError):
    """Exact division by a power of z requested, but a lower-order
    coefficient is certified nonzero."""


class NotInSStar(DrinfeldDeltaError):
    """Operand is not in the invertible group S* (valuation growth v(B_i) >= i
    with B_0 invertible)."""


class NotAdmissible(DrinfeldDeltaError):
    """Module data violates admissibility (wrong constant term, top
    coefficient not invertible, ...)."""


class DecayCertificateMissing(DrinfeldDeltaError):
    """An operation on an infinite twisted series needs a tail-decay
    certificate that the operand does not carry."""


class UnsupportedDimension(DrinfeldDeltaError):
    """The invariant pipeline is implemented for d = 1 (Drinfeld) only."""


class Inconsistent(DrinfeldDeltaError):
    """A self-check identity that must hold failed with a certified nonzero
    residual.  Indicates corrupt input or an internal bug, never roundoff."""


class Undecided(DrinfeldDeltaError):
    """A yes/no question whose answer is not determined at this precision."""
