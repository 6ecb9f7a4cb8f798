"""Exception types shared across the package.

``ValueError`` is reserved for malformed inputs (bad law strings, broken
invariants at construction time); the classes below signal numerical or
size-limit failures inside otherwise valid computations.
"""


class CircleDerivsError(Exception):
    """Base class for numerical/capacity failures."""


class DegenerateWeights(CircleDerivsError):
    """Weight vector sums to zero (relative to its absolute mass)."""


class PoleProximity(CircleDerivsError):
    """Evaluation point is too close to a pole of the weighted sum."""


class DegreeTooLarge(CircleDerivsError):
    """Coefficient expansion requested above the supported degree cap."""


class OrderTooLarge(CircleDerivsError):
    """Derivative order meets or exceeds the polynomial degree."""


class EigenFailure(CircleDerivsError):
    """Spectral backend failed to produce certified zeros."""


class PTooLarge(CircleDerivsError):
    """Power-sum order above the combinatorial cap."""


class SizeTooLarge(CircleDerivsError):
    """Instance too large for the dense trace oracle."""


class SupportTooLarge(CircleDerivsError):
    """Combined support too large for subset enumeration."""
