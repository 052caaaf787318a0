"""Exception hierarchy shared across the package.

Three broad classes matter to callers: usage/verification problems,
domain violations (asking for a quantity that does not exist), and
resource shortfalls (tables or sieves too small for the request).
The CLI maps these onto distinct exit codes.
"""


class TwistMomentError(Exception):
    """Base class for all package errors."""


class VerificationError(TwistMomentError):
    """A property suite or internal cross-check failed."""


class DomainError(TwistMomentError):
    """The requested quantity is undefined for the given inputs."""


class RamifiedTwistError(DomainError):
    """Twist discriminant shares a factor with the form level."""


class WrongSignError(DomainError):
    """Derivative requested where the functional-equation sign is +1."""


class DegenerateFactorError(DomainError):
    """An Euler local factor vanished or is not finite."""


class EmptyFamilyError(DomainError):
    """No admissible twist survives the moment filters."""


class ResourceError(TwistMomentError):
    """A configured capacity bound was exceeded."""


class CapacityError(ResourceError):
    """Requested sieve or series length exceeds the configured cap."""


class FactorLimitError(ResourceError):
    """Integer to factor lies beyond the sieve limit."""


class TableTooShortError(ResourceError):
    """Coefficient table does not cover the required truncation length."""


class QuadratureError(TwistMomentError):
    """Numerical quadrature failed its doubling convergence check."""


class IndeterminateSignError(TwistMomentError):
    """Involution probe too close to zero to read off a sign."""


class SignInconsistencyError(TwistMomentError):
    """Two involution probes produced contradictory signs."""


class CacheFormatError(TwistMomentError):
    """On-disk coefficient cache is malformed or corrupted."""
