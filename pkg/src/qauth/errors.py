"""Exception types shared across the package.

The command-line driver maps these onto process exit codes, so library code
should raise the most specific type that applies rather than bare ValueError
when the failure is a capacity or configuration problem.
"""


class QauthError(Exception):
    """Base class for package-specific failures."""


class ConfigError(QauthError):
    """Malformed or inconsistent configuration (missing seed, bad variant, ...)."""


class CapacityError(QauthError):
    """Requested computation exceeds the documented enumeration/size limits."""


class InvariantError(QauthError):
    """A numerical invariant was violated (non-Hermitian input, eigenvalue below
    the tolerance floor, non-convergent eigensolve, ...)."""


class KeyExhaustedError(QauthError):
    """A key cursor was asked for more bits than its stream can supply."""
