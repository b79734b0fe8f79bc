"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Model parameters violate a structural requirement (named in the message)."""


class DomainError(ValueError):
    """An operation was called outside its mathematical domain."""


class SingularPointError(DomainError):
    """(phi, beta1) point where U or V is undefined (division by zero or V <= 1)."""


class TraceStructureError(ValueError):
    """An exclusion trace violates anchoring or monotonicity (not a sign failure)."""


class SpiralSeedError(RuntimeError):
    """The corner sign seeds required to start the exclusion spiral are absent."""


class GuardError(RuntimeError):
    """A brute-force guard refused an instance that is too large."""
