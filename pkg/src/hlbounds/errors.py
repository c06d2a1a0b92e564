"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula or operation is defined."""


class CertificationError(RuntimeError):
    """A certified bound could not reach the requested accuracy within the work cap."""


class CapExceededError(RuntimeError):
    """An enumeration or construction would exceed its configured size cap."""
