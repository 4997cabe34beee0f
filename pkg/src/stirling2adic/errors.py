"""Exception types shared across the package."""


class DomainError(ValueError):
    """Parameters lie outside an operation's stated domain."""


class ResourceCapError(RuntimeError):
    """A computation would exceed a configured size or memory cap."""


class PrecisionError(RuntimeError):
    """Residue precision is insufficient to certify a claim either way."""
