"""Exception types shared across the package."""


class DomainError(ValueError):
    """A precondition on an input parameter is violated.

    The message always names the violated bound (e.g. ``"kappa >= sqrt(12)"``)
    so callers (and the CLI) can surface it directly.
    """


class SingularMatrixError(ValueError):
    """The system matrix fails the invertibility check."""


class SpectrumError(ValueError):
    """An operator violates a required norm or spectrum bound."""


class StructureError(RuntimeError):
    """A structural invariant (e.g. nullspace dimension) does not hold."""


class ResourceCapError(RuntimeError):
    """The request exceeds the desk-scale resource cap."""
