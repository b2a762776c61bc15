"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a structural requirement (metric axioms, bad JSON, ...)."""


class InjectivityError(ValidationError):
    """A would-be partial translation sends two points to one, or one point twice."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold for the inputs."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed. Always a bug, never a user error."""


class IdentityFailure(ArithmeticError):
    """An algebraic identity that was supposed to hold exactly does not.

    ``identity`` names the first violated relation, e.g. ``"xy = e"``.
    """

    def __init__(self, identity, detail=""):
        self.identity = identity
        self.detail = detail
        msg = f"identity {identity!r} fails"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
