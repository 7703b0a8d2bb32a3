"""Exception hierarchy.

Everything derives from ValueError so callers that only care about "bad
input" can catch one type; the CLI maps the subclasses to exit codes.
"""


class BergmanError(ValueError):
    """Base class for all library errors."""


class DimensionMismatch(BergmanError):
    pass


class NotInterior(BergmanError):
    pass


class NotOnBoundary(BergmanError):
    pass


class ZeroDirection(BergmanError):
    pass


class UnboundedDomain(BergmanError):
    pass


class EmptyDomain(BergmanError):
    pass


class UnsupportedVariant(BergmanError):
    """The requested operation has no implementation for this domain variant."""


class FlatValidationError(BergmanError):
    """A computed flat space failed its boundary certificate (active-set tolerance mis-tuned)."""


class ConditioningError(BergmanError):
    """The Gram factorization retained no basis function or a solve failed."""


class PathExitError(BergmanError):
    """A generated path or cone point left the domain."""


class AdmissibilityError(BergmanError):
    """No admissible peak-function coefficient exists (e.g. Re z1 unbounded below)."""


class ProbeNotFlat(BergmanError):
    """A cone-bound probe direction does not lie in the flat space."""


class NotInNormalSlice(BergmanError):
    """A cone anchor does not lie in the normal slice E(z0) = z0 + L(z0)^perp."""


class DomainFormatError(BergmanError):
    """A domain file does not follow the JSON domain-spec format."""
