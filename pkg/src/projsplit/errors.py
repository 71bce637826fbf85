class ProjSplitError(ValueError):
    """Base class for invalid inputs to projsplit routines."""


class ShapeError(ProjSplitError):
    pass


class RankError(ProjSplitError):
    pass


class PreconditionError(ProjSplitError):
    pass


class DomainError(ProjSplitError):
    """Argument lies outside the set a map is defined on."""


class NoCertificateError(ProjSplitError):
    """The sufficient condition of a convergence bound does not hold."""
