"""Exception hierarchy shared by all modules."""


class DensintError(Exception):
    """Base class for library errors."""


class InvalidDimension(DensintError, ValueError):
    pass


class DomainError(DensintError, ValueError):
    pass


class InvalidArgument(DensintError, ValueError):
    pass


class PackingFailure(DensintError):
    """The grid construction could not place the requested number of balls."""


class InvalidPrior(DensintError, ValueError):
    pass


class InvalidClass(DensintError, ValueError):
    pass


class InvalidPacking(DensintError, ValueError):
    pass


class NotFound(DensintError, KeyError):
    pass


class InvalidState(DensintError, ValueError):
    pass


class InvalidDensity(DensintError, ValueError):
    pass


class NeedsReference(DensintError, ValueError):
    pass


class DiscretizationError(DensintError):
    pass


class NumericFailure(DensintError):
    pass


class SizeLimit(DensintError, ValueError):
    pass


class PropertyViolation(DensintError, AssertionError):
    pass
