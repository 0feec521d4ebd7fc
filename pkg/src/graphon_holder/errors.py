"""Exception types shared across the package."""


class GraphonError(Exception):
    """Base class for all package errors."""


class InvalidSpec(GraphonError, ValueError):
    pass


class DimensionMismatch(GraphonError, ValueError):
    pass


class IndexOutOfRange(GraphonError, ValueError):
    pass


class CellOutOfRange(GraphonError, ValueError):
    pass


class DomainError(GraphonError, ValueError):
    pass


class BadGrid(GraphonError, ValueError):
    pass


class ParseError(GraphonError, ValueError):
    pass


class NumericalFailure(GraphonError):
    """Estimator could not produce a usable answer from the sampled data."""


class InsufficientSamples(NumericalFailure):
    pass


class DegenerateFit(NumericalFailure):
    pass
