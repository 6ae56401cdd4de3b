"""Exception hierarchy shared across the package."""


class GraphScatterError(Exception):
    """Base class for all package errors."""


class GraphValidationError(GraphScatterError, ValueError):
    """Invalid graph input."""


class SelfLoopError(GraphValidationError):
    """An edge joins a vertex to itself."""


class DuplicateEdgeError(GraphValidationError):
    """The same unordered vertex pair appears twice."""


class EndpointRangeError(GraphValidationError):
    """An edge endpoint is outside [0, num_vertices)."""


class NonPositiveWeightError(GraphValidationError):
    """Edge weights must be strictly positive."""


class WeightCountError(GraphValidationError):
    """Weight list length does not match the edge list."""


class GraphFormatError(GraphScatterError, ValueError):
    """A graph file could not be parsed; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DisconnectedGraphError(GraphScatterError, ValueError):
    """Operation requires a connected graph."""


class WeightsRequiredError(GraphScatterError, ValueError):
    """Generalized (weighted) operator requested on an unweighted graph."""


class NonSquareMatrixError(GraphScatterError, ValueError):
    """Matrix operation requires a square matrix."""


class NonFiniteMatrixError(GraphScatterError, ValueError):
    """Matrix entries must be finite."""


class SymmetryError(GraphScatterError, ValueError):
    """Matrix is not symmetric to the required tolerance."""


class EigenConvergenceError(GraphScatterError, RuntimeError):
    """The eigenvalue iteration failed to converge; no partial results."""


class SpectralPoleError(GraphScatterError, ValueError):
    """Spectral parameter sits on (or too close to) a pole of the evolution operator."""


class NullSpaceError(GraphScatterError, ValueError):
    """No stationary direction found at the requested spectral parameter."""


class RegularityError(GraphScatterError, ValueError):
    """Operation requires a v-regular graph."""


class CatalogSizeError(GraphScatterError, RuntimeError):
    """Orbit enumeration exceeded the configured catalog cap."""

    def __init__(self, cap, length_reached):
        super().__init__(
            f"orbit catalog exceeded cap of {cap} orbits at length {length_reached}"
        )
        self.cap = cap
        self.length_reached = length_reached


class CatalogDepthError(GraphScatterError, ValueError):
    """Orbit catalog is too shallow for the requested computation."""


class VerificationError(GraphScatterError, RuntimeError):
    """A cross-validation identity check failed; carries the check name."""

    def __init__(self, check, detail=""):
        message = f"check failed: {check}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.check = check
