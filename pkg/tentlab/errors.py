"""Error utilities to be used by any tentlab module."""

from typing import Optional


class TentlabError(Exception):
    """Base class of every exception raised on purpose by tentlab."""

    message: str


class WeightError(TentlabError):
    """Exception raised when a measure weight is not strictly positive."""

    def __init__(self, kind: str, index: int, value: float) -> None:
        """Raise with default message."""
        self.index = index
        self.message = f"Weight {kind}[{index}] = {value!r} must be strictly positive."
        super().__init__(self.message)


class OriginError(TentlabError):
    """Exception raised when a distance-based construction is given no origins."""

    def __init__(self) -> None:
        """Raise with default message."""
        self.message = "Distance-based admissibility needs a nonempty origin set."
        super().__init__(self.message)


class AdmissibilityError(TentlabError):
    """Exception raised when an admissibility function cannot be built from a potential."""

    def __init__(self, kind: str, reason: str) -> None:
        """Raise with default message."""
        self.message = f"Cannot build {kind} admissibility: {reason}."
        super().__init__(self.message)


class MetricError(TentlabError):
    """Exception raised when a distance table fails the metric axioms."""

    def __init__(self, reason: str, witness: tuple) -> None:
        """Raise with default message."""
        self.witness = witness
        self.message = f"Distance table is not a metric ({reason}) at indices {witness}."
        super().__init__(self.message)


class EmbeddingError(TentlabError):
    """Exception raised when an operation needs points embedded in a Euclidean space."""

    def __init__(self, operation: str) -> None:
        """Raise with default message."""
        self.message = f"{operation} requires a space embedded in a Euclidean space."
        super().__init__(self.message)


class EmptyRegionError(TentlabError):
    """Exception raised when the discretized admissible region has no nodes."""

    def __init__(self, t_min: float) -> None:
        """Raise with default message."""
        self.message = (
            f"Admissible region is empty: every admissibility value is at or below t_1 = {t_min}."
        )
        super().__init__(self.message)


class NoAdmissibleBallsError(TentlabError):
    """Exception raised when no admissible ball could be enumerated."""

    def __init__(self, alpha: float) -> None:
        """Raise with default message."""
        self.message = f"No {alpha}-admissible balls were enumerated."
        super().__init__(self.message)


class RegionMismatchError(TentlabError):
    """Exception raised when values do not conform to the shape of their region."""

    def __init__(self, expected: tuple, given: tuple) -> None:
        """Raise with default message."""
        self.message = (
            f"Values of shape {given} do not conform to a region of shape {expected}, "
            + "or are nonzero outside the region."
        )
        super().__init__(self.message)


class ApertureError(TentlabError):
    """Exception raised when a cylindrical field is wider than the projection aperture."""

    def __init__(self, alpha: float, pattern_alpha: float) -> None:
        """Raise with default message."""
        self.message = (
            f"Field supported on aperture-{pattern_alpha} cones cannot be averaged over "
            + f"aperture-{alpha} balls."
        )
        super().__init__(self.message)


class DimensionError(TentlabError):
    """Exception raised when a direction net is requested in an unsupported dimension."""

    def __init__(self, dim: int) -> None:
        """Raise with default message."""
        self.message = f"Direction nets are built in dimension 1 or 2 only; got {dim}."
        super().__init__(self.message)


class ConfigError(TentlabError):
    """Exception raised when a scenario or space file cannot be parsed or validated."""

    def __init__(self, field: str, reason: str, line: Optional[int] = None) -> None:
        """Raise with default message."""
        self.field = field
        self.reason = reason
        self.line = line
        where = f" (line {line})" if line is not None else ""
        self.message = f"Invalid configuration field '{field}'{where}: {reason}."
        super().__init__(self.message)


class DuplicateCheckError(TentlabError):
    """Exception raised when a suite holds two checks with the same name."""

    def __init__(self, name: str) -> None:
        """Raise with default message."""
        self.message = f"Check {name} appears more than once in the suite."
        super().__init__(self.message)
