"""Exception types shared across the package."""


class BlockplanError(Exception):
    """Base class for all domain errors raised by this package."""


class GridRangeError(BlockplanError):
    """A requested size lies outside the tabulated cost grid."""


class GridMismatchError(BlockplanError):
    """A group sum does not land on the cost-table grid."""


class ClassificationUndefinedError(BlockplanError):
    """Too few samples to classify curvature (need at least 3)."""


class WrongPathError(BlockplanError):
    """A curvature-specific solver was invoked on a model of another shape."""


class UnsupportedDimensionError(BlockplanError):
    """Micro-ILP instances support at most three variables."""


class InvalidGadgetError(BlockplanError):
    """Hardness-gadget preconditions violated (total size must be divisible by 3)."""


class InstanceTooLargeError(BlockplanError):
    """Exact set-partition search is limited to desk-scale block counts."""


class ProbeError(BlockplanError):
    """A calibration probe failed to run."""


class ClockError(BlockplanError):
    """The timing clock produced a non-positive duration."""


class CalibrationGapError(BlockplanError):
    """Calibration grid has gaps and gap filling was not requested."""
