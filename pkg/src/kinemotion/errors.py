"""Exception types raised across the pipeline."""


class KinemotionError(Exception):
    """Base class for all pipeline errors."""


class LogParseError(KinemotionError):
    """A raw tracking log line could not be parsed; message names the line."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class EmptyLogError(KinemotionError):
    """The raw tracking log contains no entries."""


class EmptyTrackError(KinemotionError):
    """Participant selection retained no frames."""


class TrackTooShortError(KinemotionError):
    """Fewer samples than the operation needs."""


class DegenerateJointError(KinemotionError):
    """A joint coordinate is missing in every sample; message names the joint."""


class SequenceFormatError(KinemotionError):
    """Cleaned-sequence stream has a bad magic, version, or layout."""


class DegenerateGridError(KinemotionError):
    """Pixel grid has zero spatial extent along an axis."""


class DegenerateLabelsError(KinemotionError):
    """Training data contains a single class."""


class StratificationError(KinemotionError):
    """A class has fewer members than the number of folds."""


class UndefinedMetricError(KinemotionError):
    """Metric undefined for the given inputs (e.g. AUC with one class)."""


class DegenerateSamplesError(KinemotionError):
    """Statistical test inputs carry no variance to compare."""


class InvariantViolation(KinemotionError):
    """A pipeline invariant guard failed; message names the invariant."""
