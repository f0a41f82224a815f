"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can map failures without string matching.
"""


class UiotError(Exception):
    """Base class for all engine errors."""

    code = "UiotError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(UiotError):
    code = "ValidationError"


class ZeroVector(UiotError):
    code = "ZeroVector"


class DimensionMismatch(UiotError):
    code = "DimensionMismatch"


class EmptySet(UiotError):
    code = "EmptySet"


class EmptyDataset(UiotError):
    code = "EmptyDataset"


class InfeasibleMarginals(UiotError):
    code = "InfeasibleMarginals"


class NotNormalized(UiotError):
    code = "NotNormalized"


class UnknownScreenshotId(UiotError):
    code = "UnknownScreenshotId"


class UnknownAppId(UiotError):
    code = "UnknownAppId"


class DegenerateSet(UiotError):
    code = "DegenerateSet"


class ManifestParseError(UiotError):
    code = "ManifestParseError"


class EmbeddingFileCorrupt(UiotError):
    code = "EmbeddingFileCorrupt"


class DuplicateAppId(UiotError):
    code = "DuplicateAppId"


class UnsupportedImageFormat(UiotError):
    code = "UnsupportedImageFormat"


class EncoderUnavailable(UiotError):
    code = "EncoderUnavailable"


class EncoderShapeMismatch(UiotError):
    code = "EncoderShapeMismatch"


class BadTemplate(UiotError):
    code = "BadTemplate"


class UnknownCategory(UiotError):
    code = "UnknownCategory"


class IncompleteTable(UiotError):
    code = "IncompleteTable"


class InsufficientScreenshots(UiotError):
    code = "InsufficientScreenshots"


class EmptyStudy(UiotError):
    code = "EmptyStudy"


class UnknownStudyId(UiotError):
    code = "UnknownStudyId"
