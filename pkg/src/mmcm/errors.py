"""Exception types shared across the toolkit."""


class MmcmError(Exception):
    """Base class for all toolkit errors."""


class BadMagic(MmcmError):
    """File does not start with the MMC1 magic bytes."""


class UnknownDtype(MmcmError):
    """Header carries a dtype code this reader does not know."""


class TruncatedPayload(MmcmError):
    """File ends before width*height samples were read."""


class OversizedPayload(MmcmError):
    """File carries bytes beyond the declared payload."""


class NonFiniteValue(MmcmError):
    """A float raster contains NaN or infinity."""


class OutOfRangeConfidence(MmcmError):
    """A confidence raster contains values outside [0, 1]."""


class DimensionMismatch(MmcmError):
    """Rasters that must be aligned have different shapes."""


class TooFewModels(MmcmError):
    """Consensus needs at least two models."""


class InvalidBinCount(MmcmError):
    """Histogram bin count must be >= 1."""


class InvalidTau(MmcmError):
    """Discontinuity threshold factor must be > 0."""


class EmptyGroup(MmcmError):
    """A score group must contain at least one frame."""


class OutOfRangeMean(MmcmError):
    """Group means must lie in [0, 1]."""


class TooFewPoints(MmcmError):
    """A trend fit needs at least two points."""


class DegenerateX(MmcmError):
    """A trend fit needs non-constant x values."""


class ManifestError(MmcmError):
    """Base class for manifest loading problems."""


class ParseError(ManifestError):
    """Manifest file is not valid JSON."""


class SchemaViolation(ManifestError):
    """Manifest JSON does not match the documented schema."""


class DuplicateId(ManifestError):
    """Dataset, scene, frame, or model ids collide."""


class ModelCountMismatch(ManifestError):
    """A frame's prediction count differs from the manifest model list."""


class UnknownDataset(MmcmError):
    """A dataset id referenced on the command line does not exist."""


class UnrealizableAgreement(MmcmError):
    """Synthetic spec cannot realize the requested agreement exactly."""


class AllFramesFailed(MmcmError):
    """Corpus scoring produced no successful frame."""
