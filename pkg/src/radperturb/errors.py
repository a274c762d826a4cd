"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`RadPerturbError`, so callers can catch the whole family at once.
"""


class RadPerturbError(Exception):
    """Base class for all package errors."""


# voxel data and file I/O
class MalformedHeader(RadPerturbError, ValueError):
    pass


class DimensionUnsupported(RadPerturbError, ValueError):
    pass


class DataSizeMismatch(RadPerturbError, ValueError):
    pass


class IoFailure(RadPerturbError, OSError):
    pass


class GeometryMismatch(RadPerturbError, ValueError):
    pass


class EmptyMask(RadPerturbError, ValueError):
    pass


class NotBinarised(RadPerturbError, ValueError):
    pass


# processing
class InvalidBeta(RadPerturbError, ValueError):
    pass


class EmptyIntensityMask(RadPerturbError, ValueError):
    pass


class VolumeTooSmall(RadPerturbError, ValueError):
    pass


class NotIsotropic(RadPerturbError, ValueError):
    pass


class UnknownChain(RadPerturbError, KeyError):
    pass


# features
class EmptyRoi(RadPerturbError, ValueError):
    pass


class DegenerateMesh(RadPerturbError, ValueError):
    pass


class ZeroVariance(RadPerturbError, ValueError):
    pass


# robustness statistics
class DegenerateVariance(RadPerturbError, ValueError):
    pass


class TooFewSubjects(RadPerturbError, ValueError):
    pass


class ZeroSpread(RadPerturbError, ValueError):
    pass


class SchemaMismatch(RadPerturbError, ValueError):
    pass


# phantoms and configuration
class SpecInvalid(RadPerturbError, ValueError):
    pass


class ConfigError(RadPerturbError, ValueError):
    pass
