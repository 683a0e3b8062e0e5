"""Exception hierarchy shared by every stage of the pipeline.

The CLI maps :class:`MoistRoverError` to exit code 1 and :class:`ParseError`
to exit code 2, printing ``error: <ClassName>: <message>``.
"""


class MoistRoverError(Exception):
    """Base class for domain errors."""


class ParseError(MoistRoverError):
    """Malformed config, scenario, sample or model file."""


# raster
class CodecError(MoistRoverError):
    pass


class NoFieldFound(MoistRoverError):
    pass


class DegenerateHistogram(UserWarning):
    """Issued (not raised) when Otsu falls back to the fixed threshold."""


# mapper
class DimensionMismatch(MoistRoverError):
    pass


# planner
class SourceBlocked(MoistRoverError):
    pass


class Unreachable(MoistRoverError):
    pass


# calibration
class RankDeficient(MoistRoverError):
    pass


class OutOfDomain(MoistRoverError):
    pass


class NoRootInDomain(MoistRoverError):
    pass


# estimator
class AllMasked(MoistRoverError):
    pass


class ZeroLuminosity(MoistRoverError):
    pass


class InsufficientSoilPixels(MoistRoverError):
    pass


# sensor link
class VoltageRange(MoistRoverError):
    pass


class FrameError(MoistRoverError):
    pass


class ChecksumError(FrameError):
    pass


class RangeError(FrameError):
    pass


class BadMap(MoistRoverError):
    pass


# simulation
class ScenarioError(MoistRoverError):
    pass
