"""Exception types shared across the workbench."""


class ConfidriveError(Exception):
    """Base class for all workbench errors."""


class DegenerateSegment(ConfidriveError):
    """A track segment or track spec violates its construction invariants."""


class NonClosedLoop(ConfidriveError):
    """Compiled centerline does not return to the start pose within tolerance."""


class SelfIntersectingBoundary(ConfidriveError):
    """A compiled boundary polyline crosses itself."""


class OriginOutsideTrack(ConfidriveError):
    """Ray cast or scan requested from a point outside the track corridor."""


class ExpertCrashed(ConfidriveError):
    """The PID expert left the corridor during dataset generation."""


class EmptySplit(ConfidriveError):
    """A train/validation split would leave one side empty."""


class DigestMismatch(ConfidriveError):
    """Stored content digest does not match the file's data rows."""


class MalformedRow(ConfidriveError):
    """A persisted file row violates the file format contract."""


class DimensionMismatch(ConfidriveError):
    """Array shapes are inconsistent with the network architecture."""


class Diverged(ConfidriveError):
    """Training produced a non-finite objective value."""


class MissingModel(ConfidriveError):
    """An episode requires a model that was not supplied."""


class ConfigInvalid(ConfidriveError):
    """Experiment configuration failed validation."""
