"""Exception hierarchy for the simulator, vision stack, and tooling."""


class PushCorrectError(Exception):
    """Base class for all package errors."""


class ConfigError(PushCorrectError):
    """Invalid configuration file, override, or parameter value."""


# --- world / manipulation ---------------------------------------------------

class SimulationError(PushCorrectError):
    """Base class for manipulation-action failures. Failed actions never
    mutate the world (noise draws may still be consumed)."""


class ObjectNotFound(SimulationError):
    pass


class GraspInfeasible(SimulationError):
    pass


class NothingHeld(SimulationError):
    pass


class PlacementCollision(SimulationError):
    pass


class PushBlocked(SimulationError):
    pass


class DistanceCapExceeded(SimulationError):
    pass


class OutOfBounds(SimulationError):
    pass


# --- vision ------------------------------------------------------------------

class VisionError(PushCorrectError):
    """Base class for perception-chain failures."""


class BehindCamera(VisionError):
    pass


class ObjectNotDetected(VisionError):
    pass


class AmbiguousDetection(VisionError):
    pass


class DegenerateContour(VisionError):
    pass


class NotAQuadrilateral(VisionError):
    pass


class SingularConfiguration(VisionError):
    pass


class DivergedOptimization(VisionError):
    pass


# --- controller / harness ----------------------------------------------------

class CorrectionStalled(PushCorrectError):
    """Correction loop measured no improvement for three consecutive pushes."""


class EmptyInput(PushCorrectError):
    """Statistics requested over zero completed records."""


class IoFailure(PushCorrectError):
    """Export file could not be written."""
