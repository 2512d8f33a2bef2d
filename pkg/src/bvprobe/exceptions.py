"""Exception hierarchy shared by all bvprobe modules."""


class BVProbeError(Exception):
    """Base class for errors raised by bvprobe."""


class NotHermitian(BVProbeError, ValueError):
    pass


class InvalidState(BVProbeError, ValueError):
    """A state or operator violates its invariants (norm, trace, positivity)."""


class BadIndex(BVProbeError, IndexError):
    pass


class DimensionTooLarge(BVProbeError, ValueError):
    pass


class GammaOutOfRange(BVProbeError, ValueError):
    pass


class NotConverged(BVProbeError, RuntimeError):
    def __init__(self, iterations, gap, message=None):
        self.iterations = iterations
        self.gap = gap
        super().__init__(
            message or f"solver did not converge after {iterations} Newton steps (gap={gap:.3e})"
        )


class ExtractionFailed(BVProbeError, RuntimeError):
    pass
