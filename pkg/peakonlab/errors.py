"""Exception hierarchy for peakonlab"""
from typing import Optional


class PeakonLabError(Exception):
    """Base class for all peakonlab errors"""


class ConfigError(PeakonLabError, ValueError):
    """Scenario configuration is missing or invalid"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class CollisionError(PeakonLabError):
    """Two peakon positions came closer than the collision threshold"""

    def __init__(self, index: int, gap: float):
        self.index = index
        self.gap = gap
        super().__init__(f"peakons {index} and {index + 1} collided (gap={gap:.3e})")


class BlowupSuspectedError(PeakonLabError, FloatingPointError):
    """Non-finite values appeared while evaluating a PDE right-hand side"""

    def __init__(self, time: Optional[float] = None):
        self.time = time
        where = f" at t={time:.17g}" if time is not None else ""
        super().__init__(f"non-finite values in right-hand side{where}")


class TestFunctionSupportError(PeakonLabError, ValueError):
    """Test function support leaves the sampled window"""
    __test__ = False
