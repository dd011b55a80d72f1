class CapacityError(ValueError):
    """Requested size exceeds what exhaustive/dense methods are allowed to handle."""


class NonFiniteObjectiveError(FloatingPointError):
    """Objective returned NaN or infinity."""


class ConsistencyError(RuntimeError):
    """A recomputed quantity disagrees with the stored one."""
