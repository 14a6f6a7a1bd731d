"""Exception hierarchy shared by every module."""


class StackpriceError(Exception):
    """Base class for all library errors."""


class StructuralError(StackpriceError, ValueError):
    """Malformed instance, unknown resource id, or an inconsistent profile."""


class PathExplosion(StackpriceError):
    def __init__(self, cap):
        super().__init__(f"more than {cap} simple paths; instance too large for exhaustive enumeration")
        self.cap = cap


class NoPath(StackpriceError):
    pass


class ProfileExplosion(StackpriceError):
    def __init__(self, count, cap):
        super().__init__(f"{count} strategy profiles exceed the cap of {cap}")
        self.count = count
        self.cap = cap


class NegativeCycle(StackpriceError):
    """Raised when prices create a directed cycle of negative total cost."""

    def __init__(self, cycle):
        super().__init__(f"prices induce a negative-cost cycle through edges {list(cycle)}")
        self.cycle = tuple(cycle)


class MultiFollower(StackpriceError):
    pass


class ClutterViolation(StackpriceError, ValueError):
    pass


class MatroidError(StackpriceError, ValueError):
    pass


class CapExceeded(StackpriceError):
    pass


class ImmunityViolation(StackpriceError):
    """A structure expected to be immune showed a positive price of positivity."""
