"""Exception hierarchy. CLI exit codes hang off these classes."""


class PrimalCurvError(Exception):
    """Base class."""


class InputError(PrimalCurvError, ValueError):
    """Bad arguments: out-of-range ids, violated preconditions."""


class SchemaError(InputError):
    """Malformed instance description."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnsupportedFamilyError(SchemaError):
    pass


class ObjectiveFaultError(PrimalCurvError):
    """The objective returned a non-finite value."""

    def __init__(self, subset, value):
        super().__init__(f"non-finite objective value {value!r} at {list(subset)}")
        self.subset = tuple(subset)
        self.value = value


class EnumerationInfeasibleError(PrimalCurvError):
    """An exact enumeration would exceed its configured cap."""

    def __init__(self, what, needed, cap):
        super().__init__(f"{what}: {needed} exceeds cap {cap}")
        self.needed = needed
        self.cap = cap


class SupermatroidUndefinedError(PrimalCurvError):
    """k == n, so the (k+1)-element greedy extension does not exist."""


class DegenerateInstanceError(PrimalCurvError):
    """A ratio would divide by a zero objective value."""
