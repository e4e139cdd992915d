"""Exception types raised by tentropy."""


class TEntropyError(ValueError):
    """Base class for all input and validation errors."""


class OutOfRange(TEntropyError):
    def __init__(self, index, value, size):
        self.index = index
        self.value = value
        self.size = size
        super().__init__(f"alpha[{index}] = {value} is outside [0, {size - 1}]")


class NotACycle(TEntropyError):
    pass


class BadCoefficients(TEntropyError):
    pass


class InvalidMeasure(TEntropyError):
    pass


class NegativeWeight(TEntropyError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"weight[{index}] = {value} is negative")


class NegativeEntry(TEntropyError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"matrix entry B[{row}][{col}] = {value} is negative")


class SupportViolation(TEntropyError):
    """Matrix mass off the graph of alpha: not a transfer operator for this map."""

    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(
            f"B[{row}][{col}] = {value} but alpha({col}) != {row}; "
            "the homological identity forbids this entry"
        )


class NonPositiveMass(TEntropyError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"mass m[{index}] = {value} must be positive")


class NotAPartition(TEntropyError):
    def __init__(self, point, total, reason="sum"):
        self.point = point
        self.total = total
        if reason == "sum":
            msg = f"elements sum to {total} at point {point}, expected 1"
        else:
            msg = f"negative entry {total} at point {point}"
        super().__init__(msg)


class NotInvariant(TEntropyError):
    pass
