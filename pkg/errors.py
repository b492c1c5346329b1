from typing import Optional, Sequence, Tuple


class PosetQueueError(ValueError):
    """Base class for every error raised on invalid user input."""


class CycleError(PosetQueueError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("Relations induce a directed cycle: {}".format(" -> ".join(self.cycle + self.cycle[:1])))


class UnknownElement(PosetQueueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Unknown element: {name!r}")


class NotAPermutation(PosetQueueError):
    def __init__(self, message: str = "Order is not a permutation of the elements"):
        super().__init__(message)


class NotALinearExtension(PosetQueueError):
    def __init__(self, pair: Optional[Tuple[str, str]] = None):
        self.pair = pair
        if pair is None:
            super().__init__("Order is not a linear extension")
        else:
            super().__init__(f"Order is not a linear extension: {pair[1]!r} is placed before {pair[0]!r}")


class NotAnIdeal(PosetQueueError):
    def __init__(self, element: str):
        self.element = element
        super().__init__(f"Placed set is not downward closed: a predecessor of {element!r} is missing")


class InvalidDecomposition(PosetQueueError):
    pass


class OddWidth(PosetQueueError):
    def __init__(self, w: int):
        self.w = w
        super().__init__(f"The general construction needs an even width >= 2, got {w}")


class InvalidParameters(PosetQueueError):
    pass


class EmptyPoset(PosetQueueError):
    def __init__(self):
        super().__init__("Operation needs a non-empty poset")


class InconsistentConstraint(PosetQueueError):
    def __init__(self, pair: Tuple[str, str], reason: str = "contradicts the poset order"):
        self.pair = pair
        super().__init__(f"Constraint {pair[0]!r} before {pair[1]!r} {reason}")


class InvalidSpec(PosetQueueError):
    pass


class SchemaError(PosetQueueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
