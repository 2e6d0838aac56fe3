"""Exception types and the Undefined sentinel shared across the package."""

from __future__ import annotations


class SemicausalError(Exception):
    """Base class for all domain errors raised by this package."""


class InputError(SemicausalError):
    """Invalid argument or malformed input data."""


class FamilySizeError(InputError):
    """A model family enumeration exceeded its configured size cap."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"family has {size} members, exceeding the cap of {cap}")
        self.size = size
        self.cap = cap


class _UndefinedType:
    """Singleton marking a ratio whose denominator vanished.

    Quantities conditioned on zero-mass events are undefined, not zero and
    not an error; predicates quantify only over defined points.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __bool__(self) -> bool:
        return False


UNDEFINED = _UndefinedType()


class _InfiniteType:
    """Singleton for likelihood ratios with zero denominator but positive numerator."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = _InfiniteType()
