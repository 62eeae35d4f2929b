"""Model values: ints, bools, uninterpreted-sort values, tuples, finite sets."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import SetRelError


@dataclass(frozen=True)
class UValue:
    """A value of an uninterpreted sort."""
    sort_name: str
    index: int

    def __repr__(self) -> str:
        return f"@{self.sort_name}_{self.index}"


def value_sort_key(v) -> tuple:
    """Deterministic total order on values, used for canonical model printing
    and enumeration order."""
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (1, v)
    if isinstance(v, UValue):
        return (2, v.sort_name, v.index)
    if isinstance(v, tuple):
        return (3, tuple(value_sort_key(x) for x in v))
    if isinstance(v, frozenset):
        return (4, tuple(sorted(value_sort_key(x) for x in v)))
    raise SetRelError(f"unorderable value {v!r}")
