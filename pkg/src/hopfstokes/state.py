"""Six-dimensional state boxes ``(x1, y1, x2, y2, s1, s2)``."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Iterable, Sequence

from .interval import Interval, IntervalVector

COORDINATES = ("x1", "y1", "x2", "y2", "s1", "s2")


@dataclass(frozen=True)
class StateBox:
    """Interval box in the real coordinates phi = x1 + i y1, varphi = x2 + i y2, s = s1 + i s2."""

    x1: Interval
    y1: Interval
    x2: Interval
    y2: Interval
    s1: Interval
    s2: Interval

    @classmethod
    def from_components(cls, comps: Iterable[Interval | float]) -> "StateBox":
        items = [c if isinstance(c, Interval) else Interval(c) for c in comps]
        if len(items) != 6:
            raise ValueError(f"a state box has 6 components, got {len(items)}")
        return cls(*items)

    @classmethod
    def from_bounds(cls, lo: Sequence[float], hi: Sequence[float]) -> "StateBox":
        return cls.from_components(Interval(float(a), float(b)) for a, b in zip(lo, hi))

    @classmethod
    def around(cls, center: Sequence[float], radius: Sequence[float]) -> "StateBox":
        """Box ``center ± radius`` with outward rounding."""
        return cls.from_components(
            Interval(float(c)) + Interval(-float(r), float(r)) for c, r in zip(center, radius)
        )

    def components(self) -> tuple[Interval, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def as_vector(self) -> IntervalVector:
        return IntervalVector(self.components())

    def lo(self) -> list[float]:
        return [c.lo for c in self.components()]

    def hi(self) -> list[float]:
        return [c.hi for c in self.components()]

    def mid(self) -> list[float]:
        return [c.mid() for c in self.components()]

    def widths(self) -> list[float]:
        return [c.width() for c in self.components()]

    def max_width(self) -> float:
        return max(self.widths())

    def xy(self) -> IntervalVector:
        return IntervalVector(self.components()[:4])

    def subset(self, other: "StateBox") -> bool:
        return all(a.subset(b) for a, b in zip(self.components(), other.components()))

    def hull(self, other: "StateBox") -> "StateBox":
        return StateBox.from_components(a.hull(b) for a, b in zip(self.components(), other.components()))

    def intersects(self, other: "StateBox") -> bool:
        return all(a.intersects(b) for a, b in zip(self.components(), other.components()))

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(p in c for c, p in zip(self.components(), point))

    def with_(self, **changes: Interval) -> "StateBox":
        return replace(self, **changes)

    def to_json(self) -> dict:
        return {name: c.to_json() for name, c in zip(COORDINATES, self.components())}

    @classmethod
    def from_json(cls, data: dict) -> "StateBox":
        return cls.from_components(Interval.from_json(data[n]) for n in COORDINATES)
