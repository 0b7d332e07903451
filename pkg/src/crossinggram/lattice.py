"""Integer-lattice geometry: points, finite regions, norms and neighborhoods.

Everything downstream (exact coefficients, estimators, level counting) is
built on the d-neighborhood ``V_d(x)`` of a site and on finite regions of
the two-dimensional integer lattice.  Regions iterate in lexicographic
order so that every sum computed from them is reproducible bit for bit.
"""

from __future__ import annotations

import enum
import json
import math
import operator
from dataclasses import dataclass, field
from typing import Iterable, Iterator

Point = tuple[int, int]
"""A lattice site (x1, x2) with exact integer coordinates."""


class NormKind(enum.Enum):
    """Distance used to carve the d-neighborhood out of the lattice.

    Euclidean is the default everywhere: at d=1 it yields the 5-point
    plus shape, the smallest nontrivial neighborhood.
    """

    EUCLIDEAN = "euclidean"
    CHEBYSHEV = "chebyshev"
    MANHATTAN = "manhattan"

    @classmethod
    def from_name(cls, name: str) -> "NormKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown norm {name!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None

    def within(self, dx: int, dy: int, d: float) -> bool:
        """True when the offset (dx, dy) has norm <= d."""
        if self is NormKind.EUCLIDEAN:
            return dx * dx + dy * dy <= d * d
        if self is NormKind.CHEBYSHEV:
            return max(abs(dx), abs(dy)) <= d
        return abs(dx) + abs(dy) <= d


def _as_point(p: Iterable[int]) -> Point:
    x1, x2 = p
    try:
        # operator.index keeps the arithmetic exact: ints pass, floats do not
        return (operator.index(x1), operator.index(x2))
    except TypeError:
        raise TypeError(f"lattice coordinates must be integers, got {(x1, x2)!r}") from None


@dataclass(frozen=True)
class Region:
    """A finite, nonempty set of lattice sites with deterministic order.

    Points are stored deduplicated and sorted lexicographically by
    (x1, x2); iteration, serialization and all downstream reductions use
    that order.
    """

    points: tuple[Point, ...]
    _index: dict[Point, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = sorted({_as_point(p) for p in self.points})
        if not pts:
            raise ValueError("a region must contain at least one point")
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, p: object) -> bool:
        return p in self._index

    def index_of(self, p: Point) -> int:
        """Position of a site in canonical order (column index in samples)."""
        return self._index[p]

    def issubset(self, other: "Region") -> bool:
        return all(p in other for p in self.points)

    def union(self, other: "Region") -> "Region":
        return Region(self.points + other.points)

    def difference(self, other: "Region") -> tuple[Point, ...]:
        """Points of self missing from other, in canonical order."""
        return tuple(p for p in self.points if p not in other)

    def translate(self, dx: int, dy: int) -> "Region":
        return Region(tuple((x + dx, y + dy) for x, y in self.points))

    def to_json(self) -> str:
        """JSON array of [x1, x2] pairs, sorted lexicographically."""
        return json.dumps([[x, y] for x, y in self.points])

    @classmethod
    def from_json(cls, text: str) -> "Region":
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise ValueError("region JSON must be an array of [x1, x2] pairs")
        return cls(tuple((int(p[0]), int(p[1])) for p in raw))


def neighborhood(x: Point, d: float = 1.0, norm: NormKind = NormKind.EUCLIDEAN) -> Region:
    """All lattice sites within distance d of x (inclusive, so x itself too)."""
    if d <= 0:
        raise ValueError(f"neighborhood radius must be positive, got {d}")
    r = math.floor(d)
    cx, cy = _as_point(x)
    pts = [
        (cx + dx, cy + dy)
        for dx in range(-r, r + 1)
        for dy in range(-r, r + 1)
        if norm.within(dx, dy, d)
    ]
    return Region(tuple(pts))


def neighborhood_size(d: float = 1.0, norm: NormKind = NormKind.EUCLIDEAN) -> int:
    """|V_d(x)|, independent of x by translation invariance."""
    return len(neighborhood((0, 0), d, norm))


def dilate(a: Region, d: float = 1.0, norm: NormKind = NormKind.EUCLIDEAN) -> Region:
    """Union of V_d(x) over x in a; the support needed to estimate on a."""
    if d <= 0:
        raise ValueError(f"dilation radius must be positive, got {d}")
    r = math.floor(d)
    offsets = [
        (dx, dy)
        for dx in range(-r, r + 1)
        for dy in range(-r, r + 1)
        if norm.within(dx, dy, d)
    ]
    pts = {(x + dx, y + dy) for x, y in a.points for dx, dy in offsets}
    return Region(tuple(pts))


def require_crossing_geometry(d: float = 1.0, norm: NormKind = NormKind.EUCLIDEAN) -> int:
    """|V_d| checked to be >= 2; crossing ratios need a neighbor per site."""
    size = neighborhood_size(d, norm)
    if size < 2:
        raise ValueError(
            f"d={d} with the {norm.value} norm gives single-point neighborhoods; "
            "crossing coefficients need at least one neighbor per site"
        )
    return size


def v_sum(a: Region, d: float = 1.0, norm: NormKind = NormKind.EUCLIDEAN) -> int:
    """Sum over x in a of |V_d(x)|, neighborhoods taken over all of Z^2.

    Neighborhoods are never clipped to a, so by translation invariance
    this is exactly |a| * |V_d(0)|.
    """
    return len(a) * neighborhood_size(d, norm)


def make_disk(r: float, center: Point = (0, 0)) -> Region:
    """Closed disk {p : |p - center|^2 <= r^2} (Euclidean)."""
    if r <= 0:
        raise ValueError(f"disk radius must be positive, got {r}")
    cx, cy = _as_point(center)
    n = math.floor(r)
    rr = r * r
    pts = [
        (cx + dx, cy + dy)
        for dx in range(-n, n + 1)
        for dy in range(-n, n + 1)
        if dx * dx + dy * dy <= rr
    ]
    return Region(tuple(pts))


def make_annulus(r_lo: float, r_hi: float, center: Point = (0, 0)) -> Region:
    """Half-open annulus {p : r_lo^2 <= |p - center|^2 < r_hi^2}."""
    if r_lo < 0:
        raise ValueError(f"inner radius must be nonnegative, got {r_lo}")
    if r_lo >= r_hi:
        raise ValueError(f"annulus radii must satisfy r_lo < r_hi, got {r_lo} >= {r_hi}")
    cx, cy = _as_point(center)
    n = math.ceil(r_hi)
    lo2, hi2 = r_lo * r_lo, r_hi * r_hi
    pts = [
        (cx + dx, cy + dy)
        for dx in range(-n, n + 1)
        for dy in range(-n, n + 1)
        if lo2 <= dx * dx + dy * dy < hi2
    ]
    return Region(tuple(pts))


def make_square(half_side: int, center: Point = (0, 0)) -> Region:
    """Square window [c1-w, c1+w] x [c2-w, c2+w]; the map-command window."""
    if half_side < 0:
        raise ValueError(f"window half-side must be nonnegative, got {half_side}")
    cx, cy = _as_point(center)
    w = int(half_side)
    pts = [
        (cx + dx, cy + dy)
        for dx in range(-w, w + 1)
        for dy in range(-w, w + 1)
    ]
    return Region(tuple(pts))
