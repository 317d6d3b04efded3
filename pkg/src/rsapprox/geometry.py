"""Exact causal geometry of 1+1 Minkowski space.

Regions are finite unions of open boxes in null coordinates
``u = x0 - x1``, ``v = x0 + x1``.  Diamonds and wedges are single boxes in
these coordinates, so causal complements and completions stay exact.

Sets are compared up to measure-zero boundaries: every region is brought to
a canonical box decomposition (minimal arrangement, column-major merge), so
two regions covering the same open set compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

INF = math.inf
MEMBERSHIP_EPS = 1e-12


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Point2:
    x0: float
    x1: float

    @property
    def u(self) -> float:
        return self.x0 - self.x1

    @property
    def v(self) -> float:
        return self.x0 + self.x1

    @classmethod
    def from_null(cls, u: float, v: float) -> "Point2":
        return cls(0.5 * (u + v), 0.5 * (v - u))

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x0 + other.x0, self.x1 + other.x1)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x0 - other.x0, self.x1 - other.x1)

    def __neg__(self) -> "Point2":
        return Point2(-self.x0, -self.x1)


ORIGIN = Point2(0.0, 0.0)


class Box(NamedTuple):
    """Open box ``(u_lo, u_hi) x (v_lo, v_hi)``; bounds may be infinite."""

    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    @property
    def empty(self) -> bool:
        return not (self.u_lo < self.u_hi and self.v_lo < self.v_hi)

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(b) for b in self)

    def intersect(self, other: "Box") -> "Box":
        return Box(
            max(self.u_lo, other.u_lo),
            min(self.u_hi, other.u_hi),
            max(self.v_lo, other.v_lo),
            min(self.v_hi, other.v_hi),
        )

    def contains_box(self, other: "Box") -> bool:
        return (
            self.u_lo <= other.u_lo
            and other.u_hi <= self.u_hi
            and self.v_lo <= other.v_lo
            and other.v_hi <= self.v_hi
        )

    def inflate(self, du: float, dv: float | None = None) -> "Box":
        dv = du if dv is None else dv
        return Box(self.u_lo - du, self.u_hi + du, self.v_lo - dv, self.v_hi + dv)

    def spacelike_complement(self) -> list["Box"]:
        # p is spacelike to every q in the box iff it sits in one of the two
        # opposite quadrants attached to the box corners.
        return [
            Box(self.u_hi, INF, -INF, self.v_lo),
            Box(-INF, self.u_lo, self.v_hi, INF),
        ]


def _fmt_bound(b: float) -> str | float:
    if b == INF:
        return "inf"
    if b == -INF:
        return "-inf"
    return float(b)


def _parse_bound(b) -> float:
    if isinstance(b, str):
        s = b.strip().lower()
        if s in ("inf", "+inf"):
            return INF
        if s == "-inf":
            return -INF
        raise GeometryError(f"bad region bound {b!r}")
    val = float(b)
    if math.isnan(val):
        raise GeometryError("NaN region bound")
    return val


class Region:
    """Finite union of open null-coordinate boxes, kept in canonical form."""

    __slots__ = ("boxes",)

    def __init__(self, boxes: Iterable[Sequence[float]] = ()):
        self.boxes: tuple[Box, ...] = _canonical([Box(*map(float, b)) for b in boxes])

    # construction -----------------------------------------------------------
    @classmethod
    def full(cls) -> "Region":
        return cls([(-INF, INF, -INF, INF)])

    @classmethod
    def empty_region(cls) -> "Region":
        return cls()

    @classmethod
    def diamond(cls, center: Point2, radius: float) -> "Region":
        """Causal diamond ``|u - u_c| < r, |v - v_c| < r`` (null radius r)."""
        return cls([(center.u - radius, center.u + radius, center.v - radius, center.v + radius)])

    @classmethod
    def from_literal(cls, literal) -> "Region":
        """Parse ``[[u_lo, u_hi, v_lo, v_hi], ...]``; ``"inf"`` tokens accepted."""
        boxes = []
        for i, item in enumerate(literal):
            if len(item) != 4:
                raise GeometryError(f"box {i}: expected 4 bounds, got {len(item)}")
            b = Box(*(_parse_bound(x) for x in item))
            if b.empty:
                raise GeometryError(f"box {i}: inverted or empty bounds {list(item)}")
            boxes.append(b)
        return cls(boxes)

    def to_literal(self) -> list[list]:
        return [[_fmt_bound(b) for b in box] for box in self.boxes]

    # set algebra ------------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return not self.boxes

    @property
    def bounded(self) -> bool:
        return all(b.bounded for b in self.boxes)

    def union(self, other: "Region") -> "Region":
        return Region(self.boxes + other.boxes)

    __or__ = union

    def intersection(self, other: "Region") -> "Region":
        out = []
        for a in self.boxes:
            for b in other.boxes:
                c = a.intersect(b)
                if not c.empty:
                    out.append(c)
        return Region(out)

    __and__ = intersection

    def difference(self, other: "Region") -> "Region":
        pieces = list(self.boxes)
        for cut in other.boxes:
            nxt = []
            for p in pieces:
                nxt.extend(_box_minus(p, cut))
            pieces = nxt
        return Region(pieces)

    __sub__ = difference

    def issubset(self, other: "Region") -> bool:
        return (self - other).is_empty

    def __eq__(self, other) -> bool:
        return isinstance(other, Region) and self.boxes == other.boxes

    def __hash__(self) -> int:
        return hash(self.boxes)

    def __repr__(self) -> str:
        return f"Region({self.to_literal()})"

    def bounding_box(self) -> Box:
        if not self.boxes:
            raise GeometryError("empty region has no bounding box")
        return Box(
            min(b.u_lo for b in self.boxes),
            max(b.u_hi for b in self.boxes),
            min(b.v_lo for b in self.boxes),
            max(b.v_hi for b in self.boxes),
        )

    def inflate(self, margin: float) -> "Region":
        return Region([b.inflate(margin) for b in self.boxes])

    def contains(self, x0, x1, eps: float = MEMBERSHIP_EPS) -> np.ndarray:
        """Vectorized membership in the open set shrunk by ``eps``."""
        x0 = np.asarray(x0, dtype=float)
        x1 = np.asarray(x1, dtype=float)
        u, v = x0 - x1, x0 + x1
        out = np.zeros(np.broadcast(u, v).shape, dtype=bool)
        for b in self.boxes:
            out |= (u > b.u_lo + eps) & (u < b.u_hi - eps) & (v > b.v_lo + eps) & (v < b.v_hi - eps)
        return out

    def map_null(self, su: float, du: float, sv: float, dv: float) -> "Region":
        """Image under ``u -> su*u + du``, ``v -> sv*v + dv`` (su, sv > 0)."""
        return Region([(su * b.u_lo + du, su * b.u_hi + du, sv * b.v_lo + dv, sv * b.v_hi + dv) for b in self.boxes])

    def translate(self, a: Point2) -> "Region":
        return self.map_null(1.0, a.u, 1.0, a.v)

    def boost(self, eta: float, center: Point2 = ORIGIN) -> "Region":
        """Image under the boost with rapidity eta about ``center``.

        The boost scales ``u`` by ``exp(-eta)`` and ``v`` by ``exp(eta)``.
        """
        su, sv = math.exp(-eta), math.exp(eta)
        return self.map_null(su, center.u * (1 - su), sv, center.v * (1 - sv))

    def reflect(self, center: Point2 = ORIGIN) -> "Region":
        return Region(
            [(2 * center.u - b.u_hi, 2 * center.u - b.u_lo, 2 * center.v - b.v_hi, 2 * center.v - b.v_lo) for b in self.boxes]
        )


def _box_minus(a: Box, b: Box) -> list[Box]:
    c = a.intersect(b)
    if c.empty:
        return [a]
    out = []
    # slabs in u left/right of the cut, then v below/above inside the cut's u-range
    if a.u_lo < c.u_lo:
        out.append(Box(a.u_lo, c.u_lo, a.v_lo, a.v_hi))
    if c.u_hi < a.u_hi:
        out.append(Box(c.u_hi, a.u_hi, a.v_lo, a.v_hi))
    if a.v_lo < c.v_lo:
        out.append(Box(c.u_lo, c.u_hi, a.v_lo, c.v_lo))
    if c.v_hi < a.v_hi:
        out.append(Box(c.u_lo, c.u_hi, c.v_hi, a.v_hi))
    return out


def _canonical(boxes: list[Box]) -> tuple[Box, ...]:
    boxes = [b for b in boxes if not b.empty]
    if not boxes:
        return ()
    us = sorted({b.u_lo for b in boxes} | {b.u_hi for b in boxes})
    vs = sorted({b.v_lo for b in boxes} | {b.v_hi for b in boxes})
    ui = {x: i for i, x in enumerate(us)}
    vi = {x: i for i, x in enumerate(vs)}
    cov = np.zeros((len(us) - 1, len(vs) - 1), dtype=bool)
    for b in boxes:
        cov[ui[b.u_lo] : ui[b.u_hi], vi[b.v_lo] : vi[b.v_hi]] = True

    # drop breakpoints that separate identical columns / rows
    keep_u = [0] + [i for i in range(1, len(us) - 1) if not np.array_equal(cov[i - 1], cov[i])] + [len(us) - 1]
    cov = np.array([cov[i] for i in keep_u[:-1]])
    us = [us[i] for i in keep_u]
    keep_v = [0] + [j for j in range(1, len(vs) - 1) if not np.array_equal(cov[:, j - 1], cov[:, j])] + [len(vs) - 1]
    cov = cov[:, keep_v[:-1]]
    vs = [vs[j] for j in keep_v]

    out = []
    for i in range(cov.shape[0]):
        j = 0
        while j < cov.shape[1]:
            if cov[i, j]:
                j0 = j
                while j < cov.shape[1] and cov[i, j]:
                    j += 1
                out.append(Box(us[i], us[i + 1], vs[j0], vs[j]))
            else:
                j += 1
    # merge u-adjacent boxes sharing the same v-interval
    merged: list[Box] = []
    open_runs: dict[tuple[float, float], int] = {}
    for b in out:
        key = (b.v_lo, b.v_hi)
        k = open_runs.get(key)
        if k is not None and merged[k].u_hi == b.u_lo:
            merged[k] = merged[k]._replace(u_hi=b.u_hi)
        else:
            open_runs[key] = len(merged)
            merged.append(b)
    return tuple(sorted(merged))


W_R = Region([(-INF, 0.0, 0.0, INF)])
W_L = Region([(0.0, INF, -INF, 0.0)])


def causal_complement(r: Region) -> Region:
    """Points spacelike to every point of ``r``; empty input gives everything."""
    out = Region.full()
    for b in r.boxes:
        out = out & Region(b.spacelike_complement())
        if out.is_empty:
            break
    return out


def causal_completion(r: Region) -> Region:
    return causal_complement(causal_complement(r))


def causal_future(r: Region) -> Region:
    return Region([(b.u_lo, INF, b.v_lo, INF) for b in r.boxes])


def causal_past(r: Region) -> Region:
    return Region([(-INF, b.u_hi, -INF, b.v_hi) for b in r.boxes])


@dataclass(frozen=True)
class Relation:
    subset_ab: bool
    subset_ba: bool
    disjoint: bool
    spacelike_separated: bool


def relate(a: Region, b: Region) -> Relation:
    return Relation(
        subset_ab=a.issubset(b),
        subset_ba=b.issubset(a),
        disjoint=(a & b).is_empty,
        spacelike_separated=b.issubset(causal_complement(a)),
    )


@dataclass(frozen=True)
class Frame:
    """Working coordinates ``x' = boost(rapidity_offset) x + translation``."""

    translation: Point2 = ORIGIN
    rapidity_offset: float = 0.0

    def to_frame(self, x0, x1):
        c, s = math.cosh(self.rapidity_offset), math.sinh(self.rapidity_offset)
        x0 = np.asarray(x0, dtype=float)
        x1 = np.asarray(x1, dtype=float)
        return c * x0 + s * x1 + self.translation.x0, c * x1 + s * x0 + self.translation.x1

    def from_frame(self, y0, y1):
        c, s = math.cosh(self.rapidity_offset), math.sinh(self.rapidity_offset)
        y0 = np.asarray(y0, dtype=float) - self.translation.x0
        y1 = np.asarray(y1, dtype=float) - self.translation.x1
        return c * y0 - s * y1, c * y1 - s * y0

    @property
    def origin(self) -> Point2:
        """Frame origin (the wedge edge) in lab coordinates."""
        t, x = self.from_frame(0.0, 0.0)
        return Point2(float(t), float(x))

    def region_to_frame(self, r: Region) -> Region:
        return r.boost(self.rapidity_offset).translate(self.translation)

    def region_from_frame(self, r: Region) -> Region:
        return r.translate(-self.translation).boost(-self.rapidity_offset)

    def inverse(self) -> "Frame":
        # x = boost(-rho)(x' - a) = boost(-rho) x' - boost(-rho) a
        c, s = math.cosh(self.rapidity_offset), math.sinh(self.rapidity_offset)
        a = self.translation
        return Frame(Point2(-(c * a.x0 - s * a.x1), -(c * a.x1 - s * a.x0)), -self.rapidity_offset)

    def compose(self, other: "Frame") -> "Frame":
        """Frame applying ``other`` first, then ``self``."""
        c, s = math.cosh(self.rapidity_offset), math.sinh(self.rapidity_offset)
        b = other.translation
        t = Point2(c * b.x0 + s * b.x1 + self.translation.x0, c * b.x1 + s * b.x0 + self.translation.x1)
        return Frame(t, self.rapidity_offset + other.rapidity_offset)


def select_frame(r: Region, margin: float) -> Frame:
    """Pure translation putting ``r`` inside the left wedge with a null margin."""
    if margin <= 0:
        raise GeometryError("margin must be positive")
    if r.is_empty:
        return Frame()
    if not r.bounded:
        raise GeometryError("cannot fit a wedge frame around an unbounded region")
    bb = r.bounding_box()
    if bb.u_lo >= margin and bb.v_hi <= -margin:
        return Frame()
    # slack absorbs rounding in the (u, v) -> (x0, x1) round trip
    slack = 1e-12 * (1.0 + abs(bb.u_lo) + abs(bb.v_hi) + margin)
    du = max(0.0, margin - bb.u_lo + slack)
    dv = min(0.0, -margin - bb.v_hi - slack)
    return Frame(Point2(0.5 * (du + dv), 0.5 * (dv - du)))
