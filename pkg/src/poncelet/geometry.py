"""Plane-geometry primitives: vectors, the quarter-turn J, unit frames,
exact rational angles, and polyline self-intersection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite vector components ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def __iter__(self):
        yield self.x
        yield self.y


def quarter_turn(v: Vec2) -> Vec2:
    """Apply J = ((0,-1),(1,0)): rotate v by +90 degrees."""
    return Vec2(-v.y, v.x)


def frame(phi: float) -> tuple[Vec2, Vec2]:
    """Unit frame u(phi) = (cos, sin) and u'(phi) = J u = (-sin, cos)."""
    c, s = math.cos(phi), math.sin(phi)
    return Vec2(c, s), Vec2(-s, c)


@dataclass(frozen=True)
class RationalAngle:
    """Exact rational multiple of pi: value = (num/den)*pi radians."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise GeometryError("zero denominator")
        f = Fraction(self.num, self.den)
        object.__setattr__(self, "num", f.numerator)
        object.__setattr__(self, "den", f.denominator)

    @classmethod
    def from_fraction(cls, f: Fraction) -> RationalAngle:
        return cls(f.numerator, f.denominator)

    @property
    def coeff(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def radians(self) -> float:
        return self.num * math.pi / self.den

    def __add__(self, other: RationalAngle) -> RationalAngle:
        return RationalAngle.from_fraction(self.coeff + other.coeff)

    def __sub__(self, other: RationalAngle) -> RationalAngle:
        return RationalAngle.from_fraction(self.coeff - other.coeff)

    def __neg__(self) -> RationalAngle:
        return RationalAngle(-self.num, self.den)

    def __mul__(self, k: int) -> RationalAngle:
        return RationalAngle.from_fraction(self.coeff * k)

    __rmul__ = __mul__

    def is_multiple_of_pi(self) -> bool:
        return self.den == 1

    def add_pi_multiple(self, i: int) -> RationalAngle:
        return RationalAngle.from_fraction(self.coeff + i)


def closure_steps(step: RationalAngle, total: RationalAngle) -> int:
    """Smallest j >= 1 with j*step an exact integer multiple of total."""
    if total.num == 0:
        raise GeometryError("zero total angle")
    ratio = step.coeff / total.coeff
    return abs(ratio.denominator)


def _as_points(points) -> np.ndarray:
    pts = np.asarray([(p.x, p.y) if isinstance(p, Vec2) else tuple(p) for p in points], dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError("points must be a sequence of 2d points")
    return pts


def polyline_self_intersects(points, closed: bool = True, eps: float = 1e-12) -> bool:
    """True iff any two non-adjacent segments of the polyline intersect.

    Adjacency wraps across the end when closed. Touching endpoints of
    adjacent segments never count; any contact between non-adjacent
    segments does. Orientation signs use an epsilon on cross products.
    """
    pts = _as_points(points)
    npts = len(pts)
    if npts < 3:
        raise GeometryError("need at least 3 points")
    if closed:
        seg_a = pts
        seg_b = np.roll(pts, -1, axis=0)
    else:
        seg_a = pts[:-1]
        seg_b = pts[1:]
    if np.any(np.all(seg_a == seg_b, axis=1)):
        raise GeometryError("repeated consecutive points")

    nseg = len(seg_a)
    i_idx, j_idx = np.triu_indices(nseg, k=2)
    if closed:
        keep = ~((i_idx == 0) & (j_idx == nseg - 1))
        i_idx, j_idx = i_idx[keep], j_idx[keep]
    if len(i_idx) == 0:
        return False

    a1, b1 = seg_a[i_idx], seg_b[i_idx]
    a2, b2 = seg_a[j_idx], seg_b[j_idx]

    # bounding-box prefilter
    lo1 = np.minimum(a1, b1); hi1 = np.maximum(a1, b1)
    lo2 = np.minimum(a2, b2); hi2 = np.maximum(a2, b2)
    boxes = np.all((lo1 <= hi2 + eps) & (lo2 <= hi1 + eps), axis=1)
    if not np.any(boxes):
        return False
    a1, b1, a2, b2 = a1[boxes], b1[boxes], a2[boxes], b2[boxes]

    def cross2(u, v):
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    d1 = cross2(b1 - a1, a2 - a1)
    d2 = cross2(b1 - a1, b2 - a1)
    d3 = cross2(b2 - a2, a1 - a2)
    d4 = cross2(b2 - a2, b1 - a2)
    s1 = np.where(d1 > eps, 1, np.where(d1 < -eps, -1, 0))
    s2 = np.where(d2 > eps, 1, np.where(d2 < -eps, -1, 0))
    s3 = np.where(d3 > eps, 1, np.where(d3 < -eps, -1, 0))
    s4 = np.where(d4 > eps, 1, np.where(d4 < -eps, -1, 0))

    proper = (s1 * s2 < 0) & (s3 * s4 < 0)
    if np.any(proper):
        return True

    # touching / collinear candidates: confirm overlap along the support line
    cand = np.nonzero((s1 * s2 <= 0) & (s3 * s4 <= 0))[0]
    for idx in cand:
        if _segments_touch(a1[idx], b1[idx], a2[idx], b2[idx], eps):
            return True
    return False


def _segments_touch(a1, b1, a2, b2, eps) -> bool:
    def on_segment(a, b, p):
        ab = b - a
        cr = ab[0] * (p - a)[1] - ab[1] * (p - a)[0]
        if abs(cr) > eps * max(1.0, float(np.hypot(*ab))):
            return False
        t = float((p - a) @ ab) / float(ab @ ab)
        return -1e-12 <= t <= 1 + 1e-12

    return any(on_segment(a1, b1, p) for p in (a2, b2)) or any(
        on_segment(a2, b2, p) for p in (a1, b1)
    )
