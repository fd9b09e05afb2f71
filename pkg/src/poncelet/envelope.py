"""Envelopes of polygon side lines for a prescribed vertex curve.

Given a vertex curve Y and a torsion map f of its parameter circle, the
side family (1-s) Y + s (Y o f) has the envelope

    X = Y - <Y', J D> / <D', J D> * D,         D = Y o f - Y,

and the chord parameter s lies in (0, 1) exactly when the contact point
falls inside the polygon side. All checks are evaluated in the conjugated
parametrization Z = Y o h^-1, where the step becomes the rigid rotation by
alpha = m L / n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .circlemaps import CircleDiffeo, TorsionMap
from .equiangular import ConstructionError
from .geometry import polyline_self_intersects
from .support import PlaneCurve, fd_jet

FD_STEP_REL = 1e-4
GRID = 512


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]


def _J(a: np.ndarray) -> np.ndarray:
    return np.stack([-a[:, 1], a[:, 0]], axis=1)


@dataclass(frozen=True)
class VertexStepSystem:
    vertex_curve: PlaneCurve
    step: TorsionMap

    def __post_init__(self):
        if self.step.period < 3:
            raise ConstructionError(
                "step period must be at least 3 (a 2-gon collapses to a segment)")
        if not math.isclose(self.step.circumference, self.vertex_curve.domain_length):
            raise ConstructionError("step map and curve live on different circles")

    @property
    def rotation_angle(self) -> float:
        return self.step.rotation_angle

    def polygon_params(self, start: float) -> list[float]:
        params = [float(start)]
        for _ in range(self.step.period - 1):
            params.append(float(self.step.map.lift(params[-1])))
        return params

    def conjugated_curve(self) -> PlaneCurve:
        """Z = Y o h^-1 with the step turned into a rigid rotation."""
        f = self.step
        if f.map.is_rotation:
            return self.vertex_curve
        h = f.conjugating
        if h is None:
            from .circlemaps import conjugator_to_rotation
            h = conjugator_to_rotation(f)
        hinv = h.inverse()
        Y = self.vertex_curve
        L = Y.domain_length

        def pos(ts: np.ndarray) -> np.ndarray:
            return Y.positions(hinv.lift(ts))

        return PlaneCurve(L, fd_jet(pos, FD_STEP_REL * L), label=Y.label, position_fn=pos)


def _segment_data(Z: PlaneCurve, alpha: float, ts: np.ndarray):
    p0, v0, _ = Z.jet_many(ts)
    p1, v1, _ = Z.jet_many(ts + alpha)
    delta = p1 - p0
    ddelta = v1 - v0
    return p0, v0, p1, v1, delta, ddelta


def _locate_zero(fn, lo: float, hi: float, iters: int = 80) -> float:
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


class EnvelopeSingularity(ConstructionError):
    def __init__(self, params: list[float]):
        self.params = params
        super().__init__(
            "side-family denominator <D', J D> vanishes near parameters "
            + ", ".join(f"{t:.6f}" for t in params))


@dataclass(frozen=True)
class EnvelopeResult:
    curve: PlaneCurve
    s: Callable[[np.ndarray], np.ndarray]
    conjugated: PlaneCurve
    rotation_angle: float


def envelope_from_vertex(system: VertexStepSystem,
                         grid: int = GRID) -> EnvelopeResult:
    """Envelope of the polygon side lines, with the chord parameter s.

    The returned curve and s are parametrized by the conjugated parameter;
    for a rigid-rotation step this is the vertex-curve parameter itself.
    A vanishing denominator is reported with the offending parameters.
    """
    Z = system.conjugated_curve()
    L = Z.domain_length
    alpha = system.rotation_angle

    def denom(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        _, _, _, _, delta, ddelta = _segment_data(Z, alpha, ts)
        return _dot(ddelta, _J(delta))

    ts = np.linspace(0.0, L, grid, endpoint=False)
    d = denom(ts)
    sign_flips = np.nonzero(np.sign(d) * np.sign(np.roll(d, -1)) <= 0)[0]
    if len(sign_flips):
        params = []
        for i in sign_flips[:8]:
            lo, hi = ts[i], ts[i] + L / grid
            params.append(_locate_zero(lambda t: float(denom(t)[0]), lo, hi))
        raise EnvelopeSingularity(params)

    def s_fn(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        _, v0, _, _, delta, ddelta = _segment_data(Z, alpha, ts)
        return -_dot(v0, _J(delta)) / _dot(ddelta, _J(delta))

    def pos(ts: np.ndarray) -> np.ndarray:
        p0 = Z.positions(ts)
        delta = Z.positions(ts + alpha) - p0
        return p0 + s_fn(ts)[:, None] * delta

    curve = PlaneCurve(L, fd_jet(pos, FD_STEP_REL * L), label="C", position_fn=pos)
    return EnvelopeResult(curve, s_fn, Z, alpha)


def interior_contact_bound(l) -> float:
    """Sufficient a for the iterated family p = a + cos(l*phi) to touch
    inside the sides: a >= sqrt(cot^2(pi/l) l^2 + 1). For integer l the
    positive-curvature condition a > 2 l^2 - 1 already implies it."""
    lf = float(l)
    cot = 1.0 / math.tan(math.pi / lf)
    return math.sqrt(cot * cot * lf * lf + 1.0)


@dataclass(frozen=True)
class RegularityReport:
    min_abs_det: float
    det_sign_changes: tuple[float, ...]
    curvature_sign_consistent: bool
    samples: int

    @property
    def regular(self) -> bool:
        return len(self.det_sign_changes) == 0 and self.min_abs_det > 0.0


def envelope_regularity(system: VertexStepSystem, result: EnvelopeResult | None = None,
                        samples: int = GRID) -> RegularityReport:
    """Regularity determinant of the envelope in the conjugated form.

    Rows: (<Z',JD>, <Z'_a,JD>) and (<Z'',JD> + 2<Z',JD'>, <Z''_a,JD> + 2<Z'_a,JD'>).
    Cross-check: sign of <X'', J X'> must match sign of <D', J D>.
    """
    if result is None:
        result = envelope_from_vertex(system)
    Z, alpha = result.conjugated, result.rotation_angle
    L = Z.domain_length
    ts = np.linspace(0.0, L, samples, endpoint=False)
    p0, v0, a0 = Z.jet_many(ts)
    p1, v1, a1 = Z.jet_many(ts + alpha)
    delta = p1 - p0
    ddelta = v1 - v0
    jd = _J(delta)
    jdd = _J(ddelta)
    row1a = _dot(v0, jd)
    row1b = _dot(v1, jd)
    row2a = _dot(a0, jd) + 2 * _dot(v0, jdd)
    row2b = _dot(a1, jd) + 2 * _dot(v1, jdd)
    det = row1a * row2b - row1b * row2a

    flips = np.nonzero(np.sign(det) * np.sign(np.roll(det, -1)) < 0)[0]
    changes = tuple(float(ts[i]) for i in flips[:16])

    _, xv, xa = result.curve.jet_many(ts)
    lhs = xa[:, 0] * (-xv[:, 1]) + xa[:, 1] * xv[:, 0]   # <X'', J X'>
    rhs = _dot(ddelta, jd)
    consistent = bool(np.all(np.sign(lhs) == np.sign(rhs)))
    return RegularityReport(float(np.min(np.abs(det))), changes, consistent, samples)


@dataclass(frozen=True)
class InteriorityReport:
    self_intersecting: bool
    convexity_first_min: float    # min <D, J Z'>
    convexity_second_min: float   # min <-D, J Z'(t+a)>
    s_min: float
    s_max: float
    samples: int

    @property
    def contacts_interior(self) -> bool:
        return 0.0 < self.s_min and self.s_max < 1.0

    @property
    def passed(self) -> bool:
        return (self.convexity_first_min > 0 and self.convexity_second_min > 0
                and self.contacts_interior)


def interiority_check(system: VertexStepSystem, result: EnvelopeResult | None = None,
                      samples: int = GRID) -> InteriorityReport:
    """Convexity inequalities and 0 < s < 1 on a dense sample."""
    if result is None:
        result = envelope_from_vertex(system)
    Z, alpha = result.conjugated, result.rotation_angle
    L = Z.domain_length
    ts = np.linspace(0.0, L, samples, endpoint=False)
    p0, v0, _ = Z.jet_many(ts)
    p1, v1, _ = Z.jet_many(ts + alpha)
    delta = p1 - p0
    c1 = _dot(delta, _J(v0))
    c2 = _dot(-delta, _J(v1))
    s = result.s(ts)
    selfx = polyline_self_intersects(system.vertex_curve.sample(1024))
    return InteriorityReport(selfx, float(np.min(c1)), float(np.min(c2)),
                             float(np.min(s)), float(np.max(s)), samples)


@dataclass(frozen=True)
class VertexClan:
    vertex_curve: PlaneCurve
    envelopes: tuple[PlaneCurve, ...]
    steps: tuple[CircleDiffeo, ...]       # f_1 .. f_n including the closing map
    composites: tuple[CircleDiffeo, ...]  # g_0 = id, g_1, ..., g_{n-1}

    def polygon_params(self, start: float) -> list[float]:
        return [float(g.lift(start)) for g in self.composites]

    def polygon_vertices(self, start: float) -> np.ndarray:
        return self.vertex_curve.positions(np.asarray(self.polygon_params(start)))

    def polygon(self, start: float = 0.0):
        from .equiangular import Contact, PonceletPolygon, _chord_position
        from .geometry import Vec2

        params = self.polygon_params(start)
        pts = self.vertex_curve.positions(np.asarray(params))
        vertices = [Vec2(*xy) for xy in pts]
        t_close = float(self.steps[-1].lift(params[-1]))
        closing = self.vertex_curve.positions([t_close])[0]
        gap = float(np.hypot(*(closing - pts[0])))
        n = len(vertices)
        contacts = []
        for i in range(n):
            # side i (from g_i to g_{i+1}) touches envelope C_{i+1} at parameter start
            x = Vec2(*self.envelopes[i].positions([start])[0])
            contacts.append(Contact(x, start % self.vertex_curve.domain_length,
                                    _chord_position(vertices[i], vertices[(i + 1) % n], x),
                                    envelope_index=i))
        return PonceletPolygon(tuple(vertices), tuple(params), tuple(contacts), gap)


def _fixed_point_scan(g: CircleDiffeo, probes: int = 256) -> float | None:
    """Parameter of a fixed point of g, or None if none is detected."""
    L = g.circumference
    xs = np.linspace(0.0, L, probes, endpoint=False)
    disp = np.mod(g.lift(xs) - xs + 0.5 * L, L) - 0.5 * L
    hit = np.nonzero(np.abs(disp) < 1e-12 * L)[0]
    if len(hit):
        return float(xs[hit[0]])
    flips = np.nonzero(np.sign(disp) * np.sign(np.roll(disp, -1)) < 0)[0]
    if len(flips) == 0:
        return None
    i = int(flips[0])
    lo, hi = float(xs[i]), float(xs[i]) + L / probes

    def centered(t):
        d = (float(g.lift(t)) - t + 0.5 * L) % L - 0.5 * L
        return d

    return _locate_zero(centered, lo, hi)


def clan_from_vertex(vertex_curve: PlaneCurve, steps: Sequence[CircleDiffeo]) -> VertexClan:
    """Clan of envelopes C_1..C_n for steps f_1..f_{n-1} (f_n closes the cycle).

    Rejects step systems whose polygons degenerate: every g_j o g_i^-1
    (i < j) must be free of fixed points.
    """
    from .circlemaps import identity

    steps = list(steps)
    n = len(steps) + 1
    if n < 3:
        raise ConstructionError("need at least two steps (n >= 3)")
    L = vertex_curve.domain_length
    for f in steps:
        if not math.isclose(f.circumference, L):
            raise ConstructionError("step maps must live on the curve's parameter circle")

    glist: list[CircleDiffeo] = [identity(L)]      # g_0, g_1, ..., g_{n-1}
    for f in steps:
        glist.append(f.compose(glist[-1]))
    closing = glist[-1].inverse()                  # f_n

    for i in range(n):
        for j in range(i + 1, n):
            comp = glist[j].compose(glist[i].inverse())
            t0 = _fixed_point_scan(comp)
            if t0 is not None:
                raise ConstructionError(
                    f"polygon degenerates: g_{j} o g_{i}^-1 has a fixed point near t = {t0:.6f}")

    fd = FD_STEP_REL * L

    def make_pos(gp: CircleDiffeo, gc: CircleDiffeo):
        def prev_pos(ts: np.ndarray) -> np.ndarray:
            return vertex_curve.positions(gp.lift(ts))

        def delta_pos(ts: np.ndarray) -> np.ndarray:
            return vertex_curve.positions(gc.lift(ts)) - prev_pos(ts)

        prev_jet = fd_jet(prev_pos, fd)
        delta_jet = fd_jet(delta_pos, fd)

        def pos(ts: np.ndarray) -> np.ndarray:
            pa, va, _ = prev_jet(ts)
            delta, ddelta, _ = delta_jet(ts)
            s = -_dot(va, _J(delta)) / _dot(ddelta, _J(delta))
            return pa + s[:, None] * delta

        return pos

    envelopes = []
    for i in range(1, n + 1):
        gp = glist[i - 1]
        gc = glist[i] if i < n else identity(L)    # g_n = id
        pos_i = make_pos(gp, gc)
        envelopes.append(PlaneCurve(L, fd_jet(pos_i, fd), label=f"C{i}", position_fn=pos_i))

    return VertexClan(vertex_curve, tuple(envelopes),
                      tuple(steps) + (closing,), tuple(glist))
