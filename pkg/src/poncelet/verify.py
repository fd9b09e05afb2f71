"""Independent numerical verification of constructed pairs and clans.

The forward oracle rebuilds the next-vertex map of a finished pair from
tangent-line geometry alone: from a vertex Q outside the envelope it
locates the tangent parameter psi with the contact ahead of Q along the
envelope's orientation (roots of <Q, u(psi)> - p(psi)), then intersects
that tangent line with the vertex curve again. For self-intersecting
vertex curves, where forward tangent selection is ambiguous, verification
is restricted to the construction's own parameter sequence; there the
side's tangency parameter is recovered independently from its normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circlemaps import circle_distance
from .equiangular import PonceletPolygon
from .geometry import Vec2
from .support import PlaneCurve, SupportFunction


class OracleError(RuntimeError):
    pass


def _refine_root(fn, lo: float, hi: float, iters: int = 60) -> float:
    """Illinois method on a sign-change bracket."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    side = 0
    for _ in range(iters):
        mid = hi - fhi * (hi - lo) / (fhi - flo)
        if not (lo < mid < hi):
            mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0 or hi - lo < 1e-15 * max(1.0, abs(hi)):
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
            if side == -1:
                flo *= 0.5
            side = -1
        else:
            lo, flo = mid, fm
            if side == 1:
                fhi *= 0.5
            side = 1
    return 0.5 * (lo + hi)


def _circle_roots(fn_vec, L: float, grid: int) -> list[float]:
    ts = np.linspace(0.0, L, grid, endpoint=False)
    vals = fn_vec(ts)
    roots = []
    for i in range(grid):
        a, b = vals[i], vals[(i + 1) % grid]
        lo = ts[i]
        hi = ts[i] + L / grid
        if a == 0.0:
            roots.append(float(lo))
        elif a * b < 0:
            roots.append(_refine_root(lambda t: float(fn_vec(np.asarray([t]))[0]), lo, hi))
    # dedupe near-coincident roots (mod L)
    out: list[float] = []
    for r in sorted(np.mod(roots, L)):
        if not out or (r - out[-1]) > 1e-9 * L:
            out.append(float(r))
    if len(out) > 1 and (out[0] + L - out[-1]) <= 1e-9 * L:
        out.pop()
    return out


def tangent_parameters(q: Vec2, p: SupportFunction, grid: int = 512) -> list[float]:
    """All psi in [0, 2*k*pi) whose tangent line passes through q."""

    def fn(ts):
        return q.x * np.cos(ts) + q.y * np.sin(ts) - p.eval(ts)

    return _circle_roots(fn, p.domain_length, grid)


@dataclass(frozen=True)
class OracleStep:
    t2: float
    contact_parameter: float
    contact: Vec2


def next_vertex_oracle(K: PlaneCurve, C: SupportFunction, t1: float,
                       grid: int = 512) -> OracleStep:
    """Next polygon vertex after K(t1) for the pair (K, C).

    Requires K(t1) strictly outside C and a clean two-root intersection of
    the forward tangent with K (convex-type geometry).
    """
    q = K.position(t1)
    psis = tangent_parameters(q, C, grid)
    if not psis:
        raise OracleError(f"no tangent line through K({t1}): point inside the envelope?")
    forward = []
    for psi in psis:
        x, xp = _support_point(C, psi)
        if (x - q).dot(xp) > 0.0:
            forward.append((psi, x))
    if not forward:
        raise OracleError(f"no forward tangent from K({t1})")
    if len(forward) > 1:
        raise OracleError(
            f"forward tangent from K({t1}) is ambiguous (candidates "
            + ", ".join(f"{p:.6f}" for p, _ in forward) + ")")
    psi, contact = forward[0]

    pv = C.eval(psi)
    upsi = Vec2(math.cos(psi), math.sin(psi))

    def line_fn(ts):
        pts = K.positions(ts)
        return pts[:, 0] * upsi.x + pts[:, 1] * upsi.y - pv

    hits = [t for t in _circle_roots(line_fn, K.domain_length, grid)
            if circle_distance(t, t1, K.domain_length) > 1e-6 * K.domain_length]
    if not hits:
        raise OracleError(f"tangent line at psi={psi} meets K only at t1={t1}")
    if len(hits) > 1:
        raise OracleError(
            f"tangent line at psi={psi} meets K at several parameters "
            + ", ".join(f"{t:.6f}" for t in hits))
    return OracleStep(hits[0], psi, contact)


def _support_point(p: SupportFunction, psi: float) -> tuple[Vec2, Vec2]:
    c, s = math.cos(psi), math.sin(psi)
    p0 = p.eval(psi)
    p1 = p.eval(psi, 1)
    return Vec2(p0 * c - p1 * s, p0 * s + p1 * c), Vec2(-s, c)


def parametric_side_contacts(a: Vec2, b: Vec2, curve: PlaneCurve,
                             grid_ts: np.ndarray, grid_pts: np.ndarray,
                             dist_tol: float) -> list[float]:
    """Parameters where the curve is tangent to the side line through a, b.

    Tangency means a simple zero of d/dt <X(t) - a, n>, the derivative of
    the signed distance to the line; transversal crossings have no such
    zero at their distance minimum and drop out automatically.
    """
    d = b - a
    nrm = d.norm()
    nx, ny = -d.y / nrm, d.x / nrm
    signed = (grid_pts[:, 0] - a.x) * nx + (grid_pts[:, 1] - a.y) * ny
    mag = np.abs(signed)
    is_min = (mag < np.roll(mag, 1)) & (mag <= np.roll(mag, -1))
    candidates = sorted(np.nonzero(is_min)[0], key=lambda i: mag[i])[:8]
    L = curve.domain_length
    step = L / len(grid_ts)

    def ddist(t):
        v = curve.velocity(float(t))
        return v.x * nx + v.y * ny

    def dist(t):
        x, y = curve.positions([t])[0]
        return (x - a.x) * nx + (y - a.y) * ny

    out = []
    for i in candidates:
        lo, hi = float(grid_ts[i]) - step, float(grid_ts[i]) + step
        if ddist(lo) * ddist(hi) > 0:
            continue
        t_star = _refine_root(ddist, lo, hi)
        if abs(dist(t_star)) < dist_tol:
            out.append(t_star % L)
    return out


def side_contact_recover(a: Vec2, b: Vec2, p: SupportFunction) -> tuple[float, float]:
    """Tangency parameter of the side line through a, b, recovered from its
    normal form: candidates are theta + j*pi over the sheets. Returns
    (psi, gap) with the smallest support gap max(|<a,u>-p|, |<b,u>-p|)."""
    d = b - a
    nrm = d.norm()
    if nrm == 0.0:
        raise OracleError("degenerate side")
    n1 = Vec2(d.y / nrm, -d.x / nrm)
    theta = math.atan2(n1.y, n1.x)
    L = p.domain_length
    best = None
    for j in range(2 * p.sheets):
        psi = (theta + j * math.pi) % L
        u = Vec2(math.cos(psi), math.sin(psi))
        gap = max(abs(a.dot(u) - p.eval(psi)), abs(b.dot(u) - p.eval(psi)))
        if best is None or gap < best[1]:
            best = (psi, gap)
    return best


@dataclass
class VerificationReport:
    label: str
    probes: int
    tol: float
    mode: str
    closure_error: float = 0.0
    min_premature_closure: float = math.inf
    max_tangency_gap: float = 0.0
    max_angle_deviation: float | None = None
    side_length_spread: float | None = None
    s_min: float = math.inf
    s_max: float = -math.inf
    regularity_min_speed: float = math.inf
    max_step_mismatch: float | None = None
    oracle_direction: str | None = None
    monotone_step: bool | None = None
    checks: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(self.checks.values())

    def to_dict(self) -> dict:
        d = {
            "label": self.label, "probes": self.probes, "tol": self.tol,
            "mode": self.mode, "closure_error": self.closure_error,
            "min_premature_closure": self.min_premature_closure,
            "max_tangency_gap": self.max_tangency_gap,
            "max_angle_deviation": self.max_angle_deviation,
            "side_length_spread": self.side_length_spread,
            "s_range": [self.s_min, self.s_max],
            "regularity_min_speed": self.regularity_min_speed,
            "max_step_mismatch": self.max_step_mismatch,
            "oracle_direction": self.oracle_direction,
            "monotone_step": self.monotone_step,
            "checks": dict(self.checks), "errors": list(self.errors),
            "passed": self.passed,
        }
        return d


@dataclass(frozen=True)
class PonceletConfiguration:
    """Everything the verifier needs about a constructed scene."""

    label: str
    vertex_curves: tuple[PlaneCurve, ...]
    envelopes: tuple[PlaneCurve, ...]
    envelope_supports: tuple[SupportFunction | None, ...]
    polygon: Callable[[float], PonceletPolygon]
    count: int
    mode: str                                  # "oracle" | "sequence"
    step_lift: Callable | None = None          # vertex-parameter step (oracle mode)
    step_inv_lift: Callable | None = None
    expected_turn: float | None = None         # uniform wrapped exterior angle
    expected_turns: tuple[float, ...] | None = None
    expected_side: float | None = None
    expect_interior: bool | None = None

    @property
    def domain_length(self) -> float:
        return self.vertex_curves[0].domain_length


def _wrap_pi(x: float) -> float:
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y < 0:
        y += 2.0 * math.pi
    return y - math.pi


def _angle_checks(report: VerificationReport, polygon_pts: list[Vec2],
                  expected: list[float] | None):
    if expected is None:
        return
    n = len(polygon_pts)
    dirs = [polygon_pts[(i + 1) % n] - polygon_pts[i] for i in range(n)]
    dev = 0.0
    for i in range(n):
        a, b = dirs[i - 1], dirs[i]
        turn = math.atan2(a.cross(b), a.dot(b))
        dev = max(dev, abs(_wrap_pi(turn - expected[i % len(expected)])))
    report.max_angle_deviation = max(report.max_angle_deviation or 0.0, dev)


def verify_pair(config: PonceletConfiguration, probes: int = 64,
                tol: float | None = None) -> VerificationReport:
    """Run every applicable check for the configuration; never raises for
    per-probe oracle failures (they are recorded in the report)."""
    L = config.domain_length
    if tol is None:
        tol = 1e-7 * L
    if probes < 8:
        raise ValueError("need at least 8 probes")
    report = VerificationReport(config.label, probes, tol, config.mode)
    starts = (np.linspace(0.0, L, probes, endpoint=False) + 0.05 * L / probes)

    if config.mode == "oracle":
        _verify_oracle(config, starts, tol, report)
    else:
        _verify_sequence(config, starts, tol, report)

    report.regularity_min_speed = min(c.min_speed() for c in config.vertex_curves)
    report.checks["closure"] = report.closure_error < tol
    report.checks["no_premature_closure"] = report.min_premature_closure > tol
    report.checks["tangency"] = report.max_tangency_gap < max(tol, 1e-8)
    if config.expected_turn is not None or config.expected_turns is not None:
        report.checks["equiangular"] = (report.max_angle_deviation or math.inf) < 1e-8
    if config.expected_side is not None:
        report.checks["equilateral"] = (report.side_length_spread or math.inf) < 1e-9
    if config.expect_interior is not None:
        interior = 0.0 < report.s_min and report.s_max < 1.0
        report.checks["interiority"] = interior == config.expect_interior
    return report


def _verify_oracle(config, starts, tol, report):
    K = config.vertex_curves[0]
    p = config.envelope_supports[0]
    L = K.domain_length
    count = config.count
    direction = None
    step_mismatch = 0.0
    first_steps = []

    for t0 in starts:
        t = float(t0)
        pts = [K.position(t)]
        params = [t]
        try:
            for j in range(count):
                step = next_vertex_oracle(K, p, t)
                a = pts[-1]
                b = K.position(step.t2)
                u = Vec2(math.cos(step.contact_parameter), math.sin(step.contact_parameter))
                pv = p.eval(step.contact_parameter)
                gap = max(abs(a.dot(u) - pv), abs(b.dot(u) - pv))
                report.max_tangency_gap = max(report.max_tangency_gap, gap)
                chord = (step.contact - a).dot(b - a) / (b - a).dot(b - a)
                report.s_min = min(report.s_min, chord)
                report.s_max = max(report.s_max, chord)
                if config.step_lift is not None:
                    fwd = float(config.step_lift(t))
                    rev = float(config.step_inv_lift(t)) if config.step_inv_lift else None
                    if direction is None:
                        d_f = circle_distance(step.t2, fwd, L)
                        d_r = circle_distance(step.t2, rev, L) if rev is not None else math.inf
                        direction = "forward" if d_f <= d_r else "reverse"
                    ref = fwd if direction == "forward" else rev
                    step_mismatch = max(step_mismatch, float(circle_distance(step.t2, ref, L)))
                t = step.t2
                pts.append(b)
                params.append(t)
        except OracleError as exc:
            report.errors.append(f"start {t0:.6f}: {exc}")
            continue

        closure = (pts[count] - pts[0]).norm()
        report.closure_error = max(report.closure_error, closure)
        if count > 1:
            premature = min((pts[j] - pts[0]).norm() for j in range(1, count))
            report.min_premature_closure = min(report.min_premature_closure, premature)
        sides = [(pts[j + 1] - pts[j]).norm() for j in range(count)]
        if config.expected_side is not None:
            spread = max(abs(s - config.expected_side) / config.expected_side for s in sides)
            report.side_length_spread = max(report.side_length_spread or 0.0, spread)
        if config.expected_turn is not None:
            # a reverse-walked polygon turns by the negated exterior angle
            sign = -1.0 if direction == "reverse" else 1.0
            _angle_checks(report, pts[:count], [sign * config.expected_turn])
        first_steps.append((float(t0), params[1]))

    if config.step_lift is not None and not report.errors:
        report.max_step_mismatch = step_mismatch
        report.oracle_direction = direction
        report.checks["oracle_step"] = step_mismatch < tol
        ordered = sorted(first_steps)
        jumps = np.diff(np.unwrap([s[1] for s in ordered], period=L))
        report.monotone_step = bool(np.all(jumps > 0))
        report.checks["monotone_step"] = report.monotone_step


def _verify_sequence(config, starts, tol, report):
    L = config.domain_length
    contact_mismatch = 0.0
    env_grids = {}
    for i, env in enumerate(config.envelopes):
        if config.envelope_supports[i] is None:
            ts = np.linspace(0.0, env.domain_length, 512, endpoint=False)
            env_grids[i] = (ts, env.positions(ts))
    for t0 in starts:
        poly = config.polygon(float(t0))
        report.closure_error = max(report.closure_error, poly.closure_gap)
        n = len(poly.vertices)
        if n > 1:
            premature = min((poly.vertices[j] - poly.vertices[0]).norm() for j in range(1, n))
            report.min_premature_closure = min(report.min_premature_closure, premature)
        for i, contact in enumerate(poly.contacts):
            a = poly.vertices[i]
            b = poly.vertices[(i + 1) % n]
            sup = config.envelope_supports[contact.envelope_index]
            if sup is not None:
                u = Vec2(math.cos(contact.parameter), math.sin(contact.parameter))
                pv = sup.eval(contact.parameter)
                gap = max(abs(a.dot(u) - pv), abs(b.dot(u) - pv))
                psi_rec, rec_gap = side_contact_recover(a, b, sup)
                contact_mismatch = max(contact_mismatch,
                                       float(circle_distance(psi_rec, contact.parameter, L)))
            else:
                env = config.envelopes[contact.envelope_index]
                gap = _point_line_distance(contact.point, a, b)
                tangent = env.velocity(contact.parameter)
                side = b - a
                ang = abs(math.asin(max(-1.0, min(1.0,
                          (tangent.cross(side)) / (tangent.norm() * side.norm())))))
                gap = max(gap, ang)
                grid_ts, grid_pts = env_grids[contact.envelope_index]
                recovered = parametric_side_contacts(a, b, env, grid_ts, grid_pts,
                                                     dist_tol=max(tol, 1e-8))
                if recovered:
                    near = min(circle_distance(t, contact.parameter, env.domain_length)
                               for t in recovered)
                    contact_mismatch = max(contact_mismatch, float(near))
                else:
                    report.errors.append(
                        f"no tangency of side {i} recovered on envelope "
                        f"{contact.envelope_index} near t = {contact.parameter:.6f}")
            report.max_tangency_gap = max(report.max_tangency_gap, gap)
            report.s_min = min(report.s_min, contact.chord)
            report.s_max = max(report.s_max, contact.chord)
        if config.expected_turns is not None:
            _angle_checks(report, list(poly.vertices), list(config.expected_turns))
        elif config.expected_turn is not None:
            _angle_checks(report, list(poly.vertices), [config.expected_turn])
        if config.expected_side is not None:
            sides = poly.side_lengths()
            spread = max(abs(s - config.expected_side) / config.expected_side for s in sides)
            report.side_length_spread = max(report.side_length_spread or 0.0, spread)

    report.max_step_mismatch = contact_mismatch
    report.checks["contact_recovery"] = contact_mismatch < tol


def _point_line_distance(x: Vec2, a: Vec2, b: Vec2) -> float:
    d = b - a
    return abs(d.cross(x - a)) / d.norm()


@dataclass(frozen=True)
class RegularityScan:
    min_speed: float
    near_zeros: tuple[tuple[float, float], ...]   # (parameter, refined speed)
    samples: int


def regularity_scan(curve: PlaneCurve, samples: int = 1024,
                    zero_tol: float = 1e-6) -> RegularityScan:
    """Minimum |velocity| over samples; local minima are polished and those
    below zero_tol reported as near-singular parameters."""
    if samples < 64:
        raise ValueError("need at least 64 samples")
    L = curve.domain_length
    ts = np.linspace(0.0, L, samples, endpoint=False)
    vel = curve.jet_many(ts)[1]
    speed = np.hypot(vel[:, 0], vel[:, 1])
    is_min = (speed < np.roll(speed, 1)) & (speed <= np.roll(speed, -1))
    cut = max(np.median(speed) * 0.25, 10 * zero_tol)
    near = []
    for i in np.nonzero(is_min & (speed < cut))[0]:
        lo = ts[i] - L / samples
        hi = ts[i] + L / samples
        t_star, v_star = _golden_min(
            lambda t: float(np.hypot(*curve.jet_many([t])[1][0])), lo, hi)
        if v_star < zero_tol:
            near.append((float(t_star % L), float(v_star)))
    return RegularityScan(float(np.min(speed)), tuple(near), samples)


def _golden_min(fn, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
        if b - a < 1e-14 * max(1.0, abs(b)):
            break
    t = 0.5 * (a + b)
    return t, fn(t)


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point sets."""
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return float(max(np.sqrt(d2.min(axis=1)).max(), np.sqrt(d2.min(axis=0)).max()))
