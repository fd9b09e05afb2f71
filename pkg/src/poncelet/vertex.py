"""Vertex curves for a prescribed envelope.

With the envelope given by a support function p and a torsion map f acting
on contact parameters, the vertex curve is

    Y(phi) = p(phi) u(phi) + q(phi) u'(phi),
    q(phi) = (p(f(phi)) - p(phi) <u(phi), u(f(phi))>) / <u'(phi), u(f(phi))>,

where <u'(phi), u(psi)> = sin(psi - phi), so transversality means f(phi)
never differs from phi by a multiple of pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circlemaps import CircleDiffeo, TorsionMap, identity
from .equiangular import ConstructionError, Contact, PonceletPolygon, _chord_position
from .support import PlaneCurve, SupportFunction, curve_from_support, fd_jet

FD_STEP_REL = 1e-4
GRID = 512


@dataclass(frozen=True)
class ContactStepSystem:
    envelope: SupportFunction
    step: TorsionMap

    def __post_init__(self):
        if self.step.period <= 2:
            raise ConstructionError("step period must exceed 2")
        if not math.isclose(self.step.circumference, self.envelope.domain_length):
            raise ConstructionError("step map must act on the envelope's parameter circle")


def _transversality_gaps(advance: np.ndarray, ts: np.ndarray, tol: float = 1e-9) -> list[float]:
    """Parameters where sin(advance) vanishes: near-zero samples plus
    sign changes between consecutive samples."""
    s = np.sin(advance)
    bad = set(np.nonzero(np.abs(s) < tol)[0].tolist())
    flips = np.nonzero(np.sign(s) * np.sign(np.roll(s, -1)) < 0)[0]
    bad.update(flips.tolist())
    return [float(ts[i]) for i in sorted(bad)[:8]]


def _vertex_positions(p: SupportFunction, phi: np.ndarray, fphi: np.ndarray) -> np.ndarray:
    adv = fphi - phi
    den = np.sin(adv)
    q = (p.eval(fphi) - p.eval(phi) * np.cos(adv)) / den
    u = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    up = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
    return p.eval(phi)[:, None] * u + q[:, None] * up


@dataclass(frozen=True)
class VertexResult:
    system: ContactStepSystem
    envelope: PlaneCurve
    curve: PlaneCurve

    def polygon_params(self, start: float) -> list[float]:
        f = self.system.step
        params = [float(start)]
        for _ in range(f.period - 1):
            params.append(float(f.map.lift(params[-1])))
        return params

    def polygon(self, start: float = 0.0) -> PonceletPolygon:
        params = self.polygon_params(start)
        n = len(params)
        pts = self.curve.positions(np.asarray(params))
        vertices = [_vec(v) for v in pts]
        closing = self.curve.positions([float(self.system.step.map.lift(params[-1]))])[0]
        gap = float(np.hypot(*(closing - pts[0])))
        contacts = []
        L = self.envelope.domain_length
        for j in range(n):
            psi = params[(j + 1) % n] if j + 1 < n else float(self.system.step.map.lift(params[-1]))
            x = _vec(self.envelope.positions([psi])[0])
            contacts.append(Contact(x, psi % L,
                                    _chord_position(vertices[j], vertices[(j + 1) % n], x)))
        return PonceletPolygon(tuple(vertices), tuple(params), tuple(contacts), gap)


def _vec(xy):
    from .geometry import Vec2
    return Vec2(float(xy[0]), float(xy[1]))


def vertex_from_envelope(system: ContactStepSystem, grid: int = GRID) -> VertexResult:
    """Vertex curve K for the pair (K, C); reduces to the equiangular curve
    when the step is a rigid shift."""
    p = system.envelope
    f = system.step.map
    L = p.domain_length

    ts = np.linspace(0.0, L, grid, endpoint=False)
    adv = f.lift(ts) - ts
    gaps = _transversality_gaps(adv, ts)
    if gaps:
        raise ConstructionError(
            "transversality <u'(phi), u(f(phi))> = sin(f(phi) - phi) vanishes near "
            + ", ".join(f"{t:.6f}" for t in gaps))

    def pos(tt: np.ndarray) -> np.ndarray:
        return _vertex_positions(p, tt, f.lift(tt))

    curve = PlaneCurve(L, fd_jet(pos, FD_STEP_REL * L), label="K", position_fn=pos)
    return VertexResult(system, curve_from_support(p, label="C"), curve)


@dataclass(frozen=True)
class EnvelopeClan:
    envelope_support: SupportFunction
    envelope: PlaneCurve
    vertex_curves: tuple[PlaneCurve, ...]
    steps: tuple[CircleDiffeo, ...]        # f_1..f_n including the closing map
    composites: tuple[CircleDiffeo, ...]   # g_0 = id, ..., g_{n-1}

    def polygon(self, start: float = 0.0) -> PonceletPolygon:
        # every vertex curve carries its own g_{i-1} advance: evaluate all at start
        n = len(self.vertex_curves)
        params = [float(g.lift(start)) for g in self.composites]
        vertices = [_vec(K.positions([start])[0]) for K in self.vertex_curves]
        # g_n = f_n o g_{n-1} is the identity up to the numeric inversion error
        t_close = float(self.steps[-1].lift(params[-1]))
        closing = self.vertex_curves[0].positions([t_close])[0]
        gap = (_vec(closing) - vertices[0]).norm()
        contacts = []
        L = self.envelope.domain_length
        for i in range(n):
            psi = params[i + 1] if i + 1 < n else float(start)
            x = _vec(self.envelope.positions([psi])[0])
            contacts.append(Contact(x, psi % L,
                                    _chord_position(vertices[i], vertices[(i + 1) % n], x)))
        return PonceletPolygon(tuple(vertices), tuple(params), tuple(contacts), gap)


def clan_from_envelope(envelope: SupportFunction, steps: Sequence[CircleDiffeo],
                       grid: int = GRID) -> EnvelopeClan:
    """Clan (C, K_1, ..., K_n) for steps f_1..f_{n-1}; f_n closes the cycle.

    Transversality <u'(g_{i-1}(phi)), u(g_i(phi))> != 0 is required for
    every i; failures are reported with the step index and parameter.
    """
    steps = list(steps)
    n = len(steps) + 1
    if n < 3:
        raise ConstructionError("need at least two steps (n >= 3)")
    L = envelope.domain_length
    for f in steps:
        if not math.isclose(f.circumference, L):
            raise ConstructionError("step maps must act on the envelope's parameter circle")

    glist: list[CircleDiffeo] = [identity(L)]
    for f in steps:
        glist.append(f.compose(glist[-1]))
    closing = glist[-1].inverse()

    ts = np.linspace(0.0, L, grid, endpoint=False)
    fd = FD_STEP_REL * L
    curves = []
    for i in range(1, n + 1):
        gp = glist[i - 1]
        gc = glist[i] if i < n else identity(L)
        adv = gc.lift(ts) - gp.lift(ts)
        gaps = _transversality_gaps(adv, ts)
        if gaps:
            raise ConstructionError(
                f"transversality fails for step {i} near parameters "
                + ", ".join(f"{t:.6f}" for t in gaps))

        def make_pos(a: CircleDiffeo, b: CircleDiffeo):
            def pos(tt: np.ndarray) -> np.ndarray:
                return _vertex_positions(envelope, a.lift(tt), b.lift(tt))
            return pos

        pos_i = make_pos(gp, gc)
        curves.append(PlaneCurve(L, fd_jet(pos_i, fd), label=f"K{i}", position_fn=pos_i))

    return EnvelopeClan(envelope, curve_from_support(envelope, label="C"),
                        tuple(curves), tuple(steps) + (closing,), tuple(glist))
