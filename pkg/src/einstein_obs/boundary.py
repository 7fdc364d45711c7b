"""Hypersurface invariants: second fundamental forms, Chern-Simons sweeps, alpha.

A sweep evaluates the integrated transgression forms on the level sets
``x = eps`` of the defining function, ``eps`` strictly decreasing, and fits
``log|Q|`` against ``log eps`` to read off decay rates.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .char_integrals import (EPS3, Hypersurface, HypersurfaceData, cs_euler_density,
                             cs_signature_density)
from .curvature import frame_data
from .metrics import ThreeMetric

PI2 = math.pi ** 2


@dataclass
class SecondFundamentalForm:
    """``theta = omega - omega_0`` on ``x = eps``.

    ``frame[a, b, i]`` is ``theta^a_b(e_i)`` on the tangent orthonormal frame and
    ``coord[a, b, k]`` its coefficient on the orbit coordinate differentials,
    the components that stay bounded as the rescaled frame degenerates.
    """
    eps: float
    r: float
    frame: np.ndarray
    coord: np.ndarray
    tangent_block_max: float

    @property
    def normal(self) -> np.ndarray:
        """``theta^0_a`` for a = 1..3 as a 3x3 array (row = matrix index)."""
        return self.frame[0, 1:, :]


def _r_for_eps(metric, eps: float) -> float:
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = float(metric.r_of_x(eps))
    r0, r1 = metric.domain
    if not (r0 < r < r1):
        raise ValueError(f"eps={eps:g} (r={r:g}) is outside the end region of {metric.name}")
    return r


def second_fundamental_form(metric, eps: float) -> SecondFundamentalForm:
    if metric.end.type == "none":
        raise ValueError(f"{metric.name} has no end")
    r = _r_for_eps(metric, eps)
    hd = Hypersurface(metric, r).data()
    return SecondFundamentalForm(eps, r, hd.theta[0], hd.coord_theta[0], hd.tangent_max)


@dataclass
class SweepResult:
    metric: str
    eps: list[float]
    cs_euler: list[float]
    cs_signature: list[float]
    errors: list[float]
    slope_euler: float | None = None
    slope_signature: float | None = None
    r2_euler: float | None = None
    r2_signature: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "cs_euler", "cs_signature", "error"])
        for row in zip(self.eps, self.cs_euler, self.cs_signature, self.errors):
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def fit_slope(eps: Sequence[float], values: Sequence[float], floor: float = 1e-12,
              min_points: int = 4) -> tuple[float | None, float | None]:
    """Least-squares slope of log|v| against log eps and the fit's R^2."""
    pts = [(math.log(e), math.log(abs(v))) for e, v in zip(eps, values) if abs(v) >= floor]
    if len(pts) < min_points:
        return None, None
    x, y = np.array(pts).T
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss if ss > 0 else 1.0
    return float(coef[0]), r2


def _integrated(hd: HypersurfaceData):
    pf = cs_euler_density(hd) * hd.volume
    sg = cs_signature_density(hd) * hd.volume
    return pf, sg


def cs_sweep(metric, eps_schedule: Sequence[float], orbit_samples: int = 6,
             seed: int = 0) -> SweepResult:
    """Both Chern-Simons integrals on ``x = eps`` for each eps (strictly decreasing)."""
    if metric.end.type not in ("fibered_boundary", "fibered_cusp"):
        raise ValueError(f"{metric.name}: sweeps need a fibered end with positive-dimensional "
                         f"fiber, not {metric.end.type!r}; use the cone path instead")
    eps = [float(e) for e in eps_schedule]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    rng = np.random.default_rng(seed)
    base = np.array(metric.orbit_point())
    angles = np.vstack([base, base + rng.uniform(-0.3, 0.3, size=(orbit_samples, 3))])
    out_pf, out_sg, errs = [], [], []
    for e in eps:
        hd = Hypersurface(metric, _r_for_eps(metric, e)).data(angles)
        pf, sg = _integrated(hd)
        out_pf.append(float(pf[0]))
        out_sg.append(float(sg[0]))
        # spread over orbit points bounds the radial-reduction error
        errs.append(float(max(np.ptp(pf), np.ptp(sg)) + 1e-15 * hd.volume))
    res = SweepResult(metric.name, eps, out_pf, out_sg, errs)
    res.slope_euler, res.r2_euler = fit_slope(eps, out_pf)
    res.slope_signature, res.r2_signature = fit_slope(eps, out_sg)
    for name, r2 in (("euler", res.r2_euler), ("signature", res.r2_signature)):
        if r2 is not None and r2 <= 0.99:
            res.notes.append(f"{name} fit R^2={r2:.4f} below 0.99; slope unreliable")
    return res


# ---------------------------------------------------------------------------
# the alpha invariant of a closed 3-manifold

@dataclass
class AlphaResult:
    link: str
    alpha: float
    boundary_volume: float
    curvature_term: float  # (1/8 pi^2) int eps_abc e^a ^ Omega_bc
    volume_term: float     # (3/4 pi^2) vol
    alpha_first_form: float
    variation: float


def boundary_volume(link: ThreeMetric, samples: int = 8) -> float:
    """Riemannian volume: |det A| relative to the orbit measure, times that measure."""
    pts = link.sample_points(samples)
    A, _, _ = link.coframe().jet_arrays(pts, order=0 + 1)
    unit = ThreeMetric("unit-frame", link.model, 1.0, 1.0, 1.0, link.measure, link.twist)
    A1, _, _ = unit.coframe().jet_arrays(pts, order=1)
    ratio = np.abs(np.linalg.det(A) / np.linalg.det(A1))
    return float(ratio.mean() * link.measure)


def volume_over_2pi2(link: ThreeMetric) -> Fraction | float:
    """``vol / 2 pi^2``, exact for quotients of SU(2) orbits (measure 16 pi^2 / k).

    The warpings enter as the exact rationals of their binary floats, so a
    round S^3/Z_k of radius 1 gives exactly 1/k.
    """
    if link.model == "SU2":
        k = link.quotient
        if math.isclose(link.measure, 16 * PI2 / k, rel_tol=1e-15):
            return 8 * Fraction(link.a) * Fraction(link.b) * Fraction(link.c) / k
    return boundary_volume(link) / (2 * PI2)


def alpha_invariant(link: ThreeMetric, samples: int = 8) -> AlphaResult:
    """Both forms of alpha for a homogeneous link (densities checked constant)."""
    if link.measure <= 0:
        raise ValueError("link must be closed with positive total measure")
    pts = link.sample_points(samples)
    fd = frame_data(link.coframe(), pts)
    R = fd.riemann
    # coefficient of e^{123} in eps_abc e^a ^ Omega_bc
    curv = 0.5 * np.einsum("abc,ade,...bcde->...", EPS3, EPS3, R)
    first = curv - 6.0  # eps_abc e^a ^ e^b ^ e^c = 6 vol
    variation = float(np.ptp(first))
    if variation > 1e-8 * max(1.0, float(np.abs(first).max())):
        raise ValueError(f"{link.name}: alpha density is not constant (spread {variation:.2e})")
    vol = boundary_volume(link, samples)
    curvature_term = float(curv.mean()) * vol / (8 * PI2)
    volume_term = 3.0 * vol / (4 * PI2)
    alpha_first = float(first.mean()) * vol / (8 * PI2)
    return AlphaResult(link.name, curvature_term - volume_term, vol, curvature_term,
                       volume_term, alpha_first, variation)


def cone_cs_limit(link: ThreeMetric) -> tuple[float, AlphaResult]:
    """``(1/2 pi^2) vol(link) + alpha(link)``: the limit of ``-int Q_pf`` on a cone end."""
    a = alpha_invariant(link)
    return a.boundary_volume / (2 * PI2) + a.alpha, a
