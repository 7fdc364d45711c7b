"""Characteristic integrands, Chern-Simons transgressions and radial quadrature.

Conventions: the Euler form is ``(1/32 pi^2) eps_abcd Omega_ab ^ Omega_cd``
and the L-form is ``-(1/24 pi^2) Tr(Omega ^ Omega)``.  On a truncated manifold
``M_R = {r <= R}`` the corrected identities read

    chi(M_R) = int Pf - int_{r=R} Q_pf,     tau(M_R) = int L - int Q_L - eta/2,

where ``Q`` is the transgression between the Levi-Civita connection and the
connection of the product metric frozen at ``r = R``, and the hypersurface
carries the boundary orientation (outward normal first).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curvature import FrameData, decompose4, frame_data
from .forms import alternate, levi_civita
from .quadrature import QuadResult, geometric_breakpoints, gk_integrate

PI2 = math.pi ** 2
EPS4 = levi_civita(4)
EPS3 = levi_civita(3)


class OrbitInvarianceError(ValueError):
    """The integrand varies along orbits, so radial reduction is invalid."""


class InvariantPolynomial:
    """Degree-2 invariant polynomial on so(4), stored as its polarization.

    ``contraction(X, Y)`` takes two ``(..., 4, 4, ...)`` Lie-algebra valued
    tensors (matrix axes first after the batch axes) and returns the scalar
    pairing for each form-index combination.
    """

    def __init__(self, name: str, contraction: Callable, degree: int = 2):
        self.name = name
        self.contraction = contraction
        self.degree = degree

    def __repr__(self) -> str:
        return f"InvariantPolynomial({self.name!r})"

    def pair(self, X: np.ndarray, Y: np.ndarray, p: int, q: int) -> np.ndarray:
        """``P(X, Y)`` for a matrix of p-forms X and q-forms Y.

        ``X[..., a, b, I]`` with ``p`` trailing form axes, likewise ``Y``; the
        result is the antisymmetric coefficient tensor of the (p+q)-form.
        """
        Xe = X.reshape(X.shape + (1,) * q)
        Ye = Y.reshape(Y.shape[: Y.ndim - q] + (1,) * p + Y.shape[Y.ndim - q:])
        return alternate(self.contraction(Xe, Ye, p + q), p, q)

    def top(self, X, Y, p: int, q: int) -> np.ndarray:
        """Coefficient of ``e^{0..k-1}`` in ``P(X, Y)`` (k = p + q)."""
        T = self.pair(X, Y, p, q)
        return T[(...,) + tuple(range(p + q))]


def _pf_contract(X, Y, k):
    # X, Y: (..., 4, 4, form axes...) -> (..., form axes)
    return _contract(X, Y, k, lambda x, y: np.einsum("abcd,ab...,cd...->...", EPS4, x, y)) / (32 * PI2)


def _p1_contract(X, Y, k):
    return -_contract(X, Y, k, lambda x, y: np.einsum("ab...,ba...->...", x, y)) / (24 * PI2)


def _contract(X, Y, k, fn):
    """Apply a matrix contraction with the group axes at position -k-2, -k-1."""
    Xm = np.moveaxis(np.moveaxis(X, -k - 2, 0), -k - 1, 1)
    Ym = np.moveaxis(np.moveaxis(Y, -k - 2, 0), -k - 1, 1)
    Xb, Yb = np.broadcast_arrays(Xm, Ym)
    return fn(Xb, Yb)


PFAFFIAN = InvariantPolynomial("pfaffian", _pf_contract)
P1_OVER_3 = InvariantPolynomial("p1_over_3", _p1_contract)


def pfaffian_integrand(riemann: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Density of the Euler form w.r.t. the Riemannian volume (orientation-even)."""
    return np.einsum("abcd,ijkl,...abij,...cdkl->...", EPS4, EPS4, riemann, riemann) / (128 * PI2)


def signature_integrand(riemann: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Density of the L-form; flips sign with the orientation."""
    return orientation * np.einsum("ijkl,...abij,...abkl->...", EPS4, riemann, riemann) / (96 * PI2)


def pfaffian_from_decomp(riemann: np.ndarray, orientation: int = 1) -> np.ndarray:
    d = decompose4(riemann, orientation)
    return (d.w_sq - d.z_norm_sq + d.S ** 2 / 24.0) / (8 * PI2)


def signature_from_decomp(riemann: np.ndarray, orientation: int = 1) -> np.ndarray:
    d = decompose4(riemann, orientation)
    return (d.w_plus_sq - d.w_minus_sq) / (12 * PI2)


INTEGRANDS = {"pfaffian": pfaffian_integrand, "signature": signature_integrand}


@dataclass
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    rmax_schedule: tuple[float, ...] = (1e2, 1e3, 1e4)
    orbit_samples: int = 8
    margin: float = 1e-6
    invariance_tol: float = 1e-8
    max_intervals: int = 4000


@dataclass
class IntegralResult:
    value: float
    error: float
    lower: float
    upper: float
    evaluations: int
    converged: bool
    notes: list[str] = field(default_factory=list)


def _density_fn(metric, integrand: Callable):
    cf = metric.coframe()
    orient = metric.orientation

    def f(r, angles=None):
        pts = metric.points(r, angles)
        return integrand(frame_data(cf, pts).riemann, orient)

    return f


def check_orbit_invariance(metric, integrand: Callable, radii, samples: int = 8,
                           tol: float = 1e-8, seed: int = 0) -> float:
    """Max relative variation of the density over random orbit points at each radius."""
    rng = np.random.default_rng(seed)
    f = _density_fn(metric, integrand)
    base = np.array(metric.orbit_point())
    worst = 0.0
    for r in radii:
        angles = base + rng.uniform(-0.3, 0.3, size=(samples, 3))
        pts = np.column_stack([np.full(samples, r), angles])
        vals = integrand(frame_data(metric.coframe(), pts).riemann, metric.orientation)
        ref = f(r)[0]
        scale = max(abs(ref), np.abs(vals).max(), 1e-300)
        dev = float(np.abs(vals - ref).max() / scale) if scale > 1e-14 else float(np.abs(vals - ref).max())
        worst = max(worst, dev)
    if worst >= tol:
        raise OrbitInvarianceError(
            f"{metric.name}: density varies by {worst:.3e} along orbits (limit {tol:g})")
    return worst


def integrate(metric, integrand: Callable | str = "pfaffian", rmax: float | None = None,
              spec: QuadratureSpec | None = None, rmin: float | None = None) -> IntegralResult:
    """Radial quadrature of ``density * weight`` over [r0 + delta, min(rmax, r1 - delta)]."""
    spec = spec or QuadratureSpec()
    if isinstance(integrand, str):
        integrand = INTEGRANDS[integrand]
    r0, r1 = metric.domain
    delta = spec.margin * max(1.0, abs(r0))
    lo = r0 + delta if rmin is None else rmin
    hi = r1 - spec.margin * max(1.0, abs(r1)) if np.isfinite(r1) else float(rmax)
    if rmax is not None:
        hi = min(hi, float(rmax))
    if hi <= lo:
        raise ValueError(f"empty radial range [{lo}, {hi}]")
    probe = np.linspace(lo, hi, 5)[1:-1] if not np.isfinite(r1) and hi / max(lo, 1e-12) < 20 \
        else np.geomspace(max(lo, 1e-3), hi, 5)[1:-1] if not np.isfinite(r1) else np.linspace(lo, hi, 5)[1:-1]
    check_orbit_invariance(metric, integrand, probe, spec.orbit_samples, spec.invariance_tol)
    f = _density_fn(metric, integrand)

    def radial(r):
        return f(r) * metric.weight(r)

    res: QuadResult = gk_integrate(radial, lo, hi, abs_tol=spec.abs_tol, rel_tol=spec.rel_tol,
                                   breakpoints=geometric_breakpoints(lo, hi),
                                   max_intervals=spec.max_intervals)
    value, err, notes = res.value, res.error, list(res.notes)
    # the excluded slivers next to nuts and bolts, to first order in their width
    ends = [(lo, lo - r0)] if rmin is None else []
    if np.isfinite(r1) and hi < r1 and (rmax is None or rmax >= r1):
        ends.append((hi, r1 - hi))
    for r_end, width in ends:
        corr = float(radial(np.array([r_end]))[0]) * width
        value += corr
        err += abs(corr) * width / max(abs(r_end), 1.0)
        notes.append(f"end correction {corr:.3e} at r={r_end:g}")
    return IntegralResult(value, err, lo, hi, res.evaluations, res.converged, notes)


# ---------------------------------------------------------------------------
# hypersurfaces and transgression

@dataclass
class HypersurfaceData:
    """Frame data of ``g`` and of the frozen product metric on ``r = r_eps``.

    ``theta[..., a, b, i]`` and ``omega0``/``omega`` are connection forms on the
    tangent frame ``e_1, e_2, e_3``; ``Om``/``Om0`` are curvature 2-forms pulled
    back (``[..., a, b, i, j]``), all indices in the common orthonormal frame.
    """
    r_eps: float
    theta: np.ndarray
    Om: np.ndarray
    Om0: np.ndarray
    coord_theta: np.ndarray
    volume: float
    orientation: int
    tangent_max: float


class Hypersurface:
    """The level set ``r = r_eps`` of a radial metric."""

    def __init__(self, metric, r_eps: float):
        r0, r1 = metric.domain
        if not (r0 < r_eps < r1):
            raise ValueError(f"r = {r_eps} is outside the domain ({r0}, {r1}) of {metric.name}")
        self.metric = metric
        self.r_eps = float(r_eps)

    def data(self, angles=None) -> HypersurfaceData:
        m = self.metric
        pts = m.points(self.r_eps, angles) if angles is None or np.ndim(angles) == 1 else \
            np.column_stack([np.full(len(angles), self.r_eps), angles])
        fd: FrameData = frame_data(m.coframe(), pts)
        fd0: FrameData = frame_data(m.frozen(self.r_eps).coframe(), pts)
        if not np.allclose(fd.A, fd0.A, rtol=1e-13, atol=1e-13):
            raise ValueError("frozen coframe does not agree with the metric on the hypersurface")
        theta_full = fd.gamma - fd0.gamma
        theta = theta_full[..., 1:]
        coord = np.einsum("zabc,zcm->zabm", theta_full, fd.A)[..., 1:]
        tang = float(np.abs(theta[:, 1:, 1:, :]).max())
        Om = fd.riemann[..., 1:, 1:]
        Om0 = fd0.riemann[..., 1:, 1:]
        vol = float(m.hypersurface_volume(self.r_eps))
        return HypersurfaceData(self.r_eps, theta, Om, Om0, coord, vol, m.orientation, tang)


def _theta_theta(theta: np.ndarray) -> np.ndarray:
    """Matrix of 2-forms ``(theta ^ theta)_ab = theta_ac ^ theta_cb`` (coefficient tensors)."""
    t = np.einsum("...aci,...cbj->...abij", theta, theta)
    return t - np.swapaxes(t, -1, -2)


def transgression_generic(P: InvariantPolynomial, hd: HypersurfaceData,
                          t_nodes: int = 8) -> np.ndarray:
    """Density of ``Q = 2 int_0^1 P(theta, Omega_t) dt`` on e^{123} (per point).

    ``Omega_t = (1-t) Omega_0 + t Omega + (t^2 - t) theta ^ theta`` is the curvature
    of ``omega_0 + t theta``; the t-integral uses Gauss-Legendre nodes.
    """
    if t_nodes < 8:
        raise ValueError("use at least 8 Gauss-Legendre nodes")
    x, w = np.polynomial.legendre.leggauss(t_nodes)
    ts, ws = 0.5 * (x + 1.0), 0.5 * w
    tt = _theta_theta(hd.theta)
    total = 0.0
    for t, wt in zip(ts, ws):
        Om_t = (1 - t) * hd.Om0 + t * hd.Om + (t * t - t) * tt
        total = total + wt * P.top(hd.theta, Om_t, 1, 2)
    return 2.0 * total


def cs_euler_density(hd: HypersurfaceData) -> np.ndarray:
    """``(1/32 pi^2) eps_abcd (2 theta_ab ^ Omega_cd - (4/3) theta_ab ^ theta_ce ^ theta_ed)``."""
    th, Om = hd.theta, hd.Om
    t1 = 0.5 * np.einsum("abcd,ijk,...abi,...cdjk->...", EPS4, EPS3, th, Om)
    t3 = np.einsum("abcd,ijk,...abi,...cej,...edk->...", EPS4, EPS3, th, th, th)
    return (2.0 * t1 - (4.0 / 3.0) * t3) / (32 * PI2)


def cs_signature_density(hd: HypersurfaceData) -> np.ndarray:
    """``-(1/12 pi^2) theta^0_i ^ Omega^i_0`` (orientation-odd)."""
    val = 0.5 * np.einsum("ijk,...mi,...mjk->...", EPS3, hd.theta[..., 0, 1:, :],
                          hd.Om[..., 1:, 0, :, :])
    return -hd.orientation * val / (12 * PI2)


def cs_euler_explicit(metric, r_eps: float) -> float:
    hd = Hypersurface(metric, r_eps).data()
    return float(cs_euler_density(hd)[0]) * hd.volume


def cs_signature_explicit(metric, r_eps: float) -> float:
    hd = Hypersurface(metric, r_eps).data()
    return float(cs_signature_density(hd)[0]) * hd.volume


def cs_generic(metric, r_eps: float, P: InvariantPolynomial, t_nodes: int = 8) -> float:
    hd = Hypersurface(metric, r_eps).data()
    q = transgression_generic(P, hd, t_nodes)[0] * hd.volume
    return float(q if P is PFAFFIAN else hd.orientation * q)
