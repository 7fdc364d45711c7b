"""Catalog of cohomogeneity-one 4-metrics, boundary models and perturbations.

Every metric is diagonal in an invariant coframe of its orbits,

    g = g_rr(r) dr^2 + a(r)^2 s1^2 + b(r)^2 s2^2 + c(r)^2 s3^2,

with frame order (radial, base, base, fiber).  The SU(2) forms satisfy
``d s1 = -s2 ^ s3`` (cyclic), so the unit round 3-sphere is a = b = c = 1/2
and its orbit measure ``int s1 ^ s2 ^ s3`` is 16 pi^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import jets
from .curvature import Coframe

PI = math.pi

ORBIT_MODELS = ("SU2", "S1xS2", "T3", "S1xSigma_g")
END_TYPES = ("none", "fibered_boundary", "fibered_cusp", "cone")

# generic interior chart points used when sampling an orbit
_ORBIT_DEFAULT = {
    "SU2": (1.1, 0.3, 0.7),
    "S1xS2": (1.1, 0.3, 0.7),
    "T3": (0.3, 0.4, 0.2),
    "S1xSigma_g": (0.3, 1.2, 0.2),
}


@dataclass(frozen=True)
class TopologicalData:
    chi: int
    tau: int

    def flipped(self) -> "TopologicalData":
        return TopologicalData(self.chi, -self.tau)


@dataclass(frozen=True)
class EndData:
    """Asymptotic structure at r -> r1.

    ``euler`` is the Euler number of the boundary circle bundle (when there
    is one); ``link`` names the declared cone link for ``cone`` ends.
    """
    type: str = "none"
    fiber: str = ""
    base: str = ""
    euler: int | None = None
    link: "ThreeMetric | None" = None
    link_eta: float | None = None

    def __post_init__(self):
        if self.type not in END_TYPES:
            raise ValueError(f"unknown end type {self.type!r}")


class MetricError(ValueError):
    pass


def _zero(x):
    return 0.0 * jets.primal(x)


def orbit_coframe(model: str, y: Sequence, twist: float = 0.0) -> list[list]:
    """Coefficients of (s1, s2, s3) in the orbit chart ``y``.

    ``twist`` is the coefficient of the connection term in s3 for circle
    bundles over S^2, T^2 and hyperbolic surfaces.
    """
    y1, y2, y3 = y
    z = _zero(y1)
    one = 1.0 + z
    if model == "SU2":
        th, ph, ps = y
        return [[jets.sin(ps), -jets.sin(th) * jets.cos(ps), z],
                [jets.cos(ps), jets.sin(th) * jets.sin(ps), z],
                [z, jets.cos(th), one]]
    if model == "S1xS2":
        th, ph, ps = y
        return [[one, z, z],
                [z, jets.sin(th), z],
                [z, twist * jets.cos(th), one]]
    if model == "T3":
        x, yy, zz = y
        return [[one, z, z],
                [z, one, z],
                [z, twist * x, one]]
    if model == "S1xSigma_g":
        u, v, ps = y
        return [[1.0 / v, z, z],
                [z, 1.0 / v, z],
                [twist / v, z, one]]
    raise MetricError(f"unknown orbit model {model!r}")


@dataclass(frozen=True)
class ThreeMetric:
    """A homogeneous 3-metric a s1^2 + b s2^2 + c s3^2 on an orbit model.

    ``measure`` is ``int s1 ^ s2 ^ s3`` over the whole (quotient) manifold.
    """
    name: str
    model: str
    a: float
    b: float
    c: float
    measure: float
    twist: float = 0.0
    quotient: int = 1

    def coframe(self) -> Coframe:
        a, b, c = self.a, self.b, self.c

        def fn(*y):
            S = orbit_coframe(self.model, y, self.twist)
            return [[a * v for v in S[0]], [b * v for v in S[1]], [c * v for v in S[2]]]

        return Coframe(fn, 3, name=self.name)

    def volume(self) -> float:
        return self.a * self.b * self.c * self.measure

    def sample_points(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        base = np.array(_ORBIT_DEFAULT[self.model])
        pts = base + rng.uniform(-0.25, 0.25, size=(count, 3))
        pts[0] = base
        return pts


def round_link(radius: float = 1.0, quotient: int = 1) -> ThreeMetric:
    """Round S^3 of the given radius, or its quotient by a cyclic group of order ``quotient``."""
    if radius <= 0 or quotient < 1:
        raise MetricError("radius must be positive and quotient >= 1")
    name = f"S3(R={radius:g})" if quotient == 1 else f"S3/Z{quotient}(R={radius:g})"
    h = radius / 2.0
    return ThreeMetric(name, "SU2", h, h, h, 16 * PI ** 2 / quotient, quotient=quotient)


def berger_sphere(base_radius: float, fiber_scale: float) -> ThreeMetric:
    """Berger sphere: round S^3 with the Hopf fiber rescaled by ``fiber_scale``."""
    h = base_radius / 2.0
    return ThreeMetric(f"Berger(R={base_radius:g},t={fiber_scale:g})", "SU2", h, h,
                       h * fiber_scale, 16 * PI ** 2)


class RadialMetric:
    """Common interface of catalog metrics on charts (r, y1, y2, y3)."""

    name: str
    orbit_model: str
    domain: tuple[float, float]
    end: EndData
    topo: TopologicalData | None
    einstein_flag: bool
    orientation: int = 1

    def matrix(self, r, y1, y2, y3) -> list[list]:
        raise NotImplementedError

    def weight(self, r):
        """Radial density of the volume: vol = int weight(r) dr."""
        raise NotImplementedError

    def hypersurface_volume(self, r):
        raise NotImplementedError

    def coframe(self) -> Coframe:
        return Coframe(self.matrix, 4, self.orientation, name=self.name)

    def frozen(self, r_eps: float) -> "FrozenMetric":
        return FrozenMetric(self, r_eps)

    def orbit_point(self) -> tuple[float, float, float]:
        return _ORBIT_DEFAULT[self.orbit_model]

    def points(self, r, angles=None) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        y = np.asarray(self.orbit_point() if angles is None else angles, dtype=float)
        return np.column_stack([r, np.broadcast_to(y, (len(r), 3))])

    def sample_points(self, count: int, seed: int = 0) -> np.ndarray:
        """Radial samples (log-spaced on long domains) at randomized orbit points."""
        rng = np.random.default_rng(seed)
        r0, r1 = self.domain
        # keep away from nuts and bolts, where AD round-off grows like 1/r^2
        lo = r0 + 0.1 * max(1.0, abs(r0))
        hi = r1 - 0.05 * max(1.0, abs(r1)) if np.isfinite(r1) else lo + 100.0
        if lo > 0 and hi / lo > 50:
            r = np.geomspace(lo, hi, count)
        else:
            r = np.linspace(lo, hi, count)
        y = np.array(self.orbit_point()) + rng.uniform(-0.25, 0.25, size=(count, 3))
        return np.column_stack([r, y])

    # defining function of the boundary at infinity
    def x_of_r(self, r):
        if self.end.type == "fibered_cusp":
            return np.exp(-np.asarray(r, dtype=float))
        return 1.0 / np.asarray(r, dtype=float)

    def r_of_x(self, x):
        if self.end.type == "fibered_cusp":
            return -np.log(np.asarray(x, dtype=float))
        return 1.0 / np.asarray(x, dtype=float)


@dataclass
class CohomOneMetric(RadialMetric):
    """Diagonal cohomogeneity-one metric in an invariant coframe.

    The warpings are callables of r built from jet-compatible arithmetic.
    """
    name: str
    orbit_model: str
    grr: Callable
    a: Callable
    b: Callable
    c: Callable
    domain: tuple[float, float]
    end: EndData = field(default_factory=EndData)
    topo: TopologicalData | None = None
    einstein_flag: bool = False
    orbit_measure: float = 16 * PI ** 2
    twist: float = 0.0
    quotient: int = 1
    orientation: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.orbit_model not in ORBIT_MODELS:
            raise MetricError(f"unknown orbit model {self.orbit_model!r}")

    def matrix(self, r, y1, y2, y3):
        S = orbit_coframe(self.orbit_model, (y1, y2, y3), self.twist)
        z = _zero(r) + _zero(y1)
        a, b, c = self.a(r), self.b(r), self.c(r)
        return [[jets.sqrt(self.grr(r)), z, z, z],
                [z] + [a * v for v in S[0]],
                [z] + [b * v for v in S[1]],
                [z] + [c * v for v in S[2]]]

    def warpings(self, r):
        r = np.asarray(r, dtype=float)
        return self.grr(r), self.a(r), self.b(r), self.c(r)

    def weight(self, r):
        g, a, b, c = self.warpings(r)
        return np.sqrt(g) * np.abs(a * b * c) * self.orbit_measure

    def hypersurface_volume(self, r):
        _, a, b, c = self.warpings(r)
        return np.abs(a * b * c) * self.orbit_measure

    def link(self) -> ThreeMetric | None:
        return self.end.link


@dataclass
class FrozenMetric(RadialMetric):
    """Product metric g_rr(r_eps) dr^2 + h(r_eps) agreeing with ``base`` on r = r_eps."""
    base: RadialMetric
    r_eps: float

    def __post_init__(self):
        self.name = f"{self.base.name}|frozen@{self.r_eps:g}"
        self.orbit_model = self.base.orbit_model
        self.domain = self.base.domain
        self.end = self.base.end
        self.topo = None
        self.einstein_flag = False
        self.orientation = self.base.orientation

    def matrix(self, r, y1, y2, y3):
        return self.base.matrix(self.r_eps + 0.0 * r, y1, y2, y3)

    def weight(self, r):
        return self.base.weight(self.r_eps + 0.0 * np.asarray(r, dtype=float))

    def hypersurface_volume(self, r):
        return self.base.hypersurface_volume(self.r_eps + 0.0 * np.asarray(r, dtype=float))


# ---------------------------------------------------------------------------
# catalog constructors

def flat_r4() -> CohomOneMetric:
    return CohomOneMetric(
        "flat-r4", "SU2", grr=lambda r: 1.0 + _zero(r), a=lambda r: 0.5 * r,
        b=lambda r: 0.5 * r, c=lambda r: 0.5 * r, domain=(0.0, np.inf),
        end=EndData("cone", link=round_link(1.0), link_eta=0.0),
        topo=TopologicalData(1, 0), einstein_flag=True)


def round_s4(radius: float = 1.0) -> CohomOneMetric:
    if radius <= 0:
        raise MetricError("radius must be positive")
    R = float(radius)

    def w(r):
        return 0.5 * R * jets.sin(r / R)

    return CohomOneMetric(
        f"round-s4(R={R:g})", "SU2", grr=lambda r: 1.0 + _zero(r), a=w, b=w, c=w,
        domain=(0.0, PI * R), topo=TopologicalData(2, 0), einstein_flag=True,
        params={"radius": R})


def taub_nut(m: float = 1.0) -> CohomOneMetric:
    """Self-dual Taub-NUT in Gibbons-Hawking form with V = 1 + 2m/r (nut at r = 0)."""
    if m <= 0:
        raise MetricError("mass parameter must be positive")
    m = float(m)

    def V(r):
        return 1.0 + 2.0 * m / r

    return CohomOneMetric(
        f"taub-nut(m={m:g})", "SU2", grr=V, a=lambda r: r * jets.sqrt(V(r)),
        b=lambda r: r * jets.sqrt(V(r)), c=lambda r: 2.0 * m / jets.sqrt(V(r)),
        domain=(0.0, np.inf),
        end=EndData("fibered_boundary", fiber="S1", base="S2", euler=1),
        topo=TopologicalData(1, 0), einstein_flag=True, params={"m": m})


def eguchi_hanson(a: float = 1.0) -> CohomOneMetric:
    """Eguchi-Hanson on T*S^2; the end is a cone over S^3/Z2 (an Euler number 2 circle bundle).

    The coframe order (dr, s1, s2, s3) is negatively oriented for the complex
    orientation of T*S^2, in which the bolt has self-intersection -2 and the
    curvature is anti-self-dual; the entry carries ``orientation=-1``.
    """
    if a <= 0:
        raise MetricError("parameter a must be positive")
    a = float(a)

    def f(r):
        return 1.0 - (a / r) ** 4

    return CohomOneMetric(
        f"eguchi-hanson(a={a:g})", "SU2", grr=lambda r: 1.0 / f(r), a=lambda r: 0.5 * r,
        b=lambda r: 0.5 * r, c=lambda r: 0.5 * r * jets.sqrt(f(r)),
        domain=(a, np.inf),
        end=EndData("cone", fiber="S1", base="S2", euler=2,
                    link=round_link(1.0, 2), link_eta=0.0),
        topo=TopologicalData(2, -1), einstein_flag=True, orbit_measure=8 * PI ** 2,
        quotient=2, orientation=-1, params={"a": a})


def euclidean_schwarzschild(m: float = 1.0) -> CohomOneMetric:
    """Euclidean Schwarzschild on R^2 x S^2 with the smooth period 8 pi m."""
    if m <= 0:
        raise MetricError("mass parameter must be positive")
    m = float(m)
    period = 8 * PI * m

    def f(r):
        return 1.0 - 2.0 * m / r

    return CohomOneMetric(
        f"euclidean-schwarzschild(m={m:g})", "S1xS2", grr=lambda r: 1.0 / f(r),
        a=lambda r: r + _zero(r), b=lambda r: r + _zero(r), c=lambda r: jets.sqrt(f(r)),
        domain=(2.0 * m, np.inf),
        end=EndData("fibered_boundary", fiber="S1", base="S2", euler=0),
        topo=TopologicalData(2, 0), einstein_flag=True, orbit_measure=4 * PI * period,
        params={"m": m, "period": period})


def flat_cone(link_radius: float = 1.0, quotient: int = 1) -> CohomOneMetric:
    """Metric cone dr^2 + r^2 g_link over a round S^3/Z_k of radius ``link_radius``.

    Singular at r = 0 unless the link is the unit S^3; only its end is used.
    """
    link = round_link(link_radius, quotient)
    h = 0.5 * link_radius
    return CohomOneMetric(
        f"cone({link.name})", "SU2", grr=lambda r: 1.0 + _zero(r), a=lambda r: h * r,
        b=lambda r: h * r, c=lambda r: h * r, domain=(0.0, np.inf),
        end=EndData("cone", link=link, link_eta=0.0), topo=None,
        einstein_flag=link_radius == 1.0, orbit_measure=16 * PI ** 2 / quotient,
        quotient=quotient, params={"link_radius": link_radius, "quotient": quotient})


BASES = ("S2", "T2", "Sigma_g")


def _base_setup(base: str, euler: int, genus: int, period: float):
    """Orbit model, connection coefficient and measure for a circle bundle over ``base``.

    Convention: the fiber form s3 = d psi + (connection) with ``d s3 = -(e P / area) vol_B``
    where P is the fiber period; the Hopf bundle (P = 4 pi) then has e = 1.
    """
    if base == "S2":
        return "S1xS2", euler * period / (4 * PI), 4 * PI * period
    if base == "T2":
        return "T3", -euler * period, period
    if base == "Sigma_g":
        if genus < 2:
            raise MetricError("hyperbolic base needs genus >= 2")
        area = 4 * PI * (genus - 1)
        return "S1xSigma_g", -euler * period / area, area * period
    raise MetricError(f"unsupported base {base!r}; expected one of {BASES}")


def model_fibered_boundary(euler: int = 1, base: str = "S2", fiber_len: float = 1.0,
                           genus: int = 2, r_min: float = 1.0) -> CohomOneMetric:
    """Exact product-type model dr^2 + r^2 g_B + g_F (x = 1/r) on r >= r_min."""
    period = 2 * PI
    model, twist, measure = _base_setup(base, euler, genus, period)
    c = fiber_len / period
    return CohomOneMetric(
        f"fb-model(e={euler},B={base})", model, grr=lambda r: 1.0 + _zero(r),
        a=lambda r: r + _zero(r), b=lambda r: r + _zero(r), c=lambda r: c + _zero(r),
        domain=(r_min, np.inf),
        end=EndData("fibered_boundary", fiber="S1", base=base, euler=euler),
        topo=None, einstein_flag=False, orbit_measure=measure, twist=twist,
        params={"euler": euler, "base": base, "fiber_len": fiber_len})


def model_fibered_cusp(euler: int = 1, base: str = "T2", fiber_len: float = 1.0,
                       genus: int = 2, r_min: float = 0.0) -> CohomOneMetric:
    """Exact cusp model dr^2 + g_B + e^{-2r} g_F (x = e^{-r}) on r >= r_min."""
    period = 2 * PI
    model, twist, measure = _base_setup(base, euler, genus, period)
    c = fiber_len / period
    return CohomOneMetric(
        f"cusp-model(e={euler},B={base})", model, grr=lambda r: 1.0 + _zero(r),
        a=lambda r: 1.0 + _zero(r), b=lambda r: 1.0 + _zero(r),
        c=lambda r: c * jets.exp(-r), domain=(r_min, np.inf),
        end=EndData("fibered_cusp", fiber="S1", base=base, euler=euler),
        topo=None, einstein_flag=False, orbit_measure=measure, twist=twist,
        params={"euler": euler, "base": base, "fiber_len": fiber_len})


# ---------------------------------------------------------------------------
# perturbations of fibered boundary metrics

class PerturbationError(MetricError):
    pass


@dataclass(frozen=True)
class PerturbationSpec:
    """Symmetric 2-tensor ``a1(x)`` on the rescaled orthonormal frame.

    ``a1`` maps the defining function x (jet-compatible) to a 4x4 nested
    list; row and column 0 (the x^2 d_x direction) must vanish.  The applied
    perturbation is ``x * a1``.
    """
    a1: Callable
    label: str = "a1"

    @classmethod
    def diagonal(cls, s: float, cutoff: float | None = 1.0) -> "PerturbationSpec":
        """``a1 = s * diag(0, 1, 1, 1) * exp(-(x/cutoff)^2)``; the bump keeps the interior untouched."""
        def a1(x):
            w = s * (jets.exp(-(x / cutoff) ** 2) if cutoff else 1.0 + _zero(x))
            z = _zero(x)
            return [[z, z, z, z], [z, w, z, z], [z, z, w, z], [z, z, z, w]]
        return cls(a1, f"diag(0,{s:g},{s:g},{s:g})")

    def validate(self, xs: Sequence[float] = (1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0)) -> None:
        for x in xs:
            M = np.array([[float(jets.primal(v)) for v in row] for row in self.a1(float(x))])
            if M.shape != (4, 4):
                raise PerturbationError("a1 must be 4x4")
            if not np.allclose(M, M.T, atol=1e-14):
                raise PerturbationError(f"a1 is not symmetric at x={x}")
            if np.abs(M[0]).max() > 0 or np.abs(M[:, 0]).max() > 0:
                raise PerturbationError(f"a1 has a component along x^2 d_x at x={x}")


def _cholesky_upper(G):
    """Upper-triangular U with U^T U = G for a 3x3 nested list (jet-compatible)."""
    n = 3
    U = [[0.0] * n for _ in range(n)]
    for i in range(n):
        s = G[i][i]
        for k in range(i):
            s = s - U[k][i] * U[k][i]
        if np.any(np.asarray(jets.primal(s)) <= 0):
            raise PerturbationError("perturbed metric is not positive definite")
        U[i][i] = jets.sqrt(s)
        for j in range(i + 1, n):
            t = G[i][j]
            for k in range(i):
                t = t - U[k][i] * U[k][j]
            U[i][j] = t / U[i][i]
    return U


@dataclass
class PerturbedMetric(RadialMetric):
    """``g = g1 + x a1`` on the rescaled frame of a fibered boundary metric ``g1``."""
    base: CohomOneMetric
    spec: PerturbationSpec

    def __post_init__(self):
        self.name = f"{self.base.name}+x*{self.spec.label}"
        self.orbit_model = self.base.orbit_model
        self.domain = self.base.domain
        self.end = self.base.end
        self.topo = self.base.topo
        self.einstein_flag = False
        self.orientation = self.base.orientation

    def _factor(self, r):
        x = 1.0 / r
        a1 = self.spec.a1(x)
        G = [[(1.0 if i == j else 0.0) + x * a1[i + 1][j + 1] for j in range(3)] for i in range(3)]
        return _cholesky_upper(G)

    def matrix(self, r, y1, y2, y3):
        A = self.base.matrix(r, y1, y2, y3)
        U = self._factor(r)
        rows = [A[0]]
        for i in range(3):
            rows.append([sum((U[i][k] * A[k + 1][mu] for k in range(i, 3)), 0.0 * A[1][mu])
                         for mu in range(4)])
        return rows

    def _det(self, r):
        U = self._factor(np.asarray(r, dtype=float))
        return U[0][0] * U[1][1] * U[2][2]

    def weight(self, r):
        return self.base.weight(r) * self._det(r)

    def hypersurface_volume(self, r):
        return self.base.hypersurface_volume(r) * self._det(r)


def perturb(g1: CohomOneMetric, p: PerturbationSpec,
            check_points: int = 200) -> PerturbedMetric:
    if g1.end.type != "fibered_boundary":
        raise PerturbationError("perturbations are defined for fibered boundary ends")
    p.validate()
    out = PerturbedMetric(g1, p)
    r0, _ = g1.domain
    rs = np.geomspace(max(r0, 1e-3) + 1e-3, 1e6, check_points)
    for r in rs:
        try:
            out._factor(float(r))
        except PerturbationError as exc:
            raise PerturbationError(f"{exc} at r={r:g}") from None
    return out


CATALOG: dict[str, Callable[..., RadialMetric]] = {
    "flat_r4": flat_r4,
    "round_s4": round_s4,
    "taub_nut": taub_nut,
    "eguchi_hanson": eguchi_hanson,
    "euclidean_schwarzschild": euclidean_schwarzschild,
    "flat_cone": flat_cone,
    "model_fibered_boundary": model_fibered_boundary,
    "model_fibered_cusp": model_fibered_cusp,
}


def with_orientation(metric: CohomOneMetric, orientation: int) -> CohomOneMetric:
    """Same metric with the opposite orientation flips declared tau and Euler number."""
    if orientation == metric.orientation:
        return metric
    topo = metric.topo.flipped() if metric.topo else None
    end = metric.end
    if end.euler is not None:
        end = replace(end, euler=-end.euler)
    return replace(metric, orientation=orientation, topo=topo, end=end)
