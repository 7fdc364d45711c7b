"""Cartan structure equations for orthonormal coframes.

The connection is obtained pointwise from the structure coefficients of the
coframe (the closed-form solution of ``de^a + omega^a_b ^ e^b = 0`` with
``omega`` antisymmetric); its derivative comes from second-order jets of the
coframe coefficients, which gives ``Omega = d omega + omega ^ omega``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import jets, kernels
from .forms import DifferentialForm, ScalarField, levi_civita


class DegeneratePointError(ValueError):
    """The coframe is singular at the requested point."""


def _leaf(x, shape):
    return np.broadcast_to(np.asarray(jets.primal(x), dtype=float), shape)


class Coframe:
    """An orthonormal coframe ``e^a = A[a][mu](x) dx^mu`` on a chart.

    ``matrix_fn(*x)`` returns the coefficient matrix as nested sequences of
    jet-compatible values.  Orientation ``+1`` means ``e^0 ^ ... ^ e^{n-1}``
    is positively oriented.
    """

    def __init__(self, matrix_fn: Callable, dim: int, orientation: int = 1,
                 domain: Sequence[tuple[float, float]] | None = None, name: str = ""):
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.matrix_fn = matrix_fn
        self.dim = dim
        self.orientation = orientation
        self.domain = domain
        self.name = name

    @classmethod
    def from_forms(cls, forms: Sequence[DifferentialForm], orientation: int = 1,
                   domain=None, name: str = "") -> "Coframe":
        n = len(forms)
        if any(f.degree != 1 or f.dim != n for f in forms):
            raise ValueError("a coframe needs n one-forms on an n-dimensional chart")

        def matrix_fn(*x):
            zero = 0.0 * jets.primal(x[0])
            return [[f.components[(mu,)](*x) if (mu,) in f.components else zero
                     for mu in range(n)] for f in forms]

        return cls(matrix_fn, n, orientation, domain, name)

    @property
    def forms(self) -> list[DifferentialForm]:
        n = self.dim
        out = []
        for a in range(n):
            comps = {(mu,): ScalarField(lambda *x, a=a, mu=mu: self.matrix_fn(*x)[a][mu], n)
                     for mu in range(n)}
            out.append(DifferentialForm(n, 1, comps))
        return out

    def jet_arrays(self, points, order: int = 2):
        """Coefficient matrix and its derivatives at an ``(N, n)`` array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        N, n = pts.shape
        if n != self.dim:
            raise ValueError(f"points have {n} coordinates, chart has {self.dim}")
        M = self.matrix_fn(*jets.seed(tuple(pts[:, i] for i in range(n)), order))
        A = np.zeros((N, n, n))
        dA = np.zeros((N, n, n, n))
        ddA = np.zeros((N, n, n, n, n))
        for a in range(n):
            for mu in range(n):
                entry = M[a][mu]
                if not isinstance(entry, jets.Jet):
                    A[:, a, mu] = _leaf(entry, (N,))
                    continue
                inner = entry.value
                A[:, a, mu] = _leaf(jets.primal(inner), (N,))
                for nu, p in enumerate(entry.partials):
                    if order == 1:
                        dA[:, a, mu, nu] = _leaf(p, (N,))
                    elif isinstance(p, jets.Jet):
                        dA[:, a, mu, nu] = _leaf(p.value, (N,))
                        for lam, q in enumerate(p.partials):
                            ddA[:, a, mu, nu, lam] = _leaf(q, (N,))
                    else:
                        dA[:, a, mu, nu] = _leaf(p, (N,))
        return A, dA, ddA


@dataclass(frozen=True)
class ConnectionMatrix:
    """Connection 1-forms at a point: ``coord[a, b, mu]`` and ``frame[a, b, c] = omega^a_b(e_c)``."""
    coord: np.ndarray
    frame: np.ndarray


@dataclass(frozen=True)
class CurvatureMatrix:
    """Curvature 2-forms at a point: ``frame[a, b, c, d] = Omega^a_b(e_c, e_d)``."""
    frame: np.ndarray
    coord: np.ndarray | None = None


@dataclass(frozen=True)
class FrameData:
    """Everything the Cartan kernel produces on a batch of points."""
    points: np.ndarray
    A: np.ndarray
    dA: np.ndarray
    E: np.ndarray
    gamma: np.ndarray
    omega: np.ndarray
    riemann: np.ndarray


def frame_data(cf: Coframe, points, backend: str | None = None) -> FrameData:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    A, dA, ddA = cf.jet_arrays(pts, order=2)
    # scale-free test: |det| relative to the product of row lengths
    with np.errstate(invalid="ignore", divide="ignore"):
        det = np.linalg.det(A) / np.prod(np.linalg.norm(A, axis=2), axis=1)
    bad = ~(np.abs(det) > 1e-12)
    if np.any(bad):
        raise DegeneratePointError(f"singular coframe at {pts[np.argmax(bad)].tolist()}")
    E, gamma, omega, riemann = kernels.cartan(A, dA, ddA, backend)
    return FrameData(pts, A, dA, E, gamma, omega, riemann)


def solve_connection(cf: Coframe, p: Sequence[float]) -> ConnectionMatrix:
    fd = frame_data(cf, [p])
    return ConnectionMatrix(fd.omega[0], fd.gamma[0])


def curvature_matrix(cf: Coframe, p: Sequence[float]) -> CurvatureMatrix:
    fd = frame_data(cf, [p])
    R = fd.riemann[0]
    coord = np.einsum("abcd,ci,dj->abij", R, fd.A[0], fd.A[0])
    return CurvatureMatrix(R, coord)


def structure_residual(cf: Coframe, points) -> np.ndarray:
    """Max |de^a + omega^a_b ^ e^b| coefficient at each point."""
    fd = frame_data(cf, points)
    de = np.swapaxes(fd.dA, -1, -2) - fd.dA  # [a, nu, mu]
    we = np.einsum("zabn,zbm->zanm", fd.omega, fd.A)
    res = de + we - np.swapaxes(we, -1, -2)
    return np.abs(res).reshape(len(fd.points), -1).max(axis=1)


def bianchi_residual(R: np.ndarray) -> float:
    """Max of the cyclic sum R_abcd + R_acdb + R_adbc (first Bianchi identity)."""
    cyc = R + np.einsum("...acdb->...abcd", R) + np.einsum("...adbc->...abcd", R)
    return float(np.abs(cyc).max())


_S = 1.0 / np.sqrt(2.0)


def _sd_basis() -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of self-dual and anti-self-dual 2-forms (eps_0123 = 1)."""
    def two(pairs):
        F = np.zeros((4, 4))
        for (i, j), s in pairs:
            F[i, j] += s * _S
            F[j, i] -= s * _S
        return F
    plus = np.array([two([((0, 1), 1), ((2, 3), 1)]),
                     two([((0, 2), 1), ((3, 1), 1)]),
                     two([((0, 3), 1), ((1, 2), 1)])])
    minus = np.array([two([((0, 1), 1), ((2, 3), -1)]),
                      two([((0, 2), 1), ((3, 1), -1)]),
                      two([((0, 3), 1), ((1, 2), -1)])])
    return plus, minus


BASIS_PLUS, BASIS_MINUS = _sd_basis()


@dataclass(frozen=True)
class CurvatureDecomp4:
    """Pointwise (W+, W-, Z, S) split of a 4-d curvature tensor in frame components.

    Norms follow the Lambda^2 operator convention: ``|W+|^2`` is the Frobenius
    norm of the 3x3 block and ``z_norm_sq = 1/2 sum Z_ab^2``, which makes
    ``|W|^2 - |Z|^2 + S^2/24`` the Gauss-Bonnet-Chern integrand times 8 pi^2.
    """
    W_plus: np.ndarray
    W_minus: np.ndarray
    Z: np.ndarray
    S: np.ndarray | float
    B: np.ndarray

    @property
    def w_plus_sq(self):
        return np.einsum("...ij,...ij->...", self.W_plus, self.W_plus)

    @property
    def w_minus_sq(self):
        return np.einsum("...ij,...ij->...", self.W_minus, self.W_minus)

    @property
    def w_sq(self):
        return self.w_plus_sq + self.w_minus_sq

    @property
    def z_norm_sq(self):
        return 0.5 * np.einsum("...ij,...ij->...", self.Z, self.Z)

    def weyl(self) -> np.ndarray:
        return (np.einsum("...ij,iab,jcd->...abcd", self.W_plus, BASIS_PLUS, BASIS_PLUS)
                + np.einsum("...ij,iab,jcd->...abcd", self.W_minus, BASIS_MINUS, BASIS_MINUS))

    def reconstruct(self) -> np.ndarray:
        """Rebuild R_abcd = W + (1/2) Z (.) g + (S/24) g (.) g (Kulkarni-Nomizu)."""
        g = np.eye(4)
        Z = self.Z

        def kn(h, k):
            return (np.einsum("...ac,...bd->...abcd", h, k) + np.einsum("...bd,...ac->...abcd", h, k)
                    - np.einsum("...ad,...bc->...abcd", h, k) - np.einsum("...bc,...ad->...abcd", h, k))

        S = np.asarray(self.S)[..., None, None, None, None]
        gg = np.broadcast_to(g, Z.shape)
        return self.weyl() + 0.5 * kn(Z, gg) + S / 24.0 * kn(gg, gg)


def ricci(R: np.ndarray) -> np.ndarray:
    return np.einsum("...abad->...bd", R)


def decompose4(R: np.ndarray, orientation: int = 1) -> CurvatureDecomp4:
    """Split frame curvature ``R[..., a, b, c, d]`` (dimension 4)."""
    R = np.asarray(R, dtype=float)
    if R.shape[-4:] != (4, 4, 4, 4):
        raise ValueError("decompose4 needs a 4-dimensional curvature tensor")
    Ric = ricci(R)
    S = np.einsum("...aa->...", Ric)
    Z = Ric - S[..., None, None] / 4.0 * np.eye(4)
    plus, minus = (BASIS_PLUS, BASIS_MINUS) if orientation == 1 else (BASIS_MINUS, BASIS_PLUS)
    Aop = 0.25 * np.einsum("iab,...abcd,jcd->...ij", plus, R, plus)
    Cop = 0.25 * np.einsum("iab,...abcd,jcd->...ij", minus, R, minus)
    Bop = 0.25 * np.einsum("iab,...abcd,jcd->...ij", plus, R, minus)
    shift = (S / 12.0)[..., None, None] * np.eye(3)
    return CurvatureDecomp4(Aop - shift, Cop - shift, Z, S, Bop)


def einstein_residual(metric, sample_count: int = 50, seed: int = 0) -> float:
    """Max over sampled points of the Frobenius norm of the traceless Ricci tensor."""
    pts = metric.sample_points(sample_count, seed=seed)
    fd = frame_data(metric.coframe(), pts)
    Ric = ricci(fd.riemann)
    n = Ric.shape[-1]
    S = np.einsum("...aa->...", Ric)
    Z = Ric - S[..., None, None] / n * np.eye(n)
    return float(np.sqrt(np.einsum("zab,zab->z", Z, Z)).max())

