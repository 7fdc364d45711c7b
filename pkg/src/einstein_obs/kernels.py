"""Batched Cartan-structure kernels.

Given the coefficient matrix ``A[a, mu]`` of an orthonormal coframe
``e^a = A[a, mu] dx^mu`` together with its first and second coordinate
derivatives at ``N`` points, compute the dual frame, the Levi-Civita
connection coefficients and the frame components of the curvature.

Two interchangeable backends exist: a numba ``@njit`` loop kernel and a pure
numpy/einsum kernel.  ``EO_BACKEND=numpy`` (or a missing numba) selects the
numpy path; the default is numba.  ``EO_THREADS`` caps numba's thread pool.

Array conventions (leading axis is the batch):

* ``dA[a, mu, nu] = d_nu A[a, mu]``
* ``ddA[a, mu, nu, lam] = d_lam d_nu A[a, mu]``
* ``E[mu, a]`` is the inverse of ``A``: the frame ``e_a = E[mu, a] d_mu``
* ``gamma[a, b, c] = omega^a_b(e_c)``, antisymmetric in ``a, b``
* ``omega[a, b, mu]`` coordinate components of the connection 1-forms
* ``riemann[a, b, c, d] = Omega^a_b(e_c, e_d)``
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

_backend = "numba" if HAS_NUMBA and os.environ.get("EO_BACKEND", "numba").lower() != "numpy" else "numpy"

if HAS_NUMBA and os.environ.get("EO_THREADS"):
    try:
        numba.set_num_threads(max(1, min(int(os.environ["EO_THREADS"]), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not available")
    _backend = name


def _cartan_numpy(A, dA, ddA):
    E = np.linalg.inv(A)
    F = np.swapaxes(dA, -1, -2) - dA  # F[a, nu, mu] = d_nu A[a,mu] - d_mu A[a,nu]
    c = np.einsum("zanm,znb,zmc->zabc", F, E, E)
    gamma = 0.5 * (c + np.einsum("zbca->zabc", c) - np.einsum("zcab->zabc", c))
    omega = np.einsum("zabc,zcm->zabm", gamma, A)

    dE = -np.einsum("zmb,zbnl,zna->zmal", E, dA, E)
    # dF[a, nu, mu, lam] = d_lam F[a, nu, mu]
    dF = np.einsum("zamnl->zanml", ddA) - ddA
    dc = (np.einsum("zanml,znb,zmc->zabcl", dF, E, E)
          + np.einsum("zanm,znbl,zmc->zabcl", F, dE, E)
          + np.einsum("zanm,znb,zmcl->zabcl", F, E, dE))
    dgamma = 0.5 * (dc + np.einsum("zbcal->zabcl", dc) - np.einsum("zcabl->zabcl", dc))
    domega = (np.einsum("zabcl,zcm->zabml", dgamma, A)
              + np.einsum("zabc,zcml->zabml", gamma, dA))
    # Omega_coord[a, b, lam, mu] = d_lam omega_mu - d_mu omega_lam + [omega_lam, omega_mu]
    om = np.einsum("zabml->zablm", domega) - domega
    ww = np.einsum("zacl,zcbm->zablm", omega, omega)
    om = om + ww - np.swapaxes(ww, -1, -2)
    riemann = np.einsum("zablm,zlc,zmd->zabcd", om, E, E)
    return E, gamma, omega, riemann


if HAS_NUMBA:
    @numba.njit(cache=True, nogil=True, parallel=False)
    def _cartan_numba(A, dA, ddA):
        N, n = A.shape[0], A.shape[1]
        E = np.empty_like(A)
        gamma = np.zeros((N, n, n, n))
        omega = np.zeros((N, n, n, n))
        riemann = np.zeros((N, n, n, n, n))
        F = np.empty((n, n, n))
        dF = np.empty((n, n, n, n))
        c = np.empty((n, n, n))
        dc = np.empty((n, n, n, n))
        dE = np.empty((n, n, n))
        dgam = np.empty((n, n, n, n))
        dom = np.empty((n, n, n, n))
        om = np.empty((n, n, n, n))
        for z in range(N):
            Ez = np.linalg.inv(A[z])
            E[z] = Ez
            for a in range(n):
                for nu in range(n):
                    for mu in range(n):
                        F[a, nu, mu] = dA[z, a, mu, nu] - dA[z, a, nu, mu]
                        for lam in range(n):
                            dF[a, nu, mu, lam] = ddA[z, a, mu, nu, lam] - ddA[z, a, nu, mu, lam]
            for mu in range(n):
                for a in range(n):
                    for lam in range(n):
                        s = 0.0
                        for b in range(n):
                            for nu in range(n):
                                s += Ez[mu, b] * dA[z, b, nu, lam] * Ez[nu, a]
                        dE[mu, a, lam] = -s
            for a in range(n):
                for b in range(n):
                    for cc in range(n):
                        s = 0.0
                        for nu in range(n):
                            for mu in range(n):
                                s += F[a, nu, mu] * Ez[nu, b] * Ez[mu, cc]
                        c[a, b, cc] = s
                        for lam in range(n):
                            s = 0.0
                            for nu in range(n):
                                for mu in range(n):
                                    s += (dF[a, nu, mu, lam] * Ez[nu, b] * Ez[mu, cc]
                                          + F[a, nu, mu] * (dE[nu, b, lam] * Ez[mu, cc]
                                                            + Ez[nu, b] * dE[mu, cc, lam]))
                            dc[a, b, cc, lam] = s
            for a in range(n):
                for b in range(n):
                    for cc in range(n):
                        gamma[z, a, b, cc] = 0.5 * (c[a, b, cc] + c[b, cc, a] - c[cc, a, b])
                        for lam in range(n):
                            dgam[a, b, cc, lam] = 0.5 * (dc[a, b, cc, lam] + dc[b, cc, a, lam]
                                                         - dc[cc, a, b, lam])
            for a in range(n):
                for b in range(n):
                    for mu in range(n):
                        s = 0.0
                        for cc in range(n):
                            s += gamma[z, a, b, cc] * A[z, cc, mu]
                        omega[z, a, b, mu] = s
                        for lam in range(n):
                            s = 0.0
                            for cc in range(n):
                                s += dgam[a, b, cc, lam] * A[z, cc, mu] + gamma[z, a, b, cc] * dA[z, cc, mu, lam]
                            dom[a, b, mu, lam] = s
            for a in range(n):
                for b in range(n):
                    for lam in range(n):
                        for mu in range(n):
                            s = dom[a, b, mu, lam] - dom[a, b, lam, mu]
                            for cc in range(n):
                                s += omega[z, a, cc, lam] * omega[z, cc, b, mu] - omega[z, a, cc, mu] * omega[z, cc, b, lam]
                            om[a, b, lam, mu] = s
            for a in range(n):
                for b in range(n):
                    for cc in range(n):
                        for d in range(n):
                            s = 0.0
                            for lam in range(n):
                                for mu in range(n):
                                    s += om[a, b, lam, mu] * Ez[lam, cc] * Ez[mu, d]
                            riemann[z, a, b, cc, d] = s
        return E, gamma, omega, riemann


def cartan(A, dA, ddA, backend_name: str | None = None):
    """Frame, connection and curvature from coframe jets (batched over axis 0)."""
    A = np.ascontiguousarray(A, dtype=float)
    dA = np.ascontiguousarray(dA, dtype=float)
    ddA = np.ascontiguousarray(ddA, dtype=float)
    name = backend_name or _backend
    if name == "numba":
        return _cartan_numba(A, dA, ddA)
    return _cartan_numpy(A, dA, ddA)
