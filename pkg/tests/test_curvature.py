from __future__ import annotations

import numpy as np
import pytest

from einstein_obs import jets, kernels
from einstein_obs import metrics as M
from einstein_obs.curvature import (Coframe, DegeneratePointError, bianchi_residual, curvature_matrix,
                                    decompose4, einstein_residual, frame_data, ricci, solve_connection,
                                    structure_residual)


def sphere2():
    return Coframe(lambda th, ph: [[1.0 + 0 * th, 0.0 * th], [0.0 * th, jets.sin(th)]], 2)


def test_round_s2_connection_and_curvature():
    conn = solve_connection(sphere2(), [1.1, 0.3])
    # omega^1_2 = -cos(th) dphi
    assert conn.coord[0, 1, 1] == pytest.approx(-np.cos(1.1), abs=1e-14)
    R = curvature_matrix(sphere2(), [1.1, 0.3]).frame
    assert R[0, 1, 0, 1] == pytest.approx(1.0, abs=1e-13)


def test_unit_s3_is_einstein_with_ric_2():
    g = M.round_link(1.0)
    fd = frame_data(g.coframe(), g.sample_points(10))
    assert np.allclose(ricci(fd.riemann), 2 * np.eye(3), atol=1e-12)


@pytest.mark.parametrize("radius", [0.5, 1.0, 3.0])
def test_round_s4_constant_curvature(radius):
    g = M.round_s4(radius)
    fd = frame_data(g.coframe(), g.sample_points(20))
    d = decompose4(fd.riemann)
    assert np.allclose(d.S, 12 / radius ** 2, rtol=1e-10)
    assert np.abs(d.W_plus).max() < 1e-9 / radius ** 2
    assert np.abs(d.W_minus).max() < 1e-9 / radius ** 2


@pytest.mark.parametrize("name", sorted(M.CATALOG))
def test_structure_equations_and_bianchi(name):
    g = M.CATALOG[name]()
    pts = g.sample_points(12, seed=4)
    assert structure_residual(g.coframe(), pts).max() < 1e-10
    fd = frame_data(g.coframe(), pts)
    R = fd.riemann
    scale = max(1.0, np.abs(R).max())
    assert bianchi_residual(R) < 1e-10 * scale
    # pair symmetries
    assert np.allclose(R, -np.swapaxes(R, 1, 2), atol=1e-10 * scale)
    assert np.allclose(R, np.transpose(R, (0, 3, 4, 1, 2)), atol=1e-10 * scale)
    assert np.allclose(fd.gamma, -np.swapaxes(fd.gamma, 1, 2), atol=1e-12 * scale)


@pytest.mark.parametrize("name", ["taub_nut", "eguchi_hanson", "model_fibered_boundary"])
def test_backends_agree(name):
    g = M.CATALOG[name]()
    pts = g.sample_points(30)
    a = frame_data(g.coframe(), pts, backend="numpy")
    b = frame_data(g.coframe(), pts, backend="numba") if kernels.HAS_NUMBA else a
    for x, y in [(a.gamma, b.gamma), (a.omega, b.omega), (a.riemann, b.riemann)]:
        assert np.allclose(x, y, atol=1e-12, rtol=1e-12)


def test_decomposition_reconstructs():
    for g in (M.taub_nut(), M.model_fibered_boundary(), M.euclidean_schwarzschild()):
        fd = frame_data(g.coframe(), g.sample_points(10))
        assert np.allclose(decompose4(fd.riemann).reconstruct(), fd.riemann, atol=1e-10)


def test_taub_nut_one_sided_weyl_and_orientation_swap():
    g = M.taub_nut()
    R = frame_data(g.coframe(), g.sample_points(10)).riemann
    d, e = decompose4(R, 1), decompose4(R, -1)
    assert np.abs(d.W_plus).max() < 1e-12 and np.abs(d.W_minus).max() > 1e-3
    assert np.allclose(e.W_plus, d.W_minus) and np.allclose(e.W_minus, d.W_plus)


@pytest.mark.parametrize("name", ["flat_r4", "round_s4", "taub_nut", "eguchi_hanson",
                                  "euclidean_schwarzschild"])
def test_einstein_catalog(name):
    assert einstein_residual(M.CATALOG[name](), 50) < 1e-8


def test_model_end_is_not_einstein():
    assert einstein_residual(M.model_fibered_boundary(), 20) > 1e-3


def test_degenerate_point_rejected():
    with pytest.raises(DegeneratePointError):
        frame_data(M.round_s4().coframe(), [[0.0, 1.1, 0.3, 0.7]])


def test_set_backend_validates():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")
    assert kernels.backend() in ("numba", "numpy")


def test_env_flag_selects_numpy_backend():
    import os
    import subprocess
    import sys
    env = dict(os.environ, EO_BACKEND="numpy", EO_THREADS="1")
    out = subprocess.run([sys.executable, "-c", "from einstein_obs import kernels; print(kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
