from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import special_ortho_group

from einstein_obs import metrics as M
from einstein_obs.char_integrals import (P1_OVER_3, PFAFFIAN, Hypersurface, OrbitInvarianceError,
                                         QuadratureSpec, check_orbit_invariance, cs_euler_explicit,
                                         cs_generic, cs_signature_explicit, integrate, pfaffian_from_decomp,
                                         pfaffian_integrand, signature_from_decomp, signature_integrand)
from einstein_obs.curvature import frame_data


def rotate(R, O):
    return np.einsum("ai,bj,ck,dl,...ijkl->...abcd", O, O, O, O, R)


def _riemann(name):
    g = M.CATALOG[name]()
    return frame_data(g.coframe(), g.sample_points(6)).riemann


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.sampled_from(["taub_nut", "model_fibered_boundary",
                                                     "euclidean_schwarzschild"]))
def test_frame_rotation_invariance(seed, name):
    R = _riemann(name)
    O = special_ortho_group.rvs(4, random_state=seed)
    Rr = rotate(R, O)
    for fn in (pfaffian_integrand, signature_integrand):
        assert np.allclose(fn(Rr), fn(R), rtol=1e-10, atol=1e-14)
    # a reflection is an orientation reversal: Pf is even, L is odd
    P = np.diag([1.0, 1.0, 1.0, -1.0]) @ O
    assert np.allclose(pfaffian_integrand(rotate(R, P)), pfaffian_integrand(R), rtol=1e-10, atol=1e-14)
    assert np.allclose(signature_integrand(rotate(R, P)), -signature_integrand(R), rtol=1e-10, atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_polynomial_ad_invariance(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(4, 4, 2)); X = X - np.swapaxes(X, 0, 1)
    Y = rng.normal(size=(4, 4, 2, 2)); Y = Y - np.swapaxes(Y, 0, 1); Y = Y - np.swapaxes(Y, 2, 3)
    X = X[..., :1]
    O = special_ortho_group.rvs(4, random_state=seed)
    Xc = np.einsum("ai,ijk,bj->abk", O, X, O)
    Yc = np.einsum("ai,ijkl,bj->abkl", O, Y, O)
    for P in (PFAFFIAN, P1_OVER_3):
        # P(X, Y) for a 1-form X and a 2-form Y on a 3-d slot set (pad to three axes)
        Xp = np.zeros((4, 4, 3)); Xp[..., :1] = X
        Yp = np.zeros((4, 4, 3, 3)); Yp[..., :2, :2] = Y
        Xcp = np.zeros((4, 4, 3)); Xcp[..., :1] = Xc
        Ycp = np.zeros((4, 4, 3, 3)); Ycp[..., :2, :2] = Yc
        assert P.pair(Xcp, Ycp, 1, 2) == pytest.approx(P.pair(Xp, Yp, 1, 2), abs=1e-12)


@pytest.mark.parametrize("name", ["round_s4", "taub_nut", "eguchi_hanson", "euclidean_schwarzschild",
                                  "model_fibered_boundary", "model_fibered_cusp"])
def test_densities_match_decomposition(name):
    g = M.CATALOG[name]()
    R = frame_data(g.coframe(), g.sample_points(40)).riemann
    # both densities are quadratic in the curvature; where one vanishes identically
    # (signature on conformally flat metrics) the curvature norm sets the scale
    rm = np.einsum("...abcd,...abcd->...", R, R) / (8 * np.pi ** 2)
    for a, b in [(pfaffian_integrand(R, g.orientation), pfaffian_from_decomp(R, g.orientation)),
                 (signature_integrand(R, g.orientation), signature_from_decomp(R, g.orientation))]:
        scale = np.maximum(np.abs(b), rm)
        assert np.max(np.abs(a - b) / scale) < 1e-9


def test_round_s4_calibration():
    g = M.round_s4()
    assert integrate(g, "pfaffian").value == pytest.approx(2.0, abs=1e-8)
    assert abs(integrate(g, "signature").value) < 1e-10


def test_integral_scale_invariance():
    a = integrate(M.round_s4(3.0), "pfaffian").value
    assert a == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("R", [1.0, 2.0, 5.0])
def test_flat_ball(R):
    f = M.flat_r4()
    assert cs_euler_explicit(f, R) == pytest.approx(-1.0, abs=1e-12)
    assert cs_generic(f, R, PFAFFIAN) == pytest.approx(-1.0, abs=1e-12)
    assert abs(cs_signature_explicit(f, R)) < 1e-14


@pytest.mark.parametrize("name, r", [("taub_nut", 3.0), ("eguchi_hanson", 2.0),
                                      ("euclidean_schwarzschild", 4.0), ("model_fibered_boundary", 7.0)])
def test_generic_transgression_matches_explicit(name, r):
    g = M.CATALOG[name]()
    assert cs_generic(g, r, PFAFFIAN) == pytest.approx(cs_euler_explicit(g, r), abs=1e-10)
    assert cs_generic(g, r, P1_OVER_3) == pytest.approx(cs_signature_explicit(g, r), abs=1e-10)


def test_slab_identity_pfaffian():
    # int_{r1}^{r2} Pf = Q(r2) - Q(r1) for the Euler transgression
    for g in (M.taub_nut(), M.perturb(M.taub_nut(), M.PerturbationSpec.diagonal(0.1))):
        I = integrate(g, "pfaffian", rmin=2.0, rmax=5.0).value
        assert I == pytest.approx(cs_euler_explicit(g, 5.0) - cs_euler_explicit(g, 2.0), abs=1e-9)


def test_cs_signature_is_orientation_odd():
    g = M.taub_nut()
    h = M.with_orientation(g, -1)
    assert cs_signature_explicit(h, 3.0) == pytest.approx(-cs_signature_explicit(g, 3.0), abs=1e-15)
    assert cs_euler_explicit(h, 3.0) == pytest.approx(cs_euler_explicit(g, 3.0), abs=1e-15)


def test_orbit_invariance_guard():
    class Lumpy:
        """A metric whose density depends on the orbit point."""
        def __init__(self):
            self.g = M.taub_nut()
            self.name = "lumpy"
            self.orientation = 1

        def coframe(self):
            from einstein_obs.curvature import Coframe
            base = self.g.matrix
            return Coframe(lambda r, a, b, c: [[v * (1.0 + 0.3 * (a - 1.1) ** 2) if i == 1 else v
                                                 for v in row] for i, row in enumerate(base(r, a, b, c))], 4)

        def orbit_point(self):
            return self.g.orbit_point()

        def points(self, r, angles=None):
            return self.g.points(r, angles)

    with pytest.raises(OrbitInvarianceError):
        check_orbit_invariance(Lumpy(), pfaffian_integrand, [3.0, 5.0])


def test_hypersurface_domain_check():
    with pytest.raises(ValueError):
        Hypersurface(M.eguchi_hanson(), 0.5)


def test_integrate_empty_range():
    with pytest.raises(ValueError):
        integrate(M.taub_nut(), "pfaffian", rmax=1e-9)
    assert QuadratureSpec().rmax_schedule == (1e2, 1e3, 1e4)
