from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import quad

from einstein_obs import metrics as M
from einstein_obs.forms import wedge


def test_su2_structure_constants():
    # d s1 = -s2 ^ s3 and cyclic
    cf = M.ThreeMetric("su2", "SU2", 1.0, 1.0, 1.0, 16 * np.pi ** 2).coframe()
    s = cf.forms
    p = [1.1, 0.3, 0.7]
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        lhs = s[i].d().dense(p)
        rhs = -wedge(s[j], s[k]).dense(p)
        assert np.allclose(lhs, rhs, atol=1e-13)


@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
def test_round_s4_volume(radius):
    g = M.round_s4(radius)
    vol, _ = quad(lambda r: float(g.weight(r)), *g.domain, epsabs=1e-13)
    assert vol == pytest.approx(8 * np.pi ** 2 / 3 * radius ** 4, rel=1e-10)


def test_link_volumes():
    assert M.round_link(1.0).volume() == pytest.approx(2 * np.pi ** 2)
    assert M.round_link(2.0, 3).volume() == pytest.approx(16 * np.pi ** 2 / 3)
    assert M.berger_sphere(1.0, 0.5).volume() == pytest.approx(np.pi ** 2)
    with pytest.raises(M.MetricError):
        M.round_link(-1.0)


def test_eguchi_hanson_link_is_round_rp3_asymptotically():
    g = M.eguchi_hanson()
    r = 1e4
    assert g.hypersurface_volume(r) / r ** 3 == pytest.approx(M.round_link(1.0, 2).volume(), rel=1e-12)


def test_taub_nut_fiber_length_tends_to_constant():
    g = M.taub_nut(1.5)
    _, a, b, c = g.warpings(np.array([1e6]))
    assert c[0] == pytest.approx(3.0, rel=1e-5)
    assert a[0] / 1e6 == pytest.approx(1.0, rel=1e-5)


def test_defining_functions():
    assert M.taub_nut().x_of_r(4.0) == pytest.approx(0.25)
    cusp = M.model_fibered_cusp()
    assert cusp.x_of_r(2.0) == pytest.approx(np.exp(-2.0))
    assert cusp.r_of_x(cusp.x_of_r(3.3)) == pytest.approx(3.3)


def test_base_setup_errors():
    with pytest.raises(M.MetricError):
        M.model_fibered_boundary(base="Klein")
    with pytest.raises(M.MetricError):
        M.model_fibered_cusp(base="Sigma_g", genus=1)


def test_with_orientation_flips_declared_data():
    g = M.taub_nut()
    h = M.with_orientation(g, -1)
    assert h.orientation == -1 and h.end.euler == -1 and h.topo.tau == 0
    eh = M.with_orientation(M.eguchi_hanson(), 1)
    assert eh.topo.tau == 1 and eh.end.euler == -2
    assert M.with_orientation(g, 1) is g


def test_frozen_metric_is_product():
    g = M.taub_nut()
    f = g.frozen(5.0)
    _, a, _, _ = (np.asarray(v) for v in g.warpings(np.array([5.0])))
    assert f.hypersurface_volume(7.0) == pytest.approx(g.hypersurface_volume(5.0))
    assert f.topo is None


def test_perturbation_checks():
    tn = M.taub_nut()
    p = M.perturb(tn, M.PerturbationSpec.diagonal(0.1))
    r = np.array([3.0])
    assert p.weight(r)[0] > tn.weight(r)[0]
    with pytest.raises(M.PerturbationError):
        M.perturb(M.eguchi_hanson(), M.PerturbationSpec.diagonal(0.1))
    bad = M.PerturbationSpec(lambda x: [[x, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    with pytest.raises(M.PerturbationError):
        bad.validate()
    asym = M.PerturbationSpec(lambda x: [[0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    with pytest.raises(M.PerturbationError):
        asym.validate()
    with pytest.raises(M.PerturbationError):
        M.perturb(tn, M.PerturbationSpec.diagonal(-50.0, cutoff=None))


def test_perturbed_metric_matches_requested_tensor():
    tn = M.taub_nut()
    s = 0.2
    p = M.perturb(tn, M.PerturbationSpec.diagonal(s, cutoff=None))
    pt = [4.0, 1.1, 0.3, 0.7]
    A0 = np.array(tn.coframe().jet_arrays([pt])[0][0])
    A1 = np.array(p.coframe().jet_arrays([pt])[0][0])
    # the frame metric of the perturbation, expressed in the unperturbed frame
    G = np.linalg.inv(A0).T @ (A1.T @ A1) @ np.linalg.inv(A0)
    x = 1 / 4.0
    assert np.allclose(G, np.diag([1, 1 + x * s, 1 + x * s, 1 + x * s]), atol=1e-13)


def test_sample_points_stay_inside_domain():
    for name, ctor in M.CATALOG.items():
        g = ctor()
        pts = g.sample_points(30)
        r0, r1 = g.domain
        assert np.all(pts[:, 0] > r0) and np.all(pts[:, 0] < r1)
