from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from einstein_obs.eta import CircleOverSurface, UserEta
from einstein_obs.metrics import TopologicalData as T
from einstein_obs.obstruction import (EQUALITY, SATISFIED, VIOLATED, AndersonCC, ClosedHT, Cone, FiberedEnd,
                                      Kotschick, NakajimaALE, ObstructionInput, ObstructionInputError,
                                      blowup, check, connected_sum, flip_orientation, min_obstructed_blowups)

CP2 = T(3, 1)
T4 = T(0, 0)
S1S3 = T(0, 0)


def closed(topo):
    return check(ObstructionInput(topo, ClosedHT()))


@pytest.mark.parametrize("k, status", [(0, SATISFIED), (8, SATISFIED), (9, EQUALITY), (10, VIOLATED)])
def test_cp2_blowups(k, status):
    v = closed(blowup(CP2, k))
    assert v.status == status and v.exact


def test_classical_examples():
    assert closed(connected_sum(T4, T4)).status == VIOLATED
    assert closed(S1S3).status == EQUALITY
    k3 = T(24, -16)
    v = closed(k3)
    assert v.status == EQUALITY and "K3" in v.rigidity_note


def test_kotschick():
    v = check(ObstructionInput(T(0, 0), Kotschick(0)))
    assert v.status == EQUALITY
    v = check(ObstructionInput(T(4, 0), Kotschick(1.0)))
    assert v.status == SATISFIED and not v.exact
    with pytest.raises(ObstructionInputError):
        check(ObstructionInput(T(4, 0), Kotschick(None)))


def test_taub_nut_fibered_end():
    v = check(ObstructionInput(T(1, 0), FiberedEnd(CircleOverSurface(1))))
    assert v.status == EQUALITY and v.lhs == 1 and v.rhs == 1
    assert v.alternate is None  # |0 - h| = |0 + h|: the conventions coincide at tau = 0
    t = check(ObstructionInput(T(1, 0), FiberedEnd(CircleOverSurface(1))), "theorem")
    assert t.status == EQUALITY


def test_blowup_scans():
    assert min_obstructed_blowups(T(1, 0), CircleOverSurface(1)) == 5
    assert min_obstructed_blowups(T(1, 0), CircleOverSurface(1), "theorem") == 1
    assert min_obstructed_blowups(T(2, 0), CircleOverSurface(0)) == 5
    for k in range(5):
        v = check(ObstructionInput(blowup(T(1, 0), k), FiberedEnd(CircleOverSurface(1))))
        assert v.status != VIOLATED


def test_cone_modes():
    flat = check(ObstructionInput(T(1, 0), Cone(volume_over_2pi2=Fraction(1), eta=0, alpha=0)))
    assert flat.status == EQUALITY and flat.exact
    vol = check(ObstructionInput(T(1, 0), Cone(volume=19.739208802178716, eta=0, alpha=0)))
    assert vol.status == EQUALITY and not vol.exact
    eh = check(ObstructionInput(T(2, -1), NakajimaALE(2, 0)))
    assert eh.status == EQUALITY
    assert check(ObstructionInput(T(1, -3), NakajimaALE(2, 0))).status == VIOLATED
    with pytest.raises(ObstructionInputError):
        check(ObstructionInput(T(1, 0), NakajimaALE(0, 0)))
    with pytest.raises(ObstructionInputError):
        check(ObstructionInput(T(1, 0), Cone(eta=0, alpha=0)))


def test_anderson():
    v = check(ObstructionInput(T(1, 0), AndersonCC(0, 0)))
    assert v.status == SATISFIED
    v = check(ObstructionInput(T(1, 0), AndersonCC(4 * 3.141592653589793 ** 2 / 3, 0)))
    assert v.status == EQUALITY


def test_user_eta_uses_index_sign():
    v = check(ObstructionInput(T(1, 0), FiberedEnd(UserEta(Fraction(-2, 3)))))
    assert v.rhs == 1 and v.convention == "user"


def test_verdict_serialization():
    v = check(ObstructionInput(T(5, -4), FiberedEnd(CircleOverSurface(1))))
    d = json.loads(v.to_json())
    assert d["status"] == EQUALITY and d["conventions_diverge"] is True
    assert d["alternate"]["status"] == VIOLATED and d["lhs"] == "5"


def test_bad_inputs():
    with pytest.raises(ObstructionInputError):
        check(ObstructionInput(T(1, 0), FiberedEnd(CircleOverSurface(1))), "mystery")
    with pytest.raises(ObstructionInputError):
        check(ObstructionInput(None, ClosedHT()))
    with pytest.raises(ObstructionInputError):
        check(ObstructionInput(T(1, 0), Kotschick(float("nan"))))
    with pytest.raises(ValueError):
        blowup(T(1, 0), -1)


def test_orientation_flip_exhaustive():
    for conv in ("corollary", "theorem"):
        for tau in range(-20, 21):
            for e in range(-20, 21):
                inp = ObstructionInput(T(abs(tau) + 3, tau), FiberedEnd(CircleOverSurface(e)))
                a, b = check(inp, conv), check(flip_orientation(inp), conv)
                assert (a.status, a.lhs, a.rhs) == (b.status, b.lhs, b.rhs)


@given(st.integers(0, 200), st.integers(-100, 100), st.integers(-50, 50))
def test_flip_is_involution_and_exact(chi, tau, e):
    inp = ObstructionInput(T(chi, tau), FiberedEnd(CircleOverSurface(e)))
    assert flip_orientation(flip_orientation(inp)) == inp
    v = check(inp)
    assert v.exact and isinstance(v.rhs, Fraction)
    assert (v.status == VIOLATED) == (v.lhs < v.rhs)
