import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given, settings
from hypothesis import strategies as st

from nlspectra.model import (DIVERGENT, Bump, BumpSum, DeltaNotSamplable, DeltaWell, ModelError, Nonlinearity,
                             RectWell, ZeroPotential, bumps, eval_F_over_zeta, eval_potential,
                             nonlinearity_from_json, potential_from_json, regularized_delta)

BUILTIN = [Nonlinearity.linear(), Nonlinearity.zakharov(1.0), Nonlinearity.zakharov(-1.0),
           Nonlinearity.logarithmic(-1.0)]


@pytest.mark.parametrize("nl", BUILTIN, ids=lambda n: f"{n.kind.value}{n.epsilon:+g}")
def test_F_is_antiderivative_of_f(nl):
    z = np.geomspace(1e-6, 1e3, 400)
    h = 1e-6 * z
    dF = (nl.F(z + h) - nl.F(z - h)) / (2 * h)
    f = nl.f(z)
    scale = np.maximum(1.0, np.abs(f))
    assert np.max(np.abs(dF - f) / scale) < 1e-6
    assert nl.F(0.0) == 0.0


def test_closed_forms_of_f_and_F():
    z = np.array([0.5, 2.0, 7.0])
    zk = Nonlinearity.zakharov(-1.0)
    assert np.allclose(zk.f(z), z) and np.allclose(zk.F(z), z * z / 2)
    lg = Nonlinearity.logarithmic(-1.0)
    assert np.allclose(lg.f(z), np.log(z)) and np.allclose(lg.F(z), z * np.log(z) - z)
    assert np.all(Nonlinearity.linear().f(z) == 0)


def test_log_f_times_vanishes_at_zero():
    lg = Nonlinearity.logarithmic(-1.0)
    out = lg.f_times(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
    assert out[0] == 0.0 and out[1] == 0.0


def test_F_over_zeta_examples():
    assert eval_F_over_zeta(Nonlinearity.zakharov(1.0), 4.0) == 2.0
    assert eval_F_over_zeta(Nonlinearity.zakharov(1.0), 0.0) == 0.0
    assert eval_F_over_zeta(Nonlinearity.logarithmic(1.0), 1.0) == pytest.approx(-1.0)
    assert eval_F_over_zeta(Nonlinearity.logarithmic(1.0), 0.0) is DIVERGENT
    with pytest.raises(ModelError):
        eval_F_over_zeta(Nonlinearity.zakharov(1.0), -1.0)


def test_custom_needs_both_functions():
    with pytest.raises(ModelError):
        Nonlinearity("custom", 1.0, f_custom=np.sin)
    cu = Nonlinearity.custom(2.0, lambda z: z**2, lambda z: z**3 / 3)
    assert cu.F(3.0) == pytest.approx(9.0)
    assert cu.F_over_zeta(0.0) == 0.0


def test_potential_examples():
    assert eval_potential(Bump(-0.75, 2.0, 0.5), 2.0) == -0.75
    assert eval_potential(Bump(2.0, 0.001, 0.5), 0.6) == 0.0
    assert eval_potential(RectWell(-10.0, 1.6), 1.0) == -10.0
    assert eval_potential(RectWell(-10.0, 1.6), 1.7) == 0.0
    with pytest.raises(DeltaNotSamplable):
        eval_potential(DeltaWell(1.0), 0.0)


def test_invalid_potentials():
    with pytest.raises(ModelError):
        RectWell(1.0, 1.0)
    with pytest.raises(ModelError):
        RectWell(-1.0, 0.0)
    with pytest.raises(ModelError):
        Bump(1.0, 0.0, 0.0)
    with pytest.raises(ModelError):
        BumpSum(())


def test_outside_support_is_exactly_zero():
    V = bumps((1.0, -2.0, 0.5), (-3.0, 1.0, 0.25))
    lo, hi = V.support
    assert (lo, hi) == (-2.5, 1.25)
    x = np.concatenate([np.linspace(lo - 5, lo, 50), np.linspace(hi, hi + 5, 50)])
    assert np.all(V(x) == 0.0)


@given(st.floats(-5, 5), st.floats(-3, 3), st.floats(0.05, 2.0))
@settings(max_examples=60, deadline=None)
def test_bump_is_C1_at_edges(V0, xv, sigma):
    b = Bump(V0, xv, sigma)
    h = 1e-7 * sigma
    for edge in b.support:
        left, mid, right = b(edge - h), b(edge), b(edge + h)
        assert abs(left - mid) < 1e-9 * max(1, abs(V0)) and abs(right - mid) < 1e-9 * max(1, abs(V0))
        # one-sided slopes agree (both vanish)
        assert abs((mid - left) / h - (right - mid) / h) < 1e-5 * max(1, abs(V0)) / sigma


def test_sum_is_continuous_on_fine_grid():
    V = bumps((1.0, -2.0, 0.5), (-0.5, -1.6, 0.5), (2.0, 2.0, 1.0))
    x = np.linspace(-4, 4, 400001)
    assert np.max(np.abs(np.diff(V(x)))) < 1e-3


def test_regularized_delta_integral():
    b = regularized_delta(1.3, 0.01)
    x = np.linspace(-0.01, 0.01, 20001)
    assert trapezoid(b(x), x) == pytest.approx(-1.3, rel=1e-7)
    assert b.integral == pytest.approx(-1.3)


@pytest.mark.parametrize("V", [ZeroPotential(), RectWell(-10.0, 1.6), DeltaWell(1.0), Bump(-0.75, 2.0, 0.5),
                               bumps((-0.5, -2.0, 0.5), (-0.5, 2.0, 0.5))])
def test_potential_json_round_trip(V):
    text = json.dumps(V.to_json())
    assert potential_from_json(json.loads(text)) == V


@pytest.mark.parametrize("nl", BUILTIN, ids=lambda n: f"{n.kind.value}{n.epsilon:+g}")
def test_nonlinearity_json_round_trip(nl):
    assert nonlinearity_from_json(json.loads(json.dumps(nl.to_json()))) == nl


def test_bad_json():
    with pytest.raises(ModelError):
        potential_from_json({"kind": "spline"})
    with pytest.raises(ModelError):
        potential_from_json({"kind": "bump", "V0": 1})
    with pytest.raises(ModelError):
        nonlinearity_from_json({"kind": "quartic"})


def test_models_are_immutable():
    nl = Nonlinearity.zakharov(1.0)
    with pytest.raises(Exception):
        nl.epsilon = 2.0
    assert math.isclose(Bump(1.0, 0.0, 0.5).integral, 16 * 0.5 / 15)
