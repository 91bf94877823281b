import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nlspectra.classical import cue_state, integrate
from nlspectra.model import DeltaWell, Nonlinearity, RectWell, ZeroPotential
from nlspectra.spectral import (CueUndefined, DomainError, NoSolution, ShootingConfig, SpectralError,
                                branch_map, cue_tail_norm, cue_tail_quadrature, delta_well_E, delta_well_norm,
                                delta_well_norm1, find_eigenvalues, isonorm_eigenvalues, pseudonorm, residual, shoot,
                                turning_amplitude, zakharov_cue_norm)

from oracles import square_well_levels, tail_integral

WELL = RectWell(-10.0, 1.6)
LIN = Nonlinearity.linear()
FAST = ShootingConfig(n_scan=401)


@pytest.fixture(scope="module")
def linear_levels():
    return square_well_levels(-10.0, 1.6)


def test_linear_spectrum_matches_oracle(linear_levels):
    pts = find_eigenvalues(0.1, LIN, WELL, E_range=(-10.0, -0.01), n_max=10)
    assert [p.n for p in pts] == list(range(len(linear_levels)))
    assert np.max(np.abs(np.array([p.E for p in pts]) - linear_levels)) < 1e-6


def test_linear_eigenvalues_do_not_depend_on_q_a(linear_levels):
    bm = branch_map([0.05, 0.4], LIN, WELL, E_range=(-10.0, -0.01), n_max=1, cfg=FAST)
    for row in bm.points:
        assert [p.E for p in row] == pytest.approx(linear_levels[:2], abs=1e-6)
    assert bm.branches() == [0, 1]


def test_residual_examples(linear_levels):
    r, n = residual(linear_levels[0], 0.1, LIN, WELL)
    assert abs(r) < 1e-5 and n == 0
    r, n = residual(-3.0, 0.1, LIN, WELL)
    assert r == pytest.approx(0.52574, abs=1e-4) and n == 4
    with pytest.raises(CueUndefined):
        residual(1.0, 0.1, Nonlinearity.zakharov(-1.0), WELL)


def test_delta_well_needs_closed_forms():
    with pytest.raises(SpectralError):
        find_eigenvalues(0.1, LIN, DeltaWell(1.0))
    with pytest.raises(SpectralError):
        find_eigenvalues(0.1, LIN, ZeroPotential())


def test_pseudonorm_equals_true_norm_of_a_bound_state(linear_levels):
    # even ground state: A cos(k x) inside, q_a exp(-kappa (|x| - b)) outside
    E, b = linear_levels[0], 1.6
    k, kappa = math.sqrt(2 * (E + 10.0)), math.sqrt(-2 * E)
    A = 1.0
    q_a = A * math.cos(k * b)
    exact = A * A * (b + math.sin(2 * k * b) / (2 * k)) + q_a * q_a / kappa
    tr = integrate(cue_state(q_a, E, LIN, -b), E, LIN, WELL, b, 1e-4)
    N, valid = pseudonorm(tr, E, LIN, -b, b)
    assert valid and N == pytest.approx(exact, rel=1e-7)


def test_short_and_long_cue_norm_examples():
    assert zakharov_cue_norm(-0.5, 0.5, -1.0) == pytest.approx(0.1339745962155614, abs=1e-14)
    assert zakharov_cue_norm(-0.5, 0.5, -1.0, long=True) == pytest.approx(1.8660254037844386, abs=1e-14)
    assert zakharov_cue_norm(-1.0, 1.0, 1.0) == pytest.approx(0.3178372451957822, abs=1e-14)
    # a long tail from q = 0 is the whole soliton: 2 sqrt(2|E|)/|eps|
    assert zakharov_cue_norm(-0.5, 0.0, -1.0, long=True) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        zakharov_cue_norm(-0.5, 0.5, 1.0, long=True)
    with pytest.raises(DomainError):
        zakharov_cue_norm(-0.5, 2.0, -1.0)
    with pytest.raises(DomainError):
        zakharov_cue_norm(0.5, 0.1, 1.0)


@given(st.floats(-5, -0.05), st.floats(0.01, 2.0), st.floats(-3, 3))
@settings(max_examples=80, deadline=None)
def test_cue_norm_matches_quadrature(E, q, eps):
    assume(-E + eps * q * q / 2 > 1e-3)
    ref = tail_integral(q * q, E, lambda z: eps * z / 2)
    assert zakharov_cue_norm(E, q, eps) == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_cue_norm_is_continuous_through_eps_zero():
    vals = [zakharov_cue_norm(-1.0, 0.7, e) for e in (-1e-9, 0.0, 1e-9)]
    assert max(vals) - min(vals) < 1e-9


def test_long_quadrature_matches_closed_form():
    nl = Nonlinearity.zakharov(-1.0)
    assert cue_tail_quadrature(0.5, -0.5, nl, long=True) == pytest.approx(
        zakharov_cue_norm(-0.5, 0.5, -1.0, long=True), rel=1e-9)


def test_log_tail_is_finite_and_flags_bad_starts():
    lg = Nonlinearity.logarithmic(-1.0)
    val, ok = cue_tail_norm(0.5, -1.0, lg)
    assert ok and math.isfinite(float(val))
    # repulsive log: radicand -> -inf at small q, no cue
    val, ok = cue_tail_norm(0.5, -1.0, Nonlinearity.logarithmic(1.0))
    assert not ok


def test_turning_amplitude():
    assert turning_amplitude(-0.5, Nonlinearity.zakharov(-1.0)) == pytest.approx(1.0, rel=1e-10)
    assert turning_amplitude(-0.5, Nonlinearity.zakharov(1.0)) is None
    # gausson: -E + eps log(q^2) - eps = 0  ->  q = exp((E + eps) / (2 eps))
    assert turning_amplitude(-1.0, Nonlinearity.logarithmic(-1.0)) == pytest.approx(math.e, rel=1e-9)


def test_delta_well_examples():
    assert delta_well_norm1(1.0, 1.0) == -0.125
    assert delta_well_norm1(2.0, 1.0) == -1.125
    assert delta_well_norm1(1.0, -1.0) == -1.125
    assert delta_well_norm1(1.0, 2.0) == 0.0
    with pytest.raises(NoSolution):
        delta_well_norm1(1.0, 2.5)
    with pytest.raises(NoSolution):
        delta_well_norm1(-1.0, -3.0)
    assert delta_well_E(1.0, 1.0, math.sqrt(0.75)) == pytest.approx(-0.125)
    with pytest.raises(DomainError):
        delta_well_E(1.0, 1.0, 0.0)


@given(st.floats(0.1, 3.0), st.floats(-3.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_delta_well_norm1_has_unit_norm(Omega, t):
    eps = t * 2 * Omega * 0.999
    assume(abs(eps) > 1e-3)
    E = delta_well_norm1(Omega, eps)
    assume(E < -1e-6)
    assert delta_well_norm(Omega, eps, E) == pytest.approx(1.0, abs=1e-10)


@given(st.floats(0.1, 3.0), st.floats(4.05, 10.0))
@settings(max_examples=50, deadline=None)
def test_barrier_norm1_uses_long_cues(strength, ratio):
    # a repulsive delta (Omega < 0) holds only an attractive packet, on long cues
    Omega = -strength
    eps = -ratio * strength
    E = delta_well_norm1(Omega, eps)
    assert delta_well_norm(Omega, eps, E, long=True) == pytest.approx(1.0, abs=1e-10)


def test_ground_branch_moves_with_coupling_sign(linear_levels):
    qs = [0.05, 0.15]  # the attractive branch folds back before q_a = 0.3
    E0 = linear_levels[0]
    for eps, sign in ((0.5, 1), (-0.5, -1)):
        bm = branch_map(qs, Nonlinearity.zakharov(eps), WELL, E_range=(-16.0, -0.5), n_max=0, cfg=FAST)
        # below the fold the attractive branch has a second, deeper root; keep the upper one
        es = [max(p.E for p in row if p.n == 0) for row in bm.points]
        assert all(sign * (e - E0) > 0 for e in es)
        # the shift grows with the amplitude
        assert sign * (es[1] - es[0]) > 0


def test_isonorm_on_linear_model_is_the_level(linear_levels):
    # linear: any q_a is an eigenstate; the norm grows as q_a^2
    pts = isonorm_eigenvalues(1.0, LIN, WELL, [0.05, 0.5, 1.0], E_range=(-10.0, -5.0), n_max=0, cfg=FAST)
    assert len(pts) == 1
    assert pts[0].E == pytest.approx(linear_levels[0], abs=1e-6)
    assert pts[0].pseudonorm == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(SpectralError):
        isonorm_eigenvalues(0.0, LIN, WELL, [0.1])


def test_isonorm_missing_branch_is_skipped():
    # N = 1000 is far beyond the grid
    assert isonorm_eigenvalues(1000.0, LIN, WELL, [0.05, 0.1], E_range=(-10.0, -5.0), n_max=0, cfg=FAST) == []


def test_escaping_lanes_still_bracket_the_root():
    # just below this eigenvalue the repulsive orbit escapes to infinity inside the well
    nl = Nonlinearity.zakharov(2.0)
    E = np.linspace(-8.5, -8.2, 12)
    s = shoot(E, 0.26, nl, WELL)
    assert np.isposinf(s.r[0]) and np.all(np.isfinite(s.r[-3:]))
    pts = find_eigenvalues(0.26, nl, WELL, E_range=(-12.0, -0.5), n_max=0, cfg=FAST)
    assert len(pts) == 1 and pts[0].E == pytest.approx(-8.351, abs=2e-3)
