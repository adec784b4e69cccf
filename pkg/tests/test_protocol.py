import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qeewitness.dephasing as dm
from qeewitness.errors import ValidationError
from qeewitness.linalg import SX, SY, SZ
from qeewitness.nvbath import Bath, BathSpin, LatticeConfig, build_bath
from qeewitness.protocol import (
    CSV_HEADER, TimeGrid, bath_coherence, bath_qee_criterion, delta_L_analytic, echo_factor,
    echo_trace, protocol_trace, spin_factor,
)

from conftest import OMEGA, expm_prop

finite = dict(allow_nan=False, allow_infinity=False)
AMAX = 2 * np.pi * 0.5


def brute_factor(spin, prep, tau, t):
    """Tr(u0(t) u_prep(tau) rho u_prep^+(tau) u1^+(t)) with scipy expm on 2x2 matrices."""
    ax, ay, az = spin.A
    h0 = spin.larmor * SZ
    h1 = (spin.larmor + az) * SZ + ax * SX + ay * SY
    rho = np.diag([(1 + spin.polarization) / 2, (1 - spin.polarization) / 2])
    up = expm_prop(h0 if prep == 0 else h1, tau)
    return np.trace(expm_prop(h0, t) @ up @ rho @ up.conj().T @ expm_prop(h1, t).conj().T)


def random_bath(rng, n, larmor=OMEGA):
    return Bath(rng.normal(size=(n, 3)), rng.uniform(-2, 2, (n, 3)), rng.uniform(-1, 1, n), larmor)


def test_factor_at_zero_t_is_one():
    spin = BathSpin((0, 0, 1.0), (0.8, 0.3, 0.5), OMEGA, 0.7)
    for prep in (0, 1):
        assert spin_factor(spin, prep, 3.3, 0.0) == 1.0


def test_commuting_spin_closed_form():
    az, p = 0.9, 0.6
    spin = BathSpin((0, 0, 1.0), (0.0, 0.0, az), OMEGA, p)
    for tau, t in [(0.0, 1.0), (2.5, 3.7), (11.0, 0.4)]:
        l0, l1 = spin_factor(spin, 0, tau, t), spin_factor(spin, 1, tau, t)
        assert l0 == l1
        # from Tr(rho exp(+i A_zz I_z t)) with rho = (1 + p sigma_z)/2
        closed = np.cos(az * t / 2) + 1j * p * np.sin(az * t / 2)
        assert l0 == pytest.approx(closed, abs=1e-14)
        assert l0 == pytest.approx(brute_factor(spin, 0, tau, t), abs=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-3, 3, **finite), st.floats(-3, 3, **finite),
       st.floats(-3, 3, **finite), st.floats(0, 40), st.floats(0, 40), st.integers(0, 1))
def test_factor_matches_matrix_evaluation(p, ax, ay, az, tau, t, prep):
    spin = BathSpin((0, 0, 1.0), (ax, ay, az), OMEGA, p)
    assert abs(spin_factor(spin, prep, tau, t) - brute_factor(spin, prep, tau, t)) < 1e-12
    assert abs(spin_factor(spin, prep, tau, t)) <= 1 + 1e-12


def test_factor_matches_dense_protocol_coherence():
    spin = BathSpin((0, 0, 1.0), (0.8, 0.0, 0.5), OMEGA, 1.0)
    model = dm.spin_bath_model(OMEGA, [spin.A])
    rho = dm.polarized_product_state([1.0])
    for prep in (0, 1):
        for tau, t in [(1.3, 2.1), (0.0, 5.0), (17.0, 9.5)]:
            assert spin_factor(spin, prep, tau, t) == pytest.approx(
                2 * dm.protocol_coherence(model, rho, prep, tau, t), abs=1e-10)


def test_closed_form_difference_vanishing_cases():
    assert delta_L_analytic(0.0, 0.8, 0.5, OMEGA, 3.0, 2.0) == 0
    assert delta_L_analytic(1.0, 0.8, 0.5, OMEGA, 0.0, 2.0) == 0
    assert delta_L_analytic(1.0, 0.0, 0.5, OMEGA, 3.0, 2.0) == 0
    with pytest.raises(ValidationError):
        delta_L_analytic(1.0, 0.0, -OMEGA, OMEGA, 1.0, 1.0)


def test_degenerate_spin_numeric_path_returns_limit():
    spin = BathSpin((0, 0, 1.0), (0.0, 0.0, -OMEGA), OMEGA, 1.0)
    assert spin_factor(spin, 0, 2.0, 3.0) - spin_factor(spin, 1, 2.0, 3.0) == 0


@settings(max_examples=300, deadline=None)
@given(st.floats(-1, 1), st.floats(-AMAX, AMAX), st.floats(-AMAX, AMAX),
       st.floats(0, 40), st.floats(0, 40))
def test_single_spin_difference_is_imaginary_and_closed_form(p, ax, az, tau, t):
    spin = BathSpin((0, 0, 1.0), (ax, 0.0, az), OMEGA, p)
    diff = spin_factor(spin, 0, tau, t) - spin_factor(spin, 1, tau, t)
    assert abs(diff.real) < 1e-12
    if np.hypot(ax, az + OMEGA) > 1e-6:
        assert abs(diff - delta_L_analytic(p, ax, az, OMEGA, tau, t)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3, **finite), st.floats(-3, 3, **finite), st.floats(-3, 3, **finite),
       st.floats(0, 40), st.floats(0, 40))
def test_unpolarized_factor_is_real_and_prep_independent(ax, ay, az, tau, t):
    spin = BathSpin((0, 0, 1.0), (ax, ay, az), OMEGA, 0.0)
    l0, l1 = spin_factor(spin, 0, tau, t), spin_factor(spin, 1, tau, t)
    assert l0 == l1
    assert abs(l0.imag) < 1e-12


def test_unpolarized_bath_gives_no_difference(rng):
    bath = random_bath(rng, 30).with_polarization(0.0)
    tr = protocol_trace(bath, TimeGrid(0, 20, 21, 0, 20, 17))
    assert not tr.delta_norm.any()


def test_single_spin_bath_matches_closed_form():
    bath = Bath([[0, 0, 1.0]], [[0.8, 0.0, 0.5]], [0.7], OMEGA)
    tr = protocol_trace(bath, TimeGrid(0, 30, 31, 0, 30, 29))
    tau, t = np.meshgrid(tr.tau_grid, tr.t_grid, indexing="ij")
    expected = 2 * 0.5 * delta_L_analytic(0.7, 0.8, 0.5, OMEGA, tau, t)
    np.testing.assert_allclose(tr.delta_norm, expected, atol=1e-10)


def test_three_spin_bath_matches_joint_oracle(rng):
    bath = random_bath(rng, 3)
    model = dm.spin_bath_model(bath.larmor, bath.couplings)
    rho = dm.polarized_product_state(bath.polarization)
    grid = TimeGrid(0, 6, 4, 0, 6, 3)
    tr = protocol_trace(bath, grid)
    for i, tau in enumerate(tr.tau_grid):
        for j, t in enumerate(tr.t_grid):
            assert tr.rho0[i, j] == pytest.approx(dm.joint_oracle(model, rho, 0, tau, t), abs=1e-10)
            assert tr.rho1[i, j] == pytest.approx(dm.joint_oracle(model, rho, 1, tau, t), abs=1e-10)


def test_trace_invariants(rng):
    bath = random_bath(rng, 12)
    tr = protocol_trace(bath, TimeGrid(0, 25, 26, 0, 25, 31))
    assert np.all(np.abs(tr.rho0) <= 0.5 + 1e-10) and np.all(np.abs(tr.rho1) <= 0.5 + 1e-10)
    np.testing.assert_array_equal(tr.delta_norm, 2 * (tr.rho0 - tr.rho1))
    assert not tr.delta_norm[0].any()
    np.testing.assert_array_equal(tr.rho0[:, 0], 0.5)


def test_one_polarized_spin_gives_imaginary_difference(rng):
    bath = random_bath(rng, 25)
    bath.couplings[:, 1] = 0.0
    p = np.zeros(25)
    p[3] = 1.0
    tr = protocol_trace(bath.with_polarization(p), TimeGrid(0, 40, 41, 0, 40, 41))
    assert np.max(np.abs(tr.delta_norm.real)) < 1e-10
    assert np.max(np.abs(tr.delta_norm.imag)) > 1e-6


def test_diagonal_mode_equals_full_grid_diagonal(rng):
    bath = random_bath(rng, 8)
    full = protocol_trace(bath, TimeGrid(0, 10, 11, 0, 10, 11))
    diag = protocol_trace(bath, TimeGrid(0, 10, 11, diagonal=True))
    np.testing.assert_array_equal(diag.t_grid, diag.tau_grid)
    np.testing.assert_allclose(diag.rho1, np.diag(full.rho1), atol=1e-15)


def test_worker_count_does_not_change_output(rng):
    bath = random_bath(rng, 40)
    grid = TimeGrid(0, 30, 37, 0, 30, 23)
    ref = protocol_trace(bath, grid, workers=1)
    for w in (2, 3, 8, 64):
        out = protocol_trace(bath, grid, workers=w)
        assert out.to_csv() == ref.to_csv()


def test_csv_layout(rng):
    bath = random_bath(rng, 3)
    tr = protocol_trace(bath, TimeGrid(0, 2, 3, 0, 1, 2))
    lines = tr.to_csv().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 6
    rows = [list(map(float, l.split(","))) for l in lines[1:]]
    assert [r[:2] for r in rows] == [[0, 0], [0, 1], [1, 0], [1, 1], [2, 0], [2, 1]]
    r = rows[3]
    assert complex(r[2], r[3]) == tr.rho0[1, 1]
    assert complex(r[6], r[7]) == tr.delta_norm[1, 1]
    assert r[9] == abs(tr.rho1[1, 1])


def test_empty_inputs_rejected():
    empty = Bath(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0), OMEGA)
    with pytest.raises(ValidationError):
        protocol_trace(empty, TimeGrid())
    with pytest.raises(ValidationError):
        echo_trace(empty, [1.0])
    with pytest.raises(ValidationError):
        TimeGrid(tau_steps=0)


def test_echo_examples(rng):
    bath = random_bath(rng, 10)
    bath.couplings[:, :2] = 0.0
    taus = np.linspace(0, 40, 81)
    np.testing.assert_allclose(np.abs(echo_trace(bath, taus)), 0.5, atol=1e-12)
    generic = random_bath(rng, 10)
    assert echo_trace(generic, [0.0])[0] == 0.5
    spin = BathSpin((0, 0, 1.0), (0.8, 0.0, 0.5), OMEGA, 1.0)
    model = dm.spin_bath_model(OMEGA, [spin.A])
    rho = dm.polarized_product_state([1.0])
    for tau in (0.5, 1.0, 7.3):
        one = Bath.from_spins([spin])
        assert echo_trace(one, [tau])[0] == pytest.approx(dm.echo_coherence(model, rho, tau), abs=1e-10)
        assert 0.5 * echo_factor(spin, tau) == pytest.approx(dm.echo_coherence(model, rho, tau), abs=1e-10)


def test_echo_of_few_spin_bath_matches_dense(rng):
    bath = random_bath(rng, 3)
    model = dm.spin_bath_model(bath.larmor, bath.couplings)
    rho = dm.polarized_product_state(bath.polarization)
    for tau in (0.3, 2.0, 9.0):
        assert echo_trace(bath, [tau])[0] == pytest.approx(dm.echo_coherence(model, rho, tau), abs=1e-10)


def test_bath_criterion_matches_dense_relative_distance(rng):
    for n in (1, 2, 4):
        bath = random_bath(rng, n)
        model = dm.spin_bath_model(bath.larmor, bath.couplings)
        rho = dm.polarized_product_state(bath.polarization)
        for tau in (0.0, 0.7, 4.1):
            s0, s1 = dm.conditional_states(model, rho, tau)
            dense = np.linalg.norm(s0 - s1) / np.linalg.norm(s0)
            rep = bath_qee_criterion(bath, tau)
            assert rep.distance == pytest.approx(dense, abs=1e-10)
            assert rep.qee_detected == (rep.distance > rep.tolerance_used)


def test_bath_criterion_zero_cases(rng):
    bath = random_bath(rng, 20)
    assert bath_qee_criterion(bath.with_polarization(0.0), 3.0).distance == 0.0
    commuting = random_bath(rng, 20)
    commuting.couplings[:, :2] = 0.0
    assert bath_qee_criterion(commuting, 3.0).distance == 0.0
    assert bath_qee_criterion(bath, 0.0).distance == 0.0


def test_realistic_bath_runs():
    bath = build_bath(LatticeConfig(bath_radius=2.5, seed=1), r_p=0.9)
    tr = protocol_trace(bath, TimeGrid(0, 10, 21, diagonal=True))
    assert tr.metadata["n_spins"] == len(bath)
    assert np.all(np.abs(tr.rho0) <= 0.5 + 1e-10)
