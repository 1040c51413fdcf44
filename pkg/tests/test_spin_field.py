import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from filament_lab.errors import DegenerateInputError, InvalidInputError, ProjectionError
from filament_lab.spin_field import (
    SpinField,
    derivative,
    make_scenario_field,
    project_to_constraints,
    random_admissible_field,
    residual_unit_norm,
    residual_zero_mean,
    spin_energy,
)


def _grid(N):
    return 2 * np.pi * np.arange(N) / N


def test_circle_samples():
    f = make_scenario_field("circle", 8)
    np.testing.assert_allclose(f.samples[0], [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(f.samples[2], [0, 1, 0], atol=1e-15)


def test_great_circle_mode_two():
    f = make_scenario_field("great_circle_m", 8, m=2)
    np.testing.assert_allclose(f.samples[1], [0, 1, 0], atol=1e-15)


def test_kelvin_is_admissible(kelvin256):
    assert np.max(np.abs(residual_zero_mean(kelvin256))) <= 1e-10
    assert residual_unit_norm(kelvin256) <= 1e-12


def test_kelvin_eps_zero_is_circle():
    a = make_scenario_field("kelvin_perturbed", 32, m=3, eps=0.0)
    b = make_scenario_field("circle", 32)
    np.testing.assert_allclose(a.samples, b.samples, atol=1e-15)


@pytest.mark.parametrize("N", [7, 6, 0])
def test_bad_grid(N):
    with pytest.raises(InvalidInputError, match="even"):
        SpinField(np.ones((N, 3)))


def test_rejects_nonfinite():
    arr = np.ones((8, 3))
    arr[3, 1] = np.nan
    with pytest.raises(InvalidInputError):
        SpinField(arr)


def test_read_only():
    f = make_scenario_field("circle", 8)
    with pytest.raises(ValueError):
        f.samples[0, 0] = 2.0


def test_unknown_scenario():
    with pytest.raises(InvalidInputError):
        make_scenario_field("trefoil", 16)


# -- derivatives -------------------------------------------------------------

def test_circle_first_derivative():
    f = make_scenario_field("circle", 64)
    xi = _grid(64)
    expected = np.column_stack([-np.sin(xi), np.cos(xi), 0 * xi])
    np.testing.assert_allclose(derivative(f, 1), expected, atol=1e-13, rtol=0)


def test_constant_second_derivative():
    f = make_scenario_field("tilted_constant", 32)
    np.testing.assert_array_equal(derivative(f, 2), 0.0)


def test_mode_two_second_derivative():
    f = make_scenario_field("great_circle_m", 64, m=2)
    np.testing.assert_allclose(derivative(f, 2), -4 * f.samples, atol=1e-12, rtol=0)


def test_second_is_first_squared(admissible64):
    d1 = derivative(admissible64, 1)
    d11 = derivative(SpinField(d1), 1)
    np.testing.assert_allclose(d11, derivative(admissible64, 2), atol=1e-11)


def test_fd4_agrees_with_spectral(kelvin256):
    for order in (1, 2):
        err = np.max(np.abs(derivative(kelvin256, order, "fd4") - derivative(kelvin256, order)))
        assert err < 1e-4


def test_derivative_rejects_order():
    with pytest.raises(InvalidInputError):
        derivative(make_scenario_field("circle", 8), 3)


# -- residuals -------------------------------------------------------------------

def test_unit_norm_residuals():
    c = make_scenario_field("circle", 32)
    # cos^2 + sin^2 rounds, so "exactly zero" means a few ulp
    assert residual_unit_norm(c) <= 4 * np.finfo(float).eps
    assert residual_unit_norm(make_scenario_field("tilted_constant", 16)) == 0.0
    assert residual_unit_norm(SpinField(1.1 * c.samples)) == pytest.approx(0.21, abs=1e-14)


def test_zero_mean_examples():
    N = 32
    assert np.max(np.abs(residual_zero_mean(make_scenario_field("circle", N)))) <= 1e-14
    np.testing.assert_allclose(residual_zero_mean(make_scenario_field("tilted_constant", N)), [0, 0, 2 * np.pi], atol=1e-14)
    xi = _grid(N)
    lifted = SpinField(np.column_stack([np.cos(xi), np.sin(xi), np.full(N, 0.3)]))
    # direct summation oracle
    oracle = (2 * np.pi / N) * np.array([sum(lifted.samples[i, k] for i in range(N)) for k in range(3)])
    np.testing.assert_allclose(residual_zero_mean(lifted), oracle, atol=1e-14)
    np.testing.assert_allclose(oracle, [0, 0, 0.6 * np.pi], atol=1e-13)


# -- projection ------------------------------------------------------------------

def test_projection_leaves_circle_alone():
    c = make_scenario_field("circle", 32)
    assert project_to_constraints(c) is c


def test_projection_lifted_circle():
    xi = _grid(64)
    raw = SpinField(np.column_stack([np.cos(xi), np.sin(xi), np.full(64, 0.1)]))
    out = project_to_constraints(raw, max_iter=50)
    assert residual_unit_norm(out) <= 1e-12
    assert np.max(np.abs(residual_zero_mean(out))) <= 1e-12


def test_projection_constant_is_degenerate():
    with pytest.raises(ProjectionError):
        project_to_constraints(make_scenario_field("tilted_constant", 16))
    with pytest.raises(DegenerateInputError):
        project_to_constraints(make_scenario_field("tilted_constant", 16))


def test_projection_nonconvergence_reports_residuals():
    rng = np.random.default_rng(3)
    raw = SpinField(rng.normal(size=(16, 3)) + np.array([0.4, 0, 0]))
    try:
        project_to_constraints(raw, max_iter=1)
    except ProjectionError as exc:
        assert exc.unit_norm_residual >= 0 and exc.mean_residual >= 0
    else:
        pytest.fail("one iteration should not suffice")


def test_projection_idempotent(admissible64):
    again = project_to_constraints(admissible64)
    np.testing.assert_array_equal(again.samples, admissible64.samples)


# -- energy -----------------------------------------------------------------------

def test_spin_energy_examples():
    assert spin_energy(make_scenario_field("circle", 64)) == pytest.approx(1.0, abs=1e-13)
    assert spin_energy(make_scenario_field("tilted_constant", 16)) == 0.0
    assert spin_energy(make_scenario_field("great_circle_m", 64, m=2)) == pytest.approx(4.0, abs=1e-12)


def test_spin_energy_quadrature_oracle(admissible64):
    # brute-force: evaluate the trigonometric interpolant's derivative on a fine grid
    N = 64
    coeff = np.fft.rfft(admissible64.samples, axis=0)
    coeff[N // 2] = 0
    fine = 4 * N
    k = np.arange(N // 2 + 1)
    padded = np.zeros((fine // 2 + 1, 3), dtype=complex)
    padded[: N // 2 + 1] = 1j * k[:, None] * coeff
    d = np.fft.irfft(padded, n=fine, axis=0) * (fine / N)
    oracle = np.sum(d * d) * (2 * np.pi / fine) / (2 * np.pi)
    assert spin_energy(admissible64) == pytest.approx(oracle, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([16, 32, 64]))
def test_random_admissible_on_surface(seed, n):
    f = random_admissible_field(n, np.random.default_rng(seed))
    assert f.on_constraint_surface()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_spin_energy_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    f = random_admissible_field(32, rng)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert spin_energy(f.rotated(q)) == pytest.approx(spin_energy(f), rel=1e-12)
