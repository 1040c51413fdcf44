from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from filament_lab.brackets import (
    LEVI_CIVITA,
    DiscreteFunctional,
    bracket_functional,
    bracket_velocity,
    check_first_class,
    check_hamiltonian_flow,
    constant_functional,
    coordinate_functional,
    f_component_functional,
    functional_gradient_fd,
    gradient_of,
    hamiltonian_spin_functional,
    phi0_functional,
    phi_functional,
    poisson_bracket,
    spin_energy_functional,
    unit_norm_functional,
)
from filament_lab.constants import ModelConstants
from filament_lab.dynamics import rhs_spin
from filament_lab.errors import InapplicableOracleError, InvalidInputError
from filament_lab.invariants import vector_f
from filament_lab.spin_field import SpinField, derivative, make_scenario_field, random_admissible_field, random_field, residual_zero_mean


def _cone(N, a, b):
    xi = 2 * np.pi * np.arange(N) / N
    return SpinField(np.column_stack([a * np.cos(xi), a * np.sin(xi), np.full(N, b)]))


# -- gradients -----------------------------------------------------------------------

def test_phi_gradient_exact():
    f = random_field(16, np.random.default_rng(0))
    g = phi_functional(2).gradient(f)
    np.testing.assert_array_equal(g, np.tile([0, 0, f.h], (16, 1)))


def test_spin_energy_gradient_formula(kelvin64):
    g = spin_energy_functional().gradient(kelvin64)
    expected = -(kelvin64.h / np.pi) * derivative(kelvin64, 2)
    np.testing.assert_allclose(g, expected, rtol=1e-6, atol=1e-6 * np.abs(expected).max())


def test_spin_energy_gradient_fd():
    f = random_field(16, np.random.default_rng(1))
    F = spin_energy_functional()
    fd = functional_gradient_fd(F, f)
    np.testing.assert_allclose(F.gradient(f), fd, atol=1e-8)


def test_constant_gradient():
    f = random_field(8, np.random.default_rng(2))
    np.testing.assert_array_equal(gradient_of(constant_functional(3.0), f), 0.0)
    np.testing.assert_allclose(functional_gradient_fd(constant_functional(3.0), f), 0.0)


def test_fd_step_must_be_positive():
    with pytest.raises(InvalidInputError):
        functional_gradient_fd(constant_functional(1.0), make_scenario_field("circle", 8), step=0.0)


# -- bracket examples ------------------------------------------------------------------

def test_phi_phi_closure():
    c = ModelConstants()
    for N in (8, 16, 64):
        f = random_field(N, np.random.default_rng(N))
        got = poisson_bracket(phi_functional(0), phi_functional(1), f, c)
        assert got == pytest.approx(c.beta * residual_zero_mean(f)[2], abs=1e-14)


def test_self_bracket_zero():
    f = random_field(16, np.random.default_rng(3))
    for F in (phi_functional(0), spin_energy_functional(), coordinate_functional(1, 4)):
        assert poisson_bracket(F, F, f, ModelConstants()) == 0.0


def test_coordinate_bracket_n4():
    # the delta_il / h rule on four samples of (0, 0, 1): h = pi/2
    holder = SimpleNamespace(N=4, h=np.pi / 2, samples=np.tile([0.0, 0.0, 1.0], (4, 1)))
    got = poisson_bracket(coordinate_functional(0, 0), coordinate_functional(1, 0), holder, ModelConstants(), beta=-2.0)
    assert got == pytest.approx(-4 / np.pi, rel=1e-15)


def test_coordinate_bracket_n8():
    f = make_scenario_field("tilted_constant", 8)
    got = poisson_bracket(coordinate_functional(0, 0), coordinate_functional(1, 0), f, ModelConstants(), beta=-2.0)
    assert got == pytest.approx(-8 / np.pi, rel=1e-15)
    other = poisson_bracket(coordinate_functional(0, 0), coordinate_functional(1, 3), f, ModelConstants(), beta=-2.0)
    assert other == 0.0


# -- algebraic properties --------------------------------------------------------------------

_FUNCS = [phi_functional(0), phi_functional(2), spin_energy_functional(), coordinate_functional(1, 3), unit_norm_functional(5)]


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), i=st.integers(0, 4), k=st.integers(0, 4))
def test_antisymmetry(seed, i, k):
    f = random_field(16, np.random.default_rng(seed))
    c = ModelConstants()
    assert poisson_bracket(_FUNCS[i], _FUNCS[k], f, c) == pytest.approx(-poisson_bracket(_FUNCS[k], _FUNCS[i], f, c), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_leibniz(seed):
    f = random_field(16, np.random.default_rng(seed))
    c = ModelConstants()
    A, B, C = phi_functional(0), coordinate_functional(2, 1), spin_energy_functional()
    lhs = poisson_bracket(A * B, C, f, c)
    rhs = A(f) * poisson_bracket(B, C, f, c) + B(f) * poisson_bracket(A, C, f, c)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_jacobi_on_coordinates(seed):
    f = random_field(8, np.random.default_rng(seed))
    c = ModelConstants()
    A, B, C = coordinate_functional(0, 2), coordinate_functional(1, 2), coordinate_functional(2, 2)
    total = (
        poisson_bracket(A, bracket_functional(B, C, c), f, c)
        + poisson_bracket(B, bracket_functional(C, A, c), f, c)
        + poisson_bracket(C, bracket_functional(A, B, c), f, c)
    )
    assert abs(total) <= 1e-6


def test_unit_norm_is_casimir():
    f = random_field(16, np.random.default_rng(9))
    c = ModelConstants()
    for G in _FUNCS:
        for i in (0, 7):
            assert abs(poisson_bracket(unit_norm_functional(i), G, f, c)) <= 1e-13


def test_coordinate_velocity():
    f = random_field(16, np.random.default_rng(4))
    c = ModelConstants()
    v = bracket_velocity(phi_functional(1), f, c)
    for i in (0, 5):
        for b in range(3):
            assert v[i, b] == pytest.approx(poisson_bracket(phi_functional(1), coordinate_functional(b, i), f, c), abs=1e-14)


# -- constraint algebra ------------------------------------------------------------------------

def test_su2_on_random_fields():
    c = ModelConstants(R0=1.5, m0=0.7, t0=2.0)
    rng = np.random.default_rng(10)
    for _ in range(10):
        f = random_field(32, rng)
        phi = residual_zero_mean(f)
        for a in range(3):
            for b in range(3):
                got = poisson_bracket(phi_functional(a), phi_functional(b), f, c)
                assert got == pytest.approx(c.beta * LEVI_CIVITA[a, b] @ phi, abs=1e-13 * abs(c.beta) * max(1, np.abs(phi).max()))


def test_first_class_admissible(admissible64):
    f = vector_f(admissible64)
    rep = check_first_class(admissible64, 2 * f, ModelConstants())
    assert rep.passed, rep.to_json()
    assert rep.identity_residuals["su2"].value <= 1e-12


def test_first_class_fd_gradient_agrees_with_chain(admissible64):
    p = 2 * vector_f(admissible64)
    chain = phi0_functional(p).gradient(admissible64)
    raw = functional_gradient_fd(phi0_functional(p, gradient="fd"), admissible64, step=1e-5)
    np.testing.assert_allclose(chain, raw, atol=1e-7 * max(1.0, np.abs(chain).max()))


def test_phi0_gradient_mode_validated():
    with pytest.raises(InvalidInputError):
        phi0_functional([0, 0, 1], gradient="adjoint")


def test_first_class_oblique_control(admissible64):
    f = vector_f(admissible64)
    axis = np.cross(f, [1.0, 0.3, -0.2])
    axis /= np.linalg.norm(axis)
    p = 2.0 * (0.5 * f + (np.sqrt(3) / 2) * np.linalg.norm(f) * axis)
    entry = check_first_class(admissible64, p, ModelConstants()).identity_residuals["Phi_a,Phi0"]
    assert entry.value >= 1e-4 * entry.tolerance / 1e-8


def test_first_class_perpendicular_vanishes(admissible64):
    # {Phi_a, Phi0} is proportional to p.f, so p orthogonal to f is not a working control
    f = vector_f(admissible64)
    p = np.cross(f, [0.2, 1.0, 0.0])
    entry = check_first_class(admissible64, p, ModelConstants()).identity_residuals["Phi_a,Phi0"]
    assert entry.passed


def test_first_class_circle_p_zero():
    rep = check_first_class(make_scenario_field("circle", 64), np.zeros(3), ModelConstants(), tol=1e-10)
    assert rep.passed, rep.to_json()


def test_f_component_functional_fd_only(admissible64):
    F = f_component_functional(2)
    assert not F.has_analytic_gradient
    assert F(admissible64) == pytest.approx(vector_f(admissible64)[2])


# -- flow ---------------------------------------------------------------------------------------

def test_flow_kappa(kelvin256):
    for c in (ModelConstants(), ModelConstants(R0=2.0, m0=3.0, t0=0.5)):
        rep = check_hamiltonian_flow(kelvin256, c)
        assert rep.fit_residual <= 1e-6
        assert rep.kappa == pytest.approx(2 / np.pi, abs=1e-6)
        over = check_hamiltonian_flow(kelvin256, c, beta=-np.pi / (c.E0 * c.t0))
        assert over.kappa == pytest.approx(1.0, abs=1e-6)


def test_flow_fd_gradient(kelvin64):
    rep = check_hamiltonian_flow(kelvin64, ModelConstants(), gradient="fd")
    assert rep.kappa == pytest.approx(2 / np.pi, abs=1e-6)
    assert rep.fit_residual <= 1e-6


def test_flow_off_surface_cone():
    cone = _cone(64, 1 / np.sqrt(2), 1 / np.sqrt(2))
    with pytest.raises(InapplicableOracleError):
        check_hamiltonian_flow(cone, ModelConstants())
    rep = check_hamiltonian_flow(cone, ModelConstants(), require_on_surface=False)
    assert rep.fit_residual <= 1e-6


def test_flow_refuses_stationary():
    with pytest.raises(InapplicableOracleError):
        check_hamiltonian_flow(make_scenario_field("circle", 64), ModelConstants())


def test_hamiltonian_generates_rhs(kelvin64):
    c = ModelConstants(R0=1.3, m0=0.5, t0=0.8)
    v = c.t0 * bracket_velocity(hamiltonian_spin_functional(c), kelvin64, c)
    np.testing.assert_allclose(v, (2 / np.pi) * rhs_spin(kelvin64), atol=1e-12)


def test_functional_repr_names():
    prod = phi_functional(0) * coordinate_functional(1, 2)
    assert prod.name == "(Phi1)*(j2[2])"
    assert isinstance(prod, DiscreteFunctional)
