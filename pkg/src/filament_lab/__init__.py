"""Closed vortex filament as a periodic continuous Heisenberg spin chain.

The sphere-valued field j(xi) is evolved by d_tau j = j x j'', the curve is
rebuilt from it through the step-kernel integral, and the momenta, energies,
constraints and bracket identities of the Hamiltonian description are
evaluated on the discrete field.
"""
from .constants import ModelConstants, make_constants
from .spin_field import (
    SpinField,
    derivative,
    make_scenario_field,
    project_to_constraints,
    residual_unit_norm,
    residual_zero_mean,
    spin_energy,
)
from .reconstruction import (
    FilamentCurve,
    closure_residual,
    curvature_profile,
    kernel_value,
    reconstruct_curve,
    reconstruct_from_phase,
    tangent_residual,
)
from .dynamics import evolve, lie_residual, rhs_spin, step_implicit_midpoint, step_rk4_projected
from .invariants import (
    InvariantReport,
    angular_momentum,
    constraint_phi0,
    effective_mass_inverse,
    energy_restricted,
    hamiltonian_H0,
    impulse_direct,
    invariant_report,
    momentum,
    vector_f,
)
from .phase_space import ClassicalPoint, PhasePoint, from_omega, to_omega
from .brackets import DiscreteFunctional, check_first_class, check_hamiltonian_flow, poisson_bracket
from .kernels import BACKEND

__version__ = "0.1.0"
