"""Acceptance gate: one function per criterion, shared by ``filament-lab verify`` and the tests."""
from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .brackets import LEVI_CIVITA, check_first_class, check_hamiltonian_flow, phi0_functional, phi_functional, poisson_bracket
from .constants import ModelConstants
from .dynamics import evolve, integrate_lia_curve, lie_residual
from .errors import NotInOmegaError
from .invariants import (
    effective_mass_inverse,
    energy_restricted,
    hamiltonian_H0,
    impulse_direct,
    momentum,
    vector_f,
)
from .phase_space import ClassicalPoint, PhasePoint, from_omega, to_omega
from .reconstruction import (
    closure_residual,
    curvature_from_nodes,
    kernel_value,
    reconstruct_curve,
    tangent_residual,
    truncated_kernel_value,
)
from .spin_field import (
    make_scenario_field,
    random_admissible_field,
    random_field,
    residual_zero_mean,
)

LEVELS = ("quick", "full")
SEED = 20240917


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict = dc_field(default_factory=dict)
    runtime: float = 0.0
    time_limit: float = float("inf")

    @property
    def ok(self) -> bool:
        return self.passed and self.runtime < self.time_limit

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] C{self.number:<2d} {self.name:<38s} {self.runtime:7.2f}s/{self.time_limit:g}s  {vals}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.ok,
            "runtime_s": self.runtime,
            "time_limit_s": self.time_limit,
            "measured": {k: (v if isinstance(v, (bool, str)) else float(v)) for k, v in self.measured.items()},
        }


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.3g}"


def _params(level):
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    full = level == "full"
    return {
        "N": 256 if full else 64,
        "horizon": 1.0 if full else 0.25,
        "lia_horizon": 0.5 if full else 0.2,
        "n_random": 100 if full else 20,
    }


def _timed(number, name, limit, fn, *args):
    start = time.perf_counter()
    passed, measured = fn(*args)
    return CriterionResult(number, name, bool(passed), measured, time.perf_counter() - start, limit)


# -- C1 ---------------------------------------------------------------------

def _c1(level):
    N = _params(level)["N"]
    worst = 0.0
    for R0, m0, t0 in ((1.0, 1.0, 1.0), (2.0, 3.0, 0.5), (0.3, 7.0, 4.0)):
        c = ModelConstants(R0=R0, m0=m0, t0=t0)
        h0 = hamiltonian_H0(np.zeros(3), make_scenario_field("circle", N), c)
        worst = max(worst, abs(h0 - m0 * R0**2 / t0**2) / c.E0)
    return worst <= 1e-12, {"max_rel_err": worst}


def criterion_1(level="full"):
    return _timed(1, "reference energy H0(circle,p=0)=E0", 0.1, _c1, level)


# -- C2 ---------------------------------------------------------------------

def ring_impulse_checks(kernel=kernel_value, N=256):
    ring = make_scenario_field("circle", N)
    unit = ModelConstants()
    p = momentum(ring, unit, kernel=kernel)
    curve = reconstruct_curve(ring, np.zeros(3), unit, kernel=kernel)
    try:
        oracle = impulse_direct(curve, unit)
        oracle_err = float(np.linalg.norm(p - oracle))
    except Exception:
        oracle_err = float("inf")
    value_err = float(np.linalg.norm(p - np.array([0.0, 0.0, np.pi])))
    scale_err = 0.0
    for R0 in (0.5, 1.0, 2.0):
        for gamma in (-2.0, 1.0, 3.0):
            c = ModelConstants(R0=R0, gamma=gamma)
            pv = momentum(ring, c, kernel=kernel)
            expected = np.array([0.0, 0.0, np.pi * R0**2 * gamma])
            scale_err = max(scale_err, float(np.linalg.norm(pv - expected) / abs(expected[2])))
    passed = value_err <= 1e-9 and oracle_err <= 1e-9 and scale_err <= 1e-9
    return passed, {"value_err": value_err, "oracle_err": oracle_err, "scaling_rel_err": scale_err}


def _c2(level):
    return ring_impulse_checks(kernel_value, 256)


def criterion_2(level="full"):
    return _timed(2, "ring impulse p=(0,0,pi) + line oracle", 1.0, _c2, level)


# -- C3 ---------------------------------------------------------------------

def _c3(level):
    rng = np.random.default_rng(SEED)
    N = 64
    c = ModelConstants()
    phis = [phi_functional(a) for a in range(3)]
    su2 = 0.0
    for _ in range(_params(level)["n_random"]):
        fld = random_field(N, rng)
        phi = residual_zero_mean(fld)
        scale = abs(c.beta) * max(1.0, float(np.abs(phi).max()))
        for a in range(3):
            for b in range(3):
                got = poisson_bracket(phis[a], phis[b], fld, c)
                su2 = max(su2, abs(got - c.beta * float(LEVI_CIVITA[a, b] @ phi)) / scale)

    admissible = 0.0
    fd_admissible = 0.0
    control = float("inf")
    for k in range(3):
        fld = random_admissible_field(N, rng)
        f = vector_f(fld)
        p = (2.0, -3.0, 0.5)[k] * f
        rep = check_first_class(fld, p, c)
        entry = rep.identity_residuals["Phi_a,Phi0"]
        admissible = max(admissible, entry.value / (entry.tolerance / 1e-8))
        for key in ("H,Phi0", "H,Phi1", "H,Phi2", "H,Phi3"):
            e = rep.identity_residuals[key]
            admissible = max(admissible, e.value / (e.tolerance / 1e-8))
        if k == 0:
            # same entry with Phi0 differenced directly (no chain rule)
            scale = abs(c.beta) * max(1.0, float(p @ p) * float(f @ f))
            raw = phi0_functional(p, gradient="fd")
            fd_admissible = max(abs(poisson_bracket(phis[a], raw, fld, c)) for a in range(3)) / scale
        # oblique p: Phi0 != 0, the cancellation must not happen
        axis = np.cross(f, rng.normal(size=3))
        axis /= np.linalg.norm(axis)
        oblique = 2.0 * (0.5 * f + (np.sqrt(3) / 2) * np.linalg.norm(f) * axis)
        bad = check_first_class(fld, oblique, c).identity_residuals["Phi_a,Phi0"]
        control = min(control, bad.value / (bad.tolerance / 1e-8))
    passed = su2 <= 1e-13 and admissible <= 1e-8 and fd_admissible <= 1e-8 and control >= 1e-4
    return passed, {
        "su2_rel": su2,
        "first_class_rel": admissible,
        "first_class_fd_rel": fd_admissible,
        "inadmissible_rel": control,
    }


def criterion_3(level="full"):
    return _timed(3, "constraint algebra first class", 10.0, _c3, level)


# -- C4 ---------------------------------------------------------------------

def _c4(level):
    N = _params(level)["N"]
    fld = make_scenario_field("kelvin_perturbed", N, m=3, eps=0.05)
    worst_res, worst_default, worst_override = 0.0, 0.0, 0.0
    for c in (ModelConstants(), ModelConstants(R0=2.0, m0=3.0, t0=0.5)):
        default = check_hamiltonian_flow(fld, c)
        override = check_hamiltonian_flow(fld, c, beta=-np.pi / (c.E0 * c.t0))
        worst_res = max(worst_res, default.fit_residual, override.fit_residual)
        worst_default = max(worst_default, abs(default.kappa - 2 / np.pi))
        worst_override = max(worst_override, abs(override.kappa - 1.0))
    passed = worst_res <= 1e-6 and worst_default <= 1e-6 and worst_override <= 1e-6
    return passed, {
        "kappa_default": default.kappa,
        "kappa_err": worst_default,
        "kappa_override_err": worst_override,
        "fit_residual": worst_res,
    }


def criterion_4(level="full"):
    return _timed(4, "bracket flow parallel to spin flow", 5.0, _c4, level)


# -- C5 ---------------------------------------------------------------------

def _c5(level):
    prm = _params(level)
    N = prm["N"]
    fld = make_scenario_field("kelvin_perturbed", N, m=3, eps=0.05)
    dtau = 0.1 * (2 * np.pi / N) ** 2
    n_steps = int(round(prm["horizon"] / dtau))
    traj = evolve(fld, dtau, n_steps, "midpoint", monitor_every=max(1, n_steps // 50))
    d = traj.drift()
    passed = d["spin_energy_rel"] <= 1e-8 and d["phi_max"] <= 1e-9 and d["f_rel"] <= 1e-7 and d["unit_norm_max"] <= 1e-12
    return passed, {
        "steps": n_steps,
        "spin_energy_rel": d["spin_energy_rel"],
        "phi_max": d["phi_max"],
        "f_rel": d["f_rel"],
        "unit_norm_max": d["unit_norm_max"],
    }


def criterion_5(level="full"):
    return _timed(5, "conservation under implicit midpoint", 60.0, _c5, level)


# -- C6 ---------------------------------------------------------------------

def _c6(level):
    prm = _params(level)
    N = prm["N"]
    c = ModelConstants()
    kelvin = make_scenario_field("kelvin_perturbed", N, m=3, eps=0.05)
    _, kelvin_nonuni = lie_residual(kelvin, c)
    ring_uniform, ring_nonuni = lie_residual(make_scenario_field("circle", N), c)
    ring_uniform_err = float(np.linalg.norm(ring_uniform - np.array([0.0, 0.0, -c.R0])))

    # both integrators carry O(dtau^2) error of different sign; cap dtau so
    # the comparison measures the model and not the steppers on coarse grids
    dtau = min(0.1 * (2 * np.pi / N) ** 2, 2e-4)
    n_steps = int(round(prm["lia_horizon"] / dtau))
    every = max(1, n_steps // 5)
    spin_kappa = []

    def grab(tau, state):
        curve = reconstruct_curve(state, np.zeros(3), c)
        spin_kappa.append((tau, curvature_from_nodes(np.asarray(curve.nodes), c.R0)))

    evolve(kelvin, dtau, n_steps, "midpoint", monitor_every=every, constants=c, on_snapshot=grab)
    start = reconstruct_curve(kelvin, np.zeros(3), c)
    direct = integrate_lia_curve(np.asarray(start.nodes), c.R0, dtau, n_steps, record_every=every)
    curv_err = 0.0
    for (t1, k1), (t2, z2) in zip(spin_kappa, direct):
        assert abs(t1 - t2) < 1e-12
        curv_err = max(curv_err, float(np.max(np.abs(k1 - curvature_from_nodes(z2, c.R0)))))
    passed = kelvin_nonuni <= 1e-6 * c.R0 and ring_nonuni <= 1e-12 and ring_uniform_err <= 1e-12 and curv_err <= 1e-6
    return passed, {
        "kelvin_nonuniform": kelvin_nonuni,
        "ring_nonuniform": ring_nonuni,
        "ring_uniform_err": ring_uniform_err,
        "curvature_err": curv_err,
    }


def criterion_6(level="full"):
    return _timed(6, "LIA equivalence modulo uniform drift", 90.0, _c6, level)


# -- C7 ---------------------------------------------------------------------

def _c7(level):
    rng = np.random.default_rng(SEED + 7)
    worst = 0.0
    rejected = True
    for _ in range(_params(level)["n_random"]):
        c = ModelConstants(R0=rng.uniform(0.5, 2), m0=rng.uniform(0.5, 2), t0=rng.uniform(0.5, 2))
        fld = random_admissible_field(64, rng)
        gamma = rng.uniform(0.2, 5.0) * rng.choice([-1.0, 1.0])
        point = ClassicalPoint(rng.normal(size=3) * 3, gamma, fld)
        for tau in (0.0, 0.7, -3.0):
            back = from_omega(to_omega(point, tau, c), tau, c)
            err = max(
                float(np.linalg.norm(back.z0 - point.z0) / max(1.0, np.linalg.norm(point.z0))),
                abs(back.gamma - point.gamma) / abs(point.gamma),
                float(np.max(np.abs(back.field.samples - fld.samples))),
            )
            worst = max(worst, err)
        omega = to_omega(point, 0.0, c)
        f = vector_f(fld)
        off = np.cross(f, rng.normal(size=3))
        try:
            from_omega(PhasePoint(omega.q, omega.p + np.linalg.norm(omega.p) * off / np.linalg.norm(off), fld), 0.0, c)
            rejected = False
        except NotInOmegaError:
            pass
    return worst <= 1e-10 and rejected, {"roundtrip_rel_err": worst, "violators_rejected": rejected}


def criterion_7(level="full"):
    return _timed(7, "A <-> Omega bijection", 5.0, _c7, level)


# -- C8 ---------------------------------------------------------------------

def _c8(level):
    rng = np.random.default_rng(SEED + 8)
    c = ModelConstants(m0=2.0)
    fld = random_admissible_field(_params(level)["N"], rng)
    f = vector_f(fld)
    n_f = f / np.linalg.norm(f)
    tensor = effective_mass_inverse(fld, c)
    eig = np.sort(np.linalg.eigvalsh(tensor))
    eig_err = float(np.max(np.abs(eig - np.array([0.0, 0.0, 1 / c.m0]))))
    axis_err = float(np.linalg.norm(tensor @ n_f - n_f / c.m0))
    rank = int(np.linalg.matrix_rank(tensor, tol=1e-10))
    p = np.array([0.7, -1.3, 2.1])
    step = 1e-4 * np.linalg.norm(p)
    hess = np.empty((3, 3))
    e = np.eye(3) * step
    for i in range(3):
        for k in range(3):
            hess[i, k] = (
                energy_restricted(p + e[i] + e[k], fld, c, f=f)
                - energy_restricted(p + e[i] - e[k], fld, c, f=f)
                - energy_restricted(p - e[i] + e[k], fld, c, f=f)
                + energy_restricted(p - e[i] - e[k], fld, c, f=f)
            ) / (4 * step * step)
    hess_err = float(np.max(np.abs(hess - tensor)))
    passed = rank == 1 and eig_err <= 1e-12 and axis_err <= 1e-12 and hess_err <= 1e-8
    return passed, {"rank": rank, "eig_err": eig_err, "axis_err": axis_err, "hessian_err": hess_err}


def criterion_8(level="full"):
    return _timed(8, "effective mass tensor rank-1 + Hessian", 1.0, _c8, level)


# -- C9 ---------------------------------------------------------------------

def _best_time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _c9(level):
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for N in (64, 256, 1024):
        fld = random_admissible_field(N, rng)
        fast = vector_f(fld, method="fast")
        ref = vector_f(fld, method="reference")
        worst = max(worst, float(np.linalg.norm(fast - ref) / np.linalg.norm(ref)))
    big = random_admissible_field(4096, rng)
    vector_f(big, method="reference")  # warm the cardinal table
    t_ref = _best_time(lambda: vector_f(big, method="reference"), 2)
    t_fast = _best_time(lambda: vector_f(big, method="fast"), 5)
    speedup = t_ref / t_fast
    return worst <= 1e-12 and speedup >= 20, {"max_rel_diff": worst, "speedup_4096": speedup}


def criterion_9(level="full"):
    return _timed(9, "fast f matches O(N^2) reference", 10.0, _c9, level)


# -- C10 --------------------------------------------------------------------

def convention_checks(kernel, N=256):
    """Criterion 2 plus tangent and closure oracles under a given kernel."""
    c = ModelConstants()
    impulse_ok, _ = ring_impulse_checks(kernel, N)
    ring = make_scenario_field("circle", N)
    tangent_ok = tangent_residual(reconstruct_curve(ring, np.zeros(3), c, kernel=kernel), ring, c) <= 1e-10
    tilted = make_scenario_field("tilted_constant", N)
    jump = closure_residual(reconstruct_curve(tilted, np.zeros(3), c, kernel=kernel))
    closure_ok = abs(jump - c.R0 * np.linalg.norm(residual_zero_mean(tilted))) <= 1e-12
    return {"impulse": impulse_ok, "tangent": bool(tangent_ok), "closure": bool(closure_ok)}


def _c10(level):
    floor = convention_checks(kernel_value)
    trunc = convention_checks(truncated_kernel_value)
    passed = all(floor.values()) and not any(trunc.values())
    return passed, {
        "floor_all_pass": all(floor.values()),
        "trunc_impulse_fails": not trunc["impulse"],
        "trunc_tangent_fails": not trunc["tangent"],
        "trunc_closure_fails": not trunc["closure"],
    }


def criterion_10(level="full"):
    return _timed(10, "truncation kernel is caught", 5.0, _c10, level)


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_all(level="full", echo=None):
    results = []
    for crit in CRITERIA:
        res = crit(level)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
