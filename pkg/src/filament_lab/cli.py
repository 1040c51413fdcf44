"""Command-line front end.

Exit codes: 0 ok, 2 config/input error, 3 numerical abort, 4 degenerate input.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io, kernels
from .brackets import check_hamiltonian_flow
from .constants import ModelConstants
from .dynamics import evolve
from .errors import EvolutionAborted, FilamentLabError, InapplicableOracleError
from .invariants import invariant_report, momentum
from .reconstruction import reconstruct_curve
from .spin_field import make_scenario_field

log = logging.getLogger("filament_lab")


def _vec3(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z (got {text!r})")
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers (got {text!r})")
    return np.array(vals)


def _add_constant_flags(p):
    p.add_argument("--R0", type=float, default=1.0)
    p.add_argument("--m0", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--sigma", type=int, default=-1, choices=(-1, 1))


def _constants(args) -> ModelConstants:
    return ModelConstants(R0=args.R0, m0=args.m0, t0=args.t0, gamma=args.gamma, sigma=args.sigma)


def cmd_simulate(args) -> int:
    cfg = io.load_config(args.config)
    c = cfg.constants
    field = make_scenario_field(cfg.scenario, cfg.N, **cfg.scenario_params)
    p = momentum(field, c)
    out = cfg.outputs
    dtau = cfg.step
    curve_base = Path(out.get("curve_csv", "curve.csv"))
    captures = {int(round(t / dtau)): t for t in cfg.curve_taus}

    def capture(tau, state):
        curve = reconstruct_curve(state, np.zeros(3), c)
        io.write_curve_csv(curve_base.with_name(f"{curve_base.stem}_tau{captures[int(round(tau / dtau))]:g}.csv"), curve)

    aborted = None
    try:
        traj = evolve(
            field,
            dtau,
            cfg.n_steps,
            cfg.method,
            monitor_every=cfg.monitor_every,
            constants=c,
            p=p,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            capture_steps=captures,
            on_capture=capture,
        )
    except EvolutionAborted as exc:
        traj, aborted = exc.trajectory, exc

    final = traj.states[-1]
    if "drift_csv" in out:
        io.write_drift_csv(out["drift_csv"], traj)
    if "field_csv" in out:
        io.write_field_csv(out["field_csv"], final)
    curve = reconstruct_curve(final, np.zeros(3), c)
    if "curve_csv" in out:
        io.write_curve_csv(out["curve_csv"], curve)
    if "curve_obj" in out:
        io.write_curve_obj(out["curve_obj"], curve)
    if "curve_svg" in out:
        io.write_curve_svg(out["curve_svg"], curve)
    if "report_json" in out:
        report = traj.reports[-1].to_json()
        report["tau"] = float(traj.times[-1])
        report["drift"] = traj.drift()
        report["run"] = {"N": cfg.N, "dtau": dtau, "integrator": cfg.method, "n_steps": cfg.n_steps}
        report["constants"] = c.to_dict()
        report["aborted"] = aborted is not None
        if aborted is not None:
            report["abort_reason"] = str(aborted)
        try:
            flow = check_hamiltonian_flow(final, c, beta=cfg.beta_override, require_on_surface=False)
            report["bracket_flow"] = flow.to_json()
        except InapplicableOracleError as exc:
            report["bracket_flow"] = {"inapplicable": str(exc)}
        io.write_json(out["report_json"], report)
    if aborted is not None:
        print(f"error: numerical abort: {aborted}", file=sys.stderr)
        return 3
    return 0


def cmd_invariants(args) -> int:
    c = _constants(args)
    field = io.read_field_csv(args.field_csv)
    p = momentum(field, c) if args.p is None else args.p
    report = invariant_report(field, c, p=p, basepoint=args.basepoint)
    if report.degenerate_direction and args.require_restricted:
        print("error: degenerate direction: |f| = 0, restricted energy and n_f undefined", file=sys.stderr)
        return 4
    doc = report.to_json()
    doc["constants"] = c.to_dict()
    doc["N"] = field.N
    doc["p_source"] = "flag" if args.p is not None else "to_omega"
    print(io.dumps(doc))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all

    print(f"filament-lab verify --level {args.level}  (kernel backend: {kernels.BACKEND})")
    results = run_all(args.level, echo=print)
    ok = all(r.ok for r in results)
    print(f"{sum(r.ok for r in results)}/{len(results)} criteria passed")
    if args.json:
        io.write_json(args.json, {"level": args.level, "results": [r.to_json() for r in results], "passed": ok})
    return 0 if ok else 1


def cmd_export_curve(args) -> int:
    c = _constants(args)
    field = io.read_field_csv(args.field_csv)
    curve = reconstruct_curve(field, args.basepoint, c)
    writer = {"csv": io.write_curve_csv, "obj": io.write_curve_obj, "svg": io.write_curve_svg}[args.format]
    writer(args.out, curve)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filament-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="evolve a scenario from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("invariants", help="invariant report for a field CSV")
    p.add_argument("field_csv")
    _add_constant_flags(p)
    p.add_argument("--p", type=_vec3, default=None, help="momentum x,y,z (default: from the field)")
    p.add_argument("--basepoint", type=_vec3, default=np.zeros(3))
    p.add_argument("--require-restricted", action="store_true", help="exit 4 if the restricted energy is undefined")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--json", default=None, help="also write the results as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-curve", help="reconstruct and export the filament curve")
    p.add_argument("field_csv")
    p.add_argument("--basepoint", type=_vec3, default=np.zeros(3))
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "obj", "svg"), default="csv")
    _add_constant_flags(p)
    p.set_defaults(func=cmd_export_curve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except FilamentLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
