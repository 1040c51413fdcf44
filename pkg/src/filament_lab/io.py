"""File formats: field/curve/drift CSV, JSON reports, OBJ polylines, SVG projections."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .constants import ModelConstants
from .errors import ConfigError, InvalidInputError
from .spin_field import SCENARIOS, SpinField

FIELD_HEADER = ["xi", "j1", "j2", "j3"]
CURVE_HEADER = ["xi", "z1", "z2", "z3"]
DRIFT_HEADER = ["tau", "unit_norm_res", "phi_norm", "spin_energy", "f1", "f2", "f3", "H0", "E_restricted"]


def fmt(x) -> str:
    """17 significant digits; round-trips every double."""
    return format(float(x), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_field_csv(path, field: SpinField):
    _write_rows(path, FIELD_HEADER, np.column_stack([field.xi, field.samples]))


def read_field_csv(path) -> SpinField:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            rows = [[float(v) for v in row] for row in reader if row]
    except (OSError, StopIteration, ValueError) as exc:
        raise InvalidInputError(f"cannot read field CSV {path}: {exc}") from exc
    if header != FIELD_HEADER:
        raise InvalidInputError(f"field CSV header must be {','.join(FIELD_HEADER)} (got {','.join(header)})")
    data = np.array(rows)
    if data.ndim != 2 or data.shape[1] != 4:
        raise InvalidInputError("field CSV rows must have four columns")
    n = data.shape[0]
    if np.max(np.abs(data[:, 0] - 2 * np.pi * np.arange(n) / n)) > 1e-9:
        raise InvalidInputError("xi column is not the uniform grid 2*pi*i/N")
    return SpinField(data[:, 1:])


def write_curve_csv(path, curve):
    _write_rows(path, CURVE_HEADER, np.column_stack([curve.xi, curve.points]))


def write_curve_obj(path, curve):
    """Vertices for the N periodic nodes and one closed ``l`` polyline record."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nodes = np.asarray(curve.nodes)
    with open(path, "w") as fh:
        for x, y, z in nodes:
            fh.write(f"v {fmt(x)} {fmt(y)} {fmt(z)}\n")
        fh.write("l " + " ".join(str(i + 1) for i in range(len(nodes))) + " 1\n")


def write_curve_svg(path, curve, size: int = 240):
    """Three static panels: the xy, xz and yz projections of the closed curve."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pts = np.asarray(curve.points)
    pad = 12
    panels = []
    for k, (a, b, label) in enumerate(((0, 1, "x-y"), (0, 2, "x-z"), (1, 2, "y-z"))):
        u, v = pts[:, a], pts[:, b]
        span = max(np.ptp(u), np.ptp(v), 1e-12)
        cu, cv = 0.5 * (u.max() + u.min()), 0.5 * (v.max() + v.min())
        scale = (size - 2 * pad) / span
        xs = k * size + size / 2 + (u - cu) * scale
        ys = size / 2 - (v - cv) * scale
        poly = " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(xs, ys))
        panels.append(
            f'<g><rect x="{k * size}" y="0" width="{size}" height="{size}" fill="none" stroke="#999"/>'
            f'<text x="{k * size + 6}" y="14" font-size="11">{label}</text>'
            f'<polyline points="{poly}" fill="none" stroke="#1f4e9a" stroke-width="1.2"/></g>'
        )
    with open(path, "w") as fh:
        fh.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{3 * size}" height="{size}" '
            f'viewBox="0 0 {3 * size} {size}">' + "".join(panels) + "</svg>\n"
        )


def write_drift_csv(path, trajectory):
    rows = []
    for tau, rep in zip(trajectory.times, trajectory.reports):
        rows.append(
            [tau, rep.unit_norm_res, np.linalg.norm(rep.phi), rep.spin_energy, *rep.f, rep.H0, rep.E_restricted]
        )
    _write_rows(path, DRIFT_HEADER, rows)


def read_drift_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header != DRIFT_HEADER:
        raise InvalidInputError("not a drift CSV")
    return np.genfromtxt(path, delimiter=",", skip_header=1, ndmin=2)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True)


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")


def phase_point_to_json(point, field_ref: str) -> dict:
    return {"q": list(point.q), "p": list(point.p), "field": field_ref}


def classical_point_to_json(point, field_ref: str) -> dict:
    return {"z0": list(point.z0), "gamma": point.gamma, "field": field_ref}


# -- run configuration ------------------------------------------------------

@dataclass
class RunConfig:
    constants: ModelConstants
    N: int
    scenario: str
    scenario_params: dict
    method: str = "midpoint"
    dtau: float | None = None
    n_steps: int = 100
    monitor_every: int | None = None
    tol: float = 1e-14
    max_iter: int = 100
    outputs: dict = dc_field(default_factory=dict)
    beta_override: float | None = None
    curve_taus: list = dc_field(default_factory=list)

    @property
    def step(self) -> float:
        return self.dtau if self.dtau is not None else 0.1 * (2 * np.pi / self.N) ** 2


def _section(doc, name, required=True):
    sec = doc.get(name, None)
    if sec is None:
        if required:
            raise ConfigError(f"config is missing the '{name}' section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"'{name}' must be an object")
    return sec


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document; raises :class:`ConfigError` with a readable message."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    try:
        constants = ModelConstants.from_dict(_section(doc, "constants"))
    except InvalidInputError as exc:
        raise ConfigError(f"constants: {exc}") from exc
    grid = _section(doc, "grid")
    N = grid.get("N")
    if not isinstance(N, int) or N < 8 or N % 2:
        raise ConfigError(f"grid.N must be an even integer >= 8 (got {N!r})")
    scen = _section(doc, "scenario")
    kind = scen.get("kind")
    if kind not in SCENARIOS:
        raise ConfigError(f"scenario.kind must be one of {SCENARIOS} (got {kind!r})")
    params = scen.get("params", {}) or {}
    if set(params) - {"m", "eps"}:
        raise ConfigError(f"unknown scenario params {sorted(set(params) - {'m', 'eps'})}")
    integ = _section(doc, "integrator")
    method = integ.get("method", "midpoint")
    if method not in ("midpoint", "rk4"):
        raise ConfigError(f"integrator.method must be 'midpoint' or 'rk4' (got {method!r})")
    n_steps = integ.get("n_steps", 100)
    if not isinstance(n_steps, int) or n_steps <= 0:
        raise ConfigError("integrator.n_steps must be a positive integer")
    dtau = integ.get("dtau")
    if dtau is not None and not (isinstance(dtau, (int, float)) and dtau > 0):
        raise ConfigError("integrator.dtau must be positive")
    outputs = _section(doc, "outputs", required=False)
    overrides = _section(doc, "overrides", required=False)
    beta = overrides.get("beta_override")
    return RunConfig(
        constants=constants,
        N=N,
        scenario=kind,
        scenario_params=dict(params),
        method=method,
        dtau=None if dtau is None else float(dtau),
        n_steps=n_steps,
        monitor_every=integ.get("monitor_every"),
        tol=float(integ.get("tol", 1e-14)),
        max_iter=int(integ.get("max_iter", 100)),
        outputs=dict(outputs),
        beta_override=None if beta is None else float(beta),
        curve_taus=list(outputs.get("curve_taus", [])),
    )


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)
