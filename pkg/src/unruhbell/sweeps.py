"""Parameter sweeps over the state family and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bmk import BMK3_STARTS, CHSH_STARTS, OptimizerNotConverged, bmk3_fixed_slice, max_bmk3, max_chsh
from .model import HALF_PI, ModelParams, Pair, reduced_state, tripartite_state
from .oid import DeficitLandscape, classify_profile, model_oid, optimal_eta_profile
from .optimize import DEFAULT_SEED, OptimizerConfig, angle_box

SURFACE_POINTS = 61
CURVE_POINTS = 121
TABLE_PHIS = (("pi/4", math.pi / 4), ("pi/5", math.pi / 5), ("pi/8", math.pi / 8))
SLICE_THETAS = (math.pi / 4, math.pi / 8, math.pi / 16)
QUANTITIES = ("bmk3-surface", "bmk3-slice", "oid-surface", "oid-curve", "chsh-curve", "table")


@dataclass
class SweepSpec:
    quantity: str
    phi: Sequence[float] | None = None
    theta_u: Sequence[float] | None = None
    theta2: Sequence[float] | None = None
    pair: str = "ai"
    grid: int | None = None
    seed: int = DEFAULT_SEED
    starts: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.grid is not None and self.grid < 2:
            raise ValueError("grid resolution must be at least 2")
        if self.starts is not None and self.starts < 1:
            raise ValueError("starts must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        self.pair = Pair.parse(self.pair).value
        for name in ("phi", "theta_u"):
            vals = getattr(self, name)
            if vals is not None:
                vals = [float(v) for v in np.atleast_1d(vals)]
                if any(not (0 <= v <= HALF_PI + 1e-12) for v in vals):
                    raise ValueError(f"{name} values must lie in [0, pi/2]")
                setattr(self, name, vals)
        if self.theta2 is not None:
            self.theta2 = [float(v) for v in np.atleast_1d(self.theta2)]

    def resolved(self) -> dict:
        return asdict(self)


@dataclass
class SweepResult:
    header: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError("row width does not match header")
            for v in row:
                if isinstance(v, float) and not math.isfinite(v):
                    raise ValueError("sweep results may not contain NaN or infinite cells")

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def _grid(lo: float, hi: float, n: int) -> list[float]:
    return [float(v) for v in np.linspace(lo, hi, n)]


def _map(fn: Callable, items: list, workers: int) -> list:
    """Ordered map; results come back in input order whatever the worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _optimizer(ndim: int, starts: int, seed: int) -> OptimizerConfig:
    return OptimizerConfig(bounds=angle_box(ndim), starts=starts, seed=seed)


def _bmk3_cell(args) -> tuple:
    phi, th, starts, seed = args
    rho = tripartite_state(ModelParams(phi, th)).density()
    try:
        value, _ = max_bmk3(rho, _optimizer(12, starts, seed))
        ok = 1
    except OptimizerNotConverged as exc:
        value, ok = exc.value, 0
    return (phi, th, value, ok)


def run_bmk3_surface(spec: SweepSpec) -> SweepResult:
    n = spec.grid or SURFACE_POINTS
    phis = spec.phi or _grid(0, HALF_PI, n)
    thetas = spec.theta_u or _grid(0, HALF_PI, n)
    starts = spec.starts or BMK3_STARTS
    cells = [(p, t, starts, spec.seed) for p in phis for t in thetas]
    rows = _map(_bmk3_cell, cells, spec.workers)
    return SweepResult(["phi", "theta_u", "b3max", "converged"], rows)


def run_bmk3_slice(spec: SweepSpec) -> SweepResult:
    n = spec.grid or CURVE_POINTS
    phi = spec.phi[0] if spec.phi else math.pi / 4
    thetas = spec.theta_u or list(SLICE_THETAS)
    theta2 = spec.theta2 or _grid(-math.pi, math.pi, n)
    rows = []
    for th in thetas:
        rho = tripartite_state(ModelParams(phi, th)).density()
        rows.extend((t2, th, bmk3_fixed_slice(rho, t2)) for t2 in theta2)
    return SweepResult(["theta2", "theta_u", "b3"], rows)


def run_oid_surface(spec: SweepSpec) -> tuple[SweepResult, SweepResult]:
    """ID over (theta_u, eta) at xi = 0, plus the per-theta_u minimizer."""
    n = spec.grid or SURFACE_POINTS
    phi = spec.phi[0] if spec.phi else math.pi / 4
    thetas = spec.theta_u or _grid(0, HALF_PI, n)
    etas = _grid(0, math.pi, n)
    rows = []
    for th in thetas:
        land = DeficitLandscape(reduced_state(ModelParams(phi, th), spec.pair), 0)
        vals = land(np.array(etas), 0.0)
        rows.extend((th, e, float(v)) for e, v in zip(etas, vals))
    surface = SweepResult(["theta_u", "eta", "id"], rows)
    return surface, run_oid_curve(spec, thetas)


def _profile_cell(args):
    phi, pair, th = args
    return optimal_eta_profile(phi, pair, [th])[0]


def run_oid_curve(spec: SweepSpec, thetas: Sequence[float] | None = None) -> SweepResult:
    phi = spec.phi[0] if spec.phi else math.pi / 4
    thetas = thetas or spec.theta_u or _grid(0, HALF_PI, spec.grid or CURVE_POINTS)
    points = _map(_profile_cell, [(phi, spec.pair, th) for th in thetas], spec.workers)
    rows = [
        (p.theta_u, p.eta, p.xi, p.oid, int(p.flat), int(p.mirror_degenerate), int(p.xi_dependent))
        for p in points
    ]
    return SweepResult(["theta_u", "eta_opt", "xi_opt", "oid", "flat", "mirror_degenerate", "xi_dependent"], rows)


def _curve_cell(args) -> tuple:
    phi, pair, th, starts, seed = args
    params = ModelParams(phi, th)
    oid = model_oid(params, pair).oid
    try:
        b2, _ = max_chsh(reduced_state(params, pair), _optimizer(8, starts, seed))
        ok = 1
    except OptimizerNotConverged as exc:
        b2, ok = exc.value, 0
    return (th, oid, b2, ok)


def run_curves(spec: SweepSpec) -> SweepResult:
    """OID and maximal CHSH value along theta_u for one reduced pair (default phi = pi/5)."""
    phi = spec.phi[0] if spec.phi else math.pi / 5
    thetas = spec.theta_u or _grid(0, HALF_PI, spec.grid or CURVE_POINTS)
    starts = spec.starts or CHSH_STARTS
    rows = _map(_curve_cell, [(phi, spec.pair, th, starts, spec.seed) for th in thetas], spec.workers)
    return SweepResult(["theta_u", "oid", "b2max", "converged"], rows)


def run_table(spec: SweepSpec) -> SweepResult:
    """Classify the optimal measurement polar angle for every (pair, phi) combination."""
    thetas = spec.theta_u or _grid(0, HALF_PI, spec.grid or SURFACE_POINTS)
    rows = []
    for pair in Pair:
        for label, phi in TABLE_PHIS:
            points = _map(_profile_cell, [(phi, pair.value, th) for th in thetas], spec.workers)
            kind, _ = classify_profile(points)
            etas = [p.eta for p in points if not p.flat] or [0.0]
            degenerate = int(any(p.mirror_degenerate for p in points if not p.flat))
            rows.append((pair.value, label, phi, kind, min(etas), max(etas), degenerate, len(points)))
    return SweepResult(
        ["pair", "phi_label", "phi", "classification", "eta_min", "eta_max", "mirror_degenerate", "points"], rows
    )


RUNNERS = {
    "bmk3-surface": run_bmk3_surface,
    "bmk3-slice": run_bmk3_slice,
    "oid-curve": run_oid_curve,
    "chsh-curve": run_curves,
    "table": run_table,
}


def run(spec: SweepSpec) -> list[tuple[str, SweepResult]]:
    """Run a sweep; returns (suffix, result) pairs, the companion argmin file having suffix '_argmin'."""
    t0 = time.perf_counter()
    if spec.quantity == "oid-surface":
        surface, argmin = run_oid_surface(spec)
        out = [("", surface), ("_argmin", argmin)]
    else:
        out = [("", RUNNERS[spec.quantity](spec))]
    meta = {
        "quantity": spec.quantity,
        "config": spec.resolved(),
        "seed": spec.seed,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    for _, res in out:
        res.metadata = dict(meta)
    return out


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _parse_cell(s: str):
    try:
        return float(s)
    except ValueError:
        return s


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write("# metadata: " + json.dumps(result.metadata, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.header)
    for row in result.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def format_json(result: SweepResult) -> str:
    rows = [[v if isinstance(v, str) else float(v) for v in row] for row in result.rows]
    payload = {"metadata": result.metadata, "header": result.header, "rows": rows}
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def parse_csv(text: str) -> SweepResult:
    lines = text.splitlines()
    meta = {}
    while lines and lines[0].startswith("#"):
        line = lines.pop(0)
        if line.startswith("# metadata: "):
            meta = json.loads(line[len("# metadata: "):])
    reader = csv.reader(lines)
    header = next(reader)
    rows = [tuple(_parse_cell(c) for c in r) for r in reader]
    return SweepResult(header, rows, meta)


def parse_json(text: str) -> SweepResult:
    obj = json.loads(text)
    return SweepResult(obj["header"], [tuple(r) for r in obj["rows"]], obj["metadata"])


def data_section(text: str) -> str:
    """The part of an emitted CSV that must be identical across reruns with the same seed."""
    return "".join(l for l in text.splitlines(keepends=True) if not l.startswith("#"))


def write_result(result: SweepResult, path, fmt: str = "csv") -> Path:
    path = Path(path)
    text = format_csv(result) if fmt == "csv" else format_json(result)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def read_result(path, fmt: str | None = None) -> SweepResult:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    text = path.read_text()
    return parse_json(text) if fmt == "json" else parse_csv(text)


def companion_path(path, suffix: str) -> Path:
    path = Path(path)
    return path.with_name(path.stem + suffix + path.suffix) if suffix else path


def default_seed(explicit: int | None = None) -> int:
    """Explicit value, else the UNRUH_SEED environment variable, else the library default."""
    if explicit is not None:
        return explicit
    env = os.environ.get("UNRUH_SEED")
    if env:
        return int(env, 0)
    return DEFAULT_SEED
