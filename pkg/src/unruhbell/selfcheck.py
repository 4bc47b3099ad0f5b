"""Oracle suite: closed forms against the numerical minimizers, and Tsirelson caps."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from . import bmk, oid
from .model import HALF_PI, DensityMatrix, ModelParams, Pair, reduced_state
from .optimize import DEFAULT_SEED, OptimizerConfig, angle_box

OID_TOL = 1e-5
CHSH_TOL = 1e-6
CAP_TOL = 1e-9
THETA_POINTS = 21
CHSH_STATES = 20
CAP_SAMPLES = 200

# (check name, pair, phi); the analytic function is looked up on the oid module by name at run time.
OID_CHECKS = (
    ("oid_analytic_ai_quarter", Pair.AI, math.pi / 4),
    ("oid_analytic_ai_eighth", Pair.AI, math.pi / 8),
    ("oid_analytic_aii_quarter", Pair.AII, math.pi / 4),
    ("oid_analytic_aii_eighth", Pair.AII, math.pi / 8),
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    deviation: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name:<26} max_dev={self.deviation:.3e} {self.detail}".rstrip()


def random_density_matrix(dim: int, rng: np.random.Generator) -> DensityMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityMatrix((m + m.conj().T) / 2)


def check_oid(name: str, pair: Pair, phi: float) -> CheckResult:
    fn: Callable[[float], float] = getattr(oid, name)
    dev = 0.0
    for th in np.linspace(0.0, HALF_PI, THETA_POINTS):
        numeric = oid.oid_numeric(reduced_state(ModelParams(phi, float(th)), pair), 0).oid
        dev = max(dev, abs(numeric - fn(float(th))))
    return CheckResult(name, dev <= OID_TOL, dev)


def check_chsh(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    dev = 0.0
    cfg = OptimizerConfig(bounds=angle_box(8), starts=bmk.CHSH_STARTS, seed=seed)
    for _ in range(CHSH_STATES):
        rho = random_density_matrix(4, rng)
        value, _ = bmk.max_chsh(rho, cfg)
        dev = max(dev, abs(value - bmk.horodecki_chsh_max(rho)))
    return CheckResult("chsh_horodecki", dev <= CHSH_TOL, dev)


def check_tsirelson(n: int, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed + n)
    cap = bmk.tsirelson_bound(n)
    worst = -math.inf
    for _ in range(CAP_SAMPLES):
        rho = random_density_matrix(2**n, rng)
        angles = bmk.BmkAngleSet.from_vector(rng.uniform(-math.pi, math.pi, 4 * n))
        worst = max(worst, abs(bmk.expectation(bmk.bmk_operator(angles, n), rho)))
        worst = max(worst, float(np.max(np.abs(np.linalg.eigvalsh(bmk.bmk_operator(angles, n))))))
    excess = max(worst - cap, 0.0)
    return CheckResult(f"tsirelson_b{n}", worst <= cap + CAP_TOL, excess, f"largest={worst:.12f} cap={cap:.12f}")


def run_selfcheck(seed: int = DEFAULT_SEED, stream: TextIO | None = None) -> list[CheckResult]:
    stream = stream or sys.stdout
    results = []
    for name, pair, phi in OID_CHECKS:
        results.append(check_oid(name, pair, phi))
        print(results[-1].line(), file=stream)
    for check in (lambda: check_chsh(seed), lambda: check_tsirelson(2, seed), lambda: check_tsirelson(3, seed)):
        results.append(check())
        print(results[-1].line(), file=stream)
    failed = [r.name for r in results if not r.passed]
    print("selfcheck: " + ("all checks passed" if not failed else "FAILED " + ", ".join(failed)), file=stream)
    return results
