"""Bounded, derivative-free multi-start Nelder-Mead.

Start points
------------
Random start points come from SplitMix64 seeded with ``config.seed``. One
generator stream is used for the whole run: start ``k`` consumes ``ndim``
consecutive outputs, coordinate ``d`` being::

    u = (next() >> 11) * 2**-53          # uniform double in [0, 1)
    x[d] = lo[d] + (hi[d] - lo[d]) * u

where ``next()`` is the reference SplitMix64 step::

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

Simplex
-------
Standard coefficients (reflection 1, expansion 2, contraction 1/2, shrink
1/2). The initial simplex is the start point plus one vertex per axis offset
by 5% of that axis' box width. A start converges once the spread of function
values over the simplex is at most ``simplex_tolerance``.

Periodic dimensions are wrapped into ``[lo, hi)`` before every evaluation;
the rest are clamped. The simplex itself is kept unwrapped so its geometry is
not torn at the seam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

DEFAULT_SEED = 0x5EED
_MASK64 = (1 << 64) - 1

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5
INITIAL_STEP = 0.05


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next() >> 11) * 2.0**-53


@dataclass(frozen=True)
class OptimizerConfig:
    bounds: tuple[tuple[float, float], ...]
    starts: int = 64
    max_iters: int = 2000
    simplex_tolerance: float = 1e-10
    seed: int = DEFAULT_SEED
    periodic: tuple[bool, ...] | None = None  # None means every dimension is periodic

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise ValueError("at least one dimension is required")
        for lo, hi in bounds:
            if not lo < hi:
                raise ValueError(f"invalid bound ({lo}, {hi})")
        if self.starts < 1 or self.max_iters < 1:
            raise ValueError("starts and max_iters must be positive")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        periodic = self.periodic
        if periodic is None:
            periodic = (True,) * len(bounds)
        elif len(periodic) != len(bounds):
            raise ValueError("periodic flags must match bounds")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "periodic", tuple(bool(p) for p in periodic))

    @property
    def ndim(self) -> int:
        return len(self.bounds)

    def with_overrides(self, **kw) -> "OptimizerConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass
class OptimizerReport:
    best_value: float
    best_point: np.ndarray
    converged: bool
    evaluations: int
    start_index: int = 0
    history: list[float] = field(default_factory=list, repr=False)


def start_points(config: OptimizerConfig) -> np.ndarray:
    rng = SplitMix64(config.seed)
    lo = np.array([b[0] for b in config.bounds])
    hi = np.array([b[1] for b in config.bounds])
    pts = np.empty((config.starts, config.ndim))
    for k in range(config.starts):
        for d in range(config.ndim):
            pts[k, d] = lo[d] + (hi[d] - lo[d]) * rng.uniform()
    return pts


class _BoxedObjective:
    """Maps raw simplex coordinates into the box and counts evaluations."""

    def __init__(self, f, config: OptimizerConfig):
        self.f = f
        self.lo = np.array([b[0] for b in config.bounds])
        self.width = np.array([b[1] - b[0] for b in config.bounds])
        self.periodic = np.array(config.periodic)
        self.all_periodic = bool(self.periodic.all())
        self.count = 0

    def project(self, x: np.ndarray) -> np.ndarray:
        wrapped = self.lo + np.mod(x - self.lo, self.width)
        if self.all_periodic:
            return wrapped
        return np.where(self.periodic, wrapped, np.clip(x, self.lo, self.lo + self.width))

    def __call__(self, x: np.ndarray) -> float:
        self.count += 1
        return float(self.f(self.project(x)))


def nelder_mead(f, x0, config: OptimizerConfig) -> OptimizerReport:
    """Minimize ``f`` from one start point. ``history`` holds the best value after each iteration."""
    obj = f if isinstance(f, _BoxedObjective) else _BoxedObjective(f, config)
    start_count = obj.count
    n = config.ndim
    x0 = np.asarray(x0, dtype=float)
    sim = np.empty((n + 1, n))
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += INITIAL_STEP * obj.width[i]
    fs = np.array([obj(x) for x in sim])

    history = []
    converged = False
    for _ in range(config.max_iters):
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        history.append(float(fs[0]))
        if np.max(np.abs(fs[1:] - fs[0])) <= config.simplex_tolerance:
            converged = True
            break

        centroid = np.add.reduce(sim[:-1]) / n
        worst = sim[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = obj(xr)
        if fr < fs[0]:
            xe = centroid + REFLECT * EXPAND * (centroid - worst)
            fe = obj(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + CONTRACT * REFLECT * (centroid - worst)
            fc = obj(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid - CONTRACT * (centroid - worst)
            fc = obj(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
                continue
        sim[1:] = sim[0] + SHRINK * (sim[1:] - sim[0])
        fs[1:] = [obj(x) for x in sim[1:]]
    else:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        converged = bool(np.max(np.abs(fs[1:] - fs[0])) <= config.simplex_tolerance)
        history.append(float(fs[0]))

    return OptimizerReport(
        best_value=float(fs[0]),
        best_point=obj.project(sim[0]),
        converged=converged,
        evaluations=obj.count - start_count,
        history=history,
    )


def minimize(
    f: Callable[[np.ndarray], float],
    config: OptimizerConfig,
    initial_points: Sequence | None = None,
) -> OptimizerReport:
    """Best local minimum over all starts.

    Starts are independent; the winner is the lowest value, ties going to the
    lowest start index, so the result does not depend on evaluation order.
    ``initial_points`` replaces the seeded random starts when given.
    """
    pts = start_points(config) if initial_points is None else np.atleast_2d(np.asarray(initial_points, float))
    obj = _BoxedObjective(f, config)
    best: OptimizerReport | None = None
    for k, x0 in enumerate(pts):
        rep = nelder_mead(obj, x0, config)
        rep.start_index = k
        if best is None or rep.best_value < best.best_value:
            best = rep
    best.evaluations = obj.count
    return best


def maximize(
    f: Callable[[np.ndarray], float],
    config: OptimizerConfig,
    initial_points: Sequence | None = None,
) -> OptimizerReport:
    rep = minimize(lambda x: -f(x), config, initial_points)
    rep.best_value = -rep.best_value
    rep.history = [-h for h in rep.history]
    return rep


def angle_box(ndim: int, lo: float = -math.pi, hi: float = math.pi) -> tuple[tuple[float, float], ...]:
    return ((lo, hi),) * ndim
