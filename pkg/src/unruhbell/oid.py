"""Information deficit of a rank-1 projective measurement on one qubit, and its minimum.

The one-way information deficit (OID) is the smallest entropy increase
``S(rho') - S(rho)`` over measurement axes, where ``rho'`` is the state after
a non-selective measurement along ``n = (sin eta cos xi, sin eta sin xi, cos eta)``.
All entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import I2, PAULIS, InvalidInputError, von_neumann_entropy
from .model import DensityMatrix, ModelParams, Pair, measured_factor_for, reduced_state
from .optimize import OptimizerConfig, nelder_mead

TWO_PI = 2 * math.pi
GRID_POINTS = 61
REFINE_CELLS = 5
DEGENERACY_TOL = 1e-9
FLAT_TOL = 1e-9
ETA_SPREAD_THRESHOLD = 1e-2

_COS2_PI8 = math.cos(math.pi / 8) ** 2
_SIN2_PI8 = math.sin(math.pi / 8) ** 2


@dataclass(frozen=True)
class MeasurementAxis:
    eta: float
    xi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.eta) and math.isfinite(self.xi)):
            raise InvalidInputError("measurement angles must be finite")
        object.__setattr__(self, "eta", min(max(self.eta, 0.0), math.pi))

    def vector(self) -> np.ndarray:
        s = math.sin(self.eta)
        return np.array([s * math.cos(self.xi), s * math.sin(self.xi), math.cos(self.eta)])


@dataclass
class DeficitResult:
    oid: float
    optimal_axis: MeasurementAxis
    analytic_available: bool = False
    analytic_value: float | None = None
    flat: bool = False  # ID is constant over all axes, so the argmin is arbitrary
    mirror_degenerate: bool = False  # pi - eta is an equally good polar angle
    xi_dependent: bool = False  # the minimum needs xi != 0
    evaluations: int = 0


@dataclass(frozen=True)
class EtaProfilePoint:
    theta_u: float
    eta: float
    xi: float
    oid: float
    flat: bool
    mirror_degenerate: bool
    xi_dependent: bool


def _canonical(eta: float, xi: float) -> tuple[float, float]:
    """Map any (eta, xi) to the same axis with eta in [0, pi], xi in [0, 2 pi)."""
    eta = eta % TWO_PI
    if eta > math.pi:
        eta, xi = TWO_PI - eta, xi + math.pi
    return eta, xi % TWO_PI


def _projector_pair(n: np.ndarray, measured_factor: int) -> tuple[np.ndarray, np.ndarray]:
    ns = n[0] * PAULIS[0] + n[1] * PAULIS[1] + n[2] * PAULIS[2]
    p0, p1 = (I2 + ns) / 2, (I2 - ns) / 2
    if measured_factor == 0:
        return np.kron(p0, I2), np.kron(p1, I2)
    if measured_factor == 1:
        return np.kron(I2, p0), np.kron(I2, p1)
    raise InvalidInputError(f"measured_factor must be 0 or 1, got {measured_factor!r}")


def _two_qubit(rho) -> np.ndarray:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise InvalidInputError(f"expected a two-qubit state, got shape {mat.shape}")
    return mat


def measurement_channel(rho, axis: MeasurementAxis, measured_factor: int = 0) -> DensityMatrix:
    mat = _two_qubit(rho)
    p0, p1 = _projector_pair(axis.vector(), measured_factor)
    return DensityMatrix(p0 @ mat @ p0 + p1 @ mat @ p1, (2, 2))


def information_deficit(rho, axis: MeasurementAxis, measured_factor: int = 0) -> float:
    mat = _two_qubit(rho)
    return von_neumann_entropy(measurement_channel(mat, axis, measured_factor)) - von_neumann_entropy(mat)


class DeficitLandscape:
    """Vectorized ID(eta, xi) for one state; eta and xi may be arrays."""

    def __init__(self, rho, measured_factor: int):
        self.mat = _two_qubit(rho)
        if measured_factor not in (0, 1):
            raise InvalidInputError(f"measured_factor must be 0 or 1, got {measured_factor!r}")
        self.factor = measured_factor
        self.s0 = von_neumann_entropy(self.mat)

    def __call__(self, eta, xi) -> np.ndarray:
        eta, xi = np.broadcast_arrays(np.asarray(eta, float), np.asarray(xi, float))
        st = np.sin(eta)
        n = np.stack([st * np.cos(xi), st * np.sin(xi), np.cos(eta)], axis=-1).reshape(-1, 3)
        ns = np.einsum("ka,aij->kij", n, np.stack(PAULIS))
        if self.factor == 0:
            m = np.einsum("kij,ab->kiajb", ns, I2).reshape(-1, 4, 4)
        else:
            m = np.einsum("ab,kij->kaibj", I2, ns).reshape(-1, 4, 4)
        # With M = n.sigma on the measured qubit, Pi0 rho Pi0 + Pi1 rho Pi1 = (rho + M rho M) / 2.
        out = (self.mat + m @ self.mat @ m) / 2
        w = np.linalg.eigvalsh(out)
        w = np.where(w > 1e-12, w, 1.0)
        s = -np.sum(w * np.log2(w), axis=-1)
        return (np.maximum(s, 0.0) - self.s0).reshape(eta.shape)

    def at(self, eta: float, xi: float) -> float:
        return float(self(eta, xi))


def oid_numeric(
    rho,
    measured_factor: int = 0,
    grid_points: int = GRID_POINTS,
    refine_cells: int = REFINE_CELLS,
    config: OptimizerConfig | None = None,
) -> DeficitResult:
    """Minimize the information deficit over measurement axes.

    A coarse ``grid_points`` x ``grid_points`` scan of eta in [0, pi] and xi in
    [0, 2 pi) seeds Nelder-Mead from the ``refine_cells`` best cells. Ties
    go to the smaller eta. When eta and pi - eta (or xi and 0) give the same
    deficit within 1e-9, the smaller eta (or xi = 0) is reported and the
    corresponding flag is set.
    """
    land = DeficitLandscape(rho, measured_factor)
    etas = np.linspace(0.0, math.pi, grid_points)
    xis = np.linspace(0.0, TWO_PI, grid_points, endpoint=False)
    E, X = np.meshgrid(etas, xis, indexing="ij")
    vals = land(E, X)
    evaluations = vals.size
    flat = bool(vals.max() - vals.min() < FLAT_TOL)

    order = np.lexsort((X.ravel(), E.ravel(), vals.ravel()))
    candidates = [(float(vals.ravel()[i]), *_canonical(E.ravel()[i], X.ravel()[i])) for i in order[:refine_cells]]

    if not flat:
        if config is None:
            config = OptimizerConfig(bounds=((0.0, TWO_PI), (0.0, TWO_PI)), starts=1)
        for _, eta0, xi0 in list(candidates):
            rep = nelder_mead(lambda x: land.at(x[0], x[1]), [eta0, xi0], config)
            evaluations += rep.evaluations
            eta, xi = _canonical(*rep.best_point)
            candidates.append((land.at(eta, xi), eta, xi))

    if flat:
        # Every axis is optimal; report the first grid axis.
        value, eta, xi = land.at(0.0, 0.0), 0.0, 0.0
    else:
        value, eta, xi = min(candidates, key=lambda c: (c[0], c[1], c[2]))

    xi_dependent = False
    if xi != 0.0:
        at_zero = land.at(eta, 0.0)
        if abs(at_zero - value) <= DEGENERACY_TOL:
            xi, value = 0.0, min(value, at_zero)
        else:
            xi_dependent = True

    mirror = land.at(math.pi - eta, xi)
    mirror_degenerate = abs(mirror - value) <= DEGENERACY_TOL and abs(math.pi - 2 * eta) > 1e-6
    if mirror_degenerate and math.pi - eta < eta:
        eta, value = math.pi - eta, min(value, mirror)
    evaluations += 2

    return DeficitResult(
        oid=max(value, 0.0),
        optimal_axis=MeasurementAxis(eta, xi),
        flat=flat,
        mirror_degenerate=bool(mirror_degenerate),
        xi_dependent=xi_dependent,
        evaluations=evaluations,
    )


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def oid_analytic_ai_quarter(theta_u: float) -> float:
    """Closed-form OID of the (A, I) state at phi = pi/4 (optimal axis eta = pi/2)."""
    k1 = (1 - math.cos(2 * theta_u)) / 4
    k2 = (3 + math.cos(2 * theta_u)) / 4
    root = math.sqrt(2 * math.cos(4 * theta_u) + 14)
    l1, l3 = (4 - root) / 16, (4 + root) / 16
    return _xlog2x(k1) + _xlog2x(k2) - 2 * (_xlog2x(l1) + _xlog2x(l3))


def oid_analytic_ai_eighth(theta_u: float) -> float:
    """Closed-form OID of the (A, I) state at phi = pi/8 (optimal axis eta = 0 or pi)."""
    a = _COS2_PI8 * math.cos(theta_u) ** 2
    return -_xlog2x(a) - _xlog2x(_SIN2_PI8) + _xlog2x(a + _SIN2_PI8)


def oid_analytic_aii_quarter(theta_u: float) -> float:
    """Closed-form OID of the (A, II) state at phi = pi/4 (optimal axis eta = pi/2)."""
    root = math.sqrt(2 * math.cos(4 * theta_u) + 14)
    m1, m2 = (4 - root) / 16, (4 + root) / 16
    c2 = math.cos(2 * theta_u)
    return -2 * (_xlog2x(m1) + _xlog2x(m2)) + _xlog2x((1 + c2) / 4) + _xlog2x((3 - c2) / 4)


def oid_analytic_aii_eighth(theta_u: float) -> float:
    """Closed-form OID of the (A, II) state at phi = pi/8 (optimal axis eta = 0 or pi)."""
    b = _COS2_PI8 * math.sin(theta_u) ** 2
    return -_xlog2x(_SIN2_PI8) - _xlog2x(b) + _xlog2x(_SIN2_PI8 + b)


ANALYTIC_OID = {
    (Pair.AI, "pi/4"): oid_analytic_ai_quarter,
    (Pair.AI, "pi/8"): oid_analytic_ai_eighth,
    (Pair.AII, "pi/4"): oid_analytic_aii_quarter,
    (Pair.AII, "pi/8"): oid_analytic_aii_eighth,
}


def analytic_oid_for(params: ModelParams, pair):
    """The closed-form OID function for this (pair, phi), or None if there is none."""
    pair = Pair.parse(pair)
    for key, phi in (("pi/4", math.pi / 4), ("pi/8", math.pi / 8)):
        if abs(params.phi - phi) < 1e-12:
            return ANALYTIC_OID.get((pair, key))
    return None


def model_oid(params: ModelParams, pair, measured_factor: int | None = None, **kw) -> DeficitResult:
    """Numeric OID of a reduced model state, with the closed form attached when one exists."""
    pair = Pair.parse(pair)
    factor = measured_factor_for(pair) if measured_factor is None else measured_factor
    result = oid_numeric(reduced_state(params, pair), factor, **kw)
    fn = analytic_oid_for(params, pair)
    if fn is not None and factor == measured_factor_for(pair):
        result.analytic_available = True
        result.analytic_value = fn(params.theta_u)
    return result


def optimal_eta_profile(
    phi: float,
    pair,
    theta_grid: Iterable[float],
    measured_factor: int | None = None,
    **kw,
) -> list[EtaProfilePoint]:
    points = []
    for th in theta_grid:
        res = model_oid(ModelParams(phi, float(th)), pair, measured_factor, **kw)
        points.append(EtaProfilePoint(
            theta_u=float(th),
            eta=res.optimal_axis.eta,
            xi=res.optimal_axis.xi,
            oid=res.oid,
            flat=res.flat,
            mirror_degenerate=res.mirror_degenerate,
            xi_dependent=res.xi_dependent,
        ))
    return points


def classify_profile(points: Sequence[EtaProfilePoint], threshold: float = ETA_SPREAD_THRESHOLD):
    """('fixed', eta) when the optimal eta varies by at most ``threshold`` over non-flat points.

    Points whose deficit landscape is flat carry no information about the
    optimal axis and are skipped. Returns ('theta-dependent', None) otherwise.
    """
    etas = [p.eta for p in points if not p.flat]
    if not etas:
        return "undetermined", None
    if max(etas) - min(etas) > threshold:
        return "theta-dependent", None
    return "fixed", float(np.median(etas))
