"""Bell (CHSH) and Bell-Mermin-Klyshko operators on qubits.

Operators carry the 1/2 normalization, so the local-realistic bound is 1 and
the quantum bound for ``n`` parties is ``2 ** ((n - 1) / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import (
    PAULIS,
    InvalidInputError,
    as_matrix,
    is_hermitian,
    kron,
    kron_all,
)
from .model import DensityMatrix
from .optimize import OptimizerConfig, angle_box, maximize

CHSH_STARTS = 16
BMK3_STARTS = 64
IMAG_TOL = 1e-10

# Angle set used for the fixed-angle slice; only the polar angle of party 2's
# unprimed axis is left free.
SLICE_ANGLES = {
    "theta1": 0.0,
    "theta3": -0.61548,
    "theta1p": 1.5708,
    "theta2p": -0.61548,
    "theta3p": 0.61548,
    "phi1": -0.35236,
    "phi2": 0.268617,
    "phi3": -0.268617,
    "phi1p": -0.268617,
    "phi2p": 0.268617,
    "phi3p": -0.268617,
}


class OptimizerNotConverged(RuntimeError):
    """The winning start hit its iteration cap; ``value``/``angles`` hold the best point found."""

    def __init__(self, message, value, angles, report):
        super().__init__(message)
        self.value = value
        self.angles = angles
        self.report = report


@dataclass(frozen=True)
class BlochAxis:
    polar: float
    azimuthal: float = 0.0

    def vector(self) -> np.ndarray:
        st = math.sin(self.polar)
        return np.array([st * math.cos(self.azimuthal), st * math.sin(self.azimuthal), math.cos(self.polar)])


@dataclass(frozen=True)
class BmkAngleSet:
    """Per-party (unprimed, primed) measurement axes, party 1 first."""

    parties: tuple[tuple[BlochAxis, BlochAxis], ...]

    @property
    def n(self) -> int:
        return len(self.parties)

    def swapped(self) -> "BmkAngleSet":
        return BmkAngleSet(tuple((p, u) for u, p in self.parties))

    def to_vector(self) -> np.ndarray:
        return np.array([v for u, p in self.parties for v in (u.polar, u.azimuthal, p.polar, p.azimuthal)])

    @classmethod
    def from_vector(cls, x) -> "BmkAngleSet":
        x = [float(v) for v in x]
        if len(x) % 4:
            raise InvalidInputError("angle vector length must be a multiple of 4")
        return cls(tuple(
            (BlochAxis(x[i], x[i + 1]), BlochAxis(x[i + 2], x[i + 3])) for i in range(0, len(x), 4)
        ))


def observable(axis: BlochAxis) -> np.ndarray:
    nx, ny, nz = axis.vector()
    return nx * PAULIS[0] + ny * PAULIS[1] + nz * PAULIS[2]


def _check_parties(angles: BmkAngleSet, n: int):
    if angles.n != n:
        raise InvalidInputError(f"expected {n} parties, got {angles.n}")


def bell_operator_2(angles: BmkAngleSet) -> np.ndarray:
    _check_parties(angles, 2)
    (x, xp), (y, yp) = [(observable(u), observable(p)) for u, p in angles.parties]
    return 0.5 * (kron(x, y) + kron(xp, y) + kron(x, yp) - kron(xp, yp))


def bmk_operator(angles: BmkAngleSet, n: int | None = None) -> np.ndarray:
    """B_n = 1/2 B_{n-1}(O_n + O_n') + 1/2 B'_{n-1}(O_n - O_n'), with B_1 = O_1, B'_1 = O_1'.

    B'_k is B_k with every primed and unprimed axis exchanged.
    """
    n = angles.n if n is None else n
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    _check_parties(angles, n)
    obs = [(observable(u), observable(p)) for u, p in angles.parties]
    b, bp = obs[0]
    for o, op in obs[1:]:
        b, bp = (
            0.5 * kron(b, o + op) + 0.5 * kron(bp, o - op),
            0.5 * kron(bp, op + o) + 0.5 * kron(b, op - o),
        )
    return b


def bmk3_explicit(angles: BmkAngleSet) -> np.ndarray:
    _check_parties(angles, 3)
    (o1, o1p), (o2, o2p), (o3, o3p) = [(observable(u), observable(p)) for u, p in angles.parties]
    return 0.5 * (
        kron_all([o1, o2, o3p]) + kron_all([o1, o2p, o3]) + kron_all([o1p, o2, o3]) - kron_all([o1p, o2p, o3p])
    )


@lru_cache(maxsize=None)
def bmk_coefficients(n: int) -> tuple[tuple[tuple[int, ...], float], ...]:
    """Nonzero expansion of B_n over products of O_i (0) and O_i' (1).

    Follows the same recursion as :func:`bmk_operator`, on coefficient tables
    instead of matrices.
    """
    b, bp = {(0,): 1.0}, {(1,): 1.0}
    for _ in range(n - 1):
        nb, nbp = {}, {}
        for src, sign_o, sign_op, dst in ((b, 1, 1, nb), (bp, 1, -1, nb), (bp, 1, 1, nbp), (b, -1, 1, nbp)):
            for key, c in src.items():
                for bit, s in ((0, sign_o), (1, sign_op)):
                    k = key + (bit,)
                    dst[k] = dst.get(k, 0.0) + 0.5 * s * c
        b, bp = nb, nbp
    return tuple((k, c) for k, c in sorted(b.items()) if c != 0.0)


def tsirelson_bound(n: int) -> float:
    return 2.0 ** ((n - 1) / 2)


def expectation(op, rho) -> float:
    op = as_matrix(op)
    mat = rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho)
    if op.shape != mat.shape:
        raise InvalidInputError(f"operator {op.shape} and state {mat.shape} dimensions differ")
    if not is_hermitian(op):
        raise InvalidInputError("observable is not Hermitian")
    val = np.trace(mat @ op)
    if abs(val.imag) >= IMAG_TOL:
        raise InvalidInputError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def correlation_tensor(rho) -> np.ndarray:
    """T[i1..in] = Tr(rho sigma_i1 x ... x sigma_in) over x, y, z."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho)
    n = int(round(math.log2(mat.shape[0])))
    if 2**n != mat.shape[0] or not 1 <= n <= 8:
        raise InvalidInputError("correlation tensor needs a state of 1..8 qubits")
    rows, cols = "abcdefgh"[:n], "ijklmnop"[:n]
    # Tr(rho P) = sum rho[r, c] P[c, r], one Pauli factor per qubit.
    factors = ",".join(f"{r.upper()}{c}{r}" for r, c in zip(rows, cols))
    spec = f"{rows}{cols},{factors}->{rows.upper()}"
    t = np.einsum(spec, mat.reshape((2,) * (2 * n)), *([np.stack(PAULIS)] * n))
    return np.ascontiguousarray(t.real)


def _unit_vectors(x: np.ndarray) -> np.ndarray:
    """Angle vector (polar, azimuthal pairs) to an array of Bloch vectors."""
    s, c = np.sin(x), np.cos(x)
    u = np.empty((len(x) // 2, 3))
    u[:, 0] = s[0::2] * c[1::2]
    u[:, 1] = s[0::2] * s[1::2]
    u[:, 2] = c[0::2]
    return u


class BmkObjective:
    """<B_n> as a function of the flat angle vector, via the correlation tensor.

    Equivalent to ``expectation(bmk_operator(BmkAngleSet.from_vector(x)), rho)``
    but avoids building 2^n x 2^n matrices on every call: the tensor is
    contracted with both axes of every party, giving all 2^n correlators
    <O_1^(s1) ... O_n^(sn)> at once, which are then weighted by the BMK
    coefficients.
    """

    def __init__(self, rho, n: int):
        self.n = n
        self.tensor = correlation_tensor(rho)
        if self.tensor.ndim != n:
            raise InvalidInputError(f"state has {self.tensor.ndim} qubits, expected {n}")
        weights = np.zeros((2,) * n)
        for pattern, c in bmk_coefficients(n):
            weights[pattern] = c
        self.weights = weights.ravel()

    def __call__(self, x) -> float:
        u = _unit_vectors(np.asarray(x, dtype=float)).reshape(self.n, 2, 3)
        g = u[0] @ self.tensor.reshape(3, -1)
        for q in range(1, self.n):
            g = (u[q] @ g.reshape(2**q, 3, -1)).reshape(2 ** (q + 1), -1)
        return float(g.ravel() @ self.weights)


def _maximize_bmk(rho, n: int, default_starts: int, config: OptimizerConfig | None, **overrides):
    objective = BmkObjective(rho, n)
    if config is None:
        config = OptimizerConfig(bounds=angle_box(4 * n), starts=default_starts)
    config = config.with_overrides(**overrides)
    report = maximize(objective, config)
    angles = BmkAngleSet.from_vector(report.best_point)
    if not report.converged:
        raise OptimizerNotConverged(
            f"BMK{n} maximization did not converge (best {report.best_value:.10g})",
            report.best_value, angles, report,
        )
    return report.best_value, angles, report


def max_chsh(rho, config: OptimizerConfig | None = None, **overrides) -> tuple[float, BmkAngleSet]:
    """Largest <B_2> over all eight measurement angles (multi-start Nelder-Mead)."""
    value, angles, _ = _maximize_bmk(rho, 2, CHSH_STARTS, config, **overrides)
    return value, angles


def max_bmk3(rho, config: OptimizerConfig | None = None, **overrides) -> tuple[float, BmkAngleSet]:
    """Largest <B_3> over all twelve measurement angles (multi-start Nelder-Mead)."""
    value, angles, _ = _maximize_bmk(rho, 3, BMK3_STARTS, config, **overrides)
    return value, angles


def horodecki_chsh_max(rho) -> float:
    """Closed-form CHSH maximum sqrt(t1 + t2), t1, t2 the two largest eigenvalues of T^T T.

    Kept as an independent check on :func:`max_chsh`.
    """
    t = correlation_tensor(rho)
    if t.ndim != 2:
        raise InvalidInputError("Horodecki criterion needs a two-qubit state")
    w = np.linalg.eigvalsh(t.T @ t)
    return math.sqrt(max(w[-1] + w[-2], 0.0))


def slice_angle_set(theta2: float) -> BmkAngleSet:
    a = SLICE_ANGLES
    return BmkAngleSet((
        (BlochAxis(a["theta1"], a["phi1"]), BlochAxis(a["theta1p"], a["phi1p"])),
        (BlochAxis(theta2, a["phi2"]), BlochAxis(a["theta2p"], a["phi2p"])),
        (BlochAxis(a["theta3"], a["phi3"]), BlochAxis(a["theta3p"], a["phi3p"])),
    ))


def bmk3_fixed_slice(rho, theta2: float) -> float:
    """<B_3> at the fixed reference angle set with party 2's polar angle set to ``theta2``."""
    return expectation(bmk_operator(slice_angle_set(theta2), 3), rho)
