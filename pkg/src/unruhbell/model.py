"""State family shared by an inertial observer and a uniformly accelerated one.

Alice (A) starts entangled with Rob, ``cos(phi)|00> + sin(phi)|11>``. Rob's
vacuum looks like a two-mode squeezed state across Rindler regions I and II
when he accelerates, with mixing angle ``theta_u``. The resulting pure state
lives on factors ordered (A, I, II) with big-endian basis indexing, i.e. A is
the most significant bit of the basis index.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    InvalidInputError,
    as_matrix,
    hermitian_eigen,
    is_hermitian,
    partial_trace,
)

TRACE_TOL = 1e-10
PSD_TOL = -1e-10
NORM_TOL = 1e-12
HALF_PI = math.pi / 2


class Pair(str, enum.Enum):
    """Which two of the three modes are kept."""

    AI = "ai"
    AII = "aii"
    III = "iii"

    @classmethod
    def parse(cls, value) -> "Pair":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInputError(f"unknown pair {value!r}; expected ai, aii or iii") from None

    @property
    def kept(self) -> tuple[int, int]:
        return {Pair.AI: (0, 1), Pair.AII: (0, 2), Pair.III: (1, 2)}[self]

    @property
    def label(self) -> str:
        return {Pair.AI: "A,I", Pair.AII: "A,II", Pair.III: "I,II"}[self]


@dataclass(frozen=True)
class ModelParams:
    phi: float
    theta_u: float

    def __post_init__(self):
        for name in ("phi", "theta_u"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < -1e-15 or v > HALF_PI + 1e-15:
                raise InvalidInputError(f"{name}={v!r} outside [0, pi/2]")


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix with its tensor-factor dimensions."""

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = as_matrix(self.mat)
        dims = tuple(int(d) for d in self.dims) if self.dims else _qubit_dims(m.shape[0])
        if int(np.prod(dims)) != m.shape[0]:
            raise InvalidInputError(f"dims {dims} do not match dimension {m.shape[0]}")
        if not is_hermitian(m, HERMITIAN_TOL):
            raise InvalidInputError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > TRACE_TOL:
            raise InvalidInputError(f"density matrix trace {np.trace(m).real:.3g} != 1")
        if hermitian_eigen(m).eigenvalues[0] < PSD_TOL:
            raise InvalidInputError("density matrix has a negative eigenvalue")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_pure(cls, amplitudes, dims=()) -> "DensityMatrix":
        v = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(np.outer(v, v.conj()), tuple(dims))


def _qubit_dims(n: int) -> tuple[int, ...]:
    k = int(round(math.log2(n))) if n > 0 else 0
    if 2**k != n:
        return (n,)
    return (2,) * k if k else (1,)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        if abs(np.linalg.norm(v) - 1) > NORM_TOL:
            raise InvalidInputError("state vector is not normalized")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self.amplitudes, self.dims)


def unruh_angle(accel: float, omega: float = 1.0, light_speed: float = 1.0) -> float:
    """Mixing angle for a fermionic mode of frequency ``omega`` seen at acceleration ``accel``.

    ``cos(theta) = (exp(-2 pi omega c / a) + 1) ** -0.5``; zero acceleration gives 0 and
    infinite acceleration gives pi/4.
    """
    for name, v in (("accel", accel), ("omega", omega), ("light_speed", light_speed)):
        if not (math.isfinite(v) and v > 0):
            raise InvalidInputError(f"{name} must be positive and finite, got {v!r}")
    x = 2 * math.pi * omega * light_speed / accel
    # exp(-x) underflows to 0 for large x, which is the correct limit.
    return math.acos((math.exp(-x) + 1) ** -0.5)


def tripartite_state(params: ModelParams) -> PureState:
    c_phi, s_phi = math.cos(params.phi), math.sin(params.phi)
    c_th, s_th = math.cos(params.theta_u), math.sin(params.theta_u)
    amp = np.zeros(8, dtype=complex)
    amp[0b000] = c_phi * c_th
    amp[0b011] = c_phi * s_th
    amp[0b110] = s_phi
    return PureState(amp, (2, 2, 2))


def reduced_state(params: ModelParams, pair) -> DensityMatrix:
    """Closed-form two-mode reduced state for ``pair``."""
    pair = Pair.parse(pair)
    cp, sp = math.cos(params.phi), math.sin(params.phi)
    ct, st = math.cos(params.theta_u), math.sin(params.theta_u)
    m = np.zeros((4, 4))
    if pair is Pair.AI:
        m[0, 0] = cp**2 * ct**2
        m[1, 1] = cp**2 * st**2
        m[3, 3] = sp**2
        m[0, 3] = m[3, 0] = sp * cp * ct
    elif pair is Pair.AII:
        m[0, 0] = cp**2 * ct**2
        m[1, 1] = cp**2 * st**2
        m[2, 2] = sp**2
        m[1, 2] = m[2, 1] = sp * cp * st
    else:
        m[0, 0] = cp**2 * ct**2
        m[2, 2] = sp**2
        m[3, 3] = cp**2 * st**2
        m[0, 3] = m[3, 0] = cp**2 * st * ct
    return DensityMatrix(m.astype(complex), (2, 2))


def reduced_state_by_trace(params: ModelParams, pair) -> DensityMatrix:
    """Same as :func:`reduced_state` but obtained by tracing the tripartite projector."""
    pair = Pair.parse(pair)
    rho = tripartite_state(params).density()
    return DensityMatrix(partial_trace(rho.mat, rho.dims, pair.kept), (2, 2))


def measured_factor_for(pair) -> int:
    """The measured subsystem is always the first factor of the pair (A, or I for I,II)."""
    Pair.parse(pair)
    return 0
