"""Small dense complex linear algebra for qubit states and observables.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here is
pure; nothing mutates its inputs.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
EIGEN_CLAMP = 1e-12

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class HermitianEigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns paired with eigenvalues


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=complex)).T


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def partial_trace(a, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    ``dims`` lists factor dimensions in big-endian order (factor 0 is the most
    significant index). Kept factors stay in their original relative order.
    """
    m = as_matrix(a)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
        raise InvalidInputError(f"dims {dims} do not match matrix dimension {m.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise InvalidInputError(f"keep={keep} out of range for {len(dims)} factors")

    n = len(dims)
    drop = [k for k in range(n) if k not in keep]
    t = m.reshape(dims + dims)
    # Move row/column indices into (kept, dropped) order then contract the dropped ones.
    t = t.transpose(keep + drop + [n + k for k in keep] + [n + k for k in drop])
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def hermitian_eigen(a) -> HermitianEigenDecomposition:
    m = as_matrix(a)
    if not is_hermitian(m):
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    # Symmetrize so the LAPACK driver sees an exactly Hermitian input.
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return HermitianEigenDecomposition(w, v)


def entropy_from_eigenvalues(w) -> float:
    """Shannon entropy in bits of a spectrum, with tiny eigenvalues clamped to zero."""
    w = np.asarray(w, dtype=float)
    w = w[w > EIGEN_CLAMP]
    s = -float(np.sum(w * np.log2(w)))
    return max(s, 0.0)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr rho log2 rho.

    Accepts a :class:`~unruhbell.model.DensityMatrix` or a bare matrix.
    """
    mat = getattr(rho, "mat", rho)
    return entropy_from_eigenvalues(hermitian_eigen(mat).eigenvalues)


def binary_entropy(p: float) -> float:
    return entropy_from_eigenvalues([p, 1.0 - p])
