"""Dense complex matrix algebra for small multi-qubit states and operators.

Everything here operates on plain ``numpy`` arrays of dtype ``complex128``.
Subsystem order for the four-qubit network is fixed: 0 = Alice, 1 and 2 =
Bob's two qubits, 3 = Charlie.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-10
PSD_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


class DimensionError(ValueError):
    """Operand shapes or subsystem indices are incompatible."""


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"trace of non-square matrix {m.shape}")
    return complex(np.trace(m))


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def hermiticity_error(a) -> float:
    m = as_matrix(a)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(a)
    return m.shape[0] == m.shape[1] and hermiticity_error(m) <= tol


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``.

    Raises ``ValueError`` when ``a`` deviates from Hermiticity by more than
    ``HERMITIAN_TOL``.
    """
    m = as_matrix(a)
    if not is_hermitian(m):
        raise ValueError("min_eigenvalue requires a Hermitian matrix")
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` (over subsystems ``dims``) onto the subsystems in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    m = as_matrix(rho)
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise DimensionError("keep must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"subsystem index out of range for dims {dims}")
    side = int(np.prod(dims))
    if m.shape != (side, side):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # contract each traced index with its column partner, highest first
    for i in sorted(traced, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + cur)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def embed(op, dims: Sequence[int], target: int) -> np.ndarray:
    """Place a single-subsystem operator on ``target`` with identities elsewhere."""
    dims = list(dims)
    if not 0 <= target < len(dims):
        raise DimensionError(f"subsystem {target} out of range for dims {dims}")
    op = as_matrix(op)
    if op.shape != (dims[target], dims[target]):
        raise DimensionError(f"operator {op.shape} does not fit subsystem of dim {dims[target]}")
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == target else np.eye(d, dtype=complex))
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """A (possibly sub-normalized) density matrix tagged with subsystem dims."""

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.mat)
        dims = tuple(int(d) for d in self.dims)
        if m.shape[0] != m.shape[1] or m.shape[0] != int(np.prod(dims)):
            raise DimensionError(f"matrix {m.shape} incompatible with dims {dims}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()), tuple(dims))

    @property
    def trace(self) -> complex:
        return trace(self.mat)

    def kron(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(kron(self.mat, other.mat), self.dims + other.dims)

    def partial_trace(self, keep: Iterable[int]) -> "DensityMatrix":
        keep = sorted(set(keep))
        return DensityMatrix(partial_trace(self.mat, self.dims, keep),
                             tuple(self.dims[k] for k in keep))

    def violations(self) -> list[str]:
        """Names of the density-matrix invariants this matrix breaks."""
        out = []
        if hermiticity_error(self.mat) > HERMITIAN_TOL:
            out.append("hermiticity")
            return out
        tr = self.trace
        if abs(tr.imag) > NORM_TOL or not (-NORM_TOL <= tr.real <= 1 + PSD_TOL):
            out.append("trace")
        if min_eigenvalue(self.mat) < -PSD_TOL:
            out.append("positivity")
        return out

    def is_valid(self) -> bool:
        return not self.violations()
