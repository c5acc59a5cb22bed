"""Sequential measurement updates: weak channel, Lüders update, EJM projection.

The weak update is applied exactly in the form

    (F/2) rho + ((1 + (-1)**a G - F)/2) U1 rho U1^+ + ((1 - (-1)**a G - F)/2) U0 rho U0^+

with ``Uk`` the projector ``(I + (-1)**k A)/2`` embedded on the measured qubit.
At the strong limit (F=0, G=1) outcome ``a=0`` therefore lands on the ``-1``
eigenspace of ``A``.  Outcome values are fixed accordingly:
``WEAK_VALUES[a] = (-1)**(a+1)`` for weakly measuring parties and
``STRONG_VALUES[a] = (-1)**a`` for strongly measuring ones.
"""
from __future__ import annotations

import numpy as np

from .matcore import DensityMatrix, DimensionError, embed, partial_trace
from .measmodel import EjmBasis, PointerPair, projector

WEAK_VALUES = np.array([-1.0, 1.0])
STRONG_VALUES = np.array([1.0, -1.0])
WEAK_VALUES.setflags(write=False)
STRONG_VALUES.setflags(write=False)


def weak_weights(fg: PointerPair, a: int) -> tuple[float, float, float]:
    """Mixture weights (identity, U1, U0) of the weak channel for outcome ``a``.

    The U-weights may be negative for the optimal pointer; only the output is
    required to be positive semidefinite.
    """
    s = (-1) ** a
    return fg.F / 2, (1 + s * fg.G - fg.F) / 2, (1 - s * fg.G - fg.F) / 2


def _as_state(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    m = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    return DensityMatrix(m, (2,) * n)


def _check_qubit(rho: DensityMatrix, qubit: int):
    if not 0 <= qubit < len(rho.dims) or rho.dims[qubit] != 2:
        raise DimensionError(f"invalid qubit index {qubit} for dims {rho.dims}")


def weak_update(rho, qubit: int, observable, a: int, fg: PointerPair) -> DensityMatrix:
    rho = _as_state(rho)
    _check_qubit(rho, qubit)
    w_id, w1, w0 = weak_weights(fg, a)
    u1 = embed(projector(observable, 1), rho.dims, qubit)
    u0 = embed(projector(observable, 0), rho.dims, qubit)
    m = rho.mat
    out = w_id * m + w1 * (u1 @ m @ u1.conj().T) + w0 * (u0 @ m @ u0.conj().T)
    return DensityMatrix(out, rho.dims)


def strong_update(rho, qubit: int, observable, a: int) -> DensityMatrix:
    rho = _as_state(rho)
    _check_qubit(rho, qubit)
    u = embed(projector(observable, a), rho.dims, qubit)
    return DensityMatrix(u @ rho.mat @ u.conj().T, rho.dims)


def unconditional_weak_channel(rho, qubit: int, observable, F: float) -> DensityMatrix:
    """Outcome-averaged weak channel ``F rho + (1-F)(P0 rho P0 + P1 rho P1)``."""
    rho = _as_state(rho)
    _check_qubit(rho, qubit)
    p0 = embed(projector(observable, 0), rho.dims, qubit)
    p1 = embed(projector(observable, 1), rho.dims, qubit)
    m = rho.mat
    return DensityMatrix(F * m + (1 - F) * (p0 @ m @ p0 + p1 @ m @ p1), rho.dims)


def ejm_project(rho_abc, basis: EjmBasis, b: int) -> DensityMatrix:
    """Project Bob's qubits (1, 2) onto EJM outcome ``b`` and trace them out.

    Returns the unnormalized (Alice, Charlie) state; its trace is ``P(b)``.
    """
    rho = _as_state(rho_abc)
    if rho.dims != (2, 2, 2, 2):
        raise DimensionError(f"expected four qubits, got dims {rho.dims}")
    if b not in (1, 2, 3, 4):
        raise ValueError(f"EJM outcome must be in 1..4, got {b!r}")
    bob = np.kron(np.kron(np.eye(2), basis.projector(b)), np.eye(2))
    post = bob @ rho.mat @ bob.conj().T
    return DensityMatrix(partial_trace(post, rho.dims, (0, 3)), (2, 2))
