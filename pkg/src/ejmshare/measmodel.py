"""Measurement objects: observable triads, the generalized EJM basis, pointers."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .matcore import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z, HERMITIAN_TOL

# Tetrahedron sign triples, listed in outcome order b = 1..4.
TETRAHEDRON_SIGNS = np.array(
    [[+1, +1, +1],
     [+1, -1, -1],
     [-1, +1, -1],
     [-1, -1, +1]],
    dtype=int,
)
TETRAHEDRON_SIGNS.setflags(write=False)

PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def bloch_to_observable(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def observable_to_bloch(op) -> np.ndarray:
    return np.array([np.trace(op @ p).real / 2 for p in PAULIS])


def triad_bloch_vectors(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Rows are the Bloch vectors of the three observables of a party."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    cg, sg = math.cos(gamma), math.sin(gamma)
    return np.array([
        [cb * cg, sa * sb * cg - ca * sg, ca * sb * cg + sa * sg],
        [cb * sg, sa * sb * sg + ca * cg, ca * sb * sg - sa * cg],
        [-sb, sa * cb, ca * cb],
    ])


@dataclass(frozen=True)
class ObservableTriad:
    alpha: float
    beta: float
    gamma: float
    observables: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def bloch_vectors(self) -> np.ndarray:
        return triad_bloch_vectors(self.alpha, self.beta, self.gamma)


def triad(alpha: float, beta: float, gamma: float) -> ObservableTriad:
    obs = tuple(bloch_to_observable(v) for v in triad_bloch_vectors(alpha, beta, gamma))
    for o in obs:
        o.setflags(write=False)
    return ObservableTriad(float(alpha), float(beta), float(gamma), obs)


def qubit_ket(eta: float, phi: float) -> np.ndarray:
    """Pure qubit state with Bloch z-component ``eta`` and azimuth ``phi``."""
    return np.array([
        math.sqrt((1 + eta) / 2) * np.exp(-0.5j * phi),
        math.sqrt((1 - eta) / 2) * np.exp(0.5j * phi),
    ])


def tetrahedron_eta_phi() -> list[tuple[float, float]]:
    out = []
    for m in TETRAHEDRON_SIGNS:
        eta = m[2] / math.sqrt(3)
        phi = math.atan2(m[1], m[0])
        out.append((eta, phi))
    return out


@dataclass(frozen=True)
class EjmBasis:
    theta: float
    states: np.ndarray  # shape (4, 4), row b-1 is |Phi_b>
    m_vectors: np.ndarray
    eta_phi: tuple[tuple[float, float], ...]

    def projector(self, b: int) -> np.ndarray:
        """Rank-one projector for outcome ``b`` in 1..4."""
        v = self.states[b - 1]
        return np.outer(v, v.conj())

    def gram(self) -> np.ndarray:
        return self.states.conj() @ self.states.T

    def concurrences(self) -> np.ndarray:
        return np.array([concurrence_pure(s) for s in self.states])


def ejm_basis(theta: float) -> EjmBasis:
    """Generalized elegant joint measurement; ``theta=pi/2`` is the Bell basis."""
    if not (0.0 <= theta <= math.pi / 2 + 1e-15):
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")
    plus = (math.sqrt(3) + np.exp(1j * theta)) / (2 * math.sqrt(2))
    minus = (math.sqrt(3) - np.exp(1j * theta)) / (2 * math.sqrt(2))
    eta_phi = tetrahedron_eta_phi()
    states = []
    for eta, phi in eta_phi:
        up = qubit_ket(eta, phi)
        down = qubit_ket(-eta, phi + math.pi)  # antipodal direction
        states.append(plus * np.kron(up, down) + minus * np.kron(down, up))
    states = np.array(states)
    states.setflags(write=False)
    return EjmBasis(float(theta), states, TETRAHEDRON_SIGNS, tuple(eta_phi))


def concurrence_pure(psi) -> float:
    """Concurrence of a normalized two-qubit pure state, 2|ad - bc|."""
    a, b, c, d = np.asarray(psi, dtype=complex).reshape(4)
    return float(2 * abs(a * d - b * c))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix (spin-flip formula)."""
    rho = np.asarray(rho, dtype=complex)
    tr = np.trace(rho).real
    if tr <= 0:
        return 0.0
    rho = rho / tr
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


class PointerKind(str, enum.Enum):
    SQUARE = "square"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class PointerPair:
    kind: PointerKind
    G: float
    F: float


def pointer_pair(kind: PointerKind | str, G: float) -> PointerPair:
    """Quality factor ``F`` paired with precision ``G`` for a pointer family.

    Square pointers satisfy ``F + G = 1``; optimal pointers ``F**2 + G**2 = 1``.
    """
    kind = PointerKind(kind)
    G = float(G)
    if not 0.0 <= G <= 1.0:
        raise ValueError(f"G must lie in [0, 1], got {G!r}")
    if kind is PointerKind.SQUARE:
        F = 1.0 - G
    else:
        F = math.sqrt(max(0.0, 1.0 - G * G))
    return PointerPair(kind, G, F)


def projector(observable, a: int) -> np.ndarray:
    """Eigenprojector ``(I + (-1)**a A) / 2`` of a dichotomic observable."""
    A = np.asarray(observable, dtype=complex)
    if A.shape != (2, 2) or np.max(np.abs(A @ A - IDENTITY2)) > HERMITIAN_TOL:
        raise ValueError("projector requires a 2x2 observable squaring to the identity")
    if a not in (0, 1):
        raise ValueError(f"outcome bit must be 0 or 1, got {a!r}")
    return (IDENTITY2 + (-1) ** a * A) / 2
