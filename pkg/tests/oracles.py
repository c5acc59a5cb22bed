"""Independent reference computations used as test oracles.

Nothing here imports the package: states, observables and the EJM basis are
rebuilt from their defining formulas, and probabilities come from state-vector
amplitudes rather than density-matrix updates.
"""
import itertools
import math

import numpy as np

PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
SIGNS = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def spin_ket(n):
    """Eigenvector of n.sigma with eigenvalue +1 (n a unit vector)."""
    op = n[0] * PX + n[1] * PY + n[2] * PZ
    w, v = np.linalg.eigh(op)
    return v[:, np.argmax(w)]


def ejm_states(theta):
    out = []
    for m in SIGNS:
        n = np.array(m, float) / math.sqrt(3)
        up, down = spin_ket(n), spin_ket(-n)
        cp = (math.sqrt(3) + np.exp(1j * theta)) / (2 * math.sqrt(2))
        cm = (math.sqrt(3) - np.exp(1j * theta)) / (2 * math.sqrt(2))
        out.append(cp * np.kron(up, down) + cm * np.kron(down, up))
    return out


def ejm_concurrence(theta):
    """Closed form 2|c+||c-| of the Schmidt decomposition."""
    return math.sqrt(16 - 12 * math.cos(theta) ** 2) / 4


def triad_vectors(alpha, beta, gamma):
    ca, sa, cb, sb, cg, sg = (math.cos(alpha), math.sin(alpha), math.cos(beta),
                              math.sin(beta), math.cos(gamma), math.sin(gamma))
    return [
        np.array([cb * cg, sa * sb * cg - ca * sg, ca * sb * cg + sa * sg]),
        np.array([cb * sg, sa * sb * sg + ca * cg, ca * sb * sg - sa * cg]),
        np.array([-sb, sa * cb, ca * cb]),
    ]


def strong_three_party(theta, angles_a, angles_c):
    """P(v_a, b, v_c | x, z) for singlet sources and projective end parties.

    Indexed ``[x, z, ia, b, ic]`` where ``ia = 0`` means value +1.
    """
    psi = np.kron(PSI_MINUS, PSI_MINUS)  # qubits A, B1, B2, C
    ejm = ejm_states(theta)
    va, vc = triad_vectors(*angles_a), triad_vectors(*angles_c)
    out = np.zeros((3, 3, 2, 4, 2))
    for x, z in itertools.product(range(3), range(3)):
        for ia, sa in enumerate((1, -1)):
            ea = spin_ket(sa * va[x])
            for ic, sc in enumerate((1, -1)):
                ec = spin_ket(sc * vc[z])
                for b in range(4):
                    bra = np.kron(np.kron(ea, ejm[b]), ec).conj()
                    out[x, z, ia, b, ic] = abs(bra @ psi) ** 2
    return out


def tbg_value(p):
    """S/3 - T from a value-indexed distribution ``[x, z, ia, b, ic]`` by direct summation."""
    val = (1, -1)

    def corr(x, y, z, use_a, use_b, use_c):
        s = 0.0
        for ia, b, ic in itertools.product(range(2), range(4), range(2)):
            f = 1.0
            if use_a:
                f *= val[ia]
            if use_b:
                f *= SIGNS[b][y]
            if use_c:
                f *= val[ic]
            s += f * p[x, z, ia, b, ic]
        return s

    S = sum(corr(0, y, y, False, True, True) for y in range(3)) \
        - sum(corr(x, x, 0, True, True, False) for x in range(3))
    T = sum(corr(x, y, z, True, True, True) for x, y, z in itertools.permutations(range(3)))
    return S / 3 - T


def random_density(rng, dim, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
