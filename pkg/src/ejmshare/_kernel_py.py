"""Pure numpy implementation of the sequential-measurement kernel."""
from __future__ import annotations

import numpy as np


def _conj_alice(r, p):
    # r: (..., 2, 2, 2, 2) as (ia, ic, ja, jc); p: (x, k, 2, 2)
    return np.einsum("xkim,...mcnd,xkjn->...xkicjd", p, r, p.conj())


def _conj_charlie(r, p):
    return np.einsum("xkcm,...imjn,xkdn->...xkicjd", p, r, p.conj())


def _weak(r, conj, w):
    # conj[..., x, k] holds the U_k-conjugated state; w[a] = (id, U1, U0) weights
    ident = np.broadcast_to(r[..., None, :, :, :, :], conj[..., 0, :, :, :, :].shape)
    stacked = np.stack([ident, conj[..., 1, :, :, :, :], conj[..., 0, :, :, :, :]], axis=-5)
    return np.einsum("aw,...xwicjd->...xaicjd", w, stacked)


def sequential_tensor(rho_ac, proj_a1, proj_a2, proj_c1, proj_c2, weights_a, weights_c):
    """Joint outcome tensor of the Bob, Alice1, Alice2, Charlie1, Charlie2 sequence.

    Parameters
    ----------
    rho_ac : (4, 4, 4) complex
        Unnormalized Alice-Charlie state for each EJM outcome.
    proj_a1, proj_a2, proj_c1, proj_c2 : (3, 2, 2, 2) complex
        ``proj[x, k]`` is the projector ``(I + (-1)**k A_x)/2`` of each party.
    weights_a, weights_c : (2, 3) float
        Weak-channel weights ``(identity, U1, U0)`` per outcome for Alice1 and
        Charlie1.

    Returns
    -------
    ndarray, shape (3, 3, 3, 3, 2, 2, 4, 2, 2)
        Probabilities indexed ``[x1, x2, z1, z2, a1, a2, b, c1, c2]``.
    """
    r = np.asarray(rho_ac, dtype=complex).reshape(4, 2, 2, 2, 2)
    wa = np.asarray(weights_a, dtype=float)
    wc = np.asarray(weights_c, dtype=float)
    r1 = _weak(r, _conj_alice(r, proj_a1), wa)           # b x1 a1
    r2 = _conj_alice(r1, proj_a2)                        # b x1 a1 x2 a2
    r3 = _weak(r2, _conj_charlie(r2, proj_c1), wc)       # ... z1 c1
    pc2 = np.asarray(proj_c2)
    # trace of the final Lüders-updated state
    p = np.einsum("zkcm,...imin,zkcn->...zk", pc2, r3, pc2.conj()).real
    # p axes: b x1 a1 x2 a2 z1 c1 z2 c2
    return np.ascontiguousarray(p.transpose(1, 3, 5, 7, 2, 4, 0, 6, 8))
