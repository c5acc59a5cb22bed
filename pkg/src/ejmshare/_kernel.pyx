# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sequential-measurement kernel.

Two-qubit (Alice, Charlie) states are 4x4 row-major arrays with row index
``2*ia + ic``; single-qubit projectors are 2x2 row-major.
"""
import numpy as np

ctypedef double complex cplx


cdef inline void conj_alice(const cplx* r, const cplx* p, cplx* out) noexcept nogil:
    # out = (P x I) r (P x I)^+
    cdef int ia, ic, ja, jc, m, n
    cdef cplx acc
    for ia in range(2):
        for ic in range(2):
            for ja in range(2):
                for jc in range(2):
                    acc = 0
                    for m in range(2):
                        for n in range(2):
                            acc = acc + p[2 * ia + m] * r[4 * (2 * m + ic) + 2 * n + jc] * p[2 * ja + n].conjugate()
                    out[4 * (2 * ia + ic) + 2 * ja + jc] = acc


cdef inline void conj_charlie(const cplx* r, const cplx* p, cplx* out) noexcept nogil:
    # out = (I x P) r (I x P)^+
    cdef int ia, ic, ja, jc, m, n
    cdef cplx acc
    for ia in range(2):
        for ic in range(2):
            for ja in range(2):
                for jc in range(2):
                    acc = 0
                    for m in range(2):
                        for n in range(2):
                            acc = acc + p[2 * ic + m] * r[4 * (2 * ia + m) + 2 * ja + n] * p[2 * jc + n].conjugate()
                    out[4 * (2 * ia + ic) + 2 * ja + jc] = acc


cdef inline void mix3(double w0, const cplx* r0, double w1, const cplx* r1,
                      double w2, const cplx* r2, cplx* out) noexcept nogil:
    cdef int i
    for i in range(16):
        out[i] = w0 * r0[i] + w1 * r1[i] + w2 * r2[i]


cdef inline double trace_conj_charlie(const cplx* r, const cplx* p) noexcept nogil:
    # tr[(I x P) r (I x P)^+] without forming the product
    cdef int ia, ic, m, n
    cdef cplx acc = 0
    for ia in range(2):
        for ic in range(2):
            for m in range(2):
                for n in range(2):
                    acc = acc + p[2 * ic + m] * r[4 * (2 * ia + m) + 2 * ia + n] * p[2 * ic + n].conjugate()
    return acc.real


def sequential_tensor(rho_ac, proj_a1, proj_a2, proj_c1, proj_c2, weights_a, weights_c):
    """Joint outcome tensor of the Bob, Alice1, Alice2, Charlie1, Charlie2 sequence.

    See :func:`ejmshare._kernel_py.sequential_tensor` for the argument layout.
    """
    rho_arr = np.ascontiguousarray(rho_ac, dtype=complex)
    projs = [np.ascontiguousarray(p, dtype=complex) for p in (proj_a1, proj_a2, proj_c1, proj_c2)]
    wa_arr = np.ascontiguousarray(weights_a, dtype=float)
    wc_arr = np.ascontiguousarray(weights_c, dtype=float)
    if rho_arr.shape != (4, 4, 4):
        raise ValueError("rho_ac must have shape (4, 4, 4)")
    if any(p.shape != (3, 2, 2, 2) for p in projs):
        raise ValueError("projector arrays must have shape (3, 2, 2, 2)")
    if wa_arr.shape != (2, 3) or wc_arr.shape != (2, 3):
        raise ValueError("weights must have shape (2, 3)")
    cdef const cplx[:, :, ::1] rho = rho_arr
    cdef const cplx[:, :, :, ::1] pa1 = projs[0]
    cdef const cplx[:, :, :, ::1] pa2 = projs[1]
    cdef const cplx[:, :, :, ::1] pc1 = projs[2]
    cdef const cplx[:, :, :, ::1] pc2 = projs[3]
    cdef const double[:, ::1] wa = wa_arr
    cdef const double[:, ::1] wc = wc_arr

    result = np.zeros(3 * 3 * 3 * 3 * 2 * 2 * 4 * 2 * 2, dtype=float)
    cdef double[::1] out = result
    cdef cplx u1[16]
    cdef cplx u0[16]
    cdef cplx s1[16]
    cdef cplx s2[16]
    cdef cplx v1[16]
    cdef cplx v0[16]
    cdef cplx s3[16]
    cdef const cplx* r
    cdef int b, x1, a1, x2, a2, z1, c1, z2, c2

    with nogil:
        for b in range(4):
            r = &rho[b, 0, 0]
            for x1 in range(3):
                conj_alice(r, &pa1[x1, 1, 0, 0], u1)
                conj_alice(r, &pa1[x1, 0, 0, 0], u0)
                for a1 in range(2):
                    mix3(wa[a1, 0], r, wa[a1, 1], u1, wa[a1, 2], u0, s1)
                    for x2 in range(3):
                        for a2 in range(2):
                            conj_alice(s1, &pa2[x2, a2, 0, 0], s2)
                            for z1 in range(3):
                                conj_charlie(s2, &pc1[z1, 1, 0, 0], v1)
                                conj_charlie(s2, &pc1[z1, 0, 0, 0], v0)
                                for c1 in range(2):
                                    mix3(wc[c1, 0], s2, wc[c1, 1], v1, wc[c1, 2], v0, s3)
                                    for z2 in range(3):
                                        for c2 in range(2):
                                            # row-major [x1, x2, z1, z2, a1, a2, b, c1, c2]
                                            out[((((((((x1 * 3 + x2) * 3 + z1) * 3 + z2) * 2 + a1) * 2
                                                   + a2) * 4 + b) * 2 + c1) * 2 + c2)] = trace_conj_charlie(s3, &pc2[z2, c2, 0, 0])
    return result.reshape(3, 3, 3, 3, 2, 2, 4, 2, 2)
