# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, log, fabs, M_PI
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef double TWO64 = 18446744073709551616.0
cdef int RENORM_EVERY = 32


def orbit_products(coeffs, alpha_fixed, x_fixed, t, checkpoints):
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] xs = np.ascontiguousarray(x_fixed, dtype=np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cks = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef Py_ssize_t M = xs.shape[0]
    cdef Py_ssize_t C = cks.shape[0]
    cdef Py_ssize_t K = (c.shape[0] - 1) // 2
    cdef cnp.ndarray[cnp.complex128_t, ndim=4] out_m = np.empty((C, M, 2, 2), dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_l = np.empty((C, M), dtype=np.float64)

    # split coefficients into real/imag planes: cr[mode, entry]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cr = np.ascontiguousarray(c.real.reshape(2 * K + 1, 4))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ci = np.ascontiguousarray(c.imag.reshape(2 * K + 1, 4))
    cdef uint64_t a = <uint64_t> int(alpha_fixed)

    cdef Py_ssize_t j, e, m, ck
    cdef int64_t step, target, since
    cdef uint64_t ph
    cdef double phase, tj, rad, wr, wi, wir, wii, pr, pi_, nr, ni, tr, ti
    cdef double er[4]
    cdef double ei[4]
    cdef double Pr[4]
    cdef double Pi[4]
    cdef double Qr[4]
    cdef double Qi[4]
    cdef double logacc, s, v

    for j in range(M):
        tj = ts[j]
        Pr[0] = 1.0; Pr[1] = 0.0; Pr[2] = 0.0; Pr[3] = 1.0
        Pi[0] = 0.0; Pi[1] = 0.0; Pi[2] = 0.0; Pi[3] = 0.0
        logacc = 0.0
        step = 0
        since = 0
        for ck in range(C):
            target = cks[ck]
            while step < target:
                ph = xs[j] + (<uint64_t> step) * a
                phase = (<double> ph) / TWO64
                for e in range(4):
                    er[e] = cr[K, e]
                    ei[e] = ci[K, e]
                if K > 0:
                    rad = exp(-2.0 * M_PI * tj)
                    wr = rad * cos(2.0 * M_PI * phase)
                    wi = rad * sin(2.0 * M_PI * phase)
                    wir = cos(2.0 * M_PI * phase) / rad
                    wii = -sin(2.0 * M_PI * phase) / rad
                    pr = 1.0; pi_ = 0.0; nr = 1.0; ni = 0.0
                    for m in range(1, K + 1):
                        tr = pr * wr - pi_ * wi
                        pi_ = pr * wi + pi_ * wr
                        pr = tr
                        tr = nr * wir - ni * wii
                        ni = nr * wii + ni * wir
                        nr = tr
                        for e in range(4):
                            er[e] += pr * cr[K + m, e] - pi_ * ci[K + m, e] + nr * cr[K - m, e] - ni * ci[K - m, e]
                            ei[e] += pr * ci[K + m, e] + pi_ * cr[K + m, e] + nr * ci[K - m, e] + ni * cr[K - m, e]
                # P <- A P
                Qr[0] = er[0] * Pr[0] - ei[0] * Pi[0] + er[1] * Pr[2] - ei[1] * Pi[2]
                Qi[0] = er[0] * Pi[0] + ei[0] * Pr[0] + er[1] * Pi[2] + ei[1] * Pr[2]
                Qr[1] = er[0] * Pr[1] - ei[0] * Pi[1] + er[1] * Pr[3] - ei[1] * Pi[3]
                Qi[1] = er[0] * Pi[1] + ei[0] * Pr[1] + er[1] * Pi[3] + ei[1] * Pr[3]
                Qr[2] = er[2] * Pr[0] - ei[2] * Pi[0] + er[3] * Pr[2] - ei[3] * Pi[2]
                Qi[2] = er[2] * Pi[0] + ei[2] * Pr[0] + er[3] * Pi[2] + ei[3] * Pr[2]
                Qr[3] = er[2] * Pr[1] - ei[2] * Pi[1] + er[3] * Pr[3] - ei[3] * Pi[3]
                Qi[3] = er[2] * Pi[1] + ei[2] * Pr[1] + er[3] * Pi[3] + ei[3] * Pr[3]
                for e in range(4):
                    Pr[e] = Qr[e]
                    Pi[e] = Qi[e]
                step += 1
                since += 1
                if since == RENORM_EVERY:
                    since = 0
                    s = 0.0
                    for e in range(4):
                        v = fabs(Pr[e])
                        if v > s:
                            s = v
                        v = fabs(Pi[e])
                        if v > s:
                            s = v
                    if s > 0.0:
                        for e in range(4):
                            Pr[e] /= s
                            Pi[e] /= s
                        logacc += log(s)
            # canonical output: largest entry modulus 1
            s = 0.0
            for e in range(4):
                v = Pr[e] * Pr[e] + Pi[e] * Pi[e]
                if v > s:
                    s = v
            s = s ** 0.5
            if s <= 0.0:
                s = 1.0
            for e in range(4):
                out_m[ck, j, e // 2, e % 2] = (Pr[e] / s) + 1j * (Pi[e] / s)
            out_l[ck, j] = logacc + log(s)
    return out_m, out_l


def riccati_sign_changes(v, energies):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] E = np.ascontiguousarray(energies, dtype=np.float64)
    cdef Py_ssize_t N = vv.shape[0]
    cdef Py_ssize_t nE = E.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(nE, dtype=np.int64)
    cdef Py_ssize_t i, n
    cdef double r, En
    cdef int64_t cnt
    for i in range(nE):
        En = E[i]
        r = En - vv[0]
        cnt = 1 if r < 0 else 0
        for n in range(1, N):
            if r == 0.0:
                r = 1e-300
            r = (En - vv[n]) - 1.0 / r
            if r < 0:
                cnt += 1
        out[i] = cnt
    return out
