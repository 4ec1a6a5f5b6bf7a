# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; same signatures as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, log, ldexp

cnp.import_array()

DEF SCALE_EXP = 512

cdef double _BIG = ldexp(1.0, SCALE_EXP)
cdef double _SMALL = ldexp(1.0, -SCALE_EXP)


cdef inline double _cabs(double complex w) nogil:
    cdef double re = w.real
    cdef double im = w.imag
    return (re * re + im * im) ** 0.5


def pivmin(double[::1] diag, double[::1] off):
    cdef double scale = 1.0
    cdef Py_ssize_t k
    for k in range(diag.shape[0]):
        if fabs(diag[k]) > scale:
            scale = fabs(diag[k])
    for k in range(off.shape[0]):
        if fabs(off[k]) > scale:
            scale = fabs(off[k])
    return 1e-14 * scale


cdef inline long _count(const double* diag, const double* off2, Py_ssize_t n,
                        double t, double pm) nogil:
    cdef long count = 0
    cdef double d = diag[0] - t
    cdef Py_ssize_t k
    if d == 0.0:
        d = pm
    if d < 0.0:
        count += 1
    for k in range(1, n):
        d = (diag[k] - t) - off2[k - 1] / d
        if d == 0.0:
            d = pm
        if d < 0.0:
            count += 1
    return count


def sturm_counts(diag, off, shifts):
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] of = np.ascontiguousarray(off, dtype=np.float64)
    cdef double[::1] off2 = np.ascontiguousarray(np.asarray(of) ** 2)
    cdef double[::1] sh = np.ascontiguousarray(np.atleast_1d(shifts), dtype=np.float64)
    cdef Py_ssize_t n = dg.shape[0]
    cdef Py_ssize_t i
    cdef double pm = pivmin(dg, of)
    out = np.zeros(sh.shape[0], dtype=np.int64)
    cdef long long[::1] res = out
    cdef const double* o2 = &off2[0] if off2.shape[0] else NULL
    with nogil:
        for i in range(sh.shape[0]):
            res[i] = _count(&dg[0], o2, n, sh[i], pm)
    return out


def bisect_eigenvalues(diag, off, double lo, double hi, double tol):
    cdef double[::1] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] of = np.ascontiguousarray(off, dtype=np.float64)
    cdef double[::1] off2 = np.ascontiguousarray(np.asarray(of) ** 2)
    cdef Py_ssize_t n = dg.shape[0]
    cdef Py_ssize_t j
    cdef double pm = pivmin(dg, of)
    cdef double left, right, mid
    cdef const double* o2 = &off2[0] if off2.shape[0] else NULL
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for j in range(n):
            left = lo
            right = hi
            while right - left > tol:
                mid = 0.5 * (left + right)
                if mid == left or mid == right:
                    break
                if _count(&dg[0], o2, n, mid, pm) >= j + 1:
                    right = mid
                else:
                    left = mid
            res[j] = 0.5 * (left + right)
            # eigenvalue j+1 is not below eigenvalue j
            lo = left
    return out


def transfer_real(a, b, double t):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t steps = av.shape[0] - 1
    mant_arr = np.zeros(steps + 2, dtype=np.float64)
    exps_arr = np.zeros(steps + 2, dtype=np.int64)
    cdef double[::1] mant = mant_arr
    cdef long long[::1] exps = exps_arr
    cdef double f_prev = 0.0, f_cur = 1.0, f_next, big
    cdef long long e = 0
    cdef Py_ssize_t n
    mant[1] = 1.0
    with nogil:
        for n in range(1, steps + 1):
            f_next = ((t - bv[n]) * f_cur - av[n - 1] * f_prev) / av[n]
            f_prev = f_cur
            f_cur = f_next
            big = fabs(f_prev) if fabs(f_prev) > fabs(f_cur) else fabs(f_cur)
            if big > _BIG:
                f_prev *= _SMALL
                f_cur *= _SMALL
                e += SCALE_EXP
            elif big > 0.0 and big < _SMALL:
                f_prev *= _BIG
                f_cur *= _BIG
                e -= SCALE_EXP
            mant[n + 1] = f_cur
            exps[n + 1] = e
    return mant_arr, exps_arr


def transfer_complex(a, b, double complex z):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t steps = av.shape[0] - 1
    mant_arr = np.zeros(steps + 2, dtype=np.complex128)
    exps_arr = np.zeros(steps + 2, dtype=np.int64)
    cdef double complex[::1] mant = mant_arr
    cdef long long[::1] exps = exps_arr
    cdef double complex f_prev = 0.0, f_cur = 1.0, f_next
    cdef double big, p, c
    cdef long long e = 0
    cdef Py_ssize_t n
    mant[1] = 1.0
    with nogil:
        for n in range(1, steps + 1):
            f_next = ((z - bv[n]) * f_cur - av[n - 1] * f_prev) / av[n]
            f_prev = f_cur
            f_cur = f_next
            p = _cabs(f_prev)
            c = _cabs(f_cur)
            big = p if p > c else c
            if big > _BIG:
                f_prev = f_prev * _SMALL
                f_cur = f_cur * _SMALL
                e += SCALE_EXP
            elif big > 0.0 and big < _SMALL:
                f_prev = f_prev * _BIG
                f_cur = f_cur * _BIG
                e -= SCALE_EXP
            mant[n + 1] = f_cur
            exps[n + 1] = e
    return mant_arr, exps_arr


def log_abs_endpoint(a, b, energies):
    energies = np.atleast_1d(np.asarray(energies))
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t steps = av.shape[0] - 1
    cdef Py_ssize_t i, n
    cdef double log2s = SCALE_EXP * log(2.0)
    cdef double scale, big, p, c, fp, fc, fn
    cdef double complex zp, zc, zn, zz
    cdef double[::1] er
    cdef double complex[::1] ec
    out = np.empty(energies.shape[0], dtype=np.float64)
    cdef double[::1] res = out
    if np.iscomplexobj(energies):
        ec = np.ascontiguousarray(energies, dtype=np.complex128)
        with nogil:
            for i in range(ec.shape[0]):
                zz = ec[i]
                zp = 0.0
                zc = 1.0
                scale = 0.0
                for n in range(1, steps + 1):
                    zn = ((zz - bv[n]) * zc - av[n - 1] * zp) / av[n]
                    zp = zc
                    zc = zn
                    p = _cabs(zp)
                    c = _cabs(zc)
                    big = p if p > c else c
                    if big > _BIG:
                        zp = zp * _SMALL
                        zc = zc * _SMALL
                        scale += log2s
                    elif big > 0.0 and big < _SMALL:
                        zp = zp * _BIG
                        zc = zc * _BIG
                        scale -= log2s
                c = _cabs(zc)
                res[i] = (log(c) if c > 0.0 else -1.0 / 0.0) + scale
    else:
        er = np.ascontiguousarray(energies, dtype=np.float64)
        with nogil:
            for i in range(er.shape[0]):
                fp = 0.0
                fc = 1.0
                scale = 0.0
                for n in range(1, steps + 1):
                    fn = ((er[i] - bv[n]) * fc - av[n - 1] * fp) / av[n]
                    fp = fc
                    fc = fn
                    big = fabs(fp) if fabs(fp) > fabs(fc) else fabs(fc)
                    if big > _BIG:
                        fp *= _SMALL
                        fc *= _SMALL
                        scale += log2s
                    elif big > 0.0 and big < _SMALL:
                        fp *= _BIG
                        fc *= _BIG
                        scale -= log2s
                res[i] = (log(fabs(fc)) if fc != 0.0 else -1.0 / 0.0) + scale
    return out


def riccati_backward(a, b, double complex z, double complex seed):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t depth = av.shape[0] - 1
    cdef Py_ssize_t n
    out = np.empty(depth + 1, dtype=np.complex128)
    cdef double complex[::1] m = out
    cdef double complex cur = seed
    m[depth] = seed
    with nogil:
        for n in range(depth, 0, -1):
            cur = 1.0 / (bv[n] - z - av[n] * av[n] * cur)
            m[n - 1] = cur
    return out


def riccati_forward(a, b, double complex z):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t steps = av.shape[0] - 1
    cdef Py_ssize_t n
    out = np.empty(steps, dtype=np.complex128)
    cdef double complex[::1] m = out
    cdef double complex cur = 0.0
    with nogil:
        for n in range(1, steps + 1):
            cur = 1.0 / (bv[n] - z - av[n - 1] * av[n - 1] * cur)
            m[n - 1] = cur
    return out
