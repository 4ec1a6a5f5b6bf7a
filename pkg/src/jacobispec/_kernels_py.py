"""Pure numpy implementations of the inner loops.

These mirror ``_kernels.pyx`` one to one and are used when the compiled
extension is unavailable (or when ``JACOBISPEC_PURE_PYTHON=1``).  Loops run
over the recursion index; work is vectorised across shifts / energies.

Array conventions shared with the compiled core:

* ``diag[0..N-1]``, ``off[0..N-2]`` describe a symmetric tridiagonal matrix.
* ``a[0..N]`` holds a(0)=1, a(1), ..., a(N); ``b[0..N]`` holds a dummy
  b(0) followed by b(1), ..., b(N).
"""

import numpy as np

SCALE_EXP = 512
_BIG = 2.0 ** SCALE_EXP
_SMALL = 2.0 ** -SCALE_EXP


def pivmin(diag, off):
    """Smallest allowed |pivot| in the LDL^T Sturm recursion."""
    scale = 1.0
    if diag.size:
        scale = max(scale, float(np.max(np.abs(diag))))
    if off.size:
        scale = max(scale, float(np.max(np.abs(off))))
    return 1e-14 * scale


def sturm_counts(diag, off, shifts):
    """Number of eigenvalues strictly below each shift."""
    diag = np.asarray(diag, dtype=float)
    off2 = np.asarray(off, dtype=float) ** 2
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    pm = pivmin(diag, np.sqrt(off2))
    count = np.zeros(shifts.shape, dtype=np.int64)
    d = diag[0] - shifts
    d = np.where(d == 0.0, pm, d)
    count += d < 0
    for k in range(1, diag.size):
        d = (diag[k] - shifts) - off2[k - 1] / d
        d = np.where(d == 0.0, pm, d)
        count += d < 0
    return count


def bisect_eigenvalues(diag, off, lo, hi, tol):
    """All eigenvalues of an unreduced tridiagonal block, by bisection.

    Every eigenvalue index is bracketed at once; each sweep halves all
    brackets with a single vectorised Sturm pass.
    """
    n = len(diag)
    target = np.arange(1, n + 1)
    left = np.full(n, float(lo))
    right = np.full(n, float(hi))
    while True:
        width = right - left
        if np.all(width <= tol):
            break
        mid = 0.5 * (left + right)
        # no further progress possible in floating point
        if np.all((mid == left) | (mid == right) | (width <= tol)):
            break
        c = sturm_counts(diag, off, mid)
        upper = c >= target
        right = np.where(upper, mid, right)
        left = np.where(upper, left, mid)
    return 0.5 * (left + right)


def _transfer(a, b, z, dtype):
    n_steps = len(a) - 1
    mant = np.zeros(n_steps + 2, dtype=dtype)
    exps = np.zeros(n_steps + 2, dtype=np.int64)
    f_prev = dtype(0.0)
    f_cur = dtype(1.0)
    e = 0
    mant[1] = f_cur
    for n in range(1, n_steps + 1):
        f_next = ((z - b[n]) * f_cur - a[n - 1] * f_prev) / a[n]
        f_prev, f_cur = f_cur, f_next
        big = max(abs(f_prev), abs(f_cur))
        if big > _BIG:
            f_prev *= _SMALL
            f_cur *= _SMALL
            e += SCALE_EXP
        elif 0.0 < big < _SMALL:
            f_prev *= _BIG
            f_cur *= _BIG
            e -= SCALE_EXP
        mant[n + 1] = f_cur
        exps[n + 1] = e
    return mant, exps


def transfer_real(a, b, t):
    """Scaled solution f(0..N+1) of the Jacobi recursion at real energy t."""
    return _transfer(np.asarray(a, float), np.asarray(b, float), float(t), np.float64)


def transfer_complex(a, b, z):
    """Scaled solution f(0..N+1) of the Jacobi recursion at complex z."""
    return _transfer(np.asarray(a, float), np.asarray(b, float), complex(z), np.complex128)


def log_abs_endpoint(a, b, energies):
    """ln|f(N+1, E)| for many energies (real or complex) at once."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    energies = np.atleast_1d(np.asarray(energies))
    dtype = np.complex128 if np.iscomplexobj(energies) else np.float64
    f_prev = np.zeros(energies.shape, dtype=dtype)
    f_cur = np.ones(energies.shape, dtype=dtype)
    log_scale = np.zeros(energies.shape)
    for n in range(1, len(a)):
        f_next = ((energies - b[n]) * f_cur - a[n - 1] * f_prev) / a[n]
        f_prev, f_cur = f_cur, f_next
        big = np.maximum(np.abs(f_prev), np.abs(f_cur))
        hit = big > _BIG
        if np.any(hit):
            f_prev = np.where(hit, f_prev * _SMALL, f_prev)
            f_cur = np.where(hit, f_cur * _SMALL, f_cur)
            log_scale += hit * (SCALE_EXP * np.log(2.0))
        low = (big > 0) & (big < _SMALL)
        if np.any(low):
            f_prev = np.where(low, f_prev * _BIG, f_prev)
            f_cur = np.where(low, f_cur * _BIG, f_cur)
            log_scale -= low * (SCALE_EXP * np.log(2.0))
    with np.errstate(divide="ignore"):
        return np.log(np.abs(f_cur)) + log_scale


def riccati_backward(a, b, z, seed):
    """m(n) = 1/(b(n) - z - a(n)^2 m(n+1)), rolled back from m(M+1) = seed.

    Returns m(1..M+1) as an array of length M+1 (index 0 is m(1)).
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    depth = len(a) - 1
    m = np.empty(depth + 1, dtype=np.complex128)
    m[depth] = seed
    cur = complex(seed)
    for n in range(depth, 0, -1):
        cur = 1.0 / (b[n] - z - a[n] * a[n] * cur)
        m[n - 1] = cur
    return m


def riccati_forward(a, b, z):
    """Top-truncated Weyl functions m_-(n) = <d_n, (J_[1,n] - z)^-1 d_n>.

    Returns m_-(1..N) (index 0 is m_-(1)).
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    n_steps = len(a) - 1
    out = np.empty(n_steps, dtype=np.complex128)
    cur = 0.0 + 0.0j
    for n in range(1, n_steps + 1):
        cur = 1.0 / (b[n] - z - a[n - 1] * a[n - 1] * cur)
        out[n - 1] = cur
    return out
