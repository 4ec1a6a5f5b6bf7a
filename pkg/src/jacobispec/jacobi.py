"""Half-line Jacobi operators: coefficient models, solutions and spectra.

The operator acts as ``(Ju)(n) = a(n) u(n+1) + a(n-1) u(n-1) + b(n) u(n)``
on l2({1, 2, ...}) with the convention a(0) = 1.
"""

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, getcontext

import numpy as np

from . import kernels

EIG_TOL = 1e-12
PRUFER_SLACK = 1e-9


# --------------------------------------------------------------------------
# coefficient models


def _split(x):
    """Veltkamp split x = hi + lo with 26-bit halves (n * half is exact for n < 2**26)."""
    c = 134217729.0 * x
    hi = c - (c - x)
    return hi, x - hi


def _golden():
    getcontext().prec = 50
    exact = (Decimal(5).sqrt() - 1) / 2
    hi = float(exact)
    return hi, float(exact - Decimal(hi))


@dataclass(frozen=True)
class CoeffModel:
    """Base class; subclasses fill in :meth:`_raw`.

    ``arrays(N)`` returns ``a[0..N]`` (with a[0] = 1) and ``b[0..N]``
    (with a dummy b[0] = 0), the layout the kernels use.
    """

    kind = "abstract"

    def _raw(self, n):
        raise NotImplementedError

    def arrays(self, N):
        n = np.arange(1, N + 1)
        a, b = self._raw(n)
        return np.r_[1.0, a], np.r_[0.0, b]

    def coeffs(self, n):
        """(a(n), b(n)); n = 0 gives (1, 0)."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return 1.0, 0.0
        a, b = self._raw(np.array([n]))
        return float(a[0]), float(b[0])

    @property
    def bound(self):
        """A constant C with 1/(C+1) <= a(n) <= C+1 and |b(n)| <= C."""
        a_lo, a_hi, b_max = self._ranges()
        return max(1.0, b_max, a_hi - 1.0, 1.0 / a_lo - 1.0)

    def _ranges(self):
        raise NotImplementedError

    def tail(self):
        """Exactly solvable tail: ``("free", start)``, ``("periodic", start)`` or None."""
        return None

    def to_dict(self):
        raise NotImplementedError

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class FreeModel(CoeffModel):
    kind = "free"

    def _raw(self, n):
        return np.ones(n.shape), np.zeros(n.shape)

    def _ranges(self):
        return 1.0, 1.0, 0.0

    def tail(self):
        return ("free", 1)

    def to_dict(self):
        return {"kind": "free"}


@dataclass(frozen=True)
class PeriodicModel(CoeffModel):
    a_table: tuple
    b_table: tuple
    kind = "periodic"

    def __post_init__(self):
        a = tuple(float(v) for v in self.a_table)
        b = tuple(float(v) for v in self.b_table)
        if len(a) != len(b) or not a:
            raise ValueError("periodic tables must be nonempty and of equal length")
        if min(a) <= 0:
            raise ValueError("a(n) must be positive")
        object.__setattr__(self, "a_table", a)
        object.__setattr__(self, "b_table", b)

    @property
    def period(self):
        return len(self.a_table)

    def _raw(self, n):
        idx = (n - 1) % self.period
        return np.asarray(self.a_table)[idx], np.asarray(self.b_table)[idx]

    def _ranges(self):
        return min(self.a_table), max(self.a_table), max(abs(v) for v in self.b_table)

    def tail(self):
        return ("periodic", 1)

    def to_dict(self):
        return {"kind": "periodic", "a": list(self.a_table), "b": list(self.b_table)}


@dataclass(frozen=True)
class QuasiPeriodicModel(CoeffModel):
    """a = 1, b(n) = 2 lam cos(2 pi (alpha n + theta)).

    ``alpha="golden"`` stores the golden mean as a double-double so the
    phase alpha*n mod 1 stays accurate for large n.
    """

    lam: float
    alpha: object = "golden"
    theta: float = 0.0
    kind = "quasiperiodic"
    _alpha_parts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.alpha == "golden":
            hi, lo = _golden()
        else:
            hi, lo = float(self.alpha), 0.0
        object.__setattr__(self, "_alpha_parts", (hi, lo))

    def phase(self, n):
        n = np.asarray(n, dtype=float)
        hi, lo = self._alpha_parts
        h1, h2 = _split(hi)
        p = np.mod(n * h1, 1.0) + np.mod(n * h2, 1.0) + (n * lo + self.theta)
        return np.mod(p, 1.0)

    def _raw(self, n):
        return np.ones(n.shape), 2.0 * self.lam * np.cos(2.0 * np.pi * self.phase(n))

    def _ranges(self):
        return 1.0, 1.0, 2.0 * abs(self.lam)

    def to_dict(self):
        return {"kind": "quasiperiodic", "lambda": self.lam, "alpha": self.alpha, "theta": self.theta}


@dataclass(frozen=True)
class RandomModel(CoeffModel):
    """Independent uniform a(n) in a_range and b(n) in b_range.

    Coefficients come from a seeded PCG64 stream, drawn as (a, b) pairs in
    order of n, so every prefix is reproducible.
    """

    seed: int
    a_range: tuple = (1.0, 1.0)
    b_range: tuple = (-1.0, 1.0)
    kind = "random"

    def __post_init__(self):
        if not 0 < self.a_range[0] <= self.a_range[1]:
            raise ValueError("a_range must be a positive interval")
        if self.b_range[0] > self.b_range[1]:
            raise ValueError("b_range must be an interval")

    def _raw(self, n):
        top = int(np.max(n)) if n.size else 0
        u = np.random.default_rng(self.seed).random((top, 2))
        (alo, ahi), (blo, bhi) = self.a_range, self.b_range
        a = alo + (ahi - alo) * u[:, 0]
        b = blo + (bhi - blo) * u[:, 1]
        return a[n - 1], b[n - 1]

    def _ranges(self):
        return self.a_range[0], self.a_range[1], max(abs(v) for v in self.b_range)

    def to_dict(self):
        return {"kind": "random", "seed": self.seed, "a": list(self.a_range), "b": list(self.b_range)}


@dataclass(frozen=True)
class TableModel(CoeffModel):
    """Explicit a(1..L), b(1..L) followed by the free tail a = 1, b = 0."""

    a_table: tuple
    b_table: tuple
    kind = "table"

    def __post_init__(self):
        a = tuple(float(v) for v in self.a_table)
        b = tuple(float(v) for v in self.b_table)
        if len(a) != len(b):
            raise ValueError("a and b tables differ in length")
        if a and min(a) <= 0:
            raise ValueError("a(n) must be positive")
        object.__setattr__(self, "a_table", a)
        object.__setattr__(self, "b_table", b)

    def _raw(self, n):
        at = np.r_[np.asarray(self.a_table), 1.0]
        bt = np.r_[np.asarray(self.b_table), 0.0]
        idx = np.minimum(n - 1, len(self.a_table))
        return at[idx], bt[idx]

    def _ranges(self):
        a = self.a_table + (1.0,)
        return min(a), max(a), max([abs(v) for v in self.b_table] + [0.0])

    def tail(self):
        return ("free", len(self.a_table) + 1)

    def to_dict(self):
        return {"kind": "table", "a": list(self.a_table), "b": list(self.b_table)}


def model_from_dict(doc):
    kind = doc.get("kind")
    if kind == "free":
        return FreeModel()
    if kind == "periodic":
        return PeriodicModel(tuple(doc["a"]), tuple(doc["b"]))
    if kind in ("quasiperiodic", "qp"):
        alpha = doc.get("alpha", "golden")
        alpha = alpha if alpha == "golden" else float(alpha)
        return QuasiPeriodicModel(float(doc["lambda"]), alpha, float(doc.get("theta", 0.0)))
    if kind == "random":
        return RandomModel(int(doc["seed"]), tuple(doc.get("a", (1.0, 1.0))), tuple(doc.get("b", (-1.0, 1.0))))
    if kind == "table":
        return TableModel(tuple(doc["a"]), tuple(doc["b"]))
    raise ValueError(f"unknown model kind {kind!r}")


def coeffs(model, n):
    return model.coeffs(n)


# --------------------------------------------------------------------------
# solutions of the difference equation


@dataclass(frozen=True, eq=False)
class SolutionTrace:
    """f(0..N+1) stored as mantissa * 2**exponent."""

    z: complex
    mant: np.ndarray
    exps: np.ndarray

    @property
    def N(self):
        return self.mant.size - 2

    def log_abs(self):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mant)) + self.exps * math.log(2.0)

    def values(self):
        """Unscaled values (may overflow for long traces)."""
        return self.mant * np.exp2(self.exps.astype(float))

    def residual(self, model):
        """Max relative residual of the recursion for 1 <= n <= N, after unscaling."""
        a, b = model.arrays(self.N)
        f = self.values()
        n = np.arange(1, self.N + 1)
        lhs = a[n] * f[n + 1] + a[n - 1] * f[n - 1] + b[n] * f[n]
        rhs = self.z * f[n]
        scale = np.maximum.reduce([np.abs(a[n] * f[n + 1]), np.abs(a[n - 1] * f[n - 1]), np.abs(self.z * f[n]), np.full(n.size, 1e-300)])
        return float(np.max(np.abs(lhs - rhs) / scale))


def fminus(model, z, N):
    """Solution with f(0) = 0, f(1) = 1 at energy z, for n = 0..N+1."""
    if N < 1:
        raise ValueError("N must be at least 1")
    a, b = model.arrays(N)
    if np.iscomplexobj(z) and complex(z).imag != 0:
        mant, exps = kernels.transfer_complex(a, b, complex(z))
        return SolutionTrace(complex(z), mant, exps)
    mant, exps = kernels.transfer_real(a, b, float(np.real(z)))
    return SolutionTrace(float(np.real(z)), mant, exps)


def solution(model, z, N, f0, f1):
    """Unscaled solution with prescribed f(0), f(1) (plain loop, short N only)."""
    a, b = model.arrays(N)
    f = np.zeros(N + 2, dtype=complex if np.iscomplexobj(z) or isinstance(z, complex) else float)
    f[0], f[1] = f0, f1
    for n in range(1, N + 1):
        f[n + 1] = ((z - b[n]) * f[n] - a[n - 1] * f[n - 1]) / a[n]
    return f


def wronskian(model, u, v):
    """W(u, v)(n) = a(n) (u(n) v(n+1) - u(n+1) v(n)) for n = 0..N."""
    N = len(u) - 2
    a, _ = model.arrays(N)
    return a * (u[:-1] * v[1:] - u[1:] * v[:-1])


def sign_changes(trace):
    """Sign changes along f(1..N+1) (zeros skipped) for a real trace."""
    s = np.sign(np.real(trace.mant[1:]))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


@dataclass(frozen=True, eq=False)
class PruferTrace:
    """R(1..N+1) (as log R) and phi(1..N+1); f = R exp(i phi)."""

    log_R: np.ndarray
    phi: np.ndarray


def prufer_minus(model, z, N):
    """Polar form of f_- with phi(1) = 0 and increments in (0, pi)."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("prufer_minus needs Im z > 0")
    tr = fminus(model, z, N)
    m = tr.mant[1:]
    unit = m / np.abs(m)
    inc = np.angle(unit[1:] * np.conj(unit[:-1]))
    if np.any(inc < -PRUFER_SLACK) or np.any(inc > math.pi + PRUFER_SLACK):
        raise RuntimeError("Prufer increment outside (0, pi): branch error")
    inc = np.clip(inc, 0.0, math.pi)
    phi = np.r_[0.0, np.cumsum(inc)]
    return PruferTrace(tr.log_abs()[1:], phi)


# --------------------------------------------------------------------------
# m-functions and Green function averages


def m_free(z):
    """(-z + sqrt(z^2 - 4))/2 with the Herglotz branch."""
    z = np.asarray(z, dtype=complex)
    return 0.5 * (-z + np.sqrt(z - 2) * np.sqrt(z + 2))


def _periodic_fixed_point(model, z, start):
    """m(start) for a coefficient sequence periodic from ``start`` on."""
    p = model.period
    mat = np.eye(2, dtype=complex)
    for n in range(start, start + p):
        a, b = model.coeffs(n)
        mat = mat @ np.array([[0.0, 1.0], [-a * a, b - z]], dtype=complex)
    (al, be), (ga, de) = mat
    # ga m^2 + (de - al) m - be = 0
    if ga == 0:
        return -be / (de - al)
    disc = np.sqrt((de - al) ** 2 + 4 * ga * be)
    roots = [(-(de - al) + disc) / (2 * ga), (-(de - al) - disc) / (2 * ga)]
    # attracting fixed point: |ga m + de| largest
    return max(roots, key=lambda r: abs(ga * r + de))


def _tail_seed(model, z, index):
    tail = model.tail()
    if tail is None or index < tail[1]:
        return None
    if tail[0] == "free":
        return complex(m_free(z))
    return complex(_periodic_fixed_point(model, z, index))


@dataclass(frozen=True)
class MSequence:
    """m_+(n) = <d_n, (J_[n,inf) - z)^-1 d_n> for n = 1..len(values)."""

    values: np.ndarray
    error: float
    exact_tail: bool


def m_plus_sequence(model, z, upto, depth=None):
    """m_+(1..upto) by backward continued fraction from an exact or truncated tail."""
    z = complex(z)
    tail = model.tail()
    if tail is not None:
        start = max(upto, tail[1])
        a, b = model.arrays(start - 1)
        seq = kernels.riccati_backward(a, b, z, _tail_seed(model, z, start))
        return MSequence(seq[:upto], 0.0, True)
    depth = max(depth or 0, upto + max(1000, 2 * upto))
    a, b = model.arrays(depth)
    hard = kernels.riccati_backward(a, b, z, 0j)
    soft = kernels.riccati_backward(a, b, z, complex(m_free(z)))
    err = float(np.max(np.abs(hard[:upto] - soft[:upto])))
    return MSequence(hard[:upto], err, False)


def m_plus(model, z, depth=None, with_error=False):
    """Weyl m-function <d_1, (J - z)^-1 d_1>."""
    z = complex(z)
    seq = m_plus_sequence(model, z, 1, depth)
    if z.imag > 0 and not seq.values[0].imag > 0:
        raise RuntimeError("m_plus lost the Herglotz property")
    if with_error:
        return complex(seq.values[0]), seq.error
    return complex(seq.values[0])


@dataclass(frozen=True)
class GreenAverage:
    value: complex
    error: float


def green_avg(model, z, N, depth=None, floor=1e-3, with_error=False):
    """(1/N) sum_{n<=N} <d_n, (J - z)^-1 d_n>.

    The forward Riccati recursion supplies the top-truncated Weyl functions
    and the backward one the half-line tails, so each diagonal entry comes
    from a single division.  Without an exactly solvable tail, the matrix
    is truncated at ``depth`` and Im z must stay above ``floor``.
    """
    z = complex(z)
    if model.tail() is None and z.imag < floor:
        raise ValueError(f"Im z = {z.imag} below the floor {floor} for a truncated model")
    mp = m_plus_sequence(model, z, N + 1, depth)
    a, b = model.arrays(N)
    mm = np.r_[0.0, kernels.riccati_forward(a[:N], b[:N], z)]
    n = np.arange(1, N + 1)
    denom = b[n] - z - a[n - 1] ** 2 * mm[:N] - a[n] ** 2 * mp.values[1 : N + 1]
    if np.any(denom == 0):
        raise ZeroDivisionError("singular resolvent entry; Im z too small")
    value = complex(np.mean(1.0 / denom))
    if with_error:
        return GreenAverage(value, mp.error / max(z.imag, 1e-300) ** 2 if mp.error else 0.0)
    return value


# --------------------------------------------------------------------------
# finite truncations


@dataclass(frozen=True, eq=False)
class Tridiagonal:
    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        o = np.asarray(self.off, dtype=float)
        if o.size != max(d.size - 1, 0):
            raise ValueError("off-diagonal must have length N-1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off", o)

    @property
    def N(self):
        return self.diag.size

    def dense(self):
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def gershgorin(self):
        r = np.zeros(self.N)
        r[:-1] += np.abs(self.off)
        r[1:] += np.abs(self.off)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))

    def trace_powers(self, nmax):
        """tr(J^n) for n = 0..nmax, by repeated dense multiplication."""
        J = self.dense()
        P = np.eye(self.N)
        out = [float(self.N)]
        for _ in range(nmax):
            P = P @ J
            out.append(float(np.trace(P)))
        return np.array(out)


def truncate(model, N):
    """J_N: the N x N Dirichlet truncation."""
    a, b = model.arrays(N)
    return Tridiagonal(b[1:], a[1:N])


def sturm_count(J, t):
    """Number of eigenvalues of J strictly below t."""
    return int(kernels.sturm_counts(J.diag, J.off, np.array([float(t)]))[0])


def eigenvalues(J, tol=EIG_TOL):
    """All eigenvalues of J, ascending, by Sturm bisection."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    cuts = np.flatnonzero(J.off == 0.0) + 1
    out = []
    for start, stop in zip(np.r_[0, cuts], np.r_[cuts, J.N]):
        block = Tridiagonal(J.diag[start:stop], J.off[start : stop - 1])
        lo, hi = block.gershgorin()
        pad = tol + 1e-12 * max(1.0, abs(lo), abs(hi))
        out.append(kernels.bisect_eigenvalues(block.diag, block.off, lo - pad, hi + pad, tol))
    ev = np.sort(np.concatenate(out)) if out else np.empty(0)
    assert np.all(np.diff(ev) >= 0)
    return ev
