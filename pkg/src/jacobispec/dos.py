"""Density of states, Lyapunov exponents and the identities tying them together."""

import csv
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from ._limits import default_schedule
from .herglotz import boundary_value
from .jacobi import eigenvalues, green_avg, m_plus_sequence, prufer_minus, truncate
from .measures import Measure, log_potential, moment

MOMENT_ORDER = 8
DAP_THRESHOLD = 0.1
DAP_CONSECUTIVE = 3
DAP_EPS = (0.2, 0.1, 0.05)
DAP_HS = tuple(2.0 ** -np.arange(2, 8))
HOLDER_HS = tuple(2.0 ** -np.arange(2, 11))


@dataclass(frozen=True, eq=False)
class DosResult:
    """dk_N = (1/N) sum of Dirac masses at the eigenvalues of J_N.

    ``log_A`` is the mean of ln a(1..N); ``A`` its exponential.
    """

    dk: Measure
    log_A: float
    N: int

    @property
    def A(self):
        return math.exp(self.log_A)

    @property
    def eigenvalues(self):
        return self.dk.atom_pos


def dos_measure(model, N):
    if N < 1:
        raise ValueError("N must be at least 1")
    J = truncate(model, N)
    ev = eigenvalues(J)
    a, _ = model.arrays(N)
    return DosResult(Measure(ev, np.full(N, 1.0 / N)), float(np.mean(np.log(a[1:]))), N)


def lyapunov(model, z, N):
    """(1/N) ln |f_-(N+1, z)|; -inf exactly at roots.

    Since a(1)...a(N) f_-(N+1, z) = det(z - J_N), this equals
    -ln A_N + integral of ln|t - z| dk_N(t) exactly.
    """
    return float(lyapunov_many(model, np.array([z]), N)[0])


def lyapunov_many(model, zs, N):
    """Vectorised :func:`lyapunov` over an array of energies."""
    if N < 1:
        raise ValueError("N must be at least 1")
    zs = np.asarray(zs)
    if np.iscomplexobj(zs) and not np.any(zs.imag):
        zs = zs.real
    a, b = model.arrays(N)
    return kernels.log_abs_endpoint(a, b, zs) / N


def thouless_rhs(d, z):
    """-ln A + integral of ln|t - z| dk_N(t); -inf at an atom."""
    return -d.log_A + log_potential(d.dk, z)


# --------------------------------------------------------------------------
# w_+ and w_-


@dataclass(frozen=True)
class WPair:
    z: complex
    w_plus: complex
    w_minus: complex
    tail_error: float = 0.0
    flagged: bool = False

    @property
    def residual(self):
        return abs(self.w_plus + self.w_minus - 1j * math.pi)


def _w_plus(model, z, N, depth=None):
    seq = m_plus_sequence(model, z, N + 1, depth)
    a, _ = model.arrays(N)
    return complex(np.mean(np.log(a[1:] * seq.values[1 : N + 1]))), seq.error


def w_pair(model, z, N, depth=None, tail_tol=1e-6):
    """w_+ from the m_+ continued fraction, w_- from the Prufer data of f_-."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("w_pair needs Im z > 0")
    wp, err = _w_plus(model, z, N, depth)
    pr = prufer_minus(model, z, N)
    wm = complex(pr.log_R[N], pr.phi[N]) / N
    return WPair(z, wp, wm, err, err > tail_tol)


@dataclass(frozen=True)
class IdentityRow:
    N: int
    z: complex
    w_residual: float
    g_residual: float
    moment_residual: float

    def to_dict(self):
        d = asdict(self)
        d["z"] = [self.z.real, self.z.imag]
        return d


def moment_residual(model, N, d=None, order=MOMENT_ORDER):
    """max_n |moment(dk_N, n) - tr(J_N^n)/N|, relative to max(1, |tr/N|)."""
    d = dos_measure(model, N) if d is None else d
    traces = truncate(model, N).trace_powers(order) / N
    return max(abs(moment(d.dk, n) - traces[n]) / max(1.0, abs(traces[n])) for n in range(order + 1))


def check_identities(model, zs, Ns, h=1e-4):
    """Residual rows: |w_+ + w_- - i pi|, |g_N - w_+'|, and the moment identity."""
    rows = []
    for N in Ns:
        mres = moment_residual(model, N)
        for z in zs:
            z = complex(z)
            if z.imag < 0.5:
                raise ValueError("identity grid needs Im z >= 0.5")
            wp = w_pair(model, z, N)
            dw = (_w_plus(model, z + h, N)[0] - _w_plus(model, z - h, N)[0]) / (2 * h)
            g = green_avg(model, z, N)
            rows.append(IdentityRow(N, z, wp.residual, abs(g - dw), mres))
    return rows


# --------------------------------------------------------------------------
# approximate derivatives


def deviation_densities(t, f, x, d, eps=DAP_EPS, hs=DAP_HS):
    """Fraction of grid points in (x-h, x+h) with |difference quotient - d| >= eps.

    Returns an array of shape (len(hs), len(eps)).
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    fx = np.interp(x, t, f)
    out = np.empty((len(hs), len(eps)))
    for i, h in enumerate(hs):
        sel = (np.abs(t - x) < h) & (t != x)
        with np.errstate(invalid="ignore"):
            q = (f[sel] - fx) / (t[sel] - x)
        dev = np.abs(q - d)
        dev = np.where(np.isfinite(dev), dev, np.inf)
        for j, e in enumerate(eps):
            out[i, j] = np.count_nonzero(dev >= e) / max(dev.size, 1)
    return out


def approx_derivative(t, f, x, eps=DAP_EPS, hs=DAP_HS):
    """Approximate derivative of grid samples at x, or None.

    The candidate is the median difference quotient over the smallest
    window; it is accepted when the deviation density stays below
    ``DAP_THRESHOLD`` for every eps on the last ``DAP_CONSECUTIVE`` windows.
    """
    t = np.asarray(t, dtype=float)
    hs = np.sort(np.asarray(hs, dtype=float))[::-1]
    step = np.diff(t)
    if step.size == 0 or np.any(step <= 0):
        raise ValueError("sample grid must be increasing")
    if step.max() > hs[-1] / 16 * (1 + 1e-9):
        raise ValueError("grid spacing must not exceed h_min/16")
    if t[0] > x - hs[0] or t[-1] < x + hs[0]:
        raise ValueError("grid does not cover (x - h_max, x + h_max)")
    f = np.asarray(f, dtype=float)
    fx = np.interp(x, t, f)
    sel = (np.abs(t - x) < hs[-1]) & (t != x)
    with np.errstate(invalid="ignore"):
        q = (f[sel] - fx) / (t[sel] - x)
    q = q[np.isfinite(q)]
    if q.size == 0:
        return None
    d = float(np.median(q))
    dens = deviation_densities(t, f, x, d, eps, hs)
    if np.all(dens[-DAP_CONSECUTIVE:] < DAP_THRESHOLD):
        return d
    return None


@dataclass(frozen=True)
class DapReport:
    x: float
    dap: object
    minus_re_g: float
    difference: float
    g_converged: bool

    def to_dict(self):
        return asdict(self)


def check_dap_gamma(model, x, N=200_000, resolution=16, eps=DAP_EPS, hs=DAP_HS, green_N=2000, floor=1e-3):
    """Compare the approximate derivative of gamma with -Re g at real x.

    gamma is sampled at spacing h_min/resolution through the transfer
    recursion at length N; g is the boundary value of the Green function
    average of length ``green_N``.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16 points per h_min")
    hs = np.sort(np.asarray(hs, dtype=float))[::-1]
    step = hs[-1] / resolution
    k = int(math.ceil(hs[0] / step)) + 1
    t = x + step * np.arange(-k, k + 1)
    gam = lyapunov_many(model, t, N)
    dap = approx_derivative(t, gam, x, eps, hs)
    ys = default_schedule()
    if model.tail() is None:
        ys = ys[ys >= floor]
    lim = boundary_value(lambda z: green_avg(model, z, green_N, floor=floor), x, ys)
    mre = -float(np.real(lim.value))
    diff = abs(dap - mre) if dap is not None else float("nan")
    return DapReport(float(x), dap, mre, diff, lim.converged)


# --------------------------------------------------------------------------
# regularity


@dataclass(frozen=True)
class RegularityReport:
    hs: tuple
    holder: tuple
    density_ratios: tuple
    x: float
    eps: float

    @property
    def holder_max(self):
        return max(self.holder)

    def to_dict(self):
        return {
            "hs": list(self.hs),
            "holder": list(self.holder),
            "holder_max": self.holder_max,
            "density_ratios": list(self.density_ratios),
            "x": self.x,
            "eps": self.eps,
        }


def holder_profile(d, hs=HOLDER_HS):
    """sup_t (k_N(t+h) - k_N(t)) * (-ln h) for each h; exact for atomic dk."""
    pos, wt = d.dk.atom_pos, d.dk.atom_wt
    cum = np.r_[0.0, np.cumsum(wt)]
    out = []
    for h in hs:
        j = np.searchsorted(pos, pos + h, side="left")
        jump = cum[j] - cum[np.arange(pos.size)]
        out.append(float(jump.max()) * -math.log(h))
    return tuple(out)


def deviation_ratios(d, x, eps, hs=HOLDER_HS, points=2001):
    """|{t in (x-h, x+h): |gamma(t) - gamma(x)| >= eps}| / 2h, by the midpoint rule."""
    gx = float(thouless_rhs(d, x))
    out = []
    for h in hs:
        t = x - h + (2 * h) * (np.arange(points) + 0.5) / points
        g = thouless_rhs(d, t)
        with np.errstate(invalid="ignore"):
            bad = ~(np.abs(g - gx) < eps)
        out.append(float(np.count_nonzero(bad)) / points)
    return tuple(out)


def regularity_profiles(d, x=0.0, eps=0.1, hs=HOLDER_HS, points=2001):
    hs = tuple(float(h) for h in hs)
    if any(not 0 < h <= 0.5 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h-list must be decreasing in (0, 1/2]")
    return RegularityReport(hs, holder_profile(d, hs), deviation_ratios(d, x, eps, hs, points), float(x), float(eps))


# --------------------------------------------------------------------------
# tables


def write_gamma_csv(model, xs, N, path):
    xs = np.asarray(xs, dtype=float)
    gam = lyapunov_many(model, xs, N)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "gamma"])
        for x, g in zip(xs, gam):
            w.writerow([f"{x:.15g}", f"{g:.15g}"])


def write_atoms_csv(d, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "weight"])
        for x, wt in zip(d.dk.atom_pos, d.dk.atom_wt):
            w.writerow([f"{x:.15g}", f"{wt:.15g}"])
