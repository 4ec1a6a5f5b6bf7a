"""Equilibrium measures and logarithmic capacity of finite interval unions."""

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .dos import thouless_rhs
from .measures import Measure, Piece, SetUnion, _cheb_nodes, kolmogorov, log_potential

DEFAULT_NODES = 48
FROSTMAN_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    """omega_E with its Robin constant (= ln cap E) and the Frostman residual."""

    omega: Measure
    robin: float
    residual: float

    @property
    def capacity(self):
        return math.exp(self.robin)

    def to_dict(self):
        doc = self.omega.to_dict()
        doc.update(robin=self.robin, residual=self.residual, capacity=self.capacity)
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        return cls(Measure.from_dict(doc), float(doc["robin"]), float(doc["residual"]))


def _rho(w):
    """w - sqrt(w^2 - 1) for real w, on the branch with |rho| <= 1."""
    w = np.asarray(w, dtype=float)
    inside = np.abs(w) <= 1
    s = np.sqrt(np.abs(w * w - 1))
    return np.where(inside, w - 1j * s, w - np.sign(w) * s)


def _log_kernel(w, n):
    """L_k(w) = integral of T_k(x) ln|x - w| / sqrt(1 - x^2) over [-1, 1], k < n."""
    rho = _rho(w)
    k = np.arange(1, n)
    out = np.empty(np.shape(w) + (n,))
    out[..., 0] = -np.pi * (math.log(2.0) + np.log(np.abs(rho)))
    out[..., 1:] = -np.pi * (rho[..., None] ** k).real / k
    return out


def _solve(E, n):
    ivs = [iv for iv in E]
    m = len(ivs)
    x = _cheb_nodes(n)
    size = m * n + 1
    A = np.zeros((size, size))
    rhs = np.zeros(size)
    for i, target in enumerate(ivs):
        t = 0.5 * (target.lo + target.hi) + 0.5 * target.length * x
        rows = slice(i * n, (i + 1) * n)
        for j, src in enumerate(ivs):
            mid, rad = 0.5 * (src.lo + src.hi), 0.5 * src.length
            block = _log_kernel((t - mid) / rad, n)
            block[:, 0] += np.pi * math.log(rad)
            A[rows, j * n : (j + 1) * n] = block
        A[rows, -1] = -1.0
    A[-1, [j * n for j in range(m)]] = np.pi
    rhs[-1] = 1.0
    sol = np.linalg.solve(A, rhs)
    if not np.all(np.isfinite(sol)):
        raise np.linalg.LinAlgError("equilibrium system is singular")
    return [sol[j * n : (j + 1) * n] for j in range(m)], float(sol[-1])


def _probes(E, n):
    """Interior points between collocation nodes (second-kind Chebyshev points)."""
    x = np.cos(np.arange(1, n)[::-1] * np.pi / n)
    return np.concatenate([0.5 * (iv.lo + iv.hi) + 0.5 * iv.length * x for iv in E])


def equilibrium(E, nodes=DEFAULT_NODES):
    """Equilibrium measure of a finite union of intervals.

    On each interval the density is u(x)/sqrt(1 - x^2) in the local
    variable x, u a Chebyshev series.  Log-kernel integrals of the basis are
    closed forms, so collocation at the Chebyshev nodes gives a square
    linear system for the coefficients and the Robin constant.
    """
    if E.empty or any(iv.length <= 0 for iv in E):
        raise ValueError("E must be a nonempty union of intervals of positive length")
    for n in (nodes, 2 * nodes):
        coefs, robin = _solve(E, n)
        x = _cheb_nodes(n)
        values = [cheb.chebval(x, c) for c in coefs]
        scale = max(np.abs(v).max() for v in values)
        if all(np.all(v >= -1e-10 * scale) for v in values):
            break
    else:
        raise RuntimeError("equilibrium density is negative at collocation nodes")
    pieces = []
    for iv, v in zip(E, values):
        t = 0.5 * (iv.lo + iv.hi) + 0.5 * iv.length * x
        pieces.append(Piece(iv.lo, iv.hi, t, np.maximum(v, 0.0), True))
    omega = Measure(pieces=tuple(pieces))
    probes = _probes(E, n)
    residual = float(np.max(np.abs(log_potential(omega, probes) - robin)))
    return EquilibriumResult(omega, robin, residual)


def capacity(E, nodes=DEFAULT_NODES):
    """Logarithmic capacity; (hi - lo)/4 for a single interval (cross-checked)."""
    if len(E) == 1:
        iv = E.intervals[0]
        if iv.length <= 0:
            raise ValueError("degenerate interval")
        closed = iv.length / 4
        solved = equilibrium(E, nodes).capacity
        if abs(solved - closed) > 1e-8 * closed:
            raise RuntimeError(f"capacity cross-check failed: {solved} vs {closed}")
        return closed
    return equilibrium(E, nodes).capacity


def frostman_residual(r, E, probes=None):
    """max |U_omega(t) - robin| over probes (default: 100 interior points of E)."""
    if probes is None:
        probes = E.interior_grid(max(2, 100 // len(E)), margin=1e-3)
    probes = np.asarray(probes, dtype=float)
    return float(np.max(np.abs(log_potential(r.omega, probes) - r.robin)))


# --------------------------------------------------------------------------
# checks relating the density of states to potential theory


@dataclass(frozen=True)
class SupportReport:
    """dk_N against omega_E, and gamma against alpha = ln(cap E / A) on E."""

    kolmogorov: float
    alpha: float
    capacity: float
    A: float
    max_gamma_dev: float
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def check_equilibrium_support(d, E, tol=0.01, gamma_tol=0.03, grid=None, margin=0.025):
    """If dk is the equilibrium measure of E, then gamma = ln(cap E / A) on E.

    Measures the distance between dk_N and omega_E, and the deviation of
    the finite-N Thouless gamma from the predicted constant on an interior
    grid of E.
    """
    eq = equilibrium(E)
    cap = eq.capacity
    alpha = math.log(cap) - d.log_A
    if grid is None:
        grid = E.interior_grid(200, margin=margin)
    gam = thouless_rhs(d, np.asarray(grid, dtype=float))
    dev = float(np.max(np.abs(gam - alpha)))
    ks = kolmogorov(d.dk, eq.omega)
    return SupportReport(ks, alpha, cap, d.A, dev, bool(ks <= tol and dev <= gamma_tol))


@dataclass(frozen=True)
class InequalityReport:
    cap_Z: float
    A: float
    cap_K: float
    length_Z: float
    four_A: float
    cap_Z_le_A: bool
    A_le_cap_K: bool
    length_le_4A: bool

    @property
    def passed(self):
        return self.cap_Z_le_A and self.A_le_cap_K and self.length_le_4A

    @property
    def values(self):
        return (self.cap_Z, self.A, self.cap_K, self.length_Z, self.four_A)

    def to_dict(self):
        doc = dict(self.__dict__)
        doc["passed"] = self.passed
        return doc


def check_inequalities(d, Z, K, tol=0.01):
    """cap(Z) <= A <= cap(K) and |Z| <= 4A, each up to a factor 1 + tol."""
    cz, ck = capacity(Z), capacity(K)
    A = d.A
    return InequalityReport(
        cz, A, ck, Z.length, 4 * A,
        cz <= A * (1 + tol), A <= ck * (1 + tol), Z.length <= 4 * A * (1 + tol),
    )


def square_map_capacity(lo, hi):
    """cap of {t : t^2 in [lo, hi]} for 0 <= lo < hi: sqrt((hi - lo)/4)."""
    return math.sqrt((hi - lo) / 4)


__all__ = [
    "EquilibriumResult",
    "InequalityReport",
    "SetUnion",
    "SupportReport",
    "capacity",
    "check_equilibrium_support",
    "check_inequalities",
    "equilibrium",
    "frostman_residual",
    "square_map_capacity",
]
