"""Finite measures on the line and the set transforms used with them.

A :class:`Measure` is a finite sum of atoms plus absolutely continuous pieces.
Each piece lives on a bounded interval and stores its density on a fixed node
grid; with ``edge_singular`` set, the stored values are the smooth factor
``h`` of a density ``h(t) / sqrt((t - lo)(hi - t))`` sampled at Chebyshev
(first kind) nodes, otherwise they are the density itself at Gauss-Legendre
nodes.  All integrals are exact for the polynomial interpolant of the stored
values: Cauchy transforms, logarithmic potentials and distribution functions
use closed forms in the Chebyshev basis, so they stay accurate up to and on
the support.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import legendre as leg

from ._limits import Limit, default_schedule, richardson_limit

ATOM_TOL = 1e-12
DEFAULT_DEGREE = 64
MAX_MOMENT = 20
# singularity subtraction only inside this Bernstein ellipse; plain quadrature outside
NEAR_RHO = 1.15


class EmptyMeasureError(ValueError):
    pass


class DomainError(ValueError):
    pass


# --------------------------------------------------------------------------
# sets


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class SetUnion:
    """Finite union of disjoint closed intervals, in increasing order."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple(iv if isinstance(iv, Interval) else Interval(*iv) for iv in self.intervals)
        for left, right in zip(ivs, ivs[1:]):
            if not left.hi < right.lo:
                raise ValueError("intervals must be disjoint and increasing")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def of(cls, *pairs):
        return cls(tuple(Interval(float(lo), float(hi)) for lo, hi in pairs))

    @classmethod
    def parse(cls, text):
        """Parse ``"[-2,-1],[1,2]"`` (an empty string gives the empty set)."""
        text = text.strip()
        if not text:
            return cls()
        try:
            pairs = json.loads("[" + text + "]")
            return cls.of(*[(float(p[0]), float(p[1])) for p in pairs])
        except (ValueError, TypeError, IndexError) as exc:
            raise ValueError(f"cannot parse interval union {text!r}") from exc

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def empty(self):
        return not self.intervals

    @property
    def length(self):
        return sum(iv.length for iv in self.intervals)

    @property
    def hull(self):
        if self.empty:
            raise ValueError("empty set has no hull")
        return Interval(self.intervals[0].lo, self.intervals[-1].hi)

    def contains(self, x):
        return any(iv.lo <= x <= iv.hi for iv in self.intervals)

    def gaps(self):
        """Bounded components of the complement, as (lo, hi) pairs."""
        return [(l.hi, r.lo) for l, r in zip(self.intervals, self.intervals[1:])]

    def measure_in(self, a, b):
        """Lebesgue measure of E intersected with (a, b)."""
        return sum(max(0.0, min(b, iv.hi) - max(a, iv.lo)) for iv in self.intervals)

    def affine(self, scale, shift):
        ivs = [(scale * iv.lo + shift, scale * iv.hi + shift) for iv in self.intervals]
        ivs = [(min(p), max(p)) for p in ivs]
        return SetUnion.of(*sorted(ivs))

    def interior_grid(self, per_interval=50, margin=1e-3):
        """Sample points inside each interval, staying ``margin`` (relative) off the ends."""
        pts = []
        for iv in self.intervals:
            if iv.length == 0:
                continue
            pad = margin * iv.length
            pts.append(np.linspace(iv.lo + pad, iv.hi - pad, per_interval))
        return np.concatenate(pts) if pts else np.empty(0)

    def to_list(self):
        return [[iv.lo, iv.hi] for iv in self.intervals]


@dataclass(frozen=True)
class BoundedFn:
    """Piecewise-constant function with values in [-1, 1] and zero tails.

    ``values[i]`` is the value on ``(breaks[i], breaks[i+1])``.
    """

    breaks: tuple
    values: tuple

    def __post_init__(self):
        br = tuple(float(b) for b in self.breaks)
        vals = tuple(float(v) for v in self.values)
        if len(br) and len(vals) != len(br) - 1:
            raise ValueError("need len(values) == len(breaks) - 1")
        if any(b2 <= b1 for b1, b2 in zip(br, br[1:])):
            raise ValueError("breaks must be strictly increasing")
        if any(abs(v) > 1.0 for v in vals):
            raise ValueError("|theta| must not exceed 1")
        object.__setattr__(self, "breaks", br)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, lo, hi, value=1.0):
        return cls((lo, hi), (value,))

    @classmethod
    def sign_about(cls, x, lo, hi):
        """sign(t - x) on [lo, hi]."""
        if lo < x < hi:
            return cls((lo, x, hi), (-1.0, 1.0))
        return cls((lo, hi), (1.0 if lo >= x else -1.0,))

    def pieces(self):
        return [(p, q, v) for p, q, v in zip(self.breaks, self.breaks[1:], self.values) if v != 0.0]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p, q, v in self.pieces():
            out = np.where((t > p) & (t < q), v, out)
        return out

    def reflect(self, x):
        br = tuple(2 * x - b for b in reversed(self.breaks))
        return BoundedFn(br, tuple(reversed(self.values)))


# --------------------------------------------------------------------------
# measures


def _herglotz_sqrt(w):
    """sqrt(w^2 - 1) with the branch cut on [-1, 1] and ~ w at infinity."""
    return np.sqrt(w - 1.0 + 0j) * np.sqrt(w + 1.0 + 0j)


def _ellipse_rho(w):
    """Parameter rho >= 1 of the Bernstein ellipse through w."""
    w = np.asarray(w, dtype=complex)
    return np.abs(w + _herglotz_sqrt(w))


def _cheb_nodes(n):
    return np.cos((2 * np.arange(n)[::-1] + 1) * np.pi / (2 * n))


@dataclass(frozen=True, eq=False)
class Piece:
    """Absolutely continuous part on ``[lo, hi]``.

    ``values`` are samples at ``nodes`` (absolute t-coordinates) of the
    density, or of its smooth factor when ``edge_singular`` is set.
    """

    lo: float
    hi: float
    nodes: np.ndarray
    values: np.ndarray
    edge_singular: bool
    coef: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("piece needs lo < hi")
        values = np.asarray(self.values, dtype=float)
        n = values.size
        x_ref = _cheb_nodes(n) if self.edge_singular else leg.leggauss(n)[0]
        nodes = self.mid + self.rad * x_ref
        given = np.asarray(self.nodes, dtype=float)
        if given.shape != nodes.shape or not np.allclose(given, nodes, rtol=0, atol=1e-9 * max(1.0, self.rad)):
            raise ValueError("piece nodes do not match the standard grid for this degree")
        if np.any(values < -1e-12 * max(1.0, np.abs(values).max())):
            raise ValueError("density must be nonnegative at the nodes")
        if self.edge_singular:
            k = np.arange(n)
            tk = np.cos(np.outer(k, np.arccos(x_ref)))
            coef = (2.0 / n) * tk @ values
            coef[0] *= 0.5
            weights = np.full(n, np.pi / n)
        else:
            coef = cheb.chebfit(x_ref, values, n - 1)
            weights = leg.leggauss(n)[1] * self.rad
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "weights", weights)

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self):
        return 0.5 * (self.hi - self.lo)

    @property
    def degree(self):
        return self.values.size

    @classmethod
    def from_function(cls, func, lo, hi, edge_singular=False, degree=DEFAULT_DEGREE):
        mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
        x_ref = _cheb_nodes(degree) if edge_singular else leg.leggauss(degree)[0]
        t = mid + rad * x_ref
        return cls(lo, hi, t, np.asarray(func(t), dtype=float) * np.ones_like(t), edge_singular)

    def _w(self, z):
        return (np.asarray(z) - self.mid) / self.rad

    @property
    def mass(self):
        if self.edge_singular:
            return np.pi * self.coef[0]
        return float(np.sum(self.weights * self.values))

    def density(self, t):
        x = self._w(np.asarray(t, dtype=float))
        inside = np.abs(x) < 1
        h = cheb.chebval(np.clip(x, -1, 1), self.coef)
        if self.edge_singular:
            with np.errstate(divide="ignore", invalid="ignore"):
                h = h / (self.rad * np.sqrt(1 - x * x))
        return np.where(inside, h, 0.0)

    def quadrature(self, m=None):
        """Nodes and weights of an m-point rule exact for the interpolant times polynomials."""
        m = self.degree if m is None else m
        if self.edge_singular:
            x = _cheb_nodes(m)
            return self.mid + self.rad * x, (np.pi / m) * cheb.chebval(x, self.coef)
        x, w = leg.leggauss(m)
        return self.mid + self.rad * x, self.rad * w * cheb.chebval(x, self.coef)

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        w = self._w(z)
        if self.edge_singular:
            s = _herglotz_sqrt(w)
            rho = w - s
            series = np.polynomial.polynomial.polyval(rho, self.coef)
            return -np.pi * series / (s * self.rad)
        far = _ellipse_rho(w) > NEAR_RHO
        x = (self.nodes - self.mid) / self.rad
        xw = leg.leggauss(self.degree)[1]
        with np.errstate(all="ignore"):
            pw = cheb.chebval(np.where(far, 0.0, w), self.coef)
        delta = w[..., None] - x
        num = self.values - pw[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            quot = num / (-delta)
        near = np.abs(delta) < 1e-4
        if np.any(near):
            d1 = cheb.chebval(x, cheb.chebder(self.coef))
            d2 = cheb.chebval(x, cheb.chebder(self.coef, 2))
            d3 = cheb.chebval(x, cheb.chebder(self.coef, 3))
            taylor = d1 + d2 * delta / 2 + d3 * delta ** 2 / 6
            quot = np.where(near, taylor, quot)
        ends = np.log(1 - w) - np.log(-1 - w)
        near_val = quot @ xw + pw * ends
        if not np.any(far):
            return near_val
        xf, wf = self._far_rule(w)
        far_val = (wf * cheb.chebval(xf, self.coef) / (xf - w[..., None])) @ np.ones_like(xf)
        return np.where(far, far_val, near_val)

    def log_potential(self, z):
        """Integral of ln|t - z| against this piece, for real or complex z."""
        z = np.asarray(z, dtype=complex)
        z = np.where(z.imag < 0, np.conj(z), z)
        w = self._w(z)
        c = self.coef
        if self.edge_singular:
            rho = w - _herglotz_sqrt(w)
            j = np.arange(1, c.size)
            with np.errstate(divide="ignore", invalid="ignore"):
                lr = np.log(np.abs(rho))
            lr = np.where(np.isfinite(lr), lr, 0.0)
            powers = rho[..., None] ** j
            tail = -(np.pi * (powers.real / j)) @ c[1:]
            return np.pi * c[0] * (math.log(self.rad) - math.log(2.0) - lr) + tail
        far = _ellipse_rho(w) > NEAR_RHO
        prim = cheb.chebint(c)
        x = (self.nodes - self.mid) / self.rad
        xw = leg.leggauss(self.degree)[1]
        pw = cheb.chebval(np.where(far, 0.0, w), prim)
        p_nodes = cheb.chebval(x, prim)
        delta = w[..., None] - x
        with np.errstate(divide="ignore", invalid="ignore"):
            quot = (p_nodes - pw[..., None]) / (-delta)
        near = np.abs(delta) < 1e-4
        if np.any(near):
            d1 = self.values
            d2 = cheb.chebval(x, cheb.chebder(c))
            d3 = cheb.chebval(x, cheb.chebder(c, 2))
            quot = np.where(near, d1 + d2 * delta / 2 + d3 * delta ** 2 / 6, quot)
        p1 = cheb.chebval(1.0, prim)
        pm1 = cheb.chebval(-1.0, prim)
        with np.errstate(divide="ignore", invalid="ignore"):
            right = np.where(np.abs(1 - w) == 0, 0, (p1 - pw) * np.log(1 - w))
            left = np.where(np.abs(-1 - w) == 0, 0, (pm1 - pw) * np.log(-1 - w))
        inner = (right - left - quot @ xw).real
        if np.any(far):
            xf, wf = self._far_rule(w)
            plain = (wf * cheb.chebval(xf, c) * np.log(np.abs(xf - w[..., None]))) @ np.ones_like(xf)
            inner = np.where(far, plain, inner)
        return self.rad * (inner + (p1 - pm1) * math.log(self.rad))

    def _far_rule(self, w):
        """Gauss-Legendre rule fine enough for kernels analytic inside the
        Bernstein ellipse through the closest far point."""
        rho = float(np.min(_ellipse_rho(w)[_ellipse_rho(w) > NEAR_RHO]))
        m = int(min(2000, max(2 * self.degree, math.ceil(20.0 / math.log(rho)))))
        return leg.leggauss(m)

    def cdf(self, t):
        x = np.clip(self._w(np.asarray(t, dtype=float)), -1.0, 1.0)
        if self.edge_singular:
            theta = np.arccos(x)
            j = np.arange(1, self.coef.size)
            out = self.coef[0] * (np.pi - theta)
            if j.size:
                out = out - (np.sin(np.multiply.outer(theta, j)) / j) @ self.coef[1:]
            return out
        prim = cheb.chebint(self.coef, lbnd=-1)
        return self.rad * cheb.chebval(x, prim)

    def to_dict(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "nodes": self.nodes.tolist(),
            "values": self.values.tolist(),
            "edge_singular": bool(self.edge_singular),
        }


@dataclass(frozen=True, eq=False)
class Measure:
    """Atoms plus absolutely continuous pieces; immutable."""

    atom_pos: np.ndarray = field(default_factory=lambda: np.empty(0))
    atom_wt: np.ndarray = field(default_factory=lambda: np.empty(0))
    pieces: tuple = ()

    def __post_init__(self):
        pos = np.asarray(self.atom_pos, dtype=float).ravel()
        wt = np.asarray(self.atom_wt, dtype=float).ravel()
        if pos.shape != wt.shape:
            raise ValueError("atom positions and weights differ in length")
        if np.any(wt <= 0):
            raise ValueError("atom weights must be positive")
        order = np.argsort(pos, kind="stable")
        pos, wt = pos[order], wt[order]
        if pos.size > 1 and np.any(np.diff(pos) == 0):
            pos, inverse = np.unique(pos, return_inverse=True)
            wt = np.bincount(inverse, weights=wt)
        object.__setattr__(self, "atom_pos", pos)
        object.__setattr__(self, "atom_wt", wt)
        object.__setattr__(self, "pieces", tuple(self.pieces))

    # constructors ---------------------------------------------------------

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def atoms(cls, positions, weights=None):
        positions = np.asarray(positions, dtype=float)
        if weights is None:
            weights = np.full(positions.size, 1.0 / max(positions.size, 1))
        return cls(positions, weights)

    @classmethod
    def dirac(cls, x, weight=1.0):
        return cls(np.array([x]), np.array([weight]))

    @classmethod
    def arcsine(cls, lo=-2.0, hi=2.0, mass=1.0, degree=DEFAULT_DEGREE):
        """Equilibrium measure of [lo, hi]: mass / (pi sqrt((t-lo)(hi-t)))."""
        return cls(pieces=(Piece.from_function(lambda t: mass / np.pi, lo, hi, True, degree),))

    @classmethod
    def uniform(cls, lo, hi, mass=1.0, degree=DEFAULT_DEGREE):
        return cls(pieces=(Piece.from_function(lambda t: mass / (hi - lo), lo, hi, False, degree),))

    @classmethod
    def from_density(cls, func, lo, hi, edge_singular=False, degree=DEFAULT_DEGREE):
        return cls(pieces=(Piece.from_function(func, lo, hi, edge_singular, degree),))

    def __add__(self, other):
        return Measure(
            np.concatenate([self.atom_pos, other.atom_pos]),
            np.concatenate([self.atom_wt, other.atom_wt]),
            self.pieces + other.pieces,
        )

    # basic properties -----------------------------------------------------

    @property
    def is_empty(self):
        return self.atom_pos.size == 0 and not self.pieces

    @property
    def mass(self):
        return float(self.atom_wt.sum() + sum(p.mass for p in self.pieces))

    @property
    def support_hull(self):
        los = [p.lo for p in self.pieces] + list(self.atom_pos[:1])
        his = [p.hi for p in self.pieces] + list(self.atom_pos[-1:])
        return min(los), max(his)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return sum((p.density(t) for p in self.pieces), np.zeros_like(t))

    def integrate(self, func, extra_nodes=0):
        """Integral of ``func`` (vectorised, real t) against the measure."""
        total = float(np.sum(self.atom_wt * func(self.atom_pos))) if self.atom_pos.size else 0.0
        for p in self.pieces:
            t, w = p.quadrature(p.degree + extra_nodes)
            total += float(np.sum(w * func(t)))
        return total

    def _require(self):
        if self.is_empty:
            raise EmptyMeasureError("empty measure")

    # serialization --------------------------------------------------------

    def to_dict(self):
        return {
            "atoms": [[float(p), float(w)] for p, w in zip(self.atom_pos, self.atom_wt)],
            "pieces": [p.to_dict() for p in self.pieces],
        }

    @classmethod
    def from_dict(cls, doc):
        atoms = doc.get("atoms", [])
        pieces = tuple(
            Piece(d["lo"], d["hi"], np.asarray(d["nodes"]), np.asarray(d["values"]), bool(d["edge_singular"]))
            for d in doc.get("pieces", [])
        )
        pos = np.array([a[0] for a in atoms], dtype=float)
        wt = np.array([a[1] for a in atoms], dtype=float)
        return cls(pos, wt, pieces)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# --------------------------------------------------------------------------
# operations on measures


def cauchy_transform(mu, z):
    """Integral of 1/(t - z) dmu(t) for Im z > 0 (scalar or array)."""
    mu._require()
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("cauchy_transform needs Im z > 0")
    out = np.zeros(z.shape, dtype=complex)
    if mu.atom_pos.size:
        out = out + (mu.atom_wt / (mu.atom_pos - z[..., None])).sum(axis=-1)
    for p in mu.pieces:
        out = out + p.cauchy(z)
    return out[()] if out.ndim == 0 else out


def log_potential(mu, z):
    """Integral of ln|t - z| dmu(t); -inf where z hits an atom."""
    mu._require()
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape)
    if mu.atom_pos.size:
        dist = np.abs(mu.atom_pos - z[..., None])
        hit = (dist <= ATOM_TOL).any(axis=-1)
        with np.errstate(divide="ignore"):
            out = out + (mu.atom_wt * np.log(dist)).sum(axis=-1)
        out = np.where(hit, -np.inf, out)
    for p in mu.pieces:
        out = out + p.log_potential(z)
    return out[()] if out.ndim == 0 else out


def energy(mu, oversample=4):
    """Logarithmic energy: the double integral of ln|s - t|; -inf with atoms."""
    mu._require()
    if mu.atom_pos.size:
        return -np.inf
    total = 0.0
    for p in mu.pieces:
        t, w = p.quadrature(oversample * p.degree)
        total += float(np.sum(w * log_potential(mu, t)))
    return total


def moment(mu, n, max_order=MAX_MOMENT):
    """Integral of t^n dmu(t)."""
    mu._require()
    if n < 0 or n > max_order:
        raise ValueError(f"moment order must lie in [0, {max_order}]")
    return mu.integrate(lambda t: t ** n, extra_nodes=n // 2 + 1)


def cdf(mu, t, side="right"):
    """Distribution function mu((-inf, t]); ``side='left'`` gives mu((-inf, t))."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    if mu.atom_pos.size:
        out = out + np.cumsum(np.r_[0.0, mu.atom_wt])[np.searchsorted(mu.atom_pos, t, side=side)]
    for p in mu.pieces:
        out = out + p.cdf(t)
    return out[()] if out.ndim == 0 else out


def kolmogorov(mu1, mu2, grid_points=10_000):
    """sup_t |cdf1(t) - cdf2(t)| over breakpoints, atoms (both sides) and a grid."""
    pts = [mu1.atom_pos, mu2.atom_pos]
    for mu in (mu1, mu2):
        pts.append(np.array([v for p in mu.pieces for v in (p.lo, p.hi)]))
    lo = min(m.support_hull[0] for m in (mu1, mu2) if not m.is_empty)
    hi = max(m.support_hull[1] for m in (mu1, mu2) if not m.is_empty)
    pts.append(np.linspace(lo, hi, grid_points))
    t = np.unique(np.concatenate(pts))
    right = np.abs(cdf(mu1, t) - cdf(mu2, t))
    left = np.abs(cdf(mu1, t, side="left") - cdf(mu2, t, side="left"))
    return float(max(right.max(), left.max()))


def write_cdf_csv(mu, ts, path):
    """Two-column CSV ``t,k`` of the distribution function on ``ts``."""
    ts = np.asarray(ts, dtype=float)
    values = cdf(mu, ts)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "k"])
        for t, k in zip(ts, values):
            writer.writerow([f"{t:.15g}", f"{k:.15g}"])


# --------------------------------------------------------------------------
# set transforms


def lebesgue_density(E, x, h):
    """|E intersected with (x-h, x+h)| / 2h."""
    if h <= 0:
        raise ValueError("h must be positive")
    return E.measure_in(x - h, x + h) / (2 * h)


def _theta_on_E(E, theta):
    """Pieces (p, q, v) of theta * chi_E."""
    out = []
    for p, q, v in theta.pieces():
        for iv in E:
            lo, hi = max(p, iv.lo), min(q, iv.hi)
            if hi > lo:
                out.append((lo, hi, v))
    return out


def truncated_hilbert(E, theta, x, y, radius=1.0):
    """Integral of theta(t) chi_E(t) / (t - x) over y < |t - x| <= radius."""
    if not 0 < y <= radius:
        raise ValueError("need 0 < y <= radius")
    total = 0.0
    for p, q, v in _theta_on_E(E, theta):
        for a, b in ((x - radius, x - y), (x + y, x + radius)):
            lo, hi = max(p, a), min(q, b)
            if hi > lo:
                total += v * math.log(abs(hi - x) / abs(lo - x))
    return total


def _tilde_hilbert_at(pieces, x, y):
    total = 0.0
    for p, q, v in pieces:
        total += v * 0.5 * (
            math.log(((q - x) ** 2 + y * y) / ((p - x) ** 2 + y * y)) - math.log((q * q + 1) / (p * p + 1))
        )
    return total


def tilde_hilbert(E, theta, x, ys=None, tol=1e-8, bound=1e6):
    """Regularised Hilbert transform of theta on E at x, as a :class:`Limit`.

    The Poisson-regularised integral is evaluated in closed form along the
    schedule (default y_k = 2^-k, k <= 40) and extrapolated.  A limit that
    fails to settle, or exceeds ``bound``, is reported with
    ``converged=False`` (the value is then meaningless).
    """
    pieces = _theta_on_E(E, theta)
    if not pieces:
        return Limit(0.0, True, 0.0, 0.0)
    ys = default_schedule() if ys is None else ys
    lim = richardson_limit(lambda y: _tilde_hilbert_at(pieces, x, y), ys, tol)
    if lim.converged and abs(lim.value) > bound:
        return Limit(lim.value, False, lim.diff, lim.y, lim.history)
    return lim
