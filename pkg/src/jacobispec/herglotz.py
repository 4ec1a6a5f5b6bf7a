"""Herglotz functions, boundary values and Krein functions.

Two evaluable forms are provided: :class:`HerglotzRep` for the integral
representation ``a + b z + int (1/(t-z) - t/(t^2+1)) dmu(t)``, and
:class:`KreinHerglotz` for ``exp(c + int (1/(t-z) - t/(t^2+1)) xi(t) dt)``
with a step function ``xi`` (a :class:`KreinFn`).  Any callable mapping the
upper half plane to its closure can be passed where a Herglotz function is
expected.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from ._limits import Limit, richardson_limit
from .measures import DomainError, Measure, SetUnion, cauchy_transform

XI_CLAMP = 1e-6


class KreinError(ValueError):
    pass


# --------------------------------------------------------------------------
# evaluable forms


@dataclass(frozen=True, eq=False)
class HerglotzRep:
    """F(z) = a + b z + int (1/(t - z) - t/(t^2 + 1)) dmu(t)."""

    a: float = 0.0
    b: float = 0.0
    mu: Measure = Measure()

    def __post_init__(self):
        if self.b < 0:
            raise ValueError("b must be nonnegative")

    @property
    def _shift(self):
        if self.mu.is_empty:
            return 0.0
        return self.mu.integrate(lambda t: t / (t * t + 1.0), extra_nodes=16)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.a + self.b * z
        if not self.mu.is_empty:
            out = out + cauchy_transform(self.mu, z) - self._shift
        return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class KreinFn:
    """Step function with values in [0, 1].

    ``values[0]`` is the left tail on ``(-inf, breaks[0])``,
    ``values[i]`` the value on ``(breaks[i-1], breaks[i])`` and
    ``values[-1]`` the right tail.
    """

    breaks: tuple
    values: tuple

    def __post_init__(self):
        br = tuple(float(b) for b in self.breaks)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(br) + 1:
            raise KreinError("need len(values) == len(breaks) + 1")
        if any(b2 <= b1 for b1, b2 in zip(br, br[1:])):
            raise KreinError("breaks must be strictly increasing")
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise KreinError("Krein function values must lie in [0, 1]")
        left, right = vals[0], vals[-1]
        if not ((left in (0.0, 1.0) and right in (0.0, 1.0)) or left == right):
            raise KreinError("tails must lie in {0, 1} or be equal")
        object.__setattr__(self, "breaks", br)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value):
        return cls((), (value,))

    @classmethod
    def from_pieces(cls, left, pieces, right):
        """Build from a left tail, ``[(p, q, v), ...]`` covering a contiguous range, and a right tail.

        Adjacent equal values are merged.
        """
        breaks, values = [], [left]
        for p, q, v in pieces:
            if breaks and p != breaks[-1]:
                raise KreinError("pieces must be contiguous")
            if not breaks:
                breaks.append(p)
            values.append(v)
            breaks.append(q)
        values.append(right)
        # merge equal neighbours
        mb, mv = [], [values[0]]
        for b, v in zip(breaks, values[1:]):
            if v == mv[-1]:
                continue
            mb.append(b)
            mv.append(v)
        return cls(tuple(mb), tuple(mv))

    def __call__(self, t):
        idx = np.searchsorted(np.asarray(self.breaks), np.asarray(t, dtype=float), side="right")
        return np.asarray(self.values)[idx]

    def bounded_pieces(self):
        br = self.breaks
        return [(br[i], br[i + 1], self.values[i + 1]) for i in range(len(br) - 1)]

    def restricted(self, a, b):
        """Pieces ``(p, q, v)`` of xi on (a, b)."""
        edges = [a] + [x for x in self.breaks if a < x < b] + [b]
        return [(p, q, float(self((p + q) / 2))) for p, q in zip(edges, edges[1:])]

    def integral(self, a, b):
        return sum((q - p) * v for p, q, v in self.restricted(a, b))

    def is_continuous_at(self, x, margin=0.0):
        return all(abs(x - b) > margin for b in self.breaks)

    @property
    def degenerate(self):
        """True when xi is constantly 0 or 1, i.e. G is a real constant."""
        return len(set(self.values)) == 1 and self.values[0] in (0.0, 1.0)

    def to_dict(self):
        return {"breaks": list(self.breaks), "values": list(self.values)}

    @classmethod
    def from_dict(cls, doc):
        return cls(tuple(doc["breaks"]), tuple(doc["values"]))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _log_herglotz(xi, z):
    """c-free part of ln G: int (1/(t - z) - t/(t^2+1)) xi(t) dt, closed form."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    br, vals = xi.breaks, xi.values
    if not br:
        # whole line: int (1/(t-z) - t/(t^2+1)) dt = i pi
        return out + 1j * math.pi * vals[0]
    if vals[0]:
        p = br[0]
        out += vals[0] * (np.log(p - z) - 0.5 * math.log(p * p + 1) + 1j * math.pi)
    for p, q, v in xi.bounded_pieces():
        if v:
            out += v * (np.log(q - z) - np.log(p - z) - 0.5 * math.log((q * q + 1) / (p * p + 1)))
    if vals[-1]:
        q = br[-1]
        out += vals[-1] * (0.5 * math.log(q * q + 1) - np.log(q - z))
    return out


@dataclass(frozen=True, eq=False)
class KreinHerglotz:
    """G = exp(c + int (1/(t - z) - t/(t^2+1)) xi(t) dt), evaluated exactly."""

    xi: KreinFn
    c: float = 0.0

    @property
    def degenerate(self):
        return self.xi.degenerate

    def log(self, z):
        return self.c + _log_herglotz(self.xi, z)

    def __call__(self, z):
        out = np.exp(self.log(z))
        return out[()] if np.ndim(out) == 0 else out


def from_krein(xi, c=0.0, modulus_at_i=None):
    """Herglotz function with Krein function ``xi``.

    With ``modulus_at_i`` the additive constant is chosen so that
    ``|G(i)| = modulus_at_i`` (``c`` is then ignored).
    """
    if modulus_at_i is not None:
        if modulus_at_i <= 0:
            raise ValueError("modulus must be positive")
        c = math.log(modulus_at_i) - float(_log_herglotz(xi, 1j).real)
    return KreinHerglotz(xi, float(c))


def evaluate(F, z):
    """F(z) for Im z > 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("Herglotz functions are evaluated for Im z > 0")
    return F(z)


# --------------------------------------------------------------------------
# boundary behaviour


def boundary_value(F, x, ys=None, tol=1e-8):
    """lim F(x + iy) as y -> 0+, extrapolated; see :class:`Limit`."""
    return richardson_limit(lambda y: complex(F(complex(x, y))), ys, tol)


@dataclass(frozen=True)
class KreinValue:
    value: float
    converged: bool
    boundary: Limit


def krein_xi(F, x, ys=None, tol=1e-8):
    """(1/pi) arg F(x + i0), in [0, 1]."""
    lim = boundary_value(F, x, ys, tol)
    w = complex(lim.value)
    ok = lim.converged and np.isfinite(w)
    if not np.isfinite(w) or w == 0:
        return KreinValue(float("nan"), False, lim)
    im = w.imag
    if im < 0:
        if -im <= XI_CLAMP * abs(w):
            im = 0.0
        else:
            ok = False
    angle = math.atan2(im, w.real) if im != 0.0 else (math.pi if w.real < 0 else 0.0)
    return KreinValue(min(1.0, max(0.0, angle / math.pi)), ok, lim)


@dataclass(frozen=True)
class ReflectionlessReport:
    max_abs_re: float
    worst_point: float
    passed: bool
    tol: float
    grid: np.ndarray
    nonconvergent: tuple

    def to_dict(self):
        return {
            "max_abs_re": self.max_abs_re,
            "worst_point": self.worst_point,
            "passed": self.passed,
            "tol": self.tol,
            "points": int(self.grid.size),
            "nonconvergent": list(self.nonconvergent),
            "note": "pass at sampled resolution",
        }


def is_reflectionless(F, E, grid=None, tol=1e-6, ys=None):
    """Check Re F(t + i0) = 0 on sample points of E."""
    grid = E.interior_grid() if grid is None else np.asarray(grid, dtype=float)
    worst, where, bad = 0.0, float("nan"), []
    for t in grid:
        lim = boundary_value(F, float(t), ys)
        if not lim.converged:
            bad.append(float(t))
        re = abs(complex(lim.value).real)
        if not np.isfinite(re):
            bad.append(float(t))
            continue
        if re >= worst:
            worst, where = re, float(t)
    return ReflectionlessReport(worst, where, worst <= tol and not bad, tol, grid, tuple(bad))


def point_mass(F, x, ys=None, tol=1e-8):
    """mu({x}) = lim y Im F(x + iy), extrapolated; never negative."""
    lim = richardson_limit(lambda y: y * complex(F(complex(x, y))).imag, ys, tol)
    return max(0.0, float(np.real(lim.value))) if np.isfinite(lim.value) else float("nan")


def pointmass_possible(E, x):
    """Whether some measure reflectionless on E can have an atom at x.

    False exactly when the integral of chi_E(t)/|t - x| over (x-1, x+1)
    diverges; for a finite union of intervals that happens iff x lies in
    an interval of positive length (endpoints included).
    """
    return not any(iv.lo < iv.hi and iv.lo <= x <= iv.hi for iv in E)


def atom_constructor(E, x):
    """Krein function 1/2 chi_E + chi_{E^c and (x, inf)}."""
    if not pointmass_possible(E, x):
        raise KreinError("criterion (b) holds: no atom possible")
    edges = sorted({x, *[iv.lo for iv in E], *[iv.hi for iv in E]})
    pieces = []
    for p, q in zip(edges, edges[1:]):
        m = 0.5 * (p + q)
        v = 0.5 if E.contains(m) else (1.0 if m > x else 0.0)
        pieces.append((p, q, v))
    if not pieces:
        return KreinFn((x,), (0.0, 1.0))
    return KreinFn.from_pieces(0.0, pieces, 1.0)


def atom_integral(xi, x):
    """int_{x-1}^{x+1} |xi(t) - chi_(x,inf)(t)| / |t - x| dt (may be inf)."""
    total = 0.0
    for side, target in (((x - 1.0, x), 0.0), ((x, x + 1.0), 1.0)):
        for p, q, v in xi.restricted(*side):
            dev = abs(v - target)
            if dev == 0.0:
                continue
            if p == x or q == x:
                return math.inf
            total += dev * abs(math.log(abs(q - x) / abs(p - x)))
    return total


def interval_integral(xi, a, b, x):
    """int_a^b xi(t) / (t - x) dt for x outside [a, b], in closed form."""
    if a <= x <= b:
        raise DomainError("x must lie outside [a, b]")
    return sum(v * math.log(abs(q - x) / abs(p - x)) for p, q, v in xi.restricted(a, b) if v)


def xi_naught(xi, E, tol=1e-9):
    """Replace xi on each bounded gap (a, b) of E by chi_(a, a+c), c = int_a^b xi.

    xi must equal 1/2 on E; unbounded gaps get the value 1.
    """
    for iv in E:
        for p, q, v in xi.restricted(iv.lo, iv.hi):
            if q > p and abs(v - 0.5) > tol:
                raise KreinError("xi must equal 1/2 on E")
    pieces = []
    for k, iv in enumerate(E):
        pieces.append((iv.lo, iv.hi, 0.5))
        if k + 1 < len(E):
            a, b = iv.hi, E.intervals[k + 1].lo
            c = min(xi.integral(a, b), b - a)
            if c > 0:
                pieces.append((a, a + c, 1.0))
            if a + c < b:
                pieces.append((a + c, b, 0.0))
    return KreinFn.from_pieces(1.0, pieces, 1.0)
