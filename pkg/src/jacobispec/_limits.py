"""Extrapolated limits y -> 0+ along a geometric schedule."""

from dataclasses import dataclass, field

import numpy as np


def default_schedule(kmax=40):
    """y_k = 2^-k, k = 1..kmax."""
    return 2.0 ** -np.arange(1, kmax + 1)


@dataclass(frozen=True)
class Limit:
    """Outcome of a y -> 0+ extrapolation.

    ``value`` is the last Richardson extrapolant (``nan`` if nothing could be
    formed); ``converged`` records whether three successive extrapolants
    agreed to ``tol``; ``diff`` is the last successive difference.
    """

    value: complex
    converged: bool
    diff: float
    y: float
    history: tuple = field(default=(), repr=False)

    @property
    def divergent(self):
        return not self.converged


def richardson_limit(func, ys=None, tol=1e-8):
    """Two-point Richardson extrapolation of ``func(y)`` as y -> 0+.

    Successive samples are combined as ``(v(y') - q v(y)) / (1 - q)`` with
    ``q = y'/y`` (first-order error model).  Stops once three successive
    extrapolants agree to ``tol`` relative to ``max(1, |value|)``.
    """
    ys = default_schedule() if ys is None else np.asarray(ys, dtype=float)
    samples = []
    extrap = []
    last_diff = np.inf
    for k, y in enumerate(ys):
        v = func(float(y))
        samples.append(v)
        if k == 0:
            continue
        q = ys[k] / ys[k - 1]
        r = (samples[-1] - q * samples[-2]) / (1.0 - q)
        extrap.append(r)
        if not np.isfinite(r):
            break
        if len(extrap) >= 3:
            scale = max(1.0, abs(extrap[-1]))
            d1 = abs(extrap[-1] - extrap[-2])
            d2 = abs(extrap[-2] - extrap[-3])
            last_diff = d1
            if d1 < tol * scale and d2 < tol * scale:
                return Limit(extrap[-1], True, d1, float(y), tuple(samples))
    value = extrap[-1] if extrap else np.nan
    if len(extrap) >= 2:
        last_diff = abs(extrap[-1] - extrap[-2])
    return Limit(value, False, float(last_diff), float(ys[len(samples) - 1]), tuple(samples))
