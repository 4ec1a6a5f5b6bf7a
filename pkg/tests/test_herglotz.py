import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from jacobispec.herglotz import (
    HerglotzRep,
    KreinError,
    KreinFn,
    atom_constructor,
    atom_integral,
    boundary_value,
    evaluate,
    from_krein,
    interval_integral,
    is_reflectionless,
    krein_xi,
    point_mass,
    pointmass_possible,
    xi_naught,
)
from jacobispec.measures import DomainError, Measure, SetUnion, cauchy_transform

DELTA0 = HerglotzRep(0.0, 0.0, Measure.dirac(0.0))
ARC = Measure.arcsine()
E2 = SetUnion.of((-2, -1), (1, 2))


def arcsine_F(z):
    return cauchy_transform(ARC, z)


@st.composite
def krein_fns(draw):
    n = draw(st.integers(1, 6))
    gaps = draw(st.lists(st.floats(0.05, 1.5), min_size=n, max_size=n))
    start = draw(st.floats(-3, 1))
    breaks = start + np.cumsum([0.0] + gaps)
    inner = draw(st.lists(st.floats(0, 1), min_size=n, max_size=n))
    tails = draw(st.sampled_from([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0), "equal"]))
    if tails == "equal":
        v = draw(st.floats(0, 1))
        tails = (v, v)
    return KreinFn(tuple(breaks), (tails[0], *inner, tails[1]))


# --------------------------------------------------------------------------
# evaluation


def test_eval_examples():
    assert evaluate(DELTA0, 1j) == pytest.approx(1j)
    assert evaluate(HerglotzRep(0.0, 1.0), 2 + 1j) == pytest.approx(2 + 1j)
    assert evaluate(from_krein(KreinFn.constant(0.5)), 1j) == pytest.approx(1j, abs=1e-15)
    with pytest.raises(DomainError):
        evaluate(DELTA0, 1.0)


def test_herglotz_rep_shift_term():
    # a + int (1/(t-z) - t/(t^2+1)) dmu for mu = delta_1
    F = HerglotzRep(0.3, 0.0, Measure.dirac(1.0))
    z = 0.2 + 0.7j
    assert F(z) == pytest.approx(0.3 + 1 / (1 - z) - 0.5)


def test_from_krein_closed_forms():
    step = from_krein(KreinFn((0.0,), (0.0, 1.0)))
    for z in (1j, 2 + 0.5j, -3 + 0.1j):
        assert step(z) == pytest.approx(-1 / z, rel=1e-13)
    G = from_krein(KreinFn.constant(0.0))
    assert G.degenerate and G(1j) == pytest.approx(1.0)


@given(krein_fns(), st.floats(-0.5, 0.5), st.floats(-4, 4), st.floats(0.05, 2))
def test_from_krein_matches_quadrature(xi, c, x, y):
    z = complex(x, y)
    lo, hi = xi.breaks[0] - 1, xi.breaks[-1] + 1

    def integrand(t, part):
        return getattr((1 / (t - z) - t / (t * t + 1)) * float(xi(t)), part)

    def piece(part):
        pts = list(xi.breaks) + [x]
        total = integrate.quad(integrand, lo, hi, args=(part,), points=pts, limit=400)[0]
        # xi is constant on the tails; the kernel decays like 1/t^2 there
        total += integrate.quad(integrand, -np.inf, lo, args=(part,), limit=400)[0]
        total += integrate.quad(integrand, hi, np.inf, args=(part,), limit=400)[0]
        return total

    ref = c + complex(piece("real"), piece("imag"))
    assert from_krein(xi, c).log(z) == pytest.approx(ref, abs=1e-6)


@given(krein_fns(), st.floats(-4, 4), st.floats(1e-3, 3))
def test_from_krein_is_herglotz(xi, x, y):
    assert from_krein(xi)(complex(x, y)).imag >= -1e-14


def test_modulus_calibration():
    xi = KreinFn((0.0, 1.0), (0.0, 0.5, 1.0))
    G = from_krein(xi, modulus_at_i=3.0)
    assert abs(G(1j)) == pytest.approx(3.0)


def test_krein_fn_validation():
    with pytest.raises(KreinError):
        KreinFn((0.0,), (0.0, 1.5))
    with pytest.raises(KreinError):
        KreinFn((0.0,), (0.3, 1.0))
    with pytest.raises(KreinError):
        KreinFn((1.0, 0.0), (0.0, 0.5, 0.0))
    xi = KreinFn((0.0, 1.0), (0.0, 0.25, 1.0))
    assert KreinFn.from_json(xi.to_json()) == xi


# --------------------------------------------------------------------------
# boundary values and the Krein function


def test_boundary_value_examples():
    lim = boundary_value(DELTA0, 1.0)
    assert lim.converged and lim.value == pytest.approx(-1.0, abs=1e-8)
    lim = boundary_value(arcsine_F, 0.0)
    assert lim.converged and lim.value == pytest.approx(0.5j, abs=1e-8)
    assert boundary_value(DELTA0, 0.0).divergent


def test_krein_xi_examples():
    assert krein_xi(DELTA0, 1.0).value == pytest.approx(1.0)
    assert krein_xi(DELTA0, -1.0).value == pytest.approx(0.0)
    assert krein_xi(arcsine_F, 0.0).value == pytest.approx(0.5, abs=1e-8)


@given(krein_fns(), st.floats(-0.5, 0.5), st.floats(0, 1))
def test_krein_round_trip(xi, c, u):
    lo, hi = xi.breaks[0] - 1, xi.breaks[-1] + 1
    x = lo + u * (hi - lo)
    if not xi.is_continuous_at(x, margin=1e-3):
        x += 2e-3
    kv = krein_xi(from_krein(xi, c), x)
    assert kv.value == pytest.approx(float(xi(x)), abs=1e-4)


# --------------------------------------------------------------------------
# reflectionless functions and atoms


def test_is_reflectionless_examples():
    rep = is_reflectionless(arcsine_F, SetUnion.of((-1.9, 1.9)))
    assert rep.passed and rep.max_abs_re <= 1e-6
    half = from_krein(KreinFn.constant(0.5))
    assert is_reflectionless(half, E2).max_abs_re == pytest.approx(0.0, abs=1e-15)
    assert not is_reflectionless(DELTA0, SetUnion.of((1, 2))).passed


def test_point_mass_examples():
    assert point_mass(DELTA0, 0.0) == pytest.approx(1.0)
    assert point_mass(arcsine_F, 0.0) == pytest.approx(0.0, abs=1e-8)
    F = from_krein(atom_constructor(E2, 0.0))
    assert point_mass(F, 0.0) > 0.1


def test_pointmass_possible():
    assert pointmass_possible(E2, 0.0)
    assert not pointmass_possible(SetUnion.of((-2, 2)), 0.0)
    assert not pointmass_possible(SetUnion.of((0, 1)), 0.0)


def test_atom_constructor():
    xi = atom_constructor(E2, 0.0)
    assert xi.breaks == (-2.0, -1.0, 0.0, 1.0, 2.0)
    assert xi.values == (0.0, 0.5, 0.0, 1.0, 0.5, 1.0)
    assert atom_constructor(SetUnion(), 0.0) == KreinFn((0.0,), (0.0, 1.0))
    with pytest.raises(KreinError):
        atom_constructor(SetUnion.of((-2, 2)), 0.0)


def test_atom_integral_consistency():
    xi = atom_constructor(E2, 0.0)
    assert math.isfinite(atom_integral(xi, 0.0))
    F = from_krein(xi)
    assert point_mass(F, 0.0) > 0
    inside = KreinFn((-1.0, 1.0), (0.0, 0.5, 1.0))
    assert atom_integral(inside, 0.0) == math.inf
    assert point_mass(from_krein(inside), 0.0) == pytest.approx(0.0, abs=1e-6)


# --------------------------------------------------------------------------
# the rearrangement inequality and xi_0


def test_interval_integral_examples():
    one = KreinFn((0.0, 1.0), (0.0, 1.0, 0.0))
    assert interval_integral(one, 0.0, 1.0, -1.0) == pytest.approx(math.log(2))
    assert interval_integral(KreinFn.constant(0.0), 0.0, 1.0, 3.0) == 0.0
    half = KreinFn((0.0, 0.5), (0.0, 1.0, 0.0))
    assert interval_integral(half, 0.0, 1.0, 2.0) == pytest.approx(-math.log(4 / 3))
    with pytest.raises(DomainError):
        interval_integral(one, 0.0, 1.0, 0.5)


def test_interval_integral_vs_quadrature():
    xi = KreinFn((0.0, 0.3, 0.7, 1.0), (0.0, 0.2, 0.9, 0.4, 0.0))
    for x in (-0.5, 1.3):
        ref = integrate.quad(lambda t: float(xi(t)) / (t - x), 0, 1, points=[0.3, 0.7])[0]
        assert interval_integral(xi, 0.0, 1.0, x) == pytest.approx(ref, abs=1e-12)


def test_xi_naught():
    xi = KreinFn((0.0, 1.0, 2.0, 3.0), (1.0, 0.5, 0.25, 0.5, 1.0))
    x0 = xi_naught(xi, SetUnion.of((0, 1), (2, 3)))
    assert x0.breaks == (0.0, 1.0, 1.25, 2.0, 3.0)
    assert x0.values == (1.0, 0.5, 1.0, 0.0, 0.5, 1.0)
    assert xi_naught(x0, SetUnion.of((0, 1), (2, 3))) == x0
    zero = KreinFn((0.0, 1.0, 2.0, 3.0), (1.0, 0.5, 0.0, 0.5, 1.0))
    assert xi_naught(zero, SetUnion.of((0, 1), (2, 3)))(1.5) == 0.0
    with pytest.raises(KreinError):
        xi_naught(KreinFn((0.0, 1.0), (0.0, 0.3, 0.0)), SetUnion.of((0, 1)))


@given(st.floats(-3, 2), st.floats(0.1, 3), st.lists(st.floats(0, 1), min_size=1, max_size=6),
       st.floats(0.01, 2), st.booleans())
def test_rearrangement_inequality(a, width, vals, gap, left):
    # mass pushed to the left end of (a, b) maximises I_x for x on either side
    b = a + width
    breaks = np.linspace(a, b, len(vals) + 1)
    xi = KreinFn(tuple(breaks), (0.0, *vals, 0.0))
    c = xi.integral(a, b)
    # a + c == a when c is below the spacing of doubles near a
    chi = KreinFn((a, a + c), (0.0, 1.0, 0.0)) if a + c > a else KreinFn.constant(0.0)
    x = a - gap if left else b + gap
    assert interval_integral(xi, a, b, x) <= interval_integral(chi, a, b, x) + 1e-12
