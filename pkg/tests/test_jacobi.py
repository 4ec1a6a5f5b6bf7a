import math
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from jacobispec.jacobi import (
    FreeModel,
    PeriodicModel,
    QuasiPeriodicModel,
    RandomModel,
    TableModel,
    Tridiagonal,
    coeffs,
    eigenvalues,
    fminus,
    green_avg,
    m_free,
    m_plus,
    model_from_dict,
    prufer_minus,
    sign_changes,
    solution,
    sturm_count,
    truncate,
    wronskian,
)
from jacobispec.measures import Measure, log_potential

FREE = FreeModel()
PER = PeriodicModel((1, 1), (1, -1))

@st.composite
def periodic_models(draw):
    p = draw(st.integers(1, 4))
    a = draw(st.lists(st.floats(0.5, 2), min_size=p, max_size=p))
    b = draw(st.lists(st.floats(-1, 1), min_size=p, max_size=p))
    return PeriodicModel(tuple(a), tuple(b))


models = st.one_of(
    st.builds(RandomModel, st.integers(0, 10_000), st.just((0.5, 1.5)), st.just((-1.0, 1.0))),
    periodic_models(),
    st.builds(lambda lam, th: QuasiPeriodicModel(lam, "golden", th), st.floats(0.2, 3), st.floats(0, 1)),
)


# --------------------------------------------------------------------------
# coefficient models


def test_coeffs_examples():
    assert coeffs(FREE, 7) == (1.0, 0.0)
    assert coeffs(PER, 3) == (1.0, 1.0)
    a, b = coeffs(QuasiPeriodicModel(1.0), 1)
    alpha = (math.sqrt(5) - 1) / 2
    assert a == 1.0 and b == pytest.approx(2 * math.cos(2 * math.pi * alpha), abs=1e-15)
    assert b == pytest.approx(-1.47474, abs=1e-5)
    assert coeffs(RandomModel(3), 0) == (1.0, 0.0)


def test_golden_phase_is_accurate_for_large_n():
    getcontext().prec = 60
    alpha = (Decimal(5).sqrt() - 1) / 2
    qp = QuasiPeriodicModel(1.0, "golden", 0.1)
    for n in (10**6, 10**7 + 3, 2**26 - 1):
        exact = float((alpha * n + Decimal("0.1")) % 1)
        assert abs(float(qp.phase(n)) - exact) < 1e-14


def test_random_model_reproducible_and_prefix_consistent():
    m = RandomModel(42, (0.5, 1.5), (-2, 2))
    a1, b1 = m.arrays(50)
    a2, b2 = RandomModel(42, (0.5, 1.5), (-2, 2)).arrays(200)
    np.testing.assert_array_equal(a1, a2[:51])
    np.testing.assert_array_equal(b1, b2[:51])
    assert coeffs(m, 17) == (a2[17], b2[17])
    assert not np.array_equal(RandomModel(43).arrays(10)[1], RandomModel(42).arrays(10)[1])


@given(models)
def test_bound_invariant(model):
    a, b = model.arrays(300)
    C = model.bound
    assert C > 0
    assert np.all(a[1:] >= 1 / (C + 1)) and np.all(a[1:] <= C + 1) and np.all(np.abs(b[1:]) <= C)


def test_table_model_copies_entries_and_has_free_tail():
    m = TableModel((0.5, 2.0, 1.5), (0.1, -0.2, 0.3))
    J = truncate(m, 5)
    np.testing.assert_array_equal(J.diag, [0.1, -0.2, 0.3, 0.0, 0.0])
    np.testing.assert_array_equal(J.off, [0.5, 2.0, 1.5, 1.0])


@pytest.mark.parametrize("m", [FREE, PER, QuasiPeriodicModel(2.0, 0.3, 0.2), RandomModel(5), TableModel((1.2,), (0.4,))])
def test_model_dict_round_trip(m):
    back = model_from_dict(m.to_dict())
    np.testing.assert_array_equal(back.arrays(20)[1], m.arrays(20)[1])
    np.testing.assert_array_equal(back.arrays(20)[0], m.arrays(20)[0])


# --------------------------------------------------------------------------
# solutions


def test_fminus_free_by_hand():
    t = 0.7
    f = fminus(FREE, t, 3).values()
    np.testing.assert_allclose(f, [0, 1, t, t * t - 1, t**3 - 2 * t], atol=1e-15)
    np.testing.assert_allclose(fminus(FREE, 1.0, 3).values()[1:], [1, 1, 0, -1], atol=1e-15)


@given(models, st.floats(-3, 3), st.floats(0, 2))
def test_fminus_recursion_residual(model, x, y):
    z = complex(x, y) if y else x
    assert fminus(model, z, 200).residual(model) <= 1e-12


def test_fminus_long_trace_does_not_overflow():
    tr = fminus(FREE, 10.0, 5000)
    la = tr.log_abs()
    assert np.all(np.isfinite(la[1:]))
    rate = (la[-1] - la[-2])
    assert rate == pytest.approx(math.log((10 + math.sqrt(96)) / 2), rel=1e-12)


def test_wronskian_constant():
    m = RandomModel(7, (0.5, 1.5))
    z = 0.3 + 0.4j
    u = solution(m, z, 40, 0.0, 1.0)
    v = solution(m, z, 40, 1.0, 0.0)
    w = wronskian(m, u, v)
    a, _ = m.arrays(40)
    scale = np.maximum(np.abs(a * u[:-1] * v[1:]), np.abs(a * u[1:] * v[:-1]))
    assert np.max(np.abs(w - w[0]) / scale) <= 1e-10


def test_free_orthonormality():
    # f_-(n, t) for the free model is U_{n-1}(t/2); spectral measure sqrt(4 - t^2)/(2 pi)
    for n in range(1, 11):
        def f2(th):
            t = 2 * math.cos(th)
            val = fminus(FREE, t, n).values()[n]
            return val * val * (2 * math.sin(th)) ** 2 / (2 * math.pi)
        assert integrate.quad(f2, 0, math.pi, limit=200)[0] == pytest.approx(1.0, abs=1e-8)


# --------------------------------------------------------------------------
# Prufer variables


def test_prufer_free_one_step():
    pr = prufer_minus(FREE, 1j, 1)
    assert 0 < pr.phi[1] - pr.phi[0] < math.pi
    assert pr.phi[0] == 0.0 and math.exp(pr.log_R[1]) == pytest.approx(1.0)


@given(models, st.floats(-3, 3), st.floats(1e-3, 2))
def test_prufer_reproduces_fminus(model, x, y):
    z = complex(x, y)
    pr = prufer_minus(model, z, 60)
    assert np.all(np.diff(pr.phi) > 0) and np.all(np.diff(pr.phi) < math.pi)
    f = fminus(model, z, 60)
    np.testing.assert_allclose(pr.log_R, f.log_abs()[1:], atol=1e-12)
    phase = np.exp(1j * pr.phi) - f.mant[1:] / np.abs(f.mant[1:])
    assert np.max(np.abs(phase)) < 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_prufer_angle_counts_sign_changes(seed):
    m = RandomModel(seed)
    N = 30
    for t in np.random.default_rng(seed).uniform(-2.5, 2.5, 4):
        pr = prufer_minus(m, complex(t, 1e-10), N)
        assert round(pr.phi[-1] / math.pi) == sign_changes(fminus(m, t, N))


def test_prufer_growth_matches_thouless():
    pr = prufer_minus(FREE, 3j, 100)
    assert pr.log_R[-1] / 100 == pytest.approx(log_potential(Measure.arcsine(), 3j), abs=1e-2)


# --------------------------------------------------------------------------
# m-functions and Green functions


def test_m_plus_free_examples():
    assert m_plus(FREE, 1j) == pytest.approx(1j * (math.sqrt(5) - 1) / 2)
    assert m_plus(FREE, 3 + 1e-14j).real == pytest.approx((-3 + math.sqrt(5)) / 2)
    # oracle: deep continued fraction without the closed-form tail
    deep = 0j
    for _ in range(5000):
        deep = 1 / (-1j - deep)
    assert m_plus(FREE, 1j) == pytest.approx(deep)


class _NoTail(PeriodicModel):
    def tail(self):
        return None


@pytest.mark.parametrize("z", [0.3 + 0.5j, 2.0 + 0.2j, -1.2 + 0.1j])
def test_m_plus_periodic_tail_matches_truncation(z):
    for m in (PER, PeriodicModel((0.7, 1.3, 1.0), (0.2, -0.5, 0.9))):
        deep, err = m_plus(_NoTail(m.a_table, m.b_table), z, depth=20000, with_error=True)
        assert abs(m_plus(m, z) - deep) < 1e-10
        assert err < 1e-10


def test_m_plus_table_model_tail():
    m = TableModel((0.5, 2.0), (0.3, -0.1))
    z = 0.4 + 0.3j
    m3 = m_free(z)
    m2 = 1 / (-0.1 - z - 4.0 * m3)
    m1 = 1 / (0.3 - z - 0.25 * m2)
    assert m_plus(m, z) == pytest.approx(m1)


@given(models, st.floats(-3, 3), st.floats(0.01, 2))
def test_m_plus_and_green_are_herglotz(model, x, y):
    z = complex(x, y)
    assert m_plus(model, z).imag > 0
    assert green_avg(model, z, 30).imag > 0


def test_green_avg_free_limit():
    assert abs(green_avg(FREE, 1j, 2000) - 1j / math.sqrt(5)) < 1e-3


def test_green_avg_single_entry_is_m_plus():
    for m in (FREE, PER, RandomModel(2)):
        z = 0.1 + 0.4j
        assert green_avg(m, z, 1) == pytest.approx(m_plus(m, z), abs=1e-10)


def test_green_avg_matches_dense_resolvent():
    m = RandomModel(11, (0.6, 1.4))
    z = -0.3 + 0.25j
    big = truncate(m, 3000).dense()
    G = np.linalg.inv(big - z * np.eye(3000))
    rep = green_avg(m, z, 50, with_error=True)
    assert abs(rep.value - np.mean(np.diag(G)[:50])) < 1e-10
    assert rep.error < 1e-8


def test_green_avg_floor():
    with pytest.raises(ValueError):
        green_avg(RandomModel(1), 0.2 + 1e-5j, 10)
    green_avg(FREE, 0.2 + 1e-12j, 10)  # exact tail: no floor


# --------------------------------------------------------------------------
# truncations and the eigensolver


def test_truncate_examples():
    J = truncate(FREE, 3)
    assert J.diag.tolist() == [0, 0, 0] and J.off.tolist() == [1, 1]
    assert truncate(PER, 2).diag.tolist() == [1, -1]


def test_sturm_count_examples():
    J = truncate(FREE, 3)
    assert sturm_count(J, 1.0) == 2
    assert sturm_count(J, 0.0) == 1
    lo, hi = J.gershgorin()
    assert sturm_count(J, lo - 1) == 0 and sturm_count(J, hi + 1) == 3


def test_eigenvalue_examples():
    np.testing.assert_allclose(eigenvalues(truncate(FREE, 3)), [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-12)
    assert eigenvalues(Tridiagonal([5.0], [])).tolist() == pytest.approx([5.0])
    N = 1000
    ref = np.sort(2 * np.cos(np.pi * np.arange(1, N + 1) / (N + 1)))
    assert np.max(np.abs(eigenvalues(truncate(FREE, N)) - ref)) <= 1e-10


def test_eigenvalues_split_blocks():
    J = Tridiagonal([1.0, 2.0, 3.0, 4.0], [0.5, 0.0, 0.25])
    np.testing.assert_allclose(eigenvalues(J), np.linalg.eigvalsh(J.dense()), atol=1e-12)


@given(models, st.integers(2, 80))
def test_eigenvalues_match_lapack_and_interlace(model, N):
    ev = eigenvalues(truncate(model, N))
    np.testing.assert_allclose(ev, np.linalg.eigvalsh(truncate(model, N).dense()), atol=1e-10)
    ev1 = eigenvalues(truncate(model, N + 1))
    # strict in exact arithmetic; deep-localized states coincide to round-off
    slack = 1e-10
    assert np.all(ev1[:-1] <= ev + slack) and np.all(ev <= ev1[1:] + slack)


def test_characteristic_polynomial_identity():
    m = RandomModel(9, (0.5, 1.5))
    N = 12
    a, _ = m.arrays(N)
    ev = eigenvalues(truncate(m, N))
    for t in (-2.7, -0.3, 0.8, 2.2):
        lhs = np.prod(t - ev)
        rhs = np.prod(a[1:]) * fminus(m, t, N).values()[-1]
        assert lhs == pytest.approx(rhs, rel=1e-10)
    mids = 0.5 * (ev[1:] + ev[:-1])
    signs = np.sign([fminus(m, t, N).values()[-1] for t in mids])
    assert np.all(signs[1:] != signs[:-1])


@given(st.integers(0, 10_000), st.integers(1, 200), st.floats(-3, 3))
def test_oscillation_equality(seed, N, t):
    m = RandomModel(seed, (0.5, 1.5))
    J = truncate(m, N)
    assert sign_changes(fminus(m, t, N)) == N - sturm_count(J, t)
