import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian, indicator
from herzlab import corpus
from herzlab.exponents import constant_exponent, exponent_from_callable, log_perturbed, power_weight, unit_weight
from herzlab.grid import SampledFunction, integrate, make_grid
from herzlab.lebesgue import holder_check, luxemburg_norm, luxemburg_rows, modular, weighted_norm

SMALL = make_grid(1, 4, 1024, -6, 4)


def test_modular_indicator(spec):
    assert abs(modular(indicator(spec, 0, 1), 2.0, 1.0) - 1) <= spec.step


def test_modular_large_lambda(spec):
    assert modular(gaussian(spec), 2.0, 1e8) < 1e-15


def test_modular_piecewise(spec):
    x = spec.coords[0]
    f = SampledFunction(spec, ((x >= 0) & (x <= 1)) + 2.0 * ((x >= 2) & (x <= 3)))
    q = exponent_from_callable(spec, lambda x: 2 + (x > 1.5))
    assert abs(modular(f, q, 2.0) - 1.25) <= 2 * spec.step


def test_modular_rejects_bad_lambda(spec):
    with pytest.raises(ValueError):
        modular(gaussian(spec), 2.0, 0.0)


@pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.0, 4.0, 9.0])
def test_indicator_norm(spec, p):
    assert abs(luxemburg_norm(indicator(spec, 0, 1), p).norm - 1) <= spec.step


def test_zero(spec):
    assert luxemburg_norm(SampledFunction(spec, np.zeros(spec.shape)), 2.0).norm == 0.0


def test_gaussian_l2(spec):
    f = SampledFunction(spec, np.exp(-spec.coords[0] ** 2))
    # independent quadrature of int f^2 by Gauss-Legendre
    x, w = np.polynomial.legendre.leggauss(200)
    oracle = np.sqrt(12 * np.sum(w * np.exp(-2 * (12 * x) ** 2)))
    got = luxemburg_norm(f, 2.0).norm
    assert abs(got - oracle) < 1e-4
    assert abs(got - (np.pi / 2) ** 0.25) < 1e-4


def test_constant_exponent_matches_lp(spec):
    for f in corpus.make_corpus(spec, 6):
        for p in (1.0, 1.5, 2.0, 4.0):
            lp = integrate(f.with_values(f.abs**p)) ** (1 / p)
            assert abs(luxemburg_norm(f, p).norm - lp) / lp <= 1e-10


def test_weighted_unit_equals_unweighted(spec):
    f = gaussian(spec)
    q = log_perturbed(spec, 3, 2, 1)
    assert weighted_norm(f, q, unit_weight(spec)) == luxemburg_norm(f, q).norm


def test_weighted_closed_form(spec):
    v = weighted_norm(indicator(spec, 1, 2), 2.0, power_weight(spec, 1.0))
    assert abs(v - np.sqrt(7 / 3)) < 1e-3


def test_holder_equality_case(spec):
    chi = indicator(spec, 0, 1)
    r = holder_check(chi, chi, constant_exponent(spec, 2))
    assert abs(r.ratio - 0.5) <= spec.step


def test_holder_zero(spec):
    z = SampledFunction(spec, np.zeros(spec.shape))
    assert holder_check(z, gaussian(spec), constant_exponent(spec, 2)).ratio == 0


def test_rows_match_single_norms():
    fs = corpus.make_corpus(SMALL, 5)
    q = log_perturbed(SMALL, 1.5, 3, 2)
    vals = np.concatenate([f.abs for f in fs])
    rows = np.repeat(np.arange(6), SMALL.size)[: 5 * SMALL.size]
    got = luxemburg_rows(vals, np.tile(q.values, 5), rows, 6, SMALL.cell_volume)
    assert got[5] == 0
    for i, f in enumerate(fs):
        assert got[i] == luxemburg_norm(f, q).norm


def test_rows_reject_bad_input():
    with pytest.raises(ValueError):
        luxemburg_rows(np.array([1.0, np.inf]), np.array([2.0, 2.0]), np.zeros(2, int), 1, 1.0)
    with pytest.raises(ValueError):
        luxemburg_rows(np.array([1.0]), np.array([0.0]), np.zeros(1, int), 1, 1.0)


def test_extreme_scales(spec):
    f = gaussian(spec)
    q = log_perturbed(spec, 1.2, 6, 1)
    n = luxemburg_norm(f, q).norm
    for c in (1e-200, 1e200):
        assert abs(luxemburg_norm(f * c, q).norm / (c * n) - 1) < 1e-10


def _rand_function(seed):
    rng = np.random.default_rng(seed)
    x = SMALL.coords[0]
    v = np.zeros(SMALL.shape)
    for _ in range(3):
        v += rng.normal() * np.exp(-((x - rng.uniform(-4, 4)) ** 2) / rng.uniform(0.05, 4))
    return SampledFunction(SMALL, v)


exps = st.tuples(st.floats(1.0, 5.0), st.floats(1.0, 5.0), st.floats(0.0, 3.0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), exps, st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3))
def test_homogeneity_and_unit_modular(seed, qa, c):
    f = _rand_function(seed)
    q = log_perturbed(SMALL, *qa)
    r = luxemburg_norm(f, q)
    assert abs(luxemburg_norm(f * c, q).norm - abs(c) * r.norm) <= 1e-9 * abs(c) * r.norm
    assert abs(modular(f, q, r.norm) - 1) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000), exps)
def test_triangle_inequality(s1, s2, qa):
    f, g = _rand_function(s1), _rand_function(s2)
    q = log_perturbed(SMALL, *qa)
    lhs = luxemburg_norm(f + g, q).norm
    assert lhs <= (luxemburg_norm(f, q).norm + luxemburg_norm(g, q).norm) * (1 + 1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), exps, st.floats(0.0, 1.0))
def test_lattice_monotone(seed, qa, t):
    f = _rand_function(seed)
    q = log_perturbed(SMALL, *qa)
    assert luxemburg_norm(f * t, q).norm <= luxemburg_norm(f, q).norm * (1 + 1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_holder_bound_q3(s1, s2):
    r = holder_check(_rand_function(s1), _rand_function(s2), constant_exponent(SMALL, 3))
    assert r.ratio <= 1
