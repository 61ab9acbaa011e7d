import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import indicator
from herzlab import corpus
from herzlab.grid import SampledFunction, make_grid
from herzlab.herz import make_herz_params
from herzlab.operators import (
    VectorFunction,
    WindowFamily,
    all_windows,
    convolution_vs_maximal,
    discrete_convolution_bound,
    geometric_ratio,
    maximal,
    maximal_t,
    size_condition_operator,
    size_majorant,
    size_operator_at,
    vector_ell_r,
    vector_herz_sides,
    vector_maximal_lebesgue,
)

S = make_grid(1, 6, 16384, -20, 6)
SMALL = make_grid(1, 3, 256, -4, 3)


def _brute_maximal_at(a, i):
    """Max over every grid-aligned interval containing cell i (zeros outside the grid)."""
    N = a.size
    c = np.concatenate([[0.0], np.cumsum(a)])
    best = 0.0
    for lo in range(-N, i + 1):
        for hi in range(i, 2 * N):
            s = c[min(hi, N - 1) + 1] - c[max(lo, 0)]
            best = max(best, s / (hi - lo + 1))
    return best


def test_maximal_of_constant(spec2):
    for s in (S, spec2):
        f = SampledFunction(s, np.full(s.shape, 2.5))
        assert np.max(np.abs(maximal(f).values - 2.5)) <= 1e-12


def test_maximal_indicator_at_two():
    f = indicator(S, 0, 1)
    (i,) = S.nearest_index(2.0)
    assert abs(maximal(f).values[i] - 0.5) <= 2 * S.step


def test_dyadic_windows_close_to_exhaustive():
    f = SampledFunction(SMALL, np.exp(-SMALL.axis**2) * (1 + np.cos(5 * SMALL.axis)))
    dy = maximal(f).values
    for i in (3, 60, 128, 200):
        exact = _brute_maximal_at(f.abs, i)
        assert dy[i] <= exact + 1e-12
        # dyadic offsets lose at most a factor 2 of window length on each side
        assert dy[i] >= exact / 4


def test_all_windows_match_brute_force():
    f = SampledFunction(SMALL, np.abs(np.sin(3 * SMALL.axis)) * np.exp(-np.abs(SMALL.axis)))
    W = all_windows(SMALL, SMALL.samples_per_axis)
    m = maximal(f, W).values
    for i in (0, 17, 128, 255):
        assert abs(m[i] - _brute_maximal_at(f.abs, i)) <= 1e-12


def test_maximal_t():
    f = indicator(S, 0, 1)
    (i,) = S.nearest_index(2.0)
    assert np.array_equal(maximal_t(f, 1.0).values, maximal(f).values)
    assert abs(maximal_t(f, 0.5).values[i] - 0.25) <= 4 * S.step
    c = SampledFunction(S, np.full(S.shape, 3.0))
    assert np.max(np.abs(maximal_t(c, 0.5).values - 3.0)) <= 1e-12
    with pytest.raises(ValueError):
        maximal_t(f, 0.0)


def test_window_family_validation():
    with pytest.raises(ValueError):
        WindowFamily(np.array([[1, 2, 3]]), 1)
    with pytest.raises(ValueError):
        WindowFamily(np.array([[-1, 2]]), 1)
    w = WindowFamily(np.array([[0, 3]]), 1)
    assert {tuple(r) for r in w.offsets} == {(0, 3), (3, 0)}
    assert len(w.union(WindowFamily(np.array([[1, 1]]), 1))) == 3
    with pytest.raises(ValueError):
        all_windows(make_grid(2, 3, 64, -3, 3), 4)


def test_kernel_power_closed_form():
    f = indicator(S, 0, 1)
    assert abs(size_operator_at("kernel_power", f, 4.0) - np.log(4 / 3)) < 1e-3
    (i,) = S.nearest_index(4.0)
    x = S.axis[i]
    grid = size_condition_operator("kernel_power", f).values[i]
    assert abs(grid - np.log(x / (x - 1))) < 1e-3


def test_grid_operator_equals_point_evaluation():
    f = corpus.sample(S, 0, 1)
    for kind in ("kernel_power", "riesz_truncated"):
        g = size_condition_operator(kind, f).values
        for i in (100, 8000, 8192, 15000):
            assert abs(g[i] - size_operator_at(kind, f, S.axis[i])) <= 1e-10 * (1 + abs(g[i]))


def test_riesz_of_even_function_vanishes_at_origin():
    # the kernel is odd, so an even input gives an odd output (zero at 0)
    f = SampledFunction(S, np.exp(-S.axis**2))
    assert abs(size_operator_at("riesz_truncated", f, 0.0)) <= 1e-10


def test_size_condition_holds_off_support():
    f = indicator(S, -1, 1)
    maj = size_majorant(f).values
    off = np.abs(S.axis) > 1.5
    for kind in ("kernel_power", "riesz_truncated"):
        T = np.abs(size_condition_operator(kind, f).values)
        assert np.all(T[off] <= maj[off] + 1e-12)
    with pytest.raises(ValueError):
        size_condition_operator("hilbert", f)
    with pytest.raises(ValueError):
        size_operator_at("hilbert", f, 0.0)


def test_vector_ell_r():
    f = corpus.sample(S, 0, 0)
    op = maximal
    one = vector_ell_r(VectorFunction((f,), 2.0), op).values
    assert np.allclose(one, maximal(f).values, rtol=1e-14, atol=0)
    three = vector_ell_r(VectorFunction((f, f, f), 2.0), op).values
    assert np.allclose(three, 3**0.5 * maximal(f).values, rtol=1e-13, atol=0)
    a, b = indicator(S, 0, 1), indicator(S, 1, 2)  # 1 is a cell edge, not a centre
    v = vector_ell_r(VectorFunction((a, b), 2.0)).values
    inside = (S.axis >= 0) & (S.axis <= 2)
    assert np.all(v <= 1) and np.all(v[inside] == 1)
    sup = vector_ell_r(VectorFunction((f, 2 * f), np.inf)).values
    assert np.array_equal(sup, 2 * f.abs)


def test_vector_validation():
    f = corpus.sample(S, 0, 0)
    with pytest.raises(ValueError):
        VectorFunction((), 2.0)
    with pytest.raises(ValueError):
        VectorFunction((f,), 0.0)
    with pytest.raises(ValueError):
        vector_ell_r(VectorFunction((f,), 1.0), strict=True)


def test_vector_sides_are_finite():
    vf = VectorFunction(tuple(corpus.vector_sample(S, 0, 0, 3)), 2.0)
    lhs, rhs = vector_maximal_lebesgue(vf, 2.0)
    assert rhs <= lhs < 10 * rhs
    H = make_herz_params(S, alpha=0.1)
    lhs, rhs = vector_herz_sides(vf, maximal, H)
    assert rhs <= lhs < 10 * rhs


def test_geometric_ratio():
    # single shell at k0 = 3 of 8 levels
    j = np.arange(8)
    assert geometric_ratio(8, 3, 1.0, 2.0) == np.sqrt(np.sum(4.0 ** -np.abs(j - 3)))
    assert abs(geometric_ratio(8, 3, 60.0, 2.0) - 1) < 1e-15
    assert geometric_ratio(8, 3, 1.0, np.inf) == 1.0


def test_single_shell_ratio_is_geometric():
    H = make_herz_params(S)
    f = corpus.sample(S, 0, 2)
    for k0 in (0, 4, 7):
        g = [f.abs if k == k0 else np.zeros(S.shape) for k in range(8)]
        rep = discrete_convolution_bound(g, 1.0, 2.0, H)
        assert abs(rep.ratios[0] / geometric_ratio(8, k0, 1.0, 2.0) - 1) <= 1e-9


def test_convolution_bound_rejects_negative():
    H = make_herz_params(S)
    with pytest.raises(ValueError):
        discrete_convolution_bound([-np.ones(S.shape)], 1.0, 2.0, H)
    with pytest.raises(ValueError):
        discrete_convolution_bound([np.ones(S.shape)], 0.0, 2.0, H)


def test_convolution_vs_maximal_bounded():
    f = corpus.sample(S, 0, 0)
    c = convolution_vs_maximal(f, [2.0**j for j in range(6)])
    assert 0 < c < 10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 500), st.integers(0, 500))
def test_random_young_bound(i, j):
    H = make_herz_params(S)
    rng = np.random.default_rng([i, j])
    g = [corpus.sample(S, 1, int(k)).abs * float(np.exp(rng.uniform(-2, 2))) for k in rng.integers(0, 50, 6)]
    rep = discrete_convolution_bound(g, 1.0, 2.0, H)
    assert rep.ratios[0] <= 6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 300), st.integers(0, 300), st.floats(-50, 50))
def test_maximal_sublinear_and_homogeneous(i, j, c):
    f, g = corpus.sample(SMALL, 5, i), corpus.sample(SMALL, 6, j)
    Mf, Mg = maximal(f).values, maximal(g).values
    assert np.all(maximal(f + g).values <= Mf + Mg + 1e-12)
    assert np.allclose(maximal(f * c).values, abs(c) * Mf, rtol=1e-12, atol=1e-300)
    assert np.all(Mf >= f.abs - 1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 300), st.integers(1, 20))
def test_maximal_translation(i, shift):
    f = corpus.sample(S, 7, i)
    a = maximal(f).values
    b = maximal(f.with_values(np.roll(f.values, shift))).values
    # the corpus vanishes near the edges, so rolling is a true translation
    assert np.allclose(np.roll(a, shift)[100:-100], b[100:-100], rtol=1e-12, atol=1e-14)
