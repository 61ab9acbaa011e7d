import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herzlab import corpus
from herzlab.grid import SampledFunction, make_grid
from herzlab.herz import herz_norm, make_herz_params
from herzlab.littlewood_paley import (
    PeetreParams,
    build_admissible_pair,
    build_kernel_family,
    build_resolution_of_unity,
)
from herzlab.spaces import (
    KERNEL_NORMS,
    TLParams,
    default_t_grid,
    equivalence_experiment,
    kernel_integrands,
    kernel_norms,
    t_weights,
    tl_integrand,
    tl_norm,
    tl_norm_admissible,
    tl_norm_peetre,
)

S = make_grid(1, 5, 4096, -12, 5)
H = make_herz_params(S, alpha=0.1)
ROU = build_resolution_of_unity(S)
PAIR = build_admissible_pair(S)
FAM = build_kernel_family(S)
P = TLParams(H, 0.5, 2.0, ROU)


def test_t_grid_and_weights():
    tg = default_t_grid(3)
    assert tg[0] == 1 and len(tg) == 16
    assert np.allclose(np.diff(np.log2(tg)), -0.25)
    w = t_weights(tg)
    assert abs(w.sum() - np.log(tg.max() / tg.min())) <= 1e-14
    assert np.array_equal(t_weights(np.array([0.5])), [1.0])


def test_params_validation():
    with pytest.raises(ValueError):
        TLParams(H, np.inf, 2.0, ROU)
    with pytest.raises(ValueError):
        TLParams(H, 0.0, 0.0, ROU)
    with pytest.raises(ValueError):
        TLParams(H, 0.0, 2.0, ROU, t_grid=np.array([2.0]))
    with pytest.raises(ValueError):
        TLParams(make_herz_params(make_grid(1, 4, 2048, -8, 4)), 0.0, 2.0, ROU)
    with pytest.raises(ValueError):
        tl_norm(corpus.sample(S, 0, 0), P.with_(bank=PAIR))
    with pytest.raises(ValueError):
        tl_norm_admissible(corpus.sample(S, 0, 0), P)


def test_zero_function():
    z = SampledFunction(S, np.zeros(S.shape))
    assert tl_norm(z, P) == 0
    assert tl_norm_admissible(z, P.with_(bank=PAIR)) == 0
    assert tl_norm_peetre(z, P.with_(bank=PAIR)) == 0
    kn = kernel_norms(z, P.with_(bank=FAM))
    assert all(v == 0 for v in kn.values.values())


def test_single_level_packet_bounds():
    # at most three levels see a level-l packet and the levels sum to f
    P0 = P.with_(s=0.0)
    for f in corpus.band_limited_corpus(S, 4):
        t = tl_norm(f, P0)
        h = herz_norm(f, H)
        assert h / np.sqrt(3) <= t * (1 + 1e-12)
        assert t <= 3 * h


def test_beta_infinity_is_max():
    f = corpus.sample(S, 0, 1)
    g = tl_integrand(f, P.with_(beta=np.inf, s=0.0))
    from herzlab.littlewood_paley import convolve_levels

    assert np.array_equal(g, np.max(np.abs(convolve_levels(f, ROU)), axis=0))
    assert np.all(tl_integrand(f, P.with_(beta=1.0)) >= tl_integrand(f, P.with_(beta=2.0)) * (1 - 1e-12))


def test_peetre_dominates_and_collapses():
    for f in corpus.make_corpus(S, 3):
        t = tl_norm(f, P)
        p4 = tl_norm_peetre(f, P.with_(peetre=PeetreParams(a=4.0)))
        p64 = tl_norm_peetre(f, P.with_(peetre=PeetreParams(a=64.0)))
        assert t <= p64 * (1 + 1e-12) and p64 <= p4 * (1 + 1e-12)
        assert p64 / t <= 1.05


def test_peetre_flags():
    f = corpus.sample(S, 0, 0)
    _, ok = tl_norm_peetre(f, P, with_flags=True)
    assert not ok["hypothesis_violated"]
    v, bad = tl_norm_peetre(f, P.with_(peetre=PeetreParams(a=1.5)), with_flags=True)
    assert bad["hypothesis_violated"] and not bad["a_t_gt_n"] and np.isfinite(v)


def test_kernel_norms_flags_and_order():
    f = corpus.sample(S, 0, 2)
    kn = kernel_norms(f, P.with_(bank=FAM))
    assert kn.names == list(KERNEL_NORMS)
    assert kn.flags["order_2_ge_1"] and kn.flags["order_4_ge_5"]
    assert kn.flags["s_lt_S_plus_1"] and kn.flags["t_grid_per_octave_ok"]
    assert kn.values["norm2"] >= kn.values["norm1"] and kn.values["norm4"] >= kn.values["norm5"]
    assert np.allclose(np.diag(kn.pairwise_ratios), 1)
    assert "norm1" in kn.table()
    with pytest.raises(ValueError):
        kernel_integrands(f, P)


def test_kernel_norms_homogeneous():
    f = corpus.sample(S, 0, 3)
    Pk = P.with_(bank=FAM)
    a = kernel_norms(f, Pk).values
    b = kernel_norms(f * -3.0, Pk).values
    for k in KERNEL_NORMS:
        assert abs(b[k] - 3 * a[k]) <= 1e-10 * 3 * a[k]


def test_equivalence_identity_pair():
    fs = corpus.make_corpus(S, 5)
    A = lambda f: tl_norm(f, P)  # noqa: E731
    rep = equivalence_experiment(fs, (A, A))
    assert rep.spread == 1.0
    rep2 = equivalence_experiment(fs, (A, lambda f: 2.5 * A(f)))
    assert abs(rep2.spread - 1) <= 1e-15 and abs(rep2.max_ratio - 0.4) <= 1e-15
    with pytest.raises(ValueError):
        equivalence_experiment([], (A, A))


def test_equivalence_zero_member_flagged():
    fs = [SampledFunction(S, np.zeros(S.shape), "zero"), corpus.sample(S, 0, 0)]
    A = lambda f: tl_norm(f, P)  # noqa: E731
    rep = equivalence_experiment(fs, (A, A))
    assert rep.flags[0] == "zero" and rep.skipped == 1 and rep.spread == 1.0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 100), st.floats(1e-3, 1e3))
def test_tl_homogeneity(index, c):
    f = corpus.sample(S, 9, index)
    assert abs(tl_norm(f * c, P) - c * tl_norm(f, P)) <= 1e-9 * c * tl_norm(f, P)
