import numpy as np
import pytest

from herzlab import corpus
from herzlab.grid import SampledFunction, make_grid

S = make_grid(1, 6, 16384, -20, 6)


def test_deterministic():
    a = corpus.make_corpus(S, 6, seed=3)
    b = corpus.make_corpus(S, 6, seed=3)
    assert all(np.array_equal(x.values, y.values) and x.label == y.label for x, y in zip(a, b))
    c = corpus.make_corpus(S, 6, seed=4)
    assert not np.array_equal(a[0].values, c[0].values)


def test_prefix_property():
    # member i does not depend on the corpus size
    small = corpus.make_corpus(S, 4)
    big = corpus.make_corpus(S, 9)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(small, big))
    assert np.array_equal(corpus.sample(S, 0, 7).values, big[7].values)


def test_families_cycle():
    labels = [f.label.split(":")[1] for f in corpus.make_corpus(S, 6)]
    assert [lab.split("(")[0] for lab in labels] == ["packet", "mixture", "annulus"] * 2
    only = corpus.make_corpus(S, 3, families=("annulus",))
    assert all("annulus" in f.label for f in only)
    with pytest.raises(ValueError):
        corpus.sample(S, 0, 0, families=("spline",))


def test_decay_contract(spec2):
    for s in (S, spec2):
        for f in corpus.make_corpus(s, 12):
            assert corpus.boundary_max(f) <= corpus.BOUNDARY_TOL
            assert np.max(np.abs(f.values)) > 0
    with pytest.raises(ValueError):
        corpus.check_decay(SampledFunction(S, np.ones(S.shape), "flat"))


def test_band_limited_levels():
    fs = corpus.band_limited_corpus(S, 8)
    assert [f.label.split("l=")[1].rstrip(")") for f in fs] == ["1", "2", "3", "4", "5", "6", "1", "2"]


def test_vector_sample_members_differ():
    v = corpus.vector_sample(S, 0, 5, J=3)
    assert len(v) == 3
    assert not np.array_equal(v[0].values, v[1].values)
    assert np.array_equal(corpus.vector_sample(S, 0, 5, J=2)[1].values, v[1].values)
