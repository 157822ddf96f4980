"""Sample streams: determinism, box membership, sequence values, and the
Double-Box statistics."""

import numpy as np
import pytest

from ccbc.sampling import (
    DoubleBox,
    SamplerConfigError,
    SamplerKind,
    make_sampler,
    next_batch,
)

BOX01 = (np.zeros(1), np.ones(1))


def unit_box(dim):
    return (np.zeros(dim), np.ones(dim))


ALL_TAGS = ("pseudo_random", "chaotic", "faure", "sobol", "latin_hypercube")


class TestStreams:
    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_membership_and_determinism(self, tag):
        dim = 6
        box = (np.full(dim, -2.0), np.full(dim, 3.0))
        a = next_batch(SamplerKind(tag, 5), dim, 500, box)
        b = next_batch(SamplerKind(tag, 5), dim, 500, box)
        assert a.shape == (500, dim)
        assert np.all(a >= box[0]) and np.all(a <= box[1])
        assert np.array_equal(a, b)

    # latin_hypercube excluded: each batch is a fresh stratified design
    # rather than a window of one infinite sequence
    @pytest.mark.parametrize(
        "tag", ("pseudo_random", "chaotic", "faure", "sobol")
    )
    def test_stream_continues_across_batches(self, tag):
        dim = 4
        s1 = make_sampler(SamplerKind(tag, 3), dim, unit_box(dim))
        chunks = np.vstack([s1.next_batch(100) for _ in range(3)])
        s2 = make_sampler(SamplerKind(tag, 3), dim, unit_box(dim))
        whole = s2.next_batch(300)
        assert chunks == pytest.approx(whole, abs=0)

    def test_faure_dim1_radical_inverse(self):
        pts = next_batch(SamplerKind("faure", 0), 1, 3, BOX01)
        assert pts[:, 0] == pytest.approx([0.5, 0.25, 0.75], abs=1e-15)

    def test_faure_seeds_differ(self):
        a = next_batch(SamplerKind("faure", 0), 4, 100, unit_box(4))
        b = next_batch(SamplerKind("faure", 1), 4, 100, unit_box(4))
        assert not np.array_equal(a, b)

    def test_latin_hypercube_bins(self):
        pts = next_batch(SamplerKind("latin_hypercube", 0), 3, 8, unit_box(3))
        for axis in range(3):
            bins = np.floor(pts[:, axis] * 8).astype(int)
            assert sorted(bins) == list(range(8))

    def test_chaotic_avoids_fixed_points(self):
        pts = next_batch(SamplerKind("chaotic", 0), 2, 5000, unit_box(2))
        assert np.all(pts > 0.0) and np.all(pts < 1.0)

    def test_unknown_tag_rejected(self):
        with pytest.raises(SamplerConfigError):
            SamplerKind("halton")

    def test_low_discrepancy_dim_cap(self):
        with pytest.raises(SamplerConfigError):
            next_batch(SamplerKind("faure", 0), 100, 1, unit_box(100))
        with pytest.raises(SamplerConfigError):
            next_batch(SamplerKind("sobol", 0), 100, 1, unit_box(100))

    def test_malformed_box(self):
        with pytest.raises(SamplerConfigError):
            next_batch(SamplerKind("pseudo_random", 0), 2,
                       4, (np.ones(2), np.zeros(2)))


class TestDoubleBox:
    def test_points_inside_inner_box(self):
        box = (np.full(4, -1.0), np.full(4, 1.0))
        db = DoubleBox(box, 128, seed=0)
        pts = db.draw()
        assert pts.shape == (128, 4)
        assert np.all(pts >= -1.0) and np.all(pts <= 1.0)

    def test_zero_count_noop(self):
        db = DoubleBox((np.zeros(2), np.ones(2)), 16, seed=0)
        pts = db.draw(0)
        assert pts.shape == (0, 2)
        assert db.state.k == 0 and db.state.m_k == 0
        assert db.state.delta_history == []

    def test_mean_delta_near_half(self):
        box = (np.full(3, -1.0), np.full(3, 1.0))
        db = DoubleBox(box, 200, seed=1)
        for _ in range(200):
            db.draw()
        assert abs(db.state.mean - 0.5) < 0.02

    def test_variance_settles(self):
        # the running variance of delta at k=200 falls below its value at
        # k=20 in at least 95% of seeded runs
        box = (np.full(4, 0.0), np.full(4, 1.0))
        wins = 0
        for seed in range(100):
            db = DoubleBox(box, 64, seed=seed)
            var20 = None
            for k in range(1, 201):
                db.draw()
                if k == 20:
                    var20 = db.state.variance
            if db.state.variance <= var20:
                wins += 1
        assert wins >= 95

    def test_delta_in_unit_range(self):
        db = DoubleBox((np.zeros(5), np.ones(5)), 64, seed=2)
        for _ in range(50):
            db.draw()
        hist = np.array(db.state.delta_history)
        assert np.all(hist > 0.0) and np.all(hist <= 1.0)
