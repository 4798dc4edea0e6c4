"""Scheduling-independent Monte Carlo plumbing."""

import numpy as np
import pytest

from designgap import rng
from designgap.errors import ValidationError


def scalar_fn(stream):
    return stream.normal()


def vector_fn(stream):
    return stream.normal(size=3)


class TestSampleStream:
    def test_reproducible(self):
        a = rng.sample_stream(7, 3).normal(size=5)
        b = rng.sample_stream(7, 3).normal(size=5)
        assert np.array_equal(a, b)

    def test_distinct_indices_differ(self):
        a = rng.sample_stream(7, 0).normal(size=5)
        b = rng.sample_stream(7, 1).normal(size=5)
        assert not np.array_equal(a, b)

    def test_distinct_seeds_differ(self):
        a = rng.sample_stream(1, 0).normal(size=5)
        b = rng.sample_stream(2, 0).normal(size=5)
        assert not np.array_equal(a, b)

    def test_seed_validation(self):
        with pytest.raises(ValidationError):
            rng.sample_stream(-1, 0)
        with pytest.raises(ValidationError):
            rng.sample_stream(2**63, 0)


class TestSampleArray:
    def test_thread_count_invariance(self):
        # enough samples to span several chunks
        single = rng.sample_array(scalar_fn, 300, 5, threads=1)
        multi = rng.sample_array(scalar_fn, 300, 5, threads=4)
        assert np.array_equal(single, multi)

    def test_index_offset_shifts_streams(self):
        base = rng.sample_array(scalar_fn, 20, 5)
        shifted = rng.sample_array(scalar_fn, 10, 5, index_offset=10)
        assert np.array_equal(base[10:], shifted)

    def test_sample_i_independent_of_total(self):
        short = rng.sample_array(scalar_fn, 10, 5)
        long = rng.sample_array(scalar_fn, 200, 5)
        assert np.array_equal(short, long[:10])

    def test_needs_positive_samples(self):
        with pytest.raises(ValidationError):
            rng.sample_array(scalar_fn, 0, 5)


class TestSampleVectors:
    def test_shape_and_thread_invariance(self):
        a = rng.sample_vectors(vector_fn, 150, 9, width=3, threads=1)
        b = rng.sample_vectors(vector_fn, 150, 9, width=3, threads=3)
        assert a.shape == (150, 3)
        assert np.array_equal(a, b)

    def test_rows_match_scalar_streams(self):
        rows = rng.sample_vectors(vector_fn, 5, 9, width=3)
        for i in range(5):
            assert np.array_equal(rows[i], rng.sample_stream(9, i).normal(size=3))


class TestAccumulateMoments:
    def test_matches_direct_loop(self):
        def fn(stream):
            return stream.normal(size=(2, 2)) + 1j * stream.normal(size=(2, 2))

        total, total_sq = rng.accumulate_moments(fn, (2, 2), 130, 3)
        want = np.zeros((2, 2), dtype=np.complex128)
        want_sq = np.zeros((2, 2))
        for i in range(130):
            v = fn(rng.sample_stream(3, i))
            want += v
            want_sq += np.abs(v) ** 2
        assert np.allclose(total, want)
        assert np.allclose(total_sq, want_sq)

    def test_byte_identical_across_threads(self):
        def fn(stream):
            return stream.normal(size=(3,)).astype(np.complex128)

        t1 = rng.accumulate_moments(fn, (3,), 400, 11, threads=1)
        t4 = rng.accumulate_moments(fn, (3,), 400, 11, threads=4)
        assert np.array_equal(t1[0], t4[0])
        assert np.array_equal(t1[1], t4[1])


class TestStatistics:
    def test_mean_and_stderr_against_numpy(self):
        values = rng.sample_array(scalar_fn, 500, 2)
        m, se = rng.mean_and_stderr(values)
        assert m == pytest.approx(values.mean())
        assert se == pytest.approx(values.std(ddof=1) / np.sqrt(500))

    def test_single_sample_has_zero_stderr(self):
        m, se = rng.mean_and_stderr(np.array([4.0]))
        assert (m, se) == (4.0, 0.0)

    def test_from_sums_matches_per_sample_route(self):
        def fn(stream):
            return stream.normal(size=(2,)).astype(np.complex128)

        total, total_sq = rng.accumulate_moments(fn, (2,), 300, 4)
        mean, stderr = rng.mean_and_stderr_from_sums(total, total_sq, 300)
        rows = np.array([fn(rng.sample_stream(4, i)) for i in range(300)])
        assert np.allclose(mean, rows.mean(axis=0))
        want_se = rows.std(axis=0, ddof=1) / np.sqrt(300)
        assert np.allclose(stderr, np.abs(want_se))

    def test_stderr_shrinks_like_inverse_sqrt(self):
        # quadrupling the sample count should roughly halve the standard error
        _, se_small = rng.mean_and_stderr(rng.sample_array(scalar_fn, 2000, 6))
        _, se_big = rng.mean_and_stderr(rng.sample_array(scalar_fn, 8000, 6))
        assert se_big == pytest.approx(se_small / 2, rel=0.15)

    def test_constant_samples_have_zero_stderr(self):
        values = np.full(50, 2.5)
        _, se = rng.mean_and_stderr(values)
        assert se == pytest.approx(0.0, abs=1e-15)
