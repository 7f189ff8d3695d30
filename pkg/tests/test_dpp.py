"""Tests for the determinantal sampler of the hard-edge process.

The discretized kernel is checked against direct quadrature of the
diagonal, and the sampler against its exact first moment (mean count =
trace) using a fixed master seed, so every run sees the same draws.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from bessellab.dpp import (
    CountStats,
    DiscretizedKernel,
    SampleConfig,
    count_stats,
    counts_below,
    load_sample,
    nystrom,
    sample,
    sample_many,
    save_sample,
)
from bessellab.specfun import bessel_kernel_diag


class TestNystrom:
    def test_matrix_symmetric_psd(self):
        kern = nystrom(0.0, 100.0, m=128)
        assert_allclose(kern.matrix, kern.matrix.T, rtol=0, atol=1e-14)
        assert kern.eigenvalues.min() >= 0.0
        assert kern.eigenvalues.max() <= 1.0

    def test_trace_equals_eigenvalue_sum(self):
        kern = nystrom(0.0, 100.0, m=128)
        assert_allclose(kern.trace, float(np.sum(kern.eigenvalues)), rtol=1e-12)
        assert kern.expected_count() == pytest.approx(kern.trace)

    def test_trace_against_direct_quadrature(self):
        # integral of K(x, x) dx on (0, T], via the same square-root
        # substitution but scipy's adaptive rule
        T = 100.0
        ref, err = integrate.quad(
            lambda u: 2.0 * T * u * bessel_kernel_diag(0.0, T * u * u),
            0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
        kern = nystrom(0.0, T, m=256)
        assert err < 1e-9
        assert_allclose(kern.trace, ref, rtol=1e-8)

    def test_trace_grows_with_window(self):
        t1 = nystrom(0.0, 100.0, m=128).trace
        t2 = nystrom(0.0, 400.0, m=256).trace
        # mean count scales like sqrt(T)/pi
        assert t2 > t1
        assert_allclose(t2 / t1, 2.0, rtol=0.15)

    def test_nodes_cluster_near_origin(self):
        kern = nystrom(0.0, 100.0, m=128)
        assert np.sum(kern.nodes < 1.0) > np.sum(kern.nodes > 99.0)

    def test_guards(self):
        with pytest.raises(ValueError):
            nystrom(0.0, 100.0, m=32)
        with pytest.raises(ValueError):
            nystrom(0.0, -5.0)


class TestSampling:
    def test_fixed_seed_reproducible(self):
        kern = nystrom(0.0, 100.0, m=128)
        a = sample(kern, 7)
        b = sample(kern, 7)
        assert_allclose(a.points, b.points, rtol=0, atol=0)
        c = sample(kern, 8)
        assert a.points.shape != c.points.shape or not np.allclose(a.points, c.points)

    def test_points_sorted_inside_window(self):
        kern = nystrom(0.0, 100.0, m=128)
        cfg = sample(kern, 3)
        assert np.all(np.diff(cfg.points) > 0)
        assert cfg.points.min() > 0.0 and cfg.points.max() <= 100.0
        assert cfg.T == 100.0 and cfg.nu == 0.0 and cfg.m == 128

    def test_master_seed_spawns_distinct_streams(self):
        kern = nystrom(0.0, 100.0, m=128)
        runs = sample_many(kern, 4, 123)
        counts = {len(r.points) for r in runs}
        pts = [tuple(np.round(r.points, 9)) for r in runs]
        assert len(set(pts)) == 4 or len(counts) > 1
        again = sample_many(kern, 4, 123)
        for r, s in zip(runs, again):
            assert_allclose(r.points, s.points, rtol=0, atol=0)

    def test_mean_count_matches_trace(self):
        # first moment of a determinantal sample equals the kernel trace;
        # 200 fixed-seed draws keep the Monte Carlo error ~0.06
        kern = nystrom(0.0, 100.0, m=128)
        runs = sample_many(kern, 200, 2026)
        counts = np.array([len(r.points) for r in runs], dtype=float)
        se = counts.std(ddof=1) / math.sqrt(len(counts))
        assert abs(counts.mean() - kern.trace) < 3.5 * se + 1e-9

    def test_count_upto(self):
        cfg = SampleConfig(points=np.array([1.0, 5.0, 20.0]), seed=0, T=50.0, nu=0.0, m=64)
        assert cfg.count_upto(5.0) == 2
        assert cfg.count_upto(0.5) == 0
        assert counts_below([cfg], 10.0)[0] == 2


@pytest.fixture(scope="module")
def runs():
    kern = nystrom(0.0, 1000.0, m=256)
    return sample_many(kern, 120, 99)


class TestCountStats:
    def test_rows_and_targets(self, runs):
        stats = count_stats(runs, [100.0, 1000.0])
        assert isinstance(stats, CountStats)
        rows = stats.rows()
        assert len(rows) == 2
        assert_allclose(stats.target_mean, np.sqrt([100.0, 1000.0]) / math.pi, rtol=1e-12)
        assert stats.n_samples == 120
        assert np.all(stats.var > 0)
        assert stats.max_growth_residual >= 0.0

    def test_variance_grows_with_threshold(self, runs):
        stats = count_stats(runs, [100.0, 1000.0])
        assert stats.var[1] > stats.var[0]

    def test_threshold_validation(self, runs):
        with pytest.raises(ValueError):
            count_stats(runs, [2000.0])
        with pytest.raises(ValueError):
            count_stats([], [10.0])

    def test_mixed_windows_rejected(self, runs):
        other = sample(nystrom(0.0, 100.0, m=128), 1)
        with pytest.raises(ValueError):
            count_stats(list(runs) + [other], [50.0])


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        kern = nystrom(0.5, 100.0, m=128)
        cfg = sample(kern, 11)
        path = tmp_path / "sample.txt"
        save_sample(cfg, path)
        back = load_sample(path)
        assert_allclose(back.points, cfg.points, rtol=0, atol=0)
        assert back.seed == 11 and back.T == 100.0 and back.nu == 0.5 and back.m == 128

    def test_config_validates_ordering(self):
        with pytest.raises(ValueError):
            SampleConfig(points=np.array([2.0, 1.0]), seed=0, T=10.0, nu=0.0, m=64)
