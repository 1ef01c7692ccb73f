"""
Unit tests for the Monte Carlo oracle.
"""
import io

import numpy as np
import pytest
from flaky import flaky

from conftest import MC_CUTOFF, MC_SAMPLES, D_REFERENCE, BaseTest

from argzeta.config import Settings
from argzeta.exceptions import DomainError
from argzeta.mcverify import (
    ChiSquareReport,
    McConfig,
    McEstimate,
    draw_samples,
    estimate_densities,
    histogram_vs_rho,
    sample_im_s,
    truncation_bias,
    write_histogram_csv,
)
from argzeta.numerics import PrecisionContext
from argzeta.primes import partial_arcsin_sum, prime_sum_tail_bound, sieve


@pytest.fixture(scope="module")
def table():
    return sieve(MC_CUTOFF)


class TestConfig(BaseTest):
    """Run parameters."""

    @pytest.mark.parametrize(
        "kwargs",
        [{"sigma": 0.5}, {"samples": 0}, {"prime_cutoff": 1}, {"workers": 0}, {"seed": -1}],
    )
    def test_validation(self, kwargs):
        args = {"sigma": 1.5, **kwargs}
        with pytest.raises(DomainError):
            McConfig(**args)

    def test_from_settings(self):
        cfg = McConfig.from_settings("0.9", Settings(mc_samples=500, mc_seed=7), prime_cutoff=100, workers=None)
        self.assertEqual(cfg.sigma, 0.9)
        self.assertEqual(cfg.samples, 500)
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.prime_cutoff, 100)
        self.assertEqual(cfg.workers, 1)

    def test_estimate(self):
        est = McEstimate.from_events(50, 1000, bias_bound=0.01)
        self.assertAlmostEqual(est.estimate, 0.05, 1e-15)
        self.assertAlmostEqual(est.std_error, np.sqrt(0.05 * 0.95 / 1000), 1e-15)
        self.assertAlmostEqual(est.tolerance(2), 2 * est.std_error + 0.01, 1e-15)
        self.assertTrue(est.consistent_with(0.06))
        self.assertFalse(est.consistent_with(0.2))
        self.assertTrue("50/1000" in str(est))


class TestSampling(BaseTest):
    """Draws of the truncated Im S."""

    def test_zero_angles(self, table):
        cfg = McConfig(1.2, prime_cutoff=MC_CUTOFF)
        self.assertEqual(sample_im_s(cfg, thetas=np.zeros(len(table.upto(MC_CUTOFF))), table=table), 0)

    def test_angle_count(self, table):
        with pytest.raises(DomainError):
            sample_im_s(McConfig(1.2, prime_cutoff=MC_CUTOFF), thetas=np.zeros(3), table=table)

    def test_single_draw_bounded(self, table):
        cfg = McConfig(1.2, prime_cutoff=MC_CUTOFF)
        bound = partial_arcsin_sum(1.2, MC_CUTOFF, table)
        self.assertTrue(abs(sample_im_s(cfg, rng=np.random.default_rng(3), table=table)) <= bound)

    @pytest.mark.parametrize("draw", [0, 7])
    def test_single_draw_matches_batch(self, table, draw):
        """Both samplers read the same per-prime substreams"""
        cfg = McConfig(0.8, samples=10, prime_cutoff=MC_CUTOFF, seed=5)
        batch = draw_samples(cfg, table=table)
        self.assertAlmostEqual(sample_im_s(cfg, table=table, draw=draw), batch[draw], 1e-12)

    def test_draws_bounded_by_partial_sum(self, table):
        cfg = McConfig(1.5, samples=MC_SAMPLES, prime_cutoff=MC_CUTOFF)
        draws = draw_samples(cfg, table=table)
        self.assertEqual(draws.shape, (MC_SAMPLES,))
        self.assertTrue(np.max(np.abs(draws)) <= partial_arcsin_sum(1.5, MC_CUTOFF, table) + 1e-12)

    def test_reproducible(self, table):
        cfg = McConfig(0.8, samples=2000, prime_cutoff=MC_CUTOFF, seed=11)
        self.assertTrue(np.array_equal(draw_samples(cfg, table=table), draw_samples(cfg, table=table)))
        other = McConfig(0.8, samples=2000, prime_cutoff=MC_CUTOFF, seed=12)
        self.assertFalse(np.array_equal(draw_samples(cfg, table=table), draw_samples(other, table=table)))

    def test_independent_of_workers(self, table):
        serial = McConfig(0.8, samples=2000, prime_cutoff=MC_CUTOFF, workers=1)
        parallel = McConfig(0.8, samples=2000, prime_cutoff=MC_CUTOFF, workers=2)
        self.assertTrue(np.array_equal(draw_samples(serial, table=table), draw_samples(parallel, table=table)))

    def test_raising_cutoff_keeps_angles(self, table):
        """Extra primes only add their own terms"""
        low = draw_samples(McConfig(1.2, samples=2000, prime_cutoff=500), table=table)
        high = draw_samples(McConfig(1.2, samples=2000, prime_cutoff=MC_CUTOFF), table=table)
        extra = partial_arcsin_sum(1.2, MC_CUTOFF, table) - partial_arcsin_sum(1.2, 500, table)
        self.assertTrue(np.max(np.abs(high - low)) <= extra + 1e-12)

    @flaky(max_runs=10, min_passes=3)
    def test_symmetric(self, table):
        seed = np.random.SeedSequence().entropy % 2**63
        draws = draw_samples(McConfig(0.8, samples=MC_SAMPLES, prime_cutoff=MC_CUTOFF, seed=seed), table=table)
        self.assertTrue(abs(draws.mean()) <= 5 * draws.std() / np.sqrt(MC_SAMPLES))


class TestEstimates(BaseTest):
    """Event counts against the analytic densities."""

    def test_bias_above_one_is_rigorous(self, table):
        bias = truncation_bias(McConfig(1.5, prime_cutoff=MC_CUTOFF), table=table)
        self.assertTrue(bias.rigorous)
        self.assertEqual(bias.failure, 0.0)
        self.assertTrue(0 < bias.angle <= np.pi / 2 * float(prime_sum_tail_bound(1.5, MC_CUTOFF)))

    def test_bias_below_one(self, table):
        bias = truncation_bias(McConfig(0.8, prime_cutoff=MC_CUTOFF), table=table)
        self.assertFalse(bias.rigorous)
        self.assertTrue(bias.angle > 0)
        self.assertEqual(bias.probability(np.array([0.0, 10.0])), 0.5 + bias.failure)

    def test_no_events_beyond_support(self, table):
        """|Im S| <= L(2) < pi/2, so no draw lands in either event"""
        d, d_minus = estimate_densities(McConfig(2, samples=MC_SAMPLES, prime_cutoff=MC_CUTOFF), table=table)
        self.assertEqual(d.events, 0)
        self.assertEqual(d_minus.events, 0)
        self.assertEqual(d.bias_bound, 0)
        self.assertTrue(d.consistent_with(0))

    @flaky(max_runs=10, min_passes=3)
    @pytest.mark.parametrize("sigma", ["0.7", "0.8"])
    def test_d_matches_reference(self, table, sigma):
        seed = np.random.SeedSequence().entropy % 2**63
        cfg = McConfig(sigma, samples=MC_SAMPLES, prime_cutoff=MC_CUTOFF, seed=seed)
        d, d_minus = estimate_densities(cfg, table=table)
        self.assertTrue(d.consistent_with(float(D_REFERENCE[sigma])))
        self.assertTrue(d_minus.estimate <= d.estimate)

    def test_reuses_draws(self, table, mocker):
        cfg = McConfig(2, samples=100, prime_cutoff=MC_CUTOFF)
        spy = mocker.patch("argzeta.mcverify.draw_samples")
        d, _ = estimate_densities(cfg, draws=np.zeros(100), table=table)
        spy.assert_not_called()
        self.assertEqual(d.samples, 100)


def histogram(table, seed=2012):
    cfg = McConfig(1.5, samples=MC_SAMPLES, prime_cutoff=MC_CUTOFF, seed=seed)
    return histogram_vs_rho(cfg, bins=20, ctx=PrecisionContext.from_digits(4, guard=11), table=table)


@pytest.fixture(scope="module")
def chi2_report(table):
    return histogram(table)


class TestHistogram(BaseTest):
    """Histogram of the draws against the periodised density."""

    def test_counts(self, chi2_report):
        self.assertEqual(int(chi2_report.counts.sum()), MC_SAMPLES)
        self.assertEqual(len(chi2_report.edges), 21)
        self.assertEqual(chi2_report.edges[0], -chi2_report.edges[-1])

    def test_expected_mass(self, chi2_report):
        self.assertTrue(abs(chi2_report.expected.sum() - MC_SAMPLES) < 0.01 * MC_SAMPLES)

    @flaky(max_runs=10, min_passes=3)
    def test_chi_square(self, table):
        report = histogram(table, seed=np.random.SeedSequence().entropy % 2**63)
        self.assertTrue(report.ok)
        self.assertTrue(report.dof >= 1)

    def test_domain(self):
        with pytest.raises(DomainError):
            histogram_vs_rho(McConfig(0.9))
        with pytest.raises(DomainError):
            histogram_vs_rho(McConfig(1.5), bins=1)

    def test_csv(self):
        report = ChiSquareReport(
            1.5,
            np.array([-1.0, 0.0, 1.0]),
            np.array([3, 4]),
            np.array([3.5, 3.5]),
            statistic=0.14,
            dof=1,
            critical=10.8,
        )
        stream = io.StringIO()
        write_histogram_csv(report, stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], "left,right,count,expected")
        self.assertEqual(lines[1], "-1.0,0.0,3,3.5")
        self.assertEqual(len(lines), 3)
