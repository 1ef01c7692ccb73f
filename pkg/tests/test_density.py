"""
Unit tests for the densities d, d_minus, d_plus and a_k and the periodised density.
"""
from fractions import Fraction

import mpmath
import pytest

from conftest import D_MINUS_NEAR_HALF, D_REFERENCE, GAP_REFERENCE, BaseTest, significant_digits_agree

from argzeta import density
from argzeta.density import (
    DensityResult,
    RhoSeries,
    SumParams,
    default_m,
    density_ak,
    density_d,
    density_dminus,
    density_dplus,
    density_gap,
    density_to_digits,
    rho_tilde,
    rho_tilde_mass,
    truncation_index,
)
from argzeta.exceptions import ConvergenceError, DomainError, InvariantViolation
from argzeta.numerics import ErrorBudget, PrecisionContext
from argzeta.primes import support_length


def exact_sigma(label):
    return sum((Fraction(part) for part in label.split("+")), Fraction(0))


@pytest.fixture
def ctx_coarse():
    """Absolute target 1e-4"""
    return PrecisionContext.from_digits(4, guard=11)


@pytest.fixture
def ctx_mid():
    """Absolute target 1e-6"""
    return PrecisionContext.from_digits(6, guard=9)


class TestSupport(BaseTest):
    """Values forced by the finite support for sigma > 1."""

    def test_d_vanishes_beyond_sigma0(self, ctx):
        result = density_d("1.25", ctx)
        self.assertEqual(result.value, 0)
        self.assertEqual(result.method, "support")
        self.assertEqual(result.error, 0)

    def test_a1_vanishes_beyond_sigma1(self, ctx):
        result = density_ak("1.1", 1, ctx)
        self.assertEqual(result.value, 0)
        self.assertEqual(result.label, "a_1")

    def test_dminus_and_dplus(self, ctx):
        minus = density_dminus("1.5", ctx)
        plus = density_dplus("1.5", ctx)
        self.assertEqual(minus.value, 0)
        self.assertEqual(plus.value, 1)
        self.assertEqual(plus.kind, "d_plus")

    def test_gap(self, ctx):
        self.assertEqual(density_gap("1.5", ctx).value, 0)


class TestFourierSum(BaseTest):
    """The m-form sum at low targets."""

    @pytest.mark.parametrize("m", [4, 6])
    def test_forced_sum_vanishes(self, ctx_coarse, m):
        """With a fixed grid the sum reproduces d(1.5) = 0 for every admissible m"""
        result = density_d("1.5", ctx_coarse, params=SumParams(m))
        self.assertEqual(result.method, "exact-sum")
        self.assertEqual(result.m, Fraction(m))
        self.assertAlmostEqual(result.value, 0, result.error + ctx_coarse.target_abs_error)

    def test_limit_sum(self, ctx_mid):
        """d(0.8) = 5.14018886e-3"""
        result = density_d("0.8", ctx_mid)
        self.assertEqual(result.method, "limit-sum")
        self.assertAlmostEqual(result.value, mpmath.mpf(D_REFERENCE["0.8"]), result.error + mpmath.mpf("1e-7"))
        self.assertTrue(len(result.diagnostics["history"]) >= 3)

    def test_grid_below_support(self, ctx):
        """m must exceed 4 L / pi"""
        with pytest.raises(DomainError, match="must exceed"):
            density_d("1.01", ctx, params=SumParams(3))

    def test_exact_sum_needs_finite_support(self, ctx):
        with pytest.raises(DomainError):
            density_d("0.9", ctx, method="exact-sum")

    def test_integral_computes_d_only(self, ctx):
        with pytest.raises(DomainError, match="d only"):
            density_ak("1.0", 1, ctx, method="integral")

    @pytest.mark.parametrize("sigma", ["0.5", "0.2"])
    def test_sigma_domain(self, ctx, sigma):
        with pytest.raises(DomainError):
            density_d(sigma, ctx)

    def test_unknown_method(self, ctx):
        with pytest.raises(DomainError, match="method"):
            density_d("0.8", ctx, method="fft")

    @pytest.mark.parametrize("k", [-1, 1.5])
    def test_k_domain(self, ctx, k):
        with pytest.raises(DomainError):
            density_ak("0.8", k, ctx)


class TestParameters(BaseTest):
    """Grid parameter and truncation."""

    def test_sum_params(self):
        self.assertEqual(SumParams("4.5").m, Fraction(9, 2))
        self.assertEqual(SumParams(Fraction(7, 3)).m, Fraction(7, 3))
        with pytest.raises(DomainError):
            SumParams(2)
        with pytest.raises(DomainError):
            SumParams(4, nterms=0)

    @pytest.mark.parametrize("length, m", [(1, 4), (3, 4), (5, 10), (10, 16)])
    def test_default_m(self, length, m):
        self.assertEqual(default_m(length), Fraction(m))

    def test_truncation_index(self):
        nterms, tail = truncation_index(0.8, 4, 1e-8)
        self.assertTrue(nterms >= 1)
        self.assertTrue(tail <= 1e-8)
        finer, _ = truncation_index(0.8, 8, 1e-8)
        self.assertTrue(finer > nterms)


class TestResults(BaseTest):
    """DensityResult and the digit driver."""

    def test_check(self):
        bad = DensityResult(mpmath.mpf(1), "d", mpmath.mpf("-0.5"), ErrorBudget(rounding="1e-3"), "exact-sum")
        with pytest.raises(InvariantViolation):
            bad.check()
        good = DensityResult(mpmath.mpf(1), "d", mpmath.mpf("-1e-5"), ErrorBudget(rounding="1e-3"), "exact-sum")
        self.assertTrue(good.check() is good)

    def test_to_digits_support(self, ctx):
        result = density_to_digits("d", "1.3", 20, ctx)
        self.assertEqual(result.value, 0)

    def test_to_digits_tightens(self, ctx_low, mocker):
        """The target shrinks until the budget certifies the digits"""
        targets = []

        def fake(sigma, ctx, k, **kwargs):
            targets.append(ctx.target_abs_error)
            return DensityResult(mpmath.mpf(1), "d", mpmath.mpf("0.5"), ErrorBudget(ctx.target_abs_error), "limit-sum")

        mocker.patch.dict("argzeta.density._DRIVERS", {"d": fake})
        result = density_to_digits("d", "0.8", 15, ctx_low)
        self.assertEqual(len(targets), 2)
        self.assertTrue(targets[1] < targets[0])
        self.assertTrue(result.error <= mpmath.mpf("0.5e-15"))

    def test_to_digits_gives_up(self, ctx_low, mocker):
        def fake(sigma, ctx, k, **kwargs):
            return DensityResult(mpmath.mpf(1), "d", mpmath.mpf("0.5"), ErrorBudget(1), "limit-sum")

        mocker.patch.dict("argzeta.density._DRIVERS", {"d": fake})
        with pytest.raises(ConvergenceError):
            density_to_digits("d", "0.8", 10, ctx_low, max_rounds=2)

    def test_unknown_kind(self, ctx):
        with pytest.raises(DomainError, match="kind"):
            density_to_digits("d_zero", "0.8", 10, ctx)


class TestRho(BaseTest):
    """The periodised density of the argument."""

    @pytest.fixture
    def series(self, ctx_coarse):
        length = support_length("1.5", PrecisionContext.from_digits(15))
        return RhoSeries("1.5", 5 * length / 4, ctx_coarse), length

    def test_total_mass(self, series):
        rho, _ = series
        self.assertAlmostEqual(rho.mass(-rho.ell, rho.ell), 1, mpmath.mpf("1e-12"))

    def test_mass_inside_support(self, series):
        rho, length = series
        self.assertAlmostEqual(rho.mass(-length, length), 1, mpmath.mpf("1e-3"))
        self.assertAlmostEqual(rho.mass(length, rho.ell), 0, mpmath.mpf("1e-3"))

    def test_even(self, series):
        rho, _ = series
        self.assertAlmostEqual(rho.value("0.3"), rho.value("-0.3"), mpmath.mpf("1e-12"))
        self.assertEqual(len(rho.values([0, "0.1", "0.2"])), 3)

    def test_wrappers(self, ctx_coarse):
        rho = RhoSeries("1.5", 2, ctx_coarse)
        self.assertEqual(rho_tilde("1.5", "0.2", 2, ctx_coarse), rho.value("0.2"))
        self.assertEqual(rho_tilde_mass("1.5", 0, 1, 2, ctx_coarse), rho.mass(0, 1))

    def test_ell_domain(self, ctx):
        with pytest.raises(DomainError):
            RhoSeries("1.5", 0, ctx)


SCAN = ["0.6", "0.7", "0.8", "0.9", "1.0"]


@pytest.fixture(scope="module")
def scan():
    """d by the limit sum on the scan, absolute target 1e-6"""
    ctx = PrecisionContext.from_digits(6, guard=9)
    return {label: density_d(label, ctx) for label in SCAN}


@pytest.fixture(scope="module")
def ctx_fine():
    """Absolute target 1e-13"""
    return PrecisionContext.from_digits(13)


@pytest.fixture(scope="module")
def d_105(ctx_fine):
    return density_d("1.05", ctx_fine)


class TestLimitSum(BaseTest):
    """d for 1/2 < sigma <= 1 on the default path."""

    @pytest.mark.parametrize("label", SCAN)
    def test_reference(self, scan, label):
        result = scan[label]
        self.assertEqual(result.method, "limit-sum")
        self.assertAlmostEqual(result.value, mpmath.mpf(D_REFERENCE[label]), result.error + mpmath.mpf("1e-6"))

    def test_decreasing(self, scan):
        values = [scan[label] for label in SCAN]
        for high, low in zip(values, values[1:]):
            self.assertTrue(low.value + low.error < high.value - high.error)

    def test_minus_and_plus(self, ctx_mid):
        d = density_d("0.8", ctx_mid)
        minus = density_dminus("0.8", ctx_mid)
        plus = density_dplus("0.8", ctx_mid)
        self.assertTrue(minus.value <= d.value + d.error + minus.error)
        self.assertTrue(minus.value > 0)
        self.assertAlmostEqual(plus.value + minus.value, 1, mpmath.mpf("1e-13"))
        self.assertEqual(minus.method, "limit-sum")

    def test_gap(self, ctx_coarse):
        """d(0.6) - d_minus(0.6) = 8.07e-11 is below the target"""
        result = density_gap("0.6", ctx_coarse)
        self.assertEqual(result.method, "limit-sum")
        self.assertAlmostEqual(result.value, 0, result.error + ctx_coarse.target_abs_error)


class TestExactSum(BaseTest):
    """Nonzero values for 1 < sigma < sigma_0."""

    def test_value(self, d_105):
        """d(1.05) = 6.0e-11"""
        self.assertEqual(d_105.method, "exact-sum")
        self.assertTrue(mpmath.mpf("1e-11") < d_105.value < mpmath.mpf("1e-10"))
        self.assertTrue(d_105.error < mpmath.mpf("1e-12"))

    def test_independent_of_m(self):
        ctx = PrecisionContext.from_digits(12)
        m = default_m(support_length("1.05", PrecisionContext.from_digits(15)))
        first = density_d("1.05", ctx, params=SumParams(m))
        second = density_d("1.05", ctx, params=SumParams(m + 2))
        self.assertTrue(first.value > mpmath.mpf("1e-11"))
        self.assertAlmostEqual(first.value, second.value, first.error + second.error + mpmath.mpf("1e-12"))

    def test_a0_is_d(self, ctx_fine, d_105):
        a0 = density_ak("1.05", 0, ctx_fine)
        self.assertEqual(a0.label, "a_0")
        self.assertAlmostEqual(a0.value, d_105.value, a0.error + d_105.error)

    def test_rho_mass_is_one_minus_d(self, ctx_fine, d_105):
        length = support_length("1.05", PrecisionContext.from_digits(15))
        rho = RhoSeries("1.05", 5 * length / 4, ctx_fine)
        with mpmath.workdps(30):
            outside = 1 - rho.mass(-mpmath.pi / 2, mpmath.pi / 2)
        self.assertAlmostEqual(outside, d_105.value, d_105.error + mpmath.mpf("1e-12"))

    def test_grid_aliases_ak(self, ctx_mid):
        """m = 4 folds a_1 onto -d"""
        with pytest.raises(DomainError, match="aliases"):
            density_ak("1.05", 1, ctx_mid, params=SumParams(4))


class TestCancellation(BaseTest):
    """Precision escalation in the m-form sum."""

    class Grid:
        def plan(self, x_max):
            return x_max

        def get(self, x):
            return 1 / (1 + mpmath.mpf(x.numerator) / x.denominator)

    def test_escalates(self, mocker):
        spy = mocker.spy(density, "_combine")
        narrow = PrecisionContext(15, mpmath.mpf("1e-14"))
        values = density._m_form(self.Grid(), [2], Fraction(4), 40, narrow)
        self.assertEqual(spy.call_count, 2)
        self.assertEqual(spy.call_args_list[1].args[3].working_digits, 30)
        wide = density._m_form(self.Grid(), [2], Fraction(4), 40, PrecisionContext.from_digits(20))
        self.assertAlmostEqual(values[2], wide[2], mpmath.mpf("1e-13"))


@pytest.mark.slow
class TestReferenceTables(BaseTest):
    """Full precision reproduction of the reference values."""

    @pytest.mark.parametrize("label", sorted(D_REFERENCE))
    def test_d(self, ctx, label):
        result = density_to_digits("d", exact_sigma(label), 20, ctx)
        self.assertTrue(significant_digits_agree(result.value, D_REFERENCE[label], 19))

    @pytest.mark.parametrize("label", sorted(GAP_REFERENCE))
    def test_gap(self, ctx, label):
        result = density_to_digits("d-d_minus", exact_sigma(label), 10, ctx)
        self.assertTrue(significant_digits_agree(result.value, GAP_REFERENCE[label], 9))

    def test_dminus_near_half(self, ctx):
        result = density_to_digits("d_minus", exact_sigma("0.5+1e-11"), 10, ctx)
        self.assertTrue(significant_digits_agree(result.value, D_MINUS_NEAR_HALF, 9))

    def test_integral_cross_check(self, ctx_mid):
        by_sum = density_d("0.8", ctx_mid)
        by_integral = density_d("0.8", ctx_mid, method="integral")
        self.assertAlmostEqual(by_sum.value, by_integral.value, by_sum.error + by_integral.error)
