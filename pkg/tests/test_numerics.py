"""
Unit tests for the precision context and the numerical primitives.
"""
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from conftest import BaseTest

from argzeta.exceptions import (
    BracketError,
    CancellationDetected,
    DomainError,
    PrecisionOverflowError,
    QuadratureError,
)
from argzeta.numerics import (
    ErrorBudget,
    PrecisionContext,
    bessel_j0,
    bessel_j0_zero,
    find_root,
    integrate,
    retry_with_escalation,
    to_mpf,
    zeta_real,
)


class TestPrecisionContext(BaseTest):
    """Construction and derivation of precision contexts."""

    def test_from_digits(self):
        """Working digits are the requested digits plus guard"""
        ctx = PrecisionContext.from_digits(20, max_digits=100)
        self.assertEqual(ctx.working_digits, 30)
        self.assertEqual(ctx.target_digits, 20)
        self.assertEqual(ctx.max_digits, 100)

    def test_minimum_working_digits(self):
        """Low requests still run at 15 digits"""
        ctx = PrecisionContext.from_digits(3, max_digits=100)
        self.assertEqual(ctx.working_digits, 15)

    def test_rejects_low_working_digits(self):
        with pytest.raises(ValueError, match="at least 15"):
            PrecisionContext(10, 1e-5, 100)

    def test_rejects_nonpositive_target(self):
        with pytest.raises(ValueError, match="positive"):
            PrecisionContext(20, 0, 100)

    def test_cap_enforced(self):
        """Requests above max_digits raise PrecisionOverflowError"""
        with pytest.raises(PrecisionOverflowError):
            PrecisionContext.from_digits(200, max_digits=100)

    def test_escalate_doubles(self):
        ctx = PrecisionContext.from_digits(20, max_digits=100)
        self.assertEqual(ctx.escalate().working_digits, 60)
        with pytest.raises(PrecisionOverflowError):
            ctx.escalate(4)

    def test_with_target_grows_digits(self):
        """Tightening the target adds working digits"""
        ctx = PrecisionContext.from_digits(20, max_digits=200)
        tight = ctx.with_target(mpmath.mpf(10) ** -50)
        self.assertEqual(tight.working_digits, 60)
        self.assertEqual(tight.target_digits, 50)

    def test_for_magnitude(self):
        """Large intermediates need more digits, small ones none"""
        ctx = PrecisionContext.from_digits(20, max_digits=200)
        self.assertTrue(ctx.for_magnitude(1) is ctx)
        self.assertEqual(ctx.for_magnitude(mpmath.mpf(10) ** 30).working_digits, 60)

    def test_workdps_scoped(self):
        ctx = PrecisionContext.from_digits(40)
        before = mp.dps
        with ctx.workdps():
            self.assertEqual(mp.dps, 50)
        self.assertEqual(mp.dps, before)


class TestErrorBudget(BaseTest):
    """Arithmetic of error budgets."""

    def test_total_and_add(self):
        budget = ErrorBudget(1, 2) + ErrorBudget(3, 4)
        self.assertEqual(budget.truncation, 4)
        self.assertEqual(budget.rounding, 6)
        self.assertEqual(budget.total(), 10)

    def test_scale_uses_absolute_factor(self):
        budget = ErrorBudget(1, 2).scale(-3)
        self.assertEqual(budget.total(), 9)

    @pytest.mark.parametrize("bad", [-1, mpmath.inf, mpmath.nan])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            ErrorBudget(bad, 0)


class TestConversion(BaseTest):
    """Exact parsing of inputs."""

    def test_string_keeps_digits(self):
        """Near-critical sigma keeps every digit of sigma - 1/2"""
        ctx = PrecisionContext.from_digits(40)
        sigma = to_mpf("0.50000000001", ctx)
        with ctx.workdps():
            self.assertAlmostEqual(sigma - mpmath.mpf(1) / 2, mpmath.mpf("1e-11"), mpmath.mpf(10) ** -45)

    def test_fraction(self, ctx):
        value = to_mpf(Fraction(1, 3), ctx)
        with ctx.workdps():
            self.assertAlmostEqual(value, mpmath.mpf(1) / 3, ctx.eps)


class TestSpecialFunctions(BaseTest):
    """zeta, J0 and the zeros of J0."""

    def test_zeta_two(self, ctx):
        value = zeta_real(2, ctx)
        with ctx.workdps():
            self.assertAlmostEqual(value, mp.pi**2 / 6, ctx.target_abs_error)

    def test_zeta_near_pole(self, ctx):
        """zeta(1 + e) ~ 1/e + gamma"""
        value = zeta_real("1.000001", ctx)
        with ctx.workdps():
            self.assertAlmostEqual(value, mpmath.mpf(10) ** 6 + mp.euler, mpmath.mpf("1e-5"))

    @pytest.mark.parametrize("s", [1, "0.5", -2])
    def test_zeta_domain(self, ctx, s):
        with pytest.raises(DomainError):
            zeta_real(s, ctx)

    def test_j0_at_zero(self, ctx):
        self.assertEqual(bessel_j0(0, ctx), 1)

    @pytest.mark.parametrize("k", [1, 2, 3, 40])
    def test_j0_zeros(self, ctx_high, k):
        """Zeros agree with mpmath's besseljzero"""
        value = bessel_j0_zero(k, ctx_high)
        with ctx_high.workdps():
            self.assertAlmostEqual(value, mp.besseljzero(0, k), mpmath.mpf(10) ** -35)

    def test_first_zero(self, ctx):
        with ctx.workdps():
            self.assertAlmostEqual(bessel_j0_zero(1, ctx), mpmath.mpf("2.40482555769577276862"), mpmath.mpf(10) ** -19)

    def test_j0_zero_index(self, ctx):
        with pytest.raises(DomainError):
            bessel_j0_zero(0, ctx)


class TestQuadratureAndRoots(BaseTest):
    """Adaptive integration and bracketed roots."""

    def test_endpoint_singularity(self, ctx):
        """The integral of 1/sqrt(1 - t) on [0, 1] is 2"""
        value, budget = integrate(lambda t: 1 / mp.sqrt(1 - t), 0, 1, ctx)
        self.assertAlmostEqual(value, 2, ctx.target_abs_error)
        self.assertTrue(budget.total() <= ctx.target_abs_error)

    def test_gauss_legendre_with_points(self, ctx):
        value, _ = integrate(mp.cos, 0, mp.pi, ctx, points=[1, 2], method="gauss-legendre")
        self.assertAlmostEqual(value, 0, ctx.target_abs_error)

    def test_unknown_method(self, ctx):
        with pytest.raises(DomainError, match="Unknown quadrature method"):
            integrate(mp.cos, 0, 1, ctx, method="simpson")

    def test_quadrature_error_reports_estimate(self, ctx):
        """An oscillatory integrand on too few nodes fails with its estimate"""
        with pytest.raises(QuadratureError) as info:
            integrate(lambda t: mp.cos(1000 * t), 0, 50, ctx, maxdegree=2)
        self.assertTrue(info.value.last_value is not None)

    def test_find_root(self, ctx):
        root = find_root(lambda x: x * x - 2, 1, 2, ctx)
        with ctx.workdps():
            self.assertAlmostEqual(root, mp.sqrt(2), ctx.target_abs_error)

    def test_find_root_bracket(self, ctx):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x + 1, -1, 1, ctx)

    def test_retry_with_escalation(self):
        """Cancellation reruns the computation at doubled precision"""
        seen = []

        def compute(c):
            seen.append(c.working_digits)
            if c.working_digits < 60:
                raise CancellationDetected("lost digits")
            return c.working_digits

        result = retry_with_escalation(compute, PrecisionContext.from_digits(20, max_digits=200))
        self.assertEqual(result, 60)
        self.assertEqual(seen, [30, 60])

    def test_retry_hits_cap(self):
        def compute(c):
            raise CancellationDetected("always")

        with pytest.raises(PrecisionOverflowError):
            retry_with_escalation(compute, PrecisionContext.from_digits(20, max_digits=100))
