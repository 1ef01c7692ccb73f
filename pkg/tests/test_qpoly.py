"""
Unit tests for the integer coefficients q_{n,k} and the polynomials Q_n.
"""
import math
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from conftest import Q_ROWS, BaseTest

from argzeta.exceptions import DomainError, InvariantViolation
from argzeta.numerics import PrecisionContext
from argzeta.qpoly import (
    IdentityReport,
    QPolynomial,
    QTable,
    build_Q_by_polynomial_recurrence,
    build_qtable,
    check_diagonal_bessel,
    check_q_bound,
    check_riccati,
    eval_Q,
    normalized_q_values,
)


class TestQTable(BaseTest):
    """Construction of the coefficient table."""

    @pytest.mark.parametrize("n", range(1, 8))
    def test_reference_rows(self, qtable, n):
        """Rows 1..7 match the reference integers exactly"""
        self.assertEqual(list(qtable.row(n)), Q_ROWS[n - 1])

    def test_row_sums(self, qtable):
        """sum_k q_{n,k} = n!(n-1)! for n <= 50"""
        for n in range(1, 51):
            self.assertEqual(sum(qtable.row(n)), math.factorial(n) * math.factorial(n - 1))

    def test_first_column(self, qtable):
        """q_{n,1} = (n-1)!^2"""
        for n in range(1, 51):
            self.assertEqual(qtable.q(n, 1), math.factorial(n - 1) ** 2)

    def test_positive_integers(self, qtable):
        self.assertTrue(all(isinstance(c, int) and c > 0 for n in range(1, 51) for c in qtable.row(n)))

    def test_diagonal(self, qtable):
        self.assertEqual(qtable.diagonal()[:7], [1, 1, 4, 33, 456, 9460, 274800])

    def test_out_of_range_entries(self, qtable):
        self.assertEqual(qtable.q(4, 0), 0)
        self.assertEqual(qtable.q(4, 5), 0)
        with pytest.raises(DomainError):
            qtable.row(51)

    def test_extend_in_place(self):
        table = build_qtable(5)
        first = table.row(5)
        self.assertTrue(table.extend(8) is table)
        self.assertEqual(table.nmax, 8)
        self.assertEqual(table.row(5), first)
        self.assertEqual(table.row(7), tuple(Q_ROWS[6]))

    def test_empty(self):
        table = QTable()
        self.assertEqual(len(table), 0)
        self.assertEqual(table.extend(3).row(3), (4, 4, 4))

    @pytest.mark.parametrize("nmax", [0, -1, 2.5])
    def test_invalid_size(self, nmax):
        with pytest.raises(DomainError):
            build_qtable(nmax)


class TestPolynomials(BaseTest):
    """Evaluation of Q_n and the independent polynomial recurrence."""

    def test_eval(self, qtable, ctx):
        """Q_2(1) = 1 + 1"""
        self.assertEqual(eval_Q(qtable, 2, 1, ctx), 2)

    def test_eval_even(self, qtable, ctx):
        with ctx.workdps():
            self.assertEqual(eval_Q(qtable, 5, mpmath.mpf("1.5"), ctx), eval_Q(qtable, 5, mpmath.mpf("-1.5"), ctx))

    def test_polynomial_recurrence(self, qtable):
        """Multiplying whole polynomials gives the same table"""
        polys = build_Q_by_polynomial_recurrence(15)
        for n, poly in enumerate(polys, start=1):
            self.assertEqual(poly.coeffs, qtable.row(n))
            self.assertEqual(poly.degree, 2 * n)

    def test_q3(self):
        poly = build_Q_by_polynomial_recurrence(3)[2]
        self.assertEqual(str(poly), "4x^2 + 4x^4 + 4x^6")
        self.assertEqual(poly(Fraction(1, 2)), Fraction(4, 4) + Fraction(4, 16) + Fraction(4, 64))

    def test_product(self):
        """(x^2)(x^2 + x^4) = x^4 + x^6"""
        product = QPolynomial(1, (1,)) * QPolynomial(2, (1, 1))
        self.assertEqual(product, [0, 0, 1, 1])

    def test_normalized_values_paths_agree(self, qtable, ctx):
        """Exact rows and the Riccati path give the same Q_n(y)/n!^2"""
        y = mpmath.mpf("1.3")
        from_table = normalized_q_values(y, 30, ctx, table=qtable)
        from_riccati = normalized_q_values(y, 30, ctx)
        with ctx.workdps():
            for a, b in zip(from_table, from_riccati):
                self.assertAlmostEqual(a, b, abs(a) * mpmath.mpf(10) ** -25)

    def test_normalized_values_log_series(self, ctx):
        """-sum Q_n(y)/n!^2 b^(-2n) reproduces log I(b, 2y)"""
        b, y = mpmath.mpf(5), mpmath.mpf(1)
        values = normalized_q_values(y, 60, ctx)
        with ctx.workdps():
            series = -mp.fsum(v * b ** (-2 * n) for n, v in enumerate(values, start=1))
            exact = mp.log(mp.hyp2f1(-y, y, 1, 1 / b**2))
            self.assertAlmostEqual(series, exact, mpmath.mpf(10) ** -25)


class TestIdentities(BaseTest):
    """Reports on the coefficient identities."""

    def test_diagonal_bessel(self, qtable):
        """q_{n,n} against the Bessel-zero sum with 40 zeros"""
        ctx = PrecisionContext.from_digits(40)
        report = check_diagonal_bessel(qtable, 10, ctx)
        self.assertTrue(report.ok)
        for detail in report.details[6:]:
            self.assertTrue(detail["relative"] < mpmath.mpf(10) ** -20)

    def test_diagonal_bessel_needs_rows(self, ctx):
        with pytest.raises(DomainError):
            check_diagonal_bessel(build_qtable(3), 5, ctx)

    @pytest.mark.parametrize("x", [1, 2, Fraction(1, 3)])
    def test_riccati(self, qtable, x):
        self.assertTrue(check_riccati(qtable, x, 25).ok)

    def test_q_bound(self, ctx):
        report = check_q_bound(build_qtable(20), ["0.5", "1", "3"], ctx)
        self.assertTrue(report.ok)
        self.assertEqual(len(report.details), 60)

    def test_report_raises(self):
        report = IdentityReport("demo", ok=False, details=[{"n": 1, "ok": False}])
        with pytest.raises(InvariantViolation, match="demo"):
            report.raise_on_violation()
