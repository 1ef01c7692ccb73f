"""
Invariant suites
================

**Module name:** :mod:`argzeta.checks`

.. currentmodule:: argzeta.checks

Self-checks run by ``argzeta checks``. Each suite returns a list of
:class:`CheckResult`; the command exits nonzero if any of them failed.

- ``bounds``: the proved bounds on :math:`I(b, x)` and :math:`\\psi_\\sigma`
- ``identities``: exact coefficient identities and the Bessel-zero diagonal
- ``oracles``: independent evaluations of the same quantity against each other

Code details
~~~~~~~~~~~~
"""
import logging
import math
from dataclasses import dataclass

import mpmath
from mpmath import mp

from .charfun import PsiEvaluator, brute_force_psi, psi_decay_check
from .exceptions import ArgZetaError, DomainError
from .ifunc import check_bounds, i_quadrature, i_rational, i_series, log_i_series
from .numerics import PrecisionContext
from .primes import direct_prime_sum, prime_sum_tail_bound, prime_zeta, sieve
from .qpoly import build_Q_by_polynomial_recurrence, build_qtable, check_diagonal_bessel, check_q_bound, check_riccati

log = logging.getLogger(__name__)

SUITES = ("bounds", "identities", "oracles")

Q_REFERENCE_ROWS = (
    (1,),
    (1, 1),
    (4, 4, 4),
    (36, 33, 42, 33),
    (576, 480, 648, 720, 456),
    (14400, 10960, 14900, 18780, 17900, 9460),
    (518400, 362880, 487200, 648240, 730800, 606480, 274800),
)
"""The coefficients :math:`q_{n,k}` for :math:`n \\le 7`."""


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check."""

    name: str
    ok: bool
    detail: str = ""

    def __str__(self):
        status = "ok" if self.ok else "FAILED"
        return f"{status:<7}{self.name}" + (f": {self.detail}" if self.detail else "")


def _guarded(name, func):
    try:
        return func()
    except ArgZetaError as e:
        log.warning("check %s raised %s", name, e)
        return CheckResult(name, False, f"{type(e).__name__}: {e}")


def bounds_suite(ctx=None):
    ctx = ctx or PrecisionContext.from_digits(20)
    results = []
    for b in ("1.5", "2", "5", "10"):
        for x in ("0.5", "3", "10", "40"):
            name = f"I-bounds b={b} x={x}"

            def run(b=b, x=x, name=name):
                report = check_bounds(b, x, ctx)
                worst = min(report.checks, key=lambda c: c.margin)
                return CheckResult(name, report.ok, f"tightest {worst.name} margin {mpmath.nstr(worst.margin, 3)}")

            results.append(_guarded(name, run))

    for sigma in ("0.8", "1.5"):
        evaluator = PsiEvaluator(sigma, ctx)
        for x in ("0.5", "2", "8"):
            name = f"|psi| <= 1 sigma={sigma} x={x}"

            def run(evaluator=evaluator, x=x, name=name):
                value, budget = evaluator.psi_with_budget(x)
                return CheckResult(name, abs(value) <= 1 + budget.total(), mpmath.nstr(value, 10))

            results.append(_guarded(name, run))

    evaluator = PsiEvaluator("0.8", ctx)
    for x in (5, 10, 20):
        name = f"psi decay sigma=0.8 x={x}"

        def run(x=x, name=name):
            report = psi_decay_check(evaluator, x)
            return CheckResult(name, report.ok, f"margin {mpmath.nstr(report.margin, 3)}")

        results.append(_guarded(name, run))
    return results


def identities_suite(ctx=None, nmax=50):
    ctx = ctx or PrecisionContext.from_digits(40)
    results = []
    table = build_qtable(nmax)
    for n, row in enumerate(Q_REFERENCE_ROWS, start=1):
        results.append(CheckResult(f"q row {n}", table.row(n) == row, " ".join(map(str, table.row(n)))))
    sums = all(sum(table.row(n)) == math.factorial(n) * math.factorial(n - 1) for n in range(1, nmax + 1))
    results.append(CheckResult(f"row sums n!(n-1)! for n <= {nmax}", sums))
    firsts = all(table.q(n, 1) == math.factorial(n - 1) ** 2 for n in range(1, nmax + 1))
    results.append(CheckResult(f"q(n,1) = (n-1)!^2 for n <= {nmax}", firsts))

    polys = build_Q_by_polynomial_recurrence(12)
    same = all(tuple(polys[n - 1].coeffs) == table.row(n) for n in range(1, 13))
    results.append(CheckResult("polynomial recurrence matches table", same))

    for x in (1, 3):
        report = check_riccati(table, x, 20)
        results.append(CheckResult(report.name, report.ok))
    report = check_q_bound(build_qtable(20), ("0.5", "1", "4"), ctx)
    results.append(CheckResult(report.name, report.ok))

    def diagonal():
        report = check_diagonal_bessel(table, 10, ctx)
        worst = max(d["relative"] for d in report.details[6:])
        return CheckResult(report.name, report.ok, f"max relative deviation n>=7: {mpmath.nstr(worst, 3)}")

    results.append(_guarded("diagonal Bessel-zero sum", diagonal))
    return results


def oracles_suite(ctx=None):
    ctx = ctx or PrecisionContext.from_digits(20)
    results = []
    target = ctx.target_abs_error
    for b, x in (("2", "1"), ("3", "7.5"), ("1.5", "2")):
        name = f"I oracles b={b} x={x}"

        def run(b=b, x=x, name=name):
            series, sb = i_series(b, x, ctx, return_budget=True)
            quad, qb = i_quadrature(b, x, ctx, return_budget=True)
            worst = abs(series - quad)
            ok = worst <= sb.total() + qb.total() + 10 * target
            with ctx.workdps():
                if mpmath.mpf(b) > max(1, mpmath.mpf(x) / 2):
                    logv, lb = log_i_series(b, x, ctx, return_budget=True)
                    diff = abs(series - mp.exp(logv))
                    ok &= diff <= sb.total() + 2 * lb.total() + 10 * target
                    worst = max(worst, diff)
            return CheckResult(name, ok, f"max difference {mpmath.nstr(worst, 3)}")

        results.append(_guarded(name, run))

    for b2, x in ((4, 2), (2, 4), (9, 6)):
        name = f"I rational b^2={b2} x={x}"

        def run(b2=b2, x=x, name=name):
            exact = i_rational(b2, x)
            with ctx.workdps():
                value = i_series(mp.sqrt(b2), x, ctx)
                diff = abs(value - mpmath.mpf(exact.numerator) / exact.denominator)
            return CheckResult(name, diff <= 10 * target, f"{exact}, difference {mpmath.nstr(diff, 3)}")

        results.append(_guarded(name, run))

    table = sieve(10**5)
    for s in ("1.5", "2", "3"):
        name = f"prime zeta s={s}"

        def run(s=s, name=name):
            full = prime_zeta(s, ctx)
            partial = direct_prime_sum(float(s), table.limit, table)
            gap = float(full) - partial
            ok = -1e-10 <= gap <= float(prime_sum_tail_bound(s, table.limit)) + 1e-10
            return CheckResult(name, ok, f"tail {gap:.3e}")

        results.append(_guarded(name, run))

    for sigma in ("1.0", "1.5"):
        evaluator = PsiEvaluator(sigma, ctx)
        for x in ("1", "4"):
            name = f"psi vs prime product sigma={sigma} x={x}"

            def run(evaluator=evaluator, sigma=sigma, x=x, name=name):
                value, budget = evaluator.psi_with_budget(x)
                oracle, err = brute_force_psi(sigma, x, ctx, limit=10**5, table=table)
                diff = abs(value - oracle)
                return CheckResult(name, diff <= budget.total() + err, f"difference {mpmath.nstr(diff, 3)}")

            results.append(_guarded(name, run))
    return results


_SUITES = {"bounds": bounds_suite, "identities": identities_suite, "oracles": oracles_suite}


def run_suites(names=None, ctx=None):
    """Run the named suites (all of them by default).

    Returns:
        dict[str, list[CheckResult]]: results per suite
    """
    names = list(SUITES) if names in (None, "all") else [names] if isinstance(names, str) else list(names)
    out = {}
    for name in names:
        if name not in _SUITES:
            raise DomainError(f"Unknown suite {name!r}; expected one of {SUITES}")
        log.info("running %s suite", name)
        out[name] = _SUITES[name](ctx) if ctx is not None else _SUITES[name]()
    return out
