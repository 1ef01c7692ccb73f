"""
Characteristic function
=======================

**Module name:** :mod:`argzeta.charfun`

.. currentmodule:: argzeta.charfun

Evaluation of the characteristic function

.. math:: \\psi_\\sigma(x) = \\prod_p I(p^\\sigma, x)

of the limiting distribution of :math:`\\arg\\zeta(\\sigma + it)`.

The product is split at a prime :math:`p_0 = \\max(p_{min}, \\lceil|\\kappa x|^{1/\\sigma}\\rceil)`.
Factors with :math:`p \\le p_0` are multiplied out explicitly (:math:`A`).
The remaining factors are collected through the convergent log series of
:mod:`argzeta.ifunc`, which after summing over primes reads

.. math:: B = \\exp\\Bigl(-\\sum_{n \\ge 1} \\frac{Q_n(x/2)}{n!^2}
          \\bigl(P(2n\\sigma) - \\sum_{p \\le p_0} p^{-2n\\sigma}\\bigr)\\Bigr),

so that :math:`\\psi_\\sigma(x) = A B`.

Classes
-------

.. autosummary::
   PsiEvaluator
   DecayReport

Functions
---------

.. autosummary::
   psi
   psi_with_budget
   psi_batch
   psi_decay_check
   decay_envelope
   brute_force_psi
   scan_sign_changes

Code details
~~~~~~~~~~~~
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp

from .config import DEFAULT_KAPPA, DEFAULT_MAX_SIEVE_LIMIT, DEFAULT_MIN_P0
from .exceptions import DomainError, InvariantViolation
from .ifunc import LAPLACE_CONSTANT, SERIES_ENGINES, BoundConstants, i_series
from .numerics import ErrorBudget, to_mpf
from .primes import PrimeZetaCache, direct_prime_sum, prime_zeta, sieve
from .qpoly import QTable, normalized_q_values

log = logging.getLogger(__name__)

#: largest tail index for which exact Q-table rows are used instead of the Riccati recurrence
QTABLE_ROWS = 60

#: upper end of the range of sigma covered by the c = 1 decay estimate
DECAY_SIGMA_MAX = 1.1


@dataclass(frozen=True)
class _Plan:
    # everything that depends on (sigma, max |x|) only
    x_max: object
    p0: int
    bases: tuple
    factor_ctx: object
    tail_ctx: object
    nterms: int
    truncation: object


class PsiEvaluator:
    r"""Bound evaluator :math:`x \mapsto \psi_\sigma(x)` for one :math:`\sigma` and precision.

    Prime tables, prime zeta values and Q-table rows are built on demand and
    shared by every evaluation made through the same instance. Evaluations at
    several abscissae should go through :meth:`psi_batch` (or pass ``x_max``)
    so that they share one cut :math:`p_0` and one tail precision.

    Args:
        sigma: real, :math:`\sigma > 1/2`; strings keep every digit
        ctx (PrecisionContext): precision and absolute target

    Keyword args:
        kappa (float): multiplier in :math:`p_0 = \lceil|\kappa x|^{1/\sigma}\rceil`, above 1/2
        min_p0 (int): floor on :math:`p_0`
        engine (str): :func:`~.i_series` engine for the explicit factors
        primetable (PrimeTable): fixed prime table; :math:`p_0` beyond its
            limit raises :class:`~.CapacityError`. Without it the evaluator
            sieves as needed.
        qtable (QTable): shared Q coefficients
        max_sieve_limit (int): cap on sieving
    """

    def __init__(
        self,
        sigma,
        ctx,
        kappa=DEFAULT_KAPPA,
        min_p0=DEFAULT_MIN_P0,
        engine="hyp2f1",
        primetable=None,
        qtable=None,
        max_sieve_limit=DEFAULT_MAX_SIEVE_LIMIT,
    ):
        self.sigma_input = sigma
        self.sigma = to_mpf(sigma, ctx)
        if not self.sigma > mpmath.mpf(1) / 2:
            raise DomainError(f"psi requires sigma > 1/2, got sigma = {self.sigma}")
        if not kappa > 0.5:
            raise DomainError(f"kappa must exceed 1/2 so that 2 p0^sigma > |x|, got {kappa}")
        if engine not in SERIES_ENGINES:
            raise DomainError(f"Unknown series engine {engine!r}; expected one of {SERIES_ENGINES}")
        self.ctx = ctx
        self.kappa = kappa
        self.min_p0 = max(int(min_p0), 2)
        self.engine = engine
        self.primetable = primetable
        self._fixed_table = primetable is not None
        self.qtable = qtable if qtable is not None else QTable()
        self.max_sieve_limit = max_sieve_limit
        self._plans = {}
        self._zeta_caches = {}

    def __repr__(self):
        return f"<PsiEvaluator: sigma={mpmath.nstr(self.sigma, 15)}, digits={self.ctx.working_digits}>"

    def p0_for(self, x):
        """The cut :math:`p_0` used for abscissae up to ``|x|``."""
        with self.ctx.workdps():
            ax = abs(to_mpf(x, self.ctx))
            raw = int(mp.ceil(mp.power(self.kappa * ax, 1 / self.sigma))) if ax > 0 else 0
        return max(self.min_p0, raw)

    def _primes(self, p0):
        if self.primetable is None or self.primetable.limit < p0:
            if self._fixed_table:
                self.primetable.require(p0)
            limit = max(p0, 2 * (self.primetable.limit if self.primetable else 0))
            self.primetable = sieve(min(limit, max(p0, self.max_sieve_limit)), max_limit=self.max_sieve_limit)
        return self.primetable.upto(p0)

    def zeta_cache(self, p0):
        """The :class:`~.PrimeZetaCache` for cut ``p0``."""
        cache = self._zeta_caches.get(p0)
        if cache is None:
            self._primes(p0)
            cache = self._zeta_caches[p0] = PrimeZetaCache(self.sigma_input, p0, self.primetable)
        return cache

    def _plan(self, x_max):
        ctx = self.ctx
        with ctx.workdps():
            x_max = abs(to_mpf(x_max, ctx))
        key = mpmath.nstr(x_max, ctx.working_digits)
        plan = self._plans.get(key)
        if plan is not None:
            return plan
        p0 = self.p0_for(x_max)
        primes = self._primes(p0)
        count = len(primes)
        factor_ctx = ctx.with_target(ctx.target_abs_error / (4 * count))

        s = float(self.sigma)
        m = max(1.0, float(x_max) / 2)
        log_r = 2 * math.log(m) - 2 * s * math.log(p0)
        r = math.exp(log_r)
        log_limit = float(mpmath.log(ctx.target_abs_error / 4))

        def log_truncation(n):
            # sum_{k>n} Q_k/k!^2 tail_k <= p0 r^(n+1) / ((n+1)(2(n+1)sigma - 1)(1-r))
            return (
                math.log(p0)
                + (n + 1) * log_r
                - math.log(n + 1)
                - math.log(2 * (n + 1) * s - 1)
                - math.log1p(-r)
            )

        nterms = 1
        while log_truncation(nterms) >= log_limit:
            nterms += 1
        # largest |Q_n/n!^2 P(2n sigma)| decides how much cancellation P - S suffers
        log_peak = max(
            2 * n * math.log(m) - math.log(n) - 2 * n * s * math.log(2) + math.log1p(2 / (2 * n * s - 1))
            for n in range(1, nterms + 1)
        )
        with ctx.workdps():
            tail_target = ctx.target_abs_error / (8 * nterms * mpmath.exp(max(log_peak, 0.0)))
        tail_ctx = ctx.with_target(tail_target)
        if nterms <= QTABLE_ROWS:
            self.qtable.extend(nterms)
        with factor_ctx.workdps():
            sigma = to_mpf(self.sigma_input, factor_ctx)
            bases = tuple(mp.power(int(p), sigma) for p in primes)
        plan = _Plan(
            x_max=x_max,
            p0=p0,
            bases=bases,
            factor_ctx=factor_ctx,
            tail_ctx=tail_ctx,
            nterms=nterms,
            truncation=mpmath.exp(log_truncation(nterms)),
        )
        log.debug(
            "psi plan sigma=%s x_max=%s: p0=%d (%d primes), N'=%d, factor digits %d, tail digits %d",
            mpmath.nstr(self.sigma, 12),
            mpmath.nstr(x_max, 8),
            p0,
            count,
            nterms,
            factor_ctx.working_digits,
            tail_ctx.working_digits,
        )
        self._plans[key] = plan
        return plan

    def psi_with_budget(self, x, x_max=None):
        r""":math:`\psi_\sigma(x)` with its :class:`~.ErrorBudget`.

        Args:
            x: real abscissa

        Keyword args:
            x_max: plan the cut and precision for abscissae up to this size

        Returns:
            tuple[mpf, ErrorBudget]
        """
        ctx = self.ctx
        with ctx.workdps():
            ax = abs(to_mpf(x, ctx))
            if x_max is not None:
                x_max = max(ax, abs(to_mpf(x_max, ctx)))
        if ax == 0:
            return mpmath.mpf(1), ErrorBudget()
        plan = self._plan(x_max if x_max is not None else ax)
        if ax > plan.x_max:
            raise DomainError(f"|x| = {mpmath.nstr(ax, 10)} exceeds the planned x_max = {mpmath.nstr(plan.x_max, 10)}")

        fctx = plan.factor_ctx
        with fctx.workdps():
            a = mpmath.mpf(1)
            for b in plan.bases:
                a *= i_series(b, ax, fctx, engine=self.engine)

        tctx = plan.tail_ctx
        rows = self.qtable if self.qtable.nmax >= plan.nterms else None
        coeffs = normalized_q_values(ax / 2, plan.nterms, tctx, table=rows)
        cache = self.zeta_cache(plan.p0)
        with tctx.workdps():
            exponent = mp.fsum(c * cache.tail(n, tctx) for n, c in enumerate(coeffs, start=1))
            if exponent < 0:
                raise InvariantViolation(f"negative tail exponent {exponent} at x = {ax}")
            b_factor = mp.exp(-exponent)
            value = a * b_factor
        with ctx.workdps():
            value = +value
        budget = ErrorBudget(
            truncation=plan.truncation,
            rounding=len(plan.bases) * fctx.target_abs_error + 2 * plan.nterms * tctx.target_abs_error + ctx.eps,
        )
        if abs(value) > 1 + budget.total():
            raise InvariantViolation(f"|psi({mpmath.nstr(ax, 10)})| = {mpmath.nstr(value, 10)} exceeds 1")
        return value, budget

    def psi(self, x, x_max=None):
        r""":math:`\psi_\sigma(x)`; see :meth:`psi_with_budget`."""
        return self.psi_with_budget(x, x_max=x_max)[0]

    __call__ = psi

    def psi_batch(self, xs):
        """Values at every abscissa of ``xs``, sharing one plan for ``max |x|``."""
        xs = list(xs)
        if not xs:
            return []
        with self.ctx.workdps():
            x_max = max(abs(to_mpf(x, self.ctx)) for x in xs)
        return [self.psi(x, x_max=x_max) for x in xs]


def psi(evaluator, x):
    r""":math:`\psi_\sigma(x)` to the absolute target of the evaluator's context."""
    return evaluator.psi(x)


def psi_with_budget(evaluator, x):
    r""":math:`\psi_\sigma(x)` together with its error budget."""
    return evaluator.psi_with_budget(x)


def psi_batch(evaluator, xs):
    r""":math:`\psi_\sigma` at every abscissa of ``xs``."""
    return evaluator.psi_batch(xs)


def _log_decay_bound(sigma, x):
    y = x ** (1 / sigma)
    return -y / math.log(y)


def decay_envelope(sigma, x, table=None, logscale=False):
    r"""Upper bound on :math:`|\psi_\sigma(x)|` in double precision.

    Each prime contributes the smallest applicable bound on
    :math:`|I(p^\sigma, x)|`: 1, :math:`c_2x/b^3 + c_3\sqrt{b/x}`,
    :math:`c_3\sqrt{b/x}(1 + c_5b^{-1/2})` for :math:`b \ge \sqrt x`, and
    :math:`1.1512\sqrt{b/x}` for ``x >= 5``. Only primes with
    :math:`p^\sigma \le 2x` can contribute a factor below 1. For
    :math:`1/2 < \sigma \le 1.1` and ``x >= 5`` the result is further capped by
    :math:`\exp(-x^{1/\sigma}/\log x^{1/\sigma})`.

    Args:
        sigma: real, :math:`\sigma > 1/2`
        x (float or array): abscissae

    Keyword args:
        table (PrimeTable): primes reaching :math:`(2\max|x|)^{1/\sigma}`
        logscale (bool): return the natural logarithm of the envelope, which
            stays finite far below the double precision range

    Returns:
        float or array: the envelope, same shape as ``x``
    """
    s = float(sigma)
    if not s > 0.5:
        raise DomainError(f"decay_envelope requires sigma > 1/2, got {sigma}")
    xs = np.abs(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    x_top = float(xs.max()) if xs.size else 0.0
    limit = max(2, int(math.ceil((2 * x_top) ** (1 / s))) + 1)
    table = table if table is not None and table.limit >= limit else sieve(limit)
    bases = np.power(table.upto(limit).astype(np.float64), s)
    constants = BoundConstants.evaluate()
    c2, c3, c5 = float(constants.c2), float(constants.c3), float(constants.c5)
    laplace = float(LAPLACE_CONSTANT)
    out = np.empty_like(xs)
    for i, xv in enumerate(xs):
        if xv <= 0:
            out[i] = 0.0
            continue
        b = bases[: np.searchsorted(bases, 2 * xv, side="right")]
        logs = np.log(c2 * xv / b**3 + c3 * np.sqrt(b / xv))
        if xv >= 5:
            logs = np.minimum(logs, np.where(b * b >= 2, np.log(laplace * np.sqrt(b / xv)), np.inf))
        if xv > 1:
            logs = np.minimum(logs, np.where(b * b >= xv, np.log(c3 * np.sqrt(b / xv) * (1 + c5 / np.sqrt(b))), np.inf))
        total = float(np.sum(np.minimum(logs, 0.0)))
        if s <= DECAY_SIGMA_MAX and xv >= 5:
            total = min(total, _log_decay_bound(s, xv))
        out[i] = total
    if not logscale:
        out = np.exp(out)
    return out if np.ndim(x) else float(out[0])


@dataclass
class DecayReport:
    """Computed :math:`|\\psi_\\sigma(x)|` against :math:`\\exp(-x^{1/\\sigma}/\\log x^{1/\\sigma})`."""

    sigma: object
    x: object
    value: object
    bound: object
    tolerance: object

    @property
    def margin(self):
        """``bound - |value|``"""
        return self.bound - abs(self.value)

    @property
    def ok(self):
        """bool: both the decay bound and :math:`|\\psi| \\le 1` hold"""
        return self.margin >= -self.tolerance and abs(self.value) <= 1 + self.tolerance

    def raise_on_violation(self):
        """Raise :class:`~.InvariantViolation` if the bound fails."""
        if not self.ok:
            raise InvariantViolation(
                f"|psi_{mpmath.nstr(self.sigma, 8)}({mpmath.nstr(self.x, 8)})| = {mpmath.nstr(abs(self.value), 8)} "
                f"exceeds {mpmath.nstr(self.bound, 8)}"
            )
        return self


def psi_decay_check(evaluator, x):
    r"""Check :math:`|\psi_\sigma(x)| \le \exp(-x^{1/\sigma}/\log x^{1/\sigma})` for ``x >= 5``.

    The estimate with constant 1 is known for :math:`1/2 < \sigma \le 1.1`.

    Returns:
        DecayReport: value, bound and margin
    """
    sigma = evaluator.sigma
    if not (sigma <= DECAY_SIGMA_MAX + 1e-12):
        raise DomainError(f"decay check covers 1/2 < sigma <= 1.1, got sigma = {sigma}")
    ctx = evaluator.ctx
    x = to_mpf(x, ctx)
    if x < 5:
        raise DomainError(f"decay check requires x >= 5, got x = {x}")
    value, budget = evaluator.psi_with_budget(x)
    with ctx.workdps():
        y = mp.power(x, 1 / sigma)
        bound = mp.exp(-y / mp.log(y))
    return DecayReport(sigma, x, value, bound, budget.total())


def brute_force_psi(sigma, x, ctx, limit=10**6, exact_limit=1000, table=None):
    r"""Direct product oracle for :math:`\psi_\sigma(x)`.

    Factors with :math:`p \le` ``exact_limit`` are evaluated by :func:`~.i_series`.
    For larger :math:`p \le` ``limit`` the two leading terms of the log series,
    :math:`-y^2/b^2 - (y^2 + y^4)/(4b^4)`, are summed in double precision with
    numpy. Primes beyond ``limit`` enter through the first-order tail
    :math:`-y^2(P(2\sigma) - \sum_{p \le limit} p^{-2\sigma})`.

    Returns:
        tuple[mpf, float]: the value and an error bound for the oracle
    """
    if limit <= exact_limit:
        raise DomainError(f"limit {limit} must exceed exact_limit {exact_limit}")
    s = to_mpf(sigma, ctx)
    table = table if table is not None and table.limit >= limit else sieve(limit)
    with ctx.workdps():
        ax = abs(to_mpf(x, ctx))
        y = ax / 2
        exact = mpmath.mpf(1)
        for p in table.upto(exact_limit):
            exact *= i_series(mp.power(int(p), s), ax, ctx, engine="hyp2f1")
    mid = table.upto(limit)
    mid = mid[mid > exact_limit].astype(np.float64)
    sf, yf = float(s), float(y)
    inv2 = np.power(mid, -2 * sf)
    log_mid = -float(np.sum((yf**2 * inv2 + (yf**2 + yf**4) / 4 * inv2**2)[::-1]))
    with ctx.workdps():
        tail = prime_zeta(2 * s, ctx) - direct_prime_sum(2 * sf, limit, table)
        value = exact * mp.exp(log_mid) * mp.exp(-y * y * tail)
    # third log-series term over (exact_limit, limit] and second-order term beyond limit
    third = (4 * yf**2 + 4 * yf**4 + 4 * yf**6) / 36 * float(exact_limit) ** (1 - 6 * sf) / (6 * sf - 1)
    second = (yf**2 + yf**4) / 4 * float(limit) ** (1 - 4 * sf) / (4 * sf - 1)
    error = third + second + 1e-12 * (1 + abs(log_mid))
    return value, error


def scan_sign_changes(evaluator, xs):
    r"""Consecutive pairs of ``xs`` between which :math:`\psi_\sigma` changes sign.

    Returns:
        list[tuple]: ``(x_i, x_{i+1})`` brackets
    """
    xs = list(xs)
    values = evaluator.psi_batch(xs)
    brackets = []
    for (x0, v0), (x1, v1) in zip(zip(xs, values), zip(xs[1:], values[1:])):
        if v0 == 0 or mpmath.sign(v0) != mpmath.sign(v1):
            brackets.append((x0, x1))
    log.debug("psi sign changes: %d brackets in %d points", len(brackets), len(xs))
    return brackets
