"""
The per-prime factor I(b, x)
============================

**Module name:** :mod:`argzeta.ifunc`

.. currentmodule:: argzeta.ifunc

Representations, bounds and expansions of

.. math:: I(b, x) = \\frac{1}{2\\pi}\\int_0^{2\\pi} \\exp\\bigl(i x \\arg(1 - b^{-1}e^{it})\\bigr)\\,dt,

the factor contributed by one prime :math:`p` (with :math:`b = p^\\sigma`) to
the characteristic function. The public functions take ``x`` in this
undoubled convention; the hypergeometric form
:math:`I(b, 2y) = {}_2F_1(-y, y; 1; b^{-2})` is internal.

Classes
-------

.. autosummary::
   IFactorParams
   BoundConstants
   BoundCheck
   BoundReport

Functions
---------

.. autosummary::
   i_series
   i_rational
   i_quadrature
   log_i_series
   i_asymptotic
   bessel_proximity
   predicted_zeros
   two_term_bound
   uniform_bound
   laplace_bound
   asymptotic_bound
   check_bounds
   conjecture_scan

Code details
~~~~~~~~~~~~
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .exceptions import (
    CancellationDetected,
    ConvergenceError,
    DomainError,
    InvariantViolation,
    PrecisionOverflowError,
)
from .numerics import ErrorBudget, bessel_j0, integrate, retry_with_escalation, to_mpf
from .qpoly import normalized_q_values

log = logging.getLogger(__name__)

SERIES_ENGINES = ("terms", "hyp2f1")
QUADRATURE_FORMS = ("arcsin", "arctan", "kernel")
MAX_SERIES_TERMS = 10**6
LAPLACE_CONSTANT = "1.1512"


@dataclass(frozen=True)
class IFactorParams:
    r"""The pair :math:`(b, \beta)` with :math:`\beta = \arcsin(1/b)`.

    Use :meth:`from_b` rather than the constructor.
    """

    b: object
    beta: object

    @classmethod
    def from_b(cls, b, ctx):
        """Validate ``b > 1`` and compute :math:`\\beta` at the context precision."""
        b = to_mpf(b, ctx)
        if not b > 1:
            raise DomainError(f"I(b, x) requires b > 1, got b = {b}")
        with ctx.workdps():
            beta = mp.asin(1 / b)
            if abs(mp.sin(beta) * b - 1) > 10 * ctx.eps:
                raise InvariantViolation(f"sin(beta) * b differs from 1 for b = {b}")
        return cls(b, beta)


@dataclass(frozen=True)
class BoundConstants:
    r"""Constants of the bounds on :math:`I(b, x)`.

    ``c1`` bounds :math:`(\arcsin t - t)/t^3`, ``c2`` the distance to
    :math:`J_0(x/b)`, ``c3`` the Bessel envelope :math:`\sqrt{2/\pi}`, ``c4``
    enters the Laplace-integral kernel bound and ``c5 = c2/c3``.
    """

    c1: object
    c2: object
    c3: object
    c4: object
    c5: object

    #: published upper limits of the five constants
    LIMITS = {"c1": "0.5708", "c2": "0.2423", "c3": "0.7979", "c4": "1.0185", "c5": "0.3037"}

    @classmethod
    def evaluate(cls, ctx=None):
        """The constants at the precision of ``ctx`` (current precision if omitted)."""
        if ctx is None:
            return cls._compute()
        with ctx.workdps():
            return cls._compute()

    @classmethod
    def _compute(cls):
        c2 = (2 - 4 / mp.pi) / 3
        c3 = mp.sqrt(2 / mp.pi)
        return cls(mp.pi / 2 - 1, c2, c3, mp.sqrt(mp.coth(2)), c2 / c3)

    def within_limits(self):
        """Whether every constant lies below its published limit."""
        return all(getattr(self, name) < mpmath.mpf(limit) for name, limit in self.LIMITS.items())


def _peak_log_term(b, y):
    # log of the largest |T_n| of the 2F1(-y, y; 1; 1/b^2) series; terms grow only while n < |y|
    bf, yf = float(b), abs(float(y))
    log_b2 = 2 * math.log(bf)
    logt, peak, n = 0.0, 0.0, 0
    while n < yf:
        gap = abs(n * n - yf * yf)
        if gap == 0:
            break
        logt += math.log(gap) - 2 * math.log(n + 1) - log_b2
        peak = max(peak, logt)
        n += 1
    return peak


def _series_by_terms(b, y, ctx):
    peak = _peak_log_term(b, y)
    wctx = ctx.for_magnitude(mpmath.exp(peak))
    if wctx is not ctx:
        log.debug("i_series(b=%s, y=%s): peak term e^%.1f, %d working digits",
                  mpmath.nstr(b, 8), mpmath.nstr(y, 8), peak, wctx.working_digits)
    with wctx.workdps():
        b2 = b * b
        y2 = y * y
        r = 1 / b2
        limit = ctx.target_abs_error / 4
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        n = 0
        tail = mpmath.mpf(0)
        while True:
            term = term * (n * n - y2) / ((n + 1) ** 2 * b2)
            n += 1
            total += term
            if term == 0:
                break
            if n >= abs(y):
                tail = abs(term) * r / (1 - r)
                if tail < limit:
                    break
            if n > MAX_SERIES_TERMS:
                raise ConvergenceError(
                    f"hypergeometric series for b = {mpmath.nstr(b, 8)} did not settle after {n} terms",
                    last_value=total,
                    diagnostics={"tail": tail},
                )
        rounding = (n + 1) * mpmath.exp(peak) * wctx.eps
    if rounding > limit:
        raise CancellationDetected(
            f"{n} terms peaking at e^{peak:.1f} leave rounding {mpmath.nstr(rounding, 3)} "
            f"at {wctx.working_digits} digits"
        )
    return total, ErrorBudget(tail, rounding)


def _series_by_hyp2f1(b, y, ctx):
    with ctx.workdps():
        prec = mp.prec
        maxprec = int(ctx.max_digits * 3.33) + 64
        try:
            value = mp.hyp2f1(-y, y, 1, 1 / (b * b), maxprec=maxprec, zeroprec=prec + 64)
        except (ValueError, mpmath.libmp.NoConvergence) as e:
            raise PrecisionOverflowError(
                f"hypergeometric summation for b = {mpmath.nstr(b, 8)}, y = {mpmath.nstr(y, 8)} "
                f"exceeds {ctx.max_digits} digits: {e}"
            ) from e
        value = +mpmath.re(value)
    return value, ErrorBudget(0, 2 * ctx.eps)


def i_series(b, x, ctx, engine="terms", return_budget=False):
    r"""Hypergeometric series for :math:`I(b, x)`.

    With :math:`y = x/2`,

    .. math:: I(b, x) = 1 + \sum_{n \ge 1} \frac{1}{n!^2 b^{2n}} \prod_{j<n} (j^2 - y^2).

    The ``"terms"`` engine sums this explicitly. Once :math:`n \ge |y|` the
    term ratio is below :math:`b^{-2}`, which bounds the tail geometrically;
    before that the terms alternate and may grow, so the working precision is
    raised by the logarithm of the largest term. The ``"hyp2f1"`` engine hands
    the same series to mpmath, which detects the cancellation itself.

    Args:
        b: real, ``b > 1``
        x: real argument
        ctx (PrecisionContext): precision and target

    Keyword args:
        engine (str): ``"terms"`` or ``"hyp2f1"``
        return_budget (bool): also return the :class:`~.ErrorBudget`

    Returns:
        mpf or tuple[mpf, ErrorBudget]: :math:`I(b, x)`
    """
    if engine not in SERIES_ENGINES:
        raise DomainError(f"Unknown series engine {engine!r}; expected one of {SERIES_ENGINES}")
    b = to_mpf(b, ctx)
    if not b > 1:
        raise DomainError(f"I(b, x) requires b > 1, got b = {b}")
    with ctx.workdps():
        y = abs(to_mpf(x, ctx)) / 2
    if y == 0:
        value, budget = mpmath.mpf(1), ErrorBudget()
    elif engine == "terms":
        value, budget = retry_with_escalation(lambda c: _series_by_terms(b, y, c), ctx)
    else:
        value, budget = _series_by_hyp2f1(b, y, ctx)
    with ctx.workdps():
        value = +value
    if abs(value) > 1 + budget.total() + ctx.eps:
        raise InvariantViolation(f"|I({mpmath.nstr(b, 8)}, {mpmath.nstr(2 * y, 8)})| = {value} exceeds 1")
    return (value, budget) if return_budget else value


def i_rational(b2, x):
    r"""Exact :math:`I(b, x)` for rational :math:`b^2 > 1` and even integer ``x``.

    Writing :math:`x = 2m`, Euler's transformation turns the terminating series
    into

    .. math:: I(b, 2m) = (1 - b^{-2})^m\, {}_2F_1\Bigl(-m, 1 - m; 1; \frac{1}{1 - b^2}\Bigr),

    summed here in :class:`fractions.Fraction` arithmetic.

    Args:
        b2 (Fraction, int or str): :math:`b^2`, rational and greater than 1
        x (int): even integer argument

    Returns:
        Fraction: the exact value
    """
    b2 = Fraction(b2)
    if b2 <= 1:
        raise DomainError(f"i_rational requires b^2 > 1, got {b2}")
    x = Fraction(x)
    if x.denominator != 1 or x.numerator % 2:
        raise DomainError(f"i_rational requires an even integer argument, got {x}")
    m = abs(x.numerator) // 2
    if m == 0:
        return Fraction(1)
    w = 1 / (1 - b2)
    term = Fraction(1)
    total = Fraction(1)
    for k in range(m):
        # (-m)_k (1-m)_k / k!^2 w^k, zero once 1 - m + k reaches 0
        term = term * (k - m) * (k + 1 - m) / ((k + 1) ** 2) * w
        if term == 0:
            break
        total += term
    return (1 - 1 / b2) ** m * total


def _oscillation_points(lo, hi, phase_span):
    pieces = max(1, int(mpmath.ceil(abs(phase_span) / mp.pi)))
    if pieces == 1:
        return []
    return [lo + (hi - lo) * j / pieces for j in range(1, pieces)]


def i_quadrature(b, x, ctx, form="arcsin", return_budget=False):
    r"""Numerical quadrature of one of three integral representations of :math:`I(b, x)`.

    * ``"arcsin"``: :math:`\frac{2}{\pi}\int_0^{\pi/2} \cos(x \arcsin(\sin u / b))\,du`
    * ``"arctan"``: :math:`\frac{1}{\pi}\int_0^{\pi} \cos\bigl(x \arctan\frac{\sin t}{b - \cos t}\bigr)\,dt`
    * ``"kernel"``: :math:`\frac{2b}{\pi}\int_0^{\beta} \frac{\cos(xt)\cos t}{\sqrt{1 - b^2\sin^2 t}}\,dt`,
      with an inverse square root singularity at :math:`t = \beta`

    The range is split so that each piece carries about one half period of the
    oscillation.

    Args:
        b: real, ``b > 1``
        x: real argument
        ctx (PrecisionContext): precision and target

    Keyword args:
        form (str): representation to integrate
        return_budget (bool): also return the :class:`~.ErrorBudget`
    """
    if form not in QUADRATURE_FORMS:
        raise DomainError(f"Unknown quadrature form {form!r}; expected one of {QUADRATURE_FORMS}")
    params = IFactorParams.from_b(b, ctx)
    b, beta = params.b, params.beta
    with ctx.workdps():
        x = to_mpf(x, ctx)
        span = x * beta
        if form == "arcsin":
            lo, hi, scale = mpmath.mpf(0), mp.pi / 2, 2 / mp.pi

            def integrand(u):
                return mp.cos(x * mp.asin(mp.sin(u) / b))

        elif form == "arctan":
            lo, hi, scale = mpmath.mpf(0), mp.pi, 1 / mp.pi

            def integrand(t):
                return mp.cos(x * mp.atan(mp.sin(t) / (b - mp.cos(t))))

        else:
            lo, hi, scale = mpmath.mpf(0), beta, 2 * b / mp.pi

            def integrand(t):
                # 1 - b^2 sin^2 t = b^2 sin(beta - t) sin(beta + t)
                gap = mp.sin(beta - t)
                if gap <= 0:
                    return mpmath.mpf(0)
                return mp.cos(x * t) * mp.cos(t) / (b * mp.sqrt(gap * mp.sin(beta + t)))

        points = _oscillation_points(lo, hi, span)
    inner = ctx.with_target(ctx.target_abs_error / scale)
    value, budget = integrate(integrand, lo, hi, inner, points=points)
    with ctx.workdps():
        value = scale * value
    budget = budget.scale(scale)
    return (value, budget) if return_budget else value


def log_i_series(b, x, ctx, qtable=None, return_budget=False):
    r"""Convergent series :math:`\log I(b, x) = -\sum_n \frac{Q_n(y)}{n!^2} b^{-2n}`, :math:`y = x/2`.

    Requires :math:`b > \max(1, |y|)`. Since
    :math:`0 \le Q_n(y)/n!^2 \le \max(1, |y|)^{2n}/n`, every term is
    nonnegative and the tail after ``N`` terms is at most
    :math:`r^{N+1}/((N+1)(1-r))` with :math:`r = \max(1, |y|)^2/b^2`.

    Args:
        b: real
        x: real argument
        ctx (PrecisionContext): precision and target

    Keyword args:
        qtable (QTable): exact coefficients; the Riccati recurrence is used
            when the table is missing or too short
        return_budget (bool): also return the :class:`~.ErrorBudget`

    Returns:
        mpf: :math:`\log I(b, x)`
    """
    b = to_mpf(b, ctx)
    with ctx.workdps():
        y = abs(to_mpf(x, ctx)) / 2
        m = max(mpmath.mpf(1), y)
        if not b > m:
            raise DomainError(
                f"log series needs b > max(1, |x|/2); got b = {mpmath.nstr(b, 10)}, x = {mpmath.nstr(2 * y, 10)}"
            )
        if y == 0:
            return (mpmath.mpf(0), ErrorBudget()) if return_budget else mpmath.mpf(0)
        r = (m / b) ** 2
        limit = ctx.target_abs_error / 4
        nterms = 1
        while r ** (nterms + 1) / ((nterms + 1) * (1 - r)) >= limit:
            nterms += 1
            if nterms > MAX_SERIES_TERMS:
                raise ConvergenceError(f"log series ratio {mpmath.nstr(r, 8)} too close to 1")
        tail = r ** (nterms + 1) / ((nterms + 1) * (1 - r))
    wctx = ctx.for_magnitude(-mpmath.log(1 - r) + 1)
    coeffs = normalized_q_values(y, nterms, wctx, table=qtable)
    with wctx.workdps():
        inv = 1 / (b * b)
        value = -mp.fsum(c * inv ** n for n, c in enumerate(coeffs, start=1))
        rounding = nterms * abs(value) * wctx.eps
    log.debug("log_i_series(b=%s, x=%s): %d terms", mpmath.nstr(b, 8), mpmath.nstr(2 * y, 8), nterms)
    with ctx.workdps():
        value = +value
    budget = ErrorBudget(tail, rounding)
    return (value, budget) if return_budget else value


def i_asymptotic(b, x, ctx, terms=3):
    r"""Partial sum of the large-``x`` expansion of :math:`I(b, x)`.

    With :math:`\phi = x\beta - \pi/4`:

    .. math::

        I(b,x) \sim \frac{2(b^2-1)^{1/4}}{\sqrt{2\pi x}}\cos\phi
        + \frac{(b^2+2)(b^2-1)^{-1/4}}{4\sqrt{2\pi}\,x^{3/2}}\sin\phi
        - \frac{(9b^4-28b^2+4)(b^2-1)^{-3/4}}{64\sqrt{2\pi}\,x^{5/2}}\cos\phi.

    The expansion is asymptotic, so no error bound is attached.

    Args:
        b: real, ``b > 1``
        x: real, ``x > 0``
        ctx (PrecisionContext): precision

    Keyword args:
        terms (int): number of terms, 1 to 3
    """
    if terms not in (1, 2, 3):
        raise DomainError(f"i_asymptotic supports 1 to 3 terms, got {terms}")
    params = IFactorParams.from_b(b, ctx)
    b, beta = params.b, params.beta
    x = to_mpf(x, ctx)
    if not x > 0:
        raise DomainError(f"i_asymptotic requires x > 0, got x = {x}")
    with ctx.workdps():
        b2 = b * b
        a = b2 - 1
        phi = x * beta - mp.pi / 4
        root = mp.sqrt(2 * mp.pi)
        value = 2 * mp.power(a, 0.25) / (root * mp.sqrt(x)) * mp.cos(phi)
        if terms >= 2:
            value += (b2 + 2) / (4 * root) * mp.power(a, -0.25) * mp.power(x, -1.5) * mp.sin(phi)
        if terms >= 3:
            value -= (9 * b2 * b2 - 28 * b2 + 4) / (64 * root) * mp.power(a, -0.75) * mp.power(x, -2.5) * mp.cos(phi)
        return value


def bessel_proximity(b, x, ctx):
    r""":math:`I(b, x) - \beta^{1/2}(b^2-1)^{1/4} J_0(\beta x)`, which is :math:`O(x^{-3/2})`."""
    params = IFactorParams.from_b(b, ctx)
    value = i_series(params.b, x, ctx)
    with ctx.workdps():
        x = to_mpf(x, ctx)
        scale = mp.sqrt(params.beta) * mp.power(params.b ** 2 - 1, 0.25)
        return value - scale * bessel_j0(params.beta * x, ctx)


def predicted_zeros(b, count, ctx):
    r"""First ``count`` positive points :math:`(3\pi/4 + k\pi)/\beta` near which :math:`I(b, \cdot)` vanishes."""
    params = IFactorParams.from_b(b, ctx)
    with ctx.workdps():
        return [(3 * mp.pi / 4 + k * mp.pi) / params.beta for k in range(int(count))]


def two_term_bound(b, x, constants=None):
    r""":math:`c_2 x/b^3 + c_3\sqrt{b/x}`, valid for ``b > 1, x > 0``."""
    constants = constants or BoundConstants.evaluate()
    b, x = mpmath.mpf(b), mpmath.mpf(x)
    if not (b > 1 and x > 0):
        raise DomainError(f"two-term bound requires b > 1 and x > 0, got b = {b}, x = {x}")
    return constants.c2 * x / b**3 + constants.c3 * mp.sqrt(b / x)


def uniform_bound(b, x, constants=None):
    r""":math:`c_3\sqrt{b/x}(1 + c_5 b^{-1/2})`, valid for ``x > 1`` and :math:`b \ge \sqrt{x}`."""
    constants = constants or BoundConstants.evaluate()
    b, x = mpmath.mpf(b), mpmath.mpf(x)
    if not (x > 1 and b * b >= x):
        raise DomainError(f"uniform bound requires x > 1 and b >= sqrt(x), got b = {b}, x = {x}")
    return constants.c3 * mp.sqrt(b / x) * (1 + constants.c5 / mp.sqrt(b))


def laplace_bound(b, x):
    r""":math:`1.1512\sqrt{b/x}`, valid for :math:`b \ge \sqrt 2` and ``x >= 5``."""
    b, x = mpmath.mpf(b), mpmath.mpf(x)
    if not (b * b >= 2 and x >= 5):
        raise DomainError(f"1.1512 bound requires b >= sqrt(2) and x >= 5, got b = {b}, x = {x}")
    return mpmath.mpf(LAPLACE_CONSTANT) * mp.sqrt(b / x)


def asymptotic_bound(b, x, constants=None):
    r""":math:`c_3(1 - b^{-2})^{1/4}\sqrt{b/x}`, the leading-order envelope for large ``x``.

    This holds only up to :math:`O(x^{-3/2})` and is never used as a proof.
    """
    constants = constants or BoundConstants.evaluate()
    b, x = mpmath.mpf(b), mpmath.mpf(x)
    return constants.c3 * mp.power(1 - 1 / (b * b), 0.25) * mp.sqrt(b / x)


@dataclass
class BoundCheck:
    """One bound evaluated at one point.

    Args:
        name (str): bound identifier
        lhs: the bounded quantity
        bound: the bound value
        rigorous (bool): whether a failure means a bug
    """

    name: str
    lhs: object
    bound: object
    rigorous: bool = True

    @property
    def margin(self):
        """``bound - lhs``"""
        return self.bound - self.lhs


@dataclass
class BoundReport:
    """All bounds applicable at ``(b, x)`` with the computed :math:`I(b, x)`."""

    b: object
    x: object
    value: object
    tolerance: object
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        """bool: every rigorous bound holds up to the evaluation tolerance"""
        return all(c.margin >= -self.tolerance for c in self.checks if c.rigorous)

    def raise_on_violation(self):
        """Raise :class:`~.InvariantViolation` naming the first failed bound."""
        for c in self.checks:
            if c.rigorous and c.margin < -self.tolerance:
                raise InvariantViolation(
                    f"bound {c.name!r} fails at b = {mpmath.nstr(self.b, 10)}, x = {mpmath.nstr(self.x, 10)}: "
                    f"{mpmath.nstr(c.lhs, 10)} > {mpmath.nstr(c.bound, 10)}"
                )
        return self


def check_bounds(b, x, ctx, engine="terms"):
    """Evaluate every bound on :math:`I(b, x)` whose hypotheses hold at ``(b, x)``.

    Returns:
        BoundReport: the computed value and one :class:`BoundCheck` per bound
    """
    b = to_mpf(b, ctx)
    value, budget = i_series(b, x, ctx, engine=engine, return_budget=True)
    with ctx.workdps():
        x = abs(to_mpf(x, ctx))
        constants = BoundConstants.evaluate()
        tolerance = budget.total() + 10 * ctx.eps
        report = BoundReport(b, x, value, tolerance)
        magnitude = abs(value)
        report.checks.append(BoundCheck("unit", magnitude, mpmath.mpf(1)))
        if x > 0:
            distance = abs(value - bessel_j0(x / b, ctx))
            report.checks.append(BoundCheck("bessel-distance", distance, constants.c2 * x / b**3))
            report.checks.append(BoundCheck("two-term", magnitude, two_term_bound(b, x, constants)))
            report.checks.append(BoundCheck("asymptotic", magnitude, asymptotic_bound(b, x, constants), rigorous=False))
        if x > 1 and b * b >= x:
            report.checks.append(BoundCheck("uniform", magnitude, uniform_bound(b, x, constants)))
        if b * b >= 2 and x >= 5:
            report.checks.append(BoundCheck("laplace", magnitude, laplace_bound(b, x)))
    return report


def conjecture_scan(bs, xs, ctx, engine="hyp2f1"):
    r"""Scan :math:`|I(b,x)| < \sqrt{2b/(\pi x)}` over a grid.

    The inequality is unproved; violations are warned about and returned, not
    raised.

    Returns:
        list[tuple]: ``(b, x, value, bound)`` for every violation
    """
    violations = []
    for b in bs:
        for x in xs:
            value = i_series(b, x, ctx, engine=engine)
            with ctx.workdps():
                bound = mp.sqrt(2 * to_mpf(b, ctx) / (mp.pi * to_mpf(x, ctx)))
                if abs(value) >= bound:
                    violations.append((b, x, value, bound))
    if violations:
        msg = f"{len(violations)} grid point(s) exceed sqrt(2b/(pi x)), first at b = {violations[0][0]}, x = {violations[0][1]}"
        log.warning(msg)
        warnings.warn(msg, UserWarning)
    return violations
