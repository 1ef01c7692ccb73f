"""
Precision-managed numerics
==========================

**Module name:** :mod:`argzeta.numerics`

.. currentmodule:: argzeta.numerics

Elementary and special functions shared by every other module: the Riemann zeta
function at real arguments, the Bessel function :math:`J_0` and its zeros,
adaptive quadrature and bracketing root finding.

All arithmetic is carried out with :mod:`mpmath`. A :class:`PrecisionContext`
is passed explicitly to every operation; it fixes the working precision, the
absolute error the caller wants, and the largest precision any escalation may
reach. Transcendental constants are always recomputed inside the context, so a
value obtained at 30 digits is never reused at 300.

Classes
-------

.. autosummary::
   PrecisionContext
   ErrorBudget

Functions
---------

.. autosummary::
   to_mpf
   zeta_real
   bessel_j0
   bessel_j0_zero
   integrate
   find_root
   retry_with_escalation

Code details
~~~~~~~~~~~~
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
from mpmath import mp

from .config import GUARD_DIGITS, MIN_WORKING_DIGITS, default_max_digits
from .exceptions import (
    BracketError,
    CancellationDetected,
    ConvergenceError,
    DomainError,
    PrecisionOverflowError,
    QuadratureError,
)

log = logging.getLogger(__name__)

QUADRATURE_METHODS = ("tanh-sinh", "gauss-legendre")


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and error target threaded through every computation.

    Args:
        working_digits (int): decimal digits of working precision, at least 15
        target_abs_error: absolute error the caller asks for
        max_digits (int): cap on any precision escalation

    Raises:
        ValueError: if ``working_digits`` is below 15 or the target is not positive
        PrecisionOverflowError: if ``working_digits`` exceeds ``max_digits``
    """

    working_digits: int = 30
    target_abs_error: object = 1e-20
    max_digits: int = field(default_factory=default_max_digits)

    def __post_init__(self):
        if self.working_digits < MIN_WORKING_DIGITS:
            raise ValueError(
                f"working_digits must be at least {MIN_WORKING_DIGITS}, got {self.working_digits}"
            )
        if self.working_digits > self.max_digits:
            raise PrecisionOverflowError(
                f"{self.working_digits} working digits requested, cap is {self.max_digits}"
            )
        target = mpmath.mpf(self.target_abs_error)
        if not target > 0 or not mpmath.isfinite(target):
            raise ValueError(f"target_abs_error must be positive and finite, got {target}")
        object.__setattr__(self, "target_abs_error", target)

    @classmethod
    def from_digits(cls, digits, guard=GUARD_DIGITS, max_digits=None):
        """Context aiming at ``digits`` correct decimals after the point.

        Args:
            digits (int): requested absolute accuracy :math:`10^{-digits}`
            guard (int): extra working digits

        Keyword args:
            max_digits (int): precision cap, defaults to :func:`~.default_max_digits`
        """
        max_digits = max_digits if max_digits is not None else default_max_digits()
        working = max(MIN_WORKING_DIGITS, int(digits) + guard)
        return cls(working, mpmath.mpf(10) ** (-int(digits)), max_digits)

    @property
    def target_digits(self):
        """int: number of decimals implied by the absolute target"""
        return max(0, int(math.ceil(-float(mpmath.log10(self.target_abs_error)))))

    @property
    def eps(self):
        """mpf: unit roundoff of the working precision"""
        return mpmath.mpf(10) ** (-self.working_digits)

    def workdps(self):
        """Scoped mpmath precision for this context (use as ``with ctx.workdps():``)."""
        return mp.workdps(self.working_digits)

    def with_digits(self, digits):
        """Copy running at ``digits`` working digits.

        Raises:
            PrecisionOverflowError: if ``digits`` exceeds ``max_digits``
        """
        digits = max(MIN_WORKING_DIGITS, int(digits))
        if digits > self.max_digits:
            raise PrecisionOverflowError(
                f"computation needs {digits} working digits, cap is {self.max_digits}"
            )
        if digits == self.working_digits:
            return self
        return replace(self, working_digits=digits)

    def with_target(self, target_abs_error, guard=GUARD_DIGITS):
        """Copy with a new absolute target; working digits grow to match it."""
        target = mpmath.mpf(target_abs_error)
        needed = int(math.ceil(-float(mpmath.log10(target)))) + guard
        ctx = replace(self, target_abs_error=target)
        return ctx.with_digits(max(self.working_digits, needed))

    def escalate(self, factor=2):
        """Copy with the working precision multiplied by ``factor``."""
        new = int(self.working_digits * factor)
        log.debug("escalating precision from %d to %d digits", self.working_digits, new)
        return self.with_digits(new)

    def for_magnitude(self, magnitude, guard=GUARD_DIGITS):
        """Copy whose rounding on quantities of size ``magnitude`` stays below target.

        Args:
            magnitude: largest absolute intermediate value expected

        Returns:
            PrecisionContext: ``self`` or a copy with more working digits
        """
        magnitude = abs(mpmath.mpf(magnitude))
        if magnitude <= 0:
            return self
        needed = int(math.ceil(float(mpmath.log10(magnitude / self.target_abs_error)))) + guard
        if needed <= self.working_digits:
            return self
        return self.with_digits(needed)


@dataclass(frozen=True)
class ErrorBudget:
    """Error estimate split into truncation and rounding parts.

    Both parts are nonnegative finite mpf values.
    """

    truncation: object = 0
    rounding: object = 0

    def __post_init__(self):
        for name in ("truncation", "rounding"):
            value = mpmath.mpf(getattr(self, name))
            if value < 0 or not mpmath.isfinite(value):
                raise ValueError(f"ErrorBudget.{name} must be finite and nonnegative, got {value}")
            object.__setattr__(self, name, value)

    def total(self):
        """Sum of both parts."""
        return self.truncation + self.rounding

    def scale(self, factor):
        """Budget of ``factor * value`` given this budget for ``value``."""
        factor = abs(mpmath.mpf(factor))
        return ErrorBudget(self.truncation * factor, self.rounding * factor)

    def __add__(self, other):
        return ErrorBudget(self.truncation + other.truncation, self.rounding + other.rounding)


def to_mpf(value, ctx):
    r"""Convert ``value`` to an mpf at the working precision of ``ctx``.

    Strings are parsed at full working precision, so ``"0.50000000001"``
    keeps every digit of :math:`\sigma - 1/2`.
    """
    with ctx.workdps():
        if isinstance(value, str):
            return mpmath.mpf(value.strip())
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / value.denominator
        return +mpmath.mpf(value)


def zeta_real(s, ctx):
    r"""Riemann zeta function :math:`\zeta(s)` for real :math:`s > 1`.

    The value is produced by mpmath's zeta at a working precision raised so that
    the rounding on :math:`\zeta(s) \le 1 + 1/(s-1)` stays below the target.

    Args:
        s: real argument, :math:`s > 1`
        ctx (PrecisionContext): precision and target

    Returns:
        mpf: :math:`\zeta(s)`

    Raises:
        DomainError: if :math:`s \le 1`
        PrecisionOverflowError: if the required precision exceeds the cap
    """
    s = to_mpf(s, ctx)
    if s <= 1:
        raise DomainError(f"zeta_real requires s > 1, got s = {s}")
    with ctx.workdps():
        magnitude = 1 + 1 / (s - 1)
    wctx = ctx.for_magnitude(magnitude)
    with wctx.workdps():
        return +mp.zeta(s)


def bessel_j0(x, ctx):
    """Bessel function of the first kind of order zero.

    Args:
        x: finite real argument
        ctx (PrecisionContext): precision and target

    Returns:
        mpf: :math:`J_0(x)`
    """
    x = to_mpf(x, ctx)
    if not mpmath.isfinite(x):
        raise DomainError(f"bessel_j0 requires a finite argument, got {x}")
    with ctx.workdps():
        return +mp.besselj(0, x)


def _mcmahon_guess(k):
    # first terms of McMahon's expansion for the zeros of J0
    beta = (k - mpmath.mpf(1) / 4) * mp.pi
    return (
        beta
        + 1 / (8 * beta)
        - mpmath.mpf(31) / (384 * beta**3)
        + mpmath.mpf(3779) / (15360 * beta**5)
    )


def bessel_j0_zero(k, ctx):
    r"""The ``k``-th positive zero :math:`j_{0,k}` of :math:`J_0`.

    McMahon's asymptotic expansion supplies a guess within a few thousandths of
    the zero; the root is then polished by :func:`find_root` on a bracket of
    half-width 1/4, which contains exactly one zero since consecutive zeros are
    more than 3 apart.

    Args:
        k (int): index, ``k >= 1``
        ctx (PrecisionContext): precision and target

    Returns:
        mpf: :math:`j_{0,k}`
    """
    if int(k) != k or k < 1:
        raise DomainError(f"bessel_j0_zero requires a positive integer index, got {k}")
    with ctx.workdps():
        guess = _mcmahon_guess(int(k))
        quarter = mpmath.mpf(1) / 4
        lo, hi = guess - quarter, guess + quarter
    return find_root(lambda t: mp.besselj(0, t), lo, hi, ctx)


def integrate(f, a, b, ctx, points=None, method="tanh-sinh", maxdegree=None):
    """Adaptive quadrature of ``f`` over ``[a, b]``.

    The default tanh-sinh rule doubles its node count level by level and
    tolerates integrable endpoint singularities such as :math:`(1-t)^{-1/2}`.
    Gauss-Legendre is available for smooth integrands that are expensive to
    evaluate.

    Args:
        f (callable): integrand, evaluated at the context precision
        a, b: integration limits
        ctx (PrecisionContext): precision and target

    Keyword args:
        points (list): interior break points
        method (str): ``"tanh-sinh"`` or ``"gauss-legendre"``
        maxdegree (int): node cap passed on to mpmath

    Returns:
        tuple[mpf, ErrorBudget]: value and error budget

    Raises:
        QuadratureError: if the estimated error stays above the target at the node cap
    """
    if method not in QUADRATURE_METHODS:
        raise DomainError(f"Unknown quadrature method {method!r}; expected one of {QUADRATURE_METHODS}")
    with ctx.workdps():
        nodes = [to_mpf(a, ctx)] + [to_mpf(p, ctx) for p in (points or [])] + [to_mpf(b, ctx)]
        kwargs = {"method": method, "error": True}
        if maxdegree is not None:
            kwargs["maxdegree"] = maxdegree
        value, err = mp.quad(f, nodes, **kwargs)
        budget = ErrorBudget(truncation=abs(err), rounding=abs(value) * ctx.eps * len(nodes))
    if budget.total() > ctx.target_abs_error:
        raise QuadratureError(
            f"quadrature error estimate {mpmath.nstr(budget.total(), 5)} exceeds "
            f"target {mpmath.nstr(ctx.target_abs_error, 5)}",
            estimate=value,
            budget=budget,
        )
    return value, budget


def find_root(f, lo, hi, ctx):
    """Root of ``f`` inside the bracket ``[lo, hi]``.

    An Anderson-Bjorck regula falsi step (mpmath's ``anderson`` solver) keeps
    the bracket; if it fails to converge the search falls back to plain
    bisection.

    Args:
        f (callable): continuous function with ``f(lo) * f(hi) < 0``
        lo, hi: bracket
        ctx (PrecisionContext): precision and target

    Returns:
        mpf: the root

    Raises:
        BracketError: if ``f`` does not change sign on the bracket
    """
    with ctx.workdps():
        lo, hi = to_mpf(lo, ctx), to_mpf(hi, ctx)
        if lo > hi:
            lo, hi = hi, lo
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if mpmath.sign(flo) == mpmath.sign(fhi):
            raise BracketError(
                f"no sign change on [{mpmath.nstr(lo, 8)}, {mpmath.nstr(hi, 8)}]: "
                f"f(lo) = {mpmath.nstr(flo, 5)}, f(hi) = {mpmath.nstr(fhi, 5)}"
            )
        tol = ctx.target_abs_error
        try:
            root = mp.findroot(f, (lo, hi), solver="anderson", tol=tol, verify=False, maxsteps=400)
            if lo <= root <= hi:
                return +root
            log.debug("anderson left the bracket at %s, falling back to bisection", root)
        except (ValueError, ZeroDivisionError) as e:
            log.debug("anderson failed (%s), falling back to bisection", e)
        try:
            steps = int(math.log2(float((hi - lo) / tol))) + 10
            return +mp.findroot(f, (lo, hi), solver="bisect", tol=tol, verify=False, maxsteps=steps)
        except ValueError as e:
            raise ConvergenceError(f"root search on [{lo}, {hi}] failed: {e}") from e


def retry_with_escalation(func, ctx, factor=2):
    """Call ``func(ctx)``, doubling the precision while it reports cancellation.

    Args:
        func (callable): computation taking a :class:`PrecisionContext`
        ctx (PrecisionContext): starting precision

    Returns:
        whatever ``func`` returns

    Raises:
        PrecisionOverflowError: once the cap is reached
    """
    while True:
        try:
            return func(ctx)
        except CancellationDetected as e:
            log.debug("cancellation at %d digits: %s", ctx.working_digits, e)
            ctx = ctx.escalate(factor)
