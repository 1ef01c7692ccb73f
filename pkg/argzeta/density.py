"""
Densities
=========

**Module name:** :mod:`argzeta.density`

.. currentmodule:: argzeta.density

The densities :math:`d(\\sigma)`, :math:`d_-(\\sigma)`, :math:`d_+(\\sigma)` and
:math:`a_k(\\sigma)` computed from the characteristic function, and the
periodised density :math:`\\tilde\\rho`.

With :math:`m = 4\\ell/\\pi` and :math:`c = 4k + 2`,

.. math:: a_k(\\sigma) = 1 - \\frac{c}{m} - \\frac{2}{\\pi}\\sum_{n \\ge 1}
          \\frac{1}{n}\\,\\psi_\\sigma\\Bigl(\\frac{4n}{m}\\Bigr)\\sin\\frac{c\\pi n}{m}

is exact for :math:`\\sigma > 1` once :math:`m > \\max(2, 4L(\\sigma)/\\pi)`
(``exact-sum``). For :math:`\\sigma \\le 1` the support is unbounded and the
same sum is evaluated for :math:`m = 4, 8, 16, \\dots` until it settles
(``limit-sum``). :math:`d = a_0`, :math:`d_- = \\sum_k (-1)^k a_k` and
:math:`d_+ = 1 - d_-`.

Classes
-------

.. autosummary::
   DensityResult
   SumParams
   DensityOptions
   RhoSeries

Functions
---------

.. autosummary::
   density_d
   density_ak
   density_dminus
   density_dplus
   density_gap
   density_to_digits
   rho_tilde
   rho_tilde_mass
   rho_tilde_batch
   default_m
   truncation_index

Code details
~~~~~~~~~~~~
"""
import functools
import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mp

from .charfun import PsiEvaluator, decay_envelope
from .config import DEFAULT_KAPPA, DEFAULT_MAX_M, DEFAULT_MAX_SIEVE_LIMIT, DEFAULT_MIN_P0
from .exceptions import CancellationDetected, ConvergenceError, DomainError, InvariantViolation
from .numerics import ErrorBudget, PrecisionContext, integrate, retry_with_escalation, to_mpf
from .primes import sieve, support_length

log = logging.getLogger(__name__)

KINDS = ("d", "d_minus", "d_plus", "a_k", "d-d_minus")
METHODS = ("auto", "exact-sum", "limit-sum", "integral")

#: cap on the number of terms of any Fourier sum
MAX_TERMS = 10**7


@dataclass(frozen=True)
class DensityResult:
    """A density value with its error budget.

    Args:
        sigma: the abscissa :math:`\\sigma`
        kind (str): ``"d"``, ``"d_minus"``, ``"d_plus"``, ``"a_k"`` or ``"d-d_minus"``
        value (mpf): the density
        budget (ErrorBudget): truncation and rounding estimate
        method (str): ``"exact-sum"``, ``"limit-sum"``, ``"integral"`` or ``"support"``

    Keyword args:
        k (int): index for ``a_k``
        m: grid parameter of the final sum
        diagnostics (dict): method details (terms, successive limit values)
    """

    sigma: object
    kind: str
    value: object
    budget: ErrorBudget
    method: str
    k: int = None
    m: object = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def error(self):
        """mpf: total of the budget"""
        return self.budget.total()

    @property
    def label(self):
        """str: ``kind`` with the index filled in for ``a_k``"""
        return f"a_{self.k}" if self.kind == "a_k" else self.kind

    def check(self):
        """Raise :class:`~.InvariantViolation` unless the value lies in [0, 1] within budget."""
        if self.value < -self.error or self.value > 1 + self.error:
            raise InvariantViolation(
                f"{self.label}({mpmath.nstr(self.sigma, 12)}) = {mpmath.nstr(self.value, 12)} "
                f"lies outside [0, 1] beyond its error {mpmath.nstr(self.error, 3)}"
            )
        return self


@dataclass(frozen=True)
class SumParams:
    """Grid parameter of the Fourier sum.

    Args:
        m: :math:`m = 4\\ell/\\pi`, greater than 2; kept as an exact fraction
        nterms (int): fixed number of terms; chosen from the decay envelope if omitted
    """

    m: object
    nterms: int = None

    def __post_init__(self):
        m = self.m if isinstance(self.m, Fraction) else Fraction(str(self.m))
        if m <= 2:
            raise DomainError(f"m must exceed 2, got m = {m}")
        if self.nterms is not None and self.nterms < 1:
            raise DomainError(f"nterms must be positive, got {self.nterms}")
        object.__setattr__(self, "m", m)


@dataclass(frozen=True)
class DensityOptions:
    """Knobs forwarded to :class:`~.PsiEvaluator` and the limit sum."""

    kappa: float = DEFAULT_KAPPA
    min_p0: int = DEFAULT_MIN_P0
    engine: str = "hyp2f1"
    max_m: int = DEFAULT_MAX_M
    max_sieve_limit: int = DEFAULT_MAX_SIEVE_LIMIT

    @classmethod
    def from_settings(cls, settings):
        """Options taken from a :class:`~.Settings` instance."""
        return cls(
            kappa=settings.kappa,
            min_p0=settings.min_p0,
            engine=settings.series_engine,
            max_m=settings.max_m,
            max_sieve_limit=settings.max_sieve_limit,
        )

    def evaluator(self, sigma, ctx):
        """A fresh :class:`~.PsiEvaluator` with these options."""
        return PsiEvaluator(
            sigma,
            ctx,
            kappa=self.kappa,
            min_p0=self.min_p0,
            engine=self.engine,
            max_sieve_limit=self.max_sieve_limit,
        )


def default_m(length):
    r"""Default grid parameter for support half-width ``length``.

    4 when :math:`L < \pi`, otherwise the smallest even integer above
    :math:`4L/\pi + 2`.
    """
    length = mpmath.mpf(length)
    if length < mp.pi:
        return Fraction(4)
    m = int(mpmath.floor(4 * length / mp.pi + 2)) + 1
    return Fraction(m + (m % 2))


def _log_tail_sums(log_terms):
    # log of sum_{j >= i} exp(log_terms[j]) for every i
    return np.logaddexp.accumulate(log_terms[::-1])[::-1]


def _truncation(sigma, step, target, power, scale, table=None, n_min=1):
    """Smallest ``N >= n_min`` with ``scale * sum_{n>N} env(n step) n^-power <= target``.

    The envelope is tabulated on doubling ranges; the part beyond the range is
    extrapolated geometrically from the last two terms.
    """
    step = float(step)
    log_target = float(mpmath.log(mpmath.mpf(target) / scale))
    nhi = max(2 * n_min, 32)
    while nhi <= MAX_TERMS:
        n = np.arange(1, nhi + 1, dtype=np.float64)
        log_terms = decay_envelope(sigma, n * step, table=table, logscale=True) - power * np.log(n)
        q = log_terms[-1] - log_terms[-2]
        if q < 0:
            # geometric continuation beyond the tabulated range
            beyond = log_terms[-1] + q - math.log(-math.expm1(q))
            # tails[N] bounds the sum over n > N
            tails = np.logaddexp(np.append(_log_tail_sums(log_terms), -np.inf), beyond)
            ok = np.nonzero(tails[n_min:nhi] <= log_target)[0]
            if ok.size:
                nterms = int(ok[0] + n_min)
                return nterms, scale * math.exp(tails[nterms])
        nhi *= 2
    raise ConvergenceError(
        f"decay envelope of psi at sigma = {sigma} does not reach {target} within {MAX_TERMS} terms"
    )


def truncation_index(sigma, m, target, table=None):
    r"""Number of terms ``N`` of the m-form sum with tail below ``target``.

    The tail is bounded by :math:`\frac{2}{\pi}\sum_{n > N} E(4n/m)/n` with
    :math:`E` the :func:`~.decay_envelope`.

    Returns:
        tuple[int, float]: ``N`` and the tail bound
    """
    m = m if isinstance(m, Fraction) else Fraction(str(m))
    return _truncation(float(sigma), 4 / float(m), target, power=1, scale=2 / math.pi, table=table)


class _PsiGrid:
    # psi values keyed by exact abscissa, shared across m and c
    def __init__(self, evaluator):
        self.evaluator = evaluator
        self.values = {}
        self.x_plan = None

    def plan(self, x_max):
        if self.x_plan is None or x_max > self.x_plan:
            self.x_plan = x_max
        return self.x_plan

    def get(self, x):
        value = self.values.get(x)
        if value is None:
            value = self.values[x] = self.evaluator.psi(x, x_max=self.x_plan)
        return value

    def audit(self):
        # the farthest computed value must respect the decay envelope
        if not self.values:
            return
        x = max(self.values)
        bound = decay_envelope(self.evaluator.sigma, float(x))
        value = abs(float(self.values[x]))
        if value > bound * (1 + 1e-9) + float(self.evaluator.ctx.target_abs_error):
            msg = f"|psi({float(x):.6g})| = {value:.3e} exceeds the decay envelope {bound:.3e}"
            log.warning(msg)
            warnings.warn(msg, RuntimeWarning)


def _combine(terms, cs, m, ctx):
    # the sums at the precision of ctx; raises when the term rounding swamps the target
    limit = ctx.target_abs_error / 8
    with ctx.workdps():
        out = {}
        for c in cs:
            parts = [value * mp.sinpi(to_mpf(phases[c], ctx)) / n for n, value, phases in terms if c in phases]
            rounding = len(parts) * max((abs(p) for p in parts), default=0) * ctx.eps
            if rounding > limit:
                raise CancellationDetected(
                    f"{len(parts)} terms of the m = {m} sum leave rounding {mpmath.nstr(rounding, 3)} "
                    f"at {ctx.working_digits} digits"
                )
            out[c] = 1 - to_mpf(Fraction(c) / m, ctx) - 2 / mp.pi * mp.fsum(parts)
    return out


def _m_form(grid, cs, m, nterms, ctx):
    """The sums ``1 - c/m - (2/pi) sum_n psi(4n/m) sin(c pi n/m)/n`` for every ``c`` in ``cs``."""
    grid.plan(Fraction(4 * nterms) / m)
    terms = []
    for n in range(1, nterms + 1):
        phases = {c: Fraction(c * n) / m for c in cs if (c * n) % m}
        if phases:
            terms.append((n, grid.get(Fraction(4 * n) / m), phases))
    return retry_with_escalation(lambda c: _combine(terms, cs, m, c), ctx)


def _harmonic(n):
    return math.log(n) + 1 if n > 1 else 1.0


def _sum_targets(sigma, m, target, table):
    # half the target for truncation, a quarter for psi errors weighted by the harmonic sum
    nterms, tail = truncation_index(sigma, m, target / 2, table=table)
    psi_target = mpmath.mpf(target) * mp.pi / (8 * _harmonic(nterms))
    return nterms, tail, psi_target


def _envelope_table(sigma, x_max):
    return sieve(max(2, int(math.ceil((2 * x_max) ** (1 / float(sigma)))) + 1))


def _exact_sum(sigma, ks, ctx, options, m, nterms=None):
    s = to_mpf(sigma, ctx)
    target = ctx.target_abs_error
    cs = [4 * k + 2 for k in ks]
    table = None
    if nterms is None:
        table = _envelope_table(s, 64.0)
        nterms, tail, psi_target = _sum_targets(s, m, target, table)
    else:
        tail = 0.0
        psi_target = mpmath.mpf(target) * mp.pi / (8 * _harmonic(nterms))
    grid = _PsiGrid(options.evaluator(sigma, ctx.with_target(psi_target)))
    values = _m_form(grid, cs, m, nterms, ctx)
    grid.audit()
    budget = ErrorBudget(truncation=tail, rounding=target / 4)
    log.debug("exact sum sigma=%s m=%s: %d terms", mpmath.nstr(s, 12), m, nterms)
    return {k: (values[c], budget) for k, c in zip(ks, cs)}, {"m": m, "nterms": nterms}


def _limit_sum(sigma, ks, ctx, options):
    s = to_mpf(sigma, ctx)
    target = ctx.target_abs_error
    cs = [4 * k + 2 for k in ks]
    m = Fraction(4)
    while m <= 4 * max(ks) + 2:
        m *= 2
    # truncation depends on the abscissa only, so the grid planned for the first m serves all
    table = _envelope_table(s, 64.0)
    nterms, _ = truncation_index(s, m, target / 4, table=table)
    x_first = 4 * nterms / float(m)
    psi_target = mpmath.mpf(target) * mp.pi / (16 * _harmonic(int(x_first * options.max_m / 4) + 1))
    grid = _PsiGrid(options.evaluator(sigma, ctx.with_target(psi_target)))
    history = []
    while True:
        nterms, tail = truncation_index(s, m, target / 4, table=table)
        values = _m_form(grid, cs, m, nterms, ctx)
        history.append((m, values))
        log.debug(
            "limit sum sigma=%s m=%s: %d terms, %s",
            mpmath.nstr(s, 12),
            m,
            nterms,
            ", ".join(f"a_{k}={mpmath.nstr(values[c], 15)}" for k, c in zip(ks, cs)),
        )
        if len(history) >= 3:
            recent = [h[1] for h in history[-3:]]
            spread = max(max(r[c] for r in recent) - min(r[c] for r in recent) for c in cs)
            if spread <= target / 2:
                grid.audit()
                budget = ErrorBudget(truncation=mpmath.mpf(tail) + spread, rounding=target / 8)
                diagnostics = {"m": m, "nterms": nterms, "history": [(h[0], h[1]) for h in history]}
                return {k: (values[c], budget) for k, c in zip(ks, cs)}, diagnostics
        m *= 2
        if m > options.max_m:
            raise ConvergenceError(
                f"limit sum at sigma = {mpmath.nstr(s, 12)} did not settle by m = {options.max_m}",
                last_value=values[cs[0]],
                diagnostics={"history": history},
            )


def _integral(sigma, ctx, options):
    s = to_mpf(sigma, ctx)
    target = ctx.target_abs_error
    # with m = 4 the sum abscissae are the integers, so the sum tail bounds the integral tail
    nterms, tail = truncation_index(s, 4, target / 4)
    x_end = nterms + 1
    evaluator = options.evaluator(sigma, ctx.with_target(target / (8 * (2 + math.log(x_end)))))

    def integrand(x):
        return evaluator.psi(x, x_max=x_end) * mp.sin(mp.pi * x / 2) / x

    points = list(range(2, x_end, 2))
    value, qbudget = integrate(integrand, 0, x_end, ctx.with_target(target / 4), points=points, method="gauss-legendre")
    with ctx.workdps():
        result = 1 - 2 / mp.pi * value
    budget = qbudget.scale(2 / mp.pi) + ErrorBudget(truncation=tail, rounding=target / 8)
    return result, budget, {"x_end": x_end}


@functools.lru_cache(maxsize=128)
def _support_at(sigma_key, max_digits):
    return support_length(sigma_key, PrecisionContext.from_digits(15, max_digits=max_digits))


def _support(sigma, ctx):
    s = to_mpf(sigma, ctx)
    if s <= 1:
        return None
    return _support_at(mpmath.nstr(s, 30), ctx.max_digits)


def _validate(sigma, ctx):
    s = to_mpf(sigma, ctx)
    if not s > mpmath.mpf(1) / 2:
        raise DomainError(f"densities require sigma > 1/2, got sigma = {s}")
    return s


def _resolve_method(s, method, params):
    if method not in METHODS:
        raise DomainError(f"Unknown method {method!r}; expected one of {METHODS}")
    if method == "auto":
        return "exact-sum" if s > 1 else "limit-sum"
    if method == "exact-sum" and s <= 1:
        raise DomainError(f"exact-sum requires sigma > 1, got sigma = {s}")
    return method


def _compute_aks(sigma, ks, ctx, method="auto", params=None, options=None):
    """a_k for every k in ``ks`` as ``{k: DensityResult}``, sharing one psi grid."""
    options = options or DensityOptions()
    s = _validate(sigma, ctx)
    method = _resolve_method(s, method, params)
    length = _support(sigma, ctx)
    results = {}
    pending = list(ks)
    if length is not None and params is None:
        for k in ks:
            if length <= (2 * k + 1) * mp.pi / 2:
                results[k] = DensityResult(s, "a_k", mpmath.mpf(0), ErrorBudget(), "support", k=k)
        pending = [k for k in ks if k not in results]
    if not pending:
        return results
    if method == "exact-sum":
        m = params.m if params else default_m(length)
        with ctx.workdps():
            lower = max(mpmath.mpf(2), 4 * length / mp.pi)
        if to_mpf(m, ctx) <= lower:
            raise DomainError(f"m = {m} must exceed max(2, 4 L/pi) = {mpmath.nstr(4 * length / mp.pi, 8)}")
        if Fraction(m) <= 4 * max(pending) + 2:
            raise DomainError(f"m = {m} aliases a_{max(pending)}; it must exceed 4k + 2 = {4 * max(pending) + 2}")
        values, diag = _exact_sum(sigma, pending, ctx, options, m, params.nterms if params else None)
    elif method == "limit-sum":
        values, diag = _limit_sum(sigma, pending, ctx, options)
    else:
        if pending != [0]:
            raise DomainError("the integral method computes d only")
        value, budget, diag = _integral(sigma, ctx, options)
        values = {0: (value, budget)}
    for k in pending:
        value, budget = values[k]
        results[k] = DensityResult(s, "a_k", value, budget, method, k=k, m=diag.get("m"), diagnostics=diag).check()
    return results


def density_ak(sigma, k, ctx, params=None, method="auto", options=None):
    r""":math:`a_k(\sigma)`, the density of :math:`|\arg\zeta| > (2k+1)\pi/2`.

    Args:
        sigma: :math:`\sigma > 1/2`; pass strings to keep every digit
        k (int): nonnegative index
        ctx (PrecisionContext): precision and absolute target

    Keyword args:
        params (SumParams): fixed grid; the sum is then evaluated even where
            the support forces zero
        method (str): ``"auto"``, ``"exact-sum"`` or ``"limit-sum"``
        options (DensityOptions): evaluator knobs

    Returns:
        DensityResult
    """
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k}")
    return _compute_aks(sigma, [int(k)], ctx, method=method, params=params, options=options)[int(k)]


def density_d(sigma, ctx, method="auto", params=None, options=None):
    r""":math:`d(\sigma)`, the density of :math:`|\arg\zeta(\sigma+it)| > \pi/2`.

    ``method="integral"`` evaluates
    :math:`1 - \frac{2}{\pi}\int_0^\infty \psi_\sigma(x)\sin(\pi x/2)\,dx/x`
    by Gauss-Legendre quadrature as an independent cross-check.
    """
    result = _compute_aks(sigma, [0], ctx, method=method, params=params, options=options)[0]
    return DensityResult(result.sigma, "d", result.value, result.budget, result.method, m=result.m,
                         diagnostics=result.diagnostics)


def _alternating(sigma, ctx, first, options, params=None, method="auto"):
    # sum_{k >= first} (-1)^(k - first) a_k, each a_k to a geometrically shrinking share of the target
    target = ctx.target_abs_error
    total = mpmath.mpf(0)
    budget = ErrorBudget()
    methods = set()
    k = first
    batch = 2
    while True:
        ks = list(range(k, k + batch))
        sub = ctx.with_target(target / 2 ** (k - first + 3))
        results = _compute_aks(sigma, ks, sub, method=method, params=params, options=options)
        for kk in ks:
            r = results[kk]
            methods.add(r.method)
            if r.value + r.error < target / 10:
                budget = budget + ErrorBudget(truncation=r.value + r.error)
                return total, budget, "/".join(sorted(methods))
            with ctx.workdps():
                total += (-1) ** (kk - first) * r.value
            budget = budget + r.budget
        k += batch
        if k > 64:
            raise ConvergenceError(f"a_k did not fall below {target / 10} by k = {k}", last_value=total)


def density_dminus(sigma, ctx, params=None, method="auto", options=None):
    r""":math:`d_-(\sigma) = \sum_k (-1)^k a_k`, the density of :math:`\Re\zeta < 0`."""
    s = _validate(sigma, ctx)
    total, budget, used = _alternating(sigma, ctx, 0, options or DensityOptions(), params, method)
    return DensityResult(s, "d_minus", total, budget, used).check()


def density_dplus(sigma, ctx, params=None, method="auto", options=None):
    r""":math:`d_+(\sigma) = 1 - d_-(\sigma)`."""
    minus = density_dminus(sigma, ctx, params=params, method=method, options=options)
    with ctx.workdps():
        return DensityResult(minus.sigma, "d_plus", 1 - minus.value, minus.budget, minus.method).check()


def density_gap(sigma, ctx, params=None, method="auto", options=None):
    r""":math:`d(\sigma) - d_-(\sigma) = a_1 - a_2 + a_3 - \dots`, computed directly."""
    s = _validate(sigma, ctx)
    total, budget, used = _alternating(sigma, ctx, 1, options or DensityOptions(), params, method)
    return DensityResult(s, "d-d_minus", total, budget, used).check()


_DRIVERS = {
    "d": lambda sigma, ctx, k, **kw: density_d(sigma, ctx, **kw),
    "d_minus": lambda sigma, ctx, k, **kw: density_dminus(sigma, ctx, **kw),
    "d_plus": lambda sigma, ctx, k, **kw: density_dplus(sigma, ctx, **kw),
    "a_k": lambda sigma, ctx, k, **kw: density_ak(sigma, k, ctx, **kw),
    "d-d_minus": lambda sigma, ctx, k, **kw: density_gap(sigma, ctx, **kw),
}


def density_to_digits(kind, sigma, digits, ctx, k=0, max_rounds=6, **kwargs):
    """Compute a density to ``digits`` significant digits.

    The absolute target starts at ``ctx.target_abs_error`` and is tightened to
    a tenth of :math:`|value| 10^{-digits}` until the budget certifies the
    requested relative accuracy. Values forced to zero by the support are
    returned at once.

    Returns:
        DensityResult
    """
    if kind not in _DRIVERS:
        raise DomainError(f"Unknown density kind {kind!r}; expected one of {KINDS}")
    scale = mpmath.mpf(10) ** -int(digits)
    for _ in range(max_rounds):
        result = _DRIVERS[kind](sigma, ctx, k, **kwargs)
        if result.method == "support" or result.value == 0 and result.error == 0:
            return result
        magnitude = abs(result.value)
        if result.error <= magnitude * scale:
            return result
        if magnitude > result.error:
            new_target = magnitude * scale / 10
        else:
            new_target = ctx.target_abs_error * mpmath.mpf(10) ** -10
        log.info(
            "%s(%s): error %s above %d digits, target -> %s",
            kind,
            sigma,
            mpmath.nstr(result.error, 3),
            digits,
            mpmath.nstr(new_target, 3),
        )
        ctx = ctx.with_target(new_target)
    raise ConvergenceError(f"{kind}({sigma}) not certified to {digits} digits after {max_rounds} rounds",
                           last_value=result.value)


class RhoSeries:
    r"""The periodised density :math:`\tilde\rho(x) = \frac{1}{2\ell} + \frac{1}{\ell}\sum_n \psi_\sigma(\pi n/\ell)\cos(\pi n x/\ell)`.

    The values :math:`\psi_\sigma(\pi n/\ell)` are computed once and shared by
    every abscissa. For :math:`\sigma > 1` and :math:`\ell > L(\sigma)` the
    series is the density of the argument distribution on :math:`[-\ell, \ell]`.

    Args:
        sigma: :math:`\sigma > 1/2`
        ell: half period, positive
        ctx (PrecisionContext): precision and absolute target

    Keyword args:
        options (DensityOptions): evaluator knobs
    """

    def __init__(self, sigma, ell, ctx, options=None):
        self.sigma = _validate(sigma, ctx)
        with ctx.workdps():
            self.ell = to_mpf(ell, ctx)
        if not self.ell > 0:
            raise DomainError(f"ell must be positive, got {self.ell}")
        length = _support(sigma, ctx)
        if length is None or self.ell <= length:
            log.info("rho_tilde at sigma = %s, ell = %s is an approximation", sigma, ell)
        self.ctx = ctx
        options = options or DensityOptions()
        step = float(mp.pi / self.ell)
        target = ctx.target_abs_error
        table = _envelope_table(self.sigma, 64.0)
        # value sums need weight 1/ell, mass sums 2/(pi n)
        n_value, self.value_tail = _truncation(float(self.sigma), step, target / 2, 0, float(1 / self.ell), table)
        n_mass, self.mass_tail = _truncation(float(self.sigma), step, target / 2, 1, 2 / math.pi, table)
        self.nterms = max(n_value, n_mass)
        evaluator = options.evaluator(sigma, ctx.with_target(target / (4 * self.nterms * max(1, 1 / float(self.ell)))))
        with ctx.workdps():
            xs = [mp.pi * n / self.ell for n in range(1, self.nterms + 1)]
        self.psi_values = evaluator.psi_batch(xs)
        log.debug("rho series sigma=%s ell=%s: %d terms", sigma, ell, self.nterms)

    def value(self, x):
        r""":math:`\tilde\rho(x)`."""
        ctx = self.ctx
        with ctx.workdps():
            x = to_mpf(x, ctx)
            w = x / self.ell
            return 1 / (2 * self.ell) + mp.fsum(
                v * mp.cospi(n * w) for n, v in enumerate(self.psi_values, start=1)
            ) / self.ell

    def values(self, xs):
        """:math:`\\tilde\\rho` at every abscissa of ``xs``."""
        return [self.value(x) for x in xs]

    def mass(self, a, b):
        r""":math:`\int_a^b \tilde\rho`, integrated term by term."""
        ctx = self.ctx
        with ctx.workdps():
            a, b = to_mpf(a, ctx), to_mpf(b, ctx)
            wa, wb = a / self.ell, b / self.ell
            return (b - a) / (2 * self.ell) + mp.fsum(
                v * (mp.sinpi(n * wb) - mp.sinpi(n * wa)) / (mp.pi * n)
                for n, v in enumerate(self.psi_values, start=1)
            )


def rho_tilde(sigma, x, ell, ctx, options=None):
    r""":math:`\tilde\rho(x)` for one abscissa."""
    return RhoSeries(sigma, ell, ctx, options=options).value(x)


def rho_tilde_batch(sigma, xs, ell, ctx, options=None):
    r""":math:`\tilde\rho` at several abscissae, sharing the :math:`\psi` values."""
    return RhoSeries(sigma, ell, ctx, options=options).values(xs)


def rho_tilde_mass(sigma, a, b, ell, ctx, options=None):
    r""":math:`\int_a^b \tilde\rho(x)\,dx`."""
    return RhoSeries(sigma, ell, ctx, options=options).mass(a, b)
