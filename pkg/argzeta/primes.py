"""
Primes and the prime zeta function
==================================

**Module name:** :mod:`argzeta.primes`

.. currentmodule:: argzeta.primes

Prime enumeration, the prime zeta function :math:`P(s) = \\sum_p p^{-s}`
evaluated through Moebius inversion of :math:`\\log\\zeta`, partial prime sums,
and the support half-width :math:`L(\\sigma) = \\sum_p \\arcsin(p^{-\\sigma})`
together with its roots :math:`\\sigma_0` and :math:`\\sigma_1`.

Classes
-------

.. autosummary::
   PrimeTable
   PrimeZetaCache

Functions
---------

.. autosummary::
   sieve
   mobius
   prime_zeta
   partial_prime_sum
   direct_prime_sum
   prime_sum_tail_bound
   support_length
   partial_arcsin_sum
   arcsin_tail
   sigma0
   sigma1

Code details
~~~~~~~~~~~~
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp

from .config import DEFAULT_MAX_SIEVE_LIMIT
from .exceptions import CapacityError, DomainError, InvariantViolation
from .numerics import find_root, to_mpf, zeta_real

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to ``limit`` in ascending order.

    Args:
        limit (int): sieve limit
        primes (array[int]): ascending primes ``<= limit``
    """

    limit: int
    primes: np.ndarray

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def count(self, p0):
        """Number of primes ``<= p0``."""
        return int(np.searchsorted(self.primes, p0, side="right"))

    def require(self, p0):
        """Raise :class:`~.CapacityError` unless the table reaches ``p0``."""
        if p0 > self.limit:
            raise CapacityError(f"prime table reaches {self.limit}, but p0 = {p0} was requested")

    def upto(self, p0):
        """Primes ``<= p0`` as an array view."""
        self.require(p0)
        return self.primes[: self.count(p0)]

    def extended(self, limit, max_limit=DEFAULT_MAX_SIEVE_LIMIT):
        """This table if it already reaches ``limit``, otherwise a new sieve."""
        if limit <= self.limit:
            return self
        return sieve(limit, max_limit=max_limit)


def sieve(limit, max_limit=DEFAULT_MAX_SIEVE_LIMIT):
    """Sieve of Eratosthenes on a numpy boolean array.

    Args:
        limit (int): largest candidate, ``limit >= 2``

    Keyword args:
        max_limit (int): memory cap on ``limit``

    Returns:
        PrimeTable: all primes ``<= limit``

    Raises:
        DomainError: if ``limit < 2``
        CapacityError: if ``limit`` exceeds ``max_limit``
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be at least 2, got {limit}")
    if limit > max_limit:
        raise CapacityError(f"sieve limit {limit} exceeds the configured cap {max_limit}")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[i]:
            is_prime[i * i :: 2 * i] = False
    primes = np.flatnonzero(is_prime).astype(np.int64)
    log.debug("sieved %d primes up to %d", len(primes), limit)
    return PrimeTable(limit, primes)


def mobius(r):
    """Moebius function by trial division."""
    r = int(r)
    if r < 1:
        raise DomainError(f"mobius is defined for positive integers, got {r}")
    result = 1
    d = 2
    while d * d <= r:
        if r % d == 0:
            r //= d
            if r % d == 0:
                return 0
            result = -result
        d += 1
    if r > 1:
        result = -result
    return result


def prime_zeta(s, ctx):
    r"""Prime zeta function :math:`P(s) = \sum_{r \ge 1} \mu(r) \log\zeta(rs) / r`.

    The Moebius series is cut at the first :math:`r` where the bound
    :math:`|\log\zeta(rs)| < 2^{1-rs}` on every remaining term falls below a
    tenth of the target.

    Args:
        s: real, :math:`s > 1`
        ctx (PrecisionContext): precision and target

    Returns:
        mpf: :math:`P(s)`
    """
    s = to_mpf(s, ctx)
    if s <= 1:
        raise DomainError(f"prime_zeta requires s > 1, got s = {s}")
    with ctx.workdps():
        magnitude = abs(mp.log(1 + 1 / (s - 1))) + 1
    wctx = ctx.for_magnitude(magnitude)
    with wctx.workdps():
        eps = wctx.target_abs_error / 10
        terms = []
        r = 1
        while True:
            if r > 1 and mp.power(2, 1 - r * s) < eps * r:
                break
            mu = mobius(r)
            if mu:
                terms.append(mu * mp.log(zeta_real(r * s, wctx)) / r)
            r += 1
        log.debug("prime_zeta(%s): %d Moebius terms", mpmath.nstr(s, 10), r - 1)
        return mp.fsum(terms)


def partial_prime_sum(s, p0, table, ctx=None):
    r"""Finite sum :math:`\sum_{p \le p_0} p^{-s}` over the primes of ``table``.

    Args:
        s: real exponent
        p0 (int): upper limit
        table (PrimeTable): primes, must reach ``p0``

    Keyword args:
        ctx (PrecisionContext): precision; the current mpmath precision if omitted

    Returns:
        mpf: the partial sum, zero when no prime is ``<= p0``
    """
    table.require(p0)
    primes = table.upto(p0)
    if ctx is None:
        s = mpmath.mpf(s)
        return mp.fsum(mp.power(int(p), -s) for p in primes)
    s = to_mpf(s, ctx)
    with ctx.workdps():
        return mp.fsum(mp.power(int(p), -s) for p in primes)


def direct_prime_sum(s, limit, table=None):
    r"""Double precision :math:`\sum_{p \le limit} p^{-s}`, an independent oracle."""
    table = table or sieve(limit)
    primes = table.upto(limit).astype(np.float64)
    return float(np.sum(np.exp(-float(s) * np.log(primes))[::-1]))


def prime_sum_tail_bound(s, p0):
    r"""Bound :math:`\sum_{p > p_0} p^{-s} \le p_0^{1-s}/(s-1)` for :math:`s > 1`."""
    s = mpmath.mpf(s)
    if s <= 1:
        raise DomainError(f"tail bound requires s > 1, got s = {s}")
    return mpmath.power(max(int(p0), 1), 1 - s) / (s - 1)


def _arcsin_coefficients():
    # c_k = (2k)! / (4^k k!^2 (2k+1)) from the arcsine Taylor series
    central = mpmath.mpf(1)
    k = 0
    while True:
        yield k, central / (2 * k + 1)
        k += 1
        central = central * (2 * k - 1) / (2 * k)


def support_length(sigma, ctx):
    r"""Support half-width :math:`L(\sigma) = \sum_p \arcsin(p^{-\sigma})`.

    Expanding the arcsine gives :math:`L(\sigma) = \sum_k c_k P((2k+1)\sigma)`.
    The series stops once the bound
    :math:`c_{k} 2^{-(2k+1)\sigma}(1 + 2/((2k+1)\sigma - 1)) / (1 - 2^{-2\sigma})`
    on the remaining terms drops below a tenth of the target.

    Args:
        sigma: real, :math:`\sigma > 1`
        ctx (PrecisionContext): precision and target

    Returns:
        mpf: :math:`L(\sigma)`
    """
    sigma = to_mpf(sigma, ctx)
    if sigma <= 1:
        raise DomainError(f"support_length requires sigma > 1, got sigma = {sigma}")
    with ctx.workdps():
        leading = mp.log(1 + 1 / (sigma - 1)) + 1
    wctx = ctx.for_magnitude(leading)
    with wctx.workdps():
        eps = wctx.target_abs_error / 10
        ratio = 1 / (1 - mp.power(2, -2 * sigma))
        total = mpmath.mpf(0)
        for k, ck in _arcsin_coefficients():
            s = (2 * k + 1) * sigma
            bound = ck * mp.power(2, -s) * (1 + 2 / (s - 1)) * ratio
            if k > 0 and bound < eps:
                break
            total += ck * prime_zeta(s, wctx)
        log.debug("support_length(%s): %d arcsine terms", mpmath.nstr(sigma, 10), k)
        return +total


def partial_arcsin_sum(sigma, cutoff, table=None, ctx=None):
    r""":math:`\sum_{p \le cutoff} \arcsin(p^{-\sigma})`; double precision without ``ctx``."""
    table = table or sieve(max(int(cutoff), 2))
    primes = table.upto(cutoff)
    if ctx is None:
        return float(np.sum(np.arcsin(np.power(primes.astype(np.float64), -float(sigma)))[::-1]))
    sigma = to_mpf(sigma, ctx)
    with ctx.workdps():
        return mp.fsum(mp.asin(mp.power(int(p), -sigma)) for p in primes)


def arcsin_tail(sigma, cutoff, ctx, table=None):
    r""":math:`\sum_{p > cutoff} \arcsin(p^{-\sigma})` for :math:`\sigma > 1`."""
    total = support_length(sigma, ctx)
    return total - partial_arcsin_sum(sigma, cutoff, table=table, ctx=ctx)


def sigma0(ctx):
    r"""Root :math:`\sigma_0 \approx 1.19234` of :math:`L(\sigma) = \pi/2`."""
    with ctx.workdps():
        target = mp.pi / 2
    return find_root(lambda s: support_length(s, ctx) - target, "1.1", "1.3", ctx)


def sigma1(ctx):
    r"""Root :math:`\sigma_1 \approx 1.0068` of :math:`L(\sigma) = 3\pi/2`.

    :math:`L` diverges at 1, so the bracket starts at 1.001.
    """
    with ctx.workdps():
        target = 3 * mp.pi / 2
    return find_root(lambda s: support_length(s, ctx) - target, "1.001", "1.1", ctx)


class PrimeZetaCache:
    r"""Memoised :math:`P(2n\sigma)` and :math:`\sum_{p \le p_0} p^{-2n\sigma}` for one :math:`(\sigma, p_0)`.

    Entries are filled on demand and recomputed when a caller asks for more
    working digits than an entry was stored with. The cache has a single owner
    while it is being filled.

    Args:
        sigma: real, :math:`\sigma > 1/2`
        p0 (int): cut between the explicit product and the tail
        table (PrimeTable): primes reaching ``p0``
    """

    def __init__(self, sigma, p0, table):
        self.sigma = sigma
        self.p0 = int(p0)
        table.require(self.p0)
        self.table = table
        self.values = {}

    def get(self, n, ctx):
        r"""Pair :math:`(P(2n\sigma), \sum_{p \le p_0} p^{-2n\sigma})` at the precision of ``ctx``."""
        stored = self.values.get(n)
        if stored is not None and stored[0] >= ctx.working_digits:
            return stored[1], stored[2]
        with ctx.workdps():
            s = 2 * n * to_mpf(self.sigma, ctx)
        if s <= 1:
            raise DomainError(f"P(2n sigma) needs 2n sigma > 1, got {s}")
        full = prime_zeta(s, ctx)
        partial = partial_prime_sum(s, self.p0, self.table, ctx)
        if partial > full + ctx.target_abs_error:
            raise InvariantViolation(
                f"partial prime sum exceeds P({mpmath.nstr(s, 10)}) for p0 = {self.p0}"
            )
        self.values[n] = (ctx.working_digits, full, partial)
        return full, partial

    def tail(self, n, ctx):
        r""":math:`P(2n\sigma) - \sum_{p \le p_0} p^{-2n\sigma}`, never negative."""
        full, partial = self.get(n, ctx)
        with ctx.workdps():
            return max(full - partial, mpmath.mpf(0))
