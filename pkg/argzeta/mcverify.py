"""
Monte Carlo oracle
==================

**Module name:** :mod:`argzeta.mcverify`

.. currentmodule:: argzeta.mcverify

Direct sampling of the random variable

.. math:: \\operatorname{Im} S = -\\sum_{p \\le p_c} \\arctan\\frac{\\sin\\theta_p}{p^\\sigma - \\cos\\theta_p}

with independent uniform angles :math:`\\theta_p`, used to cross-check the
analytic densities and the periodised density :math:`\\tilde\\rho`.

Every prime draws its angles from its own numpy substream seeded with
``[seed, prime index]``, so raising the cutoff never changes the angles of the
primes already present. Primes are reduced in fixed blocks, and the result does
not depend on the number of worker processes.

Code details
~~~~~~~~~~~~
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
from scipy import stats

from .config import Settings
from .density import DensityOptions, RhoSeries
from .exceptions import DomainError
from .numerics import PrecisionContext, to_mpf
from .primes import arcsin_tail, partial_prime_sum, prime_zeta, sieve, support_length

log = logging.getLogger(__name__)

BLOCK_PRIMES = 64
"""int: primes reduced together before block partial sums are added"""

TAIL_CONFIDENCE = 1e-9
"""float: failure probability allowed for the Hoeffding tail bound"""

CHI2_LEVEL = 0.999
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class McConfig:
    """Parameters of one Monte Carlo run.

    Args:
        sigma (float): :math:`\\sigma > 1/2`
        samples (int): number of draws of :math:`\\operatorname{Im} S`
        prime_cutoff (int): largest prime in the truncated sum
        seed (int): base seed of the per-prime substreams
        workers (int): worker processes for :func:`draw_samples`
    """

    sigma: float
    samples: int = 10**5
    prime_cutoff: int = 10**4
    seed: int = 2012
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        if not self.sigma > 0.5:
            raise DomainError(f"Monte Carlo needs sigma > 1/2, got {self.sigma}")
        if int(self.samples) < 1:
            raise DomainError(f"samples must be positive, got {self.samples}")
        if int(self.prime_cutoff) < 2:
            raise DomainError(f"prime_cutoff must be at least 2, got {self.prime_cutoff}")
        if int(self.workers) < 1:
            raise DomainError(f"workers must be positive, got {self.workers}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def from_settings(cls, sigma, settings=None, **overrides):
        """Configuration taking its defaults from :class:`~.Settings`."""
        settings = settings or Settings()
        values = dict(
            samples=settings.mc_samples,
            prime_cutoff=settings.mc_cutoff,
            seed=settings.mc_seed,
            workers=settings.workers,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(sigma, **values)


@dataclass(frozen=True)
class McEstimate:
    """A proportion estimate with its statistical and truncation errors."""

    estimate: float
    std_error: float
    events: int
    samples: int
    bias_bound: float = 0.0

    @classmethod
    def from_events(cls, events, samples, bias_bound=0.0):
        p = events / samples
        return cls(p, math.sqrt(p * (1 - p) / samples), int(events), int(samples), float(bias_bound))

    def tolerance(self, nsigma=4):
        """Half width ``nsigma * std_error + bias_bound`` of the acceptance window."""
        return nsigma * self.std_error + self.bias_bound

    def consistent_with(self, value, nsigma=4):
        """Whether ``value`` lies in the acceptance window around the estimate."""
        return abs(self.estimate - float(value)) <= self.tolerance(nsigma)

    def __str__(self):
        return f"{self.estimate:.6e} +- {self.std_error:.2e} (bias <= {self.bias_bound:.2e}, {self.events}/{self.samples})"


def _angle_terms(b, thetas):
    # b - cos(theta) > 0, so arctan2 is the principal arctangent of the ratio
    return -np.arctan2(np.sin(thetas), b - np.cos(thetas))


def _substream(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def _block_sum(task):
    sigma, start, primes, samples, seed = task
    total = np.zeros(samples)
    for offset, p in enumerate(primes):
        thetas = _substream(seed, start + offset).uniform(0.0, 2 * np.pi, samples)
        total += _angle_terms(float(p) ** sigma, thetas)
    return total


def _primes(cfg, table=None):
    if table is None or table.limit < cfg.prime_cutoff:
        table = sieve(cfg.prime_cutoff)
    return table.upto(cfg.prime_cutoff)


def sample_im_s(cfg, rng=None, thetas=None, table=None, draw=0):
    """One draw of the truncated :math:`\\operatorname{Im} S`.

    Without ``rng`` or ``thetas`` the angles come from the per-prime
    substreams of :func:`draw_samples`, so ``sample_im_s(cfg, draw=j)``
    reproduces ``draw_samples(cfg)[j]`` up to summation order.

    Args:
        cfg (McConfig): run parameters

    Keyword args:
        rng (numpy.random.Generator): single angle source overriding the substreams
        thetas (array[float]): explicit angles, one per prime ``<= cfg.prime_cutoff``
        table (PrimeTable): primes to reuse
        draw (int): index of the draw within the substreams

    Returns:
        float: the draw
    """
    primes = _primes(cfg, table)
    if thetas is None and rng is not None:
        thetas = rng.uniform(0.0, 2 * np.pi, len(primes))
    elif thetas is None:
        if draw < 0:
            raise DomainError(f"draw index must be nonnegative, got {draw}")
        thetas = [_substream(cfg.seed, i).uniform(0.0, 2 * np.pi, draw + 1)[-1] for i in range(len(primes))]
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.shape != primes.shape:
        raise DomainError(f"expected {len(primes)} angles, got {thetas.size}")
    b = np.power(primes.astype(np.float64), cfg.sigma)
    return float(np.sum(_angle_terms(b, thetas)))


def draw_samples(cfg, table=None):
    """``cfg.samples`` independent draws of :math:`\\operatorname{Im} S`.

    Returns:
        array[float]: the draws, identical for identical ``cfg``
    """
    primes = _primes(cfg, table)
    tasks = [
        (cfg.sigma, start, primes[start : start + BLOCK_PRIMES], int(cfg.samples), cfg.seed)
        for start in range(0, len(primes), BLOCK_PRIMES)
    ]
    log.debug(
        "drawing %d samples over %d primes in %d blocks (%d workers)",
        cfg.samples,
        len(primes),
        len(tasks),
        cfg.workers,
    )
    total = np.zeros(int(cfg.samples))
    if cfg.workers > 1:
        with Pool(processes=cfg.workers) as pool:
            for i, partial in enumerate(pool.imap(_block_sum, tasks)):
                total += partial
                log.debug("block %d/%d reduced", i + 1, len(tasks))
    else:
        for i, task in enumerate(tasks):
            total += _block_sum(task)
            log.debug("block %d/%d reduced", i + 1, len(tasks))
    return total


@dataclass(frozen=True)
class TruncationBias:
    """Angle bound on the omitted primes.

    With probability at least ``1 - failure`` the omitted part of the sum is at
    most ``angle`` in absolute value.
    """

    angle: float
    failure: float
    rigorous: bool

    def probability(self, distances):
        """Bound on the probability of an event flipping, from the draws' distances to its boundary."""
        distances = np.asarray(distances)
        return float(np.count_nonzero(distances <= self.angle)) / distances.size + self.failure


def truncation_bias(cfg, ctx=None, table=None):
    """Bound the effect of the primes above ``cfg.prime_cutoff``.

    For :math:`\\sigma > 1` every omitted term lies in
    :math:`[-\\arcsin p^{-\\sigma}, \\arcsin p^{-\\sigma}]`, so the tail of the
    support length bounds the omitted sum outright. For :math:`\\sigma \\le 1`
    Hoeffding's inequality with :math:`\\arcsin u \\le \\pi u/2` gives a bound
    holding with probability :math:`1 - 10^{-9}`.

    Args:
        cfg (McConfig): run parameters

    Keyword args:
        ctx (PrecisionContext): precision of the prime sums
        table (PrimeTable): primes to reuse

    Returns:
        TruncationBias
    """
    ctx = ctx or PrecisionContext.from_digits(12)
    if table is None or table.limit < cfg.prime_cutoff:
        table = sieve(cfg.prime_cutoff)
    if cfg.sigma > 1:
        angle = arcsin_tail(cfg.sigma, cfg.prime_cutoff, ctx, table=table)
        return TruncationBias(float(max(angle, 0)), 0.0, True)
    with ctx.workdps():
        s = 2 * to_mpf(cfg.sigma, ctx)
    tail = prime_zeta(s, ctx) - partial_prime_sum(s, cfg.prime_cutoff, table, ctx)
    variance = (math.pi**2 / 4) * float(max(tail, 0))
    angle = math.sqrt(2 * variance * math.log(2 / TAIL_CONFIDENCE))
    log.debug("Hoeffding tail angle %.3e at sigma = %s, cutoff %d", angle, cfg.sigma, cfg.prime_cutoff)
    return TruncationBias(angle, TAIL_CONFIDENCE, False)


def _distance_abs(draws):
    return np.abs(np.abs(draws) - np.pi / 2)


def _distance_odd(draws):
    r = np.mod(draws - np.pi / 2, np.pi)
    return np.minimum(r, np.pi - r)


def estimate_densities(cfg, ctx=None, draws=None, table=None):
    """Estimate :math:`d(\\sigma)` and :math:`d_-(\\sigma)` by event counting.

    The :math:`d` event is :math:`|\\operatorname{Im} S| > \\pi/2`; the
    :math:`d_-` event is :math:`\\cos(\\operatorname{Im} S) < 0`.

    Keyword args:
        draws (array[float]): samples from :func:`draw_samples` to reuse

    Returns:
        tuple[McEstimate, McEstimate]: estimates of :math:`d` and :math:`d_-`
    """
    if table is None or table.limit < cfg.prime_cutoff:
        table = sieve(cfg.prime_cutoff)
    if draws is None:
        draws = draw_samples(cfg, table=table)
    bias = truncation_bias(cfg, ctx, table=table)
    n = draws.size
    d = McEstimate.from_events(
        int(np.count_nonzero(np.abs(draws) > np.pi / 2)), n, bias.probability(_distance_abs(draws))
    )
    d_minus = McEstimate.from_events(
        int(np.count_nonzero(np.cos(draws) < 0)), n, bias.probability(_distance_odd(draws))
    )
    log.info("sigma = %s: d ~ %s, d_minus ~ %s", cfg.sigma, d, d_minus)
    return d, d_minus


@dataclass
class ChiSquareReport:
    """Histogram of the draws against bin masses of :math:`\\tilde\\rho`."""

    sigma: float
    edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    statistic: float
    dof: int
    critical: float
    level: float = CHI2_LEVEL
    pooled: list = field(default_factory=list)

    @property
    def ok(self):
        """bool: whether the statistic is inside the acceptance band"""
        return self.statistic <= self.critical


def histogram_vs_rho(cfg, bins=50, ctx=None, draws=None, ell=None, options=None, table=None):
    """Chi-square comparison of the empirical histogram with :math:`\\tilde\\rho`.

    Bins split :math:`[-L(\\sigma), L(\\sigma)]` evenly. Bins expecting fewer
    than five draws are pooled into one cell.

    Args:
        cfg (McConfig): run parameters, :math:`\\sigma > 1`
        bins (int): number of bins

    Keyword args:
        ctx (PrecisionContext): precision of the :math:`\\tilde\\rho` masses, absolute target 1e-4 by default
        draws (array[float]): samples to reuse
        ell (float): half period of :math:`\\tilde\\rho`, a little above :math:`L(\\sigma)` by default
        options (DensityOptions): evaluator knobs

    Returns:
        ChiSquareReport
    """
    if not cfg.sigma > 1:
        raise DomainError(f"histogram_vs_rho needs sigma > 1, got {cfg.sigma}")
    if bins < 2:
        raise DomainError(f"at least two bins are needed, got {bins}")
    ctx = ctx or PrecisionContext.from_digits(4, guard=11)
    if draws is None:
        draws = draw_samples(cfg, table=table)
    length = float(support_length(cfg.sigma, ctx))
    ell = float(ell) if ell is not None else 1.25 * length
    rho = RhoSeries(cfg.sigma, ell, ctx, options=options or DensityOptions())
    edges = np.linspace(-length, length, bins + 1)
    counts, _ = np.histogram(draws, bins=edges)
    masses = np.array([float(rho.mass(a, b)) for a, b in zip(edges[:-1], edges[1:])])
    expected = draws.size * np.clip(masses, 0.0, None)

    keep = expected >= MIN_EXPECTED
    pooled = np.flatnonzero(~keep).tolist()
    observed = list(counts[keep])
    model = list(expected[keep])
    if pooled:
        observed.append(counts[~keep].sum())
        model.append(expected[~keep].sum())
    observed = np.asarray(observed, dtype=np.float64)
    model = np.asarray(model, dtype=np.float64)
    if model[-1] <= 0:
        observed, model = observed[:-1], model[:-1]
    statistic = float(np.sum((observed - model) ** 2 / model))
    dof = max(len(model) - 1, 1)
    critical = float(stats.chi2.ppf(CHI2_LEVEL, dof))
    log.info("chi-square %.2f on %d dof (critical %.2f)", statistic, dof, critical)
    return ChiSquareReport(cfg.sigma, edges, counts, expected, statistic, dof, critical, pooled=pooled)


def write_histogram_csv(report, stream):
    """Write ``left,right,count,expected`` rows of ``report`` to ``stream``."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["left", "right", "count", "expected"])
    for a, b, c, e in zip(report.edges[:-1], report.edges[1:], report.counts, report.expected):
        writer.writerow([repr(float(a)), repr(float(b)), int(c), repr(float(e))])
