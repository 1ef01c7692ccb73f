"""
Q polynomials
=============

**Module name:** :mod:`argzeta.qpoly`

.. currentmodule:: argzeta.qpoly

Exact integer coefficients :math:`q_{n,k}` of the even polynomials

.. math:: Q_n(x) = \\sum_{k=1}^{n} q_{n,k} x^{2k}

for which :math:`\\log I(b, 2x) = -\\sum_n Q_n(x) b^{-2n} / n!^2`, together
with the identities they satisfy: row sums, the first column, the Riccati
recurrence and the link between the diagonal and the zeros of :math:`J_0`.

Classes
-------

.. autosummary::
   QTable
   QPolynomial
   IdentityReport

Functions
---------

.. autosummary::
   build_qtable
   eval_Q
   build_Q_by_polynomial_recurrence
   normalized_q_values
   check_diagonal_bessel
   check_riccati
   check_q_bound

Code details
~~~~~~~~~~~~
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .exceptions import DomainError, InvariantViolation
from .numerics import bessel_j0_zero, to_mpf

log = logging.getLogger(__name__)


class QTable:
    """Triangular table of the exact integers :math:`q_{n,k}`, ``1 <= k <= n <= nmax``.

    Rows are Python integers and never rounded. :meth:`extend` appends rows in
    place; completed rows are not modified afterwards.

    Args:
        rows (list[list[int]]): row ``n`` holds ``q[n][1..n]``
    """

    def __init__(self, rows=None):
        self._rows = [list(r) for r in (rows or [])]

    @property
    def nmax(self):
        """int: number of rows"""
        return len(self._rows)

    def row(self, n):
        """Coefficients :math:`(q_{n,1}, \\dots, q_{n,n})` as a tuple."""
        self._check_index(n)
        return tuple(self._rows[n - 1])

    def q(self, n, k):
        """:math:`q_{n,k}`, zero for ``k < 1`` or ``k > n``."""
        self._check_index(n)
        if k < 1 or k > n:
            return 0
        return self._rows[n - 1][k - 1]

    def diagonal(self):
        """The sequence :math:`q_{n,n}` for ``n = 1..nmax``."""
        return [row[-1] for row in self._rows]

    def extend(self, nmax):
        """Append rows until the table holds ``nmax`` rows."""
        start = self.nmax
        for n in range(start, nmax):
            # row n + 1 from rows 1..n
            self._rows.append(_next_row(self._rows, n))
        if nmax > start:
            log.debug("extended QTable from %d to %d rows", start, nmax)
        return self

    def _check_index(self, n):
        if not 1 <= n <= self.nmax:
            raise DomainError(f"row index n = {n} outside 1..{self.nmax}")

    def __len__(self):
        return self.nmax

    def __repr__(self):
        return f"<QTable: nmax={self.nmax}>"


def _next_row(rows, n):
    # q[n+1][1] = n!^2, q[n+1][k] = sum_j C(n,j) C(n,j+1) sum_r q[j+1][r] q[n-j][k-r]
    if n == 0:
        return [1]
    new = [0] * (n + 1)
    new[0] = math.factorial(n) ** 2
    for k in range(2, n + 2):
        total = 0
        for j in range(n):
            left, right = rows[j], rows[n - j - 1]
            lo = max(1, k - n + j)
            hi = min(j + 1, k - 1)
            inner = 0
            for r in range(lo, hi + 1):
                inner += left[r - 1] * right[k - r - 1]
            if inner:
                total += math.comb(n, j) * math.comb(n, j + 1) * inner
        new[k - 1] = total
    return new


def build_qtable(nmax):
    """Exact table of :math:`q_{n,k}` for ``n <= nmax``.

    Args:
        nmax (int): number of rows, ``nmax >= 1``

    Returns:
        QTable: the table
    """
    if int(nmax) != nmax or nmax < 1:
        raise DomainError(f"nmax must be a positive integer, got {nmax}")
    table = QTable().extend(int(nmax))
    for n in range(1, table.nmax + 1):
        row = table.row(n)
        if row[0] != math.factorial(n - 1) ** 2 or sum(row) != math.factorial(n) * math.factorial(n - 1):
            raise InvariantViolation(f"row {n} of the Q table fails its sum or first-column identity")
    return table


def eval_Q(table, n, x, ctx):
    r""":math:`Q_n(x) = \sum_k q_{n,k} x^{2k}` at the working precision of ``ctx``.

    Args:
        table (QTable): coefficients
        n (int): row, ``1 <= n <= table.nmax``
        x: real argument
        ctx (PrecisionContext): precision

    Returns:
        mpf: :math:`Q_n(x)`
    """
    row = table.row(n)
    x = to_mpf(x, ctx)
    with ctx.workdps():
        x2 = x * x
        # Horner in x^2, constant term zero
        acc = mpmath.mpf(0)
        for coeff in reversed(row):
            acc = (acc + coeff) * x2
        return acc


@dataclass(frozen=True)
class QPolynomial:
    """One polynomial :math:`Q_n`, stored by its even coefficients.

    Args:
        n (int): index
        coeffs (tuple[int]): ``(q_{n,1}, ..., q_{n,n})``
    """

    n: int
    coeffs: tuple

    @property
    def degree(self):
        """int: degree in ``x``, always ``2n``"""
        return 2 * len(self.coeffs)

    def __call__(self, x):
        x2 = x * x
        acc = 0
        for coeff in reversed(self.coeffs):
            acc = (acc + coeff) * x2
        return acc

    def __mul__(self, other):
        # coefficients of the product, index p for x^(2p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) + 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j + 2] += a * b
        return out

    def __str__(self):
        return " + ".join(f"{c}x^{2 * k}" for k, c in enumerate(self.coeffs, start=1))


def build_Q_by_polynomial_recurrence(nmax):
    r"""The polynomials :math:`Q_1, \dots, Q_{nmax}` from the polynomial recurrence

    .. math:: Q_{n+1}(x) = n!^2 x^2 + \sum_{j=0}^{n-1} \binom{n}{j}\binom{n}{j+1} Q_{j+1}(x) Q_{n-j}(x).

    This path multiplies whole polynomials and is independent of the
    coefficient recurrence used by :func:`build_qtable`.

    Returns:
        list[QPolynomial]: ``Q_1`` first
    """
    if int(nmax) != nmax or nmax < 1:
        raise DomainError(f"nmax must be a positive integer, got {nmax}")
    polys = [QPolynomial(1, (1,))]
    for n in range(1, int(nmax)):
        coeffs = [0] * (n + 2)
        coeffs[1] = math.factorial(n) ** 2
        for j in range(n):
            weight = math.comb(n, j) * math.comb(n, j + 1)
            for power, c in enumerate(polys[j] * polys[n - j - 1]):
                coeffs[power] += weight * c
        polys.append(QPolynomial(n + 1, tuple(coeffs[1:])))
    return polys


def normalized_q_values(y, nmax, ctx, table=None):
    r"""The sequence :math:`Q_n(y)/n!^2` for ``n = 1..nmax``.

    With a table the exact rows are evaluated. Without one the Riccati
    recurrence :math:`g_0 = -y^2`,
    :math:`g_n = -(y^2 + \sum_{j<n} g_j g_{n-1-j})/(n+1)` is run numerically,
    using :math:`Q_n(y)/n!^2 = -g_{n-1}/n`. Every :math:`g_n` is nonpositive,
    so the recurrence involves no cancellation.

    Args:
        y: real argument
        nmax (int): number of terms
        ctx (PrecisionContext): precision

    Keyword args:
        table (QTable): exact coefficients covering ``nmax`` rows

    Returns:
        list[mpf]: ``[Q_1(y), Q_2(y)/4, ...]``
    """
    if table is not None and table.nmax >= nmax:
        with ctx.workdps():
            return [eval_Q(table, n, y, ctx) / mpmath.mpf(math.factorial(n)) ** 2 for n in range(1, nmax + 1)]
    y = to_mpf(y, ctx)
    with ctx.workdps():
        y2 = y * y
        g = []
        for n in range(nmax):
            conv = mp.fsum(g[j] * g[n - 1 - j] for j in range(n)) if n else 0
            g.append(-(y2 + conv) / (n + 1))
        return [-g[n - 1] / n for n in range(1, nmax + 1)]


@dataclass
class IdentityReport:
    """Outcome of an identity check.

    Args:
        name (str): identity checked
        ok (bool): whether every case held
        details (list[dict]): per-case values
    """

    name: str
    ok: bool = True
    details: list = field(default_factory=list)

    def raise_on_violation(self):
        """Raise :class:`~.InvariantViolation` if any case failed."""
        if not self.ok:
            bad = [d for d in self.details if not d.get("ok", True)]
            raise InvariantViolation(f"{self.name} failed for {len(bad)} case(s): {bad[:3]}")
        return self


def check_diagonal_bessel(table, nmax_check, ctx, zeros=40):
    r"""Compare :math:`q_{n,n}` with :math:`2^{2n} n!(n-1)! \sum_k j_{0,k}^{-2n}`.

    The zero sum is cut after ``zeros`` terms. Since
    :math:`j_{0,k} > (k - 1/4)\pi`, the omitted part is at most
    :math:`\pi^{-2n}(K - 1/4)^{1-2n}/(2n-1)` times the prefactor, and the
    exact integer must exceed the truncated sum by no more than that.

    Args:
        table (QTable): coefficients with at least ``nmax_check`` rows
        nmax_check (int): largest ``n`` compared
        ctx (PrecisionContext): precision for the zeros

    Keyword args:
        zeros (int): number of Bessel zeros ``K``

    Returns:
        IdentityReport: per ``n`` the truncated sum, deviation, tail bound and
        relative deviation
    """
    if nmax_check > table.nmax:
        raise DomainError(f"table holds {table.nmax} rows, {nmax_check} requested")
    roots = [bessel_j0_zero(k, ctx) for k in range(1, zeros + 1)]
    report = IdentityReport("diagonal Bessel-zero sum")
    with ctx.workdps():
        for n in range(1, nmax_check + 1):
            prefactor = mpmath.mpf(4) ** n * math.factorial(n) * math.factorial(n - 1)
            approx = prefactor * mp.fsum(mp.power(j, -2 * n) for j in roots)
            tail = prefactor * mp.power(mp.pi, -2 * n) * mp.power(zeros - mpmath.mpf(1) / 4, 1 - 2 * n) / (2 * n - 1)
            exact = table.q(n, n)
            deviation = exact - approx
            slack = 10 * exact * ctx.eps
            ok = -slack <= deviation <= tail + slack
            report.details.append(
                {
                    "n": n,
                    "q_nn": exact,
                    "zero_sum": approx,
                    "deviation": deviation,
                    "tail_bound": tail,
                    "relative": abs(deviation) / exact,
                    "ok": ok,
                }
            )
            report.ok &= ok
    return report


def check_riccati(table, x, nmax):
    r"""Exact check of :math:`g_n = -(x^2 + \sum_{j<n} g_j g_{n-1-j})/(n+1)`.

    Here :math:`g_n = -Q_{n+1}(x)/(n!(n+1)!)`, evaluated in rational arithmetic
    from the table at an integer or rational ``x``.

    Returns:
        IdentityReport: one entry per ``n < nmax``
    """
    if nmax > table.nmax:
        raise DomainError(f"table holds {table.nmax} rows, {nmax} requested")
    x = Fraction(x)
    x2 = x * x
    g = [
        -Fraction(sum(c * x2**k for k, c in enumerate(table.row(n + 1), start=1)), math.factorial(n) * math.factorial(n + 1))
        for n in range(nmax)
    ]
    report = IdentityReport(f"Riccati recurrence at x = {x}")
    for n in range(nmax):
        expected = -(x2 + sum(g[j] * g[n - 1 - j] for j in range(n))) / (n + 1)
        ok = g[n] == expected
        report.details.append({"n": n, "ok": ok})
        report.ok &= ok
    return report


def check_q_bound(table, xs, ctx):
    r"""Check :math:`|Q_n(x)| \le n!(n-1)! \max(1, |x|)^{2n}` for every row and ``x``.

    Returns:
        IdentityReport: one entry per ``(n, x)`` with the margin ``bound - |Q_n(x)|``
    """
    report = IdentityReport("Q_n bound")
    with ctx.workdps():
        for x in xs:
            xv = to_mpf(x, ctx)
            for n in range(1, table.nmax + 1):
                value = abs(eval_Q(table, n, xv, ctx))
                bound = math.factorial(n) * math.factorial(n - 1) * max(mpmath.mpf(1), abs(xv)) ** (2 * n)
                margin = bound - value
                ok = margin >= -bound * ctx.eps * 10
                report.details.append({"n": n, "x": xv, "margin": margin, "ok": ok})
                report.ok &= ok
    return report
