"""
Command line
============

**Module name:** :mod:`argzeta.cli`

.. currentmodule:: argzeta.cli

The ``argzeta`` command. Results go to standard output as CSV, JSON or
aligned text; diagnostics and progress bars go to standard error.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 capacity, precision or
convergence failure, 5 invariant violation.

Code details
~~~~~~~~~~~~
"""
import argparse
import logging
import math
import sys
from fractions import Fraction

import mpmath
from mpmath import mp
from tqdm import tqdm

from . import __version__
from .charfun import PsiEvaluator
from .checks import SUITES, run_suites
from .config import Settings, load_config_file
from .density import DensityOptions, RhoSeries, SumParams, density_to_digits
from .exceptions import ArgZetaError, DomainError, InvariantViolation
from .ifunc import i_asymptotic, i_quadrature, i_rational, i_series, log_i_series
from .mcverify import McConfig, draw_samples, estimate_densities, histogram_vs_rho, write_histogram_csv
from .numerics import PrecisionContext, to_mpf
from .output import FORMATS, OutputRecord, format_value, write_records
from .primes import prime_zeta, sieve, sigma0, sigma1
from .qpoly import build_qtable

log = logging.getLogger(__name__)

D_TABLE_ROWS = ("0.5+1e-11", "0.5+1e-5", "0.6", "0.7", "0.8", "0.9", "1.0", "1.1", "1.15", "1.16", "1.165")
GAP_TABLE_ROWS = ("0.5+1e-11", "0.6", "0.7", "0.8")

KIND_NAMES = {"d": "d", "dminus": "d_minus", "dplus": "d_plus", "ak": "a_k", "gap": "d-d_minus"}
IFACTOR_METHODS = ("series", "quadrature", "log", "asymptotic", "rational")


def parse_label(label):
    """Exact value of a printed label such as ``0.5+1e-11``.

    Returns:
        Fraction: the sum of the ``+``-separated decimal parts
    """
    text = str(label).strip().replace(" ", "")
    if not text:
        raise DomainError("empty numeric label")
    try:
        return sum((Fraction(part) for part in text.split("+") if part), Fraction(0))
    except ValueError as e:
        raise DomainError(f"cannot parse {label!r} as a number") from e


def _rows(text, default):
    if not text:
        return list(default)
    return [r.strip() for r in text.split(",") if r.strip()]


class _Runner:
    """Holds the resolved settings and output stream of one invocation."""

    def __init__(self, args, settings, stdout):
        self.args = args
        self.settings = settings
        self.stdout = stdout

    @property
    def digits(self):
        return self.settings.digits

    def context(self, digits=None):
        digits = self.digits if digits is None else digits
        return PrecisionContext.from_digits(
            digits, guard=self.settings.guard_digits, max_digits=self.settings.max_digits
        )

    def options(self):
        return DensityOptions.from_settings(self.settings)

    def progress(self, iterable, desc):
        return tqdm(iterable, desc=desc, disable=self.args.no_progress, file=sys.stderr, leave=False)

    def emit(self, records):
        write_records(records, self.stdout, self.args.format)

    def psi(self):
        a = self.args
        ctx = self.context()
        evaluator = PsiEvaluator(
            parse_label(a.sigma),
            ctx,
            kappa=self.settings.kappa,
            min_p0=self.settings.min_p0,
            engine=self.settings.series_engine,
            max_sieve_limit=self.settings.max_sieve_limit,
        )
        value, budget = evaluator.psi_with_budget(parse_label(a.x))
        self.emit([OutputRecord.make("psi", {"sigma": a.sigma, "x": a.x}, value, self.digits, budget.total())])

    def ifactor(self):
        a = self.args
        ctx = self.context()
        inputs = {"b": a.b, "x": a.x}
        b, x = parse_label(a.b), parse_label(a.x)
        error = None
        if a.method == "rational":
            exact = i_rational(Fraction(a.b2) if a.b2 else b * b, x)
            with ctx.workdps():
                value = mpmath.mpf(exact.numerator) / exact.denominator
            method = f"rational {exact}"
        elif a.method == "series":
            value, budget = i_series(b, x, ctx, engine=self.settings.series_engine, return_budget=True)
            error, method = budget.total(), "series"
        elif a.method == "quadrature":
            value, budget = i_quadrature(b, x, ctx, form=a.form, return_budget=True)
            error, method = budget.total(), f"quadrature/{a.form}"
        elif a.method == "log":
            logv, budget = log_i_series(b, x, ctx, return_budget=True)
            with ctx.workdps():
                value = mp.exp(logv)
                error = budget.total() * value
            method = "log"
        else:
            value, method = i_asymptotic(b, x, ctx), "asymptotic"
        self.emit([OutputRecord.make("ifactor", inputs, value, self.digits, error, kind="I", method=method)])

    def qcoeff(self):
        a = self.args
        n = a.n
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        table = build_qtable(n)
        if a.diagonal:
            self.stdout.write(" ".join(map(str, table.diagonal())) + "\n")
        elif a.sum_check:
            failures = 0
            for m in range(1, n + 1):
                total = sum(table.row(m))
                expected = math.factorial(m) * math.factorial(m - 1)
                first_ok = table.q(m, 1) == math.factorial(m - 1) ** 2
                ok = total == expected and first_ok
                failures += not ok
                self.stdout.write(f"{m} {total} {expected} {'ok' if ok else 'FAILED'}\n")
            if failures:
                raise InvariantViolation(f"{failures} row(s) of q violate the sum identities")
        else:
            self.stdout.write(" ".join(map(str, table.row(n))) + "\n")

    def primezeta(self):
        a = self.args
        value = prime_zeta(parse_label(a.s), self.context())
        self.emit([OutputRecord.make("primezeta", {"s": a.s}, value, self.digits, kind="P", method="moebius")])

    def _density(self, kind, label, k=0, params=None, method="auto", command="density"):
        result = density_to_digits(
            kind,
            parse_label(label),
            self.digits,
            self.context(),
            k=k,
            params=params,
            method=method,
            options=self.options(),
        )
        return OutputRecord.from_density(result, self.digits, sigma_label=label, command=command)

    def density(self):
        a = self.args
        kind = KIND_NAMES[a.kind]
        params = SumParams(parse_label(a.m)) if a.m else None
        if kind != "a_k" and a.k:
            raise DomainError("--k applies to --kind ak only")
        self.emit([self._density(kind, a.sigma, k=a.k or 0, params=params, method=a.method)])

    def table2(self):
        records = []
        for label in self.progress(_rows(self.args.rows, D_TABLE_ROWS), "table2"):
            records.append(self._density("d", label, command="table2"))
            log.info("table2 row %s done", label)
        self.emit(records)

    def table3(self):
        records = []
        for label in self.progress(_rows(self.args.rows, GAP_TABLE_ROWS), "table3"):
            records.append(self._density("d-d_minus", label, command="table3"))
            log.info("table3 row %s done", label)
        self.emit(records)

    def sigma0(self):
        ctx = self.context()
        which = self.args.which
        value = sigma1(ctx) if which == 1 else sigma0(ctx)
        name = f"sigma{which}"
        self.emit([OutputRecord.make("sigma0", {}, value, self.digits, ctx.target_abs_error, kind=name, method="root")])

    def rho(self):
        a = self.args
        if a.points < 1:
            raise DomainError(f"--points must be positive, got {a.points}")
        ctx = self.context()
        series = RhoSeries(parse_label(a.sigma), parse_label(a.ell), ctx, options=self.options())
        with ctx.workdps():
            lo, hi = to_mpf(parse_label(a.lo), ctx), to_mpf(parse_label(a.hi), ctx)
            xs = [lo] if a.points == 1 else mpmath.linspace(lo, hi, a.points)
        records = []
        for x in self.progress(xs, "rho"):
            label = format_value(x, 8)
            records.append(
                OutputRecord.make(
                    "rho",
                    {"sigma": a.sigma, "x": label, "ell": a.ell},
                    series.value(x),
                    self.digits,
                    ctx.target_abs_error,
                    kind=f"rho(x={label})",
                    method="cosine-series",
                )
            )
        self.emit(records)

    def mc(self):
        a = self.args
        s = self.settings
        cfg = McConfig(
            float(parse_label(a.sigma)),
            samples=s.mc_samples,
            prime_cutoff=s.mc_cutoff,
            seed=s.mc_seed,
            workers=s.workers,
        )
        table = sieve(cfg.prime_cutoff, max_limit=s.max_sieve_limit)
        draws = draw_samples(cfg, table=table)
        d, d_minus = estimate_densities(cfg, draws=draws, table=table)
        records = [
            OutputRecord.make("mc", {"sigma": a.sigma}, est.estimate, 6, est.std_error + est.bias_bound, kind=kind,
                              method=f"monte-carlo n={est.samples}")
            for kind, est in (("d", d), ("d_minus", d_minus))
        ]
        self.emit(records)
        if a.histogram:
            report = histogram_vs_rho(cfg, bins=a.bins, draws=draws, options=self.options())
            with open(a.histogram, "w", encoding="utf-8", newline="") as f:
                write_histogram_csv(report, f)
            sys.stderr.write(f"chi-square {report.statistic:.2f} on {report.dof} dof, critical {report.critical:.2f}\n")
            if not report.ok:
                raise InvariantViolation("histogram of Im S disagrees with rho_tilde")

    def checks(self):
        results = run_suites(self.args.suite)
        failed = 0
        for suite, items in results.items():
            for item in items:
                self.stdout.write(f"[{suite}] {item}\n")
                failed += not item.ok
        if failed:
            raise InvariantViolation(f"{failed} check(s) failed")


def _digits_flag(p):
    p.add_argument("--digits", type=int, default=None, help="significant or absolute decimal digits")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="argzeta",
        description="Value distribution of arg zeta(sigma + it): characteristic function and densities.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=None, help="key = value configuration file")
    parser.add_argument("--format", choices=FORMATS, default="text", help="output format (default: text)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--no-progress", action="store_true", help="disable progress bars")
    parser.add_argument("--max-digits", type=int, default=None, help="cap on working precision")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("psi", help="characteristic function psi_sigma(x)")
    p.add_argument("--sigma", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--kappa", type=float, default=None)
    _digits_flag(p)

    p = sub.add_parser("ifactor", help="per-prime factor I(b, x)")
    p.add_argument("--b", required=True)
    p.add_argument("--b2", default=None, help="exact b^2 for --method rational")
    p.add_argument("--x", required=True)
    p.add_argument("--method", choices=IFACTOR_METHODS, default="series")
    p.add_argument("--form", choices=("arcsin", "arctan", "kernel"), default="arcsin")
    _digits_flag(p)

    p = sub.add_parser("qcoeff", help="integer coefficients q_{n,k}")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--row", action="store_true")
    group.add_argument("--diagonal", action="store_true")
    group.add_argument("--sum-check", action="store_true")

    p = sub.add_parser("primezeta", help="prime zeta function P(s)")
    p.add_argument("--s", required=True)
    _digits_flag(p)

    p = sub.add_parser("density", help="d, d_minus, d_plus, a_k or d - d_minus")
    p.add_argument("--sigma", required=True)
    p.add_argument("--kind", choices=tuple(KIND_NAMES), default="d")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--m", default=None, help="grid parameter of the exact sum")
    p.add_argument("--method", choices=("auto", "exact-sum", "limit-sum", "integral"), default="auto")
    p.add_argument("--max-m", type=int, default=None)
    _digits_flag(p)

    p = sub.add_parser("table2", help="d(sigma) for the standard list of sigma")
    p.add_argument("--rows", default=None, help="comma separated sigma labels")
    _digits_flag(p)

    p = sub.add_parser("table3", help="d(sigma) - d_minus(sigma)")
    p.add_argument("--rows", default=None, help="comma separated sigma labels")
    _digits_flag(p)

    p = sub.add_parser("sigma0", help="roots of L(sigma) = pi/2 and 3 pi/2")
    p.add_argument("--which", type=int, choices=(0, 1), default=0)
    _digits_flag(p)

    p = sub.add_parser("rho", help="periodised density on a grid")
    p.add_argument("--sigma", required=True)
    p.add_argument("--from", dest="lo", required=True)
    p.add_argument("--to", dest="hi", required=True)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--ell", required=True)
    _digits_flag(p)

    p = sub.add_parser("mc", help="Monte Carlo estimates of d and d_minus")
    p.add_argument("--sigma", required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--histogram", default=None, help="CSV file for the histogram against rho_tilde")
    p.add_argument("--bins", type=int, default=50)

    p = sub.add_parser("checks", help="run the invariant suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    return parser


def resolve_settings(args):
    """Defaults, then environment, then ``--config``, then flags."""
    settings = Settings.from_environment()
    if args.config:
        settings = load_config_file(args.config, settings)
    return settings.updated(
        digits=getattr(args, "digits", None),
        max_digits=args.max_digits,
        kappa=getattr(args, "kappa", None),
        max_m=getattr(args, "max_m", None),
        mc_samples=getattr(args, "samples", None),
        mc_cutoff=getattr(args, "cutoff", None),
        mc_seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", None),
    )


def run(argv=None, stdout=None):
    """Run one command.

    Args:
        argv (list[str]): arguments without the program name
        stdout: stream for results, ``sys.stdout`` by default

    Returns:
        int: the exit code
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    try:
        settings = resolve_settings(args)
        getattr(_Runner(args, settings, stdout), args.command)()
    except ArgZetaError as e:
        log.debug("%s failed", args.command, exc_info=True)
        sys.stderr.write(f"argzeta {args.command}: {type(e).__name__}: {e}\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(f"argzeta {args.command}: {e}\n")
        return 2
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
