"""
Output records
==============

**Module name:** :mod:`argzeta.output`

.. currentmodule:: argzeta.output

Decimal formatting of results and the CSV, JSON, text and table writers used by
the command line. ``text`` prints the bare value of each record, one per line;
``table`` adds the kind, the inputs and the error estimate.

Values with :math:`|v| < 10^{-4}` or :math:`|v| \\ge 10^5` are written in
scientific notation with an explicit exponent, everything else in fixed point,
always with exactly the requested number of significant digits.

Code details
~~~~~~~~~~~~
"""
import csv
import json
from dataclasses import asdict, dataclass, field

import mpmath

FORMATS = ("csv", "json", "text", "table")
CSV_HEADER = ("sigma", "kind", "value", "error", "method")

# leading decimal exponents strictly inside (-5, 5) print in fixed point
_MIN_FIXED = -5
_MAX_FIXED = 5


def format_value(value, digits):
    """Round ``value`` to ``digits`` significant digits.

    Args:
        value: real number (mpf, float, int or str)
        digits (int): significant digits, at least 1

    Returns:
        str: the decimal string
    """
    digits = max(1, int(digits))
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(
            mpmath.mpf(value), digits, min_fixed=_MIN_FIXED, max_fixed=_MAX_FIXED, strip_zeros=False
        )


def format_error(error, digits=2):
    """Short rendering of an error bound."""
    if error is None:
        return ""
    with mpmath.workdps(15):
        error = mpmath.mpf(error)
        if error == 0:
            return "0"
        return mpmath.nstr(error, digits, min_fixed=0, max_fixed=0)


def parse_value(text):
    """Inverse of :func:`format_value` at the precision the string carries."""
    digits = sum(c.isdigit() for c in text.split("e")[0])
    with mpmath.workdps(max(digits + 10, 15)):
        return mpmath.mpf(text)


@dataclass
class OutputRecord:
    """One result line.

    Args:
        command (str): subcommand that produced the record
        inputs (dict): input names mapped to their printed values
        value (str): decimal string of the result
        error_budget (str): decimal string of the error bound, empty if none
        kind (str): quantity, for example ``d`` or ``psi``
        method (str): algorithm that produced the value
    """

    command: str
    inputs: dict = field(default_factory=dict)
    value: str = ""
    error_budget: str = ""
    kind: str = ""
    method: str = ""

    @classmethod
    def make(cls, command, inputs, value, digits, error=None, kind=None, method=""):
        """Record with ``value`` formatted to ``digits`` significant digits."""
        return cls(
            command,
            {k: str(v) for k, v in inputs.items()},
            format_value(value, digits),
            format_error(error),
            kind or command,
            method,
        )

    @classmethod
    def from_density(cls, result, digits, sigma_label=None, command="density"):
        """Record for a :class:`~argzeta.density.DensityResult`."""
        inputs = {"sigma": sigma_label if sigma_label is not None else mpmath.nstr(result.sigma, 15)}
        if result.k is not None:
            inputs["k"] = str(result.k)
        if result.m is not None:
            inputs["m"] = str(result.m)
        return cls.make(command, inputs, result.value, digits, result.error, result.label, result.method)

    @property
    def sigma(self):
        return self.inputs.get("sigma", "")

    def as_row(self):
        return [self.sigma, self.kind, self.value, self.error_budget, self.method]


def write_csv(records, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.as_row())


def write_json(records, stream):
    json.dump([asdict(r) for r in records], stream, indent=2)
    stream.write("\n")


def write_text(records, stream):
    for record in records:
        stream.write(f"{record.value}\n")


def write_table(records, stream):
    for record in records:
        label = " ".join(f"{k}={v}" for k, v in record.inputs.items())
        line = f"{record.kind:<10} {label:<28} {record.value}"
        if record.error_budget:
            line += f"  (+- {record.error_budget})"
        stream.write(line.rstrip() + "\n")


_WRITERS = {"csv": write_csv, "json": write_json, "text": write_text, "table": write_table}


def write_records(records, stream, fmt="text"):
    """Write ``records`` to ``stream`` in one of :data:`FORMATS`."""
    try:
        writer = _WRITERS[fmt]
    except KeyError:
        raise ValueError(f"Unknown output format {fmt!r}; expected one of {FORMATS}") from None
    writer(list(records), stream)


def read_csv(stream):
    """Parse a stream written by :func:`write_csv` back into records."""
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        OutputRecord(
            "",
            {"sigma": row["sigma"]} if row["sigma"] else {},
            row["value"],
            row["error"],
            row["kind"],
            row["method"],
        )
        for row in reader
    ]


def read_json(stream):
    """Parse a stream written by :func:`write_json` back into records."""
    return [OutputRecord(**item) for item in json.load(stream)]
