"""
Configuration
=============

**Module name:** :mod:`argzeta.config`

.. currentmodule:: argzeta.config

Default numerical parameters and the optional ``key = value`` configuration
file read by the command line.

Values are resolved in increasing order of priority: built-in defaults, the
``ARGZETA_MAX_DIGITS`` environment variable (precision cap only), the
configuration file, and finally command-line flags.

Classes
-------

.. autosummary::
   Settings

Auxiliary functions
-------------------

.. autosummary::
   default_max_digits
   load_config_file

Code details
~~~~~~~~~~~~
"""
import dataclasses
import logging
import os
from dataclasses import dataclass

from .exceptions import DomainError

log = logging.getLogger(__name__)

MAX_DIGITS_ENV = "ARGZETA_MAX_DIGITS"

DEFAULT_DIGITS = 20
GUARD_DIGITS = 10
MIN_WORKING_DIGITS = 15
DEFAULT_MAX_DIGITS = 600
DEFAULT_MAX_SIEVE_LIMIT = 2 * 10**8
DEFAULT_KAPPA = 4
DEFAULT_MIN_P0 = 100
DEFAULT_MAX_M = 1024


def default_max_digits():
    """Precision cap taken from the environment, or the built-in default.

    Returns:
        int: maximum number of decimal digits any computation may use
    """
    raw = os.environ.get(MAX_DIGITS_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_DIGITS
    try:
        value = int(raw)
    except ValueError as e:
        raise DomainError(f"{MAX_DIGITS_ENV} must be an integer, got {raw!r}") from e
    if value < MIN_WORKING_DIGITS:
        raise DomainError(f"{MAX_DIGITS_ENV} must be at least {MIN_WORKING_DIGITS}, got {value}")
    return value


@dataclass
class Settings:
    """Run-wide numerical settings.

    Every field maps to a ``key = value`` line of the configuration file and,
    for most fields, to a command-line flag of the same name.
    """

    digits: int = DEFAULT_DIGITS
    guard_digits: int = GUARD_DIGITS
    max_digits: int = DEFAULT_MAX_DIGITS
    max_sieve_limit: int = DEFAULT_MAX_SIEVE_LIMIT
    kappa: float = DEFAULT_KAPPA
    min_p0: int = DEFAULT_MIN_P0
    max_m: int = DEFAULT_MAX_M
    series_engine: str = "hyp2f1"
    mc_samples: int = 10**5
    mc_cutoff: int = 10**4
    mc_seed: int = 2012
    workers: int = 1

    @classmethod
    def from_environment(cls):
        """Defaults with the precision cap read from the environment."""
        return cls(max_digits=default_max_digits())

    def updated(self, **overrides):
        """Return a copy with the non-``None`` overrides applied.

        Unknown keys raise :class:`~argzeta.exceptions.DomainError`.
        """
        names = {f.name: f for f in dataclasses.fields(self)}
        values = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in names:
                raise DomainError(f"Unknown setting {key!r}")
            values[key] = _coerce(names[key], value)
        return dataclasses.replace(self, **values)


def _coerce(field, value):
    if isinstance(value, str):
        value = value.strip()
        if field.type in (int, "int"):
            try:
                # accept 1e5 style literals for integer fields
                return int(float(value)) if "e" in value.lower() else int(value)
            except ValueError as e:
                raise DomainError(f"Setting {field.name!r} expects an integer, got {value!r}") from e
        if field.type in (float, "float"):
            try:
                return float(value)
            except ValueError as e:
                raise DomainError(f"Setting {field.name!r} expects a number, got {value!r}") from e
    return value


def load_config_file(path, settings=None):
    """Read a ``key = value`` configuration file on top of ``settings``.

    Blank lines and lines starting with ``#`` are ignored. Keys use the field
    names of :class:`Settings`; dashes are accepted in place of underscores.

    Args:
        path (str or Path): configuration file
        settings (Settings): base settings, defaults to
            :meth:`Settings.from_environment`

    Returns:
        Settings: the merged settings
    """
    settings = settings or Settings.from_environment()
    overrides = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = line.split("=", 1)
            overrides[key.strip().replace("-", "_")] = value.strip()
    log.debug("Loaded %d settings from %s", len(overrides), path)
    return settings.updated(**overrides)
