"""
Default parameters, commandline arguments and common routines for the unit tests.
"""
import mpmath
import numpy as np
import pytest

from argzeta.numerics import PrecisionContext
from argzeta.primes import sieve
from argzeta.qpoly import build_qtable


# defaults
TOLERANCE = 1e-12
MC_SAMPLES = 20000
MC_CUTOFF = 1000


# coefficients q_{n,k}, n = 1..7
Q_ROWS = [
    [1],
    [1, 1],
    [4, 4, 4],
    [36, 33, 42, 33],
    [576, 480, 648, 720, 456],
    [14400, 10960, 14900, 18780, 17900, 9460],
    [518400, 362880, 487200, 648240, 730800, 606480, 274800],
]

# d(sigma)
D_REFERENCE = {
    "0.5+1e-11": "0.6533592249148917497",
    "0.5+1e-5": "0.4962734204446697434",
    "0.6": "7.9202919267432753125e-2",
    "0.7": "2.5228782796068962969e-2",
    "0.8": "5.1401888600187247641e-3",
    "0.9": "3.1401743610642112427e-4",
    "1.0": "3.7886623606688718671e-7",
    "1.1": "6.3088749952505014038e-22",
    "1.15": "1.3815328080907034247e-103",
    "1.16": "1.1172074815779368125e-194",
    "1.165": "1.2798207752318534603e-283",
}

# d(sigma) - d_minus(sigma)
GAP_REFERENCE = {
    "0.6": "8.073328981e-11",
    "0.7": "2.676004882e-32",
}

D_MINUS_NEAR_HALF = "0.4986058426"


def pytest_addoption(parser):
    """Command line arguments"""
    parser.addoption("-T", "--tol", type=float, default=None, help="Numerical tolerance for equality tests.")
    parser.addoption("--runslow", action="store_true", default=False, help="Run full precision table tests.")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full precision table reproduction, run with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tol(request):
    """Tolerance fixture"""
    value = request.config.getoption("--tol")
    return TOLERANCE if value is None else value


@pytest.fixture
def ctx():
    """20 correct decimals, 30 working digits"""
    return PrecisionContext.from_digits(20)


@pytest.fixture
def ctx_high():
    """40 correct decimals"""
    return PrecisionContext.from_digits(40)


@pytest.fixture
def ctx_low():
    """10 correct decimals at the minimum working precision"""
    return PrecisionContext.from_digits(10, guard=5)


@pytest.fixture(scope="session")
def primes_small():
    """Primes up to 10^5"""
    return sieve(10**5)


@pytest.fixture(scope="session")
def qtable():
    """Coefficient table with 50 rows"""
    return build_qtable(50)


def reference(text):
    """Reference value from its decimal string at 40 digits."""
    with mpmath.workdps(40):
        return mpmath.mpf(text)


def significant_digits_agree(value, text, digits):
    """Whether ``value`` matches the printed reference to ``digits`` significant digits."""
    with mpmath.workdps(60):
        ref = mpmath.mpf(text)
        return abs(mpmath.mpf(value) - ref) <= abs(ref) * mpmath.mpf(10) ** (1 - digits)


class BaseTest:
    """Default base test class"""

    # pylint: disable=no-self-use

    def assertEqual(self, first, second):
        """Replaces unittest TestCase.assertEqual"""
        assert first == second

    def assertAlmostEqual(self, first, second, delta):
        """Replaces unittest TestCase.assertEqual"""
        assert abs(first - second) <= delta, f"{first} != {second} within {delta}"

    def assertTrue(self, first):
        """Replaces unittest TestCase.assertTrue"""
        assert first

    def assertFalse(self, first):
        """Replaces unittest TestCase.assertFalse"""
        assert not first

    def assertAllAlmostEqual(self, first, second, delta):
        """
        Like assertAlmostEqual, but works with arrays. All the corresponding elements have to be almost equal.
        """
        first, second = np.asarray(first, dtype=object), np.asarray(second, dtype=object)
        if np.all(first == second):
            return
        diff = [abs(a - b) for a, b in zip(first.ravel(), second.ravel())]
        assert all(d <= delta for d in diff), "{} != {} within {} delta".format(first, second, delta)

    def assertAllEqual(self, first, second):
        """
        Like assertEqual, but works with arrays. All the corresponding elements have to be equal.
        """
        return self.assertAllAlmostEqual(first, second, delta=0)

    def assertAllTrue(self, value):
        """
        Like assertTrue, but works with arrays. All the corresponding elements have to be True.
        """
        return self.assertTrue(np.all(value))
