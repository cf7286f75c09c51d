""" Test Case Boilerplate for the numerical evaluators. """

import os
import math
import unittest

from functools import wraps

import mpmath
import numpy as np


DEFAULT_SEED = int(os.getenv("WHITTAKER_TEST_SEED", default=7))

# Parameter pairs (beta, m) exercised by `whittaker_parameter_suite`. They
# avoid 2m in Z and the poles of Gamma(1/2 + m - beta).
WHITTAKER_SUITE = [
    (0.5, 0.3),
    (0.4, 0.7),
    (1.0 + 0.5j, 0.25 - 0.2j),
    (-0.7, 1.3),
    (0.3j, -0.35),
    (2.2 - 0.4j, 0.6 + 0.3j),
]


def parameter_sweep(*cases):
    """Decorator that runs a test body once per parameter dictionary.

    Each case runs inside `subTest`, so one failing case does not hide the
    others.
    """

    def decorator(process_function):
        @wraps(process_function)
        def run_test(self):
            for case in cases:
                with self.subTest(**case):
                    process_function(self, **case)

        return run_test

    return decorator


def whittaker_parameter_suite(process_function):
    """Decorator that runs a test body for every (beta, m) in WHITTAKER_SUITE."""

    @wraps(process_function)
    def run_test(self):
        for beta, m in WHITTAKER_SUITE:
            with self.subTest(beta=beta, m=m):
                process_function(self, beta=beta, m=m)

    return run_test


class TestCase(unittest.TestCase):
    # Relative tolerance used by assertClose when none is given.
    RTOL = 1e-10
    SEED = DEFAULT_SEED
    MP_DPS = 30

    def setUp(self):
        self.rng = np.random.default_rng(self.SEED)
        mpmath.mp.dps = self.MP_DPS

    @staticmethod
    def relative_error(actual, expected, floor=0.0):
        """Largest |actual - expected| / max(|expected|, floor) over the arrays."""
        actual = np.asarray(actual, dtype=complex)
        expected = np.asarray(expected, dtype=complex)
        scale = np.maximum(np.abs(expected), floor)
        scale = np.where(scale == 0.0, 1.0, scale)
        return float(np.max(np.abs(actual - expected) / scale))

    def assertClose(self, actual, expected, rtol=None, atol=0.0, msg=None):
        """Complex-aware closeness check for scalars and arrays."""
        rtol = self.RTOL if rtol is None else rtol
        actual = np.asarray(actual, dtype=complex)
        expected = np.asarray(expected, dtype=complex)
        self.assertEqual(actual.shape, expected.shape, msg)

        deviation = np.abs(actual - expected)
        allowed = atol + rtol * np.abs(expected)
        if not np.all(deviation <= allowed):
            worst = int(np.argmax(deviation - allowed))
            detail = (
                f"actual={actual.flat[worst]!r} expected={expected.flat[worst]!r} "
                f"deviation={deviation.flat[worst]:.3e} allowed={allowed.flat[worst]:.3e}"
            )
            self.fail(detail if msg is None else f"{msg}: {detail}")

    def random_complex(self, re_range, im_range, size=None):
        re = self.rng.uniform(*re_range, size=size)
        im = self.rng.uniform(*im_range, size=size)
        return re + 1j * im

    # mpmath oracles. They follow the same normalization as the package:
    # I = M / Gamma(1 + 2m), K = W.

    @staticmethod
    def mp_I(beta, m, z):
        value = mpmath.whitm(beta, m, z) * mpmath.rgamma(1 + 2 * mpmath.mpmathify(m))
        return complex(value)

    @staticmethod
    def mp_K(beta, m, z):
        return complex(mpmath.whitw(beta, m, z))

    @staticmethod
    def mp_gamma(z):
        return complex(mpmath.gamma(z))

    @staticmethod
    def mp_1f1(a, c, z):
        return complex(mpmath.hyp1f1(a, c, z))

    @staticmethod
    def mp_hyperu(a, c, z):
        return complex(mpmath.hyperu(a, c, z))

    @staticmethod
    def finite(value):
        return all(math.isfinite(part) for part in (value.real, value.imag))


def apply_whittaker_operator(beta, m, x, values):
    """-v'' + ((m^2 - 1/4)/x^2 - beta/x) v by central differences.

    `x` must be uniformly spaced; returns (interior nodes, L v there).
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=complex)
    h = x[1] - x[0]
    second = (values[2:] - 2 * values[1:-1] + values[:-2]) / h**2
    inner = x[1:-1]
    return inner, -second + ((m * m - 0.25) / inner**2 - beta / inner) * values[1:-1]
