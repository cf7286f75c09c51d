import math
import logging

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import BranchPointError, DomainError, PoleError
from .util.test import *

logger = logging.getLogger(__name__)

TOL_POLE = 1e-10


@dataclass(frozen=True, eq=False)
class PolarPoint:
    """A complex argument stored as (modulus, exact angle).

    The angle is not reduced to ]-pi, pi], so points such as e^{i pi} z and
    e^{-i pi} z stay on different sheets of ln, sqrt and z^lambda.

    Parameters
    ----------
    modulus : float or numpy array
        |z|, non-negative

    angle : float or numpy array
        arg z in radians, any real value
    """

    modulus: np.ndarray
    angle: np.ndarray

    @classmethod
    def from_complex(cls, z):
        """Principal representation; the cut ]-inf, 0] is approached from above."""
        z = np.asarray(z, dtype=complex)
        check_finite(z)
        on_cut = (z.imag == 0.0) & (z.real < 0.0)
        return cls(np.abs(z), np.where(on_cut, np.pi, np.angle(z)))

    @property
    def shape(self):
        return np.shape(self.modulus)

    @property
    def value(self):
        return self.modulus * np.exp(1j * self.angle)

    def ravel(self):
        return PolarPoint(
            np.ravel(np.asarray(self.modulus, dtype=float)),
            np.ravel(np.broadcast_to(self.angle, np.shape(self.modulus)).astype(float)),
        )

    def take(self, mask):
        return PolarPoint(self.modulus[mask], self.angle[mask])

    def rotate(self, phi):
        return PolarPoint(self.modulus, self.angle + phi)

    def scale(self, s):
        assert s > 0, "Scaling factor must be positive"
        return PolarPoint(self.modulus * s, self.angle)

    def log(self):
        if np.any(self.modulus == 0.0):
            raise BranchPointError("ln is singular at z = 0")
        return np.log(self.modulus) + 1j * self.angle

    def power(self, lam):
        """z^lam = exp(lam ln z) on the sheet fixed by the stored angle."""
        lam = complex(lam)
        r = np.asarray(self.modulus, dtype=float)
        at_zero = r == 0.0
        if not np.any(at_zero):
            return np.exp(lam * (np.log(r) + 1j * self.angle))
        if lam.real <= 0.0 and lam != 0:
            raise BranchPointError(f"z^{lam} is singular at z = 0")
        safe = np.where(at_zero, 1.0, r)
        out = np.exp(lam * (np.log(safe) + 1j * self.angle))
        return np.where(at_zero, 1.0 + 0j if lam == 0 else 0j, out)


def check_finite(z):
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite argument")


def as_polar(z):
    if isinstance(z, PolarPoint):
        return z
    return PolarPoint.from_complex(z)


def restore(values, shape):
    """Give array results back in the caller's shape, Python complex for scalars."""
    values = np.asarray(values, dtype=complex).reshape(shape)
    if shape == ():
        return complex(values)
    return values


def pole_distance(z):
    """Distance from z to the nearest pole {0, -1, -2, ...} of Gamma."""
    z = np.asarray(z, dtype=complex)
    nearest = np.minimum(np.round(z.real), 0.0)
    return np.abs(z - nearest)


def _require_off_poles(z, tol_pole, name):
    if np.any(pole_distance(z) < tol_pole):
        raise PoleError(f"{name} argument {z} is within {tol_pole} of a pole")


def loggamma(z, tol_pole=TOL_POLE):
    """Principal, continuous branch of log Gamma.

    Parameters
    ----------
    z : complex or numpy array

    tol_pole : float, optional
        Arguments closer than this to {0, -1, -2, ...} raise PoleError.
    """
    z = np.asarray(z, dtype=complex)
    check_finite(z)
    _require_off_poles(z, tol_pole, "loggamma")
    return restore(special.loggamma(z), z.shape)


def gamma(z, tol_pole=TOL_POLE):
    """Gamma(z) = exp(log Gamma(z)); reflection is handled inside log Gamma."""
    z = np.asarray(z, dtype=complex)
    return restore(np.exp(loggamma(z, tol_pole=tol_pole)), z.shape)


def rgamma(z):
    """1/Gamma(z). Entire, exactly zero at the poles of Gamma."""
    z = np.asarray(z, dtype=complex)
    check_finite(z)
    return restore(special.rgamma(z), z.shape)


def digamma(z, tol_pole=TOL_POLE):
    z = np.asarray(z, dtype=complex)
    check_finite(z)
    _require_off_poles(z, tol_pole, "digamma")
    return restore(special.psi(z), z.shape)


def pochhammer(a, k):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    assert int(k) == k and k >= 0, "Pochhammer index must be a non-negative integer"
    value = 1.0 + 0j
    for j in range(int(k)):
        value *= a + j
    return value


def laguerre(n, alpha, z):
    """Generalized Laguerre polynomial L_n^(alpha)(z) for complex alpha.

    Uses the finite sum sum_j (-1)^j binom(n+alpha, n-j) z^j / j!, with the
    binomial written as (alpha+j+1)_{n-j} / (n-j)!.

    Parameters
    ----------
    n : int
        Degree, non-negative

    alpha : complex

    z : complex or numpy array
    """
    assert int(n) == n and n >= 0, "Laguerre degree must be a non-negative integer"
    n = int(n)
    z = np.asarray(z, dtype=complex)

    coefficients = [
        (-1) ** j * pochhammer(alpha + j + 1, n - j) / (math.factorial(n - j) * math.factorial(j))
        for j in range(n + 1)
    ]

    # Horner
    value = np.full(z.shape, coefficients[n], dtype=complex)
    for c in reversed(coefficients[:n]):
        value = value * z + c
    return restore(value, z.shape)


def harmonic_offset(k, z, tol_pole=TOL_POLE):
    """H_k(z) = 1/z + 1/(z+1) + ... + 1/(z+k-1); H_0(z) = 0."""
    assert int(k) == k and k >= 0, "Harmonic offset index must be a non-negative integer"
    total = 0j
    for j in range(int(k)):
        if abs(z + j) < tol_pole:
            raise PoleError(f"harmonic_offset term 1/(z+{j}) is singular")
        total += 1.0 / (z + j)
    return total


def principal(op, z, lam=None):
    """Principal ln, sqrt and z^lam with the cut ]-inf, 0] seen from above.

    Parameters
    ----------
    op : str
        One of "ln", "sqrt", "pow"

    z : complex or numpy array

    lam : complex, optional
        Exponent, required for op="pow"
    """
    point = as_polar(z)
    if op == "ln":
        return restore(point.log(), point.shape)
    if op == "sqrt":
        return restore(point.power(0.5), point.shape)
    if op == "pow":
        assert lam is not None, "pow needs an exponent"
        return restore(point.power(lam), point.shape)
    raise ValueError(f"Unknown principal-branch operation '{op}'")


class SpecialCoreTest(TestCase):
    def test_unit_gamma_values(self):
        """Gamma at classical points and against the mpmath oracle"""
        self.assertClose(gamma(1.0), 1.0, rtol=1e-14)
        self.assertClose(gamma(0.5), math.sqrt(math.pi), rtol=1e-14)
        self.assertClose(gamma(0.5 + 2.4j), self.mp_gamma(0.5 + 2.4j), rtol=1e-12)
        self.assertClose(gamma(-3.7 + 0.2j), self.mp_gamma(-3.7 + 0.2j), rtol=1e-12)

    def test_unit_gamma_poles(self):
        with self.assertRaises(PoleError):
            gamma(-2.0)
        with self.assertRaises(PoleError):
            digamma(1e-12)
        self.assertEqual(rgamma(-3.0), 0.0)

    def test_unit_gamma_identities(self):
        """Reflection, recurrence and conjugation on a random sample"""
        z = self.random_complex((-20, 20), (-5, 5), size=1000)
        z = z[np.abs(z - np.round(z.real)) > 0.1]

        reflection = gamma(z) * gamma(1 - z) * np.sin(np.pi * z)
        self.assertClose(reflection, np.full(z.shape, np.pi), rtol=1e-11)

        self.assertClose(gamma(z + 1), z * gamma(z), rtol=1e-12)
        self.assertClose(gamma(np.conj(z)), np.conj(gamma(z)), rtol=1e-13)
        self.assertClose(digamma(z + 1) - digamma(z), 1 / z, rtol=1e-11, atol=1e-11)

    def test_unit_digamma(self):
        euler = 0.5772156649015329
        self.assertClose(digamma(1.0), -euler, rtol=1e-12)
        self.assertClose(digamma(0.5), -euler - 2 * math.log(2), rtol=1e-12)
        self.assertClose(digamma(3.2) - digamma(1.2), harmonic_offset(2, 1.2), rtol=1e-12)

    def test_unit_pochhammer_and_harmonic(self):
        self.assertEqual(pochhammer(3.3 - 1j, 0), 1)
        self.assertEqual(pochhammer(2, 3), 24)
        a = -1.5 + 1j
        self.assertClose(pochhammer(a, 4), a * (a + 1) * (a + 2) * (a + 3), rtol=1e-15)
        self.assertEqual(harmonic_offset(0, 0.3), 0)
        self.assertClose(harmonic_offset(2, 1.0), 1.5)
        z = 0.5 + 1j
        self.assertClose(harmonic_offset(3, z), 1 / z + 1 / (z + 1) + 1 / (z + 2))

    def test_unit_laguerre(self):
        z = np.array([0.0, 0.7, 2.0 - 1j])
        self.assertClose(laguerre(0, 0.4, z), np.ones(3))
        self.assertClose(laguerre(1, 0, z), 1 - z)
        alpha, w = 1 + 0.5j, 2 - 1j
        expected = complex(mpmath.laguerre(3, alpha, w))
        self.assertClose(laguerre(3, alpha, w), expected, rtol=1e-13)

    def test_unit_principal_branches(self):
        self.assertClose(principal("ln", -1.0), 1j * math.pi, rtol=1e-15)
        self.assertClose(principal("ln", complex(-1.0, -0.0)), 1j * math.pi, rtol=1e-15)
        self.assertClose(principal("sqrt", 4.0), 2.0, rtol=1e-15)
        expected = np.exp((0.5 + 1j) * (math.log(2) + 1j * math.pi))
        self.assertClose(principal("pow", -2.0, 0.5 + 1j), expected, rtol=1e-14)
        with self.assertRaises(BranchPointError):
            principal("ln", 0.0)

    def test_unit_power_additivity(self):
        z = self.random_complex((-3, 3), (0.1, 3), size=50)
        a, b = 0.3 - 1.2j, -0.7 + 0.4j
        lhs = principal("pow", z, a + b)
        rhs = principal("pow", z, a) * principal("pow", z, b)
        self.assertClose(lhs, rhs, rtol=1e-12)

    def test_unit_polar_sheets(self):
        """e^{i pi} z and e^{-i pi} z stay distinct under z^lambda"""
        point = PolarPoint.from_complex(2.0)
        up, down = point.rotate(np.pi), point.rotate(-np.pi)
        self.assertClose(up.value, down.value, atol=1e-15)
        self.assertClose(up.power(0.5), 1j * math.sqrt(2), rtol=1e-14)
        self.assertClose(down.power(0.5), -1j * math.sqrt(2), rtol=1e-14)


if __name__ == "__main__":
    unittest.main()
