""" Confluent hypergeometric functions: 1F1, its regularized form, the
asymptotic 2F0 series and Tricomi's U, plus the Whittaker W router built on
them.

All functions accept a scalar or numpy array argument `z` with scalar
parameters and return the same shape.
"""

import math
import logging

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AsymptoticDivergence, DegenerateLimitUnstable, DomainError, NoConvergence, PoleError
from .ray_continuation import continue_along_ray
from .special_core import TOL_POLE, PolarPoint, as_polar, pochhammer, pole_distance, restore, rgamma
from .util.test import *

logger = logging.getLogger(__name__)

Z_SWITCH = 40.0
TOL_SERIES = 1e-16
MAX_TERMS = 5000
W_MAX = 0.2
TOL_DEGEN = 1e-6
H_DEGEN = 1e-4
# Below this modulus the Tricomi connection formula is used directly
R_CONNECTION = 4.0
CANCELLATION_DIGITS = 6


@dataclass
class SeriesDiagnostics:
    """Truncation report of a series evaluation (worst case over an array).

    Attributes
    ----------
    terms_used : int
        Number of terms summed

    last_term_ratio : float
        |last term| / |partial sum|

    converged : bool

    error_estimate : float
        Smallest 2F0 term (asymptotic series only)

    cancellation : float
        sum |terms| / |sum|; digits lost are roughly log10 of this
    """

    terms_used: int
    last_term_ratio: float
    converged: bool
    error_estimate: float = 0.0
    cancellation: float = 1.0


class SeriesResult(NamedTuple):
    value: np.ndarray
    derivative: np.ndarray
    abs_sum: np.ndarray
    diagnostics: SeriesDiagnostics


def _ratio(numerator, denominator):
    denominator = np.where(denominator == 0.0, 1.0, denominator)
    return numerator / denominator


def _taylor_1f1(a, c, z, first, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """sum_k first * (a)_k / (c)_k z^k / k! and its z-derivative, for 1-D z."""
    term = np.full(z.shape, first, dtype=complex)
    total = term.copy()
    dtotal = term * (a / c)
    abs_sum = np.abs(term)
    previous_small = np.zeros(z.shape, dtype=bool)
    active = np.ones(z.shape, dtype=bool)

    k = 0
    while np.any(active):
        if k >= max_terms:
            raise NoConvergence(f"1F1({a}; {c}; z) needed more than {max_terms} terms")
        step = (a + k) / ((c + k) * (k + 1)) * z
        term = np.where(active, term * step, term)
        k += 1

        total = np.where(active, total + term, total)
        dtotal = np.where(active, dtotal + term * ((a + k) / (c + k)), dtotal)
        abs_sum = np.where(active, abs_sum + np.abs(term), abs_sum)

        small = np.abs(term) <= tol * np.abs(total)
        decreasing = np.abs((a + k) / ((c + k) * (k + 1)) * z) < 1.0
        done = small & previous_small & decreasing
        previous_small = small
        active &= ~done

    diagnostics = SeriesDiagnostics(
        terms_used=k,
        last_term_ratio=float(np.max(_ratio(np.abs(term), np.abs(total)), initial=0.0)),
        converged=True,
        cancellation=float(np.max(_ratio(abs_sum, np.abs(total)), initial=1.0)),
    )
    return SeriesResult(total, dtotal, abs_sum, diagnostics)


def _kummer_series(a, c, z, first):
    """Taylor sum with Kummer's first identity applied where Re z < 0."""
    flip = z.real < 0
    if not np.any(flip):
        return _taylor_1f1(a, c, z, first)

    value = np.empty(z.shape, dtype=complex)
    derivative = np.empty(z.shape, dtype=complex)
    abs_sum = np.empty(z.shape, dtype=float)
    reports = []

    if np.any(~flip):
        direct = _taylor_1f1(a, c, z[~flip], first)
        value[~flip], derivative[~flip], abs_sum[~flip] = direct[:3]
        reports.append(direct.diagnostics)

    # 1F1(a; c; z) = e^z 1F1(c - a; c; -z)
    flipped = _taylor_1f1(c - a, c, -z[flip], first)
    growth = np.exp(z[flip])
    value[flip] = growth * flipped.value
    derivative[flip] = growth * (flipped.value - flipped.derivative)
    abs_sum[flip] = np.abs(growth) * flipped.abs_sum
    reports.append(flipped.diagnostics)

    diagnostics = SeriesDiagnostics(
        terms_used=max(r.terms_used for r in reports),
        last_term_ratio=max(r.last_term_ratio for r in reports),
        converged=True,
        cancellation=float(np.max(_ratio(abs_sum, np.abs(value)), initial=1.0)),
    )
    return SeriesResult(value, derivative, abs_sum, diagnostics)


def nonpositive_integer_shift(c, tol_pole=TOL_POLE):
    """p such that c = 1 - p with p >= 1, if c sits on a pole of Gamma; else None."""
    if pole_distance(c) < tol_pole:
        return int(round(1 - complex(c).real))
    return None


def regularized_series(a, c, z):
    """Regularized 1F1 with derivative and cancellation data for a 1-D array z."""
    z = np.asarray(z, dtype=complex)
    p = nonpositive_integer_shift(c)
    if p is None:
        return _kummer_series(a, c, z, complex(rgamma(c)))

    # 1F1reg(a; 1-p; z) = (a)_p z^p 1F1reg(a+p; 1+p; z)
    inner = _kummer_series(a + p, 1 + p, z, 1.0 / math.factorial(p))
    prefactor = pochhammer(a, p)
    zp = z**p
    value = prefactor * zp * inner.value
    derivative = prefactor * (p * z ** (p - 1) * inner.value + zp * inner.derivative)
    abs_sum = abs(prefactor) * np.abs(zp) * inner.abs_sum
    return SeriesResult(value, derivative, abs_sum, inner.diagnostics)


def _check_series_domain(z, z_switch):
    if np.any(np.abs(z) > z_switch):
        raise DomainError(f"|z| exceeds the series switch radius {z_switch}")


def kummer_1f1(a, c, z, z_switch=Z_SWITCH):
    """Kummer's function 1F1(a; c; z) by its Taylor series.

    Returns
    -------
    (value, SeriesDiagnostics)
    """
    if pole_distance(c) < TOL_POLE:
        raise PoleError(f"1F1 denominator parameter {c} is a pole; use regularized_1f1")
    z = np.asarray(z, dtype=complex)
    _check_series_domain(z, z_switch)
    result = _kummer_series(a, c, z.ravel(), 1.0)
    return restore(result.value, z.shape), result.diagnostics


def regularized_1f1(a, c, z, z_switch=Z_SWITCH):
    """1F1(a; c; z) / Gamma(c), entire in c."""
    z = np.asarray(z, dtype=complex)
    _check_series_domain(z, z_switch)
    return restore(regularized_series(a, c, z.ravel()).value, z.shape)


def f20_series(a, b, w, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """Optimally truncated 2F0(a, b; -; w), its w-derivative and error estimate."""
    # Sorting makes the result exactly symmetric in (a, b)
    a, b = sorted((complex(a), complex(b)), key=lambda p: (p.real, p.imag))
    w = np.asarray(w, dtype=complex)

    if np.any(np.abs(a * b * w) > 1.0):
        raise AsymptoticDivergence(f"2F0({a}, {b}) first correction exceeds 1 at |w|={np.max(np.abs(w)):.3g}")

    term = np.ones(w.shape, dtype=complex)
    total = term.copy()
    dtotal = np.zeros(w.shape, dtype=complex)
    error = np.zeros(w.shape, dtype=float)
    active = np.ones(w.shape, dtype=bool)
    safe_w = np.where(w == 0, 1.0, w)

    n = 0
    while np.any(active):
        n += 1
        if n > max_terms:
            raise NoConvergence("2F0 optimal truncation did not terminate")
        candidate = term * ((a + n - 1) * (b + n - 1) / n) * w

        growing = active & (np.abs(candidate) > np.abs(term))
        error = np.where(growing, np.abs(term), error)
        active &= ~growing

        total = np.where(active, total + candidate, total)
        dtotal = np.where(active, dtotal + candidate * n / safe_w, dtotal)
        term = np.where(active, candidate, term)

        settled = active & (np.abs(candidate) <= tol * np.abs(total))
        error = np.where(settled, np.abs(candidate), error)
        active &= ~settled

    dtotal = np.where(w == 0, a * b, dtotal)
    diagnostics = SeriesDiagnostics(
        terms_used=n,
        last_term_ratio=float(np.max(_ratio(error, np.abs(total)), initial=0.0)),
        converged=True,
        error_estimate=float(np.max(error, initial=0.0)),
    )
    return SeriesResult(total, dtotal, error, diagnostics)


def f20_asymptotic(a, b, w, w_max=W_MAX):
    """Asymptotic series 2F0(a, b; -; w) with optimal truncation.

    The series sums until the first term whose modulus exceeds its
    predecessor; that term is dropped and the smallest included term is
    reported as the error estimate.

    Returns
    -------
    (value, SeriesDiagnostics)
    """
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) > w_max):
        raise DomainError(f"|w| exceeds {w_max}")
    result = f20_series(a, b, w.ravel())
    return restore(result.value, w.shape), result.diagnostics


def asymptotic_radius(a, b, z_switch=Z_SWITCH):
    """Modulus beyond which 2F0(a, b; -1/z) is trusted for these parameters."""
    return max(z_switch, 2.0 * (1.0 + abs(a)) * (1.0 + abs(b)))


def _compensated_connection(a, c, z, zpow, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """Tricomi connection formula at one point with exactly rounded summation."""
    parts = []
    for (alpha, gamma_c, weight) in (
        (a, c, complex(rgamma(1 + a - c))),
        (1 + a - c, 2 - c, -complex(rgamma(a)) * zpow),
    ):
        term = complex(rgamma(gamma_c)) * weight
        largest = abs(term)
        parts.append(term)
        for k in range(max_terms):
            term *= (alpha + k) / ((gamma_c + k) * (k + 1)) * z
            parts.append(term)
            largest = max(largest, abs(term))
            if abs(term) <= tol * largest and abs((alpha + k + 1) * z) < abs((gamma_c + k + 1) * (k + 2)):
                break
    total = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    return np.pi / np.sin(np.pi * c) * total


def _u_connection(a, c, point):
    """U(a, c, z) = pi/sin(pi c) [1F1reg(a;c;z)/Gamma(1+a-c) - z^{1-c} 1F1reg(1+a-c;2-c;z)/Gamma(a)]."""
    z = point.value
    first = complex(rgamma(1 + a - c)) * regularized_series(a, c, z).value
    zpow = point.power(1 - c)
    second = complex(rgamma(a)) * zpow * regularized_series(1 + a - c, 2 - c, z).value
    value = np.pi / np.sin(np.pi * c) * (first - second)

    scale = np.maximum(np.abs(first), np.abs(second))
    cancelled = (scale > 0) & (np.abs(first - second) < 10.0 ** (-CANCELLATION_DIGITS) * scale)
    for i in np.flatnonzero(cancelled):
        logger.warning("U(%s, %s, %s): connection terms cancel, using compensated summation", a, c, z[i])
        value[i] = _compensated_connection(a, c, complex(z[i]), complex(zpow[i]))
    return value


def _u_near_zero(a, c, point, tol_degen=TOL_DEGEN, h_degen=H_DEGEN):
    """U for small |z|: connection formula, or its central-difference limit in c."""
    if abs(c - round(complex(c).real)) >= tol_degen:
        return _u_connection(a, c, point)

    # Richardson-extrapolated symmetric difference in c
    near = (_u_connection(a, c + h_degen, point) + _u_connection(a, c - h_degen, point)) / 2
    far = (_u_connection(a, c + 2 * h_degen, point) + _u_connection(a, c - 2 * h_degen, point)) / 2
    value = (4 * near - far) / 3
    disagreement = np.abs(near - far)
    if np.any(disagreement > 1e-6 * np.maximum(np.abs(value), 1e-300)):
        raise DegenerateLimitUnstable(f"U({a}, {c}, z): central differences disagree beyond 1e-6")
    return value


def _w_asymptotic(kappa, mu, point):
    """W and W' from z^kappa e^{-z/2} 2F0(1/2+mu-kappa, 1/2-mu-kappa; -; -1/z)."""
    z = point.value
    series = f20_series(0.5 + mu - kappa, 0.5 - mu - kappa, -1.0 / z)
    envelope = point.power(kappa) * np.exp(-z / 2)
    value = envelope * series.value
    derivative = value * (kappa / z - 0.5) + envelope * series.derivative / z**2
    return value, derivative


def _w_small(kappa, mu, point):
    """W and W' from z^{1/2+mu} e^{-z/2} U(a, c, z), U' = -a U(a+1, c+1, z)."""
    a, c = 0.5 + mu - kappa, 1 + 2 * mu
    z = point.value
    envelope = point.power(0.5 + mu) * np.exp(-z / 2)
    value = envelope * _u_near_zero(a, c, point)
    derivative = value * ((0.5 + mu) / z - 0.5) - a * envelope * _u_near_zero(a + 1, c + 1, point)
    return value, derivative


def whittaker_w(kappa, mu, z, derivative=False, small_route=None):
    """Whittaker W_{kappa,mu}(z) = z^{1/2+mu} e^{-z/2} U(1/2+mu-kappa; 1+2mu; z).

    Large |z| uses the 2F0 series; |z| <= R_CONNECTION uses `small_route`
    (Tricomi connection by default); in between the solution is continued
    along the ray, inward from the asymptotic anchor when |arg z| <= pi/2
    and outward from the connection anchor otherwise.

    Parameters
    ----------
    kappa, mu : complex

    z : complex, numpy array or PolarPoint

    derivative : bool, optional
        Also return dW/dz

    small_route : callable, optional
        fn(PolarPoint) -> (value, derivative) used for |z| <= R_CONNECTION
    """
    if small_route is None:
        small_route = lambda point: _w_small(kappa, mu, point)

    point = as_polar(z)
    shape = point.shape
    flat = point.ravel()
    r, theta = flat.modulus, flat.angle
    if np.any(r == 0):
        raise DomainError("W is evaluated at z != 0 only")

    value = np.empty(r.shape, dtype=complex)
    deriv = np.empty(r.shape, dtype=complex)

    r_anchor = asymptotic_radius(0.5 + mu - kappa, 0.5 - mu - kappa)
    big = r > r_anchor
    small = r <= R_CONNECTION
    mid = ~big & ~small

    if np.any(big):
        value[big], deriv[big] = _w_asymptotic(kappa, mu, flat.take(big))
    if np.any(small):
        value[small], deriv[small] = small_route(flat.take(small))

    for angle in np.unique(theta[mid]):
        on_ray = mid & (theta == angle)
        if abs(angle) <= np.pi / 2:
            r_start = r_anchor
            v0, dv0 = _w_asymptotic(kappa, mu, PolarPoint(np.array([r_start]), np.array([angle])))
        else:
            r_start = R_CONNECTION
            v0, dv0 = small_route(PolarPoint(np.array([r_start]), np.array([angle])))
        value[on_ray], deriv[on_ray] = continue_along_ray(
            kappa, mu, 0.25, angle, r_start, v0[0], dv0[0], r[on_ray]
        )

    if derivative:
        return restore(value, shape), restore(deriv, shape)
    return restore(value, shape)


def tricomi_u(a, c, z, z_switch=Z_SWITCH):
    """Tricomi's confluent hypergeometric function U(a, c, z).

    Parameters
    ----------
    a, c : complex

    z : complex, numpy array or PolarPoint
        z != 0; principal branch unless a PolarPoint fixes the sheet
    """
    point = as_polar(z)
    shape = point.shape
    flat = point.ravel()
    r = flat.modulus
    if np.any(r == 0):
        raise DomainError("U is evaluated at z != 0 only")

    value = np.empty(r.shape, dtype=complex)
    big = r > asymptotic_radius(a, a - c + 1, z_switch)
    small = r <= R_CONNECTION
    mid = ~big & ~small

    if np.any(big):
        far = flat.take(big)
        value[big] = far.power(-a) * f20_series(a, a - c + 1, -1.0 / far.value).value
    if np.any(small):
        value[small] = _u_near_zero(a, c, flat.take(small))
    if np.any(mid):
        inner = flat.take(mid)
        kappa, mu = c / 2 - a, (c - 1) / 2
        w = whittaker_w(kappa, mu, inner)
        value[mid] = w * inner.power(-c / 2) * np.exp(inner.value / 2)

    return restore(value, shape)


class HypergeometricTest(TestCase):
    def test_unit_kummer_trivial(self):
        value, diagnostics = kummer_1f1(0.3 - 0.2j, 1.7, 0.0)
        self.assertEqual(value, 1.0)
        z = np.array([0.5, -3.0 + 1j, 12.0])
        value, _ = kummer_1f1(2.5 + 1j, 2.5 + 1j, z)
        self.assertClose(value, np.exp(z), rtol=1e-14)
        self.assertTrue(diagnostics.converged)

    def test_unit_kummer_oracle(self):
        value, diagnostics = kummer_1f1(0.5, 1.5, 1.0)
        self.assertClose(value, self.mp_1f1(0.5, 1.5, 1.0), rtol=1e-14)
        self.assertLess(diagnostics.last_term_ratio, 1e-15)

    def test_unit_kummer_pole_rejected(self):
        with self.assertRaises(PoleError):
            kummer_1f1(1.0, -2.0, 0.5)
        with self.assertRaises(DomainError):
            kummer_1f1(1.0, 2.0, 50.0)

    def test_unit_regularized(self):
        self.assertClose(regularized_1f1(0.4, 2.3 - 1j, 0.0), rgamma(2.3 - 1j), rtol=1e-15)
        # 1F1reg(1; -1; z) = z^2 e^z
        self.assertClose(regularized_1f1(1.0, -1.0, 1.0), math.e, rtol=1e-14)
        self.assertClose(regularized_1f1(1.0, -1.0, -2.0), 4 * math.exp(-2.0), rtol=1e-13)
        expected = self.mp_1f1(0.5 - 1j, 2.3, 1 + 2j) * complex(mpmath.rgamma(2.3))
        self.assertClose(regularized_1f1(0.5 - 1j, 2.3, 1 + 2j), expected, rtol=1e-13)

    def test_unit_kummer_identity(self):
        """1F1(a; c; z) = e^z 1F1(c-a; c; -z) on a random sample"""
        for _ in range(40):
            a = self.random_complex((-3, 3), (-2, 2))
            c = self.random_complex((0.5, 4), (-2, 2))
            z = self.random_complex((-14, 14), (-14, 14))
            lhs, _ = kummer_1f1(a, c, z)
            rhs, _ = kummer_1f1(c - a, c, -z)
            self.assertClose(lhs, np.exp(z) * rhs, rtol=1e-10)

    def test_unit_confluent_equation(self):
        """Second-difference residual of z v'' + (c - z) v' - a v = 0"""
        a, c = 0.7 - 0.3j, 1.9
        z = np.linspace(0.5, 8.0, 40)
        h = 1e-3
        v = lambda s: kummer_1f1(a, c, s)[0]
        d1 = (v(z + h) - v(z - h)) / (2 * h)
        d2 = (v(z + h) - 2 * v(z) + v(z - h)) / h**2
        residual = z * d2 + (c - z) * d1 - a * v(z)
        self.assertLess(np.max(np.abs(residual) / np.abs(a * v(z))), 1e-6)

    def test_unit_f20(self):
        value, _ = f20_asymptotic(0.3 + 1j, -2.1, 0.0)
        self.assertEqual(value, 1.0)
        w = np.array([-0.05, 0.02 + 0.1j])
        self.assertEqual(
            f20_asymptotic(0.7, 1.3 - 0.5j, w)[0].tolist(),
            f20_asymptotic(1.3 - 0.5j, 0.7, w)[0].tolist(),
        )
        with self.assertRaises(AsymptoticDivergence):
            f20_asymptotic(5.0, 5.0, 0.1)

    def test_unit_f20_against_tricomi(self):
        """U(a, c, z) = z^{-a} 2F0(a, a-c+1; -; -1/z) at z = 20"""
        a, b = 0.7, 1.3
        c = a - b + 1
        value, diagnostics = f20_asymptotic(a, b, -0.05)
        expected = self.mp_hyperu(a, c, 20.0) * 20.0**a
        self.assertClose(value, expected, rtol=10 * diagnostics.error_estimate + 1e-12)

    def test_unit_tricomi_truncating(self):
        z = np.array([0.3, 2.5 - 1j, 17.0 + 6j, 55.0])
        a = 0.35 + 0.4j
        self.assertClose(tricomi_u(a, a + 1, z), PolarPoint.from_complex(z).power(-a), rtol=1e-12)

    def test_unit_tricomi_oracle(self):
        for (a, c, z) in [
            (0.5, 1.5, 2.0),
            (1.2 - 0.5j, 2.7, 0.8 + 0.3j),
            (0.3, 0.45, 9.0),
            (-0.4 + 1j, 1.3 - 0.2j, 25.0 - 10j),
            (0.8, 1.6, -6.0 + 2j),
        ]:
            with self.subTest(a=a, c=c, z=z):
                self.assertClose(tricomi_u(a, c, z), self.mp_hyperu(a, c, z), rtol=1e-10)

    def test_unit_tricomi_degenerate_limit(self):
        """U(1, 1, 1) through the central-difference limit in c"""
        self.assertClose(tricomi_u(1.0, 1.0, 1.0), self.mp_hyperu(1, 1, 1), rtol=1e-9)
        self.assertClose(tricomi_u(0.3 + 0.2j, 3.0, 1.7), self.mp_hyperu(0.3 + 0.2j, 3, 1.7), rtol=1e-9)

    def test_unit_region_overlap(self):
        """Continued values below the switch meet the asymptotic route above it"""
        for (a, c) in [(0.7, 1.3), (0.2 + 0.5j, 1.9 - 0.3j), (1.5, 0.6)]:
            for angle in [0.0, 0.9, np.pi / 2, 2.5]:
                z = np.array([0.8, 1.0, 1.25]) * Z_SWITCH * np.exp(1j * angle)
                with self.subTest(a=a, c=c, angle=angle):
                    expected = np.array([self.mp_hyperu(a, c, s) for s in z])
                    self.assertClose(tricomi_u(a, c, z), expected, rtol=1e-8)

    def test_unit_whittaker_w_oracle(self):
        z = np.array([0.2, 3.0 + 1j, 7.5, 15.0j, -9.0 + 4j, 61.0])
        for kappa, mu in [(0.4, 0.7), (1.1 - 0.3j, 0.25 + 0.5j), (-0.6, 1.0)]:
            with self.subTest(kappa=kappa, mu=mu):
                expected = np.array([self.mp_K(kappa, mu, s) for s in z])
                self.assertClose(whittaker_w(kappa, mu, z), expected, rtol=1e-9)


if __name__ == "__main__":
    unittest.main()
