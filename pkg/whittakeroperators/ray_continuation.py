""" Analytic continuation of Whittaker-equation solutions along a ray.

Between the region where a power series is accurate and the region where the
asymptotic series is, solutions are carried along the ray arg z = const by
Taylor stepping of

    v'' = ((m^2 - 1/4)/z^2 - beta/z + energy) v.

The Taylor coefficients about a centre z0 follow from multiplying the
equation by z^2; each step stays within half the distance to the singular
point z = 0.
"""

import logging

import numpy as np

from .errors import NoConvergence
from .util.test import *

logger = logging.getLogger(__name__)

H_MAX = 2.0
TOL_TAYLOR = 1e-17
MAX_TAYLOR_TERMS = 400


def taylor_coefficients(beta, m, energy, z0, v0, dv0, radius, tol=TOL_TAYLOR):
    """Taylor coefficients of the solution with v(z0) = v0, v'(z0) = dv0.

    Parameters
    ----------
    beta, m : complex
        Whittaker parameters

    energy : complex
        Constant term of the potential (1/4 for the hyperbolic equation)

    z0 : complex
        Expansion centre, non-zero

    radius : float
        Largest |z - z0| the coefficients will be evaluated at. Coefficients
        are generated until c_n radius^n is negligible.
    """
    assert z0 != 0, "Cannot expand about the singular point"
    mu = m * m - 0.25
    z0sq = z0 * z0
    a0 = mu - beta * z0 + energy * z0sq
    a1 = -beta + 2 * energy * z0

    c = [complex(v0), complex(dv0)]
    scale = max(abs(c[0]), abs(c[1]) * radius)
    small_run = 0
    n = 0
    while small_run < 3:
        if n + 2 > MAX_TAYLOR_TERMS:
            raise NoConvergence(f"Taylor expansion about {z0} did not settle")

        numerator = (a0 - n * (n - 1)) * c[n] - 2 * z0 * (n + 1) * n * c[n + 1]
        if n >= 1:
            numerator += a1 * c[n - 1]
        if n >= 2:
            numerator += energy * c[n - 2]
        c.append(numerator / (z0sq * (n + 2) * (n + 1)))

        size = abs(c[-1]) * radius ** (n + 2)
        scale = max(scale, size)
        small_run = small_run + 1 if size <= tol * scale else 0
        n += 1

    return np.array(c)


def evaluate_taylor(c, t):
    """Value and derivative of sum_n c_n t^n for an array of offsets t."""
    t = np.asarray(t, dtype=complex)
    value = np.full(t.shape, c[-1], dtype=complex)
    derivative = np.zeros(t.shape, dtype=complex)
    for coefficient in reversed(c[:-1]):
        derivative = derivative * t + value
        value = value * t + coefficient
    return value, derivative


def continue_along_ray(beta, m, energy, angle, r_start, v0, dv0, r_targets, h_max=H_MAX):
    """Carry (v, v') from r_start e^{i angle} to every r_targets e^{i angle}.

    All targets must lie on the same side of r_start. Returns value and
    z-derivative arrays ordered like `r_targets`.

    Parameters
    ----------
    angle : float
        Ray direction, an exact angle (not reduced to ]-pi, pi])

    r_start : float
        Modulus of the anchor point where (v0, dv0) are known

    r_targets : numpy array
        Moduli of the points to reach
    """
    r_targets = np.asarray(r_targets, dtype=float)
    values = np.empty(r_targets.shape, dtype=complex)
    derivatives = np.empty(r_targets.shape, dtype=complex)
    if r_targets.size == 0:
        return values, derivatives

    direction = 1.0 if np.all(r_targets >= r_start) else -1.0
    assert np.all(direction * (r_targets - r_start) >= 0), "Targets straddle the anchor"

    unit = np.exp(1j * angle)
    order = np.argsort(direction * (r_targets - r_start), kind="stable")
    head = 0

    r_c, v, dv = float(r_start), complex(v0), complex(dv0)
    steps = 0
    while head < order.size:
        rho = min(r_c / 2, h_max)
        c = taylor_coefficients(beta, m, energy, r_c * unit, v, dv, rho)

        tail = head
        while tail < order.size and direction * (r_targets[order[tail]] - r_c) <= rho:
            tail += 1
        if tail > head:
            idx = order[head:tail]
            values[idx], derivatives[idx] = evaluate_taylor(c, (r_targets[idx] - r_c) * unit)
            head = tail

        if head < order.size:
            step = direction * rho
            v_next, dv_next = evaluate_taylor(c, np.array([step * unit]))
            r_c, v, dv = r_c + step, complex(v_next[0]), complex(dv_next[0])
            steps += 1

    logger.debug("continued along ray angle=%.6f from r=%.3g in %d steps", angle, r_start, steps)
    return values, derivatives


class RayContinuationTest(TestCase):
    def test_unit_constant_coefficient_exponential(self):
        """beta = 0, m = 1/2 reduces the equation to v'' = v/4"""
        x = np.array([1.0, 3.3, 7.9, 12.0])
        values, derivatives = continue_along_ray(0.0, 0.5, 0.25, 0.0, 0.5, np.exp(0.25), 0.5 * np.exp(0.25), x)
        self.assertClose(values, np.exp(x / 2), rtol=1e-13)
        self.assertClose(derivatives, 0.5 * np.exp(x / 2), rtol=1e-13)

    def test_unit_inward_along_imaginary_ray(self):
        """e^{-z/2} carried inward along arg z = pi/2"""
        angle = np.pi / 2
        r = np.array([0.7, 2.0, 9.5])
        z0 = 30.0 * 1j
        values, _ = continue_along_ray(0.0, 0.5, 0.25, angle, 30.0, np.exp(-z0 / 2), -0.5 * np.exp(-z0 / 2), r)
        self.assertClose(values, np.exp(-1j * r / 2), rtol=1e-12)

    def test_unit_coulomb_series_seed(self):
        """Continuation reproduces z e^{-z/2} for beta = 1, m = 1/2"""
        z = np.array([2.0, 5.0, 11.0])
        values, _ = continue_along_ray(1.0, 0.5, 0.25, 0.0, 1.0, np.exp(-0.5), 0.5 * np.exp(-0.5), z)
        self.assertClose(values, z * np.exp(-z / 2), rtol=1e-11)


if __name__ == "__main__":
    unittest.main()
