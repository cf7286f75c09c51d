""" Canonical solutions of the hyperbolic and trigonometric Whittaker equations.

    hyperbolic:     v'' = ((m^2 - 1/4)/z^2 - beta/z + 1/4) v   (I, K)
    trigonometric:  v'' = ((m^2 - 1/4)/z^2 - beta/z - 1/4) v   (J, H+, H-)
    zero energy:    v'' = ((m^2 - 1/4)/x^2 - beta/x) v         (j, y)

Normalizations: I = M / Gamma(1 + 2m) and K = W in terms of the classical
Whittaker functions M and W.

Every evaluator takes a scalar, a numpy array or a PolarPoint argument and
returns the matching shape. Arguments given as complex numbers use the
principal branch; PolarPoint arguments select the sheet exactly.
"""

import math
import logging

from enum import Enum
from dataclasses import dataclass

import numpy as np

from .errors import BranchPointError, DegenerateCase, DomainError, NoConvergence, SingularFamilyPoint, UnsupportedCase
from .hypergeometric import MAX_TERMS, TOL_DEGEN, TOL_SERIES, asymptotic_radius, f20_series, regularized_series, whittaker_w
from .ray_continuation import continue_along_ray
from .special_core import (
    TOL_POLE,
    PolarPoint,
    as_polar,
    check_finite,
    digamma,
    gamma,
    laguerre,
    pochhammer,
    pole_distance,
    restore,
    rgamma,
)
from .util.test import *

logger = logging.getLogger(__name__)

# Moduli above this are reached from the power series by continuation when
# the series has lost digits
R_SEED = 4.0
CANCELLATION_LIMIT = 1e-13
DISCREPANCY_WARN = 1e-8
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class WhittakerParams:
    """Coupling beta and index m of the Whittaker operator, alpha = m^2.

    Function evaluation accepts any (beta, m); `require_spectral` applies
    the restrictions of the operator family.
    """

    beta: complex
    m: complex

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "m", complex(self.m))
        check_finite(np.array([self.beta, self.m]))

    @property
    def alpha(self):
        return self.m * self.m

    @property
    def is_singular_family_point(self):
        return self.beta == 0 and self.m == -0.5

    def require_spectral(self):
        if self.m.real <= -1:
            raise DomainError(f"Re(m) > -1 is required, got m={self.m}")
        if self.is_singular_family_point:
            raise SingularFamilyPoint("(beta, m) = (0, -1/2) is the singular point of the family")
        return self

    def conjugate(self):
        return WhittakerParams(self.beta.conjugate(), self.m.conjugate())


class SolutionKind(Enum):
    I = "I"
    K = "K"
    J = "J"
    H_PLUS = "Hplus"
    H_MINUS = "Hminus"
    J_ZERO = "j_zero"
    Y_ZERO = "y_zero"

    @property
    def equation(self):
        if self in (SolutionKind.I, SolutionKind.K):
            return "hyperbolic"
        if self in (SolutionKind.J_ZERO, SolutionKind.Y_ZERO):
            return "zero_energy"
        return "trigonometric"

    @property
    def sign(self):
        return {SolutionKind.H_PLUS: 1, SolutionKind.H_MINUS: -1}.get(self)


def as_sign(sign):
    """Normalize '+', '-', +1, -1 to +1 or -1."""
    if sign in ("+", "plus", 1):
        return 1
    if sign in ("-", "minus", -1):
        return -1
    raise ValueError(f"Unknown sign '{sign}'")


def natural_index(value, tol=TOL_POLE):
    """n if `value` is within tol of n in {0, 1, 2, ...}, else None."""
    value = complex(value)
    n = round(value.real)
    if n >= 0 and abs(value - n) < tol:
        return int(n)
    return None


def degenerate_order(m, tol_degen=TOL_DEGEN):
    """p = 2m if 2m is within tol_degen of an integer, else None."""
    p = round(2 * complex(m).real)
    if abs(2 * m - p) < tol_degen:
        return int(p)
    return None


def _laguerre_pair(n, m, point, eps, factor):
    """factor z^{1/2+m} e^{eps z/2} L_n^{(2m)}(-eps z) and its derivative."""
    s = 0.5 + m
    z = point.value
    envelope = factor * point.power(s) * np.exp(eps * z / 2)
    value = envelope * laguerre(n, 2 * m, -eps * z)
    lower = laguerre(n - 1, 2 * m + 1, -eps * z) if n > 0 else 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        derivative = value * (s / z + eps / 2) + envelope * eps * lower
    return np.atleast_1d(value), np.atleast_1d(derivative)


def _log_discrepancy(name, first, second):
    if first.size == 0:
        return
    scale = max(float(np.max(np.abs(first + second))) / 2, 1e-300)
    discrepancy = float(np.max(np.abs(first - second))) / scale
    logger.debug("%s: two evaluation variants differ by %.3e relative", name, discrepancy)
    if discrepancy > DISCREPANCY_WARN:
        logger.warning("%s: evaluation variants disagree, relative discrepancy %.3e", name, discrepancy)


# I


def _i_series(beta, m, point):
    s = 0.5 + m
    z = point.value
    series = regularized_series(s - beta, 1 + 2 * m, z)
    envelope = point.power(s) * np.exp(-z / 2)
    value = envelope * series.value
    derivative = value * (s / z - 0.5) + envelope * series.derivative
    loss = series.abs_sum / np.maximum(np.abs(series.value), 1e-300) * EPS
    return value, derivative, loss


def _i_asymptotic(beta, m, point):
    """Two-exponential large-|z| form, valid for |arg z| <= pi/2."""
    a = 0.5 + m - beta
    z, theta = point.value, point.angle
    phase = np.where(theta > 0, np.exp(1j * np.pi * a), np.where(theta < 0, np.exp(-1j * np.pi * a), np.cos(np.pi * a)))

    recessive = f20_series(a, 0.5 - m - beta, -1.0 / z)
    dominant = f20_series(0.5 + m + beta, 0.5 - m + beta, 1.0 / z)
    e1 = phase * rgamma(0.5 + m + beta) * point.power(beta) * np.exp(-z / 2)
    e2 = rgamma(a) * point.power(-beta) * np.exp(z / 2)
    t1 = e1 * recessive.value
    t2 = e2 * dominant.value

    value = t1 + t2
    derivative = (
        t1 * (beta / z - 0.5)
        + e1 * recessive.derivative / z**2
        + t2 * (0.5 - beta / z)
        - e2 * dominant.derivative / z**2
    )
    return value, derivative


def _i_reduced(beta, m, point):
    """I and I' for |arg z| <= pi/2 and z != 0."""
    r, theta = point.modulus, point.angle
    value = np.empty(r.shape, dtype=complex)
    derivative = np.empty(r.shape, dtype=complex)

    r_anchor = max(asymptotic_radius(0.5 + m - beta, 0.5 - m - beta), asymptotic_radius(0.5 + m + beta, 0.5 - m + beta))
    big = r > r_anchor
    near = ~big
    if np.any(big):
        value[big], derivative[big] = _i_asymptotic(beta, m, point.take(big))
    if not np.any(near):
        return value, derivative

    value[near], derivative[near], loss = _i_series(beta, m, point.take(near))
    lossy = np.zeros(r.shape, dtype=bool)
    lossy[near] = (loss > CANCELLATION_LIMIT) & (r[near] > R_SEED)

    for angle in np.unique(theta[lossy]):
        on_ray = lossy & (theta == angle)
        seed = PolarPoint(np.array([R_SEED]), np.array([angle]))
        v0, dv0, _ = _i_series(beta, m, seed)
        value[on_ray], derivative[on_ray] = continue_along_ray(
            beta, m, 0.25, angle, R_SEED, v0[0], dv0[0], r[on_ray]
        )
    logger.debug(
        "I(%s, %s): %d asymptotic, %d series, %d continued", beta, m, big.sum(), near.sum() - lossy.sum(), lossy.sum()
    )
    return value, derivative


def _i_pair(beta, m, point):
    flat = point.ravel()
    s = 0.5 + m

    n = natural_index(beta - s)
    if n is not None:
        return _laguerre_pair(n, m, flat, -1, math.factorial(n) * rgamma(1 + 2 * m + n))
    n = natural_index(-beta - s)
    if n is not None:
        return _laguerre_pair(n, m, flat, 1, math.factorial(n) * rgamma(1 + 2 * m + n))

    value = np.empty(flat.modulus.shape, dtype=complex)
    derivative = np.full(flat.modulus.shape, np.nan, dtype=complex)

    zero = flat.modulus == 0
    if np.any(zero):
        value[zero] = flat.take(zero).power(s) * rgamma(1 + 2 * m)

    # I_{beta,m}(e^{i k pi} w) = e^{i k pi (1/2+m)} I_{(-1)^k beta, m}(w)
    turns = np.round(flat.angle / np.pi)
    for k in np.unique(turns[~zero]):
        sel = (turns == k) & ~zero
        reduced = PolarPoint(flat.modulus[sel], flat.angle[sel] - k * np.pi)
        flip = (-1) ** int(k)
        v, d = _i_reduced(flip * beta, m, reduced)
        phase = np.exp(1j * k * np.pi * s)
        value[sel] = phase * v
        derivative[sel] = phase * flip * d
    return value, derivative


def eval_I(p, z):
    """I_{beta,m}(z) = z^{1/2+m} e^{-z/2} 1F1(1/2+m-beta; 1+2m; z) / Gamma(1+2m).

    Entire in (beta, m). Exact Laguerre forms are used when 1/2+m-beta or
    1/2+m+beta is a non-positive integer; otherwise the power series, its
    continuation along the ray, or the large-|z| two-exponential form.

    Parameters
    ----------
    p : WhittakerParams

    z : complex, numpy array or PolarPoint
    """
    point = as_polar(z)
    value, _ = _i_pair(p.beta, p.m, point)
    return restore(value, point.shape)


# K


def degenerate_k_series(beta, p, z, derivative=False, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """K_{beta,p/2}(z) for integer p >= 0 from its logarithmic series.

    K = (-1)^{p+1}/Gamma(a-p) [ln z I_{beta,p/2}(z)
          + e^{-z/2} sum_k (a)_k z^{(1+p)/2+k} / ((p+k)! k!)
                       (psi(a+k) - psi(1+k) - psi(p+1+k))]
      + e^{-z/2}/Gamma(a) sum_{k=1}^{p} (k-1)! (1-a+k)_{p-k} / (p-k)! z^{(1+p)/2-k}

    with a = (1+p)/2 - beta. For p = 0 the finite sum is empty.
    """
    assert int(p) == p and p >= 0, "Degenerate order must be a non-negative integer"
    p = int(p)
    point = as_polar(z)
    flat = point.ravel()
    if np.any(flat.modulus == 0):
        raise BranchPointError("K is logarithmic at z = 0")

    a = (1 + p) / 2 - beta
    if natural_index(-a) is not None:
        raise DomainError(f"K_({beta}, {p / 2}) is a Laguerre polynomial case; the series does not apply")

    s = (1 + p) / 2
    zv = flat.value
    lnz = flat.log()
    i_value, i_derivative = _i_pair(beta, p / 2, flat)

    total = np.zeros(zv.shape, dtype=complex)
    dtotal = np.zeros(zv.shape, dtype=complex)
    zk = np.ones(zv.shape, dtype=complex)
    zk_prev = np.zeros(zv.shape, dtype=complex)
    coefficient = 1.0 / math.factorial(p)
    psi_a, psi_1, psi_p = digamma(a), digamma(1.0), digamma(p + 1.0)

    previous_small = False
    for k in range(max_terms):
        weight = coefficient * (psi_a - psi_1 - psi_p)
        term = weight * zk
        total += term
        dtotal += k * weight * zk_prev

        small = bool(np.all(np.abs(term) <= tol * np.abs(total)))
        next_ratio = np.abs((a + k) / ((p + k + 1) * (k + 1)) * zv)
        if k > 0 and small and previous_small and np.all(next_ratio < 1.0):
            break
        previous_small = small

        coefficient *= (a + k) / ((p + k + 1) * (k + 1))
        psi_a += 1.0 / (a + k)
        psi_1 += 1.0 / (1 + k)
        psi_p += 1.0 / (p + 1 + k)
        zk_prev, zk = zk, zk * zv
    else:
        raise NoConvergence(f"degenerate K series for beta={beta}, p={p} did not converge")

    envelope = flat.power(s) * np.exp(-zv / 2)
    prefactor = (-1) ** (p + 1) * rgamma(a - p)
    value = prefactor * (lnz * i_value + envelope * total)
    deriv = prefactor * (i_value / zv + lnz * i_derivative + envelope * (total * (s / zv - 0.5) + dtotal))

    ra = rgamma(a)
    for k in range(1, p + 1):
        weight = ra * math.factorial(k - 1) * pochhammer(1 - a + k, p - k) / math.factorial(p - k)
        g = weight * flat.power(s - k) * np.exp(-zv / 2)
        value = value + g
        deriv = deriv + g * ((s - k) / zv - 0.5)

    if derivative:
        return restore(value, point.shape), restore(deriv, point.shape)
    return restore(value, point.shape)


def _k_pair(beta, m, point):
    flat = point.ravel()

    for index in (m, -m):
        n = natural_index(beta - 0.5 - index)
        if n is not None:
            return _laguerre_pair(n, index, flat, -1, (-1) ** n * math.factorial(n))

    p = degenerate_order(m)
    if p is not None:
        order = abs(p)
        logger.debug("K(%s, %s): degenerate series with p=%d", beta, m, order)
        small_route = lambda q: degenerate_k_series(beta, order, q, derivative=True)
        value, derivative = whittaker_w(beta, order / 2, flat, derivative=True, small_route=small_route)
    else:
        value, derivative = whittaker_w(beta, m, flat, derivative=True)
    return np.atleast_1d(value), np.atleast_1d(derivative)


def eval_K(p, z):
    """K_{beta,m}(z) = z^{1/2+m} e^{-z/2} U(1/2+m-beta; 1+2m; z), symmetric in m.

    For 2m within TOL_DEGEN of an integer the logarithmic series replaces the
    Tricomi connection formula near zero.

    Parameters
    ----------
    p : WhittakerParams

    z : complex, numpy array or PolarPoint
        z != 0
    """
    point = as_polar(z)
    value, _ = _k_pair(p.beta, p.m, point)
    return restore(value, point.shape)


# J and H


def _j_pair(beta, m, point):
    flat = point.ravel()
    s = 0.5 + m
    up_value, up_derivative = _i_pair(-1j * beta, m, flat.rotate(np.pi / 2))
    low_value, low_derivative = _i_pair(1j * beta, m, flat.rotate(-np.pi / 2))
    up_phase, low_phase = np.exp(-1j * np.pi * s / 2), np.exp(1j * np.pi * s / 2)

    upper, upper_derivative = up_phase * up_value, up_phase * 1j * up_derivative
    lower, lower_derivative = low_phase * low_value, -low_phase * 1j * low_derivative
    _log_discrepancy(f"J({beta}, {m})", upper, lower)
    return (upper + lower) / 2, (upper_derivative + lower_derivative) / 2


def eval_J(p, z):
    """J_{beta,m}(z) = e^{-+i pi(1/2+m)/2} I_{-+i beta,m}(e^{+-i pi/2} z).

    Both rotations are evaluated; the mean is returned and their
    discrepancy is logged.
    """
    point = as_polar(z)
    value, _ = _j_pair(p.beta, p.m, point)
    return restore(value, point.shape)


def _h_pair(beta, m, sign, point):
    flat = point.ravel()

    def rotated(index):
        phase = np.exp(-sign * 1j * np.pi * (0.5 + index) / 2)
        v, d = _k_pair(sign * 1j * beta, index, flat.rotate(-sign * np.pi / 2))
        return phase * v, phase * (-sign * 1j) * d

    direct, direct_derivative = rotated(m)
    # H_{beta,m} = e^{-+i pi m} H_{beta,-m}
    factor = np.exp(-sign * 1j * np.pi * m)
    reflected, reflected_derivative = rotated(-m)
    reflected, reflected_derivative = factor * reflected, factor * reflected_derivative
    _log_discrepancy(f"H{'+' if sign > 0 else '-'}({beta}, {m})", direct, reflected)
    return (direct + reflected) / 2, (direct_derivative + reflected_derivative) / 2


def eval_H(p, sign, z):
    """H+-_{beta,m}(z) = e^{-+i pi(1/2+m)/2} K_{+-i beta,m}(e^{-+i pi/2} z).

    The m-reflected evaluation e^{-+i pi m} H+-_{beta,-m} is computed
    alongside; the mean is returned and the discrepancy logged.

    Parameters
    ----------
    p : WhittakerParams

    sign : '+', '-', 1 or -1

    z : complex, numpy array or PolarPoint
    """
    sign = as_sign(sign)
    point = as_polar(z)
    value, _ = _h_pair(p.beta, p.m, sign, point)
    return restore(value, point.shape)


def whittaker_derivative(kind, p, z):
    """(value, d/dz value) for kind in I, K, J, Hplus, Hminus."""
    kind = SolutionKind(kind)
    point = as_polar(z)
    if kind is SolutionKind.I:
        pair = _i_pair(p.beta, p.m, point)
    elif kind is SolutionKind.K:
        pair = _k_pair(p.beta, p.m, point)
    elif kind is SolutionKind.J:
        pair = _j_pair(p.beta, p.m, point)
    elif kind.sign is not None:
        pair = _h_pair(p.beta, p.m, kind.sign, point)
    else:
        raise UnsupportedCase(f"No derivative route for {kind.value}")
    return restore(pair[0], point.shape), restore(pair[1], point.shape)


# Dimension-1 Bessel functions from the beta = 0 Whittaker functions


def bessel_h(mu, sign, w):
    """Hankel function for dimension 1, H+-_mu(w) = H+-_{0,mu}(2w)."""
    return eval_H(WhittakerParams(0.0, mu), sign, as_polar(w).scale(2.0))


def bessel_j(mu, w):
    """Bessel function for dimension 1, J_mu(w) = Gamma(1/2+mu)/2 J_{0,mu}(2w)."""
    point = as_polar(w)
    if pole_distance(0.5 + mu) < TOL_POLE:
        return (bessel_h(mu, 1, point) + bessel_h(mu, -1, point)) / 2
    return gamma(0.5 + mu) / 2 * eval_J(WhittakerParams(0.0, mu), point.scale(2.0))


def bessel_y(mu, w):
    point = as_polar(w)
    return (bessel_h(mu, 1, point) - bessel_h(mu, -1, point)) / 2j


def zero_energy(p, kind, x):
    """Zero-energy solutions j_{beta,m} and y_{beta,m} on x > 0.

    j(x) = x^{1/4} J_{2m}(2 sqrt(beta x)) and y(x) = x^{1/4} Y_{2m}(2 sqrt(beta x))
    with the dimension-1 Bessel functions; for beta = 0 the basis is
    x^{1/2+m}, x^{1/2-m}, or x^{1/2}, x^{1/2} ln x when m = 0.

    Parameters
    ----------
    p : WhittakerParams

    kind : 'j', 'y', SolutionKind.J_ZERO or SolutionKind.Y_ZERO

    x : float or numpy array
    """
    kind = {SolutionKind.J_ZERO: "j", SolutionKind.Y_ZERO: "y"}.get(kind, kind)
    assert kind in ("j", "y"), f"Unknown zero-energy solution '{kind}'"
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise BranchPointError("zero-energy solutions are evaluated on x > 0")
    beta, m = p.beta, p.m

    if beta == 0:
        xc = x.astype(complex)
        if kind == "j":
            value = xc ** (0.5 + m)
        elif m == 0:
            value = np.sqrt(xc) * np.log(xc)
        else:
            value = xc ** (0.5 - m)
        return restore(value, x.shape)

    flat = x.ravel()
    w = PolarPoint(2 * np.sqrt(abs(beta)) * np.sqrt(flat), np.full(flat.shape, np.angle(beta) / 2))
    bessel = bessel_j if kind == "j" else bessel_y
    value = flat**0.25 * np.atleast_1d(bessel(2 * m, w))
    return restore(value, x.shape)


def wronskian(f, g, x, h=None):
    """W(f, g; x) = f g' - f' g with fourth-order central differences.

    Parameters
    ----------
    f, g : callable
        Accept a numpy array of abscissae

    x : float

    h : float, optional
        Step, max(1e-4, 1e-4 x) by default
    """
    x = float(x)
    h = max(1e-4, 1e-4 * x) if h is None else h
    stencil = x + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    weights = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12 * h)
    fv = np.asarray(f(stencil), dtype=complex)
    gv = np.asarray(g(stencil), dtype=complex)
    return complex(fv[2] * (weights @ gv) - (weights @ fv) * gv[2])


# Leading asymptotic terms


def _k_at_zero(beta, m, point):
    if m.real < 0:
        raise UnsupportedCase("K near zero is tabulated for Re(m) >= 0; reflect m first")
    if m == 0:
        return -point.power(0.5) * point.log() * rgamma(0.5 - beta)
    if m.real == 0:
        return point.power(0.5) * (
            gamma(-2 * m) * rgamma(0.5 - m - beta) * point.power(m) + gamma(2 * m) * rgamma(0.5 + m - beta) * point.power(-m)
        )
    if m == 0.5:
        return np.full(point.shape, rgamma(1 - beta), dtype=complex)
    return gamma(2 * m) * rgamma(0.5 + m - beta) * point.power(0.5 - m)


def _h_at_zero(beta, m, point, sign):
    phase = np.exp(-sign * 1j * np.pi * (0.5 + m) / 2)
    return phase * _k_at_zero(sign * 1j * beta, m, point.rotate(-sign * np.pi / 2))


def _h_at_infinity(beta, m, point, sign):
    z = point.value
    return (
        np.exp(-sign * 1j * np.pi * (0.5 + m) / 2)
        * np.exp(np.pi * beta / 2)
        * point.power(sign * 1j * beta)
        * np.exp(sign * 1j * z / 2)
    )


def _j_at_infinity(beta, m, point):
    """Two-wave form including the first 1/z correction."""
    s = 0.5 + m
    z = point.value
    incoming = (
        np.exp(1j * np.pi / 2 * (s + 1j * beta))
        * rgamma(s - 1j * beta)
        * np.exp(-1j * z / 2)
        * point.power(-1j * beta)
        * (1 + 1j * (s + 1j * beta) * (0.5 - m + 1j * beta) / z)
    )
    outgoing = (
        np.exp(-1j * np.pi / 2 * (s - 1j * beta))
        * rgamma(s + 1j * beta)
        * np.exp(1j * z / 2)
        * point.power(1j * beta)
        * (1 - 1j * (s - 1j * beta) * (0.5 - m - 1j * beta) / z)
    )
    return incoming + outgoing


def _zero_energy_leading(kind, beta, m, point, regime):
    x = point.modulus
    if beta == 0:
        return np.atleast_1d(zero_energy(WhittakerParams(beta, m), kind, x))
    root = 2 * np.sqrt(complex(beta)) * np.sqrt(x)
    if regime == "infinity":
        wave = root - np.pi * m - np.pi / 4
        return x**0.25 * (np.cos(wave) if kind == "j" else np.sin(wave))
    if kind == "j":
        return np.sqrt(np.pi) * complex(beta) ** (0.25 + m) * rgamma(1 + 2 * m) * x ** (0.5 + m)
    if m == 0:
        return complex(beta) ** 0.25 * np.sqrt(x) * np.log(complex(beta) * x) / np.sqrt(np.pi)
    if m.real > 0:
        return -gamma(2 * m) / np.sqrt(np.pi) * complex(beta) ** (0.25 - m) * x ** (0.5 - m)
    raise UnsupportedCase("y near zero is tabulated for Re(m) > 0 and m = 0")


def asymptotic_leading(kind, p, regime, z):
    """Leading term of a canonical solution near zero or near infinity.

    Parameters
    ----------
    kind : SolutionKind or its value

    p : WhittakerParams

    regime : 'zero' or 'infinity'

    z : complex, numpy array or PolarPoint
    """
    kind = SolutionKind(kind)
    assert regime in ("zero", "infinity"), f"Unknown regime '{regime}'"
    point = as_polar(z).ravel()
    shape = as_polar(z).shape
    beta, m = p.beta, p.m
    at_zero = regime == "zero"

    if kind in (SolutionKind.I, SolutionKind.J) and at_zero:
        value = point.power(0.5 + m) * rgamma(1 + 2 * m)
    elif kind is SolutionKind.I:
        value = rgamma(0.5 + m - beta) * point.power(-beta) * np.exp(point.value / 2)
    elif kind is SolutionKind.K and at_zero:
        value = _k_at_zero(beta, m, point)
    elif kind is SolutionKind.K:
        value = point.power(beta) * np.exp(-point.value / 2)
    elif kind is SolutionKind.J:
        value = _j_at_infinity(beta, m, point)
    elif kind.sign is not None and at_zero:
        value = _h_at_zero(beta, m, point, kind.sign)
    elif kind.sign is not None:
        value = _h_at_infinity(beta, m, point, kind.sign)
    else:
        value = _zero_energy_leading("j" if kind is SolutionKind.J_ZERO else "y", beta, m, point, regime)
    return restore(np.broadcast_to(value, point.modulus.shape), shape)


# Connection formulas


def _require_nondegenerate(m, tol_degen):
    if degenerate_order(m, tol_degen) is not None:
        raise DegenerateCase(f"2m = {2 * m} is within {tol_degen} of an integer")


def connection_I_from_K(p, z, tol_degen=TOL_DEGEN):
    """Gamma(1/2-m+beta)/(2 pi) [e^{i pi m} K_{-beta,m}(e^{i pi} z) + e^{-i pi m} K_{-beta,m}(e^{-i pi} z)]."""
    _require_nondegenerate(p.m, tol_degen)
    point = as_polar(z)
    mirrored = WhittakerParams(-p.beta, p.m)
    total = np.exp(1j * np.pi * p.m) * eval_K(mirrored, point.rotate(np.pi)) + np.exp(-1j * np.pi * p.m) * eval_K(
        mirrored, point.rotate(-np.pi)
    )
    return gamma(0.5 - p.m + p.beta) / (2 * np.pi) * total


def connection_K_from_I(p, z, tol_degen=TOL_DEGEN):
    """-pi/sin(2 pi m) [I_{beta,m}/Gamma(1/2-m-beta) - I_{beta,-m}/Gamma(1/2+m-beta)]."""
    _require_nondegenerate(p.m, tol_degen)
    point = as_polar(z)
    return (
        -np.pi
        / np.sin(2 * np.pi * p.m)
        * (
            eval_I(p, point) * rgamma(0.5 - p.m - p.beta)
            - eval_I(WhittakerParams(p.beta, -p.m), point) * rgamma(0.5 + p.m - p.beta)
        )
    )


def connection_J_from_H(p, z):
    """e^{-pi beta} [H+_{beta,m}/Gamma(1/2+m+i beta) + H-_{beta,m}/Gamma(1/2+m-i beta)]."""
    point = as_polar(z)
    return np.exp(-np.pi * p.beta) * (
        eval_H(p, 1, point) * rgamma(0.5 + p.m + 1j * p.beta) + eval_H(p, -1, point) * rgamma(0.5 + p.m - 1j * p.beta)
    )


def connection_H_from_J(p, sign, z, tol_degen=TOL_DEGEN):
    """+-i pi/sin(2 pi m) [e^{-+i pi m} J_{beta,m}/Gamma(1/2-m-+i beta) - J_{beta,-m}/Gamma(1/2+m-+i beta)]."""
    sign = as_sign(sign)
    _require_nondegenerate(p.m, tol_degen)
    point = as_polar(z)
    beta, m = p.beta, p.m
    return (
        sign
        * 1j
        * np.pi
        / np.sin(2 * np.pi * m)
        * (
            np.exp(-sign * 1j * np.pi * m) * eval_J(p, point) * rgamma(0.5 - m - sign * 1j * beta)
            - eval_J(WhittakerParams(beta, -m), point) * rgamma(0.5 + m - sign * 1j * beta)
        )
    )


def coulomb_mapping(ell, eta, k=1.0):
    """Whittaker parameters of the Coulomb radial equation
    -u'' + (l(l+1)/r^2 + 2 eta k / r) u = k^2 u, i.e. beta = -2 eta k and m = l + 1/2."""
    return WhittakerParams(-2 * eta * k, ell + 0.5)


class WhittakerFunctionsTest(TestCase):
    def test_unit_i_small_z(self):
        p = WhittakerParams(0.7, 0.3)
        z = 1e-3
        ratio = eval_I(p, z) / (z**0.8 / math.gamma(1.6))
        self.assertClose(ratio, 1 - 0.7 * z / 1.6, rtol=1e-5)

    def test_unit_i_closed_forms(self):
        self.assertClose(eval_I(WhittakerParams(0.0, 0.5), 1.0), 2 * math.sinh(0.5), rtol=1e-14)
        z = np.array([0.3, 2.0 + 1j, 15.0, -8.0])
        self.assertClose(eval_I(WhittakerParams(0.5, -1.0), z), np.zeros(4), atol=0.0)

    @parameter_sweep(
        dict(beta=0.5, m=0.3),
        dict(beta=1.0 + 0.5j, m=0.25 - 0.2j),
        dict(beta=-0.7, m=1.3),
        dict(beta=2.0, m=-0.35),
    )
    def test_unit_i_oracle(self, beta, m):
        z = np.array([0.4, 3.0 - 2.0j, -7.0 + 1.0j, 25.0j, 33.0, 60.0 - 20.0j, -45.0 + 3.0j])
        expected = np.array([self.mp_I(beta, m, s) for s in z])
        self.assertClose(eval_I(WhittakerParams(beta, m), z), expected, rtol=1e-9)

    def test_unit_i_degenerate_identity(self):
        """I_{beta,-p/2} = (-beta-(p-1)/2)_p I_{beta,p/2}"""
        beta, z = 0.37, np.array([0.6, 1.3, 4.2])
        for p in range(1, 5):
            with self.subTest(p=p):
                lhs = eval_I(WhittakerParams(beta, -p / 2), z)
                rhs = pochhammer(-beta - (p - 1) / 2, p) * eval_I(WhittakerParams(beta, p / 2), z)
                self.assertClose(lhs, rhs, rtol=1e-10)

    def test_unit_k_closed_forms(self):
        self.assertClose(eval_K(WhittakerParams(0.0, 0.5), 2.0), math.exp(-1.0), rtol=1e-14)
        m, z = 0.35, np.array([0.5, 3.0])
        self.assertClose(eval_K(WhittakerParams(0.5 + m, m), z), z ** (0.5 + m) * np.exp(-z / 2), rtol=1e-14)

    @whittaker_parameter_suite
    def test_unit_k_oracle(self, beta, m):
        z = np.array([0.3, 2.5 + 1.0j, 9.0, 18.0j, -6.0 + 5.0j, 70.0])
        expected = np.array([self.mp_K(beta, m, s) for s in z])
        self.assertClose(eval_K(WhittakerParams(beta, m), z), expected, rtol=1e-9)

    @whittaker_parameter_suite
    def test_unit_k_symmetry(self, beta, m):
        z = np.array([0.7, 5.5 - 1.0j, 22.0])
        self.assertClose(eval_K(WhittakerParams(beta, m), z), eval_K(WhittakerParams(beta, -m), z), rtol=1e-10)

    @parameter_sweep(
        dict(beta=0.3, p=0),
        dict(beta=0.3, p=1),
        dict(beta=-0.45 + 0.2j, p=2),
        dict(beta=1.2, p=3),
    )
    def test_unit_k_degenerate(self, beta, p):
        z = np.array([0.05, 1.5, 3.9, 11.0, -5.0 + 2.0j])
        expected = np.array([self.mp_K(beta, p / 2, s) for s in z])
        self.assertClose(eval_K(WhittakerParams(beta, p / 2), z), expected, rtol=1e-9)
        nearby = WhittakerParams(beta, p / 2 + 1e-8)
        self.assertClose(eval_K(nearby, 1.5), expected[1], rtol=1e-7)

    def test_unit_k_macdonald(self):
        """K_{0,m}(z) = sqrt(z/pi) K_m(z/2)"""
        z = np.array([0.4, 2.0, 7.5])
        for m in [0.2, 0.75, 1.0]:
            with self.subTest(m=m):
                expected = np.array([complex(mpmath.sqrt(s / mpmath.pi) * mpmath.besselk(m, s / 2)) for s in z])
                self.assertClose(eval_K(WhittakerParams(0.0, m), z), expected, rtol=1e-9)

    def test_unit_wronskian_i_k(self):
        p = WhittakerParams(0.4, 0.7)
        expected = -rgamma(0.5 + 0.7 - 0.4)
        for x in [0.5, 2.0, 10.0]:
            with self.subTest(x=x):
                w = wronskian(lambda s: eval_I(p, s), lambda s: eval_K(p, s), x)
                self.assertClose(w, expected, rtol=1e-8)
        f = lambda s: eval_I(p, s)
        self.assertEqual(wronskian(f, f, 1.7), 0.0)

    def test_unit_derivative_pairs(self):
        p = WhittakerParams(0.8 - 0.2j, 0.45)
        z = np.array([0.9, 6.0 + 2.0j, 30.0])
        h = 1e-5
        for kind in ["I", "K", "J", "Hplus", "Hminus"]:
            with self.subTest(kind=kind):
                value, derivative = whittaker_derivative(kind, p, z)
                plus, _ = whittaker_derivative(kind, p, z + h)
                minus, _ = whittaker_derivative(kind, p, z - h)
                self.assertClose(derivative, (plus - minus) / (2 * h), rtol=1e-6)

    def test_unit_j_values(self):
        self.assertClose(eval_J(WhittakerParams(0.0, 0.5), math.pi), 2.0, rtol=1e-13)
        p = WhittakerParams(0.6, 0.2)
        z = 1e-3
        self.assertClose(eval_J(p, z), z**0.7 / math.gamma(1.4) * (1 - 0.6 * z / 1.4), rtol=1e-5)

    def test_unit_j_conjugation(self):
        p = WhittakerParams(0.9 + 0.4j, 0.3 - 0.1j)
        z = np.array([0.5 + 0.2j, 4.0, 17.0 - 3.0j])
        self.assertClose(eval_J(p.conjugate(), np.conj(z)), np.conj(eval_J(p, z)), rtol=1e-10)

    def test_unit_j_large_x(self):
        p = WhittakerParams(1.0, 0.3)
        self.assertClose(eval_J(p, 50.0), asymptotic_leading("J", p, "infinity", 50.0), rtol=5e-3)

    def test_unit_j_from_h(self):
        p = WhittakerParams(0.7, 0.3)
        self.assertClose(connection_J_from_H(p, 2.1), eval_J(p, 2.1), rtol=1e-9)
        for sign in (1, -1):
            with self.subTest(sign=sign):
                self.assertClose(connection_H_from_J(p, sign, 2.1), eval_H(p, sign, 2.1), rtol=1e-9)

    def test_unit_h_reflection(self):
        for sign in (1, -1):
            with self.subTest(sign=sign):
                reflected = eval_H(WhittakerParams(1.0, -0.25), sign, 3.0)
                direct = eval_H(WhittakerParams(1.0, 0.25), sign, 3.0)
                self.assertClose(reflected, np.exp(sign * 1j * np.pi * 0.25) * direct, rtol=1e-10)

    def test_unit_h_logarithmic_zero(self):
        p = WhittakerParams(0.5, 0.0)
        for sign in (1, -1):
            with self.subTest(sign=sign):
                leading = asymptotic_leading(SolutionKind.H_PLUS if sign > 0 else SolutionKind.H_MINUS, p, "zero", 1e-10)
                self.assertClose(eval_H(p, sign, 1e-10), leading, rtol=0.1)

    def test_unit_h_large_z(self):
        p = WhittakerParams(0.4, 0.6)
        for kind in (SolutionKind.H_PLUS, SolutionKind.H_MINUS):
            with self.subTest(kind=kind):
                value = eval_H(p, kind.sign, 200.0)
                self.assertClose(value, asymptotic_leading(kind, p, "infinity", 200.0), rtol=1e-2)

    def test_unit_leading_terms(self):
        p = WhittakerParams(0.3, 0.5)
        self.assertClose(asymptotic_leading("K", p, "zero", 1e-3), rgamma(0.7), rtol=1e-14)
        self.assertClose(eval_K(p, 1e-6), rgamma(0.7), rtol=1e-4)
        self.assertClose(asymptotic_leading("K", p, "infinity", 30.0), 30.0**0.3 * math.exp(-15.0), rtol=1e-14)
        q = WhittakerParams(0.2, 0.9)
        self.assertClose(asymptotic_leading("I", q, "zero", 1e-2), 1e-2**1.4 * rgamma(2.8), rtol=1e-14)
        with self.assertRaises(UnsupportedCase):
            asymptotic_leading("K", WhittakerParams(0.2, -0.3), "zero", 0.1)

    def test_unit_k_logarithmic_zero(self):
        p = WhittakerParams(0.2, 0.0)
        z = 1e-14
        leading = asymptotic_leading("K", p, "zero", z)
        self.assertClose(eval_K(p, z), leading, rtol=0.1)
        self.assertClose(self.mp_K(0.2, 0.0, z), leading, rtol=0.1)
        self.assertClose(leading, -math.sqrt(z) * math.log(z) / math.gamma(0.3), rtol=1e-14)

    def test_unit_zero_energy(self):
        p = WhittakerParams(2.0, 0.3 + 0.1j)
        j = lambda x: zero_energy(p, "j", x)
        y = lambda x: zero_energy(p, "y", x)
        for x in [0.5, 3.0]:
            with self.subTest(x=x):
                self.assertClose(wronskian(j, y, x), math.sqrt(2.0), rtol=1e-7)

        x = 1e-4
        leading = asymptotic_leading(SolutionKind.J_ZERO, p, "zero", x)
        self.assertClose(j(x), leading, rtol=1e-3)

        flat = WhittakerParams(0.0, 0.4)
        x = np.array([0.1, 2.0])
        self.assertClose(zero_energy(flat, "j", x), x**0.9, rtol=1e-15)
        self.assertClose(zero_energy(flat, "y", x), x**0.1, rtol=1e-15)
        with self.assertRaises(BranchPointError):
            zero_energy(p, "j", 0.0)

    def test_unit_bessel_half_integer(self):
        w = np.array([0.3, 2.0, 9.0])
        self.assertClose(bessel_j(0.5, w), np.sin(w), rtol=1e-11)
        self.assertClose(bessel_y(0.5, w), -np.cos(w), rtol=1e-11)
        self.assertClose(bessel_h(0.5, 1, w), -1j * np.exp(1j * w), rtol=1e-11)

    def test_unit_connection_i_from_k(self):
        for beta, m, z in [(0.3, 0.2, 1.5), (0.0, 0.25, 2.0)]:
            with self.subTest(beta=beta, m=m):
                p = WhittakerParams(beta, m)
                self.assertClose(connection_I_from_K(p, z), eval_I(p, z), rtol=1e-9)
        p = WhittakerParams(0.6, 0.35)
        self.assertClose(connection_K_from_I(p, 1.0), eval_K(p, 1.0), rtol=1e-9)
        with self.assertRaises(DegenerateCase):
            connection_I_from_K(WhittakerParams(0.3, 0.5), 1.0)

    def test_unit_params(self):
        p = WhittakerParams(1, 0.5j)
        self.assertIsInstance(p.beta, complex)
        self.assertClose(p.alpha, -0.25)
        with self.assertRaises(SingularFamilyPoint):
            WhittakerParams(0, -0.5).require_spectral()
        with self.assertRaises(DomainError):
            WhittakerParams(1, -1.2).require_spectral()
        with self.assertRaises(DomainError):
            WhittakerParams(float("nan"), 0.3)
        self.assertEqual(coulomb_mapping(2, 0.5, k=2.0), WhittakerParams(-2.0, 2.5))

    def test_accept_wronskian_constancy(self):
        """I-K Wronskian over random parameters away from the poles"""
        checked = 0
        while checked < 100:
            beta = self.random_complex((-2, 2), (-1, 1))
            m = self.random_complex((-0.9, 2), (-0.5, 0.5))
            a = 0.5 + m - beta
            if abs(a - min(round(a.real), 0)) < 0.1 or degenerate_order(m, 0.05) is not None:
                continue
            p = WhittakerParams(beta, m)
            expected = -rgamma(a)
            for x in [0.3, 1.0, 3.0, 10.0, 30.0]:
                with self.subTest(beta=beta, m=m, x=x):
                    w = wronskian(lambda s: eval_I(p, s), lambda s: eval_K(p, s), x)
                    self.assertClose(w, expected, atol=1e-8, rtol=1e-8)
            checked += 1

    def test_accept_two_sign_agreement(self):
        """I from the Kummer-flipped series equals the principal evaluation"""
        for _ in range(50):
            beta = self.random_complex((-2, 2), (-1, 1))
            m = self.random_complex((-0.4, 2), (-0.5, 0.5))
            z = self.random_complex((0.1, 12), (-12, 12))
            with self.subTest(beta=beta, m=m, z=z):
                expected = self.mp_I(beta, m, z)
                self.assertClose(eval_I(WhittakerParams(beta, m), z), expected, rtol=1e-9)
                self.assertClose(
                    eval_J(WhittakerParams(beta, m), z),
                    np.exp(-1j * np.pi * (0.5 + m) / 2) * self.mp_I(-1j * beta, m, 1j * z),
                    rtol=1e-9,
                )


if __name__ == "__main__":
    unittest.main()
