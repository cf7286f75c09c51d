""" Spectral objects of the Whittaker operator H_{beta,m} = -d^2/dx^2 + (m^2 - 1/4)/x^2 - beta/x.

Eigenvalues lambda_N = -beta^2 / (4 (N + m + 1/2)^2), the resolvent kernel
(H + k^2)^{-1}(x, y), its boundary values on the continuous spectrum
[0, oo[, the spectral density, Riesz projections and the dilation covariance
U_theta H_{beta,m} U_theta^{-1} = e^{-2 theta} H_{e^theta beta, m}.

Kernels accept scalar or array positions and broadcast x against y.
"""

import cmath
import math
import logging

from enum import Enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ExceptionalEnergy, NotAnEigenvalue, PoleAtEigenvalue, SingularFamilyPoint
from .grid import TOL_ENVELOPE, GridFunction, graded_grid, truncation_radius, uniform_grid
from .special_core import TOL_POLE, PolarPoint, gamma, laguerre, pole_distance, restore, rgamma
from .whittaker_functions import WhittakerParams, as_sign, bessel_j, eval_H, eval_I, eval_J, eval_K
from .util.test import *

logger = logging.getLogger(__name__)

N_MAX = 10
TOL_CLASSIFY = 1e-13
CONTOUR_POINTS = 64
# even count keeps t = 0, a pole of the curve when Im m = 0, out of the samples
TRAJECTORY_SAMPLES = np.linspace(-20.0, 20.0, 400)


class EigenKind(Enum):
    EIGENVALUE = "eigenvalue"
    RESONANCE = "resonance"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class EigenRecord:
    """lambda_N = -beta^2/(4 nu^2), nu = N + m + 1/2, and the pole k_pole = beta/(2 nu) of the resolvent."""

    N: int
    value: complex
    kind: EigenKind
    k_pole: complex


@dataclass(frozen=True, eq=False)
class KernelSample:
    """Two-point kernel values K(x, y) with their provenance.

    `provenance` is one of resolvent, boundary, density, projection; `k`,
    `side` and `N` record the energy, boundary side and eigenvalue index
    where they apply.
    """

    x: np.ndarray
    y: np.ndarray
    value: complex
    provenance: str
    k: complex = None
    side: int = None
    N: int = None


@dataclass(frozen=True, eq=False)
class SpectrumDescriptor:
    """Spectrum of H_{beta,m} presented as e^{-2 i phi} sigma(H_{beta,m}).

    The continuous spectrum becomes the ray e^{i ray_angle} [0, oo[; every
    presented discrete point lies on the curve returned by `trajectory_at`.
    """

    params: WhittakerParams
    rotation_phase: float
    discrete: tuple
    t_samples: np.ndarray = field(default_factory=lambda: TRAJECTORY_SAMPLES)

    @property
    def ray_angle(self):
        return -2 * self.rotation_phase

    @property
    def presentation(self):
        return cmath.exp(-2j * self.rotation_phase)

    @property
    def presented(self):
        return np.array([self.presentation * record.value for record in self.discrete], dtype=complex)

    def ray(self, s):
        return np.exp(1j * self.ray_angle) * np.asarray(s, dtype=float)

    def trajectory_at(self, t):
        """e^{2i(arg beta - phi)} (-|beta|^2 / (4 (t + i Im m)^2))."""
        beta, m = self.params.beta, self.params.m
        t = np.asarray(t, dtype=float)
        turn = cmath.exp(2j * (cmath.phase(beta) - self.rotation_phase))
        return turn * -(abs(beta) ** 2) / (4 * (t + 1j * m.imag) ** 2)

    @property
    def trajectory(self):
        """Samples of `trajectory_at`; for real m the pole t = 0 is left out."""
        t = self.t_samples
        if self.params.m.imag == 0:
            t = t[t != 0]
        return self.trajectory_at(t)

    def of_kind(self, kind):
        return [record for record in self.discrete if record.kind is EigenKind(kind)]


# Eigenvalues


def _classify(beta, nu, tol=TOL_CLASSIFY):
    if nu == 0:
        return EigenKind.UNDEFINED
    s = (beta * nu.conjugate()).real
    scale = tol * abs(beta) * abs(nu)
    if s > scale:
        return EigenKind.EIGENVALUE
    if s < -scale:
        return EigenKind.RESONANCE
    return EigenKind.UNDEFINED


def _record(p, N, tol=TOL_CLASSIFY):
    nu = N + p.m + 0.5
    if nu == 0:
        return EigenRecord(N, complex("nan"), EigenKind.UNDEFINED, complex("nan"))
    return EigenRecord(N, -(p.beta**2) / (4 * nu**2), _classify(p.beta, nu, tol), p.beta / (2 * nu))


def eigenvalues(p, N_max=N_MAX, tol=TOL_CLASSIFY):
    """Records for N = 0..N_max, each classified as eigenvalue, resonance or undefined.

    Re(beta / nu) > 0 makes lambda_N an eigenvalue; < 0 a resonance on the
    non-physical sheet. For m = -1/2 the index N = 0 does not exist, as
    H_{beta,-1/2} = H_{beta,1/2}; beta = 0 has no discrete spectrum.

    Parameters
    ----------
    p : WhittakerParams

    N_max : int

    tol : float, optional
        |Re(beta conj(nu))| <= tol |beta| |nu| is classified undefined
    """
    p.require_spectral()
    assert int(N_max) == N_max and N_max >= 0, "N_max must be a non-negative integer"
    if p.beta == 0:
        return []
    start = 1 if p.m == -0.5 else 0
    return [_record(p, N, tol) for N in range(start, int(N_max) + 1)]


def eigen_record(p, N, tol=TOL_CLASSIFY):
    p.require_spectral()
    assert int(N) == N and N >= 0, "Eigenvalue index must be a non-negative integer"
    if p.beta == 0 or (p.m == -0.5 and N == 0):
        raise NotAnEigenvalue(f"N={N} labels no point of the spectrum of H_({p.beta}, {p.m})")
    return _record(p, int(N), tol)


# Resolvent and its boundary values


def spectral_params(p):
    """Checked parameters; m = -1/2 is replaced by m = 1/2, the same operator."""
    p.require_spectral()
    if p.m == -0.5:
        logger.debug("m = -1/2 evaluated through m = 1/2 for beta=%s", p.beta)
        return WhittakerParams(p.beta, 0.5)
    return p


def _positions(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("kernel positions must be positive and finite")
    return x


def _scaled(k, r):
    """The point 2 k r on the sheet of arg k."""
    r = np.asarray(r, dtype=float)
    return PolarPoint(2 * abs(k) * r, np.full(r.shape, cmath.phase(k)))


def _resolvent_factor(p, k, tol_pole):
    k = complex(k)
    if not k.real > 0:
        raise DomainError(f"the resolvent kernel needs Re(k) > 0, got k={k}")
    kappa = p.beta / (2 * k)
    a = 0.5 + p.m - kappa
    if pole_distance(a) < tol_pole:
        raise PoleAtEigenvalue(f"k={k} is at an eigenvalue pole of the resolvent of H_({p.beta}, {p.m})")
    return k, WhittakerParams(kappa, p.m), gamma(a, tol_pole=tol_pole) / (2 * k)


def resolvent_kernel(p, k, x, y, tol_pole=TOL_POLE):
    """(H_{beta,m} + k^2)^{-1}(x, y), Re k > 0.

    (1/2k) Gamma(1/2 + m - beta/2k) I_{beta/2k,m}(2k min(x,y)) K_{beta/2k,m}(2k max(x,y))

    Parameters
    ----------
    p : WhittakerParams

    k : complex
        Re(k) > 0, away from the poles beta / (2(N + m + 1/2))

    x, y : float or numpy array
        Positive positions, broadcast against each other
    """
    p = spectral_params(p)
    x, y = np.broadcast_arrays(_positions(x), _positions(y))
    k, local, factor = _resolvent_factor(p, k, tol_pole)
    lower, upper = np.minimum(x, y), np.maximum(x, y)
    value = factor * eval_I(local, _scaled(k, lower)) * eval_K(local, _scaled(k, upper))
    return KernelSample(x, y, restore(value, x.shape), "resolvent", k=k)


def apply_resolvent(p, k, f, tol_pole=TOL_POLE):
    """g(x_i) = sum_j w_j R(x_i, x_j) f(x_j) in O(n) from running sums.

    Parameters
    ----------
    p : WhittakerParams

    k : complex

    f : GridFunction
    """
    p = spectral_params(p)
    k, local, factor = _resolvent_factor(p, k, tol_pole)
    regular = np.atleast_1d(eval_I(local, _scaled(k, f.nodes)))
    decaying = np.atleast_1d(eval_K(local, _scaled(k, f.nodes)))

    wf = f.weights * f.values
    below = np.cumsum(wf * regular)
    above = np.append(np.cumsum((wf * decaying)[::-1])[::-1][1:], 0.0)
    return f.with_values(factor * (decaying * below + regular * above))


def resolvent_x_max(p, k, tol=TOL_ENVELOPE):
    """Truncation point where e^{-x Re k} x^{Re(beta/2k)} falls below tol."""
    k = complex(k)
    x_max = truncation_radius(k.real, (p.beta / (2 * k)).real, tol=tol)
    logger.debug("resolvent envelope below %.1e beyond x=%.4g", tol, x_max)
    return x_max


def _real_energy(k):
    k = complex(k)
    if k.imag != 0 or not k.real > 0:
        raise DomainError(f"boundary values are taken at real k > 0, got k={k}")
    return k.real


def _require_regular(a, k, side, tol_pole):
    if pole_distance(a) < tol_pole:
        raise ExceptionalEnergy(f"k={k} is an exceptional energy on the {side} side")


def resolvent_boundary_kernel(p, k, side, x, y, tol_pole=TOL_POLE):
    """Boundary value of the resolvent at -k^2 -+ i0, i.e. (H - (k^2 +- i0))^{-1}(x, y).

    +-(i/2k) Gamma(1/2 + m -+ i beta/2k) J_{beta/2k,m}(2k min) H+-_{beta/2k,m}(2k max)
    """
    sign = as_sign(side)
    p = spectral_params(p)
    k = _real_energy(k)
    x, y = np.broadcast_arrays(_positions(x), _positions(y))
    kappa = p.beta / (2 * k)
    a = 0.5 + p.m - sign * 1j * kappa
    _require_regular(a, k, "+" if sign > 0 else "-", tol_pole)

    local = WhittakerParams(kappa, p.m)
    lower, upper = np.minimum(x, y), np.maximum(x, y)
    value = sign * 1j / (2 * k) * gamma(a) * eval_J(local, 2 * k * lower) * eval_H(local, sign, 2 * k * upper)
    return KernelSample(x, y, restore(value, x.shape), "boundary", k=k, side=sign)


def spectral_density_kernel(p, k, x, y, tol_pole=TOL_POLE):
    """(1/2 pi i) of the jump of the resolvent across k^2 > 0.

    (e^{pi beta/2k} / 4 pi k) Gamma(1/2+m+i beta/2k) Gamma(1/2+m-i beta/2k) J(2kx) J(2ky)
    """
    p = spectral_params(p)
    k = _real_energy(k)
    x, y = np.broadcast_arrays(_positions(x), _positions(y))
    kappa = p.beta / (2 * k)
    a_plus, a_minus = 0.5 + p.m + 1j * kappa, 0.5 + p.m - 1j * kappa
    _require_regular(a_minus, k, "+", tol_pole)
    _require_regular(a_plus, k, "-", tol_pole)

    local = WhittakerParams(kappa, p.m)
    factor = cmath.exp(math.pi * kappa) / (4 * math.pi * k) * gamma(a_plus) * gamma(a_minus)
    value = factor * eval_J(local, 2 * k * x) * eval_J(local, 2 * k * y)
    return KernelSample(x, y, restore(value, x.shape), "density", k=k)


def exceptional_energies(p, side=None, N_max=50, tol=1e-12):
    """Energies k > 0 where a boundary kernel's Gamma factor is singular.

    k = +-i beta / (2(N + 1/2 + m)) whenever that number is real and positive.
    Empty unless (beta, m) is an exceptional pair.
    """
    p.require_spectral()
    signs = (1, -1) if side is None else (as_sign(side),)
    found = set()
    for N in range(N_max + 1):
        nu = N + 0.5 + p.m
        if nu == 0:
            continue
        for sign in signs:
            k = sign * 1j * p.beta / (2 * nu)
            if k != 0 and abs(k.imag) <= tol * abs(k) and k.real > 0:
                found.add(k.real)
    return np.array(sorted(found))


# Riesz projections


def _projection_vector(p, N, x):
    """Normalization factor c and u(x) with P_N(x, y) = c u(x) u(y)."""
    m = p.m
    nu = N + m + 0.5
    kappa = p.beta / nu
    c = math.factorial(N) * kappa ** (2 + 2 * m) * rgamma(N + 2 * m + 1) / (2 * nu)
    u = np.exp(-kappa * x / 2) * x ** (0.5 + m) * laguerre(N, 2 * m, kappa * x)
    return c, u


def riesz_projection_kernel(p, N, x, y, tol=TOL_CLASSIFY):
    """Kernel of the rank-one Riesz projection onto lambda_N.

    P_N(x, y) = beta/(2 nu^2) N!/Gamma(1+2m+N) kappa^{1+2m} e^{-kappa(x+y)/2}
                (xy)^{1/2+m} L_N^{(2m)}(kappa x) L_N^{(2m)}(kappa y)

    with nu = N + m + 1/2 and kappa = beta/nu. Bilinear trace one.
    """
    record = eigen_record(p, N, tol)
    if record.kind is not EigenKind.EIGENVALUE:
        raise NotAnEigenvalue(f"lambda_{N} = {record.value} is classified {record.kind.value}")
    x, y = np.broadcast_arrays(_positions(x), _positions(y))
    c, ux = _projection_vector(p, int(N), x.astype(complex))
    _, uy = _projection_vector(p, int(N), y.astype(complex))
    return KernelSample(x, y, restore(c * ux * uy, x.shape), "projection", N=int(N))


def projection_grid(p, N, tol=TOL_ENVELOPE):
    """Graded quadrature grid covering the support of P_N up to the envelope tolerance."""
    record = eigen_record(p, N)
    kappa = p.beta / (N + p.m + 0.5)
    x_max = truncation_radius(kappa.real, 1 + 2 * p.m.real + 2 * N, tol=tol)
    logger.debug("projection N=%d: x_max=%.4g for kappa=%s (%s)", N, x_max, kappa, record.kind.value)
    return graded_grid(x_max)


def _neighbour_distance(p, N, k0):
    distances = [k0.real]
    for n in (N - 1, N + 1):
        nu = n + p.m + 0.5
        if n >= 0 and nu != 0:
            distances.append(abs(p.beta / (2 * nu) - k0))
    return min(distances)


def riesz_projection_by_contour(p, N, x, y, radius=None, n_points=CONTOUR_POINTS):
    """(1/2 pi i) contour integral of 2k R(-k^2; x, y) dk counter-clockwise around k_pole.

    Periodic trapezoid rule on a circle; the default radius is half the
    distance to the nearest neighbouring pole or to the imaginary axis.
    Reproduces +P_N(x, y).
    """
    record = eigen_record(p, N)
    if record.kind is not EigenKind.EIGENVALUE:
        raise NotAnEigenvalue(f"lambda_{N} is classified {record.kind.value}")
    k0 = record.k_pole
    radius = _neighbour_distance(p, N, k0) / 2 if radius is None else radius

    total = 0j
    for theta in 2 * np.pi * np.arange(n_points) / n_points:
        step = radius * cmath.exp(1j * theta)
        sample = resolvent_kernel(p, k0 + step, x, y)
        total = total + 2 * (k0 + step) * np.asarray(sample.value) * step
    x, y = np.broadcast_arrays(_positions(x), _positions(y))
    return KernelSample(x, y, restore(total / n_points, x.shape), "projection", N=int(N))


def pole_order_profile(p, N, x, y, radii, n_angles=8):
    """Mean of |R(-k^2; x, y)| |k - k_pole| over circles of the given radii around k_pole."""
    k0 = eigen_record(p, N).k_pole
    angles = 2 * np.pi * (np.arange(n_angles) + 0.5) / n_angles
    profile = []
    for r in np.asarray(radii, dtype=float):
        values = [abs(resolvent_kernel(p, k0 + r * cmath.exp(1j * a), x, y).value) * r for a in angles]
        profile.append(np.mean(values))
    return np.array(profile)


# Dilations and the presentation of the spectrum


def dilate(p, theta):
    """U_theta H_{beta,m} U_theta^{-1} = e^{-2 theta} H_{e^theta beta, m}.

    Returns the dilated parameters and the factor e^{-2 theta}; theta may be complex.
    """
    theta = complex(theta)
    return WhittakerParams(cmath.exp(theta) * p.beta, p.m), cmath.exp(-2 * theta)


def rotated_presentation(p, phi=None):
    """H_{beta,m}(-i phi) = e^{2 i phi} H_{e^{-i phi} beta, m}; with phi = arg beta the coupling is |beta|."""
    phi = cmath.phase(p.beta) if phi is None else phi
    return dilate(p, -1j * phi)


def singular_family_point(z, eps):
    """Parameters (2 eps sqrt(-z), -1/2 + eps) whose lambda_0 equals z.

    As eps -> 0 they approach the singular point (0, -1/2) of the family,
    while any z can be reached.
    """
    z = complex(z)
    assert eps != 0, "eps must be non-zero"
    return WhittakerParams(2 * eps * cmath.sqrt(-z), -0.5 + eps)


def on_trajectory(p, lam, phi=0.0):
    """Distance, in the real curve parameter t, of a presented point from the trajectory.

    A point lies on the curve when e^{-2i(arg beta - phi)} lam = -|beta|^2/(4 w^2)
    with Im w = Im m.
    """
    beta, m = p.beta, p.m
    lam = complex(lam)
    if beta == 0:
        return abs(lam)
    if lam == 0:
        return 0.0
    unturned = lam * cmath.exp(-2j * (cmath.phase(beta) - phi))
    w = abs(beta) / (2 * cmath.sqrt(-unturned))
    return min(abs(w.imag - m.imag), abs(-w.imag - m.imag))


def spectrum_descriptor(p, phi=0.0, N_max=N_MAX, t_samples=None, tol=TOL_CLASSIFY):
    """Eigenvalue/resonance records and the curves of the rotated presentation.

    Parameters
    ----------
    p : WhittakerParams

    phi : float
        Presentation angle, points are shown as e^{-2 i phi} lambda

    N_max : int

    t_samples : numpy array, optional
        Parameters at which the trajectory is sampled

    tol : float, optional
        Classification tolerance passed to `eigenvalues`
    """
    records = tuple(eigenvalues(p, N_max, tol))
    descriptor = SpectrumDescriptor(
        params=p,
        rotation_phase=float(phi),
        discrete=records,
        t_samples=TRAJECTORY_SAMPLES if t_samples is None else np.asarray(t_samples, dtype=float),
    )
    logger.debug(
        "spectrum of H_(%s, %s): %d eigenvalues, %d resonances, %d undefined",
        p.beta,
        p.m,
        len(descriptor.of_kind("eigenvalue")),
        len(descriptor.of_kind("resonance")),
        len(descriptor.of_kind("undefined")),
    )
    return descriptor


class SpectralTest(TestCase):
    @staticmethod
    def _eigen_values(p, N_max=N_MAX):
        return [record.value for record in eigenvalues(p, N_max) if record.kind is EigenKind.EIGENVALUE]

    def test_unit_eigenvalue_examples(self):
        first = eigenvalues(WhittakerParams(2.0, 0.5))[0]
        self.assertEqual(first.value, -1.0)
        self.assertIs(first.kind, EigenKind.EIGENVALUE)
        self.assertEqual(first.k_pole, 1.0)

        self.assertEqual(self._eigen_values(WhittakerParams(-1.0, 0.0)), [])
        self.assertEqual(self._eigen_values(WhittakerParams(-1.0, -0.75)), [-4.0])
        self.assertEqual(eigenvalues(WhittakerParams(0.0, 0.7)), [])

        shifted = eigenvalues(WhittakerParams(1.0, -0.5), N_max=3)
        self.assertEqual([record.N for record in shifted], [1, 2, 3])
        self.assertEqual(shifted[0].value, -0.25)

    def test_unit_eigenvalue_errors(self):
        with self.assertRaises(DomainError):
            eigenvalues(WhittakerParams(1.0, -1.0))
        with self.assertRaises(SingularFamilyPoint):
            eigenvalues(WhittakerParams(0.0, -0.5))
        with self.assertRaises(NotAnEigenvalue):
            riesz_projection_kernel(WhittakerParams(-1.0, 0.3), 0, 1.0, 1.0)

    def test_unit_hydrogen_levels(self):
        for ell in range(3):
            records = eigenvalues(WhittakerParams(2.0, ell + 0.5), N_max=4)
            for record in records:
                n = ell + record.N + 1
                self.assertClose(record.value, -1.0 / n**2, rtol=1e-14)
                self.assertIs(record.kind, EigenKind.EIGENVALUE)

    def test_unit_boundary_classification(self):
        record = eigenvalues(WhittakerParams(1.0, -0.5 - 2.4j), N_max=0)[0]
        self.assertIs(record.kind, EigenKind.UNDEFINED)
        resonance = eigenvalues(WhittakerParams(1.0, -0.75 - 2.4j), N_max=0)[0]
        self.assertIs(resonance.kind, EigenKind.RESONANCE)

    def test_unit_resolvent_closed_form(self):
        """beta = 0, m = 1/2: I(z) = 2 sinh(z/2), K(z) = e^{-z/2}"""
        sample = resolvent_kernel(WhittakerParams(0.0, 0.5), 1.0, 1.0, 2.0)
        self.assertEqual(sample.provenance, "resolvent")
        self.assertClose(sample.value, math.sinh(1.0) * math.exp(-2.0), rtol=1e-10)

    def test_unit_resolvent_symmetry(self):
        p = WhittakerParams(0.7 + 0.2j, 0.35)
        k = 0.9 + 0.3j
        self.assertEqual(resolvent_kernel(p, k, 1.0, 2.0).value, resolvent_kernel(p, k, 2.0, 1.0).value)
        x = np.array([0.2, 1.5, 4.0])
        forward = resolvent_kernel(p, k, x[:, None], x[None, :]).value
        self.assertTrue(np.array_equal(forward, forward.T))

    def test_unit_resolvent_half_index(self):
        p = WhittakerParams(1.0, 0.5)
        self.assertEqual(
            resolvent_kernel(WhittakerParams(1.0, -0.5), 1.0, 1.0, 1.0).value, resolvent_kernel(p, 1.0, 1.0, 1.0).value
        )

    def test_unit_resolvent_domain(self):
        p = WhittakerParams(2.0, 0.5)
        with self.assertRaises(PoleAtEigenvalue):
            resolvent_kernel(p, 1.0, 1.0, 2.0)
        with self.assertRaises(DomainError):
            resolvent_kernel(p, -1.0, 1.0, 2.0)
        with self.assertRaises(DomainError):
            resolvent_kernel(p, 1j, 1.0, 2.0)
        with self.assertRaises(DomainError):
            resolvent_kernel(p, 1.5, 0.0, 2.0)

    def test_unit_resolvent_scaling(self):
        """s R_{s beta}(-(sk)^2; x/s, y/s) = R_beta(-k^2; x, y)"""
        p, k = WhittakerParams(0.7 + 0.2j, 0.35), 0.9 + 0.3j
        x, y = np.array([0.4, 1.3, 2.0]), np.array([1.1, 0.6, 5.0])
        for s in (0.5, 2.5):
            dilated, factor = dilate(p, math.log(s))
            self.assertClose(factor, s**-2, rtol=1e-14)
            scaled = s * resolvent_kernel(dilated, s * k, x / s, y / s).value
            self.assertClose(scaled, resolvent_kernel(p, k, x, y).value, rtol=1e-10)

    def test_unit_apply_resolvent_against_kernel(self):
        p, k = WhittakerParams(0.5, 0.8), 1.2
        grid = uniform_grid(0.1, 5.0, 0.1)
        f = grid.sample(lambda x: np.exp(-((x - 2) ** 2)))
        g = apply_resolvent(p, k, f)
        matrix = resolvent_kernel(p, k, grid.nodes[:, None], grid.nodes[None, :]).value
        self.assertClose(g.values, matrix @ (grid.weights * f.values), rtol=1e-12, atol=1e-15)
        self.assertClose(apply_resolvent(p, k, GridFunction.zeros(grid)).values, np.zeros(len(grid)))

    def _resolvent_identity_error(self, p, k, center, h, x_max, window):
        grid = uniform_grid(h, x_max, h)
        f = grid.sample(lambda x: np.exp(-((x - center) ** 2)))
        g = apply_resolvent(p, k, f)
        inner, lg = apply_whittaker_operator(p.beta, p.m, grid.nodes, g.values)
        residual = lg + k * k * g.values[1:-1] - f.values[1:-1]
        # away from the x^{1/2+m} layer at 0, where differencing is inaccurate
        sel = (inner >= window[0]) & (inner <= window[1])
        return math.sqrt(np.sum(np.abs(residual[sel]) ** 2) / np.sum(np.abs(f.values[1:-1][sel]) ** 2))

    def test_unit_resolvent_identity(self):
        """(L + k^2) R f = f with second-order convergence"""
        p, k = WhittakerParams(0.5, 0.8), 1.2
        coarse = self._resolvent_identity_error(p, k, 4.0, 0.02, 30.0, (0.5, 25.0))
        fine = self._resolvent_identity_error(p, k, 4.0, 0.01, 30.0, (0.5, 25.0))
        self.assertLess(coarse, 5e-3)
        self.assertGreater(coarse / fine, 3.0)

    def test_unit_boundary_side_difference(self):
        p, k, x, y = WhittakerParams(0.4, 0.3), 1.0, 0.7, 1.9
        plus = resolvent_boundary_kernel(p, k, "+", x, y).value
        minus = resolvent_boundary_kernel(p, k, "-", x, y).value
        density = spectral_density_kernel(p, k, x, y).value
        self.assertClose((plus - minus) / (2j * math.pi), density, rtol=1e-10)

    def test_unit_boundary_free_case(self):
        """beta = 0, m = 1/2: sin(k x_<) e^{+-i k x_>} / k"""
        p, k = WhittakerParams(0.0, 0.5), 1.3
        x, y = np.array([0.4, 2.0]), np.array([1.5, 0.9])
        lower, upper = np.minimum(x, y), np.maximum(x, y)
        for sign in (1, -1):
            sample = resolvent_boundary_kernel(p, k, sign, x, y)
            self.assertEqual(sample.side, sign)
            self.assertClose(sample.value, np.sin(k * lower) * np.exp(sign * 1j * k * upper) / k, rtol=1e-10)
        self.assertEqual(resolvent_boundary_kernel(p, k, "+", 1.0, 2.0).value, resolvent_boundary_kernel(p, k, "+", 2.0, 1.0).value)

    def test_unit_density_free_case(self):
        sample = spectral_density_kernel(WhittakerParams(0.0, 0.5), 1.0, math.pi / 2, math.pi / 2)
        self.assertClose(sample.value, 1 / math.pi, rtol=1e-10)

        m, k, x, y = 0.3, 0.8, 1.7, 0.6
        expected = bessel_j(m, k * x) * bessel_j(m, k * y) / (math.pi * k)
        self.assertClose(spectral_density_kernel(WhittakerParams(0.0, m), k, x, y).value, expected, rtol=1e-10)

    def test_unit_density_positive_real_case(self):
        p = WhittakerParams(0.8, 0.3)
        x = np.array([0.3, 1.0, 4.0, 9.0])
        for k in (0.4, 1.1, 2.5):
            values = spectral_density_kernel(p, k, x, x).value
            self.assertClose(values.imag, np.zeros(x.shape), atol=1e-12 * np.max(np.abs(values)))
            self.assertTrue(np.all(values.real >= 0))

    def test_unit_exceptional_energies(self):
        self.assertEqual(exceptional_energies(WhittakerParams(0.4, 0.3)).size, 0)

        imaginary = WhittakerParams(1j, 0.3)
        expected = sorted(1 / (2 * (N + 0.8)) for N in range(4))
        self.assertClose(exceptional_energies(imaginary, "-", N_max=3), expected, rtol=1e-14)
        self.assertEqual(exceptional_energies(imaginary, "+", N_max=3).size, 0)
        with self.assertRaises(ExceptionalEnergy):
            resolvent_boundary_kernel(imaginary, 1 / 1.6, "-", 1.0, 2.0)
        with self.assertRaises(ExceptionalEnergy):
            spectral_density_kernel(imaginary, 1 / 1.6, 1.0, 2.0)

        complex_index = WhittakerParams(1.0, -0.5 + 0.5j)
        self.assertClose(exceptional_energies(complex_index, "+"), [1.0], rtol=1e-14)
        self.assertEqual(exceptional_energies(complex_index, "-").size, 0)

    @parameter_sweep(
        dict(beta=2.0, m=0.5, N=0),
        dict(beta=2.0, m=0.5, N=1),
        dict(beta=1.5, m=0.3, N=0),
        dict(beta=1.5 + 0.3j, m=0.2 + 0.1j, N=1),
    )
    def test_unit_riesz_trace_and_idempotency(self, beta, m, N):
        p = WhittakerParams(beta, m)
        grid = projection_grid(p, N)
        z = grid.nodes
        self.assertClose(grid.integrate(riesz_projection_kernel(p, N, z, z).value), 1.0, rtol=1e-6)

        x = np.array([0.5, 1.0, 2.5])
        column_x = riesz_projection_kernel(p, N, x[:, None], z[None, :]).value
        column_y = riesz_projection_kernel(p, N, z[:, None], x[None, :]).value
        composed = column_x @ (grid.weights[:, None] * column_y)
        self.assertClose(composed, riesz_projection_kernel(p, N, x[:, None], x[None, :]).value, rtol=1e-6)

    def test_unit_riesz_eigen_residual(self):
        for beta, m, N in ((2.0, 0.5, 0), (2.0, 0.5, 1), (1.5, 0.3, 0)):
            p = WhittakerParams(beta, m)
            x = np.linspace(0.5, 10.0, 9501)
            column = riesz_projection_kernel(p, N, x, 1.0).value
            inner, lp = apply_whittaker_operator(beta, m, x, column)
            residual = lp - eigen_record(p, N).value * column[1:-1]
            self.assertLess(np.max(np.abs(residual)) / np.max(np.abs(column)), 1e-5)

    def test_unit_riesz_hydrogen_ground_state(self):
        """(2, 1/2, 0): P(x, y) = 4 x y e^{-x-y}"""
        sample = riesz_projection_kernel(WhittakerParams(2.0, 0.5), 0, 0.7, 1.9)
        self.assertEqual(sample.provenance, "projection")
        self.assertClose(sample.value, 4 * 0.7 * 1.9 * math.exp(-2.6), rtol=1e-13)

    @parameter_sweep(dict(beta=2.0, m=0.5, N=0), dict(beta=1.5 + 0.3j, m=0.2 + 0.1j, N=1))
    def test_unit_riesz_by_contour(self, beta, m, N):
        p = WhittakerParams(beta, m)
        by_contour = riesz_projection_by_contour(p, N, 0.7, 1.9).value
        self.assertClose(by_contour, riesz_projection_kernel(p, N, 0.7, 1.9).value, rtol=1e-6)

    def test_unit_simple_pole(self):
        profile = pole_order_profile(WhittakerParams(2.0, 0.5), 0, 0.7, 1.9, [1e-2, 1e-3, 1e-4])
        self.assertTrue(np.all(profile > 0))
        self.assertClose(profile[1:] / profile[:-1], np.ones(2), rtol=0.02)

    def test_unit_spectrum_same_value_set(self):
        """(1, -0.75-2.4i) has the points of (1, 0.25-2.4i) plus one resonance"""
        lower = spectrum_descriptor(WhittakerParams(1.0, -0.75 - 2.4j), N_max=8)
        upper = spectrum_descriptor(WhittakerParams(1.0, 0.25 - 2.4j), N_max=7)
        self.assertClose(lower.presented[1:], upper.presented, rtol=1e-14)
        self.assertEqual([r.kind for r in lower.discrete[1:]], [r.kind for r in upper.discrete])
        self.assertIs(lower.discrete[0].kind, EigenKind.RESONANCE)
        for descriptor in (lower, upper):
            for point in descriptor.presented:
                self.assertLess(on_trajectory(descriptor.params, point), 1e-12)

    def test_unit_spectrum_real_case(self):
        descriptor = spectrum_descriptor(WhittakerParams(1.3, 0.4))
        self.assertTrue(np.all(descriptor.presented.imag == 0))
        self.assertTrue(np.all(descriptor.presented.real < 0))
        self.assertClose(descriptor.trajectory.imag, np.zeros(descriptor.t_samples.shape), atol=1e-15)
        self.assertEqual(descriptor.ray_angle, 0.0)

    def test_unit_trajectory_skips_real_pole(self):
        real = spectrum_descriptor(WhittakerParams(1.0, 0.5), t_samples=np.linspace(-1.0, 1.0, 5))
        self.assertClose(real.trajectory, [-0.25, -1.0, -1.0, -0.25], rtol=1e-15)
        self.assertTrue(np.all(np.isfinite(real.trajectory)))
        complex_m = spectrum_descriptor(WhittakerParams(1.0, 0.5 + 0.5j), t_samples=np.linspace(-1.0, 1.0, 5))
        self.assertEqual(complex_m.trajectory.shape, (5,))
        self.assertClose(complex_m.trajectory[2], 1.0, rtol=1e-15)

    def test_unit_spectrum_rotation(self):
        """The point spectrum stays while the continuous ray turns as e^{-2i phi}"""
        m = -0.75 + 3.2j
        rotated = spectrum_descriptor(WhittakerParams(1j, m), phi=math.pi / 2)
        reference = spectrum_descriptor(WhittakerParams(1.0, m))
        self.assertClose(rotated.presented, reference.presented, rtol=1e-14)
        self.assertClose(rotated.ray(1.0), -1.0, atol=1e-15)
        self.assertClose(rotated.trajectory, reference.trajectory, rtol=1e-12)
        for point in rotated.presented:
            self.assertLess(on_trajectory(rotated.params, point, phi=math.pi / 2), 1e-12)

    def test_unit_rotated_presentation(self):
        p = WhittakerParams(2 * cmath.exp(1j * math.pi / 3), 0.4 + 0.1j)
        rotated, factor = rotated_presentation(p)
        self.assertClose(rotated.beta, 2.0, rtol=1e-15)
        self.assertClose(factor, cmath.exp(2j * math.pi / 3), rtol=1e-15)
        # lambda_N(beta) = factor lambda_N(|beta|)
        self.assertClose(
            [r.value for r in eigenvalues(p, 3)], [factor * r.value for r in eigenvalues(rotated, 3)], rtol=1e-14
        )

    def test_unit_singular_family_point(self):
        z = -1 + 1j
        for eps in (1e-1, 1e-2, 1e-3):
            p = singular_family_point(z, eps)
            self.assertClose(eigenvalues(p, 0)[0].value, z, rtol=1e-12)

    def test_accept_resolvent_identity(self):
        """Three bumps at the finest step, with observed order under halving"""
        cases = [
            (WhittakerParams(0.5, 0.8), 1.2, 4.0),
            (WhittakerParams(1.0 + 0.5j, 0.3), 0.9 + 0.2j, 6.0),
            (WhittakerParams(-0.7, 1.3), 1.5, 10.0),
        ]
        for p, k, center in cases:
            with self.subTest(beta=p.beta, m=p.m, k=k):
                coarse = self._resolvent_identity_error(p, k, center, 2e-3, 40.0, (0.05, 40.0))
                fine = self._resolvent_identity_error(p, k, center, 1e-3, 40.0, (0.05, 40.0))
                self.assertLess(fine, 1e-3)
                self.assertGreater(math.log2(coarse / fine), 1.8)

    def test_accept_appendix_spectra(self):
        for m_r in (-0.75, -0.5, 0.25, 0.5, 2.0):
            p = WhittakerParams(1.0, m_r - 2.4j)
            descriptor = spectrum_descriptor(p, N_max=12)
            for point in descriptor.presented:
                self.assertLess(on_trajectory(p, point), 1e-12)
            if m_r <= -0.5:
                shifted = spectrum_descriptor(WhittakerParams(1.0, m_r + 1 - 2.4j), N_max=11)
                self.assertClose(descriptor.presented[1:], shifted.presented, rtol=1e-14)
                extra = descriptor.discrete[0].kind
                self.assertIs(extra, EigenKind.RESONANCE if m_r < -0.5 else EigenKind.UNDEFINED)


if __name__ == "__main__":
    unittest.main()
