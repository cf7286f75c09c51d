""" Hankel-Whittaker transforms and the intrinsic scattering operator.

Kernels, for kappa = beta/2k and s = 1/2 + m:

    F+-(x, k) = (2 pi)^{-1/2} e^{+-i pi m/2} e^{pi kappa/2} Gamma(s +- i kappa) J_{kappa,m}(2xk)
    F(x, k)   = (2 pi)^{-1/2} e^{pi kappa/2} |Gamma(s + i kappa)| J_{kappa,m}(2xk)   (beta, m real)
    F_D(x, k) = (2/pi)^{1/2} sin(xk),   F_N(x, k) = (2/pi)^{1/2} cos(xk)

F+- map functions of k to functions of x; their transposes F+-# go back.
The multiplier g(k) = e^{-i pi m} Gamma(s - i kappa) / Gamma(s + i kappa)
satisfies F+ g = F-, and g = e^{2 i delta} defines the phase shift delta.
Operators are applied to GridFunctions by quadrature on truncated grids.
"""

import cmath
import math
import logging

from enum import Enum
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ExceptionalEnergy, RealOnly
from .grid import GridFunction, gauss_legendre_panels, oscillatory_grid
from .special_core import gamma, loggamma, pole_distance, restore
from .spectral import resolvent_boundary_kernel, spectral_density_kernel, spectral_params
from .whittaker_functions import WhittakerParams, as_sign, coulomb_mapping, eval_J
from .util.test import *

logger = logging.getLogger(__name__)

X_MAX = 200.0
GUARD_BAND = 1e-8
UNBOUNDED_LOG = 30.0
K_PANELS_PER_UNIT = 40
K_POINTS_PER_PANEL = 8


class Direction(Enum):
    OUTGOING = "+"
    INCOMING = "-"
    REAL = "real"
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class TransformKernelSpec:
    """Which kernel to use.

    Parameters
    ----------
    params : WhittakerParams or None
        Not used by the sine and cosine kernels

    direction : Direction or its value

    maslov : int
        0, +1 or -1; the phase e^{+-i pi/4} of F_D^{+-} and e^{-+i pi/4} of F_N^{+-}
    """

    params: WhittakerParams = None
    direction: Direction = Direction.OUTGOING
    maslov: int = 0

    def __post_init__(self):
        direction = Direction(self.direction)
        object.__setattr__(self, "direction", direction)
        assert self.maslov in (0, 1, -1), "Maslov sign must be 0, +1 or -1"
        if self.is_reference:
            return
        assert self.maslov == 0, "Maslov phases apply to the sine and cosine kernels only"
        assert self.params is not None, "Hankel-Whittaker kernels need (beta, m)"
        object.__setattr__(self, "params", spectral_params(self.params))
        if direction is Direction.REAL and (self.params.beta.imag != 0 or self.params.m.imag != 0):
            raise RealOnly("the real-symmetric kernel needs real beta and m")

    @property
    def is_reference(self):
        return self.direction in (Direction.DIRICHLET, Direction.NEUMANN)

    @property
    def sign(self):
        return {Direction.OUTGOING: 1, Direction.INCOMING: -1}.get(self.direction)

    @classmethod
    def whittaker(cls, p, sign):
        return cls(p, Direction.OUTGOING if as_sign(sign) > 0 else Direction.INCOMING)

    @classmethod
    def sine(cls, maslov=0):
        return cls(None, Direction.DIRICHLET, maslov)

    @classmethod
    def cosine(cls, maslov=0):
        return cls(None, Direction.NEUMANN, maslov)


@dataclass(frozen=True)
class ScatteringValue:
    """g(k) and the phase shift delta(k), g = e^{2 i delta}."""

    k: float
    g: complex
    delta: complex

    @property
    def modulus(self):
        return abs(self.g)


def _positive(values, name):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise ValueError(f"{name} must be positive and finite")
    return values


def _guard(a, k, guard):
    if pole_distance(a) < guard:
        raise ExceptionalEnergy(f"k={k} is an exceptional energy, Gamma({a}) is singular")


def _prefactor(spec, k, guard):
    """Constant in x multiplying J_{kappa,m}(2xk)."""
    p = spec.params
    kappa = p.beta / (2 * k)
    s = 0.5 + p.m
    if spec.direction is Direction.REAL:
        _guard(s + 1j * kappa, k, guard)
        return math.exp(math.pi * kappa.real / 2) * abs(gamma(s + 1j * kappa)) / math.sqrt(2 * math.pi)
    sign = spec.sign
    a = s + sign * 1j * kappa
    _guard(a, k, guard)
    return cmath.exp(sign * 1j * math.pi * p.m / 2) * cmath.exp(math.pi * kappa / 2) * gamma(a) / math.sqrt(2 * math.pi)


def _reference_kernel(spec, xk):
    if spec.direction is Direction.DIRICHLET:
        return cmath.exp(spec.maslov * 1j * math.pi / 4) * math.sqrt(2 / math.pi) * np.sin(xk)
    return cmath.exp(-spec.maslov * 1j * math.pi / 4) * math.sqrt(2 / math.pi) * np.cos(xk)


def _column(spec, x, k, guard):
    if spec.is_reference:
        return _reference_kernel(spec, x * k)
    p = spec.params
    local = WhittakerParams(p.beta / (2 * k), p.m)
    return _prefactor(spec, k, guard) * np.atleast_1d(eval_J(local, 2 * k * x))


def hw_kernel(spec, x, k, guard=GUARD_BAND):
    """Kernel value F(x, k) of the transform selected by `spec`; x and k broadcast.

    Parameters
    ----------
    spec : TransformKernelSpec

    x, k : float or numpy array
        Positive positions and energies

    guard : float, optional
        Distance to a Gamma pole below which ExceptionalEnergy is raised
    """
    x, k = np.broadcast_arrays(_positive(x, "x"), _positive(k, "k"))
    flat_x, flat_k = x.ravel(), k.ravel()
    out = np.empty(flat_x.shape, dtype=complex)
    for value in np.unique(flat_k):
        sel = flat_k == value
        out[sel] = _column(spec, flat_x[sel], float(value), guard)
    return restore(out, x.shape)


def kernel_matrix(spec, x_nodes, k_nodes, guard=GUARD_BAND):
    """Dense matrix F(x_i, k_j)."""
    x_nodes = _positive(x_nodes, "x")
    k_nodes = _positive(k_nodes, "k")
    if spec.is_reference:
        return _reference_kernel(spec, np.outer(x_nodes, k_nodes))
    if spec.params.beta == 0:
        # J_{0,m} is shared by all k
        prefactors = np.array([_prefactor(spec, k, guard) for k in k_nodes])
        local = WhittakerParams(0.0, spec.params.m)
        values = eval_J(local, 2 * np.outer(x_nodes, k_nodes))
        return values * prefactors[None, :]
    logger.debug("kernel matrix %s: %d x %d", spec.direction.value, x_nodes.size, k_nodes.size)
    return np.column_stack([_column(spec, x_nodes, k, guard) for k in k_nodes])


def apply_transform(spec, f, out_grid, guard=GUARD_BAND):
    """(F f)(x) = int F(x, k) f(k) dk for f sampled on a k-grid, evaluated on out_grid."""
    matrix = kernel_matrix(spec, out_grid.nodes, f.nodes, guard)
    return GridFunction(out_grid, matrix @ (f.weights * f.values))


def apply_transpose(spec, phi, out_grid, guard=GUARD_BAND):
    """(F# phi)(k) = int F(x, k) phi(x) dx for phi sampled on an x-grid, evaluated on out_grid."""
    matrix = kernel_matrix(spec, phi.nodes, out_grid.nodes, guard)
    return GridFunction(out_grid, matrix.T @ (phi.weights * phi.values))


# Intrinsic scattering operator


def _log_g(p, k, guard):
    kappa = p.beta / (2 * k)
    s = 0.5 + p.m
    _guard(s - 1j * kappa, k, guard)
    _guard(s + 1j * kappa, k, guard)
    return -1j * math.pi * p.m + loggamma(s - 1j * kappa) - loggamma(s + 1j * kappa)


def g_scattering(p, k, guard=GUARD_BAND):
    """g(k) = e^{-i pi m} Gamma(1/2+m-i beta/2k) / Gamma(1/2+m+i beta/2k) and delta = log g / 2i.

    Computed from log Gamma, so the phase shift is continuous in k.
    """
    p = spectral_params(p)
    k = float(_positive(k, "k"))
    log_g = _log_g(p, k, guard)
    return ScatteringValue(k, cmath.exp(log_g), log_g / 2j)


def coulomb_phase(ell, eta):
    """sigma_l = arg Gamma(l + 1 + i eta), continuous in eta."""
    return loggamma(ell + 1 + 1j * eta).imag


def scattering_class(p):
    """unitary for real (beta, m); bounded with bounded inverse for real beta, Re m != -1/2; unbounded otherwise."""
    p = spectral_params(p)
    if p.beta.imag == 0 and p.m.imag == 0:
        return "unitary"
    if p.beta.imag == 0 and p.m.real != -0.5:
        return "bounded"
    return "unbounded"


def scattering_growth(p, k_nodes, guard=GUARD_BAND):
    """(max |log |g||, unbounded flag) over the energies k_nodes."""
    p = spectral_params(p)
    growth = max(abs(_log_g(p, float(k), guard).real) for k in _positive(k_nodes, "k"))
    return growth, growth > UNBOUNDED_LOG


def g_relation_check(p, k, x=(0.5, 1.0, 5.0, 20.0), guard=GUARD_BAND):
    """max_x |F+(x, k) g(k) - F-(x, k)| / |F-(x, k)|."""
    outgoing = hw_kernel(TransformKernelSpec.whittaker(p, 1), x, k, guard)
    incoming = hw_kernel(TransformKernelSpec.whittaker(p, -1), x, k, guard)
    g = g_scattering(p, k, guard).g
    return float(np.max(np.abs(outgoing * g - incoming) / np.abs(incoming)))


def hw_asymptotic(p, sign, x, k):
    """Two-wave form of F+-(x, k) for large xk, theta = xk + kappa ln(2xk).

    F+ ~ (2 pi)^{-1/2} (e^{-i pi/4} e^{i theta} + e^{i pi/4} g^{-1} e^{-i theta})
    F- ~ (2 pi)^{-1/2} (e^{i pi/4} e^{-i theta} + e^{-i pi/4} g e^{i theta})
    """
    sign = as_sign(sign)
    p = spectral_params(p)
    x = _positive(x, "x")
    kappa = p.beta / (2 * k)
    theta = x * k + kappa * np.log(2 * x * k)
    g = g_scattering(p, k).g
    exchange = g ** (-sign)
    waves = cmath.exp(-sign * 1j * math.pi / 4) * np.exp(sign * 1j * theta)
    waves = waves + cmath.exp(sign * 1j * math.pi / 4) * exchange * np.exp(-sign * 1j * theta)
    return restore(waves / math.sqrt(2 * math.pi), x.shape)


# Desk-scale operator checks


def compact_bump(k, a=0.5, b=2.0):
    """exp(-1/((k-a)(b-k))) on ]a, b[, zero elsewhere."""
    k = np.asarray(k, dtype=float)
    inside = (k > a) & (k < b)
    safe = np.where(inside, (k - a) * (b - k), 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


def transform_grids(k_band=(0.5, 2.0), x_max=X_MAX):
    """(x-grid, k-grid) resolving the oscillation e^{ixk} up to x_max over the band."""
    a, b = k_band
    panels = max(4, math.ceil(K_PANELS_PER_UNIT * (b - a) * x_max / X_MAX))
    k_grid = gauss_legendre_panels(np.linspace(a, b, panels + 1), K_POINTS_PER_PANEL)
    x_grid = oscillatory_grid(x_max, b)
    return x_grid, k_grid


def isometry_residual(p, sign, f, x_grid, guard=GUARD_BAND):
    """||F-+# F+- f - f|| / ||f|| for f sampled on a k-grid."""
    sign = as_sign(sign)
    forward = apply_transform(TransformKernelSpec.whittaker(p, sign), f, x_grid, guard)
    back = apply_transpose(TransformKernelSpec.whittaker(p, -sign), forward, f.grid, guard)
    return (back - f).norm() / f.norm()


def _require_real(p):
    p = spectral_params(p)
    if p.beta.imag != 0 or p.m.imag != 0:
        raise RealOnly("wave operators are defined for real beta and m")
    return p


def moller_apply(p, sign, f, k_grid, reference="dirichlet", guard=GUARD_BAND):
    """W+- f = F+-_{beta,m} R-+# f for f on an x-grid; the result lives on the same grid.

    The reference transform R is the sine transform F_D (reference='dirichlet')
    or F_{beta,1/2} (reference='standard'). Only operator application is
    offered; the kernel composition integral does not converge pointwise.
    """
    sign = as_sign(sign)
    p = _require_real(p)
    if reference == "dirichlet":
        incoming = TransformKernelSpec.sine(maslov=-sign)
    elif reference == "standard":
        incoming = TransformKernelSpec.whittaker(WhittakerParams(p.beta, 0.5), -sign)
    else:
        raise ValueError(f"Unknown reference transform '{reference}'")
    spectral_side = apply_transpose(incoming, f, k_grid, guard)
    return apply_transform(TransformKernelSpec.whittaker(p, sign), spectral_side, f.grid, guard)


def scattering_apply(p, f, k_grid, guard=GUARD_BAND):
    """S f = W-# W- f against the sine transform, for f on an x-grid."""
    p = _require_real(p)
    # W-# = F_D^{+} F-#
    outgoing = moller_apply(p, -1, f, k_grid, guard=guard)
    spectral_side = apply_transpose(TransformKernelSpec.whittaker(p, -1), outgoing, k_grid, guard)
    return apply_transform(TransformKernelSpec.sine(maslov=1), spectral_side, f.grid, guard)


def discretized_norm(spec, x_grid, k_grid, guard=GUARD_BAND):
    """Largest singular value of the weighted kernel matrix; reported, not bounded."""
    matrix = kernel_matrix(spec, x_grid.nodes, k_grid.nodes, guard)
    weighted = np.sqrt(x_grid.weights)[:, None] * matrix * np.sqrt(k_grid.weights)[None, :]
    return float(linalg.svdvals(weighted)[0])


class ScatteringTransformTest(TestCase):
    def test_unit_reference_kernels(self):
        self.assertClose(hw_kernel(TransformKernelSpec.sine(), math.pi / 2, 1.0), math.sqrt(2 / math.pi), rtol=1e-15)
        self.assertClose(hw_kernel(TransformKernelSpec.cosine(), 0.3, 2.0), math.sqrt(2 / math.pi) * math.cos(0.6))
        plus = hw_kernel(TransformKernelSpec.sine(maslov=1), 0.7, 1.3)
        self.assertClose(plus, cmath.exp(1j * math.pi / 4) * math.sqrt(2 / math.pi) * math.sin(0.91))
        minus = hw_kernel(TransformKernelSpec.cosine(maslov=-1), 0.7, 1.3)
        self.assertClose(minus, cmath.exp(1j * math.pi / 4) * math.sqrt(2 / math.pi) * math.cos(0.91))

    def test_unit_spec_validation(self):
        with self.assertRaises(RealOnly):
            TransformKernelSpec(WhittakerParams(1.0 + 0.1j, 0.5), Direction.REAL)
        with self.assertRaises(AssertionError):
            TransformKernelSpec(WhittakerParams(1.0, 0.5), Direction.OUTGOING, maslov=1)
        self.assertIs(TransformKernelSpec(WhittakerParams(1.0, 0.5), "real").direction, Direction.REAL)

    def test_unit_free_kernel_is_maslov_sine(self):
        x = np.array([0.2, 1.0, 7.5])
        for sign in (1, -1):
            whittaker = hw_kernel(TransformKernelSpec.whittaker(WhittakerParams(0.0, 0.5), sign), x, 1.4)
            self.assertClose(whittaker, hw_kernel(TransformKernelSpec.sine(maslov=sign), x, 1.4), rtol=1e-10)

    def test_unit_g_free(self):
        for m in (0.5, 0.2, 1.3 + 0.4j):
            self.assertClose(g_scattering(WhittakerParams(0.0, m), 0.8).g, cmath.exp(-1j * math.pi * m), rtol=1e-14)
        self.assertClose(g_scattering(WhittakerParams(0.0, 0.5), 2.0).g, -1j, rtol=1e-14)

    def test_unit_g_unitary_real_case(self):
        beta = self.rng.uniform(-3, 3, 200)
        m = self.rng.uniform(-0.45, 3, 200)
        k = self.rng.uniform(0.05, 10, 200)
        for b, mm, kk in zip(beta, m, k):
            value = g_scattering(WhittakerParams(b, mm), kk)
            self.assertClose(value.modulus, 1.0, rtol=1e-12)
            self.assertClose(value.g, cmath.exp(2j * value.delta), rtol=1e-12)
            self.assertLess(abs(value.delta.imag), 1e-12)

    def test_unit_g_phase_relation_complex(self):
        for beta, m in WHITTAKER_SUITE:
            value = g_scattering(WhittakerParams(beta, m), 0.9)
            self.assertClose(value.g, cmath.exp(2j * value.delta), rtol=1e-12)

    def test_unit_coulomb_phase(self):
        """l = 1, eta = -1: delta = sigma_1 - pi/2 - pi/4"""
        ell, eta = 1, -1.0
        p = WhittakerParams(2.0, ell + 0.5)
        self.assertEqual(coulomb_mapping(ell, eta), p)
        sigma = coulomb_phase(ell, eta)
        self.assertClose(sigma, complex(mpmath.loggamma(2 - 1j)).imag, rtol=1e-13)
        self.assertClose(g_scattering(p, 1.0).delta, sigma - ell * math.pi / 2 - math.pi / 4, rtol=1e-13)

    def test_unit_g_relation(self):
        self.assertLess(g_relation_check(WhittakerParams(0.8, 0.4), 1.3), 1e-10)
        self.assertLess(g_relation_check(WhittakerParams(0.0, 0.5), 1.3), 1e-12)
        self.assertLess(g_relation_check(WhittakerParams(0.7 + 0.3j, 0.2 - 0.1j), 0.6), 1e-10)

    def test_unit_real_case_conjugation(self):
        p, k = WhittakerParams(0.8, 0.4), 1.3
        x = np.array([0.3, 2.0, 11.0])
        plus = hw_kernel(TransformKernelSpec.whittaker(p, 1), x, k)
        minus = hw_kernel(TransformKernelSpec.whittaker(p, -1), x, k)
        self.assertClose(np.conj(plus), minus, rtol=1e-12)

        real = hw_kernel(TransformKernelSpec(p, Direction.REAL), x, k)
        delta = g_scattering(p, k).delta
        self.assertClose(real.imag, np.zeros(3), atol=1e-12 * np.max(np.abs(real)))
        self.assertClose(plus, real * cmath.exp(-1j * delta), rtol=1e-11)
        self.assertClose(minus, real * cmath.exp(1j * delta), rtol=1e-11)

    def test_unit_density_factorization(self):
        """2k p(k^2; x, y) = F-(x, k) F+(y, k)"""
        for p in (WhittakerParams(0.4, 0.3), WhittakerParams(1.0 + 0.5j, 0.25 - 0.2j)):
            k, x, y = 1.0, np.array([0.7, 2.0]), np.array([1.9, 0.4])
            density = spectral_density_kernel(p, k, x, y).value
            product = hw_kernel(TransformKernelSpec.whittaker(p, -1), x, k) * hw_kernel(TransformKernelSpec.whittaker(p, 1), y, k)
            self.assertClose(2 * k * density, product, rtol=1e-10)

    def test_unit_small_x_power(self):
        p, k = WhittakerParams(0.6, 0.3), 1.1
        x = np.array([1e-4, 1e-3])
        ratio = hw_kernel(TransformKernelSpec.whittaker(p, 1), x, k) / x**0.8
        self.assertClose(ratio[0], ratio[1], rtol=3e-3)

    def test_unit_large_x_two_wave_form(self):
        p, k, x = WhittakerParams(1.0, 0.3), 1.0, 60.0
        for sign in (1, -1):
            exact = hw_kernel(TransformKernelSpec.whittaker(p, sign), x, k)
            self.assertClose(hw_asymptotic(p, sign, x, k), exact, rtol=3e-2)

    def test_unit_exceptional_guard(self):
        p = WhittakerParams(1j, 0.3)
        with self.assertRaises(ExceptionalEnergy):
            hw_kernel(TransformKernelSpec.whittaker(p, 1), 1.0, 0.625)
        self.assertTrue(self.finite(complex(hw_kernel(TransformKernelSpec.whittaker(p, -1), 1.0, 0.625))))

    def test_unit_scattering_growth(self):
        band = np.geomspace(1e-3, 1e3, 61)
        wide = np.geomspace(5e-4, 2e3, 61)
        for p in (WhittakerParams(1.2, 0.4 + 0.3j), WhittakerParams(-0.8, 1.1)):
            growth, unbounded = scattering_growth(p, band)
            self.assertFalse(unbounded)
            self.assertClose(scattering_growth(p, wide)[0], growth, rtol=1e-2, atol=1e-9)
        self.assertTrue(scattering_growth(WhittakerParams(0.5 + 0.5j, 0.3), band)[1])
        self.assertEqual(scattering_class(WhittakerParams(1.0, 0.3)), "unitary")
        self.assertEqual(scattering_class(WhittakerParams(1.0, 0.3 + 1j)), "bounded")
        self.assertEqual(scattering_class(WhittakerParams(1.0, -0.5 + 1j)), "unbounded")
        self.assertEqual(scattering_class(WhittakerParams(1j, 0.3)), "unbounded")

    def test_unit_sine_transform_self_inverse(self):
        x_grid, k_grid = transform_grids(x_max=100.0)
        f = k_grid.sample(compact_bump)
        there = apply_transform(TransformKernelSpec.sine(), f, x_grid)
        back = apply_transpose(TransformKernelSpec.sine(), there, k_grid)
        self.assertLess((back - f).norm() / f.norm(), 1e-3)

    def test_unit_linearity(self):
        x_grid, k_grid = transform_grids(x_max=20.0)
        f = k_grid.sample(compact_bump)
        g = k_grid.sample(lambda k: np.sin(3 * k) * compact_bump(k))
        spec = TransformKernelSpec.cosine(maslov=1)
        combined = apply_transform(spec, 2.0 * f + (-0.5j) * g, x_grid).values
        separate = 2.0 * apply_transform(spec, f, x_grid).values - 0.5j * apply_transform(spec, g, x_grid).values
        self.assertClose(combined, separate, rtol=1e-12, atol=1e-14)

    def test_unit_free_moller_identity(self):
        x_grid, k_grid = transform_grids(x_max=60.0)
        f = x_grid.sample(lambda x: np.exp(-((x - 6.0) ** 2)))
        for sign in (1, -1):
            moved = moller_apply(WhittakerParams(0.0, 0.5), sign, f, k_grid)
            # the band of k_grid limits resolution, so compare in the band-limited image
            band_limited = apply_transform(
                TransformKernelSpec.sine(), apply_transpose(TransformKernelSpec.sine(), f, k_grid), x_grid
            )
            self.assertLess((moved - band_limited).norm() / band_limited.norm(), 1e-6)
        with self.assertRaises(RealOnly):
            moller_apply(WhittakerParams(1.0 + 1j, 0.5), 1, f, k_grid)

    def test_accept_isometry(self):
        x_grid, k_grid = transform_grids()
        f = k_grid.sample(compact_bump)
        for beta, m in ((1.0, 0.5), (1.0, -0.25), (-1.0, 0.5)):
            for sign in (1, -1):
                with self.subTest(beta=beta, m=m, sign=sign):
                    self.assertLess(isometry_residual(WhittakerParams(beta, m), sign, f, x_grid), 1e-3)

    def test_accept_boundary_density_grid(self):
        p = WhittakerParams(0.4, 0.3)
        positions = np.array([0.3, 0.9, 2.0, 5.0, 12.0])
        for k in (0.3, 0.7, 1.0, 1.9, 4.0):
            x, y = positions[:, None], positions[None, :]
            density = spectral_density_kernel(p, k, x, y).value
            plus = resolvent_boundary_kernel(p, k, "+", x, y).value
            minus = resolvent_boundary_kernel(p, k, "-", x, y).value
            self.assertClose((plus - minus) / (2j * math.pi), density, rtol=1e-10, atol=1e-10 * np.max(np.abs(density)))
            product = hw_kernel(TransformKernelSpec.whittaker(p, -1), x, k) * hw_kernel(TransformKernelSpec.whittaker(p, 1), y, k)
            self.assertClose(2 * k * density, product, rtol=1e-10, atol=1e-10 * np.max(np.abs(product)))

    def test_accept_scattering_is_multiplication(self):
        """F_D S F_D = i g on a band-limited bump"""
        p = WhittakerParams(1.0, 0.5)
        x_grid, k_grid = transform_grids()
        h = k_grid.sample(compact_bump)
        f = apply_transform(TransformKernelSpec.sine(), h, x_grid)
        scattered = apply_transpose(TransformKernelSpec.sine(), scattering_apply(p, f, k_grid), k_grid)
        g = np.array([g_scattering(p, k).g for k in k_grid.nodes])
        expected = h.with_values(1j * g * h.values)
        self.assertLess((scattered - expected).norm() / h.norm(), 1e-3)

    def test_accept_moller_isometry(self):
        p = WhittakerParams(1.0, 0.5)
        x_grid, k_grid = transform_grids()
        f = apply_transform(TransformKernelSpec.sine(), k_grid.sample(compact_bump), x_grid)
        for sign in (1, -1):
            moved = moller_apply(p, sign, f, k_grid)
            self.assertClose(moved.norm(), f.norm(), rtol=1e-3)
        standard = moller_apply(p, 1, f, k_grid, reference="standard")
        self.assertTrue(math.isfinite(standard.norm()))

    def test_accept_discretized_norm_reported(self):
        x_grid, k_grid = transform_grids(x_max=50.0)
        norms = [
            discretized_norm(TransformKernelSpec.whittaker(WhittakerParams(1.0, 0.3 + 0.5j), 1), x_grid, k_grid),
            discretized_norm(TransformKernelSpec.sine(), x_grid, k_grid),
        ]
        self.assertTrue(all(math.isfinite(n) and n > 0 for n in norms))


if __name__ == "__main__":
    unittest.main()
