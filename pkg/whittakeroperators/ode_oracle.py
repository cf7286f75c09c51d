""" Independent numerical oracle: direct integration of the Whittaker equations.

    v'' = ((m^2 - 1/4)/z^2 - beta/z + energy) v,   z = t e^{i angle}, t > 0

with energy +1/4 (hyperbolic), -1/4 (trigonometric), 0 (zero energy) or any
constant. Series solutions are seeded from their Frobenius series: those
regular at 0 at the inner end and integrated outward; y at the turning point
of the zero-energy equation and integrated both ways. Solutions fixed by their
behaviour at infinity are seeded from the far-field series and integrated
inward. The seeds use only the recurrences in this module, never the
closed-form evaluators.
"""

import cmath
import math
import logging

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as scipy_integrate

from .errors import SeriesNotApplicable, StiffnessFailure, UnsupportedCase
from .special_core import PolarPoint, rgamma
from .whittaker_functions import (
    SolutionKind,
    WhittakerParams,
    degenerate_order,
    whittaker_derivative,
    zero_energy,
)
from .util.test import *

logger = logging.getLogger(__name__)

TOL_ODE = 1e-10
TOL_SERIES = 1e-17
MAX_TERMS = 2000
X_SEED = 1e-3
X_FAR = 80.0
X_COMPARE = (0.1, 20.0)

ENERGY = {"hyperbolic": 0.25, "trigonometric": -0.25, "zero_energy": 0.0}


@dataclass(frozen=True)
class OdeProblem:
    """Initial value problem for one Whittaker-type equation.

    Parameters
    ----------
    params : WhittakerParams

    energy_term : complex
        Constant coefficient of v in the equation

    x_start, x_end : float
        Integration runs from x_start to x_end, either direction

    seed : (complex, complex)
        (v, dv/dt) at x_start

    angle : float, optional
        Direction of the ray z = t e^{i angle} the equation is integrated on
    """

    params: WhittakerParams
    energy_term: complex
    x_start: float
    x_end: float
    seed: tuple
    angle: float = 0.0

    def __post_init__(self):
        assert self.x_start > 0 and self.x_end > 0, "The equation is singular at 0; integrate on t > 0"
        assert self.x_start != self.x_end, "Empty integration interval"
        object.__setattr__(self, "energy_term", complex(self.energy_term))
        object.__setattr__(self, "seed", (complex(self.seed[0]), complex(self.seed[1])))

    @property
    def interval(self):
        return min(self.x_start, self.x_end), max(self.x_start, self.x_end)

    def rhs(self, t, y):
        p = self.params
        unit = cmath.exp(1j * self.angle)
        z = t * unit
        potential = (p.m * p.m - 0.25) / (z * z) - p.beta / z + self.energy_term
        return [y[1], unit * unit * potential * y[0]]


@dataclass(frozen=True, eq=False)
class Solution:
    """Dense output of an integrated OdeProblem."""

    problem: OdeProblem
    dense: object = field(repr=False)
    nfev: int = 0

    def state(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.problem.interval
        assert np.all((x >= lo * (1 - 1e-12)) & (x <= hi * (1 + 1e-12))), "Outside the integrated interval"
        return self.dense(np.ravel(x)).reshape((2,) + x.shape)

    def __call__(self, x):
        return self.state(x)[0]

    def derivative(self, x):
        return self.state(x)[1]


# Seeds


def frobenius_series(beta, m, energy, a0, point, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """z^{1/2+m} sum_k a_k z^k with k(k+2m) a_k = -beta a_{k-1} + energy a_{k-2}.

    Returns (v, dv/dz) at a PolarPoint.
    """
    z = complex(point.value)
    power = complex(point.power(0.5 + m))
    s = 0.5 + m
    previous, current = 0j, complex(a0)
    value = current
    derivative = s * current
    zk = 1.0 + 0j
    small_run = 0
    for k in range(1, max_terms):
        denominator = k * (k + 2 * m)
        if abs(denominator) < 1e-12:
            raise SeriesNotApplicable(f"indicial roots collide at k={k} for m={m}")
        previous, current = current, (-beta * current + energy * previous) / denominator
        zk *= z
        term = current * zk
        value += term
        derivative += (k + s) * term
        small_run = small_run + 1 if abs(term) <= tol * abs(value) else 0
        if small_run >= 3:
            return power * value, power * derivative / z
    raise SeriesNotApplicable(f"Frobenius series did not settle at z={z}")


def far_field_series(beta, m, kappa, c0, x, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """e^{kappa x} x^rho sum_n c_n x^{-n} with kappa^2 = energy, rho = -beta/(2 kappa).

    The series is asymptotic; it is cut at its smallest term. Returns (v, dv/dx).
    """
    mu = m * m - 0.25
    rho = -beta / (2 * kappa)
    c = complex(c0)
    value = c
    derivative = c * (kappa + rho / x)
    last = abs(c)
    for n in range(1, max_terms):
        c = c * ((rho - n + 1) * (rho - n) - mu) / (2 * kappa * n * x)
        size = abs(c)
        if size > last:
            break
        value += c
        derivative += c * (kappa + (rho - n) / x)
        if size <= tol * abs(value):
            break
        last = size
    envelope = cmath.exp(kappa * x + rho * math.log(x))
    return envelope * value, envelope * derivative


def _regular_seed(beta, m, energy, x, angle=0.0, normalization=None):
    a0 = rgamma(1 + 2 * m) if normalization is None else normalization
    point = PolarPoint(x, angle)
    return frobenius_series(beta, m, energy, a0, point)


def _zero_energy_seed(kind, beta, m, x):
    def regular(index):
        a0 = math.sqrt(math.pi) * complex(beta) ** (0.25 + index) * rgamma(1 + 2 * index)
        return np.array(_regular_seed(beta, index, 0.0, x, normalization=a0))

    if kind is SolutionKind.J_ZERO:
        return tuple(regular(m))
    if beta == 0 or degenerate_order(m) is not None:
        raise SeriesNotApplicable(f"y needs a logarithmic series for beta={beta}, 2m={2 * m}")
    # y = (j_m cos(2 pi m) - j_{-m}) / sin(2 pi m)
    angle = 2 * math.pi * m
    return tuple((regular(m) * cmath.cos(angle) - regular(-m)) / cmath.sin(angle))


def seed_from_series(kind, p, x_start=X_SEED, x_end=X_FAR):
    """(v, v') of a canonical solution at its seeding point.

    I, J, j and y are seeded at x_start from small-x series; K and H+- at
    x_end from the far-field series.
    """
    kind = SolutionKind(kind)
    beta, m = p.beta, p.m
    if kind is SolutionKind.I:
        return _regular_seed(beta, m, ENERGY["hyperbolic"], x_start)
    if kind is SolutionKind.J:
        return _regular_seed(beta, m, ENERGY["trigonometric"], x_start)
    if kind in (SolutionKind.J_ZERO, SolutionKind.Y_ZERO):
        return _zero_energy_seed(kind, beta, m, x_start)
    if kind is SolutionKind.K:
        return far_field_series(beta, m, -0.5, 1.0, x_end)
    sign = kind.sign
    c0 = cmath.exp(-sign * 1j * math.pi * (0.5 + m) / 2) * cmath.exp(math.pi * beta / 2)
    return far_field_series(beta, m, sign * 0.5j, c0, x_end)


def is_far_field(kind):
    kind = SolutionKind(kind)
    return kind is SolutionKind.K or kind.sign is not None


def problem_for(kind, p, x_lo=X_SEED, x_hi=X_FAR):
    """OdeProblem whose solution is the canonical `kind` solution on [x_lo, x_hi].

    y needs two problems, see `y_problems`.
    """
    kind = SolutionKind(kind)
    energy = ENERGY[kind.equation]
    if kind is SolutionKind.Y_ZERO:
        raise UnsupportedCase("y is integrated in two pieces; use y_problems")
    seed = seed_from_series(kind, p, x_lo, x_hi)
    if is_far_field(kind):
        return OdeProblem(p, energy, x_hi, x_lo, seed)
    return OdeProblem(p, energy, x_lo, x_hi, seed)


def y_seed_point(p, x_lo, x_hi):
    """Turning point |m|^2 / |beta| of the zero-energy equation, clipped to [x_lo, x_hi].

    Below it y dominates toward 0; above it y oscillates or dominates
    outward. The series there loses at most about 2 |m| / ln 10 digits.
    """
    if p.beta == 0:
        return x_hi
    return float(np.clip(abs(p.m) ** 2 / abs(p.beta), x_lo, x_hi))


def y_problems(p, x_lo=X_COMPARE[0], x_hi=X_COMPARE[1]):
    """OdeProblems for y seeded at `y_seed_point`: inward to x_lo, outward to x_hi.

    Either piece is absent when the seed point sits on that end.
    """
    x_seed = y_seed_point(p, x_lo, x_hi)
    seed = seed_from_series(SolutionKind.Y_ZERO, p, x_seed)
    energy = ENERGY["zero_energy"]
    return tuple(OdeProblem(p, energy, x_seed, end, seed) for end in (x_lo, x_hi) if end != x_seed)


# Integration


def integrate(prob, tol=TOL_ODE):
    """Integrate with DOP853 (8th order) and keep the dense output.

    Raises StiffnessFailure when the step size collapses.
    """
    scale = abs(prob.seed[0]) + abs(prob.seed[1])
    result = scipy_integrate.solve_ivp(
        prob.rhs,
        (prob.x_start, prob.x_end),
        np.array(prob.seed, dtype=complex),
        method="DOP853",
        dense_output=True,
        rtol=tol,
        atol=tol * scale * 1e-6,
    )
    if result.status != 0:
        raise StiffnessFailure(f"integration from {prob.x_start} to {prob.x_end} failed: {result.message}")
    logger.debug("integrated [%g, %g] with %d evaluations", prob.x_start, prob.x_end, result.nfev)
    return Solution(prob, result.sol, result.nfev)


@dataclass(frozen=True, eq=False)
class PiecewiseSolution:
    """Solutions of one problem family on adjoining intervals."""

    pieces: tuple

    def state(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        out = np.full((2, flat.size), np.nan, dtype=complex)
        for piece in self.pieces:
            lo, hi = piece.problem.interval
            inside = np.isnan(out[0].real) & (flat >= lo * (1 - 1e-12)) & (flat <= hi * (1 + 1e-12))
            if np.any(inside):
                out[:, inside] = piece.state(flat[inside])
        assert not np.any(np.isnan(out[0].real)), "Outside the integrated interval"
        return out.reshape((2,) + x.shape)

    def __call__(self, x):
        return self.state(x)[0]

    def derivative(self, x):
        return self.state(x)[1]


def solve(kind, p, x_lo=X_SEED, x_hi=X_FAR, tol=TOL_ODE):
    if SolutionKind(kind) is SolutionKind.Y_ZERO:
        return PiecewiseSolution(tuple(integrate(problem, tol) for problem in y_problems(p, x_lo, x_hi)))
    return integrate(problem_for(kind, p, x_lo, x_hi), tol)


def _evaluator(kind, p, x):
    if kind in (SolutionKind.J_ZERO, SolutionKind.Y_ZERO):
        return np.asarray(zero_energy(p, kind, x))
    return np.asarray(whittaker_derivative(kind, p, x)[0])


def oracle_deviation(kind, p, x=None, tol=TOL_ODE):
    """Largest |evaluator - oracle| / (|v| + |v'|) over x, the oracle supplying v and v'."""
    kind = SolutionKind(kind)
    x = np.linspace(*X_COMPARE, 41) if x is None else np.asarray(x, dtype=float)
    if kind is SolutionKind.Y_ZERO:
        x_lo, x_hi = x.min(), max(x.max(), 1.01 * x.min())
    elif is_far_field(kind):
        x_lo, x_hi = x.min(), max(X_FAR, x.max())
    else:
        x_lo = min(X_SEED, x.min())
        x_hi = max(x.max(), 1.01 * x_lo)
    solution = solve(kind, p, x_lo=x_lo, x_hi=x_hi, tol=tol)
    v, dv = solution.state(x)
    return float(np.max(np.abs(_evaluator(kind, p, x) - v) / (np.abs(v) + np.abs(dv))))


def solution_wronskian(sol_a, sol_b, x):
    """W = v_a v_b' - v_a' v_b on x, and its largest relative variation."""
    va, da = sol_a.state(x)
    vb, db = sol_b.state(x)
    w = va * db - da * vb
    return w, float(np.max(np.abs(w - w[0])) / abs(w[0]))


def energy_consistency(p, x=None, tol=TOL_ODE):
    """J_{beta,m} from the trigonometric equation on the real axis against
    e^{-i pi(1/2+m)/2} I_{-i beta,m} from the hyperbolic equation on the ray arg z = pi/2.

    Returns the largest relative deviation over x.
    """
    x = np.linspace(*X_COMPARE, 41) if x is None else np.asarray(x, dtype=float)
    lo, hi = min(X_SEED, x.min()), x.max()
    direct = solve(SolutionKind.J, p, lo, hi, tol)

    rotated_params = WhittakerParams(-1j * p.beta, p.m)
    v, dz = _regular_seed(rotated_params.beta, p.m, ENERGY["hyperbolic"], lo, angle=math.pi / 2)
    # dv/dt = i dv/dz on z = i t
    rotated = integrate(OdeProblem(rotated_params, ENERGY["hyperbolic"], lo, hi, (v, 1j * dz), angle=math.pi / 2), tol)
    phase = cmath.exp(-1j * math.pi * (0.5 + p.m) / 2)

    expected, dv = direct.state(x)
    return float(np.max(np.abs(phase * rotated(x) - expected) / (np.abs(expected) + np.abs(dv))))


class OdeOracleTest(TestCase):
    def test_unit_constant_coefficient(self):
        """m = 1/2, beta = 0 with energy 1/4 is v'' = v/4"""
        p = WhittakerParams(0.0, 0.5)
        sol = integrate(OdeProblem(p, 0.25, 0.1, 5.0, (math.exp(0.05), 0.5 * math.exp(0.05))))
        self.assertClose(sol(5.0), math.exp(2.5), rtol=1e-10)
        oscillating = integrate(OdeProblem(p, -0.25, 0.1, 5.0, (cmath.exp(0.05j), 0.5j * cmath.exp(0.05j))))
        self.assertClose(oscillating(5.0), cmath.exp(2.5j), rtol=1e-10)

    def test_unit_frobenius_seed(self):
        p = WhittakerParams(0.5, 0.3)
        x = 1e-3
        v, dv = seed_from_series(SolutionKind.I, p, x)
        leading = x**0.8 / math.gamma(1.6)
        self.assertClose(v, leading * (1 - 0.5 * x / 1.6), rtol=1e-6)
        self.assertClose(v, self.mp_I(0.5, 0.3, x), rtol=1e-13)
        self.assertClose(dv, 0.8 * v / x, rtol=1e-3)

    def test_unit_zero_energy_seed(self):
        p = WhittakerParams(0.7, 0.3)
        for kind in (SolutionKind.J_ZERO, SolutionKind.Y_ZERO):
            v, _ = seed_from_series(kind, p, 0.01)
            self.assertClose(v, zero_energy(p, kind, 0.01), rtol=1e-9)
        with self.assertRaises(SeriesNotApplicable):
            seed_from_series(SolutionKind.Y_ZERO, WhittakerParams(0.7, 0.5), 0.01)

    def test_unit_y_split_at_turning_point(self):
        """Re m near 2, where j grows like x^{4} against y below the turning point"""
        p = WhittakerParams(1.265 - 0.241j, 1.948 + 0.090j)
        x_seed = y_seed_point(p, 0.1, 20.0)
        self.assertClose(x_seed, abs(p.m) ** 2 / abs(p.beta), rtol=1e-15)
        inward, outward = y_problems(p, 0.1, 20.0)
        self.assertEqual((inward.x_start, inward.x_end, outward.x_start, outward.x_end), (x_seed, 0.1, x_seed, 20.0))
        with self.assertRaises(UnsupportedCase):
            problem_for(SolutionKind.Y_ZERO, p, 0.1, 20.0)
        self.assertLess(oracle_deviation(SolutionKind.Y_ZERO, p), 1e-7)
        self.assertLess(oracle_deviation(SolutionKind.J_ZERO, p), 1e-7)

    def test_unit_y_pieces_match_series(self):
        for p in (WhittakerParams(1.265 - 0.241j, 1.948 + 0.090j), WhittakerParams(-1.8 + 0.3j, 1.2)):
            with self.subTest(beta=p.beta, m=p.m):
                sol = solve(SolutionKind.Y_ZERO, p, 0.1, 20.0)
                for x in (0.1, 20.0):
                    expected = np.array(seed_from_series(SolutionKind.Y_ZERO, p, x))
                    error = np.abs(sol.state(x) - expected).max() / np.abs(expected).sum()
                    self.assertLess(error, 1e-8)
        self.assertEqual(y_seed_point(WhittakerParams(0.05, 1.5), 0.1, 20.0), 20.0)
        self.assertEqual(y_seed_point(WhittakerParams(2.0, 0.1), 0.1, 20.0), 0.1)

    def test_unit_far_field_seed(self):
        p = WhittakerParams(0.6, 0.3)
        v, dv = seed_from_series(SolutionKind.K, p, x_end=80.0)
        self.assertClose(v, 80.0**0.6 * math.exp(-40.0), rtol=1e-2)
        self.assertClose(v, self.mp_K(0.6, 0.3, 80.0), rtol=1e-13)
        self.assertClose(dv / v, -0.5 + 0.6 / 80.0, rtol=1e-3)

    def test_unit_i_against_evaluator(self):
        self.assertLess(oracle_deviation(SolutionKind.I, WhittakerParams(0.5, 0.3)), 1e-7)

    def test_unit_wronskian_constant(self):
        p = WhittakerParams(0.5, 0.3)
        x = np.linspace(0.1, 20.0, 30)
        regular = solve(SolutionKind.I, p, x_hi=20.0, tol=1e-12)
        decaying = solve(SolutionKind.K, p, x_lo=0.1, tol=1e-12)
        w, variation = solution_wronskian(regular, decaying, x)
        self.assertLess(variation, 1e-9)
        self.assertClose(w[0], -1 / math.gamma(0.3), rtol=1e-8)

    def test_unit_energy_consistency(self):
        self.assertLess(energy_consistency(WhittakerParams(0.4 + 0.2j, 0.7)), 1e-7)

    def test_unit_problem_validation(self):
        with self.assertRaises(AssertionError):
            OdeProblem(WhittakerParams(0.5, 0.3), 0.25, 0.0, 1.0, (1.0, 0.0))
        sol = solve(SolutionKind.J, WhittakerParams(0.5, 0.3), x_hi=2.0)
        with self.assertRaises(AssertionError):
            sol(3.0)

    def test_accept_oracle_agreement(self):
        kinds = [SolutionKind.I, SolutionKind.K, SolutionKind.J, SolutionKind.H_PLUS, SolutionKind.H_MINUS]
        for beta, m in WHITTAKER_SUITE:
            for kind in kinds:
                with self.subTest(beta=beta, m=m, kind=kind.value):
                    self.assertLess(oracle_deviation(kind, WhittakerParams(beta, m)), 1e-7)

    def test_accept_zero_energy_agreement(self):
        for beta, m in ((0.7, 0.3), (1.5, 0.65), (0.4 + 0.3j, 0.2)):
            for kind in (SolutionKind.J_ZERO, SolutionKind.Y_ZERO):
                with self.subTest(beta=beta, m=m, kind=kind.value):
                    self.assertLess(oracle_deviation(kind, WhittakerParams(beta, m)), 1e-7)

    def test_accept_energy_consistency(self):
        beta = self.random_complex((-2, 2), (-1, 1), 10)
        m = self.random_complex((-0.4, 2), (-0.5, 0.5), 10)
        for b, mm in zip(beta, m):
            with self.subTest(beta=b, m=mm):
                self.assertLess(energy_consistency(WhittakerParams(b, mm)), 1e-7)


if __name__ == "__main__":
    unittest.main()
