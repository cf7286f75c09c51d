""" Seeded verification suites over the whole package.

Each suite draws its cases from a numpy Generator seeded by the caller, checks
one identity per case and reports the worst residual. A case passes when its
residual is within the tolerance the check returns for it. Independent cases
can be spread over worker processes; results keep the order of the cases.
"""

import math
import logging

from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from .errors import WhittakerError
from .ode_oracle import oracle_deviation
from .scattering_transform import (
    compact_bump,
    g_scattering,
    isometry_residual,
    scattering_growth,
    transform_grids,
)
from .spectral import eigen_record, projection_grid, riesz_projection_kernel
from .special_core import pole_distance, rgamma
from .whittaker_functions import (
    SolutionKind,
    WhittakerParams,
    connection_H_from_J,
    connection_I_from_K,
    connection_J_from_H,
    connection_K_from_I,
    degenerate_order,
    eval_H,
    eval_I,
    eval_J,
    eval_K,
    whittaker_derivative,
)
from .util.test import *

logger = logging.getLogger(__name__)

SEED = 7
WRONSKIAN_X = (0.3, 1.0, 3.0, 10.0, 30.0)
CONNECTION_X = (0.5, 2.0, 8.0)
ODE_KINDS = ("I", "K", "J", "Hplus", "Hminus", "j_zero", "y_zero")


def jsonable(value):
    """Complex numbers as [re, im] pairs, numpy values as Python ones, recursively."""
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {key: jsonable(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def _draw(rng, re_range, im_range):
    return complex(rng.uniform(*re_range), rng.uniform(*im_range))


def _relative(actual, expected):
    actual, expected = np.asarray(actual, dtype=complex), np.asarray(expected, dtype=complex)
    return float(np.max(np.abs(actual - expected) / np.maximum(np.abs(expected), 1e-300)))


# Wronskian of I and K


def _wronskian_cases(rng, draws):
    cases = []
    while len(cases) < draws:
        beta = _draw(rng, (-3, 3), (-3, 3))
        m = _draw(rng, (-0.9, 3), (-3, 3))
        if pole_distance(0.5 + m - beta) <= 0.1:
            continue
        cases.append(dict(beta=beta, m=m, x=WRONSKIAN_X))
    return cases


def _wronskian_check(case):
    """|W(I, K) + 1/Gamma(1/2+m-beta)| relative to 1/Gamma(1/2+m-beta)."""
    p = WhittakerParams(case["beta"], case["m"])
    x = np.array(case["x"])
    i_value, i_derivative = whittaker_derivative(SolutionKind.I, p, x)
    k_value, k_derivative = whittaker_derivative(SolutionKind.K, p, x)
    expected = -rgamma(0.5 + p.m - p.beta)
    return _relative(i_value * k_derivative - i_derivative * k_value, np.full(x.shape, expected)), 1e-8


# Connection formulas


def _connection_cases(rng, draws):
    cases = []
    while len(cases) < draws:
        beta = _draw(rng, (-2, 2), (-1, 1))
        m = _draw(rng, (-0.9, 2), (-0.5, 0.5))
        if degenerate_order(m, 0.05) is not None or pole_distance(0.5 - m + beta) <= 0.1:
            continue
        cases.append(dict(beta=beta, m=m, x=CONNECTION_X))
    return cases


def _connection_check(case):
    p = WhittakerParams(case["beta"], case["m"])
    x = np.array(case["x"])
    residuals = [
        _relative(connection_I_from_K(p, x), eval_I(p, x)),
        _relative(connection_K_from_I(p, x), eval_K(p, x)),
        _relative(connection_J_from_H(p, x), eval_J(p, x)),
    ]
    residuals += [_relative(connection_H_from_J(p, sign, x), eval_H(p, sign, x)) for sign in (1, -1)]
    return max(residuals), 1e-8


# ODE oracle


def _ode_cases(rng, draws):
    cases = []
    while len(cases) < draws:
        beta = _draw(rng, (-2, 2), (-1, 1))
        m = _draw(rng, (-0.45, 2), (-0.5, 0.5))
        if degenerate_order(m, 0.05) is not None:
            continue
        cases.append(dict(beta=beta, m=m, kinds=ODE_KINDS))
    return cases


def _ode_check(case):
    p = WhittakerParams(case["beta"], case["m"])
    return max(oracle_deviation(kind, p) for kind in case["kinds"]), 1e-7


# Transforms and projections


def _isometry_cases(rng, draws):
    return [dict(beta=beta, m=m, sign=sign) for beta, m in ((1.0, 0.5), (1.0, -0.25), (-1.0, 0.5)) for sign in (1, -1)]


def _isometry_check(case):
    x_grid, k_grid = transform_grids()
    f = k_grid.sample(compact_bump)
    return isometry_residual(WhittakerParams(case["beta"], case["m"]), case["sign"], f, x_grid), 1e-3


def _projection_cases(rng, draws):
    return [dict(beta=2.0, m=0.5, N=0), dict(beta=2.0, m=0.5, N=1), dict(beta=1.5, m=0.3, N=0)]


def _projection_check(case):
    """Worst of unit trace, idempotency at a few points and the eigen-equation residual."""
    p, N = WhittakerParams(case["beta"], case["m"]), case["N"]
    grid = projection_grid(p, N)
    z = grid.nodes
    trace = abs(grid.integrate(riesz_projection_kernel(p, N, z, z).value) - 1)

    x = np.array([0.5, 1.0, 2.5])
    left = riesz_projection_kernel(p, N, x[:, None], z[None, :]).value
    right = riesz_projection_kernel(p, N, z[:, None], x[None, :]).value
    idempotency = _relative(left @ (grid.weights[:, None] * right), riesz_projection_kernel(p, N, x[:, None], x[None, :]).value)

    positions = np.linspace(0.5, 10.0, 9501)
    column = riesz_projection_kernel(p, N, positions, 1.0).value
    _, applied = apply_whittaker_operator(p.beta, p.m, positions, column)
    eigen = np.max(np.abs(applied - eigen_record(p, N).value * column[1:-1])) / np.max(np.abs(column))

    # second differences at h = 1e-3
    return max((trace, 1e-6), (idempotency, 1e-6), (eigen, 1e-5), key=lambda pair: pair[0] / pair[1])


# Scattering


def _scattering_cases(rng, draws):
    cases = [
        dict(beta=float(rng.uniform(-3, 3)), m=float(rng.uniform(-0.45, 3)), k=float(rng.uniform(0.05, 10)))
        for _ in range(draws)
    ]
    cases.append(dict(beta=1.2, m=complex(0.4, 0.3), k_range=(1e-3, 1e3), unbounded=False))
    cases.append(dict(beta=complex(0.5, 0.5), m=0.3, k_range=(1e-3, 1e3), unbounded=True))
    return cases


def _scattering_check(case):
    p = WhittakerParams(case["beta"], case["m"])
    if "k" in case:
        value = g_scattering(p, case["k"])
        return max(abs(value.modulus - 1), abs(value.g - np.exp(2j * value.delta))), 1e-12
    _, unbounded = scattering_growth(p, np.geomspace(*case["k_range"], 61))
    return (0.0 if unbounded == case["unbounded"] else math.inf), 0.5


@dataclass(frozen=True)
class Suite:
    name: str
    cases: object = field(repr=False)
    check: object = field(repr=False)
    draws: int = 0


SUITES = {
    suite.name: suite
    for suite in (
        Suite("wronskian", _wronskian_cases, _wronskian_check, 100),
        Suite("connection", _connection_cases, _connection_check, 30),
        Suite("ode", _ode_cases, _ode_check, 50),
        Suite("isometry", _isometry_cases, _isometry_check),
        Suite("projection", _projection_cases, _projection_check),
        Suite("scattering", _scattering_cases, _scattering_check, 200),
    )
}


@dataclass(frozen=True)
class SuiteReport:
    """Outcome of one suite; `failing_case` holds the full inputs of the worst failing case."""

    suite: str
    seed: int
    passed: bool
    worst_residual: float
    cases: int
    failing_case: dict = None

    def to_dict(self):
        return jsonable(
            dict(
                suite=self.suite,
                seed=self.seed,
                passed=self.passed,
                worst_residual=self.worst_residual,
                cases=self.cases,
                failing_case=self.failing_case,
            )
        )


def _run_case(arg):
    name, case = arg
    try:
        return SUITES[name].check(case) + (None,)
    except WhittakerError as error:
        return math.inf, 0.0, error.code


def run_suite(name, seed=SEED, processes=1, draws=None):
    """Run one suite.

    Parameters
    ----------
    name : str
        One of wronskian, connection, ode, isometry, projection, scattering

    seed : int

    processes : int, optional
        Worker processes; 1 runs in the calling process

    draws : int, optional
        Number of random cases, the suite's own default if None
    """
    assert name in SUITES, f"Unknown suite '{name}', expected one of {sorted(SUITES)}"
    suite = SUITES[name]
    rng = np.random.default_rng(seed)
    cases = suite.cases(rng, suite.draws if draws is None else draws)

    args = [(name, case) for case in cases]
    if processes > 1:
        with Pool(processes=processes) as pool:
            outcomes = pool.map(_run_case, args)
    else:
        outcomes = [_run_case(arg) for arg in args]

    worst_residual, failing_case, worst_ratio = 0.0, None, -1.0
    for case, (residual, tolerance, code) in zip(cases, outcomes):
        worst_residual = max(worst_residual, residual)
        ratio = math.inf if tolerance == 0 else residual / tolerance
        if ratio > 1 and ratio > worst_ratio:
            worst_ratio = ratio
            failing_case = dict(case, residual=residual, tolerance=tolerance, error=code)

    report = SuiteReport(name, seed, failing_case is None, worst_residual, len(cases), failing_case)
    log = logger.info if report.passed else logger.warning
    log("suite %s: %s, worst residual %.3e over %d cases", name, "pass" if report.passed else "FAIL", worst_residual, len(cases))
    return report


class VerifyTest(TestCase):
    def test_unit_jsonable(self):
        converted = jsonable(dict(a=1 + 2j, b=np.array([0.5, 1.5]), c=(np.float64(2.0), [np.complex128(3j)])))
        self.assertEqual(converted, dict(a=[1.0, 2.0], b=[0.5, 1.5], c=[2.0, [[0.0, 3.0]]]))

    def test_unit_cases_deterministic(self):
        for name in ("wronskian", "connection", "ode", "scattering"):
            first = SUITES[name].cases(np.random.default_rng(3), 5)
            second = SUITES[name].cases(np.random.default_rng(3), 5)
            self.assertEqual(first, second)

    def test_unit_wronskian_suite(self):
        report = run_suite("wronskian", seed=self.SEED, draws=5)
        self.assertTrue(report.passed, report.failing_case)
        self.assertEqual(report.cases, 5)
        self.assertLess(report.worst_residual, 1e-8)

    def test_unit_scattering_suite(self):
        report = run_suite("scattering", seed=self.SEED, draws=20)
        self.assertTrue(report.passed, report.failing_case)
        self.assertEqual(report.cases, 22)

    def test_unit_failure_is_reported(self):
        report = SuiteReport("ode", 7, False, 1.0, 1, dict(beta=1j, m=0.3, residual=1.0))
        self.assertEqual(report.to_dict()["failing_case"]["beta"], [0.0, 1.0])
        outcome = _run_case(("projection", dict(beta=0.0, m=-0.5, N=0)))
        self.assertEqual(outcome[0], math.inf)
        self.assertEqual(outcome[2], "singular_family_point")

    def test_accept_suites(self):
        for name in ("wronskian", "connection", "projection", "scattering"):
            with self.subTest(suite=name):
                report = run_suite(name, seed=self.SEED, processes=2)
                self.assertTrue(report.passed, report.failing_case)

    def test_accept_ode_suite(self):
        report = run_suite("ode", seed=self.SEED)
        self.assertEqual(report.cases, 50)
        self.assertTrue(report.passed, report.failing_case)

    def test_accept_isometry_suite(self):
        self.assertTrue(run_suite("isometry").passed)


if __name__ == "__main__":
    unittest.main()
