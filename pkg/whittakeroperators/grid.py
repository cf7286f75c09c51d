""" Quadrature grids on the half-line and functions sampled on them. """

import math
import logging

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre
from scipy import optimize

from .util.test import *

logger = logging.getLogger(__name__)

POINTS_PER_PANEL = 32
X_GRADE_START = 1e-4
GRADE_RATIO = 2.0
TOL_ENVELOPE = 1e-12


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature rule sum_i weights[i] f(nodes[i]) for integrals over ]0, x_max]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        assert nodes.ndim == 1 and nodes.shape == weights.shape, "Nodes and weights must be 1-D arrays of equal length"
        assert nodes.size > 0, "Empty grid"
        assert nodes[0] > 0, "Grid nodes must be positive"
        assert np.all(np.diff(nodes) > 0), "Grid nodes must be strictly increasing"
        assert np.all(weights > 0), "Quadrature weights must be positive"
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    @property
    def x_max(self):
        return float(self.nodes[-1])

    def integrate(self, values):
        return complex(self.weights @ np.asarray(values, dtype=complex))

    def sample(self, f):
        """GridFunction with values f(nodes)."""
        return GridFunction(self, f(self.nodes))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function at the nodes of a Grid. Immutable."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        assert values.shape == self.grid.nodes.shape, "One value per grid node is required"
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(len(grid)))

    @property
    def nodes(self):
        return self.grid.nodes

    @property
    def weights(self):
        return self.grid.weights

    def with_values(self, values):
        return GridFunction(self.grid, values)

    def norm(self):
        """Discrete L^2 norm."""
        return math.sqrt(float(self.weights @ np.abs(self.values) ** 2))

    def integral(self):
        return self.grid.integrate(self.values)

    def __sub__(self, other):
        assert other.grid is self.grid, "GridFunctions live on different grids"
        return self.with_values(self.values - other.values)

    def __add__(self, other):
        assert other.grid is self.grid, "GridFunctions live on different grids"
        return self.with_values(self.values + other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def gauss_legendre_panels(edges, points_per_panel=POINTS_PER_PANEL):
    """Composite Gauss-Legendre rule on the panels [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    assert np.all(np.diff(edges) > 0), "Panel edges must be strictly increasing"
    assert edges[0] >= 0, "Panels must lie on the half-line"

    t, w = legendre.leggauss(points_per_panel)
    left, right = edges[:-1, None], edges[1:, None]
    half = (right - left) / 2
    nodes = left + half * (t + 1)
    weights = half * w
    return Grid(nodes.ravel(), weights.ravel())


def graded_edges(x_max, x_min=X_GRADE_START, ratio=GRADE_RATIO, x_grade=1.0, panel_width=None):
    """Panel edges: [0, x_min], geometric growth by `ratio` up to x_grade, then equal panels."""
    assert 0 < x_min < x_grade, "Need 0 < x_min < x_grade"
    assert x_max > x_min, "x_max must lie beyond the first panel"
    assert ratio > 1, "Grading ratio must exceed 1"
    panel_width = x_grade if panel_width is None else panel_width

    edges = [0.0, x_min]
    while edges[-1] * ratio < min(x_grade, x_max):
        edges.append(edges[-1] * ratio)
    if edges[-1] < min(x_grade, x_max):
        edges.append(min(x_grade, x_max))

    count = math.ceil((x_max - edges[-1]) / panel_width - 1e-12)
    if count > 0:
        edges.extend(np.linspace(edges[-1], x_max, count + 1)[1:])
    return np.array(edges)


def graded_grid(x_max, points_per_panel=POINTS_PER_PANEL, **grading):
    """Gauss-Legendre grid resolving power behaviour at 0 and smooth decay up to x_max.

    Parameters
    ----------
    x_max : float
        Truncation point

    points_per_panel : int, optional

    **grading
        x_min, ratio, x_grade, panel_width passed to `graded_edges`
    """
    grid = gauss_legendre_panels(graded_edges(x_max, **grading), points_per_panel)
    logger.debug("graded grid on ]0, %.4g] with %d nodes", x_max, len(grid))
    return grid


def oscillatory_grid(x_max, k_max, points_per_panel=4, panels_per_wavelength=16, x_min=X_GRADE_START):
    """Grid for kernels oscillating like e^{+-i k x}, k <= k_max.

    Panels are graded toward 0 and at most 2 pi / (k_max panels_per_wavelength)
    wide elsewhere.
    """
    assert k_max > 0, "k_max must be positive"
    width = 2 * math.pi / (k_max * panels_per_wavelength)
    edges = graded_edges(x_max, x_min=min(x_min, width / 2), x_grade=width, panel_width=width)
    return gauss_legendre_panels(edges, points_per_panel)


def uniform_grid(x_min, x_max, h):
    """Trapezoid rule on x_min, x_min + h, ..., x_max."""
    assert 0 < x_min < x_max, "Need 0 < x_min < x_max"
    count = int(round((x_max - x_min) / h))
    nodes = x_min + h * np.arange(count + 1)
    weights = np.full(nodes.shape, h)
    weights[[0, -1]] = h / 2
    return Grid(nodes, weights)


def truncation_radius(decay, power=0.0, tol=TOL_ENVELOPE, x_min=1.0):
    """Smallest x >= x_min past which e^{-decay x} x^power stays below tol.

    Parameters
    ----------
    decay : float
        Exponential rate, positive

    power : float, optional
        Algebraic exponent of the envelope
    """
    assert decay > 0, "Envelope must decay exponentially"
    log_tol = math.log(tol)
    excess = lambda x: -decay * x + power * math.log(x) - log_tol

    # beyond the maximum of the envelope it is monotone
    left = max(x_min, power / decay if power > 0 else x_min)
    if excess(left) < 0:
        return left
    right = 2 * left
    while excess(right) >= 0:
        right *= 2
    return optimize.brentq(excess, left, right)


class GridTest(TestCase):
    def test_unit_gauss_legendre_polynomials(self):
        grid = gauss_legendre_panels([0.0, 1.0, 3.0], points_per_panel=4)
        self.assertEqual(len(grid), 8)
        self.assertClose(grid.integrate(grid.nodes**7), 3.0**8 / 8, rtol=1e-13)

    def test_unit_graded_grid_power_singularity(self):
        """x^{0.3} e^{-x} integrates to Gamma(1.3)"""
        grid = graded_grid(50.0)
        self.assertLess(grid.nodes[0], 1e-4)
        self.assertClose(grid.integrate(grid.nodes**0.3 * np.exp(-grid.nodes)), math.gamma(1.3), rtol=1e-8)

    def test_unit_graded_edges(self):
        edges = graded_edges(5.0, x_min=0.125, x_grade=1.0)
        self.assertClose(edges, [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0])
        self.assertClose(graded_edges(0.3, x_min=0.1), [0.0, 0.1, 0.2, 0.3])
        with self.assertRaises(AssertionError):
            graded_edges(0.05, x_min=0.1)

    def test_unit_oscillatory_grid(self):
        k = 3.0
        grid = oscillatory_grid(20.0, k)
        self.assertLessEqual(np.max(np.diff(grid.nodes)), 2 * math.pi / (16 * k))
        expected = (1 - math.cos(k * 20.0)) / k
        self.assertClose(grid.integrate(np.sin(k * grid.nodes)), expected, rtol=1e-10)

    def test_unit_uniform_grid(self):
        grid = uniform_grid(0.5, 2.5, 0.01)
        self.assertEqual(len(grid), 201)
        self.assertClose(grid.integrate(3 * grid.nodes + 1), 6.0 + 2.0, rtol=1e-13)

    def test_unit_grid_function(self):
        grid = uniform_grid(1.0, 2.0, 0.5)
        f = grid.sample(lambda x: x)
        g = GridFunction(grid, [1.0, 1.0, 1.0])
        self.assertClose((f - g).values, [0.0, 0.5, 1.0])
        self.assertClose((2 * f).values, [2.0, 3.0, 4.0])
        self.assertClose(GridFunction.zeros(grid).norm(), 0.0)
        self.assertClose(g.norm(), 1.0)
        with self.assertRaises(ValueError):
            f.values[0] = 3.0

    def test_unit_invalid_grids(self):
        with self.assertRaises(AssertionError):
            Grid([1.0, 1.0], [0.5, 0.5])
        with self.assertRaises(AssertionError):
            Grid([0.0, 1.0], [0.5, 0.5])
        with self.assertRaises(AssertionError):
            GridFunction(uniform_grid(1.0, 2.0, 0.5), [1.0, 2.0])

    def test_unit_truncation_radius(self):
        self.assertClose(truncation_radius(1.0), 12 * math.log(10), rtol=1e-10)
        x = truncation_radius(0.5, power=3.0)
        self.assertClose(math.exp(-0.5 * x) * x**3, 1e-12, rtol=1e-8)
        self.assertEqual(truncation_radius(1.0, tol=0.9, x_min=2.0), 2.0)


if __name__ == "__main__":
    unittest.main()
