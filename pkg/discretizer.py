"""
Discretizer Module
Turns a fractional variational problem into the finite-dimensional function Psi and its stationarity system
"""

import numpy as np
from typing import Tuple

from special_functions import GlWeights, gl_weights
from fractional_derivative import left_operator
from variational_problem import VariationalProblem, Trajectory

CONVENTIONS = ('generic', 'literal')


class DimensionError(ValueError):
    """Vector length does not match the mesh"""


class Mesh:
    """Equispaced grid a = t_0 < t_1 < ... < t_n = b"""

    def __init__(self, a: float, b: float, n: int):
        if int(n) != n or n < 2:
            raise ValueError(f"Mesh needs an integer n >= 2, got {n}")
        if not b > a:
            raise ValueError(f"Mesh needs b > a, got [{a}, {b}]")
        self.a = float(a)
        self.b = float(b)
        self.n = int(n)
        self.h = (self.b - self.a) / self.n
        nodes = self.a + self.h * np.arange(self.n + 1)
        nodes[0] = self.a
        nodes[-1] = self.b
        self.nodes = nodes

    def __repr__(self):
        return f"Mesh([{self.a}, {self.b}], n={self.n}, h={self.h:.6g})"


class DiscretizedProblem:
    """
    A problem bound to a mesh and to Grünwald-Letnikov weights up to index n.

    convention selects the upper limit of the fractional sum in the
    stationarity residual: 'generic' sums k = 0..n-i, 'literal' stops at
    n-i-1 for rows i <= n-2.
    """

    def __init__(self, problem: VariationalProblem, mesh: Mesh, weights: GlWeights,
                 convention: str = 'generic'):
        if weights.alpha != problem.alpha:
            raise ValueError(f"Weights for alpha={weights.alpha} do not match problem alpha={problem.alpha}")
        if weights.count < mesh.n:
            raise ValueError(f"Weights cover 0..{weights.count}, mesh needs 0..{mesh.n}")
        if convention not in CONVENTIONS:
            raise ValueError(f"Unknown convention: {convention} (choose from {', '.join(CONVENTIONS)})")

        self.problem = problem
        self.mesh = mesh
        self.weights = weights
        self.convention = convention
        # D[i, j] = w[i-j] / h^alpha for j <= i
        self.operator = left_operator(weights, mesh.n, mesh.h)

    @property
    def n(self) -> int:
        return self.mesh.n

    @property
    def unknowns(self) -> int:
        return self.mesh.n - 1

    def full(self, interior) -> np.ndarray:
        """Attach the boundary values to x_1..x_{n-1}"""
        interior = np.asarray(interior, dtype=float)
        if interior.shape != (self.unknowns,):
            raise DimensionError(f"Expected {self.unknowns} interior values, got shape {interior.shape}")
        values = np.empty(self.n + 1)
        values[0] = self.problem.xa
        values[1:-1] = interior
        values[-1] = self.problem.xb
        return values

    def fractional(self, values: np.ndarray) -> np.ndarray:
        """Left approximation of the fractional derivative at every node"""
        return self.operator @ values

    def xdot(self, values: np.ndarray) -> np.ndarray:
        """Backward differences (x_j - x_{j-1}) / h; entry 0 is unused and set to 0"""
        out = np.zeros_like(values)
        out[1:] = np.diff(values) / self.mesh.h
        return out


def discretize(problem: VariationalProblem, n: int, convention: str = 'generic') -> DiscretizedProblem:
    """Build mesh and weights for problem on n intervals"""
    mesh = Mesh(problem.a, problem.b, n)
    return DiscretizedProblem(problem, mesh, gl_weights(problem.alpha, n), convention)


def _check_values(dp: DiscretizedProblem, values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (dp.n + 1,):
        raise DimensionError(f"Expected {dp.n + 1} trajectory values, got shape {values.shape}")
    return values


def _partials(dp: DiscretizedProblem, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    d_x, d_dax, d_xdot evaluated at nodes j = 1..n, stored at index j of
    length n+2 arrays (index 0 and n+1 hold zeros).
    """
    t = dp.mesh.nodes[1:]
    x = values[1:]
    dax = dp.fractional(values)[1:]
    xdot = dp.xdot(values)[1:]
    lagrangian = dp.problem.lagrangian

    d_x = np.zeros(dp.n + 2)
    d_dax = np.zeros(dp.n + 2)
    d_xdot = np.zeros(dp.n + 2)
    d_x[1:-1] = lagrangian.d_x(t, x, dax, xdot)
    d_dax[1:-1] = lagrangian.d_dax(t, x, dax, xdot)
    if lagrangian.uses_xdot:
        d_xdot[1:-1] = lagrangian.d_xdot(t, x, dax, xdot)
    return d_x, d_dax, d_xdot


def _right_sums(dp: DiscretizedProblem, d_dax: np.ndarray, convention: str) -> np.ndarray:
    """sum_{k} w[k] d_dax[i+k] for i = 1..n-1 under the chosen upper limit"""
    n = dp.n
    w = dp.weights.w
    node_values = d_dax[:n + 1]
    # operator.T scaled back by h^alpha gives sum_{j >= i} w[j-i] v[j]
    sums = (dp.operator.T @ node_values) * dp.mesh.h ** dp.weights.alpha
    sums = sums[1:n]
    if convention == 'literal' and n > 2:
        i = np.arange(1, n - 1)
        sums[:n - 2] -= w[n - i] * node_values[n]
    return sums


def psi(dp: DiscretizedProblem, interior) -> float:
    """
    Right-endpoint rectangle rule for the functional:
    Psi(x) = sum_{i=1}^{n} h L(t_i, x_i, D x_i, (x_i - x_{i-1}) / h)
    """
    values = dp.full(interior)
    return _psi_values(dp, values)


def _psi_values(dp: DiscretizedProblem, values: np.ndarray) -> float:
    t = dp.mesh.nodes[1:]
    dax = dp.fractional(values)[1:]
    xdot = dp.xdot(values)[1:]
    terms = dp.problem.lagrangian.eval(t, values[1:], dax, xdot)
    return float(dp.mesh.h * np.sum(terms))


def stationarity_residual(dp: DiscretizedProblem, interior) -> np.ndarray:
    """
    Gradient of Psi with respect to x_1..x_{n-1}:

    F_i = h d_x[i] + h^(1-alpha) sum_k w[k] d_dax[i+k] + (d_xdot[i] - d_xdot[i+1])
    """
    values = dp.full(interior)
    h = dp.mesh.h
    d_x, d_dax, d_xdot = _partials(dp, values)
    sums = _right_sums(dp, d_dax, dp.convention)
    n = dp.n
    return (h * d_x[1:n]
            + h ** (1.0 - dp.weights.alpha) * sums
            + (d_xdot[1:n] - d_xdot[2:n + 1]))


def el_residual(dp: DiscretizedProblem, values) -> np.ndarray:
    """
    Discrete fractional Euler-Lagrange residual at interior nodes:
    d_x + (right GL of d_dax) - forward difference of d_xdot
    """
    values = _check_values(dp, values)
    h = dp.mesh.h
    d_x, d_dax, d_xdot = _partials(dp, values)
    sums = _right_sums(dp, d_dax, 'generic')
    n = dp.n
    return (d_x[1:n]
            + sums / h ** dp.weights.alpha
            - (d_xdot[2:n + 1] - d_xdot[1:n]) / h)


def linear_interp_trajectory(problem: VariationalProblem, mesh: Mesh) -> Trajectory:
    """Straight line between the boundary values, sampled on the mesh"""
    i = np.arange(mesh.n + 1)
    values = problem.xa + (problem.xb - problem.xa) * i / mesh.n
    values[0] = problem.xa
    values[-1] = problem.xb
    return Trajectory(mesh, values)


def sample_exact(problem: VariationalProblem, mesh: Mesh) -> Trajectory:
    """Exact solution on the mesh with the boundary entries pinned to xa, xb"""
    if problem.exact is None:
        raise ValueError(f"Problem {problem.name} has no exact solution")
    values = np.asarray(problem.exact(mesh.nodes), dtype=float).copy()
    values[0] = problem.xa
    values[-1] = problem.xb
    return Trajectory(mesh, values)


def minimality_witness(problem: VariationalProblem, n: int) -> Tuple[float, float]:
    """(Psi at the sampled exact solution, Psi at the straight line)"""
    dp = discretize(problem, n)
    exact = sample_exact(problem, dp.mesh)
    line = linear_interp_trajectory(problem, dp.mesh)
    return psi(dp, exact.interior), psi(dp, line.interior)
