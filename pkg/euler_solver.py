"""
Euler Solver Module
Solves the stationarity system of the discretized functional: linear path or damped Newton
"""

import time
import numpy as np
from scipy import linalg
from typing import Dict, List, Optional, Tuple

from special_functions import gl_weights
from variational_problem import VariationalProblem, Trajectory
from discretizer import (DiscretizedProblem, discretize, stationarity_residual,
                         linear_interp_trajectory)

PATHS = ('auto', 'linear', 'newton')
MAX_REFINEMENTS = 3


class SolverError(RuntimeError):
    """Base class for failures of the algebraic solve"""


class SingularSystemError(SolverError):
    """Matrix or Jacobian is numerically singular"""

    def __init__(self, message: str, pivot_index: Optional[int] = None):
        super().__init__(message)
        self.pivot_index = pivot_index


class NonConvergenceError(SolverError):
    """Newton iteration did not reach the residual tolerance"""

    def __init__(self, message: str, best_iterate: np.ndarray, residual_norm: float, iterations: int):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual_norm = residual_norm
        self.iterations = iterations


class DispatchError(SolverError):
    """Non-affine residual sent to the linear path"""


class SolveOptions:
    """Tunable settings of the solve, kept in a params dict"""

    DEFAULTS = {
        'tol_residual': 1e-10,
        'max_newton_iters': 100,
        'fd_jacobian_step': 1e-7,
        'damping_min': 1.0 / 1024.0,
        'force_path': 'auto',
    }

    def __init__(self, params: Optional[Dict] = None, verbose: bool = False):
        self.params = dict(self.DEFAULTS)
        self.verbose = verbose
        if params:
            self.update(params)

    def update(self, params: Dict):
        """
        Update solver settings

        Args:
            params: Dictionary of settings to update
        """
        unknown = set(params) - set(self.DEFAULTS)
        if unknown:
            raise ValueError(f"Unknown solver options: {sorted(unknown)}")
        merged = {**self.params, **params}
        if not merged['tol_residual'] > 0:
            raise ValueError(f"tol_residual must be positive, got {merged['tol_residual']}")
        if int(merged['max_newton_iters']) < 1:
            raise ValueError(f"max_newton_iters must be at least 1, got {merged['max_newton_iters']}")
        if not merged['fd_jacobian_step'] > 0:
            raise ValueError(f"fd_jacobian_step must be positive, got {merged['fd_jacobian_step']}")
        if not 0 < merged['damping_min'] <= 1:
            raise ValueError(f"damping_min must lie in (0, 1], got {merged['damping_min']}")
        if merged['force_path'] not in PATHS:
            raise ValueError(f"force_path must be one of {PATHS}, got {merged['force_path']}")
        merged['max_newton_iters'] = int(merged['max_newton_iters'])
        self.params = merged
        if self.verbose:
            print(f"[OK] Updated solver options: {list(params.keys())}")


class SolveReport:
    """Outcome of a solve: trajectory, residual, iterations, path and timing"""

    def __init__(self, trajectory: Trajectory, residual_inf_norm: float, iterations: int,
                 path: str, wall_seconds: float, error_vs_exact: Optional[float] = None,
                 residual_history: Optional[List[float]] = None):
        self.trajectory = trajectory
        self.residual_inf_norm = float(residual_inf_norm)
        self.iterations = int(iterations)
        self.path = path
        self.wall_seconds = float(wall_seconds)
        self.error_vs_exact = error_vs_exact
        # ||F||_inf at the start and after each accepted step (or refinement)
        self.residual_history = list(residual_history or [self.residual_inf_norm])

    def summary_line(self) -> str:
        error = 'n/a' if self.error_vs_exact is None else f"{self.error_vs_exact:.6g}"
        return (f"path={self.path} residual={self.residual_inf_norm:.3e} "
                f"E={error} T={self.wall_seconds:.6f}")

    def to_dict(self) -> Dict:
        return {
            'path': self.path,
            'n': self.trajectory.mesh.n,
            'residual_inf_norm': self.residual_inf_norm,
            'iterations': self.iterations,
            'wall_seconds': self.wall_seconds,
            'error_vs_exact': self.error_vs_exact,
            'trajectory': self.trajectory.to_dict()
        }


def _inf_norm(v) -> float:
    return float(np.max(np.abs(v))) if len(v) else 0.0


def detect_affine(dp: DiscretizedProblem, trials: int = 3, seed: int = 0, scale: float = 0.1) -> bool:
    """
    True iff F(x+y) - F(x) - F(y) + F(0) vanishes (relative to F(0)) for
    independent random vector pairs.

    Vectors are normal with standard deviation scale; small vectors keep
    finite-difference partials of expression Lagrangians near their rounding floor.
    """
    if dp.n < 3:
        raise ValueError(f"detect_affine needs n >= 3, got {dp.n}")
    rng = np.random.default_rng(seed)
    f0 = stationarity_residual(dp, np.zeros(dp.unknowns))
    if not np.all(np.isfinite(f0)):
        return False
    tol = 1e-9 * (1.0 + _inf_norm(f0))
    for _ in range(trials):
        x = scale * rng.standard_normal(dp.unknowns)
        y = scale * rng.standard_normal(dp.unknowns)
        defect = (stationarity_residual(dp, x + y) - stationarity_residual(dp, x)
                  - stationarity_residual(dp, y) + f0)
        # NaN defects compare false and count as non-affine
        if not _inf_norm(defect) <= tol:
            return False
    return True


def assemble_linear(dp: DiscretizedProblem, check: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Matrix and right-hand side of the affine stationarity system, one unit column at a time

    Args:
        dp: Discretized problem with an affine residual
        check: Verify affinity first

    Returns:
        (A, b) with A[:, j] = F(e_j) - F(0) and b = -F(0)
    """
    if check and not detect_affine(dp):
        raise DispatchError(f"Residual of {dp.problem.name} is not affine; use the Newton path")
    m = dp.unknowns
    f0 = stationarity_residual(dp, np.zeros(m))
    A = np.empty((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = 1.0
        A[:, j] = stationarity_residual(dp, e) - f0
    return A, -f0


def example1_closed_form_matrix(n: int, alpha: float = 0.5) -> np.ndarray:
    """
    Double-sum matrix of the quadratic example on [0, 1]:
    P[r, c] = sum_{k=0}^{n-max(r,c)} A_k A_{k+|r-c|}, with A_i = h^(1+alpha) w[i].

    assemble_linear(discretize(example1(), n)) equals 2 h^(-1-4 alpha) P.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n}")
    n = int(n)
    h = 1.0 / n
    coeffs = h ** (1.0 + alpha) * gl_weights(alpha, n).w
    P = np.empty((n - 1, n - 1))
    for r in range(1, n):
        for c in range(1, n):
            shift = abs(r - c)
            top = n - max(r, c)
            P[r - 1, c - 1] = np.dot(coeffs[:top + 1], coeffs[shift:shift + top + 1])
    return P


def is_tridiagonal(A: np.ndarray, tol: float = 1e-14) -> bool:
    outside = np.triu(A, 2) + np.tril(A, -2)
    return bool(np.all(np.abs(outside) <= tol))


def _singular_pivot(diagonal: np.ndarray, threshold: float) -> Optional[int]:
    small = np.flatnonzero(np.abs(diagonal) <= threshold)
    return int(small[0]) if len(small) else None


def solve_linear(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Solve A x = b; banded solver when A is tridiagonal, LU with partial pivoting otherwise

    Raises:
        SingularSystemError: a pivot falls below 1e-13 ||A||_inf
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise ValueError(f"Incompatible system shapes {A.shape} and {b.shape}")

    threshold = 1e-13 * float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0

    if is_tridiagonal(A) and len(b) > 2:
        ab = np.zeros((3, len(b)))
        ab[0, 1:] = np.diag(A, 1)
        ab[1, :] = np.diag(A)
        ab[2, :-1] = np.diag(A, -1)
        try:
            x = linalg.solve_banded((1, 1), ab, b)
            if np.all(np.isfinite(x)) and _inf_norm(A @ x - b) <= 1e-10 * (1.0 + _inf_norm(b)):
                return x
        except (linalg.LinAlgError, ValueError):
            pass
        # fall through to the dense factorization, which locates the pivot

    lu, piv = linalg.lu_factor(A, check_finite=True)
    pivot = _singular_pivot(np.diag(lu), threshold)
    if pivot is not None:
        raise SingularSystemError(
            f"Matrix is numerically singular: pivot {pivot} is {np.diag(lu)[pivot]:.3e} "
            f"(threshold {threshold:.3e})", pivot_index=pivot)
    return linalg.lu_solve((lu, piv), b)


def fd_jacobian(dp: DiscretizedProblem, x: np.ndarray, f: np.ndarray, step: float) -> np.ndarray:
    """Forward-difference Jacobian of the stationarity residual, one column per unknown"""
    m = len(x)
    J = np.empty((m, m))
    for j in range(m):
        delta = step * max(1.0, abs(x[j]))
        bumped = x.copy()
        bumped[j] += delta
        J[:, j] = (stationarity_residual(dp, bumped) - f) / delta
    return J


def max_norm_error(problem: VariationalProblem, trajectory: Trajectory) -> Optional[float]:
    """max |x(t_i) - x_i| over interior nodes; None without an exact solution"""
    if problem.exact is None:
        return None
    t = trajectory.mesh.nodes[1:-1]
    exact = np.asarray(problem.exact(t), dtype=float)
    return _inf_norm(exact - trajectory.values[1:-1])


def _trajectory(dp: DiscretizedProblem, interior: np.ndarray) -> Trajectory:
    return Trajectory(dp.mesh, dp.full(interior))


def solve_newton(dp: DiscretizedProblem, opts: Optional[SolveOptions] = None,
                 initial: Optional[np.ndarray] = None) -> SolveReport:
    """
    Damped Newton iteration on F(x) = 0 starting from the straight line

    Args:
        dp: Discretized problem
        opts: Solver settings
        initial: Optional starting interior values

    Returns:
        SolveReport with path 'newton'
    """
    opts = opts or SolveOptions()
    if dp.n < 3:
        raise ValueError(f"solve_newton needs n >= 3, got {dp.n}")
    tol = opts.params['tol_residual']
    max_iters = opts.params['max_newton_iters']
    damping_min = opts.params['damping_min']
    start = time.perf_counter()

    if initial is None:
        x = linear_interp_trajectory(dp.problem, dp.mesh).interior.copy()
    else:
        x = np.asarray(initial, dtype=float).copy()
    f = stationarity_residual(dp, x)
    norm = _inf_norm(f)
    iterations = 0
    history = [norm]

    if opts.verbose:
        print(f"[NEWTON] n={dp.n} start residual={norm:.3e}")

    if not np.isfinite(norm):
        raise NonConvergenceError(
            f"Residual is not finite at the starting trajectory (residual {norm})",
            best_iterate=_trajectory(dp, x).values, residual_norm=norm, iterations=0)

    while not norm <= tol:
        if iterations >= max_iters:
            raise NonConvergenceError(
                f"Newton did not converge in {iterations} iterations "
                f"(final residual {norm:.3e} > {tol:.1e})",
                best_iterate=_trajectory(dp, x).values, residual_norm=norm, iterations=iterations)

        J = fd_jacobian(dp, x, f, opts.params['fd_jacobian_step'])
        if not np.all(np.isfinite(J)):
            raise NonConvergenceError(
                f"Jacobian has non-finite entries at iteration {iterations + 1} (residual {norm:.3e})",
                best_iterate=_trajectory(dp, x).values, residual_norm=norm, iterations=iterations)
        try:
            delta = solve_linear(J, -f)
        except SingularSystemError as e:
            raise SingularSystemError(f"Singular Jacobian at iteration {iterations + 1}: {e}",
                                      pivot_index=e.pivot_index) from e

        lam = 1.0
        while True:
            trial = x + lam * delta
            f_trial = stationarity_residual(dp, trial)
            trial_norm = _inf_norm(f_trial)
            # a NaN trial norm fails this test and shrinks the step
            if trial_norm < norm:
                break
            lam /= 2.0
            if lam < damping_min:
                raise NonConvergenceError(
                    f"Line search stalled at iteration {iterations + 1} "
                    f"(residual {norm:.3e}, damping below {damping_min:g})",
                    best_iterate=_trajectory(dp, x).values, residual_norm=norm,
                    iterations=iterations)

        x, f, norm = trial, f_trial, trial_norm
        iterations += 1
        history.append(norm)
        if opts.verbose:
            print(f"[NEWTON] iteration {iterations}: residual={norm:.3e} damping={lam:g}")

    elapsed = time.perf_counter() - start
    trajectory = _trajectory(dp, x)
    return SolveReport(trajectory, norm, iterations, 'newton', elapsed,
                       max_norm_error(dp.problem, trajectory), residual_history=history)


def _solve_linear_path(dp: DiscretizedProblem, opts: SolveOptions) -> SolveReport:
    tol = opts.params['tol_residual']
    start = time.perf_counter()
    A, b = assemble_linear(dp, check=False)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NonConvergenceError(
            "Linear system has non-finite entries",
            best_iterate=dp.full(np.zeros(dp.unknowns)), residual_norm=float('nan'), iterations=0)
    interior = solve_linear(A, b)

    residual = stationarity_residual(dp, interior)
    norm = _inf_norm(residual)
    history = [norm]
    refinements = 0
    # iterative refinement absorbs rounding in the column-by-column matrix
    while np.isfinite(norm) and norm > tol and refinements < MAX_REFINEMENTS:
        interior = interior - solve_linear(A, residual)
        residual = stationarity_residual(dp, interior)
        norm = _inf_norm(residual)
        history.append(norm)
        refinements += 1
        if opts.verbose:
            print(f"[SOLVING] refinement {refinements}: residual={norm:.3e}")
    elapsed = time.perf_counter() - start

    if not norm <= tol:
        raise NonConvergenceError(
            f"Linear solve left residual {norm:.3e} above tolerance {tol:.1e}",
            best_iterate=dp.full(interior), residual_norm=norm, iterations=1 + refinements)
    trajectory = _trajectory(dp, interior)
    return SolveReport(trajectory, norm, 1 + refinements, 'linear', elapsed,
                       max_norm_error(dp.problem, trajectory), residual_history=history)


def solve(problem: VariationalProblem, n: int, opts: Optional[SolveOptions] = None,
          convention: str = 'generic') -> SolveReport:
    """
    Discretize the problem on n intervals and solve the stationarity system

    Args:
        problem: Fractional variational problem
        n: Number of mesh intervals (n >= 3)
        opts: Solver settings; force_path picks linear/newton, 'auto' tests affinity
        convention: Upper-limit convention of the residual ('generic' or 'literal')

    Returns:
        SolveReport including the max-norm error when an exact solution exists
    """
    opts = opts or SolveOptions()
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n}")

    dp = discretize(problem, int(n), convention)
    path = opts.params['force_path']
    if path == 'auto':
        path = 'linear' if detect_affine(dp) else 'newton'
    elif path == 'linear' and not detect_affine(dp):
        raise DispatchError(f"Residual of {problem.name} is not affine; linear path unavailable")

    if opts.verbose:
        print(f"[SOLVING] {problem.name}: n={n}, path={path}, convention={convention}")

    if path == 'linear':
        report = _solve_linear_path(dp, opts)
    else:
        report = solve_newton(dp, opts)

    if opts.verbose:
        print(f"[OK] {report.summary_line()}")
    return report
