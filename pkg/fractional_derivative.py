"""
Fractional Derivative Module
Grünwald-Letnikov approximations on equispaced samples and analytic Riemann-Liouville oracles
"""

import numpy as np
from scipy.linalg import toeplitz

from special_functions import GlWeights, DomainError, gamma, gl_weights, check_order


class GridIndexError(IndexError):
    """Node index outside the range an operator can evaluate"""


class WeightLengthError(ValueError):
    """Weight sequence shorter than the convolution needs"""


class GridSamples:
    """Values x_0..x_n of a function sampled at t_i = a + i h"""

    def __init__(self, h: float, values):
        """
        Args:
            h: Positive grid step
            values: Samples x_0..x_n (at least two)
        """
        values = np.asarray(values, dtype=float)
        if h <= 0:
            raise ValueError(f"Grid step must be positive, got {h}")
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("GridSamples needs a 1-D sequence with at least two values")
        if not np.all(np.isfinite(values)):
            raise ValueError("GridSamples values must be finite")
        self.h = float(h)
        self.values = values

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @classmethod
    def from_function(cls, func, a: float, b: float, n: int) -> 'GridSamples':
        """Sample func on the n-interval equispaced grid of [a, b]"""
        h = (b - a) / n
        t = a + h * np.arange(n + 1)
        t[-1] = b
        return cls(h, func(t))

    def reversed(self) -> 'GridSamples':
        return GridSamples(self.h, self.values[::-1].copy())


def _check(samples: GridSamples, weights: GlWeights, i: int, last: int, needed: int):
    if not (0 <= i <= last):
        raise GridIndexError(f"Index {i} outside 0..{last}")
    if weights.count < needed:
        raise WeightLengthError(f"Need weights up to index {needed}, have {weights.count}")


def gl_left(samples: GridSamples, weights: GlWeights, i: int) -> float:
    """
    Left Grünwald-Letnikov approximation at node i.
    The sum stops at k = i: the function is taken as zero left of t_0.
    """
    _check(samples, weights, i, samples.n, i)
    x = samples.values
    return float(np.dot(weights.w[:i + 1], x[i::-1]) / samples.h ** weights.alpha)


def gl_right(samples: GridSamples, weights: GlWeights, i: int) -> float:
    """Right Grünwald-Letnikov approximation at node i, summing towards t_n"""
    n = samples.n
    _check(samples, weights, i, n, n - i)
    x = samples.values
    return float(np.dot(weights.w[:n - i + 1], x[i:]) / samples.h ** weights.alpha)


def gl_left_shifted(samples: GridSamples, weights: GlWeights, i: int) -> float:
    """
    Shifted left Grünwald-Letnikov approximation at node i.

    The k = 0 term reads x_{i+1}, so the last node is not allowed; the sum
    keeps the upper limit k = i.
    """
    _check(samples, weights, i, samples.n - 1, i)
    x = samples.values
    return float(np.dot(weights.w[:i + 1], x[i + 1:0:-1]) / samples.h ** weights.alpha)


def left_operator(weights: GlWeights, n: int, h: float) -> np.ndarray:
    """(n+1)x(n+1) lower triangular Toeplitz matrix of the left approximation"""
    if weights.count < n:
        raise WeightLengthError(f"Need weights up to index {n}, have {weights.count}")
    column = weights.w[:n + 1]
    return np.tril(toeplitz(column)) / h ** weights.alpha


def gl_left_grid(samples: GridSamples, weights: GlWeights) -> np.ndarray:
    """Left approximation at every node"""
    return left_operator(weights, samples.n, samples.h) @ samples.values


def gl_right_grid(samples: GridSamples, weights: GlWeights) -> np.ndarray:
    """Right approximation at every node"""
    return left_operator(weights, samples.n, samples.h).T @ samples.values


def gl_left_shifted_grid(samples: GridSamples, weights: GlWeights) -> np.ndarray:
    """Shifted left approximation at nodes 0..n-1"""
    n = samples.n
    ops = left_operator(weights, n - 1, samples.h)
    return ops @ samples.values[1:]


def rl_monomial(p: float, alpha: float, t) -> np.ndarray:
    """
    Left Riemann-Liouville derivative of t^p anchored at 0:
    Gamma(p+1) / Gamma(p+1-alpha) * t^(p-alpha)
    """
    check_order(alpha)
    if p < 0:
        raise DomainError(f"Monomial power must be non-negative, got {p}")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("rl_monomial needs t > 0")
    value = gamma(p + 1.0) / gamma(p + 1.0 - alpha) * t ** (p - alpha)
    return float(value) if value.ndim == 0 else value


def rl_right_monomial(p: float, alpha: float, t, b: float = 1.0) -> np.ndarray:
    """Right Riemann-Liouville derivative of (b - t)^p on [t, b]"""
    check_order(alpha)
    if p < 0:
        raise DomainError(f"Monomial power must be non-negative, got {p}")
    t = np.asarray(t, dtype=float)
    if np.any(t >= b):
        raise DomainError(f"rl_right_monomial needs t < {b}")
    value = gamma(p + 1.0) / gamma(p + 1.0 - alpha) * (b - t) ** (p - alpha)
    return float(value) if value.ndim == 0 else value


SIDES = ('left', 'right', 'shifted')


def monomial_derivative(alpha: float, n: int, p: float, side: str = 'left'):
    """
    Approximate the derivative of t^p sampled on the n-interval grid of [0, 1]

    Args:
        alpha: Order in (0, 1)
        n: Number of intervals
        p: Non-negative power
        side: 'left', 'right' or 'shifted'

    Returns:
        (t, approx, exact); exact holds the analytic value where one is known
        (left side for t > 0, right side for p = 0 and t < 1) and NaN elsewhere,
        or is None when the side has no oracle
    """
    check_order(alpha)
    if side not in SIDES:
        raise ValueError(f"Unknown side: {side} (choose from {', '.join(SIDES)})")
    if p < 0:
        raise DomainError(f"Monomial power must be non-negative, got {p}")
    samples = GridSamples.from_function(lambda t: t ** p, 0.0, 1.0, n)
    weights = gl_weights(alpha, n)
    t = samples.h * np.arange(n + 1)
    t[-1] = 1.0

    if side == 'left':
        approx = gl_left_grid(samples, weights)
        exact = np.full(n + 1, np.nan)
        exact[1:] = rl_monomial(p, alpha, t[1:])
    elif side == 'right':
        approx = gl_right_grid(samples, weights)
        exact = None
        if p == 0:
            exact = np.full(n + 1, np.nan)
            exact[:-1] = rl_right_monomial(0.0, alpha, t[:-1])
    else:
        t = t[:-1]
        approx = gl_left_shifted_grid(samples, weights)
        exact = None
    return t, approx, exact
