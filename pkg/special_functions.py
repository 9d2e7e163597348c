"""
Special Functions Module
Gamma function, generalized binomial coefficients and Grünwald-Letnikov weights
"""

import numpy as np
from scipy import special
from typing import List


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a special function"""


def _is_pole(z: float) -> bool:
    return z <= 0 and float(z).is_integer()


def gamma(z: float) -> float:
    """
    Evaluate the Gamma function for real arguments

    Args:
        z: Real argument, not zero or a negative integer

    Returns:
        Gamma(z); negative non-integer arguments go through the reflection
        identity Gamma(z) Gamma(1 - z) = pi / sin(pi z)
    """
    z = float(z)
    if np.isnan(z):
        raise DomainError("Gamma argument is NaN")
    if _is_pole(z):
        raise DomainError(f"Gamma has a pole at z = {z:g}")
    if z < 0.5:
        return float(np.pi / (np.sin(np.pi * z) * special.gamma(1.0 - z)))
    return float(special.gamma(z))


def gamma_array(z) -> np.ndarray:
    """Elementwise gamma for array arguments, rejecting any pole"""
    z = np.asarray(z, dtype=float)
    poles = (z <= 0) & (z == np.floor(z))
    if np.any(poles):
        bad = z[poles].flat[0]
        raise DomainError(f"Gamma has a pole at z = {bad:g}")
    return special.gamma(z)


def binom_real(alpha: float, k: int) -> float:
    """
    Generalized binomial coefficient alpha (alpha-1) ... (alpha-k+1) / k!

    Args:
        alpha: Real upper argument
        k: Non-negative integer lower argument

    Returns:
        The falling-factorial quotient; 1 for k = 0
    """
    if k < 0:
        raise DomainError(f"Binomial lower index must be non-negative, got {k}")
    if k == 0:
        return 1.0
    j = np.arange(k, dtype=float)
    return float(np.prod((alpha - j) / (j + 1.0)))


def check_order(alpha: float):
    """Reject fractional orders outside the open interval (0, 1)"""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha out of range: {alpha} (expected 0 < alpha < 1)")


class GlWeights:
    """Grünwald-Letnikov coefficient sequence w[k] = (-1)^k C(alpha, k), k = 0..m"""

    def __init__(self, alpha: float, w: np.ndarray):
        self.alpha = float(alpha)
        self.w = np.asarray(w, dtype=float)
        self.w.setflags(write=False)

    @property
    def count(self) -> int:
        """Highest index covered by the sequence"""
        return len(self.w) - 1

    def partial_sums(self) -> np.ndarray:
        """Running sums S_m = w[0] + ... + w[m]"""
        return np.cumsum(self.w)

    def __len__(self):
        return len(self.w)

    def __repr__(self):
        return f"GlWeights(alpha={self.alpha}, count={self.count})"


def gl_weights(alpha: float, m: int) -> GlWeights:
    """
    Grünwald-Letnikov weights through the multiplicative recurrence

    Args:
        alpha: Fractional order in (0, 1)
        m: Highest weight index (m >= 0)

    Returns:
        GlWeights with w[0] = 1, w[k] = w[k-1] (k - 1 - alpha) / k
    """
    check_order(alpha)
    if m < 0:
        raise DomainError(f"Weight count must be non-negative, got {m}")

    k = np.arange(1, m + 1, dtype=float)
    w = np.concatenate(([1.0], np.cumprod((k - 1.0 - alpha) / k)))
    return GlWeights(alpha, w)


def gl_weights_gamma(alpha: float, m: int) -> np.ndarray:
    """
    Same weights from the Gamma ratio Gamma(k - alpha) / (Gamma(-alpha) Gamma(k + 1)).
    Overflows past k ~ 170; kept as an independent check on the recurrence.
    """
    check_order(alpha)
    k = np.arange(m + 1, dtype=float)
    return special.gamma(k - alpha) / (special.gamma(-alpha) * special.gamma(k + 1.0))


def weight_table(alpha: float, m: int) -> List[dict]:
    """Rows of (k, w[k], S_k) for listing"""
    weights = gl_weights(alpha, m)
    sums = weights.partial_sums()
    return [{'k': k, 'w': float(weights.w[k]), 'partial_sum': float(sums[k])}
            for k in range(len(weights))]
