"""
Variational Problem Module
Lagrangians with partial derivatives, fixed-endpoint problems and the built-in benchmark problems
"""

import numpy as np
from typing import Callable, Dict, List, Optional

from special_functions import gamma


def _shaped(value, *args):
    """Broadcast an evaluator result to the common shape of its arguments"""
    shape = np.broadcast(*[np.asarray(a) for a in args]).shape
    out = np.broadcast_to(np.asarray(value, dtype=float), shape).astype(float)
    return float(out) if out.ndim == 0 else out


def _zero(t, x, dax, xdot):
    return 0.0


class Lagrangian:
    """Integrand L(t, x, dax, xdot) together with its three partial derivatives"""

    def __init__(self,
                 func: Callable,
                 d_x: Callable,
                 d_dax: Callable,
                 d_xdot: Optional[Callable] = None,
                 uses_xdot: bool = False,
                 source: Optional[str] = None):
        """
        Args:
            func: L(t, x, dax, xdot), vectorized over numpy arrays
            d_x: dL/dx
            d_dax: dL/d(aD_t^alpha x)
            d_xdot: dL/d(xdot); ignored unless uses_xdot
            uses_xdot: Whether L depends on the first derivative
            source: Optional human-readable form of L
        """
        self.func = func
        self.d_x_func = d_x
        self.d_dax_func = d_dax
        self.uses_xdot = bool(uses_xdot)
        self.d_xdot_func = d_xdot if (uses_xdot and d_xdot is not None) else _zero
        self.source = source

    def eval(self, t, x, dax, xdot=0.0):
        if not self.uses_xdot:
            xdot = 0.0
        return _shaped(self.func(t, x, dax, xdot), t, x, dax, xdot)

    def d_x(self, t, x, dax, xdot=0.0):
        return _shaped(self.d_x_func(t, x, dax, xdot), t, x, dax, xdot)

    def d_dax(self, t, x, dax, xdot=0.0):
        return _shaped(self.d_dax_func(t, x, dax, xdot), t, x, dax, xdot)

    def d_xdot(self, t, x, dax, xdot=0.0):
        return _shaped(self.d_xdot_func(t, x, dax, xdot), t, x, dax, xdot)

    def __repr__(self):
        return f"Lagrangian({self.source or 'custom'}, uses_xdot={self.uses_xdot})"


class VariationalProblem:
    """
    Minimize J[x] = int_a^b L(t, x, aD_t^alpha x, xdot) dt subject to x(a) = xa, x(b) = xb.
    Construction does not validate; call validate() for findings.
    """

    def __init__(self, a: float, b: float, alpha: float, xa: float, xb: float,
                 lagrangian: Lagrangian,
                 exact: Optional[Callable] = None,
                 name: str = 'custom'):
        self.a = float(a)
        self.b = float(b)
        self.alpha = float(alpha)
        self.xa = float(xa)
        self.xb = float(xb)
        self.lagrangian = lagrangian
        self.exact = exact
        self.name = name

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'a': self.a,
            'b': self.b,
            'alpha': self.alpha,
            'xa': self.xa,
            'xb': self.xb,
            'lagrangian': self.lagrangian.source,
            'uses_xdot': self.lagrangian.uses_xdot,
            'has_exact': self.has_exact
        }

    def __repr__(self):
        return (f"VariationalProblem({self.name}: alpha={self.alpha}, "
                f"[{self.a}, {self.b}], x(a)={self.xa}, x(b)={self.xb})")


class Trajectory:
    """Values x_0..x_n on a mesh"""

    def __init__(self, mesh, values):
        values = np.asarray(values, dtype=float)
        if len(values) != mesh.n + 1:
            raise ValueError(f"Trajectory needs {mesh.n + 1} values, got {len(values)}")
        self.mesh = mesh
        self.values = values

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:-1]

    def to_dict(self) -> Dict:
        return {'t': self.mesh.nodes.tolist(), 'x': self.values.tolist()}


# ---------------------------------------------------------------------------
# Built-in problems on [0, 1] with alpha = 0.5
# ---------------------------------------------------------------------------

def rl_coefficient(p: float, alpha: float) -> float:
    """Gamma(p+1) / Gamma(p+1-alpha), the factor of t^(p-alpha) in the derivative of t^p"""
    return gamma(p + 1.0) / gamma(p + 1.0 - alpha)


def example1() -> VariationalProblem:
    """Quadratic Lagrangian (dax - 2/Gamma(2.5) t^1.5)^2 with minimizer t^2"""
    c = rl_coefficient(2.0, 0.5)

    def target(t):
        return c * np.asarray(t, dtype=float) ** 1.5

    lagrangian = Lagrangian(
        func=lambda t, x, dax, xdot: (dax - target(t)) ** 2,
        d_x=_zero,
        d_dax=lambda t, x, dax, xdot: 2.0 * (dax - target(t)),
        uses_xdot=False,
        source="(dax - 2/gamma(2.5)*t^1.5)^2"
    )
    return VariationalProblem(0.0, 1.0, 0.5, 0.0, 1.0, lagrangian,
                              exact=lambda t: np.asarray(t, dtype=float) ** 2,
                              name='example1')


def example2_exact(t):
    """Closed-form extremal of the dax - xdot^2 problem"""
    t = np.asarray(t, dtype=float)
    c = 1.0 / (2.0 * gamma(2.5))
    return -c * (1.0 - t) ** 1.5 + (1.0 - c) * t + c


def example2() -> VariationalProblem:
    """Lagrangian dax - xdot^2, linear in dax, quadratic in the first derivative"""
    lagrangian = Lagrangian(
        func=lambda t, x, dax, xdot: dax - xdot ** 2,
        d_x=_zero,
        d_dax=lambda t, x, dax, xdot: 1.0,
        d_xdot=lambda t, x, dax, xdot: -2.0 * xdot,
        uses_xdot=True,
        source="dax - dx^2"
    )
    return VariationalProblem(0.0, 1.0, 0.5, 0.0, 1.0, lagrangian,
                              exact=example2_exact, name='example2')


def example2_ode_residual(t, step: float = 1e-4):
    """
    xddot(t) + (1-t)^(-1/2) / (2 Gamma(1/2)) for the exact extremal, with the
    second derivative taken by central differences. Vanishes on [0, 1).
    """
    t = np.asarray(t, dtype=float)
    xddot = (example2_exact(t + step) - 2.0 * example2_exact(t) + example2_exact(t - step)) / step ** 2
    return xddot + (1.0 - t) ** -0.5 / (2.0 * gamma(0.5))


def example3_phi(t):
    """Left half-derivative of 16 t^5 - 20 t^3 + 5 t"""
    t = np.asarray(t, dtype=float)
    return (16.0 * rl_coefficient(5.0, 0.5) * t ** 4.5
            - 20.0 * rl_coefficient(3.0, 0.5) * t ** 2.5
            + 5.0 * rl_coefficient(1.0, 0.5) * t ** 0.5)


def example3() -> VariationalProblem:
    """Quartic Lagrangian (dax - phi(t))^4 with the oscillating minimizer 16t^5 - 20t^3 + 5t"""
    lagrangian = Lagrangian(
        func=lambda t, x, dax, xdot: (dax - example3_phi(t)) ** 4,
        d_x=_zero,
        d_dax=lambda t, x, dax, xdot: 4.0 * (dax - example3_phi(t)) ** 3,
        uses_xdot=False,
        source="(dax - phi(t))^4"
    )

    def exact(t):
        t = np.asarray(t, dtype=float)
        return 16.0 * t ** 5 - 20.0 * t ** 3 + 5.0 * t

    return VariationalProblem(0.0, 1.0, 0.5, 0.0, 1.0, lagrangian,
                              exact=exact, name='example3')


BUILTIN_EXAMPLES = {
    'example1': example1,
    'example2': example2,
    'example3': example3,
}


def get_example(name) -> VariationalProblem:
    """Look up a built-in by 'example1', '1' or 1"""
    key = str(name).strip().lower()
    if not key.startswith('example'):
        key = f'example{key}'
    if key not in BUILTIN_EXAMPLES:
        raise KeyError(f"Unknown example: {name} (choose from {', '.join(BUILTIN_EXAMPLES)})")
    return BUILTIN_EXAMPLES[key]()


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _central_difference(func: Callable, args: List[float], index: int) -> float:
    v = args[index]
    step = 1e-6 * max(1.0, abs(v))
    plus = list(args)
    minus = list(args)
    plus[index] = v + step
    minus[index] = v - step
    return (func(*plus) - func(*minus)) / (2.0 * step)


def validate(problem: VariationalProblem, samples: int = 20, seed: int = 0,
             boundary_tol: float = 1e-12) -> List[str]:
    """
    Check the problem's invariants

    Args:
        problem: Problem to check
        samples: Number of random points for the partial-derivative check
        seed: Seed of the random points
        boundary_tol: Allowed gap between the exact solution and the boundary values

    Returns:
        List of findings; empty when the problem is valid
    """
    findings = []

    if not problem.b > problem.a:
        findings.append(f"interval order: b = {problem.b} must exceed a = {problem.a}")
    if not (0.0 < problem.alpha < 1.0):
        findings.append(f"alpha out of range: {problem.alpha} (expected 0 < alpha < 1)")

    if problem.exact is not None:
        for label, t, expected in (('a', problem.a, problem.xa), ('b', problem.b, problem.xb)):
            value = float(problem.exact(t))
            if not abs(value - expected) <= boundary_tol:
                findings.append(f"boundary mismatch: exact({t}) = {value} but x({label}) = {expected}")

    lagrangian = problem.lagrangian
    rng = np.random.default_rng(seed)
    lo, hi = (problem.a, problem.b) if problem.b > problem.a else (problem.b, problem.a)
    partials = [(1, 'd_x', lagrangian.d_x), (2, 'd_dax', lagrangian.d_dax)]
    if lagrangian.uses_xdot:
        partials.append((3, 'd_xdot', lagrangian.d_xdot))

    reported = set()
    for _ in range(samples):
        point = [float(rng.uniform(lo, hi)), *map(float, rng.uniform(-2.0, 2.0, size=3))]
        for index, label, partial in partials:
            if label in reported:
                continue
            try:
                numeric = _central_difference(lagrangian.eval, point, index)
                analytic = float(partial(*point))
            except (ArithmeticError, ValueError):
                # outside the Lagrangian's domain; not evidence against the partials
                continue
            scale = max(1.0, abs(analytic), abs(numeric))
            if not abs(numeric - analytic) <= 1e-5 * scale:
                findings.append(
                    f"partial mismatch: {label} = {analytic:.6g} but finite difference gives "
                    f"{numeric:.6g} at (t, x, dax, xdot) = ({', '.join(f'{p:.4g}' for p in point)})")
                reported.add(label)

    return findings
