"""
Problem Config Module
Loads, validates and reports user-defined variational problems stored as JSON
"""

import json
import os
import numpy as np
from typing import Dict, List, Optional

from expression_parser import ExprParseError, to_function, to_lagrangian
from variational_problem import VariationalProblem, get_example, validate

NUMERIC_FIELDS = ('alpha', 'a', 'b', 'xa', 'xb')
EXPRESSION_FIELDS = ('lagrangian', 'exact')
BOUNDARY_TOL = 1e-9
# central-difference partials of expression Lagrangians carry rounding noise near 1e-10 |L|
EXPRESSION_TOL_RESIDUAL = 1e-8


class ConfigError(ValueError):
    """Unreadable or invalid problem configuration, with its position when known"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 offset: Optional[int] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.message = message
        self.line = line
        self.column = column
        self.offset = offset


class ProblemConfig:
    """Serialized form of a VariationalProblem: numbers plus expression text"""

    def __init__(self, alpha: float, a: float, b: float, xa: float, xb: float,
                 lagrangian: str, exact: Optional[str] = None, name: str = 'custom'):
        self.alpha = alpha
        self.a = a
        self.b = b
        self.xa = xa
        self.xb = xb
        self.lagrangian = lagrangian
        self.exact = exact
        self.name = name

    @classmethod
    def from_dict(cls, data: Dict, name: str = 'custom') -> 'ProblemConfig':
        """
        Build a config from parsed JSON

        Args:
            data: Mapping with alpha, a, b, xa, xb, lagrangian and optional exact
            name: Problem name used in reports

        Returns:
            ProblemConfig
        """
        if not isinstance(data, dict):
            raise ConfigError(f"Config must be a JSON object, got {type(data).__name__}")

        allowed = set(NUMERIC_FIELDS) | set(EXPRESSION_FIELDS) | {'name'}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"Unknown config fields: {unknown}")

        missing = [f for f in NUMERIC_FIELDS + ('lagrangian',) if f not in data]
        if missing:
            raise ConfigError(f"Missing config fields: {missing}")

        for field in NUMERIC_FIELDS:
            value = data[field]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"Field '{field}' must be a number, got {value!r}")
            if not np.isfinite(value):
                raise ConfigError(f"Field '{field}' must be finite, got {value!r}")

        for field in EXPRESSION_FIELDS:
            value = data.get(field)
            if value is not None and not isinstance(value, str):
                raise ConfigError(f"Field '{field}' must be expression text, got {value!r}")

        return cls(alpha=float(data['alpha']), a=float(data['a']), b=float(data['b']),
                   xa=float(data['xa']), xb=float(data['xb']),
                   lagrangian=data['lagrangian'], exact=data.get('exact'),
                   name=str(data.get('name', name)))

    def to_problem(self) -> VariationalProblem:
        """Compile the expressions into a VariationalProblem"""
        try:
            lagrangian = to_lagrangian(self.lagrangian)
        except ExprParseError as e:
            raise ConfigError(f"Field 'lagrangian': {e.message}", offset=e.offset) from e

        exact = None
        if self.exact is not None:
            try:
                exact = to_function(self.exact, variable='t')
            except ExprParseError as e:
                raise ConfigError(f"Field 'exact': {e.message}", offset=e.offset) from e

        return VariationalProblem(self.a, self.b, self.alpha, self.xa, self.xb, lagrangian,
                                  exact=exact, name=self.name)

    def to_dict(self) -> Dict:
        data = {field: getattr(self, field) for field in NUMERIC_FIELDS}
        data['lagrangian'] = self.lagrangian
        if self.exact is not None:
            data['exact'] = self.exact
        return data


class ProblemConfigLoader:
    """Reads a problem file, checks it and reports what it found"""

    def __init__(self, file_path: str):
        """
        Initialize loader with file path

        Args:
            file_path: Path to a JSON problem file
        """
        self.file_path = file_path
        self.data = None
        self.config = None
        self.builtin = None
        self.problem = None
        self.findings = []

    def load_file(self) -> Dict:
        """
        Read and parse the JSON document

        Returns:
            Parsed mapping
        """
        if not os.path.exists(self.file_path):
            raise ConfigError(f"Config file not found: {self.file_path}")
        if os.path.splitext(self.file_path)[1].lower() not in ('.json', ''):
            raise ConfigError(f"Unsupported config file type: {self.file_path}")

        try:
            with open(self.file_path, 'r', encoding='utf-8') as f:
                text = f.read()
        except UnicodeDecodeError as e:
            raise ConfigError(f"Config file is not valid UTF-8: {e.reason}", offset=e.start) from e
        except OSError as e:
            raise ConfigError(f"Cannot read config file {self.file_path}: {e.strerror or e}") from e
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON: {e.msg}", line=e.lineno, column=e.colno,
                              offset=e.pos) from e

        if isinstance(self.data, dict) and 'example' in self.data:
            if len(self.data) != 1:
                raise ConfigError("A built-in reference takes no other fields")
            try:
                self.builtin = get_example(self.data['example'])
            except KeyError as e:
                raise ConfigError(str(e.args[0])) from e
        else:
            name = os.path.splitext(os.path.basename(self.file_path))[0] or 'custom'
            self.config = ProblemConfig.from_dict(self.data, name=name)
        return self.data

    def validate(self) -> List[str]:
        """
        Compile the problem and collect findings

        Returns:
            List of findings; empty when the problem is usable
        """
        if self.data is None:
            self.load_file()

        if self.builtin is not None:
            self.problem = self.builtin
        else:
            self.problem = self.config.to_problem()

        try:
            findings = validate(self.problem, boundary_tol=BOUNDARY_TOL)
        except ArithmeticError as e:
            findings = [f"evaluation failure: {e}"]
        self.findings = findings
        return findings

    def to_problem(self) -> VariationalProblem:
        """Validated problem; raises ConfigError listing the findings otherwise"""
        findings = self.validate()
        if findings:
            raise ConfigError("Invalid problem: " + "; ".join(findings))
        return self.problem

    def print_report(self):
        """Print a human-readable summary of the loaded problem"""
        if self.problem is None:
            print("No problem loaded. Run validate() first.")
            return

        print("\n" + "=" * 70)
        print("[CONFIG] PROBLEM CONFIGURATION REPORT")
        print("=" * 70)

        p = self.problem
        print(f"\n[INFO] {p.name} from {self.file_path}")
        print(f"  • Interval: [{p.a}, {p.b}]")
        print(f"  • Order alpha: {p.alpha}")
        print(f"  • Boundary values: x(a) = {p.xa}, x(b) = {p.xb}")
        print(f"  • Lagrangian: {p.lagrangian.source or 'built-in'}")
        print(f"  • Depends on xdot: {'yes' if p.lagrangian.uses_xdot else 'no'}")
        print(f"  • Exact solution: {getattr(p.exact, 'source', 'built-in') if p.has_exact else 'none'}")

        print("\n[FINDINGS] VALIDATION:")
        if self.findings:
            for finding in self.findings:
                print(f"  • {finding}")
        else:
            print("  • No problems detected [OK]")

        print("\n" + "=" * 70)


def load_problem(file_path: str) -> VariationalProblem:
    """Load and validate a problem file in one step"""
    loader = ProblemConfigLoader(file_path)
    loader.load_file()
    return loader.to_problem()
