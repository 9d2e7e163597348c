"""
Expression Parser Module
Recursive-descent parser and evaluator for user-defined Lagrangians and exact solutions
"""

import re
import numpy as np
from typing import Callable, Dict, List, Optional, Set, Tuple, Union

from special_functions import DomainError, gamma_array
from variational_problem import Lagrangian

# grammar
#   expr  := term (('+'|'-') term)*        flat Chain node
#   term  := unary (('*'|'/') unary)*      flat Chain node
#   unary := '-' unary | power
#   power := atom ('^' unary)?
#   atom  := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

VARIABLES = ('t', 'x', 'dax', 'dx')
CONSTANTS = {'pi': np.pi}
FUNCTIONS = {
    'gamma': 1,
    'sqrt': 1,
    'exp': 1,
    'log': 1,
    'sin': 1,
    'cos': 1,
    'abs': 1,
    'pow': 2,
}

MAX_NESTING = 100
MAX_TREE_DEPTH = 250

TOKEN_PATTERN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


class ExprParseError(ValueError):
    """Syntax error with the character offset where it was detected"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class ExprEvalError(ArithmeticError):
    """Domain violation while evaluating a node"""

    def __init__(self, message: str, node_source: str):
        super().__init__(f"{message} in '{node_source}'")
        self.node_source = node_source


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------

class Expr:
    """Base syntax tree node"""
    offset = 0
    depth = 1


class Number(Expr):
    def __init__(self, value: float, offset: int = 0):
        self.value = float(value)
        self.offset = offset


class Variable(Expr):
    def __init__(self, name: str, offset: int = 0):
        self.name = name
        self.offset = offset


class Constant(Expr):
    def __init__(self, name: str, offset: int = 0):
        self.name = name
        self.offset = offset


class Unary(Expr):
    def __init__(self, operand: Expr, offset: int = 0):
        self.operand = operand
        self.offset = offset
        self.depth = operand.depth + 1


class Binary(Expr):
    def __init__(self, op: str, left: Expr, right: Expr, offset: int = 0):
        self.op = op
        self.left = left
        self.right = right
        self.offset = offset
        self.depth = max(left.depth, right.depth) + 1


class Chain(Expr):
    """Left-associative run of '+'/'-' or '*'/'/' operations, kept flat"""

    def __init__(self, first: Expr, rest: List[Tuple[str, Expr]], offset: int = 0):
        self.first = first
        self.rest = rest
        self.offset = offset
        self.depth = max([first.depth] + [operand.depth for _, operand in rest]) + 1


class Call(Expr):
    def __init__(self, name: str, args: List[Expr], offset: int = 0):
        self.name = name
        self.args = args
        self.offset = offset
        self.depth = max(a.depth for a in args) + 1


class Token:
    """Lexical token: kind is 'number', 'name', 'op' or 'end'"""

    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind
        self.text = text
        self.offset = offset

    def __repr__(self):
        return f"({self.kind}, {self.text!r}, {self.offset})"


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = TOKEN_PATTERN.match(source, pos)
        if match is None:
            raise ExprParseError(f"Unexpected character {source[pos]!r}", pos)
        kind = match.lastgroup
        if kind != 'ws':
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token('end', '', len(source)))
    return tokens


class Parser:
    """Recursive-descent parser over a token list"""

    def __init__(self, source: str, variables=VARIABLES):
        self.source = source
        self.variables = tuple(variables)
        self.tokens = tokenize(source)
        self.pos = 0
        self.nesting = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _accept(self, text: str) -> Optional[Token]:
        if self.current.kind == 'op' and self.current.text == text:
            return self._advance()
        return None

    def _expect(self, text: str, opening: Optional[Token] = None) -> Token:
        token = self._accept(text)
        if token is None:
            if text == ')' and opening is not None:
                raise ExprParseError(f"Unbalanced parenthesis opened at offset {opening.offset}",
                                     self.current.offset)
            raise ExprParseError(f"Expected '{text}' but found {self._describe(self.current)}",
                                 self.current.offset)
        return token

    @staticmethod
    def _describe(token: Token) -> str:
        return 'end of input' if token.kind == 'end' else repr(token.text)

    @staticmethod
    def _checked(node: Expr) -> Expr:
        if node.depth > MAX_TREE_DEPTH:
            raise ExprParseError(f"Expression deeper than {MAX_TREE_DEPTH} levels", node.offset)
        return node

    def parse(self) -> Expr:
        node = self.expr()
        if self.current.kind != 'end':
            if self.current.text == ')':
                raise ExprParseError("Unbalanced parenthesis ')'", self.current.offset)
            raise ExprParseError(f"Unexpected trailing input {self._describe(self.current)}",
                                 self.current.offset)
        return node

    def _chain(self, operand: Callable[[], Expr], ops: str) -> Expr:
        first = operand()
        rest = []
        while self.current.kind == 'op' and self.current.text in ops:
            op = self._advance()
            rest.append((op.text, operand()))
        if not rest:
            return first
        return self._checked(Chain(first, rest, first.offset))

    def expr(self) -> Expr:
        return self._chain(self.term, '+-')

    def term(self) -> Expr:
        return self._chain(self.unary, '*/')

    def unary(self) -> Expr:
        self.nesting += 1
        if self.nesting > MAX_NESTING:
            raise ExprParseError(f"Expression nested deeper than {MAX_NESTING} levels",
                                 self.current.offset)
        try:
            minus = self._accept('-')
            if minus is not None:
                return self._checked(Unary(self.unary(), minus.offset))
            return self.power()
        finally:
            self.nesting -= 1

    def power(self) -> Expr:
        base = self.atom()
        caret = self._accept('^')
        if caret is not None:
            return self._checked(Binary('^', base, self.unary(), caret.offset))
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == 'number':
            self._advance()
            value = float(token.text)
            if not np.isfinite(value):
                raise ExprParseError(f"Number {token.text} is out of range", token.offset)
            return Number(value, token.offset)

        if token.kind == 'name':
            self._advance()
            name = token.text
            opening = self._accept('(')
            if opening is not None:
                return self._call(name, token, opening)
            if name in FUNCTIONS:
                raise ExprParseError(f"Function '{name}' needs an argument list", token.offset)
            if name in self.variables:
                return Variable(name, token.offset)
            if name in CONSTANTS:
                return Constant(name, token.offset)
            raise ExprParseError(f"Unknown identifier '{name}'", token.offset)

        opening = self._accept('(')
        if opening is not None:
            node = self.expr()
            self._expect(')', opening)
            return node

        raise ExprParseError(f"Expected a number, name or '(' but found {self._describe(token)}",
                             token.offset)

    def _call(self, name: str, token: Token, opening: Token) -> Expr:
        if name not in FUNCTIONS:
            raise ExprParseError(f"Unknown function '{name}'", token.offset)
        args = [self.expr()]
        while self._accept(',') is not None:
            args.append(self.expr())
        self._expect(')', opening)
        if len(args) != FUNCTIONS[name]:
            raise ExprParseError(
                f"Function '{name}' takes {FUNCTIONS[name]} argument(s), got {len(args)}", token.offset)
        return self._checked(Call(name, args, token.offset))


def parse(source: str, variables=VARIABLES) -> Expr:
    """
    Parse source text into a syntax tree

    Args:
        source: Expression text
        variables: Names allowed as variables

    Returns:
        Root node of the tree
    """
    return Parser(source, variables).parse()


def to_source(node: Expr) -> str:
    """Fully parenthesized text that parses back to an equivalent tree"""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, (Variable, Constant)):
        return node.name
    if isinstance(node, Unary):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Binary):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Chain):
        parts = [to_source(node.first)] + [f"{op} {to_source(operand)}" for op, operand in node.rest]
        return f"({' '.join(parts)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"Unknown node type {type(node).__name__}")


def variables(node: Expr) -> Set[str]:
    """Variable names occurring in the tree"""
    if isinstance(node, Variable):
        return {node.name}
    if isinstance(node, Unary):
        return variables(node.operand)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Chain):
        return variables(node.first).union(*(variables(operand) for _, operand in node.rest))
    if isinstance(node, Call):
        return set().union(*(variables(a) for a in node.args))
    return set()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class EvalContext:
    """Values of t, x, dax and dx; scalars or numpy arrays of a common shape"""

    def __init__(self, t=0.0, x=0.0, dax=0.0, dx=0.0):
        self.t = t
        self.x = x
        self.dax = dax
        self.dx = dx

    def lookup(self, name: str):
        return getattr(self, name)


def _any(mask) -> bool:
    return bool(np.any(mask))


def _apply(node: Call, name: str, args: list):
    if name == 'gamma':
        try:
            return gamma_array(args[0])
        except DomainError as e:
            raise ExprEvalError(str(e), to_source(node)) from e
    if name == 'sqrt':
        if _any(np.asarray(args[0]) < 0):
            raise ExprEvalError("sqrt of a negative number", to_source(node))
        return np.sqrt(args[0])
    if name == 'exp':
        return np.exp(args[0])
    if name == 'log':
        if _any(np.asarray(args[0]) <= 0):
            raise ExprEvalError("log of a non-positive number", to_source(node))
        return np.log(args[0])
    if name == 'sin':
        return np.sin(args[0])
    if name == 'cos':
        return np.cos(args[0])
    if name == 'abs':
        return np.abs(args[0])
    return _power(node, args[0], args[1])


def _power(node: Expr, base, exponent):
    base = np.asarray(base, dtype=float)
    exponent = np.asarray(exponent, dtype=float)
    if _any((base < 0) & (exponent != np.floor(exponent))):
        raise ExprEvalError("negative base with non-integer exponent", to_source(node))
    if _any((base == 0) & (exponent < 0)):
        raise ExprEvalError("zero raised to a negative power", to_source(node))
    return np.power(base, exponent)


def _combine(node: Expr, op: str, left, right):
    if op == '+':
        return left + right
    if op == '-':
        return left - right
    if op == '*':
        return left * right
    if op == '/':
        if _any(right == 0):
            raise ExprEvalError("division by zero", to_source(node))
        return left / right
    return _power(node, left, right)


def _evaluate(node: Expr, ctx: EvalContext):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Variable):
        return ctx.lookup(node.name)
    if isinstance(node, Constant):
        return CONSTANTS[node.name]
    if isinstance(node, Unary):
        return -np.asarray(_evaluate(node.operand, ctx), dtype=float)
    if isinstance(node, Chain):
        value = np.asarray(_evaluate(node.first, ctx), dtype=float)
        for op, operand in node.rest:
            value = _combine(node, op, value, np.asarray(_evaluate(operand, ctx), dtype=float))
        return value
    if isinstance(node, Binary):
        left = np.asarray(_evaluate(node.left, ctx), dtype=float)
        right = np.asarray(_evaluate(node.right, ctx), dtype=float)
        return _combine(node, node.op, left, right)
    if isinstance(node, Call):
        return _apply(node, node.name, [_evaluate(a, ctx) for a in node.args])
    raise TypeError(f"Unknown node type {type(node).__name__}")


def evaluate(node: Expr, ctx: Union[EvalContext, Dict, None] = None):
    """
    Evaluate a tree; array-valued contexts evaluate elementwise

    Args:
        node: Parsed expression
        ctx: EvalContext or dict of variable values

    Returns:
        float for scalar contexts, numpy array otherwise
    """
    if ctx is None:
        ctx = EvalContext()
    elif isinstance(ctx, dict):
        ctx = EvalContext(**ctx)
    with np.errstate(all='ignore'):
        value = np.asarray(_evaluate(node, ctx), dtype=float)
    return float(value) if value.ndim == 0 else value


# ---------------------------------------------------------------------------
# Bridges to the problem model
# ---------------------------------------------------------------------------

def _central_partial(func: Callable, args: list, index: int):
    v = np.asarray(args[index], dtype=float)
    step = 1e-6 * np.maximum(1.0, np.abs(v))
    plus = list(args)
    minus = list(args)
    plus[index] = v + step
    minus[index] = v - step
    return (np.asarray(func(*plus)) - np.asarray(func(*minus))) / (2.0 * step)


def to_lagrangian(source: str) -> Lagrangian:
    """
    Lagrangian from expression text in t, x, dax, dx with central-difference partials

    Args:
        source: Expression text, e.g. "(dax - 2/gamma(2.5)*t^1.5)^2"

    Returns:
        Lagrangian; uses_xdot is set when dx occurs in the expression
    """
    tree = parse(source)
    uses_xdot = 'dx' in variables(tree)

    def func(t, x, dax, xdot):
        return evaluate(tree, EvalContext(t=t, x=x, dax=dax, dx=xdot))

    return Lagrangian(
        func=func,
        d_x=lambda t, x, dax, xdot: _central_partial(func, [t, x, dax, xdot], 1),
        d_dax=lambda t, x, dax, xdot: _central_partial(func, [t, x, dax, xdot], 2),
        d_xdot=lambda t, x, dax, xdot: _central_partial(func, [t, x, dax, xdot], 3),
        uses_xdot=uses_xdot,
        source=source
    )


def to_function(source: str, variable: str = 't') -> Callable:
    """Single-variable function from expression text, broadcast to its argument's shape"""
    tree = parse(source, variables=(variable,))

    def func(value):
        value = np.asarray(value, dtype=float)
        result = evaluate(tree, EvalContext(**{variable: value}))
        out = np.broadcast_to(np.asarray(result, dtype=float), value.shape).astype(float)
        return float(out) if out.ndim == 0 else out

    func.source = source
    return func
