"""Expression DSL for metric components, vector fields and ODE coefficients.

Grammar (whitespace insignificant, no implicit multiplication)::

    expr  := term { ("+" | "-") term }
    term  := factor { ("*" | "/") factor }
    factor:= ["-"] power
    power := atom ["^" factor]
    atom  := NUMBER | IDENT | IDENT "(" expr { "," expr } ")" | "(" expr ")"

Evaluation is generic over the scalar type: plain floats go through ``math``,
anything else (``Dual2``) must provide methods named like the DSL functions.
"""
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DimensionError, DomainError, ExprSyntaxError, UnknownIdentifier

ParamEnv = Dict[str, float]

FUNCTIONS: Tuple[str, ...] = (
    "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "abs", "sqrt",
)
CONSTANTS: Dict[str, float] = {"pi": math.pi}
DEFAULT_COORDS: Tuple[str, ...] = ("x", "y", "z")


class Token:
    NUMBER = "NUMBER"
    IDENT = "IDENT"
    OP = "OP"
    LPAREN = "LPAREN"
    RPAREN = "RPAREN"
    COMMA = "COMMA"
    EOF = "EOF"

    def __init__(self, typ: str, text: str, pos: int):
        self.typ = typ
        self.text = text
        self.pos = pos

    def __repr__(self) -> str:
        return f"({self.typ}, {self.text!r}, {self.pos})"


_NUMBER_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_SINGLE = {"+": Token.OP, "-": Token.OP, "*": Token.OP, "/": Token.OP, "^": Token.OP,
           "(": Token.LPAREN, ")": Token.RPAREN, ",": Token.COMMA}


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        char = source[pos]
        if char.isspace():
            pos += 1
            continue
        if char in _SINGLE:
            tokens.append(Token(_SINGLE[char], char, pos))
            pos += 1
            continue
        match = _NUMBER_RE.match(source, pos)
        if match:
            if not math.isfinite(float(match.group(0))):
                raise ExprSyntaxError(f"Literal {match.group(0)!r} is not a finite number", pos, source)
            tokens.append(Token(Token.NUMBER, match.group(0), pos))
            pos = match.end()
            continue
        match = _IDENT_RE.match(source, pos)
        if match:
            tokens.append(Token(Token.IDENT, match.group(0), pos))
            pos = match.end()
            continue
        raise ExprSyntaxError(f"Unexpected character {char!r}", pos, source)
    tokens.append(Token(Token.EOF, "", len(source)))
    return tokens


# AST. Num values are non-negative; a negative literal is Neg(Num).

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Node", ...]


Node = Union[Num, Name, Neg, BinOp, Call]


@dataclass(frozen=True)
class ScalarExpr:
    ast: Node
    source: str

    def names(self) -> frozenset:
        return free_names(self.ast)

    def __str__(self) -> str:
        return to_source(self.ast)


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.current = 0

    def next(self) -> Token:
        return self.tokens[self.current]

    def advance(self) -> Token:
        tok = self.tokens[self.current]
        if tok.typ != Token.EOF:
            self.current += 1
        return tok

    def check(self, typ: str, text: Optional[str] = None) -> bool:
        tok = self.next()
        return tok.typ == typ and (text is None or tok.text == text)

    def match(self, typ: str, *texts: str) -> Optional[Token]:
        tok = self.next()
        if tok.typ == typ and (not texts or tok.text in texts):
            return self.advance()
        return None

    def expect(self, typ: str, what: str) -> Token:
        tok = self.match(typ)
        if tok is None:
            raise self.error(f"Expected {what}")
        return tok

    def error(self, message: str) -> ExprSyntaxError:
        tok = self.next()
        found = "end of input" if tok.typ == Token.EOF else repr(tok.text)
        return ExprSyntaxError(f"{message}, found {found}", tok.pos, self.source)

    def parse(self) -> Node:
        node = self.expression()
        if not self.check(Token.EOF):
            raise self.error("Unexpected token")
        return node

    def expression(self) -> Node:
        node = self.term()
        while True:
            tok = self.match(Token.OP, "+", "-")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.term())

    def term(self) -> Node:
        node = self.factor()
        while True:
            tok = self.match(Token.OP, "*", "/")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.factor())

    def factor(self) -> Node:
        if self.match(Token.OP, "-"):
            return Neg(self.power())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.match(Token.OP, "^"):
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        tok = self.next()
        if tok.typ == Token.NUMBER:
            self.advance()
            return Num(float(tok.text))
        if tok.typ == Token.IDENT:
            self.advance()
            if not self.match(Token.LPAREN):
                return Name(tok.text)
            if tok.text not in FUNCTIONS:
                raise ExprSyntaxError(f"Unknown function '{tok.text}'", tok.pos, self.source)
            args = [self.expression()]
            while self.match(Token.COMMA):
                args.append(self.expression())
            self.expect(Token.RPAREN, "')'")
            if len(args) != 1:
                raise ExprSyntaxError(f"Function '{tok.text}' takes 1 argument, got {len(args)}", tok.pos, self.source)
            return Call(tok.text, tuple(args))
        if tok.typ == Token.LPAREN:
            self.advance()
            node = self.expression()
            self.expect(Token.RPAREN, "')'")
            return node
        raise self.error("Expected number, identifier or '('")


@lru_cache(maxsize=8192)
def _parse_source(source: str) -> ScalarExpr:
    return ScalarExpr(Parser(source).parse(), source)


def parse(source: str, known: Optional[Iterable[str]] = None) -> ScalarExpr:
    expr = _parse_source(source)
    if known is not None:
        validate(expr, known)
    return expr


def free_names(node: Node) -> frozenset:
    if isinstance(node, Name):
        return frozenset() if node.name in CONSTANTS else frozenset([node.name])
    if isinstance(node, Num):
        return frozenset()
    if isinstance(node, Neg):
        return free_names(node.operand)
    if isinstance(node, BinOp):
        return free_names(node.left) | free_names(node.right)
    result: frozenset = frozenset()
    for arg in node.args:
        result |= free_names(arg)
    return result


def validate(expr: ScalarExpr, known: Iterable[str]) -> None:
    known_set = set(known)
    for name in sorted(expr.names()):
        if name not in known_set:
            raise UnknownIdentifier(name, sorted(known_set))


def to_source(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)}{node.op}{to_source(node.right)})"
    return f"{node.func}({', '.join(to_source(a) for a in node.args)})"


def _float_pow(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0:
        raise DomainError("0 raised to a negative power")
    if base < 0 and not float(exponent).is_integer():
        raise DomainError(f"Negative base {base} with non-integer exponent {exponent}")
    try:
        return math.pow(base, exponent)
    except OverflowError as e:
        raise DomainError(f"Overflow in {base}^{exponent}") from e


def _float_ln(value: float) -> float:
    if value <= 0:
        raise DomainError(f"ln of non-positive value {value}")
    return math.log(value)


def _float_sqrt(value: float) -> float:
    if value < 0:
        raise DomainError(f"sqrt of negative value {value}")
    return math.sqrt(value)


def _float_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError as e:
        raise DomainError(f"exp overflow at {value}") from e


def _float_cosh(value: float) -> float:
    try:
        return math.cosh(value)
    except OverflowError as e:
        raise DomainError(f"cosh overflow at {value}") from e


def _float_sinh(value: float) -> float:
    try:
        return math.sinh(value)
    except OverflowError as e:
        raise DomainError(f"sinh overflow at {value}") from e


_FLOAT_FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": _float_sinh,
    "cosh": _float_cosh,
    "tanh": math.tanh,
    "exp": _float_exp,
    "ln": _float_ln,
    "abs": abs,
    "sqrt": _float_sqrt,
}


def _is_plain(value: Any) -> bool:
    return isinstance(value, (int, float))


def _apply(func: str, value: Any) -> Any:
    if _is_plain(value):
        return _FLOAT_FUNCTIONS[func](float(value))
    return getattr(value, func)()


def _power(base: Any, exponent: Any) -> Any:
    if _is_plain(base) and _is_plain(exponent):
        return _float_pow(float(base), float(exponent))
    if _is_plain(exponent):
        return base.pow(float(exponent))
    if _is_plain(base):
        if base <= 0:
            raise DomainError(f"Non-positive base {base} with a varying exponent")
        return (exponent * math.log(base)).exp()
    return (exponent * base.ln()).exp()


def _divide(left: Any, right: Any) -> Any:
    if _is_plain(right) and right == 0:
        raise DomainError("Division by zero")
    return left / right


def _eval(node: Node, env: Mapping[str, Any]) -> Any:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        if node.name in env:
            return env[node.name]
        if node.name in CONSTANTS:
            return CONSTANTS[node.name]
        raise UnknownIdentifier(node.name, sorted(env))
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        left = _eval(node.left, env)
        right = _eval(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return _divide(left, right)
        return _power(left, right)
    return _apply(node.func, _eval(node.args[0], env))


def make_env(
    coords: Union[Mapping[str, Any], Sequence[Any]],
    params: Optional[Mapping[str, float]] = None,
    names: Optional[Sequence[str]] = None,
) -> Dict[str, Any]:
    env: Dict[str, Any] = dict(params or {})
    if isinstance(coords, Mapping):
        env.update(coords)
    else:
        coord_names = names if names is not None else DEFAULT_COORDS[: len(coords)]
        if len(coord_names) != len(coords):
            raise DimensionError(f"{len(coords)} coordinates given for names {list(coord_names)}")
        env.update(zip(coord_names, coords))
    return env


def evaluate(
    e: Union[ScalarExpr, str],
    coords: Union[Mapping[str, Any], Sequence[Any]],
    params: Optional[Mapping[str, float]] = None,
    names: Optional[Sequence[str]] = None,
) -> Any:
    expr = parse(e) if isinstance(e, str) else e
    try:
        return _eval(expr.ast, make_env(coords, params, names))
    except ZeroDivisionError as e:
        raise DomainError(f"Division by zero in '{expr.source}'") from e


def evaluate_env(e: ScalarExpr, env: Mapping[str, Any]) -> Any:
    try:
        return _eval(e.ast, env)
    except ZeroDivisionError as exc:
        raise DomainError(f"Division by zero in '{e.source}'") from exc


def substitute(e: ScalarExpr, replacements: Mapping[str, Union[ScalarExpr, str]]) -> ScalarExpr:
    """Replace free names by expressions; the result carries its own printed source."""
    nodes = {name: (parse(r) if isinstance(r, str) else r).ast for name, r in replacements.items()}

    def walk(node: Node) -> Node:
        if isinstance(node, Name):
            return nodes.get(node.name, node)
        if isinstance(node, Neg):
            return Neg(walk(node.operand))
        if isinstance(node, BinOp):
            return BinOp(node.op, walk(node.left), walk(node.right))
        if isinstance(node, Call):
            return Call(node.func, tuple(walk(a) for a in node.args))
        return node

    ast = walk(e.ast)
    return ScalarExpr(ast, to_source(ast))
