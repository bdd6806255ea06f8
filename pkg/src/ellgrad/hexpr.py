"""Scalar nonlinearity expressions: parse, print, differentiate, evaluate.

The nonlinearity ``h(s)`` driving the equation is supplied as text obeying
the grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? power
    power  := atom ('^' '-'? number)?
    atom   := number | 's' | 'pi' | ident | func '(' expr ')' | '(' expr ')'
    func   := 'exp' | 'ln' | 'sin' | 'cos' | 'arctan'

``s`` is the evaluation variable. Any other identifier is a named parameter
whose value is bound at evaluation time, so one parsed expression serves a
whole parameter sweep. Exponents must be numeric literals (an optional
leading minus is accepted so printed derivatives re-parse); this keeps
symbolic differentiation closed-form on the grammar.

Expressions are immutable after construction and safe to share across
threads. Printing emits a fully parenthesized canonical form, and
``parse(to_text(e))`` returns a structurally identical tree. Construction
goes through smart constructors that fold constant subtrees and drop
trivial identities (``x*1``, ``x+0``, ...); no further simplification is
attempted, correctness wins over canonical form.

Absolute values are intentionally unsupported: ``|s|``-style nonlinearities
are not differentiable at 0 and fall outside the closed-form guarantee.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "Expression",
    "Num",
    "Const",
    "Var",
    "Param",
    "Neg",
    "BinOp",
    "Pow",
    "Fun",
    "ExprError",
    "ExprSyntaxError",
    "UnknownFunctionError",
    "NonLiteralExponentError",
    "EvalDomainError",
    "ParameterBindingError",
    "parse",
    "to_text",
    "differentiate",
    "evaluate",
    "parameters",
    "Program",
    "compile_program",
]

FUNCTIONS = ("exp", "ln", "sin", "cos", "arctan")


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFunctionError(ExprSyntaxError):
    pass


class NonLiteralExponentError(ExprSyntaxError):
    pass


class EvalDomainError(ExprError):
    """Evaluation left the real domain; ``s`` is the offending point."""

    def __init__(self, message: str, s: float):
        super().__init__(f"{message} (at s={s!r})")
        self.s = s


class ParameterBindingError(ExprError):
    """A named parameter has no bound value."""

    def __init__(self, names):
        names = sorted(names)
        super().__init__(f"unbound parameter(s): {', '.join(names)}")
        self.names = names


class Expression:
    """Base node. Concrete nodes are frozen dataclasses below."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    @property
    def params(self) -> frozenset:
        return parameters(self)


@dataclass(frozen=True)
class Num(Expression):
    value: float


@dataclass(frozen=True)
class Const(Expression):
    name: str  # only "pi"


@dataclass(frozen=True)
class Var(Expression):
    pass


@dataclass(frozen=True)
class Param(Expression):
    name: str


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True)
class BinOp(Expression):
    op: str  # one of + - * /
    a: Expression
    b: Expression


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: float


@dataclass(frozen=True)
class Fun(Expression):
    name: str
    arg: Expression


_ZERO = Num(0.0)
_ONE = Num(1.0)


def _is_num(e, v=None):
    return isinstance(e, Num) and (v is None or e.value == v)


# Smart constructors: constant folding plus identity elimination. Folding
# is skipped whenever the folded value would be non-finite so that domain
# errors surface at evaluation, not parse, time.


def add(a: Expression, b: Expression) -> Expression:
    if _is_num(a) and _is_num(b):
        v = a.value + b.value
        if math.isfinite(v):
            return Num(v)
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Expression, b: Expression) -> Expression:
    if _is_num(a) and _is_num(b):
        v = a.value - b.value
        if math.isfinite(v):
            return Num(v)
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expression, b: Expression) -> Expression:
    if _is_num(a) and _is_num(b):
        v = a.value * b.value
        if math.isfinite(v):
            return Num(v)
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return _ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def div(a: Expression, b: Expression) -> Expression:
    if _is_num(a) and _is_num(b) and b.value != 0.0:
        v = a.value / b.value
        if math.isfinite(v):
            return Num(v)
    if _is_num(a, 0.0) and not _is_num(b, 0.0):
        return _ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def neg(a: Expression) -> Expression:
    if _is_num(a):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def pow_(base: Expression, exponent: float) -> Expression:
    exponent = float(exponent)
    if exponent == 1.0:
        return base
    if exponent == 0.0:
        return _ONE
    if _is_num(base):
        try:
            v = math.pow(base.value, exponent)
        except (ValueError, OverflowError):
            v = math.inf
        if math.isfinite(v):
            return Num(v)
    return Pow(base, exponent)


def fun(name: str, arg: Expression) -> Expression:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    return Fun(name, arg)


# --- parsing ---------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.kind = None
        self.value = None
        self.offset = 0
        self.advance()

    def advance(self):
        text = self.text
        n = len(text)
        pos = self.pos
        while pos < n and text[pos].isspace():
            pos += 1
        self.offset = pos
        if pos >= n:
            self.kind, self.value, self.pos = "end", "", pos
            return
        m = _NUMBER_RE.match(text, pos)
        if m:
            self.kind, self.value, self.pos = "number", m.group(), m.end()
            return
        m = _IDENT_RE.match(text, pos)
        if m:
            self.kind, self.value, self.pos = "ident", m.group(), m.end()
            return
        ch = text[pos]
        if ch in "+-*/^()":
            self.kind, self.value, self.pos = ch, ch, pos + 1
            return
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos)


def parse(text: str) -> Expression:
    """Parse expression text; raises :class:`ExprSyntaxError` with offset."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    tok = _Tokens(text)
    e = _parse_expr(tok)
    if tok.kind != "end":
        raise ExprSyntaxError(f"unexpected {tok.value!r}", tok.offset)
    return e


def _parse_expr(tok: _Tokens) -> Expression:
    e = _parse_term(tok)
    while tok.kind in ("+", "-"):
        op = tok.kind
        tok.advance()
        rhs = _parse_term(tok)
        e = add(e, rhs) if op == "+" else sub(e, rhs)
    return e


def _parse_term(tok: _Tokens) -> Expression:
    e = _parse_factor(tok)
    while tok.kind in ("*", "/"):
        op = tok.kind
        tok.advance()
        rhs = _parse_factor(tok)
        e = mul(e, rhs) if op == "*" else div(e, rhs)
    return e


def _parse_factor(tok: _Tokens) -> Expression:
    if tok.kind == "-":
        tok.advance()
        return neg(_parse_power(tok))
    return _parse_power(tok)


def _parse_power(tok: _Tokens) -> Expression:
    base = _parse_atom(tok)
    if tok.kind != "^":
        return base
    tok.advance()
    sign = 1.0
    if tok.kind == "-":
        sign = -1.0
        tok.advance()
    if tok.kind != "number":
        raise NonLiteralExponentError(
            "exponent must be a numeric literal", tok.offset
        )
    exponent = sign * float(tok.value)
    tok.advance()
    return pow_(base, exponent)


def _parse_atom(tok: _Tokens) -> Expression:
    if tok.kind == "number":
        v = float(tok.value)
        tok.advance()
        return Num(v)
    if tok.kind == "(":
        tok.advance()
        e = _parse_expr(tok)
        if tok.kind != ")":
            raise ExprSyntaxError("expected ')'", tok.offset)
        tok.advance()
        return e
    if tok.kind == "ident":
        name = tok.value
        off = tok.offset
        tok.advance()
        if tok.kind == "(":
            if name not in FUNCTIONS:
                raise UnknownFunctionError(f"unknown function {name!r}", off)
            tok.advance()
            e = _parse_expr(tok)
            if tok.kind != ")":
                raise ExprSyntaxError("expected ')'", tok.offset)
            tok.advance()
            return Fun(name, e)
        if name == "s":
            return Var()
        if name == "pi":
            return Const("pi")
        return Param(name)
    raise ExprSyntaxError(f"unexpected {tok.value or 'end of input'!r}", tok.offset)


# --- printing ---------------------------------------------------------------


def to_text(e: Expression) -> str:
    """Canonical fully parenthesized rendering; round-trips through parse."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return "s"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.a)} {e.op} {to_text(e.b)})"
    if isinstance(e, Pow):
        base = to_text(e.base)
        # a bare negative literal would re-parse as -(x^c); parenthesize it
        if isinstance(e.base, Num) and math.copysign(1.0, e.base.value) < 0:
            base = f"({base})"
        return f"({base} ^ {repr(e.exponent)})"
    if isinstance(e, Fun):
        return f"{e.name}({to_text(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def parameters(e: Expression) -> frozenset:
    """Set of parameter names appearing in the tree."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Param):
            out.add(node.name)
        elif isinstance(node, Neg):
            stack.append(node.arg)
        elif isinstance(node, BinOp):
            stack.append(node.a)
            stack.append(node.b)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, Fun):
            stack.append(node.arg)
    return frozenset(out)


# --- differentiation --------------------------------------------------------


def differentiate(e: Expression) -> Expression:
    """Symbolic d/ds; parameters are treated as constants.

    Total on the grammar. The result is built through the smart
    constructors, so trivial factors are dropped but no deeper
    simplification happens.
    """
    if isinstance(e, (Num, Const, Param)):
        return _ZERO
    if isinstance(e, Var):
        return _ONE
    if isinstance(e, Neg):
        return neg(differentiate(e.arg))
    if isinstance(e, BinOp):
        da, db = differentiate(e.a), differentiate(e.b)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.b), mul(e.a, db))
        # quotient rule
        return div(sub(mul(da, e.b), mul(e.a, db)), mul(e.b, e.b))
    if isinstance(e, Pow):
        inner = differentiate(e.base)
        return mul(mul(Num(e.exponent), pow_(e.base, e.exponent - 1.0)), inner)
    if isinstance(e, Fun):
        inner = differentiate(e.arg)
        if e.name == "exp":
            return mul(Fun("exp", e.arg), inner)
        if e.name == "ln":
            return div(inner, e.arg)
        if e.name == "sin":
            return mul(Fun("cos", e.arg), inner)
        if e.name == "cos":
            return neg(mul(Fun("sin", e.arg), inner))
        # arctan
        return div(inner, add(_ONE, mul(e.arg, e.arg)))
    raise TypeError(f"not an expression node: {e!r}")


# --- evaluation ---------------------------------------------------------------


def evaluate(e: Expression, s: float, params: Mapping[str, float] | None = None) -> float:
    """Evaluate at ``s`` with parameters bound from ``params``.

    IEEE double semantics, except that leaving the real domain (log of a
    non-positive value, division by zero, fractional power of a negative
    base) raises :class:`EvalDomainError` carrying the offending ``s``.
    """
    missing = parameters(e) - set(params or ())
    if missing:
        raise ParameterBindingError(missing)
    env = params or {}
    return _eval(e, float(s), env)


def _eval(e: Expression, s: float, env) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return math.pi
    if isinstance(e, Var):
        return s
    if isinstance(e, Param):
        return float(env[e.name])
    if isinstance(e, Neg):
        return -_eval(e.arg, s, env)
    if isinstance(e, BinOp):
        a = _eval(e.a, s, env)
        b = _eval(e.b, s, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0.0:
            raise EvalDomainError("division by zero", s)
        return a / b
    if isinstance(e, Pow):
        x = _eval(e.base, s, env)
        if x == 0.0 and e.exponent < 0.0:
            raise EvalDomainError("zero raised to a negative power", s)
        try:
            return math.pow(x, e.exponent)
        except ValueError:
            raise EvalDomainError(
                "fractional power of a negative base", s
            ) from None
        except OverflowError:
            sign = -1.0 if (x < 0.0 and e.exponent % 2.0 == 1.0) else 1.0
            return sign * math.inf
    if isinstance(e, Fun):
        x = _eval(e.arg, s, env)
        if e.name == "exp":
            try:
                return math.exp(x)
            except OverflowError:
                return math.inf
        if e.name == "ln":
            if x <= 0.0:
                raise EvalDomainError("log of a non-positive value", s)
            return math.log(x)
        if e.name == "sin":
            return math.sin(x)
        if e.name == "cos":
            return math.cos(x)
        return math.atan(x)
    raise TypeError(f"not an expression node: {e!r}")


# --- compilation to the backend VM -------------------------------------------

# Opcodes of the little stack machine run by the backends. Kept in sync
# with ellgrad/_core.pyx by the cross-backend parity tests.
OP_CONST = 0
OP_S = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_POW = 7
OP_EXP = 8
OP_LN = 9
OP_SIN = 10
OP_COS = 11
OP_ATAN = 12

_FUN_OPS = {"exp": OP_EXP, "ln": OP_LN, "sin": OP_SIN, "cos": OP_COS, "arctan": OP_ATAN}


@dataclass(frozen=True)
class Program:
    """Postfix bytecode for one expression with parameters bound.

    ``codes``/``args`` are parallel arrays (``args`` holds the constant for
    OP_CONST and the exponent for OP_POW). ``py_codes``/``py_args`` are
    plain tuples for the pure scalar VM.
    """

    codes: np.ndarray
    args: np.ndarray
    stack_need: int
    text: str
    py_codes: tuple
    py_args: tuple


def compile_program(e: Expression, params: Mapping[str, float] | None = None) -> Program:
    """Flatten ``e`` to VM bytecode, binding every parameter to a float."""
    missing = parameters(e) - set(params or ())
    if missing:
        raise ParameterBindingError(missing)
    env = params or {}
    codes: list[int] = []
    args: list[float] = []

    def emit(node):
        if isinstance(node, Num):
            codes.append(OP_CONST)
            args.append(node.value)
        elif isinstance(node, Const):
            codes.append(OP_CONST)
            args.append(math.pi)
        elif isinstance(node, Param):
            codes.append(OP_CONST)
            args.append(float(env[node.name]))
        elif isinstance(node, Var):
            codes.append(OP_S)
            args.append(0.0)
        elif isinstance(node, Neg):
            emit(node.arg)
            codes.append(OP_NEG)
            args.append(0.0)
        elif isinstance(node, BinOp):
            emit(node.a)
            emit(node.b)
            codes.append({"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}[node.op])
            args.append(0.0)
        elif isinstance(node, Pow):
            emit(node.base)
            codes.append(OP_POW)
            args.append(node.exponent)
        elif isinstance(node, Fun):
            emit(node.arg)
            codes.append(_FUN_OPS[node.name])
            args.append(0.0)
        else:
            raise TypeError(f"not an expression node: {node!r}")

    emit(e)
    depth = 0
    peak = 0
    for op in codes:
        if op in (OP_CONST, OP_S):
            depth += 1
            peak = max(peak, depth)
        elif op in (OP_ADD, OP_SUB, OP_MUL, OP_DIV):
            depth -= 1
    return Program(
        codes=np.asarray(codes, dtype=np.intc),
        args=np.asarray(args, dtype=np.float64),
        stack_need=peak,
        text=to_text(e),
        py_codes=tuple(codes),
        py_args=tuple(args),
    )
