"""Scalar field expressions: parsing, exact differentiation, evaluation.

Grammar (whitespace-insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?
    atom    := number | identifier | identifier "(" expr ("," expr)* ")" | "(" expr ")"
    number  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]  |  "." digits ...

``^`` is right-associative and binds tighter than unary minus, so
``-x^2 == -(x^2)``.  ``pi`` is a built-in constant.  Functions: exp, log,
sin, cos, tan, sinh, cosh, tanh, cot, sqrt (one argument) and atan2(y, x).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ParseError

UNARY_FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sinh", "cosh", "tanh", "cot", "sqrt")
BINARY_FUNCTIONS = ("atan2",)
CONSTANTS = {"pi": math.pi}

_MATH = {
    "exp": math.exp, "log": math.log, "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh, "sqrt": math.sqrt,
    "atan2": math.atan2, "cot": lambda x: 1.0 / math.tan(x),
}


class Expr:
    """Immutable expression node."""

    __slots__ = ()

    # arithmetic builds simplified trees so derivatives stay small
    def __add__(self, other): return add(self, _lift(other))
    def __radd__(self, other): return add(_lift(other), self)
    def __sub__(self, other): return sub(self, _lift(other))
    def __rsub__(self, other): return sub(_lift(other), self)
    def __mul__(self, other): return mul(self, _lift(other))
    def __rmul__(self, other): return mul(_lift(other), self)
    def __truediv__(self, other): return div(self, _lift(other))
    def __rtruediv__(self, other): return div(_lift(other), self)
    def __pow__(self, other): return power(self, _lift(other))
    def __neg__(self): return neg(self)

    def diff(self, var: str) -> "Expr":
        raise NotImplementedError

    def evaluate(self, env: Mapping[str, float]) -> float:
        return compile_expr(self, tuple(sorted(self.free_symbols())))(
            *[env[n] for n in sorted(self.free_symbols())])

    def free_symbols(self) -> frozenset[str]:
        raise NotImplementedError

    def substitute(self, mapping: Mapping[str, "Expr | float"]) -> "Expr":
        raise NotImplementedError

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0.0


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def diff(self, var): return ZERO
    def free_symbols(self): return frozenset()
    def substitute(self, mapping): return self
    def __str__(self): return repr(self.value) if self.value >= 0 else f"({self.value!r})"


@dataclass(frozen=True)
class Sym(Expr):
    name: str

    def diff(self, var): return ONE if var == self.name else ZERO
    def free_symbols(self): return frozenset({self.name})

    def substitute(self, mapping):
        if self.name in mapping:
            return _lift(mapping[self.name])
        return self

    def __str__(self): return self.name


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    def diff(self, var): return add(self.a.diff(var), self.b.diff(var))
    def free_symbols(self): return self.a.free_symbols() | self.b.free_symbols()
    def substitute(self, m): return add(self.a.substitute(m), self.b.substitute(m))
    def __str__(self): return f"({self.a} + {self.b})"


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    def diff(self, var):
        return add(mul(self.a.diff(var), self.b), mul(self.a, self.b.diff(var)))

    def free_symbols(self): return self.a.free_symbols() | self.b.free_symbols()
    def substitute(self, m): return mul(self.a.substitute(m), self.b.substitute(m))
    def __str__(self): return f"{self.a} * {self.b}"


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr

    def diff(self, var):
        da, db = self.a.diff(var), self.b.diff(var)
        if db.is_zero():
            return div(da, self.b)
        return div(sub(mul(da, self.b), mul(self.a, db)), mul(self.b, self.b))

    def free_symbols(self): return self.a.free_symbols() | self.b.free_symbols()
    def substitute(self, m): return div(self.a.substitute(m), self.b.substitute(m))
    def __str__(self): return f"({self.a} / {self.b})"


@dataclass(frozen=True)
class Neg(Expr):
    a: Expr

    def diff(self, var): return neg(self.a.diff(var))
    def free_symbols(self): return self.a.free_symbols()
    def substitute(self, m): return neg(self.a.substitute(m))
    def __str__(self): return f"(-{self.a})"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr

    def diff(self, var):
        db = self.base.diff(var)
        if isinstance(self.exponent, Const):
            n = self.exponent.value
            return mul(mul(Const(n), power(self.base, Const(n - 1.0))), db)
        de = self.exponent.diff(var)
        inner = add(mul(de, call("log", self.base)), div(mul(self.exponent, db), self.base))
        return mul(self, inner)

    def free_symbols(self): return self.base.free_symbols() | self.exponent.free_symbols()
    def substitute(self, m): return power(self.base.substitute(m), self.exponent.substitute(m))
    def __str__(self): return f"({self.base})^({self.exponent})"


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple

    def free_symbols(self):
        out = frozenset()
        for a in self.args:
            out |= a.free_symbols()
        return out

    def substitute(self, m): return call(self.fn, *(a.substitute(m) for a in self.args))
    def __str__(self): return f"{self.fn}({', '.join(str(a) for a in self.args)})"

    def diff(self, var):
        if self.fn == "atan2":
            y, x = self.args
            num = sub(mul(x, y.diff(var)), mul(y, x.diff(var)))
            return div(num, add(mul(x, x), mul(y, y)))
        (a,) = self.args
        da = a.diff(var)
        if da.is_zero():
            return ZERO
        fn = self.fn
        if fn == "exp":
            outer = self
        elif fn == "log":
            return div(da, a)
        elif fn == "sin":
            outer = call("cos", a)
        elif fn == "cos":
            outer = neg(call("sin", a))
        elif fn == "tan":
            outer = add(ONE, mul(self, self))
        elif fn == "sinh":
            outer = call("cosh", a)
        elif fn == "cosh":
            outer = call("sinh", a)
        elif fn == "tanh":
            outer = sub(ONE, mul(self, self))
        elif fn == "cot":
            outer = neg(add(ONE, mul(self, self)))
        elif fn == "sqrt":
            return div(da, mul(Const(2.0), self))
        else:  # pragma: no cover - guarded by the parser
            raise ValueError(f"unknown function {fn}")
        return mul(outer, da)


ZERO = Const(0.0)
ONE = Const(1.0)


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)):
        return Const(float(x))
    if isinstance(x, str):
        return parse_field_expr(x)
    raise TypeError(f"cannot use {type(x).__name__} as an expression")


# --- simplifying constructors ----------------------------------------------


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if isinstance(b, Neg):
        return sub(a, b.a)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if b.is_zero():
        return a
    if a.is_zero():
        return neg(b)
    if a == b:
        return ZERO
    return Add(a, neg(b)) if not isinstance(b, Neg) else Add(a, b.a)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a.is_zero() or b.is_zero():
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if isinstance(a, Const) and a.value == -1.0:
        return neg(b)
    if isinstance(b, Const) and b.value == -1.0:
        return neg(a)
    if isinstance(a, Neg):
        return neg(mul(a.a, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.a))
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if b.is_zero():
        raise ZeroDivisionError("division by the constant 0")
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    if a.is_zero():
        return ZERO
    if b == ONE:
        return a
    return Div(a, b)


def power(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value ** b.value)
    if b.is_zero():
        return ONE
    if b == ONE:
        return a
    return Pow(a, b)


def call(fn: str, *args: Expr) -> Expr:
    if all(isinstance(a, Const) for a in args):
        return Const(float(_MATH[fn](*(a.value for a in args))))
    return Call(fn, tuple(args))


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_OPERAND = frozenset({"number", "identifier", "(", "-"})


@dataclass(frozen=True)
class _Token:
    kind: str  # number | identifier | op symbol | end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        if kind == "ident":
            kind = "identifier"
        elif kind == "op":
            kind = m.group("op")
        tokens.append(_Token(kind, m.group(m.lastgroup), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, n)))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _take(self, kind: str) -> _Token:
        if self.tok.kind != kind:
            self._fail({kind})
        t = self.tok
        self.i += 1
        return t

    def _fail(self, expected: Iterable[str]):
        t = self.tok
        what = "end of input" if t.kind == "end" else f"token {t.text!r}"
        raise ParseError(f"unexpected {what}", t.offset, frozenset(expected))

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail({"+", "-", "*", "/", "^", "end"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self._take(self.tok.kind).kind
            rhs = self.term()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self._take(self.tok.kind).kind
            rhs = self.unary()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "-":
            self.i += 1
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "^":
            self.i += 1
            return power(base, self.unary())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return Const(float(t.text))
        if t.kind == "(":
            self.i += 1
            node = self.expr()
            self._take(")")
            return node
        if t.kind == "identifier":
            self.i += 1
            if self.tok.kind == "(":
                return self.call(t)
            if t.text in CONSTANTS:
                return Const(CONSTANTS[t.text])
            return Sym(t.text)
        self._fail(_OPERAND)

    def call(self, name: _Token) -> Expr:
        if name.text not in UNARY_FUNCTIONS + BINARY_FUNCTIONS:
            raise ParseError(f"unknown function {name.text!r}", name.offset,
                             frozenset(UNARY_FUNCTIONS + BINARY_FUNCTIONS))
        self._take("(")
        args = [self.expr()]
        while self.tok.kind == ",":
            self.i += 1
            args.append(self.expr())
        self._take(")")
        arity = 2 if name.text in BINARY_FUNCTIONS else 1
        if len(args) != arity:
            raise ParseError(f"{name.text} takes {arity} argument(s), got {len(args)}", name.offset)
        return call(name.text, *args)


def parse_field_expr(text: str) -> Expr:
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text).parse()


def as_expr(x) -> Expr:
    """Accept an Expr, a number, or expression text."""
    return _lift(x)


# --- code generation ---------------------------------------------------------


def _codegen(node: Expr, names: Mapping[str, str]) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Sym):
        try:
            return names[node.name]
        except KeyError:
            raise NameError(f"unbound symbol {node.name!r}") from None
    if isinstance(node, Add):
        return f"({_codegen(node.a, names)} + {_codegen(node.b, names)})"
    if isinstance(node, Mul):
        return f"({_codegen(node.a, names)} * {_codegen(node.b, names)})"
    if isinstance(node, Div):
        return f"({_codegen(node.a, names)} / {_codegen(node.b, names)})"
    if isinstance(node, Neg):
        return f"(-{_codegen(node.a, names)})"
    if isinstance(node, Pow):
        if isinstance(node.exponent, Const) and node.exponent.value == 2.0:
            inner = _codegen(node.base, names)
            return f"({inner} * {inner})"
        return f"_pow({_codegen(node.base, names)}, {_codegen(node.exponent, names)})"
    if isinstance(node, Call):
        return f"_{node.fn}({', '.join(_codegen(a, names) for a in node.args)})"
    raise TypeError(node)


def _pow(a: float, b: float) -> float:
    out = a ** b
    if isinstance(out, complex):
        raise ValueError("negative base raised to a fractional power")
    return out


_NAMESPACE = {f"_{k}": v for k, v in _MATH.items()}
_NAMESPACE["_pow"] = _pow


def compile_many(exprs: Sequence[Expr], varnames: Sequence[str]) -> Callable[..., list]:
    """One Python function returning the values of all ``exprs`` as a list."""
    names = {v: f"_v{i}" for i, v in enumerate(varnames)}
    body = ", ".join(_codegen(e, names) for e in exprs)
    args = ", ".join(names[v] for v in varnames)
    src = f"def _f({args}):\n    return [{body}]\n"
    ns = dict(_NAMESPACE)
    exec(compile(src, "<field-expr>", "exec"), ns)
    return ns["_f"]


def compile_expr(expr: Expr, varnames: Sequence[str]) -> Callable[..., float]:
    f = compile_many([expr], varnames)
    return lambda *args: f(*args)[0]


# --- domain guards -----------------------------------------------------------

_GUARD = re.compile(r"^(.*?)(<=|>=|<|>)(.*)$")


@dataclass(frozen=True)
class Guard:
    """A strict or non-strict inequality ``lhs op rhs`` between expressions."""

    lhs: Expr
    op: str
    rhs: Expr
    text: str = ""

    def margin(self, env: Mapping[str, float]) -> float:
        """Signed distance into the allowed region (positive means inside)."""
        diff = self.lhs.evaluate(env) - self.rhs.evaluate(env)
        return diff if self.op in (">", ">=") else -diff

    def holds(self, env: Mapping[str, float]) -> bool:
        m = self.margin(env)
        return m > 0 if self.op in ("<", ">") else m >= 0

    def substitute(self, mapping) -> "Guard":
        return Guard(self.lhs.substitute(mapping), self.op, self.rhs.substitute(mapping), self.text)


def parse_guard(text: str) -> Guard:
    m = _GUARD.match(text)
    if not m:
        raise ParseError("domain guard needs one of <, <=, >, >=", 0, frozenset({"<", "<=", ">", ">="}))
    lhs, op, rhs = m.groups()
    try:
        right = parse_field_expr(rhs)
    except ParseError as exc:
        shift = len(text[: m.start(3)].encode("utf-8"))
        raise ParseError(str(exc).split(" at offset")[0], exc.offset + shift, exc.expected) from None
    return Guard(parse_field_expr(lhs), op, right, text.strip())
