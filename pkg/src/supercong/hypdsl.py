"""A small expression language for hypergeometric summands.

Grammar (whitespace-insensitive, ``*`` never implicit)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := integer | name | "(" expr ")"
            | "poch" "(" rational "," expr ")" | "fact" "(" expr ")"
    rational := ["-"] integer ["/" integer]

Example, the summand of the degree-3 series for 16/pi::

    poch(1/2,n)^3 / fact(n)^3 * (42*n+5) / 64^n
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .combinat import rising
from .errors import PoleError
from .exact import PadicScaled, padic_encode

KEYWORDS = frozenset({"poch", "fact"})


class ParseError(Exception):
    def __init__(self, message: str, offset: int, src: str, expected: str = ""):
        self.message = message
        self.offset = offset
        self.line = src.count("\n", 0, offset) + 1
        self.column = offset - (src.rfind("\n", 0, offset) + 1) + 1
        self.expected = expected
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"line {self.line}, column {self.column}"
        tail = f" (expected {self.expected})" if self.expected else ""
        return f"{where}: {self.message}{tail}"


class EvalError(ValueError):
    """Evaluation failed: unbound variable, fractional exponent or index."""


# ----------------------------------------------------------------- AST nodes


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
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
class Pow:
    base: "Node"
    exponent: "Node"


@dataclass(frozen=True)
class Poch:
    base: Fraction
    index: "Node"


@dataclass(frozen=True)
class Fact:
    arg: "Node"


Node = Union[Int, Var, Neg, BinOp, Pow, Poch, Fact]


@dataclass(frozen=True)
class SummandAst:
    root: Node
    variables: tuple[str, ...]
    source: str = field(default="", compare=False)

    def free_variables(self) -> set[str]:
        return _free_vars(self.root)

    def __str__(self) -> str:
        return unparse(self.root)


def _free_vars(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Int):
        return set()
    if isinstance(node, Neg):
        return _free_vars(node.operand)
    if isinstance(node, BinOp):
        return _free_vars(node.left) | _free_vars(node.right)
    if isinstance(node, Pow):
        return _free_vars(node.base) | _free_vars(node.exponent)
    if isinstance(node, Poch):
        return _free_vars(node.index)
    return _free_vars(node.arg)


# ------------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class _Token:
    kind: str  # "int", "name", "op", "eof"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            tokens.append(_Token("eof", "", pos))
            return tokens
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()


# ------------------------------------------------------------------ parser


class _Parser:
    def __init__(self, src: str, variables: Iterable[str]):
        self.src = src
        self.variables = frozenset(variables)
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, expected: str = "") -> ParseError:
        return ParseError(message, self.tok.offset, self.src, expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", repr(text))

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}", "operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.factor())
        return base

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise self.error(f"unexpected {self.tok.text or 'end of input'!r}", "integer")
        value = int(self.tok.text)
        self.i += 1
        return value

    def rational(self) -> Fraction:
        sign = -1 if self.accept("-") else 1
        num = self.integer()
        den = 1
        if self.accept("/"):
            at = self.tok
            den = self.integer()
            if den == 0:
                raise ParseError("zero denominator", at.offset, self.src)
        return sign * Fraction(num, den)

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Int(int(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in KEYWORDS:
                self.expect("(")
                if tok.text == "poch":
                    base = self.rational()
                    self.expect(",")
                    node: Node = Poch(base, self.expr())
                else:
                    node = Fact(self.expr())
                self.expect(")")
                return node
            if tok.text not in self.variables:
                declared = ", ".join(sorted(self.variables)) or "none"
                raise ParseError(
                    f"unknown variable {tok.text!r}", tok.offset, self.src,
                    f"one of: {declared}",
                )
            return Var(tok.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}", "integer, variable, '(' , poch or fact")


def parse(src: str, variables: Iterable[str]) -> SummandAst:
    variables = tuple(variables)
    for name in variables:
        if name in KEYWORDS:
            raise ValueError(f"{name!r} is reserved")
    return SummandAst(_Parser(src, variables).parse(), variables, src)


# ------------------------------------------------------------ pretty-print

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def unparse(node: Node, parent: int = 0) -> str:
    """Render with minimal parentheses; reparses to an identical tree."""
    if isinstance(node, Int):
        return str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Poch):
        return f"poch({_fmt_rational(node.base)}, {unparse(node.index)})"
    if isinstance(node, Fact):
        return f"fact({unparse(node.arg)})"
    if isinstance(node, Neg):
        text, prec = f"-{unparse(node.operand, 3)}", 3
    elif isinstance(node, Pow):
        text, prec = f"{unparse(node.base, 5)}^{unparse(node.exponent, 3)}", 4
    else:
        prec = _PREC[node.op]
        text = f"{unparse(node.left, prec)} {node.op} {unparse(node.right, prec + 1)}"
    return f"({text})" if prec < parent else text


# -------------------------------------------------------------- evaluation

Binding = Union[int, Fraction, PadicScaled]


def _as_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise EvalError(f"non-integer {what}: {value}")
    return value.numerator


class Evaluator:
    """Evaluates ASTs exactly, or p-adically when ``p`` is given.

    Pochhammer values are memoized per instance so that evaluating a summand
    at consecutive indices costs one multiplication per symbol.
    """

    def __init__(self, p: int | None = None, prec: int | None = None):
        if (p is None) != (prec is None):
            raise ValueError("p and prec go together")
        self.p = p
        self.prec = prec
        self._poch: dict[tuple[Fraction, int], object] = {}

    @property
    def padic(self) -> bool:
        return self.p is not None

    def lift(self, q: Fraction | int):
        q = Fraction(q)
        return padic_encode(q, self.p, self.prec) if self.padic else q

    def evaluate(self, node: Node, env: Mapping[str, Binding]):
        if isinstance(node, Int):
            return self.lift(node.value)
        if isinstance(node, Var):
            try:
                value = env[node.name]
            except KeyError:
                raise EvalError(f"variable {node.name!r} is unbound") from None
            if isinstance(value, PadicScaled):
                if not self.padic:
                    raise EvalError(f"p-adic binding for {node.name!r} in exact mode")
                return value
            return self.lift(value)
        if isinstance(node, Neg):
            return -self.evaluate(node.operand, env)
        if isinstance(node, BinOp):
            a = self.evaluate(node.left, env)
            b = self.evaluate(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if not self.padic and b == 0:
                raise ZeroDivisionError("division by zero")
            return a / b
        if isinstance(node, Pow):
            e = _as_int(eval_exact(node.exponent, env), "exponent")
            base = self.evaluate(node.base, env)
            if not self.padic and base == 0 and e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return base**e
        if isinstance(node, Poch):
            m = _as_int(eval_exact(node.index, env), "Pochhammer index")
            return self._rising(node.base, m)
        m = _as_int(eval_exact(node.arg, env), "factorial argument")
        return self._rising(Fraction(1), m)

    def _rising(self, a: Fraction, m: int):
        key = (a, m)
        cached = self._poch.get(key)
        if cached is not None:
            return cached
        if m > 0 and (a, m - 1) in self._poch:
            value = self._poch[(a, m - 1)] * self.lift(a + m - 1)
        elif m < 0 and (a, m + 1) in self._poch:
            factor = a + m  # (a)_{m} = (a)_{m+1} / (a + m)
            if factor == 0:
                raise PoleError(f"({a})_{m} has a vanishing factor")
            value = self._poch[(a, m + 1)] / self.lift(factor)
        elif self.padic:
            value = self._rising_padic(a, m)
        else:
            value = rising(a, m)
        self._poch[key] = value
        return value

    def _rising_padic(self, a: Fraction, m: int) -> PadicScaled:
        if m >= 0:
            exact = [a + j for j in range(m)]
            if any(f == 0 for f in exact):
                return PadicScaled.zero(self.p, self.prec)
            out = self.lift(1)
            for f in exact:
                out = out * self.lift(f)
            return out
        out = self.lift(1)
        for k in range(1, -m + 1):
            if a - k == 0:
                raise PoleError(f"({a})_{m} has a vanishing factor")
            out = out * self.lift(a - k)
        return out ** -1


def _root(ast: SummandAst | Node) -> Node:
    return ast.root if isinstance(ast, SummandAst) else ast


def eval_exact(ast: SummandAst | Node, bindings: Mapping[str, int | Fraction]) -> Fraction:
    return Evaluator().evaluate(_root(ast), bindings)


def eval_padic(
    ast: SummandAst | Node, bindings: Mapping[str, Binding], p: int, prec: int
) -> PadicScaled:
    return Evaluator(p, prec).evaluate(_root(ast), bindings)


def sum_series(
    ast: SummandAst | Node,
    var: str,
    N: int,
    *,
    p: int | None = None,
    prec: int | None = None,
    bindings: Mapping[str, Binding] | None = None,
):
    """``sum_{var=0}^{N}`` of the summand, exact unless ``p``/``prec`` are given."""
    ev = Evaluator(p, prec)
    root = _root(ast)
    env = dict(bindings or {})
    total = ev.lift(0)
    for i in range(N + 1):
        env[var] = i
        total = total + ev.evaluate(root, env)
    return total


# ------------------------------------------------------------ series files

SUMMAND_VARS = ("n",)
RHS_VARS = ("p", "r", "prev")
INDEX_VARS = ("p", "r")
DEFAULT_TERMS = "(p^r-1)/2"


@dataclass(frozen=True)
class SeriesBlock:
    """A user-defined congruence ``S(terms(p,r)) == rhs (mod p^modexp)``.

    ``prev`` in the right-hand side is bound to ``S(terms(p, r-1))``.
    """

    name: str
    summand: SummandAst
    rhs: SummandAst
    modexp: SummandAst
    terms: SummandAst

    @property
    def uses_prev(self) -> bool:
        return "prev" in self.rhs.free_variables()


_FIELDS = {
    "summand": SUMMAND_VARS,
    "rhs": RHS_VARS,
    "modexp": INDEX_VARS,
    "terms": INDEX_VARS,
}


def parse_series_file(text: str) -> list[SeriesBlock]:
    """Parse blank-line separated blocks of ``key=value`` lines."""
    blocks: list[SeriesBlock] = []
    current: dict[str, object] = {}
    block_start = 0

    def finish() -> None:
        if not current:
            return
        missing = [k for k in ("name", "summand", "rhs", "modexp") if k not in current]
        if missing:
            raise ParseError(f"block is missing {', '.join(missing)}", block_start, text)
        if "terms" not in current:
            current["terms"] = parse(DEFAULT_TERMS, INDEX_VARS)
        blocks.append(SeriesBlock(**current))
        current.clear()

    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        line_offset = offset
        offset += len(raw)
        if not stripped:
            finish()
            continue
        if stripped.startswith("#"):
            continue
        if not current:
            block_start = line_offset
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ParseError("expected key=value", line_offset, text)
        if key in current:
            raise ParseError(f"duplicate key {key!r}", line_offset, text)
        value_offset = line_offset + len(line) - len(line.split("=", 1)[1])
        if key == "name":
            if not value.strip():
                raise ParseError("empty name", value_offset, text)
            current["name"] = value.strip()
        elif key in _FIELDS:
            try:
                current[key] = parse(value, _FIELDS[key])
            except ParseError as err:
                raise ParseError(err.message, value_offset + err.offset, text, err.expected) from None
        else:
            raise ParseError(f"unknown key {key!r}", line_offset, text,
                             "name, summand, rhs, modexp or terms")
    finish()
    return blocks
