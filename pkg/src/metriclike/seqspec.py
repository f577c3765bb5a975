"""Piecewise sequence documents: parsing, rendering and exact evaluation.

A document names a space and lists pieces, first match wins::

    space sum
    piece square -> k
    piece otherwise -> 2

Conditions are ``square`` (binds k = sqrt(n)), ``arith:a,b`` (the indices
b, b+a, b+2a, ...; binds k = (n - b) / a), ``finite:[n1,n2,...]`` and
``otherwise``.  Expressions use + - * /, parentheses, rational or decimal
literals, ``n``, ``k`` and tagged irrationals such as
``irr:sqrt2~1.414213562373``.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import OrderedDict
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from .arrays import RationalArray, ValueArray
from .density import All, Arith, Finite, IndexSet, Squares
from .points import PointValue, as_point, register_tag, tag_approximant
from .spaces import CarrierError, MetricLikeSpace, builtin_space

__all__ = [
    "SpecError",
    "SpecSyntaxError",
    "SpecSemanticError",
    "Num",
    "Var",
    "Irr",
    "BinOp",
    "Square",
    "ArithProgression",
    "FiniteIndices",
    "Otherwise",
    "Piece",
    "SequenceSpec",
    "SequenceBlock",
    "parse_spec",
    "parse_expression",
    "render_spec",
    "eval_at",
    "firing_piece",
    "evaluate_block",
    "derived_real_sequence",
    "derived_block",
    "builtin_spec",
    "BUILTIN_SPECS",
]


class SpecError(ValueError):
    pass


class SpecSyntaxError(SpecError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SpecSemanticError(SpecError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Irr:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Irr, BinOp]


def _variables(expr) -> set:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, BinOp):
        return _variables(expr.left) | _variables(expr.right)
    return set()


def _has_tags(expr) -> bool:
    if isinstance(expr, Irr):
        return True
    if isinstance(expr, BinOp):
        return _has_tags(expr.left) or _has_tags(expr.right)
    return False


def _apply(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    return a / b


def _evaluate(expr, n, k) -> PointValue:
    if isinstance(expr, Num):
        return PointValue(expr.value)
    if isinstance(expr, Var):
        value = n if expr.name == "n" else k
        if value is None:
            raise SpecSemanticError("k is unbound here")
        return PointValue(value)
    if isinstance(expr, Irr):
        return PointValue.tag(expr.name)
    return _apply(expr.op, _evaluate(expr.left, n, k), _evaluate(expr.right, n, k))


def _evaluate_bulk(expr, n: np.ndarray, k, size: int) -> ValueArray:
    if not _variables(expr):
        return ValueArray.full(_evaluate(expr, None, None), size)
    if isinstance(expr, Var):
        return ValueArray(RationalArray.from_ints(n if expr.name == "n" else k))
    left = _evaluate_bulk(expr.left, n, k, size)
    right = _evaluate_bulk(expr.right, n, k, size)
    return _apply(expr.op, left, right)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _render_num(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        text = format(Decimal(q.numerator) / Decimal(q.denominator), "f")
        return text
    return f"({q.numerator}/{q.denominator})"


def _render_approx(q: Fraction) -> str:
    text = format(Decimal(q.numerator) / Decimal(q.denominator), ".30f").rstrip("0")
    return text + "0" if text.endswith(".") else text


def render_expression(expr) -> str:
    if isinstance(expr, Num):
        return _render_num(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Irr):
        return f"irr:{expr.name}~{_render_approx(tag_approximant(expr.name))}"
    prec = _PREC[expr.op]
    left = render_expression(expr.left)
    right = render_expression(expr.right)
    if isinstance(expr.left, BinOp) and _PREC[expr.left.op] < prec:
        left = f"({left})"
    if isinstance(expr.right, BinOp) and _PREC[expr.right.op] <= prec:
        right = f"({right})"
    return f"{left} {expr.op} {right}"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<irr>irr:[A-Za-z_][A-Za-z0-9_]*(?:~[+-]?\d+\.\d+)?)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<var>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/()])
    """,
    re.X,
)


class _ExprParser:
    def __init__(self, text: str, line: int, column: int):
        self.line = line
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, column + pos)
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), column + pos))
            pos = m.end()
        self.end_column = column + len(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, self.end_column)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise SpecSyntaxError(message, self.line, tok[2])

    def parse(self):
        if not self.tokens:
            self.fail("empty expression")
        expr = self.expr()
        if self.i < len(self.tokens):
            self.fail(f"unexpected {self.peek()[1]!r}")
        return expr

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        kind, text, col = self.take()
        if kind == "num":
            return Num(Fraction(text))
        if kind == "var":
            if text not in ("n", "k"):
                raise SpecSyntaxError(f"unknown variable {text!r}", self.line, col)
            return Var(text)
        if kind == "irr":
            name, _, approx = text[4:].partition("~")
            try:
                if approx:
                    register_tag(name, approx)
                else:
                    tag_approximant(name)
            except (KeyError, ValueError) as exc:
                raise SpecSyntaxError(str(exc).strip('"'), self.line, col) from None
            return Irr(name)
        if text == "(":
            node = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return node
        if kind is None:
            self.fail("unexpected end of expression", (kind, text, col))
        self.fail(f"unexpected {text!r}", (kind, text, col))


def parse_expression(text: str, line: int = 1, column: int = 1):
    return _ExprParser(text, line, column).parse()


# ---------------------------------------------------------------- conditions


@dataclass(frozen=True)
class Square:
    binds_k = True

    def matches(self, n: int) -> bool:
        return math.isqrt(n) ** 2 == n

    def k_of(self, n: int) -> int:
        return math.isqrt(n)

    def k_bulk(self, n: np.ndarray) -> np.ndarray:
        k = np.rint(np.sqrt(n.astype(np.float64))).astype(np.int64)
        if len(n) and not np.array_equal(k * k, n):
            k = np.array([math.isqrt(int(v)) for v in n], dtype=object)
        return k

    def index_set(self) -> IndexSet:
        return Squares()

    def text(self) -> str:
        return "square"


@dataclass(frozen=True)
class ArithProgression:
    step: int
    offset: int
    binds_k = True

    def matches(self, n):
        return n >= self.offset and (n - self.offset) % self.step == 0

    def k_of(self, n):
        return (n - self.offset) // self.step

    def k_bulk(self, n):
        return (n - self.offset) // self.step

    def index_set(self):
        return Arith(self.step, self.offset)

    def text(self):
        return f"arith:{self.step},{self.offset}"


@dataclass(frozen=True)
class FiniteIndices:
    values: tuple
    binds_k = False

    def matches(self, n):
        return n in self.values

    def k_of(self, n):
        return None

    def k_bulk(self, n):
        return None

    def index_set(self):
        return Finite(self.values)

    def text(self):
        return "finite:[" + ",".join(map(str, self.values)) + "]"


@dataclass(frozen=True)
class Otherwise:
    binds_k = False

    def matches(self, n):
        return True

    def k_of(self, n):
        return None

    def k_bulk(self, n):
        return None

    def index_set(self):
        return All()

    def text(self):
        return "otherwise"


Condition = Union[Square, ArithProgression, FiniteIndices, Otherwise]


def _parse_condition(text: str, line: int, column: int) -> Condition:
    s = text.strip()
    if s == "square":
        return Square()
    if s == "otherwise":
        return Otherwise()
    m = re.fullmatch(r"arith:(\d+),(\d+)", s)
    if m:
        step, offset = int(m.group(1)), int(m.group(2))
        if step < 1 or offset < 1:
            raise SpecSemanticError(f"arith needs step >= 1 and offset >= 1, got {s}", line)
        return ArithProgression(step, offset)
    m = re.fullmatch(r"finite:\[([\d,\s]*)\]", s)
    if m:
        values = sorted({int(v) for v in m.group(1).split(",") if v.strip()})
        if values and values[0] < 1:
            raise SpecSemanticError("finite indices start at 1", line)
        return FiniteIndices(tuple(values))
    raise SpecSyntaxError(f"unknown condition {s!r}", line, column)


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class Piece:
    condition: Condition
    expr: Expr
    line: int | None = field(default=None, compare=False)

    def text(self) -> str:
        return f"piece {self.condition.text()} -> {render_expression(self.expr)}"


@dataclass(frozen=True)
class SequenceSpec:
    """A validated piecewise sequence over a metric-like space."""

    space: MetricLikeSpace
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        _validate(self)

    def __call__(self, n: int) -> PointValue:
        return eval_at(self, n)

    def __str__(self):
        return render_spec(self)


def _static_checks(expr, line, k_bound):
    """Reject k outside its scope, literal zero divisors and tag products."""
    if isinstance(expr, Var) and expr.name == "k" and not k_bound:
        raise SpecSemanticError("variable k is only defined under square or arith conditions", line)
    if isinstance(expr, BinOp):
        _static_checks(expr.left, line, k_bound)
        _static_checks(expr.right, line, k_bound)
        if expr.op == "/" and not _variables(expr.right):
            try:
                divisor = _evaluate(expr.right, None, None)
            except ZeroDivisionError:
                divisor = PointValue(0)
            if not divisor:
                raise SpecSemanticError("division by a literal zero", line)
        if expr.op == "*" and _has_tags(expr.left) and _has_tags(expr.right):
            raise SpecSemanticError("product of two irrational-tagged expressions", line)
        if expr.op == "/" and _has_tags(expr.right):
            raise SpecSemanticError("division by an irrational-tagged expression", line)


def _validate(spec: SequenceSpec):
    if not spec.pieces:
        raise SpecSemanticError("no pieces; the last piece must be 'otherwise'")
    for i, piece in enumerate(spec.pieces):
        if isinstance(piece.condition, Otherwise) and i != len(spec.pieces) - 1:
            raise SpecSemanticError("pieces after 'otherwise' can never fire", spec.pieces[i + 1].line)
        _static_checks(piece.expr, piece.line, piece.condition.binds_k)
    if not isinstance(spec.pieces[-1].condition, Otherwise):
        raise SpecSemanticError("coverage: the last piece must be 'otherwise'", spec.pieces[-1].line)


def parse_spec(text: str) -> SequenceSpec:
    """Parse and validate a sequence document."""
    space = None
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        word, _, rest = stripped.partition(" ")
        if word == "space":
            if space is not None:
                raise SpecSemanticError("duplicate space directive", lineno)
            name = rest.strip()
            if not name:
                raise SpecSyntaxError("missing space name", lineno, indent + 7)
            try:
                space = builtin_space(name)
            except ValueError as exc:
                raise SpecSemanticError(str(exc), lineno) from None
        elif word == "piece":
            cond_text, arrow, expr_text = rest.partition("->")
            if not arrow:
                raise SpecSyntaxError("expected '->' in piece", lineno, len(line) + 1)
            cond_col = indent + 7 + (len(cond_text) - len(cond_text.lstrip()))
            condition = _parse_condition(cond_text, lineno, cond_col)
            expr_col = indent + 7 + len(cond_text) + 2
            expr = parse_expression(expr_text, lineno, expr_col)
            pieces.append(Piece(condition, expr, lineno))
        else:
            raise SpecSyntaxError(f"unknown directive {word!r}", lineno, indent + 1)
    if space is None:
        raise SpecSemanticError("missing 'space' directive")
    return SequenceSpec(space, tuple(pieces))


def render_spec(spec: SequenceSpec) -> str:
    lines = [f"space {spec.space.name}"]
    lines.extend(piece.text() for piece in spec.pieces)
    return "\n".join(lines) + "\n"


def firing_piece(spec: SequenceSpec, n: int) -> int:
    if n < 1:
        raise ValueError("indices start at 1")
    for i, piece in enumerate(spec.pieces):
        if piece.condition.matches(n):
            return i
    raise AssertionError("validated specs always end with 'otherwise'")


def eval_at(spec: SequenceSpec, n: int) -> PointValue:
    """x_n, evaluated exactly."""
    piece = spec.pieces[firing_piece(spec, n)]
    try:
        value = _evaluate(piece.expr, n, piece.condition.k_of(n))
    except ZeroDivisionError:
        raise ZeroDivisionError(f"division by zero evaluating x_{n}") from None
    if not spec.space.contains(value):
        raise CarrierError(f"x_{n} = {value} is outside the carrier of the {spec.space.name!r} space")
    return value


@dataclass(frozen=True)
class SequenceBlock:
    """x_1..x_N as a ValueArray, with the index of the piece that fired."""

    values: ValueArray
    piece: np.ndarray

    def __len__(self):
        return len(self.piece)


_BLOCKS: "OrderedDict[SequenceSpec, SequenceBlock]" = OrderedDict()
_BLOCK_CACHE_SIZE = 4


def _build_block(spec: SequenceSpec, size: int) -> SequenceBlock:
    piece_of = np.full(size, -1, dtype=np.int32)
    values = ValueArray.zeros(size)
    for p, piece in enumerate(spec.pieces):
        free = piece_of == -1
        mask = piece.condition.index_set().mask(size) & free if not isinstance(piece.condition, Otherwise) else free
        idx = np.flatnonzero(mask)
        if not len(idx):
            continue
        piece_of[idx] = p
        n = (idx + 1).astype(np.int64)
        try:
            sub = _evaluate_bulk(piece.expr, n, piece.condition.k_bulk(n), len(idx))
        except ZeroDivisionError as exc:
            where = getattr(exc, "positions", [0])
            raise ZeroDivisionError(f"division by zero evaluating x_{int(n[where[0]])}") from None
        values.put(idx, sub)
    try:
        spec.space.check_many(values)
    except CarrierError as exc:
        i = exc.position
        raise CarrierError(
            f"x_{i + 1} = {values.point(i)} is outside the carrier of the {spec.space.name!r} space"
        ) from None
    return SequenceBlock(values, piece_of)


def evaluate_block(spec: SequenceSpec, size: int) -> SequenceBlock:
    """Evaluate x_1..x_size in bulk; results are cached per spec."""
    if size < 1:
        raise ValueError("block size must be >= 1")
    cached = _BLOCKS.get(spec)
    if cached is not None and len(cached) >= size:
        _BLOCKS.move_to_end(spec)
        if len(cached) == size:
            return cached
        return SequenceBlock(cached.values.take(slice(0, size)), cached.piece[:size])
    block = _build_block(spec, size)
    _BLOCKS[spec] = block
    _BLOCKS.move_to_end(spec)
    while len(_BLOCKS) > _BLOCK_CACHE_SIZE:
        _BLOCKS.popitem(last=False)
    return block


def derived_real_sequence(spec: SequenceSpec, y) -> Iterator[PointValue]:
    """Yield delta(x_n, y) for n = 1, 2, 3, ..."""
    y = spec.space.check(as_point(y))
    for n in itertools.count(1):
        yield spec.space.distance(eval_at(spec, n), y)


def derived_block(spec: SequenceSpec, y, size: int) -> ValueArray:
    """delta(x_n, y) for n = 1..size, computed in bulk."""
    return spec.space.distances_to(evaluate_block(spec, size).values, as_point(y))


EXAMPLE_3_TEXT = """\
space sum
piece square -> k
piece otherwise -> 2
"""

EXAMPLE_4_TEXT = """\
space irrational_sum
piece square -> k
piece otherwise -> 1/n
"""

BUILTIN_SPECS = {"example-3": EXAMPLE_3_TEXT, "example-4": EXAMPLE_4_TEXT}


def builtin_spec(name: str) -> SequenceSpec:
    """The two worked examples: ``example-3`` (sum space) and ``example-4``."""
    try:
        return parse_spec(BUILTIN_SPECS[name])
    except KeyError:
        raise ValueError(f"unknown builtin {name!r}; expected one of {sorted(BUILTIN_SPECS)}") from None
