"""Row-selection expressions used by ``data_items`` targets.

Concrete syntax::

    expr       := or_expr
    or_expr    := and_expr ("or" and_expr)*
    and_expr   := not_expr ("and" not_expr)*
    not_expr   := "not" not_expr | primary
    primary    := "(" expr ")" | "true" | comparison
    comparison := field OP literal
    field      := identifier | `quoted name`
    OP         := == | != | < | <= | > | >=
    literal    := number | 'string' | "string"

Fields are ``x``, ``y`` and ``group``, or the chart's ``x_name``, ``y_name``
and ``group_name``. Quoted ``YYYY-MM[-DD]`` literals compared against a
temporal x column are read as dates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Union

from .ast import Chart, is_number, parse_date

COMPARATORS = ("==", "!=", "<", "<=", ">", ">=")
ORDERING = frozenset({"<", "<=", ">", ">="})
COLUMNS = ("x", "y", "group")


class FilterError(Exception):
    def __init__(self, code: str, message: str, position: int | None = None):
        self.code = code
        self.position = position
        self.message = message
        where = f" at column {position + 1}" if position is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class Comparison:
    field: str
    op: str
    literal: Any


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    expr: Any


@dataclass(frozen=True)
class TrueExpr:
    pass


FilterExpr = Union[Comparison, And, Or, Not, TrueExpr]


@dataclass(frozen=True)
class Row:
    index: int
    x: Any
    y: float
    group: str | None = None
    # x on a number line (raw number or epoch days); None for categorical x.
    x_num: float | None = None


def chart_rows(chart: Chart) -> list[Row]:
    groups = chart.group_data
    xs = chart.x_numeric
    return [
        Row(i, chart.x_data[i], chart.y_data[i], groups[i] if groups is not None else None, xs[i])
        for i in range(chart.n_rows)
    ]


# ----------------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<str>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<qid>`[^`]*`)
  | (?P<op>==|!=|<=|>=|<|>)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)
_KEYWORDS = frozenset({"and", "or", "not", "true"})


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise FilterError("FILTER_SYNTAX", f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        text = m.group()
        if kind == "id" and text in _KEYWORDS:
            kind = text
        if kind != "ws":
            out.append(_Tok(kind, text, pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(src)))
    return out


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str | None = None) -> _Tok:
        tok = self.toks[self.i]
        if kind is not None and tok.kind != kind:
            what = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise FilterError("FILTER_SYNTAX", f"expected {kind}, found {what}", tok.pos)
        self.i += 1
        return tok

    def parse(self):
        expr = self.or_expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise FilterError("FILTER_SYNTAX", f"unexpected {tok.text!r}", tok.pos)
        return expr

    def or_expr(self):
        items = [self.and_expr()]
        while self.peek().kind == "or":
            self.take()
            items.append(self.and_expr())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def and_expr(self):
        items = [self.not_expr()]
        while self.peek().kind == "and":
            self.take()
            items.append(self.not_expr())
        return items[0] if len(items) == 1 else And(tuple(items))

    def not_expr(self):
        if self.peek().kind == "not":
            self.take()
            return Not(self.not_expr())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok.kind == "lp":
            self.take()
            expr = self.or_expr()
            self.take("rp")
            return expr
        if tok.kind == "true":
            self.take()
            return TrueExpr()
        if tok.kind in ("id", "qid"):
            self.take()
            name = tok.text[1:-1] if tok.kind == "qid" else tok.text
            op = self.take("op").text
            lit = self.peek()
            if lit.kind == "num":
                self.take()
                value = float(lit.text)
                literal: Any = int(value) if value.is_integer() and re.fullmatch(r"-?\d+", lit.text) else value
            elif lit.kind == "str":
                self.take()
                literal = _unquote(lit.text)
            else:
                what = "end of input" if lit.kind == "eof" else repr(lit.text)
                raise FilterError("FILTER_SYNTAX", f"expected a literal, found {what}", lit.pos)
            return Comparison(name, op, literal)
        what = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise FilterError("FILTER_SYNTAX", f"expected a comparison, found {what}", tok.pos)


def parse_filter(src: str, chart: Chart | None = None) -> FilterExpr:
    """Parse ``src``; with a chart, also resolve field aliases and check types."""
    if not isinstance(src, str) or not src.strip():
        raise FilterError("FILTER_SYNTAX", "empty filter", 0)
    expr = _Parser(src).parse()
    if chart is not None:
        expr = bind_filter(expr, chart)
    else:
        expr = _canonicalize(expr, {c: c for c in COLUMNS}, strict=False)
    return expr


# ----------------------------------------------------------------------------
# Binding
# ----------------------------------------------------------------------------


def column_aliases(chart: Chart) -> dict[str, str]:
    aliases: dict[str, str] = {}
    if chart.group_name is not None and chart.group_data is not None:
        aliases[chart.group_name] = "group"
    aliases[chart.y_name] = "y"
    aliases[chart.x_name] = "x"
    aliases["x"] = "x"
    aliases["y"] = "y"
    if chart.group_data is not None:
        aliases["group"] = "group"
    return aliases


def column_kind(chart: Chart, column: str) -> str:
    if column == "x":
        return chart.x_kind
    if column == "y":
        return "quantitative"
    return "nominal"


def _canonicalize(expr, aliases: dict[str, str], strict: bool):
    if isinstance(expr, Comparison):
        if expr.field in aliases:
            return Comparison(aliases[expr.field], expr.op, expr.literal)
        if strict:
            raise FilterError("FILTER_UNKNOWN_FIELD", f"unknown field {expr.field!r}")
        return expr
    if isinstance(expr, And):
        return And(tuple(_canonicalize(e, aliases, strict) for e in expr.items))
    if isinstance(expr, Or):
        return Or(tuple(_canonicalize(e, aliases, strict) for e in expr.items))
    if isinstance(expr, Not):
        return Not(_canonicalize(expr.expr, aliases, strict))
    return expr


def _check_types(expr, chart: Chart) -> None:
    if isinstance(expr, Comparison):
        kind = column_kind(chart, expr.field)
        lit = expr.literal
        if expr.op in ORDERING and kind == "nominal":
            raise FilterError("FILTER_TYPE_MISMATCH", f"{expr.op!r} needs a numeric or temporal field, {expr.field!r} is categorical")
        if kind == "quantitative" and not is_number(lit):
            raise FilterError("FILTER_TYPE_MISMATCH", f"field {expr.field!r} is numeric, literal {lit!r} is not")
        if kind == "temporal" and parse_date(lit) is None:
            raise FilterError("FILTER_TYPE_MISMATCH", f"field {expr.field!r} is temporal, literal {lit!r} is not a date")
        if kind == "nominal" and not isinstance(lit, str):
            raise FilterError("FILTER_TYPE_MISMATCH", f"field {expr.field!r} is categorical, literal {lit!r} is not a string")
        if kind == "mixed":
            raise FilterError("FILTER_TYPE_MISMATCH", f"field {expr.field!r} mixes numbers and text")
    elif isinstance(expr, (And, Or)):
        for e in expr.items:
            _check_types(e, chart)
    elif isinstance(expr, Not):
        _check_types(expr.expr, chart)


def bind_filter(expr: FilterExpr, chart: Chart) -> FilterExpr:
    """Map aliases onto x/y/group and reject ill-typed comparisons."""
    bound = _canonicalize(expr, column_aliases(chart), strict=True)
    _check_types(bound, chart)
    return bound


# ----------------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------------

_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _column(chart: Chart, column: str) -> tuple:
    if column == "x":
        return chart.x_numeric if chart.x_kind in ("quantitative", "temporal") else tuple(chart.x_data)
    if column == "y":
        return tuple(chart.y_data)
    return tuple(chart.group_data or ())


def _select(expr, chart: Chart, universe: frozenset[int]) -> frozenset[int]:
    if isinstance(expr, TrueExpr):
        return universe
    if isinstance(expr, Comparison):
        values = _column(chart, expr.field)
        lit = expr.literal
        if expr.field == "x" and chart.x_kind == "temporal":
            lit = parse_date(lit)
        cmp = _CMP[expr.op]
        return frozenset(i for i in universe if cmp(values[i], lit))
    if isinstance(expr, And):
        out = universe
        for e in expr.items:
            out = out & _select(e, chart, out)
        return out
    if isinstance(expr, Or):
        out: frozenset[int] = frozenset()
        for e in expr.items:
            out = out | _select(e, chart, universe - out)
        return out
    if isinstance(expr, Not):
        return universe - _select(expr.expr, chart, universe)
    raise TypeError(f"not a filter expression: {expr!r}")


def eval_filter(expr: FilterExpr | str, chart: Chart) -> list[Row]:
    """Rows satisfying ``expr``, in ascending index order."""
    if isinstance(expr, str):
        expr = parse_filter(expr, chart)
    else:
        expr = bind_filter(expr, chart)
    rows = chart_rows(chart)
    selected = _select(expr, chart, frozenset(range(len(rows))))
    return [rows[i] for i in sorted(selected)]


# ----------------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------------


def to_source(expr: FilterExpr) -> str:
    """Canonical text for a bound expression; parses back to an equal tree."""
    if isinstance(expr, TrueExpr):
        return "true"
    if isinstance(expr, Comparison):
        lit = expr.literal
        text = _quote(lit) if isinstance(lit, str) else repr(lit)
        return f"{expr.field} {expr.op} {text}"
    if isinstance(expr, And):
        return " and ".join(_paren(e, (And, Or)) for e in expr.items)
    if isinstance(expr, Or):
        return " or ".join(_paren(e, (Or,)) for e in expr.items)
    if isinstance(expr, Not):
        return "not " + _paren(expr.expr, (And, Or))
    raise TypeError(f"not a filter expression: {expr!r}")


def _paren(expr, kinds) -> str:
    text = to_source(expr)
    return f"({text})" if isinstance(expr, kinds) else text


def _quote(s: str) -> str:
    return "'" + s.replace("\\", "\\\\").replace("'", "\\'") + "'"
