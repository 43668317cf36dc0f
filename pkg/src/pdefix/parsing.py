"""Problem-file parser.

File grammar (UTF-8 text, '#' starts a comment, keys case-sensitive)::

    kind: stationary | evolution
    dim: 1 | 2 | 3
    components: N                  # 1 <= N <= 4
    domain: L1 [L2 [L3]]
    grid: g1 [g2 [g3]]             # powers of two
    constraint: none | leray       # optional, defaults to none
    equation[k]: <expr> = f[k]     # one per component
    forcing[k]: <expr>             # constants and sin/cos terms only
    initial[k]: <expr>             # evolution only
    t_final: T                     # evolution only
    dt: h                          # evolution only

Expression grammar::

    expr   := term (("+" | "-") term)*
    term   := ["-"] factor ("*" factor)*
    factor := NUMBER | "u[" INT "]" | "D(" INT ("," INT)* ")u[" INT "]"
            | "f[" INT "]" | "sin(" INT "*x" INT ")" | "cos(" INT "*x" INT ")"
            | "(" expr ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ComponentOutOfRange, DimensionMismatch, MissingSection, SpecSyntaxError
from .expressions import (
    Constant,
    CoordFunc,
    ComponentRef,
    DerivFactor,
    Expr,
    ForcingRef,
    Product,
    Sum,
    negate,
    to_text,
)
from .fields import MultiIndex
from .problem import Constraint, Kind, ProblemSpec

_NUMBER = re.compile(r"\d+(\.\d*)?([eE][+-]?\d+)?")
_WORD = re.compile(r"[A-Za-z]+")
_PUNCT = "[]()+-*,="


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "word" | one of _PUNCT
    text: str
    column: int  # 1-based within the source line


def _tokenize(text: str, line: int, col_offset: int) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        col = col_offset + i
        if ch.isdigit():
            m = _NUMBER.match(text, i)
            tokens.append(_Token("number", m.group(0), col))
            i = m.end()
        elif ch.isalpha():
            m = _WORD.match(text, i)
            tokens.append(_Token("word", m.group(0), col))
            i = m.end()
        elif ch in _PUNCT:
            tokens.append(_Token(ch, ch, col))
            i += 1
        else:
            raise SpecSyntaxError(line, col, f"a valid token, not {ch!r}")
    return tokens


class _ExprParser:
    """Recursive descent over one tokenized expression."""

    def __init__(self, tokens, line, dim, n_components, end_column, field_factors=True):
        self.tokens = tokens
        self.pos = 0
        self.line = line
        self.dim = dim
        self.n_components = n_components
        self.end_column = end_column
        # forcing/initial sections restrict the grammar to constants and
        # coordinate functions
        self.field_factors = field_factors

    # -- token plumbing -------------------------------------------------

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> _Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def error(self, expected: str):
        tok = self.peek()
        column = tok.column if tok is not None else self.end_column
        raise SpecSyntaxError(self.line, column, expected)

    def expect(self, kind: str, expected: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            self.error(expected or f"'{kind}'")
        return self.advance()

    def expect_word(self, text: str) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text != text:
            self.error(f"'{text}'")
        return self.advance()

    def take_int(self, what: str) -> int:
        tok = self.expect("number", what)
        if not tok.text.isdigit():
            raise SpecSyntaxError(self.line, tok.column, what)
        return int(tok.text)

    # -- grammar ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        terms = [self.parse_term()]
        while (tok := self.peek()) is not None and tok.kind in "+-":
            self.advance()
            term = self.parse_term()
            terms.append(negate(term) if tok.kind == "-" else term)
        return Sum(tuple(terms)) if len(terms) > 1 else terms[0]

    def parse_term(self) -> Expr:
        negative = False
        if (tok := self.peek()) is not None and tok.kind == "-":
            self.advance()
            negative = True
        factors = [self.parse_factor()]
        while (tok := self.peek()) is not None and tok.kind == "*":
            self.advance()
            factors.append(self.parse_factor())
        term = Product(tuple(factors)) if len(factors) > 1 else factors[0]
        return negate(term) if negative else term

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if tok is None:
            self.error(self._factor_expectation())
        if tok.kind == "number":
            self.advance()
            return Constant(float(tok.text))
        if tok.kind == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "word":
            if tok.text in ("sin", "cos"):
                return self.parse_coord_func()
            if not self.field_factors:
                self.error(self._factor_expectation())
            if tok.text == "u":
                self.advance()
                return ComponentRef(self.parse_component_index())
            if tok.text == "f":
                self.advance()
                return ForcingRef(self.parse_component_index())
            if tok.text == "D":
                return self.parse_deriv_factor()
        self.error(self._factor_expectation())

    def _factor_expectation(self) -> str:
        if self.field_factors:
            return "a number, u[..], D(..)u[..], f[..], sin(..), cos(..), or '('"
        return "a number, sin(..), cos(..), or '('"

    def parse_component_index(self) -> int:
        self.expect("[")
        tok = self.peek()
        index = self.take_int("a component index")
        self.expect("]")
        if index >= self.n_components:
            raise ComponentOutOfRange(index, self.n_components)
        return index

    def parse_deriv_factor(self) -> Expr:
        tok = self.expect_word("D")
        self.expect("(")
        orders = [self.take_int("a derivative order")]
        while (nxt := self.peek()) is not None and nxt.kind == ",":
            self.advance()
            orders.append(self.take_int("a derivative order"))
        self.expect(")")
        if len(orders) != self.dim:
            raise DimensionMismatch(
                f"line {self.line}: D({','.join(map(str, orders))}) has "
                f"{len(orders)} orders but dim is {self.dim}"
            )
        self.expect_word("u")
        index = self.parse_component_index()
        return DerivFactor(MultiIndex(tuple(orders)), index)

    def parse_coord_func(self) -> Expr:
        func = self.advance().text
        self.expect("(")
        frequency = self.take_int("an integer frequency")
        self.expect("*")
        self.expect_word("x")
        axis = self.take_int("an axis number")
        self.expect(")")
        if not 1 <= axis <= self.dim:
            raise DimensionMismatch(
                f"line {self.line}: coordinate x{axis} out of range for dim {self.dim}"
            )
        return CoordFunc(func, axis - 1, frequency)

    def finish(self):
        if self.peek() is not None:
            self.error("end of expression")


def parse_expression(
    text: str,
    dim: int,
    n_components: int,
    line: int = 1,
    col_offset: int = 1,
    field_factors: bool = True,
) -> Expr:
    tokens = _tokenize(text, line, col_offset)
    parser = _ExprParser(
        tokens, line, dim, n_components, col_offset + len(text), field_factors
    )
    if parser.peek() is None:
        parser.error("an expression")
    expr = parser.parse_expr()
    parser.finish()
    return expr


# --- file-level parsing -----------------------------------------------------


_INDEXED_KEY = re.compile(r"^(equation|forcing|initial)\[(\d+)\]$")


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _collect_entries(text: str) -> dict[str, tuple[str, int, int]]:
    """Map key -> (value text, line number, value column)."""
    entries: dict[str, tuple[str, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if ":" not in line:
            raise SpecSyntaxError(lineno, len(line.rstrip()) + 1, "':' after a key")
        key, value = line.split(":", 1)
        stripped = key.strip()
        if not stripped:
            raise SpecSyntaxError(lineno, 1, "a key before ':'")
        if stripped in entries:
            raise SpecSyntaxError(lineno, 1, f"'{stripped}' to appear only once")
        entries[stripped] = (value, lineno, len(key) + 2)
    return entries


class _FileParser:
    def __init__(self, text: str):
        self.entries = _collect_entries(text)
        self.last_line = 0
        self.last_col = 0

    def fail(self, expected: str):
        raise SpecSyntaxError(self.last_line, self.last_col, expected)

    def take(self, key: str) -> tuple[str, int, int]:
        if key not in self.entries:
            raise MissingSection(key)
        value, self.last_line, self.last_col = self.entries.pop(key)
        return value, self.last_line, self.last_col

    def take_optional(self, key: str):
        entry = self.entries.pop(key, None)
        if entry is not None:
            _, self.last_line, self.last_col = entry
        return entry

    def scalar(self, key: str) -> str:
        value, lineno, col = self.take(key)
        stripped = value.strip()
        if not stripped:
            self.fail(f"a value for '{key}'")
        return stripped

    def int_value(self, key: str) -> int:
        text = self.scalar(key)
        if not text.isdigit():
            self.fail(f"an integer for '{key}'")
        return int(text)

    def float_value(self, key: str) -> float:
        text = self.scalar(key)
        try:
            return float(text)
        except ValueError:
            self.fail(f"a decimal for '{key}'")

    def tuple_value(self, key: str, count: int, caster, what: str) -> tuple:
        text = self.scalar(key)
        parts = text.split()
        if len(parts) != count:
            self.fail(f"{count} {what} value(s) for '{key}'")
        out = []
        for part in parts:
            try:
                out.append(caster(part))
            except ValueError:
                self.fail(f"{what} values for '{key}'")
        return tuple(out)


def parse_problem(text: str) -> ProblemSpec:
    """Parse problem text into a validated :class:`ProblemSpec`."""
    parser = _FileParser(text)

    kind_text = parser.scalar("kind")
    try:
        kind = Kind(kind_text)
    except ValueError:
        parser.fail("'stationary' or 'evolution'")

    dim = parser.int_value("dim")
    if not 1 <= dim <= 3:
        parser.fail("dim in {1, 2, 3}")
    n_components = parser.int_value("components")
    if not 1 <= n_components <= 4:
        parser.fail("components in 1..4")

    domain = parser.tuple_value("domain", dim, float, "decimal")
    if any(L <= 0 for L in domain):
        parser.fail("positive axis lengths")
    grid = parser.tuple_value("grid", dim, int, "integer")
    for g in grid:
        if g < 8 or g > 256 or (g & (g - 1)) != 0:
            parser.fail("grid sizes that are powers of two in [8, 256]")

    constraint = Constraint.NONE
    if (entry := parser.take_optional("constraint")) is not None:
        value, _, _ = entry
        try:
            constraint = Constraint(value.strip())
        except ValueError:
            parser.fail("'none' or 'leray'")

    equations = []
    for k in range(n_components):
        value, lineno, col = parser.take(f"equation[{k}]")
        if "=" not in value:
            raise SpecSyntaxError(lineno, col + len(value), f"'= f[{k}]'")
        lhs_text, rhs_text = value.split("=", 1)
        lhs = parse_expression(lhs_text, dim, n_components, lineno, col)
        rhs = parse_expression(
            rhs_text, dim, n_components, lineno, col + len(lhs_text) + 1
        )
        if rhs != ForcingRef(k):
            raise SpecSyntaxError(
                lineno, col + len(lhs_text) + 1, f"right-hand side 'f[{k}]'"
            )
        equations.append(lhs)

    forcing = []
    for k in range(n_components):
        value, lineno, col = parser.take(f"forcing[{k}]")
        forcing.append(
            parse_expression(value, dim, n_components, lineno, col, field_factors=False)
        )

    initial = None
    t_final = None
    dt = None
    if kind is Kind.EVOLUTION:
        initial_list = []
        for k in range(n_components):
            value, lineno, col = parser.take(f"initial[{k}]")
            initial_list.append(
                parse_expression(value, dim, n_components, lineno, col, field_factors=False)
            )
        initial = tuple(initial_list)
        t_final = parser.float_value("t_final")
        dt = parser.float_value("dt")

    if parser.entries:
        key, (_, lineno, _) = next(iter(parser.entries.items()))
        raise SpecSyntaxError(lineno, 1, f"no '{key}' section for a {kind.value} problem")

    return ProblemSpec(
        kind=kind,
        dim=dim,
        n_components=n_components,
        domain=domain,
        grid=grid,
        constraint=constraint,
        equations=tuple(equations),
        forcing_exprs=tuple(forcing),
        initial_exprs=initial,
        t_final=t_final,
        dt=dt,
    )


def format_problem(spec: ProblemSpec) -> str:
    """Serialize a spec back to problem-file text (inverse of parse_problem)."""
    lines = [
        f"kind: {spec.kind.value}",
        f"dim: {spec.dim}",
        f"components: {spec.n_components}",
        "domain: " + " ".join(repr(L) for L in spec.domain),
        "grid: " + " ".join(str(g) for g in spec.grid),
        f"constraint: {spec.constraint.value}",
    ]
    for k, eq in enumerate(spec.equations):
        lines.append(f"equation[{k}]: {to_text(eq)} = f[{k}]")
    for k, expr in enumerate(spec.forcing_exprs):
        lines.append(f"forcing[{k}]: {to_text(expr)}")
    if spec.kind is Kind.EVOLUTION:
        for k, expr in enumerate(spec.initial_exprs):
            lines.append(f"initial[{k}]: {to_text(expr)}")
        lines.append(f"t_final: {spec.t_final!r}")
        lines.append(f"dt: {spec.dt!r}")
    return "\n".join(lines) + "\n"
