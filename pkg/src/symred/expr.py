"""Exact symbolic expression kernel.

Expressions are immutable SymPy trees over exact rationals, coordinate
symbols and the elementary functions ``exp, ln, sin, cos, tan, sqrt``.
This module owns the surface the rest of the package relies on: parsing
and printing of the expression grammar, normalization into a canonical
form with decidable structural equality, differentiation, substitution,
numeric evaluation, a tri-state zero test and coefficient extraction.

Floats never enter symbolic trees; they appear only in sampling-based
zero promotion and in :mod:`symred.numcheck`.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Mapping

import sympy as sp

Expression = sp.Expr
#: Substitution / evaluation environment: identifier -> expression or number.
Binding = Mapping[str, "Expression | int | float | Fraction"]

#: Function names admitted by the grammar, mapped to their SymPy heads.
FUNCTIONS = {
    "exp": sp.exp,
    "ln": sp.log,
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "sqrt": sp.sqrt,
}

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


class ExprError(ValueError):
    """Base class for expression-kernel errors."""


class ParseError(ExprError):
    """Syntax error; ``offset`` is the byte offset into the UTF-8 input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class UnknownFunctionError(ParseError):
    pass


class ZeroDenominatorError(ParseError):
    pass


class NotPolynomialError(ExprError):
    """Raised when an expression is not polynomial in the requested symbols."""


class ZeroStatus(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    offset = 0  # byte offset
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            offset += len(ch.encode("utf-8"))
            i += 1
            continue
        if ch in "+-*/^()":
            tokens.append(_Token(ch, ch, offset))
            offset += 1
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], offset))
            offset += j - i
            i = j
            continue
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            tokens.append(_Token("ident", text[i:j], offset))
            offset += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", offset)
    tokens.append(_Token("end", "", offset))
    return tokens


class _Parser:
    """Recursive-descent parser for the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' factor)?            (right-associative)
    atom   := integer | integer '/' integer | identifier
            | func '(' expr ')' | '(' expr ')' | '-' atom
    """

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.offset)
        return tok

    def parse(self) -> Expression:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"trailing input {tok.text!r}", tok.offset)
        return e

    def expr(self) -> Expression:
        e = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expression:
        e = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            offset = self.peek().offset
            rhs = self.factor()
            if op == "/" and rhs == 0:
                raise ZeroDenominatorError("zero denominator", offset)
            e = e * rhs if op == "*" else e / rhs
        return e

    def factor(self) -> Expression:
        base = self.atom()
        if self.peek().kind == "^":
            self.next()
            exponent = self.factor()
            return base ** exponent
        return base

    def atom(self) -> Expression:
        tok = self.next()
        if tok.kind == "int":
            p = int(tok.text)
            # literal rational: integer '/' integer
            if self.peek().kind == "/" and self.tokens[self.pos + 1].kind == "int":
                self.next()
                qtok = self.next()
                q = int(qtok.text)
                if q == 0:
                    raise ZeroDenominatorError("zero literal denominator", qtok.offset)
                return sp.Rational(p, q)
            return sp.Integer(p)
        if tok.kind == "ident":
            if self.peek().kind == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function {tok.text!r}", tok.offset)
                self.next()
                arg = self.expr()
                self.expect(")")
                return FUNCTIONS[tok.text](arg)
            return sp.Symbol(tok.text)
        if tok.kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "-":
            return -self.atom()
        raise ParseError(f"unexpected token {tok.text!r}", tok.offset)


def parse_expr(text: str) -> Expression:
    """Parse ``text`` against the grammar and return the normalized tree."""
    return normalize(_Parser(_tokenize(text)).parse())


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _print_atomic(e: Expression) -> str:
    """Print ``e`` as a grammar atom, parenthesizing when required."""
    s = print_expr(e)
    if e.is_Symbol or (e.is_Integer and e >= 0):
        return s
    if e.func in (sp.exp, sp.log, sp.sin, sp.cos, sp.tan):
        return s
    return f"({s})"


def print_expr(e: Expression) -> str:
    """Emit ``e`` in the expression grammar.

    The output reparses (and normalizes) to an expression structurally
    equal to ``normalize(e)``.
    """
    if e.is_Integer:
        return str(int(e))
    if e.is_Rational:
        p, q = sp.fraction(e)
        if p < 0:
            return f"-{-int(p)}/{int(q)}"
        return f"{int(p)}/{int(q)}"
    if e.is_Symbol:
        return str(e)
    if e.func is sp.exp:
        return f"exp({print_expr(e.args[0])})"
    if e.func is sp.log:
        return f"ln({print_expr(e.args[0])})"
    if e.func in (sp.sin, sp.cos, sp.tan):
        return f"{e.func.__name__}({print_expr(e.args[0])})"
    if e.is_Pow:
        base, expo = e.as_base_exp()
        return f"{_print_atomic(base)}^{_print_atomic(expo)}"
    if e.is_Mul:
        num, den = [], []
        coeff = sp.Integer(1)
        for f in e.args:
            if f.is_Rational:
                coeff *= f
            elif f.is_Pow and f.exp.is_Rational and f.exp < 0:
                den.append(f.base ** (-f.exp))
            else:
                num.append(f)
        parts = []
        if coeff == -1 and num:
            sign = "-"
        elif coeff != 1 or not num:
            sign = ""
            parts.append(_print_atomic(coeff))
        else:
            sign = ""
        parts.extend(_print_atomic(f) for f in num)
        s = sign + "*".join(parts)
        for f in den:
            s += f"/{_print_atomic(f)}"
        return s
    if e.is_Add:
        terms = sp.Add.make_args(e)
        out = print_expr(terms[0])
        for t in terms[1:]:
            s = print_expr(t)
            if s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    raise ExprError(f"cannot print node {type(e).__name__}: {e!r}")


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

_NORMALIZE_MAX_PASSES = 4


def _normalize_pass(e: Expression) -> Expression:
    e = sp.expand(e)
    e = sp.powsimp(e, deep=True, combine="exp")
    try:
        e = sp.cancel(sp.together(e))
    except (sp.PolynomialError, sp.polys.polyerrors.ComputationFailed):
        pass
    return e


def normalize(e: Expression) -> Expression:
    """Canonical form: iterated expand / exp-combination / fraction cancel.

    Idempotent by construction (iterates to a structural fixed point).
    ``ln`` of products and powers is deliberately left untouched; use
    :func:`expand_ln` for the positivity-assuming rewrite.
    """
    e = sp.sympify(e)
    for _ in range(_NORMALIZE_MAX_PASSES):
        nxt = _normalize_pass(e)
        if nxt == e:
            return nxt
        e = nxt
    return e


def expand_ln(e: Expression) -> Expression:
    """Rewrite ``ln`` of products and powers, assuming positive real
    arguments (every catalog chart declares a positivity box where this
    holds). Off the normalization path by default."""
    return normalize(sp.expand_log(e, force=True))


def differentiate(e: Expression, s: sp.Symbol | str) -> Expression:
    """Exact partial derivative, normalized."""
    if isinstance(s, str):
        s = sp.Symbol(s)
    return normalize(sp.diff(sp.sympify(e), s))


def _check_binding(b: Binding) -> None:
    seen = set()
    for key in b:
        if not key or key[0] not in _IDENT_START or any(
                c not in _IDENT_CONT for c in key):
            raise ExprError(f"binding key {key!r} is not a valid identifier")
        if key in seen:
            raise ExprError(f"binding key {key!r} bound twice")
        seen.add(key)


def substitute(e: Expression, b: Binding) -> Expression:
    """Simultaneous substitution followed by normalization."""
    _check_binding(b)
    subs = {sp.Symbol(k): sp.sympify(v) for k, v in b.items()}
    return normalize(sp.sympify(e).subs(subs, simultaneous=True))


def evaluate(e: Expression, b: Binding) -> float:
    """Evaluate ``e`` at a point; every free symbol must be bound."""
    _check_binding(b)
    e = sp.sympify(e)
    missing = {str(s) for s in e.free_symbols} - set(b)
    if missing:
        raise ExprError(f"unbound symbols in evaluation: {sorted(missing)}")
    val = e.evalf(subs={sp.Symbol(k): v for k, v in b.items()})
    val = complex(val)
    if abs(val.imag) > 1e-12 * (1.0 + abs(val.real)):
        raise ExprError(f"evaluation left the real line: {val}")
    return val.real


def is_zero_expr(
    e: Expression,
    domain_hints: Mapping[str, tuple[float, float]] | None = None,
    *,
    seed: int = 0,
    samples: int = 100,
    zero_tol: float = 1e-9,
    nonzero_tol: float = 1e-3,
) -> ZeroStatus:
    """Tri-state zero test.

    ``ZERO`` when the normal form (after a sound trigonometric rewrite
    attempt) is literally 0.  Otherwise the expression is sampled on the
    per-symbol intervals of ``domain_hints``; any sample above
    ``nonzero_tol`` promotes to ``NONZERO``, while uniformly tiny samples
    report ``UNKNOWN`` -- never silently ZERO.
    """
    n = normalize(e)
    if n == 0:
        return ZeroStatus.ZERO
    if n.free_symbols:
        simplified = sp.simplify(n)
        if simplified == 0:
            return ZeroStatus.ZERO
    else:
        # exact constant: decide without sampling
        return ZeroStatus.ZERO if sp.simplify(n) == 0 else ZeroStatus.NONZERO

    from .numcheck import SampleConfig, max_abs_residual

    syms = sorted(str(s) for s in n.free_symbols)
    hints = dict(domain_hints or {})
    intervals = {s: hints.get(s, (0.5, 2.0)) for s in syms}
    cfg = SampleConfig(seed=seed, samples=samples, intervals=intervals,
                       tolerance=zero_tol)
    worst, _ = max_abs_residual([n], cfg)
    if worst > nonzero_tol:
        return ZeroStatus.NONZERO
    return ZeroStatus.UNKNOWN


def collect_coefficients(
    e: Expression, basis_symbols: Iterable[sp.Symbol | str]
) -> dict[Expression, Expression]:
    """Split ``e`` as a polynomial in ``basis_symbols``.

    Returns ``{monomial: coefficient}`` with ``e == sum(m * c)``; other
    symbols may appear transcendentally inside the coefficients.
    """
    syms = [sp.Symbol(s) if isinstance(s, str) else s for s in basis_symbols]
    e = sp.expand(sp.sympify(e))
    if not syms:
        return {sp.Integer(1): normalize(e)}
    try:
        poly = sp.Poly(e, *syms)
    except sp.PolynomialError as exc:
        raise NotPolynomialError(
            f"expression is not polynomial in {syms}: {exc}") from exc
    out: dict[Expression, Expression] = {}
    for powers, coeff in poly.terms():
        monom = sp.Mul(*[s ** p for s, p in zip(syms, powers)])
        out[monom] = normalize(coeff)
    return out


def structurally_equal(a: Expression, b: Expression) -> bool:
    """Equality of normal forms (the package's golden-test comparison)."""
    return normalize(sp.sympify(a) - sp.sympify(b)) == 0
