"""
Map-specification mini-language.

Grammar::

    expr      :: term (('+' | '-') term)*
    term      :: unary (('*' | '/') unary)*
    unary     :: ('+' | '-') unary | power
    power     :: atom [('^' | '**') unary]
    atom      :: imaginary | call | name | number | '(' expr ')'
    call      :: name '(' expr ')'
    number    :: digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
    imaginary :: [number] 'i'

The variable is ``z``; ``i`` is the imaginary unit; every other name must be
bound by a parameter. Exponents in map specifications must be integers and
function calls (abs, exp, log, re, im, sqrt) are only accepted in weight
expressions. Literals become exact rationals, so maps with Gaussian-rational
coefficients keep an exact form for orbit arithmetic.
"""

from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np
import pyparsing as pp
import sympy

from ..config.options import TOLERANCE
from ..errors import MapSpecError
from ..utils.logging import get_logger
from .exact import Z, ExactForm, to_element
from .point import INFINITY, SpherePoint, chordal_distance_array, format_complex
from .rational import RationalMap

logger = get_logger("kmsdyn_parser")

FUNCTIONS = {
    "abs": sympy.Abs,
    "exp": sympy.exp,
    "log": sympy.log,
    "re": sympy.re,
    "im": sympy.im,
    "sqrt": sympy.sqrt,
}

INFINITY_WORDS = {"inf", "infinity", "∞", "oo"}


@dataclass(frozen=True)
class _Node:
    kind: str
    value: Any
    children: tuple = ()
    loc: int = 0


def _fold(s, loc, toks):
    items = list(toks)
    node = items[0]
    for i in range(1, len(items), 2):
        op, right = items[i], items[i + 1]
        node = _Node("bin", op, (node, right), node.loc)
    return node


def _power(s, loc, toks):
    items = list(toks)
    if len(items) == 1:
        return items[0]
    return _Node("pow", None, (items[0], items[2]), loc)


def _unary(s, loc, toks):
    items = list(toks)
    if len(items) == 1:
        return items[0]
    sign, operand = items
    return operand if sign == "+" else _Node("neg", None, (operand,), loc)


def _build_grammar() -> pp.ParserElement:
    expr = pp.Forward()
    unary = pp.Forward()
    mantissa = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"

    number = pp.Regex(mantissa).set_parse_action(
        lambda s, loc, t: _Node("num", sympy.Rational(t[0]), loc=loc)
    )
    imaginary = pp.Regex(rf"(?:{mantissa})?i(?![A-Za-z0-9_])").set_parse_action(
        lambda s, loc, t: _Node("imag", sympy.Rational(t[0][:-1] or "1"), loc=loc)
    )
    name = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")

    call = (name + lpar - expr - rpar).set_parse_action(
        lambda s, loc, t: _Node("call", t[0], (t[1],), loc)
    )
    variable = name.copy().set_parse_action(lambda s, loc, t: _Node("name", t[0], loc=loc))
    group = lpar - expr - rpar
    atom = imaginary | call | variable | number | group

    power = (atom + pp.Optional(pp.Regex(r"\^|\*\*") - unary)).set_parse_action(_power)
    unary <<= (pp.one_of("+ -") + unary).set_parse_action(_unary) | power
    term = (unary + pp.ZeroOrMore(pp.Regex(r"\*(?!\*)|/") - unary)).set_parse_action(_fold)
    expr <<= (term + pp.ZeroOrMore(pp.one_of("+ -") - term)).set_parse_action(_fold)
    return expr


_GRAMMAR = _build_grammar()


def _parse(text: str) -> _Node:
    if not text or not text.strip():
        raise MapSpecError("empty expression", 0)
    try:
        return _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise MapSpecError(f"cannot parse {text!r}: {e.msg}", e.loc) from None


def _exact_number(value: Any) -> sympy.Expr:
    """Rationalizes a parameter value (number, string literal or sympy expression)."""
    if isinstance(value, SpherePoint):
        if value.is_infinite:
            raise MapSpecError("parameters cannot be infinite")
        value = value.value
    if isinstance(value, str):
        return _to_sympy(_parse(value), {}, allow_calls=False, allow_variable=False)
    if isinstance(value, sympy.Basic):
        return value
    z = complex(value)
    return sympy.nsimplify(z.real, rational=True) + sympy.I * sympy.nsimplify(z.imag, rational=True)


def _to_sympy(node: _Node, bindings: Mapping[str, Any], allow_calls: bool, allow_variable: bool = True) -> sympy.Expr:
    def walk(n: _Node) -> sympy.Expr:
        match n.kind:
            case "num":
                return n.value
            case "imag":
                return n.value * sympy.I
            case "name":
                if n.value == "z" and allow_variable:
                    return Z
                if n.value in bindings:
                    return _exact_number(bindings[n.value])
                if n.value == "pi" and allow_calls:
                    return sympy.pi
                raise MapSpecError(f"unbound parameter {n.value!r}", n.loc)
            case "call":
                if not allow_calls:
                    raise MapSpecError(f"function {n.value!r} is not allowed in a map", n.loc)
                if n.value not in FUNCTIONS:
                    raise MapSpecError(f"unknown function {n.value!r}", n.loc)
                return FUNCTIONS[n.value](walk(n.children[0]))
            case "neg":
                return -walk(n.children[0])
            case "pow":
                base, exponent = walk(n.children[0]), walk(n.children[1])
                if not allow_calls and not (exponent.is_integer and exponent.is_number):
                    raise MapSpecError("exponents must be integers", n.children[1].loc)
                return base**exponent
            case "bin":
                left, right = walk(n.children[0]), walk(n.children[1])
                if n.value == "+":
                    return left + right
                if n.value == "-":
                    return left - right
                if n.value == "*":
                    return left * right
                if right == 0:
                    raise MapSpecError("division by zero", n.children[1].loc)
                return left / right
        raise MapSpecError(f"unexpected node {n.kind}", n.loc)

    return walk(node)


def _coefficients(poly: sympy.Poly) -> np.ndarray:
    return np.array([complex(c) for c in reversed(poly.all_coeffs())], dtype=complex)


def parse_map(spec: str, params: Mapping[str, Any] | None = None) -> RationalMap:
    """Parses ``spec`` into a :class:`RationalMap` in lowest terms.

    Parameters
    ----------
    spec : str
        Expression in ``z``.
    params : mapping, optional
        Values for the other names, as numbers or literal strings.

    Raises
    ------
    MapSpecError
        Syntax errors (with offset), unbound names, degenerate maps.
    """
    ast = _parse(spec)
    expr = _to_sympy(ast, params or {}, allow_calls=False)
    if expr.has(sympy.zoo, sympy.nan, sympy.oo):
        raise MapSpecError("denominator is identically zero")
    expr = sympy.cancel(sympy.together(sympy.expand(expr)))
    num, den = sympy.fraction(expr)
    if den == 0:
        raise MapSpecError("denominator is identically zero")
    try:
        num_poly, den_poly = sympy.Poly(num, Z), sympy.Poly(den, Z)
    except sympy.PolynomialError as e:
        raise MapSpecError(f"not a rational function of z: {e}") from None
    lead = den_poly.LC()
    num_poly = sympy.Poly(sympy.expand(num / lead), Z)
    den_poly = sympy.Poly(sympy.expand(den / lead), Z)
    if max(num_poly.degree(), den_poly.degree()) < 1:
        raise MapSpecError("map is constant")

    exact = ExactForm.from_expressions(num_poly.as_expr(), den_poly.as_expr())
    rational = RationalMap(_coefficients(num_poly), _coefficients(den_poly), exact=exact, label=spec)
    _spot_check(rational, expr)
    logger.debug(
        f"Parsed {spec!r} as degree {rational.degree} "
        f"({'exact' if exact is not None else 'numeric'} coefficients)"
    )
    return rational


def _spot_check(rational: RationalMap, expr: sympy.Expr) -> None:
    fn = sympy.lambdify(Z, expr, modules="numpy")
    rng = np.random.default_rng(0)
    samples = rng.normal(size=5) + 1j * rng.normal(size=5)
    with np.errstate(all="ignore"):
        expected = np.asarray(fn(samples), dtype=complex) * np.ones(5)
    got = rational.values(samples)
    ok = np.isfinite(expected)
    if np.any(chordal_distance_array(expected[ok], got[ok]) > TOLERANCE.spot_check):
        raise MapSpecError("extracted coefficients do not reproduce the expression")


def parse_point(text: str, params: Mapping[str, Any] | None = None) -> SpherePoint:
    """A point literal: a constant expression or ``inf``."""
    if text.strip().lower() in INFINITY_WORDS:
        return SpherePoint.infinity()
    value = _to_sympy(_parse(text), params or {}, allow_calls=False, allow_variable=False)
    if value.has(sympy.zoo, sympy.oo):
        return SpherePoint.infinity()
    exact = to_element(value)
    return SpherePoint(complex(value), exact)


def parse_real(text: str) -> float:
    """A real constant, functions allowed, e.g. ``log(2)``."""
    value = _to_sympy(_parse(text), {}, allow_calls=True, allow_variable=False)
    number = complex(sympy.N(value))
    if abs(number.imag) > 0:
        raise MapSpecError(f"{text!r} is not real")
    return number.real


class WeightFunction:
    """A compiled real-valued weight expression in ``z``, vectorized over numpy arrays."""

    def __init__(self, text: str, expr: sympy.Expr):
        self.text = text
        self.expr = expr
        self._fn = sympy.lambdify(Z, expr, modules="numpy")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            out = np.real(np.asarray(self._fn(z), dtype=complex))
        return np.broadcast_to(out, z.shape).copy() if z.shape else float(out)

    def __repr__(self) -> str:
        return f"WeightFunction({self.text!r})"


def compile_weight(text: str, params: Mapping[str, Any] | None = None) -> WeightFunction:
    """Compiles a weight (potential or metric density) expression."""
    expr = _to_sympy(_parse(text), params or {}, allow_calls=True)
    return WeightFunction(text.strip(), expr)


def format_map(rational: RationalMap) -> str:
    """Pretty-prints a map so that parsing the text gives back the same coefficients."""

    def poly(coeffs: np.ndarray) -> str:
        terms = [
            format_complex(c) if k == 0 else f"{format_complex(c)}*z^{k}"
            for k, c in enumerate(coeffs)
            if c != 0
        ]
        return " + ".join(terms) or "0"

    if rational.is_polynomial:
        return poly(rational.numerator)
    return f"({poly(rational.numerator)})/({poly(rational.denominator)})"


def format_point(point: SpherePoint) -> str:
    return "inf" if point.is_infinite else format_complex(complex(point))


__all__ = [
    "INFINITY",
    "WeightFunction",
    "compile_weight",
    "format_map",
    "format_point",
    "parse_map",
    "parse_point",
    "parse_real",
]
