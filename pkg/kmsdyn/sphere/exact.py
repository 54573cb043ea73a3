"""
Exact Gaussian-rational arithmetic for maps whose coefficients lie in Q(i).

Points are ``QQ_I`` domain elements; ``None`` stands for infinity.
"""

import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import BasePolynomialError

from ..config.options import TOLERANCE
from ..utils.logging import get_logger
from .point import INFINITY, cluster_points
from .roots import polynomial_roots

logger = get_logger("kmsdyn_exact")

Z = sympy.Symbol("z")

_FAILURES = (BasePolynomialError, NotImplementedError, TypeError, ValueError, ZeroDivisionError)


def to_element(value) -> object | None:
    """Converts a sympy number to a QQ_I element, or None if it is not in Q(i)."""
    try:
        return QQ_I.from_sympy(sympy.expand(sympy.nsimplify(value) if isinstance(value, float) else value))
    except _FAILURES + (sympy.SympifyError,):
        return None


def to_complex(e) -> complex:
    return complex(float(e.x), float(e.y))


def bit_size(e) -> int:
    """Largest numerator or denominator bit length among both parts."""
    return max(
        max(int(part.numerator).bit_length(), int(part.denominator).bit_length())
        for part in (e.x, e.y)
    )


def _horner(coeffs, x):
    acc = QQ_I.zero
    for c in coeffs:
        acc = acc * x + c
    return acc


def _as_poly(element) -> sympy.Poly:
    return sympy.Poly(QQ_I.to_sympy(element), Z, domain=QQ_I)


class ExactForm:
    """Numerator and denominator of a map as polynomials over QQ_I."""

    def __init__(self, numerator: sympy.Poly, denominator: sympy.Poly):
        self.numerator = numerator
        self.denominator = denominator
        self.degree = int(max(numerator.degree(), denominator.degree()))
        self._p = [QQ_I.from_sympy(c) for c in numerator.all_coeffs()]
        self._q = [QQ_I.from_sympy(c) for c in denominator.all_coeffs()]

    @classmethod
    def from_expressions(cls, numerator, denominator) -> "ExactForm | None":
        try:
            p = sympy.Poly(numerator, Z, domain=QQ_I)
            q = sympy.Poly(denominator, Z, domain=QQ_I)
        except _FAILURES:
            return None
        if p.is_zero or q.is_zero:
            return None
        return cls(p, q)

    def evaluate(self, x):
        """Exact image of ``x``; None (infinity) maps and is mapped consistently."""
        if x is None:
            dp, dq = self.numerator.degree(), self.denominator.degree()
            if dp > dq:
                return None
            if dp < dq:
                return QQ_I.zero
            return QQ_I.exquo(self._p[0], self._q[0])
        den = _horner(self._q, x)
        if den == QQ_I.zero:
            return None
        return QQ_I.exquo(_horner(self._p, x), den)

    def _fibre_polynomial(self, w) -> sympy.Poly:
        """Polynomial whose roots (with deficiency at infinity) are the preimages of w."""
        if w is None:
            return self.denominator
        return self.numerator - self.denominator * _as_poly(w)

    def valency(self, x) -> int:
        w = self.evaluate(x)
        target = self._fibre_polynomial(w)
        if x is None:
            return self.degree - int(target.degree())
        point = QQ_I.to_sympy(x)
        order = 0
        while target.eval(point) == 0:
            target = target.diff(Z)
            order += 1
        return order

    def _roots_with_multiplicity(self, poly: sympy.Poly) -> list[tuple[object | None, complex, int]]:
        result = []
        if poly.degree() < 1:
            return result
        _, factors = poly.sqf_list()
        for factor, multiplicity in factors:
            if factor.degree() == 1:
                a1, a0 = (QQ_I.from_sympy(c) for c in factor.all_coeffs())
                root = QQ_I.exquo(-a0, a1)
                result.append((root, to_complex(root), multiplicity))
            else:
                coeffs = [complex(c) for c in reversed(factor.all_coeffs())]
                for centroid, size, _ in cluster_points(polynomial_roots(coeffs), TOLERANCE.cluster):
                    result.append((None, centroid, multiplicity * size))
        return result

    def critical_points(self) -> list[tuple[object | None, complex, int]] | None:
        """``(exact or None, value, valency)`` triples, or None if sympy cannot factor."""
        p, q = self.numerator, self.denominator
        try:
            w = p.diff(Z) * q - p * q.diff(Z)
            found = [(e, v, m + 1) for e, v, m in self._roots_with_multiplicity(w)]
        except _FAILURES as e:
            logger.debug(f"Exact critical points unavailable: {e}")
            return None
        deficiency = 2 * self.degree - 2 - int(w.degree())
        if deficiency > 0:
            found.append(("inf", INFINITY, deficiency + 1))
        return found

    def preimages(self, w) -> list[tuple[object | None, complex, int]] | None:
        """Preimages of an exact point with multiplicities, or None if sympy cannot factor."""
        try:
            fibre = self._fibre_polynomial(w)
            found = self._roots_with_multiplicity(fibre)
        except _FAILURES as e:
            logger.debug(f"Exact preimages unavailable: {e}")
            return None
        deficiency = self.degree - int(fibre.degree())
        if deficiency > 0:
            found.append(("inf", INFINITY, deficiency))
        return found
