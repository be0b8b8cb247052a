"""Multivariate polynomials and rational functions over exact rationals.

These are the closed-form coefficients of every section in the package.
Each carrier evaluates to a value plus a full gradient (a 1-jet), which
is all any bracket formula downstream consumes.  Rational functions are
kept as unreduced numerator/denominator pairs; evaluation guards against
vanishing denominators instead of attempting multivariate gcd.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactmat import F0, F1, fr

Monomial = tuple[int, ...]


class ZeroDenominatorError(ZeroDivisionError):
    """A rational coefficient was evaluated where its denominator vanishes."""


def _canonical(nvars: int, terms: Mapping[Monomial, Fraction]) -> tuple[tuple[Monomial, Fraction], ...]:
    cleaned = {}
    for exps, coeff in terms.items():
        if len(exps) != nvars:
            raise ValueError("monomial arity does not match the variable count")
        if coeff != 0:
            key = tuple(int(e) for e in exps)
            cleaned[key] = cleaned.get(key, F0) + coeff
    return tuple(sorted((k, c) for k, c in cleaned.items() if c != 0))


@dataclass(frozen=True)
class Poly:
    """A multivariate polynomial as a sorted tuple of (exponents, coefficient)."""

    nvars: int
    terms: tuple[tuple[Monomial, Fraction], ...]

    @staticmethod
    def from_dict(nvars: int, terms: Mapping[Monomial, Fraction]) -> "Poly":
        return Poly(nvars, _canonical(nvars, {k: fr(v) for k, v in terms.items()}))

    @staticmethod
    def constant(nvars: int, value) -> "Poly":
        return Poly.from_dict(nvars, {(0,) * nvars: fr(value)})

    @staticmethod
    def variable(nvars: int, index: int) -> "Poly":
        exps = tuple(1 if i == index else 0 for i in range(nvars))
        return Poly.from_dict(nvars, {exps: F1})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Poly") -> "Poly":
        acc = dict(self.terms)
        for exps, coeff in other.terms:
            acc[exps] = acc.get(exps, F0) + coeff
        return Poly(self.nvars, _canonical(self.nvars, acc))

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        acc: dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                key = tuple(a + b for a, b in zip(e1, e2))
                acc[key] = acc.get(key, F0) + c1 * c2
        return Poly(self.nvars, _canonical(self.nvars, acc))

    def scale(self, c) -> "Poly":
        c = fr(c)
        return Poly(self.nvars, _canonical(self.nvars, {e: c * k for e, k in self.terms}))

    def partial(self, index: int) -> "Poly":
        acc: dict[Monomial, Fraction] = {}
        for exps, coeff in self.terms:
            e = exps[index]
            if e:
                key = tuple(x - 1 if i == index else x for i, x in enumerate(exps))
                acc[key] = acc.get(key, F0) + coeff * e
        return Poly(self.nvars, _canonical(self.nvars, acc))

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        total = F0
        for exps, coeff in self.terms:
            term = coeff
            for x, e in zip(point, exps):
                for _ in range(e):
                    term *= x
            total += term
        return total

    def jet(self, point: Sequence[Fraction]) -> tuple[Fraction, tuple[Fraction, ...]]:
        value = self.evaluate(point)
        grad = tuple(self.partial(i).evaluate(point) for i in range(self.nvars))
        return value, grad


@dataclass(frozen=True)
class RationalFn:
    """A quotient of polynomials, stored unreduced."""

    num: Poly
    den: Poly

    def __post_init__(self):
        if self.num.nvars != self.den.nvars:
            raise ValueError("numerator and denominator arity differ")
        if self.den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @staticmethod
    def from_poly(p: Poly) -> "RationalFn":
        return RationalFn(p, Poly.constant(p.nvars, 1))

    @staticmethod
    def constant(nvars: int, value) -> "RationalFn":
        return RationalFn.from_poly(Poly.constant(nvars, value))

    @staticmethod
    def variable(nvars: int, index: int) -> "RationalFn":
        return RationalFn.from_poly(Poly.variable(nvars, index))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RationalFn") -> "RationalFn":
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        return self + (-other)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFn") -> "RationalFn":
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def scale(self, c) -> "RationalFn":
        return RationalFn(self.num.scale(c), self.den)

    def equals(self, other: "RationalFn") -> bool:
        """Exact equality as functions, by cross multiplication."""
        return (self.num * other.den - other.num * self.den).is_zero()

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDenominatorError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def jet(self, point: Sequence[Fraction]) -> tuple[Fraction, tuple[Fraction, ...]]:
        nv, ng = self.num.jet(point)
        dv, dg = self.den.jet(point)
        if dv == 0:
            raise ZeroDenominatorError("denominator vanishes at the evaluation point")
        value = nv / dv
        grad = tuple((gn * dv - nv * gd) / (dv * dv) for gn, gd in zip(ng, dg))
        return value, grad


Coefficient = Poly | RationalFn


def as_rational(f: Coefficient | Fraction | int) -> RationalFn:
    if isinstance(f, RationalFn):
        return f
    if isinstance(f, Poly):
        return RationalFn.from_poly(f)
    raise TypeError("expected a Poly or RationalFn (wrap constants explicitly)")


# ---------------------------------------------------------------------------
# serialization: a polynomial is a list of {exponents, coeff} entries with
# coefficients as canonical "p/q" strings; a rational function is a pair.


def scalar_to_str(x: Fraction) -> str:
    x = fr(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def scalar_from_str(s: str) -> Fraction:
    return Fraction(s)


def poly_to_json(p: Poly) -> list[dict]:
    return [{"exponents": list(e), "coeff": scalar_to_str(c)} for e, c in p.terms]


def poly_from_json(nvars: int, data: Iterable[Mapping]) -> Poly:
    return Poly.from_dict(nvars, {tuple(t["exponents"]): scalar_from_str(t["coeff"])
                                  for t in data})


def rational_to_json(f: RationalFn) -> dict:
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def rational_from_json(nvars: int, data: Mapping) -> RationalFn:
    return RationalFn(poly_from_json(nvars, data["num"]), poly_from_json(nvars, data["den"]))
