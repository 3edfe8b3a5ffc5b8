"""Closed-form smooth test functions.

Three variants cover everything the package evaluates operators against:
polynomials (exact rational arithmetic end to end), exponentials e^{a t}, and
sinusoids sin(a t + b).  Each variant knows every derivative in closed form,
so "numerical differentiation of f" never happens anywhere downstream; the
only approximate step in the package is operator evaluation itself.

Derivatives: polynomial by coefficient shift; (e^{a t})^{(k)} = a^k e^{a t};
sin(a t + b)^{(k)} = a^k sin(a t + b + k*pi/2), realised via the 4-cycle
sin, cos, -sin, -cos so no pi arithmetic enters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from mpmath import mp

from .exactalg import Poly, Rat, Scalar, format_rat, _as_rat

POLY = "poly"
EXP = "exp"
SIN = "sin"


class DerivativeCapExceeded(ValueError):
    """A derivative order beyond the declared smoothness cap was requested."""


def to_mpf(value):
    """Convert Rat/int/float/mpf to mpf at the ambient precision."""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / mp.mpf(value.denominator)
    return mp.mpf(value)


@dataclass(frozen=True)
class SmoothFunction:
    """Tagged closed-form function with exact derivative data.

    derivative_cap is None for the unbounded-smoothness variants shipped
    here; a finite cap makes order checks enforceable."""

    kind: str
    poly: Poly | None = None
    a: Rat = Fraction(0)
    b: Rat = Fraction(0)
    derivative_cap: int | None = None

    @classmethod
    def polynomial(cls, p: Poly | Sequence[Scalar]) -> SmoothFunction:
        if not isinstance(p, Poly):
            p = Poly(tuple(_as_rat(c) for c in p))
        return cls(POLY, poly=p)

    @classmethod
    def monomial(cls, r: int) -> SmoothFunction:
        if r < 0:
            raise ValueError("monomial degree must be >= 0")
        return cls(POLY, poly=Poly.variable() ** r)

    @classmethod
    def exponential(cls, a: Scalar) -> SmoothFunction:
        return cls(EXP, a=_as_rat(a))

    @classmethod
    def sinusoid(cls, a: Scalar, b: Scalar) -> SmoothFunction:
        return cls(SIN, a=_as_rat(a), b=_as_rat(b))

    def require_order(self, k: int) -> None:
        if self.derivative_cap is not None and k > self.derivative_cap:
            raise DerivativeCapExceeded(
                f"derivative order {k} exceeds cap {self.derivative_cap}"
            )

    @property
    def is_polynomial(self) -> bool:
        return self.kind == POLY

    def derivative_poly(self, k: int = 0) -> Poly:
        if self.kind != POLY:
            raise ValueError("closed-form polynomial requested of a non-polynomial")
        self.require_order(k)
        p = self.poly
        for _ in range(k):
            p = p.derivative()
        return p

    def eval_exact(self, t: Scalar, k: int = 0) -> Rat | None:
        """Exact rational value of the k-th derivative, or None when the
        value is irrational."""
        self.require_order(k)
        t = _as_rat(t)
        if self.kind == POLY:
            return self.derivative_poly(k)(t)
        if self.kind == EXP and self.a == 0:
            return Fraction(1) if k == 0 else Fraction(0)
        return None

    def eval_mpf(self, t, k: int = 0):
        """k-th derivative at t, computed at the ambient mpmath precision."""
        self.require_order(k)
        exact = None
        if isinstance(t, (Fraction, int)):
            exact = self.eval_exact(t, k)
        if exact is not None:
            return to_mpf(exact)
        tm = to_mpf(t)
        if self.kind == POLY:
            return self.derivative_poly(k)(tm)
        if self.kind == EXP:
            return to_mpf(self.a**k) * mp.exp(to_mpf(self.a) * tm)
        theta = to_mpf(self.a) * tm + to_mpf(self.b)
        cycle = k % 4
        if cycle == 0:
            base = mp.sin(theta)
        elif cycle == 1:
            base = mp.cos(theta)
        elif cycle == 2:
            base = -mp.sin(theta)
        else:
            base = -mp.cos(theta)
        return to_mpf(self.a**k) * base

    def values_iter(self, step: Rat):
        """Yield f(j*step) for j = 0, 1, 2, ... as mpf, cheaply.

        exp uses a running product of exp(a*step); sin uses the angle
        addition recurrence; polynomials evaluate pointwise.  Must be
        consumed inside the precision context it will be measured in."""
        step = _as_rat(step)
        if self.kind == POLY:
            t = Fraction(0)
            while True:
                yield to_mpf(self.poly(t))
                t += step
        elif self.kind == EXP:
            mult = mp.exp(to_mpf(self.a * step))
            value = mp.mpf(1)
            while True:
                yield value
                value = value * mult
        else:
            delta = to_mpf(self.a * step)
            sin_d, cos_d = mp.sin(delta), mp.cos(delta)
            s, c = mp.sin(to_mpf(self.b)), mp.cos(to_mpf(self.b))
            while True:
                yield s
                s, c = s * cos_d + c * sin_d, c * cos_d - s * sin_d

    def halfline_majorant(self) -> tuple[Rat, int, Rat]:
        """(C, d, a) with |f(t)| <= C*(1+t)^d * e^(a*t) for t >= 0, a >= 0."""
        if self.kind == POLY:
            bound = sum((abs(c) for c in self.poly.coeffs), Fraction(0))
            if not bound:
                bound = Fraction(1)
            return (bound, max(self.poly.degree, 0), Fraction(0))
        if self.kind == EXP:
            return (Fraction(1), 0, max(self.a, Fraction(0)))
        return (Fraction(1), 0, Fraction(0))

    def describe(self) -> str:
        if self.kind == POLY:
            return f"poly({self.poly.text('t')})"
        if self.kind == EXP:
            return f"exp({format_rat(self.a)}*t)"
        return f"sin({format_rat(self.a)}*t + {format_rat(self.b)})"

    def spec_text(self) -> str:
        """Round-trippable CLI grammar form."""
        if self.kind == POLY:
            coeffs = self.poly.coeffs or (Fraction(0),)
            return "poly:" + ",".join(format_rat(c) for c in coeffs)
        if self.kind == EXP:
            return f"exp:{format_rat(self.a)}"
        return f"sin:{format_rat(self.a)},{format_rat(self.b)}"


def parse_function(spec: str) -> SmoothFunction:
    """Parse the mini-grammar poly:c0,c1,... | exp:a | sin:a,b."""
    kind, sep, body = spec.partition(":")
    if not sep:
        raise ValueError(f"malformed function spec {spec!r}: missing ':'")
    try:
        parts = [Fraction(item.strip()) for item in body.split(",")] if body else []
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed function spec {spec!r}: {exc}") from None
    if kind == POLY:
        if not parts:
            raise ValueError("poly spec needs at least one coefficient")
        return SmoothFunction.polynomial(Poly(tuple(parts)))
    if kind == EXP:
        if len(parts) != 1:
            raise ValueError("exp spec takes exactly one rate")
        return SmoothFunction.exponential(parts[0])
    if kind == SIN:
        if len(parts) != 2:
            raise ValueError("sin spec takes frequency and phase")
        return SmoothFunction.sinusoid(parts[0], parts[1])
    raise ValueError(f"unknown function kind {kind!r}")
