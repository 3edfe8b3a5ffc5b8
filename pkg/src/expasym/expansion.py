"""Asymptotic expansions of (S_n f)^{(r)}(x) in powers of 1/n.

Three views of the same Taylor-plus-moments bookkeeping:

  truncated_sum        sum_{s<=2q} mu_{n,s}(x) f^{(s)}(x)/s!, the finitely
                       evaluable part of the expansion at fixed n;
  complete_coeffs      regrouped by powers of 1/n (index sequence exactly n
                       required, since only then is each mu_{n,s} a finite
                       Laurent series): a_k(x) = sum_s f^{(s)} g_{s,k}/s!;
  derivative_terms     d^r/dx^r of the truncated sum via the Leibniz rule,
                       one term per surviving (source order, Leibniz split).

voronovskaja_limit is the r-times differentiated second-order limit
lim n [(S_n f)^{(r)} - f^{(r)}] = (phi f'')^{(r)} / 2, valid for families
with index sequence n and vanishing first moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .exactalg import MomentPoly, Poly, Rat, RatFuncN, Scalar, _as_rat
from .functions import DerivativeCapExceeded, SmoothFunction, to_mpf
from .moments import MomentTable, central_moments, moment_expansion
from .operators import Number, OperatorFamily, working

__all__ = [
    "DerivativeCapExceeded",
    "ExpansionCoefficient",
    "ExpansionTerm",
    "NotPureExponentialIndex",
    "SmoothFunction",
    "complete_coeffs",
    "derivative_terms",
    "evaluate_derivative_expansion",
    "psi_power_derivative",
    "truncated_sum",
    "voronovskaja_limit",
]


class NotPureExponentialIndex(ValueError):
    """The requested regrouping needs index sequence exactly n."""


def _require_pure(family: OperatorFamily) -> None:
    if not family.is_pure_exponential:
        raise NotPureExponentialIndex(
            f"family {family.id!r} has index sequence "
            f"{family.lambda_n.text()} and first moment "
            f"{family.mu1.text()}; need lambda_n = n and mu_1 = 0"
        )


@dataclass(frozen=True)
class ExpansionTerm:
    """One Leibniz term of (d/dx)^r applied to the truncated sum: the
    source moment order s_source, the split index i, the derivative order
    s = s_source + r - i that hits f, and the x-coefficient
    C(r, i) (d/dx)^i mu_{n,s_source} / s_source!."""

    s_source: int
    i: int
    s: int
    coefficient: MomentPoly


@dataclass(frozen=True)
class ExpansionCoefficient:
    """Coefficient of n^{-k}: a_k = sum over stored (s, poly) pairs of
    f^{(s)}(x) poly(x), where poly = g_{s,k}/s!."""

    k: int
    terms: tuple[tuple[int, Poly], ...]

    def term(self, s: int) -> Poly:
        for order, poly in self.terms:
            if order == s:
                return poly
        return Poly()

    def orders(self) -> tuple[int, ...]:
        return tuple(order for order, _poly in self.terms)


def truncated_sum(
    family: OperatorFamily,
    f: SmoothFunction,
    x: Scalar,
    n: Scalar,
    q: int,
    prec: int | None = None,
) -> Number:
    """sum_{s=0}^{2q} mu_{n,s}(x) f^{(s)}(x) / s!; exact for polynomial f
    and rational n, x."""
    if q < 0:
        raise ValueError("q must be >= 0")
    f.require_order(2 * q)
    table = central_moments(family, 2 * q)
    if f.is_polynomial:
        total = Fraction(0)
        for s in range(2 * q + 1):
            weight = table.moment(s).eval(n, x)
            if weight:
                total += weight * f.eval_exact(x, s) / math.factorial(s)
        return total
    with working(prec):
        total = mp.mpf(0)
        for s in range(2 * q + 1):
            weight = table.moment(s).eval(n, x)
            if weight:
                total += to_mpf(weight) * f.eval_mpf(x, s) / math.factorial(s)
        return total


def complete_coeffs(family: OperatorFamily, q: int) -> list[ExpansionCoefficient]:
    """Expansion coefficients a_0..a_q with the f-derivative slots kept
    symbolic; only s in [k, 2k] can contribute to a_k."""
    if q < 0:
        raise ValueError("q must be >= 0")
    if family.lambda_n != RatFuncN.index():
        raise NotPureExponentialIndex(
            f"family {family.id!r} has index sequence {family.lambda_n.text()}"
        )
    table = central_moments(family, 2 * q)
    per_order = [moment_expansion(table.moment(s)) for s in range(2 * q + 1)]
    out = []
    for k in range(q + 1):
        terms = []
        for s in range(2 * q + 1):
            g = per_order[s].get(k)
            if g is None:
                continue
            terms.append((s, g * Fraction(1, math.factorial(s))))
        out.append(ExpansionCoefficient(k, tuple(terms)))
    return out


def derivative_terms(
    family: OperatorFamily, q: int, r: int
) -> list[ExpansionTerm]:
    """All Leibniz terms of (d/dx)^r sum_{s<=2q} mu_{n,s} f^{(s)}/s!,
    ordered by (s_source, i), identically-zero coefficients dropped."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if r < 0:
        raise ValueError("r must be >= 0")
    table = central_moments(family, 2 * q)
    out = []
    for s_source in range(2 * q + 1):
        base = table.moment(s_source) * Fraction(1, math.factorial(s_source))
        current = base
        for i in range(r + 1):
            coefficient = current * math.comb(r, i)
            if not coefficient.is_zero:
                out.append(
                    ExpansionTerm(s_source, i, s_source + r - i, coefficient)
                )
            current = current.dx()
    return out


def evaluate_derivative_expansion(
    family: OperatorFamily,
    f: SmoothFunction,
    x: Scalar,
    n: Scalar,
    q: int,
    r: int,
    prec: int | None = None,
) -> Number:
    """The derivative expansion evaluated at rational (n, x); the
    prediction that operator evaluations are compared against."""
    f.require_order(2 * q + r)
    terms = derivative_terms(family, q, r)
    if f.is_polynomial:
        total = Fraction(0)
        for term in terms:
            weight = term.coefficient.eval(n, x)
            if weight:
                total += weight * f.eval_exact(x, term.s)
        return total
    with working(prec):
        total = mp.mpf(0)
        for term in terms:
            weight = term.coefficient.eval(n, x)
            if weight:
                total += to_mpf(weight) * f.eval_mpf(x, term.s)
        return total


def voronovskaja_limit(
    family: OperatorFamily,
    f: SmoothFunction,
    x: Scalar,
    r: int,
    prec: int | None = None,
) -> Number:
    """lim_n n [(S_n f)^{(r)}(x) - f^{(r)}(x)] = (phi f'')^{(r)}(x) / 2,
    expanded by Leibniz since phi has degree at most 2."""
    if r < 0:
        raise ValueError("r must be >= 0")
    _require_pure(family)
    f.require_order(r + 2)
    x = _as_rat(x)
    phi_derivs = [family.phi]
    while not phi_derivs[-1].is_zero:
        phi_derivs.append(phi_derivs[-1].derivative())
    splits = [
        (i, Fraction(math.comb(r, i), 2) * phi_derivs[i](x))
        for i in range(min(r, len(phi_derivs) - 1) + 1)
    ]
    if f.is_polynomial:
        return sum(
            (w * f.eval_exact(x, 2 + r - i) for i, w in splits if w),
            Fraction(0),
        )
    with working(prec):
        total = mp.mpf(0)
        for i, w in splits:
            if w:
                total += to_mpf(w) * f.eval_mpf(x, 2 + r - i)
        return total


def psi_power_derivative(m: int, s: int) -> Rat:
    """Scalar factor in ((t-x)^m f)^{(s)} at t = x.  Leibniz splits the
    derivative over both factors, but (t-x)^m has a zero of exact order m,
    so only the split putting exactly m derivatives on it survives:
    C(s, m) m! f^{(s-m)}(x).  Returns C(s, m) m!, zero when m > s."""
    if m < 0 or s < 0:
        raise ValueError("orders must be >= 0")
    if m > s:
        return Fraction(0)
    return Fraction(math.comb(s, m) * math.factorial(m))
