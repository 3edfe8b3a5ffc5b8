"""Symbolic central moments mu_{n,s}(x) = (S_n psi_x^s)(x).

The whole table is generated from three seeds and one recursion.  Seeds:
mu_{n,0} = 1, mu_{n,1} = the family's declared first moment (zero for the
pure exponential-type built-ins).  Recursion, valid for every family whose
derivative identity has index sequence lambda_n:

    mu_{n,s+1} = mu_{n,1} * mu_{n,s}
                 + (phi / lambda_n) * (s * mu_{n,s-1} + d/dx mu_{n,s})

Everything stays inside MomentPoly arithmetic, so the table is exact.  For
lambda_n = n the expansion of mu_{n,s} in powers of 1/n is finite with
polynomial coefficients g_{s,j} (moment_expansion), the deepest coefficient
has the closed form

    g_{2s,2s}   = (2s)!/(2^s s!) * phi^s
    g_{2s+1,2s+1} = s (2s+1)!/(3 * 2^s s!) * phi^s * phi'

(leading_term_closed_form), and the shallowest nonzero exponent is
floor((s+1)/2) (vanishing_order).
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from fractions import Fraction

from .exactalg import (
    LaurentSeries,
    MomentPoly,
    Poly,
    RatFuncN,
    laurent_at_infinity,
)
from .operators import OperatorFamily

MAX_MOMENT_ORDER = 64


class ZeroMoment(ValueError):
    """The moment is identically zero, so it has no vanishing order; callers
    treat this as order +infinity."""


class OrderTooLarge(ValueError):
    """A moment order beyond the supported window was requested."""


@dataclass(frozen=True)
class MomentTable:
    """Central moments of one family for s = 0..s_max."""

    family_id: str
    moments: tuple[MomentPoly, ...]

    @property
    def s_max(self) -> int:
        return len(self.moments) - 1

    def moment(self, s: int) -> MomentPoly:
        if not 0 <= s <= self.s_max:
            raise OrderTooLarge(f"moment order {s} outside table (0..{self.s_max})")
        return self.moments[s]


_CACHE: "weakref.WeakKeyDictionary[OperatorFamily, list[MomentPoly]]" = (
    weakref.WeakKeyDictionary()
)


def central_moments(family: OperatorFamily, s_max: int) -> MomentTable:
    """Moment table for s = 0..s_max, memoised per family."""
    if s_max < 0:
        raise ValueError("s_max must be >= 0")
    if s_max > MAX_MOMENT_ORDER:
        raise OrderTooLarge(f"moment order {s_max} above cap {MAX_MOMENT_ORDER}")
    known = _CACHE.get(family)
    if known is None:
        known = [MomentPoly.const(1), family.mu1]
        _CACHE[family] = known
    phi_over_lambda = MomentPoly.from_poly(family.phi) * (
        RatFuncN.const(1) / family.lambda_n
    )
    while len(known) <= s_max:
        s = len(known) - 1
        nxt = family.mu1 * known[s] + phi_over_lambda * (
            s * known[s - 1] + known[s].dx()
        )
        known.append(nxt)
    return MomentTable(family.id, tuple(known[: s_max + 1]))


def _monomial_exponent(den: Poly) -> int | None:
    """Degree k when den = n^k, else None (den is monic by construction)."""
    nonzero = [i for i, c in enumerate(den.coeffs) if c != 0]
    if len(nonzero) == 1:
        return nonzero[0]
    return None


def moment_expansion(mu: MomentPoly, J: int | None = None) -> dict[int, Poly]:
    """Coefficients of n^{-j}: mu = sum_j g_j(x) n^{-j} + O(n^{-(J+1)}).

    J = None demands the finite exact case (every coefficient denominator a
    pure power of n) and returns all of it; otherwise the expansion is
    truncated at J exactly."""
    if J is None:
        deepest = 0
        for _power, coeff in mu.items():
            k = _monomial_exponent(coeff.den)
            if k is None:
                raise ValueError(
                    "expansion is infinite; pass an explicit truncation order J"
                )
            lowest = next(i for i, c in enumerate(coeff.num.coeffs) if c != 0)
            deepest = max(deepest, k - lowest)
        J = deepest
    out: dict[int, dict[int, Fraction]] = {}
    for power, coeff in mu.items():
        series = laurent_at_infinity(coeff, J)
        for j, value in series.nonzero().items():
            out.setdefault(j, {})[power] = value
    result: dict[int, Poly] = {}
    for j in sorted(out):
        coeffs = out[j]
        top = max(coeffs)
        poly = Poly(tuple(coeffs.get(i, Fraction(0)) for i in range(top + 1)))
        if not poly.is_zero:
            result[j] = poly
    return result


def leading_term_closed_form(order: int, phi: Poly) -> Poly:
    """The deepest expansion coefficient g_{order,order} in closed form."""
    if order < 0:
        raise ValueError("moment order must be >= 0")
    half, odd = divmod(order, 2)
    base = Fraction(math.factorial(order), 2**half * math.factorial(half))
    if not odd:
        return (phi**half) * base
    return (phi**half) * phi.derivative() * (base * Fraction(half, 3))


def vanishing_order(mu: MomentPoly) -> int:
    """Smallest j with a nonzero n^{-j} coefficient, computed exactly from
    the leading behaviour of each rational-function coefficient."""
    if mu.is_zero:
        raise ZeroMoment("moment is identically zero")
    return min(coeff.order_at_infinity for _power, coeff in mu.items())


def raw_moment(table: MomentTable, r: int) -> MomentPoly:
    """(S_n e_r)(x) recovered from central moments by the binomial
    transform sum_m C(r,m) x^{r-m} mu_{n,m}(x)."""
    if r < 0:
        raise ValueError("monomial degree must be >= 0")
    if r > table.s_max:
        raise OrderTooLarge(
            f"raw moment of degree {r} needs central moments up to {r}"
        )
    x = Poly.variable()
    total = MomentPoly()
    for m in range(r + 1):
        total = total + table.moment(m) * (x ** (r - m) * math.comb(r, m))
    return total
