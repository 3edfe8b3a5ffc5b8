"""Direct evaluation of exponential-type operator families.

This module is the ground-truth side of the package: each family evaluates
(S_n f)^{(r)}(x) by its own summation or quadrature rule, sharing no code
with the symbolic moment/expansion machinery it is checked against.

Families and rules:

* bernstein on [0, 1], phi = x(1-x):
      (B_n f)^{(r)}(x) = n!/(n-r)! * sum_{k=0}^{n-r} Delta^r_{1/n} f(k/n)
                         * C(n-r,k) x^k (1-x)^{n-r-k}
  evaluated exactly over the rationals for polynomial f and rational x.
* szasz on [0, oo), phi = x:
      (S_n f)^{(r)}(x) = n^r e^{-nx} sum_k (nx)^k/k! * Delta^r_{1/n} f(k/n)
* baskakov on [0, oo), phi = x(1+x):
      (V_n f)^{(r)}(x) = n(n+1)...(n+r-1) * sum_k Delta^r_{1/n} f(k/n)
                         * C(n+r+k-1,k) x^k (1+x)^{-n-r-k}
* gauss_weierstrass on (-oo, oo), phi = 1:
      (W_n f)^{(r)}(x) = (n/2)^{r/2} sum_i v_i H_r(u_i) f(x + u_i sqrt(2/n))
  by Gauss-Hermite quadrature (normalised weights v_i = w_i/sqrt(pi)),
  convergence checked by doubling the order.

Infinite series are truncated under a proven tail bound: sum at least
K = max(ceil(4 n x), 64) terms, then continue while
(current tail majorant) >= tol, where the majorant combines the weight's
geometric decay beyond K with the declared polynomial growth bound of f.
The reported value is then within tol of the infinite sum.

Precision: all floating work uses mpmath at a configurable bit count
(default 256, minimum 64); BigFloat is the mpf type.  Evaluators return
exact Fractions whenever every ingredient is rational.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Union

from mpmath import mp, mpf as BigFloat

from .exactalg import MomentPoly, Poly, Rat, RatFuncN, Scalar, _as_rat, format_rat
from .functions import SmoothFunction, to_mpf

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 64
GUARD_BITS = 32
DEFAULT_TOL = Fraction(1, 10**30)

Number = Union[Rat, BigFloat]


class DerivativeOrderExceedsDegree(ValueError):
    """Bernstein derivative order r exceeds the polynomial degree n."""


class GrowthBoundViolated(ValueError):
    """f grows too fast for a series on an unbounded interval."""


class QuadratureNotConverged(ArithmeticError):
    """Doubling the quadrature order moved the result beyond tolerance."""


def resolve_precision(prec: int | None) -> int:
    bits = DEFAULT_PRECISION_BITS if prec is None else int(prec)
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision {bits} below minimum {MIN_PRECISION_BITS} bits")
    return bits


def working(prec: int | None):
    """Precision context for evaluator internals (guard bits included)."""
    return mp.workprec(resolve_precision(prec) + GUARD_BITS)


@dataclass(frozen=True)
class Interval:
    """Rational-endpoint interval; None means the side is infinite."""

    lower: Rat | None
    upper: Rat | None
    lower_closed: bool = True
    upper_closed: bool = True

    def contains(self, x: Rat) -> bool:
        if self.lower is not None:
            if x < self.lower or (x == self.lower and not self.lower_closed):
                return False
        if self.upper is not None:
            if x > self.upper or (x == self.upper and not self.upper_closed):
                return False
        return True

    def is_interior(self, x: Rat) -> bool:
        if self.lower is not None and x <= self.lower:
            return False
        if self.upper is not None and x >= self.upper:
            return False
        return True

    @property
    def unbounded(self) -> bool:
        return self.lower is None or self.upper is None

    def text(self) -> str:
        left = "(-oo" if self.lower is None else ("[" if self.lower_closed else "(") + format_rat(self.lower)
        right = "oo)" if self.upper is None else format_rat(self.upper) + ("]" if self.upper_closed else ")")
        return f"{left}, {right}"


def _sign(v: Rat) -> int:
    return (v > 0) - (v < 0)


def _sign_affine_sqrt(p: Rat, q: Rat, disc: Rat) -> int:
    """Sign of p + q*sqrt(disc) for disc > 0, exactly."""
    if q == 0:
        return _sign(p)
    if p == 0:
        return _sign(q)
    if _sign(p) == _sign(q):
        return _sign(p)
    lhs, rhs = p * p, q * q * disc
    if lhs == rhs:
        return 0
    return _sign(p) if lhs > rhs else _sign(q)


def _phi_has_root_in_open(phi: Poly, interval: Interval) -> bool:
    """Exact root location for deg <= 2 over the open interval."""

    def inside(root: Rat) -> bool:
        if interval.lower is not None and root <= interval.lower:
            return False
        if interval.upper is not None and root >= interval.upper:
            return False
        return True

    if phi.degree <= 0:
        return False
    if phi.degree == 1:
        return inside(-phi.coeff(0) / phi.coeff(1))
    a, b, c = phi.coeff(2), phi.coeff(1), phi.coeff(0)
    disc = b * b - 4 * a * c
    if disc < 0:
        return False
    if disc == 0:
        return inside(-b / (2 * a))
    for sigma in (1, -1):
        ok = True
        if interval.lower is not None:
            # sign of root - lower = sign((-b - 2a*lower) + sigma*sqrt(disc)) * sign(a)
            if _sign_affine_sqrt(-b - 2 * a * interval.lower, Fraction(sigma), disc) * _sign(a) <= 0:
                ok = False
        if ok and interval.upper is not None:
            if _sign_affine_sqrt(-b - 2 * a * interval.upper, Fraction(sigma), disc) * _sign(a) >= 0:
                ok = False
        if ok:
            return True
    return False


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """Descriptor of one positive linear operator family.

    lambda_n is the index sequence of the defining derivative identity
    (S_n f)'(x) = (lambda_n/phi(x)) ((S_n(psi_x f))(x) - mu1(x)(S_n f)(x));
    the built-ins all have lambda_n = n and mu1 = 0.  evaluator names the
    direct rule in _EVALUATORS, or is None for purely symbolic families."""

    id: str
    interval: Interval
    phi: Poly
    lambda_n: RatFuncN
    mu1: MomentPoly
    evaluator: str | None

    @property
    def is_pure_exponential(self) -> bool:
        return self.lambda_n == RatFuncN.index() and self.mu1.is_zero

    def require_point(self, x: Rat, interior: bool = False) -> None:
        x = _as_rat(x)
        if interior:
            if not self.interval.is_interior(x):
                raise ValueError(
                    f"x = {format_rat(x)} is not interior to {self.interval.text()}"
                )
        elif not self.interval.contains(x):
            raise ValueError(
                f"x = {format_rat(x)} outside {self.interval.text()}"
            )


_EVALUATOR_NAMES = frozenset({"bernstein", "szasz", "baskakov", "gauss"})


def make_family(
    family_id: str,
    interval: Interval,
    phi: Poly,
    lambda_n: RatFuncN | None = None,
    mu1: MomentPoly | None = None,
    evaluator: str | None = None,
) -> OperatorFamily:
    """Validated constructor: phi quadratic at most and zero-free on the
    open interval; lambda_n ~ alpha*n with alpha > 0."""
    if phi.is_zero:
        raise ValueError("characteristic polynomial must be nonzero")
    if phi.degree > 2:
        raise ValueError("characteristic polynomial degree above 2 unsupported")
    if (
        interval.lower is not None
        and interval.upper is not None
        and interval.lower >= interval.upper
    ):
        raise ValueError("empty interval")
    if _phi_has_root_in_open(phi, interval):
        raise ValueError("characteristic polynomial vanishes inside the interval")
    lambda_n = RatFuncN.index() if lambda_n is None else lambda_n
    if lambda_n.is_zero or lambda_n.order_at_infinity != -1:
        raise ValueError("index sequence must grow like a positive multiple of n")
    alpha = lambda_n.num.lead / lambda_n.den.lead
    if alpha <= 0:
        raise ValueError("index sequence must grow like a positive multiple of n")
    mu1 = MomentPoly() if mu1 is None else mu1
    if evaluator is not None and evaluator not in _EVALUATOR_NAMES:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    return OperatorFamily(family_id, interval, phi, lambda_n, mu1, evaluator)


def _growth_stretch(rate: Rat, n: int) -> Rat:
    """Exact rational upper bound for e^(rate/n), rate >= 0.

    Uses e^z <= 1/(1-z) on z < 1/2 (tight for the small steps the series
    sees) and e^z <= 3^ceil(z) otherwise."""
    z = Fraction(rate, 1) / n
    if z == 0:
        return Fraction(1)
    if z < Fraction(1, 2):
        return 1 / (1 - z)
    return Fraction(3) ** math.ceil(z)


def check_growth(
    family: OperatorFamily,
    f: SmoothFunction,
    n: int | None = None,
    x: Scalar | None = None,
) -> None:
    """Reject (f, n, x) the family's series provably cannot sum.

    Only the baskakov weights lose to exponential growth: their ratio tends
    to x/(1+x) > 0, so the certified per-step factor q * e^(a/n) must stay
    below 1.  The bound is conservative (it uses the rational stretch in
    place of e^(a/n)); everything it accepts is summed rigorously."""
    if family.evaluator != "baskakov" or n is None or x is None:
        return
    _, _, rate = f.halfline_majorant()
    if rate == 0:
        return
    x = _as_rat(x)
    if x <= 0:
        return
    q = x / (1 + x)
    if q * _growth_stretch(rate, n) >= 1:
        raise GrowthBoundViolated(
            f"{f.describe()} outruns the {family.id} weights at "
            f"x = {format_rat(x)}, n = {n}"
        )


def forward_difference(f: SmoothFunction, t0: Scalar, h: Scalar, r: int, prec: int | None = None) -> Number:
    """Delta^r_h f(t0) = sum_i (-1)^(r-i) C(r,i) f(t0 + i h); exact whenever
    f is rational-valued at the nodes."""
    if r < 0:
        raise ValueError("difference order must be >= 0")
    t0, h = _as_rat(t0), _as_rat(h)
    exact = [f.eval_exact(t0 + i * h) for i in range(r + 1)]
    if all(v is not None for v in exact):
        return sum(
            (-1) ** (r - i) * math.comb(r, i) * exact[i] for i in range(r + 1)
        )
    with working(prec):
        values = [f.eval_mpf(t0 + i * h) for i in range(r + 1)]
        return sum(
            (-1) ** (r - i) * math.comb(r, i) * values[i] for i in range(r + 1)
        )


def _difference_signs(r: int) -> list[int]:
    return [(-1) ** (r - i) * math.comb(r, i) for i in range(r + 1)]


def bernstein_eval(
    f: SmoothFunction,
    n: int,
    x: Scalar,
    r: int = 0,
    prec: int | None = None,
) -> Number:
    """(B_n f)^{(r)}(x); exact rational for polynomial f at rational x."""
    x = _as_rat(x)
    if r < 0:
        raise ValueError("derivative order must be >= 0")
    if n < 1:
        raise ValueError("index n must be >= 1")
    if r > n:
        raise DerivativeOrderExceedsDegree(f"derivative order {r} exceeds n = {n}")
    if not (0 <= x <= 1):
        raise ValueError(f"x = {format_rat(x)} outside [0, 1]")
    m = n - r
    perm = math.perm(n, r)
    h = Fraction(1, n)
    if x == 0:
        return perm * forward_difference(f, Fraction(0), h, r, prec)
    if x == 1:
        return perm * forward_difference(f, Fraction(m, n), h, r, prec)
    if f.is_polynomial:
        values = [f.poly(Fraction(k, n)) for k in range(n + 1)]
        for _ in range(r):
            values = [values[k + 1] - values[k] for k in range(len(values) - 1)]
        basis = (1 - x) ** m
        step = x / (1 - x)
        total = Fraction(0)
        for k in range(m + 1):
            total += basis * values[k]
            if k < m:
                basis = basis * Fraction(m - k, k + 1) * step
        return perm * total
    with working(prec):
        signs = _difference_signs(r)
        values = list(islice(f.values_iter(h), n + 1))
        basis = mp.power(to_mpf(1 - x), m)
        step = to_mpf(x / (1 - x))
        total = mp.mpf(0)
        for k in range(m + 1):
            delta = sum(signs[i] * values[k + i] for i in range(r + 1))
            total += basis * delta
            if k < m:
                basis = basis * Fraction(m - k, k + 1) * step
        return perm * total


def _series_eval(
    f: SmoothFunction,
    n: int,
    x: Rat,
    r: int,
    tol: Rat,
    prec: int | None,
    weight_start,
    weight_ratio,
    ratio_limit: Rat,
    prefactor: int,
) -> BigFloat:
    """Shared tail-bounded summation for szasz/baskakov.

    weight_start() -> mpf t_0; weight_ratio(k) -> exact Fraction t_{k+1}/t_k,
    non-increasing in k with limit ratio_limit.  Terms are majorised by
    C (1 + (k+r)/n)^d E^(k+r) with E the rational stretch covering e^(a/n),
    so the sum converges iff ratio_limit * E < 1; the cut happens once the
    certified geometric tail drops under tol / (2 * prefactor).  Float drift
    in the weight/stretch streams is ~k ulp at working precision, far inside
    the factor-two margin left in tol."""
    growth_const, growth_deg, growth_rate = f.halfline_majorant()
    stretch = _growth_stretch(growth_rate, n)
    if ratio_limit * stretch >= 1:
        raise GrowthBoundViolated(
            f"{f.describe()} outruns the series weights at x = {format_rat(x)},"
            f" n = {n}"
        )
    kmin = max(math.ceil(4 * n * x * stretch), 64)
    with working(prec):
        signs = _difference_signs(r)
        stream = f.values_iter(Fraction(1, n))
        window = deque(islice(stream, r + 1), maxlen=r + 1)
        bound_const = to_mpf(growth_const * 2**r)
        stretch_m = to_mpf(stretch)
        epow = mp.power(stretch_m, r + 1)
        tol_series = to_mpf(tol) / (2 * prefactor)
        weight = weight_start()
        total = mp.mpf(0)
        k = 0
        while True:
            delta = window[0] if r == 0 else sum(
                signs[i] * window[i] for i in range(r + 1)
            )
            total += weight * delta
            next_weight = weight * to_mpf(weight_ratio(k))
            if k + 1 >= kmin:
                rho = (
                    weight_ratio(k + 1)
                    * (1 + Fraction(1, n + k + 1 + r)) ** growth_deg
                    * stretch
                )
                if rho < 1:
                    majorant = (
                        bound_const
                        * to_mpf((1 + Fraction(k + 1 + r, n)) ** growth_deg)
                        * epow
                    )
                    tail = next_weight * majorant / to_mpf(1 - rho)
                    if tail < tol_series:
                        break
            weight = next_weight
            epow = epow * stretch_m
            window.append(next(stream))
            k += 1
        return prefactor * total


def szasz_eval(
    f: SmoothFunction,
    n: int,
    x: Scalar,
    r: int = 0,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
) -> Number:
    """(S_n f)^{(r)}(x) for the Szasz-Mirakjan family, within tol."""
    x = _as_rat(x)
    if r < 0 or n < 1:
        raise ValueError("need n >= 1 and r >= 0")
    if x < 0:
        raise ValueError(f"x = {format_rat(x)} outside [0, oo)")
    if x == 0:
        return n**r * forward_difference(f, Fraction(0), Fraction(1, n), r, prec)
    rate = n * x

    def weight_start():
        return mp.exp(-to_mpf(rate))

    def weight_ratio(k: int) -> Rat:
        return rate / (k + 1)

    return _series_eval(
        f, n, x, r, tol, prec, weight_start, weight_ratio, Fraction(0), n**r
    )


def baskakov_eval(
    f: SmoothFunction,
    n: int,
    x: Scalar,
    r: int = 0,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
) -> Number:
    """(V_n f)^{(r)}(x) for the Baskakov family, within tol."""
    x = _as_rat(x)
    if r < 0 or n < 1:
        raise ValueError("need n >= 1 and r >= 0")
    if x < 0:
        raise ValueError(f"x = {format_rat(x)} outside [0, oo)")
    rising = math.prod(range(n, n + r)) if r else 1
    if x == 0:
        return rising * forward_difference(f, Fraction(0), Fraction(1, n), r, prec)
    q = x / (1 + x)

    def weight_start():
        return mp.power(to_mpf(1 + x), -(n + r))

    def weight_ratio(k: int) -> Rat:
        return Fraction(n + r + k, k + 1) * q

    return _series_eval(
        f, n, x, r, tol, prec, weight_start, weight_ratio, q, rising
    )


_GH_CACHE: dict[tuple[int, int], tuple[tuple, tuple]] = {}


def _gauss_hermite(order: int, prec_bits: int) -> tuple[tuple, tuple]:
    """Nodes and sqrt(pi)-normalised weights for physicists' Gauss-Hermite,
    polished to prec_bits by Newton iteration on the recurrence."""
    key = (order, prec_bits)
    cached = _GH_CACHE.get(key)
    if cached is not None:
        return cached
    from numpy.polynomial.hermite import hermgauss

    seeds = hermgauss(order)[0]

    def hermite_last_two(u):
        # returns (H_{order-1}(u), H_order(u))
        prev, cur = mp.mpf(1), 2 * u
        for k in range(1, order):
            prev, cur = cur, 2 * u * cur - 2 * k * prev
        return prev, cur

    with mp.workprec(prec_bits + 64):
        eps = mp.mpf(2) ** (-(prec_bits + 16))
        nodes = []
        for seed in seeds:
            if seed <= 0:
                continue
            u = mp.mpf(float(seed))
            for _ in range(40):
                prev, cur = hermite_last_two(u)
                if prev == 0:
                    break
                correction = cur / (2 * order * prev)
                u -= correction
                if abs(correction) <= eps * max(abs(u), mp.mpf(1)):
                    break
            nodes.append(u)
        positive = sorted(nodes)
        scale = to_mpf(Fraction(2 ** (order - 1) * math.factorial(order), order**2))

        def weight_of(u):
            prev, _ = hermite_last_two(u)
            return scale / (prev * prev)

        full_nodes: list = []
        full_weights: list = []
        for u in reversed(positive):
            full_nodes.append(-u)
            full_weights.append(weight_of(u))
        if order % 2 == 1:
            zero = mp.mpf(0)
            full_nodes.append(zero)
            full_weights.append(weight_of(zero))
        for u in positive:
            full_nodes.append(u)
            full_weights.append(weight_of(u))
    result = (tuple(full_nodes), tuple(full_weights))
    _GH_CACHE[key] = result
    return result


def _hermite_value(r: int, u) -> BigFloat:
    if r == 0:
        return mp.mpf(1)
    prev, cur = mp.mpf(1), 2 * u
    for k in range(1, r):
        prev, cur = cur, 2 * u * cur - 2 * k * prev
    return cur


def _gw_quadrature(f: SmoothFunction, n: int, x: Rat, r: int, order: int) -> BigFloat:
    nodes, weights = _gauss_hermite(order, mp.prec)
    spread = mp.sqrt(to_mpf(Fraction(2, n)))
    xm = to_mpf(x)
    total = mp.mpf(0)
    for u, w in zip(nodes, weights):
        factor = w if r == 0 else w * _hermite_value(r, u)
        total += factor * f.eval_mpf(xm + u * spread)
    if r == 0:
        return total
    return mp.sqrt(to_mpf(Fraction(n, 2) ** r)) * total


def gauss_weierstrass_eval(
    f: SmoothFunction,
    n: int,
    x: Scalar,
    r: int = 0,
    quad_order: int = 64,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
) -> BigFloat:
    """(W_n f)^{(r)}(x) by Gauss-Hermite quadrature; the order is doubled
    and the two results must agree within tol."""
    x = _as_rat(x)
    if r < 0 or n < 1:
        raise ValueError("need n >= 1 and r >= 0")
    if quad_order < 16:
        raise ValueError("quad_order must be >= 16")
    with working(prec):
        coarse = _gw_quadrature(f, n, x, r, quad_order)
        fine = _gw_quadrature(f, n, x, r, 2 * quad_order)
        if abs(fine - coarse) > to_mpf(tol):
            raise QuadratureNotConverged(
                f"order {quad_order} -> {2 * quad_order} moved the result by "
                f"{mp.nstr(abs(fine - coarse), 6)}"
            )
        return fine


BERNSTEIN = make_family(
    "bernstein",
    Interval(Fraction(0), Fraction(1)),
    Poly((Fraction(0), Fraction(1), Fraction(-1))),
    evaluator="bernstein",
)

SZASZ = make_family(
    "szasz",
    Interval(Fraction(0), None),
    Poly((Fraction(0), Fraction(1))),
    evaluator="szasz",
)

BASKAKOV = make_family(
    "baskakov",
    Interval(Fraction(0), None),
    Poly((Fraction(0), Fraction(1), Fraction(1))),
    evaluator="baskakov",
)

GAUSS_WEIERSTRASS = make_family(
    "gauss_weierstrass",
    Interval(None, None),
    Poly((Fraction(1),)),
    evaluator="gauss",
)

FAMILIES: dict[str, OperatorFamily] = {
    fam.id: fam
    for fam in (BERNSTEIN, SZASZ, BASKAKOV, GAUSS_WEIERSTRASS)
}


def get_family(family_id: str) -> OperatorFamily:
    try:
        return FAMILIES[family_id]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise ValueError(f"unknown family {family_id!r} (known: {known})") from None


def _eval_bernstein(f, n, x, r, tol, prec, quad_order):
    return bernstein_eval(f, n, x, r, prec=prec)


def _eval_szasz(f, n, x, r, tol, prec, quad_order):
    return szasz_eval(f, n, x, r, tol=tol, prec=prec)


def _eval_baskakov(f, n, x, r, tol, prec, quad_order):
    return baskakov_eval(f, n, x, r, tol=tol, prec=prec)


def _eval_gauss(f, n, x, r, tol, prec, quad_order):
    return gauss_weierstrass_eval(f, n, x, r, quad_order=quad_order, tol=tol, prec=prec)


_EVALUATORS = {
    "bernstein": _eval_bernstein,
    "szasz": _eval_szasz,
    "baskakov": _eval_baskakov,
    "gauss": _eval_gauss,
}


def operator_eval(
    family: OperatorFamily,
    f: SmoothFunction,
    n: int,
    x: Scalar,
    r: int = 0,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
    quad_order: int = 64,
) -> Number:
    """Uniform dispatch to the family's direct rule."""
    if family.evaluator is None:
        raise ValueError(f"family {family.id!r} has no direct evaluator")
    family.require_point(_as_rat(x))
    return _EVALUATORS[family.evaluator](f, n, x, r, tol, prec, quad_order)


def central_moment_direct(
    family: OperatorFamily,
    n: int,
    x: Scalar,
    s: int,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
    quad_order: int = 64,
) -> Number:
    """S_n applied to psi_x^s = (t - x)^s, evaluated at x by the family's
    direct rule; the independent oracle for the symbolic moment table."""
    x = _as_rat(x)
    if s < 0:
        raise ValueError("moment order must be >= 0")
    psi_power = SmoothFunction.polynomial(Poly((-x, Fraction(1))) ** s)
    return operator_eval(
        family, psi_power, n, x, 0, tol=tol, prec=prec, quad_order=quad_order
    )
