"""Numerical verification harness.

Turns asymptotic statements into measurable pass/fail artifacts:

  residual_study       operator value minus expansion prediction across a
                       dyadic n-grid, with the decay order fitted by least
                       squares on (log n, log |residual|);
  voronovskaja_study   the defect d_n = n[(S_n f)^{(r)} - f^{(r)}] minus
                       the limit, tracked for c/n behaviour via doubling
                       ratios;
  identity checks      the first-order ODE and its psi^m generalisation,
                       left side computed symbolically, right side by the
                       direct evaluators, reported as a defect;
  richardson           dyadic extrapolation against a known exponent ladder.

Exact zeros (polynomial cases) never enter a log fit; residuals below the
evaluator noise floor are classified as exact, since fitting them would
measure rounding noise, not truncation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from mpmath import mp

from .exactalg import MomentPoly, Poly, Rat, Scalar, _as_rat, format_rat
from .expansion import evaluate_derivative_expansion, voronovskaja_limit
from .functions import SmoothFunction, to_mpf
from .moments import central_moments
from .operators import (
    DEFAULT_TOL,
    Number,
    OperatorFamily,
    operator_eval,
    resolve_precision,
    working,
)

RATIO_BAND = (0.35, 0.65)
SLOPE_SLACK = 0.75


class AllResidualsZero(Exception):
    """Every residual is exactly zero (or below the noise floor): the
    identity holds exactly, which is a pass, not a fit."""


class GridNotDyadic(ValueError):
    """Extrapolation needs n, 2n, 4n, ..."""


class PhiVanishes(ValueError):
    """The identity being checked divides by phi(x)."""


def _format_number(value: Number) -> str:
    if isinstance(value, (Fraction, int)):
        return format_rat(Fraction(value))
    if value == 0:
        return "0"
    return mp.nstr(value, 24)


def _abs_le(value: Number, bound: Rat) -> bool:
    if isinstance(value, (Fraction, int)):
        return abs(Fraction(value)) <= bound
    with mp.workprec(mp.prec + 8):
        return abs(value) <= to_mpf(bound)


def _subtract(a: Number, b: Number, prec: int | None) -> Number:
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        return Fraction(a) - Fraction(b)
    with working(prec):
        am = a if not isinstance(a, (Fraction, int)) else to_mpf(Fraction(a))
        bm = b if not isinstance(b, (Fraction, int)) else to_mpf(Fraction(b))
        return am - bm


@dataclass(frozen=True)
class ConvergenceReport:
    """One study's complete artifact; serialisable, deterministic."""

    family_id: str
    f: str
    x: Rat
    r: int
    q: int
    grid: tuple[int, ...]
    values: tuple[Number, ...]
    predictions: tuple[Number, ...]
    residuals: tuple[Number, ...]
    fitted_order: float | None
    r_squared: float | None
    ratio_track: tuple[float | None, ...]
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "family": self.family_id,
            "f": self.f,
            "x": format_rat(self.x),
            "r": self.r,
            "q": self.q,
            "grid": list(self.grid),
            "values": [_format_number(v) for v in self.values],
            "predictions": [_format_number(v) for v in self.predictions],
            "residuals": [_format_number(v) for v in self.residuals],
            "fitted_order": self.fitted_order,
            "r_squared": self.r_squared,
            "ratio_track": list(self.ratio_track),
            "pass": self.passed,
        }

    def to_csv_text(self) -> str:
        lines = ["n,value,prediction,residual,ratio"]
        for i, n in enumerate(self.grid):
            ratio = ""
            if i >= 1 and self.ratio_track[i - 1] is not None:
                ratio = repr(self.ratio_track[i - 1])
            lines.append(
                f"{n},{_format_number(self.values[i])},"
                f"{_format_number(self.predictions[i])},"
                f"{_format_number(self.residuals[i])},{ratio}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [
            f"family: {self.family_id}  f: {self.f}  x: {format_rat(self.x)}"
            f"  r: {self.r}  q: {self.q}"
        ]
        for i, n in enumerate(self.grid):
            lines.append(
                f"  n={n}  residual={_format_number(self.residuals[i])}"
            )
        order = "exact" if self.fitted_order is None else f"{self.fitted_order:.4f}"
        rsq = "-" if self.r_squared is None else f"{self.r_squared:.6f}"
        lines.append(f"fitted order: {order}  r^2: {rsq}")
        lines.append(f"pass: {str(self.passed).lower()}")
        return "\n".join(lines) + "\n"


def fit_order(
    grid: Sequence[int],
    residuals: Sequence[Number],
    floor: Rat = Fraction(0),
) -> tuple[float, float]:
    """Least-squares slope and r^2 of log|residual| against log n.
    Residuals with |residual| <= floor are excluded; if none survive the
    data is an exact identity and AllResidualsZero is raised."""
    if len(grid) != len(residuals):
        raise ValueError("grid and residuals must have equal length")
    points = []
    with mp.workprec(64):
        for n, res in zip(grid, residuals):
            if _abs_le(res, floor):
                continue
            mag = abs(to_mpf(res)) if isinstance(res, (Fraction, int)) else abs(res)
            points.append((math.log(n), float(mp.log(mag))))
    if not points:
        raise AllResidualsZero("all residuals at or below the floor")
    if len(points) < 3:
        raise ValueError("need at least 3 residuals above the floor to fit")
    count = len(points)
    mean_x = sum(p[0] for p in points) / count
    mean_y = sum(p[1] for p in points) / count
    sxx = sum((p[0] - mean_x) ** 2 for p in points)
    sxy = sum((p[0] - mean_x) * (p[1] - mean_y) for p in points)
    syy = sum((p[1] - mean_y) ** 2 for p in points)
    slope = sxy / sxx
    r_squared = 1.0 if syy == 0 else (sxy * sxy) / (sxx * syy)
    return slope, r_squared


def _noise_floor(family: OperatorFamily, tol: Rat, prec: int | None) -> Rat:
    """Magnitude below which a residual is evaluator noise: the series and
    quadrature rules are only tol-accurate; the exact-path families only
    carry rounding at the working precision."""
    if family.evaluator in ("szasz", "baskakov", "gauss"):
        return 16 * tol
    bits = resolve_precision(prec)
    return Fraction(1, 2 ** (bits - 16))


def _validate_grid(grid: Sequence[int]) -> tuple[int, ...]:
    grid = tuple(int(n) for n in grid)
    if len(grid) < 2:
        raise ValueError("grid needs at least 2 points")
    if any(n <= 0 for n in grid):
        raise ValueError("grid entries must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    return grid


def _ratio_track(
    residuals: Sequence[Number], floor: Rat
) -> tuple[float | None, ...]:
    track: list[float | None] = []
    with mp.workprec(64):
        for a, b in zip(residuals, residuals[1:]):
            if _abs_le(a, floor) or _abs_le(b, floor):
                track.append(None)
                continue
            am = abs(to_mpf(a)) if isinstance(a, (Fraction, int)) else abs(a)
            bm = abs(to_mpf(b)) if isinstance(b, (Fraction, int)) else abs(b)
            track.append(float(bm / am))
    return tuple(track)


def residual_study(
    family: OperatorFamily,
    f: SmoothFunction,
    x: Scalar,
    r: int,
    q: int,
    grid: Sequence[int],
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
    quad_order: int = 64,
) -> ConvergenceReport:
    """Decay study of (S_n f)^{(r)}(x) minus the order-q expansion.  The
    next expansion term exists for the shipped f, so the residual decays
    one full order faster: pass means fitted order <= -(q + 0.75)."""
    x = _as_rat(x)
    if q < 1:
        raise ValueError("q must be >= 1")
    f.require_order(2 * q + r + 2)
    family.require_point(x, interior=True)
    grid = _validate_grid(grid)
    values = []
    predictions = []
    residuals = []
    for n in grid:
        value = operator_eval(
            family, f, n, x, r, tol=tol, prec=prec, quad_order=quad_order
        )
        prediction = evaluate_derivative_expansion(family, f, x, n, q, r, prec=prec)
        values.append(value)
        predictions.append(prediction)
        residuals.append(_subtract(value, prediction, prec))
    floor = _noise_floor(family, tol, prec)
    try:
        slope, r_squared = fit_order(grid, residuals, floor=floor)
        passed = slope <= -(q + SLOPE_SLACK)
        fitted: float | None = slope
        rsq: float | None = r_squared
    except AllResidualsZero:
        passed, fitted, rsq = True, None, None
    return ConvergenceReport(
        family_id=family.id,
        f=f.describe(),
        x=x,
        r=r,
        q=q,
        grid=grid,
        values=tuple(values),
        predictions=tuple(predictions),
        residuals=tuple(residuals),
        fitted_order=fitted,
        r_squared=rsq,
        ratio_track=_ratio_track(residuals, floor),
        passed=passed,
    )


def voronovskaja_study(
    family: OperatorFamily,
    f: SmoothFunction,
    x: Scalar,
    r: int,
    grid: Sequence[int],
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
    quad_order: int = 64,
) -> ConvergenceReport:
    """Tracks d_n = n[(S_n f)^{(r)}(x) - f^{(r)}(x)] - (phi f'')^{(r)}(x)/2.
    Since d_n ~ c/n, passing means |d_n| decreasing with doubling ratios
    inside RATIO_BAND on the upper half of the grid (or d_n exactly 0)."""
    x = _as_rat(x)
    f.require_order(r + 4)
    family.require_point(x, interior=True)
    grid = _validate_grid(grid)
    limit = voronovskaja_limit(family, f, x, r, prec=prec)
    exact_deriv = f.eval_exact(x, r)
    values = []
    residuals = []
    for n in grid:
        op = operator_eval(
            family, f, n, x, r, tol=tol, prec=prec, quad_order=quad_order
        )
        if exact_deriv is not None:
            diff = _subtract(op, exact_deriv, prec)
        else:
            with working(prec):
                diff = _subtract(op, f.eval_mpf(x, r), prec)
        if isinstance(diff, Fraction):
            scaled: Number = n * diff
        else:
            with working(prec):
                scaled = n * diff
        values.append(scaled)
        residuals.append(_subtract(scaled, limit, prec))
    floor = 16 * tol * max(grid)
    track = _ratio_track(residuals, floor)
    if all(_abs_le(d, floor) for d in residuals):
        passed = True
    else:
        magnitudes = []
        with mp.workprec(64):
            for d in residuals:
                magnitudes.append(
                    abs(to_mpf(d)) if isinstance(d, (Fraction, int)) else abs(d)
                )
        decreasing = all(b < a for a, b in zip(magnitudes, magnitudes[1:]))
        upper = track[len(track) // 2 :]
        in_band = all(
            RATIO_BAND[0] <= t <= RATIO_BAND[1]
            for t in upper
            if t is not None
        )
        passed = decreasing and in_band
    try:
        slope, r_squared = fit_order(grid, residuals, floor=floor)
        fitted: float | None = slope
        rsq: float | None = r_squared
    except (AllResidualsZero, ValueError):
        fitted, rsq = None, None
    return ConvergenceReport(
        family_id=family.id,
        f=f.describe(),
        x=x,
        r=r,
        q=1,
        grid=grid,
        values=tuple(values),
        predictions=tuple(limit for _ in grid),
        residuals=tuple(residuals),
        fitted_order=fitted,
        r_squared=rsq,
        ratio_track=track,
        passed=passed,
    )


def _require_interior(family: OperatorFamily, x: Rat) -> None:
    family.require_point(x)
    if family.phi(x) == 0:
        raise PhiVanishes(
            f"phi({format_rat(x)}) = 0 for family {family.id!r}"
        )


def _psi_times(f: SmoothFunction, x: Rat, power: int) -> SmoothFunction:
    psi = Poly((-x, Fraction(1))) ** power
    return SmoothFunction.polynomial(psi * f.poly)


def ode_identity_check(
    family: OperatorFamily,
    f: SmoothFunction,
    n: int,
    x: Scalar,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
    quad_order: int = 64,
) -> Number:
    """Defect of the first-order identity
    (S_n f)'(x) = (lambda_n/phi(x)) [S_n(psi_x f)(x) - S_n(psi_x)(x) S_n f(x)].
    Polynomial f only, so both sides are evaluable in closed form; exact
    families give an exactly zero defect."""
    x = _as_rat(x)
    if not f.is_polynomial:
        raise ValueError("identity checks need polynomial f")
    _require_interior(family, x)
    inner_tol = tol / (32 * (n + 2))
    kwargs = dict(tol=inner_tol, prec=prec, quad_order=quad_order)
    lhs = operator_eval(family, f, n, x, 1, **kwargs)
    s_f = operator_eval(family, f, n, x, 0, **kwargs)
    s_psi_f = operator_eval(family, _psi_times(f, x, 1), n, x, 0, **kwargs)
    s_psi = operator_eval(
        family, SmoothFunction.polynomial(Poly((-x, Fraction(1)))), n, x, 0, **kwargs
    )
    lam = family.lambda_n.eval(n)
    scale = lam / family.phi(x)
    if all(isinstance(v, (Fraction, int)) for v in (lhs, s_f, s_psi_f, s_psi)):
        return lhs - scale * (s_psi_f - s_psi * s_f)
    with working(prec):
        return lhs - to_mpf(scale) * (s_psi_f - s_psi * s_f)


def psi_m_derivative_identity_check(
    family: OperatorFamily,
    f: SmoothFunction,
    m: int,
    n: int,
    x: Scalar,
    tol: Rat = DEFAULT_TOL,
    prec: int | None = None,
    quad_order: int = 64,
) -> Number:
    """Defect of d/dx [S_n(psi_x^m f)(x)] =
    (lambda_n/phi)(S_n(psi^{m+1} f)(x) - S_n(psi)(x) S_n f(x))
    - m S_n(psi^{m-1} f)(x).

    The left side differentiates a map where x enters both the weight and
    the argument; it is computed symbolically by expanding f around x, so
    S_n(psi_x^m f)(x) = sum_j f^{(j)}(x)/j! mu_{n,m+j}(x), an exact
    MomentPoly, then differentiated term by term.  The right side uses the
    direct evaluators, making this a cross-check of the moment recursion
    against the concrete operator rules."""
    x = _as_rat(x)
    if m < 1:
        raise ValueError("m must be >= 1; m = 0 is the plain first-order identity")
    if not f.is_polynomial:
        raise ValueError("identity checks need polynomial f")
    _require_interior(family, x)
    degree = max(f.poly.degree, 0)
    table = central_moments(family, m + degree + 1)
    symbolic = MomentPoly()
    for j in range(degree + 1):
        taylor_coeff = f.derivative_poly(j) * Fraction(1, math.factorial(j))
        symbolic = symbolic + table.moment(m + j) * taylor_coeff
    lhs = symbolic.dx().eval(n, x)
    inner_tol = tol / (32 * (n + m + 2))
    kwargs = dict(tol=inner_tol, prec=prec, quad_order=quad_order)
    s_up = operator_eval(family, _psi_times(f, x, m + 1), n, x, 0, **kwargs)
    s_down = operator_eval(family, _psi_times(f, x, m - 1), n, x, 0, **kwargs)
    s_f = operator_eval(family, f, n, x, 0, **kwargs)
    s_psi = operator_eval(
        family, SmoothFunction.polynomial(Poly((-x, Fraction(1)))), n, x, 0, **kwargs
    )
    lam = family.lambda_n.eval(n)
    scale = lam / family.phi(x)
    if all(isinstance(v, (Fraction, int)) for v in (s_up, s_down, s_f, s_psi)):
        return lhs - (scale * (s_up - s_psi * s_f) - m * s_down)
    with working(prec):
        return to_mpf(lhs) - (to_mpf(scale) * (s_up - s_psi * s_f) - m * s_down)


def richardson(
    grid: Sequence[int],
    values: Sequence[Number],
    orders: Sequence[int],
    prec: int | None = None,
) -> list[list[Number]]:
    """Richardson ladder on a dyadic grid.  Level m+1 eliminates the
    n^{-p_m} term: T_j <- (2^{p_m} T_{j+1} - T_j)/(2^{p_m} - 1).  Returns
    all levels, level 0 being the input; exact inputs stay exact."""
    grid = tuple(int(n) for n in grid)
    if len(grid) != len(values):
        raise ValueError("grid and values must have equal length")
    if len(grid) < 2:
        raise ValueError("need at least 2 values")
    if any(b != 2 * a for a, b in zip(grid, grid[1:])):
        raise GridNotDyadic(f"grid {list(grid)} is not n, 2n, 4n, ...")
    if len(orders) >= len(values):
        raise ValueError("each level consumes one value; too many orders")
    if any(int(p) < 1 for p in orders):
        raise ValueError("orders must be positive integers")
    levels: list[list[Number]] = [list(values)]
    for p in orders:
        weight = 2 ** int(p)
        row = levels[-1]
        if all(isinstance(v, (Fraction, int)) for v in row):
            nxt = [
                Fraction(weight * Fraction(b) - Fraction(a), weight - 1)
                for a, b in zip(row, row[1:])
            ]
        else:
            with working(prec):
                nxt = [
                    (weight * _to_working(b) - _to_working(a)) / (weight - 1)
                    for a, b in zip(row, row[1:])
                ]
        levels.append(nxt)
    return levels


def _to_working(value: Number):
    if isinstance(value, (Fraction, int)):
        return to_mpf(Fraction(value))
    return value
