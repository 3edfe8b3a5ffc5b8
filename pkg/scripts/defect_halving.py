#!/usr/bin/env python3
"""Track d_n = n[(S_n f)^(r) - f^(r)](x) - (phi f'')^(r)(x)/2 along a
dyadic grid.  First-order theory says d_n shrinks like 1/n, so each
doubling of n should roughly halve it; the printed ratio column makes
that visible per family and derivative order."""

import argparse
from fractions import Fraction

from mpmath import mp

from expasym.expansion import voronovskaja_limit
from expasym.functions import parse_function
from expasym.operators import FAMILIES, operator_eval

DEFAULT_CASES = (
    ("bernstein", Fraction(1, 4)),
    ("bernstein", Fraction(1, 2)),
    ("szasz", Fraction(1)),
    ("baskakov", Fraction(1)),
)


def scaled_defects(family, f, x, r, grid):
    limit = voronovskaja_limit(family, f, x, r, prec=256)
    out = []
    for n in grid:
        value = operator_eval(family, f, n, x, r)
        out.append(n * (value - f.eval_mpf(x, r)) - limit)
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--f", default="exp:1", help="poly:... | exp:a | sin:a,b")
    parser.add_argument("--n0", type=int, default=512)
    parser.add_argument("--levels", type=int, default=5)
    parser.add_argument("--r-max", type=int, default=2)
    args = parser.parse_args()
    f = parse_function(args.f)
    grid = [args.n0 * 2**j for j in range(args.levels)]
    with mp.workprec(320):
        for family_id, x in DEFAULT_CASES:
            family = FAMILIES[family_id]
            for r in range(args.r_max + 1):
                defects = scaled_defects(family, f, x, r, grid)
                print(f"{family_id}  x = {x}  r = {r}")
                print(f"  {'n':>6}  {'d_n':>14}  {'|d_2n/d_n|':>10}")
                for i, (n, d) in enumerate(zip(grid, defects)):
                    ratio = (
                        mp.nstr(abs(defects[i] / defects[i - 1]), 4)
                        if i else ""
                    )
                    print(f"  {n:>6}  {mp.nstr(d, 8):>14}  {ratio:>10}")
                print()


if __name__ == "__main__":
    main()
