#!/usr/bin/env python3
"""Print the symbolic central-moment catalog for every built-in family:
the exact table, its 1/n expansion, and the closed-form leading term."""

import argparse

from expasym.moments import (
    central_moments,
    leading_term_closed_form,
    moment_expansion,
    vanishing_order,
)
from expasym.operators import FAMILIES


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--s-max", type=int, default=8)
    parser.add_argument(
        "--family", choices=sorted(FAMILIES), default=None,
        help="default: all built-ins",
    )
    args = parser.parse_args()
    ids = [args.family] if args.family else sorted(FAMILIES)
    for family_id in ids:
        family = FAMILIES[family_id]
        table = central_moments(family, args.s_max)
        print(f"== {family_id}  (phi = {family.phi.text()}) ==")
        for s in range(args.s_max + 1):
            mu = table.moment(s)
            print(f"mu[{s}] = {mu.text()}")
            if mu.is_zero:
                continue
            expansion = moment_expansion(mu)
            terms = "  ".join(
                f"n^-{j}: {g.text()}" for j, g in expansion.items()
            )
            lead = vanishing_order(mu)
            closed = leading_term_closed_form(s, family.phi)
            print(f"        {terms}")
            print(
                f"        leading order {lead}, closed form {closed.text()}"
            )
        print()


if __name__ == "__main__":
    main()
