#!/usr/bin/env python3
"""Structural analyses at desk scale: eventual classes of shifted residue
families, the maximal-cut instance over the Z x Q product, density of n*G in
the dyadic rationals, and one-variable interval decompositions.

Usage: python scripts/structure_scan.py
"""

from fractions import Fraction

from qomin.analyzer import (
    Cut, POS, cut_contains, density_check, eventual_classes,
    maximal_cut_excluding, one_var_intervals,
)
from qomin.models import Window, format_element
from qomin.syntax import Theory, parse, print_formula


def main():
    print("eventual classes of D_m(x - a), a in 0..m:")
    for m in range(2, 7):
        rep = eventual_classes(
            Theory.PRES_Z, parse(f"D{m}(x - y)", Theory.PRES_Z),
            [(a,) for a in range(m + 1)], POS, Window(-36, 36),
        )
        groups = ", ".join(
            "{" + ",".join(str(t[0]) for t in sorted(c.members)) + "}"
            for c in rep.classes
        )
        print(f"  m={m}: {rep.class_count} classes (bound {rep.bound}): {groups}")

    print("\nmaximal cut excluding a point:")
    cuts = [Cut(Theory.LEX_ZQ, 2, (a, Fraction(0))) for a in (1, 3, 5)]
    e = (2, Fraction(0))
    best = maximal_cut_excluding(cuts, e)
    members = [format_element(c.a) for c in cuts if not cut_contains(c, e)]
    print(f"  family bounds (1,0),(3,0),(5,0), n=2, e=(2,0)")
    print(f"  excluding e: {members}; maximal: {best.describe()}")

    print("\ndensity of n*G in the dyadic rationals (window [-16,16], res 1/32):")
    w = Window(Fraction(-16), Fraction(16), 1024)
    for n in (2, 3, 6):
        rep = density_check(n, w, Fraction(1, 32))
        if rep.whole_group:
            print(f"  n={n}: nG = G (power of two)")
        else:
            print(f"  n={n}: dense={rep.dense} codense={rep.codense} "
                  f"({rep.intervals_checked} intervals)")

    print("\ninterval decompositions over the divisible rational group:")
    for text in ("x + x > 1", "(0 < x & x < 1) | x = 2", "E y. y + y = x & y > 3"):
        pieces = one_var_intervals(parse(text, Theory.DOAG_Q))
        body = " u ".join(str(p) for p in pieces) if pieces else "(empty)"
        print(f"  {text:28s} ->  {body}")


if __name__ == "__main__":
    main()
