#!/usr/bin/env python3
"""Decompose every corpus formula that carries a distinguished variable and
verify the result pointwise for a handful of parameter tuples.

Usage: python scripts/decomposition_report.py [theory ...]
"""

import itertools
import sys

from qomin import corpus, models
from qomin.normal_form import ProcedureWitness, decompose, verify_decomposition
from qomin.syntax import Theory, parse


def sample_tuples(theory, params, want=5):
    elems = models.enumerate_window(theory, corpus.windows(theory)[0])
    combos = list(itertools.product(elems, repeat=len(params)))
    step = max(1, len(combos) // want)
    return combos[::step][:want] if combos else [()]


def main(argv):
    names = argv or [t.value for t in corpus.CORPUS]
    bad = 0
    for name in names:
        theory = Theory.from_name(name)
        asg_w, search_w = corpus.windows(theory)
        print(f"== {theory.value}")
        for entry in corpus.entries(theory):
            if entry.dist_var is None:
                continue
            theta = parse(entry.text, theory)
            dec = decompose(theory, theta, entry.dist_var)
            dec.check_shape()
            kinds = "".join(
                "P" if isinstance(w, ProcedureWitness) else "T" for w in dec.witnesses
            )
            verdicts = []
            for abar in sample_tuples(theory, dec.params):
                rep = verify_decomposition(theory, theta, dec, abar, search_w,
                                           scan_window=asg_w)
                verdicts.append(rep.passed)
            ok = all(verdicts)
            bad += 0 if ok else 1
            print(f"  {entry.text:42s} disjuncts={len(dec.disjuncts):3d} "
                  f"witnesses={kinds or '-':6s} verified={'yes' if ok else 'NO'}")
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
