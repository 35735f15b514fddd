#!/usr/bin/env python3
"""Sweep the full corpus: eliminate quantifiers from every formula and
compare against the finite-window oracle on every assignment.

Usage: python scripts/qe_soundness_sweep.py [theory ...]
"""

import sys
import time

from qomin import corpus
from qomin.qe import oracle_agreement
from qomin.syntax import Theory, parse


def main(argv):
    names = argv or [t.value for t in corpus.CORPUS]
    grand = ok = 0
    t0 = time.time()
    for name in names:
        theory = Theory.from_name(name)
        asg_w, search_w = corpus.windows(theory)
        t1 = time.time()
        assignments = 0
        failures = []
        for entry in corpus.entries(theory):
            f = parse(entry.text, theory)
            total, mismatches = oracle_agreement(theory, f, asg_w, search_w)
            assignments += total
            if mismatches:
                failures.append((entry.text, mismatches[0]))
        grand += len(corpus.entries(theory))
        ok += len(corpus.entries(theory)) - len(failures)
        status = "ok" if not failures else f"{len(failures)} FAILURES"
        print(f"{theory.value:10s} {len(corpus.entries(theory)):3d} formulas "
              f"{assignments:6d} assignments  {time.time() - t1:6.1f}s  {status}")
        for text, (asg, lhs, rhs) in failures:
            print(f"    {text!r} at {asg}: windowed={lhs} eliminated={rhs}")
    print(f"total: {ok}/{grand} formulas agree, {time.time() - t0:.1f}s")
    return 0 if ok == grand else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
