"""qomin command line: every library operation behind one deterministic,
scriptable entry point with JSON or text output.

Exit codes: 0 success (or decided true), 1 decided false, 2 usage error,
3 input error (parse/signature/evaluation), 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import analyzer, corpus, models, normal_form
from .errors import (
    DecompositionError, EvalError, NonSentenceError, ParseError, QominError,
    SignatureError, UnsupportedTheoryError, WindowCapError,
)
from .models import Window
from .qe import ComponentFormula, decide, oracle_agreement, qe
from .syntax import (
    Formula, Pred, Theory, free_vars, is_quantifier_free, map_atoms, parse,
    print_formula, substitute,
)

SCHEMA = 1


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on sep outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_window(text: str, theory: Theory) -> Window:
    parts = _split_top(text)
    if len(parts) not in (2, 3):
        raise EvalError(f"window must be 'lo,hi[,denom]', got {text!r}")
    lo = models.parse_element(parts[0], theory)
    hi = models.parse_element(parts[1], theory)
    denom = int(parts[2]) if len(parts) == 3 else 1
    return Window(lo, hi, denom)


def _parse_at(text: str, theory: Theory) -> dict:
    out = {}
    for item in _split_top(text):
        if "=" not in item:
            raise EvalError(f"bindings look like 'y=(1,0)' or 'y=3', got {item!r}")
        name, _, value = item.partition("=")
        out[name.strip()] = models.parse_element(value, theory)
    return out


def _window_cap() -> int | None:
    raw = os.environ.get("QOMIN_WINDOW_CAP")
    return int(raw) if raw else None


def _read_formula(args, parser) -> tuple[str, Theory]:
    """Formula text and theory from the positional/--formula/--file flags."""
    texts = [t for t in (args.formula_pos, getattr(args, "formula", None)) if t]
    theory_name = args.theory
    if getattr(args, "file", None):
        with open(args.file) as fh:
            lines = fh.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("#theory:"):
                theory_name = line.split(":", 1)[1].strip()
            elif line.strip() and not line.lstrip().startswith("#"):
                body.append(line.strip())
        texts.append(" ".join(body))
    if len(texts) != 1:
        parser.error("provide exactly one formula (positional, --formula, or --file)")
    if not theory_name:
        parser.error("--theory is required (or a '#theory:' header in the file)")
    return texts[0], Theory.from_name(theory_name)


def _expand_delta(f: Formula, theory: Theory) -> Formula:
    def fn(atom):
        if isinstance(atom, Pred) and atom.name == "del":
            body = normal_form.delta(theory, atom.index, var="c0")
            return substitute(body, {"c0": atom.args[0]})
        return atom
    return map_atoms(f, fn)


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        payload = {"schema": SCHEMA, **payload}
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _formula_out(out) -> str:
    if isinstance(out, ComponentFormula):
        return print_formula(out.formula)
    return print_formula(out)


# ---------------------------------------------------------------------------
# verb handlers


def _cmd_parse(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    f = parse(text, theory)
    if args.expand_delta:
        f = _expand_delta(f, theory)
    payload = {
        "theory": theory.value,
        "formula": print_formula(f),
        "free_vars": sorted(free_vars(f)),
        "quantifier_free": is_quantifier_free(f),
    }
    _emit(args, payload, [print_formula(f)])
    return 0


def _cmd_qe(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    f = parse(text, theory)
    out = qe(theory, f)
    payload = {
        "theory": theory.value,
        "input": print_formula(f),
        "output": _formula_out(out),
        "quantifier_free": is_quantifier_free(
            out.formula if isinstance(out, ComponentFormula) else out
        ),
    }
    if isinstance(out, ComponentFormula) and args.component_language:
        payload["component"] = {
            "vars": {orig: [z, s] for orig, z, s in out.pairs},
            "formula": print_formula(out.formula),
        }
    _emit(args, payload, [payload["output"]])
    return 0


def _cmd_decide(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    f = parse(text, theory)
    truth = decide(theory, f)
    _emit(args, {"theory": theory.value, "truth": truth}, [str(truth).lower()])
    return 0 if truth else 1


def _cmd_eval(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    f = parse(text, theory)
    asg = _parse_at(args.at, theory) if args.at else {}
    if args.window:
        w = _parse_window(args.window, theory)
        value = models.eval_windowed(theory, f, asg, w, cap=_window_cap())
    else:
        value = models.eval_qf(theory, f, asg)
    _emit(args, {"theory": theory.value, "value": value}, [str(value).lower()])
    return 0


def _cmd_decompose(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    if not args.var:
        parser.error("--var is required for decompose")
    f = parse(text, theory)
    dec = normal_form.decompose(theory, f, args.var)
    payload = {"theory": theory.value, "input": print_formula(f)}
    payload.update(dec.to_json())
    lines = [f"disjuncts: {len(dec.disjuncts)}  witnesses: {len(dec.witnesses)}"]
    if args.at:
        asg = _parse_at(args.at, theory)
        abar = tuple(asg[p] for p in dec.params)
        zvals = normal_form.witnesses(theory, dec, abar)
        payload["witness_values"] = [models.format_element(z) for z in zvals]
        lines.append("witnesses: " + ", ".join(payload["witness_values"]))
        if args.verify:
            if not args.window:
                parser.error("--verify needs --window")
            w = _parse_window(args.window, theory)
            rep = normal_form.verify_decomposition(theory, f, dec, abar, w)
            payload["verification"] = rep.to_json()
            lines.append(f"verification: {'pass' if rep.passed else 'FAIL'} ({rep.total} points)")
    _emit(args, payload, lines)
    return 0


def _cmd_verify(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    f = parse(text, theory)
    asg_w, search_w = corpus.windows(theory)
    if args.window:
        search_w = _parse_window(args.window, theory)
    if args.asg_window:
        asg_w = _parse_window(args.asg_window, theory)
    total, mismatches = oracle_agreement(theory, f, asg_w, search_w, cap=_window_cap())
    ok = not mismatches
    payload = {
        "theory": theory.value,
        "formula": print_formula(f),
        "assignments": total,
        "agreement": ok,
        "mismatches": [
            {
                "at": {k: models.format_element(v) for k, v in sorted(asg.items())},
                "windowed": a,
                "eliminated": b,
            }
            for asg, a, b in mismatches
        ],
    }
    _emit(args, payload, [f"{'agree' if ok else 'DISAGREE'} on {total} assignments"])
    return 0 if ok else 1


def _cmd_classes(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    f = parse(text, theory)
    if not args.params:
        parser.error("--params is required (semicolon-separated tuples)")
    params = []
    for chunk in args.params.split(";"):
        vals = tuple(models.parse_element(p, theory) for p in _split_top(chunk))
        params.append(vals)
    w = _parse_window(args.window, theory) if args.window else corpus.windows(theory)[1]
    rep = analyzer.eventual_classes(
        theory, f, params, args.direction, w, var=args.var or "x"
    )
    payload = {"theory": theory.value, "formula": print_formula(f)}
    payload.update(rep.to_json())
    _emit(args, payload, [f"classes: {rep.class_count} (bound {rep.bound})"])
    return 0


def _cmd_cuts(args, parser) -> int:
    theory = Theory.LEX_ZQ
    n = args.n or 1
    cuts = [
        analyzer.Cut(theory, n, models.parse_element(b, theory))
        for b in _split_top(args.bounds or "", ";")
    ]
    payload: dict = {"n": n, "bounds": [models.format_element(c.a) for c in cuts]}
    lines = []
    if args.exclude:
        e = models.parse_element(args.exclude, theory)
        best = analyzer.maximal_cut_excluding(cuts, e)
        payload["maximal_excluding"] = models.format_element(best.a)
        lines.append(f"maximal cut excluding {models.format_element(e)}: {best.describe()}")
    if args.contains:
        x = models.parse_element(args.contains, theory)
        payload["contains"] = [analyzer.cut_contains(c, x) for c in cuts]
        lines.append(f"membership of {models.format_element(x)}: {payload['contains']}")
    if args.subset:
        a1, a2 = _split_top(args.subset, ";")
        c1 = analyzer.Cut(theory, n, models.parse_element(a1, theory))
        c2 = analyzer.Cut(theory, n, models.parse_element(a2, theory))
        payload["subset"] = analyzer.cut_subset(c1, c2)
        lines.append(f"subset: {payload['subset']}")
    if not lines:
        parser.error("cuts needs one of --exclude, --contains, --subset")
    _emit(args, payload, lines)
    return 0


def _cmd_density(args, parser) -> int:
    if not args.n:
        parser.error("--n is required")
    w = _parse_window(args.window or "-16,16,1024", Theory.DYADIC)
    res = Fraction(args.resolution or "1/32")
    rep = analyzer.density_check(args.n, w, res)
    payload = rep.to_json()
    lines = [payload["case"]]
    if not rep.whole_group:
        lines.append(f"dense: {rep.dense}  codense: {rep.codense}")
    _emit(args, payload, lines)
    return 0


def _cmd_intervals(args, parser) -> int:
    text, theory = _read_formula(args, parser)
    if theory != Theory.DOAG_Q:
        raise UnsupportedTheoryError("interval decomposition runs over doag_q")
    f = parse(text, theory)
    pieces = analyzer.one_var_intervals(f)
    payload = {
        "theory": theory.value,
        "formula": print_formula(f),
        "pieces": [
            {
                "lo": None if p.lo is None else str(p.lo),
                "hi": None if p.hi is None else str(p.hi),
                "lo_closed": p.lo_closed,
                "hi_closed": p.hi_closed,
            }
            for p in pieces
        ],
    }
    _emit(args, payload, [" u ".join(str(p) for p in pieces) if pieces else "(empty)"])
    return 0


_HANDLERS = {
    "parse": _cmd_parse,
    "qe": _cmd_qe,
    "decide": _cmd_decide,
    "eval": _cmd_eval,
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "classes": _cmd_classes,
    "cuts": _cmd_cuts,
    "density": _cmd_density,
    "intervals": _cmd_intervals,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qomin",
        description="decision procedures, quantifier elimination, and witnessed "
                    "interval normal forms over a fixed roster of ordered-group theories",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in _HANDLERS:
        p = sub.add_parser(verb)
        p.add_argument("formula_pos", nargs="?", help="formula text")
        p.add_argument("--formula")
        p.add_argument("--file", help="file with the formula; may carry a '#theory:' header")
        p.add_argument("--theory", help="one of " + ", ".join(t.value for t in Theory))
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--var", help="distinguished/scan variable")
        p.add_argument("--window", help="'lo,hi[,denom]'")
        p.add_argument("--asg-window", dest="asg_window", help="'lo,hi[,denom]' for free variables")
        p.add_argument("--at", help="element bindings, e.g. 'y=(1,0),z=3'")
        p.add_argument("--verify", action="store_true")
        p.add_argument("--component-language", dest="component_language", action="store_true")
        p.add_argument("--expand-delta", dest="expand_delta", action="store_true",
                       help="replace del_k atoms by their base-language definitions")
        p.add_argument("--params", help="semicolon-separated parameter tuples")
        p.add_argument("--direction", choices=(analyzer.POS, analyzer.NEG), default=analyzer.POS)
        p.add_argument("--n", type=int, help="coefficient/modulus for cuts and density")
        p.add_argument("--bounds", help="semicolon-separated cut bounds")
        p.add_argument("--exclude", help="element for maximal-cut-excluding")
        p.add_argument("--contains", help="element for cut membership")
        p.add_argument("--subset", help="two cut bounds 'a1;a2'")
        p.add_argument("--resolution", help="interval length for density scans")
    return parser


_VALUE_FLAGS = {
    "--window", "--asg-window", "--at", "--exclude", "--contains", "--subset",
    "--bounds", "--params", "--resolution", "--formula", "--theory", "--var",
    "--file", "--format", "--direction", "--n",
}


def _merge_flag_values(argv: list[str]) -> list[str]:
    """Join value flags with their argument so values starting with '-'
    (negative bounds, windows) survive argparse."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(_merge_flag_values(argv))
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return _HANDLERS[args.verb](args, parser)
    except SystemExit as exc:  # parser.error inside a handler
        return 2 if exc.code else 0
    except WindowCapError as exc:
        print(f"qomin: resource cap: {exc}", file=sys.stderr)
        return 4
    except (ParseError, SignatureError, EvalError, NonSentenceError,
            UnsupportedTheoryError, DecompositionError, QominError) as exc:
        print(f"qomin: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"qomin: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
