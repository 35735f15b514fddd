"""Concrete exact-arithmetic models for every theory in the roster.

Elements are plain Python values: int (PRES_Z/PRES_N), Fraction
(DLO_PRED/DOAG_Q/DYADIC), (int, Fraction) pairs (LEX_ZQ/TCHAIN) and
(int, int) pairs (LEX_ZZ), ordered lexicographically where applicable.
Quantifiers are evaluated by exhaustive search over a finite Window —
exact only when every relevant witness lies inside the window, which the
curated corpora guarantee.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import EvalError, WindowCapError
from .syntax import (
    And, Bool, Div, Eq, Exists, Forall, Formula, Iff, Implies, Lt, Not, Or,
    Pred, Term, Theory, free_vars, is_quantifier_free,
)

Element = int | Fraction | tuple

DEFAULT_WINDOW_CAP = 10**6

_PAIR_THEORIES = (Theory.LEX_ZQ, Theory.LEX_ZZ, Theory.TCHAIN)
_RAT_THEORIES = (Theory.DLO_PRED, Theory.DOAG_Q, Theory.DYADIC)

# values of the constant symbols, per theory
_CONSTS: dict[Theory, dict[str, Element]] = {
    Theory.PRES_Z: {"1": 1},
    Theory.PRES_N: {"1": 1},
    Theory.DOAG_Q: {"1": Fraction(1)},
    Theory.DYADIC: {"1": Fraction(1)},
    Theory.LEX_ZQ: {"1Z": (1, Fraction(0))},
    Theory.LEX_ZZ: {"1p": (0, 1), "1pp": (1, 0)},
    Theory.DLO_PRED: {},
    Theory.TCHAIN: {},
}


def _scale(n: int, v: Element) -> Element:
    if isinstance(v, tuple):
        return (n * v[0], n * v[1])
    return n * v


def _add(a: Element, b: Element) -> Element:
    if isinstance(a, tuple):
        return (a[0] + b[0], a[1] + b[1])
    return a + b


def zero_element(theory: Theory) -> Element:
    if theory in (Theory.PRES_Z, Theory.PRES_N):
        return 0
    if theory in _RAT_THEORIES:
        return Fraction(0)
    if theory == Theory.LEX_ZZ:
        return (0, 0)
    return (0, Fraction(0))


def check_element(theory: Theory, v: Element) -> None:
    """Raise EvalError unless v carries the model's tag."""
    ok = False
    match theory:
        case Theory.PRES_Z:
            ok = isinstance(v, int)
        case Theory.PRES_N:
            ok = isinstance(v, int) and v >= 0
        case Theory.DLO_PRED | Theory.DOAG_Q:
            ok = isinstance(v, Fraction)
        case Theory.DYADIC:
            ok = isinstance(v, Fraction) and _is_dyadic(v)
        case Theory.LEX_ZQ | Theory.TCHAIN:
            ok = (
                isinstance(v, tuple) and len(v) == 2
                and isinstance(v[0], int) and isinstance(v[1], Fraction)
            )
        case Theory.LEX_ZZ:
            ok = isinstance(v, tuple) and len(v) == 2 and all(isinstance(c, int) for c in v)
    if not ok:
        raise EvalError(f"element {v!r} does not belong to the {theory.value} model")


def _is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def eval_term(theory: Theory, t: Term, asg: Mapping[str, Element]) -> Element:
    v = zero_element(theory)
    for var, c in t.coeffs:
        if var not in asg:
            raise EvalError(f"unbound variable {var!r}")
        v = _add(v, _scale(c, asg[var]))
    consts = _CONSTS[theory]
    for sym, c in t.consts:
        v = _add(v, _scale(c, consts[sym]))
    return v


def interpret(theory: Theory, atom, asg: Mapping[str, Element]) -> bool:
    """Truth value of a single atom under the intended interpretation."""
    match atom:
        case Lt(l, r):
            return eval_term(theory, l, asg) < eval_term(theory, r, asg)
        case Eq(l, r):
            return eval_term(theory, l, asg) == eval_term(theory, r, asg)
        case Div(m, t):
            v = eval_term(theory, t, asg)
            if theory in (Theory.PRES_Z, Theory.PRES_N):
                return v % m == 0
            if theory == Theory.LEX_ZQ:
                # the rational coordinate is m-divisible, so only the integer
                # coordinate matters: D_m((a, q)) iff m | a
                return v[0] % m == 0
            if theory == Theory.LEX_ZZ:
                return v[0] % m == 0 and v[1] % m == 0
            raise EvalError(f"divisibility has no interpretation in {theory.value}")
        case Pred("Qp", _, (t,)):
            return _is_dyadic(eval_term(theory, t, asg))
        case Pred("P", _, (t,)):
            return eval_term(theory, t, asg)[0] % 2 == 0
        case Pred("S", n, (t, s)):
            a = eval_term(theory, t, asg)
            b = eval_term(theory, s, asg)
            return abs(a[0] - b[0]) == n
        case Pred("del", k, (t,)):
            return eval_term(theory, t, asg)[0] == k
    raise EvalError(f"cannot interpret atom {atom!r} in {theory.value}")


# ---------------------------------------------------------------------------
# Windows


@dataclass(frozen=True)
class Window:
    """Finite symmetric search box: scalar range [lo, hi], or for pair models
    the box [lo[0], hi[0]] x [lo[1], hi[1]]; rational coordinates are
    enumerated up to the denominator bound."""

    lo: Element
    hi: Element
    denom: int = 1

    def __post_init__(self):
        if self.denom < 1:
            raise ValueError("denominator bound must be >= 1")


def _rat_range(lo: Fraction, hi: Fraction, denom: int, dyadic: bool) -> list[Fraction]:
    qs: Iterable[int]
    if dyadic:
        qs = []
        q = 1
        while q <= denom:
            qs.append(q)
            q *= 2
    else:
        qs = range(1, denom + 1)
    seen = set()
    for q in qs:
        p_lo = -((-lo.numerator * q) // lo.denominator)  # ceil(lo*q)
        p_hi = (hi.numerator * q) // hi.denominator      # floor(hi*q)
        for p in range(p_lo, p_hi + 1):
            seen.add(Fraction(p, q))
    return sorted(seen)


def _window_count(theory: Theory, w: Window) -> int:
    # cheap overestimate used for the cap check
    match theory:
        case Theory.PRES_Z | Theory.PRES_N:
            return max(0, w.hi - w.lo + 1)
        case Theory.DLO_PRED | Theory.DOAG_Q | Theory.DYADIC:
            span = w.hi - w.lo
            return int(span * w.denom * w.denom) + w.denom + 1
        case Theory.LEX_ZZ:
            return max(0, w.hi[0] - w.lo[0] + 1) * max(0, w.hi[1] - w.lo[1] + 1)
        case Theory.LEX_ZQ | Theory.TCHAIN:
            span = w.hi[1] - w.lo[1]
            per = int(span * w.denom * w.denom) + w.denom + 1
            return max(0, w.hi[0] - w.lo[0] + 1) * per
    raise EvalError(f"no window enumeration for {theory.value}")


_ENUM_CACHE: dict[tuple, tuple] = {}


def enumerate_window(theory: Theory, w: Window, cap: int | None = None) -> tuple:
    """Deterministic, duplicate-free, model-ordered finite enumeration."""
    cap = DEFAULT_WINDOW_CAP if cap is None else cap
    key = (theory, w.lo, w.hi, w.denom)
    cached = _ENUM_CACHE.get(key)
    if cached is not None:
        if len(cached) > cap:
            raise WindowCapError(f"window holds {len(cached)} elements, cap is {cap}")
        return cached
    check_element(theory, w.lo) if theory not in (Theory.PRES_N,) else None
    if _window_count(theory, w) > cap:
        raise WindowCapError(
            f"window would enumerate about {_window_count(theory, w)} elements, cap is {cap}"
        )
    match theory:
        case Theory.PRES_Z:
            vals = tuple(range(w.lo, w.hi + 1))
        case Theory.PRES_N:
            vals = tuple(range(max(0, w.lo), w.hi + 1))
        case Theory.DLO_PRED | Theory.DOAG_Q:
            vals = tuple(_rat_range(Fraction(w.lo), Fraction(w.hi), w.denom, dyadic=False))
        case Theory.DYADIC:
            vals = tuple(_rat_range(Fraction(w.lo), Fraction(w.hi), w.denom, dyadic=True))
        case Theory.LEX_ZZ:
            vals = tuple(
                (a, b)
                for a in range(w.lo[0], w.hi[0] + 1)
                for b in range(w.lo[1], w.hi[1] + 1)
            )
        case Theory.LEX_ZQ | Theory.TCHAIN:
            seconds = _rat_range(Fraction(w.lo[1]), Fraction(w.hi[1]), w.denom, dyadic=False)
            vals = tuple(
                (a, q) for a in range(w.lo[0], w.hi[0] + 1) for q in seconds
            )
        case _:
            raise EvalError(f"no window enumeration for {theory.value}")
    if len(vals) > cap:
        raise WindowCapError(f"window holds {len(vals)} elements, cap is {cap}")
    _ENUM_CACHE[key] = vals
    return vals


# ---------------------------------------------------------------------------
# Evaluation

Assignment = dict[str, Element]


def _compile_term(theory: Theory, t: Term) -> Callable[[Assignment], Element]:
    base = zero_element(theory)
    consts = _CONSTS[theory]
    for sym, c in t.consts:
        base = _add(base, _scale(c, consts[sym]))
    coeffs = t.coeffs
    if not coeffs:
        return lambda asg: base
    if isinstance(base, tuple):
        def ev_pair(asg: Assignment) -> Element:
            a, b = base
            for var, c in coeffs:
                v = asg[var]
                a += c * v[0]
                b += c * v[1]
            return (a, b)
        return ev_pair

    def ev(asg: Assignment) -> Element:
        v = base
        for var, c in coeffs:
            v += c * asg[var]
        return v
    return ev


def compile_eval(theory: Theory, f: Formula,
                 window: Window | None = None,
                 cap: int | None = None) -> Callable[[Assignment], bool]:
    """Compile a formula to a closure over assignments.

    Quantifiers require a window and search it exhaustively; without a
    window any quantifier raises EvalError at compile time.
    """
    elems: tuple = ()
    if window is not None:
        elems = enumerate_window(theory, window, cap)

    def comp(g: Formula) -> Callable[[Assignment], bool]:
        match g:
            case Bool(b):
                return lambda asg, _b=b: _b
            case Lt(l, r):
                le = _compile_term(theory, l)
                re_ = _compile_term(theory, r)
                return lambda asg: le(asg) < re_(asg)
            case Eq(l, r):
                le = _compile_term(theory, l)
                re_ = _compile_term(theory, r)
                return lambda asg: le(asg) == re_(asg)
            case Div() | Pred():
                atom = g
                return lambda asg: interpret(theory, atom, asg)
            case Not(arg):
                inner = comp(arg)
                return lambda asg: not inner(asg)
            case And(args):
                parts = [comp(a) for a in args]
                return lambda asg: all(p(asg) for p in parts)
            case Or(args):
                parts = [comp(a) for a in args]
                return lambda asg: any(p(asg) for p in parts)
            case Implies(l, r):
                cl, cr = comp(l), comp(r)
                return lambda asg: (not cl(asg)) or cr(asg)
            case Iff(l, r):
                cl, cr = comp(l), comp(r)
                return lambda asg: cl(asg) == cr(asg)
            case Exists(v, body):
                if window is None:
                    raise EvalError("quantifier present; a window is required")
                inner = comp(body)

                def ex(asg: Assignment, _v=v, _inner=inner) -> bool:
                    old = asg.get(_v)
                    try:
                        for e in elems:
                            asg[_v] = e
                            if _inner(asg):
                                return True
                        return False
                    finally:
                        if old is None:
                            asg.pop(_v, None)
                        else:
                            asg[_v] = old
                return ex
            case Forall(v, body):
                if window is None:
                    raise EvalError("quantifier present; a window is required")
                inner = comp(body)

                def fa(asg: Assignment, _v=v, _inner=inner) -> bool:
                    old = asg.get(_v)
                    try:
                        for e in elems:
                            asg[_v] = e
                            if not _inner(asg):
                                return False
                        return True
                    finally:
                        if old is None:
                            asg.pop(_v, None)
                        else:
                            asg[_v] = old
                return fa
        raise EvalError(f"cannot compile {g!r}")

    return comp(f)


def _check_assignment(theory: Theory, f: Formula, asg: Mapping[str, Element]) -> None:
    missing = free_vars(f) - set(asg)
    if missing:
        raise EvalError(f"unbound variable(s): {', '.join(sorted(missing))}")
    for v in free_vars(f):
        check_element(theory, asg[v])


def eval_qf(theory: Theory, f: Formula, asg: Mapping[str, Element]) -> bool:
    """Evaluate a quantifier-free formula exactly."""
    if not is_quantifier_free(f):
        raise EvalError("formula contains quantifiers; use eval_windowed")
    _check_assignment(theory, f, asg)
    return compile_eval(theory, f)(dict(asg))


def eval_windowed(theory: Theory, f: Formula, asg: Mapping[str, Element],
                  w: Window, cap: int | None = None) -> bool:
    """Evaluate with quantifiers ranging over the window.

    This is an approximation of model truth that is exact exactly when all
    relevant quantifier witnesses lie inside the window.
    """
    _check_assignment(theory, f, asg)
    return compile_eval(theory, f, w, cap)(dict(asg))


def format_element(v: Element) -> str:
    if isinstance(v, tuple):
        return f"({v[0]}, {format_element(v[1])})"
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def parse_element(text: str, theory: Theory) -> Element:
    """Parse 'n', 'p/q', or '(a, p/q)' into a model element."""
    text = text.strip()
    if text.startswith("("):
        if not text.endswith(")"):
            raise EvalError(f"malformed pair {text!r}")
        inner = text[1:-1]
        parts = inner.split(",")
        if len(parts) != 2:
            raise EvalError(f"malformed pair {text!r}")
        a = int(parts[0].strip())
        if theory == Theory.LEX_ZZ:
            b: Element = int(parts[1].strip())
        else:
            b = Fraction(parts[1].strip())
        v: Element = (a, b)
    elif theory in _RAT_THEORIES:
        v = Fraction(text)
    else:
        v = int(text)
    check_element(theory, v)
    return v
