"""Quantifier elimination and sentence decision for the theory roster.

Engines: substitution + bound pairing for the dense order with predicate,
Cooper's algorithm for integer arithmetic (divisibility-aware test points
over an lcm-normalized variable), scaled Fourier-Motzkin for the divisible
rational group, an instance-level candidate-class procedure for the
chain-of-classes theory, and component reduction (integer sort + second
sort) for the lexicographic products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import EvalError, NonSentenceError, UnsupportedTheoryError
from .syntax import (
    And, Bool, Div, Eq, Exists, FALSE, Forall, Formula, Iff, Implies, Lt, Not,
    Or, Pred, TRUE, Term, Theory, and_, bound_vars, free_vars, fresh_name,
    is_quantifier_free, or_, substitute, to_nnf, validate,
)
from . import models


# ---------------------------------------------------------------------------
# Constant folding and Boolean simplification


def _const_value(t: Term):
    """Comparable value of a variable-free term, or None if it has variables.

    The value shape is symbol-driven: '1' gives an integer, '1Z' the pair
    (c, 0), and 1'/1'' combinations the pair (first, second).
    """
    if t.coeffs:
        return None
    ks = dict(t.consts)
    if not ks:
        return 0
    if set(ks) <= {"1"}:
        return ks.get("1", 0)
    if set(ks) <= {"1Z"}:
        return (ks.get("1Z", 0), Fraction(0))
    if set(ks) <= {"1p", "1pp"}:
        return (ks.get("1pp", 0), ks.get("1p", 0))
    return None


def _zero_like(v):
    if isinstance(v, tuple):
        return (0, v[1] * 0)
    return 0


def _fold_atom(a) -> bool | None:
    """Truth value of a variable-free atom, None when not decidable here."""
    match a:
        case Lt(l, r):
            v = _const_value(l - r)
            if v is None:
                return None
            return v < _zero_like(v)
        case Eq(l, r):
            v = _const_value(l - r)
            if v is None:
                return None
            return v == _zero_like(v)
        case Div(m, t):
            if t.variables():
                return None
            ks = dict(t.consts)
            if set(ks) <= {"1"}:
                return ks.get("1", 0) % m == 0
            if set(ks) <= {"1Z"}:
                return ks.get("1Z", 0) % m == 0
            if set(ks) <= {"1p", "1pp"}:
                return ks.get("1pp", 0) % m == 0 and ks.get("1p", 0) % m == 0
            return None
        case Pred("S", n, (l, r)):
            if l == r:
                return n == 0
            d = l - r
            if d.variables():
                return None
            v = _const_value(d)
            if isinstance(v, tuple):
                return abs(v[0]) == n
            return None
        case Pred("del", k, (t,)):
            v = _const_value(t)
            if v is None or not isinstance(v, tuple):
                return None
            return v[0] == k
        case Pred("P", _, (t,)):
            v = _const_value(t)
            if v is None or not isinstance(v, tuple):
                return None
            return v[0] % 2 == 0
        case Pred("Qp", _, (t,)):
            if t.variables():
                return None
            return True  # any constant in these signatures is dyadic
    return None


def _complement(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


def _simplify_once(f: Formula) -> Formula:
    match f:
        case Bool():
            return f
        case Lt() | Eq() | Div() | Pred():
            v = _fold_atom(f)
            return f if v is None else Bool(v)
        case Not(arg):
            a = _simplify_once(arg)
            if isinstance(a, Bool):
                return Bool(not a.value)
            if isinstance(a, Not):
                return a.arg
            return Not(a)
        case And(args):
            parts: list[Formula] = []
            seen = set()
            for a in args:
                s = _simplify_once(a)
                if s == FALSE:
                    return FALSE
                if s == TRUE:
                    continue
                leaves = s.args if isinstance(s, And) else (s,)
                for leaf in leaves:
                    if leaf in seen:
                        continue
                    if _complement(leaf) in seen:
                        return FALSE
                    seen.add(leaf)
                    parts.append(leaf)
            return and_(*parts)
        case Or(args):
            parts = []
            seen = set()
            for a in args:
                s = _simplify_once(a)
                if s == TRUE:
                    return TRUE
                if s == FALSE:
                    continue
                leaves = s.args if isinstance(s, Or) else (s,)
                for leaf in leaves:
                    if leaf in seen:
                        continue
                    if _complement(leaf) in seen:
                        return TRUE
                    seen.add(leaf)
                    parts.append(leaf)
            return or_(*parts)
        case Implies(l, r):
            sl, sr = _simplify_once(l), _simplify_once(r)
            if sl == FALSE or sr == TRUE:
                return TRUE
            if sl == TRUE:
                return sr
            if sr == FALSE:
                return _simplify_once(Not(sl))
            return Implies(sl, sr)
        case Iff(l, r):
            sl, sr = _simplify_once(l), _simplify_once(r)
            if sl == sr:
                return TRUE
            if sl == TRUE:
                return sr
            if sr == TRUE:
                return sl
            if sl == FALSE:
                return _simplify_once(Not(sr))
            if sr == FALSE:
                return _simplify_once(Not(sl))
            return Iff(sl, sr)
        case Exists(v, body):
            b = _simplify_once(body)
            if isinstance(b, Bool):
                return b
            return Exists(v, b)
        case Forall(v, body):
            b = _simplify_once(body)
            if isinstance(b, Bool):
                return b
            return Forall(v, b)
    return f


def simplify(f: Formula) -> Formula:
    """Constant folding, flattening, duplicate and complement removal, to a
    fixpoint.  Deterministic: argument order is preserved."""
    while True:
        g = _simplify_once(f)
        if g == f:
            return g
        f = g


# ---------------------------------------------------------------------------
# DNF over NNF formulas

_DNF_CAP = 100_000


def dnf(f: Formula) -> list[tuple[Formula, ...]]:
    """Disjunctive normal form of an NNF quantifier-free formula, as a list
    of literal tuples; contradictory and duplicate conjuncts are pruned."""

    def rec(g: Formula) -> list[tuple[Formula, ...]]:
        match g:
            case Bool(True):
                return [()]
            case Bool(False):
                return []
            case Or(args):
                out: list[tuple[Formula, ...]] = []
                keys = set()
                for a in args:
                    for conj in rec(a):
                        k = frozenset(conj)
                        if k not in keys:
                            keys.add(k)
                            out.append(conj)
                return out
            case And(args):
                combos: list[tuple[Formula, ...]] = [()]
                for a in args:
                    branches = rec(a)
                    new: list[tuple[Formula, ...]] = []
                    for left in combos:
                        for right in branches:
                            merged = _merge_conj(left, right)
                            if merged is not None:
                                new.append(merged)
                    if len(new) > _DNF_CAP:
                        raise EvalError("DNF blowup beyond internal cap")
                    combos = new
                return combos
            case _:
                return [(g,)]

    return rec(f)


def _merge_conj(left: tuple[Formula, ...], right: tuple[Formula, ...]) -> tuple[Formula, ...] | None:
    out = list(left)
    have = set(left)
    for lit in right:
        if lit in have:
            continue
        if _complement(lit) in have:
            return None
        have.add(lit)
        out.append(lit)
    return tuple(out)


# ---------------------------------------------------------------------------
# Generic driver: innermost-first existential elimination over DNF


def _eliminate(f: Formula, elim_exists) -> Formula:
    """f must be in NNF.  elim_exists(var, literals) -> Formula."""

    def rec(g: Formula) -> Formula:
        match g:
            case And(args):
                return simplify(and_(*(rec(a) for a in args)))
            case Or(args):
                return simplify(or_(*(rec(a) for a in args)))
            case Exists(v, body):
                return _exists(v, rec(body))
            case Forall(v, body):
                inner = rec(body)
                negated = simplify(to_nnf(Not(inner)))
                return simplify(to_nnf(Not(_exists(v, negated))))
            case _:
                return g

    def _exists(v: str, body: Formula) -> Formula:
        body = simplify(body)
        if v not in free_vars(body):
            return body
        results = [elim_exists(v, conj) for conj in dnf(body)]
        return simplify(or_(*results))

    return rec(f)


# ---------------------------------------------------------------------------
# Dense linear order with a dense/codense predicate


def _dlo_exists(v: str, lits: tuple[Formula, ...]) -> Formula:
    rest: list[Formula] = []
    lowers: list[Term] = []
    uppers: list[Term] = []
    pred_pos = pred_neg = False
    eq_partner: Term | None = None

    others: list[Formula] = []
    for lit in lits:
        fv = free_vars(lit)
        if v not in fv:
            rest.append(lit)
            continue
        others.append(lit)

    for lit in others:
        match lit:
            case Eq(l, r):
                if l == r:
                    continue
                eq_partner = r if l == Term.var(v) else l
            case _:
                pass
    if eq_partner is not None:
        sub = {v: eq_partner}
        return and_(*rest, *(substitute(lit, sub) for lit in others))

    for lit in others:
        match lit:
            case Lt(l, r):
                if l == r:
                    return FALSE
                if l == Term.var(v):
                    uppers.append(r)
                else:
                    lowers.append(l)
            case Eq(l, r):
                continue  # only v = v reaches here
            case Pred("Qp", _, _):
                pred_pos = True
            case Not(Pred("Qp", _, _)):
                pred_neg = True
            case _:
                raise EvalError(f"unexpected literal {lit!r} in dense-order elimination")
    if pred_pos and pred_neg:
        return FALSE
    # the predicate and its complement are both dense, so any nonempty open
    # interval (and any unbounded side) contains a witness of either kind
    pairs = [Lt(l, u) for l in lowers for u in uppers]
    return and_(*rest, *pairs)


def qe_dlo_pred(f: Formula) -> Formula:
    return _eliminate(to_nnf(f), _dlo_exists)


# ---------------------------------------------------------------------------
# Cooper's algorithm for Presburger arithmetic


def _coeff_split(t: Term, v: str) -> tuple[int, Term]:
    return t.coeff(v), t.drop_var(v)


def _var_coeff(lit: Formula, v: str) -> int:
    """Net coefficient of v in an order/equality/divisibility literal; a
    nonzero sentinel for predicate literals (which cannot cancel)."""
    core = lit.arg if isinstance(lit, Not) else lit
    match core:
        case Eq(l, r) | Lt(l, r):
            return (l - r).coeff(v)
        case Div(_, t):
            return t.coeff(v)
    return 1


def _cooper_exists(v: str, lits: tuple[Formula, ...]) -> Formula:
    rest: list[Formula] = []
    lowers: list[tuple[int, Term]] = []   # (a, t): t < a*v
    uppers: list[tuple[int, Term]] = []   # (a, t): a*v < t
    divs: list[tuple[int, int, Term, bool]] = []  # (m, a, t, positive): D_m(a*v + t)

    for lit in lits:
        if v not in free_vars(lit) or _var_coeff(lit, v) == 0:
            rest.append(lit)
            continue
        match lit:
            case Eq(l, r):
                n, t = _coeff_split(l - r, v)
                one = Term.const(1)
                # n*v + t = 0  <=>  n*v < -t + 1  and  -t - 1 < n*v
                for bound in (Lt(Term.var(v, n), -t + one), Lt(-t - one, Term.var(v, n))):
                    a, s = _coeff_split(bound.left - bound.right, v)
                    if a > 0:
                        uppers.append((a, -s))
                    else:
                        lowers.append((-a, s))
            case Lt(l, r):
                n, t = _coeff_split(l - r, v)
                if n > 0:
                    uppers.append((n, -t))
                else:
                    lowers.append((-n, t))
            case Div(m, arg):
                n, t = _coeff_split(arg, v)
                if n < 0:
                    n, t = -n, -t
                divs.append((m, n, t, True))
            case Not(Div(m, arg)):
                n, t = _coeff_split(arg, v)
                if n < 0:
                    n, t = -n, -t
                divs.append((m, n, t, False))
            case _:
                raise EvalError(f"unexpected literal {lit!r} in integer elimination")

    coeffs = [a for a, _ in lowers] + [a for a, _ in uppers] + [a for _, a, _, _ in divs]
    big = math.lcm(*coeffs) if coeffs else 1
    lows = [t.scale(big // a) for a, t in lowers]
    ups = [t.scale(big // a) for a, t in uppers]
    dv = [(m * (big // a), t.scale(big // a), pos) for m, a, t, pos in divs]
    if big > 1:
        dv.append((big, Term.zero(), True))

    period = math.lcm(*(m for m, _, _ in dv)) if dv else 1

    def instance(y: Term, drop_lows: bool) -> Formula:
        parts: list[Formula] = []
        for t in lows:
            if drop_lows:
                return FALSE  # a lower bound is false near -infinity
            parts.append(Lt(t, y))
        for t in ups:
            parts.append(Lt(y, t))
        for m, t, pos in dv:
            atom = Div(m, y + t) if m >= 2 else TRUE
            if not pos:
                atom = Not(atom) if atom != TRUE else FALSE
            parts.append(atom)
        return and_(*parts)

    def minus_inf(j: int) -> Formula:
        parts: list[Formula] = []
        if lows:
            return FALSE
        # near -infinity upper bounds hold; only divisibilities matter
        jt = Term.const(j)
        for m, t, pos in dv:
            atom = Div(m, t + jt) if m >= 2 else TRUE
            if not pos:
                atom = Not(atom) if atom != TRUE else FALSE
            parts.append(atom)
        return and_(*parts)

    def plus_inf(j: int) -> Formula:
        parts: list[Formula] = []
        if ups:
            return FALSE
        jt = Term.const(-j)
        for m, t, pos in dv:
            atom = Div(m, t + jt) if m >= 2 else TRUE
            if not pos:
                atom = Not(atom) if atom != TRUE else FALSE
            parts.append(atom)
        return and_(*parts)

    branches: list[Formula] = []
    if len(lows) <= len(ups):
        for j in range(1, period + 1):
            branches.append(minus_inf(j))
        for b in lows:
            for j in range(1, period + 1):
                branches.append(instance(b + Term.const(j), drop_lows=False))
    else:
        for j in range(1, period + 1):
            branches.append(plus_inf(j))
        for a in ups:
            for j in range(1, period + 1):
                branches.append(instance(a - Term.const(j), drop_lows=False))
    return simplify(and_(*rest, or_(*branches)))


def qe_presburger(f: Formula) -> Formula:
    return _eliminate(to_nnf(f), _cooper_exists)


def translate_nat(f: Formula) -> Formula:
    """Relativize every quantifier to v >= 0, turning a naturals formula into
    an integers formula that agrees with it on natural assignments."""

    def ge0(v: str) -> Formula:
        return Or((Lt(Term.zero(), Term.var(v)), Eq(Term.zero(), Term.var(v))))

    def rec(g: Formula) -> Formula:
        match g:
            case Exists(v, body):
                return Exists(v, and_(ge0(v), rec(body)))
            case Forall(v, body):
                return Forall(v, Implies(ge0(v), rec(body)))
            case Not(arg):
                return Not(rec(arg))
            case And(args):
                return And(tuple(rec(a) for a in args))
            case Or(args):
                return Or(tuple(rec(a) for a in args))
            case Implies(l, r):
                return Implies(rec(l), rec(r))
            case Iff(l, r):
                return Iff(rec(l), rec(r))
            case _:
                return g

    return rec(f)


# ---------------------------------------------------------------------------
# Example 2 identities, exposed as first-class rewrites


def rewrite_divisibility(m: int, n: int, t: Term, var: str = "x") -> Formula:
    """Split D_m(n*var + t) into a disjunction of var-only and t-only parts:
    OR_{i<m} ( D_m(n*var - i) & D_m(t + i) )."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    x = Term.var(var, n)
    branches = []
    for i in range(m):
        c = Term.const(i)
        branches.append(And((Div(m, x - c), Div(m, t + c))))
    return Or(tuple(branches))


def floor_div_bounds(var: str, t: Term, n: int) -> Formula:
    """The order characterization of var = floor(t/n) over the integers:
    n*var <= t < n*var + n."""
    nx = Term.var(var, n)
    return and_(
        or_(Lt(nx, t), Eq(nx, t)),
        Lt(t, nx + Term.const(n)),
    )


def isolate_x_equality(n: int, t: Term, var: str = "x") -> Formula:
    """n*var = t  iff  var = floor(t/n) and n divides t; the floor equation is
    rendered by its order characterization."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Eq(Term.var(var), t)
    return and_(floor_div_bounds(var, t, n), Div(n, t))


def isolate_x_inequality(n: int, t: Term, var: str = "x") -> Formula:
    """t < n*var  iff  floor(t/n) < var; over the integers the scaled atom is
    that inequality, with the floor itself realized at the witness layer."""
    if n < 1:
        raise ValueError("n must be positive")
    return Lt(t, Term.var(var, n))


# ---------------------------------------------------------------------------
# Divisible ordered group of rationals


def _doag_exists(v: str, lits: tuple[Formula, ...]) -> Formula:
    rest: list[Formula] = []
    lowers: list[tuple[int, Term]] = []  # (a, t): t < a*v
    uppers: list[tuple[int, Term]] = []  # (a, t): a*v < t
    eqs: list[tuple[int, Term]] = []     # (a, t): a*v = t

    for lit in lits:
        if v not in free_vars(lit) or _var_coeff(lit, v) == 0:
            rest.append(lit)
            continue
        match lit:
            case Eq(l, r):
                n, t = _coeff_split(l - r, v)
                if n > 0:
                    eqs.append((n, -t))
                else:
                    eqs.append((-n, t))
            case Lt(l, r):
                n, t = _coeff_split(l - r, v)
                if n > 0:
                    uppers.append((n, -t))
                else:
                    lowers.append((-n, t))
            case _:
                raise EvalError(f"unexpected literal {lit!r} in divisible-group elimination")

    if eqs:
        n, s = eqs[0]  # v = s/n
        parts: list[Formula] = []
        for a, t in eqs[1:]:
            parts.append(Eq(s.scale(a), t.scale(n)))
        for a, t in lowers:
            parts.append(Lt(t.scale(n), s.scale(a)))
        for a, t in uppers:
            parts.append(Lt(s.scale(a), t.scale(n)))
        return and_(*rest, *parts)

    pairs = [Lt(t.scale(b), u.scale(a)) for a, t in lowers for b, u in uppers]
    return and_(*rest, *pairs)


def qe_doag(f: Formula) -> Formula:
    return _eliminate(to_nnf(f), _doag_exists)


# ---------------------------------------------------------------------------
# Chain-of-classes theory: dense S_0-classes on a discrete chain with an
# alternating predicate P


def _s(n: int, a: str | Term, b: str | Term) -> Formula:
    ta = a if isinstance(a, Term) else Term.var(a)
    tb = b if isinstance(b, Term) else Term.var(b)
    return Pred("S", n, (ta, tb))


def _sd(w: str, k: int, u: str) -> Formula:
    """cl(u) = cl(w) + k as a formula."""
    if k == 0:
        return _s(0, w, u)
    if k > 0:
        return and_(_s(k, w, u), Lt(Term.var(w), Term.var(u)))
    return and_(_s(-k, w, u), Lt(Term.var(u), Term.var(w)))


def _cl_le_shift(a: str, w: str, m: int) -> Formula:
    """cl(a) <= cl(w) + m."""
    if m >= 0:
        base = or_(Lt(Term.var(a), Term.var(w)), _s(0, a, w))
        return or_(base, *(_sd(w, d, a) for d in range(1, m + 1)))
    p = -m
    below = and_(Lt(Term.var(a), Term.var(w)), Not(_s(0, a, w)))
    return and_(below, *(Not(_sd(w, -d, a)) for d in range(1, p)))


def _cl_ge_shift(a: str, w: str, m: int) -> Formula:
    """cl(a) >= cl(w) + m."""
    if m <= 0:
        base = or_(Lt(Term.var(w), Term.var(a)), _s(0, a, w))
        return or_(base, *(_sd(w, -d, a) for d in range(1, -m + 1)))
    above = and_(Lt(Term.var(w), Term.var(a)), Not(_s(0, w, a)))
    return and_(above, *(Not(_sd(w, d, a)) for d in range(1, m)))


def _tchain_exists(v: str, lits: tuple[Formula, ...]) -> Formula:
    rest: list[Formula] = []
    lowers: list[str] = []
    uppers: list[str] = []
    pos_s: list[tuple[int, str]] = []
    neg_s: list[tuple[int, str]] = []
    parity: str | None = None  # 'even' for P(v), 'odd' for ~P(v)
    vterm = Term.var(v)

    pending: list[Formula] = []
    for lit in lits:
        if v not in free_vars(lit):
            rest.append(lit)
            continue
        pending.append(lit)

    # an equality literal lets us substitute v away entirely
    for lit in pending:
        if isinstance(lit, Eq) and lit.left != lit.right:
            u = lit.right if lit.left == vterm else lit.left
            sub = {v: u}
            return and_(*rest, *(substitute(o, sub) for o in pending if o is not lit))

    for lit in pending:
        match lit:
            case Eq(l, r):
                continue  # v = v
            case Lt(l, r):
                if l == r:
                    return FALSE
                if l == vterm:
                    uppers.append(r.coeffs[0][0])
                else:
                    lowers.append(l.coeffs[0][0])
            case Pred("P", _, _):
                if parity == "odd":
                    return FALSE
                parity = "even"
            case Not(Pred("P", _, _)):
                if parity == "even":
                    return FALSE
                parity = "odd"
            case Pred("S", n, (l, r)):
                if l == r:
                    if n != 0:
                        return FALSE
                    continue
                other = r.coeffs[0][0] if l == vterm else l.coeffs[0][0]
                pos_s.append((n, other))
            case Not(Pred("S", n, (l, r))):
                if l == r:
                    if n == 0:
                        return FALSE
                    continue
                other = r.coeffs[0][0] if l == vterm else l.coeffs[0][0]
                neg_s.append((n, other))
            case _:
                raise EvalError(f"unexpected literal {lit!r} in chain elimination")

    params: list[str] = []
    for name in lowers + uppers + [u for _, u in pos_s] + [u for _, u in neg_s]:
        if name not in params:
            params.append(name)

    if not params:
        # only parity constraints remain; both parities are realized
        return and_(*rest)

    reach = max([n for n, _ in pos_s + neg_s], default=0) + 2

    def candidate(w: str, m: int) -> Formula:
        conds: list[Formula] = []
        for n, u in pos_s:
            conds.append(or_(_sd(w, m - n, u), _sd(w, m + n, u)))
        for n, u in neg_s:
            conds.append(Not(or_(_sd(w, m - n, u), _sd(w, m + n, u))))
        if parity is not None:
            want_same = (m % 2 == 0) == (parity == "even")
            # parity of the candidate class relative to P(w)
            conds.append(Pred("P", None, (Term.var(w),)) if want_same else Not(Pred("P", None, (Term.var(w),))))
        for l in lowers:
            conds.append(_cl_le_shift(l, w, m))
        for u in uppers:
            conds.append(_cl_ge_shift(u, w, m))
        for l in lowers:
            for u in uppers:
                conds.append(or_(Not(_sd(w, m, l)), Not(_sd(w, m, u)), Lt(Term.var(l), Term.var(u))))
        return and_(*conds)

    branches: list[Formula] = []
    for w in params:
        for m in range(-reach, reach + 1):
            branches.append(candidate(w, m))
    if not pos_s and not uppers:
        branches.append(TRUE)  # witnesses arbitrarily far right
    if not pos_s and not lowers:
        branches.append(TRUE)  # witnesses arbitrarily far left

    body = simplify(to_nnf(or_(*branches)))
    return and_(*rest, body)


def qe_tchain(f: Formula) -> Formula:
    return _eliminate(to_nnf(f), _tchain_exists)


# ---------------------------------------------------------------------------
# Lexicographic products: component reduction


@dataclass(frozen=True)
class ComponentFormula:
    """A formula over split coordinates: each product variable x becomes an
    integer-sort variable x_z and a second-coordinate variable x_2."""

    theory: Theory
    formula: Formula
    pairs: tuple[tuple[str, str, str], ...]  # (original, z-name, second-name)
    sorts: tuple[tuple[str, str], ...] = ()  # (component name, 'z' | 's')

    def var_map(self) -> dict[str, tuple[str, str]]:
        return {orig: (z, s) for orig, z, s in self.pairs}


def _split_names(variables, taken: set[str]) -> dict[str, tuple[str, str]]:
    out: dict[str, tuple[str, str]] = {}
    for v in sorted(variables):
        z = fresh_name(f"{v}_z", taken)
        taken.add(z)
        s = fresh_name(f"{v}_2", taken)
        taken.add(s)
        out[v] = (z, s)
    return out


def _split_term(theory: Theory, t: Term, names: dict[str, tuple[str, str]]) -> tuple[Term, Term]:
    zc: dict[str, int] = {}
    sc: dict[str, int] = {}
    for v, c in t.coeffs:
        z, s = names[v]
        zc[z] = c
        sc[s] = c
    zk = 0
    sk = 0
    for sym, c in t.consts:
        if sym == "1Z" or sym == "1pp":
            zk += c
        elif sym == "1p":
            sk += c
    return Term.make(zc, {"1": zk}), Term.make(sc, {"1": sk})


def lex_split(theory: Theory, f: Formula) -> ComponentFormula:
    """Translate a lexicographic-product formula componentwise: order atoms
    become first-coordinate-then-second comparisons, divisibility follows the
    product subgroup, del_k pins the integer coordinate."""
    if theory not in (Theory.LEX_ZQ, Theory.LEX_ZZ):
        raise UnsupportedTheoryError(f"lex_split does not apply to {theory.value}")
    taken = set(free_vars(f)) | set(bound_vars(f))
    names = _split_names(free_vars(f), taken)
    sorts: dict[str, str] = {}
    for v, (z, s) in names.items():
        sorts[z] = "z"
        sorts[s] = "s"

    def split_atom(a) -> Formula:
        match a:
            case Eq(l, r):
                lz, ls = _split_term(theory, l, names)
                rz, rs = _split_term(theory, r, names)
                return and_(Eq(lz, rz), Eq(ls, rs))
            case Lt(l, r):
                lz, ls = _split_term(theory, l, names)
                rz, rs = _split_term(theory, r, names)
                return or_(Lt(lz, rz), and_(Eq(lz, rz), Lt(ls, rs)))
            case Div(m, t):
                tz, ts = _split_term(theory, t, names)
                if theory == Theory.LEX_ZQ:
                    return Div(m, tz)
                return and_(Div(m, tz), Div(m, ts))
            case Pred("del", k, (t,)):
                tz, _ = _split_term(theory, t, names)
                return Eq(tz, Term.const(k))
        raise EvalError(f"cannot split atom {a!r}")

    def rec(g: Formula) -> Formula:
        match g:
            case Lt() | Eq() | Div() | Pred():
                return split_atom(g)
            case Bool():
                return g
            case Not(arg):
                return Not(rec(arg))
            case And(args):
                return And(tuple(rec(a) for a in args))
            case Or(args):
                return Or(tuple(rec(a) for a in args))
            case Implies(l, r):
                return Implies(rec(l), rec(r))
            case Iff(l, r):
                return Iff(rec(l), rec(r))
            case Exists(v, body) | Forall(v, body):
                z = fresh_name(f"{v}_z", taken)
                taken.add(z)
                s = fresh_name(f"{v}_2", taken)
                taken.add(s)
                names[v] = (z, s)
                sorts[z] = "z"
                sorts[s] = "s"
                inner = rec(body)
                del names[v]
                if isinstance(g, Exists):
                    return Exists(z, Exists(s, inner))
                return Forall(z, Forall(s, inner))

    formula = rec(f)
    pairs = tuple((v, *names[v]) for v in sorted(names))
    return ComponentFormula(theory, formula, pairs, tuple(sorted(sorts.items())))


def qe_lex(theory: Theory, f: Formula) -> ComponentFormula:
    """Component QE: split, then eliminate second-coordinate variables with
    the dense-group engine (Z x Q) or Cooper (Z x Z), and integer-coordinate
    variables with Cooper."""
    cf = lex_split(theory, f)
    sorts = dict(cf.sorts)
    second_engine = _doag_exists if theory == Theory.LEX_ZQ else _cooper_exists

    def elim(v: str, lits: tuple[Formula, ...]) -> Formula:
        if sorts.get(v, "z") == "z":
            return _cooper_exists(v, lits)
        return second_engine(v, lits)

    out = simplify(_eliminate(to_nnf(cf.formula), elim))
    return ComponentFormula(theory, out, cf.pairs, cf.sorts)


def eval_component(cf: ComponentFormula, asg: dict) -> bool:
    """Evaluate a quantifier-free component formula at a pair assignment
    keyed by the original variables."""
    if not is_quantifier_free(cf.formula):
        raise EvalError("component formula must be quantifier-free to evaluate")
    flat: dict = {}
    for orig, z, s in cf.pairs:
        a, b = asg[orig]
        flat[z] = a
        flat[s] = b
    return _eval_numeric(cf.formula, flat)


def _num_term(t: Term, asg: dict):
    v = 0
    for var, c in t.coeffs:
        if var not in asg:
            raise EvalError(f"unbound variable {var!r}")
        v += c * asg[var]
    for sym, c in t.consts:
        if sym != "1":
            raise EvalError(f"non-numeric constant {sym!r} in component term")
        v += c
    return v


def _eval_numeric(f: Formula, asg: dict) -> bool:
    match f:
        case Bool(b):
            return b
        case Lt(l, r):
            return _num_term(l, asg) < _num_term(r, asg)
        case Eq(l, r):
            return _num_term(l, asg) == _num_term(r, asg)
        case Div(m, t):
            v = _num_term(t, asg)
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise EvalError("divisibility over a non-integer value")
                v = v.numerator
            return v % m == 0
        case Not(arg):
            return not _eval_numeric(arg, asg)
        case And(args):
            return all(_eval_numeric(a, asg) for a in args)
        case Or(args):
            return any(_eval_numeric(a, asg) for a in args)
        case Implies(l, r):
            return (not _eval_numeric(l, asg)) or _eval_numeric(r, asg)
        case Iff(l, r):
            return _eval_numeric(l, asg) == _eval_numeric(r, asg)
    raise EvalError(f"cannot evaluate {f!r} numerically")


# ---------------------------------------------------------------------------
# Dispatcher and sentence decision


def qe(theory: Theory, f: Formula):
    """Quantifier elimination for the given theory.  Lexicographic theories
    return a ComponentFormula; all others return a Formula."""
    validate(f, theory)
    match theory:
        case Theory.DLO_PRED:
            return simplify(qe_dlo_pred(f))
        case Theory.PRES_Z:
            return simplify(qe_presburger(f))
        case Theory.PRES_N:
            return simplify(qe_presburger(translate_nat(f)))
        case Theory.DOAG_Q:
            return simplify(qe_doag(f))
        case Theory.TCHAIN:
            return simplify(qe_tchain(f))
        case Theory.LEX_ZQ | Theory.LEX_ZZ:
            return qe_lex(theory, f)
    raise UnsupportedTheoryError(f"no quantifier elimination engine for {theory.value}")


def oracle_agreement(theory: Theory, f: Formula, asg_window, search_window,
                     cap: int | None = None):
    """Compare windowed truth of f against its quantifier-free image under
    qe, over every assignment of the free variables drawn from the
    assignment window.

    Returns (total, mismatches) where mismatches lists at most five
    (assignment, windowed, eliminated) triples."""
    import itertools

    out = qe(theory, f)
    fvs = sorted(free_vars(f))
    elems = models.enumerate_window(theory, asg_window, cap)
    f_fn = models.compile_eval(theory, f, search_window, cap)
    if isinstance(out, ComponentFormula):
        def out_truth(asg):
            return eval_component(out, asg)
    else:
        base = Theory.PRES_Z if theory == Theory.PRES_N else theory
        out_fn = models.compile_eval(base, out)

        def out_truth(asg):
            return out_fn(asg)

    total = 0
    mismatches = []
    for combo in itertools.product(elems, repeat=len(fvs)):
        asg = dict(zip(fvs, combo))
        lhs = f_fn(dict(asg))
        rhs = out_truth(dict(asg))
        total += 1
        if lhs != rhs and len(mismatches) < 5:
            mismatches.append((asg, lhs, rhs))
    return total, mismatches


def decide(theory: Theory, sentence: Formula) -> bool:
    """Truth of a sentence in the standard model: QE, then closed evaluation."""
    if free_vars(sentence):
        raise NonSentenceError(
            f"free variable(s) {sorted(free_vars(sentence))} in decide()"
        )
    out = qe(theory, sentence)
    if isinstance(out, ComponentFormula):
        return _eval_numeric(out.formula, {})
    base = Theory.PRES_Z if theory == Theory.PRES_N else theory
    folded = simplify(out)
    if isinstance(folded, Bool):
        return folded.value
    return models.eval_qf(base, folded, {})
