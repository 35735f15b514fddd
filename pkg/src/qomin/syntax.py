"""First-order syntax for the supported ordered-group theories.

Terms are linear: integer coefficients on variables plus integer multiples
of the signature's constant symbols.  Atoms cover order, equality, modular
divisibility D_m, and the indexed predicate families (Qp, P, S_n, del_k).
Formulas are trees over atoms with the usual connectives and quantifiers.
Everything is immutable; every operation here is pure.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import ParseError, SignatureError


class Theory(enum.Enum):
    DLO_PRED = "dlo_pred"   # dense order with a dense/codense predicate Qp
    PRES_Z = "pres_z"       # ordered group of integers with D_m
    PRES_N = "pres_n"       # ordered semigroup of naturals, via relativization
    DOAG_Q = "doag_q"       # divisible ordered group of rationals
    LEX_ZQ = "lex_zq"       # Z x Q, lexicographic
    LEX_ZZ = "lex_zz"       # Z x Z, lexicographic
    TCHAIN = "tchain"       # dense classes on a discrete chain, P alternating
    DYADIC = "dyadic"       # additive group of dyadic rationals

    @classmethod
    def from_name(cls, name: str) -> "Theory":
        try:
            return cls(name.lower())
        except ValueError:
            raise SignatureError(f"unknown theory {name!r}") from None


# Per-theory signature: which constant symbols, whether +/- are present,
# whether D_m is present, and the admissible predicate names.
_SIGNATURE = {
    Theory.DLO_PRED: dict(consts=frozenset(), group=False, div=False, preds=frozenset({"Qp"})),
    Theory.PRES_Z: dict(consts=frozenset({"1"}), group=True, div=True, preds=frozenset()),
    Theory.PRES_N: dict(consts=frozenset({"1"}), group=True, div=True, preds=frozenset()),
    # The type roster gives DOAG_Q/DYADIC the bare group signature, but the
    # interval/QE operations are specified on formulas such as "x + x > 1";
    # integer numerals are therefore admitted as constants here.
    Theory.DOAG_Q: dict(consts=frozenset({"1"}), group=True, div=False, preds=frozenset()),
    Theory.DYADIC: dict(consts=frozenset({"1"}), group=True, div=False, preds=frozenset()),
    Theory.LEX_ZQ: dict(consts=frozenset({"1Z"}), group=True, div=True, preds=frozenset({"del"})),
    Theory.LEX_ZZ: dict(consts=frozenset({"1p", "1pp"}), group=True, div=True, preds=frozenset({"del"})),
    Theory.TCHAIN: dict(consts=frozenset(), group=False, div=False, preds=frozenset({"P", "S"})),
}

_VAR_RE = re.compile(r"[a-z][a-z0-9_]*")
_RESERVED = {"true", "false"}


def signature(theory: Theory) -> dict:
    return _SIGNATURE[theory]


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    """Canonical linear term: sorted (var, coeff) pairs plus (const, coeff) pairs.

    Zero coefficients are never stored; variable and constant entries are
    sorted by name so structurally equal terms compare equal.
    """

    coeffs: tuple[tuple[str, int], ...] = ()
    consts: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def make(coeffs: Mapping[str, int] | None = None, consts: Mapping[str, int] | None = None) -> "Term":
        cs = tuple(sorted((v, c) for v, c in (coeffs or {}).items() if c != 0))
        ks = tuple(sorted((s, c) for s, c in (consts or {}).items() if c != 0))
        return Term(cs, ks)

    @staticmethod
    def var(name: str, coeff: int = 1) -> "Term":
        return Term.make({name: coeff})

    @staticmethod
    def const(coeff: int, symbol: str = "1") -> "Term":
        return Term.make({}, {symbol: coeff})

    @staticmethod
    def zero() -> "Term":
        return Term()

    def coeff_map(self) -> dict[str, int]:
        return dict(self.coeffs)

    def const_map(self) -> dict[str, int]:
        return dict(self.consts)

    def coeff(self, var: str) -> int:
        return dict(self.coeffs).get(var, 0)

    def variables(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs and not self.consts

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Term") -> "Term":
        cs = dict(self.coeffs)
        for v, c in other.coeffs:
            cs[v] = cs.get(v, 0) + c
        ks = dict(self.consts)
        for s, c in other.consts:
            ks[s] = ks.get(s, 0) + c
        return Term.make(cs, ks)

    def __sub__(self, other: "Term") -> "Term":
        return self + other.scale(-1)

    def __neg__(self) -> "Term":
        return self.scale(-1)

    def scale(self, n: int) -> "Term":
        if n == 0:
            return Term()
        return Term(
            tuple((v, c * n) for v, c in self.coeffs),
            tuple((s, c * n) for s, c in self.consts),
        )

    def drop_var(self, var: str) -> "Term":
        return Term(tuple((v, c) for v, c in self.coeffs if v != var), self.consts)

    def subst(self, bindings: Mapping[str, "Term"]) -> "Term":
        out = Term.make({v: c for v, c in self.coeffs if v not in bindings}, dict(self.consts))
        for v, c in self.coeffs:
            if v in bindings:
                out = out + bindings[v].scale(c)
        return out

    def __str__(self) -> str:
        parts: list[tuple[int, str]] = []
        for v, c in self.coeffs:
            parts.append((c, v))
        for s, c in self.consts:
            parts.append((c, "" if s == "1" else s))
        if not parts:
            return "0"
        pieces = []
        for i, (c, sym) in enumerate(parts):
            mag = abs(c)
            if sym == "":
                body = str(mag)
            elif mag == 1:
                body = sym
            else:
                body = f"{mag}*{sym}"
            if i == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append(("- " if c < 0 else "+ ") + body)
        return " ".join(pieces)


def normalize_term(t: Term) -> Term:
    """Re-canonicalize a term (merge duplicates, drop zeros). Idempotent."""
    cs: dict[str, int] = {}
    for v, c in t.coeffs:
        cs[v] = cs.get(v, 0) + c
    ks: dict[str, int] = {}
    for s, c in t.consts:
        ks[s] = ks.get(s, 0) + c
    return Term.make(cs, ks)


# ---------------------------------------------------------------------------
# Atoms and formulas


@dataclass(frozen=True)
class Lt:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{self.left} < {self.right}"


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Div:
    """D_m(t): the modulus m divides t.  Requires m >= 2."""

    modulus: int
    arg: Term

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("divisibility modulus must be >= 2")

    def __str__(self) -> str:
        return f"D{self.modulus}({self.arg})"


@dataclass(frozen=True)
class Pred:
    """Named predicate atom: Qp(t), P(t), S_n(t, s), del_k(t)."""

    name: str
    index: int | None
    args: tuple[Term, ...]

    def __str__(self) -> str:
        inner = ", ".join(str(a) for a in self.args)
        idx = "" if self.index is None else str(self.index)
        return f"{self.name}{idx}({inner})"


Atom = Lt | Eq | Div | Pred


@dataclass(frozen=True)
class Bool:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Atom | Bool | Not | And | Or | Implies | Iff | Exists | Forall


def and_(*args: Formula) -> Formula:
    """Flattening conjunction with unit folding."""
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        elif a == FALSE:
            return FALSE
        elif a != TRUE:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def or_(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        elif a == TRUE:
            return TRUE
        elif a != FALSE:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def atoms(f: Formula) -> Iterator[Atom]:
    match f:
        case Lt() | Eq() | Div() | Pred():
            yield f
        case Bool():
            return
        case Not(arg):
            yield from atoms(arg)
        case And(args) | Or(args):
            for a in args:
                yield from atoms(a)
        case Implies(l, r) | Iff(l, r):
            yield from atoms(l)
            yield from atoms(r)
        case Exists(_, body) | Forall(_, body):
            yield from atoms(body)


def term_vars(atom: Atom) -> frozenset[str]:
    match atom:
        case Lt(l, r) | Eq(l, r):
            return l.variables() | r.variables()
        case Div(_, t):
            return t.variables()
        case Pred(_, _, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= a.variables()
            return out


def free_vars(f: Formula) -> frozenset[str]:
    match f:
        case Lt() | Eq() | Div() | Pred():
            return term_vars(f)
        case Bool():
            return frozenset()
        case Not(arg):
            return free_vars(arg)
        case And(args) | Or(args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= free_vars(a)
            return out
        case Implies(l, r) | Iff(l, r):
            return free_vars(l) | free_vars(r)
        case Exists(v, body) | Forall(v, body):
            return free_vars(body) - {v}


def bound_vars(f: Formula) -> frozenset[str]:
    match f:
        case Not(arg):
            return bound_vars(arg)
        case And(args) | Or(args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= bound_vars(a)
            return out
        case Implies(l, r) | Iff(l, r):
            return bound_vars(l) | bound_vars(r)
        case Exists(v, body) | Forall(v, body):
            return bound_vars(body) | {v}
        case _:
            return frozenset()


def is_quantifier_free(f: Formula) -> bool:
    match f:
        case Exists() | Forall():
            return False
        case Not(arg):
            return is_quantifier_free(arg)
        case And(args) | Or(args):
            return all(is_quantifier_free(a) for a in args)
        case Implies(l, r) | Iff(l, r):
            return is_quantifier_free(l) and is_quantifier_free(r)
        case _:
            return True


def fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken and base not in _RESERVED:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def standardize(f: Formula) -> Formula:
    """Alpha-rename binders so every bound name is unique and disjoint from
    the free variables.  Idempotent: already-standard names are kept."""
    taken = set(free_vars(f))

    def walk(g: Formula, env: dict[str, str]) -> Formula:
        match g:
            case Lt() | Eq() | Div() | Pred():
                return _rename_atom(g, env)
            case Bool():
                return g
            case Not(arg):
                return Not(walk(arg, env))
            case And(args):
                return And(tuple(walk(a, env) for a in args))
            case Or(args):
                return Or(tuple(walk(a, env) for a in args))
            case Implies(l, r):
                return Implies(walk(l, env), walk(r, env))
            case Iff(l, r):
                return Iff(walk(l, env), walk(r, env))
            case Exists(v, body) | Forall(v, body):
                name = fresh_name(v, taken)
                taken.add(name)
                env2 = dict(env)
                env2[v] = name
                body2 = walk(body, env2)
                return Exists(name, body2) if isinstance(g, Exists) else Forall(name, body2)

    return walk(f, {})


def _rename_atom(a: Atom, env: Mapping[str, str]) -> Atom:
    if not env:
        return a
    bind = {v: Term.var(n) for v, n in env.items()}
    return _map_atom_terms(a, lambda t: t.subst(bind))


def _map_atom_terms(a: Atom, fn) -> Atom:
    match a:
        case Lt(l, r):
            return Lt(fn(l), fn(r))
        case Eq(l, r):
            return Eq(fn(l), fn(r))
        case Div(m, t):
            return Div(m, fn(t))
        case Pred(name, idx, args):
            return Pred(name, idx, tuple(fn(t) for t in args))


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild f with fn applied to every atom (fn returns a Formula)."""
    match f:
        case Lt() | Eq() | Div() | Pred():
            return fn(f)
        case Bool():
            return f
        case Not(arg):
            return Not(map_atoms(arg, fn))
        case And(args):
            return And(tuple(map_atoms(a, fn) for a in args))
        case Or(args):
            return Or(tuple(map_atoms(a, fn) for a in args))
        case Implies(l, r):
            return Implies(map_atoms(l, fn), map_atoms(r, fn))
        case Iff(l, r):
            return Iff(map_atoms(l, fn), map_atoms(r, fn))
        case Exists(v, body):
            return Exists(v, map_atoms(body, fn))
        case Forall(v, body):
            return Forall(v, map_atoms(body, fn))


def substitute(f: Formula, bindings: Mapping[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    bindings = {v: t for v, t in bindings.items()}
    if not bindings:
        return f
    clash = set()
    for t in bindings.values():
        clash |= t.variables()

    def walk(g: Formula, env: dict[str, Term]) -> Formula:
        match g:
            case Lt() | Eq() | Div() | Pred():
                return _map_atom_terms(g, lambda t: t.subst(env))
            case Bool():
                return g
            case Not(arg):
                return Not(walk(arg, env))
            case And(args):
                return And(tuple(walk(a, env) for a in args))
            case Or(args):
                return Or(tuple(walk(a, env) for a in args))
            case Implies(l, r):
                return Implies(walk(l, env), walk(r, env))
            case Iff(l, r):
                return Iff(walk(l, env), walk(r, env))
            case Exists(v, body) | Forall(v, body):
                env2 = {u: t for u, t in env.items() if u != v}
                name = v
                if env2 and v in clash:
                    taken = set(free_vars(body)) | clash | set(env2)
                    name = fresh_name(v, taken)
                    body = walk(body, {v: Term.var(name)})
                body2 = walk(body, env2) if env2 else body
                return Exists(name, body2) if isinstance(g, Exists) else Forall(name, body2)

    return walk(f, bindings)


def negate_atom(a: Atom) -> Formula:
    """Negation-normal rewriting of a negated atom.

    Order and equality use trichotomy of the linear order; divisibility and
    predicate atoms stay as negated literals.
    """
    match a:
        case Lt(l, r):
            return or_(Lt(r, l), Eq(r, l))
        case Eq(l, r):
            return or_(Lt(l, r), Lt(r, l))
        case _:
            return Not(a)


def to_nnf(f: Formula) -> Formula:
    """Negation normal form; ->/<-> expanded, double negations removed."""

    def pos(g: Formula) -> Formula:
        match g:
            case Lt() | Eq() | Div() | Pred() | Bool():
                return g
            case Not(arg):
                return neg(arg)
            case And(args):
                return and_(*(pos(a) for a in args))
            case Or(args):
                return or_(*(pos(a) for a in args))
            case Implies(l, r):
                return or_(neg(l), pos(r))
            case Iff(l, r):
                return or_(and_(pos(l), pos(r)), and_(neg(l), neg(r)))
            case Exists(v, body):
                return Exists(v, pos(body))
            case Forall(v, body):
                return Forall(v, pos(body))

    def neg(g: Formula) -> Formula:
        match g:
            case Bool(b):
                return Bool(not b)
            case Lt() | Eq() | Div() | Pred():
                return negate_atom(g)
            case Not(arg):
                return pos(arg)
            case And(args):
                return or_(*(neg(a) for a in args))
            case Or(args):
                return and_(*(neg(a) for a in args))
            case Implies(l, r):
                return and_(pos(l), neg(r))
            case Iff(l, r):
                return or_(and_(pos(l), neg(r)), and_(neg(l), pos(r)))
            case Exists(v, body):
                return Forall(v, neg(body))
            case Forall(v, body):
                return Exists(v, neg(body))

    return pos(f)


# ---------------------------------------------------------------------------
# Signature validation


def validate(f: Formula, theory: Theory) -> None:
    """Reject any symbol outside the theory's signature."""
    sig = _SIGNATURE[theory]

    def check_term(t: Term, where: str) -> None:
        for s, _ in t.consts:
            if s not in sig["consts"]:
                raise SignatureError(f"constant {s!r} not in the {theory.value} signature ({where})")
        if not sig["group"]:
            # order-only signatures: terms must be bare variables
            if t.consts or len(t.coeffs) != 1 or t.coeffs[0][1] != 1:
                raise SignatureError(
                    f"theory {theory.value} has no group operations; term {t} is not a variable ({where})"
                )

    def check_atom(a: Atom) -> None:
        match a:
            case Lt(l, r) | Eq(l, r):
                check_term(l, str(a))
                check_term(r, str(a))
            case Div(m, t):
                if not sig["div"]:
                    raise SignatureError(f"divisibility D{m} not in the {theory.value} signature")
                check_term(t, str(a))
            case Pred(name, idx, args):
                if name not in sig["preds"]:
                    raise SignatureError(f"predicate {name!r} not in the {theory.value} signature")
                arity = 2 if name == "S" else 1
                if len(args) != arity:
                    raise SignatureError(f"predicate {name!r} expects {arity} argument(s)")
                if name in ("S", "del") and (idx is None or idx < 0):
                    raise SignatureError(f"predicate {name!r} requires a non-negative index")
                if name in ("Qp", "P") and idx is not None:
                    raise SignatureError(f"predicate {name!r} takes no index")
                for t in args:
                    check_term(t, str(a))

    for a in atoms(f):
        check_atom(a)


# ---------------------------------------------------------------------------
# Printer

# precedence: quantifier 0 < iff 1 < implies 2 < or 3 < and 4 < not 5 < atom 6
def _prec(f: Formula) -> int:
    match f:
        case Exists() | Forall():
            return 0
        case Iff():
            return 1
        case Implies():
            return 2
        case Or():
            return 3
        case And():
            return 4
        case Not():
            return 5
        case _:
            return 6


def print_formula(f: Formula) -> str:
    """Render a formula in the concrete grammar; parse(print(f)) == f."""

    def wrap(g: Formula, parent: int) -> str:
        s = go(g)
        if _prec(g) < parent:
            return f"({s})"
        return s

    def go(g: Formula) -> str:
        match g:
            case Bool():
                return str(g)
            case Lt() | Eq() | Div() | Pred():
                return str(g)
            case Not(arg):
                if _prec(arg) == 6 and not isinstance(arg, (Div, Pred, Bool)):
                    return f"~({go(arg)})"
                return f"~{wrap(arg, 5)}"
            case And(args):
                return " & ".join(wrap(a, 5) for a in args)
            case Or(args):
                return " | ".join(wrap(a, 4) for a in args)
            case Implies(l, r):
                return f"{wrap(l, 3)} -> {wrap(r, 2)}"
            case Iff(l, r):
                return f"{wrap(l, 2)} <-> {wrap(r, 1)}"
            case Exists(v, body):
                return f"E {v}. {go(body)}"
            case Forall(v, body):
                return f"A {v}. {go(body)}"

    return go(f)


# ---------------------------------------------------------------------------
# Lexer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lcz>1Z)
  | (?P<lcpp>1pp)
  | (?P<lcp>1p(?![a-z0-9_]))
  | (?P<int>\d+)
  | (?P<name>[a-zA-Z][a-zA-Z0-9_]*)
  | (?P<op><->|->|<=|>=|[~&|()<>=+\-*,.])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, theory: Theory):
        self.toks = _tokenize(text)
        self.i = 0
        self.theory = theory

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def next(self) -> tuple[str, str, int]:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str) -> None:
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val!r}", pos)

    def parse(self) -> Formula:
        f = self.formula()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"trailing input {val!r}", pos)
        return f

    # formula := iff
    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek()[1] == "<->":
            self.next()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek()[1] == "|":
            self.next()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[1] == "&":
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return Not(self.unary())
        if kind == "name" and val in ("E", "A"):
            self.next()
            vkind, vname, vpos = self.next()
            if vkind != "name" or not _VAR_RE.fullmatch(vname) or vname in _RESERVED:
                raise ParseError(f"bad quantified variable {vname!r}", vpos)
            self.expect(".")
            body = self.formula()
            return Exists(vname, body) if val == "E" else Forall(vname, body)
        return self.primary()

    def primary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "name" and val in _RESERVED:
            self.next()
            return TRUE if val == "true" else FALSE
        # predicate atoms
        if kind == "name":
            pf = self.pred_atom()
            if pf is not None:
                return pf
        return self.relation()

    def pred_atom(self) -> Formula | None:
        kind, val, pos = self.peek()
        if self.toks[self.i + 1][1] != "(":
            return None
        if val in ("Qp", "P"):
            self.next()
            self.expect("(")
            t = self.term()
            self.expect(")")
            return self._pred(val, None, (t,), pos)
        m = re.fullmatch(r"D(\d+)", val)
        if m:
            self.next()
            mod = int(m.group(1))
            if mod < 2:
                raise ParseError(f"divisibility modulus must be >= 2, got {mod}", pos)
            self.expect("(")
            t = self.term()
            self.expect(")")
            if not _SIGNATURE[self.theory]["div"]:
                raise SignatureError(f"divisibility D{mod} not in the {self.theory.value} signature")
            return Div(mod, t)
        m = re.fullmatch(r"S(\d+)", val)
        if m:
            self.next()
            self.expect("(")
            t1 = self.term()
            self.expect(",")
            t2 = self.term()
            self.expect(")")
            return self._pred("S", int(m.group(1)), (t1, t2), pos)
        m = re.fullmatch(r"del(\d+)", val)
        if m:
            self.next()
            self.expect("(")
            t = self.term()
            self.expect(")")
            return self._pred("del", int(m.group(1)), (t,), pos)
        return None

    def _pred(self, name: str, idx: int | None, args: tuple[Term, ...], pos: int) -> Pred:
        if name not in _SIGNATURE[self.theory]["preds"]:
            raise SignatureError(f"predicate {name!r} not in the {self.theory.value} signature")
        return Pred(name, idx, args)

    def relation(self) -> Formula:
        left = self.term()
        kind, val, pos = self.next()
        right_of = {
            "=": lambda l, r: Eq(l, r),
            "<": lambda l, r: Lt(l, r),
            ">": lambda l, r: Lt(r, l),
            "<=": lambda l, r: Or((Lt(l, r), Eq(l, r))),
            ">=": lambda l, r: Or((Lt(r, l), Eq(r, l))),
        }
        if val not in right_of:
            raise ParseError(f"expected a relation symbol, found {val!r}", pos)
        right = self.term()
        return right_of[val](left, right)

    # term := summand (('+'|'-') summand)*
    def term(self) -> Term:
        t = self.summand()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.next()
            s = self.summand()
            t = t + s if op == "+" else t - s
        return t

    def summand(self) -> Term:
        kind, val, pos = self.peek()
        if val == "-":
            self.next()
            return -self.summand()
        if kind == "int":
            self.next()
            n = int(val)
            if self.peek()[1] == "*":
                self.next()
                return self.summand().scale(n)
            return self._numeral(n, pos)
        if kind in ("lcz", "lcp", "lcpp"):
            self.next()
            return self._const_symbol(val, pos)
        if kind == "name":
            if not _VAR_RE.fullmatch(val) or val in _RESERVED:
                raise ParseError(f"bad variable name {val!r}", pos)
            self.next()
            return Term.var(val)
        raise ParseError(f"expected a term, found {val!r}", pos)

    def _numeral(self, n: int, pos: int) -> Term:
        if n == 0:
            return Term.zero()
        if "1" not in _SIGNATURE[self.theory]["consts"]:
            raise SignatureError(
                f"numeral {n} not expressible: theory {self.theory.value} has no unit constant"
            )
        return Term.const(n, "1")

    def _const_symbol(self, sym: str, pos: int) -> Term:
        if sym not in _SIGNATURE[self.theory]["consts"]:
            raise SignatureError(f"constant {sym!r} not in the {self.theory.value} signature")
        return Term.const(1, sym)


def parse(text: str, theory: Theory) -> Formula:
    """Parse a formula, validate it against the theory, standardize binders."""
    f = _Parser(text, theory).parse()
    validate(f, theory)
    return standardize(f)
