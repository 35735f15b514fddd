"""Quantifier elimination engines, the divisibility/floor identities, and
sentence decision."""

from fractions import Fraction

import pytest

from qomin import corpus, models
from qomin.errors import NonSentenceError, UnsupportedTheoryError
from qomin.models import Window
from qomin.qe import (
    ComponentFormula, decide, eval_component, isolate_x_equality,
    isolate_x_inequality, lex_split, oracle_agreement, qe, qe_dlo_pred,
    qe_doag, qe_presburger, qe_tchain, rewrite_divisibility, simplify,
    translate_nat,
)
from qomin.syntax import (
    And, Div, Eq, Lt, Or, Term, Theory, free_vars, is_quantifier_free, parse,
    print_formula, to_nnf, Not,
)

Z = Theory.PRES_Z


def out_formula(result):
    return result.formula if isinstance(result, ComponentFormula) else result


# ---------------------------------------------------------------------------
# Presburger


def test_qe_collapses_doubling():
    assert print_formula(qe(Z, parse("E x. 2*x = y", Z))) == "D2(y)"


def test_qe_collapses_tripling():
    assert print_formula(qe(Z, parse("E x. 3*x = y", Z))) == "D3(y)"


def test_qe_unbounded_above():
    assert print_formula(qe(Z, parse("E x. x > y", Z))) == "true"


def test_qe_empty_integer_gap():
    assert print_formula(qe(Z, parse("E x. y < x & x < y + 1", Z))) == "false"


def test_qe_even_shifted_gap():
    out = qe(Z, parse("E x. y < 2*x & 2*x < y + 2", Z))
    assert out == Div(2, Term.var("y") + Term.const(1))


def test_qe_output_is_quantifier_free_on_corpus():
    for theory in corpus.CORPUS:
        for entry in corpus.entries(theory)[:12]:
            out = out_formula(qe(theory, parse(entry.text, theory)))
            assert is_quantifier_free(out), entry.text


@pytest.mark.parametrize("theory", [Z, Theory.PRES_N, Theory.DLO_PRED,
                                    Theory.DOAG_Q, Theory.TCHAIN])
def test_qe_idempotent(theory):
    for entry in corpus.entries(theory)[:12]:
        f = parse(entry.text, theory)
        once = qe(theory, f)
        assert qe(theory, once) == once, entry.text


@pytest.mark.parametrize("theory", [Theory.LEX_ZQ, Theory.LEX_ZZ])
def test_qe_lex_idempotent_on_components(theory):
    """Re-splitting a quantifier-free component output leaves it unchanged
    up to Boolean normalization (already one-sorted component formulas are
    fixed points of the eliminator)."""
    from qomin.qe import _eliminate, _cooper_exists
    for entry in corpus.entries(theory)[:8]:
        cf = qe(theory, parse(entry.text, theory))
        again = simplify(_eliminate(to_nnf(cf.formula), _cooper_exists))
        assert again == cf.formula, entry.text


def test_qe_metamorphic_negation():
    asg_w, search_w = corpus.windows(Z)
    for text in ["E x. 2*x = y", "E x. y < x & x < z", "E x. D2(x) & y < x & x < y + 3"]:
        f = parse(text, Z)
        a = qe(Z, Not(f))
        b = simplify(to_nnf(Not(qe(Z, f))))
        fvs = sorted(free_vars(f))
        for asg in _assignments(Z, fvs, asg_w):
            assert models.eval_qf(Z, a, asg) == models.eval_qf(Z, b, asg), text


def test_qe_metamorphic_conjunction():
    asg_w, _ = corpus.windows(Z)
    f = parse("E u. 2*u = y", Z)
    g = parse("E v. y < 3*v", Z)
    both = qe(Z, And((f, g)))
    split = And((qe(Z, f), qe(Z, g)))
    for asg in _assignments(Z, ["y"], asg_w):
        assert models.eval_qf(Z, both, asg) == models.eval_qf(Z, split, asg)


def _assignments(theory, fvs, window):
    import itertools
    elems = models.enumerate_window(theory, window)
    for combo in itertools.product(elems, repeat=len(fvs)):
        yield dict(zip(fvs, combo))


# ---------------------------------------------------------------------------
# The divisibility and floor identities


def expected_div_split(m, n):
    x, y = Term.var("x", n), Term.var("y")
    return Or(tuple(
        And((Div(m, x - Term.const(i)), Div(m, y + Term.const(i))))
        for i in range(m)
    ))


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_rewrite_divisibility_matches_identity(m, n):
    assert rewrite_divisibility(m, n, Term.var("y")) == expected_div_split(m, n)


def test_rewrite_divisibility_two_one():
    out = rewrite_divisibility(2, 1, Term.var("y"))
    want = Or((
        And((Div(2, Term.var("x")), Div(2, Term.var("y")))),
        And((Div(2, Term.var("x") - Term.const(1)), Div(2, Term.var("y") + Term.const(1)))),
    ))
    assert out == want


def test_rewrite_divisibility_separates_variables():
    """No atom of the split mentions both x and a parameter."""
    out = rewrite_divisibility(3, 2, Term.var("y") + Term.const(1))
    from qomin.syntax import atoms, term_vars
    for atom in atoms(out):
        assert term_vars(atom) != {"x", "y"}


@pytest.mark.parametrize("m,n", [(2, 1), (2, 3), (3, 2)])
def test_rewrite_divisibility_oracle(m, n):
    lhs = Div(m, Term.var("x", n) + Term.var("y"))
    rhs = rewrite_divisibility(m, n, Term.var("y"))
    for x in range(-50, 51, 7):
        for y in range(-50, 51, 7):
            asg = {"x": x, "y": y}
            assert models.eval_qf(Z, lhs, asg) == models.eval_qf(Z, rhs, asg)


def test_isolate_equality_unit():
    assert isolate_x_equality(1, Term.var("y")) == Eq(Term.var("x"), Term.var("y"))


def test_isolate_equality_oracle():
    for n in (2, 3):
        t = Term.var("y") + Term.const(n - 1)
        out = isolate_x_equality(n, t)
        lhs = Eq(Term.var("x", n), t)
        for x in range(-60, 61, 9):
            for y in range(-60, 61, 9):
                asg = {"x": x, "y": y}
                assert models.eval_qf(Z, out, asg) == models.eval_qf(Z, lhs, asg)


def test_isolate_inequality_forms():
    assert isolate_x_inequality(1, Term.zero()) == Lt(Term.zero(), Term.var("x"))
    assert isolate_x_inequality(2, Term.var("y")) == Lt(Term.var("y"), Term.var("x", 2))


# ---------------------------------------------------------------------------
# Dense order with predicate


def test_dlo_between_with_predicate():
    D = Theory.DLO_PRED
    assert print_formula(qe(D, parse("E x. y < x & x < z & Qp(x)", D))) == "y < z"
    assert print_formula(qe(D, parse("E x. Qp(x)", D))) == "true"
    assert print_formula(qe(D, parse("E x. x = y & Qp(x)", D))) == "Qp(y)"
    assert print_formula(qe(D, parse("E x. y < x & x < z", D))) == "y < z"


# ---------------------------------------------------------------------------
# Naturals via relativization


def test_translate_nat_relativizes_exists():
    f = parse("E x. x + y = 1", Theory.PRES_N)
    out = translate_nat(f)
    assert print_formula(out) == "E x. (0 < x | 0 = x) & x + y = 1"


def test_translate_nat_keeps_tautologies():
    f = parse("A u. u + y = y + u", Theory.PRES_N)
    assert decide(Theory.PRES_N, parse("A u. A y. u + y = y + u", Theory.PRES_N))


def test_nat_vs_int_solvability():
    s = "E x. x + 1 = 0"
    assert not decide(Theory.PRES_N, parse(s, Theory.PRES_N))
    assert decide(Z, parse(s, Z))


# ---------------------------------------------------------------------------
# Divisible rational group


def test_doag_divisibility_and_density():
    G = Theory.DOAG_Q
    assert print_formula(qe(G, parse("E x. 2*x = y", G))) == "true"
    assert print_formula(qe(G, parse("E x. y < x & x < z", G))) == "y < z"
    assert print_formula(qe(G, parse("E x. y < 3*x & 2*x < z", G))) == "2*y < 3*z"


# ---------------------------------------------------------------------------
# Chain of classes


def test_tchain_class_without_minimum():
    T = Theory.TCHAIN
    assert print_formula(qe(T, parse("E x. S0(x, y) & x < y", T))) == "true"


def test_tchain_dense_between():
    T = Theory.TCHAIN
    out = qe(T, parse("E x. y < x & x < z", T))
    asg_w, search_w = corpus.windows(T)
    for asg in _assignments(T, ["y", "z"], asg_w):
        want = models.eval_windowed(T, parse("E x. y < x & x < z", T), asg, search_w)
        assert models.eval_qf(T, out, asg) == want


def test_tchain_composed_distances():
    """S1-from-y and S1-from-z witnesses exist exactly when the classes of y
    and z are equal or two apart."""
    T = Theory.TCHAIN
    out = qe(T, parse("E x. S1(x, y) & S1(x, z)", T))
    ref = parse("S0(y, z) | S2(y, z)", T)
    asg_w, _ = corpus.windows(T)
    for asg in _assignments(T, ["y", "z"], asg_w):
        assert models.eval_qf(T, out, asg) == models.eval_qf(T, ref, asg)


# ---------------------------------------------------------------------------
# Lexicographic products


def test_lex_split_order_atom():
    cf = lex_split(Theory.LEX_ZQ, parse("x < y", Theory.LEX_ZQ))
    assert print_formula(cf.formula) == "x_z < y_z | x_z = y_z & x_2 < y_2"


def test_lex_split_divisibility():
    zq = lex_split(Theory.LEX_ZQ, parse("D2(x)", Theory.LEX_ZQ))
    assert print_formula(zq.formula) == "D2(x_z)"
    zz = lex_split(Theory.LEX_ZZ, parse("D2(x)", Theory.LEX_ZZ))
    assert print_formula(zz.formula) == "D2(x_z) & D2(x_2)"


def test_lex_split_coset_atom():
    cf = lex_split(Theory.LEX_ZQ, parse("del1(x)", Theory.LEX_ZQ))
    assert print_formula(cf.formula) == "x_z = 1"


def test_qe_lex_doubling():
    zq = qe(Theory.LEX_ZQ, parse("E x. 2*x = y", Theory.LEX_ZQ))
    assert print_formula(zq.formula) == "D2(y_z)"
    zz = qe(Theory.LEX_ZZ, parse("E x. 2*x = y", Theory.LEX_ZZ))
    assert set(print_formula(zz.formula).split(" & ")) == {"D2(y_z)", "D2(y_2)"}


def test_qe_lex_between_is_order():
    """The component output of the between formula agrees with y < z over
    the densely ordered product."""
    ZQ = Theory.LEX_ZQ
    f = parse("E x. y < x & x < z", ZQ)
    cf = qe(ZQ, f)
    asg_w, _ = corpus.windows(ZQ)
    for asg in _assignments(ZQ, ["y", "z"], asg_w):
        assert eval_component(cf, asg) == (asg["y"] < asg["z"])


def test_decide_coset_parity_conflict():
    assert not decide(Theory.LEX_ZQ, parse("E x. del1(x) & D2(x)", Theory.LEX_ZQ))
    assert decide(Theory.LEX_ZQ, parse("E x. del2(x) & D2(x)", Theory.LEX_ZQ))


# ---------------------------------------------------------------------------
# Dispatcher-level behavior


def test_decide_commutativity():
    assert decide(Z, parse("A x. A y. x + y = y + x", Z))


def test_decide_odd_unit():
    assert not decide(Z, parse("E x. x + x = 1", Z))


def test_decide_requires_sentence():
    with pytest.raises(NonSentenceError):
        decide(Z, parse("x < y", Z))


def test_qe_unsupported_theory():
    with pytest.raises(UnsupportedTheoryError):
        qe(Theory.DYADIC, parse("E x. 2*x = y", Theory.DYADIC))


def test_decide_agrees_with_windowed_oracle_on_sentences():
    for theory in corpus.CORPUS:
        _, search_w = corpus.windows(theory)
        for entry in corpus.entries(theory):
            f = parse(entry.text, theory)
            if free_vars(f):
                continue
            assert decide(theory, f) == models.eval_windowed(theory, f, {}, search_w), entry.text


def test_oracle_agreement_smoke():
    total, mismatches = oracle_agreement(Z, parse("E x. 2*x = y", Z), Window(-6, 6), Window(-12, 12))
    assert total == 13 and not mismatches
