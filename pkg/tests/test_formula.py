import pytest
from hypothesis import given, settings, strategies as st

from iterpcp.coding import code_letter
from iterpcp.formula import (
    FormulaSyntaxError,
    Impl,
    Var,
    apply_substitution,
    detect_tower,
    formula_size,
    impl_tower,
    match_instance,
    parse_formula,
    print_formula,
    rename_apart,
    substitute,
    unify,
    variables_of,
)

from conftest import AB, count_nodes

x, y, p = Var("x"), Var("y"), Var("p")
F = parse_formula

names = st.sampled_from(["x", "y", "p", "q1", "z_2"])
formulas = st.recursive(
    names.map(Var),
    lambda kids: st.builds(Impl, kids, kids),
    max_leaves=12,
)


def test_parse_examples():
    assert F("x") is x
    assert F("(x->x)->x") is Impl(Impl(x, x), x)
    assert F("x->y->p") is Impl(x, Impl(y, p))
    assert F("  ( x -> y )->p ") is Impl(Impl(x, y), p)
    assert F("((x))") is x


@pytest.mark.parametrize(
    "text, pos",
    [("x->", 3), ("", 0), ("(x->y", 5), ("x y", 2), ("X", 0), ("x->->y", 3), ("x)", 1)],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as err:
        F(text)
    assert err.value.position == pos


def test_print_examples():
    assert print_formula(Impl(x, Impl(y, p))) == "x->y->p"
    assert print_formula(impl_tower(x, 1)) == "(x->x)->x"
    assert print_formula(p) == "p"
    assert print_formula(Impl(Impl(x, y), Impl(y, x))) == "(x->y)->y->x"


def test_size_examples():
    assert formula_size(x) == 1
    assert formula_size(F("x->x")) == 3
    letter = code_letter(AB, "a")
    assert formula_size(letter) == count_nodes(letter.text) == 11


def test_towers():
    assert impl_tower(x, 1).text == "(x->x)->x"
    assert impl_tower(x, 2).text == "((x->x)->x)->x"
    assert impl_tower(F("p->p"), 1).text == "((p->p)->p->p)->p->p"
    assert impl_tower(F("p->p"), 1) is F("((p->p)->(p->p))->(p->p)")
    with pytest.raises(ValueError):
        impl_tower(x, 0)
    assert detect_tower(F("(x->x)->x")) == (x, 1)
    assert detect_tower(F("((p->p)->p)->p")) == (p, 2)
    assert detect_tower(F("x->x")) is None
    assert detect_tower(x) is None
    assert detect_tower(F("(x->y)->x")) is None


def test_substitute_examples():
    assert substitute(F("x->y"), "x", F("p->p")).text == "(p->p)->y"
    assert substitute(y, "x", p) is y


def test_apply_substitution_examples():
    assert apply_substitution(F("x->y"), {"x": p, "y": p}) is F("p->p")
    f = F("(x->y)->p")
    assert apply_substitution(f, {}) is f
    assert apply_substitution(F("x->x"), {"x": F("x->x")}).text == "(x->x)->x->x"
    # simultaneous: the inserted y is not rewritten by y -> x
    assert apply_substitution(F("x->y"), {"x": y, "y": x}) is F("y->x")


def test_match_examples():
    assert match_instance(F("x->y"), F("(p->p)->p")) == {"x": F("p->p"), "y": p}
    a1 = code_letter(AB, "a")
    assert match_instance(a1, a1) == {"x": x, "p": p}
    assert match_instance(F("x->x"), F("x->p")) is None
    assert match_instance(F("x->y"), x) is None


def test_unify_examples():
    assert unify(x, F("y->p")) == {"x": F("y->p")}
    assert unify(x, F("x->y")) is None
    s = unify(F("x->(y->x)"), F("(p->p)->z"))
    assert apply_substitution(F("x->(y->x)"), s) is apply_substitution(F("(p->p)->z"), s)
    a, b = rename_apart(x, x)
    assert unify(a, b) is not None


def test_rename_apart_examples():
    a, b = rename_apart(F("x->p"), x)
    assert variables_of(a).isdisjoint(variables_of(b))
    assert a is F("x_1->p_1") and b is F("x_2")
    a, b = rename_apart(F("x_1->x"), F("x"))
    assert variables_of(a).isdisjoint(variables_of(b))
    assert len(variables_of(a)) == 2


def test_interning_is_structural():
    assert F("(x->y)->x") is Impl(Impl(Var("x"), Var("y")), Var("x"))
    assert hash(F("x->y")) == hash(Impl(x, y))


@given(formulas)
def test_round_trip(f):
    assert parse_formula(print_formula(f)) is f


@given(formulas)
def test_size_matches_text_count(f):
    assert f.size == count_nodes(f.text)


@given(formulas, st.integers(1, 8))
def test_tower_inverse(g, i):
    assert detect_tower(impl_tower(g, i)) == (g, i)


@given(formulas, formulas)
def test_match_soundness(pat, t):
    s = match_instance(pat, t)
    if s is not None:
        assert apply_substitution(pat, s) is t
        assert set(s) == set(variables_of(pat))


@given(formulas, st.dictionaries(names, formulas, max_size=3))
def test_match_finds_instances(pat, sub):
    t = apply_substitution(pat, sub)
    s = match_instance(pat, t)
    assert s is not None and apply_substitution(pat, s) is t
    a, b = rename_apart(pat, t)
    assert unify(a, b) is not None


@settings(max_examples=300)
@given(formulas, formulas)
def test_unifier_soundness(a, b):
    s = unify(a, b)
    if s is not None:
        assert apply_substitution(a, s) is apply_substitution(b, s)


@given(formulas, formulas, formulas)
def test_unifier_is_most_general(a, b, c):
    # any common instance built from a unifier-free route is an instance of the mgu's
    t = apply_substitution(a, {"x": c})
    u = apply_substitution(b, {"x": c})
    if t is u:
        s = unify(a, b)
        assert s is not None
        common = apply_substitution(a, s)
        assert match_instance(common, t) is not None


@given(formulas, names, formulas)
def test_substitution_locality(f, v, b):
    r = substitute(f, v, b)
    if v not in variables_of(f):
        assert r is f
    elif b is not Var(v):
        assert r is not f


@given(formulas, formulas)
def test_rename_apart_disjoint_and_injective(a, b):
    ra, rb = rename_apart(a, b)
    assert variables_of(ra).isdisjoint(variables_of(rb))
    assert len(variables_of(ra)) == len(variables_of(a))
    assert match_instance(ra, a) is not None and match_instance(a, ra) is not None
