import pytest

from heytlab.errors import AlgebraError
from heytlab.heyting import boolean_envelope, chain_algebra, relativize
from heytlab.posets import FinitePoset
from heytlab.suite import check_translation
from heytlab.terms import ONE, app, const, evaluate_ha, evaluate_int, format_term, parse_term, translate_star, var


def test_parse_and_format_round_trip():
    text = "(imp (and x y) 1)"
    t = parse_term(text)
    assert t == app("imp", app("and", var("x"), var("y")), ONE)
    assert format_term(t) == text
    assert parse_term(format_term(t)) == t


@pytest.mark.parametrize("bad", ["(and x)", "(foo x y)", "(and x y", "", "(not x y)"])
def test_parse_rejects_malformed(bad):
    with pytest.raises((AlgebraError, ValueError)):
        parse_term(bad)


def test_translation_examples():
    a = 0b110
    assert translate_star(ONE, a) == const(a)
    x = var("x")
    assert translate_star(app("not", x), a) == app("and", app("not", x), const(a))
    t = app("and", x, var("y"))
    assert translate_star(t, a) == t


def test_translation_rejects_interior_and_implication():
    with pytest.raises(AlgebraError):
        translate_star(app("int", var("x")), 1)
    with pytest.raises(AlgebraError):
        translate_star(app("imp", var("x"), var("y")), 1)


def test_evaluation_in_the_four_chain():
    A = chain_algebra(4)
    zero, a, b, one = A.elements
    env = {"x": a, "y": b}
    assert evaluate_ha(A, parse_term("(imp x y)"), env) == one
    assert evaluate_ha(A, parse_term("(imp y x)"), env) == a
    assert evaluate_ha(A, parse_term("(not x)"), env) == 0
    with pytest.raises(AlgebraError):
        evaluate_ha(A, parse_term("(int x)"), env)


def test_relativized_evaluation_matches_translation_on_a_chain():
    P = FinitePoset.chain(3)
    E = boolean_envelope(chain_algebra(4))
    Y = 0b110
    R = relativize(P, Y)
    t = parse_term("(or (not x) 1)")
    for x in R.elements:
        assert evaluate_int(R, t, {"x": x}) == Y
        assert evaluate_int(E, translate_star(t, Y), {"x": x}) == Y


def test_translation_agrees_on_small_posets():
    ok, info = check_translation(3, seed=1)
    assert ok, info
    assert info["instances"] > 1000
