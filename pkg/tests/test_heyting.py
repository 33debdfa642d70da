import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heytlab.errors import AlgebraError
from heytlab.heyting import (
    AlgebraMap,
    FiniteHeytingAlgebra,
    TableAlgebra,
    boolean_algebra,
    boolean_envelope,
    chain_algebra,
    closure,
    dual_poset,
    enumerate_embeddings,
    from_poset,
    generated_subalgebra,
    is_closed,
    is_homomorphism,
    non_skeletal_fixture,
    prime_filters,
    qf_type_equal,
    relativize,
    skeletal_check,
    subalgebra,
)
from heytlab.oracles import closure_bruteforce, implication_by_minimum, is_homomorphism_tables
from heytlab.posets import FinitePoset, are_isomorphic, enumerate_posets, is_p_morphism, mask_of
from strategies import algebra_with_elements, algebras

CORPUS5 = [from_poset(P) for P in enumerate_posets(5)]


def test_one_point_gives_two_elements():
    A = from_poset(FinitePoset.antichain(1))
    assert A.size == 2 and A.elements == (0, 1)


def test_four_chain_negations():
    A = from_poset(FinitePoset.chain(3))
    zero, a, b, one = A.elements
    assert A.size == 4
    assert a < b and A.leq(a, b) and not A.leq(b, a)
    assert A.neg(a) == A.neg(b) == 0
    assert A.neg(0) == one


def test_two_chain_implication_values():
    A = from_poset(FinitePoset.chain(2))
    x_y, y = 0b11, 0b10
    assert A.imp(x_y, y) == y
    assert A.imp(y, 0) == 0
    el = list(A.elements)
    assert implication_by_minimum(el, x_y, y) == y


@pytest.mark.parametrize("A", CORPUS5, ids=lambda A: f"dual{A.dual.size}")
def test_lattice_identities_and_residuation(A):
    TableAlgebra.of(A).validate()
    el = A.elements
    for x in el:
        for y in el:
            assert A.imp(x, y) == implication_by_minimum(list(el), x, y)
            for z in el:
                assert A.leq(z, A.imp(x, y)) == A.leq(x & z, y)


def test_dual_examples():
    assert dual_poset(chain_algebra(2)).size == 1
    assert dual_poset(boolean_algebra(3)) == FinitePoset.antichain(3)
    assert are_isomorphic(dual_poset(chain_algebra(4)), FinitePoset.chain(3)) is not None


@pytest.mark.parametrize("P", enumerate_posets(5), ids=lambda P: f"n{P.size}")
def test_duality_round_trip(P):
    A = from_poset(P)
    assert are_isomorphic(dual_poset(A), P) is not None
    B, masks = TableAlgebra.of(A).to_algebra()
    assert are_isomorphic(B.dual, P) is not None
    assert len(prime_filters(A)) == P.size


def test_table_validation_rejects_broken_tables():
    T = TableAlgebra.of(chain_algebra(3))
    bad_imp = [list(r) for r in T.imp]
    bad_imp[1][0] = 1
    broken = TableAlgebra(T.size, T.meet, T.join, tuple(map(tuple, bad_imp)), T.zero, T.one)
    with pytest.raises(AlgebraError):
        broken.validate()


def test_generated_subalgebra_examples():
    C4 = chain_algebra(4)
    zero, a, b, one = C4.elements
    assert closure(C4, ()) == {0, one}
    assert closure(C4, {a}) == {0, a, one}
    B8 = boolean_algebra(3)
    assert closure(B8, {1, 2, 4}) == set(B8.elements)
    B, inc = generated_subalgebra(C4, {a})
    assert B.size == 3 and inc.image(B.elements) == {0, a, one}
    assert is_homomorphism(B, C4, {x: inc(x) for x in B.elements})


@given(algebra_with_elements(k=2, max_size=5))
@settings(max_examples=80, deadline=None)
def test_closure_matches_bruteforce(case):
    A, S = case
    C = closure(A, S)
    assert C == closure_bruteforce(A, S)
    assert is_closed(A, C)
    B, inc = generated_subalgebra(A, S)
    assert inc.image(B.elements) == C and inc.is_injective()


def test_subalgebra_requires_closed_set():
    C4 = chain_algebra(4)
    zero, a, b, one = C4.elements
    assert is_closed(C4, {0, a, one})
    assert not is_closed(C4, {0, a})
    with pytest.raises(AlgebraError):
        subalgebra(C4, {0, a})


def test_embedding_examples():
    TWO, C3, C4 = chain_algebra(2), chain_algebra(3), chain_algebra(4)
    for A in CORPUS5[:20]:
        assert len(enumerate_embeddings(TWO, A)) == 1
    embs = enumerate_embeddings(C3, C4)
    zero, a, b, one = C4.elements
    assert sorted(f(C3.elements[1]) for f in embs) == [a, b]
    assert enumerate_embeddings(C4, C3) == []
    assert enumerate_embeddings(C3, C4) == embs


def _oracle_ops(A):
    el = list(A.elements)
    return {
        "meet": lambda a, b: a & b,
        "join": lambda a, b: a | b,
        "imp": lambda a, b: implication_by_minimum(el, a, b),
        "zero": 0,
        "one": A.one,
    }


@pytest.mark.parametrize("B", [from_poset(P) for P in enumerate_posets(3)], ids=lambda A: f"dual{A.dual.size}")
def test_embeddings_recheck(B):
    for A in [from_poset(P) for P in enumerate_posets(4)]:
        for f in enumerate_embeddings(B, A):
            assign = {x: f(x) for x in B.elements}
            assert is_homomorphism_tables(B.elements, A.elements, assign, _oracle_ops(B), _oracle_ops(A))
            assert f.is_injective()
            assert is_p_morphism(f.dual_map) and f.dual_map.is_surjective()


def test_algebra_map_rejects_non_homomorphism():
    C3, C4 = chain_algebra(3), chain_algebra(4)
    zero, a, b, one = C4.elements
    with pytest.raises(AlgebraError):
        AlgebraMap.from_assignment(C3, C4, {0: 0, C3.elements[1]: a, C3.one: b})


def test_qf_type_examples():
    C4 = chain_algebra(4)
    zero, a, b, one = C4.elements
    assert qf_type_equal(C4, [a, b], [a, b])
    assert qf_type_equal(C4, [a], [b])
    assert not qf_type_equal(C4, [a], [0])
    with pytest.raises(AlgebraError):
        qf_type_equal(C4, [a], [a, b])


@given(algebras(max_size=4), st.data())
@settings(max_examples=40, deadline=None)
def test_qf_type_is_an_equivalence(A, data):
    el = st.sampled_from(A.elements)
    x, y, z = data.draw(el), data.draw(el), data.draw(el)
    assert qf_type_equal(A, [x], [x])
    assert qf_type_equal(A, [x], [y]) == qf_type_equal(A, [y], [x])
    if qf_type_equal(A, [x], [y]) and qf_type_equal(A, [y], [z]):
        assert qf_type_equal(A, [x], [z])


def test_envelope_examples():
    I = boolean_envelope(chain_algebra(2))
    assert len(I.elements) == 2 and all(I.interior(s) == s for s in I.elements)
    assert skeletal_check(I)
    J = boolean_envelope(chain_algebra(4))  # dual x<y<z on points 0<1<2
    assert J.interior(0b001) == 0
    assert J.interior(0b110) == 0b110
    assert skeletal_check(J)


def test_non_skeletal_fixture():
    I = non_skeletal_fixture()
    assert I.opens() == [0, 3]
    assert not skeletal_check(I)


@pytest.mark.parametrize("A", CORPUS5, ids=lambda A: f"dual{A.dual.size}")
def test_envelope_axioms(A):
    I = boolean_envelope(A)
    assert all(I.check_axioms().values())
    assert skeletal_check(I)
    assert sorted(I.opens()) == sorted(A.elements)


def test_relativize_to_non_upsets():
    P = FinitePoset.chain(3)
    R = relativize(P, mask_of([0, 1]))
    assert R.universe == 0b011
    assert R.interior(0b010) == 0b010  # top of the induced chain
    assert R.interior(0b001) == 0
    assert all(R.check_axioms().values())


def test_algebra_equality_and_names():
    A, B = chain_algebra(3), FiniteHeytingAlgebra(FinitePoset.chain(2))
    assert A == B and hash(A) == hash(B)
    assert A.name(0) and A.principal(0) == 0b11
