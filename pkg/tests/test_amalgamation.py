import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heytlab.amalgamation import (
    LowerAmalgam,
    amalgam_over,
    certify,
    certify_dual,
    check_super_independence,
    complete_superamalgam,
    finite_subset_independence,
    independent_realization,
    is_normal,
    normalize,
    realization_checks,
    stationarity_check,
)
from heytlab.errors import AlgebraError
from heytlab.heyting import AlgebraMap, boolean_algebra, chain_algebra, enumerate_embeddings, from_poset
from heytlab.posets import FinitePoset, are_isomorphic, enumerate_posets, p_morphisms
from heytlab.suite import (
    check_independence_invariance,
    check_independence_monotone,
    check_search_strategy,
    check_stationarity,
    check_superamalgamation,
)

TWO, C3, C4, B8 = chain_algebra(2), chain_algebra(3), chain_algebra(4), boolean_algebra(3)
GRID = FinitePoset.generated(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
SMALL = [from_poset(P) for P in enumerate_posets(3)]


def arm(B, A, k=0):
    return enumerate_embeddings(B, A)[k]


def six_element():
    j = arm(TWO, C3)
    return complete_superamalgam(normalize(LowerAmalgam(TWO, C3, C3, j, j)))


def test_normalize_examples():
    j = arm(TWO, C3)
    d = normalize(LowerAmalgam(TWO, C3, C3, j, j))
    assert is_normal(d)
    n0, n1, n2 = d.names
    assert set(n1.values()) & set(n2.values()) == set(n0.values()) == {"0:0", "0:1"}
    assert normalize(d).names == d.names
    iso = AlgebraMap.identity(C3)
    d = normalize(LowerAmalgam(C3, C3, C4, iso, arm(C3, C4)))
    assert set(d.names[1].values()) == set(d.names[0].values())
    assert not is_normal(LowerAmalgam(TWO, C3, C3, j, j))


def test_amalgam_rejects_non_embeddings():
    j = arm(TWO, C3)
    with pytest.raises(AlgebraError):
        LowerAmalgam(TWO, C4, C3, j, j)


def test_six_element_completion():
    c = six_element()
    assert c.A.size == 6 and are_isomorphic(c.A.dual, GRID) is not None
    assert c.certificate.ok and c.strategy == "pullback"
    u = c.e1(C3.elements[1])
    v = c.e2(C3.elements[1])
    assert c.e1.image(C3.elements) == {0, u, c.A.one}
    assert c.e2.image(C3.elements) == {0, v, c.A.one}
    assert not c.A.leq(u, v) and not c.A.leq(v, u)


def test_completion_along_identity():
    d = normalize(LowerAmalgam(C3, C3, C4, AlgebraMap.identity(C3), arm(C3, C4)))
    c = complete_superamalgam(d)
    assert c.A.size == C4.size and c.certificate.ok
    assert are_isomorphic(c.A.dual, C4.dual) is not None


def test_boolean_completion():
    j = arm(TWO, B8)
    c = complete_superamalgam(normalize(LowerAmalgam(TWO, B8, B8, j, j)))
    assert c.A.dual == FinitePoset.antichain(9)
    assert c.A.size == 512 and c.certificate.ok


def test_independence_examples():
    c = six_element()
    A, one = c.A, c.A.one
    u, v = c.e1(C3.elements[1]), c.e2(C3.elements[1])
    S1, S2, S0 = {0, u, one}, {0, v, one}, {0, one}
    assert check_super_independence(A, S1, S1, S1)
    assert check_super_independence(A, S1, S0, S2)
    assert finite_subset_independence(A, {u}, (), {v})
    zero, a, b, top = C4.elements
    assert not check_super_independence(C4, {0, a, top}, {0, top}, {0, b, top})
    assert not finite_subset_independence(C4, {a}, (), {b})
    assert finite_subset_independence(C4, {a}, {a}, {a})


def test_independence_modes_differ_on_one_sided_failure():
    zero, a, b, top = C4.elements
    A1, A0, A2 = {0, a, top}, {0, top}, {0, b, top}
    assert not check_super_independence(C4, A1, A0, A2, "conjunction")
    # a <= b fails to interpolate; b <= a never happens, so the other direction holds
    assert check_super_independence(C4, A1, A0, A2, "disjunction")
    with pytest.raises(ValueError):
        check_super_independence(C4, A1, A0, A2, "neither")


def test_independence_rejects_open_designation():
    zero, a, b, top = C4.elements
    with pytest.raises(AlgebraError):
        check_super_independence(C4, {0, a}, {0, top}, {0, top})


def test_superamalgamation_exhaustive_small():
    ok, info = check_superamalgamation(2, 4)
    assert ok, info
    assert info["amalgams"] > 0 and info["fallbacks"] == 0


@pytest.mark.slow
def test_superamalgamation_exhaustive_dual_three():
    ok, info = check_superamalgamation(3, 9)
    assert ok, info


def test_search_strategy_finds_a_certified_completion():
    # the first certified candidate has a 3-point dual (two minimal points under a top),
    # one element smaller than the pullback
    ok, info = check_search_strategy(4)
    assert ok and info["elements"] == 5


def _small_amalgams():
    out = []
    for A0 in SMALL[:3]:
        for A1 in SMALL:
            for A2 in SMALL:
                for i1 in enumerate_embeddings(A0, A1)[:2]:
                    for i2 in enumerate_embeddings(A0, A2)[:2]:
                        out.append(LowerAmalgam(A0, A1, A2, i1, i2))
    return out


AMALGAMS = _small_amalgams()


@given(st.sampled_from(AMALGAMS), st.sampled_from(("conjunction", "disjunction")))
@settings(max_examples=60, deadline=None)
def test_dual_certificate_agrees_on_pullbacks(d, mode):
    c = complete_superamalgam(d, mode)
    assert c.certificate == certify(d, c.A, c.e1, c.e2, mode)
    assert c.certificate.ok


def test_dual_certificate_agrees_on_other_cones():
    # every commuting pair of surjections from a small dual, not only the pullback
    seen = 0
    for d in AMALGAMS[:40]:
        q1, q2 = d.i1.dual_map, d.i2.dual_map
        for Q in enumerate_posets(3):
            A = from_poset(Q)
            for p1 in p_morphisms(Q, d.A1.dual):
                for p2 in p_morphisms(Q, d.A2.dual):
                    if any(q1(p1(x)) != q2(p2(x)) for x in range(Q.size)):
                        continue
                    e1, e2 = AlgebraMap(d.A1, A, p1), AlgebraMap(d.A2, A, p2)
                    for mode in ("conjunction", "disjunction"):
                        assert certify_dual(d, Q, p1, p2, mode) == certify(d, A, e1, e2, mode)
                    seen += 1
    assert seen > 50


def test_completion_is_strong():
    for d in AMALGAMS:
        c = complete_superamalgam(d)
        assert {c.e1(d.i1(a)) for a in d.A0.elements} == {c.e2(d.i2(a)) for a in d.A0.elements}


def test_independent_realization_examples():
    base = arm(TWO, C3)
    comp, e2 = independent_realization(C3, base, (C3, base))
    assert comp.A.size == 6 and all(realization_checks(comp).values())
    v = e2(C3.elements[1])
    assert e2.image(C3.elements) == {0, v, comp.A.one}

    # the diagram of the base itself lands inside the first arm
    comp, e2 = independent_realization(C3, base, (TWO, AlgebraMap.identity(TWO)))
    assert e2.image(TWO.elements) <= comp.e1.image(C3.elements)

    comp, e2 = independent_realization(C4, arm(TWO, C4), (B8, arm(TWO, B8)))
    assert comp.certificate.ok and comp.A.dual.size == 9
    assert all(realization_checks(comp).values())


def test_amalgam_over_subalgebra():
    zero, a, b, one = C4.elements
    d = amalgam_over(C4, {0, a, one}, C4)
    assert d.A0.size == 3 and complete_superamalgam(d).certificate.ok
    with pytest.raises(AlgebraError):
        amalgam_over(C4, {0, a, one}, C3)


def test_stationarity_examples():
    base = arm(TWO, C3)
    assert stationarity_check(C3, base, (C4, arm(TWO, C4)), (2, 1, 0))
    ok, info = check_stationarity(3)
    assert ok and info["instances"] > 0


def test_independence_invariance_and_monotonicity():
    ok, info = check_independence_invariance(3)
    assert ok, info
    ok, info = check_independence_monotone(3)
    assert ok and info["instances"] > 0
