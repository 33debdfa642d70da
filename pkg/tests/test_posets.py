import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heytlab.errors import PosetError
from heytlab.oracles import all_subsets_upsets, bruteforce_iso, count_posets_bruteforce, is_order
from heytlab.posets import (
    FinitePoset,
    MonotoneMap,
    are_isomorphic,
    connected_components,
    duplicate_upset_extension,
    enumerate_posets,
    is_p_morphism,
    mask_of,
    members,
    order_automorphisms,
    p_morphisms,
    poset_counts,
    pullback,
    up_sets,
    upset_masks,
)
from strategies import posets

GRID = FinitePoset.generated(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


def test_rejects_non_orders():
    with pytest.raises(PosetError):
        FinitePoset.from_pairs(2, [(0, 1), (1, 0)])
    with pytest.raises(PosetError):
        FinitePoset.from_pairs(3, [(0, 1), (1, 2)])  # not transitive, and no closure is taken
    with pytest.raises(PosetError):
        FinitePoset.from_pairs(2, [(0, 2)])


def test_generated_takes_closure():
    P = FinitePoset.generated(3, [(0, 1), (1, 2)])
    assert P == FinitePoset.chain(3)
    assert P.relations() == [(0, 1), (0, 2), (1, 2)]
    assert P.covers() == [(0, 1), (1, 2)]


@pytest.mark.parametrize(
    "P, expected",
    [
        (FinitePoset.antichain(1), 2),
        (FinitePoset.chain(1), 2),
        (FinitePoset.chain(4), 5),
        (FinitePoset.antichain(3), 8),
        (GRID, 6),
    ],
)
def test_up_set_counts(P, expected):
    assert len(up_sets(P)) == expected


def test_one_point_up_sets_in_order():
    assert up_sets(FinitePoset.antichain(1)) == [frozenset(), frozenset({0})]


def test_p_morphism_examples():
    C2 = FinitePoset.chain(2)
    assert is_p_morphism(MonotoneMap.identity(C2))
    pt = FinitePoset.antichain(1)
    assert is_p_morphism(MonotoneMap(C2, pt, (0, 0)))
    # inclusion of the up-set {1} of the 2-chain
    assert is_p_morphism(MonotoneMap(pt, C2, (1,)))
    # inclusion of the non-up-set {0}
    assert not is_p_morphism(MonotoneMap(pt, C2, (0,)))


def test_monotone_map_checks_order():
    C2 = FinitePoset.chain(2)
    with pytest.raises(PosetError):
        MonotoneMap(C2, C2, (1, 0))


def test_pullback_examples():
    C2, pt, A3 = FinitePoset.chain(2), FinitePoset.antichain(1), FinitePoset.antichain(3)
    X, p1, p2 = pullback(MonotoneMap(C2, pt, (0, 0)), MonotoneMap(C2, pt, (0, 0)))
    assert X.size == 4 and are_isomorphic(X, GRID) is not None
    X, _, _ = pullback(MonotoneMap(A3, pt, (0, 0, 0)), MonotoneMap(A3, pt, (0, 0, 0)))
    assert X == FinitePoset.antichain(9)
    f = MonotoneMap(C2, pt, (0, 0))
    X, _, _ = pullback(MonotoneMap.identity(pt), f)
    assert are_isomorphic(X, C2) is not None


def test_pullback_rejects_bad_input():
    C2, pt = FinitePoset.chain(2), FinitePoset.antichain(1)
    with pytest.raises(PosetError):
        pullback(MonotoneMap(pt, C2, (0,)), MonotoneMap.identity(C2))


@given(posets(max_size=4), posets(max_size=4))
@settings(max_examples=40, deadline=None)
def test_pullback_projections(P, Q):
    # any surjective p-morphisms onto a common target will do; use the ones onto a point
    pt = FinitePoset.antichain(1)
    f1 = MonotoneMap(P, pt, (0,) * P.size)
    f2 = MonotoneMap(Q, pt, (0,) * Q.size)
    X, p1, p2 = pullback(f1, f2)
    assert is_p_morphism(p1) and is_p_morphism(p2)
    assert p1.is_surjective() and p2.is_surjective()
    assert all(f1(p1(x)) == f2(p2(x)) for x in range(X.size))


@given(posets(max_size=4))
@settings(max_examples=30, deadline=None)
def test_pullback_along_self_map(P):
    for f in list(p_morphisms(P, FinitePoset.antichain(1)))[:1]:
        X, p1, p2 = pullback(f, f)
        assert X.size == P.size ** 2


def test_components():
    assert connected_components(FinitePoset.chain(3)) == [(0, 1, 2)]
    assert len(connected_components(FinitePoset.antichain(3))) == 3
    P = FinitePoset.chain(2).disjoint_union(FinitePoset.antichain(1))
    assert connected_components(P) == [(0, 1), (2,)]


def test_duplicate_upset_extension_examples():
    C2 = FinitePoset.chain(2)
    P2, f = duplicate_upset_extension(C2, 0b10)
    assert P2.size == 3 and P2.leq(0, 1) and not P2.leq(0, 2) and not P2.leq(1, 2)
    assert is_p_morphism(f) and f.is_surjective()
    assert f.preimage(0b10) == 0b110
    pt = FinitePoset.antichain(1)
    P2, _ = duplicate_upset_extension(pt, 1)
    assert P2 == FinitePoset.antichain(2) and len(upset_masks(P2)) == 4
    P2, _ = duplicate_upset_extension(GRID, GRID.full)
    assert are_isomorphic(P2, GRID.disjoint_union(GRID)) is not None
    with pytest.raises(PosetError):
        duplicate_upset_extension(C2, 0)
    with pytest.raises(PosetError):
        duplicate_upset_extension(C2, 0b01)


@given(posets(max_size=5), st.data())
@settings(max_examples=40, deadline=None)
def test_duplicate_preimage_splits(P, data):
    Y = data.draw(st.sampled_from([u for u in upset_masks(P) if u]))
    P2, f = duplicate_upset_extension(P, Y)
    pre = f.preimage(Y)
    sub, _ = P2.induced(pre)
    assert len(connected_components(sub)) >= 2
    assert is_p_morphism(f) and f.is_surjective()


def test_isomorphism_examples():
    C2, A2 = FinitePoset.chain(2), FinitePoset.antichain(2)
    assert are_isomorphic(GRID, GRID) is not None
    assert are_isomorphic(C2, A2) is None
    assert are_isomorphic(GRID, FinitePoset.chain(4)) is None
    assert bruteforce_iso(GRID, FinitePoset.chain(4)) is None


def test_isomorphism_agrees_with_bruteforce_up_to_four():
    cat = enumerate_posets(4)
    for P in cat:
        for Q in cat:
            assert (are_isomorphic(P, Q) is None) == (bruteforce_iso(P, Q) is None)


@given(posets(max_size=5), st.data())
@settings(max_examples=60, deadline=None)
def test_isomorphism_finds_relabelings(P, data):
    perm = data.draw(st.permutations(range(P.size)))
    Q = P.relabel(perm)
    g = are_isomorphic(P, Q)
    assert g is not None
    assert all(P.leq(x, y) == Q.leq(g[x], g[y]) for x in range(P.size) for y in range(P.size))
    assert are_isomorphic(Q, P) is not None


def test_catalog_counts():
    assert poset_counts(1) == [1]
    assert poset_counts(3) == [1, 2, 5]
    assert poset_counts(5) == [1, 2, 5, 16, 63]


@pytest.mark.slow
def test_catalog_counts_to_seven():
    assert poset_counts(7) == [1, 2, 5, 16, 63, 318, 2045]


def test_catalog_counts_match_bruteforce_recount():
    assert [count_posets_bruteforce(n) for n in range(1, 6)] == [1, 2, 5, 16, 63]


def test_catalog_has_no_duplicates_and_is_deterministic():
    cat = enumerate_posets(4)
    for i, P in enumerate(cat):
        for Q in cat[i + 1 :]:
            assert bruteforce_iso(P, Q) is None
    assert enumerate_posets(4) == cat


def test_enumeration_bound(monkeypatch):
    with pytest.raises(PosetError):
        enumerate_posets(8)
    with pytest.raises(PosetError):
        enumerate_posets(0)
    monkeypatch.setenv("HEYTLAB_MAX_POSET_SIZE", "3")
    with pytest.raises(PosetError):
        enumerate_posets(4)


@pytest.mark.parametrize("P", enumerate_posets(5))
def test_up_sets_form_a_bounded_lattice(P):
    ups = set(upset_masks(P))
    assert ups == set(all_subsets_upsets(P))
    assert 0 in ups and P.full in ups
    for a in ups:
        for b in ups:
            assert a | b in ups and a & b in ups


def test_automorphisms():
    assert order_automorphisms(FinitePoset.chain(3)) == [(0, 1, 2)]
    assert len(order_automorphisms(FinitePoset.antichain(3))) == 6
    assert order_automorphisms(GRID) == [(0, 1, 2, 3), (0, 2, 1, 3)]


def test_p_morphism_search_matches_bruteforce():
    from itertools import product

    for X in enumerate_posets(3):
        for Y in enumerate_posets(3):
            found = {f.image for f in p_morphisms(X, Y, surjective=False)}
            brute = set()
            for img in product(range(Y.size), repeat=X.size):
                try:
                    f = MonotoneMap(X, Y, img)
                except PosetError:
                    continue
                if is_p_morphism(f):
                    brute.add(img)
            assert found == brute


def test_bit_helpers():
    assert members(0b1011) == [0, 1, 3]
    assert mask_of([0, 1, 3]) == 0b1011
    assert is_order(2, {(0, 0), (1, 1), (0, 1)})


def test_isomorphism_agrees_with_bruteforce_at_five():
    cat = [P for P in enumerate_posets(5) if P.size == 5]
    for i, P in enumerate(cat):
        assert are_isomorphic(P, P) is not None
        for Q in cat[i + 1 :]:
            assert are_isomorphic(P, Q) is None
            assert are_isomorphic(Q, P) is None
        # a shuffled copy must be found again, and the oracle agrees
        Q = P.relabel((4, 2, 0, 3, 1))
        assert are_isomorphic(P, Q) is not None and bruteforce_iso(P, Q) is not None
