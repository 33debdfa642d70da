from hypothesis import strategies as st

from heytlab.heyting import from_poset
from heytlab.posets import FinitePoset


@st.composite
def posets(draw, min_size=1, max_size=5):
    n = draw(st.integers(min_size, max_size))
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n) if draw(st.booleans())]
    perm = draw(st.permutations(range(n)))
    return FinitePoset.generated(n, [(perm[x], perm[y]) for x, y in pairs])


@st.composite
def algebras(draw, max_size=4):
    return from_poset(draw(posets(max_size=max_size)))


@st.composite
def algebra_with_elements(draw, k=3, max_size=4):
    A = draw(algebras(max_size=max_size))
    els = draw(st.lists(st.sampled_from(A.elements), min_size=k, max_size=k))
    return A, els
