"""Lower amalgams, superamalgam completion through dual pullbacks, and independence."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import AlgebraError, AmalgamationError
from .heyting import (
    AlgebraMap,
    FiniteHeytingAlgebra,
    closure,
    enumerate_embeddings,
    from_poset,
    is_closed,
    same_qf_type,
    subalgebra,
)
from .posets import MonotoneMap, enumerate_posets, mask_of, max_poset_size, members, pullback

MODES = ("conjunction", "disjunction")
DEFAULT_SEARCH_BOUND = 9


@dataclass(frozen=True)
class LowerAmalgam:
    A0: FiniteHeytingAlgebra
    A1: FiniteHeytingAlgebra
    A2: FiniteHeytingAlgebra
    i1: AlgebraMap
    i2: AlgebraMap
    # global element names; in normal form A1's and A2's names meet exactly in A0's
    names: tuple[dict, dict, dict] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.i1.dom != self.A0 or self.i1.cod != self.A1:
            raise AlgebraError("i1 must map A0 into A1")
        if self.i2.dom != self.A0 or self.i2.cod != self.A2:
            raise AlgebraError("i2 must map A0 into A2")
        if not (self.i1.is_injective() and self.i2.is_injective()):
            raise AlgebraError("amalgam arms must be embeddings")


def is_normal(d: LowerAmalgam) -> bool:
    if d.names is None:
        return False
    n0, n1, n2 = d.names
    if set(n1.values()) & set(n2.values()) != set(n0.values()):
        return False
    return all(n1[d.i1(a)] == n0[a] and n2[d.i2(a)] == n0[a] for a in d.A0.elements)


def normalize(d: LowerAmalgam) -> LowerAmalgam:
    """Name elements so that A0 is literally the intersection of A1 and A2.

    A0's element ``k`` is ``"0:k"``; any other element ``k`` of Aj is ``"j:k"``.
    """
    n0 = {a: f"0:{k}" for k, a in enumerate(d.A0.elements)}
    n1 = {x: f"1:{k}" for k, x in enumerate(d.A1.elements)}
    n2 = {x: f"2:{k}" for k, x in enumerate(d.A2.elements)}
    for a in d.A0.elements:
        n1[d.i1(a)] = n0[a]
        n2[d.i2(a)] = n0[a]
    return LowerAmalgam(d.A0, d.A1, d.A2, d.i1, d.i2, (n0, n1, n2))


@dataclass(frozen=True)
class Certificate:
    commutes: bool
    strong: bool
    super_independent: bool
    mode: str = "conjunction"

    @property
    def ok(self) -> bool:
        return self.commutes and self.strong and self.super_independent

    def as_dict(self) -> dict:
        return {
            "commutes": self.commutes,
            "strong": self.strong,
            "super_independent": self.super_independent,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class Completion:
    A: FiniteHeytingAlgebra
    e1: AlgebraMap
    e2: AlgebraMap
    certificate: Certificate
    strategy: str = "pullback"
    amalgam: LowerAmalgam | None = field(default=None, compare=False)

    def base_image(self) -> frozenset[int]:
        d = self.amalgam
        return frozenset(self.e1(d.i1(a)) for a in d.A0.elements)


# independence


def _check_designations(A, A1, A0, A2):
    for name, S in (("A0", A0), ("A1", A1), ("A2", A2)):
        if not is_closed(A, S):
            raise AlgebraError(f"designation {name} is not closed under the operations")
    if not (A0 <= A1 and A0 <= A2):
        raise AlgebraError("A0 must be contained in A1 and A2")


def _interpolates(lower: Iterable[int], base: frozenset[int], upper: Iterable[int], one: int) -> bool:
    upper = list(upper)
    for x in lower:
        # base is closed under meets, so the least base element above x exists
        m = one
        for a in base:
            if x & ~a == 0:
                m &= a
        for y in upper:
            if x & ~y == 0 and m & ~y:
                return False
    return True


def check_super_independence(A, A1, A0, A2, mode: str = "conjunction") -> bool:
    """Whether cross inequalities between A1 and A2 interpolate through A0.

    ``conjunction`` requires both directions (A1 below A2 and A2 below A1);
    ``disjunction`` accepts either direction holding on its own.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    A1, A0, A2 = frozenset(A1), frozenset(A0), frozenset(A2)
    _check_designations(A, A1, A0, A2)
    left = _interpolates(A1, A0, A2, A.one)
    if mode == "disjunction" and left:
        return True
    right = _interpolates(A2, A0, A1, A.one)
    return left and right if mode == "conjunction" else right


def finite_subset_independence(A, S1, S0, S2, mode: str = "conjunction") -> bool:
    S0 = set(S0)
    return check_super_independence(
        A, closure(A, set(S1) | S0), closure(A, S0), closure(A, S0 | set(S2)), mode
    )


# completion


def certify(d: LowerAmalgam, A, e1: AlgebraMap, e2: AlgebraMap, mode: str = "conjunction") -> Certificate:
    base1 = frozenset(e1(d.i1(a)) for a in d.A0.elements)
    base2 = frozenset(e2(d.i2(a)) for a in d.A0.elements)
    commutes = e1.is_injective() and e2.is_injective() and all(
        e1(d.i1(a)) == e2(d.i2(a)) for a in d.A0.elements
    )
    img1, img2 = e1.image(d.A1.elements), e2.image(d.A2.elements)
    strong = commutes and base1 == base2 and img1 & img2 == base1
    try:
        sup = check_super_independence(A, img1, base1, img2, mode) if commutes else False
    except AlgebraError:
        sup = False
    return Certificate(commutes, strong, sup, mode)


def _kernel_join(n: int, maps) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in maps:
        first: dict[int, int] = {}
        for x in range(n):
            y = first.setdefault(f(x), x)
            parent[find(x)] = find(y)
    return [find(x) for x in range(n)]


def _push(f: MonotoneMap, mask: int) -> int:
    out = 0
    for x in members(mask):
        out |= 1 << f(x)
    return out


def _dual_interpolates(X, pa: MonotoneMap, pb: MonotoneMap, p0: MonotoneMap) -> bool:
    # enough to test the least element of the first image containing each point
    for u in range(X.size):
        x = pa.preimage(pa.cod.up[pa(u)])
        if p0.preimage(_push(p0, x)) & ~pb.preimage(_push(pb, x)):
            return False
    return True


def certify_dual(d: LowerAmalgam, X, p1: MonotoneMap, p2: MonotoneMap, mode: str = "conjunction") -> Certificate:
    """``certify`` computed on dual points, for completions given by dual maps.

    Images of the arms are the up-sets saturated by the kernels of ``p1`` and
    ``p2``; their common part is the set of up-sets saturated by the joined
    kernel, which equals the base exactly when the strongly connected parts
    of the order plus that kernel are the fibres of the base map.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    q1, q2 = d.i1.dual_map, d.i2.dual_map
    n = X.size
    commutes = p1.is_surjective() and p2.is_surjective() and all(q1(p1(x)) == q2(p2(x)) for x in range(n))
    if not commutes:
        return Certificate(False, False, False, mode)
    p0 = p1.then(q1)
    K = _kernel_join(n, (p1, p2))
    ids = {c: i for i, c in enumerate(sorted(set(K)))}
    k = len(ids)
    reach = [1 << i for i in range(k)]
    for x in range(n):
        for y in members(X.up[x]):
            reach[ids[K[x]]] |= 1 << ids[K[y]]
    for m in range(k):
        for i in range(k):
            if reach[i] >> m & 1:
                reach[i] |= reach[m]
    scc = [mask_of(j for j in members(reach[i]) if reach[j] >> i & 1) for i in range(k)]
    comp = [scc[ids[K[x]]] for x in range(n)]
    pairs = set(zip(comp, (p0(x) for x in range(n))))
    strong = len(pairs) == len(set(comp)) == len({p0(x) for x in range(n)})
    left = _dual_interpolates(X, p1, p2, p0)
    right = _dual_interpolates(X, p2, p1, p0)
    sup = (left and right) if mode == "conjunction" else (left or right)
    return Certificate(True, strong, sup, mode)


def _search_completion(d: LowerAmalgam, bound: int, mode: str) -> Completion:
    limit = min(bound, max_poset_size())
    for Q in enumerate_posets(limit, bound=limit):
        if Q.size < max(d.A1.dual.size, d.A2.dual.size):
            continue
        C = from_poset(Q)
        e2s = enumerate_embeddings(d.A2, C)
        for e1 in enumerate_embeddings(d.A1, C):
            for e2 in e2s:
                cert = certify(d, C, e1, e2, mode)
                if cert.ok:
                    return Completion(C, e1, e2, cert, "search", d)
    raise AmalgamationError(f"no certified completion with dual size <= {limit}")


def complete_superamalgam(
    d: LowerAmalgam,
    mode: str = "conjunction",
    strategy: str = "pullback",
    search_bound: int = DEFAULT_SEARCH_BOUND,
) -> Completion:
    """Complete ``A1 <- A0 -> A2``; the default is the up-set algebra of the dual pullback.

    The result is certified after construction.  If the pullback ever fails
    its certificate, a bounded search over small dual posets takes over.
    """
    if strategy == "search":
        return _search_completion(d, search_bound, mode)
    if strategy != "pullback":
        raise ValueError(f"unknown strategy {strategy!r}")
    X, p1, p2 = pullback(d.i1.dual_map, d.i2.dual_map)
    A = from_poset(X)
    e1, e2 = AlgebraMap(d.A1, A, p1), AlgebraMap(d.A2, A, p2)
    cert = certify_dual(d, X, p1, p2, mode)
    if cert.ok:
        return Completion(A, e1, e2, cert, "pullback", d)
    return _search_completion(d, search_bound, mode)


def amalgam_over(A1: FiniteHeytingAlgebra, base: Iterable[int], A2: FiniteHeytingAlgebra, inc2: AlgebraMap | None = None):
    """Lower amalgam whose arm into ``A1`` is the inclusion of the subalgebra ``base``.

    With ``inc2`` omitted, ``A2`` is ``A1`` itself and both arms coincide.
    """
    B0, inc1 = subalgebra(A1, base)
    if inc2 is None:
        if A2 != A1:
            raise AlgebraError("an arm into A2 is needed when A2 differs from A1")
        inc2 = inc1
    return LowerAmalgam(B0, A1, A2, inc1, inc2)


def independent_realization(
    A1: FiniteHeytingAlgebra,
    base: AlgebraMap,
    phi: tuple[FiniteHeytingAlgebra, AlgebraMap],
    mode: str = "conjunction",
) -> tuple[Completion, AlgebraMap]:
    """Realise the diagram ``phi = (A2, A0 -> A2)`` over ``A0`` independently from ``A1``.

    ``base`` embeds A0 into A1.  Returns the completion and the arm ``e2``.
    """
    A2, inc2 = phi
    d = LowerAmalgam(base.dom, A1, A2, base, inc2)
    comp = complete_superamalgam(d, mode)
    return comp, comp.e2


def realization_checks(comp: Completion, mode: str = "conjunction") -> dict[str, bool]:
    """Diagram satisfied, independence over the base, and equal type over the base."""
    d = comp.amalgam
    A = comp.A
    A0_el = d.A0.elements
    A2_el = d.A2.elements
    satisfied = comp.e2.is_injective() and all(comp.e2(d.i2(a)) == comp.e1(d.i1(a)) for a in A0_el)
    independent = finite_subset_independence(
        A, comp.e1.image(d.A1.elements), comp.base_image(), comp.e2.image(A2_el), mode
    )
    s = [comp.e2(x) for x in A2_el] + [comp.e1(d.i1(a)) for a in A0_el]
    t = list(A2_el) + [d.i2(a) for a in A0_el]
    stationary = same_qf_type(A, s, d.A2, t)
    return {"satisfies_diagram": satisfied, "independent": independent, "same_type_over_base": stationary}


def relabeled_copy(A: FiniteHeytingAlgebra, perm) -> tuple[FiniteHeytingAlgebra, dict[int, int]]:
    """Isomorphic copy of ``A`` whose dual point ``x`` is renamed ``perm[x]``."""
    B = from_poset(A.dual.relabel(perm))
    iso = {}
    for a in A.elements:
        m = 0
        for x in range(A.dual.size):
            if a >> x & 1:
                m |= 1 << perm[x]
        iso[a] = m
    return B, iso


def transport_arm(inc: AlgebraMap, B: FiniteHeytingAlgebra, perm) -> AlgebraMap:
    """Compose an arm ``A0 -> A`` with the relabeling ``A -> B`` given by ``perm`` on duals."""
    inv = [0] * len(perm)
    for x, y in enumerate(perm):
        inv[y] = x
    image = tuple(inc.dual_map.image[inv[y]] for y in range(B.dual.size))
    return AlgebraMap(inc.dom, B, MonotoneMap(B.dual, inc.dom.dual, image))


def stationarity_check(A1, base: AlgebraMap, phi, perm, mode: str = "conjunction") -> bool:
    """Realise ``phi`` twice, the second time through a relabeled copy of A2, and compare.

    Both completions are amalgamated over A1; the two realizations must then
    have the same quantifier-free type over the image of A1.
    """
    A2, inc2 = phi
    C1, e2 = independent_realization(A1, base, phi, mode)
    B2, iso = relabeled_copy(A2, perm)
    C2, f2 = independent_realization(A1, base, (B2, transport_arm(inc2, B2, perm)), mode)
    d = LowerAmalgam(A1, C1.A, C2.A, C1.e1, C2.e1)
    D = complete_superamalgam(d, mode)
    A1_el = A1.elements
    s = [D.e1(e2(x)) for x in A2.elements] + [D.e1(C1.e1(a)) for a in A1_el]
    t = [D.e2(f2(iso[x])) for x in A2.elements] + [D.e2(C2.e1(a)) for a in A1_el]
    return same_qf_type(D.A, s, D.A, t)
