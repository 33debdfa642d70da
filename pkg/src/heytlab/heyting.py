"""Finite Heyting algebras as lattices of up-sets.

An algebra is determined by its dual poset; elements are up-sets given as
bitmasks, so ``meet`` is ``&`` and ``join`` is ``|``.  The element list is
only materialised on demand, because chain stages can have duals whose
up-set lattices are far too large to list.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .errors import AlgebraError
from .posets import (
    FinitePoset,
    MonotoneMap,
    canonical_key,
    is_p_morphism,
    mask_of,
    members,
    p_morphisms,
    upset_masks,
)


class FiniteHeytingAlgebra:
    def __init__(self, dual: FinitePoset):
        self.dual = dual

    def __eq__(self, other):
        return isinstance(other, FiniteHeytingAlgebra) and self.dual == other.dual

    def __hash__(self):
        return hash(self.dual)

    def __repr__(self):
        return f"FiniteHeytingAlgebra(dual={self.dual!r})"

    zero = 0

    @property
    def one(self) -> int:
        return self.dual.full

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def imp(self, a: int, b: int) -> int:
        # complement of the down-closure of a \ b
        return self.dual.full & ~self.dual.downclose(a & ~b)

    def neg(self, a: int) -> int:
        return self.imp(a, 0)

    @staticmethod
    def leq(a: int, b: int) -> bool:
        return a & ~b == 0

    def is_element(self, a: int) -> bool:
        return 0 <= a <= self.dual.full and self.dual.is_upset(a)

    @cached_property
    def elements(self) -> tuple[int, ...]:
        return upset_masks(self.dual)

    @cached_property
    def index(self) -> dict[int, int]:
        return {a: i for i, a in enumerate(self.elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    def ops(self) -> dict:
        return {"meet": self.meet, "join": self.join, "imp": self.imp, "zero": 0, "one": self.one}

    @cached_property
    def tables(self) -> dict[str, list[list[int]]]:
        """Index-based operation tables (quadratic; meant for small algebras)."""
        idx, el = self.index, self.elements
        return {
            name: [[idx[op(a, b)] for b in el] for a in el]
            for name, op in (("meet", self.meet), ("join", self.join), ("imp", self.imp))
        }

    def principal(self, x: int) -> int:
        return self.dual.up[x]

    def name(self, a: int) -> str:
        return "{" + ",".join(str(p) for p in members(a)) + "}"


def from_poset(P: FinitePoset) -> FiniteHeytingAlgebra:
    return FiniteHeytingAlgebra(P)


def chain_algebra(n: int) -> FiniteHeytingAlgebra:
    """The ``n``-element chain (dual: an ``(n-1)``-chain)."""
    return FiniteHeytingAlgebra(FinitePoset.chain(n - 1))


def boolean_algebra(atoms: int) -> FiniteHeytingAlgebra:
    return FiniteHeytingAlgebra(FinitePoset.antichain(atoms))


# prime filters and the dual poset


def prime_filters_by_definition(n: int, leq, meet, join) -> list[frozenset[int]]:
    """Prime filters of a finite lattice on indices ``0..n-1``.

    Filters of a finite lattice are principal, so the candidates are the
    principal up-sets; each is then tested against the filter and primality
    conditions directly.
    """
    out = []
    for a in range(n):
        F = frozenset(b for b in range(n) if leq(a, b))
        if len(F) == n:  # contains the bottom, not proper
            continue
        if any(meet(x, y) not in F for x in F for y in F):
            continue
        if any(leq(x, y) and y not in F for x in F for y in range(n)):
            continue
        if all(join(x, y) not in F or x in F or y in F for x in range(n) for y in range(n)):
            out.append(F)
    return out


def prime_filters(A: FiniteHeytingAlgebra) -> list[frozenset[int]]:
    """Prime filters of ``A`` as sets of element masks, in canonical order of their least element."""
    el = A.elements
    raw = prime_filters_by_definition(
        len(el),
        lambda i, j: A.leq(el[i], el[j]),
        lambda i, j: A.index[el[i] & el[j]],
        lambda i, j: A.index[el[i] | el[j]],
    )
    return [frozenset(el[i] for i in F) for F in raw]


def poset_of_filters(filters: Sequence[frozenset]) -> FinitePoset:
    up = [mask_of(j for j, G in enumerate(filters) if F <= G) for F in filters]
    return FinitePoset(len(filters), tuple(up))


def dual_poset(A: FiniteHeytingAlgebra) -> FinitePoset:
    """Prime filters of ``A`` ordered by inclusion."""
    return poset_of_filters(prime_filters(A))


@dataclass(frozen=True)
class TableAlgebra:
    """An algebra given by explicit operation tables over indices ``0..size-1``."""

    size: int
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    imp: tuple[tuple[int, ...], ...]
    zero: int
    one: int

    def leq(self, a, b):
        return self.meet[a][b] == a

    def validate(self) -> None:
        n, M, J, I = self.size, self.meet, self.join, self.imp
        rng = range(n)
        for T in (M, J, I):
            if len(T) != n or any(len(r) != n for r in T):
                raise AlgebraError("tables must be square")
        for a in rng:
            if M[a][a] != a or J[a][a] != a:
                raise AlgebraError("meet/join not idempotent")
            if M[a][self.zero] != self.zero or J[a][self.one] != self.one:
                raise AlgebraError("zero/one are not bounds")
            for b in rng:
                if M[a][b] != M[b][a] or J[a][b] != J[b][a]:
                    raise AlgebraError("meet/join not commutative")
                if M[a][J[a][b]] != a or J[a][M[a][b]] != a:
                    raise AlgebraError("absorption fails")
                for c in rng:
                    if M[a][M[b][c]] != M[M[a][b]][c] or J[a][J[b][c]] != J[J[a][b]][c]:
                        raise AlgebraError("meet/join not associative")
                    if M[a][J[b][c]] != J[M[a][b]][M[a][c]]:
                        raise AlgebraError("lattice is not distributive")
                    if self.leq(c, I[a][b]) != self.leq(M[a][c], b):
                        raise AlgebraError("implication is not residuated")

    def to_algebra(self) -> tuple[FiniteHeytingAlgebra, list[int]]:
        """Validate, then represent on the dual; returns the algebra and each index's mask."""
        self.validate()
        filters = prime_filters_by_definition(
            self.size, self.leq, lambda i, j: self.meet[i][j], lambda i, j: self.join[i][j]
        )
        P = poset_of_filters(filters)
        masks = [mask_of(k for k, F in enumerate(filters) if i in F) for i in range(self.size)]
        return FiniteHeytingAlgebra(P), masks

    @classmethod
    def of(cls, A: FiniteHeytingAlgebra) -> "TableAlgebra":
        t = A.tables
        freeze = lambda T: tuple(tuple(r) for r in T)
        return cls(A.size, freeze(t["meet"]), freeze(t["join"]), freeze(t["imp"]), 0, A.size - 1)


# homomorphisms


@dataclass(frozen=True)
class AlgebraMap:
    """A Heyting homomorphism ``dom -> cod`` carried by its dual p-morphism ``cod.dual -> dom.dual``.

    The element map is preimage under the dual map.
    """

    dom: FiniteHeytingAlgebra
    cod: FiniteHeytingAlgebra
    dual_map: MonotoneMap

    def __post_init__(self):
        if self.dual_map.dom != self.cod.dual or self.dual_map.cod != self.dom.dual:
            raise AlgebraError("dual map must run from cod.dual to dom.dual")
        if not is_p_morphism(self.dual_map):
            raise AlgebraError("dual map is not a p-morphism")

    def __call__(self, a: int) -> int:
        return self.dual_map.preimage(a)

    def image(self, elems: Iterable[int]) -> frozenset[int]:
        return frozenset(self(a) for a in elems)

    def is_injective(self) -> bool:
        return self.dual_map.is_surjective()

    def table(self) -> list[int]:
        return [self.cod.index[self(a)] for a in self.dom.elements]

    def then(self, other: "AlgebraMap") -> "AlgebraMap":
        """``other`` after ``self``."""
        return AlgebraMap(self.dom, other.cod, other.dual_map.then(self.dual_map))

    @classmethod
    def identity(cls, A: FiniteHeytingAlgebra) -> "AlgebraMap":
        return cls(A, A, MonotoneMap.identity(A.dual))

    @classmethod
    def from_assignment(cls, dom: FiniteHeytingAlgebra, cod: FiniteHeytingAlgebra, assign) -> "AlgebraMap":
        """Build from an element assignment (dict or list over ``dom.elements``), checking it."""
        if not isinstance(assign, dict):
            assign = dict(zip(dom.elements, assign))
        if not is_homomorphism(dom, cod, assign):
            raise AlgebraError("assignment is not a Heyting homomorphism")
        image = []
        for q in range(cod.dual.size):
            m = dom.one
            for a in dom.elements:
                if assign[a] >> q & 1:
                    m &= a
            pts = [p for p in range(dom.dual.size) if dom.dual.up[p] == m]
            if len(pts) != 1:
                raise AlgebraError("assignment does not induce a dual map")
            image.append(pts[0])
        return cls(dom, cod, MonotoneMap(cod.dual, dom.dual, tuple(image)))


def is_homomorphism(dom: FiniteHeytingAlgebra, cod: FiniteHeytingAlgebra, assign: dict[int, int]) -> bool:
    """Table-driven check that ``assign`` preserves 0, 1, meet, join and implication."""
    el = dom.elements
    if set(assign) != set(el) or not all(cod.is_element(v) for v in assign.values()):
        return False
    if assign[0] != 0 or assign[dom.one] != cod.one:
        return False
    for a in el:
        for b in el:
            if assign[a & b] != assign[a] & assign[b]:
                return False
            if assign[a | b] != assign[a] | assign[b]:
                return False
            if assign[dom.imp(a, b)] != cod.imp(assign[a], assign[b]):
                return False
    return True


def enumerate_embeddings(B: FiniteHeytingAlgebra, A: FiniteHeytingAlgebra) -> list[AlgebraMap]:
    """All embeddings ``B -> A``, found as surjective p-morphisms ``A.dual -> B.dual``."""
    return [AlgebraMap(B, A, f) for f in p_morphisms(A.dual, B.dual, surjective=True)]


# subalgebras


def _correct_partition(P: FinitePoset, S: Sequence[int]) -> list[int]:
    """Coarsest forward bisimulation of ``P`` refining membership in each set of ``S``.

    Classes are numbered by first occurrence, so the result is deterministic.
    """
    keys: list = [tuple(s >> x & 1 for s in S) for x in range(P.size)]
    count = -1
    while True:
        ids: dict = {}
        cls = [ids.setdefault(k, len(ids)) for k in keys]
        if len(ids) == count:
            return cls
        count = len(ids)
        keys = [(cls[x], frozenset(cls[y] for y in members(P.up[x]))) for x in range(P.size)]


def _quotient(P: FinitePoset, cls: Sequence[int]) -> tuple[FinitePoset, list[int]]:
    """Quotient poset of a correct partition, and the point mask of each class."""
    k = max(cls, default=-1) + 1
    rep: dict[int, int] = {}
    block = [0] * k
    for x, c in enumerate(cls):
        rep.setdefault(c, x)
        block[c] |= 1 << x
    up = tuple(mask_of(cls[y] for y in members(P.up[rep[c]])) for c in range(k))
    return FinitePoset(k, up), block


def generator_partition(A: FiniteHeytingAlgebra, S: Iterable[int]) -> list[int]:
    """Class of each dual point for the subalgebra generated by ``S``."""
    S = sorted(set(S))
    for s in S:
        if not A.is_element(s):
            raise AlgebraError(f"{s} is not an element")
    return _correct_partition(A.dual, S)


def is_saturated(cls: Sequence[int], mask: int) -> bool:
    """Whether ``mask`` is a union of classes; for an up-set, membership in the subalgebra."""
    seen: dict[int, int] = {}
    for x, c in enumerate(cls):
        v = mask >> x & 1
        if seen.setdefault(c, v) != v:
            return False
    return True


def closure(A: FiniteHeytingAlgebra, S: Iterable[int]) -> frozenset[int]:
    """Least subset containing ``S``, 0 and 1 closed under meet, join and implication.

    Computed on the dual: the generated subalgebra consists of the up-sets
    that are unions of classes of the coarsest correct partition separating
    the generators.
    """
    Q, block = _quotient(A.dual, generator_partition(A, S))
    out = set()
    for u in upset_masks(Q):
        m = 0
        for c in members(u):
            m |= block[c]
        out.add(m)
    return frozenset(out)


def generated_subalgebra(A: FiniteHeytingAlgebra, S: Iterable[int]) -> tuple[FiniteHeytingAlgebra, AlgebraMap]:
    """The subalgebra generated by ``S`` as an algebra of its own, without listing its elements."""
    cls = generator_partition(A, S)
    Q, _ = _quotient(A.dual, cls)
    B = FiniteHeytingAlgebra(Q)
    return B, AlgebraMap(B, A, MonotoneMap(A.dual, Q, tuple(cls)))


def is_closed(A: FiniteHeytingAlgebra, S: Iterable[int]) -> bool:
    S = set(S)
    if 0 not in S or A.one not in S or not all(A.is_element(s) for s in S):
        return False
    return closure(A, S) == S


def subalgebra(A: FiniteHeytingAlgebra, elems: Iterable[int]) -> tuple[FiniteHeytingAlgebra, AlgebraMap]:
    """Represent a closed subset as an algebra of its own, with the inclusion map.

    The dual of a subalgebra is the image of ``A.dual`` under
    ``x -> {e : x in e}``; points are these membership signatures ordered by
    inclusion.
    """
    el = sorted(set(elems), key=canonical_key)
    if not is_closed(A, el):
        raise AlgebraError("not a subalgebra")
    sigs = [mask_of(i for i, e in enumerate(el) if e >> x & 1) for x in range(A.dual.size)]
    distinct = sorted(set(sigs), key=canonical_key)
    pos = {s: i for i, s in enumerate(distinct)}
    up = tuple(mask_of(j for j, t in enumerate(distinct) if s & ~t == 0) for s in distinct)
    B = FiniteHeytingAlgebra(FinitePoset(len(distinct), up))
    inc = AlgebraMap(B, A, MonotoneMap(A.dual, B.dual, tuple(pos[s] for s in sigs)))
    return B, inc


def preimage_table(inc: AlgebraMap) -> dict[int, int]:
    """For an embedding, map each image element back to its source element."""
    return {inc(b): b for b in inc.dom.elements}


# quantifier-free types


def pair_closure(A: FiniteHeytingAlgebra, s: Sequence[int], B: FiniteHeytingAlgebra, t: Sequence[int]):
    """Try to extend ``s[i] -> t[i]`` to an isomorphism ``<s> -> <t>``.

    Closes the set of pairs under the operations componentwise; returns the
    resulting dict, or ``None`` as soon as the relation stops being a bijection.
    """
    if len(s) != len(t):
        raise AlgebraError("tuples must have equal length")
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    frontier = []

    def add(a, b):
        if a in fwd:
            return fwd[a] == b
        if b in bwd:
            return False
        fwd[a] = b
        bwd[b] = a
        frontier.append((a, b))
        return True

    for a, b in [(0, 0), (A.one, B.one), *zip(s, t)]:
        if not add(a, b):
            return None
    while frontier:
        batch, frontier[:] = list(frontier), []
        for a, b in batch:
            for c, d in list(fwd.items()):
                for x, y in (
                    (a & c, b & d),
                    (a | c, b | d),
                    (A.imp(a, c), B.imp(b, d)),
                    (A.imp(c, a), B.imp(d, b)),
                ):
                    if not add(x, y):
                        return None
    return fwd


def same_qf_type(A, s, B, t) -> bool:
    return pair_closure(A, s, B, t) is not None


def qf_type_equal(A: FiniteHeytingAlgebra, s: Sequence[int], t: Sequence[int]) -> bool:
    return pair_closure(A, s, A, t) is not None


# interior algebras


class InteriorAlgebra:
    """Boolean algebra of subsets of ``universe`` with an interior operator.

    ``interior`` is either a callable on masks or a dict defined on every subset.
    """

    def __init__(self, universe: int, interior, base: FinitePoset | None = None):
        self.universe = universe
        self.base = base
        self._interior = interior

    def interior(self, s: int) -> int:
        if callable(self._interior):
            return self._interior(s)
        return self._interior[s]

    @cached_property
    def elements(self) -> tuple[int, ...]:
        u = self.universe
        out = []
        s = u
        while True:
            out.append(s)
            if s == 0:
                break
            s = (s - 1) & u
        return tuple(sorted(out, key=canonical_key))

    @property
    def one(self) -> int:
        return self.universe

    def complement(self, s: int) -> int:
        return self.universe & ~s

    def opens(self) -> list[int]:
        return [s for s in self.elements if self.interior(s) == s]

    def check_axioms(self) -> dict[str, bool]:
        el = self.elements
        i = self.interior
        return {
            "intensive": all(i(s) & ~s == 0 for s in el),
            "idempotent": all(i(i(s)) == i(s) for s in el),
            "preserves_meets": all(i(a & b) == i(a) & i(b) for a in el for b in el),
            "preserves_top": i(self.universe) == self.universe,
        }


def _largest_upset_within(P: FinitePoset, region: int) -> Callable[[int], int]:
    def interior(s: int) -> int:
        return mask_of(x for x in members(s) if P.up[x] & region & ~s == 0)

    return interior


def boolean_envelope(A: FiniteHeytingAlgebra) -> InteriorAlgebra:
    """All subsets of the dual, with the interior = largest contained up-set."""
    return InteriorAlgebra(A.one, _largest_upset_within(A.dual, A.one), A.dual)


def relativize(P: FinitePoset, Y: int) -> InteriorAlgebra:
    """Subsets of ``Y`` with interior relative to the induced order on ``Y``.

    ``Y`` need not be an up-set.
    """
    return InteriorAlgebra(Y, _largest_upset_within(P, Y), P)


def skeletal_check(I: InteriorAlgebra) -> bool:
    """Whether the Boolean closure of the open elements is the whole carrier."""
    seen = set(I.opens()) | {0, I.universe}
    frontier = list(seen)
    while frontier:
        new = []
        done = list(seen)
        for a in frontier:
            cands = [I.complement(a)]
            for b in done:
                cands += [a & b, a | b]
            for c in cands:
                if c not in seen:
                    seen.add(c)
                    new.append(c)
        frontier = new
    return len(seen) == len(I.elements)


def non_skeletal_fixture() -> InteriorAlgebra:
    """Powerset of a 2-point set whose only open elements are 0 and 1."""
    table = {0: 0, 1: 0, 2: 0, 3: 3}
    return InteriorAlgebra(3, table)
