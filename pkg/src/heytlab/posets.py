"""Finite posets, monotone maps and p-morphisms.

Points are the integers ``0..size-1``; sets of points are int bitmasks
everywhere in this package.  The order is stored as the up-closure of each
point, so ``x <= y`` iff bit ``y`` is set in ``up[x]``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import PosetError

DEFAULT_MAX_POSET_SIZE = 7


def bit(i: int) -> int:
    return 1 << i


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def canonical_key(mask: int) -> tuple[int, int]:
    """Sort key for point sets: by cardinality, then by bitmask."""
    return (mask.bit_count(), mask)


def max_poset_size() -> int:
    return int(os.environ.get("HEYTLAB_MAX_POSET_SIZE", DEFAULT_MAX_POSET_SIZE))


@dataclass(frozen=True)
class FinitePoset:
    size: int
    up: tuple[int, ...]
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.up) != self.size:
            raise PosetError(f"expected {self.size} up-closures, got {len(self.up)}")
        full = (1 << self.size) - 1
        for x, u in enumerate(self.up):
            if u & ~full:
                raise PosetError(f"point {x} relates to points outside the carrier")
            if not u >> x & 1:
                raise PosetError(f"relation is not reflexive at {x}")
            for y in members(u):
                if self.up[y] & ~u:
                    raise PosetError(f"relation is not transitive at {x} <= {y}")
                if y != x and self.up[y] >> x & 1:
                    raise PosetError(f"relation is not antisymmetric at {x}, {y}")
        if self.labels is not None and len(self.labels) != self.size:
            raise PosetError("labels must name every point")

    # construction

    @classmethod
    def from_pairs(cls, size: int, pairs: Iterable[Sequence[int]], labels=None) -> "FinitePoset":
        """Build from ``x <= y`` pairs.  Reflexive pairs are optional; no closure is taken."""
        up = [1 << x for x in range(size)]
        for x, y in pairs:
            if not (0 <= x < size and 0 <= y < size):
                raise PosetError(f"pair ({x}, {y}) out of range for {size} points")
            up[x] |= 1 << y
        return cls(size, tuple(up), None if labels is None else tuple(labels))

    @classmethod
    def generated(cls, size: int, pairs: Iterable[Sequence[int]], labels=None) -> "FinitePoset":
        """Build the reflexive-transitive closure of ``pairs``."""
        up = [1 << x for x in range(size)]
        for x, y in pairs:
            up[x] |= 1 << y
        changed = True
        while changed:
            changed = False
            for x in range(size):
                acc = up[x]
                for y in members(up[x]):
                    acc |= up[y]
                if acc != up[x]:
                    up[x] = acc
                    changed = True
        return cls(size, tuple(up), None if labels is None else tuple(labels))

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls(n, tuple(((1 << n) - 1) & ~((1 << x) - 1) for x in range(n)))

    @classmethod
    def antichain(cls, n: int) -> "FinitePoset":
        return cls(n, tuple(1 << x for x in range(n)))

    # basic queries

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def leq(self, x: int, y: int) -> bool:
        return bool(self.up[x] >> y & 1)

    @cached_property
    def down(self) -> tuple[int, ...]:
        d = [0] * self.size
        for x, u in enumerate(self.up):
            for y in members(u):
                d[y] |= 1 << x
        return tuple(d)

    def upclose(self, mask: int) -> int:
        out = 0
        for x in members(mask):
            out |= self.up[x]
        return out

    def downclose(self, mask: int) -> int:
        out = 0
        down = self.down
        for x in members(mask):
            out |= down[x]
        return out

    def is_upset(self, mask: int) -> bool:
        return self.upclose(mask) == mask

    def relations(self) -> list[tuple[int, int]]:
        """Strict comparabilities ``x < y`` in lexicographic order."""
        return [(x, y) for x in range(self.size) for y in members(self.up[x]) if y != x]

    def covers(self) -> list[tuple[int, int]]:
        out = []
        for x in range(self.size):
            strict = self.up[x] & ~(1 << x)
            for y in members(strict):
                between = strict & self.down[y] & ~(1 << y)
                if not between:
                    out.append((x, y))
        return out

    def maximal(self) -> list[int]:
        return [x for x in range(self.size) if self.up[x] == 1 << x]

    def minimal(self) -> list[int]:
        return [x for x in range(self.size) if self.down[x] == 1 << x]

    @cached_property
    def height(self) -> tuple[int, ...]:
        """Length of the longest chain ending at each point."""
        h = [0] * self.size
        for x in sorted(range(self.size), key=lambda p: self.down[p].bit_count()):
            below = self.down[x] & ~(1 << x)
            h[x] = 1 + max((h[y] for y in members(below)), default=0)
        return tuple(h)

    def top_down_order(self) -> list[int]:
        """Points ordered so that everything strictly above a point comes before it."""
        return sorted(range(self.size), key=lambda p: (self.up[p].bit_count(), p))

    def induced(self, mask: int) -> tuple["FinitePoset", tuple[int, ...]]:
        pts = tuple(members(mask))
        pos = {p: i for i, p in enumerate(pts)}
        up = tuple(mask_of(pos[q] for q in members(self.up[p] & mask)) for p in pts)
        labels = None if self.labels is None else tuple(self.labels[p] for p in pts)
        return FinitePoset(len(pts), up, labels), pts

    def disjoint_union(self, other: "FinitePoset") -> "FinitePoset":
        n = self.size
        return FinitePoset(n + other.size, self.up + tuple(u << n for u in other.up))

    def product(self, other: "FinitePoset") -> "FinitePoset":
        """Componentwise order on pairs ``(x, y)``, pair index ``x * other.size + y``."""
        m = other.size
        up = []
        for x in range(self.size):
            for y in range(other.size):
                up.append(mask_of(a * m + b for a in members(self.up[x]) for b in members(other.up[y])))
        return FinitePoset(self.size * m, tuple(up))

    def relabel(self, perm: Sequence[int]) -> "FinitePoset":
        """Isomorphic copy in which old point ``x`` becomes ``perm[x]``."""
        up = [0] * self.size
        for x in range(self.size):
            up[perm[x]] = mask_of(perm[y] for y in members(self.up[x]))
        return FinitePoset(self.size, tuple(up))

    def __repr__(self):
        return f"FinitePoset({self.size}, {self.relations()})"


# up-sets


@lru_cache(maxsize=4096)
def upset_masks(P: FinitePoset) -> tuple[int, ...]:
    """All up-sets of ``P`` as bitmasks, sorted by (cardinality, mask)."""
    order = P.top_down_order()
    out: list[int] = []

    def rec(i: int, cur: int):
        if i == len(order):
            out.append(cur)
            return
        x = order[i]
        rec(i + 1, cur)
        if P.up[x] & ~(1 << x) & ~cur == 0:
            rec(i + 1, cur | 1 << x)

    rec(0, 0)
    out.sort(key=canonical_key)
    return tuple(out)


def up_sets(P: FinitePoset) -> list[frozenset[int]]:
    return [frozenset(members(m)) for m in upset_masks(P)]


def iter_upsets_within(P: FinitePoset, within: int) -> Iterator[int]:
    """Up-sets of ``P`` contained in the up-set ``within`` (unsorted)."""
    order = [x for x in P.top_down_order() if within >> x & 1]

    def rec(i: int, cur: int):
        if i == len(order):
            yield cur
            return
        x = order[i]
        yield from rec(i + 1, cur)
        if P.up[x] & ~(1 << x) & ~cur == 0:
            yield from rec(i + 1, cur | 1 << x)

    yield from rec(0, 0)


# maps


@dataclass(frozen=True)
class MonotoneMap:
    dom: FinitePoset
    cod: FinitePoset
    image: tuple[int, ...]

    def __post_init__(self):
        if len(self.image) != self.dom.size:
            raise PosetError("map must assign every point of its domain")
        for x, fx in enumerate(self.image):
            if not 0 <= fx < self.cod.size:
                raise PosetError(f"image of {x} lies outside the codomain")
            for y in members(self.dom.up[x]):
                if not self.cod.leq(fx, self.image[y]):
                    raise PosetError(f"map is not monotone at {x} <= {y}")

    def __call__(self, x: int) -> int:
        return self.image[x]

    def preimage(self, mask: int) -> int:
        return mask_of(x for x, fx in enumerate(self.image) if mask >> fx & 1)

    def image_of(self, mask: int) -> int:
        return mask_of(self.image[x] for x in members(mask))

    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.cod.size

    @classmethod
    def identity(cls, P: FinitePoset) -> "MonotoneMap":
        return cls(P, P, tuple(range(P.size)))

    def then(self, other: "MonotoneMap") -> "MonotoneMap":
        """``other`` after ``self``."""
        return MonotoneMap(self.dom, other.cod, tuple(other.image[y] for y in self.image))


def is_p_morphism(f: MonotoneMap) -> bool:
    """Back condition: ``f(x) <= y'`` implies ``y' = f(y)`` for some ``y >= x``."""
    for x in range(f.dom.size):
        if f.image_of(f.dom.up[x]) != f.cod.up[f.image[x]]:
            return False
    return True


def p_morphisms(X: FinitePoset, Y: FinitePoset, surjective: bool = True) -> Iterator[MonotoneMap]:
    """All p-morphisms ``X -> Y`` (surjective ones by default), in lexicographic order of images.

    Points are assigned top-down, so when ``x`` is reached its strict up-set is
    already mapped and the condition ``f(up x) = up f(x)`` pins the candidates.
    """
    order = X.top_down_order()
    img = [-1] * X.size
    results: list[tuple[int, ...]] = []
    ny = Y.size

    def rec(i: int, hit: int):
        if i == len(order):
            if not surjective or hit == Y.full:
                results.append(tuple(img))
            return
        if surjective and hit.bit_count() + (len(order) - i) < ny:
            return
        x = order[i]
        above = 0
        for z in members(X.up[x] & ~(1 << x)):
            above |= 1 << img[z]
        for p in range(ny):
            if Y.up[p] == above | 1 << p:
                img[x] = p
                rec(i + 1, hit | 1 << p)
        img[x] = -1

    rec(0, 0)
    results.sort()
    for r in results:
        yield MonotoneMap(X, Y, r)


def pullback(f1: MonotoneMap, f2: MonotoneMap) -> tuple[FinitePoset, MonotoneMap, MonotoneMap]:
    """Fibre product of two surjective p-morphisms onto the same poset.

    Points are the pairs ``(x1, x2)`` with ``f1(x1) == f2(x2)``, listed
    lexicographically and ordered componentwise.  ``labels`` holds the pairs.
    """
    if f1.cod != f2.cod:
        raise PosetError("pullback needs maps into the same poset")
    for f in (f1, f2):
        if not f.is_surjective():
            raise PosetError("pullback needs surjective maps")
        if not is_p_morphism(f):
            raise PosetError("pullback needs p-morphisms")
    X1, X2 = f1.dom, f2.dom
    by_fibre: dict[int, list[int]] = {}
    for x2 in range(X2.size):
        by_fibre.setdefault(f2.image[x2], []).append(x2)
    pairs = [(x1, x2) for x1 in range(X1.size) for x2 in by_fibre.get(f1.image[x1], [])]
    index = {p: i for i, p in enumerate(pairs)}
    up = []
    for x1, x2 in pairs:
        m = 0
        for y1 in members(X1.up[x1]):
            for y2 in members(X2.up[x2]):
                j = index.get((y1, y2))
                if j is not None:
                    m |= 1 << j
        up.append(m)
    X = FinitePoset(len(pairs), tuple(up), tuple(pairs))
    p1 = MonotoneMap(X, X1, tuple(a for a, _ in pairs))
    p2 = MonotoneMap(X, X2, tuple(b for _, b in pairs))
    return X, p1, p2


def connected_components(P: FinitePoset) -> list[tuple[int, ...]]:
    parent = list(range(P.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in P.relations():
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
    comps: dict[int, list[int]] = {}
    for x in range(P.size):
        comps.setdefault(find(x), []).append(x)
    return [tuple(c) for _, c in sorted(comps.items())]


def duplicate_upset_extension(P: FinitePoset, Y: int | Iterable[int]) -> tuple[FinitePoset, MonotoneMap]:
    """Attach a fresh, unrelated copy of the up-set ``Y``; map the copy back onto ``Y``.

    Copies of the points of ``Y`` get the indices ``P.size, P.size + 1, ...``
    in increasing order of the originals.
    """
    mask = Y if isinstance(Y, int) else mask_of(Y)
    if not mask:
        raise PosetError("cannot duplicate an empty up-set")
    if not P.is_upset(mask):
        raise PosetError("duplicated set must be an up-set")
    sub, pts = P.induced(mask)
    P2 = P.disjoint_union(sub)
    f = MonotoneMap(P2, P, tuple(range(P.size)) + pts)
    return P2, f


# isomorphism


def _refined_colors(P: FinitePoset, colors: Sequence | None = None) -> tuple[int, ...]:
    base = [
        hash((colors[x] if colors is not None else 0, P.up[x].bit_count(), P.down[x].bit_count(), P.height[x]))
        for x in range(P.size)
    ]
    ncls = len(set(base))
    while True:
        new = []
        for x in range(P.size):
            ups = tuple(sorted(base[y] for y in members(P.up[x]) if y != x))
            downs = tuple(sorted(base[y] for y in members(P.down[x]) if y != x))
            new.append(hash((base[x], ups, downs)))
        k = len(set(new))
        base = new
        if k == ncls:
            return tuple(base)
        ncls = k


def isomorphisms(
    P: FinitePoset,
    Q: FinitePoset,
    p_colors: Sequence | None = None,
    q_colors: Sequence | None = None,
) -> Iterator[tuple[int, ...]]:
    """All order-isomorphisms ``P -> Q`` (respecting optional point colours).

    Backtracking over colour classes after invariant refinement; yields tuples
    ``phi`` with ``phi[x]`` the image of ``x``.
    """
    if P.size != Q.size or len(P.relations()) != len(Q.relations()):
        return
    if (p_colors is None) != (q_colors is None):
        raise ValueError("colour both posets or neither")
    cp = _refined_colors(P, p_colors)
    cq = _refined_colors(Q, q_colors)
    if sorted(cp) != sorted(cq):
        return
    classes: dict[int, list[int]] = {}
    for y, c in enumerate(cq):
        classes.setdefault(c, []).append(y)
    order = sorted(range(P.size), key=lambda x: (len(classes[cp[x]]), x))
    phi = [-1] * P.size
    used = 0

    def rec(i: int):
        nonlocal used
        if i == len(order):
            yield tuple(phi)
            return
        x = order[i]
        for y in classes[cp[x]]:
            if used >> y & 1:
                continue
            ok = True
            for j in range(i):
                x2 = order[j]
                y2 = phi[x2]
                if P.leq(x, x2) != Q.leq(y, y2) or P.leq(x2, x) != Q.leq(y2, y):
                    ok = False
                    break
            if ok:
                phi[x] = y
                used |= 1 << y
                yield from rec(i + 1)
                used &= ~(1 << y)
                phi[x] = -1

    yield from rec(0)


def are_isomorphic(P: FinitePoset, Q: FinitePoset, p_colors=None, q_colors=None) -> tuple[int, ...] | None:
    return next(isomorphisms(P, Q, p_colors, q_colors), None)


def order_automorphisms(P: FinitePoset) -> list[tuple[int, ...]]:
    return sorted(isomorphisms(P, P))


# enumeration


def _catalog_key(P: FinitePoset) -> tuple:
    return (len(P.relations()), tuple(sorted(u.bit_count() for u in P.up)), tuple(sorted(P.height)))


@lru_cache(maxsize=None)
def _posets_of_size(n: int) -> tuple[FinitePoset, ...]:
    if n == 1:
        return (FinitePoset.antichain(1),)
    reps: list[FinitePoset] = []
    buckets: dict[tuple, list[FinitePoset]] = {}
    for Q in _posets_of_size(n - 1):
        # every poset arises from a smaller one by adding a maximal point over a down-set
        for U in upset_masks(Q):
            D = Q.full & ~U
            up = tuple(u | (1 << (n - 1)) if D >> x & 1 else u for x, u in enumerate(Q.up)) + (1 << (n - 1),)
            P = FinitePoset(n, up)
            key = (_catalog_key(P), tuple(sorted(_refined_colors(P))))
            bucket = buckets.setdefault(key, [])
            if any(are_isomorphic(P, R) is not None for R in bucket):
                continue
            bucket.append(P)
            reps.append(P)
    order = sorted(range(len(reps)), key=lambda i: (_catalog_key(reps[i]), i))
    return tuple(reps[i] for i in order)


def enumerate_posets(n: int, bound: int | None = None) -> list[FinitePoset]:
    """One representative per isomorphism class of posets with 1..n points.

    Ordered by size, then by number of comparabilities and a few further
    invariants, then by discovery order.
    """
    limit = max_poset_size() if bound is None else bound
    if n < 1:
        raise PosetError("enumeration needs n >= 1")
    if n > limit:
        raise PosetError(f"enumeration bound exceeded: {n} > {limit}")
    out: list[FinitePoset] = []
    for k in range(1, n + 1):
        out.extend(_posets_of_size(k))
    return out


def poset_counts(n: int, bound: int | None = None) -> list[int]:
    cat = enumerate_posets(n, bound)
    return [sum(1 for P in cat if P.size == k) for k in range(1, n + 1)]
