"""Brute-force reference computations.

Each function here deliberately avoids the machinery it is used to check:
no refinement, no p-morphism search, no up-set enumeration.  They are only
meant for tiny inputs.
"""
from __future__ import annotations

from itertools import permutations, product

from .posets import FinitePoset


def is_order(n: int, rel: set[tuple[int, int]]) -> bool:
    for x in range(n):
        if (x, x) not in rel:
            return False
    for x, y in rel:
        if x != y and (y, x) in rel:
            return False
        for z in range(n):
            if (y, z) in rel and (x, z) not in rel:
                return False
    return True


def bruteforce_iso(P: FinitePoset, Q: FinitePoset) -> tuple[int, ...] | None:
    if P.size != Q.size:
        return None
    for perm in permutations(range(Q.size)):
        if all(P.leq(x, y) == Q.leq(perm[x], perm[y]) for x in range(P.size) for y in range(P.size)):
            return perm
    return None


def _canonical_relation(n: int, rel: frozenset) -> tuple:
    best = None
    for perm in permutations(range(n)):
        code = tuple(sorted((perm[x], perm[y]) for x, y in rel))
        if best is None or code < best:
            best = code
    return best


def count_posets_bruteforce(n: int) -> int:
    """Count unlabeled posets on ``n`` points.

    Every poset has a linear extension, so it suffices to try relations
    contained in the upper triangle ``x < y``; duplicates are removed by the
    lexicographically least relabeling.
    """
    slots = [(x, y) for x in range(n) for y in range(x + 1, n)]
    seen = set()
    for bits in product((0, 1), repeat=len(slots)):
        rel = {(x, x) for x in range(n)} | {s for s, b in zip(slots, bits) if b}
        if not is_order(n, rel):
            continue
        seen.add(_canonical_relation(n, frozenset(rel)))
    return len(seen)


def all_subsets_upsets(P: FinitePoset) -> list[int]:
    """Up-sets by scanning every subset."""
    out = []
    for m in range(1 << P.size):
        if all(not (m >> x & 1) or all(m >> y & 1 for y in range(P.size) if P.leq(x, y)) for x in range(P.size)):
            out.append(m)
    return out


def implication_by_minimum(elements: list[int], a: int, b: int) -> int:
    """``a -> b`` as the largest ``z`` with ``a & z <= b``, found by scanning."""
    cands = [z for z in elements if a & z & ~b == 0]
    best = cands[0]
    for z in cands:
        if z & ~best == 0:
            continue
        if best & ~z == 0:
            best = z
    for z in cands:
        assert z & ~best == 0, "no largest element"
    return best


def is_homomorphism_tables(dom_elems, cod_elems, assign, ops_dom, ops_cod) -> bool:
    """Check an element assignment against operation callables on both sides."""
    for name in ("meet", "join", "imp"):
        fd, fc = ops_dom[name], ops_cod[name]
        for a in dom_elems:
            for b in dom_elems:
                if assign[fd(a, b)] != fc(assign[a], assign[b]):
                    return False
    return assign[ops_dom["zero"]] == ops_cod["zero"] and assign[ops_dom["one"]] == ops_cod["one"]


def algebra_automorphisms_bruteforce(A) -> list[dict[int, int]]:
    """Bijections of the element set preserving 0, 1, meet, join and implication."""
    elems = list(A.elements)
    out = []
    n = len(elems)
    assign: dict[int, int] = {}
    used: set[int] = set()

    def consistent(a):
        for b in assign:
            for op in (A.meet, A.join, A.imp):
                r = op(a, b)
                if r in assign and assign[r] != op(assign[a], assign[b]):
                    return False
                r = op(b, a)
                if r in assign and assign[r] != op(assign[b], assign[a]):
                    return False
        return True

    def rec(i):
        if i == n:
            full = all(
                assign[op(a, b)] == op(assign[a], assign[b])
                for op in (A.meet, A.join, A.imp)
                for a in elems
                for b in elems
            )
            if full:
                out.append(dict(assign))
            return
        a = elems[i]
        for c in elems:
            if c in used:
                continue
            assign[a] = c
            used.add(c)
            if consistent(a):
                rec(i + 1)
            del assign[a]
            used.discard(c)

    rec(0)
    return out


def orbit_bruteforce(perms, mask: int) -> set[int]:
    out = set()
    for g in perms:
        m = 0
        for x in range(len(g)):
            if mask >> x & 1:
                m |= 1 << g[x]
        out.add(m)
    return out


def closure_bruteforce(A, S) -> frozenset[int]:
    """Close under meet, join and implication by repeated application."""
    seen = {0, A.one} | set(S)
    while True:
        new = {c for a in seen for b in seen for c in (a & b, a | b, A.imp(a, b))} - seen
        if not new:
            return frozenset(seen)
        seen |= new
