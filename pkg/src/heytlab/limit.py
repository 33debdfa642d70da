"""Finite approximations of the limit: chains of finite algebras and the
constructions that move, split and swap up-sets inside them.

Every stage is a finite Heyting algebra; consecutive stages are joined by an
embedding whose dual p-morphism runs backwards.  Elements are transported
forward by taking preimages, points by choosing a preimage.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .amalgamation import (
    LowerAmalgam,
    complete_superamalgam,
    finite_subset_independence,
    independent_realization,
)
from .errors import AlgebraError, PosetError, WitnessNotFound
from .heyting import (
    AlgebraMap,
    FiniteHeytingAlgebra,
    chain_algebra,
    closure,
    enumerate_embeddings,
    from_poset,
    generated_subalgebra,
    generator_partition,
    is_closed,
    is_saturated,
    pair_closure,
    preimage_table,
    qf_type_equal,
    subalgebra,
)
from .posets import (
    FinitePoset,
    MonotoneMap,
    are_isomorphic,
    canonical_key,
    connected_components,
    duplicate_upset_extension,
    enumerate_posets,
    is_p_morphism,
    iter_upsets_within,
    mask_of,
    members,
)

TWO = chain_algebra(2)


@dataclass(frozen=True)
class ChainStage:
    index: int
    algebra: FiniteHeytingAlgebra
    link: AlgebraMap | None = None  # embedding of the previous stage
    log: dict = field(default_factory=dict, compare=False)


class Chain:
    """A growing list of stages with transport of elements and maps along the links."""

    def __init__(self, start: FiniteHeytingAlgebra | ChainStage):
        first = start if isinstance(start, ChainStage) else ChainStage(0, start, None, {"kind": "start"})
        self.stages: list[ChainStage] = [first]

    @property
    def current(self) -> ChainStage:
        return self.stages[-1]

    def __len__(self):
        return len(self.stages)

    def stage(self, index: int) -> ChainStage:
        return self.stages[index - self.stages[0].index]

    def extend(self, link: AlgebraMap, log: dict) -> ChainStage:
        if link.dom != self.current.algebra:
            raise AlgebraError("link must start at the current stage")
        if not link.is_injective():
            raise AlgebraError("links must be embeddings")
        st = ChainStage(self.current.index + 1, link.cod, link, log)
        self.stages.append(st)
        return st

    def transport(self, a: int, frm: int, to: int | None = None) -> int:
        to = self.current.index if to is None else to
        for k in range(frm + 1, to + 1):
            a = self.stage(k).link(a)
        return a

    def transport_map(self, g: AlgebraMap, frm: int, to: int | None = None) -> AlgebraMap:
        to = self.current.index if to is None else to
        for k in range(frm + 1, to + 1):
            g = g.then(self.stage(k).link)
        return g

    def composite_link(self, frm: int, to: int | None = None) -> AlgebraMap:
        return self.transport_map(AlgebraMap.identity(self.stage(frm).algebra), frm, to)


def _act(perm: Sequence[int], mask: int) -> int:
    out = 0
    for x in members(mask):
        out |= 1 << perm[x]
    return out


def _inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for x, y in enumerate(perm):
        inv[y] = x
    return tuple(inv)


def _is_automorphism(P: FinitePoset, perm: Sequence[int]) -> bool:
    if sorted(perm) != list(range(P.size)):
        return False
    return all(P.up[perm[x]] == _act(perm, P.up[x]) for x in range(P.size))


# partial isomorphisms


@dataclass(frozen=True)
class PartialIsomorphism:
    stage: ChainStage
    mapping: dict = field(hash=False)

    @property
    def dom(self) -> frozenset[int]:
        return frozenset(self.mapping)

    @property
    def cod(self) -> frozenset[int]:
        return frozenset(self.mapping.values())

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    @classmethod
    def generated(cls, stage: ChainStage, pairs: dict[int, int] | Iterable[tuple[int, int]]) -> "PartialIsomorphism":
        """Close a partial assignment to an isomorphism of generated subalgebras."""
        items = sorted(dict(pairs).items())
        A = stage.algebra
        m = pair_closure(A, [a for a, _ in items], A, [b for _, b in items])
        if m is None:
            raise AlgebraError("assignment does not extend to an isomorphism")
        return cls(stage, m)

    def is_valid(self) -> bool:
        A = self.stage.algebra
        if not (is_closed(A, self.dom) and is_closed(A, self.cod)):
            return False
        items = sorted(self.mapping.items())
        m = pair_closure(A, [a for a, _ in items], A, [b for _, b in items])
        return m == self.mapping


def _in_stage_candidates(A: FiniteHeytingAlgebra, limit: int) -> list[int]:
    out = []
    for u in iter_upsets_within(A.dual, A.one):
        out.append(u)
        if len(out) > limit:
            return []
    return sorted(out, key=canonical_key)


def extend_partial_automorphism(
    p: PartialIsomorphism, target: int, search_limit: int = 5000
) -> PartialIsomorphism:
    """One forth step: add ``target`` to the domain of ``p``.

    An image inside the current stage is used when one exists.  Otherwise the
    diagram of ``<dom, target>`` is realised over the image of ``p`` in a new
    stage (an amalgam whose arm into the old stage is ``p`` itself).  The result
    restricted to the old domain is ``p`` transported to the new stage.
    """
    st = p.stage
    A = st.algebra
    if target in p.mapping:
        return p
    if not A.is_element(target):
        raise AlgebraError("target is not an element of the stage")
    items = sorted(p.mapping.items())
    s = [a for a, _ in items]
    t = [b for _, b in items]
    for c in _in_stage_candidates(A, search_limit):
        if any((target & ~d == 0) != (c & ~pd == 0) or (d & ~target == 0) != (pd & ~c == 0) for d, pd in items):
            continue
        m = pair_closure(A, s + [target], A, t + [c])
        if m is not None:
            return PartialIsomorphism(st, m)

    B0, inc_dom = subalgebra(A, p.dom)
    D = closure(A, p.dom | {target})
    B2, inc_D = subalgebra(A, D)
    back_D = preimage_table(inc_D)
    arm1 = AlgebraMap.from_assignment(B0, A, {x: p(inc_dom(x)) for x in B0.elements})
    arm2 = AlgebraMap.from_assignment(B0, B2, {x: back_D[inc_dom(x)] for x in B0.elements})
    comp = complete_superamalgam(LowerAmalgam(B0, A, B2, arm1, arm2))
    new = ChainStage(
        st.index + 1,
        comp.A,
        comp.e1,
        {"kind": "forth-step", "certificate": comp.certificate.as_dict()},
    )
    mapping = {comp.e1(d): comp.e2(back_D[d]) for d in D}
    return PartialIsomorphism(new, mapping)


# the chain


def catalog_algebras(bound: int, seed: int = 0) -> list[FiniteHeytingAlgebra]:
    """Up-set algebras of all posets with at most ``bound`` points.

    A nonzero seed shuffles the items of equal dual size.
    """
    posets = enumerate_posets(bound)
    if seed:
        rng = random.Random(seed)
        groups: dict[int, list[FinitePoset]] = {}
        for P in posets:
            groups.setdefault(P.size, []).append(P)
        posets = []
        for k in sorted(groups):
            g = groups[k]
            rng.shuffle(g)
            posets.extend(g)
    return [from_poset(P) for P in posets]


def catalog_pairs(catalog: list[FiniteHeytingAlgebra]) -> list[tuple[int, int, AlgebraMap]]:
    """Every embedding between catalog members, as ``(source, target, embedding)``."""
    out = []
    for bi, B in enumerate(catalog):
        for ci, C in enumerate(catalog):
            for j in enumerate_embeddings(B, C):
                out.append((bi, ci, j))
    return out


def find_extension(j: AlgebraMap, g: AlgebraMap, S: FiniteHeytingAlgebra) -> AlgebraMap | None:
    """An embedding ``h: C -> S`` with ``h o j == g``, if there is one."""
    B = j.dom
    for h in enumerate_embeddings(j.cod, S):
        if all(h(j(b)) == g(b) for b in B.elements):
            return h
    return None


@dataclass
class _Obligation:
    pair: int
    stage: int
    emb: AlgebraMap


def build_chain(
    steps: int,
    catalog_bound: int = 2,
    seed: int = 0,
    start: FiniteHeytingAlgebra | None = None,
    max_dual: int = 64,
) -> list[ChainStage]:
    """Grow a chain alternating universality and one-point homogeneity steps.

    A universality step embeds the next catalog algebra that does not yet
    embed, by amalgamating over the 2-element algebra.  A homogeneity step
    takes the oldest pending obligation ``(B -> C, g: B -> stage)`` and, unless
    ``g`` already extends, amalgamates the stage with ``C`` over ``B``.
    Pending obligations are carried in the log of each stage.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    chain = Chain(start or TWO)
    catalog = catalog_algebras(catalog_bound, seed)
    pairs = catalog_pairs(catalog)
    queue: deque[_Obligation] = deque()
    pointer = 0
    discharged = 0

    def enqueue(stage: ChainStage):
        pending = {
            (ob.pair, chain.transport_map(ob.emb, ob.stage, stage.index).dual_map.image) for ob in queue
        }
        for pi, (bi, ci, j) in enumerate(pairs):
            for g in enumerate_embeddings(catalog[bi], stage.algebra):
                if (pi, g.dual_map.image) in pending:
                    continue
                if find_extension(j, g, stage.algebra) is None:
                    queue.append(_Obligation(pi, stage.index, g))

    def universality(log) -> AlgebraMap | None:
        nonlocal pointer, discharged
        S = chain.current.algebra
        while pointer < len(catalog):
            C = catalog[pointer]
            if enumerate_embeddings(C, S):
                log["discharged"].append({"kind": "universality", "item": pointer, "by": "existing"})
                discharged += 1
                pointer += 1
                continue
            d = LowerAmalgam(TWO, S, C, enumerate_embeddings(TWO, S)[0], enumerate_embeddings(TWO, C)[0])
            comp = complete_superamalgam(d)
            if comp.A.dual.size > max_dual:
                log["notes"].append(f"universality for item {pointer} deferred: dual would have {comp.A.dual.size} points")
                return None
            log["discharged"].append({"kind": "universality", "item": pointer, "by": "amalgam"})
            discharged += 1
            pointer += 1
            return comp.e1
        return None

    def homogeneity(log) -> AlgebraMap | None:
        nonlocal discharged
        S = chain.current.algebra
        while queue:
            ob = queue[0]
            bi, ci, j = pairs[ob.pair]
            g = chain.transport_map(ob.emb, ob.stage)
            if find_extension(j, g, S) is not None:
                queue.popleft()
                log["discharged"].append({"kind": "homogeneity", "pair": ob.pair, "from_stage": ob.stage, "by": "existing"})
                discharged += 1
                continue
            comp = complete_superamalgam(LowerAmalgam(catalog[bi], S, catalog[ci], g, j))
            if comp.A.dual.size > max_dual:
                log["notes"].append(f"obligation for pair {ob.pair} deferred: dual would have {comp.A.dual.size} points")
                return None
            queue.popleft()
            log["discharged"].append({"kind": "homogeneity", "pair": ob.pair, "from_stage": ob.stage, "by": "amalgam"})
            discharged += 1
            return comp.e1
        return None

    enqueue(chain.current)
    for k in range(1, steps + 1):
        kind = "universality" if k % 2 == 1 else "homogeneity"
        log = {"kind": kind, "discharged": [], "notes": []}
        first, second = (universality, homogeneity) if kind == "universality" else (homogeneity, universality)
        link = first(log)
        if link is None:
            link = second(log)
        if link is None:
            link = AlgebraMap.identity(chain.current.algebra)
            log["notes"].append("nothing to do")
        st = chain.extend(link, log)
        enqueue(st)
        log["pending"] = len(queue)
        log["discharged_total"] = discharged
        log["catalog_done"] = pointer
    return chain.stages


def audit_universality(S: FiniteHeytingAlgebra, catalog_bound: int) -> list[int]:
    """Catalog positions of algebras that do not embed into ``S``."""
    return [i for i, C in enumerate(catalog_algebras(catalog_bound)) if not enumerate_embeddings(C, S)]


def audit_extension_property(S: FiniteHeytingAlgebra, catalog_bound: int) -> list[tuple[int, tuple]]:
    """Failures of the one-point extension property for catalog pairs, as ``(pair, g)``."""
    catalog = catalog_algebras(catalog_bound)
    fails = []
    for pi, (bi, ci, j) in enumerate(catalog_pairs(catalog)):
        for g in enumerate_embeddings(catalog[bi], S):
            if find_extension(j, g, S) is None:
                fails.append((pi, g.dual_map.image))
    return fails


# splitting up-sets


def split_upset(stage: ChainStage, Y: int) -> tuple[ChainStage, int, int]:
    """Split the up-set ``Y`` into two disjoint nonempty up-sets.

    A disconnected ``Y`` is split along its first component in place;
    otherwise the stage grows by a detached copy of ``Y`` and the split is
    original part versus copy.
    """
    P = stage.algebra.dual
    if not Y:
        raise PosetError("cannot split the empty up-set")
    if not P.is_upset(Y):
        raise PosetError("split needs an up-set")
    sub, pts = P.induced(Y)
    comps = connected_components(sub)
    if len(comps) >= 2:
        U = mask_of(pts[i] for i in comps[0])
        return stage, U, Y & ~U
    P2, f = duplicate_upset_extension(P, Y)
    S2 = from_poset(P2)
    link = AlgebraMap(stage.algebra, S2, f)
    new = ChainStage(stage.index + 1, S2, link, {"kind": "split", "upset": Y})
    return new, Y, mask_of(range(P.size, P2.size))


def certify_split(old: ChainStage, new: ChainStage, Y: int, U: int, V: int) -> dict[str, bool]:
    A = new.algebra
    Yn = Y if new is old else new.link(Y)
    surj = True if new is old else (new.link.is_injective() and is_p_morphism(new.link.dual_map))
    return {
        "disjoint": U & V == 0,
        "cover": U | V == Yn,
        "nonempty": bool(U) and bool(V),
        "upsets": A.is_element(U) and A.is_element(V),
        "dual_surjective_p_morphism": surj,
        "relative_complement": (U & V) == 0 and (U | V) == Yn,
    }


# the transitivity tree


@dataclass(frozen=True)
class Domain:
    """A subalgebra given by generators, with the dual partition it induces."""

    gens: frozenset[int]
    partition: tuple[int, ...]

    @classmethod
    def of(cls, A: FiniteHeytingAlgebra, gens: Iterable[int]) -> "Domain":
        gens = frozenset(gens) | {0, A.one}
        return cls(gens, tuple(generator_partition(A, gens)))

    def __contains__(self, a: int) -> bool:
        return is_saturated(self.partition, a)

    @property
    def dual_size(self) -> int:
        return len(set(self.partition))


@dataclass
class TreeLabel:
    """One node of the tree; maps are stored on generators of their domains."""

    rho: str
    stage: int
    sigma: dict  # on the generators of A_i
    perm: tuple[int, ...]  # automorphism of the stage's dual restricting to sigma
    b0: int | None = None
    b1: int | None = None
    d: int | None = None
    r: int | None = None
    tau: dict | None = None
    e_fwd: dict | None = None
    e_bwd: dict | None = None


@dataclass
class TreeResult:
    labels: dict[str, TreeLabel]  # strings of length depth
    all_labels: dict[str, TreeLabel]
    chain: Chain
    marked: tuple[int, ...]  # tracked points in the final stage
    image_points: dict[str, tuple[int, ...]]
    domains: list[Domain]  # A_i at the stage of level i
    level_stages: list[int]
    incoherent: list[str] = field(default_factory=list)
    growth: list[str] = field(default_factory=list)

    @property
    def coherent(self) -> bool:
        return not self.incoherent

    @property
    def distinct(self) -> bool:
        pts = list(self.image_points.values())
        return len(set(pts)) == len(pts)


def _choose_b0(X: FinitePoset, A: Domain, marked: Sequence[int]) -> int | None:
    """Least principal up-set below the first marked point, outside A, not forced by A.

    Not forced: each marked point inside it shares its A-class with a point
    outside it, so an independent copy can avoid the marked points.
    """
    cls = A.partition
    cands = sorted({X.up[w] for w in members(X.down[marked[0]])}, key=canonical_key)
    for b in cands:
        if b in A:
            continue
        if all(not b >> y & 1 or any(cls[z] == cls[y] and not b >> z & 1 for z in range(X.size)) for y in marked):
            return b
    return None


def _group_closure(A: FiniteHeytingAlgebra, gens: Iterable[int], perms: list[tuple[int, ...]]) -> Domain:
    moves = list(perms) + [_inverse(g) for g in perms]
    dom = Domain.of(A, gens)
    while True:
        new = {m for g in moves for a in dom.gens for m in (_act(g, a),) if m not in dom}
        if not new:
            return dom
        dom = Domain.of(A, dom.gens | new)


def _first_principal_outside(X: FinitePoset, D: Domain) -> int | None:
    for u in sorted(set(X.up), key=canonical_key):
        if u not in D:
            return u
    return None


def _resolve_marked(S: FiniteHeytingAlgebra, marked) -> tuple[int, ...]:
    if marked is None:
        return (S.dual.maximal()[-1],)
    if isinstance(marked, int):
        return (marked,)
    marked = tuple(marked)
    if marked and isinstance(marked[0], (set, frozenset)):
        pts = []
        for F in marked:
            m = S.one
            for a in F:
                m &= a
            p = [x for x in range(S.dual.size) if S.dual.up[x] == m]
            if len(p) != 1 or set(F) != {a for a in S.elements if a >> p[0] & 1}:
                raise AlgebraError("marked set is not a prime filter")
            pts.append(p[0])
        return tuple(pts)
    if any(not 0 <= y < S.dual.size for y in marked):
        raise AlgebraError("marked points must be dual points of the start stage")
    return marked


def trans_tree(depth: int, marked=None, start: FiniteHeytingAlgebra | None = None, max_dual: int = 4096) -> TreeResult:
    """Binary tree of coherent finite isomorphisms moving the marked points apart.

    At level ``i`` the stage is amalgamated with itself over the current
    domain ``A``; ``b0`` sits in the first copy and its twin ``b1`` in the
    second, so ``b1`` is independent from ``b0`` over ``A`` and has the same
    type.  Each automorphism ``g`` from the previous level lifts to the
    amalgam as ``g x g``; its two children are the lift and the lift composed
    with the coordinate swap (the automorphism ``tau`` exchanging ``b0`` and
    ``b1`` over ``A``).  The new domain is generated by ``A, b0, b1, d,
    e_fwd(d), e_bwd(r)`` and closed under the new automorphisms, so the next
    level can lift them again.

    ``marked`` is a point (or points, or prime filters) of the start stage.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    S0 = start or chain_algebra(4)
    chain = Chain(S0)
    Y = list(_resolve_marked(S0, marked))
    perms: dict[str, tuple[int, ...]] = {"": tuple(range(S0.dual.size))}
    A = Domain.of(S0, ())
    all_labels = {"": TreeLabel("", 0, {a: a for a in A.gens}, perms[""])}
    domains = [A]
    level_stages = [0]
    growth: list[str] = []

    for level in range(1, depth + 1):
        S = chain.current.algebra
        X = S.dual
        b0 = _choose_b0(X, A, Y)
        if b0 is None:
            # duplicate the whole dual; every automorphism lifts to both copies
            n = X.size
            X2 = X.disjoint_union(X)
            S2 = from_poset(X2)
            link = AlgebraMap(S, S2, MonotoneMap(X2, X, tuple(range(n)) * 2))
            chain.extend(link, {"kind": "tree-duplicate", "level": level})
            perms = {rho: g + tuple(n + x for x in g) for rho, g in perms.items()}
            A = Domain.of(S2, (link(a) for a in A.gens))
            S, X = S2, X2
            growth.append(f"level {level}: duplicated the stage to find an unforced b0")
            b0 = _choose_b0(X, A, Y)
            if b0 is None:
                raise WitnessNotFound(f"no unforced b0 at level {level}")

        _, inc = generated_subalgebra(S, A.gens)
        comp, e2 = independent_realization(S, inc, (S, inc))
        if not comp.certificate.ok:
            raise AlgebraError(f"self-amalgam at level {level} failed its certificate")
        Xn = comp.A.dual
        if Xn.size > max_dual:
            raise WitnessNotFound(f"stage at level {level} would have {Xn.size} points")
        pos = {pair: i for i, pair in enumerate(Xn.labels)}
        chain.extend(comp.e1, {"kind": "tree-level", "level": level, "certificate": comp.certificate.as_dict()})
        swap = tuple(pos[(x2, x1)] for (x1, x2) in Xn.labels)
        new_perms: dict[str, tuple[int, ...]] = {}
        for rho in sorted(perms):
            g = perms[rho]
            G = tuple(pos[(g[x1], g[x2])] for (x1, x2) in Xn.labels)
            new_perms[rho + "0"] = G
            new_perms[rho + "1"] = tuple(G[swap[x]] for x in range(Xn.size))
        Sn = comp.A
        cls = A.partition
        Y = [pos[(y, min(z for z in range(X.size) if cls[z] == cls[y] and not b0 >> z & 1))] for y in Y]
        b0n, b1n = comp.e1(b0), e2(b0)
        An = [comp.e1(a) for a in A.gens]

        D = Domain.of(Sn, An + [b0n, b1n])
        tau1 = {a: _act(swap, a) for a in D.gens}
        if any(v not in D for v in tau1.values()) or any(tau1[a] != a for a in An) or tau1[b0n] != b1n:
            raise AlgebraError("swap does not restrict to an automorphism of <A b0 b1>")
        tau0 = {a: a for a in D.gens}

        gens = set(D.gens)
        d = _first_principal_outside(Xn, D)
        e_fwd = {rho: {} for rho in new_perms}
        if d is not None:
            gens.add(d)
            for rho, g in new_perms.items():
                e_fwd[rho] = {a: _act(g, a) for a in gens}
            gens |= {e_fwd[rho][d] for rho in new_perms}
        r = _first_principal_outside(Xn, Domain.of(Sn, gens))
        e_bwd = {rho: {} for rho in new_perms}
        if r is not None:
            gens.add(r)
            for rho, g in new_perms.items():
                e_bwd[rho] = {a: _act(_inverse(g), a) for a in gens}
            gens |= {e_bwd[rho][r] for rho in new_perms}
        A = _group_closure(Sn, gens, list(new_perms.values()))

        for rho, g in new_perms.items():
            all_labels[rho] = TreeLabel(
                rho,
                chain.current.index,
                {a: _act(g, a) for a in A.gens},
                g,
                b0n,
                b1n,
                d,
                r,
                tau1 if rho.endswith("1") else tau0,
                e_fwd[rho],
                e_bwd[rho],
            )
        perms = new_perms
        domains.append(A)
        level_stages.append(chain.current.index)

    leaves = {rho: lab for rho, lab in all_labels.items() if len(rho) == depth}
    images = {rho: tuple(sorted(lab.perm[y] for y in Y)) for rho, lab in sorted(leaves.items())}
    incoherent = _tree_incoherence(chain, all_labels, domains, depth)
    return TreeResult(leaves, all_labels, chain, tuple(Y), images, domains, level_stages, incoherent, growth)


def _tree_incoherence(chain: Chain, labels: dict[str, TreeLabel], domains: list[Domain], depth: int) -> list[str]:
    """Labels that fail to extend their ancestors or to be automorphisms of their domain.

    Maps agreeing on generators agree on the generated subalgebra, so
    comparing on generators is enough.
    """
    bad = set()
    for rho, lab in labels.items():
        dom = domains[len(rho)]
        X = chain.stage(lab.stage).algebra.dual
        if not _is_automorphism(X, lab.perm):
            bad.add(rho)
            continue
        inv = _inverse(lab.perm)
        if any(_act(lab.perm, a) not in dom or _act(inv, a) not in dom for a in dom.gens):
            bad.add(rho)
            continue
        for k in range(len(rho)):
            anc = labels[rho[:k]]
            for a, b in anc.sigma.items():
                ta = chain.transport(a, anc.stage, lab.stage)
                if ta not in dom or _act(lab.perm, ta) != chain.transport(b, anc.stage, lab.stage):
                    bad.add(rho)
                    break
    return sorted(bad)


# swapping inside an up-set


@dataclass
class SwapResult:
    stage: ChainStage
    sigma: tuple[int, ...]  # automorphism of the stage's dual
    U: int
    V: int
    V_prime: int
    rounds: int
    checks: dict


def _relative_self_amalgam(stage: ChainStage, U: int) -> tuple[ChainStage, MonotoneMap, dict]:
    """Amalgamate the algebra of the up-set ``U`` with itself over {0, 1} and glue it back.

    Points outside ``U`` are kept; a point ``a`` outside lies below a new
    pair ``(u1, u2)`` iff it lies below both ``u1`` and ``u2``.  The dual map
    sends ``(u1, u2)`` to ``u1``.
    """
    X = stage.algebra.dual
    XU, pts = X.induced(U)
    R = from_poset(XU)
    base = enumerate_embeddings(TWO, R)[0]
    comp, _ = independent_realization(R, base, (R, base))
    P = comp.A.dual
    outside = [a for a in range(X.size) if not U >> a & 1]
    no = len(outside)
    opos = {a: i for i, a in enumerate(outside)}
    up = []
    for a in outside:
        m = mask_of(opos[b] for b in members(X.up[a]) if b in opos)
        for k, (u1, u2) in enumerate(P.labels):
            if X.leq(a, pts[u1]) and X.leq(a, pts[u2]):
                m |= 1 << (no + k)
        up.append(m)
    for k in range(P.size):
        up.append(P.up[k] << no)
    X2 = FinitePoset(no + P.size, tuple(up))
    f = MonotoneMap(X2, X, tuple(outside) + tuple(pts[u1] for u1, _ in P.labels))
    S2 = from_poset(X2)
    link = AlgebraMap(stage.algebra, S2, f)
    new = ChainStage(stage.index + 1, S2, link, {"kind": "relative-self-amalgam", "upset": U})
    copy = {"second": tuple(no + k for k in range(P.size)), "pairs": P.labels, "pts": pts}
    return new, f, copy


def _relative_independent(X: FinitePoset, U: int, V: int, W: int) -> bool:
    XU, pts = X.induced(U)
    R = from_poset(XU)
    loc = {p: i for i, p in enumerate(pts)}
    v = mask_of(loc[p] for p in members(V))
    w = mask_of(loc[p] for p in members(W))
    return finite_subset_independence(R, [v], [], [w])


def _swap_search(X: FinitePoset, U: int, V: int, W: int) -> tuple[int, ...] | None:
    c1 = [(U >> x & 1, V >> x & 1, W >> x & 1) for x in range(X.size)]
    c2 = [(U >> x & 1, W >> x & 1, V >> x & 1) for x in range(X.size)]
    return are_isomorphic(X, X, c1, c2)


def swap_witness(
    stage: ChainStage,
    U: int,
    V: int | None = None,
    V_prime: int | None = None,
    budget: int = 3,
) -> SwapResult:
    """Find an automorphism fixing ``U`` and exchanging ``V`` with a twin ``V'``.

    ``V`` defaults to the least nonempty up-set properly inside ``U``.  The
    twin is looked for in the stage first (same type as ``V``, independent
    from it inside ``U``); each further round realises a twin by amalgamating
    the algebra of ``U`` with itself and searches again.
    """
    S = stage.algebra
    X = S.dual
    if not U or not X.is_upset(U):
        raise PosetError("U must be a nonempty up-set")
    if V is None:
        inner = sorted((w for w in iter_upsets_within(X, U) if w and w != U), key=canonical_key)
        if not inner:
            stage, U0, V0 = split_upset(stage, U)
            U = U0 | V0
            V = U0
            S, X = stage.algebra, stage.algebra.dual
        else:
            V = inner[0]
    if not V or V & ~U or not X.is_upset(V) or V == U:
        raise PosetError("V must be a nonempty up-set properly inside U")
    if V_prime is not None and V_prime == V:
        return SwapResult(stage, tuple(range(X.size)), U, V, V, 0, {"degenerate": True})

    def checks(X, U, V, W, sigma):
        A = from_poset(X)
        return {
            "same_type": qf_type_equal(A, [V], [W]),
            "independent_in_U": _relative_independent(X, U, V, W),
            "automorphism": _is_automorphism(X, sigma),
            "fixes_U": _act(sigma, U) == U,
            "V_to_V_prime": _act(sigma, V) == W,
            "V_prime_to_V": _act(sigma, W) == V,
            "fixes_meet": _act(sigma, V & W) == V & W,
            "support_in_U": all(sigma[x] == x for x in range(X.size) if not U >> x & 1),
        }

    if V_prime is not None:
        cands = [V_prime]
    else:
        cands = sorted((w for w in iter_upsets_within(X, U) if w and w != V), key=canonical_key)
    for W in cands:
        if not qf_type_equal(S, [V], [W]) or not _relative_independent(X, U, V, W):
            continue
        sigma = _swap_search(X, U, V, W)
        if sigma is not None:
            return SwapResult(stage, sigma, U, V, W, 0, checks(X, U, V, W, sigma))

    cur, Uc, Vc = stage, U, V
    for rnd in range(1, budget + 1):
        new, f, copy = _relative_self_amalgam(cur, Uc)
        X2 = new.algebra.dual
        Un = new.link(Uc)
        Vn = new.link(Vc)
        pts = copy["pts"]
        W = mask_of(k for k, (u1, u2) in zip(copy["second"], copy["pairs"]) if Vc >> pts[u2] & 1)
        if qf_type_equal(new.algebra, [Vn], [W]) and _relative_independent(X2, Un, Vn, W):
            sigma = _swap_search(X2, Un, Vn, W)
            if sigma is not None:
                return SwapResult(new, sigma, Un, Vn, W, rnd, checks(X2, Un, Vn, W, sigma))
        cur, Uc, Vc = new, Un, Vn
    raise WitnessNotFound(f"no swap found within {budget} rounds")
