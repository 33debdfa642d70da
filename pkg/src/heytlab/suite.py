"""Invariant suites for every module, aggregated into one report.

Each check returns ``(ok, witness)``; the witness is small, JSON-friendly and
free of timings so reports are reproducible byte for byte.
"""
from __future__ import annotations

import random
from itertools import combinations

from .amalgamation import (
    LowerAmalgam,
    check_super_independence,
    complete_superamalgam,
    normalize,
    stationarity_check,
)
from .errors import AmalgamationError
from .groups import (
    automorphism_group,
    eppa_refute,
    orbit,
    stabilizer_pointwise,
    stabilizer_setwise,
    wei_demo,
)
from .heyting import (
    TableAlgebra,
    boolean_algebra,
    boolean_envelope,
    chain_algebra,
    closure,
    dual_poset,
    enumerate_embeddings,
    from_poset,
    is_homomorphism,
    non_skeletal_fixture,
    qf_type_equal,
    relativize,
    skeletal_check,
)
from .limit import (
    ChainStage,
    PartialIsomorphism,
    audit_extension_property,
    audit_universality,
    build_chain,
    certify_split,
    split_upset,
    swap_witness,
    trans_tree,
)
from .oracles import (
    algebra_automorphisms_bruteforce,
    count_posets_bruteforce,
    implication_by_minimum,
)
from .posets import FinitePoset, are_isomorphic, enumerate_posets, is_p_morphism, iter_upsets_within, poset_counts
from .reports import Report
from .terms import ONE, ZERO, Term, app, const, evaluate_int, translate_star, var

# unlabeled posets on 1..7 points
POSET_COUNTS = (1, 2, 5, 16, 63, 318, 2045)

LEVELS = {
    "quick": {"corpus": 4, "search_bound": 4, "depth": 2, "amalgam_dual": 2, "eppa_bound": 4, "chain_steps": 6},
    "full": {"corpus": 5, "search_bound": 9, "depth": 3, "amalgam_dual": 3, "eppa_bound": 6, "chain_steps": 6},
}


def corpus(n: int) -> list:
    return [from_poset(P) for P in enumerate_posets(n)]


# poset_core and heyting_core


def check_poset_counts(n: int):
    counts = poset_counts(n)
    recount = [count_posets_bruteforce(k) for k in range(1, n + 1)]
    return counts == list(POSET_COUNTS[:n]) == recount, counts


def check_lattice_axioms(n: int):
    fails = []
    for k, A in enumerate(corpus(n)):
        try:
            TableAlgebra.of(A).validate()
        except Exception as e:  # noqa: BLE001 - any failure is reported
            fails.append([k, str(e)])
    return not fails, {"algebras": len(corpus(n)), "failures": fails}


def check_implication_oracle(n: int):
    fails = 0
    for A in corpus(n):
        el = list(A.elements)
        fails += sum(A.imp(a, b) != implication_by_minimum(el, a, b) for a in el for b in el)
    return fails == 0, {"failures": fails}


def check_duality_round_trip(n: int):
    fails = []
    for k, P in enumerate(enumerate_posets(n)):
        A = from_poset(P)
        if are_isomorphic(dual_poset(A), P) is None:
            fails.append([k, "dual of algebra"])
            continue
        # rebuild the algebra from its tables alone, through prime filters
        T = TableAlgebra.of(A)
        B, masks = T.to_algebra()
        if are_isomorphic(B.dual, P) is None:
            fails.append([k, "algebra of dual"])
            continue
        el = A.elements
        ok = sorted(masks) == sorted(B.elements) and all(
            masks[T.meet[i][j]] == masks[i] & masks[j]
            and masks[T.join[i][j]] == masks[i] | masks[j]
            and masks[T.imp[i][j]] == B.imp(masks[i], masks[j])
            for i in range(len(el))
            for j in range(len(el))
        )
        if not ok:
            fails.append([k, "table isomorphism"])
    return not fails, {"failures": fails}


def check_embeddings(n: int):
    algs = corpus(n)
    count = bad = 0
    for B in algs:
        for A in algs:
            if B.dual.size > A.dual.size:
                continue
            for f in enumerate_embeddings(B, A):
                count += 1
                assign = {b: f(b) for b in B.elements}
                if not (
                    is_homomorphism(B, A, assign)
                    and f.is_injective()
                    and is_p_morphism(f.dual_map)
                    and f.dual_map.is_surjective()
                ):
                    bad += 1
    return bad == 0, {"embeddings": count, "failures": bad}


def check_qf_types(n: int):
    bad = 0
    for A in corpus(n):
        el = A.elements
        G = automorphism_group(A)
        eq = {(a, b): qf_type_equal(A, [a], [b]) for a in el for b in el}
        for a in el:
            bad += not eq[a, a]
            for b in el:
                bad += eq[a, b] != eq[b, a]
                for g in G:
                    bad += eq[a, b] != eq[G.act(g, a), G.act(g, b)]
                if eq[a, b]:
                    bad += sum(eq[b, c] and not eq[a, c] for c in el)
    return bad == 0, {"failures": bad}


def check_envelopes(n: int, inject_fault: str | None = None):
    fails = []
    for k, A in enumerate(corpus(n)):
        I = boolean_envelope(A)
        ax = I.check_axioms()
        if not all(ax.values()) or not skeletal_check(I):
            fails.append(k)
    if inject_fault == "skeletal":
        if not skeletal_check(non_skeletal_fixture()):
            fails.append("non-skeletal fixture")
    return not fails, {"failures": fails}


def _random_term(rng: random.Random, depth: int, const_pool) -> Term:
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.5:
            return var(rng.choice("xy"))
        if r < 0.65:
            return ONE
        if r < 0.75:
            return ZERO
        return const(rng.choice(const_pool))
    op = rng.choice(["and", "or", "not"])
    if op == "not":
        return app("not", _random_term(rng, depth - 1, const_pool))
    return app(op, _random_term(rng, depth - 1, const_pool), _random_term(rng, depth - 1, const_pool))


def check_translation(n: int, seed: int = 0, terms: int = 40):
    """Equations hold in a relativized algebra iff their translations hold in the envelope."""
    rng = random.Random(seed)
    bad = checked = 0
    for P in enumerate_posets(min(n, 3)):
        E = boolean_envelope(from_poset(P))
        for Y in range(1, 1 << P.size):
            R = relativize(P, Y)
            subs = list(R.elements)
            for _ in range(terms // 4):
                t1 = _random_term(rng, 3, subs)
                t2 = _random_term(rng, 3, subs)
                for x in subs:
                    for y in subs:
                        env = {"x": x, "y": y}
                        lhs = evaluate_int(R, t1, env) == evaluate_int(R, t2, env)
                        rhs = evaluate_int(E, translate_star(t1, Y), env) == evaluate_int(E, translate_star(t2, Y), env)
                        checked += 1
                        bad += lhs != rhs
    return bad == 0, {"instances": checked, "failures": bad}


# amalgamation


def _normal_amalgams(dual_bound: int):
    algs = corpus(dual_bound)
    for A0 in algs:
        for A1 in algs:
            e1s = enumerate_embeddings(A0, A1)
            if not e1s:
                continue
            for A2 in algs:
                for i1 in e1s:
                    for i2 in enumerate_embeddings(A0, A2):
                        yield normalize(LowerAmalgam(A0, A1, A2, i1, i2))


def check_superamalgamation(dual_bound: int, search_bound: int):
    total = failed = fallback = 0
    for d in _normal_amalgams(dual_bound):
        total += 1
        try:
            c = complete_superamalgam(d, search_bound=search_bound)
        except AmalgamationError:
            fallback += 1
            failed += 1
            continue
        fallback += c.strategy != "pullback"
        failed += not c.certificate.ok
    return failed == 0 and fallback == 0, {"amalgams": total, "failures": failed, "fallbacks": fallback}


def check_search_strategy(search_bound: int):
    C3, TWO = chain_algebra(3), chain_algebra(2)
    j = enumerate_embeddings(TWO, C3)[0]
    c = complete_superamalgam(LowerAmalgam(TWO, C3, C3, j, j), strategy="search", search_bound=search_bound)
    return c.certificate.ok, {"elements": c.A.size}


def negative_control():
    A = chain_algebra(4)
    a, b = A.elements[1], A.elements[2]
    v = check_super_independence(A, closure(A, {a}), closure(A, ()), closure(A, {b}))
    return v is False, {"verdict": v}


def _designations(A):
    el = A.elements
    for s0 in [()] + [(x,) for x in el]:
        A0 = closure(A, s0)
        for x in el:
            for y in el:
                yield closure(A, set(s0) | {x}), A0, closure(A, set(s0) | {y})


def _independence_corpus(n: int):
    algs = corpus(min(n, 3))
    C3, TWO = chain_algebra(3), chain_algebra(2)
    j = enumerate_embeddings(TWO, C3)[0]
    algs.append(complete_superamalgam(LowerAmalgam(TWO, C3, C3, j, j)).A)
    return algs


def check_independence_invariance(n: int):
    bad = checked = 0
    for A in _independence_corpus(n):
        G = automorphism_group(A)
        for A1, A0, A2 in _designations(A):
            for mode in ("conjunction", "disjunction"):
                v = check_super_independence(A, A1, A0, A2, mode)
                for g in G:
                    m = lambda S: {G.act(g, s) for s in S}
                    checked += 1
                    bad += v != check_super_independence(A, m(A1), m(A0), m(A2), mode)
    return bad == 0, {"instances": checked, "failures": bad}


def check_independence_monotone(n: int):
    bad = checked = 0
    for A in _independence_corpus(n):
        for A1, A0, A2 in _designations(A):
            if not check_super_independence(A, A1, A0, A2):
                continue
            for x in A2:
                A2p = closure(A, A0 | {x})
                checked += 1
                bad += not check_super_independence(A, A1, A0, A2p)
    return bad == 0, {"instances": checked, "failures": bad}


def check_stationarity(n: int):
    algs = corpus(min(n, 3))
    bad = checked = 0
    for A1 in algs:
        for A0 in algs[:3]:
            bases = enumerate_embeddings(A0, A1)[:2]
            for base in bases:
                for A2 in algs:
                    for inc2 in enumerate_embeddings(A0, A2)[:2]:
                        perm = tuple(reversed(range(A2.dual.size)))
                        checked += 1
                        bad += not stationarity_check(A1, base, (A2, inc2), perm)
    return bad == 0, {"instances": checked, "failures": bad}


# limit_lab


def check_chain(steps: int, catalog_bound: int = 2):
    stages = build_chain(steps, catalog_bound)
    S = stages[-1].algebra
    uni = audit_universality(S, catalog_bound)
    ext = audit_extension_property(S, catalog_bound)
    links_ok = all(st.link.is_injective() for st in stages[1:])
    totals = [st.log.get("discharged_total", 0) for st in stages[1:]]
    monotone = all(x <= y for x, y in zip(totals, totals[1:]))
    ok = not uni and not ext and links_ok and monotone
    return ok, {"stage_dual_sizes": [st.algebra.dual.size for st in stages], "missing": uni, "extension_failures": len(ext)}


def check_splits(n: int, nested: int = 3):
    total = bad = 0
    for P in enumerate_posets(n):
        st0 = ChainStage(0, from_poset(P))
        for Y in iter_upsets_within(P, P.full):
            if not Y:
                continue
            st, cur = st0, Y
            for _ in range(nested):
                new, U, V = split_upset(st, cur)
                total += 1
                bad += not all(certify_split(st, new, cur, U, V).values())
                st, cur = new, U
    return bad == 0, {"splits": total, "failures": bad}


def check_tree(depth: int):
    r = trans_tree(depth)
    ok = r.coherent and r.distinct and len(r.labels) == 2 ** depth
    return ok, {"labels": len(r.labels), "image_points": {k: list(v) for k, v in r.image_points.items()}, "incoherent": r.incoherent}


def swap_fixtures():
    C3, TWO = chain_algebra(3), chain_algebra(2)
    j = enumerate_embeddings(TWO, C3)[0]
    comp = complete_superamalgam(LowerAmalgam(TWO, C3, C3, j, j))
    u, v = comp.e1(C3.elements[1]), comp.e2(C3.elements[1])
    out = {}
    w = swap_witness(ChainStage(0, comp.A), comp.A.one, V=u)
    out["six_element"] = (w, {"V": w.V, "V_prime": w.V_prime, "expected_V_prime": v, "rounds": w.rounds})
    grid = FinitePoset.generated(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    G = from_poset(grid)
    left, right = grid.up[1], grid.up[2]
    w = swap_witness(ChainStage(0, G), G.one, V=left)
    out["grid"] = (w, {"V": w.V, "V_prime": w.V_prime, "expected_V_prime": right, "rounds": w.rounds})
    return out


def check_swaps():
    res = {}
    ok = True
    for name, (w, info) in swap_fixtures().items():
        good = all(w.checks.values()) and w.V_prime == info["expected_V_prime"] and w.rounds <= 3
        ok &= good
        res[name] = info
    return ok, res


# group_lab


def check_automorphisms(n: int):
    bad = []
    for k, A in enumerate(corpus(n)):
        G = automorphism_group(A)
        mine = sorted(tuple(sorted(G.element_map(g).items())) for g in G)
        ref = sorted(tuple(sorted(m.items())) for m in algebra_automorphisms_bruteforce(A))
        if mine != ref or not G.verify():
            bad.append(k)
    return not bad, {"failures": bad}


def check_orbit_stabilizer(n: int):
    bad = 0
    for A in corpus(n):
        G = automorphism_group(A)
        for a in A.elements:
            bad += len(orbit(G, a)) * stabilizer_pointwise(G, [a]).order != G.order
            bad += set(stabilizer_pointwise(G, [a])) != set(stabilizer_setwise(G, [a]))
        for S in combinations(A.elements, 2):
            bad += not stabilizer_pointwise(G, S).is_subgroup_of(stabilizer_setwise(G, S))
    return bad == 0, {"failures": bad}


def check_eppa(bound: int):
    A = chain_algebra(4)
    a, b = A.elements[1], A.elements[2]
    p = PartialIsomorphism.generated(ChainStage(0, A), {a: b})
    neg = eppa_refute(A, p, bound)
    B = boolean_algebra(3)
    pos = eppa_refute(B, PartialIsomorphism.generated(ChainStage(0, B), {1: 2}), bound)
    ok = neg.verdict == "refuted-for-all-sizes" and not neg.witnesses and neg.agree and pos.verdict == "extends"
    return ok, {
        "chain": {"verdict": neg.verdict, "witnesses": len(neg.witnesses), "searched": neg.searched},
        "boolean": {"verdict": pos.verdict, "witnesses": len(pos.witnesses)},
    }


def check_wei():
    rep = wei_demo()
    caveat = any(c.verdict == "caveat" for c in rep.claims)
    return rep.ok and caveat, {c.claim: c.verdict for c in rep.claims}


# the suite


def check_suite(level: str = "quick", seed: int = 0, inject_fault: str | None = None) -> Report:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {sorted(LEVELS)}")
    cfg = LEVELS[level]
    n = cfg["corpus"]
    small = min(n, 4)
    checks = [
        ("poset counts match the brute-force recount", lambda: check_poset_counts(n)),
        ("lattice laws and residuation", lambda: check_lattice_axioms(n)),
        ("implication is the largest residual", lambda: check_implication_oracle(small)),
        ("duality round trip", lambda: check_duality_round_trip(n)),
        ("embeddings re-verified", lambda: check_embeddings(min(n, 3))),
        ("qf types: equivalence, automorphism invariant", lambda: check_qf_types(min(n, 3))),
        ("envelope axioms and skeletality", lambda: check_envelopes(n, inject_fault)),
        ("relativizing translation", lambda: check_translation(n, seed)),
        ("superamalgam certificates", lambda: check_superamalgamation(cfg["amalgam_dual"], cfg["search_bound"])),
        ("search completion certified", lambda: check_search_strategy(cfg["search_bound"])),
        ("4-chain <a>, <b> not independent over 2", negative_control),
        ("independence invariant under automorphisms", lambda: check_independence_invariance(n)),
        ("independence monotone in the right side", lambda: check_independence_monotone(n)),
        ("realization stationary", lambda: check_stationarity(n)),
        ("chain audit", lambda: check_chain(cfg["chain_steps"])),
        ("splits certified, nested three times", lambda: check_splits(n)),
        ("tree labels coherent and distinct", lambda: check_tree(cfg["depth"])),
        ("swap witnesses", check_swaps),
        ("automorphisms agree with brute force", lambda: check_automorphisms(small)),
        ("orbit-stabilizer", lambda: check_orbit_stabilizer(small)),
        ("partial automorphism extension", lambda: check_eppa(cfg["eppa_bound"])),
        ("weak elimination of imaginaries, finite checks", check_wei),
    ]
    rep = Report(f"check suite ({level})")
    rep.data = {"level": level, "seed": seed, "bounds": dict(cfg), "inject_fault": inject_fault}
    for name, fn in checks:
        ok, witness = fn()
        rep.add(name, ok, witness)
    return rep
