"""Command-line interface.  Every command writes one JSON (or DOT) artifact.

Exit status: 0 success, 1 a verification failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .errors import HeytlabError
from .posets import max_poset_size

MAX_DEPTH = 6
MAX_STEPS = 64


class UsageError(Exception):
    pass


def _bounded(name: str, value: int, lo: int, hi: int) -> int:
    if not lo <= value <= hi:
        raise UsageError(f"{name} must be between {lo} and {hi}, got {value}")
    return value


def _emit(args, doc=None, text: str | None = None) -> None:
    out = text if text is not None else io.dumps(doc)
    if args.output:
        io.write_atomic(args.output, out)
    else:
        sys.stdout.write(out)


# commands


def cmd_posets_enum(args) -> int:
    from .posets import enumerate_posets, poset_counts

    n = _bounded("--max", args.max, 1, max_poset_size())
    cat = enumerate_posets(n)
    _emit(args, {"counts": poset_counts(n), "posets": [io.poset_to_doc(P) for P in cat]})
    return 0


def cmd_ha_dual(args) -> int:
    from .heyting import prime_filters

    A, masks = io.algebra_from_doc(io.load_json(args.input))
    index = {m: i for i, m in enumerate(masks)}
    filters = [sorted(index[a] for a in F) for F in prime_filters(A)]
    _emit(args, {"elements": A.size, "dual": io.poset_to_doc(A.dual), "prime_filters": filters})
    return 0


def cmd_ha_embed(args) -> int:
    from .heyting import enumerate_embeddings

    B, mb = io.algebra_from_doc(io.load_json(args.source))
    A, ma = io.algebra_from_doc(io.load_json(args.target))
    index = {m: i for i, m in enumerate(ma)}
    embs = [[index[f(b)] for b in mb] for f in enumerate_embeddings(B, A)]
    _emit(args, {"count": len(embs), "embeddings": embs})
    return 0


def cmd_amalgamate(args) -> int:
    from .amalgamation import complete_superamalgam, is_normal, normalize

    d = io.amalgam_from_doc(io.load_json(args.input))
    if not is_normal(d):
        d = normalize(d)
    c = complete_superamalgam(d, mode=args.indep_mode, strategy=args.strategy, search_bound=args.search_bound)
    _emit(args, io.completion_to_doc(c))
    return 0 if c.certificate.ok else 1


def cmd_indep_check(args) -> int:
    from .amalgamation import finite_subset_independence

    doc = io.load_json(args.input)
    if not isinstance(doc, dict) or "algebra" not in doc:
        raise io.DocumentError("independence document needs 'algebra', 'S1', 'S0', 'S2'")
    A, masks = io.algebra_from_doc(doc["algebra"])
    try:
        S = {k: [masks[i] for i in doc.get(k, [])] for k in ("S1", "S0", "S2")}
    except (IndexError, TypeError) as e:
        raise io.DocumentError("element index out of range") from e
    v = finite_subset_independence(A, S["S1"], S["S0"], S["S2"], args.indep_mode)
    _emit(args, {"independent": v, "mode": args.indep_mode})
    if args.expect is None:
        return 0
    return 0 if v == (args.expect == "true") else 1


def cmd_chain_build(args) -> int:
    from .limit import build_chain

    _bounded("--steps", args.steps, 1, MAX_STEPS)
    _bounded("--catalog-bound", args.catalog_bound, 1, max_poset_size())
    stages = build_chain(args.steps, args.catalog_bound, seed=args.seed, max_dual=args.max_dual)
    _emit(args, io.chain_to_doc(stages))
    return 0


def cmd_demo_tree(args) -> int:
    from .limit import trans_tree

    _bounded("--depth", args.depth, 1, MAX_DEPTH)
    marked = tuple(args.marked) if args.marked else None
    res = trans_tree(args.depth, marked=marked)
    _emit(args, io.tree_to_doc(res))
    return 0 if res.coherent and res.distinct else 1


def cmd_demo_split(args) -> int:
    from .heyting import from_poset
    from .limit import ChainStage, certify_split, split_upset
    from .posets import FinitePoset, mask_of

    P = io.poset_from_doc(io.load_json(args.input)) if args.input else FinitePoset.chain(2)
    st = ChainStage(0, from_poset(P))
    Y = mask_of(args.upset) if args.upset else P.full
    if not P.is_upset(Y) or not Y:
        raise UsageError("--upset must list the points of a nonempty up-set")
    steps = []
    ok = True
    for _ in range(_bounded("--nested", args.nested, 1, 8)):
        new, U, V = split_upset(st, Y)
        cert = certify_split(st, new, Y, U, V)
        ok &= all(cert.values())
        steps.append({"stage": new.index, "dual": io.poset_to_doc(new.algebra.dual), "Y": Y, "U": U, "V": V, "certificate": cert})
        st, Y = new, U
    _emit(args, {"splits": steps, "ok": ok})
    return 0 if ok else 1


def cmd_demo_swap(args) -> int:
    from .suite import swap_fixtures

    w, info = swap_fixtures()[args.fixture]
    doc = {
        "fixture": args.fixture,
        "stage_dual": io.poset_to_doc(w.stage.algebra.dual),
        "U": w.U,
        "V": w.V,
        "V_prime": w.V_prime,
        "sigma": list(w.sigma),
        "rounds": w.rounds,
        "checks": w.checks,
    }
    _emit(args, doc)
    return 0 if all(w.checks.values()) else 1


def cmd_demo_eppa(args) -> int:
    from .heyting import boolean_algebra, chain_algebra
    from .groups import eppa_refute
    from .limit import ChainStage, PartialIsomorphism

    bound = _bounded("--bound", args.bound, 1, max_poset_size())
    if args.example == "chain":
        B = chain_algebra(4)
        gens = {B.elements[1]: B.elements[2]}
    else:
        B = boolean_algebra(3)
        gens = {1: 2}
    res = eppa_refute(B, PartialIsomorphism.generated(ChainStage(0, B), gens), bound, search=not args.no_search)
    doc = res.report.as_dict()
    doc["verdict"] = res.verdict
    doc["witnesses"] = res.witnesses[: args.max_witnesses]
    doc["witness_count"] = len(res.witnesses)
    _emit(args, doc)
    return 0 if res.agree else 1


def cmd_demo_wei(args) -> int:
    from .groups import wei_demo

    rep = wei_demo()
    if args.text:
        _emit(args, text=rep.render_text() + "\n")
    else:
        _emit(args, rep.as_dict())
    return 0 if rep.ok else 1


def cmd_check(args) -> int:
    from .suite import check_suite

    rep = check_suite(args.level, seed=args.seed, inject_fault=args.inject_fault)
    if args.text:
        _emit(args, text=rep.render_text() + "\n")
    else:
        _emit(args, rep.as_dict())
    return 0 if rep.ok else 1


def cmd_export_dot(args) -> int:
    doc = io.load_json(args.input)
    if isinstance(doc, dict) and "stages" in doc:
        from .heyting import FiniteHeytingAlgebra
        from .limit import ChainStage
        from .heyting import AlgebraMap
        from .posets import MonotoneMap

        stages = []
        for k, s in enumerate(doc["stages"]):
            A = FiniteHeytingAlgebra(io.poset_from_doc(s["dual"]))
            link = None
            if s.get("link") is not None:
                link = AlgebraMap(stages[-1].algebra, A, MonotoneMap(A.dual, stages[-1].algebra.dual, tuple(s["link"])))
            stages.append(ChainStage(s.get("index", k), A, link))
        _emit(args, text=io.chain_to_dot(stages))
    else:
        P = io.poset_from_doc(doc["poset"] if isinstance(doc, dict) and "poset" in doc else doc)
        _emit(args, text=io.poset_to_dot(P))
    return 0


# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heytlab", description="Finite Heyting algebras, their duals and amalgams.")
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn, help_):
        q = parent.add_parser(name, help=help_)
        q.add_argument("-o", "--output", help="write here instead of stdout")
        q.add_argument("--seed", type=int, default=0, help="tie-breaking seed")
        q.set_defaults(fn=fn)
        return q

    def group(name, help_):
        return sub.add_parser(name, help=help_).add_subparsers(dest="action", required=True)

    posets = group("posets", "poset catalog")
    q = leaf(posets, "enum", cmd_posets_enum, "enumerate posets up to isomorphism")
    q.add_argument("--max", type=int, required=True)

    ha = group("ha", "single algebras")
    q = leaf(ha, "dual", cmd_ha_dual, "prime filters and dual poset")
    q.add_argument("--input", required=True)
    q = leaf(ha, "embed", cmd_ha_embed, "all embeddings of one algebra into another")
    q.add_argument("--source", required=True)
    q.add_argument("--target", required=True)

    q = leaf(sub, "amalgamate", cmd_amalgamate, "complete a lower amalgam")
    q.add_argument("--input", required=True)
    q.add_argument("--indep-mode", choices=("conjunction", "disjunction"), default="conjunction")
    q.add_argument("--strategy", choices=("pullback", "search"), default="pullback")
    q.add_argument("--search-bound", type=int, default=9)

    indep = group("indep", "independence")
    q = leaf(indep, "check", cmd_indep_check, "S1 independent from S2 over S0")
    q.add_argument("--input", required=True)
    q.add_argument("--indep-mode", choices=("conjunction", "disjunction"), default="conjunction")
    q.add_argument("--expect", choices=("true", "false"))

    chain = group("chain", "chains of finite algebras")
    q = leaf(chain, "build", cmd_chain_build, "grow a chain")
    q.add_argument("--steps", type=int, default=6)
    q.add_argument("--catalog-bound", type=int, default=2)
    q.add_argument("--max-dual", type=int, default=64)

    demo = group("demo", "demonstrators")
    q = leaf(demo, "tree", cmd_demo_tree, "binary tree of coherent isomorphisms")
    q.add_argument("--depth", type=int, default=3)
    q.add_argument("--marked", type=int, nargs="*", help="dual points of the 4-chain to track")
    q = leaf(demo, "split", cmd_demo_split, "split an up-set into two")
    q.add_argument("--input", help="poset document (default: 2-chain)")
    q.add_argument("--upset", type=int, nargs="*", help="points of the up-set (default: all)")
    q.add_argument("--nested", type=int, default=1)
    q = leaf(demo, "swap", cmd_demo_swap, "swap two independent up-sets")
    q.add_argument("--fixture", choices=("six_element", "grid"), default="six_element")
    q = leaf(demo, "eppa", cmd_demo_eppa, "extend a partial automorphism, or refute it")
    q.add_argument("--example", choices=("chain", "boolean"), default="chain")
    q.add_argument("--bound", type=int, default=6)
    q.add_argument("--no-search", action="store_true")
    q.add_argument("--max-witnesses", type=int, default=5)
    q = leaf(demo, "wei", cmd_demo_wei, "finite checks in the 8-element Boolean algebra")
    q.add_argument("--text", action="store_true")

    q = leaf(sub, "check", cmd_check, "run the invariant suites")
    q.add_argument("--level", choices=("quick", "full"), default="quick")
    q.add_argument("--inject-fault", choices=("skeletal",))
    q.add_argument("--text", action="store_true")

    export = group("export", "export")
    q = leaf(export, "dot", cmd_export_dot, "DOT for a poset or a chain document")
    q.add_argument("--input", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, io.DocumentError, FileNotFoundError, IsADirectoryError) as e:
        print(f"heytlab: {e}", file=sys.stderr)
        return 2
    except HeytlabError as e:
        print(f"heytlab: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
