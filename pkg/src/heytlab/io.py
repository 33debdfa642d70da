"""JSON documents, DOT export and atomic file writes."""
from __future__ import annotations

import json
import os
import tempfile
from typing import Sequence

from .errors import AlgebraError, HeytlabError, PosetError
from .heyting import AlgebraMap, FiniteHeytingAlgebra, TableAlgebra
from .posets import FinitePoset


class DocumentError(HeytlabError, ValueError):
    pass


def _require(doc, keys: Sequence[str], what: str) -> None:
    if not isinstance(doc, dict):
        raise DocumentError(f"{what} document must be an object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise DocumentError(f"{what} document lacks {', '.join(missing)}")


# posets


def poset_to_doc(P: FinitePoset) -> dict:
    return {"points": P.size, "leq": [list(p) for p in P.relations()]}


def poset_from_doc(doc) -> FinitePoset:
    _require(doc, ("points", "leq"), "poset")
    n = doc["points"]
    if not isinstance(n, int) or n < 0:
        raise DocumentError("points must be a non-negative integer")
    pairs = doc["leq"]
    if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
        raise DocumentError("leq must be a list of pairs")
    try:
        return FinitePoset.from_pairs(n, [tuple(p) for p in pairs])
    except PosetError as e:
        raise DocumentError(str(e)) from e


# algebras


def algebra_to_doc(A: FiniteHeytingAlgebra) -> dict:
    return {"poset": poset_to_doc(A.dual)}


def algebra_from_doc(doc) -> tuple[FiniteHeytingAlgebra, list[int]]:
    """The algebra and the element mask of each index used by the document.

    With a ``poset`` the indices follow the canonical element order; with
    ``tables`` they are the table indices.
    """
    if not isinstance(doc, dict):
        raise DocumentError("algebra document must be an object")
    if "poset" in doc:
        A = FiniteHeytingAlgebra(poset_from_doc(doc["poset"]))
        return A, list(A.elements)
    if "tables" in doc:
        t = doc["tables"]
        _require(t, ("meet", "join", "imp", "zero", "one"), "tables")
        freeze = lambda T: tuple(tuple(r) for r in T)
        try:
            T = TableAlgebra(len(t["meet"]), freeze(t["meet"]), freeze(t["join"]), freeze(t["imp"]), t["zero"], t["one"])
            return T.to_algebra()
        except (AlgebraError, TypeError, IndexError) as e:
            raise DocumentError(f"invalid tables: {e}") from e
    raise DocumentError("algebra document needs 'poset' or 'tables'")


def map_to_doc(f: AlgebraMap) -> list[int]:
    return f.table()


def map_from_doc(dom, dom_masks, cod, cod_masks, table) -> AlgebraMap:
    if not isinstance(table, list) or len(table) != len(dom_masks):
        raise DocumentError("a map must list one target index per source element")
    try:
        assign = {dom_masks[i]: cod_masks[j] for i, j in enumerate(table)}
    except (IndexError, TypeError) as e:
        raise DocumentError("map index out of range") from e
    try:
        return AlgebraMap.from_assignment(dom, cod, assign)
    except AlgebraError as e:
        raise DocumentError(str(e)) from e


def amalgam_from_doc(doc):
    from .amalgamation import LowerAmalgam

    _require(doc, ("A0", "A1", "A2", "i1", "i2"), "amalgam")
    A0, m0 = algebra_from_doc(doc["A0"])
    A1, m1 = algebra_from_doc(doc["A1"])
    A2, m2 = algebra_from_doc(doc["A2"])
    i1 = map_from_doc(A0, m0, A1, m1, doc["i1"])
    i2 = map_from_doc(A0, m0, A2, m2, doc["i2"])
    try:
        return LowerAmalgam(A0, A1, A2, i1, i2)
    except AlgebraError as e:
        raise DocumentError(str(e)) from e


def amalgam_to_doc(d) -> dict:
    return {
        "A0": algebra_to_doc(d.A0),
        "A1": algebra_to_doc(d.A1),
        "A2": algebra_to_doc(d.A2),
        "i1": map_to_doc(d.i1),
        "i2": map_to_doc(d.i2),
    }


def completion_to_doc(c) -> dict:
    return {
        "elements": c.A.size,
        "algebra": algebra_to_doc(c.A),
        "e1": map_to_doc(c.e1),
        "e2": map_to_doc(c.e2),
        "strategy": c.strategy,
        "certificate": c.certificate.as_dict(),
    }


# chains and trees


def chain_to_doc(stages) -> dict:
    out = []
    for st in stages:
        out.append(
            {
                "index": st.index,
                "elements": st.algebra.size if st.algebra.dual.size <= 16 else None,
                "dual": poset_to_doc(st.algebra.dual),
                "link": None if st.link is None else list(st.link.dual_map.image),
                "log": st.log,
            }
        )
    return {"stages": out}


def tree_to_doc(res) -> dict:
    labels = []
    for rho in sorted(res.all_labels, key=lambda r: (len(r), r)):
        lab = res.all_labels[rho]
        labels.append(
            {
                "rho": rho,
                "stage": lab.stage,
                "sigma": [[a, b] for a, b in sorted(lab.sigma.items())],
                "perm": list(lab.perm),
                "b0": lab.b0,
                "b1": lab.b1,
                "d": lab.d,
                "r": lab.r,
            }
        )
    return {
        "depth": len(res.level_stages) - 1,
        "coherent": res.coherent,
        "distinct": res.distinct,
        "incoherent": res.incoherent,
        "image_points": {k: list(v) for k, v in res.image_points.items()},
        "stage_sizes": [s.algebra.dual.size for s in res.chain.stages],
        "domain_dual_sizes": [d.dual_size for d in res.domains],
        "growth": res.growth,
        "labels": labels,
    }


# DOT


def poset_to_dot(P: FinitePoset, name: str = "poset") -> str:
    """Hasse diagram; edges are covers drawn from the larger point down."""
    lines = [f"digraph {name} {{", "  rankdir=TB;"]
    for x in range(P.size):
        lines.append(f'  p{x} [label="{x}"];')
    for x, y in P.covers():
        lines.append(f"  p{y} -> p{x} [dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def chain_to_dot(stages) -> str:
    """Stage duals side by side, with dashed arrows for the dual link maps."""
    lines = ["digraph chain {", "  rankdir=TB;", "  compound=true;"]
    for st in stages:
        P = st.algebra.dual
        k = st.index
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="stage {k}";')
        for x in range(P.size):
            lines.append(f'    s{k}_{x} [label="{x}"];')
        for x, y in P.covers():
            lines.append(f"    s{k}_{y} -> s{k}_{x} [dir=none];")
        lines.append("  }")
    for st in stages:
        if st.link is None:
            continue
        for x, y in enumerate(st.link.dual_map.image):
            lines.append(f"  s{st.index}_{x} -> s{st.index - 1}_{y} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# output


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: not valid JSON ({e.msg})") from e


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file next to ``path`` and rename it into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
