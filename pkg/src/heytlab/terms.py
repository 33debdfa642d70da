"""Terms over {0, 1, and, or, imp, not, int} and the relativizing translation.

Concrete syntax is prefix notation: ``(imp (and x y) 1)``.  Variables are
bare identifiers; ``0`` and ``1`` are the bounds; ``@5`` is the constant
naming the element whose point mask is 5.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import AlgebraError

ARITY = {"and": 2, "or": 2, "imp": 2, "not": 1, "int": 1}
HA_OPS = {"and", "or", "imp", "not"}


@dataclass(frozen=True)
class Term:
    op: str  # "var", "const", or a key of ARITY
    args: tuple["Term", ...] = ()
    value: object = None  # variable name, or "0" / "1" / an element mask

    def __post_init__(self):
        if self.op in ARITY:
            if len(self.args) != ARITY[self.op]:
                raise AlgebraError(f"{self.op} takes {ARITY[self.op]} arguments")
        elif self.op not in ("var", "const"):
            raise AlgebraError(f"unknown operation {self.op!r}")

    def __str__(self):
        return format_term(self)

    def uses(self, op: str) -> bool:
        return self.op == op or any(a.uses(op) for a in self.args)


def var(name: str) -> Term:
    return Term("var", value=name)


def const(value) -> Term:
    return Term("const", value=value)


ZERO = const("0")
ONE = const("1")


def app(op: str, *args: Term) -> Term:
    return Term(op, tuple(args))


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_term(text: str) -> Term:
    tokens = _TOKEN.findall(text)
    pos = 0

    def parse() -> Term:
        nonlocal pos
        if pos >= len(tokens):
            raise AlgebraError("unexpected end of term")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise AlgebraError("unexpected end of term")
            op = tokens[pos]
            pos += 1
            if op not in ARITY:
                raise AlgebraError(f"unknown operation {op!r}")
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse())
            if pos >= len(tokens):
                raise AlgebraError("missing ')'")
            pos += 1
            return Term(op, tuple(args))
        if tok == ")":
            raise AlgebraError("unexpected ')'")
        if tok in ("0", "1"):
            return const(tok)
        if tok.startswith("@"):
            return const(int(tok[1:]))
        return var(tok)

    t = parse()
    if pos != len(tokens):
        raise AlgebraError("trailing input after term")
    return t


def format_term(t: Term) -> str:
    if t.op == "var":
        return str(t.value)
    if t.op == "const":
        return t.value if isinstance(t.value, str) else f"@{t.value}"
    return "(" + " ".join([t.op] + [format_term(a) for a in t.args]) + ")"


def _const_value(t: Term, top: int) -> int:
    if t.value == "0":
        return 0
    if t.value == "1":
        return top
    return t.value


def evaluate_ha(A, t: Term, env: dict | None = None) -> int:
    """Evaluate in a FiniteHeytingAlgebra; ``not x`` is ``x -> 0``."""
    env = env or {}
    if t.op == "var":
        return env[t.value]
    if t.op == "const":
        v = _const_value(t, A.one)
        if not A.is_element(v):
            raise AlgebraError(f"constant {v} is not an element")
        return v
    if t.op == "int":
        raise AlgebraError("interior is not a Heyting operation")
    vals = [evaluate_ha(A, a, env) for a in t.args]
    if t.op == "and":
        return vals[0] & vals[1]
    if t.op == "or":
        return vals[0] | vals[1]
    if t.op == "imp":
        return A.imp(vals[0], vals[1])
    return A.neg(vals[0])


def evaluate_int(I, t: Term, env: dict | None = None) -> int:
    """Evaluate in an InteriorAlgebra; ``not`` is Boolean complement, ``imp`` is ``not a or b``."""
    env = env or {}
    if t.op == "var":
        return env[t.value]
    if t.op == "const":
        v = _const_value(t, I.universe)
        if v & ~I.universe:
            raise AlgebraError(f"constant {v} is not an element")
        return v
    vals = [evaluate_int(I, a, env) for a in t.args]
    if t.op == "and":
        return vals[0] & vals[1]
    if t.op == "or":
        return vals[0] | vals[1]
    if t.op == "imp":
        return I.complement(vals[0]) | vals[1]
    if t.op == "not":
        return I.complement(vals[0])
    return I.interior(vals[0])


def translate_star(t: Term, a: int) -> Term:
    """Replace the constant 1 by ``a`` and every ``not u`` by ``(not u) and a``.

    Defined on the fragment built from 0, 1, and, or, not; terms using the
    interior operator or implication are rejected.
    """
    if t.op == "int":
        raise AlgebraError("translation is undefined on the interior operator")
    if t.op == "imp":
        raise AlgebraError("translation is defined on 0, 1, and, or, not only")
    if t.op == "const" and t.value == "1":
        return const(a)
    if t.op in ("var", "const"):
        return t
    args = tuple(translate_star(x, a) for x in t.args)
    if t.op == "not":
        return app("and", Term("not", args), const(a))
    return Term(t.op, args)
