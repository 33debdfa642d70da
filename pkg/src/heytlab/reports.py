"""Structured reports: a title, claims with verdicts and witnesses, free notes."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

VERDICTS = ("pass", "fail", "caveat")


@dataclass
class Claim:
    claim: str
    verdict: str
    witness: object = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")

    def as_dict(self) -> dict:
        return {"claim": self.claim, "verdict": self.verdict, "witness": self.witness}


@dataclass
class Report:
    title: str
    claims: list[Claim] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, claim: str, ok: bool | str, witness=None) -> Claim:
        verdict = ok if isinstance(ok, str) else ("pass" if ok else "fail")
        c = Claim(claim, verdict, witness)
        self.claims.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.verdict != "fail" for c in self.claims)

    def verdict_of(self, claim: str) -> str:
        for c in self.claims:
            if c.claim == claim:
                return c.verdict
        raise KeyError(claim)

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "claims": [c.as_dict() for c in self.claims],
            "notes": list(self.notes),
            "data": self.data,
        }

    def render_text(self) -> str:
        lines = [self.title, "=" * len(self.title)]
        for c in self.claims:
            lines.append(f"[{c.verdict.upper():6}] {c.claim}")
            if c.witness is not None:
                lines.append(f"         witness: {json.dumps(c.witness, sort_keys=True)}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"overall: {'pass' if self.ok else 'fail'}")
        return "\n".join(lines)
