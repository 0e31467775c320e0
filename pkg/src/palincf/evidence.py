"""Inequality evidence items and criterion reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .interval import RationalInterval, approx_log2

# theorem: a proven inequality; failing it means an arithmetic bug or a corrupted word.
# hypothesis: an assumption of a criterion; failing it is a legitimate verdict.
# as-printed: a displayed formula kept literally for comparison; never drives the verdict.
# info: recorded for context only.
KINDS = ("theorem", "hypothesis", "as-printed", "info")

DISCLAIMER = (
    "Finite-prefix evidence only. Each satisfied item is a non-overlapping comparison "
    "of exact rational enclosures. No transcendence or irrationality conclusion is drawn, "
    "and aperiodicity cannot be certified from a finite prefix."
)


@dataclass(frozen=True)
class InequalityEvidence:
    n: int
    label: str
    lhs: RationalInterval
    relation: str
    rhs: RationalInterval
    kind: str = "theorem"
    depth: Optional[int] = None
    status: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown evidence kind {self.kind!r}")
        if not isinstance(self.lhs, RationalInterval):
            object.__setattr__(self, "lhs", RationalInterval(self.lhs))
        if not isinstance(self.rhs, RationalInterval):
            object.__setattr__(self, "rhs", RationalInterval(self.rhs))
        if not self.status:
            object.__setattr__(self, "status", self.lhs.status(self.relation, self.rhs))

    @property
    def satisfied(self) -> bool:
        return self.status == "holds"

    @property
    def margin_log2(self) -> Optional[float]:
        """Bits of slack: log2(rhs/lhs) for '<'-type relations on positive sides."""
        ln, ld = self.lhs.hi_pair
        rn, rd = self.rhs.lo_pair
        if self.relation in (">", ">="):
            ln, ld = self.rhs.hi_pair
            rn, rd = self.lhs.lo_pair
        if ln <= 0 or rn <= 0:
            return None
        return round(approx_log2(rn, rd) - approx_log2(ln, ld), 4)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "label": self.label,
            "kind": self.kind,
            "relation": self.relation,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "margin_log2": self.margin_log2,
            "satisfied": self.satisfied,
            "status": self.status,
        }
        if self.depth is not None:
            out["depth"] = self.depth
        if self.extra:
            out["extra"] = self.extra
        return out


def decided(n, label, lhs, relation, rhs, holds: bool, **kw) -> InequalityEvidence:
    """Evidence whose status comes from an exact side computation (e.g. integer test)."""
    return InequalityEvidence(n, label, lhs, relation, rhs, status="holds" if holds else "violated", **kw)


@dataclass
class CriterionReport:
    criterion: str
    word_spec: str
    prefix_len: int
    precision_bits: int
    witnesses: list = field(default_factory=list)
    evidence: list = field(default_factory=list)
    growth: Optional[dict] = None
    notes: list = field(default_factory=list)
    reason: str = ""

    def counted(self):
        return [e for e in self.evidence if e.kind in ("theorem", "hypothesis")]

    @property
    def theorem_failure(self) -> bool:
        return any(e.kind == "theorem" and e.status == "violated" for e in self.evidence)

    @property
    def verdict(self) -> str:
        items = self.counted()
        for e in items:
            if e.status == "violated":
                return f"violated-at({e.n})"
        if self.reason:
            return f"inconclusive({self.reason})"
        for e in items:
            if e.status == "inconclusive":
                return f"inconclusive(enclosure overlap at n={e.n}: {e.label})"
        if not items:
            return "inconclusive(no evidence in prefix)"
        return "hypotheses-verified-up-to-prefix"

    @property
    def exit_code(self) -> int:
        if self.theorem_failure:
            return 1
        if self.verdict.startswith("inconclusive"):
            return 2
        return 0

    def failures(self, kind=None):
        return [e for e in self.evidence
                if e.status != "holds" and (kind is None or e.kind == kind)]

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "word_spec": self.word_spec,
            "prefix_len": self.prefix_len,
            "precision_bits": self.precision_bits,
            "witnesses": list(self.witnesses),
            "evidence": [e.to_json() for e in self.evidence],
            "growth": self.growth,
            "notes": list(self.notes),
            "verdict": self.verdict,
            "disclaimer": DISCLAIMER,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"
