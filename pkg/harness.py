"""
Bounded verification runs over enumerated charts.

A chart of the requested type counts as certified out only when every
placement of infinity fires a certificate. Whatever survives is written into
the report in full so it can be audited by hand.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Iterable, Optional

from pydantic import BaseModel, Field

from certificates import Scope, run_certificates
from chart_format import serialize_chart
from chart_map import Chart, canonical_digest, infinity_candidates, validate, with_infinity, working_chart
from config import Settings, get_settings
from disks import AngledDisk, enumerate_disk_regions
from enumeration import EnumBudget, enumerate_charts
from moves import assumption_flags
from rewrite import load_rules
from subgraph import (
    SignaturePattern,
    TrackRole,
    chart_type,
    component_census,
    component_shape,
    tracks_of_label,
)

logger = logging.getLogger(__name__)

TABLE1_COLUMNS = {
    (1, 1, 2): "column-1",
    (1, 2, 1): "column-2",
    (1, 3, 0): "column-3",
    (3, 1, 0): "column-4",
}
NOT_APPLICABLE = "n/a"


class ReportCounts(BaseModel):
    generated: int = 0
    valid: int = 0
    invalid: int = 0
    typed_matching: int = 0
    certified_out: int = 0
    survivors: int = 0


class CertifiedChart(BaseModel):
    digest: str
    placements: int
    witnesses: list[str] = Field(default_factory=list)


class SurvivorReport(BaseModel):
    budget: str
    signature: str
    whites: Optional[int] = None
    rules_digest: str = ""
    census_size: Optional[int] = None
    counts: ReportCounts = Field(default_factory=ReportCounts)
    survivor_documents: list[str] = Field(default_factory=list)
    certified: list[CertifiedChart] = Field(default_factory=list)
    table1: dict[str, int] = Field(default_factory=dict)
    anomalies: list[str] = Field(default_factory=list)

    def identities_hold(self) -> bool:
        k = self.counts
        return (
            k.generated == k.valid + k.invalid
            and k.typed_matching == k.certified_out + k.survivors
            and k.survivors == len(self.survivor_documents)
            and k.certified_out == len(self.certified)
        )

    @property
    def verdict(self) -> str:
        whites = "" if self.whites is None else f" with {self.whites} whites"
        if self.counts.survivors == 0:
            return f"bounded evidence: no minimal chart of type {self.signature}{whites} within {self.budget}"
        return f"{self.counts.survivors} charts of type {self.signature}{whites} survive every certificate"

    def merge(self, other: "SurvivorReport") -> "SurvivorReport":
        if (self.budget, self.signature, self.whites) != (other.budget, other.signature, other.whites):
            raise ValueError("reports of different runs cannot be merged")
        counts = ReportCounts(
            **{name: getattr(self.counts, name) + getattr(other.counts, name) for name in ReportCounts.model_fields}
        )
        table1 = Counter(self.table1)
        table1.update(other.table1)
        return self.model_copy(
            update={
                "counts": counts,
                "survivor_documents": self.survivor_documents + other.survivor_documents,
                "certified": self.certified + other.certified,
                "table1": dict(sorted(table1.items())),
                "anomalies": self.anomalies + other.anomalies,
            }
        )

    def to_tsv(self) -> str:
        lines = [
            f"# budget\t{self.budget}",
            f"# signature\t{self.signature}",
            f"# whites\t{'-' if self.whites is None else self.whites}",
            f"# rules\t{self.rules_digest}",
            f"# census\t{'-' if self.census_size is None else self.census_size}",
            f"# verdict\t{self.verdict}",
        ]
        lines.extend(f"{name}\t{value}" for name, value in self.counts.model_dump().items())
        lines.extend(f"table1\t{tag}\t{n}" for tag, n in sorted(self.table1.items()))
        lines.extend(f"anomaly\t{text}" for text in self.anomalies)
        for item in self.certified:
            for row in item.witnesses:
                lines.append(f"certified\t{item.digest[:12]}\t{row}")
        for doc in self.survivor_documents:
            lines.append("survivor")
            lines.extend(f"\t{line}" for line in doc.splitlines())
        return "\n".join(lines) + "\n"


# -- (4, 3) case table ---------------------------------------------------------


def classify_triple(triple: tuple[int, int, int]) -> str:
    column = TABLE1_COLUMNS.get(tuple(triple))
    return column if column else f"anomaly:{tuple(triple)}"


def _outer_label(c: Chart) -> Optional[int]:
    sig = chart_type(c)
    if sig is None or sig.gapped:
        return None
    if sig.counts == (4, 3):
        return sig.m + 2
    if sig.counts == (3, 4):
        return sig.m
    return None


def _case_disks(c: Chart, k: int, settings: Optional[Settings]) -> Optional[tuple[AngledDisk, AngledDisk, AngledDisk]]:
    """D1, D2, D3: the 2-angled disk, the 3-angled disk with a feeler, the 3-angled disk without."""
    internal = [t for t in tracks_of_label(c, k) if t.role == TrackRole.INTERNAL]
    disks = []
    for d in enumerate_disk_regions(c, k, settings):
        on_curve = d.region.curve.keys
        if any(t.key not in on_curve and d.region.inside(c, t.first_end) for t in internal):
            continue
        disks.append(d)
    two = [d for d in disks if d.k == 2]
    fed = [d for d in disks if d.k == 3 and d.feelers]
    bare = [d for d in disks if d.k == 3 and not d.feelers]
    if len(disks) != 3 or (len(two), len(fed), len(bare)) != (1, 1, 1):
        return None
    return two[0], fed[0], bare[0]


def table1_crosscheck(c: Chart, settings: Optional[Settings] = None) -> str:
    """Case-table column of a (4, 3) chart, from the three disks cut out by its three-white label."""
    k = _outer_label(c)
    work = working_chart(c)
    if k is None or work.white_count != 7:
        return NOT_APPLICABLE
    disks = _case_disks(work, k, settings)
    if disks is None:
        return NOT_APPLICABLE
    return classify_triple(tuple(d.region.interior_whites(work) for d in disks))


# -- shape census ----------------------------------------------------------------


def component_shape_census(
    b: EnumBudget,
    m: int,
    settings: Optional[Settings] = None,
    whites: Optional[int] = None,
    charts: Optional[Iterable[Chart]] = None,
) -> set[str]:
    """Shapes of loop-free label-m components with one to three whites in normal-form charts."""
    shapes: set[str] = set()
    for c in charts if charts is not None else enumerate_charts(b, settings):
        if any(flag.tag.startswith("A2") for flag in assumption_flags(c)):
            continue
        work = working_chart(c)
        for comp in component_census(work, m):
            if not comp.loop_free or any(t.closed for t in comp.tracks):
                continue
            if not 1 <= comp.white_count <= 3 or (whites is not None and comp.white_count != whites):
                continue
            shapes.add(component_shape(work, comp))
    logger.info("shape census at label %d: %d classes", m, len(shapes))
    return shapes


# -- verification -------------------------------------------------------------------


def _certify(c: Chart, shapes: Optional[frozenset[str]], settings: Settings) -> Optional[list[str]]:
    """One fired certificate row per placement of infinity, or None if some placement is silent."""
    whites = working_chart(c).white_count
    scopes = [s for s in Scope if s.applies(whites)]
    placements = infinity_candidates(c) or [c.infinity]
    rows = []
    for ref in placements:
        fired = run_certificates(with_infinity(c, ref), shapes, settings, scopes)
        if not fired:
            return None
        rows.append(fired[0].row())
    return rows


def verify_type_nonexistence(
    pattern: SignaturePattern,
    b: EnumBudget,
    whites: Optional[int] = None,
    settings: Optional[Settings] = None,
    shapes: Optional[Iterable[str]] = None,
    charts: Optional[Iterable[Chart]] = None,
) -> SurvivorReport:
    """Certify every enumerated chart of the pattern; report what is left."""
    settings = settings or get_settings()
    census = None if shapes is None else frozenset(shapes)
    report = SurvivorReport(
        budget=str(b),
        signature=str(pattern),
        whites=whites,
        rules_digest=load_rules(settings.rules_dir).digest,
        census_size=None if census is None else len(census),
    )
    k = report.counts
    table1: Counter = Counter()
    for c in charts if charts is not None else enumerate_charts(b, settings):
        k.generated += 1
        if k.generated % 10_000 == 0:
            logger.info("verify: %d charts generated, %d survivors so far", k.generated, k.survivors)
        if validate(c):
            k.invalid += 1
            continue
        k.valid += 1
        sig = chart_type(c)
        if not pattern.matches(sig) or (whites is not None and sig.white_count != whites):
            continue
        k.typed_matching += 1
        tag = table1_crosscheck(c, settings)
        table1[tag] += 1
        if tag.startswith("anomaly"):
            report.anomalies.append(f"{canonical_digest(c)[:12]}\t{tag}")
        rows = _certify(c, census, settings)
        if rows is not None:
            k.certified_out += 1
            report.certified.append(CertifiedChart(digest=canonical_digest(c), placements=len(rows), witnesses=rows))
            continue
        k.survivors += 1
        report.survivor_documents.append(serialize_chart(c))
    report.table1 = dict(sorted(table1.items()))
    logger.info("verify finished: %s", report.verdict)
    return report
