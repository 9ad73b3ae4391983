"""
Necessary conditions of minimality, run as certificates.

A certificate that fires shows the chart cannot be minimal, within the scope
it carries. Silence proves nothing.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Iterator, Optional

from chart_map import LEFT, RIGHT, TAIL, Chart, ChartError, EdgeEnd, VertexKind, working_chart
from config import Settings, get_settings
from disks import (
    AngledDisk,
    Curve,
    DiskError,
    Lens,
    associated_disk,
    build_region,
    enumerate_disk_regions,
    find_lenses,
)
from moves import A2_TERMINAL, A3_OUTSIDE, A4_WHITE_FREE, assumption_flags
from subgraph import (
    TrackRole,
    bw_orientation_ok,
    component_census,
    component_shape,
    is_bw_vertex,
    labels_present,
    track_of_edge,
    tracks_of_label,
    white_local_structure,
)

logger = logging.getLogger(__name__)


class Scope(str, Enum):
    ALL_MINIMAL = "all-minimal"
    AT_MOST_SEVEN = "minimal-with-≤7-whites"
    EXACTLY_SEVEN = "minimal-with-7-whites"

    def applies(self, whites: int) -> bool:
        if self is Scope.AT_MOST_SEVEN:
            return whites <= 7
        if self is Scope.EXACTLY_SEVEN:
            return whites == 7
        return True


@dataclass(frozen=True, order=True)
class Witness:
    feature: str
    label: Optional[int]
    keys: tuple[str, ...]
    side: Optional[str] = None

    def __str__(self) -> str:
        text = f"{self.feature}[{'-' if self.label is None else self.label}]:{','.join(self.keys)}"
        return f"{text}@{self.side}" if self.side else text


@dataclass(frozen=True, order=True)
class Certificate:
    lemma_id: str
    scope: Scope
    witness: Witness
    message: str

    def row(self) -> str:
        return f"{self.lemma_id}\t{self.scope.value}\t{self.witness}"


class _Scan:
    """Features shared by several rules, computed once per chart."""

    def __init__(self, c: Chart, shapes: Optional[frozenset[str]], settings: Settings):
        self.chart = c
        self.work = working_chart(c)
        self.shapes = shapes
        self.settings = settings

    @cached_property
    def labels(self) -> list[int]:
        return labels_present(self.work)

    @cached_property
    def disks(self) -> dict[int, list[AngledDisk]]:
        out = {}
        for m in self.labels:
            try:
                found = enumerate_disk_regions(self.work, m, self.settings)
            except DiskError as exc:
                logger.warning("disk scan skipped for label %d: %s", m, exc)
                found = []
            out[m] = [d for d in found if not d.region.contains_infinity]
        return out

    @cached_property
    def loops(self) -> list:
        return [t for m in self.labels for t in tracks_of_label(self.work, m) if t.role == TrackRole.LOOP]

    @cached_property
    def lenses(self) -> list[Lens]:
        return [lens for lens in find_lenses(self.work) if not lens.region.contains_infinity]


def _disk_witness(feature: str, d: AngledDisk) -> Witness:
    return Witness(feature, d.label, tuple(key for key, _ in d.region.curve.segments), d.region.side)


# -- rules ---------------------------------------------------------------------

_FLAG_LEMMAS = {A2_TERMINAL: "A2", A3_OUTSIDE: "A3", A4_WHITE_FREE: "A4"}


def _normal_form(scan: _Scan) -> Iterator[Certificate]:
    for flag in assumption_flags(scan.chart):
        yield Certificate(_FLAG_LEMMAS[flag.tag], Scope.ALL_MINIMAL, Witness(flag.tag, None, (flag.witness,)), flag.message)


def _loop_deficit(scan: _Scan) -> Iterator[Certificate]:
    work = scan.work
    for loop in scan.loops:
        try:
            disk = associated_disk(work, loop)
        except DiskError as exc:
            logger.debug("no associated disk for %s: %s", loop, exc)
            continue
        inside = disk.interior_whites(work)
        outside = work.white_count - inside - 1
        if inside < 2 or outside < 2:
            yield Certificate(
                "LOOP-DEFICIT",
                Scope.ALL_MINIMAL,
                Witness("loop", loop.label, (loop.key,)),
                f"loop at {loop.start} leaves {inside} whites inside and {outside} outside",
            )


def _loop_at_seven(scan: _Scan) -> Iterator[Certificate]:
    if scan.work.white_count != 7:
        return
    for loop in scan.loops:
        yield Certificate(
            "LOOP-AT-7", Scope.EXACTLY_SEVEN, Witness("loop", loop.label, (loop.key,)), f"loop at {loop.start}"
        )


def _lonely_component(scan: _Scan) -> Iterator[Certificate]:
    for m in scan.labels:
        for comp in component_census(scan.work, m):
            if comp.white_count == 1:
                yield Certificate(
                    "LONELY-COMPONENT",
                    Scope.ALL_MINIMAL,
                    Witness("component", m, comp.whites),
                    f"component of label {m} holds a single white vertex",
                )


def _lens_deficit(scan: _Scan) -> Iterator[Certificate]:
    for lens in scan.lenses:
        inside = lens.region.interior_whites(scan.work)
        if inside < 3:
            yield Certificate(
                "LENS-DEFICIT",
                Scope.ALL_MINIMAL,
                Witness("lens", lens.labels[0], lens.edges, lens.region.side),
                f"lens holds {inside} whites",
            )


def _lens_at_seven(scan: _Scan) -> Iterator[Certificate]:
    if scan.work.white_count > 7:
        return
    for lens in scan.lenses:
        yield Certificate(
            "LENS-AT-≤7",
            Scope.AT_MOST_SEVEN,
            Witness("lens", lens.labels[0], lens.edges, lens.region.side),
            f"lens in a chart with {scan.work.white_count} whites",
        )


def _two_feeler_triangle(scan: _Scan) -> Iterator[Certificate]:
    for m, disks in scan.disks.items():
        for d in disks:
            if d.k != 3 or not d.special or len(d.feelers) != 2:
                continue
            inside = d.region.interior_whites(scan.work)
            if inside < 2:
                yield Certificate(
                    "TWO-FEELER-3GON",
                    Scope.ALL_MINIMAL,
                    _disk_witness("disk", d),
                    f"special 3-angled disk with two feelers holds {inside} whites",
                )


def _outside_ends(c: Chart, d: AngledDisk, w: str) -> list[EdgeEnd]:
    curve_edges = {dart.edge for dart in d.region.boundary}
    return [e for e in c.vertices[w].rotation if c.label(e) == d.label and e.edge not in curve_edges]


def _bigon_outflow(scan: _Scan) -> Iterator[Certificate]:
    work = scan.work
    for m, disks in scan.disks.items():
        for d in disks:
            if d.k != 2 or d.feelers or d.region.interior_whites(work) != 0:
                continue
            ends = [_outside_ends(work, d, w) for w in d.whites]
            if any(len(e) != 1 for e in ends):
                continue
            e1, e2 = ends[0][0], ends[1][0]
            if e1.inward == e2.inward:
                way = "inward" if e1.inward else "outward"
                yield Certificate(
                    "2GON-OUTFLOW",
                    Scope.ALL_MINIMAL,
                    _disk_witness("disk", d),
                    f"empty 2-angled disk with both outer edges {way}",
                )


def _carries_terminal(c: Chart, w: str, m: int) -> bool:
    return any(
        track_of_edge(c, e.edge).role == TrackRole.TERMINAL
        for e in c.vertices[w].rotation
        if c.label(e) == m
    )


def _triangle_deficit(scan: _Scan) -> Iterator[Certificate]:
    work = scan.work
    for m, disks in scan.disks.items():
        for d in disks:
            if d.k != 3 or d.feelers or d.region.interior_whites(work) != 0:
                continue
            terminal = [w for w in d.whites if _carries_terminal(work, w, m)]
            if len(terminal) >= 2:
                yield Certificate(
                    "TRIANGLE-DEFICIT",
                    Scope.ALL_MINIMAL,
                    _disk_witness("disk", d),
                    f"empty 3-angled disk with terminal edges at {', '.join(terminal)}",
                )


def _shape_violation(scan: _Scan) -> Iterator[Certificate]:
    if scan.shapes is None:
        return
    for m in scan.labels:
        for comp in component_census(scan.work, m):
            if not comp.loop_free or not 1 <= comp.white_count <= 3:
                continue
            if any(t.closed for t in comp.tracks):
                continue
            shape = component_shape(scan.work, comp)
            if shape not in scan.shapes:
                yield Certificate(
                    "SHAPE-VIOLATION",
                    Scope.ALL_MINIMAL,
                    Witness("component", m, comp.whites),
                    f"component shape {shape[:10]} is not in the census",
                )


def _bw_orientation(scan: _Scan) -> Iterator[Certificate]:
    work = scan.work
    for v in sorted(v.id for v in work.vertices_of_kind(VertexKind.WHITE)):
        base = white_local_structure(work, v).base
        for m in (base, base + 1):
            if is_bw_vertex(work, v, m) and not bw_orientation_ok(work, v, m):
                yield Certificate(
                    "BW-ORIENTATION",
                    Scope.ALL_MINIMAL,
                    Witness("white", m, (v,)),
                    f"label-{m} edges at BW-vertex {v} point opposite ways",
                )


def _feeler_merge(scan: _Scan) -> Iterator[Certificate]:
    work = scan.work
    for k, disks in scan.disks.items():
        for d in disks:
            if not d.special or len(d.feelers) < 2 or d.region.interior_whites(work) != 0:
                continue
            for f1, f2 in combinations(d.feelers, 2):
                if f1.white == f2.white:
                    continue
                for first, second in ((f1, f2), (f2, f1)):
                    hit = _merge_witness(work, d, first, second)
                    if hit is not None:
                        yield Certificate(
                            "FEELER-MERGE",
                            Scope.ALL_MINIMAL,
                            Witness("disk", k, hit, d.region.side),
                            f"feelers at {first.white} and {second.white} merge into a free edge",
                        )
                        break


def _merge_witness(c: Chart, d: AngledDisk, f1, f2) -> Optional[tuple[str, ...]]:
    w1, w2 = f1.white, f2.white
    a_end, b_end = white_local_structure(c, w1).flanking(f1.end)
    a, b = track_of_edge(c, a_end.edge), track_of_edge(c, b_end.edge)
    if a.key == b.key or a.label != b.label:
        return None
    if any(t.role != TrackRole.INTERNAL or {t.start, t.end} != {w1, w2} for t in (a, b)):
        return None
    if not (d.region.inside(c, a_end) and d.region.inside(c, b_end)):
        return None
    curve = Curve(((a.key, a.start == w1), (b.key, b.start == w2)), (w1, w2), a.label)
    sides = [build_region(c, curve, side) for side in (LEFT, RIGHT)]
    inner = [r for r in sides if r.faces <= d.region.faces]
    if len(inner) != 1:
        return None
    lens = inner[0]
    other = 2 * d.label - a.label
    crossing = [
        t
        for t in tracks_of_label(c, other)
        if t.role == TrackRole.INTERNAL
        and any(lens.inside(c, EdgeEnd(e, TAIL)) for e in t.edges)
    ]
    if len(crossing) > 1:
        return None
    return (f1.track.key, f2.track.key, a.key, b.key)


RULES: dict[str, Callable[[_Scan], Iterator[Certificate]]] = {
    "A2": _normal_form,
    "A3": _normal_form,
    "A4": _normal_form,
    "LOOP-DEFICIT": _loop_deficit,
    "LOOP-AT-7": _loop_at_seven,
    "LONELY-COMPONENT": _lonely_component,
    "LENS-DEFICIT": _lens_deficit,
    "LENS-AT-≤7": _lens_at_seven,
    "TWO-FEELER-3GON": _two_feeler_triangle,
    "2GON-OUTFLOW": _bigon_outflow,
    "TRIANGLE-DEFICIT": _triangle_deficit,
    "SHAPE-VIOLATION": _shape_violation,
    "BW-ORIENTATION": _bw_orientation,
    "FEELER-MERGE": _feeler_merge,
}


def run_certificates(
    c: Chart,
    shapes: Optional[Iterable[str]] = None,
    settings: Optional[Settings] = None,
    scopes: Optional[Iterable[Scope]] = None,
) -> list[Certificate]:
    """Every certificate the chart fires, sorted and free of duplicates.

    ``shapes`` is the component census; without it SHAPE-VIOLATION is skipped.
    """
    scan = _Scan(c, None if shapes is None else frozenset(shapes), settings or get_settings())
    wanted = set(Scope) if scopes is None else set(scopes)
    fired: set[Certificate] = set()
    for rule in dict.fromkeys(RULES.values()):
        fired.update(cert for cert in rule(scan) if cert.scope in wanted)
    counts = defaultdict(int)
    for cert in fired:
        counts[cert.lemma_id] += 1
    if counts:
        logger.debug("certificates on %s: %s", c.name, dict(sorted(counts.items())))
    return sorted(fired)


def verify_witness(
    c: Chart, cert: Certificate, shapes: Optional[Iterable[str]] = None, settings: Optional[Settings] = None
) -> bool:
    """Re-run the rule behind ``cert`` and check that it fires on the same witness."""
    rule = RULES.get(cert.lemma_id)
    if rule is None:
        raise ChartError(f"unknown certificate {cert.lemma_id}")
    scan = _Scan(c, None if shapes is None else frozenset(shapes), settings or get_settings())
    return any(found.lemma_id == cert.lemma_id and found.witness == cert.witness for found in rule(scan))
