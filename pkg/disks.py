"""
Disk-shaped configurations bounded by tracks.

A simple closed curve made of tracks splits the sphere in two. Each side is
described by the faces of the curve's own component lying on it plus every
component nested beyond those faces.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

from chart_map import HEAD, LEFT, RIGHT, TAIL, CapExceeded, Chart, ChartError, EdgeEnd, VertexKind
from config import Settings, get_settings
from subgraph import Track, TrackRole, labels_present, track_of_edge, tracks_of_label, white_local_structure

logger = logging.getLogger(__name__)


class DiskError(ChartError):
    pass


class DAlphaArcError(DiskError):
    pass


@dataclass(frozen=True)
class Curve:
    """Tracks traversed in order; each segment is (track key, forward)."""

    segments: tuple[tuple[str, bool], ...]
    whites: tuple[str, ...]
    label: Optional[int]

    @property
    def keys(self) -> frozenset[str]:
        return frozenset(key for key, _ in self.segments)


def curve_darts(c: Chart, curve: Curve) -> list[EdgeEnd]:
    darts = []
    for key, forward in curve.segments:
        track = track_of_edge(c, key)
        if forward:
            darts.extend(EdgeEnd(e, TAIL) for e in track.edges)
        else:
            darts.extend(EdgeEnd(e, HEAD) for e in reversed(track.edges))
    return darts


@dataclass(frozen=True)
class DiskRegion:
    curve: Curve
    side: str
    faces: frozenset[int]
    component: int
    boundary: tuple[EdgeEnd, ...]
    boundary_vertices: frozenset[str]
    interior_vertices: tuple[str, ...]
    nested_vertices: tuple[str, ...]
    contains_infinity: bool
    euler: int

    def inside(self, c: Chart, end: EdgeEnd) -> bool:
        """Whether the germ of ``end`` at its vertex points into the region."""
        return c.topology.face_of[end] in self.faces

    def interior_whites(self, c: Chart) -> int:
        return sum(
            1
            for v in (*self.interior_vertices, *self.nested_vertices)
            if c.vertices[v].kind == VertexKind.WHITE
        )


def build_region(c: Chart, curve: Curve, side: str) -> DiskRegion:
    topo = c.topology
    darts = curve_darts(c, curve)
    curve_edges = {d.edge for d in darts}
    seeds = {topo.face_of[d] if side == LEFT else topo.face_of[d.opposite] for d in darts}
    faces = set(seeds)
    queue = deque(seeds)
    while queue:
        fid = queue.popleft()
        for dart in topo.faces[fid].boundary:
            if dart.edge in curve_edges:
                continue
            other = topo.face_of[dart.opposite]
            if other not in faces:
                faces.add(other)
                queue.append(other)
    comp = topo.component_at(darts[0])
    on_curve = {topo.vertex_of[d] for d in darts}
    interior = [
        v
        for v in topo.components[comp].vertices
        if v not in on_curve and topo.face_of[c.vertices[v].rotation[0]] in faces
    ]
    inner_edges = [
        e for e in topo.components[comp].edges if e not in curve_edges and topo.face_of[EdgeEnd(e, TAIL)] in faces
    ]
    euler = len(on_curve) + len(interior) - len(curve_edges) - len(inner_edges) + len(faces)
    beyond = topo.beyond(comp, faces)
    regions = {topo.faces[f].region for f in faces}
    for other in beyond:
        regions.update(topo.faces[f].region for f in topo.components[other].faces)
    nested = [v for other in sorted(beyond) for v in topo.components[other].vertices]
    return DiskRegion(
        curve=curve,
        side=side,
        faces=frozenset(faces),
        component=comp,
        boundary=tuple(darts),
        boundary_vertices=frozenset(on_curve),
        interior_vertices=tuple(sorted(interior)),
        nested_vertices=tuple(nested),
        contains_infinity=topo.infinity_region in regions,
        euler=euler,
    )


# -- simple closed curves of Γ_m --------------------------------------------


def _segment(track: Track, frm: str) -> tuple[str, bool]:
    return track.key, track.start == frm


def simple_curves(c: Chart, m: int, settings: Optional[Settings] = None) -> list[Curve]:
    cap = (settings or get_settings()).cycle_cap
    curves: list[Curve] = []
    internal: list[Track] = []
    for track in tracks_of_label(c, m):
        if track.closed:
            curves.append(Curve(((track.key, True),), (), m))
        elif track.role == TrackRole.LOOP:
            curves.append(Curve(((track.key, True),), (track.start,), m))
        elif track.role == TrackRole.INTERNAL:
            internal.append(track)

    incident: dict[str, list[Track]] = {}
    for track in internal:
        incident.setdefault(track.start, []).append(track)
        incident.setdefault(track.end, []).append(track)
    order = {w: i for i, w in enumerate(sorted(incident))}
    seen: set[frozenset[str]] = set()

    def other_end(track: Track, v: str) -> str:
        return track.end if track.start == v else track.start

    def dfs(start: str, v: str, path: list[tuple[Track, str]], visited: set[str]) -> None:
        for track in incident.get(v, []):
            if any(track is used for used, _ in path):
                continue
            u = other_end(track, v)
            step = path + [(track, v)]
            if u == start:
                key = frozenset(t.key for t, _ in step)
                if key not in seen:
                    seen.add(key)
                    segments = tuple(_segment(t, frm) for t, frm in step)
                    curves.append(Curve(segments, tuple(frm for _, frm in step), m))
                    if len(curves) > cap:
                        raise CapExceeded(f"simple closed curves of label {m}", cap)
            elif order[u] > order[start] and u not in visited:
                dfs(start, u, step, visited | {u})

    for start in sorted(incident):
        dfs(start, start, [], {start})
    return curves


# -- angled disks ------------------------------------------------------------


@dataclass(frozen=True)
class Feeler:
    white: str
    end: EdgeEnd
    track: Track


@dataclass(frozen=True)
class AngledDisk:
    region: DiskRegion
    label: int
    k: int
    feelers: tuple[Feeler, ...]
    special: bool

    @property
    def whites(self) -> tuple[str, ...]:
        return self.region.curve.whites

    def row(self, c: Chart) -> str:
        inf = "inf" if self.region.contains_infinity else "-"
        return (
            f"angled-disk\t{self.label}\t{self.k}\t{len(self.feelers)}\t"
            f"{'special' if self.special else '-'}\t{self.region.interior_whites(c)}\t{inf}"
        )


def _curve_ends_at(c: Chart, region: DiskRegion, w: str) -> set[EdgeEnd]:
    curve_edges = {d.edge for d in region.boundary}
    return {e for e in c.vertices[w].rotation if e.edge in curve_edges}


def feelers_of(c: Chart, region: DiskRegion, m: int) -> tuple[Feeler, ...]:
    out = []
    for w in region.curve.whites:
        on_curve = _curve_ends_at(c, region, w)
        for end in c.vertices[w].rotation:
            if end in on_curve or c.label(end) != m:
                continue
            if region.inside(c, end):
                out.append(Feeler(w, end, track_of_edge(c, end.edge)))
    return tuple(out)


def angled_disk(c: Chart, curve: Curve, side: str) -> AngledDisk:
    region = build_region(c, curve, side)
    feelers = feelers_of(c, region, curve.label)
    special = all(f.track.role == TrackRole.TERMINAL for f in feelers)
    return AngledDisk(region, curve.label, len(curve.whites), feelers, special)


def enumerate_disk_regions(c: Chart, m: int, settings: Optional[Settings] = None) -> list[AngledDisk]:
    out = []
    for curve in simple_curves(c, m, settings):
        for side in (LEFT, RIGHT):
            disk = angled_disk(c, curve, side)
            if disk.region.euler != 1:
                raise DiskError(f"side {side} of curve {curve.segments} has Euler characteristic {disk.region.euler}")
            out.append(disk)
    return out


def associated_disk(c: Chart, loop: Track) -> DiskRegion:
    """The side of a loop away from the third label-m edge at its white vertex."""
    if loop.role != TrackRole.LOOP:
        raise DiskError(f"track {loop} is not a loop")
    w = loop.start
    curve = Curve(((loop.key, True),), (w,), loop.label)
    others = [
        e for e in c.vertices[w].rotation if c.label(e) == loop.label and e.edge not in loop.edges
    ]
    if len(others) != 1:
        raise DiskError(f"loop at {w} does not leave exactly one other label-{loop.label} end")
    sides = [build_region(c, curve, side) for side in (LEFT, RIGHT)]
    away = [r for r in sides if not r.inside(c, others[0])]
    if len(away) != 1:
        raise DiskError(f"third edge at {w} is not separated by the loop")
    return away[0]


# -- lenses --------------------------------------------------------------------


@dataclass(frozen=True)
class Lens:
    region: DiskRegion
    labels: tuple[int, int]
    edges: tuple[str, str]
    whites: tuple[str, str]
    condition: str

    def row(self, c: Chart) -> str:
        return (
            f"lens\t{self.labels[0]},{self.labels[1]}\t2\t-\t({self.condition})\t"
            f"{self.region.interior_whites(c)}\t{' '.join(self.edges)}"
        )


def _middle_flags(c: Chart, track: Track) -> list[bool]:
    flags = []
    for w in track.endpoints:
        ws = white_local_structure(c, w)
        flags.extend(ws.is_middle(end) for end in track.end_at(w))
    return flags


def find_lenses(c: Chart) -> list[Lens]:
    out = []
    for m in labels_present(c):
        lower = [t for t in tracks_of_label(c, m) if t.role == TrackRole.INTERNAL]
        upper = [t for t in tracks_of_label(c, m + 1) if t.role == TrackRole.INTERNAL]
        for e1 in lower:
            for e2 in upper:
                if {e1.start, e1.end} != {e2.start, e2.end}:
                    continue
                w1, w2 = e1.start, e1.end
                curve = Curve((_segment(e1, w1), _segment(e2, w2)), (w1, w2), None)
                m1, m2 = _middle_flags(c, e1), _middle_flags(c, e2)
                if not any(m1) and not any(m2):
                    condition = "i"
                elif all(m1) or all(m2):
                    condition = "ii"
                else:
                    continue
                for side in (LEFT, RIGHT):
                    region = build_region(c, curve, side)
                    boundary_edges = {d.edge for d in region.boundary}
                    poking = [
                        end
                        for w in (w1, w2)
                        for end in c.vertices[w].rotation
                        if end.edge not in boundary_edges and region.inside(c, end)
                    ]
                    if not poking:
                        out.append(Lens(region, (m, m + 1), (e1.key, e2.key), (w1, w2), condition))
    return out


# -- nice edges and M4-disks ---------------------------------------------------


def _edges_inside(c: Chart, region: DiskRegion) -> list[str]:
    boundary_edges = {d.edge for d in region.boundary}
    return [
        eid
        for eid in sorted(c.edges)
        if eid not in boundary_edges
        and c.topology.component_at(EdgeEnd(eid, TAIL)) == region.component
        and region.inside(c, EdgeEnd(eid, TAIL))
    ]


def _sends_label_inside(c: Chart, region: DiskRegion, w: str, k: int) -> bool:
    on_curve = _curve_ends_at(c, region, w)
    return any(
        c.label(end) == k and end not in on_curve and region.inside(c, end) for end in c.vertices[w].rotation
    )


def find_nice_edges(c: Chart, d: AngledDisk) -> list[Track]:
    k = d.label
    whites = set(d.whites)
    out = []
    for label in (k - 1, k + 1):
        for track in tracks_of_label(c, label):
            if track.role != TrackRole.INTERNAL or not {track.start, track.end} <= whites:
                continue
            if not d.region.inside(c, track.first_end):
                continue
            if any(_sends_label_inside(c, d.region, w, k) for w in (track.start, track.end)):
                continue
            out.append(track)
    return out


def proper_edge_intersections(c: Chart, d: AngledDisk, edge: Track) -> dict[str, int]:
    """Crossing counts between a proper arc and the internal tracks of the other adjacent label."""
    other = 2 * d.label - edge.label
    mine = set(edge.crossings)
    return {
        t.key: len(mine & set(t.crossings))
        for t in tracks_of_label(c, other)
        if t.role == TrackRole.INTERNAL and mine & set(t.crossings)
    }


@dataclass(frozen=True)
class M4Disk:
    region: DiskRegion
    label: int
    boundary_edges: tuple[str, str, str, str]
    diagonals: tuple[str, str]

    def row(self, c: Chart) -> str:
        return f"m4-disk\t{self.label}\t4\t-\t-\t{self.region.interior_whites(c)}\t{' '.join(self.diagonals)}"


def _sole_diagonal(c: Chart, region: DiskRegion, label: int, pairs) -> Optional[Track]:
    inside = {track_of_edge(c, e).key for e in _edges_inside(c, region) if c.edges[e].label == label}
    if len(inside) != 1:
        return None
    track = track_of_edge(c, next(iter(inside)))
    if track.role != TrackRole.INTERNAL or frozenset((track.start, track.end)) not in pairs:
        return None
    if not all(region.inside(c, EdgeEnd(e, TAIL)) for e in track.edges):
        return None
    return track


def find_m4_disks(c: Chart, settings: Optional[Settings] = None) -> list[M4Disk]:
    out = []
    for k in labels_present(c):
        if k - 1 < 1 or k + 1 > c.degree - 1:
            continue
        for curve in simple_curves(c, k, settings):
            if len(curve.segments) != 4 or len(curve.whites) != 4:
                continue
            w = curve.whites
            first_pair = frozenset((w[0], w[2]))
            second_pair = frozenset((w[1], w[3]))
            for side in (LEFT, RIGHT):
                region = build_region(c, curve, side)
                if region.interior_whites(c) != 0:
                    continue
                low = _sole_diagonal(c, region, k - 1, {first_pair, second_pair})
                high = _sole_diagonal(c, region, k + 1, {first_pair, second_pair})
                if low is None or high is None:
                    continue
                if frozenset((low.start, low.end)) == frozenset((high.start, high.end)):
                    continue
                keys = tuple(key for key, _ in curve.segments)
                out.append(M4Disk(region, k, keys, (low.key, high.key)))
    return out


# -- (D, α)-arcs ---------------------------------------------------------------


@dataclass(frozen=True)
class DAlphaArc:
    label: int
    edges: tuple[str, ...]
    ends: tuple[str, str]


def _check_alpha(c: Chart, region: DiskRegion, alpha: str) -> Track:
    track = track_of_edge(c, alpha)
    if track.key not in region.curve.keys:
        raise DAlphaArcError(f"track {alpha} is not on the boundary of the disk")
    if track.role not in (TrackRole.INTERNAL, TrackRole.LOOP):
        raise DAlphaArcError(f"track {alpha} is not an internal edge")
    return track


def find_d_alpha_arcs(c: Chart, d: DiskRegion, alpha: str, k: int) -> list[DAlphaArc]:
    """Label-k strands inside ``d`` with both ends on crossings of the track ``alpha``."""
    track = _check_alpha(c, d, alpha)
    topo = c.topology
    on_alpha = set(track.crossings)
    seen: set[frozenset[str]] = set()
    out = []
    for x in track.crossings:
        rot = c.vertices[x].rotation
        for end in rot:
            if end.edge in track.edges or c.label(end) != k or not d.inside(c, end):
                continue
            edges = []
            dart = end
            while True:
                edges.append(dart.edge)
                arrival = dart.opposite
                y = topo.vertex_of[arrival]
                if y in d.boundary_vertices:
                    if y in on_alpha and y != x:
                        key = frozenset(edges)
                        if key not in seen:
                            seen.add(key)
                            out.append(DAlphaArc(k, tuple(edges), tuple(sorted((x, y)))))
                    break
                if c.vertices[y].kind != VertexKind.CROSSING:
                    break
                arot = c.vertices[y].rotation
                dart = arot[(topo.position[arrival] + 2) % 4]
    return out


def is_d_alpha_free(c: Chart, d: DiskRegion, alpha: str) -> bool:
    return not any(find_d_alpha_arcs(c, d, alpha, k) for k in labels_present(c))
