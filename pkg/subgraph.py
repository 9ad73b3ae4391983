"""
The label-m subgraphs of a chart.

Γ_m is cut into tracks: maximal label-m paths that run straight through
crossings. Tracks carry the free/terminal/internal/loop/ring/hoop roles that
the rest of the toolkit reasons about.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import networkx as nx

from chart_map import (
    HEAD,
    TAIL,
    Chart,
    ChartError,
    Edge,
    EdgeEnd,
    Vertex,
    VertexKind,
    assemble,
    canonical_digest,
    ro_family,
    working_chart,
)

logger = logging.getLogger(__name__)

_PASS_THROUGH = (VertexKind.CROSSING, VertexKind.ANCHOR)


class TrackRole(str, Enum):
    FREE = "free"
    TERMINAL = "terminal"
    INTERNAL = "internal"
    LOOP = "loop"
    RING = "ring"
    HOOP = "hoop"


@dataclass(frozen=True)
class Track:
    label: int
    edges: tuple[str, ...]
    crossings: tuple[str, ...]
    start: Optional[str]
    end: Optional[str]
    role: TrackRole

    @property
    def closed(self) -> bool:
        return self.start is None

    @property
    def key(self) -> str:
        return self.edges[0]

    @property
    def first_end(self) -> EdgeEnd:
        return EdgeEnd(self.edges[0], TAIL)

    @property
    def last_end(self) -> EdgeEnd:
        return EdgeEnd(self.edges[-1], HEAD)

    @property
    def endpoints(self) -> tuple[str, ...]:
        return () if self.closed else (self.start, self.end)

    def end_at(self, vertex: str) -> list[EdgeEnd]:
        """Ends of this track held by an endpoint vertex."""
        out = []
        if self.start == vertex:
            out.append(self.first_end)
        if self.end == vertex:
            out.append(self.last_end)
        return out

    def __str__(self) -> str:
        return f"{self.role.value}[{self.label}]:{'-'.join(self.edges)}"


def straight_on(c: Chart, end: EdgeEnd) -> EdgeEnd:
    """The end diagonally opposite ``end`` at a crossing or anchor."""
    topo = c.topology
    rot = topo.rotation_at(end)
    step = len(rot) // 2
    return rot[(topo.position[end] + step) % len(rot)]


def _all_tracks(c: Chart) -> list[Track]:
    if "tracks" in c.memo:
        return c.memo["tracks"]
    topo = c.topology
    done: set[str] = set()
    tracks: list[Track] = []
    for eid in sorted(c.edges):
        if eid in done:
            continue
        first = eid
        closed = False
        while True:
            tail_end = EdgeEnd(first, TAIL)
            vertex = c.vertices[topo.vertex_of[tail_end]]
            if vertex.kind not in _PASS_THROUGH:
                break
            prev = straight_on(c, tail_end)
            if prev.end != HEAD:
                raise ChartError(f"incoherent orientation through {vertex.id}")
            first = prev.edge
            if first == eid:
                closed = True
                break
        edges, crossings = [first], []
        while True:
            head_end = EdgeEnd(edges[-1], HEAD)
            vertex = c.vertices[topo.vertex_of[head_end]]
            if vertex.kind not in _PASS_THROUGH:
                break
            nxt = straight_on(c, head_end)
            if nxt.edge == first:
                if vertex.kind == VertexKind.CROSSING:
                    crossings.append(vertex.id)
                break
            if vertex.kind == VertexKind.CROSSING:
                crossings.append(vertex.id)
            edges.append(nxt.edge)
        done.update(edges)
        label = c.edges[first].label
        if closed:
            role = TrackRole.RING if crossings else TrackRole.HOOP
            tracks.append(Track(label, tuple(edges), tuple(crossings), None, None, role))
            continue
        start = c.edges[edges[0]].tail
        end = c.edges[edges[-1]].head
        kinds = sorted(c.vertices[v].kind.value for v in (start, end))
        if kinds == ["black", "black"]:
            role = TrackRole.FREE
        elif kinds == ["black", "white"]:
            role = TrackRole.TERMINAL
        elif start == end:
            role = TrackRole.LOOP
        else:
            role = TrackRole.INTERNAL
        tracks.append(Track(label, tuple(edges), tuple(crossings), start, end, role))
    c.memo["tracks"] = tracks
    return tracks


def tracks_of_label(c: Chart, m: int) -> list[Track]:
    return [t for t in _all_tracks(c) if t.label == m]


def track_of_edge(c: Chart, edge: str) -> Track:
    index = c.memo.get("track_index")
    if index is None:
        index = {eid: t for t in _all_tracks(c) for eid in t.edges}
        c.memo["track_index"] = index
    return index[edge]


def labels_present(c: Chart) -> list[int]:
    return sorted({e.label for e in c.edges.values()})


# -- components of Γ_m ------------------------------------------------------


@dataclass(frozen=True)
class ComponentCensus:
    label: int
    whites: tuple[str, ...]
    tracks: tuple[Track, ...]

    @property
    def white_count(self) -> int:
        return len(self.whites)

    @property
    def roles(self) -> Counter:
        return Counter(t.role.value for t in self.tracks)

    @property
    def loop_free(self) -> bool:
        return all(t.role != TrackRole.LOOP for t in self.tracks)

    def row(self) -> str:
        roles = ",".join(f"{k}={v}" for k, v in sorted(self.roles.items()))
        return f"{self.label}\t{self.white_count}\t{roles}\t{' '.join(self.whites)}"


def component_census(c: Chart, m: int) -> list[ComponentCensus]:
    """Connected components of Γ_m with their white counts and track roles."""
    graph = nx.MultiGraph()
    for track in tracks_of_label(c, m):
        if track.closed:
            graph.add_node(("closed", track.key), tracks=[track])
        else:
            graph.add_edge(track.start, track.end, key=track.key, track=track)
    out = []
    for part in nx.connected_components(graph):
        whites, tracks = [], []
        for node in part:
            if isinstance(node, tuple):
                tracks.extend(graph.nodes[node]["tracks"])
            elif c.vertices[node].kind == VertexKind.WHITE:
                whites.append(node)
        for _, _, data in graph.subgraph(part).edges(data=True):
            tracks.append(data["track"])
        tracks.sort(key=lambda t: t.key)
        out.append(ComponentCensus(m, tuple(sorted(whites)), tuple(tracks)))
    out.sort(key=lambda comp: (comp.whites, comp.tracks[0].key))
    return out


def _track_end(c: Chart, end: EdgeEnd) -> EdgeEnd:
    track = track_of_edge(c, end.edge)
    return EdgeEnd(track.key, TAIL if end == track.first_end else HEAD)


def component_shape(c: Chart, comp: ComponentCensus) -> str:
    """Code of a Γ_m component up to reflection and orientation reversal.

    Tracks collapse to single edges; ends of other labels at the white
    vertices become stubs so the middle arcs stay visible.
    """
    vertices: dict[str, Vertex] = {}
    edges: dict[str, Edge] = {}
    for track in comp.tracks:
        if track.closed:
            raise ChartError(f"component of {track} is not loop-free and open")
        edges[track.key] = Edge(track.key, 1, track.start, track.end)
    for track in comp.tracks:
        for v in track.endpoints:
            if v in vertices:
                continue
            rotation = []
            for i, end in enumerate(c.vertices[v].rotation):
                if c.label(end) == comp.label:
                    rotation.append(_track_end(c, end))
                    continue
                stub, tip = f"{v}~{i}", f"{v}~{i}:b"
                if end.inward:
                    edges[stub] = Edge(stub, 0, tip, v)
                    rotation.append(EdgeEnd(stub, HEAD))
                else:
                    edges[stub] = Edge(stub, 0, v, tip)
                    rotation.append(EdgeEnd(stub, TAIL))
                vertices[tip] = Vertex(tip, VertexKind.BLACK, (EdgeEnd(stub, TAIL if end.inward else HEAD),))
            vertices[v] = Vertex(v, c.vertices[v].kind, tuple(rotation))
    shape = assemble(f"shape:{comp.label}", 2, vertices, edges)
    return min(canonical_digest(variant) for _, variant in ro_family(shape))


# -- chart types -------------------------------------------------------------


@dataclass(frozen=True)
class TypeSignature:
    m: int
    counts: tuple[int, ...]
    gapped: bool = False

    @property
    def white_count(self) -> int:
        return sum(self.counts)

    def __str__(self) -> str:
        return f"({self.m}; {', '.join(map(str, self.counts))})"


@dataclass(frozen=True)
class SignaturePattern:
    """Counts to match; ``m`` of None matches any base label."""

    counts: tuple[int, ...]
    m: Optional[int] = None
    allow_flip: bool = True

    @classmethod
    def parse(cls, text: str) -> "SignaturePattern":
        body = text.strip().strip("()")
        m = None
        if ";" in body:
            head, body = body.split(";", 1)
            head = head.strip()
            if head not in ("", ".", "·"):
                m = int(head)
        counts = tuple(int(x) for x in body.replace(" ", "").split(",") if x)
        if not counts:
            raise ValueError(f"empty type pattern {text!r}")
        return cls(counts, m)

    def matches(self, sig: Optional[TypeSignature]) -> bool:
        if sig is None:
            return False
        if self.m is not None and sig.m != self.m:
            return False
        if sig.counts == self.counts:
            return True
        return self.allow_flip and tuple(reversed(sig.counts)) == self.counts

    def __str__(self) -> str:
        return f"({'·' if self.m is None else self.m}; {', '.join(map(str, self.counts))})"


def white_base(c: Chart, vertex: str) -> int:
    return min(c.label(e) for e in c.vertices[vertex].rotation)


def chart_type(c: Chart) -> Optional[TypeSignature]:
    """Type of the working chart, or None when it has no white vertex."""
    work = working_chart(c)
    bases = Counter(white_base(work, v.id) for v in work.vertices_of_kind(VertexKind.WHITE))
    if not bases:
        return None
    m, top = min(bases), max(bases)
    counts = tuple(bases.get(b, 0) for b in range(m, top + 1))
    return TypeSignature(m, counts, gapped=0 in counts)


# -- local structure at white vertices --------------------------------------


@dataclass(frozen=True)
class WhiteStructure:
    vertex: str
    base: int
    rotation: tuple[EdgeEnd, ...]
    middle_in: EdgeEnd
    middle_out: EdgeEnd

    def position(self, end: EdgeEnd) -> int:
        return self.rotation.index(end)

    def flanking(self, end: EdgeEnd) -> tuple[EdgeEnd, EdgeEnd]:
        """(a, b) with a, end, b counterclockwise around the vertex."""
        p = self.position(end)
        return self.rotation[(p - 1) % 6], self.rotation[(p + 1) % 6]

    def is_middle(self, end: EdgeEnd) -> bool:
        return end in (self.middle_in, self.middle_out)

    def middle_of_label(self, c: Chart, m: int) -> EdgeEnd:
        return next(e for e in (self.middle_in, self.middle_out) if c.label(e) == m)

    def ends_of_label(self, c: Chart, m: int) -> list[EdgeEnd]:
        return [e for e in self.rotation if c.label(e) == m]


def white_local_structure(c: Chart, w: str) -> WhiteStructure:
    vertex = c.vertices.get(w)
    if vertex is None or vertex.kind != VertexKind.WHITE:
        raise ChartError(f"{w} is not a white vertex")
    rot = vertex.rotation
    inward = [e.inward for e in rot]
    for s in range(6):
        if all(inward[(s + k) % 6] for k in range(3)) and not any(inward[(s + k) % 6] for k in range(3, 6)):
            return WhiteStructure(w, white_base(c, w), rot, rot[(s + 1) % 6], rot[(s + 4) % 6])
    raise ChartError(f"white vertex {w} violates condition (iii)")


def is_bw_vertex(c: Chart, w: str, m: int) -> bool:
    """A white vertex one of whose label-m edges is a terminal edge."""
    ws = white_local_structure(c, w)
    return any(track_of_edge(c, e.edge).role == TrackRole.TERMINAL for e in ws.ends_of_label(c, m))


def bw_orientation_ok(c: Chart, w: str, m: int) -> bool:
    """Non-terminal label-m edges at a BW-vertex point the same way."""
    ws = white_local_structure(c, w)
    others = [e for e in ws.ends_of_label(c, m) if track_of_edge(c, e.edge).role != TrackRole.TERMINAL]
    if len(others) != 2:
        return True
    return others[0].inward == others[1].inward
