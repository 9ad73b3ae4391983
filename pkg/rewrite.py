"""
Local rewriting of charts: sites, pseudo charts and the stitch engine.

A site is a disk in the sphere meeting the chart in a known way: it holds a
set of vertices with the edges between them, and the chart crosses its
boundary at ports, listed counterclockwise. A pseudo chart is the content
that replaces the inside of the disk. Its edges end at fragment vertices or
at ports ``@0 .. @n-1``.

Replacement cuts every edge at its ports, drops the inside, glues the
fragment onto the cut ends and smooths the joints away. Faces outside the
disk keep their regions, so nested components and the point at infinity are
carried over through face links.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

import networkx as nx

from chart_format import Token, _Document, key_values, parse_int, tokenize
from chart_map import (
    HEAD,
    TAIL,
    CapExceeded,
    Chart,
    ChartError,
    ChartParseError,
    Edge,
    EdgeEnd,
    FaceRef,
    Vertex,
    VertexKind,
    assemble,
    face_ref_for,
    free_strands,
    vertex_violation,
)

logger = logging.getLogger(__name__)

PORT = "@"
C_I_KINDS = frozenset({"CI-generic", "CI-M1", "CI-M2", "CI-R2", "CI-R3", "CI-M4"})
RULE_KINDS = frozenset({"CI-generic", "CI-M4", "CutEdge-macro"})

_PREFIX = {
    VertexKind.WHITE: "w",
    VertexKind.BLACK: "b",
    VertexKind.CROSSING: "x",
    VertexKind.ANCHOR: "a",
}


class MoveError(ChartError):
    """A move could not be applied."""


class StaleSiteError(MoveError):
    """The chart no longer has the site an instance was computed on."""


class IllegalMoveError(MoveError):
    """The replacement would break an axiom or cannot be placed."""


class RuleFileError(ChartError):
    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{path}: {message}")


def port_node(index: int) -> str:
    return f"{PORT}{index}"


def port_index(node: str) -> Optional[int]:
    if node.startswith(PORT) and node[1:].isdigit():
        return int(node[1:])
    return None


# -- sites ------------------------------------------------------------------


@dataclass(frozen=True)
class Port:
    """One crossing of the site boundary.

    ``slot`` numbers the crossings of ``edge`` from its tail; ``entering``
    is true when the edge, read from tail to head, goes into the disk here.
    ``dart`` is the host end or dart the port was read from.
    """

    index: int
    edge: str
    slot: int
    entering: bool
    label: int
    dart: Optional[EdgeEnd] = None

    @property
    def pattern(self) -> tuple[int, bool]:
        return self.label, self.entering


@dataclass(frozen=True)
class Site:
    vertices: tuple[str, ...]
    interior: tuple[str, ...]
    ports: tuple[Port, ...]
    checksum: str

    @property
    def touched(self) -> set[str]:
        return {p.edge for p in self.ports}

    @property
    def pattern(self) -> tuple[tuple[int, bool], ...]:
        return tuple(p.pattern for p in self.ports)

    def port_at(self, dart: EdgeEnd) -> int:
        for port in self.ports:
            if port.dart == dart:
                return port.index
        raise KeyError(dart)


def site_checksum(c: Chart, vertices, interior, ports) -> str:
    h = hashlib.sha1()
    for vid in sorted(vertices):
        v = c.vertices[vid]
        h.update(repr((vid, v.kind.value, v.rotation)).encode())
    for eid in sorted(set(interior) | {p.edge for p in ports}):
        e = c.edges[eid]
        h.update(repr((eid, e.label, e.tail, e.head)).encode())
    for p in ports:
        h.update(repr((p.edge, p.slot, p.entering)).encode())
    return h.hexdigest()


def site_is_current(c: Chart, site: Site) -> bool:
    try:
        return site_checksum(c, site.vertices, site.interior, site.ports) == site.checksum
    except KeyError:
        return False


def make_site(c: Chart, vertices, interior, ports) -> Site:
    """Fix port indices in the given counterclockwise order and seal the site."""
    ports = tuple(replace(p, index=i) for i, p in enumerate(ports))
    vertices, interior = tuple(sorted(vertices)), tuple(sorted(interior))
    return Site(vertices, interior, ports, site_checksum(c, vertices, interior, ports))


def end_port(c: Chart, end: EdgeEnd, inside: set[str]) -> Port:
    """The port where the edge of ``end`` leaves the vertex holding ``end``."""
    edge = c.edges[end.edge]
    if end.end == TAIL:
        return Port(-1, edge.id, 0, False, edge.label, end)
    crossings = (edge.tail in inside) + (edge.head in inside)
    return Port(-1, edge.id, crossings - 1, True, edge.label, end)


def pass_ports(c: Chart, dart: EdgeEnd) -> tuple[Port, Port]:
    """Entry and exit ports, in the direction of ``dart``, of a disk the dart passes through."""
    edge = c.edges[dart.edge]
    first = Port(-1, edge.id, 0, True, edge.label, dart)
    second = Port(-1, edge.id, 1, False, edge.label, dart.opposite)
    return (first, second) if dart.end == TAIL else (second, first)


def vertex_site(c: Chart, vertices, interior) -> Optional[Site]:
    """The disk around ``vertices`` and ``interior``, or None when that is no disk.

    Bounded faces of the subgraph must be empty faces of the chart; exactly
    one face of the subgraph may see the rest of the chart.
    """
    inside, inner = set(vertices), set(interior)
    if not inside or not inside <= set(c.vertices):
        return None
    for eid in inner:
        e = c.edges.get(eid)
        if e is None or e.tail not in inside or e.head not in inside:
            return None
    graph = nx.MultiGraph()
    graph.add_nodes_from(inside)
    graph.add_edges_from((c.edges[e].tail, c.edges[e].head) for e in inner)
    if not nx.is_connected(graph):
        return None
    topo = c.topology
    if not inner:
        (vid,) = inside
        ports = [end_port(c, end, inside) for end in c.vertices[vid].rotation]
        return make_site(c, inside, inner, ports)

    sub = {vid: [x for x in c.vertices[vid].rotation if x.edge in inner] for vid in inside}

    def sub_pred(x: EdgeEnd) -> EdgeEnd:
        rot = sub[topo.vertex_of[x]]
        return rot[(rot.index(x) - 1) % len(rot)]

    seen: set[EdgeEnd] = set()
    outer: Optional[list[EdgeEnd]] = None
    for vid in sorted(inside):
        for start in sub[vid]:
            if start in seen:
                continue
            collected: list[EdgeEnd] = []
            x = start
            while x not in seen:
                seen.add(x)
                o = x.opposite
                y = sub_pred(o)
                z = topo.succ(y)
                while z != o:
                    collected.append(z)
                    z = topo.succ(z)
                x = y
            if collected:
                if outer is not None:
                    return None
                outer = collected
                continue
            fid = topo.face_of[start]
            region = topo.faces[fid].region
            if len(topo.region_members[region]) > 1:
                return None
    if outer is None:
        return None
    return make_site(c, inside, inner, [end_port(c, end, inside) for end in outer])


# -- pseudo charts ------------------------------------------------------------


@dataclass(frozen=True)
class PseudoChart:
    """Disk content whose edges may end at ports ``@k``."""

    vertices: dict[str, Vertex]
    edges: dict[str, Edge]
    ports: int

    def attachment(self, k: int) -> EdgeEnd:
        """The edge-end of the fragment edge meeting port ``k``."""
        node = port_node(k)
        for e in self.edges.values():
            if e.tail == node:
                return EdgeEnd(e.id, TAIL)
            if e.head == node:
                return EdgeEnd(e.id, HEAD)
        raise KeyError(k)

    @property
    def pattern(self) -> tuple[tuple[int, bool], ...]:
        out = []
        for k in range(self.ports):
            end = self.attachment(k)
            out.append((self.edges[end.edge].label, end.end == TAIL))
        return tuple(out)

    def count(self, kind: VertexKind) -> int:
        return sum(1 for v in self.vertices.values() if v.kind == kind)

    def shifted(self, shift: int) -> "PseudoChart":
        if not shift:
            return self
        edges = {eid: replace(e, label=e.label + shift) for eid, e in self.edges.items()}
        return replace(self, edges=edges)

    def renumbered(self, offset: int) -> "PseudoChart":
        """Port ``k`` becomes port ``k + offset`` (mod the port count)."""
        if not offset or not self.ports:
            return self

        def move(node: str) -> str:
            k = port_index(node)
            return node if k is None else port_node((k + offset) % self.ports)

        edges = {eid: replace(e, tail=move(e.tail), head=move(e.head)) for eid, e in self.edges.items()}
        return replace(self, edges=edges)

    def reflected(self) -> "PseudoChart":
        n = self.ports

        def move(node: str) -> str:
            k = port_index(node)
            return node if k is None else port_node(-k % n)

        vertices = {vid: replace(v, rotation=tuple(reversed(v.rotation))) for vid, v in self.vertices.items()}
        edges = {eid: replace(e, tail=move(e.tail), head=move(e.head)) for eid, e in self.edges.items()}
        return PseudoChart(vertices, edges, n)

    def reversed(self) -> "PseudoChart":
        vertices = {
            vid: replace(v, rotation=tuple(x.opposite for x in v.rotation)) for vid, v in self.vertices.items()
        }
        edges = {eid: replace(e, tail=e.head, head=e.tail) for eid, e in self.edges.items()}
        return PseudoChart(vertices, edges, self.ports)

    def flipped(self) -> "PseudoChart":
        edges = {eid: replace(e, label=-e.label) for eid, e in self.edges.items()}
        return replace(self, edges=edges)

    def key(self) -> tuple:
        return (
            tuple(sorted((vid, v.kind.value, v.rotation) for vid, v in self.vertices.items())),
            tuple(sorted((e.id, e.label, e.tail, e.head) for e in self.edges.values())),
            self.ports,
        )


def fragment_problems(fragment: PseudoChart) -> list[str]:
    """Reasons a pseudo chart cannot be glued into any site."""
    out = []
    owner: dict[EdgeEnd, str] = {}
    for vertex in fragment.vertices.values():
        for end in vertex.rotation:
            edge = fragment.edges.get(end.edge)
            if edge is None:
                out.append(f"{vertex.id}: unknown edge {end.edge}")
            elif edge.vertex_at(end.end) != vertex.id:
                out.append(f"{vertex.id}: edge-end {end} belongs elsewhere")
            elif end in owner:
                out.append(f"{vertex.id}: edge-end {end} listed twice")
            owner[end] = vertex.id
    used: list[int] = []
    for edge in fragment.edges.values():
        for end in (TAIL, HEAD):
            node = edge.vertex_at(end)
            k = port_index(node)
            if k is not None:
                used.append(k)
            elif node not in fragment.vertices:
                out.append(f"{edge.id}: unknown endpoint {node}")
            elif EdgeEnd(edge.id, end) not in owner:
                out.append(f"{edge.id}: end {end} missing from the rotation of {node}")
    if sorted(used) != list(range(fragment.ports)):
        out.append(f"ports used {sorted(used)}, expected each of 0..{fragment.ports - 1} once")
    if out:
        return out
    scratch = Chart("fragment", 2, dict(fragment.vertices), dict(fragment.edges))
    for vertex in fragment.vertices.values():
        problem = vertex_violation(scratch, vertex)
        if problem:
            out.append(f"{vertex.id}: ({problem[0]}) {problem[1]}")
    graph = nx.MultiGraph()
    graph.add_nodes_from(fragment.vertices)
    graph.add_nodes_from(port_node(k) for k in range(fragment.ports))
    graph.add_edges_from((e.tail, e.head) for e in fragment.edges.values())
    for part in nx.connected_components(graph):
        if not any(port_index(node) is not None for node in part):
            out.append(f"component {sorted(part)} does not reach the boundary")
    return out


# -- the stitch engine -------------------------------------------------------


@dataclass
class Replacement:
    chart: Chart
    delta: tuple[int, int]
    vertex_ids: dict[str, str] = field(default_factory=dict)
    edge_ids: dict[str, str] = field(default_factory=dict)


def fresh_id(prefix: str, taken: set[str]) -> str:
    n = 1
    while f"{prefix}{n}" in taken:
        n += 1
    taken.add(f"{prefix}{n}")
    return f"{prefix}{n}"


class _Stitch:
    """Mutable working copy used while one replacement is glued in."""

    def __init__(self, c: Chart, site: Site, fragment: PseudoChart):
        self.c = c
        self.site = site
        self.fragment = fragment
        self.inside = set(site.vertices)
        self.inner = set(site.interior)
        self.rot: dict[str, list[EdgeEnd]] = {}
        self.kind: dict[str, Optional[VertexKind]] = {}
        self.ends: dict[str, list] = {}
        self.origin: dict[str, list[str]] = {}
        self.alias: dict[str, str] = {}
        self.outer_piece: dict[int, str] = {}
        self.first_piece: dict[str, str] = {}
        self.counter = 0

    def check_ports(self) -> None:
        site, fragment = self.site, self.fragment
        if fragment.ports != len(site.ports):
            raise IllegalMoveError(f"fragment has {fragment.ports} ports, site has {len(site.ports)}")
        for port in site.ports:
            end = fragment.attachment(port.index)
            label = fragment.edges[end.edge].label
            if label != port.label or (end.end == TAIL) != port.entering:
                raise IllegalMoveError(f"port {port.index} on {port.edge} does not match the fragment")

    def cut(self) -> None:
        c, inside = self.c, self.inside
        for vid, v in c.vertices.items():
            if vid not in inside:
                self.rot[vid] = list(v.rotation)
                self.kind[vid] = v.kind
        by_edge: dict[str, list[Port]] = {}
        for port in self.site.ports:
            by_edge.setdefault(port.edge, []).append(port)
        for eid, e in c.edges.items():
            if eid in self.inner or eid in by_edge:
                continue
            self.ends[eid] = [e.label, e.tail, e.head]
            self.origin[eid] = [eid]
        for eid, ports in by_edge.items():
            ports.sort(key=lambda p: p.slot)
            e = c.edges[eid]
            pieces = [f"~{eid}~{j}" for j in range(len(ports) + 1)]
            joints = [f"~j{p.index}" for p in ports]
            nodes = [e.tail, *joints, e.head]
            inside_piece = [e.tail in inside] + [p.entering for p in ports]
            for joint in joints:
                self.rot[joint] = []
                self.kind[joint] = None
            for j, piece in enumerate(pieces):
                if inside_piece[j]:
                    continue
                self.ends[piece] = [e.label, nodes[j], nodes[j + 1]]
                self.origin[piece] = [eid]
                self.first_piece.setdefault(eid, piece)
                if j == 0:
                    self._swap(e.tail, EdgeEnd(eid, TAIL), EdgeEnd(piece, TAIL))
                else:
                    self.rot[nodes[j]].append(EdgeEnd(piece, TAIL))
                    self.outer_piece[ports[j - 1].index] = piece
                if j == len(ports):
                    self._swap(e.head, EdgeEnd(eid, HEAD), EdgeEnd(piece, HEAD))
                else:
                    self.rot[nodes[j + 1]].append(EdgeEnd(piece, HEAD))
                    self.outer_piece[ports[j].index] = piece

    def _swap(self, vid: str, old: EdgeEnd, new: EdgeEnd) -> None:
        rot = self.rot[vid]
        rot[rot.index(old)] = new

    def glue(self) -> None:
        fragment = self.fragment
        for vid, v in fragment.vertices.items():
            self.rot[f"~v~{vid}"] = [EdgeEnd(f"~f~{x.edge}", x.end) for x in v.rotation]
            self.kind[f"~v~{vid}"] = v.kind
        for eid, e in fragment.edges.items():
            temp = f"~f~{eid}"
            nodes = []
            for end in (TAIL, HEAD):
                node = e.vertex_at(end)
                k = port_index(node)
                if k is None:
                    nodes.append(f"~v~{node}")
                else:
                    nodes.append(f"~j{k}")
                    self.rot[f"~j{k}"].append(EdgeEnd(temp, end))
            self.ends[temp] = [e.label, nodes[0], nodes[1]]
            self.origin[temp] = []

    def smooth(self, vid: str) -> None:
        a, b = self.rot[vid]
        x_end, y_end = (a, b) if a.end == HEAD else (b, a)
        if x_end.end != HEAD or y_end.end != TAIL:
            raise IllegalMoveError(f"orientations disagree where the fragment meets {vid}")
        x, y = x_end.edge, y_end.edge
        if self.ends[x][0] != self.ends[y][0]:
            raise IllegalMoveError(f"labels disagree where the fragment meets {vid}")
        if x == y:
            self.kind[vid] = VertexKind.ANCHOR
            return
        self.counter += 1
        z = f"~z{self.counter}"
        label, tail, _ = self.ends[x]
        head = self.ends[y][2]
        self.ends[z] = [label, tail, head]
        self.origin[z] = self.origin[x] + self.origin[y]
        self._swap(tail, EdgeEnd(x, TAIL), EdgeEnd(z, TAIL))
        self._swap(head, EdgeEnd(y, HEAD), EdgeEnd(z, HEAD))
        for gone in (x, y):
            del self.ends[gone], self.origin[gone]
            self.alias[gone] = z
        del self.rot[vid], self.kind[vid]

    def resolve(self, temp: str) -> str:
        while temp in self.alias:
            temp = self.alias[temp]
        return temp

    def run(self, name: str) -> Replacement:
        c = self.c
        self.check_ports()
        self.cut()
        self.glue()
        for port in self.site.ports:
            self.smooth(f"~j{port.index}")
        touched = self.site.touched
        for vid in sorted(self.rot):
            if self.kind.get(vid) == VertexKind.ANCHOR and vid in c.vertices:
                ends = self.rot[vid]
                if ends[0].edge != ends[1].edge and {x.edge for x in c.vertices[vid].rotation} & touched:
                    self.smooth(vid)

        taken = set(c.vertices)
        reuse: dict[VertexKind, list[str]] = {}
        for vid in sorted(self.inside):
            reuse.setdefault(c.vertices[vid].kind, []).append(vid)
        vid_of: dict[str, str] = {}
        for temp in sorted(self.rot):
            if temp in c.vertices:
                vid_of[temp] = temp
                continue
            kind = self.kind[temp]
            pool = reuse.get(kind)
            vid_of[temp] = pool.pop(0) if pool else fresh_id(_PREFIX[kind], taken)

        claimed: set[str] = set()
        eid_of: dict[str, str] = {}
        for temp in sorted(self.ends, key=lambda t: (not self.origin[t], t)):
            for eid in self.origin[temp]:
                if eid not in claimed:
                    claimed.add(eid)
                    eid_of[temp] = eid
                    break
        spare = sorted((self.inner | touched) - claimed)
        edge_taken = set(c.edges)
        for temp in sorted(self.ends):
            if temp not in eid_of:
                eid_of[temp] = spare.pop(0) if spare else fresh_id("e", edge_taken)

        vertices = {
            vid_of[temp]: Vertex(
                vid_of[temp],
                self.kind[temp],
                tuple(EdgeEnd(eid_of[x.edge], x.end) for x in rot),
            )
            for temp, rot in self.rot.items()
        }
        edges = {
            eid_of[temp]: Edge(eid_of[temp], label, vid_of[tail], vid_of[head])
            for temp, (label, tail, head) in self.ends.items()
        }

        links, infinity = self._links(eid_of)
        try:
            result = assemble(name, c.degree, vertices, edges, links, infinity)
        except ChartError as exc:
            raise IllegalMoveError(f"replacement cannot be placed: {exc}") from exc
        vertex_ids = {vid: vid_of[f"~v~{vid}"] for vid in self.fragment.vertices}
        edge_ids = {eid: eid_of[self.resolve(f"~f~{eid}")] for eid in self.fragment.edges}
        return Replacement(result, self._delta(result, eid_of), vertex_ids, edge_ids)

    def _new_dart(self, dart: EdgeEnd, eid_of: dict[str, str]) -> Optional[EdgeEnd]:
        if dart.edge in self.inner:
            return None
        temp = self.first_piece.get(dart.edge, dart.edge)
        return EdgeEnd(eid_of[self.resolve(temp)], dart.end)

    def _map_face(self, dart: EdgeEnd, eid_of) -> Optional[FaceRef]:
        topo = self.c.topology
        boundary = topo.faces[topo.face_of[dart]].boundary
        start = boundary.index(dart)
        for i in range(len(boundary)):
            mapped = self._new_dart(boundary[(start + i) % len(boundary)], eid_of)
            if mapped is not None:
                return face_ref_for(mapped)
        return None

    def _port_darts(self, index: int, eid_of) -> tuple[EdgeEnd, EdgeEnd]:
        """Outward and inward darts of the edge through port ``index``."""
        port = self.site.ports[index]
        z = eid_of[self.resolve(self.outer_piece[index])]
        if port.entering:
            return EdgeEnd(z, HEAD), EdgeEnd(z, TAIL)
        return EdgeEnd(z, TAIL), EdgeEnd(z, HEAD)

    def _links(self, eid_of) -> tuple[list[tuple[FaceRef, FaceRef]], Optional[FaceRef]]:
        c = self.c
        topo = c.topology
        links: list[tuple[FaceRef, FaceRef]] = []
        for members in topo.region_members:
            refs = []
            for _, fid in members:
                ref = self._map_face(topo.faces[fid].boundary[0], eid_of)
                if ref is not None:
                    refs.append(ref)
            links.extend((refs[0], other) for other in refs[1:])
        n = len(self.site.ports)
        for i in range(n):
            outward, _ = self._port_darts(i, eid_of)
            _, inward = self._port_darts((i + 1) % n, eid_of)
            links.append((face_ref_for(outward), face_ref_for(inward)))
        infinity = None
        if c.infinity is not None:
            infinity = self._map_face(c.infinity.dart, eid_of)
            if infinity is None and n:
                infinity = face_ref_for(self._port_darts(0, eid_of)[0])
        return links, infinity

    def _delta(self, result: Chart, eid_of) -> tuple[int, int]:
        c = self.c
        whites = self.fragment.count(VertexKind.WHITE) - sum(
            1 for vid in self.inside if c.vertices[vid].kind == VertexKind.WHITE
        )
        old_edges = self.inner | self.site.touched
        old_free = sum(1 for strand in free_strands(c) if old_edges.intersection(strand))
        new_edges = {eid_of[temp] for temp, origin in self.origin.items() if origin != [temp]}
        new_free = sum(1 for strand in free_strands(result) if new_edges.intersection(strand))
        return whites, new_free - old_free


def stitch(c: Chart, site: Site, fragment: PseudoChart, name: Optional[str] = None) -> Replacement:
    """Replace the inside of ``site`` by ``fragment``.

    Fragment port ``k`` is glued to site port ``k``. The returned delta is
    (change in white vertices, change in free edges) read off the site.
    """
    if not site_is_current(c, site):
        raise StaleSiteError("site checksum does not match the chart")
    if not site.ports:
        raise IllegalMoveError("a site without ports cannot be rewritten")
    return _Stitch(c, site, fragment).run(name or c.name)


# -- rule files ----------------------------------------------------------------


class _FragmentDocument(_Document):
    """Chart statements whose edges may start or end at ports ``@k``."""

    def _st_embed(self, head: Token, rest: list[Token]) -> None:
        raise head.fail("embed is not allowed inside a rule fragment")

    def _st_inf(self, head: Token, rest: list[Token]) -> None:
        raise head.fail("inf is not allowed inside a rule fragment")

    def _st_chart(self, head: Token, rest: list[Token]) -> None:
        raise head.fail("chart header is not allowed inside a rule fragment")

    def fragment(self, ports: int) -> PseudoChart:
        for edge, tok in self.edges.values():
            for node in (edge.tail, edge.head):
                k = port_index(node)
                if k is None and node not in self.kinds:
                    raise tok.fail(f"edge {edge.id} refers to unknown vertex {node!r}")
                if k is not None and k >= ports:
                    raise tok.fail(f"edge {edge.id} uses port {k} of a {ports}-port boundary")
        for vid, (ends, toks) in self.rotations.items():
            if vid not in self.kinds:
                raise toks[0].fail(f"rotation for unknown vertex {vid!r}")
            for end, tok in zip(ends, toks[1:]):
                if end.edge not in self.edges:
                    raise tok.fail(f"rotation refers to unknown edge {end.edge!r}")
        vertices = {
            vid: Vertex(vid, kind, tuple(self.rotations.get(vid, ([], []))[0]))
            for vid, (kind, _) in self.kinds.items()
        }
        edges = {eid: edge for eid, (edge, _) in self.edges.items()}
        return PseudoChart(vertices, edges, ports)


@dataclass(frozen=True)
class Rule:
    """A before/after pair of pseudo charts with the same boundary.

    Labels in rule files are relative: a rule matches wherever all its labels
    fit after one common shift.
    """

    name: str
    kind: str
    before: PseudoChart
    after: PseudoChart
    source: str = "catalog"
    path: str = ""

    def variants(self) -> list[tuple[str, PseudoChart, PseudoChart]]:
        out = []
        seen = set()
        for base, op in (
            ("identity", lambda f: f),
            ("reflection", PseudoChart.reflected),
            ("reversal", PseudoChart.reversed),
            ("reflection+reversal", lambda f: f.reversed().reflected()),
        ):
            for flip in (False, True):
                before, after = op(self.before), op(self.after)
                if flip:
                    before, after = before.flipped(), after.flipped()
                key = (before.key(), after.key())
                if key in seen:
                    continue
                seen.add(key)
                out.append((base + ("+flip" if flip else ""), before, after))
        return out


def rule_problems(rule: Rule) -> list[str]:
    out = [f"before: {p}" for p in fragment_problems(rule.before)]
    out += [f"after: {p}" for p in fragment_problems(rule.after)]
    if rule.before.ports != rule.after.ports:
        out.append("before and after have different port counts")
    if out:
        return out
    if rule.before.pattern != rule.after.pattern:
        out.append("boundary intersection patterns differ")
    if rule.kind in C_I_KINDS:
        for side, frag in (("before", rule.before), ("after", rule.after)):
            if frag.count(VertexKind.BLACK):
                out.append(f"{side}: a C-I disk may not hold a black vertex")
        if not rule.before.vertices:
            out.append("before: needs at least one vertex")
        if any(port_index(e.tail) is not None and port_index(e.head) is not None for e in rule.before.edges.values()):
            out.append("before: edges must meet a vertex of the fragment")
    return out


@dataclass(frozen=True)
class RuleBook:
    rules: tuple[Rule, ...]
    digest: str

    def of_kind(self, kind: str) -> list[Rule]:
        return [r for r in self.rules if r.kind == kind]


def parse_rules(text: str, path: str = "<rules>") -> list[Rule]:
    rules: list[Rule] = []
    current: Optional[dict] = None

    def finish() -> None:
        if current is None:
            return
        if current["ports"] is None:
            raise RuleFileError(path, f"rule {current['name']} has no boundary line")
        for side in ("before", "after"):
            if current[side] is None:
                raise RuleFileError(path, f"rule {current['name']} has no {side} section")
        try:
            before = current["before"].fragment(current["ports"])
            after = current["after"].fragment(current["ports"])
        except ChartParseError as exc:
            raise RuleFileError(path, str(exc)) from exc
        rule = Rule(current["name"], current["kind"], before, after, current["source"], path)
        problems = rule_problems(rule)
        if problems:
            raise RuleFileError(path, f"rule {rule.name}: " + "; ".join(problems))
        rules.append(rule)

    try:
        for tokens in tokenize(text):
            head, rest = tokens[0], tokens[1:]
            if head.text == "rule":
                finish()
                if not rest:
                    raise head.fail("rule needs a name")
                kv = key_values(rest[1:], {"kind"}, {"source"})
                if kv["kind"].text not in RULE_KINDS:
                    raise kv["kind"].fail(f"rule kind must be one of {sorted(RULE_KINDS)}")
                source = kv["source"].text if "source" in kv else "catalog"
                current = {"name": rest[0].text, "kind": kv["kind"].text, "source": source,
                           "ports": None, "before": None, "after": None, "doc": None}
            elif current is None:
                raise head.fail("statement before the first rule header")
            elif head.text == "boundary":
                if len(rest) != 3 or [t.text for t in rest[1:]] != ["attachment", "points"]:
                    raise head.fail("expected: boundary <n> attachment points")
                current["ports"] = parse_int(rest[0])
            elif head.text in ("before", "after"):
                if rest:
                    raise rest[0].fail(f"{head.text} takes no arguments")
                current[head.text] = current["doc"] = _FragmentDocument()
            elif current["doc"] is None:
                raise head.fail("fragment statement outside a before or after section")
            else:
                current["doc"].statement(tokens)
        finish()
    except ChartParseError as exc:
        raise RuleFileError(path, str(exc)) from exc
    return rules


@lru_cache(maxsize=8)
def _load_rules(directory: str) -> RuleBook:
    root = Path(directory)
    if not root.is_dir():
        raise RuleFileError(root, "rules directory does not exist")
    digest = hashlib.sha1()
    rules: list[Rule] = []
    for path in sorted(root.glob("*.rule")):
        text = path.read_text(encoding="utf-8")
        digest.update(path.name.encode())
        digest.update(text.encode())
        rules.extend(parse_rules(text, str(path)))
    names = [r.name for r in rules]
    for name in names:
        if names.count(name) > 1:
            raise RuleFileError(root, f"rule name {name!r} is used twice")
    logger.info("loaded %d rules from %s", len(rules), root)
    return RuleBook(tuple(rules), digest.hexdigest())


def load_rules(directory) -> RuleBook:
    """Parse and check every ``*.rule`` file of ``directory``."""
    return _load_rules(str(Path(directory).resolve()))


# -- matching ------------------------------------------------------------------


@dataclass(frozen=True)
class RuleMatch:
    rule: Rule
    variant: str
    site: Site
    after: PseudoChart


def _embed_fragment(c: Chart, before: PseudoChart, root: str, host: str, offset: int):
    """Extend fragment vertex ``root`` at ``host`` (rotation offset) to a full embedding."""
    topo = c.topology
    vmap = {root: (host, offset)}
    used = {host}
    emap: dict[str, str] = {}
    port_end: dict[int, EdgeEnd] = {}
    shift: Optional[int] = None
    stack = [root]
    while stack:
        f = stack.pop()
        h, o = vmap[f]
        rotation = c.vertices[h].rotation
        for i, fe in enumerate(before.vertices[f].rotation):
            he = rotation[(i + o) % len(rotation)]
            if fe.end != he.end:
                return None
            s = c.label(he) - before.edges[fe.edge].label
            if shift is None:
                shift = s
            elif s != shift:
                return None
            if fe.edge in emap:
                if emap[fe.edge] != he.edge:
                    return None
                continue
            if he.edge in emap.values():
                return None
            emap[fe.edge] = he.edge
            other = before.edges[fe.edge].vertex_at(fe.opposite.end)
            k = port_index(other)
            if k is not None:
                port_end[k] = he
                continue
            ho = he.opposite
            g_host = topo.vertex_of[ho]
            j = before.vertices[other].rotation.index(fe.opposite)
            g_offset = (topo.position[ho] - j) % c.vertices[g_host].degree
            if other in vmap:
                if vmap[other] != (g_host, g_offset):
                    return None
                continue
            if g_host in used or c.vertices[g_host].kind != before.vertices[other].kind:
                return None
            vmap[other] = (g_host, g_offset)
            used.add(g_host)
            stack.append(other)
    if len(vmap) != len(before.vertices):
        return None
    inner = {emap[e.id] for e in before.edges.values() if port_index(e.tail) is None and port_index(e.head) is None}
    for k, he in port_end.items():
        if c.edges[he.edge].vertex_at(he.opposite.end) in used:
            return None
    return used, inner, port_end, shift or 0


def match_fragment(c: Chart, before: PseudoChart) -> Iterator[tuple[Site, int, int]]:
    """Sites of ``c`` holding ``before``: (site, port offset, label shift)."""
    root = min(before.vertices)
    kind = before.vertices[root].kind
    n = before.ports
    for host in sorted(c.vertices):
        vertex = c.vertices[host]
        if vertex.kind != kind:
            continue
        for offset in range(vertex.degree):
            found = _embed_fragment(c, before, root, host, offset)
            if found is None:
                continue
            used, inner, port_end, shift = found
            site = vertex_site(c, used, inner)
            if site is None or len(site.ports) != n:
                continue
            try:
                index = {k: site.port_at(end) for k, end in port_end.items()}
            except KeyError:
                continue
            r = index[0]
            if all(index[k] == (k + r) % n for k in range(n)):
                yield site, r, shift


def rule_matches(c: Chart, rule: Rule, cap: int) -> list[RuleMatch]:
    out: list[RuleMatch] = []
    seen = set()
    for variant, before, after in rule.variants():
        for site, offset, shift in match_fragment(c, before):
            placed = after.renumbered(offset).shifted(shift)
            key = (site.checksum, site.ports[0].edge, placed.key())
            if key in seen:
                continue
            seen.add(key)
            out.append(RuleMatch(rule, variant, site, placed))
            if len(out) > cap:
                raise CapExceeded(f"matches of rule {rule.name}", cap)
    return out


def fit_rule(site: Site, kinds: list[VertexKind], rule: Rule) -> list[RuleMatch]:
    """Variants of ``rule`` whose before side has the boundary and vertices of ``site``."""
    n = len(site.ports)
    out: list[RuleMatch] = []
    seen = set()
    for variant, before, after in rule.variants():
        if before.ports != n or sorted(v.kind.value for v in before.vertices.values()) != sorted(k.value for k in kinds):
            continue
        pattern = before.pattern
        for r in range(n):
            shift = site.ports[0].label - pattern[-r % n][0]
            if all(site.ports[i].pattern == (pattern[(i - r) % n][0] + shift, pattern[(i - r) % n][1]) for i in range(n)):
                placed = after.renumbered(r).shifted(shift)
                if placed.key() not in seen:
                    seen.add(placed.key())
                    out.append(RuleMatch(rule, variant, site, placed))
    return out
