"""
Charts as rotation systems on the 2-sphere.

A chart is a set of vertices, each carrying a counterclockwise rotation of
edge-ends, plus labeled oriented edges. Several connected components are
placed on the sphere through a containment tree: every non-root component
sits in one face of another component. The face holding the point at
infinity is recorded separately.

All values here are immutable; derived data (faces, components, regions)
lives on ``Chart.topology`` and is computed once per chart.
"""

from __future__ import annotations

import hashlib
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Optional

import networkx as nx

logger = logging.getLogger(__name__)

TAIL = "t"
HEAD = "h"
LEFT = "left"
RIGHT = "right"


class ChartError(Exception):
    """Base class for every error raised by chartforge."""


class ChartParseError(ChartError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


class CapExceeded(ChartError):
    """A configurable enumeration cap was hit."""

    def __init__(self, what: str, cap: int):
        self.what = what
        self.cap = cap
        super().__init__(f"{what} exceeded cap of {cap}")


class VertexKind(str, Enum):
    WHITE = "white"
    BLACK = "black"
    CROSSING = "cross"
    ANCHOR = "anchor"


DEGREE = {
    VertexKind.WHITE: 6,
    VertexKind.BLACK: 1,
    VertexKind.CROSSING: 4,
    VertexKind.ANCHOR: 2,
}


@dataclass(frozen=True, order=True)
class EdgeEnd:
    """One end of an edge. Read as a dart it leaves the vertex holding it."""

    edge: str
    end: str

    @property
    def opposite(self) -> "EdgeEnd":
        return EdgeEnd(self.edge, HEAD if self.end == TAIL else TAIL)

    @property
    def inward(self) -> bool:
        return self.end == HEAD

    def __str__(self) -> str:
        return f"{self.edge}.{self.end}"


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: VertexKind
    rotation: tuple[EdgeEnd, ...]

    @property
    def degree(self) -> int:
        return len(self.rotation)


@dataclass(frozen=True)
class Edge:
    id: str
    label: int
    tail: str
    head: str

    def vertex_at(self, end: str) -> str:
        return self.tail if end == TAIL else self.head


@dataclass(frozen=True, order=True)
class FaceRef:
    """A face named by an edge-end and a side.

    ``left`` is the face on the left of the dart that starts at this end;
    ``right`` is the face on the left of the reverse dart.
    """

    end: EdgeEnd
    side: str = LEFT

    @property
    def dart(self) -> EdgeEnd:
        return self.end if self.side == LEFT else self.end.opposite

    def __str__(self) -> str:
        return f"{self.end} {self.side}"


def face_ref_for(dart: EdgeEnd) -> FaceRef:
    return FaceRef(dart, LEFT)


@dataclass(frozen=True)
class Embedding:
    """Places the component of ``vertex`` inside a face of another component.

    ``host`` names the enclosing face; ``outer`` names the face of the nested
    component that looks out onto the host.
    """

    vertex: str
    host: FaceRef
    outer: FaceRef


@dataclass(frozen=True)
class Chart:
    name: str
    degree: int
    vertices: dict[str, Vertex] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)
    containment: tuple[Embedding, ...] = ()
    infinity: Optional[FaceRef] = None

    @cached_property
    def topology(self) -> "Topology":
        return Topology(self)

    @cached_property
    def memo(self) -> dict:
        """Per-chart store for structures derived by other modules."""
        return {}

    def label(self, end: EdgeEnd) -> int:
        return self.edges[end.edge].label

    def vertices_of_kind(self, kind: VertexKind) -> list[Vertex]:
        return [v for v in self.vertices.values() if v.kind == kind]

    @property
    def white_count(self) -> int:
        return sum(1 for v in self.vertices.values() if v.kind == VertexKind.WHITE)

    @property
    def is_empty(self) -> bool:
        return not self.vertices


@dataclass(frozen=True)
class Face:
    id: int
    boundary: tuple[EdgeEnd, ...]
    component: int
    region: int


@dataclass(frozen=True)
class Component:
    id: int
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    faces: tuple[int, ...]


class Topology:
    """Faces, components and the region tree of one chart."""

    def __init__(self, chart: Chart):
        self.chart = chart
        self.vertex_of: dict[EdgeEnd, str] = {}
        self.position: dict[EdgeEnd, int] = {}
        for vertex in chart.vertices.values():
            for i, end in enumerate(vertex.rotation):
                self.vertex_of[end] = vertex.id
                self.position[end] = i

        graph = nx.MultiGraph()
        graph.add_nodes_from(chart.vertices)
        for edge in chart.edges.values():
            if edge.tail in chart.vertices and edge.head in chart.vertices:
                graph.add_edge(edge.tail, edge.head, key=edge.id)
        parts = sorted((sorted(part) for part in nx.connected_components(graph)), key=lambda p: p[0])
        self.component_of: dict[str, int] = {}
        for index, part in enumerate(parts):
            for vid in part:
                self.component_of[vid] = index

        self.face_of: dict[EdgeEnd, int] = {}
        boundaries: list[tuple[EdgeEnd, ...]] = []
        for vid in sorted(chart.vertices):
            for start in chart.vertices[vid].rotation:
                if start in self.face_of:
                    continue
                walk = []
                dart = start
                while dart not in self.face_of:
                    self.face_of[dart] = len(boundaries)
                    walk.append(dart)
                    dart = self.next_dart(dart)
                boundaries.append(tuple(walk))

        parent = list(range(len(boundaries)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for emb in chart.containment:
            a = self.face_of.get(emb.host.dart)
            b = self.face_of.get(emb.outer.dart)
            if a is not None and b is not None:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        roots = sorted({find(f) for f in range(len(boundaries))})
        region_index = {r: i for i, r in enumerate(roots)}

        self.faces: list[Face] = []
        for fid, walk in enumerate(boundaries):
            comp = self.component_of[self.vertex_of[walk[0]]]
            self.faces.append(Face(fid, walk, comp, region_index[find(fid)]))

        self.components: list[Component] = []
        for index, part in enumerate(parts):
            members = set(part)
            edges = tuple(sorted(e.id for e in chart.edges.values() if e.tail in members))
            faces = tuple(f.id for f in self.faces if f.component == index)
            self.components.append(Component(index, tuple(part), edges, faces))

        self.region_members: list[list[tuple[int, int]]] = [[] for _ in roots]
        for face in self.faces:
            self.region_members[face.region].append((face.component, face.id))

    # -- dart navigation -------------------------------------------------

    def rotation_at(self, dart: EdgeEnd) -> tuple[EdgeEnd, ...]:
        return self.chart.vertices[self.vertex_of[dart]].rotation

    def succ(self, dart: EdgeEnd) -> EdgeEnd:
        rot = self.rotation_at(dart)
        return rot[(self.position[dart] + 1) % len(rot)]

    def pred(self, dart: EdgeEnd) -> EdgeEnd:
        rot = self.rotation_at(dart)
        return rot[(self.position[dart] - 1) % len(rot)]

    def next_dart(self, dart: EdgeEnd) -> EdgeEnd:
        """Next dart along the face lying on the left of ``dart``."""
        return self.pred(dart.opposite)

    def face_at(self, ref: FaceRef) -> int:
        return self.face_of[ref.dart]

    def region_at(self, ref: FaceRef) -> int:
        return self.faces[self.face_of[ref.dart]].region

    def component_at(self, dart: EdgeEnd) -> int:
        return self.component_of[self.vertex_of[dart]]

    @property
    def infinity_region(self) -> Optional[int]:
        if self.chart.infinity is None or self.chart.infinity.dart not in self.face_of:
            return None
        return self.region_at(self.chart.infinity)

    # -- nesting ----------------------------------------------------------

    def beyond(self, component: int, faces: Iterable[int]) -> set[int]:
        """Components lying on the far side of the given faces of ``component``."""
        seen_components = {component}
        seen_regions: set[int] = set()
        queue = deque(self.faces[f].region for f in faces)
        found: set[int] = set()
        while queue:
            region = queue.popleft()
            if region in seen_regions:
                continue
            seen_regions.add(region)
            for comp, _ in self.region_members[region]:
                if comp in seen_components:
                    continue
                seen_components.add(comp)
                found.add(comp)
                for f in self.components[comp].faces:
                    queue.append(self.faces[f].region)
        return found

    def vertices_beyond(self, component: int, faces: Iterable[int]) -> list[str]:
        out: list[str] = []
        for comp in sorted(self.beyond(component, faces)):
            out.extend(self.components[comp].vertices)
        return out


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: str
    message: str

    def __str__(self) -> str:
        return f"({self.condition})\t{self.witness}\t{self.message}"


# -- validation -------------------------------------------------------------


def _structural_violations(c: Chart) -> list[Violation]:
    out: list[Violation] = []
    seen: dict[EdgeEnd, str] = {}
    for vertex in c.vertices.values():
        for end in vertex.rotation:
            if end.edge not in c.edges:
                out.append(Violation("i", vertex.id, f"rotation lists unknown edge-end {end}"))
                continue
            if end in seen:
                out.append(Violation("i", vertex.id, f"edge-end {end} also listed at {seen[end]}"))
                continue
            seen[end] = vertex.id
            if c.edges[end.edge].vertex_at(end.end) != vertex.id:
                out.append(Violation("i", vertex.id, f"edge-end {end} belongs to another vertex"))
    for edge in c.edges.values():
        for end in (EdgeEnd(edge.id, TAIL), EdgeEnd(edge.id, HEAD)):
            if end not in seen:
                out.append(Violation("i", edge.id, f"edge-end {end} missing from every rotation"))
    return out


def _white_violation(c: Chart, vertex: Vertex) -> Optional[str]:
    labels = [c.label(e) for e in vertex.rotation]
    if max(labels) - min(labels) != 1:
        return f"labels {labels} do not alternate between two consecutive values"
    if any(labels[i] == labels[(i + 1) % 6] for i in range(6)):
        return f"labels {labels} do not alternate"
    inward = [e.inward for e in vertex.rotation]
    if sum(inward) != 3 or not any(all(inward[(s + k) % 6] for k in range(3)) for s in range(6)):
        return "inward ends are not three consecutive ends"
    if any(sum(1 for e in vertex.rotation if e.edge == x.edge) > 2 for x in vertex.rotation):
        return "an edge meets the vertex more than twice"
    return None


def _crossing_violation(c: Chart, vertex: Vertex) -> Optional[str]:
    rot = vertex.rotation
    for a, b in ((0, 2), (1, 3)):
        if c.label(rot[a]) != c.label(rot[b]):
            return f"diagonal ends {rot[a]} and {rot[b]} have different labels"
        if rot[a].inward == rot[b].inward:
            return f"diagonal ends {rot[a]} and {rot[b]} are not coherently oriented"
    i, j = c.label(rot[0]), c.label(rot[1])
    if abs(i - j) <= 1:
        return f"crossing labels {i} and {j} differ by at most one"
    return None


def vertex_violation(c: Chart, vertex: Vertex) -> Optional[tuple[str, str]]:
    """Local axiom check of one vertex: (condition, message) or None."""
    if vertex.degree != DEGREE[vertex.kind]:
        return "i", f"{vertex.kind.value} vertex has degree {vertex.degree}"
    if vertex.kind == VertexKind.WHITE:
        problem = _white_violation(c, vertex)
        return ("iii", problem) if problem else None
    if vertex.kind == VertexKind.CROSSING:
        problem = _crossing_violation(c, vertex)
        return ("iv", problem) if problem else None
    if vertex.kind == VertexKind.ANCHOR:
        a, b = vertex.rotation
        if a.edge != b.edge or a.end == b.end:
            return "i", "anchor ends do not belong to one closed edge"
    return None


def validate(c: Chart) -> list[Violation]:
    """Check the chart axioms. Returns an empty list for a valid chart."""
    out: list[Violation] = []
    if c.degree < 2:
        out.append(Violation("ii", c.name, f"degree {c.degree} is below 2"))
    for edge in sorted(c.edges.values(), key=lambda e: e.id):
        if not 1 <= edge.label <= c.degree - 1:
            out.append(Violation("ii", edge.id, f"label {edge.label} outside 1..{c.degree - 1}"))
        for vid in (edge.tail, edge.head):
            if vid not in c.vertices:
                out.append(Violation("i", edge.id, f"endpoint {vid} does not exist"))
    structural = _structural_violations(c)
    out.extend(structural)
    for vertex in sorted(c.vertices.values(), key=lambda v: v.id):
        if vertex.degree == DEGREE[vertex.kind]:
            if structural or any(e.edge not in c.edges for e in vertex.rotation):
                continue
        problem = vertex_violation(c, vertex)
        if problem:
            out.append(Violation(problem[0], vertex.id, problem[1]))
    if structural or any(v.degree == 0 for v in c.vertices.values()):
        return out
    out.extend(_embedding_violations(c))
    return out


def _embedding_violations(c: Chart) -> list[Violation]:
    out: list[Violation] = []
    topo = c.topology
    for comp in topo.components:
        v, e, f = len(comp.vertices), len(comp.edges), len(comp.faces)
        if v - e + f != 2:
            out.append(Violation("euler", comp.vertices[0], f"V - E + F = {v - e + f} for this component"))

    placed: dict[int, Embedding] = {}
    for emb in c.containment:
        refs_ok = emb.vertex in c.vertices and emb.host.dart in topo.face_of and emb.outer.dart in topo.face_of
        if not refs_ok:
            out.append(Violation("containment", emb.vertex, "embedding refers to a missing vertex or edge-end"))
            continue
        child = topo.component_of[emb.vertex]
        if topo.component_at(emb.outer.dart) != child:
            out.append(Violation("containment", emb.vertex, "outer face does not belong to the nested component"))
        if topo.component_at(emb.host.dart) == child:
            out.append(Violation("containment", emb.vertex, "component is embedded in its own face"))
        if child in placed:
            out.append(Violation("containment", emb.vertex, "component is embedded twice"))
        placed[child] = emb
    if out:
        return out

    ncomp = len(topo.components)
    if ncomp:
        tree = nx.Graph()
        tree.add_nodes_from(("c", i) for i in range(ncomp))
        tree.add_nodes_from(("r", i) for i in range(len(topo.region_members)))
        for face in topo.faces:
            tree.add_edge(("c", face.component), ("r", face.region), face=face.id)
        if tree.number_of_edges() != len(topo.faces) or not nx.is_tree(tree):
            out.append(Violation("containment", c.name, "components and regions do not form a tree"))

    if c.is_empty:
        if c.infinity is not None:
            out.append(Violation("infinity", c.name, "empty chart must have infinity everywhere"))
    elif c.infinity is None:
        out.append(Violation("infinity", c.name, "non-empty chart needs an infinity face"))
    elif c.infinity.dart not in topo.face_of:
        out.append(Violation("infinity", str(c.infinity), "infinity refers to a missing edge-end"))
    return out


def compute_faces(c: Chart) -> list[Face]:
    return list(c.topology.faces)


# -- canonical code ---------------------------------------------------------


class _CodeBuilder:
    def __init__(self, chart: Chart):
        self.chart = chart
        self.topo = chart.topology
        self._component_memo: dict[tuple[int, int], tuple] = {}
        self._region_memo: dict[tuple[int, Optional[int]], tuple] = {}

    def bfs(self, start: EdgeEnd) -> tuple[tuple, list[EdgeEnd]]:
        chart, topo = self.chart, self.topo
        first = topo.vertex_of[start]
        number = {first: 0}
        offset = {first: topo.position[start]}
        order = [first]
        darts: list[EdgeEnd] = []
        code = []
        i = 0
        while i < len(order):
            vid = order[i]
            i += 1
            vertex = chart.vertices[vid]
            k = vertex.degree
            entries = []
            for j in range(k):
                dart = vertex.rotation[(offset[vid] + j) % k]
                darts.append(dart)
                other = dart.opposite
                uid = topo.vertex_of[other]
                if uid not in number:
                    number[uid] = len(order)
                    offset[uid] = topo.position[other]
                    order.append(uid)
                pos = (topo.position[other] - offset[uid]) % chart.vertices[uid].degree
                entries.append((chart.label(dart), dart.end, number[uid], pos))
            code.append((vertex.kind.value, tuple(entries)))
        return tuple(code), darts

    def component(self, comp: int, via_face: int) -> tuple:
        key = (comp, via_face)
        if key in self._component_memo:
            return self._component_memo[key]
        best = None
        for start in self.topo.faces[via_face].boundary:
            bfs, darts = self.bfs(start)
            seen = {via_face}
            children = []
            for dart in darts:
                fid = self.topo.face_of[dart]
                if fid not in seen:
                    seen.add(fid)
                    children.append(self.region(self.topo.faces[fid].region, comp))
            candidate = (bfs, tuple(children))
            if best is None or candidate < best:
                best = candidate
        self._component_memo[key] = best
        return best

    def region(self, region: int, parent: Optional[int]) -> tuple:
        key = (region, parent)
        if key not in self._region_memo:
            members = [self.component(comp, fid) for comp, fid in self.topo.region_members[region] if comp != parent]
            self._region_memo[key] = ("R", tuple(sorted(members)))
        return self._region_memo[key]

    def unrooted(self) -> tuple:
        if not self.topo.region_members:
            return ("R", ())
        return min(self.region(r, None) for r in range(len(self.topo.region_members)))


def canonical_code(c: Chart) -> bytes:
    """Id-free code of the embedded chart. The infinity face is not part of it."""
    return repr(_CodeBuilder(c).unrooted()).encode("ascii")


def canonical_digest(c: Chart) -> str:
    return hashlib.sha1(canonical_code(c)).hexdigest()


def rooted_code(c: Chart, start: EdgeEnd) -> tuple:
    """Breadth-first code of the component of ``start`` read from that dart."""
    return _CodeBuilder(c).bfs(start)[0]


# -- complexity -------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Complexity:
    white_count: int
    neg_free_edges: int

    def __str__(self) -> str:
        return f"({self.white_count}, {self.neg_free_edges})"


def strand_from(c: Chart, end: EdgeEnd) -> tuple[list[str], str]:
    """Edges met walking from ``end`` straight on through crossings, and the vertex reached."""
    topo = c.topology
    edges = []
    dart = end
    while True:
        edges.append(dart.edge)
        arrival = dart.opposite
        vertex = c.vertices[topo.vertex_of[arrival]]
        if vertex.kind != VertexKind.CROSSING or len(edges) > len(c.edges):
            return edges, vertex.id
        dart = vertex.rotation[(topo.position[arrival] + 2) % 4]


def free_strands(c: Chart) -> list[tuple[str, ...]]:
    """Free edges, each as the chain of chart edges it runs through between its two black vertices."""
    out = []
    for vertex in sorted(c.vertices.values(), key=lambda v: v.id):
        if vertex.kind != VertexKind.BLACK or vertex.degree != 1 or vertex.rotation[0].end != TAIL:
            continue
        edges, far = strand_from(c, vertex.rotation[0])
        if c.vertices[far].kind == VertexKind.BLACK:
            out.append(tuple(edges))
    return out


def complexity(c: Chart) -> Complexity:
    return Complexity(c.white_count, -len(free_strands(c)))


# -- assembling charts from pieces ------------------------------------------


def assemble(
    name: str,
    degree: int,
    vertices: dict[str, Vertex],
    edges: dict[str, Edge],
    links: Iterable[tuple[FaceRef, FaceRef]] = (),
    infinity: Optional[FaceRef] = None,
) -> Chart:
    """Build a chart whose components are placed by face links.

    Each link says that its two faces, taken from two different components,
    lie in the same complementary region. A spanning tree of the links is
    turned into containment records rooted at the component holding
    ``infinity``.
    """
    bare = Chart(name, degree, vertices, edges)
    if not vertices:
        return Chart(name, degree)
    topo = bare.topology
    graph = nx.Graph()
    graph.add_nodes_from(range(len(topo.components)))
    for a, b in links:
        ca, cb = topo.component_at(a.dart), topo.component_at(b.dart)
        if ca != cb and not graph.has_edge(ca, cb):
            graph.add_edge(ca, cb, refs={ca: a, cb: b})
    root = topo.component_at(infinity.dart) if infinity is not None else 0
    containment = []
    reached = {root}
    for parent, child in nx.bfs_edges(graph, root):
        refs = graph.edges[parent, child]["refs"]
        witness = topo.components[child].vertices[0]
        containment.append(Embedding(witness, refs[parent], refs[child]))
        reached.add(child)
    if len(reached) != len(topo.components):
        missing = sorted(set(range(len(topo.components))) - reached)
        raise ChartError(f"cannot place components {missing}: no face link reaches them")
    if infinity is None:
        infinity = face_ref_for(topo.faces[topo.components[root].faces[0]].boundary[0])
    containment.sort(key=lambda emb: emb.vertex)
    return Chart(name, degree, vertices, edges, tuple(containment), infinity)


def _region_links(c: Chart, dropped: set[int]) -> tuple[list[tuple[FaceRef, FaceRef]], Optional[FaceRef]]:
    """Links describing the regions of ``c`` once ``dropped`` components vanish."""
    topo = c.topology
    parent = list(range(len(topo.region_members)))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    for comp in dropped:
        regions = sorted({topo.faces[f].region for f in topo.components[comp].faces})
        for r in regions[1:]:
            ra, rb = find(regions[0]), find(r)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[FaceRef]] = {}
    for region, members in enumerate(topo.region_members):
        for comp, fid in members:
            if comp not in dropped:
                groups.setdefault(find(region), []).append(face_ref_for(topo.faces[fid].boundary[0]))
    links = []
    for refs in groups.values():
        links.extend((refs[0], other) for other in refs[1:])
    infinity = None
    if c.infinity is not None:
        inf_group = groups.get(find(topo.region_at(c.infinity)), [])
        if topo.component_at(c.infinity.dart) not in dropped:
            infinity = c.infinity
        elif inf_group:
            infinity = inf_group[0]
    return links, infinity


def remove_components(c: Chart, dropped: Iterable[int], name: Optional[str] = None) -> Chart:
    dropped = set(dropped)
    if not dropped:
        return c
    topo = c.topology
    gone = {vid for comp in dropped for vid in topo.components[comp].vertices}
    vertices = {vid: v for vid, v in c.vertices.items() if vid not in gone}
    edges = {eid: e for eid, e in c.edges.items() if e.tail not in gone}
    links, infinity = _region_links(c, dropped)
    return assemble(name or c.name, c.degree, vertices, edges, links, infinity)


# -- infinity and parked components -----------------------------------------


def is_free_edge_component(c: Chart, comp: Component) -> bool:
    """A component made only of free edges, possibly crossing one another."""
    if any(c.vertices[v].kind not in (VertexKind.BLACK, VertexKind.CROSSING) for v in comp.vertices):
        return False
    covered: set[str] = set()
    for vid in comp.vertices:
        vertex = c.vertices[vid]
        if vertex.kind != VertexKind.BLACK:
            continue
        edges, far = strand_from(c, vertex.rotation[0])
        if c.vertices[far].kind != VertexKind.BLACK:
            return False
        covered.update(edges)
    return covered == set(comp.edges)


def _is_hoop_component(c: Chart, comp: Component) -> bool:
    return len(comp.vertices) == 1 and c.vertices[comp.vertices[0]].kind == VertexKind.ANCHOR


def is_simple_hoop(c: Chart, comp_id: int) -> bool:
    """A hoop one of whose sides holds no white vertex."""
    topo = c.topology
    comp = topo.components[comp_id]
    if not _is_hoop_component(c, comp):
        return False
    for fid in comp.faces:
        inside = topo.vertices_beyond(comp_id, [fid])
        if not any(c.vertices[v].kind == VertexKind.WHITE for v in inside):
            return True
    return False


def parked_components(c: Chart) -> list[int]:
    """Free edges and simple hoops sitting in the infinity region."""
    topo = c.topology
    inf_region = topo.infinity_region
    if inf_region is None:
        return []
    parked = []
    for comp in topo.components:
        touches = any(topo.faces[f].region == inf_region for f in comp.faces)
        if not touches:
            continue
        if is_free_edge_component(c, comp) or (_is_hoop_component(c, comp) and is_simple_hoop(c, comp.id)):
            parked.append(comp.id)
    return parked


def working_chart(c: Chart) -> Chart:
    """The chart with components parked at infinity removed."""
    parked = parked_components(c)
    if parked:
        logger.debug("working chart drops parked components %s", parked)
    return remove_components(c, parked)


def with_infinity(c: Chart, ref: Optional[FaceRef]) -> Chart:
    return replace(c, infinity=ref)


def infinity_candidates(c: Chart) -> list[FaceRef]:
    """One face reference per complementary region."""
    topo = c.topology
    out = []
    for members in topo.region_members:
        comp, fid = min(members)
        out.append(face_ref_for(topo.faces[fid].boundary[0]))
    return out


# -- reflection, orientation reversal, label flip ---------------------------


def _other_side(side: str) -> str:
    return RIGHT if side == LEFT else LEFT


def reflect(c: Chart) -> Chart:
    """Mirror image: every rotation reversed, left and right exchanged."""
    vertices = {vid: replace(v, rotation=tuple(reversed(v.rotation))) for vid, v in c.vertices.items()}

    def flip(ref: FaceRef) -> FaceRef:
        return FaceRef(ref.end, _other_side(ref.side))

    containment = tuple(Embedding(e.vertex, flip(e.host), flip(e.outer)) for e in c.containment)
    infinity = flip(c.infinity) if c.infinity else None
    return Chart(c.name, c.degree, vertices, dict(c.edges), containment, infinity)


def reverse_orientation(c: Chart) -> Chart:
    """Every edge reversed; tails become heads at the same rotation slots."""
    vertices = {
        vid: replace(v, rotation=tuple(e.opposite for e in v.rotation)) for vid, v in c.vertices.items()
    }
    edges = {eid: Edge(eid, e.label, e.head, e.tail) for eid, e in c.edges.items()}

    def flip(ref: FaceRef) -> FaceRef:
        return FaceRef(ref.end.opposite, ref.side)

    containment = tuple(Embedding(e.vertex, flip(e.host), flip(e.outer)) for e in c.containment)
    infinity = flip(c.infinity) if c.infinity else None
    return Chart(c.name, c.degree, vertices, edges, containment, infinity)


def flip_labels(c: Chart) -> Chart:
    """Relabel every edge i as n - i."""
    edges = {eid: replace(e, label=c.degree - e.label) for eid, e in c.edges.items()}
    return replace(c, edges=edges)


def ro_family(c: Chart) -> Iterator[tuple[str, Chart]]:
    yield "identity", c
    yield "reflection", reflect(c)
    yield "reversal", reverse_orientation(c)
    yield "reflection+reversal", reflect(reverse_orientation(c))
