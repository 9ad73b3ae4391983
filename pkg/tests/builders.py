"""Charts used across the test suite."""

from dataclasses import replace
from pathlib import Path

from chart_format import read_chart
from chart_map import (
    TAIL,
    Chart,
    Edge,
    EdgeEnd,
    Embedding,
    FaceRef,
    Vertex,
    VertexKind,
    assemble,
    face_ref_for,
)
from enumeration import hoop

DATA = Path(__file__).parent / "data"


def load(name: str) -> Chart:
    return read_chart(DATA / f"{name}.chart")


def empty(degree: int = 3) -> Chart:
    return Chart("empty", degree)


def free_edge(label: int = 1, degree: int = 2, prefix: str = "") -> Chart:
    b1, b2, e = f"{prefix}b1", f"{prefix}b2", f"{prefix}e1"
    vertices = {
        b1: Vertex(b1, VertexKind.BLACK, (EdgeEnd(e, "t"),)),
        b2: Vertex(b2, VertexKind.BLACK, (EdgeEnd(e, "h"),)),
    }
    return assemble("free-edge", degree, vertices, {e: Edge(e, label, b1, b2)})


def two_free_edges(degree: int = 2) -> Chart:
    a, b = free_edge(1, degree, "p"), free_edge(1, degree, "q")
    vertices = {**a.vertices, **b.vertices}
    edges = {**a.edges, **b.edges}
    link = (face_ref_for(EdgeEnd("pe1", TAIL)), face_ref_for(EdgeEnd("qe1", TAIL)))
    return assemble("two-free-edges", degree, vertices, edges, [link])


def hoop_chart(label: int = 1, degree: int = 3) -> Chart:
    return hoop(label, degree)


def renamed(c: Chart, prefix: str) -> Chart:
    """The same chart with every vertex and edge id prefixed."""

    def end(x: EdgeEnd) -> EdgeEnd:
        return EdgeEnd(prefix + x.edge, x.end)

    def ref(r: FaceRef) -> FaceRef:
        return FaceRef(end(r.end), r.side)

    vertices = {
        prefix + vid: Vertex(prefix + vid, v.kind, tuple(end(x) for x in v.rotation)) for vid, v in c.vertices.items()
    }
    edges = {prefix + eid: Edge(prefix + eid, e.label, prefix + e.tail, prefix + e.head) for eid, e in c.edges.items()}
    containment = tuple(Embedding(prefix + emb.vertex, ref(emb.host), ref(emb.outer)) for emb in c.containment)
    return replace(
        c,
        vertices=vertices,
        edges=edges,
        containment=containment,
        infinity=ref(c.infinity) if c.infinity else None,
    )
