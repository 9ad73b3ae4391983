"""SVG drawings of charts.

Every edge is subdivided twice so loops, parallel edges and hoops become a
simple plane graph; networkx then lays out each component from its rotation
system and drawsvg writes the picture.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import drawsvg as draw
import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from chart_map import TAIL, Chart, ChartError, Component, EdgeEnd, VertexKind, validate
from subgraph import white_local_structure

logger = logging.getLogger(__name__)

# label i is drawn in LABEL_COLORS[(i - 1) % len(LABEL_COLORS)]
LABEL_COLORS = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#e377c2",
    "#17becf",
)
INK = "#222222"
LEGEND_HEIGHT = 56.0
CELL_PADDING = 0.12


def label_color(label: int) -> str:
    return LABEL_COLORS[(label - 1) % len(LABEL_COLORS)]


class RenderStyle(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels_as_colors: bool = True
    show_orientations: bool = True
    show_middle_arcs: bool = False
    width: float = Field(640.0, gt=0)
    height: float = Field(480.0, gt=0)


Node = tuple


def _vnode(vid: str) -> Node:
    return ("v", vid)


def _snode(eid: str, k: int) -> Node:
    return ("s", eid, k)


def _toward(end: EdgeEnd) -> Node:
    """Subdivision point next to the vertex holding ``end``."""
    return _snode(end.edge, 1 if end.end == TAIL else 2)


@dataclass
class ChartLayout:
    """Positions in y-up canvas units, keyed by vertex and subdivision nodes."""

    positions: dict[Node, np.ndarray] = field(default_factory=dict)
    schematic: list[int] = field(default_factory=list)

    def point(self, node: Node) -> np.ndarray:
        return self.positions[node]

    def polyline(self, c: Chart, eid: str) -> list[np.ndarray]:
        e = c.edges[eid]
        nodes = [_vnode(e.tail), _snode(eid, 1), _snode(eid, 2), _vnode(e.head)]
        return [self.positions[n] for n in nodes]


def _component_embedding(c: Chart, comp: Component) -> nx.PlanarEmbedding:
    data: dict[Node, list[Node]] = {}
    for vid in comp.vertices:
        # networkx keeps neighbours clockwise
        data[_vnode(vid)] = [_toward(end) for end in reversed(c.vertices[vid].rotation)]
    for eid in comp.edges:
        e = c.edges[eid]
        data[_snode(eid, 1)] = [_vnode(e.tail), _snode(eid, 2)]
        data[_snode(eid, 2)] = [_snode(eid, 1), _vnode(e.head)]
    embedding = nx.PlanarEmbedding()
    embedding.set_data(data)
    embedding.check_structure()
    return embedding


def _planar_positions(c: Chart, comp: Component) -> dict[Node, np.ndarray]:
    pos = nx.combinatorial_embedding_to_pos(_component_embedding(c, comp))
    return {node: np.array(xy, dtype=float) for node, xy in pos.items()}


def _schematic_positions(c: Chart, comp: Component) -> dict[Node, np.ndarray]:
    """Vertices on a circle, edges bent outwards. Ignores the rotation system."""
    out: dict[Node, np.ndarray] = {}
    n = len(comp.vertices)
    for i, vid in enumerate(comp.vertices):
        angle = 2 * math.pi * i / n
        out[_vnode(vid)] = np.array([math.cos(angle), math.sin(angle)])
    for i, eid in enumerate(comp.edges):
        e = c.edges[eid]
        t, h = out[_vnode(e.tail)], out[_vnode(e.head)]
        d = h - t
        if np.allclose(d, 0):
            normal = t / (np.linalg.norm(t) or 1.0)
            d = np.array([-normal[1], normal[0]]) * 0.4
            t = t - d / 2
        else:
            normal = np.array([-d[1], d[0]]) / np.linalg.norm(d)
        bulge = 0.15 * (1 + i % 3) * normal
        out[_snode(eid, 1)] = t + d / 3 + bulge
        out[_snode(eid, 2)] = t + 2 * d / 3 + bulge
    return out


def _fit(points: dict[Node, np.ndarray], origin: np.ndarray, size: np.ndarray) -> dict[Node, np.ndarray]:
    coords = np.array(list(points.values()))
    low, high = coords.min(axis=0), coords.max(axis=0)
    span = np.where(high - low > 0, high - low, 1.0)
    inner = size * (1 - 2 * CELL_PADDING)
    offset = origin + size * CELL_PADDING
    return {node: offset + (xy - low) / span * inner for node, xy in points.items()}


def layout_chart(c: Chart, style: Optional[RenderStyle] = None) -> ChartLayout:
    """Place every component in its own cell of a grid below the legend."""
    style = style or RenderStyle()
    layout = ChartLayout()
    components = c.topology.components
    if not components:
        return layout
    cols = math.ceil(math.sqrt(len(components)))
    rows = math.ceil(len(components) / cols)
    cell = np.array([style.width / cols, max(style.height - LEGEND_HEIGHT, 1.0) / rows])
    for comp in components:
        try:
            points = _planar_positions(c, comp)
        except nx.NetworkXException as exc:
            logger.warning("planar layout failed for component %d of %s, drawing schematic: %s", comp.id, c.name, exc)
            points = _schematic_positions(c, comp)
            layout.schematic.append(comp.id)
        row, col = divmod(comp.id, cols)
        # y-up: the first row sits at the top of the canvas
        origin = np.array([col * cell[0], (rows - 1 - row) * cell[1]])
        layout.positions.update(_fit(points, origin, cell))
    return layout


def extract_rotations(c: Chart, layout: ChartLayout) -> dict[str, tuple[EdgeEnd, ...]]:
    """Counterclockwise order of the ends at each vertex, read off the drawing."""
    out = {}
    for vid, vertex in c.vertices.items():
        here = layout.point(_vnode(vid))
        ends = list(vertex.rotation)
        vectors = np.array([layout.point(_toward(end)) - here for end in ends])
        angles = np.arctan2(vectors[:, 1], vectors[:, 0])
        out[vid] = tuple(ends[i] for i in np.argsort(angles, kind="stable"))
    return out


def same_cycle(a: tuple, b: tuple) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = b + b
    return any(doubled[i : i + len(a)] == a for i in range(len(b)))


def rotation_mismatches(c: Chart, layout: ChartLayout) -> list[str]:
    drawn = extract_rotations(c, layout)
    return sorted(vid for vid, v in c.vertices.items() if not same_cycle(drawn[vid], v.rotation))


# -- drawing ------------------------------------------------------------------


class _Canvas:
    def __init__(self, c: Chart, style: RenderStyle):
        self.c = c
        self.style = style
        self.d = draw.Drawing(style.width, style.height)
        self.d.append(draw.Rectangle(0, 0, style.width, style.height, fill="#ffffff"))

    def xy(self, p: np.ndarray) -> tuple[float, float]:
        return round(float(p[0]), 2), round(self.style.height - float(p[1]), 2)

    def color(self, label: int) -> str:
        return label_color(label) if self.style.labels_as_colors else INK

    def legend(self) -> None:
        d, c = self.d, self.c
        d.append(draw.Text(f"{c.name}  degree {c.degree}", 12, 8, 16, fill=INK, font_family="monospace"))
        d.append(draw.Circle(14, 34, 5, fill="#ffffff", stroke=INK, stroke_width=1.5))
        d.append(draw.Text("white", 10, 24, 38, fill=INK, font_family="monospace"))
        d.append(draw.Circle(74, 34, 4, fill=INK))
        d.append(draw.Text("black", 10, 84, 38, fill=INK, font_family="monospace"))
        if not self.style.labels_as_colors:
            return
        x = 134.0
        for label in range(1, c.degree):
            d.append(draw.Line(x, 34, x + 16, 34, stroke=label_color(label), stroke_width=2))
            d.append(draw.Text(str(label), 10, x + 19, 38, fill=INK, font_family="monospace"))
            x += 36

    def edge(self, eid: str, layout: ChartLayout) -> None:
        label = self.c.edges[eid].label
        pts = layout.polyline(self.c, eid)
        flat = [v for p in pts for v in self.xy(p)]
        self.d.append(draw.Lines(*flat, close=False, fill="none", stroke=self.color(label), stroke_width=1.5))
        a, b = pts[1], pts[2]
        mid = (a + b) / 2
        direction = b - a
        length = float(np.linalg.norm(direction)) or 1.0
        unit = direction / length
        normal = np.array([-unit[1], unit[0]])
        if self.style.show_orientations:
            tip = mid + unit * 5
            left = mid - unit * 4 + normal * 3.5
            right = mid - unit * 4 - normal * 3.5
            self.d.append(
                draw.Lines(*self.xy(tip), *self.xy(left), *self.xy(right), close=True, fill=self.color(label))
            )
        x, y = self.xy(mid + normal * 9)
        self.d.append(
            draw.Text(str(label), 10, x, y, fill=self.color(label), font_family="monospace", text_anchor="middle")
        )

    def middle_tick(self, end: EdgeEnd, layout: ChartLayout) -> None:
        here = layout.point(_vnode(self.c.edges[end.edge].tail if end.end == TAIL else self.c.edges[end.edge].head))
        toward = layout.point(_toward(end))
        direction = toward - here
        unit = direction / (float(np.linalg.norm(direction)) or 1.0)
        normal = np.array([-unit[1], unit[0]])
        at = here + direction * 0.4
        self.d.append(draw.Line(*self.xy(at - normal * 4), *self.xy(at + normal * 4), stroke=INK, stroke_width=1.5))

    def vertex(self, vid: str, layout: ChartLayout) -> None:
        kind = self.c.vertices[vid].kind
        x, y = self.xy(layout.point(_vnode(vid)))
        if kind == VertexKind.WHITE:
            self.d.append(draw.Circle(x, y, 5, fill="#ffffff", stroke=INK, stroke_width=1.5))
        elif kind == VertexKind.BLACK:
            self.d.append(draw.Circle(x, y, 4, fill=INK))
        elif kind == VertexKind.CROSSING:
            self.d.append(draw.Circle(x, y, 1.5, fill=INK))


def render_svg(c: Chart, style: Optional[RenderStyle] = None) -> str:
    """Standalone SVG document for a valid chart."""
    style = style or RenderStyle()
    violations = validate(c)
    if violations:
        raise ChartError(f"cannot render invalid chart {c.name}: {violations[0]}")
    canvas = _Canvas(c, style)
    canvas.legend()
    layout = layout_chart(c, style)
    for eid in sorted(c.edges):
        canvas.edge(eid, layout)
    if style.show_middle_arcs:
        for w in sorted(v.id for v in c.vertices_of_kind(VertexKind.WHITE)):
            ws = white_local_structure(c, w)
            canvas.middle_tick(ws.middle_in, layout)
            canvas.middle_tick(ws.middle_out, layout)
    for vid in sorted(c.vertices):
        canvas.vertex(vid, layout)
    logger.debug("rendered %s: %d components, %d schematic", c.name, len(c.topology.components), len(layout.schematic))
    return canvas.d.as_svg()
