"""
The C-move catalog.

Every move is offered as a ``MoveInstance`` computed on one chart and applied
with ``apply_move``. Most kinds are replacements of a site disk (see
``rewrite``); hoop birth/death and the saddle are edited directly on the
rotation system. Each instance is dry-run while it is enumerated, so only
instances whose result validates are offered, and the recorded delta is the
measured one.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Iterable, Iterator, Optional

from chart_map import (
    HEAD,
    LEFT,
    RIGHT,
    TAIL,
    CapExceeded,
    Chart,
    ChartError,
    Edge,
    EdgeEnd,
    FaceRef,
    Vertex,
    VertexKind,
    _region_links,
    assemble,
    complexity,
    face_ref_for,
    is_free_edge_component,
    is_simple_hoop,
    parked_components,
    remove_components,
    validate,
    working_chart,
)
from config import Settings, get_settings
from disks import (
    Curve,
    DiskError,
    DiskRegion,
    build_region,
    enumerate_disk_regions,
    find_d_alpha_arcs,
)
from rewrite import (
    IllegalMoveError,
    MoveError,
    PseudoChart,
    Site,
    StaleSiteError,
    end_port,
    fit_rule,
    fragment_problems,
    fresh_id,
    load_rules,
    make_site,
    pass_ports,
    port_node,
    rule_matches,
    site_checksum,
    site_is_current,
    stitch,
    vertex_site,
)
from subgraph import TrackRole, labels_present, straight_on, track_of_edge, tracks_of_label, white_local_structure

logger = logging.getLogger(__name__)

KINDS = (
    "CI-generic",
    "CI-M1",
    "CI-M2",
    "CI-R2",
    "CI-R3",
    "CI-M4",
    "C-II",
    "C-III",
    "CutEdge-macro",
    "NewDisk-pass",
)

CROSSING = VertexKind.CROSSING
BLACK = VertexKind.BLACK
WHITE = VertexKind.WHITE


class NewDiskError(MoveError):
    """The disk or arc given to the clearing pass does not meet its preconditions."""


@dataclass(frozen=True)
class MoveInstance:
    """One applicable move.

    Site-based kinds carry ``site`` and ``replacement``. Hoop moves and the
    saddle carry only ``darts``; the clearing pass carries ``region`` and
    ``alpha``. ``delta`` is (change in white vertices, change in free edges).
    """

    kind: str
    site: Optional[Site]
    replacement: Optional[PseudoChart]
    delta: tuple[int, int]
    darts: tuple[EdgeEnd, ...]
    note: str
    checksum: str
    label: Optional[int] = None
    side: Optional[str] = None
    region: Optional[DiskRegion] = None
    alpha: Optional[str] = None

    @property
    def id(self) -> str:
        key = (
            self.kind,
            self.checksum,
            self.darts,
            self.label,
            self.side,
            self.note,
            self.replacement.key() if self.replacement is not None else None,
        )
        return f"{self.kind}:{hashlib.sha1(repr(key).encode()).hexdigest()[:10]}"

    def row(self) -> str:
        darts = " ".join(str(d) for d in self.darts) or "-"
        return f"{self.id}\t{self.kind}\t{self.delta[0]:+d},{self.delta[1]:+d}\t{self.note}\t{darts}"


# -- fragments built in code ---------------------------------------------------


class _Sketch:
    """Collects fragment vertices and edges before freezing a PseudoChart."""

    def __init__(self, ports: int):
        self.ports = ports
        self.kinds: dict[str, VertexKind] = {}
        self.rotations: dict[str, list[EdgeEnd]] = {}
        self.edges: dict[str, Edge] = {}

    def vertex(self, vid: str, kind: VertexKind) -> None:
        self.kinds[vid] = kind

    def strand(self, eid: str, label: int, frm: str, to: str, reverse: bool = False) -> tuple[EdgeEnd, EdgeEnd]:
        """An edge drawn from ``frm`` to ``to``; returns its ends at ``frm`` and at ``to``.

        With ``reverse`` the edge is oriented from ``to`` to ``frm``.
        """
        if reverse:
            self.edges[eid] = Edge(eid, label, to, frm)
            return EdgeEnd(eid, HEAD), EdgeEnd(eid, TAIL)
        self.edges[eid] = Edge(eid, label, frm, to)
        return EdgeEnd(eid, TAIL), EdgeEnd(eid, HEAD)

    def chord(self, eid: str, label: int, site: Site, a: int, b: int) -> tuple[EdgeEnd, EdgeEnd]:
        """Edge between ports ``a`` and ``b``, oriented to agree with the site."""
        if site.ports[a].entering:
            return self.strand(eid, label, port_node(a), port_node(b))
        return self.strand(eid, label, port_node(b), port_node(a))

    def stub(self, eid: str, label: int, site: Site, k: int, vid: str) -> EdgeEnd:
        """Edge from port ``k`` to fragment vertex ``vid``; returns its end at ``vid``."""
        return self.strand(eid, label, port_node(k), vid, reverse=not site.ports[k].entering)[1]

    def rotate(self, vid: str, ends: Iterable[EdgeEnd]) -> None:
        self.rotations[vid] = list(ends)

    def build(self) -> PseudoChart:
        vertices = {
            vid: Vertex(vid, kind, tuple(self.rotations.get(vid, ()))) for vid, kind in self.kinds.items()
        }
        return PseudoChart(vertices, dict(self.edges), self.ports)


def _in_arc(k: int, a: int, b: int, n: int) -> bool:
    """Whether port ``k`` lies strictly inside the counterclockwise arc from ``a`` to ``b``."""
    return 0 < (k - a) % n < (b - a) % n


def _faces_checksum(c: Chart, faces: Iterable[int]) -> str:
    topo = c.topology
    darts = [d for fid in sorted(faces) for d in topo.faces[fid].boundary]
    return site_checksum(c, {topo.vertex_of[d] for d in darts}, {d.edge for d in darts}, ())


def _stitched(c: Chart, kind: str, site: Site, fragment: PseudoChart, darts, note: str) -> Optional[MoveInstance]:
    """Dry-run a replacement; None when it does not give a valid chart."""
    try:
        result = stitch(c, site, fragment)
    except IllegalMoveError as exc:
        logger.debug("dropping %s (%s): %s", kind, note, exc)
        return None
    problems = validate(result.chart)
    if problems:
        logger.debug("dropping %s (%s): %s", kind, note, problems[0])
        return None
    return MoveInstance(kind, site, fragment, result.delta, tuple(darts), note, site.checksum)


# -- CI-M1: hoop birth and death ------------------------------------------------


def _hoop_births(c: Chart, settings: Settings) -> Iterator[MoveInstance]:
    topo = c.topology
    hosts: list[Optional[EdgeEnd]] = [None] if c.is_empty else []
    for members in topo.region_members:
        _, fid = min(members)
        hosts.append(topo.faces[fid].boundary[0])
    for host in hosts:
        checksum = _faces_checksum(c, [] if host is None else [topo.face_of[host]])
        for label in range(1, c.degree):
            for side in (TAIL, HEAD):
                darts = () if host is None else (host,)
                yield MoveInstance("CI-M1", None, None, (0, 0), darts, f"birth label={label} outer={side}",
                                   checksum, label=label, side=side)


def _hoop_birth(c: Chart, host: Optional[EdgeEnd], label: int, side: str) -> Chart:
    a = fresh_id("a", set(c.vertices))
    e = fresh_id("e", set(c.edges))
    vertices = dict(c.vertices)
    vertices[a] = Vertex(a, VertexKind.ANCHOR, (EdgeEnd(e, TAIL), EdgeEnd(e, HEAD)))
    edges = dict(c.edges)
    edges[e] = Edge(e, label, a, a)
    outer = face_ref_for(EdgeEnd(e, side))
    if host is None:
        return assemble(c.name, c.degree, vertices, edges, (), outer)
    links, infinity = _region_links(c, set())
    links.append((face_ref_for(host), outer))
    return assemble(c.name, c.degree, vertices, edges, links, infinity)


def _empty_side(c: Chart, comp: int) -> bool:
    topo = c.topology
    return any(not topo.beyond(comp, [fid]) for fid in topo.components[comp].faces)


def _hoop_deaths(c: Chart, settings: Settings) -> Iterator[MoveInstance]:
    topo = c.topology
    for comp in topo.components:
        if len(comp.vertices) != 1 or c.vertices[comp.vertices[0]].kind != VertexKind.ANCHOR:
            continue
        if not _empty_side(c, comp.id):
            continue
        dart = EdgeEnd(comp.edges[0], TAIL)
        yield MoveInstance("CI-M1", None, None, (0, 0), (dart,), "death", _faces_checksum(c, comp.faces))


def _hoop_death(c: Chart, dart: EdgeEnd) -> Chart:
    topo = c.topology
    comp = topo.component_at(dart)
    if len(topo.components[comp].vertices) != 1 or not _empty_side(c, comp):
        raise IllegalMoveError(f"{dart.edge} is not a hoop with an empty side")
    return remove_components(c, {comp})


def _m1(c: Chart, settings: Settings) -> Iterator[MoveInstance]:
    yield from _hoop_births(c, settings)
    yield from _hoop_deaths(c, settings)


# -- CI-M2: the saddle -----------------------------------------------------------


def _saddle(c: Chart, da: EdgeEnd, db: EdgeEnd) -> Chart:
    """Reconnect two antiparallel same-label arcs that face each other across one face."""
    e, f = c.edges[da.edge], c.edges[db.edge]
    swap = {EdgeEnd(e.id, HEAD): EdgeEnd(f.id, HEAD), EdgeEnd(f.id, HEAD): EdgeEnd(e.id, HEAD)}
    vertices = {
        vid: replace(v, rotation=tuple(swap.get(x, x) for x in v.rotation)) for vid, v in c.vertices.items()
    }
    edges = dict(c.edges)
    edges[e.id] = Edge(e.id, e.label, e.tail, f.head)
    edges[f.id] = Edge(f.id, f.label, f.tail, e.head)

    topo = c.topology
    links: list[tuple[FaceRef, FaceRef]] = []
    for members in topo.region_members:
        refs = [face_ref_for(swap.get(d, d)) for d in (topo.faces[fid].boundary[0] for _, fid in members)]
        links.extend((refs[0], other) for other in refs[1:])
    links.append((face_ref_for(da.opposite), face_ref_for(db.opposite)))
    infinity = None
    if c.infinity is not None:
        dart = c.infinity.dart
        infinity = face_ref_for(swap.get(dart, dart))
    try:
        return assemble(c.name, c.degree, vertices, edges, links, infinity)
    except ChartError as exc:
        raise IllegalMoveError(f"saddle cannot be placed: {exc}") from exc


def _saddle_delta(c: Chart, result: Chart) -> tuple[int, int]:
    return 0, complexity(c).neg_free_edges - complexity(result).neg_free_edges


def _m2(c: Chart, settings: Settings) -> Iterator[MoveInstance]:
    topo = c.topology
    for face in topo.faces:
        for da, db in combinations(face.boundary, 2):
            if da.edge == db.edge or da.end != db.end or c.label(da) != c.label(db):
                continue
            ends = (c.edges[da.edge].tail, c.edges[da.edge].head, c.edges[db.edge].tail, c.edges[db.edge].head)
            if any(c.vertices[v].kind == VertexKind.ANCHOR for v in ends):
                continue
            try:
                result = _saddle(c, da, db)
            except IllegalMoveError as exc:
                logger.debug("dropping saddle %s %s: %s", da, db, exc)
                continue
            if validate(result):
                continue
            yield MoveInstance("CI-M2", None, None, _saddle_delta(c, result), (da, db),
                               f"saddle {da.edge}~{db.edge}", _faces_checksum(c, [face.id]))


# -- CI-R2 and CI-R3 -------------------------------------------------------------


def _bigon_fragment(la: int, lb: int, rev_a: bool, rev_b: bool) -> PseudoChart:
    """Strand A from port 0 to 1 and strand B from port 2 to 3, crossing twice."""
    sk = _Sketch(4)
    sk.vertex("c1", CROSSING)
    sk.vertex("c2", CROSSING)
    a0 = sk.strand("a0", la, port_node(0), "c1", rev_a)
    a1 = sk.strand("a1", la, "c1", "c2", rev_a)
    a2 = sk.strand("a2", la, "c2", port_node(1), rev_a)
    b0 = sk.strand("b0", lb, port_node(2), "c2", rev_b)
    b1 = sk.strand("b1", lb, "c2", "c1", rev_b)
    b2 = sk.strand("b2", lb, "c1", port_node(3), rev_b)
    sk.rotate("c1", [b1[1], a1[0], b2[0], a0[1]])
    sk.rotate("c2", [b0[1], a1[1], b1[0], a2[0]])
    return sk.build()


def _bigon_births(c: Chart) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for face in topo.faces:
        for da, db in combinations(face.boundary, 2):
            if da.edge == db.edge or abs(c.label(da) - c.label(db)) < 2:
                continue
            a_in, a_out = pass_ports(c, da)
            b_in, b_out = pass_ports(c, db)
            site = make_site(c, set(), set(), [a_in, a_out, b_in, b_out])
            fragment = _bigon_fragment(c.label(da), c.label(db), da.end == HEAD, db.end == HEAD)
            yield _stitched(c, "CI-R2", site, fragment, (da, db), f"create {da.edge}x{db.edge}")


def _crossing_face(c: Chart, face, size: int) -> bool:
    topo = c.topology
    darts = face.boundary
    if len(darts) != size or len({d.edge for d in darts}) != size:
        return False
    vertices = {topo.vertex_of[d] for d in darts}
    return len(vertices) == size and all(c.vertices[v].kind == CROSSING for v in vertices)


def _strand_ports(c: Chart, site: Site, eid: str) -> tuple[int, int]:
    """Ports where the strand through the inner edge ``eid`` enters and leaves the site."""
    return site.port_at(straight_on(c, EdgeEnd(eid, TAIL))), site.port_at(straight_on(c, EdgeEnd(eid, HEAD)))


def _bigon_deaths(c: Chart) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for face in topo.faces:
        if not _crossing_face(c, face, 2):
            continue
        edges = [d.edge for d in face.boundary]
        site = vertex_site(c, {topo.vertex_of[d] for d in face.boundary}, set(edges))
        if site is None or len(site.ports) != 4:
            continue
        sk = _Sketch(4)
        chords = []
        for eid in edges:
            k_in, k_out = _strand_ports(c, site, eid)
            chords.append((k_in, k_out))
            sk.strand(f"s{len(chords)}", c.edges[eid].label, port_node(k_in), port_node(k_out))
        if any((k_out - k_in) % 4 not in (1, 3) for k_in, k_out in chords):
            continue
        yield _stitched(c, "CI-R2", site, sk.build(), face.boundary, f"remove {edges[0]}|{edges[1]}")


def _r2(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
    yield from _bigon_births(c)
    yield from _bigon_deaths(c)


def _triangle_fragment(c: Chart, site: Site, edges: list[str]) -> PseudoChart:
    """Three pairwise crossing strands, each meeting the other two in the reverse order."""
    n = len(site.ports)
    strands = []
    for eid in edges:
        e = c.edges[eid]
        partner = {
            v: next(i for i, o in enumerate(edges) if o != eid and v in (c.edges[o].tail, c.edges[o].head))
            for v in (e.tail, e.head)
        }
        k_in, k_out = _strand_ports(c, site, eid)
        strands.append((e.label, k_in, k_out, partner[e.head], partner[e.tail]))

    def crossing(i: int, j: int) -> str:
        return f"x{min(i, j)}{max(i, j)}"

    sk = _Sketch(n)
    back: dict[tuple[int, int], EdgeEnd] = {}
    fore: dict[tuple[int, int], EdgeEnd] = {}
    for i, (label, k_in, k_out, first, second) in enumerate(strands):
        sk.vertex(crossing(i, first), CROSSING)
        sk.vertex(crossing(i, second), CROSSING)
        s0 = sk.strand(f"s{i}_0", label, port_node(k_in), crossing(i, first))
        s1 = sk.strand(f"s{i}_1", label, crossing(i, first), crossing(i, second))
        s2 = sk.strand(f"s{i}_2", label, crossing(i, second), port_node(k_out))
        back[i, first], fore[i, first] = s0[1], s1[0]
        back[i, second], fore[i, second] = s1[1], s2[0]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        _, s_in, s_out, _, _ = strands[i]
        t_in = strands[j][1]
        if _in_arc(t_in, s_in, s_out, n):
            ends = [fore[i, j], fore[j, i], back[i, j], back[j, i]]
        else:
            ends = [fore[i, j], back[j, i], back[i, j], fore[j, i]]
        sk.rotate(crossing(i, j), ends)
    return sk.build()


def _r3(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for face in topo.faces:
        if not _crossing_face(c, face, 3):
            continue
        edges = [d.edge for d in face.boundary]
        site = vertex_site(c, {topo.vertex_of[d] for d in face.boundary}, set(edges))
        if site is None or len(site.ports) != 6:
            continue
        try:
            fragment = _triangle_fragment(c, site, edges)
        except (KeyError, StopIteration):
            continue
        yield _stitched(c, "CI-R3", site, fragment, face.boundary, f"triangle {'|'.join(edges)}")


# -- C-II: a black vertex passing an edge ----------------------------------------


def _black_ends(c: Chart) -> list[EdgeEnd]:
    return [v.rotation[0] for v in sorted(c.vertices_of_kind(BLACK), key=lambda v: v.id)]


def _black_pushes(c: Chart) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for eb in _black_ends(c):
        b = topo.vertex_of[eb]
        i = c.label(eb)
        for dg in topo.faces[topo.face_of[eb]].boundary:
            if dg.edge == eb.edge or abs(c.label(dg) - i) < 2:
                continue
            g_in, g_out = pass_ports(c, dg)
            site = make_site(c, {b}, set(), [g_in, g_out, end_port(c, eb, {b})])
            sk = _Sketch(3)
            sk.vertex("x", CROSSING)
            sk.vertex("b", BLACK)
            j = c.label(dg)
            g0 = sk.strand("g0", j, port_node(0), "x", dg.end == HEAD)
            g1 = sk.strand("g1", j, "x", port_node(1), dg.end == HEAD)
            e0 = sk.strand("e0", i, "b", "x", eb.end == HEAD)
            e1 = sk.strand("e1", i, "x", port_node(2), eb.end == HEAD)
            sk.rotate("x", [g1[0], e1[0], g0[1], e0[1]])
            sk.rotate("b", [e0[0]])
            yield _stitched(c, "C-II", site, sk.build(), (eb, dg), f"create {b} across {dg.edge}")


def _black_pulls(c: Chart) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for eb in _black_ends(c):
        b = topo.vertex_of[eb]
        x = topo.vertex_of[eb.opposite]
        if c.vertices[x].kind != CROSSING:
            continue
        site = vertex_site(c, {b, x}, {eb.edge})
        if site is None or len(site.ports) != 3:
            continue
        k_e = site.port_at(straight_on(c, eb.opposite))
        k_a, k_b = [k for k in range(3) if k != k_e]
        sk = _Sketch(3)
        sk.vertex("b", BLACK)
        sk.chord("g", site.ports[k_a].label, site, k_a, k_b)
        sk.rotate("b", [sk.stub("e", c.label(eb), site, k_e, "b")])
        yield _stitched(c, "C-II", site, sk.build(), (eb,), f"remove {b} from {x}")


def _c2(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
    yield from _black_pushes(c)
    yield from _black_pulls(c)


# -- C-III: a black vertex passing a white vertex --------------------------------


def _white_eliminations(c: Chart) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for eb in _black_ends(c):
        b = topo.vertex_of[eb]
        w = topo.vertex_of[eb.opposite]
        if c.vertices[w].kind != WHITE or white_local_structure(c, w).is_middle(eb.opposite):
            continue
        site = vertex_site(c, {w, b}, {eb.edge})
        if site is None or len(site.ports) != 5:
            continue
        sk = _Sketch(5)
        sk.vertex("b", BLACK)
        sk.chord("x", site.ports[1].label, site, 1, 3)
        sk.chord("y", site.ports[0].label, site, 0, 4)
        sk.rotate("b", [sk.stub("z", site.ports[2].label, site, 2, "b")])
        yield _stitched(c, "C-III", site, sk.build(), (eb,), f"remove {w} with {b}")


def _white_births(c: Chart) -> Iterator[Optional[MoveInstance]]:
    topo = c.topology
    for z in _black_ends(c):
        b = topo.vertex_of[z]
        i = c.label(z)
        for dx in topo.faces[topo.face_of[z]].boundary:
            if dx.edge == z.edge or abs(c.label(dx) - i) != 1:
                continue
            for dy in topo.faces[topo.face_of[dx.opposite]].boundary:
                if dy.edge in (z.edge, dx.edge) or c.label(dy) != i:
                    continue
                x_in, x_out = pass_ports(c, dx)
                y_in, y_out = pass_ports(c, dy)
                site = make_site(c, {b}, set(), [y_out, x_out, end_port(c, z, {b}), x_in, y_in])
                fragment = _white_with_tail(site, c.label(dx))
                if fragment is not None:
                    yield _stitched(c, "C-III", site, fragment, (z, dx, dy), f"create at {b} by {dx.edge},{dy.edge}")


def _white_with_tail(site: Site, tail_label: int) -> Optional[PseudoChart]:
    """A white vertex joined to every port, plus a black vertex on the edge before port 0."""
    for inward in (True, False):
        sk = _Sketch(len(site.ports))
        sk.vertex("w", WHITE)
        sk.vertex("b", BLACK)
        t_b, t_w = sk.strand("t", tail_label, "b", "w", reverse=not inward)
        rotation = [t_w]
        for k, port in enumerate(site.ports):
            rotation.append(sk.stub(f"p{k}", port.label, site, k, "w"))
        sk.rotate("w", rotation)
        sk.rotate("b", [t_b])
        fragment = sk.build()
        if not fragment_problems(fragment):
            return fragment
    return None


def _c3(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
    yield from _white_eliminations(c)
    yield from _white_births(c)


# -- rule-file kinds ---------------------------------------------------------------


def _rule_moves(kind: str):
    def enumerate_kind(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
        for rule in load_rules(settings.rules_dir).of_kind(kind):
            for match in rule_matches(c, rule, settings.site_cap):
                darts = tuple(p.dart for p in match.site.ports)
                yield _stitched(c, kind, match.site, match.after, darts, f"{rule.name} {match.variant}")

    return enumerate_kind


def _terminal_blacks(c: Chart) -> list[EdgeEnd]:
    return [e for e in _black_ends(c) if track_of_edge(c, e.edge).role == TrackRole.TERMINAL]


def _cut_edges(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
    rules = load_rules(settings.rules_dir).of_kind("CutEdge-macro")
    if not rules:
        return
    topo = c.topology
    by_face: dict[int, list[EdgeEnd]] = {}
    for end in _terminal_blacks(c):
        by_face.setdefault(topo.face_of[end], []).append(end)
    for face in topo.faces:
        for dg in face.boundary:
            for e1 in by_face.get(face.id, []):
                for e2 in by_face.get(topo.face_of[dg.opposite], []):
                    if e1 == e2 or dg.edge in (e1.edge, e2.edge):
                        continue
                    blacks = {topo.vertex_of[e1], topo.vertex_of[e2]}
                    g_in, g_out = pass_ports(c, dg)
                    ports = [end_port(c, e1, blacks), g_in, end_port(c, e2, blacks), g_out]
                    site = make_site(c, blacks, set(), ports)
                    for rule in rules:
                        for match in fit_rule(site, [BLACK, BLACK], rule):
                            yield _stitched(c, "CutEdge-macro", site, match.after, (e1, dg, e2),
                                            f"{rule.name} {match.variant}")


# -- clearing (D, alpha)-arcs ------------------------------------------------------


def _arcs(c: Chart, region: DiskRegion, alpha: str):
    return [arc for k in labels_present(c) for arc in find_d_alpha_arcs(c, region, alpha, k)]


def _clearing_step(c: Chart, region: DiskRegion, alpha: str, settings: Settings) -> Optional[MoveInstance]:
    """A bigon or triangle move inside the disk that pushes crossings out across alpha."""
    topo = c.topology
    on_alpha = set(track_of_edge(c, alpha).edges)
    bigons = [
        m for m in _bigon_deaths(c)
        if m is not None and topo.face_of[m.darts[0]] in region.faces
    ]
    bigons.sort(key=lambda m: not on_alpha.intersection(d.edge for d in m.darts))
    if bigons:
        return bigons[0]
    for m in _r3(c, settings):
        if m is None or topo.face_of[m.darts[0]] not in region.faces:
            continue
        for d in m.darts:
            if d.edge in on_alpha:
                apex = topo.vertex_of[topo.next_dart(d).opposite]
                if apex not in region.boundary_vertices:
                    return m
    return None


def new_disk_clear(c: Chart, d: DiskRegion, alpha: str, settings: Optional[Settings] = None) -> Chart:
    """Push every (D, alpha)-arc out of ``d`` across ``alpha`` with bigon and triangle moves.

    ``alpha`` is any edge of the boundary track; the track itself is kept.
    Returns ``c`` itself when there is nothing to clear.
    """
    settings = settings or get_settings()
    stray = [
        v for v in (*d.interior_vertices, *d.nested_vertices) if c.vertices[v].kind in (WHITE, BLACK)
    ]
    if stray:
        raise NewDiskError(f"disk interior holds white or black vertices {stray}")
    key = track_of_edge(c, alpha).key
    if not _arcs(c, d, key):
        return c
    current = c
    for step in range(settings.site_cap):
        try:
            region = build_region(current, d.curve, d.side)
        except (KeyError, IndexError) as exc:
            raise NewDiskError(f"disk boundary was lost while clearing: {exc}") from exc
        if not _arcs(current, region, key):
            logger.info("cleared (D, alpha)-arcs at %s in %d moves", key, step)
            return current
        move = _clearing_step(current, region, key, settings)
        if move is None:
            raise NewDiskError(f"no bigon or triangle move clears the arcs at {key}")
        current = apply_move(current, move, settings)
    raise CapExceeded("New Disk clearing moves", settings.site_cap)


def _new_disk_passes(c: Chart, settings: Settings) -> Iterator[Optional[MoveInstance]]:
    for m in labels_present(c):
        try:
            disks = enumerate_disk_regions(c, m, settings)
        except DiskError as exc:
            logger.debug("no disk regions for label %d: %s", m, exc)
            continue
        for disk in disks:
            region = disk.region
            for key, _ in region.curve.segments:
                if track_of_edge(c, key).role != TrackRole.INTERNAL or not _arcs(c, region, key):
                    continue
                try:
                    new_disk_clear(c, region, key, settings)
                except (MoveError, DiskError) as exc:
                    logger.debug("dropping clearing pass at %s: %s", key, exc)
                    continue
                yield MoveInstance("NewDisk-pass", None, None, (0, 0), (EdgeEnd(key, TAIL),),
                                   f"clear label {m} {region.side} of {key}", _faces_checksum(c, region.faces),
                                   region=region, alpha=key)


# -- normal-form flags -------------------------------------------------------------

A2_TERMINAL = "A2-terminal-not-middle"
A3_OUTSIDE = "A3-free-edge-or-simple-hoop-outside-infinity"
A4_WHITE_FREE = "A4-ring-or-hoop-domain-white-free"


@dataclass(frozen=True, order=True)
class AssumptionFlag:
    tag: str
    witness: str
    message: str

    def __str__(self) -> str:
        return f"{self.tag}\t{self.witness}\t{self.message}"


def assumption_flags(c: Chart) -> list[AssumptionFlag]:
    """Departures from the normal form minimal charts are assumed to have."""
    topo = c.topology
    out: list[AssumptionFlag] = []
    for eb in _black_ends(c):
        track = track_of_edge(c, eb.edge)
        if track.role != TrackRole.TERMINAL:
            continue
        w = track.end if track.start == topo.vertex_of[eb] else track.start
        (white_end,) = track.end_at(w)
        if not white_local_structure(c, w).is_middle(white_end):
            out.append(AssumptionFlag(A2_TERMINAL, eb.edge, f"terminal edge is not middle at {w}"))

    parked = set(parked_components(c))
    for comp in topo.components:
        if comp.id in parked:
            continue
        if is_free_edge_component(c, comp):
            out.append(AssumptionFlag(A3_OUTSIDE, comp.edges[0], "free edge away from infinity"))
        elif is_simple_hoop(c, comp.id):
            out.append(AssumptionFlag(A3_OUTSIDE, comp.edges[0], "simple hoop away from infinity"))

    work = working_chart(c)
    for m in labels_present(work):
        for track in tracks_of_label(work, m):
            if track.role not in (TrackRole.RING, TrackRole.HOOP):
                continue
            curve = Curve(((track.key, True),), (), m)
            for side in (LEFT, RIGHT):
                if build_region(work, curve, side).interior_whites(work) == 0:
                    out.append(AssumptionFlag(A4_WHITE_FREE, track.key, f"{track.role.value} has no white on its {side}"))
                    break
    return sorted(out)


# -- enumeration and application ---------------------------------------------------

_ENUMERATORS = {
    "CI-generic": _rule_moves("CI-generic"),
    "CI-M1": _m1,
    "CI-M2": _m2,
    "CI-R2": _r2,
    "CI-R3": _r3,
    "CI-M4": _rule_moves("CI-M4"),
    "C-II": _c2,
    "C-III": _c3,
    "CutEdge-macro": _cut_edges,
    "NewDisk-pass": _new_disk_passes,
}


def applicable_moves(
    c: Chart, kinds: Optional[Iterable[str]] = None, settings: Optional[Settings] = None
) -> list[MoveInstance]:
    """Every legal instance of the requested kinds, in a fixed order."""
    settings = settings or get_settings()
    wanted = set(KINDS if kinds is None else kinds)
    unknown = wanted - set(KINDS)
    if unknown:
        raise MoveError(f"unknown move kinds {sorted(unknown)}")
    problems = validate(c)
    if problems:
        raise MoveError(f"chart {c.name} does not validate: {problems[0]}")
    out: list[MoveInstance] = []
    seen: set[str] = set()
    for kind in KINDS:
        if kind not in wanted:
            continue
        for instance in _ENUMERATORS[kind](c, settings):
            if instance is None or instance.id in seen:
                continue
            seen.add(instance.id)
            out.append(instance)
            if len(out) > settings.site_cap:
                raise CapExceeded("move instances", settings.site_cap)
    logger.info("%d move instances on %s", len(out), c.name)
    return out


def find_move(c: Chart, move_id: str, settings: Optional[Settings] = None) -> MoveInstance:
    kind = move_id.split(":", 1)[0]
    for instance in applicable_moves(c, [kind] if kind in KINDS else None, settings):
        if instance.id == move_id:
            return instance
    raise StaleSiteError(f"no move {move_id} on chart {c.name}")


def _is_current(c: Chart, m: MoveInstance) -> bool:
    try:
        if m.site is not None:
            return site_is_current(c, m.site)
        if m.region is not None:
            region = build_region(c, m.region.curve, m.region.side)
            return _faces_checksum(c, region.faces) == m.checksum
        if not m.darts:
            return c.is_empty
        topo = c.topology
        faces = {topo.face_of[d] for d in m.darts}
        if m.kind == "CI-M1" and m.label is None:
            faces = set(topo.components[topo.component_at(m.darts[0])].faces)
        return _faces_checksum(c, faces) == m.checksum
    except (KeyError, IndexError, ChartError):
        return False


def _perform(c: Chart, m: MoveInstance, settings: Settings) -> Chart:
    if m.kind == "NewDisk-pass":
        return new_disk_clear(c, m.region, m.alpha, settings)
    if m.site is not None:
        return stitch(c, m.site, m.replacement).chart
    if m.kind == "CI-M1":
        if m.label is None:
            return _hoop_death(c, m.darts[0])
        return _hoop_birth(c, m.darts[0] if m.darts else None, m.label, m.side)
    if m.kind == "CI-M2":
        return _saddle(c, *m.darts)
    raise MoveError(f"{m.kind} instance carries no site")


def apply_move(c: Chart, m: MoveInstance, settings: Optional[Settings] = None) -> Chart:
    """Apply one instance. The input chart is never modified."""
    settings = settings or get_settings()
    if m.kind not in KINDS:
        raise MoveError(f"unknown move kind {m.kind}")
    if not _is_current(c, m):
        raise StaleSiteError(f"move {m.id} was not computed on this chart")
    result = _perform(c, m, settings)
    problems = validate(result)
    if problems:
        raise IllegalMoveError(f"move {m.id} breaks the axioms: {problems[0]}")
    before, after = complexity(c), complexity(result)
    measured = (after.white_count - before.white_count, before.neg_free_edges - after.neg_free_edges)
    if measured != m.delta:
        raise MoveError(f"move {m.id} declared delta {m.delta} but changed complexity by {measured}")
    logger.debug("applied %s to %s", m.id, c.name)
    return result
