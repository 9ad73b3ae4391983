"""
Bounded generation of charts.

Connected components grow one vertex at a time from a root dart and are kept
only when that dart reads the smallest breadth-first code, so every component
comes out once. Charts are then arranged from multisets of components, one
region at a time. ``naive_charts`` matches the ends of every vertex multiset
in every possible way; it is slow and exists to check the fast generator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from functools import lru_cache
from itertools import combinations_with_replacement, product
from multiprocessing import Pool
from typing import Iterator, Optional

from chart_map import (
    HEAD,
    TAIL,
    Chart,
    ChartError,
    Edge,
    EdgeEnd,
    FaceRef,
    Vertex,
    VertexKind,
    assemble,
    canonical_code,
    face_ref_for,
    rooted_code,
    validate,
)
from config import Settings, get_settings

logger = logging.getLogger(__name__)

# (label, leaves the vertex)
Slot = tuple[int, bool]

_LETTER = {VertexKind.WHITE: "w", VertexKind.CROSSING: "x", VertexKind.BLACK: "b", VertexKind.ANCHOR: "a"}
_BUDGET_KEYS = {"n": "degree", "w": "max_whites", "c": "max_crossings", "e": "max_edges", "h": "max_hoops"}


@dataclass(frozen=True)
class EnumBudget:
    degree: int
    max_whites: int = 0
    max_crossings: int = 0
    max_edges: int = 0
    max_hoops: int = 0

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError(f"degree {self.degree} is below 2")
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must not be negative")

    @classmethod
    def parse(cls, text: str) -> "EnumBudget":
        """``default`` or comma-separated ``n=4,w=7,c=4,e=40,h=0``; missing bounds are 0."""
        if text.strip() in ("default", "desk"):
            return DESK_BUDGET
        values = {}
        for part in text.split(","):
            key, sep, value = part.strip().partition("=")
            if not sep or key.strip() not in _BUDGET_KEYS:
                raise ValueError(f"bad budget term {part.strip()!r}")
            values[_BUDGET_KEYS[key.strip()]] = int(value)
        if "degree" not in values:
            raise ValueError("budget needs n=<degree>")
        return cls(**values)

    def __str__(self) -> str:
        return (
            f"n={self.degree},w={self.max_whites},c={self.max_crossings},"
            f"e={self.max_edges},h={self.max_hoops}"
        )


DESK_BUDGET = EnumBudget(degree=4, max_whites=7, max_crossings=4, max_edges=40, max_hoops=0)


# -- local vertex types ----------------------------------------------------------


@lru_cache(maxsize=None)
def local_types(degree: int) -> tuple[tuple[VertexKind, tuple[Slot, ...]], ...]:
    """One rotation per local type of white, crossing and black vertex."""
    out = []
    for m in range(1, degree - 1):
        labels = [m if p % 2 == 0 else m + 1 for p in range(6)]
        for s in (0, 1):
            out.append((VertexKind.WHITE, tuple((labels[p], (p - s) % 6 >= 3) for p in range(6))))
    for i in range(1, degree):
        for j in range(i + 2, degree):
            for b in (True, False):
                out.append((VertexKind.CROSSING, ((i, True), (j, b), (i, False), (j, not b))))
    for label in range(1, degree):
        for leaves in (True, False):
            out.append((VertexKind.BLACK, ((label, leaves),)))
    return tuple(out)


@lru_cache(maxsize=None)
def _entry_rotations(degree: int) -> tuple[tuple[VertexKind, tuple[Slot, ...]], ...]:
    """Every distinct rotation of every local type."""
    out = []
    for kind, slots in local_types(degree):
        rotations = dict.fromkeys(slots[i:] + slots[:i] for i in range(len(slots)))
        out.extend((kind, rot) for rot in rotations)
    return tuple(out)


def bare_chart(
    degree: int,
    kinds: list[VertexKind],
    rots: list[tuple[Slot, ...]],
    partner: dict[tuple[int, int], tuple[int, int]],
    name: str = "bare",
) -> Chart:
    """Vertices and edges joined slot to slot; components are not placed yet."""
    ids = [f"{_LETTER[k]}{v}" for v, k in enumerate(kinds)]
    ends: dict[tuple[int, int], EdgeEnd] = {}
    edges: dict[str, Edge] = {}
    for v, rot in enumerate(rots):
        for i, (label, leaves) in enumerate(rot):
            if not leaves:
                continue
            u, j = partner[(v, i)]
            eid = f"e{len(edges)}"
            edges[eid] = Edge(eid, label, ids[v], ids[u])
            ends[(v, i)] = EdgeEnd(eid, TAIL)
            ends[(u, j)] = EdgeEnd(eid, HEAD)
    vertices = {
        ids[v]: Vertex(ids[v], kinds[v], tuple(ends[(v, i)] for i in range(len(rot)))) for v, rot in enumerate(rots)
    }
    return Chart(name, degree, vertices, edges)


def build_chart(
    name: str,
    degree: int,
    kinds: list[VertexKind],
    rots: list[tuple[Slot, ...]],
    partner: dict[tuple[int, int], tuple[int, int]],
) -> Chart:
    bare = bare_chart(degree, kinds, rots, partner, name)
    return assemble(name, degree, bare.vertices, bare.edges)


def hoop(label: int, degree: int) -> Chart:
    vertices = {"a0": Vertex("a0", VertexKind.ANCHOR, (EdgeEnd("e0", TAIL), EdgeEnd("e0", HEAD)))}
    return assemble(f"hoop-{label}", degree, vertices, {"e0": Edge("e0", label, "a0", "a0")})


# -- connected components ----------------------------------------------------------


@dataclass(frozen=True)
class _Partial:
    kinds: tuple[VertexKind, ...]
    rots: tuple[tuple[Slot, ...], ...]
    partner: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    whites: int
    crossings: int
    slots: int

    def pairs(self) -> dict[tuple[int, int], tuple[int, int]]:
        out = {}
        for a, b in self.partner:
            out[a] = b
            out[b] = a
        return out

    def next_open(self, paired: dict) -> Optional[tuple[int, int]]:
        for v, rot in enumerate(self.rots):
            for i in range(len(rot)):
                if (v, i) not in paired:
                    return v, i
        return None

    def joined(self, a: tuple[int, int], b: tuple[int, int]) -> "_Partial":
        out_end, in_end = (a, b) if self.rots[a[0]][a[1]][1] else (b, a)
        return _Partial(
            self.kinds, self.rots, self.partner + ((out_end, in_end),), self.whites, self.crossings, self.slots
        )

    def grown(self, kind: VertexKind, rot: tuple[Slot, ...], a: tuple[int, int]) -> "_Partial":
        grown = _Partial(
            self.kinds + (kind,),
            self.rots + (rot,),
            self.partner,
            self.whites + (kind == VertexKind.WHITE),
            self.crossings + (kind == VertexKind.CROSSING),
            self.slots + len(rot),
        )
        return grown.joined(a, (len(self.rots), 0))


def _fits(p: _Partial, budget: EnumBudget) -> bool:
    return p.whites <= budget.max_whites and p.crossings <= budget.max_crossings and p.slots <= 2 * budget.max_edges


def _roots(budget: EnumBudget) -> list[_Partial]:
    out = []
    for kind, rot in _entry_rotations(budget.degree):
        p = _Partial((kind,), (rot,), (), int(kind == VertexKind.WHITE), int(kind == VertexKind.CROSSING), len(rot))
        if _fits(p, budget):
            out.append(p)
    return out


def _children(p: _Partial, budget: EnumBudget) -> Iterator[_Partial]:
    paired = p.pairs()
    v, i = p.next_open(paired)
    label, leaves = p.rots[v][i]
    for u in range(v, len(p.rots)):
        for j, (other, other_leaves) in enumerate(p.rots[u]):
            if (u, j) == (v, i) or (u, j) in paired or other != label or other_leaves == leaves:
                continue
            yield p.joined((v, i), (u, j))
    for kind, rot in _entry_rotations(budget.degree):
        if rot[0] != (label, not leaves):
            continue
        child = p.grown(kind, rot, (v, i))
        if _fits(child, budget):
            yield child


def _canonical(p: _Partial, degree: int) -> bool:
    chart = build_chart("component", degree, list(p.kinds), list(p.rots), p.pairs())
    if validate(chart):
        return False
    root = chart.vertices[f"{_LETTER[p.kinds[0]]}0"].rotation[0]
    code = rooted_code(chart, root)
    return all(rooted_code(chart, d) >= code for v in chart.vertices.values() for d in v.rotation)


def _complete(p: _Partial, budget: EnumBudget) -> Iterator[_Partial]:
    stack = [p]
    while stack:
        state = stack.pop()
        if state.next_open(state.pairs()) is None:
            if _canonical(state, budget.degree):
                yield state
            continue
        stack.extend(reversed(list(_children(state, budget))))


def _subtree(task: tuple[_Partial, EnumBudget]) -> list[_Partial]:
    return list(_complete(*task))


def _frontier(budget: EnumBudget, depth: int) -> list[_Partial]:
    level = _roots(budget)
    for _ in range(max(depth, 1) - 1):
        nxt = []
        for state in level:
            if state.next_open(state.pairs()) is None:
                nxt.append(state)
            else:
                nxt.extend(_children(state, budget))
        level = nxt
    return level


def enumerate_components(budget: EnumBudget, settings: Optional[Settings] = None) -> list[Chart]:
    """Connected charts within the budget, hoops excluded, one per isomorphism class."""
    settings = settings or get_settings()
    tasks = [(state, budget) for state in _frontier(budget, settings.split_depth)]
    logger.debug("component search split into %d subtrees", len(tasks))
    if settings.workers > 1 and len(tasks) > 1:
        with Pool(settings.workers) as pool:
            results = pool.map(_subtree, tasks)
    else:
        results = [_subtree(task) for task in tasks]
    charts = [
        build_chart("component", budget.degree, list(p.kinds), list(p.rots), p.pairs())
        for found in results
        for p in found
    ]
    charts.sort(key=lambda c: (c.white_count, _crossings(c), len(c.edges), canonical_code(c)))
    return charts


def _crossings(c: Chart) -> int:
    return len(c.vertices_of_kind(VertexKind.CROSSING))


# -- arrangements of components --------------------------------------------------------


@dataclass(frozen=True)
class _Piece:
    chart: Chart
    whites: int
    crossings: int
    edges: int
    hoops: int


def _piece(c: Chart) -> _Piece:
    hoops = len(c.vertices_of_kind(VertexKind.ANCHOR))
    return _Piece(c, c.white_count, _crossings(c), len(c.edges), hoops)


def _renamed(c: Chart, prefix: str) -> tuple[dict[str, Vertex], dict[str, Edge], list[FaceRef]]:
    def end(e: EdgeEnd) -> EdgeEnd:
        return EdgeEnd(prefix + e.edge, e.end)

    vertices = {prefix + vid: Vertex(prefix + vid, v.kind, tuple(end(e) for e in v.rotation)) for vid, v in c.vertices.items()}
    edges = {prefix + eid: Edge(prefix + eid, e.label, prefix + e.tail, prefix + e.head) for eid, e in c.edges.items()}
    faces = [face_ref_for(end(f.boundary[0])) for f in c.topology.faces]
    return vertices, edges, faces


def _placements(faces: list[list[FaceRef]]) -> Iterator[list[list[FaceRef]]]:
    """Regions, each a list of faces, for every way of nesting the components."""
    if not faces:
        yield []
        return

    def place(k: int, regions: list[list[FaceRef]]) -> Iterator[list[list[FaceRef]]]:
        if k == len(faces):
            yield regions
            return
        mine = faces[k]
        for r, members in enumerate(regions):
            rest = regions[:r] + regions[r + 1 :]
            for assign in product(range(len(mine)), repeat=len(members)):
                split = [[f] for f in mine]
                for member, g in zip(members, assign):
                    split[g].append(member)
                yield from place(k + 1, rest + split)

    yield from place(1, [[f] for f in faces[0]])


def _region_links(regions: list[list[FaceRef]]) -> list[tuple[FaceRef, FaceRef]]:
    return [(members[0], other) for members in regions for other in members[1:]]


def _collections(pieces: list[_Piece], budget: EnumBudget) -> Iterator[tuple[int, ...]]:
    def grow(start: int, chosen: tuple[int, ...], w: int, x: int, e: int, h: int) -> Iterator[tuple[int, ...]]:
        yield chosen
        for k in range(start, len(pieces)):
            p = pieces[k]
            nw, nx_, ne, nh = w + p.whites, x + p.crossings, e + p.edges, h + p.hoops
            if nw <= budget.max_whites and nx_ <= budget.max_crossings and ne <= budget.max_edges and nh <= budget.max_hoops:
                yield from grow(k, chosen + (k,), nw, nx_, ne, nh)

    yield from grow(0, (), 0, 0, 0, 0)


def enumerate_charts(budget: EnumBudget, settings: Optional[Settings] = None) -> Iterator[Chart]:
    """Every valid chart within the budget, once per canonical code."""
    pieces = [_piece(c) for c in enumerate_components(budget, settings)]
    pieces += [_piece(hoop(label, budget.degree)) for label in range(1, budget.degree)]
    count = 0
    for chosen in _collections(pieces, budget):
        if not chosen:
            count += 1
            yield Chart(f"gen-{count}", budget.degree)
            continue
        parts = [_renamed(pieces[k].chart, f"k{n}") for n, k in enumerate(chosen)]
        vertices = {vid: v for part in parts for vid, v in part[0].items()}
        edges = {eid: e for part in parts for eid, e in part[1].items()}
        seen: set[bytes] = set()
        for regions in _placements([part[2] for part in parts]):
            chart = assemble(f"gen-{count + 1}", budget.degree, vertices, edges, _region_links(regions))
            code = canonical_code(chart)
            if code in seen:
                continue
            seen.add(code)
            count += 1
            yield chart
    logger.info("enumerated %d charts within %s", count, budget)


# -- the independent slow generator ------------------------------------------------------


def _matchings(open_slots: list[tuple[int, int, Slot]]) -> Iterator[list[tuple[tuple[int, int], tuple[int, int]]]]:
    if not open_slots:
        yield []
        return
    v, i, (label, leaves) = open_slots[0]
    rest = open_slots[1:]
    for k, (u, j, (other, other_leaves)) in enumerate(rest):
        if other != label or other_leaves == leaves:
            continue
        pair = ((v, i), (u, j)) if leaves else ((u, j), (v, i))
        for tail in _matchings(rest[:k] + rest[k + 1 :]):
            yield [pair] + tail


def _rooted_trees(size: int) -> Iterator[tuple[int, ...]]:
    """Parent choices for nodes 1..size-1 that reach node 0 without a cycle."""
    for parents in product(range(size), repeat=size - 1):
        parent = (0,) + parents
        ok = True
        for node in range(1, size):
            seen = {node}
            step = parent[node]
            while step != 0 and ok:
                if step in seen:
                    ok = False
                seen.add(step)
                step = parent[step]
            if not ok or parent[node] == node:
                ok = False
                break
        if ok:
            yield parent


def _naive_arrangements(bare: Chart, degree: int, name: str) -> Iterator[Chart]:
    topo = bare.topology
    faces = [[face_ref_for(topo.faces[f].boundary[0]) for f in comp.faces] for comp in topo.components]
    size = len(faces)
    for parent in _rooted_trees(size):
        children = list(range(1, size))
        for hosts in product(*(range(len(faces[parent[k]])) for k in children)):
            for outers in product(*(range(len(faces[k])) for k in children)):
                links = [
                    (faces[parent[k]][h], faces[k][o]) for k, h, o in zip(children, hosts, outers)
                ]
                try:
                    yield assemble(name, degree, dict(bare.vertices), dict(bare.edges), links)
                except ChartError:
                    continue


def naive_charts(budget: EnumBudget) -> list[Chart]:
    """Every valid chart within the budget, by exhausting all end matchings."""
    types = local_types(budget.degree)
    found: dict[bytes, Chart] = {}
    max_vertices = 2 * budget.max_edges
    for k in range(0, max_vertices + 1):
        for combo in combinations_with_replacement(range(len(types)), k):
            kinds = [types[t][0] for t in combo]
            rots = [types[t][1] for t in combo]
            slots = sum(len(r) for r in rots)
            if (
                kinds.count(VertexKind.WHITE) > budget.max_whites
                or kinds.count(VertexKind.CROSSING) > budget.max_crossings
                or slots % 2
                or slots > 2 * budget.max_edges
            ):
                continue
            for hoops in range(budget.max_hoops + 1):
                if slots // 2 + hoops > budget.max_edges:
                    break
                for labels in combinations_with_replacement(range(1, budget.degree), hoops):
                    _naive_fill(budget, kinds, rots, labels, found)
    logger.info("naive generator found %d charts within %s", len(found), budget)
    return [found[code] for code in sorted(found)]


def _naive_fill(budget: EnumBudget, kinds, rots, hoop_labels, found: dict[bytes, Chart]) -> None:
    open_slots = [(v, i, slot) for v, rot in enumerate(rots) for i, slot in enumerate(rot)]
    for matching in _matchings(open_slots):
        partner = dict(matching)
        all_kinds = list(kinds) + [VertexKind.ANCHOR] * len(hoop_labels)
        all_rots = list(rots) + [((label, True), (label, False)) for label in hoop_labels]
        for n, label in enumerate(hoop_labels):
            v = len(rots) + n
            partner[(v, 0)] = (v, 1)
        if not all_kinds:
            found.setdefault(canonical_code(Chart("empty", budget.degree)), Chart("naive", budget.degree))
            continue
        bare = bare_chart(budget.degree, all_kinds, all_rots, partner)
        if any(v.condition not in ("containment", "infinity") for v in validate(bare)):
            continue
        for chart in _naive_arrangements(bare, budget.degree, "naive"):
            if not validate(chart):
                found.setdefault(canonical_code(chart), chart)
