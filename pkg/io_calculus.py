"""
IO-Calculation.

A closed domain F is a union of complementary regions whose boundary edges
all carry labels m-1, m or m+1. Label-m tracks can never cross such a
boundary, so every label-m track touching F starts and ends in F and the
inward and outward label-m germs at white and black vertices of F balance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from chart_map import CapExceeded, Chart, EdgeEnd, VertexKind
from config import Settings, get_settings

logger = logging.getLogger(__name__)

_COUNTED = (VertexKind.WHITE, VertexKind.BLACK)


@dataclass(frozen=True)
class IoDomain:
    label: int
    regions: frozenset[int]
    faces: frozenset[int]
    boundary_edges: tuple[str, ...]
    boundary_labels: frozenset[int]

    @property
    def whole(self) -> bool:
        return not self.boundary_edges

    def __str__(self) -> str:
        faces = ",".join(str(f) for f in sorted(self.faces))
        return f"F[{faces}]" if not self.whole else f"F[{faces}] (sphere)"


def _region_graph(c: Chart) -> dict[int, set[int]]:
    topo = c.topology
    adj: dict[int, set[int]] = {r: set() for r in range(len(topo.region_members))}
    for eid in c.edges:
        a = topo.faces[topo.face_of[EdgeEnd(eid, "t")]].region
        b = topo.faces[topo.face_of[EdgeEnd(eid, "h")]].region
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return adj


def _connected_subsets(adj: dict[int, set[int]], max_size: Optional[int]) -> Iterator[frozenset[int]]:
    """Each connected vertex set of ``adj`` exactly once (ESU order)."""

    def extend(sub: frozenset[int], nbhd: set[int], ext: set[int], root: int) -> Iterator[frozenset[int]]:
        yield sub
        if max_size is not None and len(sub) >= max_size:
            return
        ext = set(ext)
        while ext:
            w = min(ext)
            ext.remove(w)
            grown = ext | {u for u in adj[w] if u > root and u not in nbhd}
            yield from extend(sub | {w}, nbhd | adj[w], grown, root)

    for root in sorted(adj):
        yield from extend(frozenset([root]), {root} | adj[root], {u for u in adj[root] if u > root}, root)


def domain_of(c: Chart, regions: Iterable[int], m: int) -> IoDomain:
    topo = c.topology
    regions = frozenset(regions)
    faces = frozenset(f.id for f in topo.faces if f.region in regions)
    boundary = []
    for eid in sorted(c.edges):
        left = topo.faces[topo.face_of[EdgeEnd(eid, "t")]].region in regions
        right = topo.faces[topo.face_of[EdgeEnd(eid, "h")]].region in regions
        if left != right:
            boundary.append(eid)
    labels = frozenset(c.edges[e].label for e in boundary)
    return IoDomain(m, regions, faces, tuple(boundary), labels)


def enumerate_io_domains(
    c: Chart, m: int, settings: Optional[Settings] = None, max_size: Optional[int] = None
) -> list[IoDomain]:
    """Connected unions of regions whose boundary carries labels m-1, m, m+1 only."""
    cap = (settings or get_settings()).domain_cap
    if c.is_empty:
        return []
    allowed = {m - 1, m, m + 1}
    adj = _region_graph(c)
    out: list[IoDomain] = []
    examined = 0
    for regions in _connected_subsets(adj, max_size):
        examined += 1
        if examined > cap:
            raise CapExceeded(f"io domains of label {m}", cap)
        domain = domain_of(c, regions, m)
        if domain.boundary_labels <= allowed:
            out.append(domain)
    if not any(d.whole for d in out):
        out.append(domain_of(c, adj, m))
    logger.debug("label %d: %d io domains out of %d examined", m, len(out), examined)
    return out


def germ_in(c: Chart, f: IoDomain, end: EdgeEnd) -> bool:
    """The germ of ``end`` lies in the closed domain when either side does."""
    topo = c.topology
    return (
        topo.faces[topo.face_of[end]].region in f.regions
        or topo.faces[topo.face_of[end.opposite]].region in f.regions
    )


def io_balance(c: Chart, f: IoDomain, m: Optional[int] = None) -> tuple[int, int]:
    """(inward, outward) label-m germs at white and black vertices of ``f``."""
    m = f.label if m is None else m
    inward = outward = 0
    for vertex in c.vertices.values():
        if vertex.kind not in _COUNTED:
            continue
        for end in vertex.rotation:
            if c.label(end) != m or not germ_in(c, f, end):
                continue
            if end.inward:
                inward += 1
            else:
                outward += 1
    return inward, outward


def io_imbalances(
    c: Chart, m: int, settings: Optional[Settings] = None
) -> list[tuple[IoDomain, int, int]]:
    out = []
    for domain in enumerate_io_domains(c, m, settings):
        inward, outward = io_balance(c, domain, m)
        if inward != outward:
            out.append((domain, inward, outward))
    return out


@dataclass(frozen=True)
class IoBound:
    inward: int
    outward: int

    @property
    def balanced(self) -> bool:
        return self.inward == self.outward

    @property
    def required_interior_whites(self) -> int:
        return 0 if self.balanced else 1

    def __str__(self) -> str:
        verdict = "balanced" if self.balanced else "interior white vertices required >= 1"
        return f"in={self.inward} out={self.outward}: {verdict}"


def io_lower_bound(germs: Iterable[str]) -> IoBound:
    """Lower bound on interior whites from fixed label-m germs of a domain.

    ``germs`` lists each fixed germ as ``"in"`` or ``"out"``. A domain with
    no interior white vertex would have to balance them.
    """
    inward = outward = 0
    for germ in germs:
        if germ == "in":
            inward += 1
        elif germ == "out":
            outward += 1
        else:
            raise ValueError(f"germ must be 'in' or 'out', got {germ!r}")
    return IoBound(inward, outward)
