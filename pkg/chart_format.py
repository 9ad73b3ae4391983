"""
Line-oriented chart documents.

    chart <name> degree=<n>
    v <id> kind=(white|black|cross|anchor)
    e <id> label=<int> from=<vid> to=<vid>
    rot <vid>: <eid>.(t|h) ...
    embed <vid> in=<eid>.(t|h) side=(left|right) [outer=<eid>.(t|h) outer_side=(left|right)]
    inf at=<eid>.(t|h) side=(left|right) | inf everywhere

'#' starts a comment. Parsing checks references; axioms are left to
``chart_map.validate``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from chart_map import (
    HEAD,
    LEFT,
    RIGHT,
    TAIL,
    Chart,
    ChartParseError,
    Edge,
    EdgeEnd,
    Embedding,
    FaceRef,
    Vertex,
    VertexKind,
)

_TOKEN = re.compile(r"\S+")
_KINDS = {k.value: k for k in VertexKind}


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int

    def fail(self, message: str) -> ChartParseError:
        return ChartParseError(message, self.line, self.column)


def tokenize(text: str) -> list[list[Token]]:
    """Split a document into non-empty lines of tokens, comments removed."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [Token(m.group(), number, m.start() + 1) for m in _TOKEN.finditer(body)]
        if tokens:
            lines.append(tokens)
    return lines


def key_values(tokens: list[Token], required: set[str], optional: set[str] = frozenset()) -> dict[str, Token]:
    found: dict[str, Token] = {}
    for tok in tokens:
        if "=" not in tok.text:
            raise tok.fail(f"expected key=value, got {tok.text!r}")
        key, value = tok.text.split("=", 1)
        if key not in required and key not in optional:
            raise tok.fail(f"unknown key {key!r}")
        if key in found:
            raise tok.fail(f"key {key!r} given twice")
        if not value:
            raise tok.fail(f"empty value for {key!r}")
        found[key] = Token(value, tok.line, tok.column + len(key) + 1)
    missing = required - set(found)
    if missing:
        last = tokens[-1] if tokens else None
        where = (last.line, last.column) if last else (0, 0)
        raise ChartParseError(f"missing {', '.join(sorted(missing))}", *where)
    return found


def parse_int(tok: Token) -> int:
    try:
        return int(tok.text)
    except ValueError:
        raise tok.fail(f"expected an integer, got {tok.text!r}") from None


def parse_end(tok: Token) -> EdgeEnd:
    eid, dot, end = tok.text.rpartition(".")
    if not dot or not eid or end not in (TAIL, HEAD):
        raise tok.fail(f"expected <edge>.t or <edge>.h, got {tok.text!r}")
    return EdgeEnd(eid, end)


def parse_side(tok: Token) -> str:
    if tok.text not in (LEFT, RIGHT):
        raise tok.fail(f"side must be left or right, got {tok.text!r}")
    return tok.text


class _Document:
    def __init__(self):
        self.name = "chart"
        self.degree: Optional[int] = None
        self.kinds: dict[str, tuple[VertexKind, Token]] = {}
        self.edges: dict[str, tuple[Edge, Token]] = {}
        self.rotations: dict[str, tuple[list[EdgeEnd], list[Token]]] = {}
        self.embeds: list[tuple[str, Token, FaceRef, Token, Optional[FaceRef], Token]] = []
        self.infinity: Optional[tuple[Optional[FaceRef], Token]] = None

    def statement(self, tokens: list[Token]) -> None:
        head, rest = tokens[0], tokens[1:]
        handler = getattr(self, f"_st_{head.text}", None)
        if handler is None:
            raise head.fail(f"unknown statement {head.text!r}")
        handler(head, rest)

    def _st_chart(self, head: Token, rest: list[Token]) -> None:
        if not rest:
            raise head.fail("chart needs a name")
        self.name = rest[0].text
        kv = key_values(rest[1:], {"degree"})
        self.degree = parse_int(kv["degree"])

    def _st_v(self, head: Token, rest: list[Token]) -> None:
        if not rest:
            raise head.fail("v needs an id")
        vid = rest[0]
        if vid.text in self.kinds:
            raise vid.fail(f"duplicate vertex id {vid.text!r}")
        kv = key_values(rest[1:], {"kind"})
        if kv["kind"].text not in _KINDS:
            raise kv["kind"].fail(f"unknown vertex kind {kv['kind'].text!r}")
        self.kinds[vid.text] = (_KINDS[kv["kind"].text], vid)

    def _st_e(self, head: Token, rest: list[Token]) -> None:
        if not rest:
            raise head.fail("e needs an id")
        eid = rest[0]
        if eid.text in self.edges:
            raise eid.fail(f"duplicate edge id {eid.text!r}")
        kv = key_values(rest[1:], {"label", "from", "to"})
        edge = Edge(eid.text, parse_int(kv["label"]), kv["from"].text, kv["to"].text)
        self.edges[eid.text] = (edge, eid)

    def _st_rot(self, head: Token, rest: list[Token]) -> None:
        if not rest:
            raise head.fail("rot needs a vertex id")
        first = rest[0]
        if first.text.endswith(":"):
            vid, ends = Token(first.text[:-1], first.line, first.column), rest[1:]
        elif len(rest) > 1 and rest[1].text == ":":
            vid, ends = first, rest[2:]
        else:
            raise first.fail("expected ':' after the vertex id")
        if vid.text in self.rotations:
            raise vid.fail(f"second rotation for vertex {vid.text!r}")
        self.rotations[vid.text] = ([parse_end(t) for t in ends], [vid, *ends])

    def _st_embed(self, head: Token, rest: list[Token]) -> None:
        if not rest:
            raise head.fail("embed needs a vertex id")
        kv = key_values(rest[1:], {"in", "side"}, {"outer", "outer_side"})
        host = FaceRef(parse_end(kv["in"]), parse_side(kv["side"]))
        outer = None
        if "outer" in kv:
            side = parse_side(kv["outer_side"]) if "outer_side" in kv else LEFT
            outer = FaceRef(parse_end(kv["outer"]), side)
        self.embeds.append((rest[0].text, rest[0], host, kv["in"], outer, kv.get("outer", rest[0])))

    def _st_inf(self, head: Token, rest: list[Token]) -> None:
        if self.infinity is not None:
            raise head.fail("infinity given twice")
        if len(rest) == 1 and rest[0].text == "everywhere":
            self.infinity = (None, head)
            return
        kv = key_values(rest, {"at", "side"})
        self.infinity = (FaceRef(parse_end(kv["at"]), parse_side(kv["side"])), kv["at"])

    def build(self) -> Chart:
        for edge, tok in self.edges.values():
            for vid in (edge.tail, edge.head):
                if vid not in self.kinds:
                    raise tok.fail(f"edge {edge.id} refers to unknown vertex {vid!r}")

        owner: dict[EdgeEnd, str] = {}
        for vid, (ends, toks) in self.rotations.items():
            if vid not in self.kinds:
                raise toks[0].fail(f"rotation for unknown vertex {vid!r}")
            for end, tok in zip(ends, toks[1:]):
                if end.edge not in self.edges:
                    raise tok.fail(f"rotation refers to unknown edge {end.edge!r}")
                if end in owner:
                    raise tok.fail(f"edge-end {end} listed twice (duplicate reference)")
                expected = self.edges[end.edge][0].vertex_at(end.end)
                if expected != vid:
                    raise tok.fail(f"edge-end {end} belongs to vertex {expected!r}, not {vid!r}")
                owner[end] = vid
        for edge, tok in self.edges.values():
            for end in (EdgeEnd(edge.id, TAIL), EdgeEnd(edge.id, HEAD)):
                if end not in owner:
                    raise tok.fail(f"edge-end {end} is not listed in any rotation")

        vertices = {
            vid: Vertex(vid, kind, tuple(self.rotations.get(vid, ([], []))[0]))
            for vid, (kind, _) in self.kinds.items()
        }

        def check_ref(ref: FaceRef, tok: Token) -> None:
            if ref.end.edge not in self.edges:
                raise tok.fail(f"reference to unknown edge {ref.end.edge!r}")

        containment = []
        for vid, vtok, host, htok, outer, otok in self.embeds:
            if vid not in vertices:
                raise vtok.fail(f"embed refers to unknown vertex {vid!r}")
            check_ref(host, htok)
            if outer is None:
                if not vertices[vid].rotation:
                    raise vtok.fail(f"vertex {vid!r} has no edge to name its outer face")
                outer = FaceRef(vertices[vid].rotation[0], LEFT)
            else:
                check_ref(outer, otok)
            containment.append(Embedding(vid, host, outer))

        infinity = None
        if self.infinity is not None and self.infinity[0] is not None:
            check_ref(*self.infinity)
            infinity = self.infinity[0]

        degree = self.degree
        if degree is None:
            degree = max((e.label for e, _ in self.edges.values()), default=1) + 1
        edges = {eid: edge for eid, (edge, _) in self.edges.items()}
        return Chart(self.name, degree, vertices, edges, tuple(containment), infinity)


def parse_chart(text: str) -> Chart:
    doc = _Document()
    for tokens in tokenize(text):
        doc.statement(tokens)
    return doc.build()


def read_chart(path) -> Chart:
    with open(path, encoding="utf-8") as handle:
        return parse_chart(handle.read())


def serialize_chart(c: Chart) -> str:
    lines = [f"chart {c.name} degree={c.degree}"]
    for vid in sorted(c.vertices):
        lines.append(f"v {vid} kind={c.vertices[vid].kind.value}")
    for eid in sorted(c.edges):
        e = c.edges[eid]
        lines.append(f"e {eid} label={e.label} from={e.tail} to={e.head}")
    for vid in sorted(c.vertices):
        ends = " ".join(str(end) for end in c.vertices[vid].rotation)
        lines.append(f"rot {vid}: {ends}")
    for emb in c.containment:
        lines.append(
            f"embed {emb.vertex} in={emb.host.end} side={emb.host.side} "
            f"outer={emb.outer.end} outer_side={emb.outer.side}"
        )
    if c.infinity is None:
        lines.append("inf everywhere")
    else:
        lines.append(f"inf at={c.infinity.end} side={c.infinity.side}")
    return "\n".join(lines) + "\n"
