import pytest

from chart_format import parse_chart, serialize_chart
from chart_map import (
    Chart,
    ChartParseError,
    Complexity,
    canonical_code,
    complexity,
    compute_faces,
    infinity_candidates,
    reflect,
    ro_family,
    validate,
    with_infinity,
    working_chart,
)
from tests.builders import empty, free_edge, hoop_chart, load, renamed, two_free_edges

VALID = [
    "empty",
    "free-edge",
    "hoop",
    "lonely-white",
    "loop",
    "lens-deficit",
    "bigon",
    "crossed-free-edges",
    "crossed-terminal",
    "three-lines",
    "m4-disk",
    "bigon-outflow",
    "bigon-mixed",
    "triangle-deficit",
    "feeler-merge",
]


@pytest.mark.parametrize("name", VALID)
def test_golden_charts_validate(name):
    assert validate(load(name)) == []


def test_empty_document_parses_to_empty_chart():
    c = parse_chart("chart nothing degree=4\ninf everywhere\n")
    assert c.is_empty
    assert c.edges == {}
    assert validate(c) == []


def test_free_edge_document():
    c = load("free-edge")
    assert sorted(c.vertices) == ["b1", "b2"]
    assert c.edges["e1"].label == 1


def test_duplicate_edge_end_is_a_parse_error():
    with pytest.raises(ChartParseError) as info:
        load("duplicate-end")
    assert info.value.line == 6
    assert "listed twice" in str(info.value)


def test_unknown_statement_reports_position():
    with pytest.raises(ChartParseError) as info:
        parse_chart("chart x degree=2\nvertex b1 kind=black\n")
    assert (info.value.line, info.value.column) == (2, 1)


def test_non_alternating_white_violates_condition_iii():
    violations = validate(load("non-alternating"))
    assert [(v.condition, v.witness) for v in violations] == [("iii", "w")]


def test_adjacent_crossing_labels_violate_condition_iv():
    violations = validate(load("adjacent-crossing"))
    assert [(v.condition, v.witness) for v in violations] == [("iv", "x")]


def test_label_outside_range_violates_condition_ii():
    c = parse_chart(serialize_chart(load("free-edge")).replace("label=1", "label=2"))
    assert any(v.condition == "ii" for v in validate(c))


def test_non_empty_chart_needs_infinity():
    text = serialize_chart(load("free-edge")).replace("inf at=e1.t side=left", "inf everywhere")
    assert [v.condition for v in validate(parse_chart(text))] == ["infinity"]


def test_validate_is_idempotent():
    c = load("non-alternating")
    assert validate(c) == validate(c)


@pytest.mark.parametrize(
    "chart, faces",
    [
        (load("free-edge"), 1),
        (load("hoop"), 2),
        (load("lonely-white"), 1),
        (load("loop"), 2),
        (load("lens-deficit"), 2),
        (load("three-lines"), 2),
        (load("m4-disk"), 5),
        (load("bigon-outflow"), 2),
        (load("feeler-merge"), 4),
    ],
)
def test_face_counts(chart, faces):
    assert len(compute_faces(chart)) == faces


@pytest.mark.parametrize("name", VALID)
def test_euler_characteristic_per_component(name):
    c = load(name)
    topo = c.topology
    total = sum(len(comp.vertices) - len(comp.edges) + len(comp.faces) for comp in topo.components)
    assert total == 2 * len(topo.components)


def test_faces_partition_the_darts():
    c = load("lens-deficit")
    darts = [d for face in compute_faces(c) for d in face.boundary]
    assert len(darts) == len(set(darts)) == 2 * len(c.edges)


@pytest.mark.parametrize("name", VALID)
def test_serialize_round_trip_keeps_the_code(name):
    c = load(name)
    again = parse_chart(serialize_chart(c))
    assert canonical_code(again) == canonical_code(c)
    assert validate(again) == []


def test_canonical_code_ignores_ids():
    for name in ("free-edge", "loop", "lens-deficit"):
        c = load(name)
        assert canonical_code(renamed(c, "z_")) == canonical_code(c)
    assert canonical_code(free_edge(prefix="q")) == canonical_code(load("free-edge"))


def test_canonical_code_ignores_infinity():
    c = load("lens-deficit")
    codes = {canonical_code(with_infinity(c, ref)) for ref in infinity_candidates(c)}
    assert len(codes) == 1


def test_canonical_code_separates_a_chart_from_its_mirror_image():
    c = load("loop")
    assert validate(reflect(c)) == []
    assert canonical_code(reflect(c)) != canonical_code(c)


def test_ro_family_has_four_valid_members():
    c = load("lens-deficit")
    family = list(ro_family(c))
    assert [name for name, _ in family] == ["identity", "reflection", "reversal", "reflection+reversal"]
    assert all(validate(member) == [] for _, member in family)


@pytest.mark.parametrize(
    "chart, expected",
    [
        (empty(), Complexity(0, 0)),
        (load("free-edge"), Complexity(0, -1)),
        (two_free_edges(), Complexity(0, -2)),
        (load("crossed-free-edges"), Complexity(0, -2)),
        (load("crossed-terminal"), Complexity(1, -1)),
        (load("lonely-white"), Complexity(1, 0)),
        (load("lens-deficit"), Complexity(2, 0)),
    ],
)
def test_complexity(chart, expected):
    assert complexity(chart) == expected


def test_complexity_order_is_lexicographic():
    assert Complexity(0, -1) < Complexity(0, 0) < Complexity(1, -5)


def test_working_chart_drops_components_parked_at_infinity():
    assert working_chart(load("free-edge")).is_empty
    assert working_chart(hoop_chart()).is_empty
    assert working_chart(load("crossed-free-edges")).is_empty
    assert working_chart(load("bigon")).is_empty
    assert working_chart(load("lens-deficit")).white_count == 2


def test_empty_chart_has_no_infinity_candidates():
    assert infinity_candidates(Chart("empty", 3)) == []
