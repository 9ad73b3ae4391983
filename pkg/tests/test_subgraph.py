import pytest

from chart_map import HEAD, TAIL, ChartError, EdgeEnd
from subgraph import (
    SignaturePattern,
    TrackRole,
    TypeSignature,
    chart_type,
    component_census,
    component_shape,
    labels_present,
    track_of_edge,
    tracks_of_label,
    white_local_structure,
)
from tests.builders import hoop_chart, load, renamed


def roles(c, m):
    return sorted(t.role.value for t in tracks_of_label(c, m))


def test_track_roles():
    lens = load("lens-deficit")
    assert roles(lens, 1) == ["internal", "terminal", "terminal", "terminal", "terminal"]
    assert roles(load("free-edge"), 1) == ["free"]
    assert roles(load("hoop"), 2) == ["hoop"]
    assert roles(load("loop"), 1) == ["loop", "terminal"]
    assert roles(load("loop"), 2) == ["terminal"] * 3


def test_hoop_track_is_closed():
    (track,) = tracks_of_label(hoop_chart(label=1), 1)
    assert track.closed
    assert track.endpoints == ()


def test_track_of_edge_and_ends():
    c = load("lens-deficit")
    track = track_of_edge(c, "e1")
    assert (track.start, track.end) == ("w1", "w2")
    assert track.first_end == EdgeEnd("e1", TAIL)
    assert track.end_at("w2") == [EdgeEnd("e1", HEAD)]
    assert str(track) == "internal[1]:e1"


def test_labels_present():
    assert labels_present(load("lens-deficit")) == [1, 2]
    assert labels_present(load("empty")) == []


def test_component_census_of_lens_chart():
    (comp,) = component_census(load("lens-deficit"), 1)
    assert comp.whites == ("w1", "w2")
    assert comp.roles == {"internal": 1, "terminal": 4}
    assert comp.loop_free
    assert comp.row().startswith("1\t2\tinternal=1,terminal=4\t")


def test_component_census_flags_loops():
    (comp,) = component_census(load("loop"), 1)
    assert comp.white_count == 1
    assert not comp.loop_free


def test_component_shape_is_invariant_under_renaming():
    c = load("lonely-white")
    (comp,) = component_census(c, 1)
    other = renamed(c, "r_")
    (again,) = component_census(other, 1)
    assert component_shape(c, comp) == component_shape(other, again)


def test_component_shape_rejects_closed_tracks():
    c = hoop_chart(label=1)
    (comp,) = component_census(c, 1)
    with pytest.raises(ChartError):
        component_shape(c, comp)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("lens-deficit", TypeSignature(1, (2,))),
        ("lonely-white", TypeSignature(1, (1,))),
        ("loop", TypeSignature(1, (1,))),
        ("free-edge", None),
        ("empty", None),
    ],
)
def test_chart_type(name, expected):
    assert chart_type(load(name)) == expected


def test_type_signature_text():
    assert str(TypeSignature(2, (4, 0, 3), gapped=True)) == "(2; 4, 0, 3)"
    assert TypeSignature(2, (4, 3)).white_count == 7


def test_signature_pattern_parse():
    assert SignaturePattern.parse("4,3") == SignaturePattern((4, 3))
    assert SignaturePattern.parse("(2; 4, 3)") == SignaturePattern((4, 3), 2)
    assert str(SignaturePattern.parse("(·; 4,3)")) == "(·; 4, 3)"
    with pytest.raises(ValueError):
        SignaturePattern.parse("()")


def test_signature_pattern_matches_flipped_counts():
    pattern = SignaturePattern.parse("4,3")
    assert pattern.matches(TypeSignature(1, (4, 3)))
    assert pattern.matches(TypeSignature(5, (3, 4)))
    assert not SignaturePattern((4, 3), allow_flip=False).matches(TypeSignature(1, (3, 4)))
    assert not SignaturePattern((4, 3), m=2).matches(TypeSignature(1, (4, 3)))
    assert not pattern.matches(None)


def test_white_local_structure():
    c = load("lonely-white")
    ws = white_local_structure(c, "w")
    assert ws.base == 1
    assert ws.middle_in == EdgeEnd("t1", HEAD)
    assert ws.middle_out == EdgeEnd("t4", TAIL)
    assert ws.middle_of_label(c, 1) == EdgeEnd("t4", TAIL)
    assert ws.flanking(EdgeEnd("t0", HEAD)) == (EdgeEnd("t5", TAIL), EdgeEnd("t1", HEAD))


def test_white_local_structure_rejects_non_white():
    with pytest.raises(ChartError):
        white_local_structure(load("lonely-white"), "b0")
