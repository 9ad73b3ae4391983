import pytest

from disks import (
    DAlphaArcError,
    DiskError,
    associated_disk,
    enumerate_disk_regions,
    find_d_alpha_arcs,
    find_lenses,
    find_m4_disks,
    find_nice_edges,
    is_d_alpha_free,
    simple_curves,
)
from subgraph import TrackRole, track_of_edge, tracks_of_label
from tests.builders import hoop_chart, load


def loop_track(c):
    return next(t for t in tracks_of_label(c, 1) if t.role == TrackRole.LOOP)


def test_lens_between_two_internal_edges():
    c = load("lens-deficit")
    (lens,) = find_lenses(c)
    assert lens.labels == (1, 2)
    assert lens.edges == ("e1", "e2")
    assert lens.whites == ("w1", "w2")
    assert lens.condition == "i"
    assert lens.region.interior_whites(c) == 0
    assert not lens.region.contains_infinity
    assert lens.row(c) == "lens\t1,2\t2\t-\t(i)\t0\te1 e2"


def test_no_lenses_without_internal_edges():
    assert find_lenses(load("lonely-white")) == []
    assert find_lenses(load("loop")) == []


def test_associated_disk_of_a_loop():
    c = load("loop")
    disk = associated_disk(c, loop_track(c))
    assert disk.interior_vertices == ("b1",)
    assert disk.interior_whites(c) == 0
    assert disk.euler == 1


def test_associated_disk_needs_a_loop():
    c = load("loop")
    with pytest.raises(DiskError):
        associated_disk(c, track_of_edge(c, "s4"))


def test_simple_curves():
    loop = load("loop")
    (curve,) = simple_curves(loop, 1)
    assert curve.segments == (("L", True),)
    assert curve.whites == ("w",)
    assert simple_curves(load("lens-deficit"), 1) == []
    (closed,) = simple_curves(hoop_chart(label=2), 2)
    assert closed.whites == ()


def test_angled_disks_on_both_sides_of_a_loop():
    c = load("loop")
    disks = enumerate_disk_regions(c, 1)
    assert len(disks) == 2
    assert all(d.region.euler == 1 and d.k == 1 for d in disks)
    assert sorted(len(d.feelers) for d in disks) == [0, 1]
    assert all(d.special for d in disks)


def test_no_m4_disks_on_small_charts():
    for name in ("lens-deficit", "loop", "lonely-white"):
        assert find_m4_disks(load(name)) == []


def test_d_alpha_arcs():
    c = load("loop")
    disk = associated_disk(c, loop_track(c))
    assert find_d_alpha_arcs(c, disk, "L", 2) == []
    assert is_d_alpha_free(c, disk, "L")
    with pytest.raises(DAlphaArcError):
        find_d_alpha_arcs(c, disk, "s1", 2)


def test_m4_disk_around_crossing_diagonals():
    c = load("m4-disk")
    (m4,) = find_m4_disks(c)
    assert m4.label == 2
    assert sorted(m4.boundary_edges) == ["e1", "e2", "e3", "e4"]
    assert {c.edges[key].label for key in m4.diagonals} == {1, 3}
    assert m4.region.interior_whites(c) == 0
    assert m4.row(c).startswith("m4-disk\t2\t4\t")


def test_nice_edges_are_the_diagonals_of_the_square():
    c = load("m4-disk")
    disks = enumerate_disk_regions(c, 2)
    found = sorted((find_nice_edges(c, d) for d in disks), key=len)
    assert [len(tracks) for tracks in found] == [0, 2]
    assert sorted(t.label for t in found[1]) == [1, 3]
    assert {(t.start, t.end) for t in found[1]} == {("w1", "w3"), ("w4", "w2")}


def test_no_nice_edges_without_a_diagonal():
    c = load("triangle-deficit")
    assert all(find_nice_edges(c, d) == [] for d in enumerate_disk_regions(c, 1))
