import pytest
from pydantic import ValidationError

from chart_map import ChartError
from render import (
    LABEL_COLORS,
    RenderStyle,
    label_color,
    layout_chart,
    render_svg,
    rotation_mismatches,
    same_cycle,
)
from tests.builders import empty, load


def test_label_colors_cycle():
    assert label_color(1) == LABEL_COLORS[0]
    assert label_color(len(LABEL_COLORS) + 1) == LABEL_COLORS[0]


def test_empty_chart_draws_only_the_legend():
    svg = render_svg(empty())
    assert svg.startswith("<?xml") or svg.startswith("<svg")
    assert svg.count("<circle") == 2


def test_free_edge_draws_both_black_vertices():
    assert render_svg(load("free-edge")).count("<circle") == 4


def test_anchors_are_not_drawn():
    assert render_svg(load("hoop")).count("<circle") == 2


def test_rendering_is_deterministic():
    c = load("lens-deficit")
    assert render_svg(c) == render_svg(c)


def test_colors_can_be_switched_off():
    c = load("lens-deficit")
    assert LABEL_COLORS[0] in render_svg(c)
    plain = render_svg(c, RenderStyle(labels_as_colors=False))
    assert not any(color in plain for color in LABEL_COLORS)


def test_orientation_arrows_one_per_edge():
    c = load("lens-deficit")
    with_arrows = render_svg(c).count("<path")
    without = render_svg(c, RenderStyle(show_orientations=False)).count("<path")
    assert with_arrows - without == len(c.edges)


def test_middle_arcs_two_ticks_per_white():
    c = load("lens-deficit")
    ticks = render_svg(c, RenderStyle(show_middle_arcs=True)).count("<path") - render_svg(c).count("<path")
    assert ticks == 2 * c.white_count


@pytest.mark.parametrize("name", ["lens-deficit", "lonely-white"])
def test_drawing_keeps_the_rotation_system(name):
    c = load(name)
    layout = layout_chart(c)
    assert layout.schematic == []
    assert rotation_mismatches(c, layout) == []


def test_invalid_chart_is_not_rendered():
    with pytest.raises(ChartError):
        render_svg(load("non-alternating"))


def test_style_rejects_empty_canvas():
    with pytest.raises(ValidationError):
        RenderStyle(width=0)


def test_same_cycle():
    assert same_cycle((1, 2, 3), (2, 3, 1))
    assert not same_cycle((1, 2, 3), (1, 3, 2))
    assert same_cycle((), ())
    assert not same_cycle((1,), (1, 1))
