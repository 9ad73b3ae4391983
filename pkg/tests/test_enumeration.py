import pytest

from chart_format import parse_chart, serialize_chart
from chart_map import canonical_code, validate
from config import Settings
from enumeration import DESK_BUDGET, EnumBudget, enumerate_charts, enumerate_components, hoop, naive_charts
from io_calculus import io_imbalances, io_lower_bound
from moves import A2_TERMINAL, assumption_flags
from subgraph import TrackRole, chart_type, component_census


def test_budget_parse():
    budget = EnumBudget.parse("n=4, w=2, e=6")
    assert budget == EnumBudget(degree=4, max_whites=2, max_edges=6)
    assert str(budget) == "n=4,w=2,c=0,e=6,h=0"
    assert EnumBudget.parse(str(budget)) == budget


def test_default_budget():
    assert EnumBudget.parse("default") is DESK_BUDGET
    assert str(DESK_BUDGET) == "n=4,w=7,c=4,e=40,h=0"


@pytest.mark.parametrize("text", ["w=2", "n=3,x=1", "n=3,w", "n=1", "n=3,e=-1"])
def test_bad_budgets(text):
    with pytest.raises(ValueError):
        EnumBudget.parse(text)


def test_free_edges_and_hoops():
    charts = list(enumerate_charts(EnumBudget.parse("n=3,e=1,h=1"), Settings()))
    assert len(charts) == 5
    assert all(validate(c) == [] for c in charts)
    assert len({canonical_code(c) for c in charts}) == 5
    assert sum(c.is_empty for c in charts) == 1


def test_degree_two_has_no_white_vertices():
    charts = list(enumerate_charts(EnumBudget.parse("n=2,w=2,e=2"), Settings()))
    assert len(charts) == 3
    assert all(chart_type(c) is None for c in charts)


def test_components_are_connected_and_valid():
    for c in enumerate_components(EnumBudget.parse("n=3,e=2"), Settings()):
        assert validate(c) == []
        assert len(c.topology.components) == 1


def test_hoop():
    c = hoop(2, 4)
    assert validate(c) == []
    assert [e.label for e in c.edges.values()] == [2]


def test_split_depth_does_not_change_the_result():
    budget = EnumBudget.parse("n=3,e=2")
    serial = {canonical_code(c) for c in enumerate_charts(budget, Settings(workers=1, split_depth=0))}
    split = {canonical_code(c) for c in enumerate_charts(budget, Settings(workers=1, split_depth=2))}
    assert serial == split


@pytest.mark.slow
def test_pruned_search_matches_naive_generator():
    budget = EnumBudget.parse("n=3,e=2,h=1")
    pruned = {canonical_code(c) for c in enumerate_charts(budget, Settings())}
    naive = {canonical_code(c) for c in naive_charts(budget)}
    assert pruned == naive


@pytest.mark.slow
def test_pruned_search_matches_naive_generator_with_whites():
    budget = EnumBudget.parse("n=3,w=2,c=1,e=8")
    pruned = {canonical_code(c) for c in enumerate_charts(budget, Settings())}
    naive = {canonical_code(c) for c in naive_charts(budget)}
    assert pruned == naive


@pytest.fixture(scope="module")
def one_white_charts():
    return list(enumerate_charts(EnumBudget.parse("n=3,w=1,e=6"), Settings()))


@pytest.mark.slow
def test_enumerated_charts_survive_serialization(one_white_charts):
    assert any(c.white_count == 1 for c in one_white_charts)
    for c in one_white_charts:
        again = parse_chart(serialize_chart(c))
        assert canonical_code(again) == canonical_code(c)


@pytest.mark.slow
def test_enumerated_charts_are_balanced(one_white_charts):
    for c in one_white_charts:
        for m in range(1, c.degree):
            assert io_imbalances(c, m) == []


@pytest.mark.slow
def test_lonely_components_carry_a_terminal_flag(one_white_charts):
    for c in one_white_charts:
        flagged = {f.witness for f in assumption_flags(c) if f.tag == A2_TERMINAL}
        for m in range(1, c.degree):
            for comp in component_census(c, m):
                if comp.white_count != 1 or not comp.loop_free:
                    continue
                assert all(t.role == TrackRole.TERMINAL for t in comp.tracks)
                assert flagged & {e for t in comp.tracks for e in t.edges}


def test_four_in_two_out_needs_an_interior_white():
    bound = io_lower_bound(["in"] * 4 + ["out"] * 2)
    assert (bound.inward, bound.outward) == (4, 2)
    assert bound.required_interior_whites >= 1
