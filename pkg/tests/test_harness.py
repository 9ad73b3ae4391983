from itertools import permutations
from types import SimpleNamespace

import pytest

import harness
from enumeration import EnumBudget
from harness import (
    NOT_APPLICABLE,
    ReportCounts,
    SurvivorReport,
    classify_triple,
    component_shape_census,
    table1_crosscheck,
    verify_type_nonexistence,
)
from subgraph import SignaturePattern
from tests.builders import load


@pytest.mark.parametrize(
    "triple, column",
    [
        ((1, 1, 2), "column-1"),
        ((1, 2, 1), "column-2"),
        ((1, 3, 0), "column-3"),
        ((3, 1, 0), "column-4"),
        ((2, 2, 0), "anomaly:(2, 2, 0)"),
        ((2, 1, 1), "anomaly:(2, 1, 1)"),
        ((0, 3, 1), "anomaly:(0, 3, 1)"),
    ],
)
def test_classify_triple(triple, column):
    assert classify_triple(triple) == column


def test_lens_chart_is_certified_at_every_placement(settings):
    c = load("lens-deficit")
    report = verify_type_nonexistence(
        SignaturePattern.parse("2"), EnumBudget.parse("n=3,w=2"), settings=settings, charts=[c]
    )
    assert report.counts.typed_matching == 1
    assert report.counts.certified_out == 1
    assert report.counts.survivors == 0
    (item,) = report.certified
    assert item.placements == 2
    assert all(row.startswith("A2\t") for row in item.witnesses)
    assert report.table1 == {NOT_APPLICABLE: 1}
    assert report.identities_hold()


def test_invalid_and_untyped_charts_are_counted(settings):
    charts = [load("non-alternating"), load("free-edge"), load("lonely-white")]
    report = verify_type_nonexistence(
        SignaturePattern.parse("4,3"), EnumBudget.parse("n=3"), settings=settings, charts=charts
    )
    assert report.counts == ReportCounts(generated=3, valid=2, invalid=1)
    assert report.identities_hold()


def test_tiny_budget_gives_bounded_evidence(settings):
    report = verify_type_nonexistence(SignaturePattern.parse("4,3"), EnumBudget.parse("n=3,e=1"), settings=settings)
    assert report.counts.generated == 3
    assert report.counts.typed_matching == 0
    assert report.counts.survivors == 0
    assert report.verdict.startswith("bounded evidence")
    assert report.signature == "(·; 4, 3)"
    assert len(report.rules_digest) == 40


def test_merge_adds_counts():
    a = SurvivorReport(budget="n=3", signature="(·; 2)", counts=ReportCounts(generated=2, valid=2), table1={"n/a": 1})
    b = SurvivorReport(budget="n=3", signature="(·; 2)", counts=ReportCounts(generated=1, invalid=1), table1={"n/a": 2})
    merged = a.merge(b)
    assert merged.counts == ReportCounts(generated=3, valid=2, invalid=1)
    assert merged.table1 == {"n/a": 3}
    assert merged.identities_hold()


def test_merge_refuses_different_runs():
    a = SurvivorReport(budget="n=3", signature="(·; 2)")
    with pytest.raises(ValueError):
        a.merge(SurvivorReport(budget="n=4", signature="(·; 2)"))


def test_tsv_header():
    report = SurvivorReport(budget="n=3", signature="(·; 4, 3)", whites=7, rules_digest="abc")
    lines = report.to_tsv().splitlines()
    assert lines[:5] == [
        "# budget\tn=3",
        "# signature\t(·; 4, 3)",
        "# whites\t7",
        "# rules\tabc",
        "# census\t-",
    ]
    assert lines[5].startswith("# verdict\tbounded evidence")
    assert "survivors\t0" in lines


def test_survivor_documents_are_indented():
    report = SurvivorReport(budget="n=3", signature="(·; 2)", survivor_documents=["chart x degree=3\ninf everywhere\n"])
    tail = report.to_tsv().splitlines()[-3:]
    assert tail == ["survivor", "\tchart x degree=3", "\tinf everywhere"]


def test_shape_census_skips_charts_with_a2_flags(settings):
    charts = [load("lens-deficit"), load("lonely-white")]
    assert component_shape_census(EnumBudget.parse("n=3"), 1, settings, charts=charts) == set()


def test_table1_crosscheck_needs_a_seven_white_chart(settings):
    assert table1_crosscheck(load("lens-deficit"), settings) == NOT_APPLICABLE


def disk(k, feelers, whites):
    region = SimpleNamespace(curve=SimpleNamespace(keys=frozenset()), interior_whites=lambda c: whites)
    return SimpleNamespace(k=k, feelers=(object(),) * feelers, region=region)


def seven_white_setup(monkeypatch, disks):
    monkeypatch.setattr(harness, "_outer_label", lambda c: 3)
    monkeypatch.setattr(harness, "working_chart", lambda c: SimpleNamespace(white_count=7))
    monkeypatch.setattr(harness, "tracks_of_label", lambda c, k: [])
    monkeypatch.setattr(harness, "enumerate_disk_regions", lambda c, k, settings=None: list(disks))


@pytest.mark.parametrize("order", list(permutations(range(3))))
def test_table1_column_follows_disk_roles(monkeypatch, order):
    two_angled, with_feeler, without_feeler = disk(2, 0, 1), disk(3, 1, 2), disk(3, 0, 1)
    found = [two_angled, with_feeler, without_feeler]
    seven_white_setup(monkeypatch, [found[i] for i in order])
    assert table1_crosscheck(None) == "column-2"


def test_table1_reports_triples_outside_the_table(monkeypatch):
    seven_white_setup(monkeypatch, [disk(3, 0, 0), disk(2, 0, 2), disk(3, 1, 2)])
    assert table1_crosscheck(None) == "anomaly:(2, 2, 0)"


def test_table1_needs_one_disk_of_each_role(monkeypatch):
    seven_white_setup(monkeypatch, [disk(3, 0, 1), disk(3, 1, 1), disk(3, 0, 2)])
    assert table1_crosscheck(None) == NOT_APPLICABLE


@pytest.mark.slow
@pytest.mark.parametrize("whites, budget, classes", [(2, "n=3,w=2,e=11", 2), (3, "n=3,w=3,e=16", 1)])
def test_shape_census_counts(whites, budget, classes, settings):
    shapes = component_shape_census(EnumBudget.parse(budget), 1, settings, whites=whites)
    assert len(shapes) == classes
