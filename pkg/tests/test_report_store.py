import pytest
from sqlalchemy.exc import OperationalError

from harness import CertifiedChart, ReportCounts, SurvivorReport
from report_store import ReportStore


@pytest.fixture
def store():
    return ReportStore(database_url="sqlite://")


def report(**kwargs) -> SurvivorReport:
    values = dict(budget="n=4,w=7,c=4,e=40,h=0", signature="(·; 4, 3)", whites=7)
    values.update(kwargs)
    return SurvivorReport(**values)


def test_save_and_get(store):
    original = report(
        counts=ReportCounts(generated=5, valid=5, typed_matching=1, certified_out=1),
        certified=[CertifiedChart(digest="ab" * 20, placements=1, witnesses=["A2\tall-minimal\tx"])],
    )
    report_id = store.save_report(original)
    assert store.get_report(report_id) == original


def test_missing_report(store):
    assert store.get_report("nope") is None


def test_list_reports(store):
    first = store.save_report(report())
    second = store.save_report(report(whites=None, counts=ReportCounts(survivors=2)))
    rows = store.list_reports()
    assert {row[0] for row in rows} == {first, second}
    by_id = {row[0]: row for row in rows}
    assert by_id[first][1:] == ("(·; 4, 3)", "n=4,w=7,c=4,e=40,h=0", 7, 0)
    assert by_id[second][3:] == (None, 2)


def test_delete_report(store):
    report_id = store.save_report(report())
    assert store.delete_report(report_id)
    assert not store.delete_report(report_id)
    assert store.list_reports() == []


def test_settings_url_is_used(settings):
    store = ReportStore(settings=settings)
    assert str(store.engine.url) == "sqlite://"


def test_delete_retries_after_a_dropped_connection(tmp_path, monkeypatch):
    store = ReportStore(database_url=f"sqlite:///{tmp_path / 'reports.db'}")
    report_id = store.save_report(report())
    monkeypatch.setattr("report_store.time.sleep", lambda _: None)
    real = store._get_db
    failures = iter([OperationalError("DELETE", {}, Exception("connection reset by peer"))])

    def flaky_db():
        for exc in failures:
            raise exc
        return real()

    monkeypatch.setattr(store, "_get_db", flaky_db)
    assert store.delete_report(report_id)
    assert store.get_report(report_id) is None
