from chartforge import NEGATIVE, OK, USAGE, run_cli
from config import Settings
from report_store import ReportStore
from tests.builders import DATA


def chart(name: str) -> str:
    return str(DATA / f"{name}.chart")


def test_validate_exit_codes(settings, capsys):
    assert run_cli(["validate", chart("lens-deficit")], settings) == OK
    assert capsys.readouterr().out == ""
    assert run_cli(["validate", chart("non-alternating")], settings) == NEGATIVE
    assert capsys.readouterr().out.startswith("(iii)\tw\t")
    assert run_cli(["validate", chart("duplicate-end")], settings) == USAGE
    assert "parse error: line 6" in capsys.readouterr().err


def test_missing_file(settings, capsys, tmp_path):
    assert run_cli(["validate", str(tmp_path / "absent.chart")], settings) == USAGE


def test_usage_errors(settings):
    assert run_cli([], settings) == USAGE
    assert run_cli(["iocheck", chart("loop")], settings) == USAGE


def test_classify(settings, capsys):
    assert run_cli(["classify", chart("lens-deficit")], settings) == OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("type\t(1; 2)\t-\t")
    assert sum(line.startswith("component\t") for line in lines) == 2


def test_features(settings, capsys):
    assert run_cli(["features", chart("lens-deficit")], settings) == OK
    assert "lens\t1,2\t2\t-\t(i)\t0\te1 e2" in capsys.readouterr().out.splitlines()
    assert run_cli(["features", chart("loop"), "--label", "1"], settings) == OK
    assert any(line.startswith("loop\t1\t1\t-\t-\t0\t") for line in capsys.readouterr().out.splitlines())


def test_iocheck(settings, capsys):
    assert run_cli(["iocheck", chart("lens-deficit"), "--label", "1"], settings) == OK
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_certify(settings, capsys):
    assert run_cli(["certify", chart("lens-deficit")], settings) == NEGATIVE
    rows = capsys.readouterr().out.splitlines()
    assert any(row.startswith("LENS-DEFICIT\t") for row in rows)
    assert run_cli(["certify", chart("free-edge")], settings) == OK
    assert capsys.readouterr().out == ""


def test_moves_then_apply(settings, capsys, tmp_path):
    assert run_cli(["moves", chart("hoop"), "--kinds", "CI-M1"], settings) == OK
    rows = capsys.readouterr().out.splitlines()
    death = next(row.split("\t")[0] for row in rows if row.endswith("\tdeath"))
    out = tmp_path / "after.chart"
    assert run_cli(["apply", chart("hoop"), "--move", death, "--out", str(out)], settings) == OK
    assert "inf everywhere" in out.read_text(encoding="utf-8")
    assert run_cli(["validate", str(out)], settings) == OK


def test_apply_unknown_move(settings, capsys):
    assert run_cli(["apply", chart("hoop"), "--move", "CI-M1:0000000000"], settings) == USAGE
    assert "no move" in capsys.readouterr().err


def test_enumerate(settings, capsys):
    assert run_cli(["enumerate", "--budget", "n=3,e=1,h=1"], settings) == OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# budget\tn=3,w=0,c=0,e=1,h=1"
    assert lines[-1] == "# total\t5"
    assert run_cli(["enumerate", "--budget", "n=0"], settings) == USAGE


def test_verify_without_saving(settings, capsys, tmp_path):
    out = tmp_path / "report.tsv"
    code = run_cli(["verify", "--type", "4,3", "--budget", "n=3,e=1", "--out", str(out), "--no-save"], settings)
    assert code == OK
    assert out.read_text(encoding="utf-8").startswith("# budget\tn=3,w=0,c=0,e=1,h=0\n")
    err = capsys.readouterr().err
    assert "bounded evidence" in err
    assert "saved report" not in err


def test_verify_saves_and_reports_lists(tmp_path, capsys):
    settings = Settings(database_url=f"sqlite:///{tmp_path / 'reports.db'}")
    assert run_cli(["verify", "--type", "4,3", "--budget", "n=3,e=1"], settings) == OK
    assert "saved report" in capsys.readouterr().err
    (row,) = ReportStore(settings=settings).list_reports()
    assert run_cli(["reports"], settings) == OK
    assert capsys.readouterr().out.startswith(f"{row[0]}\t(·; 4, 3)\t")
    assert run_cli(["reports", "--show", row[0]], settings) == OK
    assert capsys.readouterr().out.startswith("# budget\t")
    assert run_cli(["reports", "--show", "missing"], settings) == NEGATIVE


def test_render(settings, tmp_path):
    out = tmp_path / "lens.svg"
    assert run_cli(["render", chart("lens-deficit"), "--out", str(out), "--no-colors"], settings) == OK
    assert "<svg" in out.read_text(encoding="utf-8")


def test_classify_counts_parked_free_edges(settings, capsys):
    assert run_cli(["classify", chart("free-edge")], settings) == OK
    assert capsys.readouterr().out.splitlines()[0] == "type\t-\t-\t(0, -1)"
