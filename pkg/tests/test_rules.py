import pytest

from config import ROOT
from rewrite import RULE_KINDS, RuleFileError, load_rules, parse_rules

BIGON = """\
rule tiny kind=CI-generic
boundary 4 attachment points

before
v c1 kind=cross
v c2 kind=cross
e a0 label=1 from=@0 to=c1
e a1 label=1 from=c1 to=c2
e a2 label=1 from=c2 to=@1
e b0 label=3 from=@2 to=c2
e b1 label=3 from=c2 to=c1
e b2 label=3 from=c1 to=@3
rot c1: b1.h a1.t b2.t a0.h
rot c2: b0.h a1.h b1.t a2.t

after
e a label=1 from=@0 to=@1
e b label=3 from=@2 to=@3
"""


def test_bundled_catalog():
    book = load_rules(ROOT / "rules")
    assert {r.name: r.kind for r in book.rules} == {
        "bigon_collapse": "CI-generic",
        "cut_edge": "CutEdge-macro",
        "m4_half_turn": "CI-M4",
    }
    assert len(book.digest) == 40
    assert {r.kind for r in book.rules} <= RULE_KINDS


def test_rules_directory_digest_tracks_content(tmp_path):
    (tmp_path / "a.rule").write_text(BIGON, encoding="utf-8")
    first = load_rules(tmp_path).digest
    other = tmp_path / "other"
    other.mkdir()
    (other / "a.rule").write_text(BIGON.replace("rule tiny", "rule small"), encoding="utf-8")
    assert load_rules(other).digest != first


def test_parse_rule():
    (rule,) = parse_rules(BIGON)
    assert rule.name == "tiny"
    assert rule.before.ports == rule.after.ports == 4
    assert rule.before.pattern == rule.after.pattern
    assert rule.source == "catalog"


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("rule x kind=bogus\n", "rule kind must be one of"),
        ("boundary 4 attachment points\n", "before the first rule header"),
        ("rule x kind=CI-generic\nbefore\nv c1 kind=cross\n", "has no boundary line"),
        (BIGON.replace("after\n", "").replace("e a label=1 from=@0 to=@1\ne b label=3 from=@2 to=@3\n", ""),
         "has no after section"),
        (BIGON.replace("label=3 from=@2 to=@3", "label=2 from=@2 to=@3"), "boundary intersection patterns differ"),
        (BIGON.replace("to=@1\ne b", "to=@7\ne b"), "port 7"),
    ],
)
def test_rule_file_errors(text, fragment):
    with pytest.raises(RuleFileError) as info:
        parse_rules(text, "bad.rule")
    assert fragment in str(info.value)
    assert info.value.path == "bad.rule"


def test_black_vertex_not_allowed_in_c_i_rule():
    text = """\
rule b kind=CI-generic
boundary 2 attachment points
before
v b1 kind=black
v b2 kind=black
e f label=1 from=@0 to=b1
e g label=1 from=b2 to=@1
rot b1: f.h
rot b2: g.t
after
e h label=1 from=@0 to=@1
"""
    with pytest.raises(RuleFileError) as info:
        parse_rules(text, "b.rule")
    assert "may not hold a black vertex" in str(info.value)


def test_missing_rules_directory(tmp_path):
    with pytest.raises(RuleFileError):
        load_rules(tmp_path / "nowhere")


def test_duplicate_rule_names(tmp_path):
    (tmp_path / "a.rule").write_text(BIGON, encoding="utf-8")
    (tmp_path / "b.rule").write_text(BIGON, encoding="utf-8")
    with pytest.raises(RuleFileError) as info:
        load_rules(tmp_path)
    assert "used twice" in str(info.value)
