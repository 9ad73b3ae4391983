from collections import Counter

import pytest

from certificates import Scope, run_certificates, verify_witness
from chart_map import ChartError, flip_labels, ro_family
from subgraph import component_census, component_shape
from tests.builders import empty, load


def lemma_ids(c, **kwargs):
    return Counter(cert.lemma_id for cert in run_certificates(c, **kwargs))


def test_lens_chart_certificates():
    c = load("lens-deficit")
    assert lemma_ids(c) == {"A2": 4, "LENS-DEFICIT": 1, "LENS-AT-≤7": 1}
    lens = next(cert for cert in run_certificates(c) if cert.lemma_id == "LENS-DEFICIT")
    assert lens.row() == "LENS-DEFICIT\tall-minimal\tlens[1]:e1,e2@left"


def test_lonely_white_certificates():
    assert lemma_ids(load("lonely-white")) == {"A2": 4, "LONELY-COMPONENT": 2}


def test_loop_certificates():
    ids = lemma_ids(load("loop"))
    assert ids["LOOP-DEFICIT"] == 1
    assert ids["LONELY-COMPONENT"] == 2
    assert "LOOP-AT-7" not in ids


@pytest.mark.parametrize("name", ["free-edge", "hoop", "bigon", "crossed-free-edges"])
def test_quiet_charts(name):
    assert run_certificates(load(name)) == []


def test_empty_chart_fires_nothing():
    assert run_certificates(empty()) == []


def test_scope_filter():
    c = load("lens-deficit")
    assert "LENS-AT-≤7" not in lemma_ids(c, scopes=[Scope.ALL_MINIMAL])
    assert lemma_ids(c, scopes=[Scope.AT_MOST_SEVEN]) == {"LENS-AT-≤7": 1}


def test_scope_applies():
    assert Scope.AT_MOST_SEVEN.applies(7)
    assert not Scope.AT_MOST_SEVEN.applies(8)
    assert Scope.EXACTLY_SEVEN.applies(7)
    assert not Scope.EXACTLY_SEVEN.applies(6)
    assert Scope.ALL_MINIMAL.applies(100)


@pytest.mark.parametrize("name", ["lens-deficit", "lonely-white"])
def test_certificates_are_symmetric(name):
    c = load(name)
    expected = lemma_ids(c)
    for _, variant in ro_family(c):
        assert lemma_ids(variant) == expected
    assert lemma_ids(flip_labels(c)) == expected


def test_every_fired_certificate_verifies():
    c = load("lens-deficit")
    fired = run_certificates(c)
    assert fired
    assert all(verify_witness(c, cert) for cert in fired)
    assert not verify_witness(load("free-edge"), fired[-1])


def test_unknown_certificate_id():
    cert = run_certificates(load("lens-deficit"))[0]
    bogus = type(cert)("NO-SUCH-RULE", cert.scope, cert.witness, cert.message)
    with pytest.raises(ChartError):
        verify_witness(load("lens-deficit"), bogus)


def test_shape_census():
    c = load("lens-deficit")
    assert lemma_ids(c, shapes=set())["SHAPE-VIOLATION"] == 2
    census = {component_shape(c, comp) for m in (1, 2) for comp in component_census(c, m)}
    assert "SHAPE-VIOLATION" not in lemma_ids(c, shapes=census)


@pytest.mark.parametrize(
    "name, lemma",
    [
        ("bigon-outflow", "2GON-OUTFLOW"),
        ("triangle-deficit", "TRIANGLE-DEFICIT"),
        ("triangle-deficit", "BW-ORIENTATION"),
        ("feeler-merge", "TWO-FEELER-3GON"),
        ("feeler-merge", "FEELER-MERGE"),
    ],
)
def test_disk_certificates_fire(name, lemma):
    c = load(name)
    fired = [cert for cert in run_certificates(c) if cert.lemma_id == lemma]
    assert fired
    assert all(verify_witness(c, cert) for cert in fired)


def test_bigon_outflow_witness():
    (cert,) = [cert for cert in run_certificates(load("bigon-outflow")) if cert.lemma_id == "2GON-OUTFLOW"]
    assert cert.message == "empty 2-angled disk with both outer edges outward"
    assert cert.witness.label == 1


def test_bigon_with_mixed_outer_edges_is_quiet():
    ids = lemma_ids(load("bigon-mixed"))
    assert "2GON-OUTFLOW" not in ids
    assert "BW-ORIENTATION" in ids


def test_feeler_merge_names_the_lens():
    (cert,) = [cert for cert in run_certificates(load("feeler-merge")) if cert.lemma_id == "FEELER-MERGE"]
    assert set(cert.witness.keys[2:]) == {"g1", "g2"}


def test_terminal_feelers_stop_the_triangle_deficit():
    assert "TRIANGLE-DEFICIT" not in lemma_ids(load("feeler-merge"))
