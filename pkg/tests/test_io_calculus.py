import pytest

from chart_map import TAIL, CapExceeded, EdgeEnd
from config import Settings
from io_calculus import domain_of, enumerate_io_domains, io_balance, io_imbalances, io_lower_bound
from tests.builders import empty, load


def test_lower_bound_from_fixed_germs():
    bound = io_lower_bound(["in", "in", "out"])
    assert (bound.inward, bound.outward) == (2, 1)
    assert not bound.balanced
    assert bound.required_interior_whites == 1
    assert str(bound) == "in=2 out=1: interior white vertices required >= 1"


def test_balanced_germs_need_nothing():
    bound = io_lower_bound(["out", "in"])
    assert bound.balanced
    assert bound.required_interior_whites == 0


def test_lower_bound_rejects_unknown_germs():
    with pytest.raises(ValueError):
        io_lower_bound(["in", "sideways"])


def test_empty_chart_has_no_domains():
    assert enumerate_io_domains(empty(), 1) == []


def test_domains_of_lens_chart():
    c = load("lens-deficit")
    domains = enumerate_io_domains(c, 1)
    assert len(domains) == 3
    assert sum(d.whole for d in domains) == 1
    assert all(d.boundary_labels <= {0, 1, 2} for d in domains)


def test_lens_interior_balances_label_one():
    c = load("lens-deficit")
    topo = c.topology
    inside = topo.faces[topo.face_of[EdgeEnd("e1", TAIL)]].region
    outside = topo.faces[topo.face_of[EdgeEnd("a1", TAIL)]].region
    assert domain_of(c, {inside}, 1).boundary_edges == ("e1", "e2")
    assert io_balance(c, domain_of(c, {inside}, 1)) == (1, 1)
    assert io_balance(c, domain_of(c, {outside}, 1)) == (5, 5)


@pytest.mark.parametrize("name", ["lens-deficit", "lonely-white", "loop", "free-edge"])
@pytest.mark.parametrize("m", [1, 2])
def test_valid_charts_have_no_imbalance(name, m):
    assert io_imbalances(load(name), m) == []


def test_whole_sphere_balance_of_lonely_white():
    c = load("lonely-white")
    (domain,) = enumerate_io_domains(c, 1)
    assert domain.whole
    assert str(domain).endswith("(sphere)")
    assert io_balance(c, domain) == (3, 3)


def test_domain_cap():
    with pytest.raises(CapExceeded):
        enumerate_io_domains(load("lens-deficit"), 1, Settings(domain_cap=1))
