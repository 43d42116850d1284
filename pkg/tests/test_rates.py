from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from codedpir.rates import (
    INF,
    RateError,
    RateReport,
    TABLE_COLUMNS,
    mds_pir_capacity,
    proposition1_check,
    rate_asymmetric,
    rate_asymmetric_series,
    rate_direct_sum,
    rate_symmetric,
    render,
    reports_to_csv,
    reports_to_json,
    stripe_and_download,
)

SHAPES = {"C1": (5, 3, 2, 3), "C2": (9, 5, 2, 3), "C3": (7, 4, 3, 5), "C4": (11, 6, 3, 4)}


def capacity_series(n, k, f):
    """Independent oracle: C_f = [1 + k/n + ... + (k/n)^(f-1)]^-1."""
    r = Fraction(k, n)
    return 1 / sum(r**i for i in range(f))


def test_capacity_examples():
    assert mds_pir_capacity(5, 3, 2) == Fraction(5, 8)
    got = [render(mds_pir_capacity(n, k, INF)) for n, k, _, _ in SHAPES.values()]
    assert got == ["0.4", "0.4444", "0.4286", "0.4545"]
    assert mds_pir_capacity(3, 2, INF) == Fraction(1, 3)
    assert mds_pir_capacity(2, 1, 1) == 1


@given(st.integers(2, 12), st.data(), st.integers(1, 12))
def test_capacity_matches_series(n, data, f):
    k = data.draw(st.integers(1, n - 1))
    assert mds_pir_capacity(n, k, f) == capacity_series(n, k, f)


def test_capacity_errors():
    with pytest.raises(RateError):
        mds_pir_capacity(3, 3, 2)
    with pytest.raises(RateError):
        mds_pir_capacity(3, 4, 2)
    with pytest.raises(RateError):
        mds_pir_capacity(5, 3, 0)
    with pytest.raises(RateError):
        mds_pir_capacity(5, 3, 1.5)
    with pytest.raises(RateError):
        rate_symmetric(3, 3, 2, 3, 2)


def test_capacity_monotone_in_files():
    for n, k, _, _ in SHAPES.values():
        caps = [mds_pir_capacity(n, k, f) for f in range(1, 51)]
        assert all(a > b for a, b in zip(caps, caps[1:]))
        assert all(c > mds_pir_capacity(n, k, INF) for c in caps)


def test_table_one_rates():
    rs = {name: render(rate_symmetric(kap, nu, k, n, INF)) for name, (n, k, kap, nu) in SHAPES.items()}
    ra = {name: render(rate_asymmetric(kap, nu, INF)) for name, (n, k, kap, nu) in SHAPES.items()}
    assert rs == {"C1": "0.3", "C2": "0.2778", "C3": "0.381", "C4": "0.1818"}
    assert ra == {"C1": "0.3333", "C2": "0.3333", "C3": "0.4", "C4": "0.25"}
    assert rate_symmetric(2, 3, 3, 5, INF) == Fraction(3, 10)
    assert rate_symmetric(3, 5, 4, 7, INF) == Fraction(8, 21)
    assert rate_direct_sum([(3, 2), (2, 1)], 3, INF) == Fraction(3, 8)


def test_example_rates():
    assert rate_symmetric(2, 3, 3, 5, 2) == Fraction(27, 50)
    assert rate_asymmetric(2, 3, 2) == Fraction(3, 5)
    assert rate_direct_sum([(3, 2), (2, 1)], 3, 2) == Fraction(18, 29)
    with pytest.raises(RateError):
        rate_direct_sum([(3, 2)], 3, 2)


@pytest.mark.parametrize("name", list(SHAPES))
@pytest.mark.parametrize("f", [1, 2, 3, 4, 5, 6])
def test_symmetric_matches_download_count(name, f):
    n, k, kap, nu = SHAPES[name]
    beta = nu**f
    download = Fraction(kap * n, nu - kap) * (nu**f - kap**f)
    assert rate_symmetric(kap, nu, k, n, f) == Fraction(beta * k) / download


@given(st.integers(2, 9), st.data(), st.integers(1, 15))
def test_asymmetric_series_identity(nu, data, f):
    kappa = data.draw(st.integers(1, nu - 1))
    assert rate_asymmetric(kappa, nu, f) == rate_asymmetric_series(kappa, nu, f)


def test_stripe_and_download():
    assert stripe_and_download(3, 2, 2, "P1") == stripe_and_download(3, 2, 2, "P1")
    p1 = stripe_and_download(3, 2, 2, "P1")
    assert (p1.beta, p1.per_node, p1.total) == (9, 10, 30)
    p2 = stripe_and_download(3, 2, 2, "P2")
    assert (p2.beta, p2.per_node, p2.total) == (1, 2, 6)
    p2 = stripe_and_download(2, 1, 2, "P2")
    assert (p2.beta, p2.per_node, p2.total) == (1, 1, 2)
    for n, k in [(3, 2), (2, 1), (5, 2), (4, 3)]:
        for f in (1, 2, 3):
            c = stripe_and_download(n, k, f, "P1")
            assert Fraction(c.beta * k, c.total) == mds_pir_capacity(n, k, f)
    with pytest.raises(RateError):
        stripe_and_download(3, 2, INF, "P1")
    with pytest.raises(RateError):
        stripe_and_download(3, 2, 2, "P3")


@pytest.mark.parametrize("name", list(SHAPES))
def test_rate_chain(name):
    n, k, kap, nu = SHAPES[name]
    for f in range(1, 11):
        p = proposition1_check(k, n, kap, nu, f)
        assert p.chain_holds and not p.equality
        assert p.symmetric < p.capacity
    p = proposition1_check(2, 3, 2, 3, 4)
    assert p.equality and p.symmetric == p.asymmetric == p.capacity


def test_render():
    assert render(Fraction(3, 10)) == "0.3"
    assert render(Fraction(8, 21)) == "0.381"
    assert render(Fraction(5, 18)) == "0.2778"
    assert render(None) == "-"
    assert render(Fraction(0)) == "0"


def test_report_outputs():
    rep = RateReport.build("C1", 5, 3, 2, 3, 2, parts=[(3, 2), (2, 1)])
    assert rep.rate_b == Fraction(18, 29) and rep.beta_p1 is None
    ca = RateReport.build("G1", 3, 2, 2, 3, 2)
    assert (ca.beta_p1, ca.download_p1, ca.beta_p2, ca.download_p2) == (9, 30, 1, 6)
    rows = list(csv.DictReader(io.StringIO(reports_to_csv([rep, ca]))))
    assert list(rows[0]) == TABLE_COLUMNS
    assert rows[0]["R_S"] == "0.54" and rows[0]["R_B"] == "0.6207" and rows[1]["R_B"] == "-"
    data = json.loads(reports_to_json([RateReport.build("C1", 5, 3, 2, 3, INF)]))
    assert data[0]["f"] == "inf" and data[0]["rate_s"] == "3/10"
