"""Ingestion contract: CSV parsing, validation, and log returns."""

import math

import numpy as np
import pytest

from conftest import write_csv
from cyclescan.errors import (EmptySeries, NonPositivePrice, ParseError,
                              SeriesTooShort)
from cyclescan.ingest import PriceSeries, load_prices, log_returns


def test_minimal_two_row_file(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,100.0", "2020-01-03,110.0"])
    series = load_prices(p, "A")
    assert series.n == 2
    assert series.market_id == "A"
    assert series.values.tolist() == [100.0, 110.0]


def test_duplicate_date_raises_naming_the_date(tmp_path):
    p = write_csv(tmp_path / "a.csv",
                  ["2020-01-02,100", "2020-01-03,101", "2020-01-03,102"])
    with pytest.raises(ParseError, match="2020-01-03"):
        load_prices(p, "A")


def test_zero_price_rejected(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,0", "2020-01-03,101"])
    with pytest.raises(NonPositivePrice):
        load_prices(p, "A")


def test_negative_price_rejected(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,-3", "2020-01-03,101"])
    with pytest.raises(NonPositivePrice):
        load_prices(p, "A")


@pytest.mark.parametrize("rows", [
    ["2020-01-02"],                      # missing price column
    ["2020-01-02,"],                     # empty price
    ["not-a-date,100"],
    ["2020-13-45,100"],
    ["2020-01-02,abc"],
    ["2020-01-02,nan"],
])
def test_malformed_rows_raise_parse_error(tmp_path, rows):
    p = write_csv(tmp_path / "a.csv", rows + ["2020-01-03,100"])
    with pytest.raises(ParseError):
        load_prices(p, "A")


def test_wrong_header_rejected(tmp_path):
    p = (tmp_path / "a.csv")
    p.write_text("time,price\n2020-01-02,100\n2020-01-03,101\n")
    with pytest.raises(ParseError, match="header"):
        load_prices(p, "A")


def test_single_valid_row_is_empty_series(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,100"])
    with pytest.raises(EmptySeries):
        load_prices(p, "A")


def test_unsorted_input_is_sorted(tmp_path):
    p = write_csv(tmp_path / "a.csv",
                  ["2020-01-06,103", "2020-01-02,100", "2020-01-03,101"])
    series = load_prices(p, "A")
    assert [d.isoformat() for d in series.dates] == \
        ["2020-01-02", "2020-01-03", "2020-01-06"]
    assert series.values.tolist() == [100.0, 101.0, 103.0]


def test_blank_lines_skipped(tmp_path):
    p = (tmp_path / "a.csv")
    p.write_text("date,close\n2020-01-02,100\n\n2020-01-03,101\n")
    assert load_prices(p, "A").n == 2


def test_log_return_single_step(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,100.0", "2020-01-03,110.0"])
    r = log_returns(load_prices(p, "A"))
    assert r.n == 1
    assert r.values[0] == pytest.approx(0.09531017980432486, abs=1e-15)
    assert r.values[0] == pytest.approx(math.log(1.1), abs=1e-15)


def test_constant_prices_give_zero_returns(tmp_path):
    p = write_csv(tmp_path / "a.csv",
                  ["2020-01-02,50", "2020-01-03,50", "2020-01-06,50"])
    r = log_returns(load_prices(p, "A"))
    assert r.values.tolist() == [0.0, 0.0]


def test_telescoping_sum(rng, tmp_path):
    import datetime as dt
    prices = 100.0 * np.exp(np.cumsum(rng.normal(0, 0.02, size=400)))
    day = dt.date(2015, 1, 1)
    rows = []
    for v in prices:
        while day.weekday() >= 5:
            day += dt.timedelta(days=1)
        rows.append(f"{day.isoformat()},{float(v)!r}")
        day += dt.timedelta(days=1)
    p = write_csv(tmp_path / "a.csv", rows)
    series = load_prices(p, "A")
    r = log_returns(series)
    assert r.values.sum() == pytest.approx(
        math.log(series.values[-1] / series.values[0]), rel=1e-12)


def test_scale_invariance_of_returns():
    values = np.array([100.0, 104.0, 97.0, 101.5, 99.0])
    import datetime as dt
    dates = tuple(dt.date(2020, 1, d) for d in (2, 3, 6, 7, 8))
    a = log_returns(PriceSeries("A", dates, values))
    b = log_returns(PriceSeries("A", dates, values * 7.25))
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)


def test_determinism_same_file_same_returns(tmp_path):
    p = write_csv(tmp_path / "a.csv",
                  ["2020-01-02,100", "2020-01-03,104", "2020-01-06,97"])
    r1 = log_returns(load_prices(p, "A"))
    r2 = log_returns(load_prices(p, "A"))
    assert np.array_equal(r1.values, r2.values)


def test_lag_two(tmp_path):
    p = write_csv(tmp_path / "a.csv",
                  ["2020-01-02,100", "2020-01-03,110", "2020-01-06,121"])
    r = log_returns(load_prices(p, "A"), lag=2)
    assert r.n == 1
    assert r.values[0] == pytest.approx(math.log(1.21), rel=1e-12)
    assert r.lag == 2


def test_series_shorter_than_lag(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,100", "2020-01-03,110"])
    prices = load_prices(p, "A")
    with pytest.raises(SeriesTooShort):
        log_returns(prices, lag=2)


def test_bad_lag_rejected(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["2020-01-02,100", "2020-01-03,110"])
    with pytest.raises(ValueError):
        log_returns(load_prices(p, "A"), lag=0)
