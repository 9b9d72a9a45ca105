from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stylized_facts.errors import InsufficientDataError, ParseError
from stylized_facts.ingestion import PriceBar, PriceSeries, format_price_csv, parse_price_csv

HEADER = '"Date","Price","Open","High","Low","Vol.","Change %"\n'

INVESTING_ROWS = (
    '"Nov 30, 2017","1,234.50","1,220.00","1,240.10","1,215.00","1.2M","0.85%"\n'
    '"Nov 29, 2017","1,224.10","1,230.00","1,235.00","1,210.00","3.4K","-0.52%"\n'
    '"Nov 28, 2017","1,230.50","1,225.00","1,231.00","1,222.00","980","0.10%"\n'
)


def test_descending_rows_come_back_ascending():
    s = parse_price_csv(HEADER + INVESTING_ROWS, "BOSH")
    assert s.symbol == "BOSH"
    assert [b.date for b in s.bars] == [date(2017, 11, 28), date(2017, 11, 29), date(2017, 11, 30)]
    assert s.bars[-1].close == 1234.50


def test_thousands_separators_and_percent():
    s = parse_price_csv(HEADER + INVESTING_ROWS, "BOSH")
    last = s.bars[-1]
    assert (last.open, last.high, last.low) == (1220.0, 1240.1, 1215.0)
    assert last.change_pct == 0.85
    assert s.bars[1].change_pct == -0.52


@pytest.mark.parametrize("cell, expected", [("1.2M", 1_200_000), ("3.4M", 3_400_000),
                                            ("1.2K", 1200), ("980", 980), ("2,500", 2500)])
def test_volume_suffixes(cell, expected):
    raw = HEADER + f'"2017-01-03","10","10","11","9","{cell}","0%"\n' \
                   '"2017-01-04","10.5","10","11","9","1","5%"\n'
    assert parse_price_csv(raw, "X").bars[0].volume == expected


def test_duplicate_date_names_the_date():
    raw = HEADER + '"2017-01-03","10","10","11","9","1","0%"\n' \
                   '"Jan 03, 2017","10.5","10","11","9","1","5%"\n'
    with pytest.raises(ParseError, match="2017-01-03"):
        parse_price_csv(raw, "X")


def test_unparseable_rows_are_dropped():
    raw = HEADER + ('"2017-01-03","10","10","11","9","1","0%"\n'
                    '"01/04/2017","10.5","10","11","9","1","5%"\n'
                    '"2017-01-05","-","10","11","9","1","5%"\n'
                    '"2017-01-06","10.2","10","11","9","1","5%"\n')
    s = parse_price_csv(raw, "X")
    assert len(s) == 2
    assert s.rejected_rows == (2, 3)


def test_too_few_rows():
    raw = HEADER + '"2017-01-03","10","10","11","9","1","0%"\n'
    with pytest.raises(InsufficientDataError):
        parse_price_csv(raw, "X")


def test_nonpositive_close_is_an_error():
    raw = HEADER + '"2017-01-03","0","1","1","0","1","0%"\n' \
                   '"2017-01-04","10","10","11","9","1","5%"\n'
    with pytest.raises(ParseError, match="close"):
        parse_price_csv(raw, "X")


def test_missing_column():
    with pytest.raises(ParseError, match="volume"):
        parse_price_csv('"Date","Price","Open","High","Low","Change %"\n', "X")


def test_plain_column_names():
    raw = "date,close,open,high,low,volume,change_pct\n2017-01-03,10,10,11,9,5,0\n2017-01-04,11,10,11,9,5,10\n"
    assert parse_price_csv(raw, "X").closes.tolist() == [10.0, 11.0]


price = st.floats(min_value=0.01, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def price_series(draw):
    n = draw(st.integers(min_value=2, max_value=30))
    offsets = sorted(draw(st.sets(st.integers(0, 5000), min_size=n, max_size=n)))
    bars = []
    for off in offsets:
        o, c = draw(price), draw(price)
        hi = max(o, c) * draw(st.floats(1.0, 1.1))
        lo = min(o, c) * draw(st.floats(0.9, 1.0))
        bars.append(PriceBar(date.fromordinal(date(2000, 1, 1).toordinal() + off), c, o,
                             max(hi, o, c), min(lo, o, c), draw(st.integers(0, 10**9)),
                             draw(st.floats(-99, 1000))))
    return PriceSeries("SYM", tuple(bars))


@given(price_series())
@settings(max_examples=60, deadline=None)
def test_round_trip(series):
    back = parse_price_csv(format_price_csv(series), "SYM")
    assert back == series
    assert all(a.date < b.date for a, b in zip(back.bars, back.bars[1:]))
