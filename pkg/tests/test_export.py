import csv
import io
import json
from fractions import Fraction

import pytest

from src.closedforms import gf_marked, gf_sm
from src.dpcount import build_table, height_distribution, marked_distribution
from src.export import (
    Document,
    count_table_document,
    format_value,
    height_profile_document,
    marked_distribution_document,
    render,
    series_document,
    value_document,
)

def test_series_text_is_comma_list():
    doc = series_document("sm", gf_sm(11))
    assert render(doc, "text") == "1,1,2,5,13,35,97,275,794,2327,6905,20705"


def test_series_bfile():
    lines = render(series_document("sm", gf_sm(4)), "bfile").splitlines()
    assert lines == ["0 1", "1 1", "2 2", "3 5", "4 13"]


def test_bfile_rejects_marked_series_and_tables():
    with pytest.raises(ValueError):
        render(series_document("marked", gf_marked(3)), "bfile")
    with pytest.raises(ValueError):
        render(count_table_document(build_table(2)), "bfile")


def test_json_schema():
    payload = json.loads(render(series_document("sm", gf_sm(3)), "json"))
    assert payload["schema"] == "1"
    assert payload["kind"] == "series"
    assert payload["generator"] == "sm"
    assert payload["order"] == 3
    assert payload["rows"] == [[0, 1], [1, 1], [2, 2], [3, 5]]


def test_series_json_carries_exact_coefficients():
    payload = json.loads(render(series_document("sm", gf_sm(3)), "json"))
    assert payload["valuation"] == 0
    assert payload["precision"] == 4
    assert payload["coeffs"][0] == ["1", "1"]
    assert payload["coeffs"][3] == ["5", "1"]


def test_marked_series_json_keeps_marks():
    payload = json.loads(render(series_document("marked", gf_marked(2)), "json"))
    assert payload["valuation"] == 0
    assert payload["coeffs"][1] == [[1, 0, "1", "1"]]


def test_csv_header_and_rows():
    text = render(count_table_document(build_table(1)), "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "j", "F", "G", "H", "K", "total"]
    assert ["1", "1", "1", "0", "0", "0", "1"] in rows


def test_exact_values_stay_exact():
    assert format_value(Fraction(4, 5)) == "4/5"
    assert format_value(Fraction(6, 3)) == 2
    assert format_value(7) == 7
    assert format_value(None) is None


def test_height_profile_summary_row():
    text = render(height_profile_document(height_distribution(3)), "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "H", "at_most"]
    assert rows[1] == ["3", "0", "1"]
    assert rows[-1] == ["3", "expected_height", "4/5"]


def test_marked_distribution_document():
    doc = marked_distribution_document(3, 0, marked_distribution(3))
    payload = json.loads(render(doc, "json"))
    assert payload["total"] == 5
    assert [1, 1, 1] in payload["rows"]


def test_value_document_text_is_bare():
    assert render(value_document("count", "count", 36, {"n": 5}), "text") == "36"


def test_generic_text_rendering():
    doc = Document(kind="demo", columns=("a", "b"), rows=[(1, Fraction(1, 2))], meta={"n": 2})
    assert render(doc, "text") == "n: 2\n\na\tb\n1\t1/2"


def test_unknown_format():
    with pytest.raises(ValueError):
        render(value_document("count", "count", 1), "xml")
