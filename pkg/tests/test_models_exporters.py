import pytest

from errors import UsageError
from exporters import (catalog_records, export_to_html, export_to_jsonl, export_to_markdown,
                       load_records_jsonl, load_recurrences_jsonl)
from models import load_catalog_records, save_catalog
from recurrence_lab import mine


@pytest.fixture(scope="module")
def small_catalog():
    return mine([12, 13, 14], scan_to=30, workers=2)


def test_jsonl_round_trip(tmp_path, small_catalog):
    path = tmp_path / "catalog.jsonl"
    records = catalog_records(small_catalog)
    assert export_to_jsonl(records, path) == len(records)
    assert load_records_jsonl(path) == records
    recurrences = load_recurrences_jsonl(path)
    assert [r.rhs.coefficients for r in recurrences] == [e.recurrence.rhs.coefficients
                                                         for e in small_catalog.entries]


def test_jsonl_errors(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text('{"key": 1}\n\nnot json\n', encoding="utf-8")
    with pytest.raises(UsageError, match=":3:"):
        load_records_jsonl(path)
    with pytest.raises(UsageError):
        load_records_jsonl(tmp_path / "missing.jsonl")


def test_markdown_export(small_catalog):
    records = catalog_records(small_catalog)
    text = export_to_markdown(records)
    assert text.startswith("# Recurrence catalog\n")
    assert "`p(n) = p(n-1) + p(n-2) - p(n-5) - p(n-7) + p(n-12)`" in text
    assert text.count("\n| ") == len(records) + 1
    assert text == export_to_markdown(records)
    assert "Generated on" not in text
    assert "*Generated on: today*" in export_to_markdown(records, generated_on="today")


def test_html_export(small_catalog):
    html = export_to_html(catalog_records(small_catalog), title="Caps 12-14")
    assert html.startswith("<!DOCTYPE html>")
    assert "<title>Caps 12-14</title>" in html
    assert "<table>" in html


def test_database_upsert(tmp_path, small_catalog):
    url = f"sqlite:///{tmp_path / 'catalog.db'}"
    assert save_catalog(small_catalog, url) == len(small_catalog.entries)
    assert save_catalog(small_catalog, url) == 0
    assert load_catalog_records(url) == catalog_records(small_catalog)
