"""
Export Module for the recurrence catalog
Provides functionality to export catalog records in various formats:
- Markdown
- HTML (Markdown rendered through the markdown package)
- JSON lines (also the input format of verify --file)
Records are the dictionaries produced by recurrence_lab.entry_to_record.
"""
import json
import logging

import markdown

from errors import UsageError
from recurrence_lab import entry_to_record, record_line, record_to_recurrence

HTML_STYLE = """
    body { font-family: Arial, sans-serif; line-height: 1.6; max-width: 1000px; margin: 0 auto; padding: 20px; }
    h1 { color: #2c3e50; border-bottom: 1px solid #eee; padding-bottom: 10px; }
    table { border-collapse: collapse; width: 100%; }
    th, td { border: 1px solid #ddd; padding: 6px; text-align: left; font-family: monospace; }
    th { background-color: #f9f9f9; }
"""


def catalog_records(catalog):
    """Records for every entry of a mined catalog, in catalog order"""
    return [entry_to_record(entry) for entry in catalog.entries]


def _range_text(bounds):
    return f"[{bounds[0]}, {bounds[1]}]" if bounds else "none"


def export_to_markdown(records, title="Recurrence catalog", generated_on=None):
    """
    Export catalog records to Markdown

    Args:
        records (list): Catalog record dictionaries
        title (str): Document heading
        generated_on (str): Optional footer stamp; omitted by default so
            repeated exports are byte-identical

    Returns:
        str: The markdown content
    """
    md_content = f"# {title}\n\n"
    md_content += f"{len(records)} recurrences, {sum(1 for r in records if r.get('anomaly'))} anomalies.\n\n"
    md_content += "| # | recurrence | claimed | empirical | class | provenance |\n"
    md_content += "|---|---|---|---|---|---|\n"
    for i, record in enumerate(records, start=1):
        text = record_to_recurrence(record).render().split("  [")[0]
        flag = " (anomaly)" if record.get("anomaly") else ""
        md_content += (f"| {i} | `{text}`{flag} | {_range_text(record.get('claimed'))} | "
                       f"{_range_text(record.get('empirical'))} | {record['classification']} | "
                       f"{record['provenance']} |\n")
    if generated_on:
        md_content += f"\n*Generated on: {generated_on}*\n"
    return md_content


def export_to_html(records, title="Recurrence catalog", generated_on=None):
    """Export catalog records to a standalone HTML page"""
    try:
        body = markdown.markdown(export_to_markdown(records, title, generated_on), extensions=["tables"])
    except Exception as e:
        logging.error(f"Error exporting to HTML: {str(e)}")
        raise
    return (f"<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"UTF-8\">\n<title>{title}</title>\n"
            f"<style>{HTML_STYLE}</style>\n</head>\n<body>\n{body}\n</body>\n</html>\n")


def export_to_jsonl(records, path):
    """Write one record per line; returns the number of records written"""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record_line(record) + "\n")
    logging.info(f"Wrote {len(records)} records to {path}")
    return len(records)


def load_records_jsonl(path):
    """
    Read records written by export_to_jsonl

    Blank lines are skipped; a malformed line raises UsageError naming it.
    """
    records = []
    try:
        with open(path, encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as e:
                    raise UsageError(f"{path}:{number}: invalid record: {str(e)}")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {str(e)}")
    return records


def load_recurrences_jsonl(path):
    """Recurrences for every record in a JSON lines file"""
    return [record_to_recurrence(record) for record in load_records_jsonl(path)]
