"""
Command handlers for the partition lab CLI

Each handler takes the parsed arguments and the resolved Config, prints its
report in text or machine (JSON) form and returns the process exit code.
"""
import json
import logging
import time
import tracemalloc

from errors import ResourceLimitError, UsageError, VerificationFailure
from exporters import (catalog_records, export_to_html, export_to_jsonl, export_to_markdown,
                       load_records_jsonl, load_recurrences_jsonl)
from numeric_engine import build_trace, child_count, fractal_p, fractal_table, tree_dump
from oracle import build_table, build_table_pentagonal
from recurrence_lab import (ALL_VARIANT_PAIRS, derive_recurrence, mine, parse_recurrence,
                            recurrence_to_record, verify)
from selftest import mutated_child_count, run_selftest
from symbolic_engine import render_form
from trace_render import render_trace


def emit(cfg, text, payload):
    """Print the text report, or the JSON payload in machine mode"""
    if cfg.output_mode == "machine":
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(text)


def parse_caps(text):
    """Caps given as a range '12-24' or a list '12,16,24'"""
    try:
        if "-" in text:
            low, high = (int(part) for part in text.split("-", 1))
            caps = list(range(low, high + 1))
        else:
            caps = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot parse caps {text!r}, expected 12-24 or 12,16,24")
    if not caps:
        raise UsageError(f"no caps in {text!r}")
    return caps


def parse_sizes(text):
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot parse sizes {text!r}, expected a comma-separated list")


def cmd_eval(args, cfg):
    n = args.n
    if n < 0:
        raise UsageError(f"eval needs n >= 0, got {n}")
    # Out-of-range n is a bad argument here, not a resource breach
    if n > cfg.max_fractal_n or n > cfg.max_table_size:
        raise UsageError(f"eval is limited to n <= {min(cfg.max_fractal_n, cfg.max_table_size)}, got {n}")

    # Step 1: fractal evaluation and both independent oracles
    fractal = fractal_p(n, max_n=cfg.max_fractal_n)
    oracle = build_table(n, max_limit=cfg.max_table_size)[n]
    pentagonal = build_table_pentagonal(n, max_limit=cfg.max_table_size)[n]
    agree = fractal == oracle == pentagonal

    # Step 2: report; JSON carries the numbers as strings to keep big values exact
    text = (f"p({n})\n  fractal     {fractal}\n  parts-dp    {oracle}\n  pentagonal  {pentagonal}\n"
            f"  agree       {'yes' if agree else 'NO'}")
    emit(cfg, text, {"n": n, "fractal": str(fractal), "oracle": str(oracle),
                     "pentagonal": str(pentagonal), "agree": agree})
    if not agree:
        raise VerificationFailure(f"fractal, parts-DP and pentagonal values of p({n}) disagree")
    return 0


def cmd_trace(args, cfg):
    doc = build_trace(args.n, args.tail, max_nodes=cfg.max_trace_nodes)
    text = render_trace(doc)
    payload = tree_dump(doc)
    payload["rendered"] = text.splitlines()
    emit(cfg, text, payload)
    return 0


def cmd_derive(args, cfg):
    rec = derive_recurrence(args.cap, args.pn, args.pn1)
    record = recurrence_to_record(rec)
    if args.out:
        export_to_jsonl([record], args.out)
    emit(cfg, rec.render(), record)
    return 0


def _verify_inputs(args):
    if args.file and args.coefficients:
        raise UsageError("give either --file or --coefficients, not both")
    if args.file:
        return load_recurrences_jsonl(args.file)
    if args.coefficients:
        return [parse_recurrence(args.coefficients)]
    raise UsageError("verify needs --file or --coefficients")


def cmd_verify(args, cfg):
    recurrences = _verify_inputs(args)
    lines = []
    reports = []
    failing = []
    for rec in recurrences:
        # Step 1: window defaults to the claimed range
        low = rec.claimed[0] if args.start is None else args.start
        high = rec.claimed[1] if args.to is None else args.to
        if high > cfg.max_table_size:
            raise ResourceLimitError(f"verification window reaches {high}, limit is {cfg.max_table_size}")

        # Step 2: check every n; only failures inside the claim count against the recurrence
        report = verify(rec, (low, high), build_table(max(high, 0), max_limit=cfg.max_table_size))
        inside = [n for n in report.failures() if rec.claimed[0] <= n <= rec.claimed[1]]
        if inside:
            failing.append(rec.render())
        failure = report.first_failure

        # Step 3: collect both report forms
        lines.append(rec.render())
        lines.append(f"  window      [{report.window[0]}, {report.window[1]}]")
        lines.append(f"  holds on    {list(report.pass_range) if report.pass_range else 'none'}")
        lines.append(f"  first fail  {f'n={failure.n} (p={failure.lhs}, rhs={failure.rhs})' if failure else 'none'}")
        lines.append(f"  claimed     {'ok' if not inside else f'FAILS at {inside}'}")
        reports.append({
            "recurrence": recurrence_to_record(rec, empirical=report.pass_range),
            "window": list(report.window),
            "pass_range": list(report.pass_range) if report.pass_range else None,
            "first_failure": ({"n": failure.n, "lhs": str(failure.lhs), "rhs": str(failure.rhs)}
                              if failure else None),
            "claimed_failures": inside,
        })
    emit(cfg, "\n".join(lines), {"reports": reports, "ok": not failing})
    if failing:
        raise VerificationFailure(f"{len(failing)} recurrence(s) fail inside their claimed range")
    return 0


def cmd_mine(args, cfg):
    caps = parse_caps(args.caps)
    catalog = mine(caps, ALL_VARIANT_PAIRS, scan_to=args.to, workers=cfg.mining_workers)

    # Step 1: persist the catalog, the file always and the database on request
    records = catalog_records(catalog)
    export_to_jsonl(records, cfg.catalog_path)
    if args.db:
        from models import save_catalog
        save_catalog(catalog, args.db if args.db != "default" else None)

    # Step 2: summary line, one line per entry, then per-job errors
    lines = [f"{len(catalog.entries)} distinct recurrences, {len(catalog.anomalies)} anomalies, "
             f"{len(catalog.errors)} errors; catalog written to {cfg.catalog_path}"]
    for entry in catalog.entries:
        flag = "  ANOMALY" if entry.anomaly else ""
        lines.append(f"  {render_form(entry.recurrence.rhs, with_range=False)}  "
                     f"[{entry.classification.value}; {entry.recurrence.describe_provenance()}]{flag}")
    for job, message in catalog.errors:
        lines.append(f"  error {job}: {message}")
    emit(cfg, "\n".join(lines), {"entries": records,
                                 "anomalies": [entry.key for entry in catalog.anomalies],
                                 "errors": [list(error) for error in catalog.errors]})
    return 1 if catalog.anomalies or catalog.errors else 0


def _measure(method, n):
    tracemalloc.start()
    started = time.perf_counter()
    try:
        value = method(n)[n]
        elapsed = time.perf_counter() - started
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return value, elapsed, peak


def cmd_bench(args, cfg):
    methods = [("parts-dp", lambda n: build_table(n, max_limit=cfg.max_table_size)),
               ("pentagonal", lambda n: build_table_pentagonal(n, max_limit=cfg.max_table_size))]
    if not args.no_fractal:
        methods.append(("fractal", lambda n: fractal_table(n, max_n=cfg.max_fractal_n)))

    # Step 1: time every method on every size; values must agree per size
    rows = []
    status = 0
    for n in parse_sizes(args.sizes):
        values = set()
        for name, method in methods:
            value, elapsed, peak = _measure(method, n)
            values.add(value)
            rows.append({"method": name, "n": n, "seconds": round(elapsed, 6),
                         "peak_kib": round(peak / 1024, 1), "digits": len(str(value))})
        if len(values) != 1:
            logging.error(f"Methods disagree on p({n})")
            status = 1

    # Step 2: fixed-width table (header only for an empty size list)
    lines = [f"{'method':<12}{'n':>8}{'seconds':>12}{'peak KiB':>12}{'digits':>8}"]
    for row in rows:
        lines.append(f"{row['method']:<12}{row['n']:>8}{row['seconds']:>12.6f}"
                     f"{row['peak_kib']:>12.1f}{row['digits']:>8}")
    emit(cfg, "\n".join(lines), {"rows": rows, "agree": status == 0})
    return status


def cmd_selftest(args, cfg):
    results = run_selftest(mutated_child_count if args.mutant else child_count)
    passed = all(result.passed for result in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    emit(cfg, "\n".join(lines), {"checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                                            for r in results],
                                 "passed": passed})
    return 0 if passed else 1


def cmd_export(args, cfg):
    # Step 1: read records from the database or the catalog file
    if args.db:
        from models import load_catalog_records
        records = load_catalog_records(args.db if args.db != "default" else None)
    else:
        records = load_records_jsonl(cfg.catalog_path)

    # Step 2: render in the requested format
    if args.to_format == "markdown":
        content = export_to_markdown(records)
    elif args.to_format == "html":
        content = export_to_html(records)
    else:
        content = "".join(json.dumps(record, ensure_ascii=False) + "\n" for record in records)

    # Step 3: write to a file or stdout
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(content)
        logging.info(f"Exported {len(records)} records to {args.out}")
    else:
        print(content, end="" if content.endswith("\n") else "\n")
    return 0
