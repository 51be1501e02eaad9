"""
Recurrence Lab Module
Derives recurrences for p(n) by differencing the symbolic expansions of
p(n) and p(n-1), verifies them against the oracle, measures where they
actually hold, compares them with Euler's pentagonal series and mines a
deduplicated catalog over many expansion bounds and tail variants.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

from app import config
from errors import PartitionLabError, ResourceLimitError, TableTooSmallError, UsageError
from oracle import build_table, generalized_pentagonals
from symbolic_engine import (LinearForm, QuasiPoly2, TailVariant, as_variant, evaluate_form,
                             expand_symbolic, form_to_dict, render_form, shift_form)

ALL_VARIANT_PAIRS = tuple(product(TailVariant, TailVariant))


@dataclass(frozen=True, order=True)
class Provenance:
    """Expansion bound and tail variants a recurrence was derived from"""
    cap: int
    v_pn: TailVariant
    v_pn1: TailVariant

    def describe(self):
        return f"cap={self.cap},pn={self.v_pn.value},pn1={self.v_pn1.value}"

    @classmethod
    def parse(cls, text):
        if not text or text == "external":
            return None
        try:
            fields = dict(item.split("=", 1) for item in text.split(","))
            return cls(int(fields["cap"]), as_variant(fields["pn"]), as_variant(fields["pn1"]))
        except (KeyError, ValueError):
            raise UsageError(f"cannot parse provenance {text!r}")


@dataclass(frozen=True)
class Recurrence:
    """p(n) = rhs(n), claimed to hold for claimed[0] <= n <= claimed[1]"""
    rhs: LinearForm
    claimed: tuple
    provenance: Provenance | None = None  # None means external

    def describe_provenance(self):
        return self.provenance.describe() if self.provenance else "external"

    def render(self):
        return render_form(LinearForm(terms=self.rhs.terms, tail=self.rhs.tail,
                                      cap=self.rhs.cap, claimed=self.claimed))


@dataclass(frozen=True)
class FailureDetail:
    n: int
    lhs: int
    rhs: int


@dataclass(frozen=True)
class VerificationReport:
    """Per-n results over a scan window"""
    window: tuple
    results: tuple  # (n, passed) pairs
    pass_range: tuple | None  # maximal passing run containing the claimed range
    first_failure: FailureDetail | None  # first failing n above pass_range

    @property
    def passed(self):
        return all(ok for _, ok in self.results)

    def failures(self):
        return [n for n, ok in self.results if not ok]


class PentagonalClass(str, Enum):
    EXACT = "exact-truncation"
    EXTRAS = "truncation-with-extras"
    UNRELATED = "unrelated"


def derive_recurrence(cap, v_pn, v_pn1):
    """
    Subtract the expansion of p(n-1) from that of p(n)

    p(n-1) is expanded with bound cap-1 and shifted, so both sides reach
    p(n-cap). The result is p(n) = p(n-1) + [E(cap, v_pn) - E(cap-1, v_pn1)
    shifted by one], with the tails subtracted the same way.

    Args:
        cap (int): Expansion bound, at least 3
        v_pn (TailVariant): Tail variant used for p(n)
        v_pn1 (TailVariant): Tail variant used for p(n-1)

    Returns:
        Recurrence: Claimed valid for 2 <= n <= cap
    """
    if cap < 3:
        raise UsageError(f"deriving a recurrence needs cap >= 3, got {cap}")
    v_pn, v_pn1 = as_variant(v_pn), as_variant(v_pn1)
    pn = expand_symbolic(cap, v_pn)
    pn1 = shift_form(expand_symbolic(cap - 1, v_pn1), 1)

    # p(n) - p(n-1) = E_pn - shifted E_pn1, then move p(n-1) to the right
    coefficients = dict(pn.terms)
    for offset, coef in pn1.terms:
        coefficients[offset] = coefficients.get(offset, 0) - coef
    coefficients[1] = coefficients.get(1, 0) + 1
    rhs = LinearForm.build(coefficients, tail=pn.tail - pn1.tail, cap=cap, claimed=(2, cap))
    logging.debug(f"Derived recurrence cap={cap} pn={v_pn.value} pn1={v_pn1.value}: {render_form(rhs)}")
    return Recurrence(rhs=rhs, claimed=(2, cap), provenance=Provenance(cap, v_pn, v_pn1))


def verify(rec, window, table):
    """
    Check p(n) = rhs(n) for every n in the window

    Args:
        rec (Recurrence): The identity to check
        window (tuple): Inclusive (low, high) range of n
        table (PartitionTable): Oracle covering p(high)

    Returns:
        VerificationReport: Per-n results, the passing run around the claimed
        range and the first failure above it
    """
    low, high = window
    if low > high:
        raise UsageError(f"empty verification window [{low}, {high}]")
    if not table.covers(high):
        raise TableTooSmallError(f"table covers p(0..{table.limit}), verification needs p({high})")
    low = max(low, 0)

    # Step 1: per-n comparison of p(n) with the right-hand side
    outcomes = {}
    results = []
    for n in range(low, high + 1):
        lhs = table[n]
        rhs = evaluate_form(rec.rhs, n, table)
        outcomes[n] = (lhs, rhs)
        results.append((n, lhs == rhs))
    passing = {n for n, ok in results if ok}

    # Step 2: grow the passing run outward from the claimed range
    claimed_lo, claimed_hi = rec.claimed
    inside = range(max(claimed_lo, low), min(claimed_hi, high) + 1)
    anchor = inside.start if len(inside) else low
    pass_range = None
    if all(n in passing for n in inside) and anchor in passing:
        lo = hi = anchor
        while lo - 1 in passing:
            lo -= 1
        while hi + 1 in passing:
            hi += 1
        pass_range = (lo, hi)

    # Step 3: first failure above the run, or the earliest failure if the claim breaks
    above = pass_range[1] if pass_range else low - 1
    first_failure = None
    for n, ok in results:
        if n > above and not ok:
            lhs, rhs = outcomes[n]
            first_failure = FailureDetail(n=n, lhs=lhs, rhs=rhs)
            break
    return VerificationReport(window=(low, high), results=tuple(results),
                              pass_range=pass_range, first_failure=first_failure)


def empirical_validity(rec, scan_to, table):
    """
    Maximal contiguous range of n containing the claimed range where the
    recurrence holds, scanning 0..scan_to; None if it fails inside its claim
    """
    if scan_to < rec.claimed[1]:
        raise UsageError(f"scan must reach the claimed upper bound {rec.claimed[1]}, got {scan_to}")
    return verify(rec, (0, scan_to), table).pass_range


def classify_pentagonal(rec):
    """
    Compare a recurrence with Euler's series p(n) = p(n-1) + p(n-2) - p(n-5) - ...

    exact-truncation: the terms are exactly an initial run of generalized
    pentagonal offsets with Euler's unit signs and the tail is zero.
    truncation-with-extras: a nonempty initial run matches, but other terms
    or a tail are present. unrelated: offset 1 already disagrees.
    """
    coefficients = rec.rhs.coefficients
    limit = max(coefficients, default=1)
    # Longest prefix of Euler's series reproduced term for term
    matched = set()
    for offset, sign in generalized_pentagonals(limit + 1):
        if coefficients.get(offset) != sign:
            break
        matched.add(offset)
    if not matched:
        return PentagonalClass.UNRELATED
    if set(coefficients) == matched and rec.rhs.tail.is_zero():
        return PentagonalClass.EXACT
    return PentagonalClass.EXTRAS


def euler_recurrence(limit):
    """Euler's recurrence with every pentagonal offset up to limit (external)"""
    coefficients = dict(generalized_pentagonals(limit))
    rhs = LinearForm.build(coefficients, cap=max(limit, 1), claimed=(1, limit))
    return Recurrence(rhs=rhs, claimed=(1, limit))


def parse_recurrence(text, claimed=None):
    """
    Parse an inline coefficient list such as "1:1,2:1,5:-1,7:-1,12:1"

    Returns:
        Recurrence: External recurrence with zero tail, claimed by default
        for 2 <= n <= largest offset
    """
    coefficients = {}
    try:
        for item in text.replace(" ", "").split(","):
            if not item:
                continue
            offset, coef = item.split(":")
            coefficients[int(offset)] = coefficients.get(int(offset), 0) + int(coef)
    except ValueError:
        raise UsageError(f"cannot parse coefficient list {text!r}, expected offset:coef pairs")
    if not coefficients or min(coefficients) < 1:
        raise UsageError(f"coefficient list needs positive offsets, got {text!r}")
    cap = max(coefficients)
    claimed = (2, cap) if claimed is None else tuple(claimed)
    return Recurrence(rhs=LinearForm.build(coefficients, cap=cap, claimed=claimed), claimed=claimed)


def canonical_key(rec):
    """Sorted offset:coefficient pairs followed by both tail branches"""
    terms = ",".join(f"{offset}:{coef}" for offset, coef in rec.rhs.terms)
    tail = rec.rhs.tail
    even = ",".join(str(c) for c in tail.even)
    odd = ",".join(str(c) for c in tail.odd)
    return f"{terms}|even={even}|odd={odd}"


@dataclass(frozen=True)
class CatalogEntry:
    recurrence: Recurrence
    key: str
    empirical: tuple | None
    classification: PentagonalClass
    anomaly: bool = False
    sources: tuple = ()  # every provenance that produced this key


@dataclass
class Catalog:
    entries: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)
    errors: list = field(default_factory=list)  # (job description, message)

    def keys(self):
        return [entry.key for entry in self.entries]


def _mine_job(cap, v_pn, v_pn1, scan_to, table):
    rec = derive_recurrence(cap, v_pn, v_pn1)
    report = verify(rec, (0, scan_to), table)
    claimed_ok = all(ok for n, ok in report.results if rec.claimed[0] <= n <= rec.claimed[1])
    return CatalogEntry(recurrence=rec, key=canonical_key(rec), empirical=report.pass_range,
                        classification=classify_pentagonal(rec), anomaly=not claimed_ok,
                        sources=(rec.provenance,))


def merge_entries(entries):
    """
    Deduplicate entries by canonical key

    The representative is the entry with the smallest provenance and the
    result is sorted by it, so merging is independent of job order.
    """
    merged = {}
    for entry in entries:
        current = merged.get(entry.key)
        if current is None:
            merged[entry.key] = entry
            continue
        sources = tuple(sorted(set(current.sources) | set(entry.sources)))
        keep = entry if entry.sources[0] < current.sources[0] else current
        merged[entry.key] = CatalogEntry(recurrence=keep.recurrence, key=keep.key, empirical=keep.empirical,
                                         classification=keep.classification,
                                         anomaly=current.anomaly or entry.anomaly, sources=sources)
    return sorted(merged.values(), key=lambda entry: entry.sources[0])


def mine(caps, variant_pairs=ALL_VARIANT_PAIRS, scan_to=None, table=None, workers=None):
    """
    Derive, verify and deduplicate recurrences for every cap and variant pair

    Args:
        caps (list): Expansion bounds, each at least 3
        variant_pairs (list): (v_pn, v_pn1) pairs of TailVariant
        scan_to (int): Largest n checked for the empirical ranges
        table (PartitionTable): Oracle covering scan_to, built if omitted
        workers (int): Thread count for the independent jobs

    Returns:
        Catalog: Unique entries, anomalies (entries failing inside their
        claimed range) and per-job errors
    """
    # Step 1: validate the job grid against the scan limit
    caps = sorted(set(caps))
    if not caps:
        raise UsageError("mining needs at least one cap")
    scan_to = max(caps) + 16 if scan_to is None else scan_to
    if scan_to < max(caps):
        raise UsageError(f"scan limit {scan_to} is below the largest cap {max(caps)}")
    if scan_to > config.mining_scan_limit:
        raise ResourceLimitError(f"scan limit {scan_to} exceeds the configured maximum {config.mining_scan_limit}")
    # One shared read-only oracle for every job
    table = table if table is not None and table.covers(scan_to) else build_table(scan_to)
    workers = config.mining_workers if workers is None else workers
    pairs = [(as_variant(v_pn), as_variant(v_pn1)) for v_pn, v_pn1 in variant_pairs]
    jobs = [(cap, v_pn, v_pn1) for cap in caps for v_pn, v_pn1 in pairs]
    logging.info(f"Mining {len(jobs)} jobs over caps {caps[0]}..{caps[-1]} scanning to {scan_to}")

    # Step 2: run the jobs; a failing job is recorded and the batch continues
    catalog = Catalog()
    entries = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_mine_job, cap, v_pn, v_pn1, scan_to, table): (cap, v_pn, v_pn1)
                   for cap, v_pn, v_pn1 in jobs}
        for future, (cap, v_pn, v_pn1) in futures.items():
            job = Provenance(cap, v_pn, v_pn1).describe()
            try:
                entries.append(future.result())
            except PartitionLabError as e:
                logging.error(f"Mining job {job} failed: {str(e)}")
                catalog.errors.append((job, str(e)))

    # Step 3: deduplicate by canonical key and flag anomalies
    catalog.entries = merge_entries(entries)
    catalog.anomalies = [entry for entry in catalog.entries if entry.anomaly]
    for entry in catalog.anomalies:
        logging.warning(f"Anomaly: {entry.recurrence.render()} fails inside its claimed range "
                        f"({entry.recurrence.describe_provenance()})")
    logging.info(f"Mined {len(catalog.entries)} distinct recurrences, {len(catalog.anomalies)} anomalies")
    return catalog


def entry_to_record(entry):
    """Line-delimited record with a stable field order"""
    rec = entry.recurrence
    form = form_to_dict(rec.rhs)
    return {
        "key": entry.key,
        "coefficients": form["coefficients"],
        "tail": form["tail"],
        "claimed": list(rec.claimed),
        "empirical": list(entry.empirical) if entry.empirical else None,
        "provenance": rec.describe_provenance(),
        "classification": entry.classification.value,
        "anomaly": entry.anomaly,
    }


def recurrence_to_record(rec, empirical=None):
    """Record for a single recurrence, as written by derive and read by verify"""
    entry = CatalogEntry(recurrence=rec, key=canonical_key(rec), empirical=empirical,
                         classification=classify_pentagonal(rec))
    return entry_to_record(entry)


def record_to_recurrence(record):
    """Rebuild a Recurrence from a catalog record"""
    try:
        coefficients = {int(c): int(v) for c, v in record["coefficients"].items()}
        tail = QuasiPoly2.from_dict(record["tail"]) if record.get("tail") else QuasiPoly2()
        claimed = tuple(record.get("claimed") or (2, max(coefficients, default=2)))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"malformed recurrence record: {str(e)}")
    cap = max([claimed[1], *coefficients])
    rhs = LinearForm.build(coefficients, tail=tail, cap=cap, claimed=claimed)
    return Recurrence(rhs=rhs, claimed=claimed, provenance=Provenance.parse(record.get("provenance")))


def record_line(record):
    return json.dumps(record, ensure_ascii=False)
