"""
Acceptance suite run by the selftest command.

Every check is deterministic and returns (passed, detail). The generator rule
under test is injectable, so a corrupted rule can be run through the same
suite to show that the value checks catch it.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from numeric_engine import FractalEvaluator, build_trace, child_count, fractal_table
from oracle import RestrictedQuery, build_table, build_table_pentagonal, restricted_count
from recurrence_lab import (PentagonalClass, classify_pentagonal, derive_recurrence, mine, verify)
from symbolic_engine import QuasiPoly2, TailVariant, evaluate_form, expand_symbolic

KNOWN_VALUES = (1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77)

# Coefficients every exact derivation must reproduce
EXPECTED_DERIVATIONS = {
    (12, TailVariant.ONE_SUB, TailVariant.ONE_SUB): (
        {1: 1, 2: 1, 5: -1, 7: -1, 12: 1}, QuasiPoly2()),
    (24, TailVariant.ONE_SUB, TailVariant.ONE_SUB): (
        {1: 1, 2: 1, 5: -1, 7: -1, 12: 1, 15: 1, 22: -1}, QuasiPoly2()),
    (24, TailVariant.FULL, TailVariant.FULL): (
        {1: 2, 3: -1, 5: -1, 6: 1, 7: -1, 8: 1, 12: 1, 13: -1, 15: 1, 16: -1, 22: -1, 23: 1}, QuasiPoly2()),
    (24, TailVariant.TWO_SUB, TailVariant.ONE_SUB): (
        {1: 1, 6: 1, 8: 1, 11: -1, 13: -2, 14: -1, 15: -1, 16: -1, 17: -1,
         20: 1, 21: 1, 22: 1, 23: 2, 24: 2},
        QuasiPoly2(even=(Fraction(0), Fraction(1, 2)), odd=(Fraction(-1, 2), Fraction(1, 2)))),
    (24, TailVariant.TWO_SUB, TailVariant.TWO_SUB): (
        {1: 1, 3: 1, 7: -1, 9: -1, 11: -1, 12: 1, 13: -1, 14: 1, 16: 1, 18: 1, 20: 1},
        QuasiPoly2(even=(Fraction(1), Fraction(0)))),
}


def mutated_child_count(tab, head):
    """Off-by-one generator rule; the suite must reject it"""
    return max(0, 2 * tab - head + 1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def check_oracle_values(rule):
    table = build_table(1000)
    pentagonal = build_table_pentagonal(1000)
    if table.values[:len(KNOWN_VALUES)] != KNOWN_VALUES:
        return False, "parts-DP table disagrees with p(0..12)"
    mismatch = next((n for n in range(1001) if table[n] != pentagonal[n]), None)
    if mismatch is not None:
        return False, f"parts-DP and pentagonal tables differ at n={mismatch}"
    return True, "p(0..1000) agree"


def check_fractal_values(rule):
    table = build_table(300)
    fractal = fractal_table(300, rule=rule)
    mismatch = next((n for n in range(301) if fractal[n] != table[n]), None)
    if mismatch is not None:
        return False, f"fractal p({mismatch}) = {fractal[mismatch]}, oracle {table[mismatch]}"
    return True, "fractal p(0..300) matches; p(10), p(11), p(12) = 42, 56, 77"


def check_parcel_semantics(rule):
    table = build_table(60)
    evaluator = FractalEvaluator(table, rule=rule)
    for head in range(1, 61):
        for tab in range(head):
            value = evaluator.parcel_value(tab, head)
            expected = restricted_count(RestrictedQuery(tab, head - tab))
            if value != expected:
                return False, f"parcel ({tab}, {head}) = {value}, restricted count {expected}"
    return True, "parcel values equal restricted counts for head <= 60"


def check_trace(rule):
    table = build_table(10)
    doc = build_trace(10, table=table)
    cells = [(child.tab, len(child.children)) for child in doc.children if child.children]
    if cells != [(6, 2), (7, 4), (8, 6), (9, 8)] or doc.total != 42:
        return False, f"first-level cells {cells}, total {doc.total}"
    steps = [build_trace(10, variant, table=table).steps for variant in TailVariant]
    if steps != [5, 4, 3]:
        return False, f"step counts {steps}"
    return True, "p(10) trace: cells 6..9 with 2, 4, 6, 8 children, steps 5/4/3"


def check_symbolic(rule):
    table = build_table(12)
    form = expand_symbolic(12, TailVariant.ONE_SUB)
    bad = [n for n in range(2, 13) if evaluate_form(form, n, table) != table[n]]
    if bad:
        return False, f"cap-12 expansion fails at n={bad}"
    return True, "cap-12 expansion reproduces p(2..12)"


def check_derivations(rule):
    for (cap, v_pn, v_pn1), (coefficients, tail) in EXPECTED_DERIVATIONS.items():
        rec = derive_recurrence(cap, v_pn, v_pn1)
        if rec.rhs.coefficients != coefficients or rec.rhs.tail != tail:
            return False, f"derive({cap}, {v_pn.value}, {v_pn1.value}) differs"
    return True, f"{len(EXPECTED_DERIVATIONS)} derivations exact"


def check_verification(rule):
    table = build_table(40)
    for (cap, v_pn, v_pn1) in EXPECTED_DERIVATIONS:
        rec = derive_recurrence(cap, v_pn, v_pn1)
        report = verify(rec, (2, cap), table)
        if not report.passed:
            return False, f"derive({cap}, {v_pn.value}, {v_pn1.value}) fails at {report.failures()}"
    first = []
    for cap in (12, 24):
        report = verify(derive_recurrence(cap, TailVariant.ONE_SUB, TailVariant.ONE_SUB), (2, 40), table)
        first.append(report.first_failure.n if report.first_failure else None)
    if first != [15, 26]:
        return False, f"first failures {first}, expected [15, 26]"
    return True, "claimed ranges hold; pentagonal truncations first fail at 15 and 26"


def check_classification(rule):
    found = [classify_pentagonal(derive_recurrence(cap, v_pn, v_pn1))
             for cap, v_pn, v_pn1 in ((12, "one", "one"), (24, "one", "one"), (24, "none", "none"))]
    expected = [PentagonalClass.EXACT, PentagonalClass.EXACT, PentagonalClass.UNRELATED]
    if found != expected:
        return False, f"classes {[c.value for c in found]}"
    return True, "exact, exact, unrelated"


def check_mining(rule):
    catalog = mine(range(12, 25), scan_to=40, workers=1)
    if len(catalog.entries) < 20 or catalog.anomalies or catalog.errors:
        return False, (f"{len(catalog.entries)} entries, {len(catalog.anomalies)} anomalies, "
                       f"{len(catalog.errors)} errors")
    return True, f"{len(catalog.entries)} distinct recurrences, no anomalies"


def check_mutation_detected(rule):
    table = build_table(30)
    mutated = fractal_table(30, rule=mutated_child_count)
    if all(mutated[n] == table[n] for n in range(31)):
        return False, "corrupted generator rule went unnoticed"
    return True, "corrupted generator rule is rejected"


CHECKS = (
    ("oracle-agreement", check_oracle_values),
    ("fractal-values", check_fractal_values),
    ("parcel-semantics", check_parcel_semantics),
    ("trace-fidelity", check_trace),
    ("symbolic-expansion", check_symbolic),
    ("derivations", check_derivations),
    ("verification", check_verification),
    ("classification", check_classification),
    ("mining", check_mining),
    ("mutation-check", check_mutation_detected),
)


def run_selftest(rule=child_count):
    """
    Run every acceptance check against the given generator rule

    Returns:
        list: CheckResult per check, in a fixed order
    """
    results = []
    for name, check in CHECKS:
        passed, detail = check(rule)
        if not passed:
            logging.warning(f"Self-test check {name} failed: {detail}")
        results.append(CheckResult(name=name, passed=passed, detail=detail))
    return results
