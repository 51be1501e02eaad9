import pytest

from errors import ResourceLimitError, UsageError
from numeric_engine import (FractalEvaluator, NodeKind, build_trace, child_count, fractal_p,
                            fractal_table, parcel_value, tree_dump)
from oracle import RestrictedQuery, build_table, restricted_count
from symbolic_engine import TailVariant


@pytest.mark.parametrize("tab,head,expected", [(6, 10, 2), (9, 10, 8), (4, 10, 0), (0, 1, 0)])
def test_child_count(tab, head, expected):
    assert child_count(tab, head) == expected


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 1), (10, 42), (11, 56), (12, 77)])
def test_fractal_p(n, expected):
    assert fractal_p(n) == expected


def test_fractal_table_matches_oracle(table300):
    assert fractal_table(300).values == table300.values


def test_parcel_value_is_restricted_count():
    table = build_table(60)
    evaluator = FractalEvaluator(table)
    for head in range(1, 61):
        for tab in range(head):
            assert evaluator.parcel_value(tab, head) == restricted_count(RestrictedQuery(tab, head - tab))


def test_parcel_value_examples(table40):
    assert parcel_value(6, 10, table40) == 9
    assert parcel_value(3, 10, table40) == 3
    with pytest.raises(UsageError):
        parcel_value(10, 10, table40)


def test_fractal_limit():
    with pytest.raises(ResourceLimitError):
        fractal_table(10, max_n=5)
    with pytest.raises(UsageError):
        fractal_table(-1)


def test_trace_of_ten_structure():
    doc = build_trace(10)
    assert doc.total == 42
    assert [child.tab for child in doc.children] == list(range(10))
    cells = [(child.tab, len(child.children)) for child in doc.children if child.kind is NodeKind.CELL]
    assert cells == [(6, 2), (7, 4), (8, 6), (9, 8)]
    nested = doc.children[9].children[7]
    assert [child.tab for child in nested.children] == [0, 1, 2, 3, 4]
    assert [child.tab for child in nested.children[4].children] == [0]


@pytest.mark.parametrize("variant,steps,top", [
    (TailVariant.FULL, 5, 10),
    (TailVariant.ONE_SUB, 4, 9),
    (TailVariant.TWO_SUB, 3, 8),
])
def test_trace_variants(variant, steps, top):
    doc = build_trace(10, variant)
    assert doc.total == 42
    assert doc.steps == steps
    assert len(doc.children) == top


def test_trace_tail_terms():
    assert build_trace(10, "two").tail_terms == (("⌊n/2⌋", 5), ("1", 1))
    assert build_trace(10, "one").tail_terms == (("1", 1),)


def test_trace_edge_cases():
    assert build_trace(0).total == 1
    doc = build_trace(1)
    assert doc.total == 1
    assert doc.children[0].kind is NodeKind.PARCEL
    with pytest.raises(UsageError):
        build_trace(1, "one")
    with pytest.raises(UsageError):
        build_trace(-1)
    with pytest.raises(ResourceLimitError):
        build_trace(30, max_nodes=10)


def test_tree_dump_shape():
    dump = tree_dump(build_trace(3))
    assert dump["total"] == 3
    assert dump["variant"] == "none"
    assert dump["children"][2] == {"kind": "cell", "tab": 2,
                                   "children": [{"kind": "parcel", "tab": 0, "children": []}]}


def _walk_cells(node, head, table):
    assert len(node.children) == child_count(node.tab, head)
    assert [child.tab for child in node.children] == list(range(len(node.children)))
    assert node.value(table) >= 0
    for child in node.children:
        _walk_cells(child, node.tab, table)


@pytest.mark.parametrize("variant", list(TailVariant))
def test_every_node_follows_the_generator_rule(variant):
    table = build_table(18)
    for n in range(2, 19):
        doc = build_trace(n, variant, table=table)
        for child in doc.children:
            _walk_cells(child, n, table)


def test_tail_variants_agree_on_totals():
    table = build_table(25)
    for n in range(2, 26):
        totals = {build_trace(n, variant, table=table).total for variant in TailVariant}
        assert totals == {table[n]}


def test_parcel_inside_a_cell(table40):
    # [p(5) - p(0)] appears in the p(11) expansion inside the cell of p(9)
    assert parcel_value(5, 9, table40) == 6
    assert parcel_value(5, 11, table40) == 7
