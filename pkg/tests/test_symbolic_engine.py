from fractions import Fraction

import pytest

from errors import ResourceLimitError, UsageError
from numeric_engine import fractal_p
from oracle import build_table
from symbolic_engine import (QuasiPoly2, TailVariant, empirical_range, evaluate_form,
                             expand_parcel_symbolic, expand_symbolic, first_generating_offset,
                             form_from_dict, form_to_dict, render_form, shift_form, uncollected_tree)


def test_variant_parsing():
    assert TailVariant.parse("two") is TailVariant.TWO_SUB
    assert TailVariant.ONE_SUB.substituted == 1
    with pytest.raises(UsageError):
        TailVariant.parse("three")


def test_quasi_polynomial_floor_half():
    half = QuasiPoly2.floor_half()
    assert [half(n) for n in range(6)] == [0, 0, 1, 1, 2, 2]
    shifted = half.shift(1)
    assert [shifted(n) for n in range(1, 8)] == [(n - 1) // 2 for n in range(1, 8)]
    assert half.is_integer_valued()
    assert (half - half).is_zero()
    assert QuasiPoly2.constant(1).describe() == "1"


def test_quasi_polynomial_rejects_thirds():
    with pytest.raises(UsageError):
        QuasiPoly2(even=(Fraction(1, 3), 0))


@pytest.mark.parametrize("a,expected", [
    (5, {5: 1, 11: -1, 12: -1}),
    (3, {3: 1, 7: -1, 8: -1, 9: -1, 10: -1, 11: -1}),
    (7, {7: 1}),
])
def test_expand_parcel(a, expected):
    assert expand_parcel_symbolic(a, 0, 12).coefficients == expected


def test_expand_parcel_preconditions():
    with pytest.raises(UsageError):
        expand_parcel_symbolic(3, 3, 12)
    with pytest.raises(UsageError):
        expand_parcel_symbolic(13, 0, 12)


def test_cap_twelve_expansion(table40):
    form = expand_symbolic(12, TailVariant.ONE_SUB)
    assert form.coefficients == {2: 1, 3: 1, 4: 1, 7: -1, 8: -1, 9: -1, 10: -1, 11: -1}
    assert form.tail == QuasiPoly2.constant(1)
    assert form.claimed == (2, 12)
    assert evaluate_form(form, 12, table40) == 77
    assert all(evaluate_form(form, n, table40) == table40[n] for n in range(2, 13))


def test_shifted_cap_eleven_expansion(table40):
    form = shift_form(expand_symbolic(11, TailVariant.ONE_SUB), 1)
    assert form.coefficients == {3: 1, 4: 1, 5: 1, 8: -1, 9: -1, 10: -1, 11: -1, 12: -1}
    assert form.tail == QuasiPoly2.constant(1)
    assert form.claimed == (3, 12)
    assert all(evaluate_form(form, n, table40) == table40[n - 1] for n in range(2, 13))


@pytest.mark.parametrize("variant", list(TailVariant))
def test_every_variant_is_exact_on_its_range(variant, table40):
    for cap in (5, 12, 20):
        form = expand_symbolic(cap, variant)
        lo, hi = form.claimed
        assert all(evaluate_form(form, n, table40) == table40[n] for n in range(lo, hi + 1))


def test_full_form_misses_zero(table40):
    form = expand_symbolic(12, TailVariant.FULL)
    assert form.claimed == (1, 12)
    assert evaluate_form(form, 0, table40) == 0
    assert empirical_range(form, table40, scan_to=40)[0] == 1


def test_uncollected_tree_matches_collection(table40):
    form = expand_symbolic(12, TailVariant.ONE_SUB)
    trees = uncollected_tree(12, TailVariant.ONE_SUB)
    for n in range(2, 13):
        assert sum(tree.evaluate(n, table40) for tree in trees) + 1 == evaluate_form(form, n, table40)


def test_first_generating_offset():
    assert first_generating_offset(12) == 5
    assert first_generating_offset(2) is None


def test_render_and_dump():
    form = expand_symbolic(12, "one")
    text = render_form(form)
    assert text == ("p(n) = p(n-2) + p(n-3) + p(n-4) - p(n-7) - p(n-8) - p(n-9) - p(n-10) "
                    "- p(n-11) + 1  [2 <= n <= 12]")
    assert form_from_dict(form_to_dict(form)) == form


def test_cap_limits():
    with pytest.raises(UsageError):
        expand_symbolic(1, "one")
    with pytest.raises(ResourceLimitError):
        expand_symbolic(50, "one", max_cap=40)
    with pytest.raises(UsageError):
        shift_form(expand_symbolic(5, "one"), 0)


def _check_uniform_children(node, head_offset, n, table):
    # Children past n vanish; the rest are exactly the generator count
    live = [child for child in node.children if child.offset <= n]
    assert len(live) == max(0, 2 * (n - node.offset) - (n - head_offset))
    for child in node.children:
        if child.offset > n:
            assert child.evaluate(n, table) == 0
        else:
            _check_uniform_children(child, node.offset, n, table)


def test_uniform_expansion_matches_generator_counts(table40):
    for n in range(2, 13):
        for tree in uncollected_tree(12, TailVariant.ONE_SUB):
            if tree.offset <= n:
                _check_uniform_children(tree, 0, n, table40)
            else:
                assert tree.evaluate(n, table40) == 0


def test_full_expansion_at_its_bound_is_fractal_p():
    table = build_table(30)
    for cap in range(2, 31):
        assert evaluate_form(expand_symbolic(cap, TailVariant.FULL), cap, table) == fractal_p(cap)


def test_uncollected_tree_limits():
    with pytest.raises(ResourceLimitError):
        uncollected_tree(40, "one", max_nodes=1000)
    with pytest.raises(ResourceLimitError):
        uncollected_tree(200, "one")
