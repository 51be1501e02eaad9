import pytest

from errors import ResourceLimitError, TableTooSmallError, UsageError
from oracle import (RestrictedQuery, build_table, build_table_pentagonal, enumerate_count,
                    generalized_pentagonals, restricted_count, restricted_table)


def test_small_values():
    assert build_table(12).values == (1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77)


def test_negative_index_is_zero_and_limit_is_enforced():
    table = build_table(10)
    assert table[-1] == 0
    assert table[-25] == 0
    assert table.covers(10)
    assert not table.covers(11)
    with pytest.raises(TableTooSmallError):
        table[11]


def test_dp_and_pentagonal_agree_to_1000():
    assert build_table(1000).values == build_table_pentagonal(1000).values


def test_generalized_pentagonals():
    assert generalized_pentagonals(30) == [(1, 1), (2, 1), (5, -1), (7, -1), (12, 1), (15, 1),
                                           (22, -1), (26, -1)]


@pytest.mark.parametrize("m,k,expected", [
    (5, 5, 7),
    (5, 2, 3),
    (0, 0, 1),
    (4, 0, 0),
    (10, 3, 14),
    (3, 10, 3),
])
def test_restricted_count(m, k, expected):
    assert restricted_count(RestrictedQuery(m, k)) == expected


def test_restricted_count_matches_enumeration():
    for m in range(0, 21):
        for k in range(0, m + 2):
            assert restricted_count(RestrictedQuery(m, k)) == enumerate_count(m, k)


def test_restricted_table_row():
    assert restricted_table(6, 2) == (1, 1, 2, 2, 3, 3, 4)


def test_invalid_queries():
    with pytest.raises(UsageError):
        RestrictedQuery(-1, 2)
    with pytest.raises(UsageError):
        build_table(-1)
    with pytest.raises(ResourceLimitError):
        build_table(10, max_limit=5)
    with pytest.raises(ResourceLimitError):
        enumerate_count(41, 41)


@pytest.mark.parametrize("m,k,expected", [(8, 2, 5), (6, 4, 9)])
def test_restricted_count_examples(m, k, expected):
    assert restricted_count(RestrictedQuery(m, k)) == expected


def test_enumerate_count_example():
    assert enumerate_count(5, 4) == 6


def test_restricted_count_closed_forms():
    for m in range(0, 60):
        assert restricted_count(RestrictedQuery(m, 1)) == 1
        assert restricted_count(RestrictedQuery(m, 2)) == (m + 2) // 2


def test_restricted_count_grows_with_k_up_to_p():
    table = build_table(40)
    for m in range(0, 41):
        counts = [restricted_count(RestrictedQuery(m, k)) for k in range(0, m + 3)]
        assert counts == sorted(counts)
        assert counts[m:] == [table[m]] * 3


def test_restricted_count_matches_enumeration_grid():
    for m in range(0, 31):
        for k in range(0, 31):
            assert restricted_count(RestrictedQuery(m, k)) == enumerate_count(m, k)
