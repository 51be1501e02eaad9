"""
Partition Oracle Module
Independent ground truth for the partition function:
- p(0..N) by a dynamic program over allowed parts
- p(0..N) by Euler's pentagonal recurrence
- restricted counts (every part at most k)
- a slow backtracking enumerator for small cross-checks
None of these use the fractal expansion, so they can validate it.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache

from app import config
from errors import ResourceLimitError, TableTooSmallError, UsageError

# Largest m the backtracking enumerator accepts
ENUMERATION_GUARD = 40


@dataclass(frozen=True)
class PartitionTable:
    """Dense table of p(0..limit); lookups at negative indices are 0"""
    limit: int
    values: tuple

    def __getitem__(self, m):
        if m < 0:
            return 0
        if m > self.limit:
            raise TableTooSmallError(f"table covers p(0..{self.limit}), p({m}) was requested")
        return self.values[m]

    def covers(self, m):
        """True if p(m) can be looked up (negative m always can)"""
        return m <= self.limit


@dataclass(frozen=True)
class RestrictedQuery:
    """Partitions of m into parts each at most k"""
    m: int
    k: int

    def __post_init__(self):
        if self.m < 0 or self.k < 0:
            raise UsageError(f"restricted query needs m >= 0 and k >= 0, got m={self.m}, k={self.k}")


def _check_limit(limit, max_limit):
    if limit < 0:
        raise UsageError(f"table limit must be nonnegative, got {limit}")
    max_limit = config.max_table_size if max_limit is None else max_limit
    if limit > max_limit:
        raise ResourceLimitError(f"table limit {limit} exceeds the configured maximum {max_limit}")


def build_table(limit, max_limit=None):
    """
    Build p(0..limit) with the classic dynamic program over parts 1..limit

    Args:
        limit (int): Largest n to tabulate
        max_limit (int): Override for the configured table size limit

    Returns:
        PartitionTable: values[m] = p(m)
    """
    _check_limit(limit, max_limit)
    values = [1] + [0] * limit
    # Admit parts 1, 2, ... in turn; values[m] counts partitions using the parts so far
    for part in range(1, limit + 1):
        for m in range(part, limit + 1):
            values[m] += values[m - part]
    logging.debug(f"Built parts-DP table up to {limit}")
    return PartitionTable(limit=limit, values=tuple(values))


def generalized_pentagonals(limit):
    """
    Generalized pentagonal offsets up to limit with Euler's signs

    Offsets k(3k-1)/2 for k = 1, -1, 2, -2, ... give 1, 2, 5, 7, 12, 15, ...;
    the sign is + for odd |k| and - for even |k|.

    Returns:
        list: (offset, sign) pairs in increasing offset order
    """
    pairs = []
    k = 1
    while True:
        sign = 1 if k % 2 else -1
        first = k * (3 * k - 1) // 2
        if first > limit:
            break
        pairs.append((first, sign))
        second = k * (3 * k + 1) // 2
        if second <= limit:
            pairs.append((second, sign))
        k += 1
    return pairs


def build_table_pentagonal(limit, max_limit=None):
    """Build p(0..limit) with the full (untruncated) pentagonal recurrence"""
    _check_limit(limit, max_limit)
    pentagonals = generalized_pentagonals(limit)
    values = [1] + [0] * limit
    for n in range(1, limit + 1):
        # p(n) = p(n-1) + p(n-2) - p(n-5) - p(n-7) + ...
        total = 0
        for offset, sign in pentagonals:
            if offset > n:
                break
            total += sign * values[n - offset]
        values[n] = total
    logging.debug(f"Built pentagonal table up to {limit}")
    return PartitionTable(limit=limit, values=tuple(values))


@lru_cache(maxsize=64)
def _restricted_row(m, k):
    # counts[j] = partitions of j into parts <= k, for j in 0..m
    counts = [1] + [0] * m
    for part in range(1, min(k, m) + 1):
        for j in range(part, m + 1):
            counts[j] += counts[j - part]
    return tuple(counts)


def restricted_count(query, max_limit=None):
    """
    Count partitions of query.m whose parts are all at most query.k

    Returns 1 for m = 0 (the empty partition) and 0 when m > 0 and k = 0.
    """
    _check_limit(query.m, max_limit)
    return _restricted_row(query.m, min(query.k, query.m))[query.m]


def restricted_table(m, k, max_limit=None):
    """Restricted counts for every j in 0..m with parts at most k"""
    _check_limit(m, max_limit)
    return _restricted_row(m, min(k, m))


def enumerate_count(m, max_part):
    """
    Count partitions of m into parts at most max_part by listing them

    Slow on purpose: this is the test oracle for restricted_count and is
    guarded to m <= 40.
    """
    if m < 0 or max_part < 0:
        raise UsageError(f"enumeration needs nonnegative arguments, got m={m}, max_part={max_part}")
    if m > ENUMERATION_GUARD:
        raise ResourceLimitError(f"enumeration is limited to m <= {ENUMERATION_GUARD}, got {m}")
    count = 0
    # Each stack entry: (remaining amount, largest part still allowed)
    stack = [(m, min(max_part, m))]
    while stack:
        remaining, largest = stack.pop()
        if remaining == 0:
            count += 1
            continue
        for part in range(min(largest, remaining), 0, -1):
            stack.append((remaining - part, part))
    return count
