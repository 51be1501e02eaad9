"""
Numeric Fractal Engine
Evaluates p(n) through the generator rule and builds the explicit
parcel/cell expansion tree.

p(n) = {p(0)} + {p(1)} + ... + {p(n-1)}, and a parcel {p(tau)} whose father
has tab h generates lambda = max(0, 2*tau - h) child parcels with tabs
0 .. lambda-1. A parcel with children becomes the cell [p(tau) - children];
each child is expanded under the tab of its enclosing cell.
"""
import logging
from dataclasses import dataclass
from enum import Enum

from app import config
from errors import ResourceLimitError, TableTooSmallError, UsageError
from oracle import PartitionTable, build_table
from symbolic_engine import TailVariant, as_variant


def child_count(tab, head):
    """Generator rule: number of child parcels of {p(tab)} under father tab head"""
    return max(0, 2 * tab - head)


class FractalEvaluator:
    """
    Evaluation context for parcel values over one partition table

    The value of a fully expanded parcel (tab, head) depends only on tab and
    head - tab. Rows are filled bottom-up: row h holds prefix sums of the
    parcel values Q(k, h) for k < h, so Q(tau, h) = p(tau) - row[tau][lambda].
    The memo belongs to this instance; do not share one across threads.
    """

    def __init__(self, table, rule=child_count):
        self.table = table
        self.rule = rule
        self._rows = [[0]]  # row 0: no parcels under head 0

    def _ensure_rows(self, head):
        while len(self._rows) <= head:
            h = len(self._rows)
            row = [0]
            running = 0
            for k in range(h):
                running += self.table[k] - self._rows[k][self.rule(k, h)]
                row.append(running)
            self._rows.append(row)

    def parcel_value(self, tab, head):
        """
        Value of the fully expanded parcel {p(tab)} under father tab head

        Args:
            tab (int): Tab of the parcel, 0 <= tab < head
            head (int): Tab of the father parcel

        Returns:
            int: p(tab) minus the values of its child parcels
        """
        if not (0 <= tab < head):
            raise UsageError(f"parcel needs 0 <= tab < head, got tab={tab}, head={head}")
        if not self.table.covers(tab):
            raise TableTooSmallError(f"table covers p(0..{self.table.limit}), parcel tab {tab} is beyond it")
        self._ensure_rows(tab)
        return self.table[tab] - self._rows[tab][self.rule(tab, head)]


def parcel_value(tab, head, table):
    """Value of {p(tab)} under father tab head, using a fresh evaluation context"""
    return FractalEvaluator(table).parcel_value(tab, head)


def fractal_table(limit, rule=child_count, max_n=None):
    """
    Build p(0..limit) purely through the generator rule

    Each p(h) is the sum of its top-level parcels, and every parcel value is
    computed from p values this function produced earlier.

    Returns:
        PartitionTable: Fractal values, expected to equal the oracle's
    """
    if limit < 0:
        raise UsageError(f"fractal evaluation needs n >= 0, got {limit}")
    max_n = config.max_fractal_n if max_n is None else max_n
    if limit > max_n:
        raise ResourceLimitError(f"fractal evaluation is limited to n <= {max_n}, got {limit}")

    values = [1]
    rows = [[0]]
    for h in range(1, limit + 1):
        # row[j] = sum of parcel values Q(k, h) for k < j; row[h] is p(h) itself
        row = [0]
        running = 0
        for k in range(h):
            # Q(k, h) = p(k) minus its first rule(k, h) children, each under head k
            running += values[k] - rows[k][rule(k, h)]
            row.append(running)
        rows.append(row)
        values.append(running)
    logging.info(f"Fractal evaluation reached p({limit}) = {values[limit]}")
    return PartitionTable(limit=limit, values=tuple(values))


def fractal_p(n, max_n=None):
    """p(n) computed through the generator rule"""
    return fractal_table(n, max_n=max_n)[n]


class NodeKind(str, Enum):
    PARCEL = "parcel"
    CELL = "cell"


@dataclass(frozen=True)
class ExpansionNode:
    """A parcel {p(tab)} with no children, or a cell [p(tab) - children]"""
    kind: NodeKind
    tab: int
    children: tuple = ()

    def value(self, table):
        return table[self.tab] - sum(child.value(table) for child in self.children)

    def depth(self):
        return 1 + max((child.depth() for child in self.children), default=0)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "tab": self.tab,
            "children": [child.to_dict() for child in self.children],
        }


@dataclass(frozen=True)
class TraceDocument:
    """A fully expanded p(n) with its closed tail terms"""
    n: int
    variant: TailVariant
    children: tuple
    tail_terms: tuple  # (description, value) pairs
    total: int
    steps: int  # breadth-first zoom generations, counting the initial sum

    def depth(self):
        return max((child.depth() for child in self.children), default=0)


class _TreeBuilder:
    """Builds expansion subtrees, sharing identical ones, within a node budget"""

    def __init__(self, max_nodes):
        self.max_nodes = max_nodes
        self.nodes = 0
        self._shared = {}  # (tab, head - tab) -> (node, subtree size)

    def expand(self, tab, head):
        key = (tab, head - tab)
        # Identical (tab, head - tab) subtrees are built once and reused
        if key in self._shared:
            node, size = self._shared[key]
            self.nodes += size
        else:
            count = child_count(tab, head)
            before = self.nodes
            if count <= 0:
                node = ExpansionNode(NodeKind.PARCEL, tab)
            else:
                node = ExpansionNode(NodeKind.CELL, tab, tuple(self.expand(k, tab) for k in range(count)))
            self.nodes += 1
            self._shared[key] = (node, self.nodes - before)
        if self.nodes > self.max_nodes:
            raise ResourceLimitError(f"trace exceeds the node budget of {self.max_nodes}")
        return node


def tail_terms(n, variant):
    """Closed terms replacing the top parcels: ('1', 1) and ('floor(n/2)', n // 2)"""
    if variant is TailVariant.ONE_SUB:
        return (("1", 1),)
    if variant is TailVariant.TWO_SUB:
        return (("⌊n/2⌋", n // 2), ("1", 1))
    return ()


def build_trace(n, variant=TailVariant.FULL, max_nodes=None, table=None):
    """
    Fully expand p(n) into its parcel/cell tree

    Args:
        n (int): The number whose partition count is expanded
        variant (TailVariant): Which top parcels are replaced by closed terms
        max_nodes (int): Node budget, defaults to the configured maximum
        table (PartitionTable): Oracle used to total the tree

    Returns:
        TraceDocument: The expansion with total = p(n)
    """
    variant = as_variant(variant)
    if n < 0:
        raise UsageError(f"trace needs n >= 0, got {n}")
    if n < 2 and variant is not TailVariant.FULL:
        raise UsageError(f"tail substitution '{variant.value}' needs n >= 2, got {n}")
    max_nodes = config.max_trace_nodes if max_nodes is None else max_nodes
    table = table if table is not None and table.covers(n) else build_table(n)

    # Step 1: expand every remaining top-level parcel under head n
    builder = _TreeBuilder(max_nodes)
    children = tuple(builder.expand(tab, n) for tab in range(n - variant.substituted))
    # Step 2: closed tail terms and the total
    closed = tail_terms(n, variant)
    if n == 0:
        # p(0) = 1 by definition, there are no parcels to expand
        closed = (("p(0)", 1),)
    total = sum(child.value(table) for child in children) + sum(value for _, value in closed)
    depth = max((child.depth() for child in children), default=0)
    logging.debug(f"Built trace of p({n}) variant={variant.value} nodes={builder.nodes} depth={depth}")
    return TraceDocument(n=n, variant=variant, children=children, tail_terms=closed,
                         total=total, steps=depth + 1)


def tree_dump(doc):
    """Machine-readable dump of a trace: nested {kind, tab, children}"""
    return {
        "n": doc.n,
        "variant": doc.variant.value,
        "steps": doc.steps,
        "total": doc.total,
        "tail": [[description, value] for description, value in doc.tail_terms],
        "children": [child.to_dict() for child in doc.children],
    }
