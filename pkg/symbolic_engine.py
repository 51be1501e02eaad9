"""
Symbolic Expansion Module
Expands p(n) as a signed combination of terms p(n-c), 1 <= c <= cap, valid
for every n up to the expansion bound cap.

A parcel p(n-a) whose father has tab n-b generates children p(n-c) for
c = 2a-b+1 .. cap, each expanded under the head offset a. The child list is
the same for every n: children with c > n reference negative tabs and vanish,
which is exactly what the generator count max(0, n-2a+b) asks for.
"""
import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from app import config
from errors import ResourceLimitError, TableTooSmallError, UsageError


class TailVariant(str, Enum):
    """Which top-level parcels are replaced by closed forms"""
    FULL = "none"  # no substitution
    ONE_SUB = "one"  # {p(n-1)} -> 1
    TWO_SUB = "two"  # {p(n-1)} -> 1 and {p(n-2)} -> floor(n/2)

    @property
    def substituted(self):
        """Number of top-level offsets (1, then 2) replaced by closed terms"""
        return {TailVariant.FULL: 0, TailVariant.ONE_SUB: 1, TailVariant.TWO_SUB: 2}[self]

    @classmethod
    def parse(cls, text):
        try:
            return cls(text)
        except ValueError:
            raise UsageError(f"unknown tail variant {text!r}, expected one of none, one, two")


def _half_integer(value):
    value = Fraction(value)
    if 2 % value.denominator:
        raise UsageError(f"quasi-polynomial coefficients need denominators dividing 2, got {value}")
    return value


@dataclass(frozen=True)
class QuasiPoly2:
    """
    Parity-split affine function of n

    The value at n is even[0] + even[1]*n for even n and odd[0] + odd[1]*n
    for odd n. Coefficients are exact halves; modulus 2 and degree 1 are all
    the recurrence tails need, wider moduli would add branches here.
    """
    even: tuple = (Fraction(0), Fraction(0))
    odd: tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "even", tuple(_half_integer(c) for c in self.even))
        object.__setattr__(self, "odd", tuple(_half_integer(c) for c in self.odd))

    @classmethod
    def constant(cls, value):
        return cls(even=(value, 0), odd=(value, 0))

    @classmethod
    def floor_half(cls):
        """floor(n/2): n/2 for even n, (n-1)/2 for odd n"""
        return cls(even=(0, Fraction(1, 2)), odd=(Fraction(-1, 2), Fraction(1, 2)))

    def branch(self, n):
        return self.even if n % 2 == 0 else self.odd

    def __call__(self, n):
        c0, c1 = self.branch(n)
        return c0 + c1 * n

    def __add__(self, other):
        return QuasiPoly2(even=(self.even[0] + other.even[0], self.even[1] + other.even[1]),
                          odd=(self.odd[0] + other.odd[0], self.odd[1] + other.odd[1]))

    def __neg__(self):
        return QuasiPoly2(even=(-self.even[0], -self.even[1]), odd=(-self.odd[0], -self.odd[1]))

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return not any(self.even) and not any(self.odd)

    def shift(self, d):
        """Re-express g(m) as a function of n where m = n - d"""
        branches = []
        for parity in (0, 1):
            c0, c1 = self.even if (parity - d) % 2 == 0 else self.odd
            branches.append((c0 - c1 * d, c1))
        return QuasiPoly2(even=branches[0], odd=branches[1])

    def is_integer_valued(self, sample=range(0, 51)):
        return all(self(n).denominator == 1 for n in sample)

    def describe(self):
        """Text form: a single affine expression, or one per parity"""
        if self.even == self.odd:
            return _affine_text(*self.even)
        return f"{{n even: {_affine_text(*self.even)}; n odd: {_affine_text(*self.odd)}}}"

    def to_dict(self):
        return {"even": [str(c) for c in self.even], "odd": [str(c) for c in self.odd]}

    @classmethod
    def from_dict(cls, data):
        return cls(even=tuple(Fraction(c) for c in data["even"]),
                   odd=tuple(Fraction(c) for c in data["odd"]))


def _affine_text(c0, c1):
    parts = []
    if c1:
        numerator = abs(c1.numerator)
        term = "n" if numerator == 1 else f"{numerator}*n"
        if c1.denominator != 1:
            term = f"{term}/{c1.denominator}"
        parts.append(term if c1 > 0 else f"-{term}")
    if not parts:
        parts.append(str(c0))
    elif c0:
        parts.append(f"- {-c0}" if c0 < 0 else f"+ {c0}")
    return " ".join(parts)


def as_variant(value):
    """Accept a TailVariant or its flag spelling (none, one, two)"""
    return value if isinstance(value, TailVariant) else TailVariant.parse(value)


@dataclass(frozen=True)
class LinearForm:
    """
    Integer combination of p(n-c) plus a quasi-polynomial tail

    terms holds (offset, coefficient) pairs sorted by offset with no zero
    coefficients; claimed is the (lo, hi) range of n the form is asserted for.
    """
    terms: tuple
    tail: QuasiPoly2 = field(default_factory=QuasiPoly2)
    cap: int = 0
    claimed: tuple = (0, 0)

    @classmethod
    def build(cls, coefficients, tail=None, cap=None, claimed=None):
        terms = tuple(sorted((int(c), int(v)) for c, v in coefficients.items() if v))
        cap = max((c for c, _ in terms), default=1) if cap is None else cap
        for offset, _ in terms:
            if offset < 1 or offset > cap:
                raise UsageError(f"offset {offset} outside [1, {cap}]")
        claimed = (0, cap) if claimed is None else tuple(claimed)
        return cls(terms=terms, tail=tail or QuasiPoly2(), cap=cap, claimed=claimed)

    @property
    def coefficients(self):
        return dict(self.terms)

    def offsets(self):
        return [c for c, _ in self.terms]


class SymbolicNode:
    """Uncollected signed term: p(n-offset) minus its expanded children"""
    __slots__ = ("offset", "children")

    def __init__(self, offset, children=()):
        self.offset = offset
        self.children = tuple(children)

    def evaluate(self, n, table):
        return table[n - self.offset] - sum(child.evaluate(n, table) for child in self.children)


class _ParcelExpander:
    """Collected parcel expansions for one cap, memoized on (a, b)"""

    def __init__(self, cap):
        self.cap = cap
        self._memo = {}
        self._sizes = {}
        self._lock = threading.RLock()

    def collect(self, a, b):
        key = (a, b)
        with self._lock:
            if key in self._memo:
                return self._memo[key]
            # Parcel minus its children; a child offset past n reads p(<0) = 0
            coefficients = {a: 1}
            for c in range(2 * a - b + 1, self.cap + 1):
                for offset, coef in self.collect(c, a).items():
                    coefficients[offset] = coefficients.get(offset, 0) - coef
            collected = {offset: coef for offset, coef in coefficients.items() if coef}
            self._memo[key] = collected
            return collected

    def tree_size(self, a, b):
        """Node count of the uncollected tree of (a, b); grows exponentially with cap"""
        key = (a, b)
        with self._lock:
            if key not in self._sizes:
                self._sizes[key] = 1 + sum(self.tree_size(c, a) for c in range(2 * a - b + 1, self.cap + 1))
            return self._sizes[key]

    def tree(self, a, b):
        return SymbolicNode(a, [self.tree(c, a) for c in range(2 * a - b + 1, self.cap + 1)])


def _check_cap(cap, max_cap=None):
    max_cap = config.max_symbolic_cap if max_cap is None else max_cap
    if cap > max_cap:
        raise ResourceLimitError(f"expansion bound {cap} exceeds the configured maximum {max_cap}")


@lru_cache(maxsize=256)
def _expander(cap):
    return _ParcelExpander(cap)


def expand_parcel_symbolic(a, b, cap, max_cap=None):
    """
    Fully expand the parcel p(n-a) under the head p(n-b)

    Args:
        a (int): Offset of the parcel, b < a <= cap
        b (int): Offset of the father's head, 0 for the top-level p(n)
        cap (int): Expansion bound

    Returns:
        LinearForm: Collected signed form with offsets in [a, cap]; at each n
        in [a, cap] it evaluates to the count of partitions of n-a with parts
        at most a-b
    """
    if not (0 <= b < a <= cap):
        raise UsageError(f"parcel expansion needs 0 <= b < a <= cap, got a={a}, b={b}, cap={cap}")
    _check_cap(cap, max_cap)
    return LinearForm.build(_expander(cap).collect(a, b), cap=cap, claimed=(a, cap))


def variant_tail(variant):
    """Closed tail terms contributed by a substitution variant"""
    if variant is TailVariant.ONE_SUB:
        return QuasiPoly2.constant(1)
    if variant is TailVariant.TWO_SUB:
        return QuasiPoly2.floor_half() + QuasiPoly2.constant(1)
    return QuasiPoly2()


@lru_cache(maxsize=512)
def _expand_symbolic(cap, variant):
    expander = _expander(cap)
    coefficients = {}
    # Offsets 1 (and 2) are replaced by the variant's tail terms
    for a in range(variant.substituted + 1, cap + 1):
        for offset, coef in expander.collect(a, 0).items():
            coefficients[offset] = coefficients.get(offset, 0) + coef
    # The empty top-level sum gives 0 at n = 0, so the unsubstituted form starts at 1
    lo = 1 if variant is TailVariant.FULL else 2
    logging.debug(f"Expanded p(n) symbolically with cap={cap}, variant={variant.value}")
    return LinearForm.build(coefficients, tail=variant_tail(variant), cap=cap, claimed=(lo, cap))


def expand_symbolic(cap, variant, max_cap=None):
    """
    Expand p(n) = sum over c of the parcel p(n-c), substituting tail terms

    Args:
        cap (int): Expansion bound, at least 2
        variant (TailVariant): Which top-level parcels become closed terms

    Returns:
        LinearForm: Claimed valid for 2 <= n <= cap (1 <= n <= cap unsubstituted)
    """
    if cap < 2:
        raise UsageError(f"symbolic expansion needs cap >= 2, got {cap}")
    _check_cap(cap, max_cap)
    return _expand_symbolic(cap, as_variant(variant))


def uncollected_tree(cap, variant, max_cap=None, max_nodes=None):
    """
    The signed term trees of every top-level parcel, before collection

    Raises:
        ResourceLimitError: if cap exceeds the symbolic limit or the trees
        would exceed the node budget (the configured trace budget by default)
    """
    if cap < 2:
        raise UsageError(f"symbolic expansion needs cap >= 2, got {cap}")
    _check_cap(cap, max_cap)
    variant = as_variant(variant)
    expander = _expander(cap)
    max_nodes = config.max_trace_nodes if max_nodes is None else max_nodes
    # Size is counted on the memo before any node is built
    nodes = sum(expander.tree_size(a, 0) for a in range(variant.substituted + 1, cap + 1))
    if nodes > max_nodes:
        raise ResourceLimitError(f"uncollected expansion has {nodes} nodes, budget is {max_nodes}")
    return [expander.tree(a, 0) for a in range(variant.substituted + 1, cap + 1)]


def first_generating_offset(cap, variant=TailVariant.ONE_SUB):
    """
    Offset x of the smallest-tab parcel that generates children

    Parcels are ordered by increasing tab n-c; the first one with a nonempty
    child list is the largest offset a with 2a+1 <= cap.
    """
    for a in range(cap, as_variant(variant).substituted, -1):
        if 2 * a + 1 <= cap:
            return a
    return None


def shift_form(form, d):
    """
    Re-express a form for p(m) as a form in n with m = n - d

    Every offset c becomes c + d, the tail is re-derived for the shifted
    parity and the claimed range moves up by d.
    """
    if d < 1:
        raise UsageError(f"shift must be at least 1, got {d}")
    lo, hi = form.claimed
    return LinearForm(terms=tuple((c + d, v) for c, v in form.terms),
                      tail=form.tail.shift(d),
                      cap=form.cap + d,
                      claimed=(lo + d, hi + d))


def evaluate_form(form, n, table):
    """
    Evaluate sum coef_c * p(n-c) + tail(n) with p at negative tabs equal to 0

    Raises:
        TableTooSmallError: if the table does not reach p(n-1)
    """
    if not table.covers(max(0, n - 1)):
        raise TableTooSmallError(f"table covers p(0..{table.limit}), evaluating at n={n} needs p({n - 1})")
    # Negative tabs read as 0 through the table
    total = Fraction(sum(coef * table[n - offset] for offset, coef in form.terms))
    total += form.tail(n)
    if total.denominator != 1:
        raise UsageError(f"form evaluates to a non-integer {total} at n={n}")
    return int(total)


def empirical_range(form, table, scan_to=None):
    """
    Maximal contiguous range of n containing the claimed range where the form
    equals p(n); None if the form fails somewhere inside its claimed range
    """
    lo, hi = form.claimed
    scan_to = table.limit if scan_to is None else scan_to
    if scan_to < hi:
        raise UsageError(f"scan must reach the claimed upper bound {hi}, got {scan_to}")

    def holds(n):
        return evaluate_form(form, n, table) == table[n]

    if not all(holds(n) for n in range(lo, hi + 1)):
        return None
    while lo > 0 and holds(lo - 1):
        lo -= 1
    while hi < scan_to and holds(hi + 1):
        hi += 1
    return (lo, hi)


def _term_text(offset, coef, first):
    magnitude = abs(coef)
    term = f"p(n-{offset})" if magnitude == 1 else f"{magnitude}*p(n-{offset})"
    if first:
        return term if coef > 0 else f"-{term}"
    return f"+ {term}" if coef > 0 else f"- {term}"


def render_form(form, lhs="p(n)", with_range=True):
    """Canonical text: terms by ascending offset, then the tail, then the range"""
    pieces = [_term_text(offset, coef, i == 0) for i, (offset, coef) in enumerate(form.terms)]
    if not form.tail.is_zero():
        tail = form.tail.describe()
        if not pieces:
            pieces.append(tail)
        elif form.tail.even == form.tail.odd and tail.startswith("-"):
            pieces.append(f"- {tail[1:]}")
        else:
            pieces.append(f"+ {tail}")
    text = f"{lhs} = {' '.join(pieces) if pieces else '0'}"
    if with_range:
        lo, hi = form.claimed
        text += f"  [{lo} <= n <= {hi}]"
    return text


def form_to_dict(form):
    """Machine-readable dump: {offset: coefficient} plus tail branches"""
    return {
        "coefficients": {str(c): v for c, v in form.terms},
        "tail": form.tail.to_dict(),
        "cap": form.cap,
        "claimed": list(form.claimed),
    }


def form_from_dict(data):
    coefficients = {int(c): int(v) for c, v in data["coefficients"].items()}
    tail = QuasiPoly2.from_dict(data["tail"]) if data.get("tail") else QuasiPoly2()
    cap = data.get("cap") or max(coefficients, default=1)
    return LinearForm.build(coefficients, tail=tail, cap=cap, claimed=data.get("claimed"))
