"""Two-phase key recovery for shrinking and clock-controlled shrinking generators.

Phase 1 runs the intercepted window through the linear CA models to obtain
sums of keystream bits (chained sub-triangles).  Sums whose indices all fall
in one column of the ``(2^L2 - 1) x 2^(L1-1)`` keystream matrix collapse to a
single bit of that column, which is a shifted PN-sequence.

Phase 2 searches SR1 initial states depth first.  Every 1 of SR1 starts a new
column, and that column is the first column ``C1`` read from a known offset.
All known bits are therefore pulled back onto ``C1`` (``u`` below); two bits
landing on the same row with different values kill the branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, gcd
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .ca import RuleVector, sub_automaton_char_polys
from .gf2 import BinPolynomial, FieldContext, FieldElement, collapse_power_sum
from .keystream import CcsgSpec, ShrinkGenSpec, ShrunkenMatrix, _xt_int, keystream
from .lfsr import LfsrSpec, LfsrState, _step_int
from .linearizer import LinearModel, ccsg_distance, linearize_ccsg, linearize_shrinking

INTERCEPTED = "intercepted"
RECONSTRUCTED = "reconstructed"


class AttackError(Exception):
    pass


class NoConsistentKeyError(AttackError):
    """No key reproduces the known bits (corrupt or misaligned input)."""


class AmbiguousKeyError(AttackError):
    """More than one key survives; more keystream is needed."""

    def __init__(
        self,
        message: str,
        candidates: Sequence[tuple[LfsrState, LfsrState | None]] = (),
        nodes_visited: int | None = None,
    ):
        super().__init__(message)
        self.candidates = list(candidates)
        self.nodes_visited = nodes_visited


class KnownBitConflict(NoConsistentKeyError):
    pass


# ---------- known bits


class KnownBitTable:
    """Keystream bits known at absolute positions, reduced modulo the period."""

    def __init__(self, period: int):
        if period < 1:
            raise ValueError("period must be >= 1")
        self.period = period
        self._bits: dict[int, int] = {}
        self._tags: dict[int, str] = {}

    def add(self, position: int, bit: int, tag: str = INTERCEPTED) -> bool:
        """Record a bit; returns False if it was already known (and agrees)."""
        pos = position % self.period
        bit = int(bit)
        old = self._bits.get(pos)
        if old is not None:
            if old != bit:
                raise KnownBitConflict(f"conflicting bits at position {pos}")
            return False
        self._bits[pos] = bit
        self._tags[pos] = tag
        return True

    def add_window(self, bits: Sequence[int], start: int = 0) -> None:
        for i, b in enumerate(bits):
            self.add(start + i, b, INTERCEPTED)

    def get(self, position: int) -> int | None:
        return self._bits.get(position % self.period)

    def tag(self, position: int) -> str | None:
        return self._tags.get(position % self.period)

    def __contains__(self, position: int) -> bool:
        return position % self.period in self._bits

    def __getitem__(self, position: int) -> int:
        return self._bits[position % self.period]

    def __len__(self) -> int:
        return len(self._bits)

    def items(self) -> list[tuple[int, int]]:
        return sorted(self._bits.items())

    def with_tag(self, tag: str) -> list[tuple[int, int]]:
        return [(p, b) for p, b in self.items() if self._tags[p] == tag]

    def copy(self) -> KnownBitTable:
        other = KnownBitTable(self.period)
        other._bits = dict(self._bits)
        other._tags = dict(self._tags)
        return other

    def to_text(self) -> str:
        return "".join(f"{p}:{b}\n" for p, b in self.items())

    def matrix(self, l1: int, l2: int) -> ShrunkenMatrix:
        m = ShrunkenMatrix(l1, l2)
        if m.period != self.period:
            raise ValueError("matrix shape does not match the table period")
        for p, b in self.items():
            m.set(p, b)
        return m


# ---------- phase 1


@dataclass(frozen=True)
class TriangleExpression:
    """Cell value ``x_cell^(t)`` in sub-triangle ``depth`` as a sum of ``z`` bits.

    The value at timeshift ``t`` is ``sum(z[t + k] for k in indices)``;
    ``count`` consecutive timeshifts starting at ``timeshift`` are covered.
    """

    cell: int
    depth: int
    indices: frozenset[int]
    timeshift: int = 0
    count: int = 1

    def __post_init__(self) -> None:
        if not self.indices:
            raise ValueError("empty expression")

    def shifted(self, t: int, count: int = 1) -> TriangleExpression:
        return TriangleExpression(self.cell, self.depth, self.indices, t, count)

    def __str__(self) -> str:
        terms = " + ".join(f"z{k}" for k in sorted(self.indices))
        return f"x{self.cell}[d{self.depth}] = {terms}"


@dataclass(frozen=True)
class SubTriangle:
    cell: int
    depth: int
    expression: TriangleExpression
    values: tuple[int, ...]


def _next_cell_column(prev: Sequence[int], cur: Sequence[int], rule: int) -> list[int]:
    return [cur[t + 1] ^ (rule & cur[t]) ^ prev[t] for t in range(len(cur) - 1)]


def _cell_column(column: Sequence[int], rules: Sequence[int], cell: int) -> list[int]:
    """Values at ``cell`` when ``column`` is produced at cell 1."""
    prev: list[int] = [0] * len(column)
    cur = list(column)
    for i in range(1, cell):
        if not cur:
            break
        prev, cur = cur, _next_cell_column(prev, cur, rules[i - 1])
    return cur


def chained_subtriangles(
    intercepted: Sequence[int],
    rules: RuleVector,
    max_depth: int | None = None,
    cells: Iterable[int] | None = None,
) -> list[SubTriangle]:
    """Sub-triangles ``Delta_n`` at cells ``2..`` for ``n = 1..max_depth``.

    ``Delta_(n+1)`` is ``Delta_1`` started from the cell column of ``Delta_n``;
    the cell-``i`` column of ``Delta_n`` has ``r - n(i-1)`` values.
    """
    r = len(intercepted)
    if r < 2:
        raise ValueError("need at least two intercepted bits")
    max_depth = r // 2 if max_depth is None else max_depth
    polys = [BinPolynomial(1)] + sub_automaton_char_polys(rules)
    cells = range(2, min(len(rules), r) + 1) if cells is None else cells
    out = []
    for i in cells:
        column = list(intercepted)
        power = BinPolynomial(1)
        for n in range(1, max_depth + 1):
            if r - n * (i - 1) < 1:
                break
            column = _cell_column(column, rules.rules, i)
            power = power * polys[i - 1]
            expr = TriangleExpression(i, n, frozenset(power.exponents()), 0, len(column))
            out.append(SubTriangle(i, n, expr, tuple(column)))
    return out


def subtriangle_expressions(
    r: int, rules: RuleVector, max_depth: int | None = None
) -> Iterator[TriangleExpression]:
    """Expressions of every chained sub-triangle, without evaluating them."""
    max_depth = r // 2 if max_depth is None else max_depth
    polys = [BinPolynomial(1)] + sub_automaton_char_polys(rules)
    for i in range(2, min(len(rules), r) + 1):
        power = BinPolynomial(1)
        for n in range(1, max_depth + 1):
            span = r - n * (i - 1)
            if span < 1:
                break
            power = power * polys[i - 1]
            yield TriangleExpression(i, n, frozenset(power.exponents()), 0, span)


def collapse_and_place(
    expr: TriangleExpression,
    ctx: FieldContext,
    l1: int,
    known: Mapping[int, int] | KnownBitTable,
    residue_mode: str = "zero",
) -> list[tuple[int, int]] | None:
    """Turn a single-column sum into known bits at absolute positions.

    Returns None when the indices do not share a residue modulo
    ``d = 2^(l1-1)`` (or, in ``"zero"`` mode, when that residue is not 0).
    A sum that cancels to the zero element yields an empty list.
    """
    if residue_mode not in ("zero", "any"):
        raise ValueError(f"unknown residue mode {residue_mode!r}")
    d = 1 << (l1 - 1)
    residues = {k % d for k in expr.indices}
    if len(residues) != 1:
        return None
    rho = residues.pop()
    if residue_mode == "zero" and rho:
        return None
    folded = collapse_power_sum(ctx, [k // d for k in expr.indices])
    if folded.is_zero:
        return []
    period = d * ctx.order
    out = []
    for t in range(expr.timeshift, expr.timeshift + expr.count):
        bit = 0
        for k in expr.indices:
            v = known.get(t + k)
            if v is None:
                raise ValueError(f"expression needs unknown bit z{t + k}")
            bit ^= v
        out.append(((t + rho + d * folded.exponent) % period, bit))
    return out


def count_reconstructible(n_per_column: Sequence[int]) -> int:
    """Number of nontrivial subset sums available from ``N_l`` known bits per column."""
    return sum(comb(n, k) for n in n_per_column for k in range(2, n + 1))


def phase1(
    intercepted: Sequence[int],
    model: LinearModel,
    ctx: FieldContext | None = None,
    max_depth: int | None = None,
    residue_mode: str = "zero",
    known: KnownBitTable | None = None,
) -> list[tuple[int, int]]:
    """Reconstruct keystream bits; new bits are also written into ``known``.

    ``intercepted`` must be the contiguous window starting at position 0.
    Raises NoConsistentKeyError if a reconstructed bit contradicts a known one.
    """
    ctx = FieldContext(model.basepoly) if ctx is None else ctx
    d = model.multiplicity
    period = d * ctx.order
    if known is None:
        known = KnownBitTable(period)
        known.add_window(intercepted)
    window = {i: b for i, b in enumerate(intercepted)}
    r = len(intercepted)
    emitted = []
    if r < 2:
        return emitted
    for rules in model.automata:
        for expr in subtriangle_expressions(r, rules, max_depth):
            if len(expr.indices) < 2:
                continue  # a plain shift of the window
            placed = collapse_and_place(expr, ctx, model.l1, window, residue_mode)
            for pos, bit in placed or ():
                if known.add(pos, bit, RECONSTRUCTED):
                    emitted.append((pos, bit))
    return emitted


# ---------- phase 2


def b_positions(l1: int, l2: int, stride: int | None = None) -> list[int]:
    """Rows ``j_1..j_(l2-1)`` of column C1 holding ``b_1..b_(l2-1)``.

    ``j_i * stride = i (mod 2^l2 - 1)`` with ``stride = 2^l1 - 1`` by default.
    """
    t2 = (1 << l2) - 1
    stride = (1 << l1) - 1 if stride is None else stride
    if gcd(stride, t2) != 1:
        raise ValueError(f"stride {stride} is not invertible mod {t2}")
    inv = pow(stride, -1, t2)
    return [(i * inv) % t2 for i in range(1, l2)]


class TraceEntry(NamedTuple):
    kind: str  # "prefix" or "completion"
    bits: str
    status: str  # "open", "contradicted", "confirmed"
    column: int | None = None
    row: int | None = None


@dataclass
class HypothesisNode:
    prefix: tuple[int, ...]
    starts: dict[int, int] = field(default_factory=dict)  # column -> C1 row where it begins
    status: str = "open"


@dataclass
class RecoveredKey:
    is1: LfsrState
    is2: LfsrState
    nodes_visited: int
    trace: list[TraceEntry] = field(default_factory=list)
    nodes: list[HypothesisNode] = field(default_factory=list)


def _merge_column(u: dict[int, int], column: Sequence[tuple[int, int]], start: int, t2: int) -> int | None:
    """Pull one column's known bits onto C1; returns the conflicting row or None."""
    for row, bit in column:
        j = (row + start) % t2
        old = u.get(j)
        if old is None:
            u[j] = bit
        elif old != bit:
            return row
    return None


def _derive_row(u: Mapping[int, int], j: int, ctx: FieldContext) -> int | None:
    """Bit at C1 row ``j`` from known rows with ``alpha^j = sum alpha^k``."""
    if j in u:
        return u[j]
    basis: dict[int, tuple[int, int, frozenset[int]]] = {}
    target = ctx.exp(j)
    for k in sorted(u):
        v, rows, bit = ctx.exp(k), frozenset((k,)), u[k]
        for top in sorted(basis, reverse=True):
            if (v >> top) & 1:
                bv, bbit, brows = basis[top]
                v ^= bv
                bit ^= bbit
                rows = rows ^ brows
        if v:
            basis[v.bit_length() - 1] = (v, bit, rows)
    bit, rows = 0, frozenset()
    for top in sorted(basis, reverse=True):
        if (target >> top) & 1:
            bv, bbit, brows = basis[top]
            target ^= bv
            bit ^= bbit
            rows = rows ^ brows
    if target:
        return None
    if collapse_power_sum(ctx, rows) != FieldElement(j % ctx.order):
        raise ArithmeticError("row identity failed to verify")
    return bit


def hypothesis_search(
    known: KnownBitTable,
    l1: int,
    l2: int,
    ctx: FieldContext,
    c1: BinPolynomial | str,
    c2: BinPolynomial | str,
    taps: Sequence[int] = (),
) -> RecoveredKey:
    """Depth-first search over SR1 states with ``a_0 = 1``.

    A node is a prefix ``a_0..a_n`` ending in 1; its children append
    ``0^k 1``, trying ``k = 0`` first.  Each node also stands for its
    completion with zeros, so the tree has exactly ``2^(l1-1)`` nodes.
    """
    c1, c2 = BinPolynomial.parse(c1), BinPolynomial.parse(c2)
    taps = tuple(taps)
    sr1 = LfsrSpec(c1)
    if sr1.length != l1 or c2.degree != l2:
        raise ValueError("register polynomials do not match (l1, l2)")
    d, t1, t2 = 1 << (l1 - 1), (1 << l1) - 1, (1 << l2) - 1
    if known.period != d * t2:
        raise ValueError("known-bit table has the wrong period")
    stride = ccsg_distance(l1, l2, taps, c1, "1" + "0" * (l1 - 1)) if taps else t1
    if gcd(stride, t2) != 1:
        raise AttackError(f"decimation {stride} is not invertible mod {t2}")
    inv = pow(stride, -1, t2)
    max_tap = max(taps, default=0)

    columns: list[list[tuple[int, int]]] = [[] for _ in range(d)]
    for pos, bit in known.items():
        columns[pos % d].append((pos // d, bit))

    def offset(a: Sequence[int], p: int) -> int:
        c = sum(_xt_int(taps, _window_int(a, t, max_tap)) for t in range(p)) if taps else p
        return (c * inv) % t2

    trace: list[TraceEntry] = []
    nodes: list[HypothesisNode] = []
    candidates: list[tuple[tuple[int, ...], dict[int, int]]] = []
    visited = 0

    def complete(prefix: list[int], u: dict[int, int], node: HypothesisNode) -> bool:
        state = prefix + [0] * (l1 - len(prefix))
        label = "".join(map(str, state))
        a, v = [], sum(b << i for i, b in enumerate(state))
        for _ in range(t1 + max_tap):
            bit, v = _step_int(v, sr1.tap_mask, l1)
            a.append(bit)
        ones = [p for p in range(t1) if a[p]]
        u = dict(u)
        for k, p in enumerate(ones):
            start = offset(a, p)
            node.starts[k] = start
            row = _merge_column(u, columns[k], start, t2)
            if row is not None:
                trace.append(TraceEntry("completion", label, "contradicted", k, row))
                return False
        trace.append(TraceEntry("completion", label, "confirmed"))
        candidates.append((tuple(state), u))
        return True

    def visit(prefix: list[int], u: dict[int, int]) -> None:
        nonlocal visited
        visited += 1
        n = len(prefix) - 1
        node = HypothesisNode(tuple(prefix))
        nodes.append(node)
        label = "".join(map(str, prefix))
        k = sum(prefix[:n])
        u = dict(u)
        # a CCSG offset may need SR1 bits past the prefix; leave it to the completion
        if max_tap <= 1 or n == 0:
            start = offset(prefix, n)
            node.starts[k] = start
            row = _merge_column(u, columns[k], start, t2)
            if row is not None:
                node.status = "contradicted"
                trace.append(TraceEntry("prefix", label, "contradicted", k, row))
                return
        trace.append(TraceEntry("prefix", label, "open"))
        if complete(prefix, u, node):
            node.status = "confirmed"
        for nxt in range(n + 1, l1):
            visit(prefix + [0] * (nxt - n - 1) + [1], u)

    visit([1], {})

    keys = []
    undetermined = []
    b_rows = [0] + b_positions(l1, l2, stride)
    for state, u in candidates:
        is2 = [_derive_row(u, j, ctx) for j in b_rows]
        if any(b is None for b in is2):
            undetermined.append(LfsrState(state))
            continue
        if not any(is2):
            continue
        key = (LfsrState(state), LfsrState(tuple(is2)))
        if _regenerates(key, c1, c2, taps, known):
            keys.append(key)
    if len(keys) + len(undetermined) > 1:
        raise AmbiguousKeyError(
            f"{len(keys) + len(undetermined)} keys survive",
            keys + [(s, None) for s in undetermined],
            visited,
        )
    if undetermined:
        raise AmbiguousKeyError(
            "SR2 state is underdetermined by the known bits", [(undetermined[0], None)], visited
        )
    if not keys:
        raise NoConsistentKeyError("every SR1 hypothesis contradicts the known bits")
    is1, is2 = keys[0]
    return RecoveredKey(is1, is2, visited, trace, nodes)


def _window_int(a: Sequence[int], t: int, span: int) -> int:
    return sum(a[t + i] << i for i in range(span + 1) if t + i < len(a))


def _make_spec(
    is1: LfsrState, is2: LfsrState, c1: BinPolynomial, c2: BinPolynomial, taps: Sequence[int]
) -> ShrinkGenSpec | CcsgSpec:
    base = ShrinkGenSpec(LfsrSpec(c1), is1, LfsrSpec(c2), is2)
    return CcsgSpec(base, tuple(taps)) if taps else base


def _regenerates(key, c1, c2, taps, known: KnownBitTable) -> bool:
    stream = keystream(_make_spec(key[0], key[1], c1, c2, taps), known.period)
    return all(stream[p] == b for p, b in known.items())


# ---------- end to end


@dataclass
class AttackResult:
    key: RecoveredKey
    keystream: list[int]  # one full period from position 0
    known: KnownBitTable
    reconstructed: list[tuple[int, int]]
    model: LinearModel
    c1: BinPolynomial

    @property
    def spec(self) -> ShrinkGenSpec | CcsgSpec:
        return _make_spec(self.key.is1, self.key.is2, self.c1, self.model.c2, self.model.taps)


def _run(
    intercepted: Sequence[int],
    model: LinearModel,
    c1: BinPolynomial,
    extra_known: Iterable[tuple[int, int]],
    max_depth: int | None,
    residue_mode: str,
) -> AttackResult:
    try:
        ctx = FieldContext(model.basepoly)
    except ValueError as exc:
        raise AttackError(f"column polynomial {model.basepoly} is not primitive") from exc
    l1, l2 = model.l1, model.c2.degree
    if ctx.degree != l2:
        raise AttackError("column polynomial degree differs from L2")
    known = KnownBitTable(model.multiplicity * ctx.order)
    try:
        known.add_window(intercepted)
        for pos, bit in extra_known:
            known.add(pos, bit, INTERCEPTED)
        reconstructed = []
        if len(known) < known.period:
            reconstructed = phase1(intercepted, model, ctx, max_depth, residue_mode, known)
    except KnownBitConflict as exc:
        raise NoConsistentKeyError(str(exc)) from exc
    key = hypothesis_search(known, l1, l2, ctx, c1, model.c2, model.taps)
    stream = keystream(_make_spec(key.is1, key.is2, c1, model.c2, model.taps), known.period)
    return AttackResult(key, stream, known, reconstructed, model, c1)


def attack_shrinking(
    intercepted: Sequence[int],
    l1: int,
    l2: int,
    c2: BinPolynomial | str,
    c1: BinPolynomial | str,
    extra_known: Iterable[tuple[int, int]] = (),
    max_depth: int | None = None,
    residue_mode: str = "zero",
) -> AttackResult:
    """Recover ``(IS1, IS2)`` from a keystream window starting at position 0.

    The recovered key has ``a_0 = 1``; a window taken anywhere in the
    keystream yields the equivalent key aligned to the window start.
    """
    c1, c2 = BinPolynomial.parse(c1), BinPolynomial.parse(c2)
    if c2.degree != l2 or c1.degree != l1:
        raise ValueError("polynomial degrees do not match (l1, l2)")
    model = linearize_shrinking(l1, c2)
    return _run(intercepted, model, c1, extra_known, max_depth, residue_mode)


def attack_ccsg(
    intercepted: Sequence[int],
    l1: int,
    l2: int,
    c2: BinPolynomial | str,
    c1: BinPolynomial | str,
    taps: Sequence[int],
    extra_known: Iterable[tuple[int, int]] = (),
    max_depth: int | None = None,
    residue_mode: str = "zero",
) -> AttackResult:
    c1, c2 = BinPolynomial.parse(c1), BinPolynomial.parse(c2)
    if c2.degree != l2 or c1.degree != l1:
        raise ValueError("polynomial degrees do not match (l1, l2)")
    model = linearize_ccsg(l1, c2, taps, c1, "1" + "0" * (l1 - 1))
    return _run(intercepted, model, c1, extra_known, max_depth, residue_mode)
