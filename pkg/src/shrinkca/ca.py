"""One-dimensional null-boundary hybrid cellular automata with rules 90/150.

Cells are numbered 1..L left to right.  Internally states are also packed
into ints with cell ``i`` at bit ``i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import BinPolynomial, _clmul


@dataclass(frozen=True)
class RuleVector:
    """Rule per cell, left to right: 0 = rule 90, 1 = rule 150."""

    rules: tuple[int, ...]

    def __post_init__(self) -> None:
        rules = tuple(int(r) for r in self.rules)
        if not rules or any(r not in (0, 1) for r in rules):
            raise ValueError(f"invalid rule vector {self.rules!r}")
        object.__setattr__(self, "rules", rules)

    @classmethod
    def parse(cls, text: str) -> RuleVector:
        """Binary string, e.g. ``"0111001110"``; whitespace ignored."""
        s = "".join(text.split())
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"bad binary rule vector {text!r}")
        return cls(tuple(int(c) for c in s))

    @classmethod
    def from_hex(cls, text: str, length: int | None = None) -> RuleVector:
        """Each hex digit holds four cells, leftmost cell in the high bit."""
        s = "".join(text.split())
        if not s:
            raise ValueError("empty hex rule vector")
        try:
            bits = "".join(format(int(ch, 16), "04b") for ch in s)
        except ValueError:
            raise ValueError(f"bad hex digit in {text!r}") from None
        if length is not None and length != len(bits):
            raise ValueError(f"hex {text!r} encodes {len(bits)} cells, expected {length}")
        return cls.parse(bits)

    def to_hex(self) -> str:
        if len(self) % 4:
            raise ValueError(f"hex encoding needs a multiple of 4 cells, have {len(self)}")
        s = str(self)
        return "".join(format(int(s[i : i + 4], 2), "X") for i in range(0, len(s), 4))

    def reversed(self) -> RuleVector:
        return RuleVector(self.rules[::-1])

    def mask(self) -> int:
        return sum(r << i for i, r in enumerate(self.rules))

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, i: int) -> int:
        return self.rules[i]

    def __str__(self) -> str:
        return "".join(map(str, self.rules))


@dataclass(frozen=True)
class CaState:
    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        cells = tuple(int(c) for c in self.cells)
        if any(c not in (0, 1) for c in cells):
            raise ValueError(f"invalid cell contents {self.cells!r}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def parse(cls, text: str) -> CaState:
        return cls(tuple(int(c) for c in "".join(text.split())))

    @classmethod
    def from_int(cls, value: int, length: int) -> CaState:
        return cls(tuple((value >> i) & 1 for i in range(length)))

    def to_int(self) -> int:
        return sum(c << i for i, c in enumerate(self.cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __str__(self) -> str:
        return "".join(map(str, self.cells))


@dataclass
class EvolutionTable:
    """Successive states (rows); ``columns[i]`` is the output of cell ``i + 1``.

    When the run stopped on a repeated state, ``cycle_start`` is the row index
    of its first occurrence and ``period`` the cycle length.
    """

    rows: list[tuple[int, ...]]
    cycle_start: int | None = None
    period: int | None = None

    @property
    def columns(self) -> list[list[int]]:
        return [list(col) for col in zip(*self.rows)]


def _check_lengths(rules: RuleVector, state: CaState) -> None:
    if len(rules) != len(state):
        raise ValueError(f"rule vector has {len(rules)} cells, state has {len(state)}")


def _step_int(value: int, rmask: int, full: int) -> int:
    return ((value << 1) ^ (value >> 1) ^ (value & rmask)) & full


def ca_step(rules: RuleVector, state: CaState) -> CaState:
    _check_lengths(rules, state)
    n = len(rules)
    return CaState.from_int(_step_int(state.to_int(), rules.mask(), (1 << n) - 1), n)


def ca_run(
    rules: RuleVector,
    state: CaState,
    n: int,
    stop_on_repeat: bool = False,
) -> EvolutionTable:
    """Evolve for ``n`` steps, giving ``n + 1`` rows.

    ``n`` is the row cap; with ``stop_on_repeat`` the run ends at the first
    state already seen and the cycle is recorded.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_lengths(rules, state)
    length = len(rules)
    rmask, full = rules.mask(), (1 << length) - 1
    value = state.to_int()
    seen = {value: 0}
    values = [value]
    table = EvolutionTable([])
    for t in range(1, n + 1):
        value = _step_int(value, rmask, full)
        if stop_on_repeat and value in seen:
            table.cycle_start = seen[value]
            table.period = t - seen[value]
            break
        seen.setdefault(value, t)
        values.append(value)
    table.rows = [CaState.from_int(v, length).cells for v in values]
    return table


def ca_cell_stream(rules: RuleVector, state: CaState, n: int, cell: int = 1) -> list[int]:
    """First ``n`` values produced at one cell (1-based)."""
    _check_lengths(rules, state)
    rmask, full = rules.mask(), (1 << len(rules)) - 1
    value, shift = state.to_int(), cell - 1
    out = [0] * n
    for t in range(n):
        out[t] = (value >> shift) & 1
        value = _step_int(value, rmask, full)
    return out


def sub_automaton_char_polys(rules: RuleVector | Sequence[int], upto: int | None = None) -> list[BinPolynomial]:
    """``[P_1, ..., P_upto]`` via ``P_i = (x + R_i) P_{i-1} + P_{i-2}``."""
    seq = rules.rules if isinstance(rules, RuleVector) else tuple(rules)
    upto = len(seq) if upto is None else upto
    if not 0 <= upto <= len(seq):
        raise ValueError(f"upto must lie in [0, {len(seq)}]")
    prev, cur = 0, 1
    out = []
    for r in seq[:upto]:
        prev, cur = cur, _clmul(cur, 0b10 | r) ^ prev
        out.append(BinPolynomial(cur))
    return out


def ca_char_poly(rules: RuleVector | Sequence[int]) -> BinPolynomial:
    polys = sub_automaton_char_polys(rules)
    return polys[-1] if polys else BinPolynomial(1)


def transition_matrix(rules: RuleVector) -> np.ndarray:
    """Tridiagonal GF(2) matrix: rules on the diagonal, ones beside it."""
    n = len(rules)
    m = np.diag(np.array(rules.rules, dtype=np.uint8))
    idx = np.arange(n - 1)
    m[idx, idx + 1] = 1
    m[idx + 1, idx] = 1
    return m


def state_from_leading_cell(rules: RuleVector, leading: Sequence[int]) -> CaState:
    """The unique state whose cell-1 output starts with ``leading``.

    Runs the neighbour relation backwards one cell at a time:
    ``x_i^t = x_{i-1}^{t+1} + R_{i-1} x_{i-1}^t + x_{i-2}^t``.
    """
    n = len(rules)
    if len(leading) < n:
        raise ValueError(f"need at least {n} leading bits, got {len(leading)}")
    prev: list[int] = [0] * len(leading)
    cur = [int(b) & 1 for b in leading]
    first = [cur[0]]
    for i in range(1, n):
        r = rules.rules[i - 1]
        nxt = [cur[t + 1] ^ (r & cur[t]) ^ prev[t] for t in range(len(cur) - 1)]
        prev, cur = cur, nxt
        first.append(cur[0])
    return CaState(tuple(first))
