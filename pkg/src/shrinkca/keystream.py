"""Shrinking generator (SG) and clock-controlled shrinking generator (CCSG).

All keystream positions are absolute: index 0 is the first output bit after
the registers were loaded with their seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, NamedTuple

from .lfsr import LfsrSpec, LfsrState, _step_int


@dataclass(frozen=True)
class ShrinkGenSpec:
    sr1: LfsrSpec
    seed1: LfsrState
    sr2: LfsrSpec
    seed2: LfsrState

    def __post_init__(self) -> None:
        l1, l2 = self.sr1.length, self.sr2.length
        if gcd(l1, l2) != 1 or l1 >= l2:
            raise ValueError(f"need gcd(L1, L2) = 1 and L1 < L2, got ({l1}, {l2})")
        if len(self.seed1) != l1 or len(self.seed2) != l2:
            raise ValueError("seed lengths do not match register lengths")
        if self.seed1.is_degenerate:
            raise ValueError("all-zero SR1 seed never selects an output bit")
        if self.seed2.is_degenerate:
            raise ValueError("all-zero SR2 seed")

    @classmethod
    def from_text(cls, poly1: str, seed1: str, poly2: str, seed2: str) -> ShrinkGenSpec:
        return cls(LfsrSpec(poly1), LfsrState.parse(seed1), LfsrSpec(poly2), LfsrState.parse(seed2))

    @property
    def l1(self) -> int:
        return self.sr1.length

    @property
    def l2(self) -> int:
        return self.sr2.length

    @property
    def period(self) -> int:
        return ((1 << self.l2) - 1) << (self.l1 - 1)


@dataclass(frozen=True)
class CcsgSpec:
    """SG plus the SR2 clocking function ``X_t = 1 + sum 2^k * A_{taps[k]}(t)``."""

    base: ShrinkGenSpec
    taps: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        taps = tuple(int(t) for t in self.taps)
        object.__setattr__(self, "taps", taps)
        l1 = self.base.l1
        if len(set(taps)) != len(taps):
            raise ValueError("tap indices must be distinct")
        if any(not 0 <= t < l1 for t in taps):
            raise ValueError(f"tap indices must lie in [0, {l1 - 1}]")
        if len(taps) > max(l1 - 1, 0):
            raise ValueError("at most L1 - 1 taps allowed")

    @property
    def w(self) -> int:
        return len(self.taps)


def xt_value(spec: CcsgSpec, sr1_state: LfsrState) -> int:
    return 1 + sum(sr1_state.stages[i] << k for k, i in enumerate(spec.taps))


def _xt_int(taps: tuple[int, ...], value: int) -> int:
    return 1 + sum(((value >> i) & 1) << k for k, i in enumerate(taps))


class CcsgStep(NamedTuple):
    a: int  # SR1 output a_t
    x: int  # clocking amount X_t
    b_prime: int  # b'_t = b_{c_t}


def ccsg_steps(spec: CcsgSpec | ShrinkGenSpec) -> Iterator[CcsgStep]:
    """Per-clock trace of the generator: ``(a_t, X_t, b'_t)``.

    SR2 is read first and then clocked ``X_t`` times, so ``b'_0 = b_0``.
    """
    if isinstance(spec, ShrinkGenSpec):
        spec = CcsgSpec(spec)
    base = spec.base
    v1, t1, l1 = base.seed1.to_int(), base.sr1.tap_mask, base.l1
    v2, t2, l2 = base.seed2.to_int(), base.sr2.tap_mask, base.l2
    taps = spec.taps
    while True:
        x = _xt_int(taps, v1) if taps else 1
        b = v2 & 1
        for _ in range(x):
            _, v2 = _step_int(v2, t2, l2)
        a, v1 = _step_int(v1, t1, l1)
        yield CcsgStep(a, x, b)


def sg_stream(spec: ShrinkGenSpec, n: int) -> list[int]:
    if n < 0:
        raise ValueError("n must be >= 0")
    v1, t1, l1 = spec.seed1.to_int(), spec.sr1.tap_mask, spec.l1
    v2, t2, l2 = spec.seed2.to_int(), spec.sr2.tap_mask, spec.l2
    out: list[int] = []
    while len(out) < n:
        a, v1 = _step_int(v1, t1, l1)
        b, v2 = _step_int(v2, t2, l2)
        if a:
            out.append(b)
    return out


def ccsg_stream(spec: CcsgSpec, n: int) -> list[int]:
    if n < 0:
        raise ValueError("n must be >= 0")
    out: list[int] = []
    if n == 0:
        return out
    for step in ccsg_steps(spec):
        if step.a:
            out.append(step.b_prime)
            if len(out) == n:
                break
    return out


def keystream(spec: CcsgSpec | ShrinkGenSpec, n: int) -> list[int]:
    """Dispatch to the SG or CCSG generator."""
    if isinstance(spec, ShrinkGenSpec):
        return sg_stream(spec, n)
    return ccsg_stream(spec, n)


def align_to_output(spec: CcsgSpec | ShrinkGenSpec, skip: int = 0) -> CcsgSpec | ShrinkGenSpec:
    """Equivalent generator whose SR1 stage 0 is 1, advanced past ``skip`` outputs.

    Its keystream equals the original keystream from position ``skip`` onward.
    """
    ccsg = spec if isinstance(spec, CcsgSpec) else CcsgSpec(spec)
    base = ccsg.base
    v1, t1, l1 = base.seed1.to_int(), base.sr1.tap_mask, base.l1
    v2, t2, l2 = base.seed2.to_int(), base.sr2.tap_mask, base.l2
    emitted = 0
    while True:
        if v1 & 1 and emitted == skip:
            break
        x = _xt_int(ccsg.taps, v1) if ccsg.taps else 1
        for _ in range(x):
            _, v2 = _step_int(v2, t2, l2)
        a, v1 = _step_int(v1, t1, l1)
        emitted += a
    new_base = ShrinkGenSpec(
        base.sr1, LfsrState.from_int(v1, l1), base.sr2, LfsrState.from_int(v2, l2)
    )
    return new_base if isinstance(spec, ShrinkGenSpec) else CcsgSpec(new_base, ccsg.taps)


class SgTheory(NamedTuple):
    period: int
    lc_lower: Fraction  # exclusive
    lc_upper: int
    ones: int


def sg_theory(l1: int, l2: int) -> SgTheory:
    """Period, linear-complexity bounds and ones count of a shrunken sequence."""
    if l1 < 1 or gcd(l1, l2) != 1 or l1 >= l2:
        raise ValueError(f"need gcd(L1, L2) = 1 and 1 <= L1 < L2, got ({l1}, {l2})")
    d = 1 << (l1 - 1)
    return SgTheory(
        period=((1 << l2) - 1) * d,
        lc_lower=Fraction(l2 * d, 2),
        lc_upper=l2 * d,
        ones=(1 << (l2 - 1)) * d,
    )


class ShrunkenMatrix:
    """The period laid out as ``(2^L2 - 1) x 2^(L1-1)`` with unknown cells.

    Keystream index ``k`` lives at row ``k // d``, column ``k % d``.
    """

    def __init__(self, l1: int, l2: int):
        self.l1, self.l2 = l1, l2
        self.cols = 1 << (l1 - 1)
        self.rows = (1 << l2) - 1
        self.cells: list[int | None] = [None] * (self.rows * self.cols)

    @property
    def period(self) -> int:
        return self.rows * self.cols

    def set(self, index: int, bit: int) -> None:
        if not 0 <= index < self.period:
            raise IndexError(f"position {index} outside period {self.period}")
        old = self.cells[index]
        if old is not None and old != bit:
            raise ValueError(f"conflicting bits at position {index}")
        self.cells[index] = bit

    def get(self, row: int, col: int) -> int | None:
        return self.cells[row * self.cols + col]

    def column(self, col: int) -> list[int | None]:
        return self.cells[col :: self.cols]

    def known_in_column(self, col: int) -> dict[int, int]:
        return {r: b for r, b in enumerate(self.column(col)) if b is not None}

    def known_count(self) -> int:
        return sum(b is not None for b in self.cells)

    def known_rows(self) -> list[int]:
        return [r for r in range(self.rows) if any(self.get(r, c) is not None for c in range(self.cols))]

    def render(self) -> str:
        lines = []
        for r in range(self.rows):
            row = " ".join("-" if b is None else str(b) for b in self.cells[r * self.cols : (r + 1) * self.cols])
            lines.append(f"{r:4d}  {row}")
        return "\n".join(lines)


def build_shrunken_matrix(
    bits: Mapping[int, int] | Iterable[tuple[int, int]], l1: int, l2: int
) -> ShrunkenMatrix:
    """Overlay known ``(position, bit)`` pairs; positions must be below the period."""
    matrix = ShrunkenMatrix(l1, l2)
    items = bits.items() if isinstance(bits, Mapping) else bits
    for pos, bit in items:
        matrix.set(pos, bit)
    return matrix
