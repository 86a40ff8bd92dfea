"""Fibonacci LFSRs with stage 0 as the output stage, and fixed-step decimation.

Feedback convention: with characteristic polynomial ``c(x) = sum c_i x^i`` of
degree ``L``, the register produces ``s[t+L] = sum(s[t+i] for i < L if c_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .gf2 import BinPolynomial, is_primitive


@dataclass(frozen=True)
class LfsrSpec:
    charpoly: BinPolynomial
    allow_nonprimitive: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "charpoly", BinPolynomial.parse(self.charpoly))
        deg = self.charpoly.degree
        if deg is None or deg < 1:
            raise ValueError("LFSR characteristic polynomial needs degree >= 1")
        if not self.allow_nonprimitive and not is_primitive(self.charpoly):
            raise ValueError(f"{self.charpoly} is not primitive")

    @property
    def length(self) -> int:
        return self.charpoly.degree

    @property
    def tap_mask(self) -> int:
        return self.charpoly.bits & ((1 << self.length) - 1)

    @property
    def period(self) -> int:
        """Least period of a nonzero-seeded stream (primitive case only)."""
        if self.allow_nonprimitive and not is_primitive(self.charpoly):
            raise ValueError("period is only guaranteed for primitive polynomials")
        return (1 << self.length) - 1


@dataclass(frozen=True)
class LfsrState:
    """Stage contents, stage 0 first (the next bit to be output)."""

    stages: tuple[int, ...]

    def __post_init__(self) -> None:
        stages = tuple(int(b) for b in self.stages)
        if not stages or any(b not in (0, 1) for b in stages):
            raise ValueError(f"invalid LFSR stages {self.stages!r}")
        object.__setattr__(self, "stages", stages)

    @classmethod
    def parse(cls, text: str) -> LfsrState:
        return cls(tuple(int(c) for c in "".join(text.split())))

    @classmethod
    def from_int(cls, value: int, length: int) -> LfsrState:
        return cls(tuple((value >> i) & 1 for i in range(length)))

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.stages))

    @property
    def is_degenerate(self) -> bool:
        return not any(self.stages)

    def __len__(self) -> int:
        return len(self.stages)

    def __str__(self) -> str:
        return "".join(map(str, self.stages))


def _check(spec: LfsrSpec, state: LfsrState) -> None:
    if len(state) != spec.length:
        raise ValueError(f"state has {len(state)} stages, register has {spec.length}")


def _step_int(value: int, taps: int, length: int) -> tuple[int, int]:
    out = value & 1
    fb = (value & taps).bit_count() & 1
    return out, (value >> 1) | (fb << (length - 1))


def lfsr_next(spec: LfsrSpec, state: LfsrState) -> tuple[int, LfsrState]:
    _check(spec, state)
    out, nxt = _step_int(state.to_int(), spec.tap_mask, spec.length)
    return out, LfsrState.from_int(nxt, spec.length)


def lfsr_iter(spec: LfsrSpec, state: LfsrState) -> Iterator[int]:
    """Endless output stream."""
    _check(spec, state)
    value, taps, length = state.to_int(), spec.tap_mask, spec.length
    while True:
        out, value = _step_int(value, taps, length)
        yield out


def lfsr_stream(spec: LfsrSpec, state: LfsrState, n: int) -> list[int]:
    if n < 0:
        raise ValueError("n must be >= 0")
    _check(spec, state)
    value, taps, length = state.to_int(), spec.tap_mask, spec.length
    out = [0] * n
    for i in range(n):
        out[i], value = _step_int(value, taps, length)
    return out


def lfsr_advance(spec: LfsrSpec, state: LfsrState, steps: int) -> LfsrState:
    _check(spec, state)
    value, taps, length = state.to_int(), spec.tap_mask, spec.length
    for _ in range(steps):
        _, value = _step_int(value, taps, length)
    return LfsrState.from_int(value, length)


def decimate_fixed(
    seq: Sequence[int],
    start: int,
    step: int,
    n: int | None = None,
    periodic: bool = False,
) -> list[int]:
    """``out[j] = seq[start + j*step]``.

    With ``periodic=True`` indices wrap modulo ``len(seq)`` and ``n`` defaults
    to one period; otherwise ``n`` defaults to every index that fits.
    """
    if step < 1:
        raise ValueError("step must be >= 1")
    size = len(seq)
    if periodic:
        if size == 0:
            raise ValueError("empty periodic sequence")
        count = size if n is None else n
        return [seq[(start + j * step) % size] for j in range(count)]
    if not 0 <= start < size:
        if n == 0 or (n is None and start == size):
            return []
        raise IndexError(f"start {start} outside sequence of length {size}")
    count = (size - 1 - start) // step + 1 if n is None else n
    last = start + (count - 1) * step
    if count and last >= size:
        raise IndexError(f"decimation needs index {last}, sequence has {size}")
    return [seq[start + j * step] for j in range(count)]
