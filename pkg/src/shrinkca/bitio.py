"""Text formats for bit sequences and partial (position:bit) keystream files."""

from __future__ import annotations

from typing import Iterable


def parse_bits(text: str) -> list[int]:
    """ASCII '0'/'1' with all whitespace ignored."""
    s = "".join(text.split())
    bad = set(s) - {"0", "1"}
    if bad:
        raise ValueError(f"unexpected characters in bit string: {''.join(sorted(bad))!r}")
    return [int(c) for c in s]


def format_bits(bits: Iterable[int]) -> str:
    return "".join("1" if b else "0" for b in bits)


def parse_known(text: str) -> list[tuple[int, int]]:
    """``position:bit`` lines; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        pos, sep, bit = line.partition(":")
        try:
            if not sep:
                raise ValueError
            p, b = int(pos), int(bit)
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'position:bit', got {line!r}") from None
        if p < 0 or b not in (0, 1):
            raise ValueError(f"line {lineno}: bad entry {line!r}")
        out.append((p, b))
    return out


def format_known(pairs: Iterable[tuple[int, int]]) -> str:
    return "".join(f"{p}:{b}\n" for p, b in pairs)


def looks_like_known(text: str) -> bool:
    return ":" in text
