"""Arithmetic over GF(2)[x] and GF(2^m).

Polynomials are packed into Python ints: bit ``i`` is the coefficient of
``x^i``.  :class:`BinPolynomial` wraps that int with parsing/printing and the
usual operators; the module-level ``_``-prefixed helpers work on raw ints and
are what the hot loops elsewhere in the package use.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

MAX_PRIMITIVE_DEGREE = 32
EAGER_TABLE_DEGREE = 20

_TERM_RE = re.compile(r"^(?:1|x(?:\^(\d+))?)$")


# ---------- raw int arithmetic


def _clmul(a: int, b: int) -> int:
    """Carry-less product of two packed polynomials."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pdivmod(a: int, m: int) -> tuple[int, int]:
    if m == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    dm = m.bit_length()
    q = 0
    while a.bit_length() >= dm:
        shift = a.bit_length() - dm
        q |= 1 << shift
        a ^= m << shift
    return q, a


def _pmod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def _mulmod(a: int, b: int, m: int) -> int:
    return _pmod(_clmul(a, b), m)


def _powmod(a: int, e: int, m: int) -> int:
    r = _pmod(1, m)
    a = _pmod(a, m)
    while e:
        if e & 1:
            r = _mulmod(r, a, m)
        a = _mulmod(a, a, m)
        e >>= 1
    return r


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _parity(v: int) -> int:
    return v.bit_count() & 1


# ---------- polynomial type


@dataclass(frozen=True)
class BinPolynomial:
    """A polynomial over GF(2), stored as a coefficient bitmask."""

    bits: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.bits, int) or self.bits < 0:
            raise ValueError(f"invalid coefficient mask {self.bits!r}")

    # construction

    @classmethod
    def parse(cls, text: str | BinPolynomial) -> BinPolynomial:
        """Parse ``"1+x^2+x^3"`` style text or an ascending bit string ``"1011"``.

        Terms may appear in any order; repeated terms cancel.
        """
        if isinstance(text, BinPolynomial):
            return text
        s = "".join(text.split())
        if not s:
            raise ValueError("empty polynomial text")
        if set(s) <= {"0", "1"}:
            return cls.from_coefficients(int(c) for c in s)
        bits = 0
        for term in s.split("+"):
            m = _TERM_RE.match(term)
            if m is None:
                raise ValueError(f"bad polynomial term {term!r} in {text!r}")
            if term == "1":
                e = 0
            elif m.group(1) is None:
                e = 1
            else:
                e = int(m.group(1))
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[int]) -> BinPolynomial:
        bits = 0
        for i, c in enumerate(coefficients):
            if c not in (0, 1):
                raise ValueError(f"coefficient {c!r} is not a bit")
            bits |= c << i
        return cls(bits)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> BinPolynomial:
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits)

    @classmethod
    def x(cls) -> BinPolynomial:
        return cls(0b10)

    @classmethod
    def one(cls) -> BinPolynomial:
        return cls(1)

    # inspection

    @property
    def degree(self) -> int | None:
        """Degree, or ``None`` for the zero polynomial."""
        return self.bits.bit_length() - 1 if self.bits else None

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(max(self.bits.bit_length(), 1)))

    def exponents(self) -> list[int]:
        return [i for i in range(self.bits.bit_length()) if (self.bits >> i) & 1]

    def __getitem__(self, i: int) -> int:
        return (self.bits >> i) & 1

    def weight(self) -> int:
        return self.bits.bit_count()

    # arithmetic

    def __add__(self, other: BinPolynomial) -> BinPolynomial:
        return BinPolynomial(self.bits ^ _as_bits(other))

    __sub__ = __add__
    __xor__ = __add__

    def __mul__(self, other: BinPolynomial) -> BinPolynomial:
        return BinPolynomial(_clmul(self.bits, _as_bits(other)))

    def __divmod__(self, other: BinPolynomial) -> tuple[BinPolynomial, BinPolynomial]:
        q, r = _pdivmod(self.bits, _as_bits(other))
        return BinPolynomial(q), BinPolynomial(r)

    def __floordiv__(self, other: BinPolynomial) -> BinPolynomial:
        return divmod(self, other)[0]

    def __mod__(self, other: BinPolynomial) -> BinPolynomial:
        return BinPolynomial(_pmod(self.bits, _as_bits(other)))

    def __pow__(self, e: int) -> BinPolynomial:
        if e < 0:
            raise ValueError("negative exponent")
        r, a = 1, self.bits
        while e:
            if e & 1:
                r = _clmul(r, a)
            a = _clmul(a, a)
            e >>= 1
        return BinPolynomial(r)

    def gcd(self, other: BinPolynomial) -> BinPolynomial:
        return BinPolynomial(_pgcd(self.bits, _as_bits(other)))

    def reciprocal(self) -> BinPolynomial:
        """``x^deg * p(1/x)``."""
        if not self.bits:
            return self
        return BinPolynomial(int(format(self.bits, "b")[::-1], 2))

    # printing

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return "+".join(terms)

    def __repr__(self) -> str:
        return f"BinPolynomial({self})"

    def to_bitstring(self) -> str:
        return "".join(map(str, self.coefficients))


def _as_bits(p: BinPolynomial | int) -> int:
    return p.bits if isinstance(p, BinPolynomial) else p


def poly_mul(a: BinPolynomial, b: BinPolynomial) -> BinPolynomial:
    return a * b


# ---------- irreducibility and primitivity


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    from sympy import factorint

    return tuple(sorted(factorint(n)))


def is_irreducible(p: BinPolynomial) -> bool:
    """Rabin's test."""
    m = p.degree
    if m is None or m < 1:
        raise ValueError("irreducibility is defined for degree >= 1")
    if m == 1:
        return True
    if not p.bits & 1:
        return False
    x = 0b10
    if _powmod(x, 1 << m, p.bits) != x:
        return False
    for q in _prime_factors(m):
        h = _powmod(x, 1 << (m // q), p.bits) ^ x
        if _pgcd(p.bits, h) != 1:
            return False
    return True


def is_primitive(p: BinPolynomial, max_degree: int = MAX_PRIMITIVE_DEGREE) -> bool:
    """True iff ``p`` is irreducible and ``x`` has order ``2^deg - 1`` mod ``p``."""
    m = p.degree
    if m is None or m < 1:
        raise ValueError("primitivity is defined for degree >= 1")
    if m > max_degree:
        raise ValueError(f"degree {m} exceeds the primitivity cap {max_degree}")
    if not p.bits & 1:
        return False
    if m == 1:
        return True
    if not is_irreducible(p):
        return False
    order = (1 << m) - 1
    return all(_powmod(0b10, order // f, p.bits) != 1 for f in _prime_factors(order))


def primitive_polynomials(degree: int) -> list[BinPolynomial]:
    """All primitive polynomials of the given degree, by increasing bitmask."""
    lo = 1 << degree
    return [BinPolynomial(b) for b in range(lo | 1, lo << 1, 2) if is_primitive(BinPolynomial(b))]


# ---------- extension field


@dataclass(frozen=True)
class FieldElement:
    """``alpha^exponent``, or the zero element when ``exponent`` is None."""

    exponent: int | None

    @classmethod
    def zero(cls) -> FieldElement:
        return cls(None)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def __str__(self) -> str:
        return "0" if self.exponent is None else f"a^{self.exponent}"


class FieldContext:
    """GF(2^m) built on a primitive modulus, with log/antilog/Zech tables.

    Elements are packed polynomials in ``alpha`` (the class of ``x``).  For
    ``m <= EAGER_TABLE_DEGREE`` the tables are filled at construction; above
    that, logarithms come from baby-step giant-step and are memoised.
    """

    def __init__(self, modulus: BinPolynomial, eager: bool | None = None):
        modulus = BinPolynomial.parse(modulus)
        if not is_primitive(modulus):
            raise ValueError(f"{modulus} is not primitive")
        self.modulus = modulus
        self.degree = modulus.degree
        self.order = (1 << self.degree) - 1
        self.eager = self.degree <= EAGER_TABLE_DEGREE if eager is None else eager
        self._m = modulus.bits
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._zech: list[int | None] | None = None
        self._log_cache: dict[int, int] = {}
        self._baby: dict[int, int] | None = None
        if self.eager:
            self._build_tables()

    def _build_tables(self) -> None:
        n, m, top = self.order, self._m, 1 << self.degree
        exp = [0] * n
        log = [-1] * top
        v = 1
        for k in range(n):
            exp[k] = v
            log[v] = k
            v <<= 1
            if v & top:
                v ^= m
        zech: list[int | None] = [None] * n
        for k in range(1, n):
            zech[k] = log[exp[k] ^ 1]
        self._exp, self._log, self._zech = exp, log, zech

    def exp(self, k: int) -> int:
        """Polynomial representation of ``alpha^k``."""
        k %= self.order
        if self._exp is not None:
            return self._exp[k]
        return _powmod(0b10, k, self._m)

    def log(self, element: int) -> int:
        """Discrete logarithm base ``alpha`` of a nonzero element."""
        element = _pmod(element, self._m)
        if element == 0:
            raise ValueError("log of zero")
        if self._log is not None:
            return self._log[element]
        if element not in self._log_cache:
            self._log_cache[element] = self._bsgs(element)
        return self._log_cache[element]

    def _bsgs(self, element: int) -> int:
        n = self.order
        step = 1 << ((self.degree + 1) // 2)
        if self._baby is None:
            baby, v = {}, 1
            for j in range(step):
                baby.setdefault(v, j)
                v = _mulmod(v, 0b10, self._m)
            self._baby = baby
        giant = _powmod(0b10, n - step, self._m)  # alpha^-step
        g = element
        for i in range((n + step - 1) // step + 1):
            j = self._baby.get(g)
            if j is not None:
                return (i * step + j) % n
            g = _mulmod(g, giant, self._m)
        raise ArithmeticError("logarithm not found; modulus is not primitive")

    def zech(self, n: int) -> int | None:
        """``z`` with ``1 + alpha^n = alpha^z``; ``None`` when ``n = 0 mod order``."""
        n %= self.order
        if n == 0:
            return None
        if self._zech is not None:
            return self._zech[n]
        return self.log(self.exp(n) ^ 1)

    def zech_table(self) -> dict[int, int]:
        return {n: self.zech(n) for n in range(1, self.order)}

    def mul(self, a: int, b: int) -> int:
        return _mulmod(a, b, self._m)

    def trace(self, element: int) -> int:
        t, z = 0, _pmod(element, self._m)
        for _ in range(self.degree):
            t ^= z
            z = _mulmod(z, z, self._m)
        return t

    def __repr__(self) -> str:
        return f"FieldContext({self.modulus})"


def build_field_context(modulus: BinPolynomial | str) -> FieldContext:
    return FieldContext(BinPolynomial.parse(modulus))


def collapse_power_sum(ctx: FieldContext, exponents: Iterable[int]) -> FieldElement:
    """Fold ``sum(alpha^k)`` into a single power via Zech logarithms.

    Equal exponents cancel in pairs before folding; a sum that vanishes yields
    the zero element.
    """
    counts = Counter(k % ctx.order for k in exponents)
    acc: int | None = None
    for k in sorted(e for e, c in counts.items() if c & 1):
        if acc is None:
            acc = k
            continue
        z = ctx.zech(k - acc)
        acc = None if z is None else (acc + z) % ctx.order
    return FieldElement(acc)


def coset_min_poly(c2: BinPolynomial, e: int) -> BinPolynomial:
    """Minimal polynomial of ``lambda^e``, ``lambda`` a root of primitive ``c2``."""
    c2 = BinPolynomial.parse(c2)
    if not is_primitive(c2):
        raise ValueError(f"{c2} is not primitive")
    if e < 1:
        raise ValueError("coset representative must be >= 1")
    n = (1 << c2.degree) - 1
    coset, k = [], e % n
    while k not in coset:
        coset.append(k)
        k = (2 * k) % n
    # coefficients live in GF(2)[x]/c2 until the end
    coeffs = [1]
    for k in coset:
        root = _powmod(0b10, k, c2.bits)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] ^= c
            nxt[i] ^= _mulmod(c, root, c2.bits)
        coeffs = nxt
    if any(c not in (0, 1) for c in coeffs):
        raise ArithmeticError("conjugate product left GF(2)")
    return BinPolynomial.from_coefficients(coeffs)


def berlekamp_massey(seq: Sequence[int]) -> tuple[int, BinPolynomial]:
    """Linear complexity and characteristic polynomial of ``seq``.

    The returned polynomial ``c`` satisfies
    ``s[t+L] = sum(c_i * s[t+i] for i < L)`` over the whole input.
    """
    c, b, lc, shift = 1, 1, 0, 1
    window = 0  # bit j holds s[n-j]
    for n, bit in enumerate(seq):
        window = (window << 1) | (bit & 1)
        if _parity(c & window):
            t = c
            c ^= b << shift
            if 2 * lc <= n:
                lc, b, shift = n + 1 - lc, t, 1
            else:
                shift += 1
        else:
            shift += 1
    poly = 0
    for j in range(lc + 1):
        if (c >> j) & 1:
            poly |= 1 << (lc - j)
    return lc, BinPolynomial(poly)
