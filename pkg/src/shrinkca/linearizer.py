"""Linear 90/150 CA models of shrinking and clock-controlled shrinking generators.

Synthesis of a CA for an irreducible polynomial ``p`` of degree ``n`` works
in ``K = GF(2)[x]/p``.  A rule vector corresponds to a linear functional
``f -> Tr(beta*f)`` under which the sub-automaton polynomials ``P_0..P_{n-1}``
are orthonormal; its cell-1 sequence ``u_t = Tr(beta*x^t)`` then has a perfect
linear-complexity profile, which forces ``beta^2 + (x^2+x)*beta`` into a
known one-dimensional space.  Solving that GF(2)-linear equation yields at
most four candidates; the Lanczos three-term recurrence turns each good
candidate into a rule vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .ca import RuleVector, ca_char_poly
from .gf2 import BinPolynomial, _clmul, _mulmod, _parity, _pmod, coset_min_poly, is_irreducible, is_primitive
from .keystream import CcsgSpec, ShrinkGenSpec, _xt_int
from .lfsr import LfsrSpec, LfsrState, _step_int

SEARCH_MAX_DEGREE = 20


class SynthesisError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SynthesisPair:
    first: RuleVector
    second: RuleVector
    target: BinPolynomial

    def __iter__(self):
        return iter((self.first, self.second))


@dataclass(frozen=True)
class LinearModel:
    automata: tuple[RuleVector, RuleVector]
    basepoly: BinPolynomial
    exponent: int  # E for the SG, D for a CCSG
    l1: int
    c2: BinPolynomial
    taps: tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.automata[0])

    @property
    def multiplicity(self) -> int:
        return 1 << (self.l1 - 1)

    @property
    def char_poly(self) -> BinPolynomial:
        return self.basepoly ** self.multiplicity

    def to_text(self) -> str:
        lines = [
            f"l1={self.l1}",
            f"c2={self.c2}",
            f"taps={','.join(map(str, self.taps))}",
            f"basepoly={self.basepoly}",
            f"exponent={self.exponent}",
            f"cells={self.length}",
        ]
        for i, rv in enumerate(self.automata, 1):
            lines.append(f"ca{i}={rule_vector_hex(rv) if len(rv) % 4 == 0 else rv}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> LinearModel:
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed model line {line!r}")
            kv[key.strip()] = value.strip()
        cells = int(kv["cells"])

        def rv(s: str) -> RuleVector:
            if len(s) == cells:
                return RuleVector.parse(s)
            return rule_vector_from_hex(s, cells)

        taps = tuple(int(t) for t in kv.get("taps", "").split(",") if t)
        return cls(
            automata=(rv(kv["ca1"]), rv(kv["ca2"])),
            basepoly=BinPolynomial.parse(kv["basepoly"]),
            exponent=int(kv["exponent"]),
            l1=int(kv["l1"]),
            c2=BinPolynomial.parse(kv["c2"]),
            taps=taps,
        )


# ---------- synthesis


def _trace_mask(p: int, n: int) -> int:
    """Bit k is Tr(x^k) in GF(2)[x]/p, for k < n."""
    mask = 0
    for k in range(n):
        t, z = 0, _pmod(1 << k, p)
        for _ in range(n):
            t ^= z
            z = _mulmod(z, z, p)
        mask |= (t & 1) << k  # the trace lies in GF(2)
    return mask


def _solve_gf2(columns: Sequence[int], target: int, n: int) -> list[int]:
    """All x (as n-bit ints) with sum(columns[j] for bit j of x) == target."""
    pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (row value, combination)
    free = []
    for j, col in enumerate(columns):
        v, comb = col, 1 << j
        for bit in sorted(pivots, reverse=True):
            if (v >> bit) & 1:
                pv, pc = pivots[bit]
                v ^= pv
                comb ^= pc
        if v:
            pivots[v.bit_length() - 1] = (v, comb)
        else:
            free.append(comb)
    v, comb = target, 0
    for bit in sorted(pivots, reverse=True):
        if (v >> bit) & 1:
            pv, pc = pivots[bit]
            v ^= pv
            comb ^= pc
    if v:
        return []
    out = []
    for pick in itertools.product((0, 1), repeat=len(free)):
        x = comb
        for use, f in zip(pick, free):
            if use:
                x ^= f
        out.append(x)
    return out


def _lanczos(u: Sequence[int], n: int) -> list[int] | None:
    def form(f: int) -> int:
        return _parity(f & u_mask)

    u_mask = sum(b << t for t, b in enumerate(u))
    prev, cur, rules = 0, 1, []
    for i in range(1, n + 1):
        r = form(_clmul(0b10, _clmul(cur, cur)))
        rules.append(r)
        prev, cur = cur, _clmul(cur, 0b10 | r) ^ prev
        if i < n and form(_clmul(cur, cur)) != 1:
            return None
    return rules


def _synthesize_algebraic(p: BinPolynomial) -> list[RuleVector]:
    n, m = p.degree, p.bits
    trmask = _trace_mask(m, n)

    def tr(y: int) -> int:
        return _parity(y & trmask)

    # w with Tr(x^(2k) * w) = 0 for k = 0..n-2 spans a one-dimensional space
    sq_powers = [_pmod(1 << (2 * k), m) for k in range(n - 1)]
    cols = [sum(tr(_mulmod(s, 1 << j, m)) << k for k, s in enumerate(sq_powers)) for j in range(n)]
    ws = _solve_gf2(cols, 0, n)
    c = _pmod(0b110, m)
    quad_cols = [_mulmod(1 << j, 1 << j, m) ^ _mulmod(c, 1 << j, m) for j in range(n)]
    betas = sorted({b for w in ws for b in _solve_gf2(quad_cols, w, n)})
    found = []
    for beta in betas:
        if beta == 0 or tr(beta) != 1:
            continue
        u, v = [], beta
        for _ in range(2 * n):
            u.append(tr(v))
            v = _mulmod(v, 0b10, m)
        rules = _lanczos(u, n)
        if rules is not None and ca_char_poly(rules) == p:
            found.append(RuleVector(tuple(rules)))
    return found


def synthesize_by_search(p: BinPolynomial) -> list[RuleVector]:
    """Every rule vector with characteristic polynomial ``p``.

    Depth-first over rule prefixes; the last rule is forced by the parity of
    the ``x^(n-1)`` coefficient, which halves the work.  Exponential; meant as
    an oracle for small degrees.
    """
    n = p.degree
    if n is None or n < 1:
        raise ValueError("degree must be >= 1")
    if n > SEARCH_MAX_DEGREE:
        raise ValueError(f"search is capped at degree {SEARCH_MAX_DEGREE}")
    # P_n = (x + R_n) P_{n-1} + P_{n-2} and trace(T) = sum R_i = coefficient of x^(n-1)
    trace_bit = (p.bits >> (n - 1)) & 1
    found: list[RuleVector] = []

    def walk(prefix: list[int], prev: int, cur: int, ones: int) -> None:
        i = len(prefix)
        if i == n:
            if cur == p.bits:
                found.append(RuleVector(tuple(prefix)))
            return
        for r in (0, 1):
            if i == n - 1 and (ones + r) & 1 != trace_bit:
                continue
            prefix.append(r)
            walk(prefix, cur, _clmul(cur, 0b10 | r) ^ prev, ones + r)
            prefix.pop()

    walk([], 0, 1, 0)
    return found


def synthesize_ca_pair(p: BinPolynomial | str) -> SynthesisPair:
    """Two reversal 90/150 rule vectors whose characteristic polynomial is ``p``."""
    p = BinPolynomial.parse(p)
    if p.degree is None or p.degree < 1 or not is_irreducible(p):
        raise ValueError(f"{p} is not irreducible")
    if p.degree == 1:
        rv = RuleVector((p.bits & 1,))
        return SynthesisPair(rv, rv, p)
    found = _synthesize_algebraic(p)
    if not found:
        raise SynthesisError(f"no 90/150 automaton found for {p}")
    # candidates come out in ascending beta order; the partner is the mirror image
    first = found[0]
    second = first.reversed()
    if ca_char_poly(second) != p:
        raise SynthesisError("reversed automaton lost the characteristic polynomial")
    return SynthesisPair(first, second, p)


# ---------- concatenation


def concat_double(rules: RuleVector) -> RuleVector:
    """Complement the rightmost rule, then append the mirror image.

    If ``rules`` has characteristic polynomial ``Q`` the result has ``Q^2``.
    """
    s = rules.rules[:-1] + (1 - rules.rules[-1],)
    return RuleVector(s + s[::-1])


def rule_vector_hex(rules: RuleVector) -> str:
    return rules.to_hex()


def rule_vector_from_hex(text: str, length: int | None = None) -> RuleVector:
    return RuleVector.from_hex(text, length)


# ---------- generator linearization


def _check_generator(l1: int, c2: BinPolynomial) -> None:
    if not is_primitive(c2):
        raise ValueError(f"{c2} is not primitive")
    l2 = c2.degree
    if l1 < 1 or l1 >= l2 or gcd(l1, l2) != 1:
        raise ValueError(f"need gcd(L1, L2) = 1 and 1 <= L1 < L2, got ({l1}, {l2})")


def _build_model(l1: int, c2: BinPolynomial, exponent: int, taps: tuple[int, ...]) -> LinearModel:
    basepoly = coset_min_poly(c2, exponent)
    pair = synthesize_ca_pair(basepoly)
    automata = []
    for rv in pair:
        for _ in range(l1 - 1):
            rv = concat_double(rv)
        automata.append(rv)
    return LinearModel(tuple(automata), basepoly, exponent, l1, c2, taps)


def linearize_shrinking(l1: int, c2: BinPolynomial | str) -> LinearModel:
    """CA pair of length ``L2 * 2^(L1-1)`` generating the shrunken sequence."""
    c2 = BinPolynomial.parse(c2)
    _check_generator(l1, c2)
    return _build_model(l1, c2, (1 << l1) - 1, ())


def ccsg_distance(
    l1: int,
    l2: int,
    taps: Sequence[int],
    c1: BinPolynomial | str | None = None,
    seed1: LfsrState | str | None = None,
) -> int:
    """SR2 advance per SR1 period, reduced mod ``2^L2 - 1``.

    With ``c1``/``seed1`` the clocking amounts are summed over one SR1 period;
    otherwise the closed form ``(2^L1 - 1) + (2^w - 1) 2^(L1-1)`` is used (each
    tapped stage sees one full PN period, i.e. ``2^(L1-1)`` ones).
    """
    taps = tuple(taps)
    t2 = (1 << l2) - 1
    if c1 is None or seed1 is None:
        total = (1 << l1) - 1 + ((1 << len(taps)) - 1) * (1 << (l1 - 1))
        return total % t2
    sr1 = LfsrSpec(c1)
    seed = LfsrState.parse(seed1) if isinstance(seed1, str) else seed1
    if sr1.length != l1 or len(seed) != l1 or seed.is_degenerate:
        raise ValueError("SR1 polynomial/seed do not match L1")
    v, total = seed.to_int(), 0
    for _ in range(sr1.period):
        total += _xt_int(taps, v)
        _, v = _step_int(v, sr1.tap_mask, l1)
    return total % t2


def linearize_ccsg(
    l1: int,
    c2: BinPolynomial | str,
    taps: Sequence[int],
    c1: BinPolynomial | str | None = None,
    seed1: LfsrState | str | None = None,
) -> LinearModel:
    """CA pair for a CCSG; the columns are SR2's sequence decimated by ``D``."""
    c2 = BinPolynomial.parse(c2)
    _check_generator(l1, c2)
    taps = tuple(int(t) for t in taps)
    # validate taps the same way the generator does
    if len(set(taps)) != len(taps) or any(not 0 <= t < l1 for t in taps) or len(taps) > max(l1 - 1, 0):
        raise ValueError(f"invalid tap list {taps} for L1 = {l1}")
    d = ccsg_distance(l1, c2.degree, taps, c1, seed1)
    if d == 0:
        raise ValueError("degenerate CCSG: decimation distance is 0 mod 2^L2 - 1")
    return _build_model(l1, c2, d, taps)


def linearize(spec: ShrinkGenSpec | CcsgSpec) -> LinearModel:
    if isinstance(spec, ShrinkGenSpec):
        return linearize_shrinking(spec.l1, spec.sr2.charpoly)
    base = spec.base
    return linearize_ccsg(base.l1, base.sr2.charpoly, spec.taps, base.sr1.charpoly, base.seed1)
