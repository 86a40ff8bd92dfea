"""Command-line front end: ``shrinkca <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .attack import AmbiguousKeyError, AttackError, NoConsistentKeyError, attack_ccsg, attack_shrinking
from .bitio import format_bits, parse_bits, parse_known
from .ca import RuleVector, ca_char_poly
from .gf2 import BinPolynomial
from .keystream import CcsgSpec, ShrinkGenSpec, ccsg_stream, sg_stream
from .lfsr import LfsrSpec, LfsrState, lfsr_stream
from .linearizer import linearize_ccsg, linearize_shrinking, synthesize_ca_pair

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_KEY = 3
EXIT_AMBIGUOUS = 4


def _taps(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(t) for t in text.replace(",", " ").split())


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="ascii") as fh:
        return fh.read()


def _count(n: int) -> int:
    if n < 0:
        raise ValueError("-n must be >= 0")
    return n


def cmd_lfsr(args) -> int:
    spec = LfsrSpec(args.poly)
    print(format_bits(lfsr_stream(spec, LfsrState.parse(args.seed), _count(args.n))))
    return EXIT_OK


def _sg_spec(args) -> ShrinkGenSpec:
    return ShrinkGenSpec.from_text(args.poly1, args.seed1, args.poly2, args.seed2)


def cmd_sg(args) -> int:
    print(format_bits(sg_stream(_sg_spec(args), _count(args.n))))
    return EXIT_OK


def cmd_ccsg(args) -> int:
    spec = CcsgSpec(_sg_spec(args), _taps(args.taps))
    print(format_bits(ccsg_stream(spec, _count(args.n))))
    return EXIT_OK


def cmd_linearize(args) -> int:
    taps = _taps(args.taps)
    if taps or args.poly1:
        if not args.poly1:
            raise ValueError("a CCSG model needs --poly1")
        seed1 = args.seed1 or "1" + "0" * (args.l1 - 1)
        model = linearize_ccsg(args.l1, args.poly2, taps, args.poly1, seed1)
    else:
        model = linearize_shrinking(args.l1, args.poly2)
    sys.stdout.write(model.to_text())
    return EXIT_OK


def cmd_synthesize(args) -> int:
    pair = synthesize_ca_pair(args.poly)
    print(f"{pair.first} / {pair.second}")
    return EXIT_OK


def cmd_charpoly(args) -> int:
    rules = RuleVector.from_hex(args.rules) if args.hex else RuleVector.parse(args.rules)
    print(ca_char_poly(rules))
    return EXIT_OK


def cmd_attack(args) -> int:
    intercepted = parse_bits(_read(args.input))
    extra = parse_known(_read(args.known)) if args.known else []
    c1, c2 = BinPolynomial.parse(args.poly1), BinPolynomial.parse(args.poly2)
    l1, l2 = c1.degree, c2.degree
    taps = _taps(args.taps)
    kwargs = dict(extra_known=extra, max_depth=args.max_depth, residue_mode=args.residue)
    if taps:
        result = attack_ccsg(intercepted, l1, l2, c2, c1, taps, **kwargs)
    else:
        result = attack_shrinking(intercepted, l1, l2, c2, c1, **kwargs)
    key = result.key
    print(f"IS1={key.is1} IS2={key.is2}")
    print(f"nodes={key.nodes_visited}")
    print(f"reconstructed={len(result.reconstructed)}")
    for pos, bit in result.reconstructed:
        print(f"{pos}:{bit}")
    if args.period:
        print(f"keystream={format_bits(result.keystream)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shrinkca", description="Shrinking generators and 90/150 CA models.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lfsr", help="LFSR output bits")
    s.add_argument("--poly", required=True)
    s.add_argument("--seed", required=True, help="stage 0 first")
    s.add_argument("-n", type=int, required=True)
    s.set_defaults(func=cmd_lfsr)

    for name, func in (("sg", cmd_sg), ("ccsg", cmd_ccsg)):
        s = sub.add_parser(name, help=f"{name.upper()} keystream bits")
        s.add_argument("--poly1", required=True)
        s.add_argument("--seed1", required=True)
        s.add_argument("--poly2", required=True)
        s.add_argument("--seed2", required=True)
        s.add_argument("-n", type=int, required=True)
        if name == "ccsg":
            s.add_argument("--taps", default="", help="SR1 stage indices, e.g. 0,2")
        s.set_defaults(func=func)

    s = sub.add_parser("linearize", help="CA model of an SG or CCSG")
    s.add_argument("--l1", type=int, required=True)
    s.add_argument("--poly2", required=True)
    s.add_argument("--taps", default="")
    s.add_argument("--poly1", help="needed for a CCSG")
    s.add_argument("--seed1")
    s.set_defaults(func=cmd_linearize)

    s = sub.add_parser("synthesize", help="90/150 CA pair for an irreducible polynomial")
    s.add_argument("--poly", required=True)
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("charpoly", help="characteristic polynomial of a rule vector")
    s.add_argument("--rules", required=True)
    s.add_argument("--hex", action="store_true", help="rules given in hex")
    s.set_defaults(func=cmd_charpoly)

    s = sub.add_parser("attack", help="recover both initial states from a keystream window")
    s.add_argument("input", help="intercepted bits starting at position 0, or '-' for stdin")
    s.add_argument("--poly1", required=True)
    s.add_argument("--poly2", required=True)
    s.add_argument("--taps", default="")
    s.add_argument("--known", help="extra position:bit file")
    s.add_argument("--max-depth", type=int)
    s.add_argument("--residue", choices=("zero", "any"), default="zero")
    s.add_argument("--period", action="store_true", help="also print one full keystream period")
    s.set_defaults(func=cmd_attack)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoConsistentKeyError as exc:
        print(f"no consistent key: {exc}", file=sys.stderr)
        return EXIT_NO_KEY
    except AmbiguousKeyError as exc:
        print(f"ambiguous: {exc}", file=sys.stderr)
        for is1, is2 in exc.candidates:
            print(f"candidate IS1={is1} IS2={is2 if is2 is not None else '?'}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (OSError, ValueError, AttackError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
