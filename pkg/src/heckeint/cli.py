"""Command line interface.

Exit codes: 0 success, 1 invalid configuration or input, 2 verification
failure, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import acceptance
from .corpus import SUPPORTED_K, delta, eisenstein, theta_e8
from .cosets import tj_cosets, v_cosets
from .exact import CapExceeded
from .fourier import HalfIntMat, QExpParseError, enumerate_indices, parse_qexp, write_qexp
from .hecke import apply_T, apply_Tj, gauss_brute, gauss_closed, needed_indices
from .hilbert import (
    HilbertParseError,
    QuadField,
    commute_check,
    format_map,
    hecke_prime,
    parse_map,
    random_map,
)
from .integrality import certify_basis, count_E, scan_Fb, scan_weight_exponent

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").replace(";", " ").split()]
    except ValueError:
        raise UsageError(f"expected integers, got {text!r}") from None


def _square(text: str) -> tuple:
    vals = _ints(text)
    n = int(round(len(vals) ** 0.5))
    if n * n != len(vals) or n == 0:
        raise UsageError(f"{text!r} is not a square matrix")
    return tuple(tuple(vals[i * n : (i + 1) * n]) for i in range(n))


def _gram(text: str) -> tuple:
    """Upper-triangular entries g11 g12 .. gnn of G = 2T."""
    vals = _ints(text)
    n = 0
    while n * (n + 1) // 2 < len(vals):
        n += 1
    if n * (n + 1) // 2 != len(vals):
        raise UsageError(f"{text!r} is not an upper triangle")
    g = [[0] * n for _ in range(n)]
    it = iter(vals)
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = next(it)
    return tuple(tuple(r) for r in g)


def _write(text: str, output: str | None, append: bool = False) -> None:
    if output:
        with open(output, "a" if append else "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_mat(m) -> str:
    return "[" + ";".join(",".join(str(x) for x in r) for r in m) + "]"


# ---------------------------------------------------------------------------


def cmd_cosets(args) -> int:
    if args.tj is not None:
        reps = tj_cosets(args.n, args.tj, args.p, args.N, args.seed)
        head = f"# T_{args.tj} n={args.n} p={args.p} N={args.N} count={len(reps)}"
    else:
        reps = v_cosets(args.n, args.p, args.d, args.N, args.seed)
        head = f"# V n={args.n} p={args.p} delta={args.d} N={args.N} count={len(reps)}"
    lines = [head]
    rows = sorted((r.invariant(), r) for r in reps) if args.invariants else [(None, r) for r in reps]
    for inv, r in rows:
        if args.invariants:
            lines.append(_fmt_mat(inv))
        else:
            alpha = ",".join(str(a) for a in r.alpha)
            lines.append(f"alpha={alpha} D={_fmt_mat(r.D)} B={_fmt_mat(r.B)} g={_fmt_mat(r.assembled)}")
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_gauss(args) -> int:
    g = _gram(args.S)
    D = _square(args.D)
    if len(g) != len(D):
        raise UsageError("S and D must have the same size")
    c = gauss_closed(g, D)
    out = [f"value: {c.value}", "divisors: " + " ".join(str(x) for x in c.snf_divisors)]
    if args.brute:
        b = gauss_brute(g, D)
        out.append(f"brute: {b.value}")
        if b.value != c.value:
            _write("\n".join(out) + "\n", None)
            raise VerificationFailure("closed form and brute force disagree")
    _write("\n".join(out) + "\n", None)
    return EXIT_OK


def _read_qexp(path: str):
    try:
        return parse_qexp(Path(path).read_text())
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _operator(args):
    if args.op == "T":
        return lambda f: apply_T(f, args.p, args.delta, args.theta, args.seed)
    if args.j is None:
        raise UsageError("--op Tj needs -j")
    return lambda f: apply_Tj(f, args.j, args.p, args.theta, args.seed)


def cmd_apply(args) -> int:
    f = _read_qexp(args.input)
    g = _operator(args)(f)
    _write(write_qexp(g), args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.basis:
        basis = [_read_qexp(p) for p in args.basis]
        name = ",".join(Path(p).name for p in args.basis)
    elif args.fixture == "e12-delta":
        theta = max(args.theta * args.p**2, 12)
        basis = [eisenstein(12, theta), delta(theta)]
        name = "e12-delta"
    else:
        targets = enumerate_indices(2, args.theta)
        need = set(targets) | needed_indices(targets, args.p, args.delta, args.j if args.op == "Tj" else None,
                                             1, "class")
        basis = [theta_e8(2, sorted(need))]
        name = "theta-e8-2"
    op = _operator(args)
    opname = f"T({args.p}^{args.delta})" if args.op == "T" else f"T_{args.j}({args.p}^2)"
    cert = certify_basis(basis, op, params=(("basis", name), ("operator", opname)))
    _write(cert.render(), args.output, append=True)
    return EXIT_OK if cert.verdict else EXIT_VERIFY


def cmd_bounds(args) -> int:
    lines = []
    ok = True
    if args.what in ("fb", "all"):
        r = scan_Fb(args.max_n, args.max_kn)
        lines.append(f"F_b: checked {r.checked} violations {len(r.violations)}")
        lines += [f"  {v}" for v in r.violations]
        ok &= r.ok
    if args.what in ("weight", "all"):
        r = scan_weight_exponent(args.max_n, args.max_kn)
        lines.append(f"weight exponent: checked {r.checked} violations {len(r.violations)}")
        lines += [f"  {v}" for v in r.violations]
        ok &= r.ok
    if args.what in ("count", "all"):
        c, b = count_E(args.M, args.degree)
        lines.append(f"#E({args.M},{args.degree}) = {c} bound {b}")
        ok &= c <= b
    _write("\n".join(lines) + "\n", None)
    if not ok:
        raise VerificationFailure("bound violated")
    return EXIT_OK


def _ideal(F: QuadField, text: str):
    vals = _ints(text)
    if len(vals) == 1:
        vals += [0, 1]
    if len(vals) != 3:
        raise UsageError("ideals are given as 'a b c' (HNF [a, b + c w])")
    return F.ideal(*vals)


def cmd_hilbert(args) -> int:
    if args.action == "primes":
        F = QuadField(args.field)
        lines = [f"{P.a} {P.b} {P.c} norm={P.norm}" for P in F.primes_above(args.rational_prime)]
        _write("\n".join(lines) + "\n", args.output)
        return EXIT_OK
    if args.action == "apply":
        if not args.input:
            raise UsageError("hilbert apply needs --input")
        try:
            C = parse_map(Path(args.input).read_text())
        except OSError as exc:
            raise UsageError(str(exc)) from None
        F = C.field
        P = _ideal(F, args.prime)
        support = F.ideals_up_to(args.support_norm) if args.support_norm else None
        _write(format_map(hecke_prime(C, P, support)), args.output)
        return EXIT_OK
    # commute
    F = QuadField(args.field)
    if not args.prime or not args.other:
        raise UsageError("hilbert commute needs --prime and --other")
    P, Q = _ideal(F, args.prime), _ideal(F, args.other)
    support = F.ideals_up_to(args.support_norm or 100)
    C = random_map(F, P.norm * Q.norm * max(I.norm for I in support), args.k0, random.Random(args.seed or 0))
    ok = commute_check(C, P, Q, support)
    _write(f"commute: {'yes' if ok else 'no'} ({len(support)} ideals)\n", args.output)
    if not ok:
        raise VerificationFailure("operators do not commute")
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.form == "delta":
        f = delta(args.theta)
    elif args.form == "theta-e8":
        f = theta_e8(args.degree, enumerate_indices(args.degree, args.theta))
    else:
        k = int(args.form[1:])
        if k not in SUPPORTED_K:
            raise UsageError(f"unsupported weight {k}")
        f = eisenstein(k, args.theta)
    _write(write_qexp(f), args.output)
    return EXIT_OK


def cmd_verify_all(args) -> int:
    results = acceptance.run_all(fast=args.fast)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    return EXIT_OK if not failed else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heckeint", description="Hecke operators on Siegel modular forms and integrality checks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cosets", help="coset representatives of V_N(p^delta) or T_j")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-d", type=int, default=1, help="delta")
    p.add_argument("-N", type=int, default=1, help="level")
    p.add_argument("--tj", type=int, help="list T_{j,n-j}(p^2) representatives instead")
    p.add_argument("--invariants", action="store_true", help="print only the sorted HNF invariants")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cosets)

    p = sub.add_parser("gauss", help="Gauss sum G(S, D)")
    p.add_argument("--S", required=True, help="upper triangle of G = 2S, e.g. '2 1 2'")
    p.add_argument("--D", required=True, help="D row by row, e.g. '2 0 0 4'")
    p.add_argument("--brute", action="store_true", help="also evaluate by brute force and compare")
    p.set_defaults(func=cmd_gauss)

    def op_args(p, theta_default):
        p.add_argument("--op", choices=("T", "Tj"), default="T")
        p.add_argument("-p", type=int, default=2)
        p.add_argument("--delta", type=int, default=1)
        p.add_argument("-j", type=int)
        p.add_argument("--theta", type=int, default=theta_default, help="output trace bound")
        p.add_argument("--seed", type=int)
        p.add_argument("-o", "--output")

    p = sub.add_parser("apply", help="apply a Hecke operator to a QEXP file")
    p.add_argument("-i", "--input", required=True)
    op_args(p, 1)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("certify", help="integrality certificate for a Hecke-stable basis")
    p.add_argument("--fixture", choices=("e12-delta", "theta-e8"), default="e12-delta")
    p.add_argument("--basis", nargs="+", help="QEXP files forming the basis (overrides --fixture)")
    op_args(p, 3)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bounds", help="inequality scans and #E(M, d)")
    p.add_argument("what", choices=("fb", "weight", "count", "all"), nargs="?", default="all")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--max-kn", type=int, default=12)
    p.add_argument("-M", type=int, default=1)
    p.add_argument("--degree", type=int, default=2)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("hilbert", help="Hecke recursion on ideal-indexed coefficients")
    p.add_argument("action", choices=("apply", "commute", "primes"))
    p.add_argument("--field", type=int, default=5, help="squarefree d; 1 means Q")
    p.add_argument("-i", "--input")
    p.add_argument("--prime", help="prime ideal 'a b c'")
    p.add_argument("--other", help="second prime ideal for commute")
    p.add_argument("--rational-prime", type=int, default=2)
    p.add_argument("--support-norm", type=int)
    p.add_argument("--k0", type=int, default=2)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("corpus", help="write an oracle q-expansion as QEXP")
    p.add_argument("form", choices=tuple(f"e{k}" for k in SUPPORTED_K) + ("delta", "theta-e8"))
    p.add_argument("--degree", type=int, default=1, choices=(1, 2))
    p.add_argument("--theta", type=int, default=10)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (UsageError, QExpParseError, HilbertParseError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
