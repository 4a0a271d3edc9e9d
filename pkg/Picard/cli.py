"""Command-line front end: picgroup, phi, disc, relations and verify."""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

import pandas as pd

from Picard.binary_forms import BinaryForm, evaluate_discriminant, rational_text
from Picard.config import Config
from Picard.elimination import build_elimination
from Picard.errors import PicardError
from Picard.lattices import AbelianGroup
from Picard.observability import Observability
from Picard.picard_engine import (
    CoverParams,
    divisor_indices,
    divisor_relation_matrix,
    make_params,
    params_from_d,
    picard_group,
    relation_rank,
)
from Picard.reports import ErrorPayload, VerificationReport
from Picard.verification import verify_all, verify_discriminant, verify_elimination, verify_lattice


def _dump(payload) -> str:
    return json.dumps(payload, separators=(",", ":"))


def _bounded_int(low: int):
    def convert(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
        if value < low:
            raise argparse.ArgumentTypeError(f"must be at least {low}, got {value}")
        return value

    convert.__name__ = "positive integer" if low else "non-negative integer"
    return convert


positive = _bounded_int(1)
non_negative = _bounded_int(0)


def _add_shape_flags(parser: argparse.ArgumentParser, r_default: Optional[int] = None, n_required: bool = False):
    parser.add_argument("--r", type=positive, default=r_default, required=r_default is None, help="Cyclic order r")
    parser.add_argument("--g", type=non_negative, help="Genus g (derives d)")
    parser.add_argument("--d", type=positive, help="Degree parameter d (derives g)")
    parser.add_argument("--n", type=non_negative, required=n_required, default=None, help="Number of marked points")
    parser.add_argument("--json", action="store_true", help="Machine-readable output")


def _add_seed_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--trials", type=positive, default=Config.DEFAULT_TRIALS, help="Random trials per check")
    parser.add_argument("--seed", type=non_negative, default=Config.DEFAULT_SEED, help="Seed for numpy's default_rng")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="picard", description="Picard groups of pointed cyclic covers of the line")
    verbs = parser.add_subparsers(dest="verb", required=True)

    picgroup = verbs.add_parser("picgroup", help="Compute Pic for (r, g, n)")
    _add_shape_flags(picgroup, n_required=True)
    picgroup.set_defaults(handler=_picgroup)

    phi = verbs.add_parser("phi", help="Print the eliminated coefficients phi_i, lambda_i, psi_i")
    _add_shape_flags(phi, n_required=True)
    phi.set_defaults(handler=_phi)

    disc = verbs.add_parser("disc", help="Discriminant of a binary form")
    disc.add_argument("--coeffs", type=BinaryForm.parse, required=True, help="Comma list a_0,...,a_m (p/q allowed)")
    disc.add_argument("--symbolic", action="store_true", help="Evaluate the expanded generic discriminant")
    disc.add_argument("--json", action="store_true", help="Machine-readable output")
    disc.set_defaults(handler=_disc)

    relations = verbs.add_parser("relations", help="Divisor relation matrix for (r, n)")
    relations.add_argument("--r", type=positive, required=True, help="Cyclic order r")
    relations.add_argument("--g", type=non_negative, help="Genus g, checked for a non-empty stack")
    relations.add_argument("--n", type=non_negative, required=True, help="Number of marked points")
    relations.add_argument("--json", action="store_true", help="Machine-readable output")
    relations.set_defaults(handler=_relations)

    verify = verbs.add_parser("verify", help="Run a seeded verification suite")
    suites = verify.add_subparsers(dest="suite", required=True)
    elimination = suites.add_parser("elimination", help="Properties of the birational elimination")
    _add_shape_flags(elimination, n_required=True)
    _add_seed_flags(elimination)
    discriminant = suites.add_parser("discriminant", help="Discriminant equivariance and delta weights")
    _add_shape_flags(discriminant, r_default=2)
    _add_seed_flags(discriminant)
    lattice = suites.add_parser("lattice", help="Smith normal form, relation lattice and parameter grid")
    lattice.add_argument("--r", type=positive, help="Restrict to one cyclic order")
    lattice.add_argument("--g", type=non_negative, help="Restrict to one genus")
    lattice.add_argument("--d", type=positive, help="Restrict to one degree parameter")
    lattice.add_argument("--n", type=non_negative, help="Restrict to one number of points")
    lattice.add_argument("--json", action="store_true", help="Machine-readable output")
    _add_seed_flags(lattice)
    everything = suites.add_parser("all", help="Every suite")
    _add_shape_flags(everything, r_default=2)
    _add_seed_flags(everything)
    for suite in (elimination, discriminant, lattice, everything):
        suite.set_defaults(handler=_verify, parser=suite)
    for sub in (picgroup, phi, relations):
        sub.set_defaults(parser=sub)
    disc.set_defaults(parser=disc)
    return parser


def resolve_d(parser: argparse.ArgumentParser, r: Optional[int], g: Optional[int], d: Optional[int]) -> Optional[int]:
    """d from --d or --g; both together must satisfy r(r-1)d = 2g-2+2r."""
    if g is None:
        return d
    if r is None:
        parser.error("--g needs --r")
    numerator = 2 * g - 2 + 2 * r
    if d is not None:
        if r * (r - 1) * d != numerator:
            parser.error(f"--g {g} and --d {d} are inconsistent for r={r}")
        return d
    return make_params(r, g, 0).d


def resolve_params(parser: argparse.ArgumentParser, args) -> CoverParams:
    n = args.n if args.n is not None else 0
    if args.g is not None and args.d is None:
        return make_params(args.r, args.g, n)
    d = resolve_d(parser, args.r, args.g, args.d)
    if d is None:
        parser.error("one of --g or --d is required")
    return params_from_d(args.r, d, n)


def _picgroup(args) -> int:
    result = picard_group(resolve_params(args.parser, args))
    if args.json:
        print(_dump(result.to_payload()))
        return 0
    p = result.params
    print(f"r={p.r} g={p.g} n={p.n} d={p.d}")
    print(f"Pic = {result.group}")
    print(f"far = {result.far_group}")
    print(f"free basis: {', '.join(result.free_basis) or '(none)'}")
    if not result.basis_canonical:
        print("basis canonical: no")
    print(f"torsion origin: {result.torsion_origin.value}")
    return 0


def _phi(args) -> int:
    params = resolve_params(args.parser, args)
    data = build_elimination(params.r, params.d, params.n)
    rows = [
        {
            "i": i,
            "phi": data.phi_of(i).to_text(),
            "lambda": data.lambda_of(i).to_text(),
            "psi": data.psi_of(i).to_text(),
        }
        for i in range(params.n - 3, -1, -1)
    ]
    if args.json:
        print(_dump({"r": params.r, "d": params.d, "n": params.n, "phi": rows}))
        return 0
    for row in rows:
        print(f"phi[{row['i']}]={row['phi']}")
        print(f"lambda[{row['i']}]={row['lambda']}")
        print(f"psi[{row['i']}]={row['psi']}")
    return 0


def _disc(args) -> int:
    form: BinaryForm = args.coeffs
    value = evaluate_discriminant(form, symbolic=args.symbolic)
    if args.json:
        print(_dump({
            "degree": form.degree,
            "coefficients": form.coefficient_texts(),
            "discriminant": rational_text(value),
        }))
        return 0
    print(f"disc = {rational_text(value)}")
    return 0


def _relations(args) -> int:
    if args.g is not None:
        make_params(args.r, args.g, args.n)
    matrix = divisor_relation_matrix(args.r, args.n)
    labels = [idx.label(args.r) for idx in divisor_indices(args.r, args.n)]
    pairs = [f"({i},{j})" for i in range(2, args.n + 1) for j in range(i + 1, args.n + 1)]
    rank, factors = relation_rank(args.r, args.n)
    quotient = AbelianGroup.from_invariants(matrix.cols - rank, factors)
    if args.json:
        print(_dump({
            "r": args.r,
            "n": args.n,
            "columns": labels,
            "rows": matrix.to_list(),
            "rank": rank,
            "quotient": quotient.to_payload(),
        }))
        return 0
    print(f"relations r={args.r} n={args.n}: {matrix.rows} rows, {matrix.cols} columns")
    if matrix.rows:
        table = pd.DataFrame(matrix.to_list(), index=pairs, columns=labels)
        print(table.to_string())
    print(f"rank = {rank}")
    print(f"quotient = {quotient}")
    return 0


def _run_suite(args) -> VerificationReport:
    if args.suite == "lattice":
        d = resolve_d(args.parser, args.r, args.g, args.d)
        return verify_lattice(args.trials, args.seed, r=args.r, d=d, n=args.n)
    d = resolve_d(args.parser, args.r, args.g, args.d)
    if d is None:
        if args.suite == "elimination":
            args.parser.error("one of --g or --d is required")
        d = smallest_d(args.r)
    if args.suite == "elimination":
        return verify_elimination(args.r, d, args.n, args.trials, args.seed)
    if args.suite == "discriminant":
        return verify_discriminant(args.r, d, args.n, args.trials, args.seed)
    return verify_all(args.r, d, args.n, args.trials, args.seed)


def smallest_d(r: int) -> int:
    """Smallest d giving a non-empty stack of genus at least 2."""
    d = 1
    while (r * (r - 1) * d - 2 * r + 2) // 2 < 2:
        d += 1
    return d


def _verify(args) -> int:
    report = _run_suite(args)
    Observability.record_report(report)
    print(report.to_json() if args.json else report.render())
    return 0 if report.passed else 1


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        Config.validate()
    except ValueError as e:
        print(f"Configuration Error: {e}", file=sys.stderr)
        return 2

    parser = build_parser()
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    wants_json = "--json" in argv
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except PicardError as e:
        Observability.log_step("cli_error", {"argv": argv}, {"kind": e.kind, "message": str(e)})
        if wants_json:
            print(ErrorPayload(error=e.kind, message=str(e)).to_json())
        else:
            print(f"error: {e}", file=sys.stderr)
        return 1
