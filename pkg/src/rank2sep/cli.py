"""Command-line interface: ``rank2sep <command> [options]``.

Exit codes: 0 separable / success, 1 entangled (or PPT violated, or a selftest
failure), 2 on any input or usage error.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .concurrence import generalized_concurrence, invariant
from .errors import Rank2SepError
from .formats import (
    Report,
    default_provenance,
    input_hash,
    parse_state_file,
    serialize_state_file,
    state_file_from,
)
from .harness import SEED_ENV, default_seed, run_selftest
from .linalg import RANK_TOL, schmidt_decompose
from .oracles import PPT_TOL, PRNG_ALGORITHM, Ensemble, grade_agreement, ppt_test, random_product_mixture, random_rank2
from .separability import DEFAULT_TOL, check, check_rank2

EXIT_OK = 0
EXIT_ENTANGLED = 1
EXIT_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _global_flags(suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--tol", type=float, default=default(DEFAULT_TOL),
                        help="classification tolerance (default %(default)s)" if not suppress else None)
    parent.add_argument("--format", choices=("text", "machine-readable"), default=default("text"))
    parent.add_argument("--quiet", action="store_true", default=default(False))
    return parent


def build_parser():
    parser = _Parser(prog="rank2sep", description=__doc__.splitlines()[0], parents=[_global_flags(False)])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = [_global_flags(True)]

    for name, text in (("check", "verdict and full report"), ("decompose", "verdict and explicit product decomposition")):
        p = sub.add_parser(name, help=text, parents=shared)
        p.add_argument("file", help="state file, or - for standard input")
    p = sub.add_parser("concurrence", help="C_N and the invariants I_alpha of a pure state", parents=shared)
    p.add_argument("file")
    p = sub.add_parser("ppt", help="partial-transpose test alone", parents=shared)
    p.add_argument("file")

    p = sub.add_parser("generate", help="emit a seeded state file", parents=shared)
    p.add_argument("--kind", choices=("product-mixture", "generic", "corollary"), required=True)
    p.add_argument("--n", type=int, required=True, dest="n")
    p.add_argument("--p", type=float, required=True, dest="p")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", "-o", default="-")

    p = sub.add_parser("selftest", help="run the seeded property harness", parents=shared)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help=f"base seed (default ${SEED_ENV} or built-in)")
    return parser


def _read(path):
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _emit(args, text=None, data=None):
    if args.format == "machine-readable":
        print(json.dumps(data, indent=1, sort_keys=True))
    elif not args.quiet:
        print(text)


def _verdict_for(sf, tol):
    if sf.kind == "density_matrix":
        return check(sf.rho, sf.N, tol)
    if sf.kind == "eigen_pair":
        return check_rank2(sf.rank2_state(), tol)
    return check(sf.pure_state().density(), sf.N, tol)


def _cmd_check(args, show_decomposition):
    raw = _read(args.file)
    sf = parse_state_file(raw)
    verdict = _verdict_for(sf, args.tol)
    rho = sf.density()
    holds, lam_min = ppt_test(rho, sf.N, PPT_TOL)
    oracle = {"ppt_holds": bool(holds), "min_pt_eigenvalue": lam_min, "reconstruction_error": None}
    if verdict.separable:
        oracle["reconstruction_error"] = float(np.linalg.norm(rho - verdict.decomposition.density()))
    oracle["agreement"] = grade_agreement(verdict.separable, holds, sf.N).value
    report = Report.from_verdict(
        verdict,
        oracle=oracle,
        tolerances={"tol": args.tol, "rank_tol": RANK_TOL, "ppt_tol": PPT_TOL},
        input_sha256=input_hash(raw),
        provenance=default_provenance(sf.provenance),
    )
    if args.format == "machine-readable":
        print(report.to_json())
    elif args.quiet:
        print(report.headline)
    elif show_decomposition:
        print(report.to_decomposition_text())
    else:
        print(report.to_text())
    return EXIT_OK if verdict.separable else EXIT_ENTANGLED


def _cmd_concurrence(args):
    raw = _read(args.file)
    sf = parse_state_file(raw)
    if sf.kind != "pure_state":
        raise Rank2SepError(f"concurrence needs a pure_state file, got {sf.kind}")
    psi = sf.pure_state()
    c = generalized_concurrence(psi)
    invariants = [invariant(psi, a) for a in range(psi.N)]
    lam = schmidt_decompose(psi).coefficients
    data = {
        "N": psi.N,
        "concurrence": c,
        "invariants": invariants,
        "schmidt_coefficients": lam.tolist(),
        "input_sha256": input_hash(raw),
    }
    lines = [f"C_{psi.N} = {c:.12g}"]
    lines += [f"I_{a} = {v:.12g}" for a, v in enumerate(invariants)]
    lines.append("Schmidt coefficients: " + ", ".join(f"{x:.12g}" for x in lam))
    _emit(args, "\n".join(lines), data)
    return EXIT_OK


def _cmd_ppt(args):
    raw = _read(args.file)
    sf = parse_state_file(raw)
    holds, lam_min = ppt_test(sf.density(), sf.N, PPT_TOL)
    data = {"ppt_holds": bool(holds), "min_pt_eigenvalue": lam_min, "ppt_tol": PPT_TOL,
            "input_sha256": input_hash(raw)}
    _emit(args, f"PPT {'holds' if holds else 'VIOLATED'}: min eigenvalue of partial transpose {lam_min:.6e}", data)
    return EXIT_OK if holds else EXIT_ENTANGLED


def _cmd_generate(args):
    provenance = default_provenance(
        {"generator": args.kind, "seed": args.seed, "prng": PRNG_ALGORITHM, "p": args.p}
    )
    if args.kind == "product-mixture":
        rho, _ = random_product_mixture(args.n, args.p, args.seed)
        sf = state_file_from(rho, provenance)
    else:
        ens = Ensemble.GENERIC if args.kind == "generic" else Ensemble.MAXIMALLY_ENTANGLED_E2
        sf = state_file_from(random_rank2(args.n, args.p, args.seed, ens), provenance)
    text = serialize_state_file(sf)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def _cmd_selftest(args):
    seed = default_seed() if args.seed is None else args.seed
    results = run_selftest(trials=args.trials, seed=seed, tol=args.tol)
    data = {
        "seed": seed,
        "prng": PRNG_ALGORITHM,
        "trials": args.trials,
        "properties": [
            {"name": r.name, "passed": r.passed, "failed": r.failed, "first_failure": r.first_failure}
            for r in results
        ],
    }
    lines = [f"selftest seed={seed} trials={args.trials} prng={PRNG_ALGORITHM}"]
    for r in results:
        lines.append(f"  {'PASS' if r.ok else 'FAIL'}  {r.passed:5d} passed {r.failed:5d} failed  {r.name}"
                     + (f"  [{r.first_failure}]" if r.first_failure else ""))
    total_failed = sum(r.failed for r in results)
    lines.append(f"{sum(r.passed for r in results)} passed, {total_failed} failed")
    _emit(args, "\n".join(lines), data)
    return EXIT_OK if total_failed == 0 else EXIT_ENTANGLED


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("check", "decompose"):
            return _cmd_check(args, show_decomposition=args.command == "decompose")
        return {
            "concurrence": _cmd_concurrence,
            "ppt": _cmd_ppt,
            "generate": _cmd_generate,
            "selftest": _cmd_selftest,
        }[args.command](args)
    except (Rank2SepError, OSError, ValueError) as exc:
        print(f"rank2sep: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
