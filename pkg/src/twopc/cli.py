"""Command-line interface.

Exit codes: 0 success (including negative verdicts), 1 usage error,
2 computation error (kernel overlap, solver failure, budget exceeded).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .derive import CoalescencePlan, OverlapError, upsample
from .files import (
    DerivationDatabase,
    apply_operation,
    load_kernels,
    load_plan,
    load_structure,
    render_ppm,
    save_structure,
)
from .homog import ConductivityProblem, SolverError, bounds, bounds_curve, effective_conductivity
from .niezgoda import check_properties, count_vanishing, dft_map, reconstruct_from_row
from .search import SearchSpec, find_root_sets
from .structure import (
    BudgetExceededError,
    equivalent,
    independent_pairs,
    mpc_deviation,
    two_point,
    volume_fractions,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _g(x: float) -> str:
    return f"{x:.6g}"


def _parse_groups(text: str) -> CoalescencePlan:
    groups = [[int(v) for v in part.split(",") if v] for part in text.split("/")]
    return CoalescencePlan.from_groups(groups)


# ---------------------------------------------------------------------------


def cmd_search(args) -> int:
    spec = SearchSpec(tuple(args.dims), args.phases, tuple(args.counts) if args.counts else None, args.limit)
    classes = find_root_sets(spec, axis_permutations=args.axis_permutations, workers=args.workers)
    if not classes:
        print("no classes found")
        return 0
    out = Path(args.out) if args.out else None
    for i, cls in enumerate(classes):
        print(f"class {i}: fingerprint {cls.fingerprint[:16]}, {len(cls.members)} members")
        for m in cls.members:
            print("  " + json.dumps(m.cells.tolist()))
        if out is not None:
            d = out / f"class_{i:03d}"
            d.mkdir(parents=True, exist_ok=True)
            names = []
            for j, m in enumerate(cls.members):
                name = f"member_{j}.json"
                save_structure(m, d / name)
                names.append(name)
            manifest = {"fingerprint": cls.fingerprint, "dims": list(spec.dims), "phases": spec.phases, "members": names}
            (d / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return 0


def _derive_params(args) -> dict:
    op = args.operation
    if op == "phase_extend":
        if not args.z:
            raise UsageError("phase_extend needs --z")
        return {"z": list(args.z)}
    if op == "kernel_extend":
        if not args.kernels:
            raise UsageError("kernel_extend needs --kernels FILE")
        K = load_kernels(args.kernels)
        return {"dims": list(K.shape), "kernels": [k.ravel().tolist() for k in K.kernels]}
    if op == "coalesce":
        if args.plan:
            plan = load_plan(args.plan)
        elif args.groups:
            plan = _parse_groups(args.groups)
        else:
            raise UsageError("coalesce needs --plan FILE or --groups")
        return {"mapping": list(plan.mapping)}
    if op == "upsample":
        if not args.factor:
            raise UsageError("upsample needs --factor")
        return {"factor": list(args.factor)}
    raise UsageError(f"unknown operation {op}")


def cmd_derive(args) -> int:
    params = _derive_params(args)
    parents = [load_structure(p) for p in args.inputs]
    children = [apply_operation(args.operation, P, params) for P in parents]
    if len(parents) >= 2:
        first = parents[0]
        if all(equivalent(first, P) for P in parents[1:]):
            if not all(equivalent(children[0], C) for C in children[1:]):
                print("error: children lost 2PC-equivalence; nothing written", file=sys.stderr)
                return 2
            print("inherited 2PC-equivalence verified")
        else:
            print("note: inputs are not 2PC-equivalent; no inheritance to verify")
    db = DerivationDatabase(Path(args.out))
    for P in parents:
        child, record = db.derive(P, args.operation, params)
        print(f"{record.child}  dims={list(child.dims)} phases={child.phases}")
    return 0


def cmd_compare(args) -> int:
    S1 = load_structure(args.file1)
    S2 = load_structure(args.file2)
    if S1.dims != S2.dims or S1.phases != S2.phases:
        print(f"verdict: not comparable (dims {list(S1.dims)}/{list(S2.dims)}, phases {S1.phases}/{S2.phases})")
        return 0
    if args.refine > 1:
        factor = (args.refine,) * S1.ndim
        S1, S2 = upsample(S1, factor), upsample(S2, factor)
    same = equivalent(S1, S2)
    print(f"2PC-equivalent: {'yes' if same else 'no'}")
    for a1, a2 in independent_pairs(S1.phases):
        dev = int(np.abs(two_point(S1, a1, a2) - two_point(S2, a1, a2)).max())
        print(f"  C_{a1}{a2}: max |difference| = {dev}")
    if args.mpc:
        alphas = tuple(args.mpc_phases) if args.mpc_phases else (1,) * args.mpc
        if len(alphas) != args.mpc:
            raise UsageError("--mpc-phases must list M phases")
        diff, ref = mpc_deviation(S1, S2, alphas)
        rel = diff / ref if ref else 0.0
        label = ",".join(map(str, alphas))
        print(f"{args.mpc}-point correlation ({label}) relative deviation: {_g(100 * rel)}%")
    return 0


def cmd_homog(args) -> int:
    S = load_structure(args.file)
    problem = ConductivityProblem(S, args.k1, args.k2)
    K = effective_conductivity(problem, args.refine)
    v1 = float(volume_fractions(S)[0])
    b = bounds(v1, args.k1, args.k2)
    rows = [
        ("K11", K.matrix[0, 0]), ("K12", K.matrix[0, 1]), ("K22", K.matrix[1, 1]),
        ("v1", v1), ("voigt", b.voigt), ("reuss", b.reuss), ("hs_upper", b.hs_upper), ("hs_lower", b.hs_lower),
    ]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["quantity", "value"])
    for name, value in rows:
        writer.writerow([name, _g(value)])
    return 0


def cmd_bounds(args) -> int:
    table = bounds_curve(args.k1, args.k2, args.samples)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["v1", "voigt", "reuss", "hs_upper", "hs_lower"])
        for row in table:
            writer.writerow([_g(v) for v in row])
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_niezgoda(args) -> int:
    S = load_structure(args.file)
    report = check_properties(S)
    result = {
        "properties": {k: {"max_violation": v, "holds": report.holds(k)} for k, v in report.violations.items()},
        "vanishing": dict(zip(range(1, S.phases + 1), count_vanishing(S))),
    }
    if args.gamma is not None:
        H = dft_map(S)
        needed = range(1, S.phases + (1 if args.gamma == S.phases else 0))
        rec = reconstruct_from_row(S.dims, S.phases, args.gamma, {b: H[(args.gamma, b)] for b in needed})
        result["gamma"] = args.gamma
        result["undetermined"] = rec.undetermined_frequencies
        result["unique_with_linear_constraints"] = rec.unique
    if args.json:
        print(json.dumps(result, indent=1, default=str))
        return 0
    for name, entry in result["properties"].items():
        print(f"{name:14s} {'ok' if entry['holds'] else 'FAIL'}  max violation {_g(entry['max_violation'])}")
    print("vanishing diagonal spectrum entries: " + ", ".join(f"phase {a}: {c}" for a, c in result["vanishing"].items()))
    if args.gamma is not None:
        und = result["undetermined"]
        text = ", ".join(str(p) for p in und) if und else "none"
        print(f"gamma = {args.gamma}: undetermined frequencies: {text}")
        print(f"unique after symmetry/row-sum/inverse-sum constraints: {'yes' if rec.unique else 'no'}")
    return 0


def cmd_render(args) -> int:
    S = load_structure(args.file)
    render_ppm(S, args.out, args.block)
    print(args.out)
    return 0


def cmd_db_replay(args) -> int:
    db = DerivationDatabase(Path(args.directory))
    results = db.replay()
    for rid, ok in results:
        print(f"{'ok  ' if ok else 'FAIL'} {rid}")
    if not results:
        print("no records")
    return 0 if all(ok for _, ok in results) else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twopc", description="Exact two-point correlation toolkit for periodic structures.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="brute-force root 2PC-equivalent structures")
    p.add_argument("dims", nargs="+", type=int)
    p.add_argument("--phases", type=int, default=2)
    p.add_argument("--counts", nargs="+", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--out")
    p.add_argument("--axis-permutations", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("derive", help="apply a derivation to structure files")
    p.add_argument("operation", choices=["phase_extend", "kernel_extend", "coalesce", "upsample"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True, help="derivation database directory")
    p.add_argument("--z", nargs="+", type=int)
    p.add_argument("--kernels")
    p.add_argument("--plan")
    p.add_argument("--groups", help="e.g. 1,2/3 merges phases 1 and 2")
    p.add_argument("--factor", nargs="+", type=int)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("compare", help="compare the correlations of two structures")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--mpc", type=int, help="also compare the M-point correlation")
    p.add_argument("--mpc-phases", nargs="+", type=int)
    p.add_argument("--refine", type=int, default=1, help="upsample both structures first")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("homog", help="effective conductivity of a 2D two-phase structure")
    p.add_argument("file")
    p.add_argument("k1", type=float)
    p.add_argument("k2", type=float)
    p.add_argument("--refine", type=int, default=1)
    p.set_defaults(func=cmd_homog)

    p = sub.add_parser("bounds", help="Voigt/Reuss/Hashin-Shtrikman table as CSV")
    p.add_argument("k1", type=float)
    p.add_argument("k2", type=float)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("niezgoda", help="check spectral 2PC relations and row reconstruction")
    p.add_argument("file")
    p.add_argument("--gamma", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_niezgoda)

    p = sub.add_parser("render", help="write a PPM image of a structure")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--block", type=int, default=32)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("db-replay", help="re-apply all derivation records of a database")
    p.add_argument("directory")
    p.set_defaults(func=cmd_db_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"twopc: error: {exc}", file=sys.stderr)
        return 1
    except (OverlapError, SolverError, BudgetExceededError) as exc:
        print(f"twopc: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"twopc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
