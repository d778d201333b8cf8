"""Command-line driver.

Exit codes: 0 when every check passes, 2 when a scientific check fails,
1 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .characters import AdmissibilityError, FamilySpec, fix_omega, write_manifest
from .config import DEFAULTS, override
from .density import (FamilyData, TestFunction, compare, empirical_density_charsums,
                      empirical_density_zeros, predict_density, reports_to_csv, rmt_baseline)
from .euler import family_size_predicted, series_coefficient, size_budget
from .explicit import verify_explicit_formula
from .gfpoly import field_make
from .lfunc import functional_equation_check, vanishing_check

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    out = []
    for tok in text.replace(",", " ").split():
        if "-" in tok:
            a, b = tok.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="field characteristic")
    common.add_argument("--k", type=int, default=1, help="q = p^k")
    common.add_argument("--ell", type=int, default=3)
    common.add_argument("--setting", default="kummer", help="kummer | nonkummer")
    common.add_argument("--genus", default="1", help="genus list, e.g. 1,2 or 1-4")
    common.add_argument("--tf", default=None,
                        help='phi_hat(0..N) inline ("1,1,1") or a JSON file {"N":..,"coeffs":[..]}')
    common.add_argument("--N", default=None,
                        help="band limit(s) for the plain preset phi_hat = 1, e.g. 3 or 1-3")
    common.add_argument("--euler-cutoff", type=int, default=None)
    common.add_argument("--euler-tol", type=float, default=None)
    common.add_argument("--root-tol", type=float, default=None)
    common.add_argument("--epsilon", type=float, default=None)
    common.add_argument("--budget-constant", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--deterministic", action="store_true",
                        help="serial reference execution (forces --threads 1)")
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    ap = _Parser(prog="ffdensity", description="One-level density experiments for order-ell "
                 "Dirichlet L-functions over F_q[t].")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub.add_parser("family", parents=[common], help="enumerate a family and write its manifest")
    sub.add_parser("lfun", parents=[common], help="L-data per character")
    sub.add_parser("verify-ef", parents=[common], help="explicit-formula residual table")
    sub.add_parser("density", parents=[common], help="empirical one-level density, both paths")
    sub.add_parser("predict", parents=[common], help="theorem-side prediction")
    sub.add_parser("compare", parents=[common], help="full density report")
    r = sub.add_parser("rmt", parents=[common], help="random unitary baseline")
    r.add_argument("--M", type=int, default=None, help="matrix size (default D-2)")
    r.add_argument("--trials", type=int, default=2000)
    sub.add_parser("audit-sizes", parents=[common],
                   help="enumerated vs closed-form vs series-oracle family sizes")
    return ap


def _config(args) -> dict:
    threads = 1 if args.deterministic else args.threads
    return {"p": args.p, "k": args.k, "ell": args.ell, "setting": args.setting,
            "genus": _int_list(args.genus), "tf": args.tf, "N": _n_values(args),
            "threads": threads, "deterministic": args.deterministic,
            "defaults": dict(DEFAULTS)}


def _n_values(args) -> list[int] | None:
    if args.N is None:
        return None
    try:
        vals = _int_list(args.N)
    except ValueError:
        raise UsageError(f"bad --N value {args.N!r}")
    if not vals or min(vals) < 0:
        raise UsageError("--N values must be non-negative")
    return vals


def _test_functions(args) -> list[TestFunction]:
    if args.tf is None:
        return [TestFunction.plain(N) for N in (_n_values(args) or [1])]
    return [_test_function(args)]


def _test_function(args) -> TestFunction:
    if args.tf is None:
        return _test_functions(args)[-1]
    path = Path(args.tf)
    if path.suffix == ".json" or path.exists():
        try:
            return TestFunction.from_json(path.read_text())
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read test function file {args.tf}: {exc}")
    coeffs = [float(c) for c in args.tf.split(",")]
    return TestFunction(len(coeffs) - 1, tuple(coeffs))


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _header(meta: dict) -> str:
    return "# " + json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n"


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _table(args, meta: dict, rows: list[dict]) -> str:
    if args.format == "json":
        return json.dumps({"config": meta, "rows": rows}, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(_header(meta))
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _specs(args, ctx) -> list[FamilySpec]:
    specs = [FamilySpec(ctx, args.ell, args.setting, g) for g in _int_list(args.genus)]
    for s in specs:
        s.check()
    return specs


def _cmd_family(args, ctx, specs, meta) -> int:
    ok = True
    lines = [json.dumps({"_meta": meta}, sort_keys=True, separators=(",", ":")) + "\n"]
    for spec in specs:
        fam = FamilyData.build(spec)
        oracle = series_coefficient(spec)
        ok &= oracle == fam.size
        sys.stderr.write(f"{spec.label()}: {fam.size} characters (series oracle {oracle})\n")
        if args.out:
            out = args.out if len(specs) == 1 else f"{args.out}.{spec.label()}"
            write_manifest(fam.chars, out, meta)
        else:
            lines.extend(json.dumps(c.to_json(), separators=(",", ":")) + "\n" for c in fam.chars)
    if not args.out:
        sys.stdout.write("".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_lfun(args, ctx, specs, meta) -> int:
    tol = DEFAULTS["identity_tol"]
    records, ok = [], True
    for spec in specs:
        fam = FamilyData.build(spec)
        for i, L in enumerate(fam.compute_zeros(threads=meta["threads"])):
            _, fe = functional_equation_check(L)
            van = vanishing_check(L.chi)
            good = (van and L.residuals["circle_deviation"] < tol
                    and L.residuals["omega_modulus_deviation"] < tol and fe < tol
                    and len(L.zeros) == spec.n_zeros)
            ok &= good
            rec = L.to_json(f"{spec.label()}#{i}")
            rec["vanishing"] = van
            records.append(rec)
    _emit(args, json.dumps({"config": meta, "ldata": records}, sort_keys=True) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_verify_ef(args, ctx, specs, meta) -> int:
    N = 12 if args.N is None else max(_n_values(args))
    rows, worst = [], 0.0
    for spec in specs:
        fam = FamilyData.build(spec)
        for i, L in enumerate(fam.compute_zeros(threads=meta["threads"])):
            mx, res = verify_explicit_formula(L.chi, L, N)
            worst = max(worst, mx)
            row = {"character_id": f"{spec.label()}#{i}", "max_residual": mx}
            row.update({f"n{n}": r for n, r in enumerate(res, 1)})
            rows.append(row)
    _emit(args, _table(args, meta, rows))
    sys.stderr.write(f"max explicit-formula residual {worst:.3e} over n <= {N}\n")
    return EXIT_OK if worst < DEFAULTS["identity_tol"] else EXIT_CHECK


def _cmd_density(args, ctx, specs, meta) -> int:
    rows, ok = [], True
    for spec in specs:
        fam = FamilyData.build(spec)
        fam.compute_zeros(threads=meta["threads"])
        for tf in _test_functions(args):
            rows.append(_density_row(spec, fam, tf))
            ok &= rows[-1]["path_gap"] <= DEFAULTS["identity_tol"]
    _emit(args, _table(args, meta, rows))
    return EXIT_OK if ok else EXIT_CHECK


def _density_row(spec, fam, tf) -> dict:
    ez = empirical_density_zeros(fam, tf, details=True)
    ec = empirical_density_charsums(fam, tf, details=True)
    gap = abs(ez["value"] - ec["value"])
    return {"family": spec.label(), "N": tf.N, "family_size": fam.size,
            "empirical_zeros": ez["value"], "empirical_charsums": ec["value"],
            "per_zero": ez["per_zero"], "path_gap": gap}


def _cmd_predict(args, ctx, specs, meta) -> int:
    rows = []
    for spec, tf in ((s, t) for s in specs for t in _test_functions(args)):
        pr = predict_density(spec, tf)
        rows.append({"family": spec.label(), "N": tf.N, "predicted": pr.predicted,
                     "phi_hat0": pr.phi_hat0, "trivial_term": pr.trivial_term,
                     "main_sum": pr.main_sum, "h1_term": pr.h1_term,
                     "h2_or_s2_term": pr.h2_or_s2_term})
    _emit(args, _table(args, meta, rows))
    return EXIT_OK


def _cmd_compare(args, ctx, specs, meta) -> int:
    reports = []
    for spec in specs:
        fam = FamilyData.build(spec)
        for tf in _test_functions(args):
            reports.append(compare(fam, tf, threads=meta["threads"]))
    if args.format == "json":
        text = json.dumps({"config": meta, "reports": [r.to_json() for r in reports]},
                          indent=1, sort_keys=True) + "\n"
    else:
        text = _header(meta) + reports_to_csv(reports)
    _emit(args, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def _cmd_rmt(args, ctx, specs, meta) -> int:
    tf = _test_function(args)
    rows, ok = [], True
    sizes = [args.M] if args.M is not None else [s.D - 2 for s in specs]
    for M in sizes:
        mean, se = rmt_baseline(M, tf, args.trials, DEFAULTS["seed"], meta["threads"])
        target = M * tf.phi_hat[0]
        within = abs(mean - target) <= 3 * se if se > 0 else mean == target
        ok &= within
        rows.append({"M": M, "trials": args.trials, "mean": mean, "std_error": se,
                     "Phi_hat0": target, "within_3se": within})
    _emit(args, _table(args, meta, rows))
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_audit(args, ctx, specs, meta) -> int:
    rows, ok = [], True
    for spec in specs:
        fam = FamilyData.build(spec)
        oracle = series_coefficient(spec)
        budget = size_budget(spec)
        row = {"family": spec.label(), "enumerated": fam.size, "series_oracle": oracle}
        if spec.setting == "kummer" and spec.ell == 3:
            main = family_size_predicted(spec, "main_term")
            full = family_size_predicted(spec, "with_secondary_terms")
            row.update(predicted_main=main, predicted_with_secondary=full,
                       twisted_residual=fam.size - main, budget=budget,
                       within_budget=abs(fam.size - full) <= budget)
        elif spec.setting == "kummer":
            full = family_size_predicted(spec, "main_term")
            row.update(predicted_main=full, budget=budget,
                       within_budget=abs(fam.size - full) <= budget)
        else:
            residue = family_size_predicted(spec, "residue")
            printed = family_size_predicted(spec, "printed")
            row.update(series_oracle_with_pairs=series_coefficient(spec, primitive=False),
                       predicted_residue=residue, predicted_printed=printed, budget=budget,
                       within_budget=abs(fam.size - residue) <= budget,
                       printed_discrepancy_detected=abs(fam.size - printed) > budget)
        ok &= oracle == fam.size and row["within_budget"]
        rows.append(row)
    _emit(args, _table(args, meta, rows))
    return EXIT_OK if ok else EXIT_CHECK


_COMMANDS = {"family": _cmd_family, "lfun": _cmd_lfun, "verify-ef": _cmd_verify_ef,
             "density": _cmd_density, "predict": _cmd_predict, "compare": _cmd_compare,
             "rmt": _cmd_rmt, "audit-sizes": _cmd_audit}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {"euler_cutoff": args.euler_cutoff, "euler_tol": args.euler_tol,
                     "root_tol": args.root_tol, "epsilon": args.epsilon,
                     "budget_constant": args.budget_constant, "seed": args.seed}
        with override(**overrides):
            ctx = field_make(args.p, args.k)
            specs = _specs(args, ctx)
            om = fix_omega(ctx, args.ell, args.setting)
            meta = _config(args)
            meta["pins"] = ctx.pins()
            meta["pins"]["omega"] = {"field_order": om.field.order, "zeta_ell": om.zeta}
            if args.tf is not None or args.N is not None:
                meta["test_function"] = [t.to_json() for t in _test_functions(args)]
            return _COMMANDS[args.cmd](args, ctx, specs, meta)
    except (UsageError, AdmissibilityError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
