"""``nptlab`` command-line entry point.

Every JSON artifact is a report envelope carrying the tool version, the fully
resolved configuration and the seed. CSV tables get a ``<out>.meta.json``
sidecar with the same envelope. Exit codes: 0 success, 2 precondition or input
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import ConstructionSpec, Method, SpecError, dur_pt_operator, realize
from .distillability import SeesawOptions, certificate_verify, epsilon_threshold, f_estimate
from .geometry import geometry_rows
from .io import SCHEMA_VERSION, dumps, load_spec, operator_from_json, operator_to_json, read_json, state_to_json, validate
from .nullspace import lemma1_trials
from .qcore import DEFAULT_SIZE_CAP, is_ppt, partial_transpose, witness_value

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
DUR_TOL = 1e-10


class NumericalFailure(RuntimeError):
    pass


def _envelope(command: str, config: dict, seed: int | None, result: dict, wall: float | None) -> dict:
    env = {
        "tool": "nptlab",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "seed": seed,
        "result": result,
    }
    if wall is not None:
        env["wall_time_s"] = wall
    return env


def _resolved_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "timing")}
    if getattr(args, "spec", None):
        cfg["spec"] = load_spec(args.spec).to_dict()
        cfg["spec_path"] = str(args.spec)
    return cfg


def _opts(args: argparse.Namespace) -> SeesawOptions:
    return SeesawOptions(restarts=args.restarts, max_iters=args.max_iters, conv_tol=args.conv_tol,
                         seed=args.seed, size_cap=args.size_cap)


def _eps(args: argparse.Namespace, spec: ConstructionSpec) -> float:
    if args.eps is not None:
        return float(args.eps)
    if spec.epsilon is not None:
        return float(spec.epsilon)
    raise SpecError("epsilon not given (use --eps or set 'epsilon' in the spec)")


def cmd_construct(args):
    spec = load_spec(args.spec)
    family = realize(spec)
    eps = _eps(args, spec)
    rho = family.rho(eps)
    ppt, lam = is_ppt(rho)
    return {
        "epsilon": eps,
        "rho": operator_to_json(rho),
        "phis": [state_to_json(p) for p in family.phis],
        "lambda_abs": family.lambda_abs,
        "ppt": ppt,
        "min_pt_eigenvalue": lam,
    }


def cmd_ppt_check(args):
    if args.operator:
        obj = read_json(args.operator)
        validate(obj, "operator")
        rho = operator_from_json(obj)
        eps = None
    else:
        spec = load_spec(args.spec)
        eps = _eps(args, spec)
        rho = realize(spec).rho(eps)
    ppt, lam = is_ppt(rho, args.tol)
    return {"epsilon": eps, "ppt": ppt, "min_pt_eigenvalue": lam, "tol": args.tol}


def cmd_witness(args):
    spec = load_spec(args.spec)
    family = realize(spec)
    eps = _eps(args, spec)
    rho = family.rho(eps)
    values = [witness_value(p, rho) for p in family.phis]
    return {"epsilon": eps, "values": values, "expected": [-eps * lam for lam in family.lambda_abs],
            "lambda_abs": family.lambda_abs}


def cmd_seesaw(args):
    spec = load_spec(args.spec)
    family = realize(spec)
    eps = _eps(args, spec)
    rho = family.rho(eps)
    ppt, lam = is_ppt(rho)
    res = f_estimate(family, eps, args.copies, _opts(args))
    ok, reason = certificate_verify(res, family, eps, args.size_cap)
    if ppt:
        verdict = "PPT"
    elif ok:
        verdict = "NPT-distillable-certified"
    else:
        verdict = "no-witness-found"
    return {
        "construction": spec.to_dict(),
        "epsilon": eps,
        "n": args.copies,
        "ppt_flags": {"ppt": ppt, "min_pt_eigenvalue": lam},
        "witness_values": [witness_value(p, rho) for p in family.phis],
        "verdict": verdict,
        "verification": {"ok": ok, "reason": reason},
        "semantics": "negative value certifies n-copy distillability; non-negative means no witness found",
        "seesaw": res.to_dict(),
    }


def cmd_threshold(args):
    spec = load_spec(args.spec)
    rep = epsilon_threshold(spec, args.copies, _opts(args), grid=args.grid)
    out = rep.to_dict()
    if rep.certificate_at_hi is not None:
        ok, reason = certificate_verify(rep.certificate_at_hi, spec, rep.hi, args.size_cap)
        out["verification_at_hi"] = {"ok": ok, "reason": reason}
    return out


def cmd_lemma1(args):
    rep = lemma1_trials(args.k, args.copies, args.trials, seed=args.seed, tol=args.tol,
                        exhaustive_limit=args.exhaustive_limit)
    return rep.to_dict()


def cmd_compare_dur(args):
    d = args.d
    family = realize(ConstructionSpec(method=Method.DUR, d1=d, d2=d))
    ours = partial_transpose(family.rho(0.0))
    dur = dur_pt_operator(d)
    dev = float(np.max(np.abs(ours.data - dur.data)))
    return {"d": d, "max_entrywise_deviation": dev, "tolerance": DUR_TOL, "agree": dev <= DUR_TOL}


def cmd_geometry(args):
    return {"rows": geometry_rows(args.d, args.k)}


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with both ends included."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise SpecError(f"--eps-grid must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise SpecError(f"invalid grid {text!r}")
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def sweep_rows(args) -> list[dict]:
    spec = load_spec(args.spec)
    family = realize(spec)
    rows = []
    opts = _opts(args)
    for eps in parse_grid(args.eps_grid):
        res = f_estimate(family, eps, args.copies, opts)
        rows.append({"epsilon": eps, "n": args.copies, "f_estimate": res.value,
                     "witness_found": res.certified, "seed": args.seed})
    return rows


def _csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = _stdio.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in columns})
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "construct": cmd_construct,
    "ppt-check": cmd_ppt_check,
    "witness": cmd_witness,
    "seesaw": cmd_seesaw,
    "threshold": cmd_threshold,
    "lemma1": cmd_lemma1,
    "geometry": cmd_geometry,
    "compare-dur": cmd_compare_dur,
    "sweep": None,
}

CSV_COLUMNS = {
    "geometry": ["d", "k", "m", "D", "r_m", "gurvits", "measured"],
    "sweep": ["epsilon", "n", "f_estimate", "witness_found", "seed"],
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nptlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"nptlab {__version__} (report schema {SCHEMA_VERSION})")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seeded=True):
        sp.add_argument("--out", help="output file (stdout if omitted)")
        sp.add_argument("--format", choices=["json", "csv"], default=None)
        sp.add_argument("--timing", action="store_true", help="embed wall time (breaks byte-identity)")
        if seeded:
            sp.add_argument("--seed", type=int, default=0)

    def seesaw_flags(sp):
        sp.add_argument("--restarts", type=int, default=64)
        sp.add_argument("--max-iters", type=int, default=200)
        sp.add_argument("--conv-tol", type=float, default=1e-11)
        sp.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
        sp.add_argument("--copies", type=int, default=1)

    sp = sub.add_parser("construct", help="build rho(eps) from a spec")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--eps", type=float)
    common(sp, seeded=False)

    sp = sub.add_parser("ppt-check", help="minimum PT eigenvalue of rho(eps) or a raw operator")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--spec")
    g.add_argument("--operator")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp, seeded=False)

    sp = sub.add_parser("witness", help="<phi|rho(eps)^PT|phi> for the construction's phi")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--eps", type=float)
    common(sp, seeded=False)

    sp = sub.add_parser("seesaw", help="Schmidt-rank-2 see-saw on the n-copy PT operator")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--eps", type=float)
    seesaw_flags(sp)
    common(sp)

    sp = sub.add_parser("threshold", help="bisect for the n-copy threshold")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--grid", type=int, default=10)
    seesaw_flags(sp)
    common(sp)

    sp = sub.add_parser("lemma1", help="two-rows-deleted rank check on random LambdaMatrix draws")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--copies", type=int, default=2)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--exhaustive-limit", type=int, default=5000)
    common(sp)

    sp = sub.add_parser("geometry", help="shell radii vs measured HS distances")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int, default=3)
    common(sp, seeded=False)

    sp = sub.add_parser("compare-dur", help="compare with the Dur-class PT operator")
    sp.add_argument("--d", type=int, required=True)
    common(sp, seeded=False)

    sp = sub.add_parser("sweep", help="f estimate over an epsilon grid (CSV)")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--eps-grid", required=True, help="start:stop:step, inclusive")
    seesaw_flags(sp)
    common(sp)
    return p


def _format(args) -> str:
    if args.format:
        return args.format
    if args.command == "sweep":
        return "csv"
    if args.out and args.out.endswith(".csv"):
        return "csv"
    return "json"


def run(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    fmt = _format(args)
    if fmt == "csv" and args.command not in CSV_COLUMNS:
        raise SpecError(f"CSV output is not available for {args.command}")
    config = _resolved_config(args)
    seed = getattr(args, "seed", None)
    if args.command == "sweep":
        rows = sweep_rows(args)
        result = {"rows": rows}
    else:
        result = COMMANDS[args.command](args)
        rows = result.get("rows", [])
    wall = time.perf_counter() - t0 if args.timing else None
    envelope = _envelope(args.command, config, seed, result if fmt == "json" else
                         {"rows": rows, "csv": Path(args.out).name if args.out else None}, wall)
    validate(envelope, "report")
    if fmt == "csv":
        _emit(_csv_text(rows, CSV_COLUMNS[args.command]), args.out)
        if args.out:
            Path(args.out + ".meta.json").write_text(dumps(envelope))
    else:
        _emit(dumps(envelope), args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return run(args)
    except (np.linalg.LinAlgError, NumericalFailure) as exc:
        print(f"nptlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IndexError, FileNotFoundError, OSError) as exc:
        print(f"nptlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
