"""Command-line front end: generate spaces, run constructions, emit reports.

Every command writes its outputs deterministically (re-running a command
with the same arguments reproduces the report byte for byte) plus a
manifest recording the full parameter set, seeds, version, and wall-clock
duration.  Exit codes: 0 pass, 1 threshold failure, 2 usage or structural
error, 3 unusable configuration (diagnostic).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis, distortion, generators, glue, space
from .warp import INFINITY_LABEL, warp as warp_space

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DIAGNOSTIC = 3


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return "inf" if math.isinf(v) else ("nan" if math.isnan(v) else v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in seq]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return obj


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")


def _write_manifest(out_path: Path, command: str, params: dict, inputs, outputs,
                    t0: float) -> None:
    manifest = {
        "command": command,
        "params": _jsonable(params),
        "seeds": {k: v for k, v in params.items() if "seed" in k},
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "duration_s": time.monotonic() - t0,
    }
    _write_json(out_path.with_suffix(out_path.suffix + ".manifest.json"), manifest)


def _load(path_str: str) -> space.FiniteMetricSpace:
    path = Path(path_str)
    if not path.exists():
        raise SystemExit2(f"input file not found: {path}")
    try:
        return space.load_space(path)
    except Exception as exc:
        raise SystemExit2(f"cannot parse space file {path}: {exc}") from exc


class SystemExit2(Exception):
    """Usage/structural failure carrying a message for stderr."""


def _parse_radii(text):
    return tuple(float(v) for v in text.split(",")) if text else None


_GAUGE_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)?\s*\*?\s*t\s*$")


def _parse_gauge(text: str):
    """Linear gauge strings like '16t', '2.5 t', or plain 't'."""
    match = _GAUGE_RE.match(text)
    if not match:
        raise SystemExit2(f"cannot parse gauge {text!r}; expected '<coef>t'")
    coef = float(match.group(1)) if match.group(1) else 1.0
    return distortion.linear_gauge(coef), f"{coef}t"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    t0 = time.monotonic()
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "command", "out") and v is not None}
    kind = params.pop("kind")
    try:
        m = generators.generate(kind, **params)
    except ValueError as exc:
        raise SystemExit2(str(exc)) from exc
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    space.save_space(m, out)
    _write_manifest(out, "generate", dict(kind=kind, **params), [], [out], t0)
    print(f"wrote {m.n}-point space to {out}")
    return EXIT_PASS


def cmd_warp(args) -> int:
    t0 = time.monotonic()
    m = _load(args.input)
    try:
        p = m.index(args.basepoint)
    except KeyError as exc:
        raise SystemExit2(str(exc)) from exc
    w = warp_space(m, p)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    space.save_space(w.warped, out)
    _write_manifest(out, "warp", {"input": args.input, "basepoint": args.basepoint},
                    [args.input], [out], t0)
    print(f"wrote warped space ({w.warped.n} points incl. {INFINITY_LABEL}) to {out}")
    return EXIT_PASS


def cmd_double(args) -> int:
    t0 = time.monotonic()
    m = _load(args.input)
    try:
        ds = glue.double(m)
    except ValueError as exc:
        raise SystemExit2(str(exc)) from exc
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    space.save_space(ds.doubled, out)
    _write_manifest(out, "double", {"input": args.input}, [args.input], [out], t0)
    print(f"wrote doubled space ({ds.doubled.n} points) to {out}")
    return EXIT_PASS


def _suite_metric(m, args):
    report = space.validate_metric(m)
    doc = {
        "suite": "metric",
        "ok": report.ok,
        "total_violations": report.total,
        "violations": [dataclasses.asdict(v) for v in report.violations],
    }
    return doc, EXIT_PASS if report.ok else EXIT_FAIL


def _suite_llc(m, args):
    grid = None
    if args.lambda_max:
        steps = int(math.ceil(4 * math.log2(args.lambda_max))) + 1
        grid = tuple(2.0 ** (k / 4.0) for k in range(steps))
    rep = analysis.llc_constants(m, delta=args.delta, lambda_grid=grid,
                                 n_centers=args.n_centers, n_radii=args.n_radii,
                                 seed=args.seed)
    doc = {"suite": "llc", **dataclasses.asdict(rep)}
    if not rep.usable:
        return doc, EXIT_DIAGNOSTIC
    ok = True
    if args.claim_lambda1 is not None:
        ok &= rep.lambda1 <= args.claim_lambda1
    if args.claim_lambda2 is not None:
        ok &= rep.lambda2 <= args.claim_lambda2
    doc["ok"] = bool(ok)
    return doc, EXIT_PASS if ok else EXIT_FAIL


def _suite_regularity(m, args):
    if args.q is None:
        raise SystemExit2("--suite regularity requires --q")
    try:
        rep = analysis.regularity_constant(m, args.q, radii=_parse_radii(args.radii),
                                           n_centers=args.n_centers, seed=args.seed,
                                           eps=args.eps)
    except ValueError as exc:
        raise SystemExit2(str(exc)) from exc
    doc = {"suite": "regularity", **dataclasses.asdict(rep)}
    ok = True
    if args.claim_k is not None:
        ok = rep.K_hat <= args.claim_k
    doc["ok"] = bool(ok)
    return doc, EXIT_PASS if ok else EXIT_FAIL


def _suite_distortion(m, args):
    if not args.dst:
        raise SystemExit2("--suite distortion requires --dst (destination space file)")
    dst = _load(args.dst)
    # Pair points by shared label; extra destination points (the adjoined
    # "∞" of a warped file) simply have no preimage.
    try:
        mapping = [dst.index(lbl) for lbl in m.points]
    except KeyError as exc:
        raise SystemExit2(f"destination is missing a source label: {exc}") from exc
    claimed = claimed_desc = None
    if args.claim_theta:
        claimed, claimed_desc = _parse_gauge(args.claim_theta)
    if args.claim_eta:
        claimed, claimed_desc = _parse_gauge(args.claim_eta)
    profile_fn = distortion.qs_profile if args.kind == "qs" else distortion.qm_profile
    prof = profile_fn(m, dst, mapping, n_samples=args.samples, seed=args.seed,
                      claimed=claimed, claimed_desc=claimed_desc)
    doc = {"suite": "distortion", **dataclasses.asdict(prof)}
    if args.csv:
        _export_envelope_csv(prof, Path(args.csv))
    ok = prof.claim.passed if prof.claim is not None else True
    doc["ok"] = bool(ok)
    return doc, EXIT_PASS if ok else EXIT_FAIL


def _suite_quasicircle(m, args):
    grid = None
    if args.lambda_max:
        steps = int(math.ceil(4 * math.log2(args.lambda_max))) + 1
        grid = tuple(2.0 ** (k / 4.0) for k in range(steps))
    rep = analysis.quasicircle_check(m, max_lambda=args.max_lambda,
                                     max_doubling=args.max_doubling,
                                     delta=args.delta, lambda_grid=grid,
                                     seed=args.seed)
    doc = {"suite": "quasicircle", **dataclasses.asdict(rep)}
    if rep.degenerate or not rep.usable:
        return doc, EXIT_DIAGNOSTIC
    return doc, EXIT_PASS if rep.passed else EXIT_FAIL


def _export_envelope_csv(prof, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["bin_upper,envelope,count"]
    uppers = list(prof.bin_edges) + ["overflow"]
    for b in range(len(prof.counts)):
        upper = uppers[b] if b < len(uppers) else "overflow"
        lines.append(f"{upper},{prof.envelope[b]},{prof.counts[b]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_SUITES = {
    "metric": _suite_metric,
    "llc": _suite_llc,
    "regularity": _suite_regularity,
    "distortion": _suite_distortion,
    "quasicircle": _suite_quasicircle,
}


def cmd_check(args) -> int:
    t0 = time.monotonic()
    m = _load(args.input)
    doc, code = _SUITES[args.suite](m, args)
    out = Path(args.out) if args.out else Path(args.input).with_suffix(f".{args.suite}.json")
    _write_json(out, doc)
    _write_manifest(out, "check",
                    {k: v for k, v in vars(args).items() if k not in ("func", "command")},
                    [args.input], [out], t0)
    print(f"suite={args.suite} exit={code} report={out}")
    return code


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SystemExit2(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metricforge",
                     description="finite metric space toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a test-bed space")
    g.add_argument("--kind", required=True,
                   choices=["grid", "disk", "disk-grid", "sphere-cap",
                            "halfplane", "random-metric"])
    g.add_argument("--side", type=int)
    g.add_argument("--spacing", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--radius", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--width", type=float)
    g.add_argument("--height", type=float)
    g.add_argument("--edge-density", dest="edge_density", type=float)
    g.add_argument("--mark-boundary", dest="mark_boundary", action="store_true",
                   default=None)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_generate)

    w = sub.add_parser("warp", help="warp a space around a basepoint")
    w.add_argument("input")
    w.add_argument("--basepoint", required=True, help="basepoint label")
    w.add_argument("-o", "--out", required=True)
    w.set_defaults(func=cmd_warp)

    d = sub.add_parser("double", help="glue two copies along the marked boundary")
    d.add_argument("input")
    d.add_argument("-o", "--out", required=True)
    d.set_defaults(func=cmd_double)

    c = sub.add_parser("check", help="run a verification suite")
    c.add_argument("input")
    c.add_argument("--suite", required=True, choices=sorted(_SUITES))
    c.add_argument("-o", "--out")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--q", type=float)
    c.add_argument("--radii", help="comma-separated radii")
    c.add_argument("--eps", type=float)
    c.add_argument("--delta", type=float)
    c.add_argument("--n-centers", dest="n_centers", type=int, default=32)
    c.add_argument("--n-radii", dest="n_radii", type=int, default=8)
    c.add_argument("--lambda-max", dest="lambda_max", type=float)
    c.add_argument("--claim-k", dest="claim_k", type=float)
    c.add_argument("--claim-lambda1", dest="claim_lambda1", type=float)
    c.add_argument("--claim-lambda2", dest="claim_lambda2", type=float)
    c.add_argument("--claim-theta", dest="claim_theta")
    c.add_argument("--claim-eta", dest="claim_eta")
    c.add_argument("--dst", help="destination space file for distortion")
    c.add_argument("--kind", choices=["qs", "qm"], default="qm")
    c.add_argument("--samples", type=int, default=distortion.DEFAULT_SAMPLES)
    c.add_argument("--max-lambda", dest="max_lambda", type=float, default=2.0)
    c.add_argument("--max-doubling", dest="max_doubling", type=int, default=8)
    c.add_argument("--csv", help="export the distortion envelope as CSV")
    c.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
