"""Command line front end: graphs, weights, strata and verify.

Exit codes: 0 success / relation holds, 1 relation violated, 2 usage error.
Every output embeds the configuration it was produced from.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from .formality import DEFAULT_SIGNS, flip_cup, verify_report
from .graphs import enumerate_gnm
from .serialize import dumps, rational_to_json
from .strata import codim1_strata_cn, codim1_strata_cnm
from .weights import BumpFunction, WeightConfig, weight

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

WEIGHT_FIELDS = ["id", "graph", "n", "m", "edges", "mode", "value", "mean", "stderr", "phi", "samples", "seed"]


class UsageError(Exception):
    pass


def _config(args) -> dict:
    keys = ["command", "n", "m", "kind", "degrees", "samples", "seed", "phi", "mode", "format",
            "trials", "vars", "signs", "tolerance"]
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _weight_config(args) -> WeightConfig:
    return WeightConfig(mode=args.mode, bump=BumpFunction.parse(args.phi), samples=args.samples, seed=args.seed)


def _edges_text(g) -> str:
    return " ".join(f"{i}>{t.index}" for i, t in g.edges())


def cmd_graphs(args) -> tuple[dict, int]:
    if args.n is None or args.m is None:
        raise UsageError("graphs needs --n and --m")
    if args.n < 1 or args.m < 0:
        raise UsageError(f"G_{{n,m}} needs n >= 1 and m >= 0 (got n={args.n}, m={args.m})")
    graphs = enumerate_gnm(args.n, args.m)
    return {"graphs": [{"id": k, **g.to_json()} for k, g in enumerate(graphs)]}, EXIT_OK


def weight_rows(n: int, m: int, cfg: WeightConfig) -> list[dict]:
    rows = []
    for k, g in enumerate(enumerate_gnm(n, m)):
        w = weight(g, cfg)
        row = {
            "id": k, "graph": g.key(), "n": n, "m": m, "edges": _edges_text(g), "mode": w.mode,
            "value": "", "mean": "", "stderr": "", "phi": "", "samples": "", "seed": "",
        }
        if w.is_exact:
            row["value"] = rational_to_json(w.value)
        else:
            row.update(mean=repr(w.mean), stderr=repr(w.stderr), phi=w.bump, samples=w.samples, seed=w.seed)
        rows.append(row)
    return rows


def cmd_weights(args) -> tuple[dict, int]:
    if args.n is None or args.m is None:
        raise UsageError("weights needs --n and --m")
    if args.n < 1 or args.m < 0:
        raise UsageError(f"G_{{n,m}} needs n >= 1 and m >= 0 (got n={args.n}, m={args.m})")
    return {"weights": weight_rows(args.n, args.m, _weight_config(args))}, EXIT_OK


def cmd_strata(args) -> tuple[dict, int]:
    if args.kind == "cn":
        if args.n is None or args.n < 2:
            raise UsageError("C_n needs --n >= 2")
        strata = codim1_strata_cn(args.n)
        ambient = args.n - 2
    else:
        if args.n is None or args.m is None or args.n < 0 or args.m < 0 or args.n + args.m < 1:
            raise UsageError("C_{n,m} needs --n, --m >= 0 with n + m >= 1")
        strata = codim1_strata_cnm(args.n, args.m)
        ambient = args.n + args.m - 1
    return {"ambient_dim": ambient, "strata": [s.to_json() for s in strata]}, EXIT_OK


def _parse_degrees(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise UsageError(f"bad --degrees {text!r}") from exc


def cmd_verify(args) -> tuple[dict, int]:
    if args.degrees is None:
        raise UsageError("verify needs --degrees, e.g. --degrees 1,1")
    degrees = _parse_degrees(args.degrees)
    n = args.n if args.n is not None else len(degrees)
    if n < 1 or len(degrees) != n or any(d < 0 for d in degrees):
        raise UsageError(f"--degrees must list {n} non-negative degrees")
    sc = DEFAULT_SIGNS if args.signs == "default" else flip_cup(DEFAULT_SIGNS)
    report = verify_report(
        n, degrees, var_count=args.vars, trials=args.trials, sc=sc,
        cfg=_weight_config(args), tolerance=args.tolerance, seed=args.seed,
    )
    return {"report": report}, EXIT_OK if report["pass"] else EXIT_FAIL


COMMANDS = {"graphs": cmd_graphs, "weights": cmd_weights, "strata": cmd_strata, "verify": cmd_verify}


def render(payload: dict, config: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"config": config, **payload}, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# config: {dumps(config)}\n")
    if "weights" in payload:
        writer = csv.DictWriter(buf, fieldnames=WEIGHT_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(payload["weights"])
    elif "graphs" in payload:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "n", "m", "stars"])
        for g in payload["graphs"]:
            writer.writerow([g["id"], g["n"], g["m"], dumps(g["stars"])])
    elif "strata" in payload:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["variant", "cluster", "factors", "factor_dims"])
        for s in payload["strata"]:
            labels = [f"{f['kind']}({f['n']}" + (f",{f['m']})" if "m" in f else ")") for f in s["factors"]]
            writer.writerow([s.get("variant", "tree"), " ".join(s.get("cluster", map(str, s.get("block", [])))),
                             " x ".join(labels), " ".join(map(str, s["factor_dims"]))])
    else:
        r = payload["report"]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["pass", "mode", "trials", "max_residual", "max_z"])
        writer.writerow([r["pass"], r["mode"], r["trials"], repr(r["max_residual"]), repr(r["max_z"])])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyformality", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", help="output path (default: stdout)")
        if name == "strata":
            p.add_argument("--kind", choices=["cnm", "cn"], default="cnm")
        if name in ("weights", "verify"):
            p.add_argument("--samples", type=int, default=10**6)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--phi", default=BumpFunction.QUARTIC.value,
                           choices=[b.value for b in BumpFunction])
            p.add_argument("--mode", choices=["exact-preferred", "mc-only"], default="exact-preferred")
        if name == "verify":
            p.add_argument("--degrees")
            p.add_argument("--trials", type=int, default=10)
            p.add_argument("--vars", type=int, default=3)
            p.add_argument("--tolerance", type=float, default=5.0)
            p.add_argument("--signs", choices=["default", "flip-cup"], default="default")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        payload, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(payload, _config(args), args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_FAIL:
        print(f"relation violated: max residual {payload['report']['max_residual']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
