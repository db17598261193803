"""Command-line front end.

    dirichlet-yang spectrum --group tree:3 --radius 1
    dirichlet-yang verify yang-type --group tree:3 --radius 3
    dirichlet-yang verify main-bound --random --vertices 8 --seed 7 --alpha random:3
    dirichlet-yang bounds --group zn:1 --interior interval:10
    dirichlet-yang audit --group heisenberg --radius 2 --k 1-5

Reports go to ``--out`` (or standard output); summary lines and warnings go
to standard error.  ``verify`` and ``audit`` exit with 0 only if every
gated assertion passed, 1 otherwise; bad input exits with 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import sweep
from .cayley import box, parse_group
from .eigensolve import spectrum_rows
from .errors import DomainError, NumericError, ResourceError
from .network import HostNetwork
from .report import REPORT_COLUMNS, render, report_rows

CONFIG_KEYS = ("group", "radius", "network", "interior", "random", "vertices", "density",
               "seed", "alpha", "k", "constants", "format", "out", "inequalities", "network_json")
KNOWN_CONSTANTS = ("C_Y", "C_YT", "lambda_min", "epsilon", "mu_max", "delta", "theta")


def _checker(name: str) -> str:
    if name != "all" and name not in sweep.CHECKERS:
        raise argparse.ArgumentTypeError(
            f"unknown inequality {name!r} (choose from {', '.join(sweep.CHECKERS)}, all)")
    return name


def _constant(text: str):
    name, sep, value = text.partition("=")
    if not sep or name not in KNOWN_CONSTANTS:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE with NAME in {', '.join(KNOWN_CONSTANTS)}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"constant {name} needs a number, got {value!r}") from None


def parse_k(text) -> list | None:
    """``all``, ``3``, ``1,2,5`` or ranges like ``1-10``; ``None`` means every valid k."""
    if text is None or text == "all":
        return None
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        return [int(k) for k in text]
    ks = []
    for part in str(text).split(","):
        lo, sep, hi = part.partition("-")
        if sep:
            ks.extend(range(int(lo), int(hi) + 1))
        else:
            ks.append(int(part))
    return ks


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("instance")
    src.add_argument("--config", help="JSON file whose keys mirror these flags")
    src.add_argument("--group", help="tree:D, zn:N, heisenberg, inline JSON or a group JSON file")
    src.add_argument("--radius", type=int)
    src.add_argument("--network", help="network JSON file")
    src.add_argument("--interior", help="box:M, interval:M or a JSON list of elements / vertex indices")
    src.add_argument("--random", action="store_true", default=None, help="use a seeded random network")
    src.add_argument("--vertices", type=int)
    src.add_argument("--density", type=float)
    src.add_argument("--seed", type=int)
    src.add_argument("--alpha", help="auto, busemann, cocycle, coordinates or random:M")
    common.set_defaults(network_json=None)
    run = common.add_argument_group("run")
    run.add_argument("--k", help="all, a list 1,2,5 or a range 1-10")
    run.add_argument("--constant", action="append", type=_constant, default=None, metavar="NAME=VAL")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--out", help="output path (default: standard output)")

    parser = argparse.ArgumentParser(prog="dirichlet-yang", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="Dirichlet spectrum with residuals")
    v = sub.add_parser("verify", parents=[common], help="check inequalities over a k-range")
    v.add_argument("inequalities", nargs="*", type=_checker, metavar="INEQUALITY")
    sub.add_parser("bounds", parents=[common], help="corollary upper bounds next to the spectrum")
    sub.add_parser("audit", parents=[common], help="proof-identity audit of the main bound")
    return parser


def _merge_config(args):
    if not args.config:
        return args
    data = _normalize_config(json.loads(Path(args.config).read_text()))
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in CONFIG_KEYS:
        if key not in data:
            continue
        if key == "constants":
            if args.constant is None:
                args.constant = [(name, float(val)) for name, val in data[key].items()]
        elif key == "inequalities":
            if getattr(args, "inequalities", None) == []:
                args.inequalities = [_checker(n) for n in data[key]]
        elif getattr(args, key, None) is None:
            value = data[key]
            if key == "interior" and isinstance(value, list):
                value = json.dumps(value)
            setattr(args, key, value)
    return args


def _normalize_config(data: dict) -> dict:
    """Accept the long-form keys (``k_range``, ``output``) and inline group or network objects."""
    data = dict(data)
    if "k_range" in data:
        data["k"] = data.pop("k_range")
    output = data.pop("output", None)
    if isinstance(output, dict):
        data.update({key: output[key] for key in ("format",) if key in output})
        if "path" in output:
            data["out"] = output["path"]
    elif output is not None:
        data["out"] = output
    group = data.get("group")
    if isinstance(group, dict):
        if "vertices" in group:
            data.pop("group")
            data["network_json"] = group
        else:
            data["group"] = json.dumps(group)
    return data


def _interior_elements(text, spec):
    if text.startswith("box:") or text.startswith("interval:"):
        if spec.family != "zn":
            raise DomainError("box/interval interiors are defined for zn only")
        side = int(text.partition(":")[2])
        if text.startswith("interval:") and spec.rank != 1:
            raise DomainError("interval:M needs zn:1")
        return box(spec.rank, side)
    return [tuple(e) if isinstance(e, list) else (e,) for e in json.loads(text)]


def build_instance(args) -> sweep.Instance:
    constants = dict(args.constant or [])
    seed = args.seed or 0
    if args.random:
        return sweep.random_instance(args.vertices or 8, seed, args.density or 0.5,
                                     args.alpha or "random:1", constants)
    if args.network or getattr(args, "network_json", None):
        if args.network:
            net, name = HostNetwork.load(args.network), Path(args.network).stem
        else:
            net, name = HostNetwork.from_json_dict(args.network_json), "network"
        if args.interior:
            net = net.with_interior(json.loads(args.interior))
        return sweep.network_instance(net, constants, args.alpha, seed, name)
    if args.group:
        spec = parse_group(args.group)
        interior = _interior_elements(args.interior, spec) if args.interior else None
        if interior is None and args.radius is None:
            raise DomainError("--group needs --radius or --interior")
        return sweep.group_instance(spec, args.radius, interior, constants, args.alpha or "auto", seed)
    raise DomainError("choose an instance with --group, --network or --random")


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        inst = build_instance(args)
        ks = parse_k(args.k)
        fmt_name = args.format or "csv"
        status = 0
        if args.command == "spectrum":
            _emit(render(["k", "lambda_k", "residual"], spectrum_rows(inst.system), fmt_name), args.out)
        elif args.command == "verify":
            names = args.inequalities or []
            if not names or "all" in names:
                names = sweep.default_checkers(inst)
            reports = sweep.run_checks(inst, names, ks)
            _emit(render(REPORT_COLUMNS, report_rows(inst.instance_id, reports), fmt_name), args.out)
            ok, line = sweep.summarize(reports)
            print(line, file=sys.stderr)
            status = 0 if ok else 1
        elif args.command == "bounds":
            rows, warnings = sweep.bounds_rows(inst)
            for w in warnings:
                print(f"warning: {w}", file=sys.stderr)
            _emit(render(sweep.BOUND_COLUMNS, rows, fmt_name), args.out)
        elif args.command == "audit":
            rows = sweep.audit_rows(inst, ks)
            _emit(render(sweep.AUDIT_COLUMNS, rows, fmt_name), args.out)
            bad = [r[1] for r in rows if not r[-1]]
            print(f"audit {'PASS' if not bad else 'FAIL'} {len(rows) - len(bad)}/{len(rows)}", file=sys.stderr)
            status = 0 if not bad else 1
        return status
    except (DomainError, NumericError, ResourceError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
