"""Command-line interface.

Subcommands: list, verify, certify, report.  Options may also be given
in a plain key=value config file (one pair per line, # comments); the
default config path is taken from the TERNVERIFY_CONFIG environment
variable, and explicit flags always win over file values.  Exit codes:
0 pass, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .catalog import catalog, from_label, mutate
from .grid import MomentumGrid, random_bump
from .localize import (
    build_system, certify_no_solution, check_position, classify_D,
)
from .verify import numeric_lie_orders, verify_tern

CONFIG_ENV = "TERNVERIFY_CONFIG"

CONFIG_KEYS = {
    "mode": str, "output": str, "scheme": str,
    "box": float, "h": float, "rho_axis": float, "rho_origin": float,
    "seed": int, "refinements": int, "bumps": int,
    "numeric_tol": float, "order_window": float,
}

DEFAULTS = {
    "mode": "symbolic", "output": "text", "scheme": "fd2",
    "box": 2.0, "h": 0.0625, "rho_axis": 0.25, "rho_origin": 0.25,
    "seed": 2026, "refinements": 1, "bumps": 1,
    "numeric_tol": 1e-10, "order_window": 0.3,
}


class UsageError(Exception):
    pass


def read_config(path):
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError("%s:%d: expected key=value"
                                 % (path, lineno))
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise UsageError("%s:%d: unknown key %r"
                                 % (path, lineno, key))
            try:
                values[key] = CONFIG_KEYS[key](raw.strip())
            except ValueError:
                raise UsageError("%s:%d: bad value for %s"
                                 % (path, lineno, key))
    return values


def resolve_config(args):
    config = dict(DEFAULTS)
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        config.update(read_config(path))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            config[key] = flag
    if config["h"] <= 0 or config["numeric_tol"] <= 0:
        raise UsageError("grid spacing and tolerances must be positive")
    n = config["box"] * 2 / config["h"]
    if abs(n - round(n)) > 1e-9:
        raise UsageError("h must divide the box extent")
    if config["mode"] not in ("symbolic", "numeric", "both"):
        raise UsageError("mode must be symbolic, numeric or both")
    return config


def _grid(config):
    return MomentumGrid(-config["box"], config["box"], config["h"],
                        config["rho_axis"], config["rho_origin"])


def _is_rigid(tern):
    """True when the canonical position operator is the only one."""
    if tern.spec.m != 0 or not tern.complete:
        return False
    if not all(c.passed for c in check_position(tern)):
        return False
    if tern.spec.klass == "s":
        return classify_D(tern)[0] == 0
    return tern.dim == 1


def cmd_list(args, config):
    rows = []
    for tern in catalog():
        spec = tern.spec
        if args.klass and spec.klass != args.klass:
            continue
        if args.m is not None and spec.m != args.m:
            continue
        rigid = _is_rigid(tern)
        if args.localizable and not rigid:
            continue
        rows.append({
            "label": spec.label(), "class": spec.klass, "m": spec.m,
            "combo": spec.combo, "dim": tern.dim,
            "pi_square": str(tern.expected["pi_square"]),
            "tau_square": str(tern.expected["tau_square"]),
            "unique_position": rigid,
        })
    if config["output"] == "json":
        print(json.dumps({"schema": 1, "terns": rows}, indent=2,
                         sort_keys=True))
    else:
        for row in rows:
            print("%-18s dim=%d Pi^2=%-2s Tau^2=%-2s %s"
                  % (row["label"], row["dim"], row["pi_square"],
                     row["tau_square"],
                     "unique-position" if row["unique_position"] else ""))
    return 0


def cmd_verify(args, config):
    tern = from_label(args.spec)
    if args.mutate:
        tern = mutate(tern, args.mutate)
    report = verify_tern(tern)
    payload = report.as_dict()
    if config["mode"] in ("numeric", "both"):
        rng = np.random.default_rng(config["seed"])
        grid = _grid(config)
        numeric = []
        for _ in range(config["bumps"]):
            bump = random_bump(rng, tern.dim)
            rows = numeric_lie_orders(
                tern, bump, grid, scheme=config["scheme"],
                rounding_tol=config["numeric_tol"])
            numeric.append([
                {"relation": label, "norms": norms, "order": order}
                for label, (norms, order) in sorted(rows.items())])
        payload["numeric"] = numeric
        nominal = 2.0 if config["scheme"] == "fd2" else 4.0
        window = (config["order_window"] if config["scheme"] == "fd2"
                  else 2 * config["order_window"])
        bad = [row["relation"] for sweep in numeric for row in sweep
               if row["order"] is not None
               and abs(row["order"] - nominal) > window]
        payload["numeric_pass"] = not bad
        if bad:
            payload["overall"] = "fail"
    if config["output"] == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for check in payload["checks"]:
            status = "pass" if check["pass"] else "FAIL"
            print("%-4s %s  %s" % (status, check["id"],
                                   "" if check["pass"]
                                   else check["residual"]))
        print("overall:", payload["overall"])
    return 0 if payload["overall"] == "pass" else 1


def cmd_certify(args, config):
    system = build_system(args.system, args.m)
    grid = MomentumGrid(-config["box"], config["box"],
                        max(config["h"], 0.25),
                        config["rho_axis"], config["rho_origin"])
    cert = certify_no_solution(system, grid=grid,
                               scheme=config["scheme"],
                               refinements=config["refinements"])
    print(json.dumps(cert, indent=2, sort_keys=True))
    return 0


def cmd_report(args, config):
    reports = []
    overall = True
    for tern in catalog():
        report = verify_tern(tern)
        payload = report.as_dict()
        overall &= payload["overall"] == "pass"
        reports.append(payload)
    out = {"schema": 1, "count": len(reports),
           "overall": "pass" if overall else "fail",
           "reports": reports}
    if config["output"] == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        for payload in reports:
            print("%-18s %s" % (payload["subject"], payload["overall"]))
        print("overall:", out["overall"])
    return 0 if overall else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ternverify",
        description="Symbolic and numeric checks for massless-particle "
                    "symmetry terns.")
    parser.add_argument("--config", help="key=value config file "
                        "(default: $%s)" % CONFIG_ENV)
    for key, typ in CONFIG_KEYS.items():
        if typ is str:
            parser.add_argument("--" + key.replace("_", "-"))
        else:
            parser.add_argument("--" + key.replace("_", "-"),
                                type=typ, dest=key)
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="catalog listing")
    p_list.add_argument("--class", dest="klass",
                        choices=("u", "d", "s"))
    p_list.add_argument("--m", type=int, dest="m")
    p_list.add_argument("--localizable", action="store_true",
                        help="only terns with a unique position operator")
    p_list.set_defaults(func=cmd_list)

    p_verify = sub.add_parser("verify", help="run the check suites")
    p_verify.add_argument("spec")
    p_verify.add_argument("--json", action="store_true")
    p_verify.add_argument("--mutate", help="test hook, e.g. J3+=p1")
    p_verify.set_defaults(func=cmd_verify)

    p_cert = sub.add_parser("certify", help="no-solution certificates")
    p_cert.add_argument("system",
                        choices=("angular", "angular-derived",
                                 "parity-obstruction",
                                 "unitaryT-obstruction"))
    p_cert.add_argument("--m", type=int, required=True, dest="m")
    p_cert.set_defaults(func=cmd_certify)

    p_report = sub.add_parser("report", help="verify the whole catalog")
    p_report.add_argument("--json", action="store_true")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = resolve_config(args)
        if getattr(args, "json", False):
            config["output"] = "json"
        return args.func(args, config)
    except (UsageError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
