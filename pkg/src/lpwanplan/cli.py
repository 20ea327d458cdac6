"""Command-line front end.

Every subcommand prints a list of records. ``--format table`` rounds to
six significant digits for reading; ``csv`` and ``json`` keep full
precision. The default format can be set with ``LPWANPLAN_FORMAT``.

Exit status: 0 success, 1 domain error, 2 usage error, 3 when a
compliance check does not pass.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import capacity, costmodel, harmonize, mcsim, propagation, techplans
from .regulation import compliance, profiles

FORMATS = ("table", "csv", "json")
FORMAT_ENV = "LPWANPLAN_FORMAT"
EXIT_DOMAIN, EXIT_USAGE, EXIT_NONCOMPLIANT = 1, 2, 3


class Output:
    """Records plus the column order to show them in."""

    def __init__(self, records, columns=None, document=None, status=0):
        self.records = list(records)
        self.columns = columns or (list(self.records[0]) if self.records else [])
        # json emits this instead of the records when set
        self.document = document
        self.status = status


def _cell(value):
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{value:.6g}"
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def render(out, fmt):
    if fmt == "json":
        doc = out.document if out.document is not None else out.records
        return json.dumps(_json_safe(doc), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out.columns)
        for r in out.records:
            w.writerow([_csv_cell(r.get(c)) for c in out.columns])
        return buf.getvalue()
    rows = [[_cell(r.get(c)) for c in out.columns] for r in out.records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(out.columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(out.columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing helpers


def _triple(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected D,P,F, got {text!r}")
    return tuple(float(p) for p in parts)


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected P,F, got {text!r}")
    return tuple(float(p) for p in parts)


def _grid(text):
    """``a,b,c`` lists values; ``start:stop:count`` spaces them evenly."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(x) for x in np.linspace(float(start), float(stop), int(count))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a,b,c or start:stop:count, got {text!r}") from None


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


# ---------------------------------------------------------------- commands


def cmd_region(args):
    if args.action == "list":
        return Output(
            [{"region": p.region_id, "name": p.name,
              "bands_mhz": [[b.lo / 1e6, b.hi / 1e6] for b in p.bands],
              "spurious_dbuv_m": p.spurious_limit_dbuv_m}
             for p in profiles.load_profiles(args.profiles)],
        )
    if args.region is None:
        raise ValueError("region show needs a region id")
    p = profiles.get_profile(args.region, profiles.load_profiles(args.profiles))
    doc = p.to_dict()
    doc["region_id"] = p.region_id
    return Output([{"field": k, "value": doc[k]} for k in doc], ["field", "value"], document=doc)


def cmd_comply(args):
    prof = profiles.get_profile(args.region, profiles.load_profiles(args.profiles))
    schedule = compliance.load_schedule(args.schedule)
    if args.variant is not None:
        schedule = compliance.TransmissionSchedule(
            schedule.events, schedule.channel_count, args.variant)
    report = compliance.check_schedule(prof, schedule)
    rows = [v.to_dict() for v in report.verdicts]
    rows.append({"rule": "overall", "verdict": report.overall})
    return Output(
        rows,
        ["rule", "measured", "limit", "unit", "verdict", "note"],
        document=report.to_dict(),
        status=0 if report.overall == "pass" else EXIT_NONCOMPLIANT,
    )


def cmd_coverage(args):
    if args.action == "scale":
        d = propagation.scale_range(args.base, args.to)
        return Output([{"d_km": d, "p_dbm": args.to[0], "f_mhz": args.to[1]}])
    missing = [f for f in ("tx", "freq", "sens") if getattr(args, f) is None]
    if missing:
        raise _Usage(f"coverage needs --{' --'.join(missing)}")
    budget = propagation.LinkBudget(args.tx, args.sens, args.freq)
    return Output([{"budget_db": budget.budget_db, "d_km": propagation.max_range(budget)}])


def _density_record(e):
    rec = e.to_dict()
    rec["technology"] = e.technology.upper()
    rec["region"] = e.region.upper()
    return rec


DENSITY_COLUMNS = ["technology", "region", "alpha", "r", "d_km", "c_bps", "n_rho", "c_rho"]


def cmd_density(args):
    if args.action == "table":
        rows = techplans.density_table()
    else:
        if args.tech is None or args.region is None:
            raise _Usage("density needs --tech and --region (or the 'table' action)")
        rows = [techplans.density_estimate(args.tech, args.region)]
    return Output([_density_record(e) for e in rows], DENSITY_COLUMNS)


def cmd_capacity(args):
    if args.action == "cdf":
        return Output([{"d_km": args.d, "h_km": args.h,
                        "cdf": capacity.distance_cdf(args.d, args.h)}])
    if args.action == "nc":
        return Output([{"d_km": args.d, "h_km": args.h, "mode": args.mode,
                        "n_c": capacity.expected_concurrent_transmitters(args.d, args.h, args.mode)}])
    return Output([{"d_km": args.d, "limit_per_km2": capacity.asymptotic_channel_density(args.d)}])


def cmd_mc(args):
    if args.action in ("cdf", "admit") and args.d is None:
        raise _Usage(f"mc {args.action} needs --d")
    cfg = mcsim.SimConfig(
        side=args.h,
        exclusion=args.d if args.d is not None else args.h,
        n=args.n,
        seed=args.seed,
        mode=args.mode,
        workers=args.workers,
    )
    if args.action == "cdf":
        result = mcsim.empirical_distance_cdf(cfg, args.d)
    elif args.action == "mean":
        result = mcsim.mean_pair_distance(cfg)
    else:
        result = mcsim.simulate_admission(cfg)
    doc = result.to_dict()
    cols = ["estimate", "se", "n", "seed", "mode"]
    cols += [c for c in ("density", "saturated") if c in doc]
    return Output([doc], cols, document=doc)


def cmd_harmonize(args):
    studies = harmonize.builtin_studies() if args.studies is None \
        else harmonize.load_studies(args.studies)
    rows = []
    for s in studies:
        h = harmonize.harmonize(s)
        rows.append({"study": h.label, "t_msg_s": h.t_msg_s, "s_msg_bytes": h.s_msg_bytes,
                     "n": h.n, "d_km": h.d_km, "c_bps": h.c_bps,
                     "n_rho": h.n_rho, "c_rho": h.c_rho})
    return Output(rows, list(harmonize.CSV_COLUMNS))


def cmd_cost(args):
    scenario = costmodel.DeploymentScenario(
        area=args.area, devices=args.devices, gateway_cost=args.xgw,
        device_cost=args.xdev, channels=args.channels,
    )
    if args.action == "min":
        points = [costmodel.min_cost(scenario, args.d_grid, args.alpha_grid, args.rounding)]
    else:
        points = costmodel.cost_surface(scenario, args.d_grid, args.alpha_grid, args.rounding)
    rows = [{"d_km": p.radius, "alpha": p.duty_cycle, "gateways": p.gateways,
             "cost": p.total_cost, "feasible": p.feasible} for p in points]
    return Output(rows, list(costmodel.CSV_COLUMNS))


class _Usage(Exception):
    pass


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS,
                        help=f"output format (default: ${FORMAT_ENV} or table)")
    common.add_argument("--output", "-o", default=argparse.SUPPRESS,
                        help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="lpwanplan", description="LPWAN capacity planning and spectrum compliance.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("region", parents=[common], help="list or show region profiles")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("region", nargs="?")
    p.add_argument("--profiles", help="profile JSON (default: built-in)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("comply", parents=[common], help="check a schedule against a region")
    p.add_argument("--region", required=True)
    p.add_argument("--schedule", required=True, help="schedule JSON file")
    p.add_argument("--variant", help="operating variant, e.g. SCS, LCS, single, dialogue")
    p.add_argument("--profiles", help="profile JSON (default: built-in)")
    p.set_defaults(func=cmd_comply)

    p = sub.add_parser("coverage", parents=[common], help="free-space coverage radius")
    p.add_argument("--tx", type=float, help="transmit power, dBm")
    p.add_argument("--freq", type=float, help="carrier, MHz")
    p.add_argument("--sens", type=float, help="receiver sensitivity, dBm")
    p.set_defaults(func=cmd_coverage, action=None)
    csub = p.add_subparsers(dest="action")
    s = csub.add_parser("scale", parents=[common], help="rescale an anchor radius")
    s.add_argument("--base", type=_triple, required=True, metavar="D,P,F")
    s.add_argument("--to", type=_pair, required=True, metavar="P,F")

    p = sub.add_parser("density", parents=[common], help="rural density estimates")
    p.add_argument("--tech")
    p.add_argument("--region")
    p.set_defaults(func=cmd_density, action=None)
    dsub = p.add_subparsers(dest="action")
    dsub.add_parser("table", parents=[common], help="every tabulated technology/region")

    p = sub.add_parser("capacity", parents=[common], help="closed-form geometry")
    csub = p.add_subparsers(dest="action", required=True)
    s = csub.add_parser("cdf", parents=[common])
    s.add_argument("--d", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s = csub.add_parser("nc", parents=[common])
    s.add_argument("--d", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--mode", choices=("geometric", "paper"), default="geometric")
    s = csub.add_parser("limit", parents=[common])
    s.add_argument("--d", type=float, required=True)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo checks")
    p.add_argument("action", choices=("cdf", "mean", "admit"))
    p.add_argument("--h", type=float, required=True, help="square side, km")
    p.add_argument("--d", type=float, help="distance / exclusion radius, km")
    p.add_argument("--n", type=int, help="pairs, or stream length for admit")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--mode", choices=mcsim.MODES, default="paper-literal")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("harmonize", parents=[common], help="literature studies on common metrics")
    p.add_argument("--studies", help="study JSON (default: built-in)")
    p.set_defaults(func=cmd_harmonize)

    p = sub.add_parser("cost", parents=[common], help="deployment cost surface")
    p.add_argument("action", choices=("surface", "min"))
    fig = costmodel.REFERENCE_SCENARIO
    p.add_argument("--area", type=float, default=fig.area, help="km^2")
    p.add_argument("--devices", type=float, default=fig.devices)
    p.add_argument("--xgw", type=float, default=fig.gateway_cost, help="cost per gateway")
    p.add_argument("--xdev", type=float, default=fig.device_cost, help="cost per device")
    p.add_argument("--channels", type=int, default=fig.channels)
    p.add_argument("--d-grid", type=_grid, default=_grid("0.1:2.0:20"))
    p.add_argument("--alpha-grid", type=_grid, default=_grid("0.0001:0.01:100"))
    p.add_argument("--rounding", choices=costmodel.ROUNDING, default="ceil")
    p.set_defaults(func=cmd_cost)
    return parser


def _format(args):
    fmt = getattr(args, "format", None) or os.environ.get(FORMAT_ENV) or "table"
    if fmt not in FORMATS:
        raise _Usage(f"{FORMAT_ENV}={fmt!r} is not one of {', '.join(FORMATS)}")
    return fmt


DOMAIN_ERRORS = (ValueError, LookupError, OSError, ArithmeticError)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        fmt = _format(args)
        out = args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"lpwanplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"lpwanplan: {msg}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(out, fmt)
    path = getattr(args, "output", None)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
