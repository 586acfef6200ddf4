"""Command-line interface.

Subcommands: group-info, bessel-table, scan, refine, track, probe, verify,
export-plot, box-search.  Options shared by all subcommands: --config (a
``key = value`` file) and per-key flags that override it.  Exit codes:
0 success, 1 domain/numerical errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bessel import BesselEvaluator
from .errors import (
    AccuracyError,
    DegenerateCollocation,
    DomainError,
    NoOverlap,
    NotConverged,
    UnsupportedLevel,
)
from .groups import build_group, arithmetic_specialization, validate
from .io import (
    RunConfig,
    candidate_to_record,
    export_plot_csv,
    load_config,
    read_records,
    record_to_candidate,
    write_curve,
    write_records,
)
from .search import refine_near, scan_and_refine
from .system import plan_settings
from .tracking import StepPolicy, continue_curve, probe_directions
from .verification import verify_candidate

_ERRORS = (DomainError, UnsupportedLevel, AccuracyError, DegenerateCollocation,
           NotConverged, NoOverlap)


def _parse_params(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise DomainError(f"bad parameter list {text!r}") from exc


def _parse_sector(text: str | None):
    if not text:
        return None
    return tuple(int(part) for part in text.split(","))


def _parse_range(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--eps", type=float, help="truncation target")
    p.add_argument("--oversample", type=float)
    p.add_argument("--y0-factor", type=float, dest="y0_factor")
    p.add_argument("--scan-step", type=float, dest="scan_step")
    p.add_argument("--threads", type=int, dest="thread_count")
    p.add_argument("--output-dir", type=Path, dest="output_dir")


def _config_from(args) -> RunConfig:
    overrides = {key: getattr(args, key, None) for key in
                 ("eps", "oversample", "y0_factor", "scan_step", "thread_count",
                  "output_dir")}
    return load_config(args.config, overrides)


def _group_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=("gamma222", "gamma2222"))
    p.add_argument("--params", type=str, help="comma-separated parameters")
    p.add_argument("--q", type=int, help="arithmetic level shortcut")
    p.add_argument("--sector", type=str,
                   help="signs of the elliptic generators, e.g. -1,1,-1")


def _resolve_group(args):
    if args.q is not None:
        family, params, note = arithmetic_specialization(args.q)
        if note:
            print(f"# level {args.q}: {note}", file=sys.stderr)
        return build_group(family, params)
    if not args.family or not args.params:
        raise DomainError("give either --q or both --family and --params")
    return build_group(args.family, _parse_params(args.params))


def _cmd_group_info(args) -> int:
    group = _resolve_group(args)
    report = validate(group)
    print(f"family: {group.family}")
    print(f"params: {', '.join(repr(p) for p in group.params)}")
    print(f"signature: {group.signature}")
    print(f"teichmuller_dim: {group.signature.teichmuller_dim()}")
    for i, (g, pt) in enumerate(zip(group.generators, group.elliptic_points), 1):
        print(f"g{i}: [[{g.a!r}, {g.b!r}], [{g.c!r}, {g.d!r}]] "
              f"fixes {pt.real!r} + {pt.imag!r}i")
    print(f"relation_deviation: {report.max_deviation:.3e}")
    return 0


def _cmd_bessel_table(args) -> int:
    ev = BesselEvaluator(args.r)
    lo, hi = _parse_range(args.u)
    us = np.linspace(lo, hi, args.count)
    vals = ev.eval_many(us)
    out = sys.stdout if args.output is None else open(args.output, "w")
    try:
        out.write("R,u,scaled_value\n")
        for u, v in zip(us, vals):
            out.write(f"{args.r!r},{u!r},{v!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _candidate_records(cands, group, cfg, args):
    records = []
    for cand in cands:
        ver = {}
        if args.q is not None:
            _, _, note = arithmetic_specialization(args.q)
            x_shift = 1.0 / 6.0 if args.q == 9 else 0.0
            ver = verify_candidate(cand, level=args.q, x_shift=x_shift).to_dict()
        records.append(candidate_to_record(cand, ver))
    return records


def _cmd_scan(args) -> int:
    cfg = _config_from(args)
    group = _resolve_group(args)
    lo, hi = _parse_range(args.r)
    settings = plan_settings(group, hi, eps=cfg.eps, oversample=cfg.oversample,
                             y0_factor=cfg.y0_factor,
                             sector=_parse_sector(args.sector))
    cands = scan_and_refine(group, lo, hi, args.step or cfg.scan_step,
                            settings, threads=cfg.thread_count)
    records = _candidate_records(cands, group, cfg, args)
    out = args.output or (cfg.output_dir / "candidates.jsonl")
    write_records(out, records)
    print(f"{len(records)} candidate(s) -> {out}")
    return 0


def _cmd_refine(args) -> int:
    cfg = _config_from(args)
    group = _resolve_group(args)
    settings = plan_settings(group, args.r_near + 0.55, eps=cfg.eps,
                             oversample=cfg.oversample, y0_factor=cfg.y0_factor,
                             sector=_parse_sector(args.sector))
    cand = refine_near(group, args.r_near, window=args.window,
                       settings=settings)
    records = _candidate_records([cand], group, cfg, args)
    out = args.output or (cfg.output_dir / "candidates.jsonl")
    write_records(out, records)
    print(f"R = {cand.R!r} residual = {cand.residual:.3e} parity = {cand.parity}")
    print(f"1 candidate -> {out}")
    return 0


def _load_start(args, cfg):
    if args.start:
        records = read_records(args.start)
        return record_to_candidate(records[args.index])
    group = _resolve_group(args)
    settings = plan_settings(group, args.r_near + 0.55, eps=cfg.eps,
                             oversample=cfg.oversample, y0_factor=cfg.y0_factor,
                             sector=_parse_sector(args.sector))
    return refine_near(group, args.r_near, settings=settings)


def _cmd_track(args) -> int:
    cfg = _config_from(args)
    start = _load_start(args, cfg)
    direction = _parse_params(args.direction)
    sector = _parse_sector(args.sector)
    if sector is None and start.settings is not None:
        sector = start.settings.sector
    curve = continue_curve(
        start, direction, policy=cfg.step_policy(), max_steps=args.max_steps,
        eps=cfg.eps, sector=sector)
    out = args.output or (cfg.output_dir / "curve.jsonl")
    write_curve(out, curve)
    print(f"{len(curve.points)} point(s), termination={curve.termination} -> {out}")
    return 0


def _cmd_probe(args) -> int:
    cfg = _config_from(args)
    start = _load_start(args, cfg)
    sector = _parse_sector(args.sector)
    if sector is None and start.settings is not None:
        sector = start.settings.sector
    lines = probe_directions(start, angular_resolution=args.resolution,
                             eps=cfg.eps, sector=sector)
    print(json.dumps({"tangent_lines": len(lines),
                      "angles_deg": [math.degrees(a) for a in lines]}))
    return 0


def _cmd_verify(args) -> int:
    cfg = _config_from(args)
    start = _load_start(args, cfg)
    x_shift = 1.0 / 6.0 if args.q == 9 else 0.0
    report = verify_candidate(start, level=args.q, x_shift=x_shift,
                              with_eisenstein=args.eisenstein)
    record = candidate_to_record(start, report.to_dict())
    out = args.output or (cfg.output_dir / "verified.jsonl")
    write_records(out, [record])
    print(json.dumps(report.to_dict()))
    return 0


def _cmd_export_plot(args) -> int:
    rows = export_plot_csv(args.curve, args.output)
    print(f"{rows} row(s) -> {args.output}")
    return 0


def _cmd_box_search(args) -> int:
    cfg = _config_from(args)
    a_lo, a_hi = _parse_range(args.a)
    b_lo, b_hi = _parse_range(args.b)
    r_lo, r_hi = _parse_range(args.r)
    sector = _parse_sector(args.sector)
    records = []
    out = args.output or (cfg.output_dir / "box.jsonl")
    for a in np.arange(a_lo, a_hi + 1e-12, args.a_step):
        for b in np.arange(b_lo, b_hi + 1e-12, args.b_step):
            try:
                group = build_group("gamma222", (a, b))
                settings = plan_settings(group, r_hi, eps=cfg.eps,
                                         oversample=cfg.oversample,
                                         y0_factor=cfg.y0_factor, sector=sector)
                cands = scan_and_refine(group, r_lo, r_hi, cfg.scan_step,
                                        settings, threads=cfg.thread_count)
            except _ERRORS as exc:
                print(f"# ({a:.4f},{b:.4f}): {exc}", file=sys.stderr)
                continue
            records.extend(candidate_to_record(c) for c in cands)
            write_records(out, records)
            print(f"({a:.4f},{b:.4f}): {len(cands)} candidate(s)")
    print(f"{len(records)} record(s) -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maassforms",
        description="Locate and deform Maass cusp forms on one-cusp groups")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group-info", help="print a presentation and its checks")
    _group_args(p)
    _add_common(p)
    p.set_defaults(func=_cmd_group_info)

    p = sub.add_parser("bessel-table", help="CSV table of scaled K_{iR}(u)")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--u", type=str, required=True, help="lo:hi")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    p.set_defaults(func=_cmd_bessel_table)

    p = sub.add_parser("scan", help="scan an R window and refine all dips")
    _group_args(p)
    p.add_argument("--r", type=str, required=True, help="lo:hi")
    p.add_argument("--step", type=float)
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("refine", help="refine the eigenvalue nearest --r-near")
    _group_args(p)
    p.add_argument("--r-near", type=float, required=True, dest="r_near")
    p.add_argument("--window", type=float, default=0.02)
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    p.set_defaults(func=_cmd_refine)

    def _start_args(p):
        _group_args(p)
        p.add_argument("--start", type=Path, help="candidate record file")
        p.add_argument("--index", type=int, default=0)
        p.add_argument("--r-near", type=float, default=0.0, dest="r_near")

    p = sub.add_parser("track", help="continue a candidate along a direction")
    _start_args(p)
    p.add_argument("--direction", type=str, required=True)
    p.add_argument("--max-steps", type=int, default=50, dest="max_steps")
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    p.set_defaults(func=_cmd_track)

    p = sub.add_parser("probe", help="count tangent directions at a candidate")
    _start_args(p)
    p.add_argument("--resolution", type=float, default=15.0)
    _add_common(p)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("verify", help="run the verification checks")
    _start_args(p)
    p.add_argument("--eisenstein", action="store_true")
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("export-plot", help="curve JSON-lines -> CSV")
    p.add_argument("curve", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(func=_cmd_export_plot)

    p = sub.add_parser("box-search",
                       help="long-running (a,b,R) box census on gamma222")
    p.add_argument("--a", type=str, required=True, help="lo:hi")
    p.add_argument("--b", type=str, required=True, help="lo:hi")
    p.add_argument("--r", type=str, required=True, help="lo:hi")
    p.add_argument("--a-step", type=float, default=0.05, dest="a_step")
    p.add_argument("--b-step", type=float, default=0.02, dest="b_step")
    p.add_argument("--sector", type=str)
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    p.set_defaults(func=_cmd_box_search)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
