"""Command line entry point: ``hyperqaoa {generate,run,aggregate,report,magic}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .campaign import (
    FAMILIES,
    RECORDS_FILE,
    CampaignConfig,
    ConfigError,
    build_instances,
    desk_config,
    magic_config,
    paper_scale_config,
    read_records,
    run_campaign,
    write_instance,
)
from .report import METRICS, aggregate, report, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _str_list(text: str) -> list[str]:
    return [p.strip().lower() for p in text.split(",") if p.strip()]


def _add_campaign_flags(sp: argparse.ArgumentParser, with_family: bool = True) -> None:
    if with_family:
        sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--config", type=Path, help="JSON file with CampaignConfig fields")
    sp.add_argument("--n", type=_int_list, help="problem sizes, e.g. 4-8 or 4,6,8")
    sp.add_argument("--k", type=int)
    sp.add_argument("--p", type=_int_list, help="layer counts, e.g. 1-3")
    sp.add_argument("--instances", type=int, help="instances per size (random families)")
    sp.add_argument("--schemes", type=_str_list)
    sp.add_argument("--inits", type=_str_list)
    sp.add_argument("--optimizers", type=_str_list)
    sp.add_argument("--seeds", type=int, help="replicas per cell")
    sp.add_argument("--seed", type=int, help="master seed")
    sp.add_argument("--wrap", action=argparse.BooleanOptionalAction, default=None)
    sp.add_argument("--paper-scale", action="store_true")
    sp.add_argument("--xtol", type=float)
    sp.add_argument("--ftol", type=float)
    sp.add_argument("--gtol", type=float)
    sp.add_argument("--fd-step", type=float)
    sp.add_argument("--maxiter", type=int)
    sp.add_argument("--out", type=Path, required=True)
    sp.add_argument("--jobs", type=int, default=1)


def _campaign_from_args(args, base: CampaignConfig) -> CampaignConfig:
    cfg = CampaignConfig.load(args.config) if args.config else base
    overrides = {
        "n_values": args.n,
        "k": args.k,
        "p_values": args.p,
        "instance_count": args.instances,
        "schemes": args.schemes,
        "inits": args.inits,
        "optimizers": args.optimizers,
        "seeds": args.seeds,
        "master_seed": args.seed,
        "wrap": args.wrap,
        "xtol": args.xtol,
        "ftol": args.ftol,
        "gtol": args.gtol,
        "fd_step": args.fd_step,
        "maxiter": args.maxiter,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, out_dir=str(args.out), jobs=args.jobs, **overrides)


def _emit_reports(out: Path, kinds=METRICS) -> None:
    records = read_records(out / RECORDS_FILE)
    for kind in kinds:
        rows = aggregate(records, kind)
        if kind == "magic" and not rows:
            continue
        report(rows, kind, out / "report")


def _progress(rec) -> None:
    status = rec.error or f"ar={rec.ar if rec.ar is None else round(rec.ar, 4)} nfev={rec.nfev}"
    logging.getLogger("hyperqaoa").info(
        "%s %s p=%d %s %s: %s", rec.problem_id, rec.scheme, rec.p, rec.init, rec.optimizer, status
    )


def cmd_generate(args) -> int:
    family = args.family or "cyclic"
    cfg = (paper_scale_config if args.paper_scale else desk_config)(family)
    cfg = _campaign_from_args(args, cfg)
    cfg.validate()
    for inst in build_instances(cfg):
        path = write_instance(inst, Path(cfg.out_dir))
        print(path)
    return EXIT_OK


def _run(cfg: CampaignConfig) -> int:
    cfg.validate()
    records = run_campaign(cfg, progress=_progress)
    out = Path(cfg.out_dir)
    _emit_reports(out)
    failed = sum(1 for r in records if r.error)
    print(f"{len(records)} records in {out / RECORDS_FILE}; {failed} failed")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_run(args) -> int:
    family = args.family or "cyclic"
    base = (paper_scale_config if args.paper_scale else desk_config)(family)
    return _run(_campaign_from_args(args, base))


def cmd_magic(args) -> int:
    return _run(_campaign_from_args(args, magic_config(paper_scale=args.paper_scale)))


def cmd_aggregate(args) -> int:
    records = read_records(args.out / RECORDS_FILE)
    if not records:
        print(f"no records in {args.out / RECORDS_FILE}", file=sys.stderr)
        return EXIT_CONFIG
    for kind in args.metrics:
        path = write_csv(aggregate(records, kind), args.out / "aggregate" / f"{kind}.csv")
        print(path)
    return EXIT_OK


def cmd_report(args) -> int:
    records = read_records(args.out / RECORDS_FILE)
    for kind in args.metrics:
        for path in report(aggregate(records, kind), kind, args.out / "report", args.x):
            print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperqaoa", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="write instance JSON files")
    _add_campaign_flags(sp)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("run", help="run a campaign and write records + reports")
    _add_campaign_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("magic", help="magic-study campaign (Powell + TQA, SA/KA/MA)")
    _add_campaign_flags(sp, with_family=False)
    sp.set_defaults(func=cmd_magic)

    for name, func in (("aggregate", cmd_aggregate), ("report", cmd_report)):
        sp = sub.add_parser(name, help=f"{name} an existing records.jsonl")
        sp.add_argument("--out", type=Path, required=True)
        sp.add_argument("--metrics", type=_str_list, default=list(METRICS))
        if name == "report":
            sp.add_argument("--x", choices=("n", "p"))
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
