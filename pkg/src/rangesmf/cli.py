"""Command-line entry point: ``rangesmf {simulate,montecarlo,demo,validate-config}``.

Exit status is 0 only when every agent-step kept its true state inside the
posterior and no step aborted; configuration problems exit with 2.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
from pathlib import Path

from .config import dump_config, load_config
from .errors import ConfigError
from .sim import run_episode, run_monte_carlo

log = logging.getLogger("rangesmf")

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_CONFIG = 2

RATIO_HEADER = ("agent", "mean_ratio", "containment_rate", "runs")


def _apply_overrides(cfg, args):
    changes = {}
    for flag, key in (("seed", "seed"), ("runs", "runs"), ("sectors", "sectors"), ("steps", "steps")):
        val = getattr(args, flag, None)
        if val is not None:
            changes[key] = val
    return dataclasses.replace(cfg, **changes) if changes else cfg


def write_step_log(run_log, path: Path) -> None:
    with open(path, "w") as fh:
        for rec in run_log.records:
            fh.write(json.dumps(rec.to_dict()) + "\n")


def simulate_summary(cfg, run_log) -> dict:
    breaches = [{"k": r.k, "agent": r.agent} for r in run_log.records if not r.contained]
    return {
        "seed": run_log.seed,
        "steps": cfg.steps,
        "agents": cfg.n_agents,
        "records": len(run_log.records),
        "containment_rate": run_log.containment_rate,
        "aborted": run_log.aborted,
        "abort_reason": run_log.abort_reason,
        "breaches": breaches,
    }


def cmd_simulate(cfg, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    run_log = run_episode(cfg, cfg.seed)
    write_step_log(run_log, out / "steps.jsonl")
    summary = simulate_summary(cfg, run_log)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    ok = not run_log.aborted and summary["containment_rate"] == 1.0
    if not ok:
        log.error("containment breach or aborted step: %d breaches, aborted=%s",
                  len(summary["breaches"]), run_log.aborted)
    return EXIT_OK if ok else EXIT_BREACH


def ratio_table(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RATIO_HEADER)
    for a in summary.agents[1:]:
        w.writerow((a.agent + 1, repr(a.mean_ratio), repr(a.containment_rate), a.runs))
    return buf.getvalue()


def cmd_montecarlo(cfg, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    summary = run_monte_carlo(cfg)
    (out / "ratios.csv").write_text(ratio_table(summary))
    (out / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2) + "\n")
    for a in summary.agents:
        log.info("UAV%d ratio=%.4f containment=%.4f", a.agent + 1, a.mean_ratio, a.containment_rate)
    return EXIT_OK if summary.all_contained else EXIT_BREACH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rangesmf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_default=None):
        sp.add_argument("--config", default=config_default, required=config_default is None,
                        help="JSON config path or preset name (paper_sec4, demo)")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--runs", type=int)
        sp.add_argument("--sectors", type=int)
        sp.add_argument("--steps", type=int)

    common(sub.add_parser("simulate", help="one seeded episode, per-step JSON lines"))
    common(sub.add_parser("montecarlo", help="many episodes, per-agent ratio table"))
    common(sub.add_parser("demo", help="simulate the small shipped demo preset"), config_default="demo")
    v = sub.add_parser("validate-config", help="load, validate and echo a config")
    v.add_argument("--config", required=True)
    return p


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("RANGESMF_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "validate-config":
            sys.stdout.write(dump_config(cfg))
            return EXIT_OK
        cfg = _apply_overrides(cfg, args)
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    if args.command == "montecarlo":
        return cmd_montecarlo(cfg, out)
    return cmd_simulate(cfg, out)


if __name__ == "__main__":
    sys.exit(main())
