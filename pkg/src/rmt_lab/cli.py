"""``rmt-lab`` command line: run experiments, list the catalog, regenerate
calibration budgets.

Exit codes: 0 when the verdict holds (and any fitted constant is within
its budget), 2 on a violated verdict or an exceeded budget, 1 on usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import __version__
from .experiments import (BUDGET_FACTOR, CALIBRATION_RUNS, CALIBRATION_SEED, LOWER_IS_WORSE,
                          catalog, get, run_config)
from .seeding import as_seed
from .theorems.report import FITTED, VIOLATED, ConfigError, ExperimentConfig

EXIT_OK, EXIT_USAGE, EXIT_VIOLATED = 0, 1, 2


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def load_calibration(path=None) -> dict:
    if path is None:
        text = resources.files("rmt_lab").joinpath("data/calibration.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def check_budget(report, calibration) -> str | None:
    """Message when a fitted constant falls outside its shipped budget."""
    v = report.verdict
    entry = calibration.get("budgets", {}).get(report.config["name"])
    if v.kind != FITTED or entry is None or v.value is None or v.details.startswith("report only"):
        return None
    b = entry["budget"]
    if entry["direction"] == "max" and v.value > b:
        return f"fitted constant {v.value:.6g} exceeds calibration budget {b:.6g}"
    if entry["direction"] == "min" and v.value < b:
        return f"fitted constant {v.value:.6g} is below calibration floor {b:.6g}"
    return None


def read_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    # a run manifest carries its config under "config"
    if "tool" in data and isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def cmd_run(args) -> int:
    started = _now()
    try:
        data = read_config(args.config)
        if args.seed is not None:
            data = {**data, "seed": args.seed}
        cfg = ExperimentConfig.from_dict(data)
        exp = get(cfg.name)
        report = exp.run(cfg, args.threads)
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"rmt-lab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    calibration = load_calibration(args.calibration)
    budget_msg = check_budget(report, calibration)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    json_path, csv_path = out / f"{cfg.name}.json", out / f"{cfg.name}.csv"
    json_path.write_text(report.to_json())
    csv_path.write_text(report.to_csv())
    manifest = {
        "tool": "rmt-lab", "version": __version__,
        "config": cfg.to_dict(), "master_seed": cfg.seed.master_seed,
        "started": started, "finished": _now(),
        "outputs": {"report": str(json_path), "trials_csv": str(csv_path)},
        "verdicts": {cfg.name: str(report.verdict)},
        "calibration": {"version": calibration.get("version"), "violation": budget_msg},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    print(f"{cfg.name}: {report.verdict}")
    if report.verdict.kind == VIOLATED:
        print(f"rmt-lab: verdict violated: {report.verdict.details}", file=sys.stderr)
        return EXIT_VIOLATED
    if budget_msg:
        print(f"rmt-lab: budget violation: {budget_msg}", file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_list(args) -> int:
    for line in catalog():
        print(line)
    return EXIT_OK


def calibrate(seed=CALIBRATION_SEED, threads=None) -> dict:
    """Run the designated calibration configurations and derive budgets:
    ``1.5 x`` the largest fitted constant per experiment (or the smallest
    divided by 1.5 where larger constants are better)."""
    fitted = {}
    for i, run in enumerate(CALIBRATION_RUNS):
        cfg = {**run, "seed": as_seed(seed).child(i).to_dict()}
        report = run_config(cfg, threads)
        if report.verdict.kind == VIOLATED:
            raise RuntimeError(f"calibration run {i} ({run['name']}) violated: "
                               f"{report.verdict.details}")
        fitted.setdefault(run["name"], []).append(report.verdict.value)
    budgets = {}
    for name, vals in sorted(fitted.items()):
        if name in LOWER_IS_WORSE:
            budgets[name] = {"fitted": vals, "direction": "min",
                             "budget": min(vals) / BUDGET_FACTOR}
        else:
            budgets[name] = {"fitted": vals, "direction": "max",
                             "budget": max(vals) * BUDGET_FACTOR}
    return {"version": __version__, "master_seed": seed, "factor": BUDGET_FACTOR,
            "runs": CALIBRATION_RUNS, "budgets": budgets}


def cmd_calibrate(args) -> int:
    table = calibrate(args.seed, args.threads)
    text = json.dumps(table, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rmt-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rmt-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment from a JSON config (or manifest)")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="override the master seed")
    r.add_argument("--out", default="rmt-lab-out", help="output directory")
    r.add_argument("--threads", type=int, help="worker threads (default: $RMT_LAB_THREADS or 1)")
    r.add_argument("--calibration", help="budget table (default: the shipped one)")
    r.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list registered experiments")
    ls.set_defaults(func=cmd_list)

    c = sub.add_parser("calibrate", help="regenerate the calibration budget table")
    c.add_argument("--out", help="write here instead of stdout")
    c.add_argument("--seed", type=int, default=CALIBRATION_SEED)
    c.add_argument("--threads", type=int)
    c.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("rmt-lab: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
