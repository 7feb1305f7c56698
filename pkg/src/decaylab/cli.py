"""Command-line entry point.

Subcommands:
    solve  <config>   full run: trajectory, bounds, classification
    bounds <config>   like solve but skips classification
    sweep  <config>   regime sweep over the configured alpha/gamma lists
    eigen  <config>   eigenvalue/eigenfunction export
    verify [suite]    property suites (default: all)
    report <run-dir>  pretty-print a run directory's report.json

Exit codes: 0 success, 1 failed verification or sweep agreement below the
configured threshold, 2 configuration or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .runner import run_eigen, run_solve, run_sweep, run_verify

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decaylab",
        description="numerical laboratory for decay of parabolic problems "
                    "on expanding or shrinking intervals")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--out", default=None,
                        help="output directory (default: from config)")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker processes for sweeps")

    for name, helptext in (("solve", "run a single experiment"),
                           ("bounds", "evaluate decay envelopes only"),
                           ("sweep", "regime map sweep"),
                           ("eigen", "solve the matching eigenproblem")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("config", help="TOML config file")
        add_common(sp)

    sp = sub.add_parser("verify", help="run property suites")
    sp.add_argument("suite", nargs="?", default="all",
                    help="suite name (default: all)")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("report", help="print a run report")
    sp.add_argument("run_dir", help="run directory containing report.json")
    return parser


def _load(args) -> tuple:
    cfg = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        cfg = cfg.with_seed(args.seed)
    out = Path(args.out) if args.out else Path(cfg.output.directory)
    return cfg, out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("solve", "bounds"):
            cfg, out = _load(args)
            report = run_solve(cfg, out,
                               do_classify=None if args.command == "solve" else False)
            print(f"run written to {report.out_dir} (config {report.config_hash})")
            print(f"  t_final={report.summary['t_final']:g} "
                  f"sup_final={report.summary['sup_final']:.6e}")
            for kind, info in report.bound_reports.items():
                word = "ok" if info["violations"] == 0 else \
                    f"{info['violations']} violations"
                print(f"  bound {kind}: {info['checked']} times checked, {word}")
            if report.fit is not None and "tier" in report.fit:
                print(f"  fitted tier: {report.fit['tier']} "
                      f"(predicted {report.prediction['tier']}, "
                      f"agree={report.agree})")
            return 0
        if args.command == "sweep":
            cfg, out = _load(args)
            cells, agree, total = run_sweep(cfg, out, workers=max(1, args.threads))
            print((Path(out) / "sweep_summary.txt").read_text(encoding="utf-8"),
                  end="")
            threshold = cfg.analysis.min_agree_fraction
            if agree < threshold * total:
                print(f"agreement below threshold {threshold:.2f}", file=sys.stderr)
                return 1
            return 0
        if args.command == "eigen":
            cfg, out = _load(args)
            pairs = run_eigen(cfg, out)
            for p in pairs:
                print(f"  n={p.index} eigenvalue={p.eigenvalue!r} "
                      f"sup={p.sup_norm:.8f} l2={p.l2_norm:.8f}")
            print(f"eigen export written to {out}")
            return 0
        if args.command == "verify":
            seed = args.seed if args.seed is not None else 20260401
            results = run_verify(args.suite, seed=seed)
            ok = True
            for r in results:
                status = "pass" if r.passed else "FAIL"
                print(f"{status}  {r.name}: {r.cases} cases, "
                      f"{r.failures} failures ({r.detail})")
                ok = ok and r.passed
            return 0 if ok else 1
        if args.command == "report":
            path = Path(args.run_dir) / "report.json"
            if not path.exists():
                print(f"no report.json under {args.run_dir}", file=sys.stderr)
                return 2
            payload = json.loads(path.read_text(encoding="utf-8"))
            print(json.dumps(payload, indent=2, sort_keys=True))
            return 0
        parser.error(f"unknown command {args.command!r}")
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
