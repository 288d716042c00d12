"""Command-line entry point: ``run``, ``summarize`` and ``selftest``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .config import ExperimentConfig, load_config
from .errors import ConfigurationError
from .experiment import MAX_EXCLUSION_RATE, draw_instance, run_experiment
from .optimizer import build_model, describe_model, reduce_phase_wlog
from .report import compare_schemes, format_summary, load_results, write_results


def _parser():
    p = argparse.ArgumentParser(prog="cfminmax", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte-Carlo experiment")
    run.add_argument("--config", type=Path, help="flat key = value config file")
    run.add_argument("--iterations", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--schemes", help="comma-separated subset of minmax,cbf-upa,cbf-ppa")
    run.add_argument("--strategy", choices=["wlog", "bnb"])
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--no-figures", action="store_true")
    run.add_argument("--dump-model", action="store_true",
                     help="write model_dump.txt describing iteration 0's conic program")

    summ = sub.add_parser("summarize", help="recompute the summary of a results directory")
    summ.add_argument("--in", dest="in_dir", type=Path, required=True)
    summ.add_argument("--figures", action="store_true", help="re-render the CDF figures")

    sub.add_parser("selftest", help="run the oracle cross-checks")
    return p


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.iterations is not None:
        changes["n_iterations"] = args.iterations
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.schemes is not None:
        changes["schemes"] = args.schemes
    if args.strategy is not None:
        changes["strategy"] = args.strategy
    return cfg.replace(**changes) if changes else cfg


def _progress(done, total):
    if done == total or done % max(total // 10, 1) == 0:
        print(f"  iteration {done}/{total}", file=sys.stderr)


def cmd_run(args) -> int:
    cfg = _config(args)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.dump_model:
        _, ch, assoc, bounds = draw_instance(cfg, 0)
        model = build_model(ch, assoc, bounds)
        if cfg.strategy == "wlog":
            model = reduce_phase_wlog(model)
        (args.out / "model_dump.txt").write_text(describe_model(model))
    t0 = time.perf_counter()
    ds = run_experiment(cfg, workers=args.workers, progress=_progress)
    summary = write_results(ds, args.out, figures=not args.no_figures)
    if summary is not None:
        print(format_summary(summary))
    rate = ds.exclusion_rate()
    print(f"wall time {time.perf_counter() - t0:.1f} s; excluded {len(ds.excluded())} "
          f"of {len(ds.results)} results; output in {args.out}")
    for r in ds.excluded():
        print(f"  excluded iteration {r.iteration} ({r.scheme}): {r.status} {r.message}")
    if rate > MAX_EXCLUSION_RATE:
        print(f"error: exclusion rate {rate:.1%} exceeds {MAX_EXCLUSION_RATE:.0%}",
              file=sys.stderr)
        return 1
    return 0


def cmd_summarize(args) -> int:
    cfg, samples = load_results(args.in_dir)
    if len(samples) < 2:
        print("error: need at least two schemes in the results directory", file=sys.stderr)
        return 1
    summary = compare_schemes(samples, cfg.eta_w)
    print(format_summary(summary))
    if args.figures:
        from .plotting import plot_all
        plot_all(samples, cfg, args.in_dir)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = True
    for name, passed, detail in run_selftest():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"run": cmd_run, "summarize": cmd_summarize,
                "selftest": cmd_selftest}[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
