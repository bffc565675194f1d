"""Command-line harness: ``tailsort <subcommand> [flags]``.

Every output starts with a metadata header (config, version, seed, argv);
CSV files carry it as a single ``# {...}`` line. Floats are printed with 12
significant digits and exact probabilities as ``count/n**n``.

Exit codes: 0 success, 2 bad configuration, 3 depth cap or oracle size exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__, bounds, estimator, kernels
from .errors import DepthCapExceeded, DomainError, SizeError
from .trie import DEFAULT_DEPTH_CAP, default_k

DEFAULT_SEED = 20240521
SEED_ENV = "TAILSORT_SEED"

log = logging.getLogger("tailsort")


class ConfigError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer")


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return fmt(x)
        return float(f"{x:.12g}")
    return x


def render(meta: dict, rows: list[dict], fmt_name: str, payload: dict | None = None) -> str:
    if fmt_name == "json":
        doc = {"metadata": meta}
        if payload is not None:
            doc.update(payload)
        else:
            doc["rows"] = [{k: _json_value(v) for k, v in r.items()} for r in rows]
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        cols = list(rows[0].keys())
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r[c]) for c in cols])
    return buf.getvalue()


def read_output(path: str) -> tuple[dict, list[dict]]:
    """Parse a file written by this CLI back into (metadata, rows as strings)."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return doc["metadata"], doc.get("rows", doc.get("distribution"))
    lines = text.splitlines()
    meta = json.loads(lines[0][2:])
    rows = list(csv.DictReader(lines[1:]))
    return meta, rows


# -- subcommands ---------------------------------------------------------------


def _n_list(args) -> list[int]:
    if args.n_list:
        try:
            out = [int(x) for x in args.n_list.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"bad --n-list {args.n_list!r}")
    elif args.n is not None:
        out = [args.n]
    else:
        raise ConfigError("need --n or --n-list")
    if any(n < 1 for n in out):
        raise ConfigError("every n must be positive")
    return out


def _need_n(args) -> int:
    if args.n is None or args.n < 1:
        raise ConfigError("--n must be a positive integer")
    return args.n


def cmd_sort_cost(args):
    n = _need_n(args)
    variants = ("b2", "blogb") if args.variant in (None, "both") else (args.variant,)
    rows = []
    for v in variants:
        out = kernels.bucket_batch(n, v, args.seed, args.trials, args.threads)
        total = out["comparisons"] + out["moves"]
        ratio = total / (n + out["f"])
        rows.append(
            {
                "n": n,
                "variant": v,
                "trials": args.trials,
                "mean_comparisons": float(out["comparisons"].mean()),
                "mean_moves": float(out["moves"].mean()),
                "mean_total_units": float(total.mean()),
                "max_total_units": int(total.max()),
                "mean_f": float(out["f"].mean()),
                "ratio_min": float(ratio.min()),
                "ratio_max": float(ratio.max()),
            }
        )
    return rows, None


def cmd_tail_estimate(args):
    n = _need_n(args)
    if args.kind is None:
        raise ConfigError("--kind is required")
    if args.threshold is None:
        if args.c is None or args.kind not in estimator.ANALYTIC_MEANS:
            raise ConfigError("give --threshold, or --c for a kind with an analytic mean (f_tail)")
        threshold = estimator.ANALYTIC_MEANS[args.kind](n) + args.c * n
    else:
        threshold = args.threshold
    e = estimator.Experiment(args.kind, n, threshold, k=args.k, depth=args.depth, c=args.c)
    est = estimator.estimate_tail(e, args.trials, args.seed, args.threads, args.depth_cap)
    row = {
        "kind": e.kind,
        "n": n,
        "c": "" if args.c is None else args.c,
        "threshold": float(threshold),
        "trials": est.trials,
        "successes": est.successes,
        "p_hat": est.p_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "rate_hat": est.rate_hat,
        "censored": est.censored,
    }
    return [row], None


def cmd_rate_scan(args):
    if args.kind is None:
        raise ConfigError("--kind is required")
    if args.c is None:
        raise ConfigError("--c is required")
    rows = estimator.rate_scan(
        args.kind, _n_list(args), args.c, args.trials, args.seed, args.threads, args.pilot_factor, args.k
    )
    return rows, None


def cmd_trie_stats(args):
    rows = []
    for n in _n_list(args):
        k = default_k(n) if args.k is None else args.k
        depth = default_k(n) if n & (n - 1) == 0 else -1
        out = kernels.trie_batch(n, k, depth, args.seed, args.trials, args.threads, args.depth_cap)
        lg = math.log2(n)
        p0, pk = out["p0"], out["pk"]
        violations = int(np.count_nonzero(p0 > n * lg + pk + 1e-9))
        if depth >= 0 and k == depth:
            violations += int(np.count_nonzero(pk < out["g"] - 1e-9))
            violations += int(np.count_nonzero(p0 < n * lg - 1e-9))
        rows.append(
            {
                "n": n,
                "k": k,
                "trials": args.trials,
                "mean_pk": float(pk.mean()),
                "max_pk": int(pk.max()),
                "mean_p0": float(p0.mean()),
                "p0_excess_per_n": float((p0.mean() - n * lg) / n),
                "chain_violations": violations,
            }
        )
    return rows, None


def cmd_delta_trace(args):
    n = _need_n(args)
    rep = estimator.delta_domination_experiment(n, args.k, args.trials, args.seed, args.threads, depth_cap=args.depth_cap)
    rows = [
        {"n": n, "k": rep.k, "runs": rep.runs, "mean_excess": rep.mean_excess, "max_delta": rep.max_delta, **r}
        for r in rep.rows
    ]
    return rows, None


def cmd_dist_equal(args):
    n = _need_n(args)
    if n & (n - 1):
        raise ConfigError("dist-equal needs a power-of-two --n")
    res = estimator.distribution_equality_test(n, args.trials, args.seed, args.threads, depth_cap=args.depth_cap)
    return [
        {"n": n, "trials": args.trials, "statistic": res.statistic, "df": res.df, "p_value": res.p_value, "cells": res.cells}
    ], None


_DELTA_GRID = (0.1, 0.25, 0.5, 1.0, 2.0, math.e, 5.0, 10.0)


def cmd_bounds_table(args):
    variants = bounds.VARIANTS if args.variant is None else (args.variant,)
    if args.variant is not None and args.variant not in bounds.VARIANTS:
        raise ConfigError(f"unknown variant {args.variant!r}")
    mu = 1.0 if args.mu is None else args.mu
    deltas = _DELTA_GRID if args.delta is None else (args.delta,)
    rows = []
    for v in variants:
        for d in deltas:
            q = bounds.BoundQuery(v, mu, d)
            try:
                b = bounds.chernoff_bound(q)
            except DomainError:
                if args.variant is not None and args.delta is not None:
                    raise
                continue
            rows.append({"variant": v, "mu": mu, "delta": d, "bound": b})
    return rows, None


def cmd_oracle_exact(args):
    n = _need_n(args)
    dist = estimator.exact_f_distribution(n)
    rows = [{"f": v, "probability": p, "tail": str(dist.tail(v))} for v, p in dist.as_rationals().items()]
    return rows, {"distribution": {str(v): p for v, p in dist.as_rationals().items()}}


def cmd_qs_compare(args):
    n = _need_n(args)
    if n < 2 or n & (n - 1):
        raise ConfigError("qs-compare needs a power-of-two --n >= 2")
    depth = default_k(n)
    qs = kernels.quicksort_batch(n, depth, args.seed, args.trials, args.threads)["event_z"]
    bk = kernels.occupancy_batch(n, args.seed, args.trials, args.threads)["left"] == 0
    rows = []
    for arm, hits, ref in (("quicksort", qs, 1.0 / (2 * n)), ("bucket", bk, 2.0**-n)):
        est = estimator.tail_estimate(int(np.count_nonzero(hits)), args.trials)
        rows.append(
            {
                "arm": arm,
                "n": n,
                "depth": depth,
                "trials": args.trials,
                "successes": est.successes,
                "p_hat": est.p_hat,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
                "reference": ref,
            }
        )
    return rows, None


COMMANDS = {
    "sort-cost": (cmd_sort_cost, "Bucket Sort operation counts against n + f"),
    "tail-estimate": (cmd_tail_estimate, "Monte Carlo upper-tail probability and rate"),
    "rate-scan": (cmd_rate_scan, "tail rates at mu + c n over a list of n"),
    "trie-stats": (cmd_trie_stats, "excess and external path length summaries"),
    "delta-trace": (cmd_delta_trace, "pooled incremental-trace tail frequencies"),
    "dist-equal": (cmd_dist_equal, "chi-square test: bucket vs trie node occupancy"),
    "bounds-table": (cmd_bounds_table, "Chernoff bound values"),
    "oracle-exact": (cmd_oracle_exact, "exact distribution of f for n <= 12"),
    "qs-compare": (cmd_qs_compare, "left-subtree-empty event: Quick Sort vs Bucket Sort"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--n-list", dest="n_list")
    common.add_argument("--c", type=float)
    common.add_argument("--k", type=int)
    common.add_argument("--variant")
    common.add_argument("--trials", type=int, default=10_000)
    common.add_argument("--seed", type=lambda s: int(s, 0))
    common.add_argument("--depth-cap", dest="depth_cap", type=int, default=DEFAULT_DEPTH_CAP)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--kind", choices=estimator.KINDS)
    common.add_argument("--threshold", type=float)
    common.add_argument("--depth", type=int)
    common.add_argument("--mu", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--pilot-factor", dest="pilot_factor", type=int, default=10)
    common.add_argument("-v", "--verbose", action="store_true", help="log one line per trial block")

    parser = argparse.ArgumentParser(prog="tailsort", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "verbose")}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.seed is None:
            args.seed = default_seed()
        if args.trials < 1:
            raise ConfigError("--trials must be positive")
        if args.threads < 1:
            raise ConfigError("--threads must be positive")
        if args.format is None:
            args.format = "json" if args.subcommand == "oracle-exact" else "csv"
        func = COMMANDS[args.subcommand][0]
        rows, payload = func(args)
    except (ConfigError, DomainError) as exc:
        print(f"tailsort: error: {exc}", file=sys.stderr)
        return 2
    except (DepthCapExceeded, SizeError) as exc:
        print(f"tailsort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"tailsort: error: {exc}", file=sys.stderr)
        return 2

    replay = _strip_out(argv)
    meta = {
        "tool": "tailsort",
        "version": __version__,
        "subcommand": args.subcommand,
        "seed": args.seed,
        "config": _config(args),
        "argv": replay + ["--seed", str(args.seed)],
    }
    text = render(meta, rows, args.format, payload if args.format == "json" else None)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _strip_out(argv):
    """argv without --out and --seed (the resolved seed is appended separately)."""
    out = []
    skip = False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--seed"):
            skip = True
            continue
        if a.startswith(("--out=", "--seed=")):
            continue
        out.append(a)
    return out


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
