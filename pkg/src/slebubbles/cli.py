"""Command line front end.

Exit codes: 0 success, 1 runtime failure (capped replicas, failed criterion),
2 usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from . import analytic as an
from . import bubbles as bb
from . import harness as hs
from . import markov_path as mkp
from .stable_walk import derive_seed, sample_pair

SUBCOMMANDS = ("criterion", "kappa0", "simulate", "overshoot", "arcsine", "reversal", "domination",
               "markov-path", "sup-criterion", "graph", "bayes-enum", "sweep", "validate")


class RunFailure(RuntimeError):
    def __init__(self, message: str, **counts):
        super().__init__(message)
        self.counts = counts


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slebubbles", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--kappa", type=float)
    p.add_argument("--kappa-grid", help="comma-separated kappa values")
    p.add_argument("--n", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--horizon-cap", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-jump", type=int)
    p.add_argument("--quantities", help="comma-separated: " + ",".join(hs.QUANTITIES))
    p.add_argument("--output", help="output file (default: $%s/<subcommand>.<format> or stdout)" % hs.OUTPUT_ENV)
    p.add_argument("--format", choices=("csv", "json", "dot"))
    p.add_argument("--workers", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--M-cap", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--fast", action="store_true", help="validate: reduced sizes")
    p.add_argument("--only", help="validate: comma-separated criterion numbers")
    return p


def config_from_args(args) -> hs.ExperimentConfig:
    cfg = hs.ExperimentConfig()
    if args.config:
        cfg = hs.ExperimentConfig.from_text(Path(args.config).read_text())
    over = {"subcommand": args.subcommand}
    for f in dataclasses.fields(cfg):
        if f.name == "subcommand":
            continue
        v = getattr(args, f.name, None)
        if v is not None:
            over[f.name] = hs.ExperimentConfig.parse_value(f.name, v) if isinstance(v, str) \
                and f.name in ("kappa_grid", "quantities") else v
    return cfg.replace(**over)


def _emit(cfg, text: str, name: str) -> None:
    path = hs.output_path(cfg, name)
    if path is None:
        sys.stdout.write(text)
    else:
        hs.write_if_changed(path, text)
        print(f"wrote {path}", file=sys.stderr)


def _emit_json(cfg, obj, name: str) -> None:
    _emit(cfg, json.dumps(obj, indent=1, sort_keys=True, default=hs._jsonable) + "\n", name)


def _emit_report(cfg, report: hs.RunReport, name: str) -> None:
    if cfg.format == "json":
        _emit(cfg, report.to_json(), f"{name}.json")
    else:
        _emit(cfg, report.to_csv(), f"{name}.csv")
    bad = [e for e in report.estimates if e.status != "ok"]
    if bad:
        raise RunFailure("some cells did not complete", failures=report.failures,
                         failed_cells=[(e.kappa, e.quantity, e.status) for e in bad])


# --------------------------------------------------------------------------


def cmd_criterion(cfg):
    v = an.criterion_F(cfg.kappa)
    _emit_json(cfg, dataclasses.asdict(v), "criterion.json")


def cmd_kappa0(cfg):
    k0 = an.find_kappa0(cfg.tol)
    _emit_json(cfg, {"kappa0": k0, "tol": cfg.tol, "F_below": an.criterion_F(k0 - 0.01).total,
                     "F_above": an.criterion_F(k0 + 0.01).total}, "kappa0.json")


def cmd_simulate(cfg):
    _emit_report(cfg, hs.sweep(cfg.replace(kappa_grid=())), "simulate")


def cmd_sweep(cfg):
    _emit_report(cfg, hs.sweep(cfg), "sweep")


def cmd_sup_criterion(cfg):
    _emit_report(cfg, hs.sweep(cfg.replace(kappa_grid=(), quantities=("log_sup_gap",))), "sup_criterion")


def cmd_overshoot(cfg):
    est = mkp.estimate_log_overshoot(cfg.kappa, cfg.n, cfg.replicas, cfg.seed, cap=cfg.horizon_cap)
    _emit_json(cfg, {"estimate": est.to_dict(), "analytic": an.overshoot_log_mean(cfg.kappa),
                     "quadrature": an.overshoot_log_mean_quad(cfg.kappa)}, "overshoot.json")


def cmd_arcsine(cfg):
    x, failures = mkp.theta_samples(cfg.kappa, cfg.n, cfg.replicas, cfg.seed, cfg.horizon_cap)
    cdf = np.vectorize(lambda v: an.arcsine_cdf(min(max(v, 1e-300), 1 - 1e-16), cfg.kappa))
    ks = stats.kstest(x, cdf)
    _emit_json(cfg, {"kappa": cfg.kappa, "n": cfg.n, "replicas": len(x), "failures": failures,
                     "ks": ks.statistic, "p_value": ks.pvalue,
                     "mean_log": float(np.log(x[x > 0]).mean()),
                     "analytic_mean_log": an.expected_log_arcsine(cfg.kappa)}, "arcsine.json")


def cmd_reversal(cfg):
    _emit_json(cfg, mkp.reversal_check(cfg.kappa, cfg.n, cfg.replicas, cfg.seed, cap=cfg.horizon_cap),
               "reversal.json")


def cmd_domination(cfg):
    _emit_json(cfg, mkp.domination_check(cfg.kappa, cfg.n, cfg.replicas, cfg.seed, cap=cfg.horizon_cap,
                                         workers=cfg.workers), "domination.json")


def cmd_markov_path(cfg):
    paths = []
    for i in range(cfg.replicas):
        p = mkp.run_markov_path(cfg.kappa, cfg.n, cfg.K, derive_seed(cfg.seed, i), cfg.horizon_cap)
        paths.append({"steps": [dataclasses.asdict(s) for s in p], "stopped": p.stopped})
    _emit_json(cfg, {"kappa": cfg.kappa, "n": cfg.n, "K": cfg.K, "seed": cfg.seed, "paths": paths},
               "markov_path.json")


def cmd_graph(cfg):
    g = bb.build_graph(sample_pair(cfg.kappa, cfg.n, cfg.horizon, cfg.seed), cfg.min_jump)
    fmt = cfg.format if cfg.format in ("dot", "json") else "json"
    path = hs.output_path(cfg, f"graph.{fmt}")
    if path is None:
        text = bb._dot(g) if fmt == "dot" else json.dumps(g.to_dict(), indent=1) + "\n"
        sys.stdout.write(text)
    else:
        bb.export_graph(g, fmt, path)
    print(json.dumps(bb.connectivity_report(g), sort_keys=True), file=sys.stderr)


def cmd_bayes_enum(cfg):
    tv = mkp.bayes_weight_enumeration(cfg.kappa, cfg.t, cfg.M_cap, cfg.r)
    _emit_json(cfg, {"kappa": cfg.kappa, "t": cfg.t, "M_cap": cfg.M_cap, "r": cfg.r, "tv": tv},
               "bayes_enum.json")


def cmd_validate(cfg, fast=False, only=None):
    from . import acceptance

    results = acceptance.run_all(fast=fast, only=only, echo=lambda s: print(s, file=sys.stderr))
    summary = validate_summary(results, fast)
    _emit_json(cfg, summary, "validate.json")
    if not summary["all_passed"]:
        raise RunFailure("acceptance criteria failed", failed=summary["failed"])


def validate_summary(results, fast: bool) -> dict:
    return {
        "schema": 1,
        "fast": fast,
        "criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                      "seconds": round(r.seconds, 3), "measured": r.measured} for r in results],
        "failed": [r.number for r in results if not r.passed],
        "all_passed": all(r.passed for r in results),
    }


COMMANDS = {name: globals()["cmd_" + name.replace("-", "_")] for name in SUBCOMMANDS}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return 2
    try:
        if cfg.subcommand == "validate":
            only = [int(x) for x in args.only.split(",")] if args.only else None
            cmd_validate(cfg, args.fast, only)
        else:
            COMMANDS[cfg.subcommand](cfg)
    except RunFailure as exc:
        print(json.dumps({"error": "runtime", "message": str(exc), **exc.counts}, default=str), file=sys.stderr)
        return 1
    except (an.DomainError, ValueError) as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return 2
    except (RuntimeError, OSError, ArithmeticError) as exc:
        print(json.dumps({"error": "runtime", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
