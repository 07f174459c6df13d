"""Command-line surface.

One binary, subcommand style: sample, eval, game, build, verify, experiment,
bound.  A JSON config file (--config) may substitute for flags; flags win on
conflict.  All randomness flows from --seed.  Exit codes: 0 success, 2 usage
error, 3 resource budget exhausted, 1 other failures (with a machine-readable
error record on stderr).  stdout carries data, stderr diagnostics.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, efgame, models, sampling
from .errors import MetricLawError, ResourceLimitError
from .logic import (
    build_phi_geq_half,
    eval_formula,
    format_formula,
    parse_formula,
)
from .spaces import load_space, save_space
from .indexing import pairs_of


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    sub.add_argument(
        "--threads", type=int, default=None, help="worker bound for experiments"
    )
    sub.add_argument(
        "--out-file", type=str, default=None, help="write output here instead of stdout"
    )
    sub.add_argument(
        "--config", type=str, default=None, help="JSON file of flag defaults"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metriclaw",
        description="evaluate continuous-logic sentences on finite metric spaces "
        "and run seeded experiments on random ones",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("sample", help="draw distance vectors")
    p.add_argument("--n", type=int, default=None, help="number of points")
    p.add_argument("--count", type=int, default=None, help="records to draw")
    p.add_argument(
        "--method",
        choices=["cube", "mn-reject", "mn-har", "dn", "s-like"],
        default=None,
    )
    p.add_argument("--delta", type=float, default=None, help="fixed delta")
    p.add_argument("--delta-scale", type=float, default=None)
    p.add_argument("--delta-exp", type=float, default=None)
    p.add_argument("--k", type=int, default=None, help="split size for s-like")
    p.add_argument("--out", choices=["json", "csv"], default=None, help="output format")
    _add_common(p)

    p = subs.add_parser("eval", help="evaluate a sentence on a space")
    p.add_argument("--formula", type=str, default=None, help="file or inline text")
    p.add_argument("--space", type=str, default=None, help="space file")
    p.add_argument("--out", choices=["json"], default=None)
    _add_common(p)

    p = subs.add_parser("game", help="decide the comparison game on two spaces")
    p.add_argument("--x", type=str, default=None, help="first space file")
    p.add_argument("--y", type=str, default=None, help="second space file")
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--emit-strategy", type=str, default=None, help="strategy file")
    _add_common(p)

    p = subs.add_parser("build", help="construct a class-C space")
    p.add_argument("--kind", choices=["circulant", "random"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--ring", type=str, default=None, help="comma-separated ring values")
    p.add_argument("--out", type=str, default=None, help="space file to write")
    _add_common(p)

    p = subs.add_parser("verify", help="evaluate a grid axiom family on a space")
    p.add_argument("--space", type=str, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    _add_common(p)

    p = subs.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    p.add_argument(
        "--kind", choices=["fact-cs", "thm22", "cor23", "zero-one"], default=None
    )
    p.add_argument("--n", type=str, default=None, help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None, help="fixed delta override")
    p.add_argument("--delta-scale", type=float, default=None)
    p.add_argument("--delta-exp", type=float, default=None)
    p.add_argument("--tasks", type=str, default=None, help="axiom-family file")
    p.add_argument("--formula", type=str, default=None, help="sentence file or inline")
    p.add_argument("--sigma-as", type=float, default=None, help="almost-sure estimate")
    p.add_argument("--out", choices=["csv", "json"], default=None, help="output format")
    _add_common(p)

    p = subs.add_parser("bound", help="tabulate the analytic failure bound")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--lambda-a", type=float, default=None)
    p.add_argument("--n-range", type=str, default=None, help="lo:hi[:step]")
    _add_common(p)

    return parser


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge precedence: built-in defaults < config file < explicit flags."""
    cfg = {}
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ValueError("--config must hold a JSON object")
    resolved = dict(defaults)
    for key, value in cfg.items():
        resolved[key.replace("-", "_")] = value
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            resolved[key] = value
    resolved.setdefault("seed", 0)
    resolved.setdefault("threads", 1)
    return resolved


def _emit(text: str, out_file: str | None):
    if out_file:
        Path(out_file).write_text(text)
    else:
        sys.stdout.write(text)


def _load_formula(spec_text: str):
    path = Path(spec_text)
    if path.exists() and path.is_file():
        return parse_formula(path.read_text())
    return parse_formula(spec_text)


def _schedule(rc: dict) -> sampling.DeltaSchedule:
    kwargs = {}
    if rc.get("delta_scale") is not None:
        kwargs["scale"] = rc["delta_scale"]
    if rc.get("delta_exp") is not None:
        kwargs["exponent"] = rc["delta_exp"]
    return sampling.DeltaSchedule(**kwargs)


def _require(rc: dict, *names: str):
    for name in names:
        if rc.get(name) is None:
            raise ValueError(f"missing required option --{name.replace('_', '-')}")


def _cmd_sample(rc: dict) -> int:
    _require(rc, "n", "method")
    n = rc["n"]
    count = rc.get("count", 1)
    method = rc["method"]
    records = []
    for trial in range(count):
        rng = sampling.generator(rc["seed"], trial)
        attempts = 0
        if method == "cube":
            vec = sampling.sample_cube(n, rng)
        elif method == "mn-reject":
            vec, attempts = sampling.sample_M_n_rejection(n, rng)
        elif method == "mn-har":
            vec = sampling.sample_M_n_hitandrun(n, sampling.SamplerConfig(), rng)
        elif method == "dn":
            delta = rc.get("delta")
            if delta is None:
                delta = _schedule(rc).delta_at(n)
            vec, attempts = sampling.sample_D_n(n, delta, rng)
        else:
            _require(rc, "k")
            delta = rc.get("delta")
            if delta is None:
                delta = _schedule(rc).delta_at(n)
            vec, attempts = sampling.sample_S_like(rc["k"], n, delta, rng)
        records.append({"trial": trial, "n": n, "attempts": attempts, "d": [float(c) for c in vec.coords]})
    fmt = rc.get("out", "json")
    if fmt == "csv":
        header = ["trial", "n", "attempts"] + [f"d_{i}_{j}" for i, j in pairs_of(n)]
        lines = ["# config " + json.dumps(_public_config(rc), sort_keys=True)]
        lines.append(",".join(header))
        for rec in records:
            lines.append(
                ",".join(
                    [str(rec["trial"]), str(rec["n"]), str(rec["attempts"])]
                    + [repr(c) for c in rec["d"]]
                )
            )
        _emit("\n".join(lines) + "\n", rc.get("out_file"))
    else:
        _emit(
            json.dumps({"config": _public_config(rc), "records": records}, indent=1)
            + "\n",
            rc.get("out_file"),
        )
    return 0


def _public_config(rc: dict) -> dict:
    return {k: v for k, v in sorted(rc.items()) if k != "out_file" and v is not None}


def _cmd_eval(rc: dict) -> int:
    _require(rc, "formula", "space")
    formula = _load_formula(rc["formula"])
    space = load_space(rc["space"])
    value = eval_formula(formula, space)
    doc = {
        "config": _public_config(rc),
        "formula": format_formula(formula),
        "value": value,
    }
    _emit(json.dumps(doc, indent=1) + "\n", rc.get("out_file"))
    return 0


def _cmd_game(rc: dict) -> int:
    _require(rc, "x", "y", "rounds", "epsilon")
    x = load_space(rc["x"])
    y = load_space(rc["y"])
    result = efgame.solve_game(x, y, rc["rounds"], rc["epsilon"])
    doc = {
        "config": _public_config(rc),
        "winner": "II" if result.winner_is_II else "I",
        "explored_states": result.explored_states,
    }
    if rc.get("emit_strategy") and result.winner_is_II:
        table = efgame.extract_strategy(x, y, rc["rounds"], rc["epsilon"])
        Path(rc["emit_strategy"]).write_text(
            json.dumps(
                {
                    "rounds": rc["rounds"],
                    "epsilon": rc["epsilon"],
                    "entries": efgame.strategy_to_jsonable(table),
                },
                indent=1,
            )
            + "\n"
        )
        doc["strategy"] = rc["emit_strategy"]
    _emit(json.dumps(doc, indent=1) + "\n", rc.get("out_file"))
    return 0


def _cmd_build(rc: dict) -> int:
    _require(rc, "kind", "n", "out")
    if rc["kind"] == "circulant":
        _require(rc, "ring")
        ring = [float(v) for v in str(rc["ring"]).split(",") if v.strip()]
        space = models.build_circulant(rc["n"], ring)
    else:
        space = models.build_random_class_C(rc["n"], sampling.generator(rc["seed"]))
    save_space(space, rc["out"])
    doc = {"config": _public_config(rc), "written": rc["out"], "n": space.n}
    _emit(json.dumps(doc, indent=1) + "\n", rc.get("out_file"))
    return 0


def _cmd_verify(rc: dict) -> int:
    _require(rc, "space", "grid_step", "kmax", "epsilon")
    space = load_space(rc["space"])
    family = models.enumerate_grid_tasks(
        models.GridSpec(rc["grid_step"]), rc["kmax"], rc["epsilon"]
    )
    report = models.verify_axioms(space, family)
    doc = {"config": _public_config(rc), **report.to_jsonable()}
    _emit(json.dumps(doc, indent=1) + "\n", rc.get("out_file"))
    return 0


def _cmd_experiment(rc: dict) -> int:
    _require(rc, "kind", "n", "trials")
    n_list = [int(v) for v in str(rc["n"]).split(",") if v.strip()]
    kind = rc["kind"]
    seed = rc["seed"]
    trials = rc["trials"]
    threads = rc["threads"]
    if kind == "fact-cs":
        report = analysis.experiment_fact_cs(
            n_list,
            _schedule(rc),
            trials,
            seed,
            fixed_delta=rc.get("delta"),
            threads=threads,
        )
    elif kind == "thm22":
        _require(rc, "tasks")
        family = models.load_tasks(rc["tasks"])
        report = analysis.experiment_theorem_2_2(
            family,
            n_list,
            _schedule(rc),
            trials,
            seed,
            fixed_delta=rc.get("delta"),
            threads=threads,
        )
    elif kind == "cor23":
        _require(rc, "tasks")
        family = models.load_tasks(rc["tasks"])
        sched = (
            _schedule(rc)
            if rc.get("delta_scale") is not None or rc.get("delta_exp") is not None
            else None
        )
        report = analysis.experiment_cor_2_3(
            family, n_list, trials, seed, delta_schedule=sched, threads=threads
        )
    else:
        _require(rc, "epsilon", "sigma_as")
        sigma = (
            _load_formula(rc["formula"]) if rc.get("formula") else build_phi_geq_half()
        )
        report = analysis.experiment_zero_one(
            sigma,
            rc["sigma_as"],
            rc["epsilon"],
            n_list,
            trials,
            seed,
            threads=threads,
        )
    fmt = rc.get("out", "csv")
    if fmt == "csv":
        _emit(report.to_csv_text(), rc.get("out_file"))
    else:
        _emit(json.dumps(report.to_jsonable(), indent=1) + "\n", rc.get("out_file"))
    return 0


def _cmd_bound(rc: dict) -> int:
    _require(rc, "k", "epsilon", "delta", "n_range")
    parts = [int(v) for v in str(rc["n_range"]).split(":")]
    if len(parts) == 2:
        lo, hi, step = parts[0], parts[1], 1
    elif len(parts) == 3:
        lo, hi, step = parts
    else:
        raise ValueError("--n-range must be lo:hi or lo:hi:step")
    spec = analysis.BadEventSpec(
        k=rc["k"],
        epsilon=rc["epsilon"],
        delta=rc["delta"],
        m=rc.get("m", 1),
        lambda_a=rc.get("lambda_a", 1.0),
    )
    lines = ["# config " + json.dumps(_public_config(rc), sort_keys=True)]
    lines.append("n,per_subset_bound,union_bound")
    for n in range(lo, hi + 1, step):
        if n <= spec.k:
            continue
        lines.append(
            f"{n},{analysis.per_subset_bound(spec, n)!r},{analysis.union_bound([spec], n)!r}"
        )
    _emit("\n".join(lines) + "\n", rc.get("out_file"))
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "eval": _cmd_eval,
    "game": _cmd_game,
    "build": _cmd_build,
    "verify": _cmd_verify,
    "experiment": _cmd_experiment,
    "bound": _cmd_bound,
}


def dispatch(argv: list[str]) -> int:
    """Parse and run; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rc = _resolve(args, {})
        return _COMMANDS[args.command](rc)
    except ResourceLimitError as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 3
    except (MetricLawError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
