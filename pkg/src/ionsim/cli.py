"""Command-line front end: build a benchmark, run or sweep it, emit rows.

Output is a CSV table (or its JSON mirror) with one row per sweep point,
formatted to 12 significant digits with newline endings, so repeated runs
with the same seed are byte-identical whatever the trial parallelism.
"""
from __future__ import annotations

import argparse
import json
import sys
from math import pi

from .analysis import run_benchmark, sweep
from .circuits import (CircuitProgram, GroverSpec, ModexpSpec, ModexpVariant,
                       build_f21_lookup, build_grover, build_modexp,
                       grover_iteration_count, parse_program)
from .errors import (DecMethod, DecoherenceConfig, ErrorConfig, ErrorMode)
from .gates import CombineMethod
from .statespace import CapacityError, ContractViolation, ModelKind

CSV_HEADER = ("benchmark,model,combine,axis,axis_value,trials,mean_fidelity,"
              "stderr_fidelity,survival_norm,seed,success_probability")

DEFAULT_DEC_VALUES = [0.0, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]
DEFAULT_ANGLE_VALUES = [0.0, pi / 1024, pi / 512, pi / 256, pi / 128,
                        pi / 64, pi / 32]

BENCHMARKS = ("f21", "grover", "mult", "f15_3bit", "f15_long", "custom")


def parse_angle(text: str) -> float:
    """Accept plain floats plus 'pi', 'pi/k' and '-pi/k' shorthand."""
    text = text.strip().lower()
    sign = 1.0
    if text.startswith("-"):
        sign, text = -1.0, text[1:]
    if text == "pi":
        return sign * pi
    if text.startswith("pi/"):
        return sign * pi / float(text[3:])
    return sign * float(text)


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ionsim",
        description="Trapped-ion quantum computer simulator: benchmarks, "
                    "error sweeps, fidelity reports.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one benchmark or a sweep",
                         argument_default=argparse.SUPPRESS)
    run.add_argument("--benchmark", choices=BENCHMARKS)
    run.add_argument("--program", help="program dump file for --benchmark custom")
    run.add_argument("--model", choices=["2state", "3state"])
    run.add_argument("--combine", choices=["simple", "mixed"])
    run.add_argument("--err", choices=[m.value for m in ErrorMode])
    run.add_argument("--mu", type=parse_angle)
    run.add_argument("--sigma", type=parse_angle)
    run.add_argument("--dec", choices=[m.value for m in DecMethod],
                     help="decoherence method")
    run.add_argument("--dec-rate", type=float, help="decay parameter")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--jobs", type=int)
    run.add_argument("--sweep", choices=["none", "sigma", "mu", "dec"])
    run.add_argument("--values", help="comma-separated sweep values")
    run.add_argument("--keybits", type=int)
    run.add_argument("--key", type=int)
    run.add_argument("--iterations", type=int)
    run.add_argument("--output", help="result file, '-' for stdout")
    run.add_argument("--format", choices=["csv", "json"])
    run.add_argument("--config", help="JSON config file; flags override it")
    return p


DEFAULTS = {
    "benchmark": "f21", "program": None, "model": "2state",
    "combine": "simple", "err": "none", "mu": 0.0, "sigma": 0.0,
    "dec": "none", "dec_rate": 0.0, "trials": 4, "seed": 0, "jobs": 1,
    "sweep": "none", "values": None, "keybits": 2, "key": 0,
    "iterations": None, "output": "-", "format": "csv", "config": None,
}


def resolve_config(args: argparse.Namespace) -> dict:
    provided = vars(args)
    cfg = dict(DEFAULTS)
    path = provided.get("config")
    if path:
        with open(path) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ContractViolation(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    cfg.update({k: v for k, v in provided.items() if k != "command"})
    return cfg


def build_benchmark(cfg: dict) -> CircuitProgram:
    name = cfg["benchmark"]
    if name == "f21":
        return build_f21_lookup()
    if name == "mult":
        return build_modexp(ModexpSpec(4, 7, 15, ModexpVariant.SINGLE_MULT))
    if name == "f15_3bit":
        return build_modexp(ModexpSpec(4, 7, 15, ModexpVariant.A3BIT))
    if name == "f15_long":
        return build_modexp(ModexpSpec(4, 7, 15, ModexpVariant.FULL))
    if name == "grover":
        kb, key = cfg["keybits"], cfg["key"]
        iters = cfg["iterations"]
        if iters is None:
            iters = grover_iteration_count(2**kb)
        return build_grover(GroverSpec(kb, key, iters))
    if not cfg["program"]:
        raise ContractViolation("--benchmark custom needs --program FILE")
    with open(cfg["program"]) as fh:
        return parse_program(fh.read())


def _sweep_values(cfg: dict) -> list[float]:
    if cfg["values"]:
        raw = cfg["values"]
        items = raw.split(",") if isinstance(raw, str) else list(raw)
        return [parse_angle(str(v)) for v in items]
    if cfg["sweep"] == "dec":
        return list(DEFAULT_DEC_VALUES)
    return list(DEFAULT_ANGLE_VALUES)


def execute(cfg: dict) -> list[dict]:
    program = build_benchmark(cfg)
    model = (ModelKind.TWO_STATE if cfg["model"] == "2state"
             else ModelKind.THREE_STATE)
    combine = CombineMethod(cfg["combine"])
    err_cfg = ErrorConfig(ErrorMode(cfg["err"]), cfg["mu"], cfg["sigma"])
    dec_cfg = DecoherenceConfig(DecMethod(cfg["dec"]), cfg["dec_rate"])
    common = dict(benchmark=program.name, model=cfg["model"],
                  combine=cfg["combine"], trials=cfg["trials"],
                  seed=cfg["seed"])
    rows = []
    if cfg["sweep"] == "none":
        report = run_benchmark(program, model, err_cfg, dec_cfg, combine,
                               cfg["trials"], cfg["seed"], cfg["jobs"])
        rows.append(dict(common, axis="none", axis_value=0.0, report=report))
    else:
        for value, report in sweep(program, model, cfg["sweep"],
                                   _sweep_values(cfg), err_cfg, dec_cfg,
                                   combine, cfg["trials"], cfg["seed"],
                                   cfg["jobs"]):
            rows.append(dict(common, axis=cfg["sweep"], axis_value=value,
                             report=report))
    return rows


def render_csv(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        rep = row["report"]
        lines.append(",".join([
            row["benchmark"], row["model"], row["combine"], row["axis"],
            _fmt(row["axis_value"]), str(row["trials"]),
            _fmt(rep.mean_fidelity), _fmt(rep.stderr_fidelity),
            _fmt(rep.mean_survival), str(row["seed"]),
            _fmt(rep.mean_success)]))
    return "\n".join(lines) + "\n"


def render_json(rows: list[dict]) -> str:
    out = []
    for row in rows:
        rep = row["report"]
        out.append({
            "benchmark": row["benchmark"], "model": row["model"],
            "combine": row["combine"], "axis": row["axis"],
            "axis_value": float(_fmt(row["axis_value"])),
            "trials": row["trials"],
            "mean_fidelity": float(_fmt(rep.mean_fidelity)),
            "stderr_fidelity": float(_fmt(rep.stderr_fidelity)),
            "survival_norm": float(_fmt(rep.mean_survival)),
            "seed": row["seed"],
            "success_probability": (None if rep.mean_success is None
                                    else float(_fmt(rep.mean_success))),
        })
    return json.dumps(out, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        rows = execute(cfg)
        text = render_csv(rows) if cfg["format"] == "csv" else render_json(rows)
        if cfg["output"] in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(cfg["output"], "w", newline="") as fh:
                fh.write(text)
    except (ContractViolation, CapacityError, OSError, ValueError) as exc:
        print(f"ionsim: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
