"""Command-line front end.

Commands: ``solve | constants | decompose | verify | experiment``.
Each run is driven by a single JSON config document; ``--seed``,
``--cells`` and ``--out`` override the corresponding config entries.
The report path writes delimited CSV files plus rendered PNG figures
into the output directory.

Exit codes: 0 success; 1 failed verification; 2 config parse or
validation failure; 3 numerical failure; 4 problem size over the dense
cap; 5 decomposition invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import figures, reports
from .decompose import chain_slack, signed_decompose, split_source
from .domain import DomainSpec, GridFunction
from .errors import (CapabilityError, DecompositionError, NumericalError,
                     PolysignError, PositivityError, SingularityError,
                     ValidationError)
from .experiments import (ExperimentConfig, build_pipeline,
                          random_bump_source, run_estimate_experiment)
from .kernels import DENSE_GREEN_CAP
from .verification import DEFAULT_SEED, run_suite

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_OVER_CAP = 4
EXIT_DECOMPOSITION = 5


class ConfigError(ValueError):
    pass


def _domain_spec(block: dict) -> DomainSpec:
    try:
        shape = block["shape"]
        cells = int(block["cells"])
        if shape == "rectangle":
            return DomainSpec.rectangle(block["lx"], block["ly"], cells)
        if shape == "disk":
            return DomainSpec.disk(block.get("radius", 1.0), cells)
        if shape == "box3d":
            return DomainSpec.box3d(block["lx"], block["ly"], block["lz"],
                                    cells)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad domain block: {exc}") from exc
    raise ConfigError(f"unknown domain shape {shape!r}")


def load_config(path: str, args: argparse.Namespace) -> dict:
    try:
        with open(path) as handle:
            config = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    if args.seed is not None:
        config["seed"] = args.seed
    if args.cells is not None:
        config.setdefault("domain", {})["cells"] = args.cells
    if args.out is not None:
        config["out"] = args.out
    config.setdefault("out", ".")
    os.makedirs(config["out"], exist_ok=True)
    return config


def _source_function(config: dict, domain) -> GridFunction:
    block = config.get("source", {"kind": "bumps"})
    kind = block.get("kind", "bumps")
    if kind == "zero":
        return domain.constant(0.0)
    if kind == "constant":
        return domain.constant(float(block.get("value", 1.0)))
    if kind == "bumps":
        if "seed" not in block and "seed" not in config:
            raise ConfigError("random source needs a seed")
        seed = block.get("seed", config.get("seed"))
        return random_bump_source(domain, np.random.default_rng(int(seed)))
    raise ConfigError(f"unknown source kind {kind!r}")


def _pipeline_from_config(config: dict, need_green: bool | None = None):
    spec = _domain_spec(config.get("domain") or {})
    m = int(config.get("m", 1))
    return build_pipeline(
        spec, m,
        dense_cap=int(config.get("dense_cap", DENSE_GREEN_CAP)),
        exclusion_multiplier=float(config.get("exclusion_multiplier", 2.0)),
        need_green=need_green)


def _out_path(config: dict, name: str) -> str:
    return os.path.join(config["out"], name)


def cmd_solve(config: dict) -> int:
    from .discretize import solve

    pipe = _pipeline_from_config(config, need_green=False)
    f = _source_function(config, pipe.domain)
    u = solve(pipe.op, f)
    residual = float(np.abs(
        pipe.op.matrix @ u.values - f.values).max())
    reports.write_solution_csv(_out_path(config, "u.csv"), u)
    figures.render_solution(_out_path(config, "u.png"), u)
    print(f"wrote u.csv ({pipe.domain.interior_count} rows), "
          f"residual {residual:.3e}")
    return 0


def cmd_constants(config: dict) -> int:
    spec = _domain_spec(config.get("domain") or {})
    m = int(config.get("m", 1))
    cap = int(config.get("dense_cap", DENSE_GREEN_CAP))
    from .domain import domain_for

    N = domain_for(spec, m).interior_count
    if N > cap:
        print(f"domain has {N} interior points, over the dense Green "
              f"cap ({cap})", file=sys.stderr)
        return EXIT_OVER_CAP
    pipe = _pipeline_from_config(config, need_green=True)
    est = pipe.estimate
    reports.write_estimate_csv(_out_path(config, "constants.csv"),
                               spec, m, est)
    if config.get("histogram"):
        from .kernels import ratio_histogram

        edges, counts = ratio_histogram(pipe.green, pipe.weight, est)
        reports.write_histogram_csv(_out_path(config, "ratios.csv"),
                                    edges, counts)
        figures.render_histogram(_out_path(config, "ratios.png"),
                                 edges, counts)
    print(f"c2_star {est.c2_star!r}, c1_hat {est.c1_hat!r}, "
          f"c3_hat {est.c3_hat!r}")
    return 0


def cmd_decompose(config: dict) -> int:
    pipe = _pipeline_from_config(config, need_green=True)
    est = pipe.estimate
    if "c2_override" in config:
        # fault-injection hook: replace the rank-one coefficient so
        # invariant violations can be demonstrated deliberately
        from dataclasses import replace

        est = replace(est, c2_used=float(config["c2_override"]))
    f = _source_function(config, pipe.domain)
    sol = signed_decompose(pipe.op, pipe.green, est, pipe.weight, f)
    reports.write_decomposition_csv(
        _out_path(config, "decomposition.csv"), sol)
    figures.render_decomposition(
        _out_path(config, "decomposition.png"), sol)
    print(f"min u_oplus {float(sol.u_oplus.values.min())!r}")
    print(f"min u_ominus {float(sol.u_ominus.values.min())!r}")
    print(f"residual {sol.residual!r}")
    print(f"chain slack {chain_slack(sol)!r}")
    return 0


def cmd_verify(config: dict) -> int:
    seed = int(config.get("seed", DEFAULT_SEED))
    results = run_suite(seed=seed,
                        progress=lambda r: print(r.line(), flush=True))
    reports.write_verify_csv(_out_path(config, "verify.csv"), results)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY_FAILED if failed else 0


def cmd_experiment(config: dict) -> int:
    block = config.get("experiment") or {}
    try:
        cfg = ExperimentConfig(
            kind=block["kind"],
            domain=_domain_spec(config.get("domain") or {}),
            m=int(config.get("m", 1)),
            p_plus=float(block.get("p_plus", 2.0)),
            p_minus=float(block.get("p_minus", 2.0)),
            trials=int(block.get("trials", 20)),
            seed=int(config["seed"]),
            refine=bool(block.get("refine", False)),
            q_cap=float(block.get("q_cap", math.inf)),
            exclusion_multiplier=float(
                config.get("exclusion_multiplier", 2.0)),
            dense_cap=int(config.get("dense_cap", DENSE_GREEN_CAP)))
        cfg.validate()
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ConfigError(f"bad experiment config: {exc}") from exc
    report = run_estimate_experiment(cfg)
    reports.write_experiment_csv(_out_path(config, "experiment.csv"),
                                 report)
    figures.render_trial_ratios(_out_path(config, "experiment.png"),
                                report)
    line = f"{cfg.kind}: empirical constant {report.empirical_constant!r}"
    if report.refinement_ratio is not None:
        line += f", refinement ratio {report.refinement_ratio!r}"
    print(line)
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "constants": cmd_constants,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polysign",
        description="Sign-dependent decomposition of polyharmonic "
                    "Dirichlet problems on grids.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, metavar="PATH",
                        help="JSON run configuration")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="master seed (overrides config)")
    parser.add_argument("--cells", type=int, metavar="N",
                        help="grid cells (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args)
        return _COMMANDS[args.command](config)
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DecompositionError as exc:
        print(f"decomposition invariant violated: {exc}", file=sys.stderr)
        return EXIT_DECOMPOSITION
    except CapabilityError as exc:
        print(f"over capability limit: {exc}", file=sys.stderr)
        return EXIT_OVER_CAP
    except (NumericalError, PositivityError, SingularityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
