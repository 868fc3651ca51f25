"""Command-line entry points.

Subcommands:

* ``simulate``      draw a dataset from a benchmark system, write CSV
* ``identify``      run the stable pipeline on a dataset file
* ``repro-lowdim``  the low-order rejection study
* ``repro-highdim`` the order-scaling rejection study
* ``consistency``   the sample-length sweep

Every subcommand accepts ``--config <json>``, ``--seed <u64>``,
``--out <path>`` and ``--jobs <count>``; command-line values override the
config file.  Experiment commands treat ``--out`` as a directory and write
``results.json`` plus the flat CSV exports into it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import docio, harness
from .cva import SubspaceConfig
from .datafiles import write_dataset
from .ssmodel import build_highdim_example, build_lowdim_example, simulate_experiment


def _load_config(path) -> dict:
    if path is None:
        return {}
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise SystemExit(f"config {path} must hold a JSON object")
    return raw


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="base seed (overrides config)")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--jobs", type=int, help="worker processes")


def _cmd_simulate(args) -> int:
    raw = _load_config(args.config)
    model_kind = raw.get("model", "lowdim")
    Tbar = int(raw.get("Tbar", 1280))
    seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
    if model_kind == "lowdim":
        model, input_model = build_lowdim_example()
    elif model_kind == "highdim":
        n = int(raw.get("n", 16))
        p = int(raw.get("past_lag", n + int(raw.get("lag_margin", 10))))
        model, input_model = build_highdim_example(n, p)
    else:
        raise SystemExit(f"unknown model {model_kind!r} (use lowdim or highdim)")
    if args.out is None:
        raise SystemExit("simulate needs --out <dataset.csv>")
    data = simulate_experiment(model, input_model, Tbar, seed)
    write_dataset(args.out, data)
    print(f"wrote {Tbar + 1} samples (m={data.m}, d={data.d}) to {args.out}")
    return 0


def _cmd_identify(args) -> int:
    raw = _load_config(args.config)
    missing = [k for k in ("f", "p", "n_hat") if k not in raw]
    if missing:
        raise SystemExit(f"identify config must set f, p, n_hat; missing {missing}")
    scfg = SubspaceConfig(f=int(raw["f"]), p=int(raw["p"]), n_hat=int(raw["n_hat"]))
    out = args.out
    doc = harness.identify_from_file(args.data, scfg, out_path=out)
    diag = doc["diagnostics"]
    print(
        f"identified order {doc['n']} model: rho(A_hat)={diag['rho_A_hat']:.6f}, "
        f"rho(A_star)={diag['rho_A_star']:.6f}, rho(Au_hat)={diag['rho_Au_hat']:.6f}"
    )
    if out:
        print(f"wrote model document to {out}")
    return 0


def _experiment_config(args, mode: str) -> harness.ExperimentConfig:
    raw = _load_config(args.config)
    raw.setdefault("mode", mode)
    if raw["mode"] != mode:
        raise SystemExit(f"config mode {raw['mode']!r} does not match subcommand {mode!r}")
    if args.seed is not None:
        raw["base_seed"] = args.seed
    if args.jobs is not None:
        raw["jobs"] = args.jobs
    if args.out is not None:
        raw["output_path"] = args.out
    return harness.ExperimentConfig.from_dict(raw)


def _run_experiment(args, mode: str) -> int:
    cfg = _experiment_config(args, mode)
    runner = {
        "lowdim": harness.run_lowdim,
        "highdim": harness.run_highdim,
        "consistency": harness.run_consistency,
    }[mode]
    record = runner(cfg)
    out_dir = Path(cfg.output_path or f"{mode}-results")
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.json"
    harness.save_record(results_path, record)
    paths = harness.export_csvs(record, out_dir)
    for cell in record["cells"]:
        agg = cell["aggregates"]
        line = (
            f"n={cell['n']} Tbar={cell['Tbar']}: attempts={agg['attempts']} "
            f"kept={agg['kept']} incidence={agg['unstable_ls_incidence']:.4f}"
        )
        if "hard_hinf" in agg:
            line += (
                f" median_hard={agg['hard_hinf']['median']:.4g}"
                f" median_soft={agg['soft_hinf']['median']:.4g}"
            )
        print(line)
    print(f"wrote {results_path} and {', '.join(sorted(paths))} exports")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablesid",
        description="stability-guaranteed subspace identification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate a benchmark dataset to CSV")
    _add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_id = sub.add_parser("identify", help="identify a model from a dataset file")
    p_id.add_argument("data", help="dataset CSV path")
    _add_common(p_id)
    p_id.set_defaults(func=_cmd_identify)

    for mode, helptext in (
        ("repro-lowdim", "low-order rejection study"),
        ("repro-highdim", "order-scaling rejection study"),
        ("consistency", "sample-length consistency sweep"),
    ):
        p = sub.add_parser(mode, help=helptext)
        _add_common(p)
        p.set_defaults(
            func=lambda a, m=mode.replace("repro-", ""): _run_experiment(a, m)
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
