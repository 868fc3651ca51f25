"""Monte Carlo experiment drivers.

Three study modes share one machinery:

* ``lowdim``: at each sample length, draw fresh realizations from the
  five-state benchmark and keep repeats whose least-squares transition
  estimate is unstable, until a target count is reached; the stable
  pipeline, pole magnitudes, and frequency-domain errors are recorded for
  the kept repeats.
* ``highdim``: the same rejection protocol per model order n, with lags
  f = p = n + 10 and sample length tied to the lags.
* ``consistency``: no rejection; a fixed number of repeats per sample
  length, recording the input-transition error, the sorted pole-magnitude
  distance, and the soft frequency error, whose medians should fall as the
  length grows.

Every attempt (kept or discarded) becomes one row, so incidence statistics
are unbiased and all aggregates are recomputable from the rows alone.  The
whole record is a pure function of (config, base seed): attempt k of a cell
uses the seed stream [base_seed, n, Tbar, k], rows are emitted in attempt
order, and nothing nondeterministic (timestamps, host names) enters the
document, so reruns are byte-identical; stage timings are excluded from the
byte-for-byte guarantee and live in a separate section.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, docio, metrics
from .cva import SubspaceConfig
from .datafiles import read_dataset
from .exceptions import AttemptBudgetExhausted, StableSidError
from .pipeline import StableIdResult, identify
from .ssmodel import (
    StateSpaceModel,
    build_highdim_example,
    build_lowdim_example,
    simulate_experiment,
)
from .var1 import Var1Model

#: attempts per cell after which a progress warning is emitted
ATTEMPT_WARNING_THRESHOLD = 10_000

#: incidence floor used for the default attempt budget
INCIDENCE_FLOOR = 1e-4

MEDIAN_CONVENTION = "lower_of_two_middles"


def median_low(values) -> float:
    """Median with the lower of two middles on even counts (deterministic)."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("median of empty sequence")
    return float(ordered[(len(ordered) - 1) // 2])


def quartiles_low(values) -> tuple[float, float, float]:
    """(q1, median, q3) under the same lower-middle convention."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("quartiles of empty sequence")
    k = len(ordered) - 1
    return (
        float(ordered[k // 4]),
        float(ordered[k // 2]),
        float(ordered[(3 * k) // 4]),
    )


@dataclass
class ExperimentConfig:
    """Knobs for one experiment run.

    Mode-dependent defaults: ``Tbar_values`` falls back to (320, 640, 1280)
    for lowdim and (320, 1280, 5120) for consistency; the past lag follows
    ceil(past_log_factor * ln(Tbar)) unless ``past_lag`` pins it.  High
    dimensional runs use f = p = n + lag_margin per order n and
    Tbar = ceil(input_scale_factor * (m+2) * f + sample_offset).  The
    attempt budget defaults to target / 1e-4.
    """

    mode: str = "lowdim"
    Tbar_values: list[int] | None = None
    orders: list[int] = field(default_factory=lambda: [16, 64, 256, 1024])
    future_lag: int = 10
    past_log_factor: float = 5.0
    past_lag: int | None = None
    lag_margin: int = 10
    input_scale_factor: float = 5.0
    sample_offset: int = 500
    target_unstable_count: int | None = None
    repeats: int = 200
    max_attempts: int | None = None
    base_seed: int = 0
    hinf_grid: int = 1000
    emit_bode: bool = True
    bode_grid: int = 161
    jobs: int = 1
    output_path: str | None = None

    def __post_init__(self):
        if self.mode not in ("lowdim", "highdim", "consistency", "custom"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("future_lag", "lag_margin", "repeats", "hinf_grid", "bode_grid", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.target_unstable_count is not None and self.target_unstable_count < 1:
            raise ValueError("target_unstable_count must be positive")

    def resolved_Tbar_values(self) -> list[int]:
        if self.Tbar_values is not None:
            return list(self.Tbar_values)
        return [320, 1280, 5120] if self.mode == "consistency" else [320, 640, 1280]

    def resolved_target(self) -> int:
        if self.target_unstable_count is not None:
            return self.target_unstable_count
        return 50 if self.mode == "highdim" else 100

    def resolved_max_attempts(self) -> int:
        if self.max_attempts is not None:
            return self.max_attempts
        return math.ceil(self.resolved_target() / INCIDENCE_FLOOR)

    def past_lag_for(self, Tbar: int) -> int:
        if self.past_lag is not None:
            return self.past_lag
        return math.ceil(self.past_log_factor * math.log(Tbar))

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


# ---------------------------------------------------------------------------
# per-cell execution
# ---------------------------------------------------------------------------


def _cell_context(
    model: StateSpaceModel,
    input_model: Var1Model,
    mode: str,
    n: int,
    Tbar: int,
    f: int,
    p: int,
    cfg: ExperimentConfig,
    want_hinf: bool,
) -> dict:
    ctx = {
        "mode": mode,
        "n": n,
        "Tbar": Tbar,
        "f": f,
        "p": p,
        "base_seed": cfg.base_seed,
        "model": model,
        "input_model": input_model,
        "want_hinf": want_hinf,
        "emit_bode": cfg.emit_bode and mode == "lowdim",
        "true_pole_mags": metrics.pole_magnitudes(model.A),
    }
    if want_hinf:
        omegas = metrics.evaluation_grid(cfg.hinf_grid)
        ctx["omegas"] = omegas
        ctx["grid_points"] = cfg.hinf_grid
        ctx["F_true"] = metrics.frequency_response_grid(model, omegas)
    if ctx["emit_bode"]:
        bode_omegas = np.linspace(0.0, metrics.SOFT_OMEGA_MAX, cfg.bode_grid)
        ctx["bode_omegas"] = bode_omegas
        ctx["bode_true_db"] = _bode_db(model, bode_omegas)
    return ctx


def _bode_db(sys, omegas) -> list[list[float]]:
    """Per-channel response magnitudes in dB, channels outermost."""
    F = metrics.frequency_response_grid(sys, omegas)
    mags = np.abs(F[:, 0, :])  # single-output systems only reach this path
    db = 20.0 * np.log10(np.maximum(mags, 1e-300))
    return [list(map(float, db[:, j])) for j in range(db.shape[1])]


def _run_attempt(ctx: dict, attempt: int) -> dict:
    mode, n, Tbar = ctx["mode"], ctx["n"], ctx["Tbar"]
    row = {
        "mode": mode,
        "n": n,
        "Tbar": Tbar,
        "f": ctx["f"],
        "p": ctx["p"],
        "attempt": attempt,
        "seed_entropy": [ctx["base_seed"], n, Tbar, attempt],
        "unstable_ls": None,
        "kept": False,
        "rho_A_star": None,
        "rho_A_hat": None,
        "rho_Au_hat": None,
        "sigma_R": None,
        "sylvester_residual": None,
        "pole_magnitudes": None,
        "hard_hinf": None,
        "soft_hinf": None,
        "argmax_omega": None,
        "au_error": None,
        "eig_distance": None,
        "bode_db": None,
        "failure_stage": None,
        "error": None,
    }
    seed = np.random.SeedSequence(row["seed_entropy"])
    scfg = SubspaceConfig(f=ctx["f"], p=ctx["p"], n_hat=n)
    try:
        data = simulate_experiment(ctx["model"], ctx["input_model"], Tbar, seed)
        result = identify(data, scfg)
    except StableSidError as exc:
        row["failure_stage"] = exc.stage or "unknown"
        row["error"] = str(exc)
        return row
    diag = result.diagnostics
    row["rho_A_star"] = diag["rho_A_star"]
    row["rho_A_hat"] = diag["rho_A_hat"]
    row["rho_Au_hat"] = diag["rho_Au_hat"]
    row["sigma_R"] = diag["sigma_R"]
    row["sylvester_residual"] = diag["sylvester_residual"]
    row["unstable_ls"] = bool(diag["rho_A_star"] >= 1.0)
    row["kept"] = row["unstable_ls"] if mode in ("lowdim", "highdim") else True
    if row["kept"]:
        _fill_kept_metrics(ctx, row, result)
    row["timings"] = {k: float(v) for k, v in diag["timings"].items()}
    return row


def _fill_kept_metrics(ctx: dict, row: dict, result: StableIdResult) -> None:
    row["pole_magnitudes"] = [float(v) for v in metrics.pole_magnitudes(result.A_hat)]
    true_mags = ctx["true_pole_mags"]
    est_mags = np.asarray(row["pole_magnitudes"])
    row["eig_distance"] = float(np.linalg.norm(est_mags - true_mags))
    row["au_error"] = float(
        np.linalg.norm(result.A_u_hat - ctx["input_model"].A_u)
    )
    if ctx["want_hinf"]:
        est = result.estimated_model()
        F_est = metrics.frequency_response_grid(est, ctx["omegas"])
        report = metrics.hinf_from_responses(
            ctx["omegas"], ctx["F_true"], F_est, ctx["grid_points"]
        )
        row["hard_hinf"] = report.hard_error
        row["soft_hinf"] = report.soft_error
        row["argmax_omega"] = report.argmax_omega
        if ctx["emit_bode"]:
            row["bode_db"] = _bode_db(est, ctx["bode_omegas"])


def _run_batch(ctx: dict, attempts: list[int]) -> list[dict]:
    return [_run_attempt(ctx, k) for k in attempts]


def _collect_rejection(ctx, target, max_attempts, jobs, batch_size=None) -> list[dict]:
    """Attempts in index order until `target` rows are kept.

    The returned prefix ends at the row that reaches the target, so the
    output does not depend on batch size or worker count.  Raises
    AttemptBudgetExhausted past ``max_attempts``.
    """
    if batch_size is None:
        batch_size = max(1, 4 * jobs) if jobs > 1 else 16
    rows: list[dict] = []
    kept = 0
    next_attempt = 0
    warned = False
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while kept < target:
            if next_attempt >= max_attempts:
                raise AttemptBudgetExhausted(
                    f"{kept}/{target} unstable estimates after {len(rows)} attempts",
                    attempts=len(rows),
                    kept=kept,
                )
            upper = min(next_attempt + batch_size * max(jobs, 1), max_attempts)
            indices = list(range(next_attempt, upper))
            next_attempt = upper
            if executor is not None:
                chunks = [indices[i::jobs] for i in range(jobs)]
                chunks = [c for c in chunks if c]
                batch_rows = []
                for part in executor.map(_run_batch, [ctx] * len(chunks), chunks):
                    batch_rows.extend(part)
                batch_rows.sort(key=lambda r: r["attempt"])
            else:
                batch_rows = _run_batch(ctx, indices)
            for row in batch_rows:
                rows.append(row)
                if row["kept"]:
                    kept += 1
                    if kept >= target:
                        break
            if not warned and len(rows) >= ATTEMPT_WARNING_THRESHOLD:
                warned = True
                warnings.warn(
                    f"cell (n={ctx['n']}, Tbar={ctx['Tbar']}) passed "
                    f"{ATTEMPT_WARNING_THRESHOLD} attempts with {kept}/{target} kept",
                    stacklevel=2,
                )
    finally:
        if executor is not None:
            executor.shutdown()
    return rows


def _collect_fixed(ctx, repeats, jobs) -> list[dict]:
    indices = list(range(repeats))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            chunks = [indices[i::jobs] for i in range(jobs)]
            chunks = [c for c in chunks if c]
            rows = []
            for part in executor.map(_run_batch, [ctx] * len(chunks), chunks):
                rows.extend(part)
        rows.sort(key=lambda r: r["attempt"])
        return rows
    return _run_batch(ctx, indices)


# ---------------------------------------------------------------------------
# aggregation and the experiment record
# ---------------------------------------------------------------------------


def _cell_aggregates(rows: list[dict]) -> dict:
    kept_rows = [r for r in rows if r["kept"]]
    failed = [r for r in rows if r["failure_stage"] is not None]
    counted = [r for r in rows if r["unstable_ls"] is not None]
    agg = {
        "attempts": len(rows),
        "kept": len(kept_rows),
        "failures": len(failed),
        "unstable_ls_count": sum(1 for r in counted if r["unstable_ls"]),
        "unstable_ls_incidence": (
            sum(1 for r in counted if r["unstable_ls"]) / len(counted)
            if counted
            else 0.0
        ),
        "max_rho_A_hat": max((r["rho_A_hat"] for r in counted), default=None),
        "max_rho_Au_hat": max((r["rho_Au_hat"] for r in counted), default=None),
        "max_sylvester_residual": max(
            (r["sylvester_residual"] for r in counted), default=None
        ),
    }
    if kept_rows:
        if kept_rows[0]["hard_hinf"] is not None:
            q1, med, q3 = quartiles_low([r["hard_hinf"] for r in kept_rows])
            agg["hard_hinf"] = {"q1": q1, "median": med, "q3": q3}
            q1, med, q3 = quartiles_low([r["soft_hinf"] for r in kept_rows])
            agg["soft_hinf"] = {"q1": q1, "median": med, "q3": q3}
        agg["median_au_error"] = median_low(
            [r["au_error"] for r in kept_rows if r["au_error"] is not None]
        )
        agg["median_eig_distance"] = median_low(
            [r["eig_distance"] for r in kept_rows if r["eig_distance"] is not None]
        )
        mags = [m for r in kept_rows for m in (r["pole_magnitudes"] or [])]
        agg["near_unity_fraction"] = (
            sum(1 for m in mags if m > 1.0 - 1e-10) / len(mags) if mags else 0.0
        )
    return agg


def _cell_timing_summary(rows: list[dict]) -> dict:
    kept_rows = [r for r in rows if r["kept"] and "timings" in r]
    if not kept_rows:
        return {}
    stages = sorted({k for r in kept_rows for k in r["timings"]})
    summary = {}
    for stage in stages:
        values = [r["timings"].get(stage, 0.0) for r in kept_rows]
        summary[stage] = {
            "mean": float(np.mean(values)),
            "total": float(np.sum(values)),
        }
    return summary


def _strip_timings(rows: list[dict]) -> list[dict]:
    """Timings go to a separate section keyed by (cell, attempt)."""
    timing_rows = []
    for row in rows:
        timings = row.pop("timings", None)
        if timings is not None and row["kept"]:
            timing_rows.append(
                {
                    "mode": row["mode"],
                    "n": row["n"],
                    "Tbar": row["Tbar"],
                    "attempt": row["attempt"],
                    "stages": timings,
                }
            )
    return timing_rows


def _assemble_record(cfg: ExperimentConfig, cells: list[dict]) -> dict:
    all_rows = []
    timing_rows = []
    for cell in cells:
        rows = cell.pop("_rows")
        cell["aggregates"] = _cell_aggregates(rows)
        cell["timing_summary"] = _cell_timing_summary(rows)
        timing_rows.extend(_strip_timings(rows))
        all_rows.extend(rows)
    record = {
        "kind": "experiment-record",
        "version": 1,
        "config": asdict(cfg),
        "metadata": {
            "tool": "stablesid",
            "tool_version": __version__,
            "base_seed": cfg.base_seed,
            "seed_scheme": "SeedSequence([base_seed, n, Tbar, attempt])",
            "median_convention": MEDIAN_CONVENTION,
            "grid_convention": "inclusive endpoints; hard/soft evaluated on the union grid",
        },
        "cells": cells,
        "rows": all_rows,
        "timings": timing_rows,
    }
    if cfg.mode == "consistency":
        record["summary"] = _consistency_summary(cells)
    return record


def _consistency_summary(cells: list[dict]) -> dict:
    Tbars = [c["Tbar"] for c in cells]
    med_au = [c["aggregates"]["median_au_error"] for c in cells]
    med_eig = [c["aggregates"]["median_eig_distance"] for c in cells]
    med_soft = [c["aggregates"]["soft_hinf"]["median"] for c in cells]
    slope = float(
        np.polyfit(np.log(np.asarray(Tbars, float)), np.log(np.asarray(med_au)), 1)[0]
    )
    return {
        "Tbar_values": Tbars,
        "median_au_error": med_au,
        "median_eig_distance": med_eig,
        "median_soft_hinf": med_soft,
        "au_error_loglog_slope": slope,
    }


def recompute_aggregates(record: dict) -> list[dict]:
    """Aggregates rebuilt from the rows, for cross-checking a loaded record."""
    rebuilt = []
    for cell in record["cells"]:
        rows = [
            r
            for r in record["rows"]
            if r["n"] == cell["n"] and r["Tbar"] == cell["Tbar"]
        ]
        rebuilt.append(_cell_aggregates(rows))
    return rebuilt


def deterministic_view(record: dict) -> dict:
    """The record without wall-clock fields and execution-only knobs.

    Everything in this view is a pure function of the statistical config and
    the base seed: timings are measurements, and the worker count or output
    location cannot change any emitted number.
    """
    view = {k: v for k, v in record.items() if k != "timings"}
    view["config"] = {
        k: v for k, v in record["config"].items() if k not in ("jobs", "output_path")
    }
    view["cells"] = [
        {k: v for k, v in cell.items() if k != "timing_summary"}
        for cell in record["cells"]
    ]
    return view


def save_record(path, record: dict) -> None:
    docio.write(path, record)


def load_record(path, verify: bool = True) -> dict:
    record = docio.read(path)
    if verify:
        rebuilt = recompute_aggregates(record)
        stored = [cell["aggregates"] for cell in record["cells"]]
        if rebuilt != stored:
            raise ValueError(f"aggregates in {path} do not match their rows")
    return record


# ---------------------------------------------------------------------------
# the three studies
# ---------------------------------------------------------------------------


def run_lowdim(cfg: ExperimentConfig) -> dict:
    """Rejection study on the five-state benchmark across sample lengths."""
    if cfg.mode != "lowdim":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'lowdim'")
    model, input_model = build_lowdim_example()
    target = cfg.resolved_target()
    cells = []
    for Tbar in cfg.resolved_Tbar_values():
        f = cfg.future_lag
        p = cfg.past_lag_for(Tbar)
        ctx = _cell_context(
            model, input_model, "lowdim", model.n, Tbar, f, p, cfg, want_hinf=True
        )
        rows = _collect_rejection(
            ctx, target, cfg.resolved_max_attempts(), cfg.jobs
        )
        cell = {"mode": "lowdim", "n": model.n, "Tbar": Tbar, "f": f, "p": p,
                "target": target, "_rows": rows,
                "true_pole_magnitudes": [float(v) for v in ctx["true_pole_mags"]]}
        if ctx["emit_bode"]:
            cell["bode_omegas"] = [float(w) for w in ctx["bode_omegas"]]
            cell["bode_true_db"] = ctx["bode_true_db"]
        cells.append(cell)
    return _assemble_record(cfg, cells)


def run_highdim(cfg: ExperimentConfig) -> dict:
    """Rejection study across model orders with order-scaled lags."""
    if cfg.mode != "highdim":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'highdim'")
    target = cfg.resolved_target()
    cells = []
    for n in cfg.orders:
        model, input_model = build_highdim_example(n, n + cfg.lag_margin)
        f = p = n + cfg.lag_margin
        Tbar = math.ceil(
            cfg.input_scale_factor * (model.m + 2) * f + cfg.sample_offset
        )
        ctx = _cell_context(
            model, input_model, "highdim", n, Tbar, f, p, cfg, want_hinf=True
        )
        rows = _collect_rejection(
            ctx, target, cfg.resolved_max_attempts(), cfg.jobs
        )
        cells.append(
            {"mode": "highdim", "n": n, "Tbar": Tbar, "f": f, "p": p,
             "target": target, "_rows": rows,
             "true_pole_magnitudes": [float(v) for v in ctx["true_pole_mags"]]}
        )
    return _assemble_record(cfg, cells)


def run_consistency(cfg: ExperimentConfig) -> dict:
    """Fixed-repeat sweep over sample lengths on the five-state benchmark."""
    if cfg.mode != "consistency":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'consistency'")
    model, input_model = build_lowdim_example()
    cells = []
    for Tbar in cfg.resolved_Tbar_values():
        f = cfg.future_lag
        p = cfg.past_lag_for(Tbar)
        ctx = _cell_context(
            model, input_model, "consistency", model.n, Tbar, f, p, cfg,
            want_hinf=True,
        )
        rows = _collect_fixed(ctx, cfg.repeats, cfg.jobs)
        cells.append(
            {"mode": "consistency", "n": model.n, "Tbar": Tbar, "f": f, "p": p,
             "repeats": cfg.repeats, "_rows": rows,
             "true_pole_magnitudes": [float(v) for v in ctx["true_pole_mags"]]}
        )
    return _assemble_record(cfg, cells)


def identify_from_file(data_path, scfg: SubspaceConfig, out_path=None) -> dict:
    """Identify a model from a dataset file and emit a model document."""
    data = read_dataset(data_path)
    result = identify(data, scfg)
    doc = {
        "kind": "identified-model",
        "version": 1,
        "n": int(result.A_hat.shape[0]),
        "m": int(result.ls.B_hat.shape[1]),
        "d": int(result.ls.C_hat.shape[0]),
        "A": result.A_hat,
        "B": result.ls.B_hat,
        "C": result.ls.C_hat,
        "K": result.ls.K_hat,
        "Q_eps": result.ls.Q_eps_hat,
        "A_star": result.ls.A_star,
        "A_u": result.A_u_hat,
        "M": result.M_hat,
        "singular_values": result.singular_values,
        "config": {"f": scfg.f, "p": scfg.p, "n_hat": scfg.n_hat},
        "diagnostics": {
            k: v for k, v in result.diagnostics.items() if k != "timings"
        },
    }
    if out_path is not None:
        docio.write(out_path, doc)
    return doc


# ---------------------------------------------------------------------------
# flat CSV exports
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return docio.format_float(value)
    return str(value)


def export_csvs(record: dict, out_dir) -> dict[str, str]:
    """Write poles.csv, hinf.csv, timings.csv (and bode.csv when present).

    Returns a mapping from export name to file path.  ``poles.csv`` holds
    one row per pole magnitude with a ``series`` column separating true and
    estimated poles, so plot annotations can be read from the data.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}

    pole_lines = ["mode,n,Tbar,repeat,series,magnitude"]
    for cell in record["cells"]:
        for mag in cell.get("true_pole_magnitudes", []):
            pole_lines.append(
                f"{cell['mode']},{cell['n']},{cell['Tbar']},-1,true,{_fmt(mag)}"
            )
    for row in record["rows"]:
        if row["kept"] and row["pole_magnitudes"]:
            for mag in row["pole_magnitudes"]:
                pole_lines.append(
                    f"{row['mode']},{row['n']},{row['Tbar']},{row['attempt']},"
                    f"estimate,{_fmt(mag)}"
                )
    paths["poles"] = str(out_dir / "poles.csv")
    Path(paths["poles"]).write_text("\n".join(pole_lines) + "\n", encoding="utf-8")

    hinf_lines = ["mode,n,Tbar,repeat,hard_error,soft_error"]
    for row in record["rows"]:
        if row["kept"] and row["hard_hinf"] is not None:
            hinf_lines.append(
                f"{row['mode']},{row['n']},{row['Tbar']},{row['attempt']},"
                f"{_fmt(row['hard_hinf'])},{_fmt(row['soft_hinf'])}"
            )
    paths["hinf"] = str(out_dir / "hinf.csv")
    Path(paths["hinf"]).write_text("\n".join(hinf_lines) + "\n", encoding="utf-8")

    timing_lines = ["mode,n,Tbar,repeat,stage,seconds"]
    for entry in record.get("timings", []):
        for stage, seconds in entry["stages"].items():
            timing_lines.append(
                f"{entry['mode']},{entry['n']},{entry['Tbar']},{entry['attempt']},"
                f"{stage},{_fmt(seconds)}"
            )
    paths["timings"] = str(out_dir / "timings.csv")
    Path(paths["timings"]).write_text(
        "\n".join(timing_lines) + "\n", encoding="utf-8"
    )

    bode_cells = [c for c in record["cells"] if "bode_omegas" in c]
    if bode_cells:
        bode_lines = ["mode,n,Tbar,repeat,series,channel,omega,magnitude_db"]
        for cell in bode_cells:
            omegas = cell["bode_omegas"]
            for channel, series_db in enumerate(cell["bode_true_db"]):
                for omega, db in zip(omegas, series_db):
                    bode_lines.append(
                        f"{cell['mode']},{cell['n']},{cell['Tbar']},-1,true,"
                        f"{channel},{_fmt(omega)},{_fmt(db)}"
                    )
        for row in record["rows"]:
            if row["kept"] and row.get("bode_db"):
                cell = next(
                    c
                    for c in bode_cells
                    if c["n"] == row["n"] and c["Tbar"] == row["Tbar"]
                )
                omegas = cell["bode_omegas"]
                for channel, series_db in enumerate(row["bode_db"]):
                    for omega, db in zip(omegas, series_db):
                        bode_lines.append(
                            f"{row['mode']},{row['n']},{row['Tbar']},"
                            f"{row['attempt']},estimate,{channel},"
                            f"{_fmt(omega)},{_fmt(db)}"
                        )
        paths["bode"] = str(out_dir / "bode.csv")
        Path(paths["bode"]).write_text("\n".join(bode_lines) + "\n", encoding="utf-8")
    return paths
