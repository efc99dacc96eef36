"""Experiment harness: config parsing, the online training loop, grid search,
multi-seed aggregation, and CSV emission.

Config files are flat ``key = value`` text ('#' starts a comment), versioned
with a ``schema_version`` key. Recognized keys:

  schema_version   must be 1
  task             csv | binary_add | synthetic
  dataset          csv task: path to a numeric CSV (streamed in file order)
  target_column    csv task: target column index, default -1 (last)
  steps            csv/synthetic: number of steps (csv: 0 = whole file)
  features         synthetic task: raw feature count (bias gets appended)
  n_sequences      binary_add task: summand sequences, 2 or 3
  horizon          binary_add: error-free stretch defining success (1000)
  cutoff           binary_add: max steps before reporting failure (50000)
  model            srnn | lstm | cwrnn
  n_h              hidden units
  periods          cwrnn clock periods, e.g. 1,2,4,8,16
  loss             squared | cross_entropy (defaulted by task)
  optimizer        wogd | sgd | rmsprop | adam
  eta              wogd hidden-layer learning rate
  window           wogd window size (and default tape depth for baselines)
  lambda           wogd spectral radius, default 0.95
  alpha            wogd lazy-projection trigger, default 7.5
  out_lr_scale     wogd output schedule c in c/sqrt(t), default 8.0
  out_radius       wogd output-weight l2 bound, default 2.5
  gradient_mode    replay | cached, default replay
  learning_rate    baseline learning rate
  tbptt_depth      baseline backprop depth, default = window (or 200)
  seeds            evaluation seeds, e.g. 1,2,3 (default 1..eval_runs)
  tuning_runs      seeds used per grid point, default 10
  eval_runs        default evaluation seed count, default 30
  init_std         stddev of the Gaussian weight init, default 0.1
  record_regret    true/false: track projected-gradient norms per step
  record_smoothness  true/false: track finite-difference curvature (implies
                   record_regret and replay gradients)
  regret_every     instrument every k-th step (default 1: every step; each
                   sample costs two spectral projections)
  check_gradient_bounds  true/false: assert the closed-form gradient-norm
                   ceiling each step while the constraint preconditions hold
  out_dir          output directory for emit_outputs

Per-seed randomness: each seed spawns two independent PCG64 generators via
``np.random.SeedSequence(seed).spawn(2)`` -- child 0 initializes the weights,
child 1 drives the data stream. Identical (config, seed) pairs therefore
yield bit-identical trajectories on one platform.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analysis, models, tasks
from .gradients import (
    ActivationTape,
    NumericOverflowError,
    instant_gradient,
    tbptt_gradient,
)
from .linalg import spectral_norm
from .models import StepRecord, replace_blocks
from .optim import BaselineConfig, WogdConfig, baseline_step, projected_gradient, wogd_step

SCHEMA_VERSION = 1
TASK_KINDS = ("csv", "binary_add", "synthetic")
MODEL_KINDS = ("srnn", "lstm", "cwrnn")
OPTIMIZER_KINDS = ("wogd", "sgd", "rmsprop", "adam")


class ConfigError(ValueError):
    """Invalid experiment configuration; reported before any work starts."""


class GridSearchError(RuntimeError):
    """Every grid point diverged; carries the per-point report."""

    def __init__(self, rows):
        super().__init__("all grid points diverged")
        self.rows = rows


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    model: str
    n_h: int
    optimizer: str
    # task parameters
    dataset: str | None = None
    target_column: int = -1
    steps: int = 0
    features: int = 3
    n_sequences: int = 2
    horizon: int = 1000
    cutoff: int = 50_000
    # model parameters
    periods: tuple[int, ...] = (1, 2, 4, 8, 16)
    loss: str = ""
    init_std: float = 0.1
    # optimizer parameters
    eta: float = 0.03
    window: int = 200
    lam: float = 0.95
    alpha: float = 7.5
    out_lr_scale: float = 8.0
    out_radius: float = 2.5
    gradient_mode: str = "replay"
    learning_rate: float = 0.01
    tbptt_depth: int = 0
    # protocol
    seeds: tuple[int, ...] = ()
    tuning_runs: int = 10
    eval_runs: int = 30
    # instrumentation
    record_regret: bool = False
    record_smoothness: bool = False
    regret_every: int = 1
    check_gradient_bounds: bool = False
    out_dir: str = "results"

    @property
    def label(self) -> str:
        if self.optimizer == "wogd":
            return f"{self.model}-wogd(w={self.window})"
        return f"{self.model}-{self.optimizer}"

    @property
    def loss_kind(self) -> str:
        if self.loss:
            return self.loss
        return tasks.LOSS_CROSS_ENTROPY if self.task == "binary_add" else tasks.LOSS_SQUARED

    @property
    def tape_depth(self) -> int:
        if self.optimizer == "wogd":
            return self.window
        return self.tbptt_depth if self.tbptt_depth > 0 else self.window

    def eval_seeds(self) -> tuple[int, ...]:
        return self.seeds if self.seeds else tuple(range(1, self.eval_runs + 1))

    def tuning_seeds(self) -> tuple[int, ...]:
        return tuple(range(1001, 1001 + self.tuning_runs))


_CONFIG_DEFAULTS = ExperimentConfig(task="csv", model="srnn", n_h=1, optimizer="wogd")

_KEY_ALIASES = {"lambda": "lam"}

_INT_KEYS = {
    "target_column", "steps", "features", "n_sequences", "horizon", "cutoff",
    "n_h", "window", "tbptt_depth", "tuning_runs", "eval_runs", "regret_every",
}
_FLOAT_KEYS = {
    "init_std", "eta", "lam", "alpha", "out_lr_scale", "out_radius", "learning_rate",
}
_BOOL_KEYS = {"record_regret", "record_smoothness", "check_gradient_bounds"}
_INT_LIST_KEYS = {"periods", "seeds"}
_STR_KEYS = {
    "task", "dataset", "model", "loss", "optimizer", "gradient_mode", "out_dir",
}


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key = value lines into a raw string mapping."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def config_from_mapping(raw: dict) -> ExperimentConfig:
    """Validate and coerce a raw mapping; collects every problem it finds."""
    problems: list[str] = []
    fields: dict = {}
    version = str(raw.get("schema_version", "")).strip()
    if version != str(SCHEMA_VERSION):
        problems.append(f"schema_version must be {SCHEMA_VERSION}, got {version or 'missing'}")

    for key, value in raw.items():
        if key == "schema_version":
            continue
        name = _KEY_ALIASES.get(key, key)
        try:
            if name in _INT_KEYS:
                fields[name] = int(str(value))
            elif name in _FLOAT_KEYS:
                fields[name] = float(str(value))
            elif name in _BOOL_KEYS:
                text = str(value).strip().lower()
                if text not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(text)
                fields[name] = text in ("true", "1", "yes")
            elif name in _INT_LIST_KEYS:
                if isinstance(value, (list, tuple)):
                    fields[name] = tuple(int(v) for v in value)
                else:
                    fields[name] = tuple(int(v) for v in str(value).split(",") if v.strip())
            elif name in _STR_KEYS:
                fields[name] = str(value).strip()
            else:
                problems.append(f"unknown key {key!r}")
        except (TypeError, ValueError):
            problems.append(f"bad value for {key!r}: {value!r}")

    for required in ("task", "model", "n_h", "optimizer"):
        if required not in fields:
            problems.append(f"missing required key {required!r}")
    if problems:
        raise ConfigError("; ".join(problems))

    cfg = replace(_CONFIG_DEFAULTS, **fields)
    problems.extend(_validate(cfg))
    if problems:
        raise ConfigError("; ".join(problems))
    return cfg


def _validate(cfg: ExperimentConfig) -> list[str]:
    p: list[str] = []
    if cfg.task not in TASK_KINDS:
        p.append(f"task must be one of {TASK_KINDS}")
    if cfg.model not in MODEL_KINDS:
        p.append(f"model must be one of {MODEL_KINDS}")
    if cfg.optimizer not in OPTIMIZER_KINDS:
        p.append(f"optimizer must be one of {OPTIMIZER_KINDS}")
    if cfg.n_h < 1:
        p.append("n_h must be >= 1")
    if cfg.task == "csv" and not cfg.dataset:
        p.append("csv task requires a dataset path")
    if cfg.task == "synthetic" and cfg.steps < 1:
        p.append("synthetic task requires steps >= 1")
    if cfg.task == "binary_add":
        if cfg.n_sequences not in (2, 3):
            p.append("n_sequences must be 2 or 3")
        if cfg.loss and cfg.loss != tasks.LOSS_CROSS_ENTROPY:
            p.append("binary_add task uses the cross_entropy loss")
    else:
        if cfg.loss and cfg.loss != tasks.LOSS_SQUARED:
            p.append(f"{cfg.task} task uses the squared loss")
    if cfg.loss and cfg.loss not in tasks.LOSS_KINDS:
        p.append(f"loss must be one of {tasks.LOSS_KINDS}")
    if cfg.optimizer == "wogd" and cfg.model == "lstm":
        p.append("the windowed projected update applies to srnn/cwrnn parameter triples")
    if cfg.model == "cwrnn":
        if len(cfg.periods) < 1:
            p.append("cwrnn requires periods")
        elif cfg.n_h % len(cfg.periods) != 0:
            p.append(f"n_h={cfg.n_h} not divisible by {len(cfg.periods)} clock blocks")
    if cfg.record_smoothness and cfg.optimizer != "wogd":
        p.append("record_smoothness requires the wogd optimizer")
    if cfg.record_smoothness and cfg.gradient_mode != "replay":
        p.append("record_smoothness requires replay gradients")
    if cfg.record_regret and cfg.optimizer != "wogd":
        p.append("record_regret requires the wogd optimizer")
    if cfg.regret_every < 1:
        p.append("regret_every must be >= 1")
    if cfg.check_gradient_bounds and (cfg.model != "srnn" or cfg.loss_kind != tasks.LOSS_SQUARED):
        p.append("check_gradient_bounds supports srnn with squared loss")
    if cfg.seeds and len(set(cfg.seeds)) != len(cfg.seeds):
        p.append("seeds must be distinct")
    try:
        if cfg.optimizer == "wogd":
            WogdConfig(
                eta=cfg.eta, window=cfg.window, lam=cfg.lam, alpha=cfg.alpha,
                out_lr_scale=cfg.out_lr_scale, out_radius=cfg.out_radius,
                mode=cfg.gradient_mode,
            )
        else:
            BaselineConfig(kind=cfg.optimizer, learning_rate=cfg.learning_rate)
    except ValueError as exc:
        p.append(str(exc))
    return p


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    return config_from_mapping(parse_config_text(text))


@dataclass
class RunResult:
    """Metrics of one (config, seed) training run."""

    label: str
    seed: int
    steps: int
    mse: float
    runtime_s: float
    curve: np.ndarray  # cumulative mean loss per step
    sustainable_t: int | None = None
    projection_count: int = 0
    ledger: analysis.RegretLedger | None = None


def _build_params(cfg: ExperimentConfig, n_x: int, rng: np.random.Generator):
    if cfg.model == "srnn":
        return models.random_srnn(cfg.n_h, n_x, cfg.init_std, rng)
    if cfg.model == "lstm":
        return models.random_lstm(cfg.n_h, n_x, cfg.init_std, rng)
    return models.random_cwrnn(cfg.n_h, n_x, cfg.periods, cfg.init_std, rng)


def _csv_samples(cfg: ExperimentConfig) -> list[tasks.StreamSample]:
    records = tasks.load_csv_stream(cfg.dataset, cfg.target_column)
    spec = tasks.fit_scaling(records, cfg.n_h, cfg.target_column)
    samples = tasks.scaled_stream(records, spec)
    if cfg.steps > 0:
        samples = samples[: cfg.steps]
    return samples


def _gradient_bound_check(params, grads, cfg: ExperimentConfig, t: int) -> None:
    # Closed-form gradient ceiling; only binding while the spectral and
    # output-norm preconditions hold at this step.
    lam = cfg.lam
    if spectral_norm(params.w) > lam or spectral_norm(params.u) > lam:
        return
    if np.linalg.norm(params.theta_out) > 1.0:
        return
    n_h, n_x = params.n_h, params.n_x
    slack = 1e-9
    bound_w = 2.0 * math.sqrt(n_h) * math.sqrt(n_h) / (1.0 - lam)
    bound_u = 2.0 * math.sqrt(n_h) * math.sqrt(n_x) / (1.0 - lam)
    if np.linalg.norm(grads["w"]) > bound_w + slack or np.linalg.norm(grads["u"]) > bound_u + slack:
        raise AssertionError(f"gradient-norm ceiling violated at t={t}")


def run_single(cfg: ExperimentConfig, seed: int) -> RunResult:
    """Execute the full online loop (predict, observe, update) for one seed."""
    loss_kind = cfg.loss_kind
    rng_init, rng_data = (
        np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(2)
    )

    binary = cfg.task == "binary_add"
    if cfg.task == "csv":
        stream = _csv_samples(cfg)
        total = len(stream)
    elif cfg.task == "synthetic":
        stream = tasks.synthetic_regression_stream(cfg.features, cfg.steps, rng_data, cfg.n_h)
        total = len(stream)
    else:
        bin_state = tasks.BinaryAddState(n=cfg.n_sequences, rng=rng_data)
        stream = []
        total = cfg.cutoff
    if total < 1:
        raise ConfigError("stream is empty")

    n_x = (cfg.n_sequences + 1) if binary else stream[0].x.shape[0]
    params = _build_params(cfg, n_x, rng_init)
    state = models.zero_state(params)
    tape = ActivationTape(cfg.tape_depth)

    wcfg = bcfg = None
    if cfg.optimizer == "wogd":
        wcfg = WogdConfig(
            eta=cfg.eta, window=cfg.window, lam=cfg.lam, alpha=cfg.alpha,
            out_lr_scale=cfg.out_lr_scale, out_radius=cfg.out_radius,
            mode=cfg.gradient_mode,
        )
    else:
        bcfg = BaselineConfig(kind=cfg.optimizer, learning_rate=cfg.learning_rate)

    record_regret = cfg.record_regret or cfg.record_smoothness
    ledger = None
    if record_regret:
        ledger = analysis.RegretLedger(
            eta=cfg.eta, w=cfg.window, lam=cfg.lam, n_h=cfg.n_h, n_x=n_x
        )

    losses = np.empty(total)
    projection_count = 0
    sustainable_t = None
    consec = 0
    started = time.perf_counter()

    for t in range(1, total + 1):
        if binary:
            if not stream:
                stream = tasks.binary_add_stream(bin_state, min(512, total - t + 1), start_t=t)
            sample = stream.pop(0)
        else:
            sample = stream[t - 1]

        new_state, gates = models.step_model(params, state, sample.x)
        pred = models.readout(params, new_state, loss_kind)
        loss_val, _ = tasks.loss_and_residual(pred, sample.d, loss_kind)
        tape.push(
            StepRecord(
                x=sample.x, d=sample.d, h_prev=state, h_new=new_state,
                prediction=pred, gates=gates,
            )
        )

        if cfg.optimizer == "wogd":
            grads = tbptt_gradient(tape, params, wcfg.mode, loss_kind)
            if cfg.check_gradient_bounds:
                _gradient_bound_check(params, grads, cfg, t)
            sampled = record_regret and (t - 1) % cfg.regret_every == 0
            if sampled:
                ledger.record_regret(projected_gradient(params, grads, wcfg))
            new_params, triggered = wogd_step(wcfg, params, grads, t)
            projection_count += triggered
            if cfg.record_smoothness and sampled:
                probe = replace_blocks(new_params, {"theta_out": params.theta_out})
                grads_after = tbptt_gradient(tape, probe, "replay", loss_kind)
                ledger.record_smoothness(
                    analysis.estimate_smoothness(grads, grads_after, params, probe)
                )
            params = new_params
        else:
            grads = instant_gradient(tape, params, loss_kind)
            params = baseline_step(bcfg, params, grads, t)

        if loss_kind == tasks.LOSS_SQUARED:
            r = pred - sample.d
            losses[t - 1] = r * r
        else:
            losses[t - 1] = loss_val

        if binary:
            correct = (pred > 0.5) == (sample.d > 0.5)
            consec = consec + 1 if correct else 0
            if consec >= cfg.horizon:
                sustainable_t = t - cfg.horizon + 1
                losses = losses[:t]
                break

        state = new_state

    steps_run = losses.shape[0]
    curve = np.cumsum(losses) / np.arange(1, steps_run + 1)
    runtime = time.perf_counter() - started
    return RunResult(
        label=cfg.label,
        seed=seed,
        steps=steps_run,
        mse=float(curve[-1]),
        runtime_s=runtime,
        curve=curve,
        sustainable_t=sustainable_t,
        projection_count=projection_count,
        ledger=ledger,
    )


def _run_task(payload) -> RunResult:
    cfg, seed = payload
    return run_single(cfg, seed)


def run_many(cfg: ExperimentConfig, seeds=None, workers: int = 1) -> list[RunResult]:
    """Independent (config, seed) runs, optionally across worker processes;
    result order follows the seed list regardless of completion order."""
    seeds = tuple(seeds) if seeds is not None else cfg.eval_seeds()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_task, [(cfg, s) for s in seeds]))
    return [run_single(cfg, s) for s in seeds]


def grid_search(cfg: ExperimentConfig, grid, tuning_seeds=None):
    """Mean-MSE argmin over learning rates; diverged points are excluded and
    flagged. Ties break toward the smaller rate. Returns (best, rows) where
    rows are (rate, mean_mse or None, note)."""
    grid = tuple(grid)
    if not grid:
        raise ConfigError("learning-rate grid is empty")
    seeds = tuple(tuning_seeds) if tuning_seeds is not None else cfg.tuning_seeds()
    rows = []
    for rate in grid:
        if cfg.optimizer == "wogd":
            candidate = replace(cfg, eta=rate)
        else:
            candidate = replace(cfg, learning_rate=rate)
        try:
            results = [run_single(candidate, s) for s in seeds]
        except NumericOverflowError as exc:
            rows.append((rate, None, f"diverged at t={exc.timestep}"))
            continue
        rows.append((rate, float(np.mean([r.mse for r in results])), ""))
    finite = [(mse, rate) for rate, mse, _ in rows if mse is not None]
    if not finite:
        raise GridSearchError(rows)
    _, best = min(finite)
    return best, rows


@dataclass
class SummaryRow:
    label: str
    n_runs: int
    mse_mean: float
    mse_min: float
    mse_max: float
    runtime_mean_s: float
    projection_mean: float
    sustainable: tuple[int | None, ...] = field(default=())


@dataclass
class Summary:
    rows: list[SummaryRow]
    curves: dict[str, np.ndarray]
    regret: dict[str, tuple[np.ndarray, np.ndarray]]  # label -> (R(t), R(t)/t) means
    smoothness: dict[str, tuple[np.ndarray, np.ndarray]]  # label -> (mean, max) beta_exp
    seeds: dict[str, tuple[int, ...]]


def aggregate(results: list[RunResult]) -> Summary:
    """Group runs by label; curves and instrumentation are averaged across
    seeds (truncated to the shortest run within a label)."""
    if not results:
        raise ValueError("no results to aggregate")
    by_label: dict[str, list[RunResult]] = {}
    for r in results:
        by_label.setdefault(r.label, []).append(r)
    rows = []
    curves: dict[str, np.ndarray] = {}
    regret: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    smooth: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    seeds: dict[str, tuple[int, ...]] = {}
    for label, runs in by_label.items():
        mses = [r.mse for r in runs]
        rows.append(
            SummaryRow(
                label=label,
                n_runs=len(runs),
                mse_mean=float(np.mean(mses)),
                mse_min=float(np.min(mses)),
                mse_max=float(np.max(mses)),
                runtime_mean_s=float(np.mean([r.runtime_s for r in runs])),
                projection_mean=float(np.mean([r.projection_count for r in runs])),
                sustainable=tuple(r.sustainable_t for r in runs),
            )
        )
        seeds[label] = tuple(r.seed for r in runs)
        min_len = min(r.curve.shape[0] for r in runs)
        curves[label] = np.mean([r.curve[:min_len] for r in runs], axis=0)
        ledgers = [r.ledger for r in runs if r.ledger is not None and len(r.ledger)]
        if ledgers:
            n = min(len(led) for led in ledgers)
            regret[label] = (
                np.mean([led.regret[:n] for led in ledgers], axis=0),
                np.mean([led.normalized[:n] for led in ledgers], axis=0),
            )
            betas = [led.beta_exp[:n] for led in ledgers]
            if any(b is not None for led in betas for b in led):
                stacked = np.asarray(
                    [[np.nan if b is None else b for b in led] for led in betas]
                )
                smooth[label] = (
                    np.nanmean(stacked, axis=0),
                    np.nanmax(stacked, axis=0),
                )
    return Summary(rows=rows, curves=curves, regret=regret, smoothness=smooth, seeds=seeds)


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray | list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        n = len(columns[0])
        for i in range(n):
            cells = []
            for col in columns:
                val = col[i]
                if isinstance(val, float) and math.isnan(val):
                    cells.append("")
                elif isinstance(val, (float, np.floating)):
                    cells.append(repr(float(val)))
                else:
                    cells.append(str(val))
            fh.write(",".join(cells) + "\n")


def emit_outputs(summary: Summary, out_dir, config_mapping: dict | None = None) -> list[str]:
    """Write summary.csv, curves.csv, regret.csv, smoothness.csv (the last two
    only when instrumentation exists) plus a manifest.json recording the exact
    config and seeds. Column order is stable; every numeric cell is emitted
    with full repr precision."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    labels = [row.label for row in summary.rows]
    spath = out / "summary.csv"
    with open(spath, "w", encoding="utf-8") as fh:
        fh.write(
            "label,n_runs,mse_mean,mse_min,mse_max,mean_runtime_s,"
            "projection_mean,sustainable_steps\n"
        )
        for row in summary.rows:
            sust = ";".join("failed" if s is None else str(s) for s in row.sustainable)
            fh.write(
                f"{row.label},{row.n_runs},{row.mse_mean!r},{row.mse_min!r},"
                f"{row.mse_max!r},{row.runtime_mean_s:.6f},{row.projection_mean!r},{sust}\n"
            )
    written.append(spath.name)

    n = min(c.shape[0] for c in summary.curves.values())
    _write_csv(
        out / "curves.csv",
        ["t"] + labels,
        [np.arange(1, n + 1)] + [summary.curves[lab][:n] for lab in labels],
    )
    written.append("curves.csv")

    if summary.regret:
        rlabels = list(summary.regret)
        n = min(summary.regret[lab][0].shape[0] for lab in rlabels)
        cols: list = [np.arange(1, n + 1)]
        header = ["t"]
        for lab in rlabels:
            header += [f"{lab}:regret", f"{lab}:normalized_regret"]
            cols += [summary.regret[lab][0][:n], summary.regret[lab][1][:n]]
        _write_csv(out / "regret.csv", header, cols)
        written.append("regret.csv")

    if summary.smoothness:
        slabels = list(summary.smoothness)
        n = min(summary.smoothness[lab][0].shape[0] for lab in slabels)
        cols = [np.arange(1, n + 1)]
        header = ["t"]
        for lab in slabels:
            header += [f"{lab}:beta_exp_mean", f"{lab}:beta_exp_max"]
            cols += [summary.smoothness[lab][0][:n], summary.smoothness[lab][1][:n]]
        _write_csv(out / "smoothness.csv", header, cols)
        written.append("smoothness.csv")

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config": config_mapping or {},
        "labels": labels,
        "seeds": {lab: list(s) for lab, s in summary.seeds.items()},
        "files": written,
        "omitted": [f for f in ("regret.csv", "smoothness.csv") if f not in written],
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append("manifest.json")
    return written
