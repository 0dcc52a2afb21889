"""Reproducible experiments: config file parsing, seeded paired trials over
the three placement schemes, obstacle/K-factor sweeps, CSV emission.

All three schemes within a trial share one scenario and one fading draw
(paired comparison); trial seeds are base_seed + trial index, reused across
sweep points so sweeps are paired at the trial level too.  Reruns of the
same config produce byte-identical CSV files.
"""

from __future__ import annotations

import configparser
import math
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .channel import ChannelBuilder, ChannelMode, PathLossLaw, RadioConfig
from .geometry import Position3
from .placement import (
    OptimizerConfig,
    PlacementResult,
    SearchConfig,
    joint_search,
    optimize_cu,
    optimize_d2d,
    percapita_ratio,
    write_trace_csv,
)
from .scenario import GenerationConfig, generate_scenario
from .throughput import jain_index, net_throughput, ratio_from_totals

ROWS_CSV_HEADER = (
    "seed,sweep_param,sweep_value,scheme,x,y,d2d_total,cu_total,net,jain,"
    "t_value,iters,stop_reason"
)
SUMMARY_CSV_HEADER = (
    "sweep_param,sweep_value,scheme,trials,d2d_total_mean,d2d_total_std,"
    "cu_total_mean,cu_total_std,net_mean,net_std,jain_mean,jain_std"
)


class ConfigError(ValueError):
    """Invalid experiment configuration (file syntax, unknown key, bad value)."""


class Scheme(Enum):
    JOINT_OPT = "JointOpt"
    D2D_ONLY = "D2DOnlyPlacement"
    CU_ONLY = "CUOnlyPlacement"


@dataclass(frozen=True)
class ExperimentConfig:
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    radio: RadioConfig = field(default_factory=RadioConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    trials: int = 20
    base_seed: int = 0
    mode: ChannelMode = ChannelMode.EXPECTED
    obstacle_sweep: tuple | None = None
    rician_k_sweep: tuple | None = None
    out_dir: Path = Path("out")

    def __post_init__(self):
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "generation", replace(self.generation, radio=self.radio))
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        for name, sweep in (("obstacle_sweep", self.obstacle_sweep),
                            ("rician_k_sweep", self.rician_k_sweep)):
            if sweep is not None:
                if len(sweep) == 0:
                    raise ConfigError(f"{name} must be nonempty when present")
                object.__setattr__(self, name, tuple(sweep))

    def sweep_points(self) -> list:
        """(param, value) pairs to run; a single ('none', 0) without sweeps."""
        points = []
        if self.obstacle_sweep is not None:
            points += [("obstacles", int(v)) for v in self.obstacle_sweep]
        if self.rician_k_sweep is not None:
            points += [("rician_k", float(v)) for v in self.rician_k_sweep]
        return points or [("none", 0)]


@dataclass(frozen=True)
class SchemeRow:
    """One rows.csv line: a scheme evaluated on one trial."""

    seed: int
    sweep_param: str
    sweep_value: float
    scheme: Scheme
    x: float
    y: float
    d2d_total: float
    cu_total: float
    net: float
    jain: float
    t_value: float
    iters: int
    stop_reason: str

    def to_csv(self) -> str:
        fields = [
            self.seed,
            self.sweep_param,
            self.sweep_value,
            self.scheme.value,
            self.x,
            self.y,
            self.d2d_total,
            self.cu_total,
            self.net,
            self.jain,
            self.t_value,
            self.iters,
            self.stop_reason,
        ]
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in fields)


@dataclass(frozen=True)
class SchemeReport:
    """Ensemble view of one scheme at one sweep point."""

    scheme: Scheme
    sweep_param: str
    sweep_value: float
    rows: tuple
    d2d_mean: float
    d2d_std: float
    cu_mean: float
    cu_std: float
    net_mean: float
    net_std: float
    jain_mean: float
    jain_std: float

    @classmethod
    def from_rows(cls, scheme: Scheme, sweep_param, sweep_value, rows) -> "SchemeReport":
        def stats(values):
            arr = np.asarray(values, dtype=np.float64)
            std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
            return float(np.mean(arr)), std

        d2d_mean, d2d_std = stats([r.d2d_total for r in rows])
        cu_mean, cu_std = stats([r.cu_total for r in rows])
        net_mean, net_std = stats([r.net for r in rows])
        jain_mean, jain_std = stats([r.jain for r in rows])
        return cls(
            scheme, sweep_param, sweep_value, tuple(rows),
            d2d_mean, d2d_std, cu_mean, cu_std, net_mean, net_std, jain_mean, jain_std,
        )

    def to_csv(self) -> str:
        fields = [
            self.sweep_param,
            self.sweep_value,
            self.scheme.value,
            len(self.rows),
            self.d2d_mean,
            self.d2d_std,
            self.cu_mean,
            self.cu_std,
            self.net_mean,
            self.net_std,
            self.jain_mean,
            self.jain_std,
        ]
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in fields)


@dataclass(frozen=True)
class TrialOutput:
    """All rows of one trial plus the raw optimizer results (for traces)."""

    rows: tuple
    d2d_result: PlacementResult
    cu_result: PlacementResult
    joint_result: PlacementResult


def _apply_sweep(cfg: ExperimentConfig, sweep_point) -> GenerationConfig:
    param, value = sweep_point
    gen = cfg.generation
    if param == "obstacles":
        return replace(gen, num_obstacles=int(value))
    if param == "rician_k":
        return replace(gen, radio=replace(gen.radio, rician_k=float(value)))
    if param == "none":
        return gen
    raise ConfigError(f"unknown sweep parameter {param!r}")


def run_trial(cfg: ExperimentConfig, seed: int, sweep_point=("none", 0)) -> TrialOutput:
    """One paired trial: generate, optimize all three placements, report.

    All three schemes are evaluated on the identical scenario and the
    identical fading seed; the channel is rebuilt at each evaluated
    position from the trial's frozen draw.
    """
    gen = _apply_sweep(cfg, sweep_point)
    scn = generate_scenario(gen, seed)
    if scn.num_pairs == 0:
        raise ValueError("trial rejected: no D2D pairs, the D2D placement is undefined")
    if scn.num_cus == 0:
        raise ValueError("trial rejected: no CUs, the CU placement is undefined")

    builder = ChannelBuilder(scn, cfg.mode, seed)
    x_lo, x_hi, y_lo, y_hi = scn.region
    start_state = builder.at(
        Position3((x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0, scn.uav_height)
    )
    res_d = optimize_d2d(scn, start_state, cfg.optimizer)
    res_c = optimize_cu(scn, start_state, cfg.optimizer)
    phi = percapita_ratio(res_d.objective, res_c.objective, scn)
    res_j = joint_search(res_d.position, res_c.position, phi, cfg.search, scn, builder)

    param, value = sweep_point
    rows = []
    for scheme, res in (
        (Scheme.JOINT_OPT, res_j),
        (Scheme.D2D_ONLY, res_d),
        (Scheme.CU_ONLY, res_c),
    ):
        pos = res.position
        report = net_throughput(pos, builder.at(pos), scn)
        ratio = ratio_from_totals(
            report.d2d_total, report.cu_total, scn.num_pairs, scn.num_cus
        )
        t_value = math.inf if math.isinf(ratio) else abs(ratio - phi)
        rows.append(
            SchemeRow(
                seed=seed,
                sweep_param=param,
                sweep_value=float(value),
                scheme=scheme,
                x=pos.x,
                y=pos.y,
                d2d_total=report.d2d_total,
                cu_total=report.cu_total,
                net=report.net,
                jain=jain_index(report.per_entity_rates()),
                t_value=t_value,
                iters=res.iterations,
                stop_reason=res.stop_reason.value,
            )
        )
    return TrialOutput(tuple(rows), res_d, res_c, res_j)


def _trial_job(args):
    cfg, seed, sweep_point = args
    return run_trial(cfg, seed, sweep_point)


@dataclass(frozen=True)
class ExperimentResult:
    rows_csv: Path
    summary_csv: Path
    traces_dir: Path
    rows: tuple
    reports: tuple


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run sweep points x trials, write rows.csv, summary.csv, and traces/.

    Output ordering is (sweep point, trial, scheme) regardless of worker
    completion order.  Convergence traces are written for the first trial
    of each sweep point.  Partial outputs are removed on failure.
    """
    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    rows_csv = out_dir / "rows.csv"
    summary_csv = out_dir / "summary.csv"
    traces_dir = out_dir / "traces"
    created = []
    try:
        points = cfg.sweep_points()
        jobs = [
            (cfg, cfg.base_seed + t, point) for point in points for t in range(cfg.trials)
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outputs = list(pool.map(_trial_job, jobs, chunksize=1))
        else:
            outputs = [_trial_job(job) for job in jobs]

        by_point = {
            point: outputs[i * cfg.trials : (i + 1) * cfg.trials]
            for i, point in enumerate(points)
        }

        all_rows = []
        reports = []
        traces_dir.mkdir(exist_ok=True)
        created.append(traces_dir)
        for point in points:
            trials = by_point[point]
            for out in trials:
                all_rows.extend(out.rows)
            for scheme in Scheme:
                scheme_rows = [r for out in trials for r in out.rows if r.scheme is scheme]
                reports.append(SchemeReport.from_rows(scheme, point[0], float(point[1]),
                                                      scheme_rows))
            first = trials[0]
            stem = f"{point[0]}_{point[1]:g}_seed{cfg.base_seed}"
            for label, res in (
                ("d2d", first.d2d_result),
                ("cu", first.cu_result),
                ("joint", first.joint_result),
            ):
                trace_path = traces_dir / f"{stem}_{label}.csv"
                write_trace_csv(res, trace_path)
                created.append(trace_path)

        rows_csv.write_text(
            "\n".join([ROWS_CSV_HEADER] + [r.to_csv() for r in all_rows]) + "\n",
            encoding="utf-8",
        )
        created.append(rows_csv)
        summary_csv.write_text(
            "\n".join([SUMMARY_CSV_HEADER] + [rep.to_csv() for rep in reports]) + "\n",
            encoding="utf-8",
        )
        created.append(summary_csv)
    except BaseException:
        for path in created:
            if path.is_dir():
                shutil.rmtree(path, ignore_errors=True)
            else:
                path.unlink(missing_ok=True)
        raise
    return ExperimentResult(rows_csv, summary_csv, traces_dir, tuple(all_rows), tuple(reports))


# --- config file parsing ---------------------------------------------------

def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_float(text: str) -> float:
    return float(text.strip())


def _parse_floats(text: str) -> tuple:
    parts = [p for p in text.replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def _parse_mode(text: str) -> ChannelMode:
    try:
        return ChannelMode(text.strip().lower())
    except ValueError:
        raise ValueError(f"mode must be 'expected' or 'sampled', got {text!r}")


def _parse_pair(text: str) -> tuple:
    vals = _parse_floats(text)
    if len(vals) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return vals


def _parse_quad(text: str) -> tuple:
    vals = _parse_floats(text)
    if len(vals) != 4:
        raise ValueError(f"expected four comma-separated numbers, got {text!r}")
    return vals


_SCHEMA = {
    "generation": {
        "num_pairs": _parse_int,
        "num_cus": _parse_int,
        "num_obstacles": _parse_int,
        "region": _parse_quad,
        "uav_height": _parse_float,
        "user_height": _parse_float,
        "pair_max_dist": _parse_float,
        "obstacle_side": _parse_pair,
        "obstacle_height": _parse_pair,
        "max_attempts": _parse_int,
    },
    "radio": {
        "tx_power_d2d_dbm": _parse_float,
        "tx_power_cu_dbm": _parse_float,
        "gain_tx_dbi": _parse_float,
        "gain_rx_dbi": _parse_float,
        "gain_uav_dbi": _parse_float,
        "noise_dbm": _parse_float,
        "ris_elements": _parse_int,
        "pl_los": _parse_pair,
        "pl_nlos": _parse_pair,
        "rician_k": _parse_float,
        "carrier_ghz": _parse_float,
    },
    "optimizer": {
        "learning_rate": _parse_float,
        "tolerance": _parse_float,
        "displacement": _parse_float,
        "max_iters": _parse_int,
    },
    "search": {
        "num_directions": _parse_int,
        "step_size": _parse_float,
        "max_steps": _parse_int,
    },
    "experiment": {
        "trials": _parse_int,
        "base_seed": _parse_int,
        "mode": _parse_mode,
        "obstacle_sweep": _parse_floats,
        "rician_k_sweep": _parse_floats,
        "out_dir": str.strip,
    },
}


def load_config(path) -> ExperimentConfig:
    """Parse a `[section]` / `key = value` config file; unknown keys are
    rejected and missing keys fall back to the benchmark defaults."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc

    values: dict = {section: {} for section in _SCHEMA}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key} in {path}")
            try:
                values[section][key] = _SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc

    def build(factory, section, **extra):
        try:
            return factory(**values[section], **extra)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid [{section}] settings: {exc}") from exc

    radio_kwargs = dict(values["radio"])
    if "pl_los" in radio_kwargs:
        radio_kwargs["pl_los"] = PathLossLaw(*radio_kwargs["pl_los"])
    if "pl_nlos" in radio_kwargs:
        radio_kwargs["pl_nlos"] = PathLossLaw(*radio_kwargs["pl_nlos"])
    try:
        radio = RadioConfig(**radio_kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid [radio] settings: {exc}") from exc

    generation = build(GenerationConfig, "generation", radio=radio)
    optimizer = build(OptimizerConfig, "optimizer")
    search = build(SearchConfig, "search")

    exp = dict(values["experiment"])
    try:
        return ExperimentConfig(
            generation=generation,
            radio=radio,
            optimizer=optimizer,
            search=search,
            trials=exp.get("trials", 20),
            base_seed=exp.get("base_seed", 0),
            mode=exp.get("mode", ChannelMode.EXPECTED),
            obstacle_sweep=exp.get("obstacle_sweep"),
            rician_k_sweep=exp.get("rician_k_sweep"),
            out_dir=Path(exp.get("out_dir", "out")),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid [experiment] settings: {exc}") from exc


def default_config() -> ExperimentConfig:
    """The benchmark defaults (equivalent to loading an empty config file)."""
    return ExperimentConfig()
