"""Monte Carlo experiment harness: seeded trials, statistics, CSV and SVG.

Each trial builds a fresh world seeded with base_seed + trial_index, runs
the full pick-place-correct pipeline, and records ground-truth offsets.
Trials are independent, so they can run in any order or in parallel and
still produce identical output files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from pushcorrect.camera import CameraModel
from pushcorrect.controller import ArrangementPlan, CorrectionConfig, run_arrangement
from pushcorrect.exceptions import ConfigError, EmptyInput, IoFailure
from pushcorrect.geometry import OffsetVec, PlanarPose
from pushcorrect.injection import ErrorSpec
from pushcorrect.world import CubeObject, NoiseProfile, TableBounds, WorldState

EXPERIMENTS = ("nominal", "translation", "orientation", "estimator_proxy",
               "arrangement_demo")

#: Single-cube scenario: start at the table center, place off to the side.
SINGLE_START = PlanarPose(0.0, 0.0, 0.0)
SINGLE_DESIRED = PlanarPose(0.12, 0.08, 0.0)

#: Four-cube demo: scattered starts, 2x2 target pattern.
DEMO_CUBES = (
    ("red", PlanarPose(-0.30, -0.12, 0.0), PlanarPose(-0.06, -0.06, 0.0)),
    ("green", PlanarPose(-0.10, 0.14, 0.0), PlanarPose(-0.06, 0.06, 0.0)),
    ("blue", PlanarPose(0.10, -0.14, 0.0), PlanarPose(0.06, -0.06, 0.0)),
    ("yellow", PlanarPose(0.30, 0.12, 0.0), PlanarPose(0.06, 0.06, 0.0)),
)

#: The estimator-proxy experiment shifts by slightly less than the raw
#: translation experiment, mirroring an upstream estimator that is wrong
#: but not uniformly worst-case.
PROXY_SHIFT_SCALE = 0.9

CSV_HEADER = ("trial,seed,inj_dx_mm,inj_dy_mm,inj_dyaw_deg,"
              "dxy_place_mm,dxy_push_mm,pushes,status")


def default_error_spec(experiment: str) -> ErrorSpec:
    if experiment == "nominal":
        return ErrorSpec(kind="none")
    if experiment == "translation":
        return ErrorSpec(kind="translation")
    if experiment == "orientation":
        return ErrorSpec(kind="orientation")
    if experiment == "estimator_proxy":
        return ErrorSpec(kind="estimator_proxy",
                         max_shift=0.025 * PROXY_SHIFT_SCALE)
    if experiment == "arrangement_demo":
        return ErrorSpec(kind="estimator_proxy")
    raise ConfigError(f"unknown experiment {experiment!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: which scenario, which fidelity, how many trials."""

    experiment: str = "nominal"
    mode: str = "sim"
    trials: int | None = None
    base_seed: int = 20260809
    output_dir: str = "results"
    noise: NoiseProfile | None = None
    error: ErrorSpec | None = None
    correction: CorrectionConfig | None = None
    camera: CameraModel = field(default_factory=CameraModel)
    table: TableBounds = field(default_factory=TableBounds)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.mode not in ("sim", "real"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be >= 1")

    @property
    def resolved_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        return 100 if self.mode == "sim" else 10

    @property
    def resolved_noise(self) -> NoiseProfile:
        if self.noise is not None:
            return self.noise
        return NoiseProfile.sim() if self.mode == "sim" else NoiseProfile.real()

    @property
    def resolved_error(self) -> ErrorSpec:
        return self.error if self.error is not None else default_error_spec(self.experiment)

    @property
    def resolved_correction(self) -> CorrectionConfig:
        if self.correction is not None:
            return self.correction
        if self.experiment == "arrangement_demo":
            # the demo targets sub-millimeter ground truth on every cube, so
            # it gates tighter than the estimate noise floor around 1 mm
            return CorrectionConfig(threshold=0.0007, defer_correction=True)
        return CorrectionConfig()

    @property
    def label(self) -> str:
        return f"{self.experiment}_{self.mode}"


@dataclass(frozen=True)
class TrialRecord:
    """Ground-truth outcome of one object in one trial."""

    trial_index: int
    seed: int
    injected: OffsetVec
    d_xy_after_place: float
    d_xy_after_push: float
    push_count: int
    status: str

    def __post_init__(self):
        if self.d_xy_after_place < 0 or self.d_xy_after_push < 0:
            raise ValueError("offset distances must be >= 0")

    @property
    def completed(self) -> bool:
        return self.status != "failed"


@dataclass(frozen=True)
class PhaseStats:
    mean: float
    sample_std: float
    median: float
    q1: float
    q3: float
    min: float
    max: float

    def __post_init__(self):
        if not (self.q1 <= self.median <= self.q3):
            raise ValueError("quartiles out of order")


@dataclass(frozen=True)
class ExperimentSummary:
    after_place: PhaseStats
    after_push: PhaseStats
    mean_push_count: float
    completed: int
    failed: int


def _phase_stats(values: np.ndarray) -> PhaseStats:
    q1, med, q3 = (float(q) for q in
                   np.percentile(values, [25.0, 50.0, 75.0], method="linear"))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return PhaseStats(mean=float(np.mean(values)), sample_std=std, median=med,
                      q1=q1, q3=q3, min=float(np.min(values)),
                      max=float(np.max(values)))


def summarize(records: list[TrialRecord]) -> ExperimentSummary:
    """Statistics over completed records; sample std uses the n-1
    denominator (0 by convention for a single record), quartiles linear
    interpolation. Raises EmptyInput with no completed records."""
    completed = [r for r in records if r.completed]
    if not completed:
        raise EmptyInput("no completed trials to summarize")
    place = np.asarray([r.d_xy_after_place for r in completed])
    push = np.asarray([r.d_xy_after_push for r in completed])
    pushes = np.asarray([r.push_count for r in completed])
    return ExperimentSummary(
        after_place=_phase_stats(place),
        after_push=_phase_stats(push),
        mean_push_count=float(np.mean(pushes)),
        completed=len(completed),
        failed=len(records) - len(completed),
    )


def build_world(cfg: ExperimentConfig, trial_index: int) -> tuple[WorldState, ArrangementPlan]:
    """Fresh seeded world plus the plan for one trial of this experiment."""
    seed = cfg.base_seed + trial_index
    noise = cfg.resolved_noise
    if cfg.experiment == "arrangement_demo":
        cubes = [CubeObject(color, color, start)
                 for color, start, _ in DEMO_CUBES]
        plan = ArrangementPlan(tuple(
            (color, desired) for color, _, desired in DEMO_CUBES))
    else:
        cubes = [CubeObject("cube", "red", SINGLE_START)]
        plan = ArrangementPlan((("cube", SINGLE_DESIRED),))
    world = WorldState(cubes, noise, seed, table=cfg.table)
    return world, plan


def run_trial(cfg: ExperimentConfig, trial_index: int) -> list[TrialRecord]:
    """Run one seeded trial; the demo scenario yields one record per cube."""
    world, plan = build_world(cfg, trial_index)
    traces = run_arrangement(plan, world, cfg.camera, cfg.resolved_correction,
                             error_spec=cfg.resolved_error)
    records = []
    for trace in traces:
        if trace.terminal_status == "failed" or trace.final_offset is None:
            place = trace.offset_after_place
            records.append(TrialRecord(
                trial_index=trial_index, seed=world.seed,
                injected=trace.injected_error,
                d_xy_after_place=place.d_xy if place else 0.0,
                d_xy_after_push=trace.final_offset.d_xy if trace.final_offset else 0.0,
                push_count=trace.push_count, status="failed"))
        else:
            records.append(TrialRecord(
                trial_index=trial_index, seed=world.seed,
                injected=trace.injected_error,
                d_xy_after_place=trace.offset_after_place.d_xy,
                d_xy_after_push=trace.final_offset.d_xy,
                push_count=trace.push_count,
                status=trace.terminal_status))
    return records


def _trial_worker(args) -> list[TrialRecord]:
    cfg, index = args
    return run_trial(cfg, index)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1,
                   ) -> tuple[list[TrialRecord], ExperimentSummary]:
    """All trials of one experiment plus their summary.

    With jobs > 1 trials run in a process pool; records are keyed by trial
    index, so parallel and serial runs produce identical results. Failed
    trials stay in the record list but are excluded from the summary.
    """
    indices = range(cfg.resolved_trials)
    if jobs > 1:
        with Pool(processes=jobs) as pool:
            batches = pool.map(_trial_worker, [(cfg, i) for i in indices],
                               chunksize=max(1, cfg.resolved_trials // (4 * jobs)))
    else:
        batches = [run_trial(cfg, i) for i in indices]
    records = [record for batch in batches for record in batch]
    records.sort(key=lambda r: r.trial_index)
    return records, summarize(records)


# --- export -------------------------------------------------------------------


def _record_row(r: TrialRecord) -> str:
    return (f"{r.trial_index},{r.seed},{r.injected.dx * 1000:.4f},"
            f"{r.injected.dy * 1000:.4f},{math.degrees(r.injected.dyaw):.4f},"
            f"{r.d_xy_after_place * 1000:.4f},{r.d_xy_after_push * 1000:.4f},"
            f"{r.push_count},{r.status}")


def export_csv(records: list[TrialRecord], summary: ExperimentSummary | None,
               path) -> Path:
    """Write the per-trial CSV; the summary goes to a sibling _summary.csv."""
    path = Path(path)
    lines = [CSV_HEADER] + [_record_row(r) for r in records]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n")
        if summary is not None:
            spath = path.with_name(path.stem + "_summary.csv")
            srows = ["phase,mean_mm,std_mm,median_mm,q1_mm,q3_mm,min_mm,max_mm,"
                     "mean_pushes,completed,failed"]
            for phase, stats in (("after_place", summary.after_place),
                                 ("after_push", summary.after_push)):
                srows.append(
                    f"{phase},{stats.mean * 1000:.4f},{stats.sample_std * 1000:.4f},"
                    f"{stats.median * 1000:.4f},{stats.q1 * 1000:.4f},"
                    f"{stats.q3 * 1000:.4f},{stats.min * 1000:.4f},"
                    f"{stats.max * 1000:.4f},{summary.mean_push_count:.4f},"
                    f"{summary.completed},{summary.failed}")
            spath.write_text("\n".join(srows) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return path


def parse_records_csv(path) -> list[TrialRecord]:
    """Read back a CSV produced by export_csv."""
    lines = Path(path).read_text().strip().splitlines()
    if lines[0] != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header in {path}")
    records = []
    for line in lines[1:]:
        (trial, seed, dx, dy, dyaw, place, push, pushes, status) = line.split(",")
        records.append(TrialRecord(
            trial_index=int(trial), seed=int(seed),
            injected=OffsetVec(float(dx) / 1000, float(dy) / 1000,
                               math.radians(float(dyaw))),
            d_xy_after_place=float(place) / 1000,
            d_xy_after_push=float(push) / 1000,
            push_count=int(pushes), status=status))
    return records


# --- box plot SVG --------------------------------------------------------------

_SVG_W, _SVG_H = 960, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 30, 110
_FLOOR_MM = 1e-3  # values below this clamp to the axis floor


def export_boxplot_svg(summaries: dict[str, ExperimentSummary], path) -> Path:
    """Box plots of offset distances on a logarithmic vertical axis.

    One box per (summary label, phase): interquartile box, whiskers to
    min/max, white median line, black mean dot. Millimeter values.
    """
    if not summaries:
        raise EmptyInput("no summaries to plot")
    boxes = []
    for label, summary in summaries.items():
        for phase, stats in (("place", summary.after_place),
                             ("push", summary.after_push)):
            boxes.append((f"{label}/{phase}", stats))

    def mm(v):
        return max(v * 1000.0, _FLOOR_MM)

    lo = min(math.floor(math.log10(mm(s.min))) for _, s in boxes)
    hi = max(math.ceil(math.log10(mm(s.max))) for _, s in boxes)
    if hi == lo:
        hi = lo + 1

    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def y_of(value_m):
        frac = (math.log10(mm(value_m)) - lo) / (hi - lo)
        return _MARGIN_T + plot_h * (1.0 - frac)

    slot = plot_w / len(boxes)
    half_box = min(18.0, slot * 0.3)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
        f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
    ]
    for decade in range(lo, hi + 1):
        y = y_of((10.0 ** decade) / 1000.0)
        parts.append(f'<line x1="{_MARGIN_L}" y1="{y:.2f}" '
                     f'x2="{_SVG_W - _MARGIN_R}" y2="{y:.2f}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" '
                     f'font-size="12" text-anchor="end" '
                     f'class="tick">1e{decade}</text>')
    parts.append(f'<text x="14" y="{_MARGIN_T - 12}" font-size="12">'
                 f'offset distance [mm], log scale</text>')

    for k, (label, stats) in enumerate(boxes):
        cx = _MARGIN_L + slot * (k + 0.5)
        y_q1, y_q3 = y_of(stats.q1), y_of(stats.q3)
        y_med, y_mean = y_of(stats.median), y_of(stats.mean)
        y_min, y_max = y_of(stats.min), y_of(stats.max)
        parts.append(f'<g class="box" data-label="{label}">')
        parts.append(f'<line x1="{cx:.2f}" y1="{y_min:.2f}" x2="{cx:.2f}" '
                     f'y2="{y_max:.2f}" stroke="#666666" stroke-width="1"/>')
        for y_cap in (y_min, y_max):
            parts.append(f'<line x1="{cx - half_box / 2:.2f}" y1="{y_cap:.2f}" '
                         f'x2="{cx + half_box / 2:.2f}" y2="{y_cap:.2f}" '
                         f'stroke="#666666" stroke-width="1"/>')
        parts.append(f'<rect x="{cx - half_box:.2f}" y="{y_q3:.2f}" '
                     f'width="{2 * half_box:.2f}" '
                     f'height="{max(y_q1 - y_q3, 0.0):.2f}" '
                     f'fill="#4878a8" stroke="#2f4f6f" stroke-width="1"/>')
        parts.append(f'<line x1="{cx - half_box:.2f}" y1="{y_med:.2f}" '
                     f'x2="{cx + half_box:.2f}" y2="{y_med:.2f}" '
                     f'stroke="white" stroke-width="2"/>')
        parts.append(f'<circle cx="{cx:.2f}" cy="{y_mean:.2f}" r="3" '
                     f'fill="black"/>')
        parts.append(f'<text x="{cx:.2f}" y="{_SVG_H - _MARGIN_B + 16}" '
                     f'font-size="11" text-anchor="end" '
                     f'transform="rotate(-45 {cx:.2f} '
                     f'{_SVG_H - _MARGIN_B + 16})">{label}</text>')
        parts.append('</g>')
    parts.append('</svg>')

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(parts) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return path
