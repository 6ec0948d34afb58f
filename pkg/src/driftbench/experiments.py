"""Experiment runner: multi-seed cells of (stream x detector) with CSV output.

A cell runs R independent prequential runs (run i uses seed base + i),
scores synthetic runs against the stream's drift schedule, and
aggregates into a mean +/- std row.  CSV streams have no ground-truth
drift positions, so their rows carry only alarms and accuracy.  Cells
of a matrix run independently: one failing cell does not stop the
others.  Execution order and output row order are fixed (cells in the
given order, runs by index), so identical configurations produce
byte-identical CSV output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

from .detectors import ADWIN, CUSUM, DDM, EDDM, MDDM, RDDM, Arithmetic, Euler, Geometric, PageHinkley, fhddm
from .errors import DataFormatError, UsageError
from .evaluation import AggregateRow, DriftScore, aggregate, score_run, unscored_row
from .learners import NaiveBayes, prequential_run
from .streams import ConceptSchedule, Stream, StreamSpec, generate_stream, load_csv_stream

SYNTHETIC_FAMILIES = ("sine1", "mixed", "circles", "led")

# Window sizes and acceptable delays per stream family; wider windows and
# delays suit the gradually drifting streams, CSV streams behave like the
# abrupt ones.
WINDOW_DEFAULTS = {"sine1": 25, "mixed": 25, "circles": 100, "led": 100, "csv": 25}
ACCEPT_DELAY_DEFAULTS = {"sine1": 250, "mixed": 250, "circles": 1000, "led": 1000}

MDDM_DELTA_DEFAULT = 1e-6


def _make_mddm_a(window, delta, params):
    return MDDM(Arithmetic(params.get("d", 0.01)), n=window, delta=delta)


def _make_mddm_g(window, delta, params):
    return MDDM(Geometric(params.get("r", 1.01)), n=window, delta=delta)


def _make_mddm_e(window, delta, params):
    return MDDM(Euler(params.get("lambda", 0.01)), n=window, delta=delta)


def _make_fhddm(window, delta, params):
    return fhddm(n=window, delta=delta)


def _make_cusum(window, delta, params):
    return CUSUM(slack=params.get("delta", 0.005),
                 threshold=params.get("lambda", 50.0),
                 min_instances=int(params.get("min_instances", 30)))


def _make_page_hinkley(window, delta, params):
    return PageHinkley(slack=params.get("delta", 0.005),
                       threshold=params.get("lambda", 50.0))


def _make_ddm(window, delta, params):
    return DDM(warning_level=params.get("warning_level", 2.0),
               drift_level=params.get("drift_level", 3.0),
               min_instances=int(params.get("min_instances", 30)))


def _make_eddm(window, delta, params):
    return EDDM(alpha=params.get("alpha", 0.95),
                beta=params.get("beta", 0.90),
                min_errors=int(params.get("min_errors", 30)))


def _make_rddm(window, delta, params):
    return RDDM(warning_level=params.get("warning_level", 1.773),
                drift_level=params.get("drift_level", 2.258),
                max_concept=int(params.get("max_concept", 40000)),
                min_stable=int(params.get("min_stable", 7000)),
                warn_limit=int(params.get("warn_limit", 1400)),
                min_instances=int(params.get("min_instances", 129)))


def _make_adwin(window, delta, params):
    return ADWIN(delta=params.get("delta", 0.002),
                 max_window=int(params.get("max_window", 32768)))


@dataclass(frozen=True)
class _DetectorEntry:
    factory: Callable
    param_keys: frozenset
    uses_confidence: bool  # whether the --delta confidence flag applies


DETECTORS = {
    "mddm_a": _DetectorEntry(_make_mddm_a, frozenset({"d", "delta"}), True),
    "mddm_g": _DetectorEntry(_make_mddm_g, frozenset({"r", "delta"}), True),
    "mddm_e": _DetectorEntry(_make_mddm_e, frozenset({"lambda", "delta"}), True),
    "fhddm": _DetectorEntry(_make_fhddm, frozenset({"delta"}), True),
    "cusum": _DetectorEntry(
        _make_cusum, frozenset({"delta", "lambda", "min_instances"}), False),
    "page_hinkley": _DetectorEntry(
        _make_page_hinkley, frozenset({"delta", "lambda"}), False),
    "ddm": _DetectorEntry(
        _make_ddm, frozenset({"warning_level", "drift_level", "min_instances"}), False),
    "eddm": _DetectorEntry(
        _make_eddm, frozenset({"alpha", "beta", "min_errors"}), False),
    "rddm": _DetectorEntry(
        _make_rddm,
        frozenset({"warning_level", "drift_level", "max_concept", "min_stable",
                   "warn_limit", "min_instances"}), False),
    "adwin": _DetectorEntry(_make_adwin, frozenset({"delta", "max_window"}), False),
    "none": _DetectorEntry(lambda window, delta, params: None, frozenset(), False),
}

STREAM_PARAM_KEYS = frozenset({"length", "zeta", "drift_every"})

RUN_CSV_FIELDS = ("stream", "detector", "seed", "run", "delay_mean", "tp",
                  "fp", "fn", "accuracy", "alarm_count")
AGG_CSV_FIELDS = ("stream", "detector", "runs",
                  "delay_mean_mean", "delay_mean_std", "tp_mean", "tp_std",
                  "fp_mean", "fp_std", "fn_mean", "fn_std",
                  "accuracy_mean", "accuracy_std", "alarms_mean", "alarms_std")


@dataclass(frozen=True)
class ExperimentConfig:
    """One (stream x detector) cell of the experiment matrix."""

    stream: str
    detector: str = "none"
    runs: int = 100
    seed: int = 1
    window_size: Optional[int] = None
    delta: float = MDDM_DELTA_DEFAULT
    accept_delay: Optional[int] = None
    noise: float = 0.10
    policy: str = "reset"
    params: dict = field(default_factory=dict)
    out: Optional[str] = None

    def __post_init__(self):
        name = self.detector.lower()
        object.__setattr__(self, "detector", name)
        if self.policy.startswith("blind") and name != "none":
            raise UsageError("the blind policy runs without a detector; "
                             "use --detector none")
        if name not in DETECTORS:
            raise UsageError(
                f"unknown detector {self.detector!r}; valid names: "
                f"{', '.join(sorted(DETECTORS))}")
        if self.runs < 1:
            raise UsageError(f"runs must be >= 1, got {self.runs}")
        # Keys only need to be meaningful to SOME detector so one --set can
        # serve a whole matrix; each factory picks the keys it understands.
        known = STREAM_PARAM_KEYS.union(*(e.param_keys for e in DETECTORS.values()))
        unknown = set(self.params) - known
        if unknown:
            raise UsageError(
                f"unknown parameter(s) {sorted(unknown)}; known keys: "
                f"{sorted(known)}")

    @property
    def is_csv(self) -> bool:
        return self.stream.lower() not in SYNTHETIC_FAMILIES


@dataclass(frozen=True)
class RunResult:
    """Flat record of one run, ready for the per-run CSV."""

    stream: str
    detector: str
    seed: int
    run: int
    alarms: tuple[int, ...]
    accuracy: float
    score: Optional[DriftScore]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    aggregate: AggregateRow
    runs: list[RunResult]


def _stream_family(config: ExperimentConfig) -> str:
    return config.stream.lower() if not config.is_csv else "csv"


def _build_stream_spec(config: ExperimentConfig, seed: int) -> StreamSpec:
    family = config.stream.lower()
    length = int(config.params.get("length", 100_000))
    schedule = None
    if "zeta" in config.params or "drift_every" in config.params:
        abrupt = family in ("sine1", "mixed")
        every = int(config.params.get("drift_every", 20_000 if abrupt else 25_000))
        zeta = int(config.params.get("zeta", 50 if abrupt else 500))
        schedule = ConceptSchedule(tuple(range(every, length, every)), zeta)
    return StreamSpec(family=family, length=length, noise=config.noise,
                      schedule=schedule, seed=seed)


def _make_detector(config: ExperimentConfig, window: int):
    entry = DETECTORS[config.detector]
    delta = config.params.get("delta", config.delta) if entry.uses_confidence \
        else config.delta
    return entry.factory(window, delta, config.params)


def run_experiment(config: ExperimentConfig,
                   stream_cache: Optional[dict] = None) -> ExperimentResult:
    """Execute one cell: R runs, scoring, aggregation, optional CSV output."""
    family = _stream_family(config)
    window = config.window_size or WINDOW_DEFAULTS[family]
    csv_stream: Optional[Stream] = None
    if config.is_csv:
        cache_key = config.stream
        if stream_cache is not None and cache_key in stream_cache:
            csv_stream = stream_cache[cache_key]
        else:
            csv_stream = load_csv_stream(config.stream)
            if stream_cache is not None:
                stream_cache[cache_key] = csv_stream
        accept_delay = None
    else:
        accept_delay = config.accept_delay or ACCEPT_DELAY_DEFAULTS[family]

    results: list[RunResult] = []
    for run_index in range(config.runs):
        seed = config.seed + run_index
        if csv_stream is not None:
            stream = csv_stream
        else:
            stream = generate_stream(_build_stream_spec(config, seed))
        detector = _make_detector(config, window)
        record = prequential_run(stream, NaiveBayes(stream.schema), detector,
                                 policy=config.policy)
        if csv_stream is None:
            score = score_run(record.alarms, stream.drift_positions,
                              accept_delay, len(stream), record.accuracy)
        else:
            score = None
        results.append(RunResult(config.stream, config.detector, seed,
                                 run_index, record.alarms, record.accuracy,
                                 score))

    alarm_counts = [len(r.alarms) for r in results]
    if csv_stream is None:
        agg = aggregate([r.score for r in results], stream=config.stream,
                        detector=config.detector, alarm_counts=alarm_counts)
    else:
        agg = unscored_row(config.stream, config.detector,
                           [r.accuracy for r in results], alarm_counts)
    result = ExperimentResult(config, agg, results)
    if config.out:
        write_run_csv(config.out, results)
        write_aggregate_csv(_aggregate_path(config.out), [agg])
    return result


@dataclass(frozen=True)
class CellResult:
    """One matrix cell: its result, or the error that stopped it."""

    stream: str
    detector: str
    result: Optional[ExperimentResult]
    error: Optional[Exception]


@dataclass
class MatrixReport:
    """Results of a stream x detector matrix; failed cells keep their error."""

    cells: list[CellResult]

    @property
    def aggregates(self) -> list[AggregateRow]:
        return [c.result.aggregate for c in self.cells if c.result is not None]

    @property
    def errors(self) -> list[CellResult]:
        return [c for c in self.cells if c.error is not None]


def run_matrix(streams: list[str], detectors: list[str],
               base: ExperimentConfig, out: Optional[str] = None) -> MatrixReport:
    """Run every (stream, detector) cell; cell failures are isolated."""
    cells = []
    stream_cache: dict = {}
    all_runs: list[RunResult] = []
    for stream in streams:
        for detector in detectors:
            try:
                config = replace(base, stream=stream, detector=detector, out=None)
                result = run_experiment(config, stream_cache)
                all_runs.extend(result.runs)
                cells.append(CellResult(stream, detector, result, None))
            except (UsageError, DataFormatError, OSError) as exc:
                cells.append(CellResult(stream, detector, None, exc))
    report = MatrixReport(cells)
    if out:
        write_run_csv(out, all_runs)
        write_aggregate_csv(_aggregate_path(out), report.aggregates)
    return report


def _aggregate_path(out) -> Path:
    path = Path(out)
    return path.with_name(path.stem + "_aggregate" + (path.suffix or ".csv"))


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_run_csv(path, runs: list[RunResult]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RUN_CSV_FIELDS)
        for r in runs:
            score = r.score
            writer.writerow([
                r.stream, r.detector, r.seed, r.run,
                _fmt(score.mean_delay if score else None),
                _fmt(score.tp if score else None),
                _fmt(score.fp if score else None),
                _fmt(score.fn if score else None),
                _fmt(r.accuracy), len(r.alarms),
            ])


def write_aggregate_csv(path, rows: list[AggregateRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(AGG_CSV_FIELDS)
        for row in rows:
            writer.writerow([
                row.stream, row.detector, row.runs,
                _fmt(row.delay_mean), _fmt(row.delay_std),
                _fmt(row.tp_mean), _fmt(row.tp_std),
                _fmt(row.fp_mean), _fmt(row.fp_std),
                _fmt(row.fn_mean), _fmt(row.fn_std),
                _fmt(row.accuracy_mean), _fmt(row.accuracy_std),
                _fmt(row.alarms_mean), _fmt(row.alarms_std),
            ])


def format_console_table(rows: list[AggregateRow]) -> str:
    """Fixed-width summary grouped by stream, accuracy shown in percent."""
    lines = []
    header = (f"{'stream':<12} {'detector':<14} {'delay':>18} {'tp':>12} "
              f"{'fp':>14} {'fn':>12} {'accuracy %':>16} {'alarms':>14}")
    current = None
    for row in rows:
        if row.stream != current:
            if current is not None:
                lines.append("")
            lines.append(header)
            lines.append("-" * len(header))
            current = row.stream
        def pair(mean, std, scale=1.0):
            if mean is None:
                return "-"
            return f"{mean * scale:.2f} ± {std * scale:.2f}"
        lines.append(
            f"{row.stream:<12} {row.detector:<14} "
            f"{pair(row.delay_mean, row.delay_std):>18} "
            f"{pair(row.tp_mean, row.tp_std):>12} "
            f"{pair(row.fp_mean, row.fp_std):>14} "
            f"{pair(row.fn_mean, row.fn_std):>12} "
            f"{pair(row.accuracy_mean, row.accuracy_std, 100.0):>16} "
            f"{pair(row.alarms_mean, row.alarms_std):>14}")
    return "\n".join(lines)
