"""Experiment orchestration and report emission.

Three run modes over a cleaned chargepoint dataset:

offline -- per charge point, learn one policy on the chronologically first
           80% of sessions and replay the last 20% under the raw, ideal and
           learned strategies; aggregate daily profiles and deficit stats.
online  -- replay one charge point session by session, charging raw during
           a warmup and re-learning the policy after every session.
predict -- per-charge-point cross-validated duration regression.

Charge points are the unit of parallel work.  Work is cut into fixed-size
batches processed in sorted order and folded back in batch order, so every
report is byte-identical for any worker count.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from . import aggregation
from .aggregation import DailyProfile, StrategyMetrics, strategy_metrics
from .charging import (
    ChargingPolicy,
    PowerProfile,
    SessionOutcome,
    adaptive_profile,
    oracle_profile,
    raw_profile,
    simulate_session,
)
from .dataset import (
    ChargePoint,
    CleaningReport,
    ParseError,
    Session,
    clean_sessions,
    parse_sessions_path,
)
from .optimizer import (
    LearnedPolicy,
    RewardParams,
    SearchConfig,
    learn_policy,
    per_cp_seed,
    rolling_window,
)
from .predictor import PredictionMetrics, cross_validate, pool_metrics

BATCH_SIZE = 32
STRATEGIES = ("raw", "oracle", "rl")


class HarnessError(Exception):
    """Fatal experiment error (bad input, nothing to simulate)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; defaults follow the published experiment
    setup where one exists (80/20 split, 200 search steps, 10 kWh loss cap,
    100-session online warmup, at least 10 sessions per charger)."""

    input_path: str
    mode: str = "offline"
    history: int | None = 30
    min_sessions: int = 10
    max_hours: float = 48.0
    seed: int = 0
    n_tries: int = 200
    k1: float = 0.1
    k2: float = 10.0
    e_max_loss: float = 10.0
    dx_min: float = 0.01
    dx_max: float = 0.5
    dy_min: float = 0.01
    dy_max: float = 0.25
    online_warmup: int = 100
    train_fraction: float = 0.8
    output_dir: str = "out"
    workers: int = 1
    cp_filter: tuple[str, ...] = ()
    emit_resolution: int = 1
    cold_start: bool = False
    p_max_percentile: float | None = None

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.mode not in ("offline", "online", "predict"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.emit_resolution < 1 or aggregation.SECONDS_PER_DAY % self.emit_resolution:
            raise ValueError("emit_resolution must divide 86400")

    def reward_params(self) -> RewardParams:
        return RewardParams(k1=self.k1, k2=self.k2, e_max_loss_kwh=self.e_max_loss)

    def search_config(self, seed_key: str) -> SearchConfig:
        return SearchConfig(
            n_tries=self.n_tries,
            dx_min=self.dx_min,
            dx_max=self.dx_max,
            dy_min=self.dy_min,
            dy_max=self.dy_max,
            seed=per_cp_seed(self.seed, seed_key),
        )


# ---------------------------------------------------------------------------
# shared plumbing


def _atomic_write(path: str, text: str) -> None:
    """Write-then-rename so a rerun never leaves a half-written report."""
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _csv_line(values: Iterable) -> str:
    # full-precision, shortest round-trip floats (plain float repr, never a
    # numpy scalar repr)
    return ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in values)


def _load_charge_points(
    cfg: ExperimentConfig,
) -> tuple[list[ChargePoint], CleaningReport, list[ParseError]]:
    sessions, parse_errors = parse_sessions_path(cfg.input_path)
    charge_points, report = clean_sessions(
        sessions,
        min_sessions=cfg.min_sessions,
        max_hours=cfg.max_hours,
        p_max_percentile=cfg.p_max_percentile,
    )
    return charge_points, report, parse_errors


def _map_batches(fn, items: Sequence, workers: int):
    """Apply fn to fixed-size batches of items, yielding results in batch
    order regardless of worker count (the determinism contract)."""
    batches = [items[i : i + BATCH_SIZE] for i in range(0, len(items), BATCH_SIZE)]
    if workers <= 1 or len(batches) <= 1:
        yield from map(fn, batches)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, batches)


def _raw_fallback_policy(sessions: Sequence[Session]) -> ChargingPolicy:
    return ChargingPolicy(max(s.plugin_hours for s in sessions), 1.0)


# ---------------------------------------------------------------------------
# offline mode


@dataclass
class OfflineCpResult:
    """Per-charge-point outcome of the offline experiment."""

    cp_id: str
    p_max_kw: float
    t_boost_max_hours: float
    p_rate: float
    feasible: bool
    n_train: int
    n_test: int
    target_test_kwh: float
    delivered_test_kwh: float
    boost_hours_sum: float
    slow_hours_sum: float
    n_outcomes: int
    rel_speed_sum: float
    rel_speed_count: int
    hist_counts: np.ndarray
    raw_effective_hours_sum: float
    n_sessions: int

    @property
    def deficit_kwh(self) -> float:
        return self.target_test_kwh - self.delivered_test_kwh


@dataclass
class OfflineResults:
    cfg: ExperimentConfig
    cleaning: CleaningReport
    parse_errors: list[ParseError]
    cp_rows: list[OfflineCpResult]
    profiles_test: dict[str, DailyProfile]
    profiles_all: dict[str, DailyProfile]

    def metrics(self, strategy: str, scope: str = "test") -> StrategyMetrics:
        profile = (self.profiles_test if scope == "test" else self.profiles_all)[
            strategy
        ]
        if strategy == "rl":
            energy = [(r.target_test_kwh, r.delivered_test_kwh) for r in self.cp_rows]
        else:
            energy = [(r.target_test_kwh, r.target_test_kwh) for r in self.cp_rows]
        return strategy_metrics(profile, energy)

    def peak_reduction(self, strategy: str, scope: str = "test") -> float:
        profiles = self.profiles_test if scope == "test" else self.profiles_all
        return aggregation.peak_reduction(profiles[strategy], profiles["raw"])

    def mean_boost_hours(self) -> float:
        n = sum(r.n_outcomes for r in self.cp_rows)
        return sum(r.boost_hours_sum for r in self.cp_rows) / n if n else 0.0

    def mean_slow_hours(self) -> float:
        n = sum(r.n_outcomes for r in self.cp_rows)
        return sum(r.slow_hours_sum for r in self.cp_rows) / n if n else 0.0

    def mean_raw_effective_hours(self) -> float:
        n = sum(r.n_sessions for r in self.cp_rows)
        return sum(r.raw_effective_hours_sum for r in self.cp_rows) / n if n else 0.0

    def mean_relative_speed(self) -> float:
        n = sum(r.rel_speed_count for r in self.cp_rows)
        return sum(r.rel_speed_sum for r in self.cp_rows) / n if n else 0.0

    def speed_histogram(self) -> np.ndarray:
        total = np.zeros(100, dtype=np.int64)
        for r in self.cp_rows:
            total += r.hist_counts
        s = total.sum()
        return total / s if s else total.astype(np.float64)


def _simulate_split(
    cp: ChargePoint, cfg: ExperimentConfig
) -> tuple[OfflineCpResult, dict[tuple[str, str], list]]:
    """Learn on the first ceil(train_fraction * n) sessions, replay the rest.

    Returns the per-CP result row plus profile pieces keyed by
    (scope, strategy); "all" scope re-applies the learned policy to every
    session so aggregate profiles exist for both interpretations.
    """
    n = len(cp.sessions)
    n_train = math.ceil(cfg.train_fraction * n)
    train, test = cp.sessions[:n_train], cp.sessions[n_train:]

    window = rolling_window([s for s in train if s.energy_kwh > 0], cfg.history)
    if window:
        learned = learn_policy(
            window,
            cp.p_max_kw,
            cfg.search_config(cp.cp_id),
            cfg.reward_params(),
        )
        policy, feasible = learned.policy, learned.feasible
    else:
        # Nothing to learn from: charge raw rather than guess.
        policy, feasible = _raw_fallback_policy(cp.sessions), True

    pieces: dict[tuple[str, str], list] = {
        (scope, strat): [] for scope in ("test", "all") for strat in STRATEGIES
    }
    target_test = delivered_test = 0.0
    boost_sum = slow_sum = 0.0
    n_outcomes = 0
    rel_sum = 0.0
    rel_count = 0
    rel_speeds: list[float] = []

    for s in test:
        outcome = simulate_session(s, policy, cp.p_max_kw)
        target_test += s.energy_kwh
        delivered_test += outcome.e_total_kwh
        pieces[("test", "raw")].extend(raw_profile(s, cp.p_max_kw).pieces)
        pieces[("test", "oracle")].extend(oracle_profile(s).pieces)
        pieces[("test", "rl")].extend(
            adaptive_profile(s, outcome, cp.p_max_kw, policy).pieces
        )
        if s.energy_kwh > 0:
            boost_sum += outcome.t_boost_hours
            slow_sum += outcome.t_slow_hours
            n_outcomes += 1
            rel = outcome.p_eff_kw / cp.p_max_kw
            rel_sum += rel
            rel_count += 1
            rel_speeds.append(rel)

    raw_eff_sum = 0.0
    for s in cp.sessions:
        raw_eff_sum += s.energy_kwh / cp.p_max_kw
        outcome = simulate_session(s, policy, cp.p_max_kw)
        pieces[("all", "raw")].extend(raw_profile(s, cp.p_max_kw).pieces)
        pieces[("all", "oracle")].extend(oracle_profile(s).pieces)
        pieces[("all", "rl")].extend(
            adaptive_profile(s, outcome, cp.p_max_kw, policy).pieces
        )

    row = OfflineCpResult(
        cp_id=cp.cp_id,
        p_max_kw=cp.p_max_kw,
        t_boost_max_hours=policy.t_boost_max_hours,
        p_rate=policy.p_rate,
        feasible=feasible,
        n_train=n_train,
        n_test=len(test),
        target_test_kwh=target_test,
        delivered_test_kwh=delivered_test,
        boost_hours_sum=boost_sum,
        slow_hours_sum=slow_sum,
        n_outcomes=n_outcomes,
        rel_speed_sum=rel_sum,
        rel_speed_count=rel_count,
        hist_counts=aggregation.speed_histogram_counts(rel_speeds),
        raw_effective_hours_sum=raw_eff_sum,
        n_sessions=n,
    )
    return row, pieces


def _offline_batch(batch: Sequence[ChargePoint], cfg: ExperimentConfig):
    rows = []
    profiles = {
        key: DailyProfile.zeros()
        for key in ((scope, strat) for scope in ("test", "all") for strat in STRATEGIES)
    }
    for cp in batch:
        row, pieces = _simulate_split(cp, cfg)
        rows.append(row)
        for key, piece_list in pieces.items():
            aggregation.accumulate(PowerProfile(tuple(piece_list)), into=profiles[key])
    return rows, {key: p.slots for key, p in profiles.items()}


def run_offline(cfg: ExperimentConfig) -> OfflineResults:
    charge_points, cleaning, parse_errors = _load_charge_points(cfg)
    eligible = [cp for cp in charge_points if cp.usable]
    if cfg.cp_filter:
        wanted = set(cfg.cp_filter)
        missing = wanted - {cp.cp_id for cp in eligible}
        if missing:
            raise HarnessError(f"charge point(s) not in cleaned dataset: {sorted(missing)}")
        eligible = [cp for cp in eligible if cp.cp_id in wanted]
    if not eligible:
        raise HarnessError("no usable charge points after cleaning")
    eligible.sort(key=lambda cp: cp.cp_id)

    rows: list[OfflineCpResult] = []
    totals = {
        key: DailyProfile.zeros()
        for key in ((scope, strat) for scope in ("test", "all") for strat in STRATEGIES)
    }
    worker = partial(_offline_batch, cfg=cfg)
    for batch_rows, batch_slots in _map_batches(worker, eligible, cfg.workers):
        rows.extend(batch_rows)
        for key, slots in batch_slots.items():
            totals[key].slots += slots

    return OfflineResults(
        cfg=cfg,
        cleaning=cleaning,
        parse_errors=parse_errors,
        cp_rows=rows,
        profiles_test={s: totals[("test", s)] for s in STRATEGIES},
        profiles_all={s: totals[("all", s)] for s in STRATEGIES},
    )


# ---------------------------------------------------------------------------
# online mode


@dataclass
class OnlineSessionRow:
    """One replayed session in the online log."""

    cp_id: str
    index: int
    event_id: int
    start: int
    plugin_hours: float
    energy_kwh: float
    mode: str
    outcome: SessionOutcome
    policy_t_boost_max: float
    policy_p_rate: float


@dataclass
class OnlineCpResult:
    cp_id: str
    p_max_kw: float
    warmup: int
    rows: list[OnlineSessionRow]

    def target_kwh(self) -> float:
        return sum(r.energy_kwh for r in self.rows)

    def delivered_kwh(self) -> float:
        return sum(r.outcome.e_total_kwh for r in self.rows)

    def deficit_kwh(self) -> float:
        return self.target_kwh() - self.delivered_kwh()

    def deficit_percent(self) -> float:
        target = self.target_kwh()
        return 100.0 * self.deficit_kwh() / target if target > 0 else 0.0

    def _adaptive(self) -> list[OnlineSessionRow]:
        return [r for r in self.rows if r.mode == "adaptive" and r.energy_kwh > 0]

    def mean_p_eff_adaptive(self) -> float:
        rows = self._adaptive()
        return float(np.mean([r.outcome.p_eff_kw for r in rows])) if rows else 0.0

    def mean_relative_speed(self) -> float:
        rows = self._adaptive()
        if not rows:
            return 0.0
        return float(np.mean([r.outcome.p_eff_kw / self.p_max_kw for r in rows]))

    def median_relative_speed(self) -> float:
        rows = self._adaptive()
        if not rows:
            return 0.0
        return float(np.median([r.outcome.p_eff_kw / self.p_max_kw for r in rows]))

    def mean_boost_hours(self) -> float:
        rows = self._adaptive()
        return float(np.mean([r.outcome.t_boost_hours for r in rows])) if rows else 0.0

    def mean_slow_hours(self) -> float:
        rows = self._adaptive()
        return float(np.mean([r.outcome.t_slow_hours for r in rows])) if rows else 0.0


@dataclass
class OnlineResults:
    cfg: ExperimentConfig
    cleaning: CleaningReport
    parse_errors: list[ParseError]
    cp_results: list[OnlineCpResult]
    profiles: dict[str, DailyProfile]


def _replay_online(cp: ChargePoint, cfg: ExperimentConfig) -> OnlineCpResult:
    """Session-by-session replay: raw during warmup, then each session is
    charged with the policy learned from all preceding ones, which is
    re-learned (warm-started) after every session."""
    rows: list[OnlineSessionRow] = []
    history: list[Session] = []
    learned: LearnedPolicy | None = None

    for i, s in enumerate(cp.sessions):
        if i < cfg.online_warmup or learned is None:
            policy = ChargingPolicy(s.plugin_hours, 1.0)
            mode = "raw"
        else:
            policy = learned.policy
            mode = "adaptive"
        outcome = simulate_session(s, policy, cp.p_max_kw)
        rows.append(
            OnlineSessionRow(
                cp_id=cp.cp_id,
                index=i,
                event_id=s.event_id,
                start=s.start,
                plugin_hours=s.plugin_hours,
                energy_kwh=s.energy_kwh,
                mode=mode,
                outcome=outcome,
                policy_t_boost_max=policy.t_boost_max_hours,
                policy_p_rate=policy.p_rate,
            )
        )
        if s.energy_kwh > 0:
            history.append(s)
        if i + 1 >= cfg.online_warmup and history:
            window = rolling_window(history, cfg.history)
            init = None if (cfg.cold_start or learned is None) else learned.policy
            learned = learn_policy(
                window,
                cp.p_max_kw,
                cfg.search_config(f"{cp.cp_id}#{i}"),
                cfg.reward_params(),
                init=init,
            )
    return OnlineCpResult(
        cp_id=cp.cp_id, p_max_kw=cp.p_max_kw, warmup=cfg.online_warmup, rows=rows
    )


def _online_batch(batch: Sequence[ChargePoint], cfg: ExperimentConfig):
    results = []
    profiles = {s: DailyProfile.zeros() for s in STRATEGIES}
    for cp in batch:
        result = _replay_online(cp, cfg)
        results.append(result)
        raw_pieces: list = []
        oracle_pieces: list = []
        rl_pieces: list = []
        for row, s in zip(result.rows, cp.sessions):
            raw_pieces.extend(raw_profile(s, cp.p_max_kw).pieces)
            oracle_pieces.extend(oracle_profile(s).pieces)
            policy = ChargingPolicy(row.policy_t_boost_max, row.policy_p_rate)
            rl_pieces.extend(
                adaptive_profile(s, row.outcome, cp.p_max_kw, policy).pieces
            )
        aggregation.accumulate(PowerProfile(tuple(raw_pieces)), into=profiles["raw"])
        aggregation.accumulate(
            PowerProfile(tuple(oracle_pieces)), into=profiles["oracle"]
        )
        aggregation.accumulate(PowerProfile(tuple(rl_pieces)), into=profiles["rl"])
    return results, {s: p.slots for s, p in profiles.items()}


def run_online(cfg: ExperimentConfig) -> OnlineResults:
    charge_points, cleaning, parse_errors = _load_charge_points(cfg)
    by_id = {cp.cp_id: cp for cp in charge_points if cp.usable}
    if cfg.cp_filter:
        missing = [cp_id for cp_id in cfg.cp_filter if cp_id not in by_id]
        if missing:
            raise HarnessError(f"charge point(s) not in cleaned dataset: {missing}")
        selected = [by_id[cp_id] for cp_id in sorted(set(cfg.cp_filter))]
    else:
        selected = [by_id[cp_id] for cp_id in sorted(by_id)]
    if not selected:
        raise HarnessError("no usable charge points after cleaning")

    results: list[OnlineCpResult] = []
    totals = {s: DailyProfile.zeros() for s in STRATEGIES}
    worker = partial(_online_batch, cfg=cfg)
    for batch_results, batch_slots in _map_batches(worker, selected, cfg.workers):
        results.extend(batch_results)
        for s, slots in batch_slots.items():
            totals[s].slots += slots

    return OnlineResults(
        cfg=cfg,
        cleaning=cleaning,
        parse_errors=parse_errors,
        cp_results=results,
        profiles=totals,
    )


# ---------------------------------------------------------------------------
# predict mode


@dataclass
class PredictCpRow:
    cp_id: str
    n_rows: int
    with_energy: PredictionMetrics | None
    without_energy: PredictionMetrics | None


@dataclass
class PredictResults:
    cfg: ExperimentConfig
    cleaning: CleaningReport
    parse_errors: list[ParseError]
    cp_rows: list[PredictCpRow]
    skipped: int

    def pooled(self, include_energy: bool) -> PredictionMetrics:
        key = "with_energy" if include_energy else "without_energy"
        metrics = [getattr(r, key) for r in self.cp_rows if getattr(r, key)]
        return pool_metrics(metrics)


def _predict_batch(batch: Sequence[ChargePoint], cfg: ExperimentConfig):
    rows = []
    for cp in batch:
        n_rows = max(len(cp.sessions) - 1, 0)
        rows.append(
            PredictCpRow(
                cp_id=cp.cp_id,
                n_rows=n_rows,
                with_energy=cross_validate(cp.sessions, include_energy=True),
                without_energy=cross_validate(cp.sessions, include_energy=False),
            )
        )
    return rows


def run_predict(cfg: ExperimentConfig) -> PredictResults:
    charge_points, cleaning, parse_errors = _load_charge_points(cfg)
    if cfg.cp_filter:
        wanted = set(cfg.cp_filter)
        missing = wanted - {cp.cp_id for cp in charge_points}
        if missing:
            raise HarnessError(f"charge point(s) not in cleaned dataset: {sorted(missing)}")
        charge_points = [cp for cp in charge_points if cp.cp_id in wanted]
    if not charge_points:
        raise HarnessError("no charge points after cleaning")
    charge_points.sort(key=lambda cp: cp.cp_id)

    rows: list[PredictCpRow] = []
    worker = partial(_predict_batch, cfg=cfg)
    for batch_rows in _map_batches(worker, charge_points, cfg.workers):
        rows.extend(batch_rows)
    skipped = sum(1 for r in rows if r.with_energy is None)
    return PredictResults(
        cfg=cfg,
        cleaning=cleaning,
        parse_errors=parse_errors,
        cp_rows=rows,
        skipped=skipped,
    )


# ---------------------------------------------------------------------------
# report emission


def _profile_csv(profiles: dict[str, DailyProfile], resolution: int) -> str:
    """second_of_day,raw_kw,oracle_kw,rl_kw rows; coarser resolutions emit
    the average power over each bucket."""
    lines = ["second_of_day,raw_kw,oracle_kw,rl_kw"]
    arrays = [profiles[s].power_kw() for s in STRATEGIES]
    if resolution > 1:
        arrays = [
            a.reshape(aggregation.SECONDS_PER_DAY // resolution, resolution).mean(axis=1)
            for a in arrays
        ]
    for i in range(len(arrays[0])):
        lines.append(
            _csv_line(
                [
                    i * resolution,
                    float(arrays[0][i]),
                    float(arrays[1][i]),
                    float(arrays[2][i]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _parse_errors_csv(parse_errors: Sequence[ParseError]) -> str:
    lines = ["line_number,reason"]
    for e in parse_errors:
        reason = e.reason.replace(",", ";")
        lines.append(f"{e.line_number},{reason}")
    return "\n".join(lines) + "\n"


def _config_lines(cfg: ExperimentConfig) -> str:
    history = "unlimited" if cfg.history is None else str(cfg.history)
    return (
        f"mode={cfg.mode} history={history} seed={cfg.seed} n_tries={cfg.n_tries} "
        f"k1={cfg.k1!r} k2={cfg.k2!r} e_max_loss={cfg.e_max_loss!r} "
        f"min_sessions={cfg.min_sessions} train_fraction={cfg.train_fraction!r} "
        f"warmup={cfg.online_warmup}"
    )


def emit_offline_reports(results: OfflineResults, output_dir: str) -> dict[str, str]:
    os.makedirs(output_dir, exist_ok=True)
    cfg = results.cfg
    paths = {}

    def emit(name: str, text: str) -> None:
        path = os.path.join(output_dir, name)
        _atomic_write(path, text)
        paths[name] = path

    emit("cleaning_report.txt", results.cleaning.to_text())
    if results.parse_errors:
        emit("parse_errors.csv", _parse_errors_csv(results.parse_errors))
    emit("profiles.csv", _profile_csv(results.profiles_test, cfg.emit_resolution))
    emit(
        "profiles_all_sessions.csv",
        _profile_csv(results.profiles_all, cfg.emit_resolution),
    )

    lines = ["cp_id,t_boost_max_hours,p_rate,deficit_kwh,n_train,n_test"]
    for r in results.cp_rows:
        lines.append(
            _csv_line(
                [
                    r.cp_id,
                    r.t_boost_max_hours,
                    r.p_rate,
                    r.deficit_kwh,
                    r.n_train,
                    r.n_test,
                ]
            )
        )
    emit("policies.csv", "\n".join(lines) + "\n")

    hist = results.speed_histogram()
    lines = ["rel_speed_bin_start,fraction"]
    for i, frac in enumerate(hist):
        lines.append(_csv_line([i / len(hist), float(frac)]))
    emit("speed_histogram.csv", "\n".join(lines) + "\n")

    rl = results.metrics("rl")
    raw = results.metrics("raw")
    oracle = results.metrics("oracle")
    text = [
        "offline experiment report",
        "=========================",
        _config_lines(cfg),
        "",
        f"charge points simulated : {len(results.cp_rows)}",
        f"test sessions           : {sum(r.n_test for r in results.cp_rows)}",
        "",
        "aggregate daily profiles (test split)",
        "strategy  peak_kw  peak_second  total_kwh  deficit_kwh  deficit_pct  cp_over_10pct",
    ]
    for name, m in (("raw", raw), ("oracle", oracle), ("rl", rl)):
        text.append(
            f"{name}  {m.peak_kw!r}  {m.peak_second_of_day}  {m.total_energy_kwh!r}  "
            f"{m.total_deficit_kwh!r}  {m.deficit_percent!r}  "
            f"{m.cp_deficit_over_10pct_fraction!r}"
        )
    text += [
        "",
        f"peak reduction vs raw: rl {results.peak_reduction('rl')!r}% | "
        f"oracle {results.peak_reduction('oracle')!r}%",
        "",
        "charge phase durations (mean hours)",
        f"boost {results.mean_boost_hours()!r} | slow {results.mean_slow_hours()!r} | "
        f"raw effective {results.mean_raw_effective_hours()!r}",
        "",
        f"mean relative charging speed (rl test sessions): "
        f"{results.mean_relative_speed()!r}",
        "",
    ]
    emit("metrics.txt", "\n".join(text))
    return paths


def emit_online_reports(results: OnlineResults, output_dir: str) -> dict[str, str]:
    os.makedirs(output_dir, exist_ok=True)
    cfg = results.cfg
    paths = {}

    def emit(name: str, text: str) -> None:
        path = os.path.join(output_dir, name)
        _atomic_write(path, text)
        paths[name] = path

    emit("cleaning_report.txt", results.cleaning.to_text())
    if results.parse_errors:
        emit("parse_errors.csv", _parse_errors_csv(results.parse_errors))
    emit("profiles.csv", _profile_csv(results.profiles, cfg.emit_resolution))

    lines = [
        "cp_id,session_index,event_id,start,plugin_hours,energy_kwh,mode,"
        "t_boost_hours,t_slow_hours,e_boost_kwh,e_slow_kwh,e_total_kwh,"
        "e_loss_kwh,p_eff_kw,policy_t_boost_max_hours,policy_p_rate"
    ]
    for cp in results.cp_results:
        for r in cp.rows:
            o = r.outcome
            lines.append(
                _csv_line(
                    [
                        r.cp_id,
                        r.index,
                        r.event_id,
                        r.start,
                        r.plugin_hours,
                        r.energy_kwh,
                        r.mode,
                        o.t_boost_hours,
                        o.t_slow_hours,
                        o.e_boost_kwh,
                        o.e_slow_kwh,
                        o.e_total_kwh,
                        o.e_loss_kwh,
                        o.p_eff_kw,
                        r.policy_t_boost_max,
                        r.policy_p_rate,
                    ]
                )
            )
    emit("outcomes.csv", "\n".join(lines) + "\n")

    text = [
        "online learning report",
        "======================",
        _config_lines(cfg),
        "",
    ]
    for cp in results.cp_results:
        adaptive = [r for r in cp.rows if r.mode == "adaptive"]
        text += [
            f"charge point {cp.cp_id}",
            f"  max power rate        : {cp.p_max_kw!r} kW",
            f"  sessions (warmup raw) : {len(cp.rows)} ({sum(1 for r in cp.rows if r.mode == 'raw')})",
            f"  adaptive sessions     : {len(adaptive)}",
            f"  target energy         : {cp.target_kwh()!r} kWh",
            f"  delivered energy      : {cp.delivered_kwh()!r} kWh",
            f"  energy deficit        : {cp.deficit_kwh()!r} kWh ({cp.deficit_percent()!r}%)",
            f"  mean effective speed  : {cp.mean_p_eff_adaptive()!r} kW (adaptive sessions)",
            f"  mean / median relative speed : {cp.mean_relative_speed()!r} / "
            f"{cp.median_relative_speed()!r}",
            f"  mean boost / slow hours      : {cp.mean_boost_hours()!r} / "
            f"{cp.mean_slow_hours()!r}",
            "",
        ]
    raw_peak = results.profiles["raw"].peak_kw()
    if raw_peak > 0:
        text.append(
            f"peak reduction vs raw: rl "
            f"{aggregation.peak_reduction(results.profiles['rl'], results.profiles['raw'])!r}% | "
            f"oracle "
            f"{aggregation.peak_reduction(results.profiles['oracle'], results.profiles['raw'])!r}%"
        )
    text.append("")
    emit("metrics.txt", "\n".join(text))
    return paths


def emit_predict_reports(results: PredictResults, output_dir: str) -> dict[str, str]:
    os.makedirs(output_dir, exist_ok=True)
    paths = {}

    def emit(name: str, text: str) -> None:
        path = os.path.join(output_dir, name)
        _atomic_write(path, text)
        paths[name] = path

    emit("cleaning_report.txt", results.cleaning.to_text())
    if results.parse_errors:
        emit("parse_errors.csv", _parse_errors_csv(results.parse_errors))

    lines = [
        "cp_id,n_rows,mae_with_energy,mape_with_energy,mse_with_energy,"
        "mae_without_energy,mape_without_energy,mse_without_energy"
    ]
    for r in results.cp_rows:
        if r.with_energy is None:
            lines.append(_csv_line([r.cp_id, r.n_rows, "", "", "", "", "", ""]))
        else:
            w, wo = r.with_energy, r.without_energy
            lines.append(
                _csv_line(
                    [r.cp_id, r.n_rows, w.mae, w.mape, w.mse, wo.mae, wo.mape, wo.mse]
                )
            )
    emit("prediction_per_cp.csv", "\n".join(lines) + "\n")

    usable = [r for r in results.cp_rows if r.with_energy is not None]
    text = [
        "session duration prediction report",
        "==================================",
        _config_lines(results.cfg),
        "",
        f"charge points evaluated : {len(usable)}",
        f"charge points skipped (too few rows) : {results.skipped}",
        "",
        "pooled metrics (unweighted mean over charge points)",
        "features              MAE_hours        MAPE_pct         MSE",
    ]
    if usable:
        for label, include in (("with energy", True), ("without energy", False)):
            m = results.pooled(include)
            text.append(f"{label:<21} {m.mae!r}  {m.mape!r}  {m.mse!r}")
            if m.mape_excluded:
                text.append(
                    f"  (rows excluded from MAPE for near-zero duration: {m.mape_excluded})"
                )
    text.append("")
    emit("prediction_report.txt", "\n".join(text))
    return paths


def run(cfg: ExperimentConfig) -> dict[str, str]:
    """Run the configured experiment and emit its report bundle."""
    if cfg.mode == "offline":
        return emit_offline_reports(run_offline(cfg), cfg.output_dir)
    if cfg.mode == "online":
        return emit_online_reports(run_online(cfg), cfg.output_dir)
    if cfg.mode == "predict":
        return emit_predict_reports(run_predict(cfg), cfg.output_dir)
    raise HarnessError(f"unknown mode {cfg.mode!r}")
