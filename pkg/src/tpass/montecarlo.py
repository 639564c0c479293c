"""Monte Carlo experiment drivers: scenario draws, sweeps, and aggregation.

Each experiment sweeps one parameter, runs independent random user drops at
every sweep point, and aggregates per-point statistics. Trial seeds are
derived counter-style from (rng_seed, trial_id, sweep_index), so any single
trial can be reproduced in isolation and parallel execution cannot change
the results.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import multiuser, twouser
from .errors import ConfigError, InfeasibleError
from .multiuser import ProtocolKind
from .params import SystemParams, dbm_to_watts

SWEEPABLE = ("D_x", "P_max", "delta", "K")

ALL_PROTOCOLS = (
    ProtocolKind.FRFP,
    ProtocolKind.FRAP,
    ProtocolKind.ARFP,
    ProtocolKind.ARAP,
)

# two-user scheme labels: the joint design with optimized or pinned radiation
# split, and the wireless-only baselines it is measured against
SCHEME_TPASS_OPT = "tpass-opt"
SCHEME_TPASS_07 = "tpass-0.7"
SCHEME_PASS_07 = "pass-0.7"
SCHEME_PASS_10 = "pass-1.0"
TWO_USER_SCHEMES = (SCHEME_TPASS_OPT, SCHEME_TPASS_07, SCHEME_PASS_07, SCHEME_PASS_10)


@dataclass(frozen=True)
class Scenario:
    trial_id: int
    sweep_index: int
    ue_positions: np.ndarray  # (K, 3), z = 0
    seed_key: tuple


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    protocols: tuple = ALL_PROTOCOLS
    trials: int = 100

    def validate(self) -> None:
        if self.param not in SWEEPABLE:
            raise ConfigError(
                f"unknown sweep parameter {self.param!r}; choose from {SWEEPABLE}"
            )
        if len(self.values) == 0:
            raise ConfigError("sweep needs at least one value")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")


@dataclass(frozen=True)
class TrialRecord:
    sweep_value: float
    sweep_index: int
    trial_id: int
    label: str                # protocol or scheme name
    feasible: bool
    wsr: float                # nan when infeasible
    rate_wired: float
    rate_wireless: float
    iterations: int
    reason: str               # binding constraint when infeasible, else ""
    trace: tuple[float, ...] = ()   # per-sweep objective values, feasible runs only


@dataclass(frozen=True)
class AggregateStats:
    sweep_value: float
    label: str
    trials: int
    n_feasible: int
    feasible_fraction: float
    wsr_mean: float            # over feasible trials; nan when none
    wsr_std: float
    wsr_mean_zerofill: float   # infeasible trials counted as zero rate
    rate_wired_mean: float
    rate_wireless_mean: float
    rate_wireless_mean_zerofill: float
    iterations_mean: float


def apply_sweep(params: SystemParams, param: str, value) -> SystemParams:
    """Return params with one swept field replaced ('delta' is not a field)."""
    if param == "K":
        return replace(params, K=int(value))
    if param in ("D_x", "P_max"):
        return replace(params, **{param: float(value)})
    if param == "delta":
        return params  # consumed by the scheme, not the parameter set
    raise ConfigError(f"unknown sweep parameter {param!r}")


def seed_scenario(
    trial_id: int,
    sweep_index: int,
    params: SystemParams,
    k: int | None = None,
) -> Scenario:
    """Uniform user drop over the service region with a counter-based seed."""
    k = params.K if k is None else k
    key = (params.rng_seed, trial_id, sweep_index)
    rng = np.random.default_rng(np.random.SeedSequence(key))
    # one (x, y) draw per user, so a larger K extends a smaller K's drop
    # instead of reshuffling it; cross-K comparisons then share users
    u = rng.uniform(size=(k, 2))
    x = params.psi0_x + params.D_x * u[:, 0]
    y = params.D_y * (u[:, 1] - 0.5)
    pts = np.column_stack([x, y, np.zeros(k)])
    return Scenario(
        trial_id=trial_id, sweep_index=sweep_index, ue_positions=pts, seed_key=key
    )


def _mean(values: list[float]) -> float:
    return float(np.mean(values)) if values else math.nan


def aggregate(records: list[TrialRecord], trials: int) -> list[AggregateStats]:
    """One row per (sweep value, label), in first-seen order.

    Rate means cover feasible trials only; the zerofill variants count
    infeasible trials as zero so both averaging conventions are available.
    A point with no feasible trial reports nan means (absent, not zero).
    """
    order: list[tuple] = []
    groups: dict[tuple, list[TrialRecord]] = {}
    for rec in records:
        key = (rec.sweep_value, rec.label)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    out = []
    for key in order:
        recs = groups[key]
        good = [r for r in recs if r.feasible]
        wsr = [r.wsr for r in good]
        out.append(
            AggregateStats(
                sweep_value=key[0],
                label=key[1],
                trials=trials,
                n_feasible=len(good),
                feasible_fraction=len(good) / trials,
                wsr_mean=_mean(wsr),
                wsr_std=float(np.std(wsr)) if wsr else math.nan,
                wsr_mean_zerofill=float(np.sum(wsr)) / trials if wsr else 0.0,
                rate_wired_mean=_mean([r.rate_wired for r in good]),
                rate_wireless_mean=_mean([r.rate_wireless for r in good]),
                rate_wireless_mean_zerofill=(
                    float(np.sum([r.rate_wireless for r in good])) / trials
                    if good
                    else 0.0
                ),
                iterations_mean=_mean([float(r.iterations) for r in good]),
            )
        )
    return out


def _protocol_trial(args) -> list[TrialRecord]:
    """One scenario, every requested protocol. Top-level for process pools."""
    params, protocols, sweep_value, sweep_index, trial_id, q_grid = args
    scenario = seed_scenario(trial_id, sweep_index, params)
    records = []
    for kind in protocols:
        kind = ProtocolKind(kind)
        try:
            sol = multiuser.bcd_optimize(
                kind, scenario.ue_positions, params, q_grid=q_grid
            )
            wired_long = float(np.sum(sol.tau * [s.rate_wired for s in sol.slots]))
            wireless_long = float(
                np.sum(sol.tau * [s.rate_wireless for s in sol.slots])
            )
            records.append(
                TrialRecord(
                    sweep_value=sweep_value,
                    sweep_index=sweep_index,
                    trial_id=trial_id,
                    label=kind.value,
                    feasible=True,
                    wsr=sol.wsr,
                    rate_wired=wired_long,
                    rate_wireless=wireless_long,
                    iterations=sol.iterations,
                    reason="",
                    trace=tuple(float(v) for v in sol.wsr_trace),
                )
            )
        except InfeasibleError as err:
            records.append(
                TrialRecord(
                    sweep_value=sweep_value,
                    sweep_index=sweep_index,
                    trial_id=trial_id,
                    label=kind.value,
                    feasible=False,
                    wsr=math.nan,
                    rate_wired=math.nan,
                    rate_wireless=math.nan,
                    iterations=0,
                    reason=err.constraint,
                )
            )
    return records


def run_protocol_sweep(
    spec: SweepSpec,
    params: SystemParams,
    q_grid: int | None = None,
    n_workers: int = 1,
) -> tuple[list[TrialRecord], list[AggregateStats]]:
    """Multiuser sweep: every (value, trial, protocol) combination.

    All protocols see identical user drops at each (value, trial), so
    protocol comparisons are paired. Records come back in deterministic
    (sweep, trial, protocol) order regardless of worker count.
    """
    spec.validate()
    tasks = []
    for si, value in enumerate(spec.values):
        p = apply_sweep(params, spec.param, value)
        for t in range(spec.trials):
            tasks.append((p, tuple(spec.protocols), float(value), si, t, q_grid))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunks = list(pool.map(_protocol_trial, tasks, chunksize=4))
    else:
        chunks = [_protocol_trial(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    return records, aggregate(records, spec.trials)


def _two_user_trial(args) -> list[TrialRecord]:
    """One single-user drop evaluated under every requested scheme."""
    params, schemes, sweep_value, sweep_index, trial_id = args
    scenario = seed_scenario(trial_id, sweep_index, params, k=1)
    ue = scenario.ue_positions[0]
    records = []
    for scheme in schemes:
        try:
            if scheme == SCHEME_TPASS_OPT:
                sol = twouser.solve_two_user(ue, params)
                triple = (sol.sum_rate, sol.rate_wired, sol.rate_wireless)
            elif scheme == SCHEME_TPASS_07:
                sol = twouser.solve_two_user(ue, params, delta=0.7)
                triple = (sol.sum_rate, sol.rate_wired, sol.rate_wireless)
            elif scheme == SCHEME_PASS_07:
                r = twouser.wireless_only_rate(ue, 0.7, params)
                triple = (r, 0.0, r)
            elif scheme == SCHEME_PASS_10:
                r = twouser.wireless_only_rate(ue, 1.0, params)
                triple = (r, 0.0, r)
            else:
                raise ConfigError(f"unknown scheme {scheme!r}")
            records.append(
                TrialRecord(
                    sweep_value=sweep_value,
                    sweep_index=sweep_index,
                    trial_id=trial_id,
                    label=scheme,
                    feasible=True,
                    wsr=triple[0],
                    rate_wired=triple[1],
                    rate_wireless=triple[2],
                    iterations=1,
                    reason="",
                )
            )
        except InfeasibleError as err:
            records.append(
                TrialRecord(
                    sweep_value=sweep_value,
                    sweep_index=sweep_index,
                    trial_id=trial_id,
                    label=scheme,
                    feasible=False,
                    wsr=math.nan,
                    rate_wired=math.nan,
                    rate_wireless=math.nan,
                    iterations=0,
                    reason=err.constraint,
                )
            )
    return records


def run_two_user_sweep(
    spec: SweepSpec,
    params: SystemParams,
    schemes: tuple = TWO_USER_SCHEMES,
    n_workers: int = 1,
) -> tuple[list[TrialRecord], list[AggregateStats]]:
    """Two-user sweep comparing the joint design against wireless-only baselines."""
    spec.validate()
    tasks = []
    for si, value in enumerate(spec.values):
        p = apply_sweep(params, spec.param, value)
        for t in range(spec.trials):
            tasks.append((p, tuple(schemes), float(value), si, t))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunks = list(pool.map(_two_user_trial, tasks, chunksize=8))
    else:
        chunks = [_two_user_trial(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    return records, aggregate(records, spec.trials)


# ---------------------------------------------------------------------------
# experiment presets (fieldnames + rows, ready for the CSV writer)
# ---------------------------------------------------------------------------

FIG4_DX_VALUES = (20.0, 60.0, 100.0)
FIG67_DX_VALUES = (20.0, 40.0, 60.0, 80.0, 100.0)
FIG8_P_DBM = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
FIG9_P_DBM = (10.0, 15.0, 20.0, 25.0, 30.0)
K_VALUES = (4, 6)


def fig4_deltas() -> np.ndarray:
    """Radiation split grid that resolves both the flat region and the knee."""
    body = np.linspace(1e-6, 0.98, 35)
    knee = 1.0 - np.geomspace(2e-2, 1e-9, 15)
    return np.unique(np.concatenate([body, knee]))


def experiment_fig4(params: SystemParams, **_) -> tuple[list[str], list[dict]]:
    """Gain-ratio curves versus the radiation split, one pair per span length."""
    rows = []
    for dx in FIG4_DX_VALUES:
        p = replace(params, D_x=dx)
        for delta in fig4_deltas():
            report = twouser.gain_ratios(float(delta), p)
            rows.append(
                {
                    "delta": float(delta),
                    "D_x": dx,
                    "ratio_best": report.ratio_best_case,
                    "ratio_avg": report.ratio_average,
                }
            )
    return ["delta", "D_x", "ratio_best", "ratio_avg"], rows


def _trace_trial(args):
    params, protocols, trial_id, q_grid = args
    scenario = seed_scenario(trial_id, 0, params)
    traces = {}
    for kind in protocols:
        kind = ProtocolKind(kind)
        try:
            sol = multiuser.bcd_optimize(
                kind, scenario.ue_positions, params, q_grid=q_grid
            )
            traces[kind.value] = np.array(sol.wsr_trace)
        except InfeasibleError:
            traces[kind.value] = None
    return traces


def experiment_fig5(
    params: SystemParams,
    trials: int = 100,
    protocols: tuple = ALL_PROTOCOLS,
    q_grid: int | None = None,
    n_workers: int = 1,
    **_,
) -> tuple[list[str], list[dict]]:
    """Trial-averaged objective trace per sweep iteration for each protocol.

    Traces shorter than the longest one are held at their final value, which
    mirrors how a converged run would keep reporting its fixed point.
    """
    tasks = [(params, tuple(protocols), t, q_grid) for t in range(trials)]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_trace_trial, tasks, chunksize=2))
    else:
        results = [_trace_trial(t) for t in tasks]
    rows = []
    for kind in protocols:
        label = ProtocolKind(kind).value
        traces = [r[label] for r in results if r[label] is not None]
        if not traces:
            continue
        length = max(t.size for t in traces)
        padded = np.full((len(traces), length), np.nan)
        for i, t in enumerate(traces):
            padded[i, : t.size] = t
            padded[i, t.size :] = t[-1]
        padded[~np.isfinite(padded)] = np.nan  # drop pre-repair -inf entries
        counts = np.sum(np.isfinite(padded), axis=0)
        sums = np.nansum(padded, axis=0)
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
        for it in range(length):
            rows.append(
                {"iteration": it, "protocol": label, "wsr": float(means[it])}
            )
    return ["iteration", "protocol", "wsr"], rows


_TWO_USER_FIELDS = [
    "scheme",
    "trials",
    "feasible_fraction",
    "sum_rate_mean",
    "sum_rate_std",
    "rate_wired_mean",
    "rate_wireless_mean",
    "sum_rate_mean_zerofill",
    "rate_wireless_mean_zerofill",
]


def _two_user_rows(stats: list[AggregateStats], value_name: str) -> list[dict]:
    rows = []
    for s in stats:
        rows.append(
            {
                value_name: s.sweep_value,
                "scheme": s.label,
                "trials": s.trials,
                "feasible_fraction": s.feasible_fraction,
                "sum_rate_mean": s.wsr_mean,
                "sum_rate_std": s.wsr_std,
                "rate_wired_mean": s.rate_wired_mean,
                "rate_wireless_mean": s.rate_wireless_mean,
                "sum_rate_mean_zerofill": s.wsr_mean_zerofill,
                "rate_wireless_mean_zerofill": s.rate_wireless_mean_zerofill,
            }
        )
    return rows


def experiment_fig6(
    params: SystemParams, trials: int = 100, n_workers: int = 1, **_
) -> tuple[list[str], list[dict]]:
    """Two-user rates versus span length."""
    spec = SweepSpec(param="D_x", values=FIG67_DX_VALUES, trials=trials)
    _, stats = run_two_user_sweep(spec, params, n_workers=n_workers)
    return ["D_x"] + _TWO_USER_FIELDS, _two_user_rows(stats, "D_x")


def experiment_fig8(
    params: SystemParams, trials: int = 100, n_workers: int = 1, **_
) -> tuple[list[str], list[dict]]:
    """Two-user rates versus transmit power (dBm axis)."""
    watts = tuple(dbm_to_watts(p) for p in FIG8_P_DBM)
    spec = SweepSpec(param="P_max", values=watts, trials=trials)
    records, stats = run_two_user_sweep(spec, params, n_workers=n_workers)
    by_watts = {w: dbm for w, dbm in zip(watts, FIG8_P_DBM)}
    rows = _two_user_rows(stats, "P_max")
    for row in rows:
        row["P_dBm"] = by_watts[row.pop("P_max")]
    return ["P_dBm"] + _TWO_USER_FIELDS, rows


_PROTOCOL_FIELDS = [
    "K",
    "protocol",
    "trials",
    "feasible_fraction",
    "wsr_mean",
    "wsr_std",
    "wsr_mean_zerofill",
    "rate_wired_mean",
    "rate_wireless_mean",
    "iterations_mean",
]


def _protocol_rows(
    stats: list[AggregateStats], value_name: str, k: int
) -> list[dict]:
    rows = []
    for s in stats:
        rows.append(
            {
                value_name: s.sweep_value,
                "K": k,
                "protocol": s.label,
                "trials": s.trials,
                "feasible_fraction": s.feasible_fraction,
                "wsr_mean": s.wsr_mean,
                "wsr_std": s.wsr_std,
                "wsr_mean_zerofill": s.wsr_mean_zerofill,
                "rate_wired_mean": s.rate_wired_mean,
                "rate_wireless_mean": s.rate_wireless_mean,
                "iterations_mean": s.iterations_mean,
            }
        )
    return rows


def experiment_fig7(
    params: SystemParams,
    trials: int = 100,
    protocols: tuple = ALL_PROTOCOLS,
    q_grid: int | None = None,
    n_workers: int = 1,
    **_,
) -> tuple[list[str], list[dict]]:
    """Multiuser weighted sum rate versus span length for K = 4 and 6."""
    rows = []
    for k in K_VALUES:
        p = replace(params, K=k)
        spec = SweepSpec(
            param="D_x", values=FIG67_DX_VALUES, protocols=protocols, trials=trials
        )
        _, stats = run_protocol_sweep(spec, p, q_grid=q_grid, n_workers=n_workers)
        rows.extend(_protocol_rows(stats, "D_x", k))
    return ["D_x"] + _PROTOCOL_FIELDS, rows


def experiment_fig9(
    params: SystemParams,
    trials: int = 100,
    protocols: tuple = ALL_PROTOCOLS,
    q_grid: int | None = None,
    n_workers: int = 1,
    **_,
) -> tuple[list[str], list[dict]]:
    """Multiuser weighted sum rate versus transmit power for K = 4 and 6."""
    watts = tuple(dbm_to_watts(p) for p in FIG9_P_DBM)
    by_watts = {w: dbm for w, dbm in zip(watts, FIG9_P_DBM)}
    rows = []
    for k in K_VALUES:
        p = replace(params, K=k)
        spec = SweepSpec(
            param="P_max", values=watts, protocols=protocols, trials=trials
        )
        _, stats = run_protocol_sweep(spec, p, q_grid=q_grid, n_workers=n_workers)
        for row in _protocol_rows(stats, "P_max", k):
            row["P_dBm"] = by_watts[row.pop("P_max")]
            rows.append(row)
    return ["P_dBm"] + _PROTOCOL_FIELDS, rows


EXPERIMENTS = {
    "fig4": experiment_fig4,
    "fig5": experiment_fig5,
    "fig6": experiment_fig6,
    "fig7": experiment_fig7,
    "fig8": experiment_fig8,
    "fig9": experiment_fig9,
}
