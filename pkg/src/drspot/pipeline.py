"""Closed-loop scenario: fit and select the price model, forecast the study
window, apply the demand response to the forecast under real-time pricing,
and re-price the market with the altered demand (a single pass, no
fixed-point iteration).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .elasticity import (
    DayVectors,
    ElasticityTable,
    PeriodConfig,
    build_elasticity_matrix,
    multi_hour_response,
)
from .market_data import RecordSeries, validate_series
from .regression import (
    DEFAULT_BASE_FEATURES,
    DEFAULT_THRESHOLDS,
    FULL_FEATURES,
    LengthMismatchError,
    RegressionModel,
    design_matrix,
    ferms,
    forward_select,
    predict,
    price_vector,
    validate_feature_spec,
)

HOURS_PER_DAY = 24

RESULT_COLUMNS = (
    "timestamp",
    "baseline_demand",
    "forecast_price",
    "dr_demand",
    "baseline_spot_price",
    "updated_spot_price",
    "clamped",
)


class ModelRejectedError(Exception):
    """The fitted model failed the out-of-sample forecast error gate."""

    def __init__(self, achieved_ferms: float, gate: float):
        super().__init__(
            f"model rejected: holdout ferms {achieved_ferms:.2f}% exceeds gate {gate:.2f}%"
        )
        self.achieved_ferms = achieved_ferms
        self.gate = gate


class EmptyWindowError(Exception):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a simulation run depends on besides the data itself."""

    flat_rate: float = 30.0
    elasticity_table: ElasticityTable = field(default_factory=ElasticityTable.default)
    period_config: PeriodConfig = field(default_factory=PeriodConfig.default)
    feature_candidates: tuple[str, ...] = FULL_FEATURES
    base_features: tuple[str, ...] = DEFAULT_BASE_FEATURES
    ferms_gate: float = 15.0
    holdout_days: int = 7
    significance_thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS

    def __post_init__(self):
        if self.flat_rate <= 0:
            raise ValueError(f"flat_rate must be > 0, got {self.flat_rate}")
        if self.ferms_gate <= 0:
            raise ValueError(f"ferms_gate must be > 0, got {self.ferms_gate}")
        if self.holdout_days < 1:
            raise ValueError(f"holdout_days must be >= 1, got {self.holdout_days}")
        t10, t5, t1 = self.significance_thresholds
        if not 0 < t10 < t5 < t1:
            raise ValueError(
                f"significance thresholds must satisfy 0 < t10 < t5 < t1, got {self.significance_thresholds}"
            )
        object.__setattr__(self, "feature_candidates", validate_feature_spec(self.feature_candidates))
        object.__setattr__(self, "base_features", validate_feature_spec(self.base_features))


@dataclass
class ScenarioResult:
    """Per-hour series over the study window plus the fitted model.

    Prices before and after the response are both produced by the market
    price model: baseline_spot_price is the model at baseline demand and
    updated_spot_price the model at the responded demand, so a null
    response leaves the market exactly unchanged.
    """

    timestamps: tuple[datetime, ...]
    baseline_demand: np.ndarray
    forecast_price: np.ndarray
    dr_demand: np.ndarray
    baseline_spot_price: np.ndarray
    updated_spot_price: np.ndarray
    clamp_flags: np.ndarray
    model: RegressionModel
    holdout_ferms: float

    def __post_init__(self):
        n = len(self.timestamps)
        series = (
            self.baseline_demand,
            self.forecast_price,
            self.dr_demand,
            self.baseline_spot_price,
            self.updated_spot_price,
            self.clamp_flags,
        )
        if any(len(s) != n for s in series):
            raise ValueError("all result series must have equal length")

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def clamp_count(self) -> int:
        return int(np.count_nonzero(self.clamp_flags))


@dataclass(frozen=True)
class ImpactSummary:
    """Aggregate energy and wholesale-cost deltas for a scenario."""

    delta_energy_mwh: float
    delta_energy_pct: float
    delta_cost: float
    delta_cost_pct: float
    baseline_cost: float
    dr_cost: float
    peak_price_before: float
    peak_price_after: float

    def to_json_dict(self) -> dict:
        return {
            "delta_energy_mwh": self.delta_energy_mwh,
            "delta_energy_pct": self.delta_energy_pct,
            "delta_cost": self.delta_cost,
            "delta_cost_pct": self.delta_cost_pct,
            "baseline_cost": self.baseline_cost,
            "dr_cost": self.dr_cost,
            "peak_price_before": self.peak_price_before,
            "peak_price_after": self.peak_price_after,
        }


def customer_bill(demand: Sequence[float], prices: float | Sequence[float]) -> float:
    """Total cost of a demand series at hourly prices or a flat rate."""
    demand = np.asarray(demand, dtype=float)
    if np.isscalar(prices) or isinstance(prices, (int, float)):
        return float(demand.sum() * float(prices))
    prices = np.asarray(prices, dtype=float)
    if prices.shape != demand.shape:
        raise LengthMismatchError(
            f"demand has {demand.shape} entries, prices {prices.shape}"
        )
    return float(demand @ prices)


def split_train_holdout(history: RecordSeries, holdout_days: int) -> tuple[RecordSeries, RecordSeries]:
    """Hold out the last ``holdout_days`` whole days of the history."""
    holdout_hours = holdout_days * HOURS_PER_DAY
    if len(history) <= holdout_hours:
        raise ValueError(
            f"history has {len(history)} hours, not enough to hold out {holdout_days} days"
        )
    return history[:-holdout_hours], history[-holdout_hours:]


def _require_valid(series: RecordSeries, label: str) -> None:
    violations = validate_series(series)
    if violations:
        raise ValueError(f"{label} series is invalid: " + "; ".join(violations[:5]))


def run_scenario(
    history: RecordSeries, study_window: RecordSeries, cfg: ScenarioConfig = ScenarioConfig()
) -> ScenarioResult:
    """Run the full loop over a study window of whole days.

    Fits the price model on the history (with the last ``holdout_days``
    held out for selection and the forecast error gate), forecasts the
    study window, responds day by day with baseline price p0 fixed at the
    flat rate, then re-predicts prices with the responded demand
    substituted for the observed demand.
    """
    _require_valid(history, "history")
    _require_valid(study_window, "study window")
    n = len(study_window)
    if n == 0 or n % HOURS_PER_DAY:
        raise ValueError(f"study window must cover whole days, got {n} hours")
    if set(history.timestamps) & set(study_window.timestamps):
        raise ValueError("history and study window overlap")

    train, holdout = split_train_holdout(history, cfg.holdout_days)
    spec, model = forward_select(cfg.feature_candidates, train, holdout, cfg.base_features)

    holdout_forecast = predict(model, design_matrix(holdout, spec))
    holdout_ferms = ferms(holdout_forecast, price_vector(holdout))
    if holdout_ferms > cfg.ferms_gate:
        raise ModelRejectedError(holdout_ferms, cfg.ferms_gate)

    forecast = predict(model, design_matrix(study_window, spec))

    matrix = build_elasticity_matrix(cfg.elasticity_table, cfg.period_config)
    baseline_demand = study_window.demand
    flat = np.full(HOURS_PER_DAY, cfg.flat_rate, dtype=float)
    dr_demand = np.empty(n, dtype=float)
    clamp_flags = np.zeros(n, dtype=bool)
    for start in range(0, n, HOURS_PER_DAY):
        stop = start + HOURS_PER_DAY
        day = DayVectors(d0=baseline_demand[start:stop], p0=flat, p=forecast[start:stop])
        response = multi_hour_response(day, matrix)
        dr_demand[start:stop] = response.demand
        clamp_flags[start:stop] = response.clamped

    updated = predict(model, design_matrix(study_window, spec, demand=dr_demand))

    return ScenarioResult(
        timestamps=study_window.timestamps,
        baseline_demand=baseline_demand,
        forecast_price=forecast,
        dr_demand=dr_demand,
        baseline_spot_price=forecast.copy(),
        updated_spot_price=updated,
        clamp_flags=clamp_flags,
        model=model,
        holdout_ferms=holdout_ferms,
    )


def impact_summary(result: ScenarioResult) -> ImpactSummary:
    """Aggregate before/after deltas.

    Baseline cost is baseline demand at the pre-response spot price,
    after-response cost is the responded demand at the re-predicted price;
    a null response leaves all deltas at exactly zero.
    """
    if len(result) == 0:
        raise EmptyWindowError("scenario result covers no hours")
    baseline_energy = float(result.baseline_demand.sum())
    dr_energy = float(result.dr_demand.sum())
    delta_energy = dr_energy - baseline_energy
    baseline_cost = customer_bill(result.baseline_demand, result.baseline_spot_price)
    dr_cost = customer_bill(result.dr_demand, result.updated_spot_price)
    delta_cost = dr_cost - baseline_cost
    return ImpactSummary(
        delta_energy_mwh=delta_energy,
        delta_energy_pct=100.0 * delta_energy / baseline_energy,
        delta_cost=delta_cost,
        delta_cost_pct=100.0 * delta_cost / baseline_cost,
        baseline_cost=baseline_cost,
        dr_cost=dr_cost,
        peak_price_before=float(result.baseline_spot_price.max()),
        peak_price_after=float(result.updated_spot_price.max()),
    )


def write_result_csv(result: ScenarioResult, dest: str | Path | IO[str]) -> None:
    """One row per hour in RESULT_COLUMNS order; floats use repr so output
    is byte-deterministic and lossless."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as handle:
            write_result_csv(result, handle)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for i, ts in enumerate(result.timestamps):
        writer.writerow(
            [
                ts.isoformat(timespec="minutes"),
                repr(float(result.baseline_demand[i])),
                repr(float(result.forecast_price[i])),
                repr(float(result.dr_demand[i])),
                repr(float(result.baseline_spot_price[i])),
                repr(float(result.updated_spot_price[i])),
                "1" if result.clamp_flags[i] else "0",
            ]
        )
