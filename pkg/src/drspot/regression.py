"""Hourly price regression: design matrix, OLS fit, forecast error, and
greedy forward feature selection.

The price model is linear in hour-of-day dummies (hours 1..23, hour 24 is
the reference level), demand, dry bulb temperature, dew point, a numeric
month, and holiday/Saturday/Sunday indicators.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .market_data import CalendarFeatures, HourlyRecord, RecordSeries

HOUR_DUMMIES = tuple(f"hour{k}" for k in range(1, 24))
FULL_FEATURES = (
    "intercept",
    *HOUR_DUMMIES,
    "demand",
    "temperature",
    "dew_point",
    "month",
    "holiday",
    "saturday",
    "sunday",
)
DEFAULT_BASE_FEATURES = ("intercept", "demand")
DEFAULT_THRESHOLDS = (1.3, 1.69, 2.45)

# Relative condition threshold on the QR diagonal below which a column is
# declared linearly dependent.
RANK_TOLERANCE = 1e-10


class RegressionError(Exception):
    """Base class for regression errors."""


class RankDeficientError(RegressionError):
    def __init__(self, column: str):
        super().__init__(f"design matrix is rank deficient: column {column!r} is linearly dependent")
        self.column = column


class InsufficientDataError(RegressionError):
    def __init__(self, n_obs: int, n_features: int):
        super().__init__(f"need more observations than features, got n={n_obs} with m={n_features}")
        self.n_obs = n_obs
        self.n_features = n_features


class DimensionMismatchError(RegressionError):
    pass


class LengthMismatchError(RegressionError):
    pass


class ZeroMeanActualError(RegressionError):
    pass


class SignificanceLevel(Enum):
    """Coefficient significance band; the enum value is the star marker."""

    ONE_PERCENT = "**"
    FIVE_PERCENT = "*"
    TEN_PERCENT = "+"
    NOT_SIGNIFICANT = ""


def significance_level(
    t: float, thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS
) -> SignificanceLevel:
    """Band |t| against the (10%, 5%, 1%) thresholds."""
    t10, t5, t1 = thresholds
    if not 0 < t10 < t5 < t1:
        raise ValueError(f"thresholds must satisfy 0 < t10 < t5 < t1, got {thresholds}")
    abs_t = abs(t)
    if abs_t >= t1:
        return SignificanceLevel.ONE_PERCENT
    if abs_t >= t5:
        return SignificanceLevel.FIVE_PERCENT
    if abs_t >= t10:
        return SignificanceLevel.TEN_PERCENT
    return SignificanceLevel.NOT_SIGNIFICANT


def validate_feature_spec(spec: Sequence[str]) -> tuple[str, ...]:
    """Check a feature list: known names, no duplicates, intercept first."""
    spec = tuple(spec)
    if not spec or spec[0] != "intercept":
        raise ValueError("feature spec must start with 'intercept'")
    seen = set()
    for name in spec:
        if name not in FULL_FEATURES:
            raise ValueError(f"unknown feature {name!r}")
        if name in seen:
            raise ValueError(f"duplicate feature {name!r}")
        seen.add(name)
    return spec


def _feature_value(name: str, record: HourlyRecord, cal: CalendarFeatures, demand: float) -> float:
    if name == "intercept":
        return 1.0
    if name.startswith("hour"):
        return 1.0 if cal.hour_of_day == int(name[4:]) else 0.0
    if name == "demand":
        return demand
    if name == "temperature":
        return record.dry_bulb_temp
    if name == "dew_point":
        return record.dew_point
    if name == "month":
        return float(cal.month)
    if name == "holiday":
        return 1.0 if cal.is_holiday else 0.0
    if name == "saturday":
        return 1.0 if cal.is_saturday else 0.0
    if name == "sunday":
        return 1.0 if cal.is_sunday else 0.0
    raise ValueError(f"unknown feature {name!r}")


def build_design_row(record: HourlyRecord, cal: CalendarFeatures, spec: Sequence[str]) -> np.ndarray:
    """One design row for one hour; hour 24 maps to all-zero hour dummies."""
    spec = validate_feature_spec(spec)
    return np.array([_feature_value(name, record, cal, record.demand) for name in spec], dtype=float)


def design_matrix(
    series: RecordSeries, spec: Sequence[str], demand: np.ndarray | None = None
) -> np.ndarray:
    """Design rows for a whole series, optionally overriding the demand
    column (all other regressors stay at their observed values)."""
    spec = validate_feature_spec(spec)
    demand_col = series.demand if demand is None else np.asarray(demand, dtype=float)
    if len(demand_col) != len(series):
        raise LengthMismatchError(
            f"demand override has {len(demand_col)} values for {len(series)} records"
        )
    rows = np.empty((len(series), len(spec)), dtype=float)
    for i, (record, cal) in enumerate(series):
        for j, name in enumerate(spec):
            rows[i, j] = _feature_value(name, record, cal, demand_col[i])
    return rows


def price_vector(series: RecordSeries) -> np.ndarray:
    return series.spot_price


@dataclass
class RegressionModel:
    """Fitted linear price model with classical OLS statistics.

    ``t_values[f] == coefficients[f] / std_errors[f]``; a noiseless fit has
    zero standard errors and infinite t-values.
    """

    spec: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    n_obs: int
    residual_variance: float

    def significance(
        self, thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS
    ) -> tuple[SignificanceLevel, ...]:
        return tuple(significance_level(t, thresholds) for t in self.t_values)

    def to_json_dict(self, thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS) -> dict:
        levels = self.significance(thresholds)
        return {
            "n_obs": self.n_obs,
            "residual_variance": self.residual_variance,
            "features": [
                {
                    "name": name,
                    "coefficient": float(coef),
                    "std_error": float(se),
                    "t_value": float(t),
                    "significance": level.value,
                }
                for name, coef, se, t, level in zip(
                    self.spec, self.coefficients, self.std_errors, self.t_values, levels
                )
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RegressionModel":
        features = data["features"]
        return cls(
            spec=tuple(f["name"] for f in features),
            coefficients=np.array([f["coefficient"] for f in features], dtype=float),
            std_errors=np.array([f["std_error"] for f in features], dtype=float),
            t_values=np.array([f["t_value"] for f in features], dtype=float),
            n_obs=int(data["n_obs"]),
            residual_variance=float(data["residual_variance"]),
        )

    def table_text(self, thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS) -> str:
        """Fixed-width coefficient table with significance stars."""
        lines = [f"{'variable':<14} {'coefficient':>14} {'std error':>12} {'t-value':>10}"]
        for name, coef, se, t, level in zip(
            self.spec, self.coefficients, self.std_errors, self.t_values, self.significance(thresholds)
        ):
            lines.append(f"{name:<14} {coef:>14.5f} {se:>12.5f} {t:>10.2f} {level.value}")
        return "\n".join(lines)


def fit_ols(X: np.ndarray, y: np.ndarray, spec: Sequence[str] | None = None) -> RegressionModel:
    """Ordinary least squares via QR, with classical standard errors.

    Rank deficiency is detected from the QR diagonal at a relative
    threshold of ``RANK_TOLERANCE`` and reported with the offending column
    name. Requires strictly more observations than features.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"X is {X.shape}, y is {y.shape}")
    n, m = X.shape
    names = tuple(spec) if spec is not None else tuple(f"x{j}" for j in range(m))
    if len(names) != m:
        raise DimensionMismatchError(f"{len(names)} feature names for {m} columns")
    if n <= m:
        raise InsufficientDataError(n, m)

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= RANK_TOLERANCE * diag.max():
        bad = int(np.argmax(diag <= RANK_TOLERANCE * diag.max()))
        raise RankDeficientError(names[bad])

    coefficients = np.linalg.solve(r, q.T @ y)
    residuals = y - X @ coefficients
    rss = float(residuals @ residuals)
    residual_variance = rss / (n - m)

    r_inv = np.linalg.solve(r, np.eye(m))
    xtx_inv_diag = np.einsum("ij,ij->i", r_inv, r_inv)
    std_errors = np.sqrt(np.maximum(residual_variance * xtx_inv_diag, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = coefficients / std_errors
    t_values = np.where(np.isnan(t_values), 0.0, t_values)

    return RegressionModel(
        spec=names,
        coefficients=coefficients,
        std_errors=std_errors,
        t_values=t_values,
        n_obs=n,
        residual_variance=residual_variance,
    )


def predict(model: RegressionModel, rows: np.ndarray) -> np.ndarray:
    """Evaluate the fitted model on design rows."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.shape[1] != len(model.coefficients):
        raise DimensionMismatchError(
            f"rows have {rows.shape[1]} columns, model has {len(model.coefficients)} features"
        )
    return rows @ model.coefficients


def ferms(forecast: np.ndarray, actual: np.ndarray) -> float:
    """Forecast error as root mean square of (forecast - actual),
    normalized by the mean of the actual series, in percent."""
    forecast = np.asarray(forecast, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if forecast.shape != actual.shape or forecast.ndim != 1 or len(forecast) == 0:
        raise LengthMismatchError(
            f"forecast and actual must be equal-length non-empty vectors, got {forecast.shape} and {actual.shape}"
        )
    mean_actual = float(actual.mean())
    if mean_actual == 0.0:
        raise ZeroMeanActualError("mean of actual series is zero")
    return float(100.0 * np.sqrt(np.mean((forecast - actual) ** 2)) / mean_actual)


def forward_select(
    candidates: Sequence[str],
    train: RecordSeries,
    holdout: RecordSeries,
    base: Sequence[str] = DEFAULT_BASE_FEATURES,
    tol: float = 0.0,
) -> tuple[tuple[str, ...], RegressionModel]:
    """Greedy forward selection on out-of-sample forecast error.

    Starting from ``base``, repeatedly adds the candidate that most reduces
    holdout ferms; stops when no candidate reduces it by more than ``tol``.
    A candidate whose trial fit is rank deficient is disqualified for the
    rest of the search. Ties go to the earlier candidate in list order.

    Returns the selected spec and the model fitted on ``train`` with it.
    """
    candidates = validate_feature_spec(candidates)
    base = validate_feature_spec(base)
    if not set(base) <= set(candidates):
        raise ValueError("base features must be a subset of the candidate pool")

    train_full = design_matrix(train, candidates)
    holdout_full = design_matrix(holdout, candidates)
    y_train = price_vector(train)
    y_holdout = price_vector(holdout)
    column = {name: idx for idx, name in enumerate(candidates)}

    def trial(spec: list[str]) -> tuple[RegressionModel, float]:
        idx = [column[name] for name in spec]
        model = fit_ols(train_full[:, idx], y_train, spec=spec)
        score = ferms(predict(model, holdout_full[:, idx]), y_holdout)
        return model, score

    selected = list(base)
    model, best_score = trial(selected)
    pool = [name for name in candidates if name not in set(base)]

    while pool:
        best_candidate = None
        best_trial: tuple[RegressionModel, float] | None = None
        disqualified = []
        for name in pool:
            try:
                trial_model, score = trial(selected + [name])
            except RankDeficientError:
                disqualified.append(name)
                continue
            if best_score - score > tol and (best_trial is None or score < best_trial[1]):
                best_candidate = name
                best_trial = (trial_model, score)
        for name in disqualified:
            pool.remove(name)
        if best_candidate is None:
            break
        selected.append(best_candidate)
        pool.remove(best_candidate)
        model, best_score = best_trial
    return tuple(selected), model
