"""Scenario configuration file loading.

The config is one JSON document; every key is optional and falls back to
the built-in defaults. Schema:

    flat_rate                 number > 0, $/MWh
    ferms_gate                number > 0, percent
    holdout_days              integer >= 1
    significance_thresholds   [t10, t5, t1]
    elasticity                {peak_peak, peak_offpeak, peak_low,
                               offpeak_peak, offpeak_offpeak, offpeak_low,
                               low_peak, low_offpeak, low_low}
    periods                   {"peak": [hours], "offpeak": [hours], "low": [hours]}
    feature_candidates        [feature names]
    base_features             [feature names]
    columns                   {canonical name: CSV column name}
    holidays                  ["YYYY-MM-DD", ...]
    holidays_file             path, relative to the config file
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .elasticity import ElasticityTable, PeriodConfig
from .market_data import read_holidays
from .pipeline import ScenarioConfig

CONFIG_ENV_VAR = "DR_SPOT_SIM_CONFIG"

_KNOWN_KEYS = {
    "flat_rate",
    "ferms_gate",
    "holdout_days",
    "significance_thresholds",
    "elasticity",
    "periods",
    "feature_candidates",
    "base_features",
    "columns",
    "holidays",
    "holidays_file",
}

_ELASTICITY_KEYS = {
    "peak_peak", "peak_offpeak", "peak_low",
    "offpeak_peak", "offpeak_offpeak", "offpeak_low",
    "low_peak", "low_offpeak", "low_low",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Settings:
    """A loaded configuration: pipeline parameters plus data-ingestion
    options (column remapping and the holiday calendar)."""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    columns: dict[str, str] = field(default_factory=dict)
    holidays: frozenset[date] = frozenset()


def resolve_config_path(explicit: str | None) -> str | None:
    """CLI --config wins; DR_SPOT_SIM_CONFIG is the fallback."""
    return explicit or os.environ.get(CONFIG_ENV_VAR) or None


def load_settings(path: str | Path | None) -> Settings:
    """Load a config file, or return defaults when no path is given."""
    if path is None:
        return Settings()
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from None

    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {sorted(unknown)}")

    scenario_kwargs: dict = {}
    for key in ("flat_rate", "ferms_gate"):
        if key in data:
            scenario_kwargs[key] = float(data[key])
    if "holdout_days" in data:
        scenario_kwargs["holdout_days"] = int(data["holdout_days"])
    if "significance_thresholds" in data:
        thresholds = data["significance_thresholds"]
        if len(thresholds) != 3:
            raise ConfigError(f"{path}: significance_thresholds must be [t10, t5, t1]")
        scenario_kwargs["significance_thresholds"] = tuple(float(t) for t in thresholds)
    if "elasticity" in data:
        table = data["elasticity"]
        if set(table) != _ELASTICITY_KEYS:
            raise ConfigError(
                f"{path}: elasticity must define exactly the keys {sorted(_ELASTICITY_KEYS)}"
            )
        try:
            scenario_kwargs["elasticity_table"] = ElasticityTable(**{k: float(v) for k, v in table.items()})
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if "periods" in data:
        periods = data["periods"]
        if set(periods) != {"peak", "offpeak", "low"}:
            raise ConfigError(f"{path}: periods must define peak, offpeak, and low hour lists")
        try:
            scenario_kwargs["period_config"] = PeriodConfig(
                peak_hours=frozenset(int(h) for h in periods["peak"]),
                offpeak_hours=frozenset(int(h) for h in periods["offpeak"]),
                low_hours=frozenset(int(h) for h in periods["low"]),
            )
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if "feature_candidates" in data:
        scenario_kwargs["feature_candidates"] = tuple(data["feature_candidates"])
    if "base_features" in data:
        scenario_kwargs["base_features"] = tuple(data["base_features"])

    try:
        scenario = ScenarioConfig(**scenario_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    holidays: set[date] = set()
    for raw in data.get("holidays", []):
        try:
            holidays.add(date.fromisoformat(raw))
        except ValueError:
            raise ConfigError(f"{path}: bad holiday date {raw!r}") from None
    if "holidays_file" in data:
        holidays |= read_holidays(path.parent / data["holidays_file"])

    columns = {str(k): str(v) for k, v in data.get("columns", {}).items()}
    return Settings(scenario=scenario, columns=columns, holidays=frozenset(holidays))
