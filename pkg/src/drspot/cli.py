"""Command line front end.

Subcommands: fit (model estimation and coefficient table), forecast
(standalone day-ahead price forecast), simulate (full demand response
scenario with CSV/JSON outputs), report (summarize a simulate output
directory). Exit codes: 0 success, 1 input or runtime error, 2 quality
gate failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from contextlib import contextmanager
from datetime import date, datetime, time, timedelta
from pathlib import Path

from . import pipeline
from .config import ConfigError, Settings, load_settings, resolve_config_path
from .market_data import MarketDataError, RecordSeries, parse_hourly_csv
from .pipeline import EmptyWindowError, ModelRejectedError, RESULT_COLUMNS
from .regression import RegressionError, design_matrix, ferms, forward_select, predict, price_vector


class CommandError(Exception):
    """Fatal command failure; the message names the stage that failed."""


@contextmanager
def _stage(name: str):
    try:
        yield
    except (ModelRejectedError, CommandError):
        raise
    except (MarketDataError, RegressionError, ConfigError, EmptyWindowError, ValueError, OSError) as exc:
        raise CommandError(f"{name}: {exc}") from exc


def _json_text(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _load_settings(args) -> Settings:
    with _stage("config"):
        settings = load_settings(resolve_config_path(args.config))
        if getattr(args, "holdout_days", None) is not None:
            settings = dataclasses.replace(
                settings,
                scenario=dataclasses.replace(settings.scenario, holdout_days=args.holdout_days),
            )
        return settings


def _load_series(args, settings: Settings) -> RecordSeries:
    with _stage("load"):
        return parse_hourly_csv(
            args.data,
            schema=settings.columns,
            holidays=settings.holidays,
            strict=not args.permissive,
        )


def _split_window(series: RecordSeries, args) -> tuple[RecordSeries, RecordSeries]:
    with _stage("window"):
        start = datetime.combine(date.fromisoformat(args.window_start), time(0))
        end = start + timedelta(days=args.days)
        study = series.between(start, end)
        if len(study) != args.days * 24:
            raise ValueError(
                f"window {args.window_start} +{args.days}d is not fully inside the data "
                f"({len(study)} of {args.days * 24} hours found)"
            )
        if not series.records or series.records[0].timestamp >= start:
            raise ValueError(f"no history before window start {args.window_start}")
        history = series.between(series.records[0].timestamp, start)
        return history, study


def _fit(settings: Settings, history: RecordSeries):
    with _stage("fit"):
        scenario = settings.scenario
        train, holdout = pipeline.split_train_holdout(history, scenario.holdout_days)
        spec, model = forward_select(
            scenario.feature_candidates, train, holdout, scenario.base_features
        )
        holdout_ferms = ferms(predict(model, design_matrix(holdout, spec)), price_vector(holdout))
        return spec, model, holdout_ferms


def cmd_fit(args) -> int:
    settings = _load_settings(args)
    series = _load_series(args, settings)
    spec, model, holdout_ferms = _fit(settings, series)
    thresholds = settings.scenario.significance_thresholds
    doc = model.to_json_dict(thresholds)
    doc["holdout_ferms"] = holdout_ferms
    with _stage("write"):
        Path(args.out).write_text(_json_text(doc))
    print(model.table_text(thresholds))
    print(f"n_obs: {model.n_obs}")
    print(f"holdout ferms: {holdout_ferms:.2f}%")
    print(f"model written to {args.out}")
    if args.gate is not None and holdout_ferms > args.gate:
        raise ModelRejectedError(holdout_ferms, args.gate)
    return 0


def cmd_forecast(args) -> int:
    settings = _load_settings(args)
    series = _load_series(args, settings)
    history, study = _split_window(series, args)
    spec, model, holdout_ferms = _fit(settings, history)
    with _stage("forecast"):
        forecast = predict(model, design_matrix(study, spec))
        window_ferms = ferms(forecast, price_vector(study))
    with _stage("write"):
        lines = ["timestamp,spot_price,forecast_price"]
        for (record, _cal), value in zip(study, forecast):
            lines.append(
                f"{record.timestamp.isoformat(timespec='minutes')},"
                f"{record.spot_price!r},{float(value)!r}"
            )
        Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"holdout ferms: {holdout_ferms:.2f}%")
    print(f"window ferms: {window_ferms:.2f}%")
    print(f"forecast written to {args.out}")
    return 0


def _write_plot_csv(path: Path, header: tuple[str, str, str], timestamps, first, second) -> None:
    lines = [",".join(header)]
    for ts, a, b in zip(timestamps, first, second):
        lines.append(f"{ts.isoformat(timespec='minutes')},{float(a)!r},{float(b)!r}")
    path.write_text("\n".join(lines) + "\n")


def cmd_simulate(args) -> int:
    settings = _load_settings(args)
    series = _load_series(args, settings)
    history, study = _split_window(series, args)
    with _stage("simulate"):
        result = pipeline.run_scenario(history, study, settings.scenario)
        summary = pipeline.impact_summary(result)
    with _stage("write"):
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        pipeline.write_result_csv(result, out_dir / "result.csv")
        doc = summary.to_json_dict()
        doc["holdout_ferms"] = result.holdout_ferms
        doc["clamp_count"] = result.clamp_count
        doc["hours"] = len(result)
        doc["selected_features"] = list(result.model.spec)
        (out_dir / "summary.json").write_text(_json_text(doc))
        _write_plot_csv(
            out_dir / "plot_price_forecast.csv",
            ("timestamp", "actual_price", "forecast_price"),
            result.timestamps, study.spot_price, result.forecast_price,
        )
        _write_plot_csv(
            out_dir / "plot_demand.csv",
            ("timestamp", "demand_before", "demand_after"),
            result.timestamps, result.baseline_demand, result.dr_demand,
        )
        _write_plot_csv(
            out_dir / "plot_spot_price.csv",
            ("timestamp", "price_before", "price_after"),
            result.timestamps, result.baseline_spot_price, result.updated_spot_price,
        )
    print(f"simulated {len(result)} hours, outputs in {out_dir}")
    print(
        f"energy delta: {summary.delta_energy_mwh:.1f} MWh ({summary.delta_energy_pct:+.2f}%), "
        f"cost delta: {summary.delta_cost:,.0f} $ ({summary.delta_cost_pct:+.2f}%)"
    )
    return 0


def _read_result_csv(path: Path) -> int:
    text = path.read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty file")
    header = text[0].split(",")
    if tuple(header) != RESULT_COLUMNS:
        raise ValueError(f"{path}: unexpected header {header}")
    for line_num, line in enumerate(text[1:], start=2):
        if len(line.split(",")) != len(RESULT_COLUMNS):
            raise ValueError(f"{path}: row {line_num} has the wrong number of fields")
    return len(text) - 1


def cmd_report(args) -> int:
    result_dir = Path(args.result_dir)
    with _stage("read"):
        summary_path = result_dir / "summary.json"
        if not summary_path.exists():
            raise FileNotFoundError(f"{summary_path} not found")
        summary = json.loads(summary_path.read_text())
        rows = _read_result_csv(result_dir / "result.csv")
        if rows != summary.get("hours"):
            raise ValueError(
                f"{result_dir / 'result.csv'}: {rows} rows but summary says {summary.get('hours')}"
            )
    print(f"scenario report: {result_dir}")
    print(f"  hours simulated       {summary['hours']}")
    print(
        f"  energy delta          {summary['delta_energy_mwh']:.1f} MWh "
        f"({summary['delta_energy_pct']:+.2f}%)"
    )
    print(
        f"  wholesale cost delta  {summary['delta_cost']:,.0f} $ "
        f"({summary['delta_cost_pct']:+.2f}%)"
    )
    print(f"  baseline cost         {summary['baseline_cost']:,.0f} $")
    print(f"  cost after response   {summary['dr_cost']:,.0f} $")
    print(f"  peak price before     {summary['peak_price_before']:.2f} $/MWh")
    print(f"  peak price after      {summary['peak_price_after']:.2f} $/MWh")
    print(f"  holdout ferms         {summary['holdout_ferms']:.2f}%")
    print(f"  clamped hours         {summary['clamp_count']}")
    return 0


def _add_common(sub: argparse.ArgumentParser, window: bool) -> None:
    sub.add_argument("--data", required=True, help="hourly market data CSV")
    sub.add_argument("--config", default=None, help="config JSON (or set DR_SPOT_SIM_CONFIG)")
    sub.add_argument("--holdout-days", type=int, default=None, help="override config holdout days")
    gaps = sub.add_mutually_exclusive_group()
    gaps.add_argument("--strict", dest="permissive", action="store_false", help="reject gaps (default)")
    gaps.add_argument("--permissive", dest="permissive", action="store_true", help="fill gaps")
    sub.set_defaults(permissive=False)
    if window:
        sub.add_argument("--window-start", required=True, help="study window start date (ISO)")
        sub.add_argument("--days", type=int, required=True, help="study window length in days")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drspot",
        description="Spot-market price impact simulator for price-elastic demand response",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit the price model and write it as JSON")
    _add_common(fit, window=False)
    fit.add_argument("--out", required=True, help="output model JSON path")
    fit.add_argument("--gate", type=float, default=None, help="fail (exit 2) if holdout ferms exceeds this")
    fit.set_defaults(func=cmd_fit)

    forecast = sub.add_parser("forecast", help="forecast prices for a window")
    _add_common(forecast, window=True)
    forecast.add_argument("--out", required=True, help="output forecast CSV path")
    forecast.set_defaults(func=cmd_forecast)

    simulate = sub.add_parser("simulate", help="run the demand response scenario")
    _add_common(simulate, window=True)
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.set_defaults(func=cmd_simulate)

    report = sub.add_parser("report", help="summarize a simulate output directory")
    report.add_argument("result_dir", help="directory written by simulate")
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelRejectedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (MarketDataError, RegressionError, ConfigError, EmptyWindowError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
