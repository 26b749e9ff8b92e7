"""Generate the bundled synthetic market dataset (data/synthetic_market.csv).

Deterministic (fixed seed). Demand has a narrow afternoon peak amplified
by temperature on hot days; price is a linear function of demand, weather,
calendar, and an hour-of-day profile plus noise, so the data matches the
structure the price model assumes while staying fully synthetic. Prices
straddle the 30 $/MWh flat rate: cheap nights, spikes on hot afternoons.

Run from the repo root:  python3 scripts/make_synthetic_dataset.py
"""

from __future__ import annotations

import csv
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

SEED = 20210607
START = datetime(2021, 6, 7)  # a Monday
DAYS = 70

OUT = Path(__file__).resolve().parents[1] / "data" / "synthetic_market.csv"

# Hour-of-day price offsets beyond what demand explains (evening premium,
# overnight discount), kept small so the fitted model stays accurate.
HOUR_PROFILE = 3.0 * np.sin(2 * np.pi * (np.arange(24) - 13) / 24)


def main() -> None:
    rng = np.random.default_rng(SEED)
    n = DAYS * 24
    timestamps = [START + timedelta(hours=h) for h in range(n)]
    hod = np.array([ts.hour for ts in timestamps])          # 0..23
    month = np.array([ts.month for ts in timestamps], dtype=float)
    weekday = np.array([ts.weekday() for ts in timestamps])
    saturday = (weekday == 5).astype(float)
    sunday = (weekday == 6).astype(float)

    day_index = np.arange(n) / 24.0
    seasonal = 6.0 * np.sin(2 * np.pi * (day_index - 10) / 120.0)
    heat_wave = 7.0 * np.exp(-0.5 * ((day_index - 63.0) / 2.5) ** 2)  # late-window hot spell
    temp = (
        74.0
        + seasonal
        + heat_wave
        + 11.0 * np.sin(2 * np.pi * (hod - 9) / 24)
        + rng.normal(0.0, 1.5, n)
    )
    dew = temp - 12.0 + rng.normal(0.0, 1.0, n)

    # Narrow afternoon peak plus cooling load above 75 F keeps demand
    # right-skewed: long cheap nights, short expensive afternoons.
    afternoon = np.exp(-0.5 * ((hod - 16.5) / 2.5) ** 2)
    demand = (
        1550.0
        + 550.0 * afternoon
        + 55.0 * np.maximum(temp - 75.0, 0.0)
        - 220.0 * (saturday + sunday)
        + rng.normal(0.0, 35.0, n)
    )

    price = (
        -42.0
        + 0.028 * demand
        + 0.32 * temp
        - 0.10 * dew
        + 1.0 * (month - 6.0)
        - 1.5 * saturday
        - 2.0 * sunday
        + HOUR_PROFILE[hod]
        + rng.normal(0.0, 1.5, n)
    )

    assert demand.min() > 0, f"negative demand {demand.min():.1f}"
    assert price.min() > 0, f"negative price {price.min():.1f}"
    assert price.max() > 45, "expected afternoon prices well above the 30 $/MWh flat rate"
    assert 22 < price.mean() < 32, f"mean price {price.mean():.1f} should straddle the flat rate"

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["timestamp", "demand_mwh", "spot_price", "dry_bulb_f", "dew_point_f"])
        for i, ts in enumerate(timestamps):
            writer.writerow(
                [
                    ts.isoformat(timespec="minutes"),
                    f"{demand[i]:.3f}",
                    f"{price[i]:.4f}",
                    f"{temp[i]:.2f}",
                    f"{dew[i]:.2f}",
                ]
            )
    print(f"wrote {n} rows to {OUT}")
    print(f"demand {demand.min():.0f}..{demand.max():.0f} MWh, price {price.min():.1f}..{price.max():.1f} $/MWh")
    print(f"mean price {price.mean():.1f} $/MWh, hours above 30: {(price > 30).sum()} of {n}")


if __name__ == "__main__":
    main()
