#!/usr/bin/env python3
"""Tabulate price-versus-leakage curves for plotting.

Writes one delimited file per curve: three linear rules at different
rates (same intercept c_p, slope lambda) and one exposure rule running
from zero leakage to full disclosure of a 5.3-nat profile, where it
reaches c_p plus the statutory ceiling exactly.
"""

from __future__ import annotations

import argparse
from decimal import Decimal
from pathlib import Path

from leakpricer import (
    EXPOSURE,
    InfoQuantity,
    LINEAR,
    NATS,
    PricingPolicy,
    price_curve,
    quantize_money,
)

BASELINE_NATS = 5.3
CEILING = Decimal("500000")
PRODUCTION_COST = Decimal("0.001")


def write_curve(points, path: Path) -> None:
    lines = ["leakage,value"]
    lines += [f"{nats:.6f},{quantize_money(total)}" for nats, total in points]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(points)} points to {path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=Path, default=Path("curves"))
    parser.add_argument("--step", type=float, default=BASELINE_NATS / 100)
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    for rate in (25_000.0, 50_000.0, 94_339.62264150944):
        policy = PricingPolicy(production_cost=PRODUCTION_COST, rate_per_nat=rate)
        points = price_curve(policy, LINEAR, 0.0, BASELINE_NATS, args.step)
        write_curve(points, args.outdir / f"linear_{int(rate)}.csv")

    policy = PricingPolicy(production_cost=PRODUCTION_COST, max_penalty=CEILING)
    points = price_curve(
        policy,
        EXPOSURE,
        0.0,
        BASELINE_NATS,
        args.step,
        baseline_entropy=InfoQuantity(BASELINE_NATS, NATS),
    )
    write_curve(points, args.outdir / "exposure.csv")


if __name__ == "__main__":
    main()
