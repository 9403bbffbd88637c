#!/usr/bin/env python3
"""Walk the bundled tables through the whole pipeline and print each number.

Covers the single-attribute table, the two-attribute intersection table,
all three pricing rules, rate calibration, and a two-event audit session.
Everything is recomputed from the files under data/, so the output
doubles as a smoke test of an installed copy.
"""

from __future__ import annotations

import argparse
from decimal import Decimal
from pathlib import Path

from leakpricer import (
    BITS,
    InfoQuantity,
    NATS,
    PricingPolicy,
    calibrate_lambda,
    close_session,
    conditional_entropy,
    entropy,
    exposure_ratio,
    intersection_leakage_report,
    load_policy,
    load_schema,
    mutual_information,
    open_session,
    price_exposure,
    price_linear,
    price_weighted,
    quantize_money,
    read_joint_table,
    record_event,
)

DATA = Path(__file__).resolve().parent.parent / "data"


def section(title: str) -> None:
    print()
    print(title)
    print("-" * len(title))


def main() -> None:
    argparse.ArgumentParser(description=__doc__).parse_args()

    section("single attribute: time of day vs sex")
    single = read_joint_table(DATA / "timeofday_sex.csv")
    h_bits = entropy(single.s_marginal(), BITS)
    hc_bits = conditional_entropy(single, BITS)
    mi_bits = mutual_information(single, BITS)
    print(f"H(S)    = {h_bits.value:.6f} bits")
    print(f"H(S|X)  = {hc_bits.value:.6f} bits")
    print(f"I(X;S)  = {mi_bits.value:.6f} bits = {mi_bits.in_nats():.6f} nats")
    print(f"r(X;S)  = {exposure_ratio(single):.6f}")

    section("intersection: sex and disability jointly")
    schema = load_schema(DATA / "profile_schema.yaml")
    joint = read_joint_table(DATA / "timeofday_sex_disability.csv")
    report = intersection_leakage_report(joint, schema)
    for key in ("sex", "disability", "sex+disability"):
        print(f"I(X;{key}) = {report[key].value:.6f} nats")
    print("the joint profile leaks more than either attribute alone")

    section("linear rule: screen-resolution example")
    linear_policy = load_policy(DATA / "policy_linear.yaml")
    quote = price_linear(linear_policy, InfoQuantity(0.036, NATS))
    print(f"leakage   = {quote.leakage.value:.6f} nats")
    print(f"surcharge = {quantize_money(quote.surcharge_component)} USD")
    print(f"total     = {quantize_money(quote.total)} USD")

    section("weighted rule: priced per attribute subset")
    weighted_policy = load_policy(DATA / "policy_weighted.yaml")
    quote = price_weighted(weighted_policy, report)
    print(f"surcharge = {quantize_money(quote.surcharge_component)} USD")

    section("exposure rule: fraction of the statutory ceiling")
    exposure_policy = load_policy(DATA / "policy_exposure.yaml")
    quote = price_exposure(exposure_policy, single)
    print(f"ratio     = {exposure_ratio(single):.6f}")
    print(f"surcharge = {quantize_money(quote.surcharge_component)} USD")

    section("calibration: hit the ceiling exactly at full disclosure")
    rate = calibrate_lambda(Decimal("500000"), InfoQuantity(5.3, NATS))
    print(f"lambda    = {rate:.4f} USD per nat")
    calibrated = PricingPolicy(production_cost=Decimal("0.001"), rate_per_nat=rate)
    quote = price_linear(calibrated, InfoQuantity(0.02, NATS))
    print(f"0.02 nats = {quantize_money(quote.surcharge_component)} USD surcharge")

    section("audit session: two observations, then consent")
    ledger = open_session(calibrated, session_id="worked-example")
    for ts in ("2024-05-01T09:00:00+00:00", "2024-05-01T09:05:00+00:00"):
        record_event(ledger, "request timestamp", InfoQuantity(0.02, NATS), timestamp=ts)
    print(close_session(ledger, "granted").render(), end="")


if __name__ == "__main__":
    main()
