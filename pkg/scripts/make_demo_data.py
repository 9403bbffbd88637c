#!/usr/bin/env python3
"""Regenerate data/keystrokes.csv, the bundled estimation demo sample.

A latent impairment score drives keystroke intervals upward; sex is
independent noise. Fixed seed, so the file is reproducible byte for
byte.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

SEED = 7
N = 300


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "data" / "keystrokes.csv",
    )
    args = parser.parse_args()

    rng = np.random.default_rng(SEED)
    sex = rng.choice(["male", "female"], size=N)
    impairment = rng.beta(2.0, 5.0, size=N)
    # interval rises with impairment; noise keeps the link imperfect
    interval = 120.0 + 250.0 * impairment + rng.normal(0.0, 30.0, size=N)
    interval = np.clip(interval, 20.0, 600.0)

    lines = ["sex,impairment,keystroke_interval"]
    for s, imp, itv in zip(sex, impairment, interval):
        lines.append(f"{s},{imp:.6f},{itv:.4f}")
    args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {N} rows to {args.out}")


if __name__ == "__main__":
    main()
