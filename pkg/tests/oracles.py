"""Brute-force reference implementations used to cross-check the library.

Everything here is deliberately independent of the package under test
and of numpy: plain Python floats, plain loops, ``math.log``. Slow and
obvious beats fast and clever for an oracle.
"""

from __future__ import annotations

import math

LN2 = math.log(2.0)


def entropy_nats(probs) -> float:
    """-sum p log p over the support, natural log."""
    total = 0.0
    for p in probs:
        if p < 0:
            raise ValueError(f"negative probability {p}")
        if p > 0:
            total -= p * math.log(p)
    return total


def entropy_bits(probs) -> float:
    return entropy_nats(probs) / LN2


def x_marginal(cells) -> list[float]:
    """Row sums of a joint table given as a list of rows."""
    return [sum(row) for row in cells]


def s_marginal(cells) -> list[float]:
    """Column sums of a joint table given as a list of rows."""
    return [sum(row[j] for row in cells) for j in range(len(cells[0]))]


def conditional_entropy_nats(cells) -> float:
    """H(S | X) for rows indexed by x and columns by s."""
    total = 0.0
    for row in cells:
        px = sum(row)
        if px == 0:
            continue
        for p in row:
            if p > 0:
                total += p * (math.log(px) - math.log(p))
    return total


def mi_nats(cells) -> float:
    """I(X;S) in the Kullback-Leibler form, cell by cell."""
    px = x_marginal(cells)
    ps = s_marginal(cells)
    total = 0.0
    for i, row in enumerate(cells):
        for j, p in enumerate(row):
            if p > 0:
                total += p * math.log(p / (px[i] * ps[j]))
    return total


def mi_bits(cells) -> float:
    return mi_nats(cells) / LN2


def collapse_columns(cells, groups) -> list[list[float]]:
    """Merge columns; ``groups`` lists the column indices of each merged
    column. Used to project a joint table onto an attribute subset."""
    return [[sum(row[j] for j in group) for group in groups] for row in cells]


def gaussian_mi_nats(rho: float) -> float:
    """Mutual information of a bivariate normal with correlation rho."""
    return -0.5 * math.log(1.0 - rho * rho)


def gaussian_kernel_density(train, h: float, point: float) -> float:
    """Kernel density estimate at one point, the textbook sum."""
    total = 0.0
    for t in train:
        z = (point - t) / h
        total += math.exp(-0.5 * z * z) / (h * math.sqrt(2.0 * math.pi))
    return total / len(train)


def silverman_h(values) -> float:
    """1.06 * sample standard deviation (ddof=1) * n^(-1/5)."""
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return 1.06 * math.sqrt(var) * n ** (-0.2)


def trapezoid(xs, ys) -> float:
    """Trapezoid quadrature over an ordered grid."""
    total = 0.0
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        total += 0.5 * (y0 + y1) * (x1 - x0)
    return total


# Worked tables kept verbatim in one place so every test file agrees on
# the inputs. Rows are observable levels, columns protected labels.

SINGLE_TABLE = [
    [0.30, 0.10],
    [0.20, 0.40],
]
SINGLE_X = ("morning", "evening")
SINGLE_S = ("male", "female")

INTERSECT_TABLE = [
    [0.25, 0.05, 0.05, 0.05],
    [0.15, 0.05, 0.25, 0.15],
]
INTERSECT_X = ("morning", "evening")
INTERSECT_S = ("male+abled", "male+disabled", "female+abled", "female+disabled")

# column groups projecting INTERSECT_TABLE onto single attributes
SEX_GROUPS = [(0, 1), (2, 3)]
DISABILITY_GROUPS = [(0, 2), (1, 3)]
