"""Mutual-information estimation from paired samples.

Two routes share one result type:

* all-categorical data goes through exact plug-in frequency counts over
  the declared level cross-product (:func:`empirical_joint`);
* data with continuous attributes goes through kernel density
  estimation with Gaussian product kernels and a resubstitution Monte
  Carlo average of the log density ratio
  (:func:`mc_mutual_information`).

The resubstitution average evaluates densities at the training points
themselves. That makes the estimate mildly optimistic for small n; the
bias is documented rather than corrected, and it shrinks as n grows.

Kernel evaluation builds n x n matrices, so cost is quadratic in the
sample count. All reductions are vectorized with a fixed summation
order: results are independent of parallelism and chunking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EstimationError, ValidationError
from .infotheory import NATS, InfoQuantity, JointTable, mutual_information
from .schema import LABEL_SEP, SampleSet, build_intersection_labels

PLUGIN = "plug-in-counts"
KDE_MC = "kde-monte-carlo"

#: log densities are floored here; exp(-745) sits just above double underflow.
LOG_FLOOR = -745.0

_SQRT_TAU = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Bandwidth:
    """Gaussian kernel width for one continuous attribute, in data units."""

    width: float

    def __post_init__(self) -> None:
        width = float(self.width)
        object.__setattr__(self, "width", width)
        if not (math.isfinite(width) and width > 0):
            raise ValidationError(f"bandwidth must be a positive real, got {width!r}")


def silverman_bandwidth(values) -> Bandwidth:
    """Gaussian reference rule: 1.06 * sample std (ddof=1) * n^(-1/5)."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < 2:
        raise ValidationError("bandwidth selection needs at least two values")
    sigma = float(arr.std(ddof=1))
    if sigma == 0.0:
        raise ValidationError(
            "all values are identical; bandwidth undefined for zero variance"
        )
    return Bandwidth(1.06 * sigma * arr.size ** (-1.0 / 5.0))


@dataclass(frozen=True)
class MIEstimate:
    """An estimated leakage plus the provenance needed to reproduce it.

    ``value`` is clamped at zero; ``raw_nats`` keeps the pre-clamp
    estimate for diagnostics. ``bandwidths`` maps continuous attribute
    names to the kernel widths actually used (None for the plug-in
    route), and ``seed`` records the requested seed (None likewise).
    """

    value: InfoQuantity
    n: int
    method: str
    seed: int | None = None
    raw_nats: float = 0.0
    bandwidths: dict[str, float] | None = None

    def __post_init__(self) -> None:
        if self.method not in (PLUGIN, KDE_MC):
            raise ValidationError(f"unknown estimation method {self.method!r}")
        if self.n < 1:
            raise ValidationError("estimate needs a positive sample count")


def empirical_joint(samples: SampleSet) -> JointTable:
    """Frequency-count joint table over the declared level cross-product.

    Cells for unobserved level combinations are zero, never dropped, so
    the table shape depends only on the schema.
    """
    schema = samples.schema
    continuous = schema.continuous_columns
    if continuous:
        raise ValidationError(
            f"plug-in counting needs all-categorical data; "
            f"{continuous[0].name!r} is continuous (discretize first)"
        )
    s_labels = build_intersection_labels(schema)
    x_levels = schema.observable.levels
    row_of = {level: i for i, level in enumerate(x_levels)}
    col_of = {label: j for j, label in enumerate(s_labels)}
    counts = np.zeros((len(x_levels), len(s_labels)))
    for row in samples.rows:
        s_label = LABEL_SEP.join(row[:-1])
        counts[row_of[row[-1]], col_of[s_label]] += 1.0
    return JointTable(x_levels, s_labels, counts / samples.n)


class LogDensities(NamedTuple):
    """Per-sample resubstitution log densities, aligned with row order."""

    joint: np.ndarray
    x: np.ndarray
    s: np.ndarray


def kde_log_densities(
    samples: SampleSet,
    bandwidths: dict[str, Bandwidth],
    *,
    allow_pure_categorical: bool = False,
) -> LogDensities:
    """log p(x_i, s_i), log p(x_i), log p(s_i) at every sample point.

    Each continuous dimension contributes a Gaussian kernel factor with
    its own bandwidth; each categorical dimension contributes an exact
    indicator match. Marginal densities reuse the same kernel
    assignments restricted to the relevant dimensions, never a refit.

    A joint density that underflows to zero is an error naming the
    first offending sample; marginals are floored at
    :data:`LOG_FLOOR` with a warning.

    Pure categorical data is better served by :func:`empirical_joint`;
    pass ``allow_pure_categorical=True`` to force kernel evaluation
    anyway (indicator kernels make the two routes agree).
    """
    schema = samples.schema
    if samples.n < 2:
        raise ValidationError("kernel density estimation needs at least two samples")
    continuous = schema.continuous_columns
    if not continuous and not allow_pure_categorical:
        raise ValidationError(
            "all attributes are categorical; use plug-in counting, or pass "
            "allow_pure_categorical=True to force kernel evaluation"
        )
    missing = [spec.name for spec in continuous if spec.name not in bandwidths]
    if missing:
        raise ValidationError(
            f"missing bandwidth for continuous attribute {missing[0]!r}"
        )

    s_product = _group_kernel_product(samples, samples.schema.attributes, bandwidths)
    x_product = _group_kernel_product(samples, (schema.observable,), bandwidths)
    joint_product = s_product * x_product

    joint_log = _log_density(joint_product.mean(axis=1), "joint")
    x_log = _log_density(x_product.mean(axis=1), "x marginal")
    s_log = _log_density(s_product.mean(axis=1), "s marginal")
    return LogDensities(joint=joint_log, x=x_log, s=s_log)


def _group_kernel_product(samples, specs, bandwidths) -> np.ndarray:
    """Entry (i, j) holds the product over the group's dimensions of the
    kernel between sample i and sample j."""
    product: np.ndarray | None = None
    for spec in specs:
        column = samples.column(spec.name)
        if spec.is_continuous:
            v = np.asarray(column, dtype=float)
            h = bandwidths[spec.name].width
            z = (v[:, None] - v[None, :]) / h
            factor = np.exp(-0.5 * z * z) / (h * _SQRT_TAU)
        else:
            codes = np.asarray([spec.levels.index(c) for c in column])
            factor = (codes[:, None] == codes[None, :]).astype(float)
        product = factor if product is None else product * factor
    assert product is not None
    return product


def _log_density(density: np.ndarray, kind: str) -> np.ndarray:
    with np.errstate(divide="ignore"):
        logs = np.log(density)
    floored = logs < LOG_FLOOR
    if not floored.any():
        return logs
    if kind == "joint":
        index = int(np.nonzero(floored)[0][0])
        raise EstimationError(
            f"joint density underflowed at sample index {index}; "
            "the bandwidth is too small for this data"
        )
    warnings.warn(
        f"{int(floored.sum())} {kind} densities floored at exp({LOG_FLOOR:g})",
        RuntimeWarning,
        stacklevel=3,
    )
    return np.where(floored, LOG_FLOOR, logs)


def mc_mutual_information(
    samples: SampleSet,
    bandwidths: dict[str, Bandwidth],
    seed: int = 0,
    *,
    allow_pure_categorical: bool = False,
) -> MIEstimate:
    """Resubstitution Monte Carlo estimate of I(X; S) in nats.

    The average always runs over the full sample in row order, so the
    value is deterministic and seed-independent; the seed is recorded
    purely as provenance for pipelines that generated the data from it.
    """
    densities = kde_log_densities(
        samples, bandwidths, allow_pure_categorical=allow_pure_categorical
    )
    raw = float(np.mean(densities.joint - densities.x - densities.s))
    widths = {
        spec.name: bandwidths[spec.name].width
        for spec in samples.schema.continuous_columns
    }
    return MIEstimate(
        value=InfoQuantity(max(raw, 0.0), NATS),
        n=samples.n,
        method=KDE_MC,
        seed=int(seed),
        raw_nats=raw,
        bandwidths=widths,
    )


def estimate_mi(
    samples: SampleSet,
    bandwidths: dict[str, Bandwidth] | None = None,
    seed: int = 0,
    method: str | None = None,
) -> MIEstimate:
    """Estimate leakage, routing by schema: exact counts when every
    attribute is categorical, kernel Monte Carlo otherwise.

    Bandwidths left unspecified for continuous attributes fall back to
    :func:`silverman_bandwidth` on that attribute's sample column.
    """
    continuous = samples.schema.continuous_columns
    if method is None:
        method = KDE_MC if continuous else PLUGIN
    if method == PLUGIN:
        if continuous:
            raise ValidationError(
                f"plug-in estimation needs all-categorical data; "
                f"{continuous[0].name!r} is continuous (discretize first)"
            )
        mi = mutual_information(empirical_joint(samples), NATS)
        return MIEstimate(
            value=mi,
            n=samples.n,
            method=PLUGIN,
            seed=None,
            raw_nats=mi.value,
            bandwidths=None,
        )
    if method == KDE_MC:
        widths = dict(bandwidths) if bandwidths else {}
        for spec in continuous:
            if spec.name not in widths:
                widths[spec.name] = silverman_bandwidth(samples.column(spec.name))
        return mc_mutual_information(
            samples, widths, seed=seed, allow_pure_categorical=not continuous
        )
    raise ValidationError(f"unknown estimation method {method!r}")
