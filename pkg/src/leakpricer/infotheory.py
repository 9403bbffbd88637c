"""Exact information measures over finite joint distributions.

Everything here computes in natural-log units; bits are a display
conversion applied at the boundary through :class:`InfoQuantity`. The
central object is a :class:`JointTable` holding P(X, S) with the
observable on rows and the joint protected labels on columns.

Mutual information is computed two ways on every call, as the
Kullback-Leibler form sum p(x,s) log(p(x,s) / (p(x) p(s))) and as the
entropy difference H(S) - H(S|X); the two must agree to 1e-9 or the
table is rejected as inconsistent. Tiny negative results from round-off
are clamped to zero with a diagnostic warning.
"""

from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .schema import LABEL_SEP, ProfileSchema, build_intersection_labels

NATS = "nats"
BITS = "bits"
_UNITS = (NATS, BITS)

LN2 = math.log(2.0)

#: |sum - 1| beyond this rejects a distribution; smaller is renormalized.
SUM_TOLERANCE = 1e-6

#: Renormalization below this deviation happens silently.
_QUIET_RENORM = 1e-9

#: Floating slack inside which negative information is treated as zero.
NEG_CLAMP = 1e-12

#: Required agreement between the two mutual-information formulas.
FORMULA_AGREEMENT = 1e-9

#: Subset reports enumerate 2^m - 1 subsets; refuse beyond this many attributes.
MAX_REPORT_ATTRIBUTES = 12


@dataclass(frozen=True)
class InfoQuantity:
    """A nonnegative amount of information tagged with its unit."""

    value: float
    unit: str

    def __post_init__(self) -> None:
        if self.unit not in _UNITS:
            raise ValidationError(
                f"unknown information unit {self.unit!r}; expected one of {_UNITS}"
            )
        value = float(self.value)
        object.__setattr__(self, "value", value)
        if not math.isfinite(value):
            raise ValidationError(f"information value must be finite, got {value!r}")
        if value < 0:
            raise ValidationError(f"information value must be nonnegative, got {value!r}")

    def in_nats(self) -> float:
        return self.value if self.unit == NATS else self.value * LN2

    def in_bits(self) -> float:
        return self.value if self.unit == BITS else self.value / LN2

    def to(self, unit: str) -> "InfoQuantity":
        if unit not in _UNITS:
            raise ValidationError(
                f"unknown information unit {unit!r}; expected one of {_UNITS}"
            )
        if unit == self.unit:
            return self
        return InfoQuantity(self.in_nats() if unit == NATS else self.in_bits(), unit)


def convert_units(quantity: InfoQuantity, unit: str) -> InfoQuantity:
    """Convert between nats and bits; idempotent when units already match."""
    return quantity.to(unit)


@dataclass(frozen=True)
class JointTable:
    """Finite joint distribution with labeled axes.

    Rows are the observable's levels, columns the joint protected
    labels. Entries must be nonnegative and sum to 1 within
    :data:`SUM_TOLERANCE`; the stored matrix is renormalized to sum to
    exactly 1 and frozen read-only.
    """

    x_levels: tuple[str, ...]
    s_levels: tuple[str, ...]
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        x_levels = tuple(str(v) for v in self.x_levels)
        s_levels = tuple(str(v) for v in self.s_levels)
        object.__setattr__(self, "x_levels", x_levels)
        object.__setattr__(self, "s_levels", s_levels)
        for axis, levels in (("row", x_levels), ("column", s_levels)):
            if not levels:
                raise ValidationError(f"joint table needs at least one {axis} label")
            if len(set(levels)) != len(levels):
                raise ValidationError(f"duplicate {axis} label in joint table")
        p = np.array(self.probabilities, dtype=float)
        if p.shape != (len(x_levels), len(s_levels)):
            raise ValidationError(
                f"probability matrix shape {p.shape} does not match "
                f"{len(x_levels)} rows x {len(s_levels)} columns"
            )
        if not np.all(np.isfinite(p)):
            raise ValidationError("joint table entries must be finite")
        if np.any(p < 0):
            raise ValidationError("joint table entries must be nonnegative")
        total = float(p.sum())
        deviation = abs(total - 1.0)
        if deviation > SUM_TOLERANCE:
            raise ValidationError(
                f"joint table entries sum to {total:.6f}, deviating from 1 "
                f"by more than {SUM_TOLERANCE}"
            )
        if deviation > _QUIET_RENORM:
            warnings.warn(
                f"joint table renormalized; entries summed to {total!r}",
                RuntimeWarning,
                stacklevel=2,
            )
        p /= total
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def x_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def s_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=0)

    def transposed(self) -> "JointTable":
        """The same distribution with the two variables swapped."""
        return JointTable(self.s_levels, self.x_levels, self.probabilities.T)


def _as_distribution(dist) -> np.ndarray:
    arr = np.array(dist, dtype=float).ravel()
    if arr.size == 0:
        raise ValidationError("distribution must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("distribution entries must be finite")
    if np.any(arr < 0):
        raise ValidationError("distribution entries must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValidationError(
            f"distribution sums to {total:.6f}, deviating from 1 "
            f"by more than {SUM_TOLERANCE}"
        )
    return arr / total


def entropy(dist, unit: str = NATS) -> InfoQuantity:
    """Shannon entropy of a probability vector, with 0 log 0 = 0."""
    arr = _as_distribution(dist)
    support = arr[arr > 0]
    # every term of -p log p is nonnegative once p <= 1, so no clamp needed
    value = float(-(support * np.log(support)).sum())
    return InfoQuantity(value, NATS).to(unit)


def conditional_entropy(joint: JointTable, unit: str = NATS) -> InfoQuantity:
    """H(S | X): expected entropy of the columns given the row.

    Rows with zero marginal probability contribute nothing.
    """
    p = joint.probabilities
    px = p.sum(axis=1)
    mask = p > 0
    cells = p[mask]
    px_cells = np.broadcast_to(px[:, None], p.shape)[mask]
    value = float((cells * (np.log(px_cells) - np.log(cells))).sum())
    return InfoQuantity(value, NATS).to(unit)


def mutual_information(joint: JointTable, unit: str = NATS) -> InfoQuantity:
    """I(X; S) between the row and column variables of a joint table.

    Computed both as the KL form and as H(S) - H(S|X); disagreement
    beyond :data:`FORMULA_AGREEMENT` raises. Negative round-off within
    :data:`NEG_CLAMP` is clamped to zero with a warning carrying the
    raw value.
    """
    p = joint.probabilities
    px = p.sum(axis=1)
    ps = p.sum(axis=0)
    mask = p > 0
    cells = p[mask]
    px_cells = np.broadcast_to(px[:, None], p.shape)[mask]
    ps_cells = np.broadcast_to(ps[None, :], p.shape)[mask]
    if np.any(px_cells <= 0) or np.any(ps_cells <= 0):
        raise ValidationError("joint table has a supported cell with zero marginal")
    direct = float((cells * (np.log(cells) - np.log(px_cells) - np.log(ps_cells))).sum())
    difference = entropy(ps, NATS).value - conditional_entropy(joint, NATS).value
    if abs(direct - difference) > FORMULA_AGREEMENT:
        raise ValidationError(
            "mutual-information formulas disagree beyond tolerance: "
            f"KL form {direct!r} vs entropy difference {difference!r}"
        )
    value = direct
    if value < 0:
        if value < -NEG_CLAMP:
            raise ValidationError(
                f"mutual information is negative beyond round-off: {value!r}"
            )
        warnings.warn(
            f"clamped negative round-off mutual information {value!r} to 0",
            RuntimeWarning,
            stacklevel=2,
        )
        value = 0.0
    return InfoQuantity(value, NATS).to(unit)


def exposure_ratio(joint: JointTable) -> float:
    """Leaked fraction of the profile's entropy, I(X;S) / H(S), in [0, 1].

    Unit-free: numerator and denominator share whatever base is used.
    Endpoints are snapped within :data:`NEG_CLAMP` so exact zero and
    exact one survive round-off.
    """
    h_s = entropy(joint.s_marginal(), NATS).value
    if h_s <= 0.0:
        raise ValidationError(
            "profile entropy is zero; exposure ratio undefined "
            "(the prior already determines the profile)"
        )
    ratio = mutual_information(joint, NATS).value / h_s
    if ratio >= 1.0 - NEG_CLAMP:
        return 1.0
    return max(ratio, 0.0)


def marginal_mi(
    joint: JointTable,
    schema: ProfileSchema,
    subset,
    unit: str = NATS,
) -> InfoQuantity:
    """I(X; S_A) for a subset A of protected attributes.

    The joint table's columns must enumerate the schema's full
    intersection labels (see :func:`build_intersection_labels`); columns
    are collapsed by summing over the attributes outside the subset.
    ``subset`` holds attribute indices into ``schema.attributes``.
    """
    indices = sorted(set(int(i) for i in subset))
    if not indices:
        raise ValidationError("attribute subset must not be empty")
    m = len(schema.attributes)
    out_of_range = [i for i in indices if i < 0 or i >= m]
    if out_of_range:
        raise ValidationError(
            f"attribute index {out_of_range[0]} out of range for "
            f"{m} protected attributes"
        )
    expected = build_intersection_labels(schema)
    if tuple(joint.s_levels) != expected:
        raise ValidationError(
            "joint table columns do not match the schema's intersection labels"
        )
    kept_pools = [schema.attributes[i].levels for i in indices]
    kept_combos = list(itertools.product(*kept_pools))
    column_of = {combo: j for j, combo in enumerate(kept_combos)}
    collapsed = np.zeros((len(joint.x_levels), len(kept_combos)))
    all_pools = [a.levels for a in schema.attributes]
    for j, combo in enumerate(itertools.product(*all_pools)):
        key = tuple(combo[i] for i in indices)
        collapsed[:, column_of[key]] += joint.probabilities[:, j]
    labels = tuple(LABEL_SEP.join(combo) for combo in kept_combos)
    return mutual_information(JointTable(joint.x_levels, labels, collapsed), unit)


def subset_key(schema: ProfileSchema, subset) -> str:
    """Canonical name for an attribute subset: names joined with ``+``."""
    indices = sorted(set(int(i) for i in subset))
    return LABEL_SEP.join(schema.attributes[i].name for i in indices)


def intersection_leakage_report(
    joint: JointTable,
    schema: ProfileSchema,
    unit: str = NATS,
) -> dict[str, InfoQuantity]:
    """Leakage for every non-empty attribute subset, keyed by subset name.

    Enumerates all 2^m - 1 subsets, so m is capped at
    :data:`MAX_REPORT_ATTRIBUTES`.
    """
    m = len(schema.attributes)
    if m > MAX_REPORT_ATTRIBUTES:
        raise ValidationError(
            f"leakage report enumerates 2^m subsets; refusing m={m} > "
            f"{MAX_REPORT_ATTRIBUTES} attributes"
        )
    report: dict[str, InfoQuantity] = {}
    for size in range(1, m + 1):
        for combo in itertools.combinations(range(m), size):
            report[subset_key(schema, combo)] = marginal_mi(joint, schema, combo, unit)
    return report


# ---------------------------------------------------------------------------
# file format


def read_joint_table(path) -> JointTable:
    """Read delimited text: header row holds the joint protected labels
    (first cell ignored), each data row holds an observable label then
    probabilities."""
    p = Path(path)
    if not p.exists():
        raise ParseError(f"{p}: no such file")
    with open(p, newline="", encoding="utf-8") as fh:
        raw = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if not raw:
        raise ParseError(f"{p}: empty joint-table file")
    header = raw[0]
    if len(header) < 2:
        raise ParseError(f"{p}: header needs at least one probability column")
    s_levels = tuple(h.strip() for h in header[1:])
    x_levels: list[str] = []
    matrix: list[list[float]] = []
    for lineno, row in enumerate(raw[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"{p}:{lineno}: expected {len(header)} cells, got {len(row)}"
            )
        x_levels.append(row[0].strip())
        try:
            matrix.append([float(cell) for cell in row[1:]])
        except ValueError:
            raise ParseError(f"{p}:{lineno}: non-numeric probability cell") from None
    if not matrix:
        raise ParseError(f"{p}: joint-table file has no data rows")
    return JointTable(tuple(x_levels), s_levels, np.array(matrix))


def write_joint_table(table: JointTable, path) -> None:
    lines = ["x," + ",".join(table.s_levels)]
    for label, row in zip(table.x_levels, table.probabilities):
        lines.append(label + "," + ",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
