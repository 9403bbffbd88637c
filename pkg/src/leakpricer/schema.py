"""Protected-profile schemas, sample ingestion, and discretization.

A schema declares an ordered list of protected attributes plus one
observable. Attributes are either categorical with a fixed level set or
continuous with finite closed bounds. Samples are validated row by row
against the schema; discretization maps continuous attributes onto
categorical bins so the exact counting machinery applies downstream.

Binning conventions, fixed once here so results are reproducible:

* equal-width and explicit cuts produce intervals that are left-closed
  and right-open, except the last bin which is closed on both ends;
* the quantile rule assigns values equal to a cut point to the lower
  bin (ties go down);
* bins are labeled ``bin0``, ``bin1``, ... in increasing order.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import yaml

from .errors import ParseError, ValidationError

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"

EQUAL_WIDTH = "equal-width"
QUANTILE = "quantile"
EXPLICIT = "explicit"

#: Separator used when level combinations are joined into one label.
LABEL_SEP = "+"


@dataclass(frozen=True)
class AttributeSpec:
    """One attribute: categorical with fixed levels, or bounded continuous."""

    name: str
    kind: str
    levels: tuple[str, ...] = ()
    lower: float = math.nan
    upper: float = math.nan

    def __post_init__(self) -> None:
        if not str(self.name).strip():
            raise ValidationError("attribute name must be non-empty")
        if self.kind == CATEGORICAL:
            levels = tuple(str(v) for v in self.levels)
            object.__setattr__(self, "levels", levels)
            if not levels:
                raise ValidationError(
                    f"{self.name}: categorical attribute needs at least one level"
                )
            if len(set(levels)) != len(levels):
                raise ValidationError(f"{self.name}: levels must be pairwise distinct")
        elif self.kind == CONTINUOUS:
            if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
                raise ValidationError(
                    f"{self.name}: continuous attribute needs finite bounds"
                )
            if not self.lower < self.upper:
                raise ValidationError(
                    f"{self.name}: lower bound {self.lower} must be below upper bound {self.upper}"
                )
        else:
            raise ValidationError(f"{self.name}: unknown attribute kind {self.kind!r}")

    @classmethod
    def categorical(cls, name: str, levels) -> "AttributeSpec":
        return cls(name=name, kind=CATEGORICAL, levels=tuple(levels))

    @classmethod
    def continuous(cls, name: str, lower: float, upper: float) -> "AttributeSpec":
        return cls(name=name, kind=CONTINUOUS, lower=float(lower), upper=float(upper))

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS


@dataclass(frozen=True)
class ProfileSchema:
    """The protected vector (ordered attributes) plus the observable datum."""

    attributes: tuple[AttributeSpec, ...]
    observable: AttributeSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not self.attributes:
            raise ValidationError("schema needs at least one protected attribute")
        names = [a.name for a in self.attributes] + [self.observable.name]
        duplicated = sorted({n for n in names if names.count(n) > 1})
        if duplicated:
            raise ValidationError(
                f"attribute names must be unique; duplicated: {duplicated}"
            )

    @property
    def columns(self) -> tuple[AttributeSpec, ...]:
        """All attributes in canonical order: protected first, observable last."""
        return self.attributes + (self.observable,)

    @property
    def continuous_columns(self) -> tuple[AttributeSpec, ...]:
        return tuple(spec for spec in self.columns if spec.is_continuous)

    def attribute(self, name: str) -> AttributeSpec:
        for spec in self.columns:
            if spec.name == name:
                return spec
        raise ValidationError(f"schema has no attribute named {name!r}")


def build_intersection_labels(schema: ProfileSchema) -> tuple[str, ...]:
    """Joint labels for the full cross-product of protected levels.

    Labels are the per-attribute levels joined with ``+``, enumerated in
    lexicographic order of the schema's attribute order, so their count
    equals the product of the level counts.
    """
    cont = [a.name for a in schema.attributes if a.is_continuous]
    if cont:
        raise ValidationError(
            f"intersection labels need categorical attributes; {cont[0]!r} is continuous"
        )
    pools = [a.levels for a in schema.attributes]
    return tuple(LABEL_SEP.join(combo) for combo in itertools.product(*pools))


@dataclass(frozen=True)
class BinRule:
    """Discretization rule for one continuous attribute."""

    method: str
    bins: int = 0
    cuts: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.method in (EQUAL_WIDTH, QUANTILE):
            if self.bins < 2:
                raise ValidationError(
                    f"{self.method} rule needs at least 2 bins, got {self.bins}"
                )
        elif self.method == EXPLICIT:
            cuts = tuple(float(c) for c in self.cuts)
            object.__setattr__(self, "cuts", cuts)
            if not cuts:
                raise ValidationError("explicit rule needs at least one cut point")
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                raise ValidationError("cut points must be strictly increasing")
        else:
            raise ValidationError(f"unknown binning method {self.method!r}")

    @classmethod
    def equal_width(cls, bins: int) -> "BinRule":
        return cls(method=EQUAL_WIDTH, bins=int(bins))

    @classmethod
    def quantile(cls, bins: int) -> "BinRule":
        return cls(method=QUANTILE, bins=int(bins))

    @classmethod
    def explicit(cls, cuts) -> "BinRule":
        return cls(method=EXPLICIT, cuts=tuple(float(c) for c in cuts))


@dataclass(frozen=True)
class BinningPolicy:
    """Per-attribute binning rules keyed by attribute name."""

    rules: Mapping[str, BinRule] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", dict(self.rules))


@dataclass(frozen=True)
class SampleSet:
    """Validated paired observations, one value per schema column.

    Row values follow :attr:`ProfileSchema.columns` order (protected
    attributes first, observable last). Row order is preserved
    throughout; reported row indices are zero-based data-row positions.
    """

    schema: ProfileSchema
    rows: tuple[tuple, ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValidationError("sample set must contain at least one row")
        specs = self.schema.columns
        for i, row in enumerate(rows):
            if len(row) != len(specs):
                raise ValidationError(
                    f"row {i}: expected {len(specs)} values, got {len(row)}"
                )
            for spec, value in zip(specs, row):
                _check_value(spec, value, i)

    @property
    def n(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        specs = self.schema.columns
        for j, spec in enumerate(specs):
            if spec.name == name:
                return [row[j] for row in self.rows]
        raise ValidationError(f"sample set has no column named {name!r}")


def _check_value(spec: AttributeSpec, value, row: int) -> None:
    if spec.is_continuous:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(
                f"row {row}, attribute {spec.name!r}: expected a number, got {value!r}"
            )
        v = float(value)
        if not math.isfinite(v):
            raise ValidationError(
                f"row {row}, attribute {spec.name!r}: value must be finite, got {value!r}"
            )
        # bounds are closed: both endpoints are legal values
        if not spec.lower <= v <= spec.upper:
            raise ValidationError(
                f"row {row}, attribute {spec.name!r}: value {v} outside "
                f"bounds [{spec.lower}, {spec.upper}]"
            )
    else:
        if value not in spec.levels:
            raise ValidationError(
                f"row {row}, attribute {spec.name!r}: value {value!r} is not "
                f"a declared level {list(spec.levels)}"
            )


def discretize(samples: SampleSet, policy: BinningPolicy) -> SampleSet:
    """Replace every continuous attribute with categorical bins.

    Deterministic: the same samples and policy always give the same
    binning, and both sample count and row order are preserved.
    """
    schema = samples.schema
    continuous = schema.continuous_columns
    missing = [spec.name for spec in continuous if spec.name not in policy.rules]
    if missing:
        raise ValidationError(
            f"no binning rule for continuous attribute {missing[0]!r}"
        )
    replaced: dict[str, AttributeSpec] = {}
    assigned: dict[str, list[str]] = {}
    for spec in continuous:
        rule = policy.rules[spec.name]
        values = np.asarray(samples.column(spec.name), dtype=float)
        cuts, side = _resolve_cuts(spec, rule, values)
        labels = tuple(f"bin{i}" for i in range(len(cuts) + 1))
        idx = np.searchsorted(cuts, values, side=side)
        replaced[spec.name] = AttributeSpec.categorical(spec.name, labels)
        assigned[spec.name] = [labels[i] for i in idx]

    new_columns = tuple(replaced.get(spec.name, spec) for spec in schema.columns)
    new_schema = ProfileSchema(attributes=new_columns[:-1], observable=new_columns[-1])
    new_rows = []
    for i, row in enumerate(samples.rows):
        new_rows.append(
            tuple(
                assigned[spec.name][i] if spec.name in assigned else value
                for spec, value in zip(schema.columns, row)
            )
        )
    return SampleSet(new_schema, tuple(new_rows))


def _resolve_cuts(
    spec: AttributeSpec, rule: BinRule, values: np.ndarray
) -> tuple[np.ndarray, str]:
    """Interior cut points plus the searchsorted side implementing the tie rule."""
    if rule.method == EQUAL_WIDTH:
        width = (spec.upper - spec.lower) / rule.bins
        cuts = np.array([spec.lower + i * width for i in range(1, rule.bins)])
        return cuts, "right"
    if rule.method == EXPLICIT:
        cuts = np.asarray(rule.cuts, dtype=float)
        outside = [c for c in rule.cuts if not spec.lower < c < spec.upper]
        if outside:
            raise ValidationError(
                f"{spec.name}: cut point {outside[0]} not strictly inside "
                f"bounds ({spec.lower}, {spec.upper})"
            )
        return cuts, "right"
    # quantile: ties at a cut point fall into the lower bin, hence side="left"
    distinct = np.unique(values).size
    if rule.bins > distinct:
        raise ValidationError(
            f"{spec.name}: quantile rule with {rule.bins} bins exceeds "
            f"{distinct} distinct values"
        )
    qs = [i / rule.bins for i in range(1, rule.bins)]
    cuts = np.quantile(values, qs)
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValidationError(
            f"{spec.name}: quantile cut points are not distinct; "
            "reduce the bin count"
        )
    return cuts, "left"


# ---------------------------------------------------------------------------
# file formats


def load_schema(path) -> ProfileSchema:
    """Read a schema document (YAML, of which JSON is a subset).

    Expected shape::

        attributes:
          - name: sex
            kind: categorical
            levels: [male, female]
          - name: impairment
            kind: continuous
            range: [0.0, 1.0]
        observable:
          name: keystroke_interval
          kind: continuous
          range: [50.0, 400.0]
    """
    doc = load_yaml_doc(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: schema document must be a mapping")
    unknown = set(doc) - {"attributes", "observable"}
    if unknown:
        raise ValidationError(f"{path}: unknown schema key {sorted(unknown)[0]!r}")
    raw_attrs = doc.get("attributes")
    if not isinstance(raw_attrs, list) or not raw_attrs:
        raise ValidationError(f"{path}: 'attributes' must be a non-empty list")
    if "observable" not in doc:
        raise ValidationError(f"{path}: schema must declare an 'observable'")
    attributes = tuple(_parse_attribute(entry, path) for entry in raw_attrs)
    observable = _parse_attribute(doc["observable"], path)
    return ProfileSchema(attributes=attributes, observable=observable)


def _parse_attribute(entry, path) -> AttributeSpec:
    if not isinstance(entry, dict):
        raise ValidationError(f"{path}: attribute entry must be a mapping, got {entry!r}")
    unknown = set(entry) - {"name", "kind", "levels", "range"}
    if unknown:
        raise ValidationError(f"{path}: unknown attribute key {sorted(unknown)[0]!r}")
    name = entry.get("name")
    kind = entry.get("kind")
    if not name or not kind:
        raise ValidationError(f"{path}: attribute entry needs 'name' and 'kind'")
    if kind == CATEGORICAL:
        levels = entry.get("levels")
        if not isinstance(levels, list) or not levels:
            raise ValidationError(
                f"{path}: categorical attribute {name!r} needs a non-empty 'levels' list"
            )
        return AttributeSpec.categorical(name, [str(v) for v in levels])
    if kind == CONTINUOUS:
        bounds = entry.get("range")
        if not isinstance(bounds, list) or len(bounds) != 2:
            raise ValidationError(
                f"{path}: continuous attribute {name!r} needs 'range: [lower, upper]'"
            )
        try:
            lower, upper = float(bounds[0]), float(bounds[1])
        except (TypeError, ValueError):
            raise ValidationError(
                f"{path}: non-numeric range for attribute {name!r}: {bounds!r}"
            ) from None
        return AttributeSpec.continuous(name, lower, upper)
    raise ValidationError(f"{path}: attribute {name!r} has unknown kind {kind!r}")


def load_yaml_doc(path):
    """Read a YAML document (JSON included), mapping failures to ParseError."""
    p = Path(path)
    if not p.exists():
        raise ParseError(f"{p}: no such file")
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{p}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{p}: invalid document: {exc}") from None
    if doc is None:
        raise ParseError(f"{p}: empty document")
    return doc


def load_samples(path, schema: ProfileSchema) -> SampleSet:
    """Read a delimited sample file with a header row naming the columns.

    Columns are bound by name against the schema; file column order is
    irrelevant. Every schema column must be present, every header must
    be declared, and every cell must parse and validate.
    """
    p = Path(path)
    if not p.exists():
        raise ParseError(f"{p}: no such file")
    with open(p, newline="", encoding="utf-8") as fh:
        raw = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if not raw:
        raise ParseError(f"{p}: empty sample file")
    header = [h.strip() for h in raw[0]]
    if len(set(header)) != len(header):
        raise ValidationError(f"{p}: duplicate column in header")
    declared = [spec.name for spec in schema.columns]
    unknown = [h for h in header if h not in declared]
    if unknown:
        raise ValidationError(f"{p}: unknown column {unknown[0]!r}")
    missing = [n for n in declared if n not in header]
    if missing:
        raise ValidationError(f"{p}: missing column {missing[0]!r}")
    position = {name: header.index(name) for name in declared}
    specs = schema.columns
    rows = []
    for lineno, row in enumerate(raw[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"{p}:{lineno}: expected {len(header)} cells, got {len(row)}"
            )
        values = []
        for spec in specs:
            cell = row[position[spec.name]].strip()
            if spec.is_continuous:
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{p}:{lineno}: non-numeric value {cell!r} "
                        f"for attribute {spec.name!r}"
                    ) from None
            else:
                values.append(cell)
        rows.append(tuple(values))
    if not rows:
        raise ParseError(f"{p}: sample file has a header but no data rows")
    try:
        return SampleSet(schema, tuple(rows))
    except ValidationError as exc:
        raise ValidationError(f"{p}: {exc}") from None


def samples_to_csv(samples: SampleSet) -> str:
    """Render a sample set back to delimited text in schema column order."""
    specs = samples.schema.columns
    lines = [",".join(spec.name for spec in specs)]
    for row in samples.rows:
        cells = [
            repr(float(v)) if spec.is_continuous else str(v)
            for spec, v in zip(specs, row)
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
