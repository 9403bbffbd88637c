from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from leakpricer import (
    AttributeSpec,
    JointTable,
    ProfileSchema,
    build_intersection_labels,
)

import oracles


@pytest.fixture
def data_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def single_table() -> JointTable:
    return JointTable(oracles.SINGLE_X, oracles.SINGLE_S, np.array(oracles.SINGLE_TABLE))


@pytest.fixture
def intersect_schema() -> ProfileSchema:
    return ProfileSchema(
        attributes=(
            AttributeSpec.categorical("sex", ["male", "female"]),
            AttributeSpec.categorical("disability", ["abled", "disabled"]),
        ),
        observable=AttributeSpec.categorical("timeofday", ["morning", "evening"]),
    )


@pytest.fixture
def intersect_table(intersect_schema) -> JointTable:
    labels = build_intersection_labels(intersect_schema)
    assert labels == oracles.INTERSECT_S
    return JointTable(oracles.INTERSECT_X, labels, np.array(oracles.INTERSECT_TABLE))


@pytest.fixture
def make_random_table():
    """Random strictly-positive joint tables with labeled axes."""

    def make(rng: np.random.Generator, max_rows: int = 6, max_cols: int = 6) -> JointTable:
        nx = int(rng.integers(2, max_rows + 1))
        ns = int(rng.integers(2, max_cols + 1))
        weights = rng.random((nx, ns)) + 1e-3
        x_levels = tuple(f"x{i}" for i in range(nx))
        s_levels = tuple(f"s{j}" for j in range(ns))
        return JointTable(x_levels, s_levels, weights / weights.sum())

    return make


@pytest.fixture
def make_attribute_table():
    """Random joint tables whose columns span a multi-attribute schema."""

    def make(rng: np.random.Generator, level_counts=(2, 3), nx: int = 3):
        attributes = tuple(
            AttributeSpec.categorical(f"attr{k}", [f"a{k}v{j}" for j in range(count)])
            for k, count in enumerate(level_counts)
        )
        schema = ProfileSchema(
            attributes=attributes,
            observable=AttributeSpec.categorical("obs", [f"x{i}" for i in range(nx)]),
        )
        labels = build_intersection_labels(schema)
        weights = rng.random((nx, len(labels))) + 1e-3
        table = JointTable(
            tuple(schema.observable.levels), labels, weights / weights.sum()
        )
        return table, schema

    return make
