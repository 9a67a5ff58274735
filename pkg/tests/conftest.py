"""Shared fixtures: bundled fixture files parsed once per test."""

from __future__ import annotations

import pathlib

import pytest

from ivyengine import canonical, formats
from ivyengine.data import load_dataset

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


def _template(name: str):
    return formats.parse_template((FIXTURES / "templates" / name).read_text())


@pytest.fixture(scope="session")
def bar_template():
    return _template("aggregate-bar-chart.ivy.json")


@pytest.fixture(scope="session")
def scatter_template():
    return _template("scatterplot.ivy.json")


@pytest.fixture(scope="session")
def table_template():
    return _template("data-table.ivy.json")


@pytest.fixture(scope="session")
def population():
    return load_dataset((FIXTURES / "data" / "population.csv").read_bytes(), "csv")


@pytest.fixture(scope="session")
def population_by_age_settings():
    return formats.parse_settings(
        (FIXTURES / "settings" / "population-by-age.settings.json").read_text()
    )


@pytest.fixture(scope="session")
def population_by_age_spec():
    return canonical.loads((FIXTURES / "specs" / "population-by-age.vl.json").read_text())
