#!/usr/bin/env python3
"""Regenerate the bundled fixtures under fixtures/.

Everything is written in canonical form so on-disk bytes equal
parse-then-serialize output. Expected spec files are spelled out literally
here, not produced by the engine, so tests compare against an independent
statement of intent. The script exits nonzero if any template fails lint or
any written spec fails schema validation.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ivyengine import canonical  # noqa: E402
from ivyengine.formats import parse_template, serialize_template  # noqa: E402
from ivyengine.languages import bundled_registry  # noqa: E402
from ivyengine.model import lint_template  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

VL5 = "https://vega.github.io/schema/vega-lite/v5.json"
VEGA5 = "https://vega.github.io/schema/vega/v5.json"
POPULATION_URL = "data/population.json"


def write(rel: str, value) -> Path:
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(canonical.dump_bytes(value))
    return path


# --- templates -----------------------------------------------------------------

AGGREGATE_BAR_CHART = {
    "name": "aggregate-bar-chart",
    "description": "Horizontal bar chart summing a measure per category, "
    "with a decennial-year filter, optional sorting, and configurable bar color.",
    "language": "vega-lite",
    "params": [
        {
            "name": "xDim",
            "type": "DataTarget",
            "config": {"allowedRoles": ["Dimension", "Measure"], "required": True},
        },
        {
            "name": "yDim",
            "type": "DataTarget",
            "config": {"allowedRoles": ["Measure"], "required": True},
        },
        {
            "name": "year",
            "type": "Number",
            "config": {"min": 1850, "max": 2000, "step": 10},
            "defaultValue": 2000,
        },
        {"name": "sort", "type": "Boolean", "defaultValue": False},
        {"name": "color", "type": "String", "defaultValue": "#4C78A8"},
    ],
    "symbols": [],
    "body": {
        "$schema": VL5,
        "description": "A bar chart showing the US population distribution "
        "of age groups in 2000.",
        "data": {"url": POPULATION_URL},
        "transform": [{"filter": "datum.year == [year]"}],
        "height": {"step": 17},
        "mark": {"type": "bar", "color": "[color]"},
        "encoding": {
            "y": {
                "field": "[xDim]",
                "sort": {"$cond": {"query": "sort == true", "true": "-x"}},
            },
            "x": {"aggregate": "sum", "field": "[yDim]", "title": "population"},
        },
    },
}

SCATTERPLOT = {
    "name": "scatterplot",
    "description": "Scatterplot of two measures, optionally colored by a "
    "category and with an optional log x scale.",
    "language": "vega-lite",
    "params": [
        {
            "name": "x",
            "type": "DataTarget",
            "config": {"allowedRoles": ["Measure"], "required": True},
        },
        {
            "name": "y",
            "type": "DataTarget",
            "config": {"allowedRoles": ["Measure"], "required": True},
        },
        {
            "name": "colorBy",
            "type": "DataTarget",
            "config": {"allowedRoles": ["Dimension"]},
        },
        {"name": "logScale", "type": "Boolean", "defaultValue": False},
    ],
    "symbols": [],
    "body": {
        "$schema": VL5,
        "description": "A scatterplot of two measures.",
        "data": {"url": POPULATION_URL},
        "mark": "point",
        "encoding": {
            "x": {
                "field": "[x]",
                "type": "quantitative",
                "scale": {
                    "$cond": {"query": "logScale == true", "true": {"type": "log"}}
                },
            },
            "y": {"field": "[y]", "type": "quantitative"},
            "color": {
                "$cond": {
                    "query": "colorBy != null",
                    "true": {"field": "[colorBy]", "type": "nominal"},
                }
            },
        },
    },
}

DATA_TABLE = {
    "name": "data-table",
    "description": "Plain table over chosen columns; rows are injected from "
    "the active dataset.",
    "language": "table",
    "params": [
        {"name": "heading", "type": "Section", "config": {"label": "Table options"}},
        {
            "name": "columns",
            "type": "MultiDataTarget",
            "config": {
                "allowedRoles": ["Measure", "Dimension", "Time"],
                "required": True,
                "minCount": 1,
            },
        },
        {
            "name": "maxRows",
            "type": "Number",
            "config": {"min": 1, "max": 1000, "step": 1},
            "defaultValue": 50,
        },
    ],
    "symbols": [],
    "body": {
        "columns": "[columns]",
        "limit": "[maxRows]",
        "title": "Table of [columns]",
    },
}

# --- settings ---------------------------------------------------------------------

POPULATION_SETTINGS = {"xDim": "age", "yDim": "people", "year": 2000, "sort": False}
POPULATION_SORTED_SETTINGS = {"xDim": "age", "yDim": "people", "year": 2000, "sort": True}
SCATTER_SETTINGS = {"x": "year", "y": "people", "colorBy": "sex"}
TABLE_SETTINGS = {"columns": ["year", "people"], "maxRows": 10}

# --- expected specs (hand-written, the ground truth the engine must hit) -----------

POPULATION_SPEC = {
    "$schema": VL5,
    "description": "A bar chart showing the US population distribution "
    "of age groups in 2000.",
    "data": {"url": POPULATION_URL},
    "transform": [{"filter": "datum.year == 2000"}],
    "height": {"step": 17},
    "mark": {"type": "bar", "color": "#4C78A8"},
    "encoding": {
        "y": {"field": "age"},
        "x": {"aggregate": "sum", "field": "people", "title": "population"},
    },
}

POPULATION_SORTED_SPEC = {
    "$schema": VL5,
    "description": "A bar chart showing the US population distribution "
    "of age groups in 2000.",
    "data": {"url": POPULATION_URL},
    "transform": [{"filter": "datum.year == 2000"}],
    "height": {"step": 17},
    "mark": {"type": "bar", "color": "#4C78A8"},
    "encoding": {
        "y": {"field": "age", "sort": "-x"},
        "x": {"aggregate": "sum", "field": "people", "title": "population"},
    },
}

SCATTER_SPEC = {
    "$schema": VL5,
    "description": "A scatterplot of two measures.",
    "data": {"url": POPULATION_URL},
    "mark": "point",
    "encoding": {
        "x": {"field": "year", "type": "quantitative"},
        "y": {"field": "people", "type": "quantitative"},
        "color": {"field": "sex", "type": "nominal"},
    },
}

TABLE_SPEC = {
    "columns": ["year", "people"],
    "limit": 10,
    "title": "Table of year,people",
}

EXCLUDED_SPEC = {
    "$schema": VL5,
    "description": "Joined census and geography view; needs two tables.",
    "datasets": {
        "census": [{"year": 2000, "people": 281421906}],
        "regions": [{"id": 1, "name": "Northeast"}],
    },
    "data": {"name": "census"},
    "transform": [
        {
            "lookup": "id",
            "from": {"data": {"name": "regions"}, "key": "id", "fields": ["name"]},
        }
    ],
    "mark": "bar",
    "encoding": {"x": {"field": "year"}, "y": {"field": "people"}},
}

# --- corpus: raw Vega-Lite specs over the population columns ------------------------

def _vl(mark, encoding, extra=None):
    spec = {
        "$schema": VL5,
        "data": {"url": POPULATION_URL},
        "mark": mark,
        "encoding": encoding,
    }
    if extra:
        spec.update(extra)
    return spec


CORPUS = {
    "bar-people-by-age.vl.json": _vl(
        "bar",
        {
            "x": {"field": "age", "type": "ordinal"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
    ),
    "bar-horizontal.vl.json": _vl(
        "bar",
        {
            "y": {"field": "sex", "type": "nominal"},
            "x": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
        {"height": 120},
    ),
    "bar-grouped.vl.json": _vl(
        "bar",
        {
            "x": {"field": "age", "type": "ordinal"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
            "xOffset": {"field": "sex"},
            "color": {"field": "sex", "type": "nominal"},
        },
    ),
    "bar-stacked.vl.json": _vl(
        "bar",
        {
            "x": {"field": "year", "type": "ordinal"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
            "color": {
                "field": "sex",
                "type": "nominal",
                "scale": {"scheme": "category10"},
            },
        },
    ),
    "bar-normalized.vl.json": _vl(
        "bar",
        {
            "x": {"field": "year", "type": "ordinal"},
            "y": {
                "aggregate": "sum",
                "field": "people",
                "type": "quantitative",
                "stack": "normalize",
            },
            "color": {"field": "sex", "type": "nominal"},
        },
    ),
    "line-people-by-year.vl.json": _vl(
        "line",
        {
            "x": {"field": "year", "type": "quantitative"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
        {"width": 400},
    ),
    "line-by-sex.vl.json": _vl(
        "line",
        {
            "x": {"field": "year", "type": "quantitative"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
            "color": {"field": "sex", "type": "nominal"},
        },
    ),
    "area-people.vl.json": _vl(
        "area",
        {
            "x": {"field": "year", "type": "quantitative"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
        {"width": 300, "height": 200},
    ),
    "area-stacked.vl.json": _vl(
        "area",
        {
            "x": {"field": "year", "type": "quantitative"},
            "y": {"aggregate": "sum", "field": "people", "type": "quantitative"},
            "color": {"field": "age", "type": "ordinal"},
        },
    ),
    "point-age-people.vl.json": _vl(
        "point",
        {
            "x": {"field": "age", "type": "quantitative"},
            "y": {"field": "people", "type": "quantitative"},
        },
    ),
    "point-colored.vl.json": _vl(
        "point",
        {
            "x": {"field": "age", "type": "quantitative"},
            "y": {"field": "people", "type": "quantitative"},
            "color": {
                "field": "sex",
                "type": "nominal",
                "scale": {"scheme": "tableau10"},
            },
        },
    ),
    "point-sized.vl.json": _vl(
        "point",
        {
            "x": {"field": "year", "type": "ordinal"},
            "y": {"field": "age", "type": "quantitative"},
            "size": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
    ),
    "tick-distribution.vl.json": _vl(
        "tick",
        {
            "x": {"field": "people", "type": "quantitative"},
            "y": {"field": "sex", "type": "nominal"},
        },
    ),
    "circle-bubble.vl.json": _vl(
        "circle",
        {
            "x": {"field": "age", "type": "quantitative"},
            "y": {"field": "people", "type": "quantitative"},
            "size": {"field": "people", "type": "quantitative"},
        },
        {"title": "Population [1850-2000]"},
    ),
    "rect-heatmap.vl.json": _vl(
        "rect",
        {
            "x": {"field": "year", "type": "ordinal"},
            "y": {"field": "age", "type": "ordinal"},
            "color": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
    ),
    "boxplot-by-age.vl.json": _vl(
        "boxplot",
        {
            "x": {"field": "age", "type": "ordinal"},
            "y": {"field": "people", "type": "quantitative"},
        },
    ),
    "histogram-people.vl.json": _vl(
        "bar",
        {
            "x": {"bin": True, "field": "people", "type": "quantitative"},
            "y": {"aggregate": "count", "type": "quantitative"},
        },
    ),
    "strip-age.vl.json": _vl(
        "tick",
        {"x": {"field": "age", "type": "quantitative"}},
        {"width": 400, "height": 60},
    ),
    "text-labels.vl.json": _vl(
        "text",
        {
            "x": {"field": "age", "type": "quantitative"},
            "y": {"field": "people", "type": "quantitative"},
            "text": {"field": "sex", "type": "nominal"},
        },
    ),
    "square-matrix.vl.json": _vl(
        "square",
        {
            "x": {"field": "year", "type": "ordinal"},
            "y": {"field": "sex", "type": "nominal"},
            "size": {"aggregate": "sum", "field": "people", "type": "quantitative"},
        },
    ),
    "bar-window.vl.json": _vl(
        "bar",
        {
            "x": {"field": "age", "type": "ordinal"},
            "y": {"field": "people", "type": "quantitative"},
        },
        {"transform": [{"filter": "datum.year == 2000"}], "width": 350},
    ),
    "line-point-overlay.vl.json": _vl(
        {"type": "line", "point": True},
        {
            "x": {"field": "year", "type": "quantitative"},
            "y": {"aggregate": "mean", "field": "people", "type": "quantitative"},
        },
    ),
}

VEGA_BAR = {
    "$schema": VEGA5,
    "width": 400,
    "height": 200,
    "padding": 5,
    "data": [
        {
            "name": "table",
            "url": "data/population.csv",
            "format": {"type": "csv"},
        }
    ],
    "scales": [
        {
            "name": "xscale",
            "type": "band",
            "domain": {"data": "table", "field": "age"},
            "range": "width",
            "padding": 0.05,
        },
        {
            "name": "yscale",
            "domain": {"data": "table", "field": "people"},
            "nice": True,
            "range": "height",
        },
    ],
    "axes": [
        {"orient": "bottom", "scale": "xscale"},
        {"orient": "left", "scale": "yscale"},
    ],
    "marks": [
        {
            "type": "rect",
            "from": {"data": "table"},
            "encode": {
                "enter": {
                    "x": {"scale": "xscale", "field": "age"},
                    "width": {"scale": "xscale", "band": 1},
                    "y": {"scale": "yscale", "field": "people"},
                    "y2": {"scale": "yscale", "value": 0},
                }
            },
        }
    ],
}

POPULATION_CSV = """year,age,sex,people
1990,0,male,9307465
1990,0,female,8894007
1990,20,male,9392013
1990,20,female,9057187
1990,40,male,8963229
1990,40,female,9170218
1990,60,male,4945333
1990,60,female,5587042
1990,80,male,1069673
1990,80,female,2087560
2000,0,male,9735380
2000,0,female,9310714
2000,20,male,9938059
2000,20,female,9548249
2000,40,male,10604510
2000,40,female,10857874
2000,60,male,5499572
2000,60,female,6110117
2000,80,male,1524940
2000,80,female,2567034
"""

MANIFEST = {
    "examples": [
        {
            "id": "population-by-age",
            "spec": "specs/population-by-age.vl.json",
            "coveredBy": "aggregate-bar-chart",
            "settings": "settings/population-by-age.settings.json",
        },
        {
            "id": "population-by-age-sorted",
            "spec": "specs/population-by-age-sorted.vl.json",
            "coveredBy": "aggregate-bar-chart",
            "settings": "settings/population-by-age-sorted.settings.json",
        },
        {
            "id": "people-vs-year-scatter",
            "spec": "specs/scatter-people-year.vl.json",
            "coveredBy": "scatterplot",
            "settings": "settings/scatter-people-year.settings.json",
        },
        {
            "id": "population-table",
            "spec": "specs/population-table.table.json",
            "coveredBy": "data-table",
            "settings": "settings/population-table.settings.json",
        },
        {
            "id": "linked-census-dashboard",
            "spec": "specs/excluded-multisource.vl.json",
            "coveredBy": "excluded",
            "reason": "multiple data sources",
        },
    ],
    "templates": [
        "templates/aggregate-bar-chart.ivy.json",
        "templates/scatterplot.ivy.json",
        "templates/data-table.ivy.json",
    ],
    "metadata": {
        "reportedCounts": {"nExamples": 166, "nExcluded": 14, "nTemplates": 43}
    },
}


def main() -> int:
    registry = bundled_registry()
    failures = 0

    for rel, doc in [
        ("templates/aggregate-bar-chart.ivy.json", AGGREGATE_BAR_CHART),
        ("templates/scatterplot.ivy.json", SCATTERPLOT),
        ("templates/data-table.ivy.json", DATA_TABLE),
    ]:
        # store the canonical serialized form so byte-level round-trips hold
        template = parse_template(canonical.dump_bytes(doc))
        path = ROOT / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(serialize_template(template))
        diagnostics = lint_template(parse_template(path.read_bytes()))
        if diagnostics:
            failures += 1
            print(f"LINT {rel}: {diagnostics}", file=sys.stderr)

    write("settings/population-by-age.settings.json", POPULATION_SETTINGS)
    write("settings/population-by-age-sorted.settings.json", POPULATION_SORTED_SETTINGS)
    write("settings/scatter-people-year.settings.json", SCATTER_SETTINGS)
    write("settings/population-table.settings.json", TABLE_SETTINGS)

    for rel, spec, language in [
        ("specs/population-by-age.vl.json", POPULATION_SPEC, "vega-lite"),
        ("specs/population-by-age-sorted.vl.json", POPULATION_SORTED_SPEC, "vega-lite"),
        ("specs/scatter-people-year.vl.json", SCATTER_SPEC, "vega-lite"),
        ("specs/population-table.table.json", TABLE_SPEC, "table"),
        ("specs/excluded-multisource.vl.json", EXCLUDED_SPEC, "vega-lite"),
    ]:
        write(rel, spec)
        issues = registry.validate_spec(language, spec)
        if issues:
            failures += 1
            print(f"SCHEMA {rel}: {issues[:2]}", file=sys.stderr)

    for name, spec in CORPUS.items():
        write(f"corpus/{name}", spec)
        issues = registry.validate_spec("vega-lite", spec)
        if issues:
            failures += 1
            print(f"SCHEMA corpus/{name}: {issues[:2]}", file=sys.stderr)

    write("corpus/vega-bar.vg.json", VEGA_BAR)
    issues = registry.validate_spec("vega", VEGA_BAR)
    if issues:
        failures += 1
        print(f"SCHEMA corpus/vega-bar.vg.json: {issues[:2]}", file=sys.stderr)

    (ROOT / "data").mkdir(parents=True, exist_ok=True)
    (ROOT / "data/population.csv").write_text(POPULATION_CSV, "utf-8")

    write("manifest.json", MANIFEST)

    total = len(CORPUS) + 1
    print(f"wrote fixtures ({total} corpus specs); failures: {failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
