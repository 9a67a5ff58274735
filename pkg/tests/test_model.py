"""Core model: argument validation, lint diagnostics, settings helpers."""

import pytest

from ivyengine.model import (
    Atomic,
    BooleanType,
    Conditional,
    DataRole,
    DataTarget,
    EnumType,
    InterpolatedString,
    MultiDataTarget,
    NumberType,
    ObjectExpr,
    Parameter,
    SectionType,
    Settings,
    StringType,
    Symbol,
    Template,
    TextType,
    VariableRef,
    data_parameters,
    lint_template,
    validate_argument,
)
from ivyengine.predicate import parse as parse_predicate


def make_template(params=(), body=None, symbols=()):
    return Template(
        name="t",
        description="",
        language="table",
        params=tuple(params),
        body=body if body is not None else ObjectExpr({}),
        symbols=tuple(symbols),
    )


class TestValidateArgument:
    def test_enum_member_ok(self):
        p = Parameter("agg", EnumType(("count", "distinct")))
        assert validate_argument(p, "count") is None

    def test_enum_non_member_rejected(self):
        p = Parameter("agg", EnumType(("count", "distinct")))
        v = validate_argument(p, "sum")
        assert v is not None and v.parameter == "agg"

    def test_number_in_range_ok(self):
        p = Parameter("w", NumberType(0, 100, 1))
        assert validate_argument(p, 100) is None

    def test_number_out_of_range_rejected(self):
        p = Parameter("w", NumberType(0, 100, 1))
        v = validate_argument(p, 150)
        assert v is not None and "range" in v.reason

    def test_number_rejects_boolean(self):
        p = Parameter("w", NumberType(0, 100, 1))
        assert validate_argument(p, True) is not None

    def test_multi_target_min_count(self):
        p = Parameter("cols", MultiDataTarget(required=True, min_count=2))
        v = validate_argument(p, ["a"])
        assert v is not None and "at least 2" in v.reason

    def test_multi_target_max_count(self):
        p = Parameter("cols", MultiDataTarget(max_count=1))
        assert validate_argument(p, ["a", "b"]) is not None

    def test_multi_target_list_ok(self):
        p = Parameter("cols", MultiDataTarget(min_count=1, max_count=3))
        assert validate_argument(p, ["a", "b"]) is None

    def test_data_target_takes_string(self):
        p = Parameter("x", DataTarget((DataRole.MEASURE,), required=True))
        assert validate_argument(p, "people") is None
        assert validate_argument(p, 3) is not None

    def test_list_illegal_outside_multi_target(self):
        p = Parameter("x", StringType())
        v = validate_argument(p, ["a"])
        assert v is not None and "MultiDataTarget" in v.reason

    def test_boolean_strictness(self):
        p = Parameter("sort", BooleanType())
        assert validate_argument(p, True) is None
        assert validate_argument(p, 1) is not None

    def test_null_is_explicit_unset(self):
        for ptype in (BooleanType(), NumberType(0, 1, 0.1), DataTarget(), EnumType(("a",))):
            assert validate_argument(Parameter("p", ptype), None) is None

    def test_display_only_takes_no_value(self):
        assert validate_argument(Parameter("s", SectionType("Style")), "x") is not None
        assert validate_argument(Parameter("t", TextType("note")), None) is not None


class TestLintTemplate:
    def test_declared_reference_is_clean(self):
        t = make_template(
            params=[Parameter("yDim", DataTarget())],
            body=ObjectExpr({"field": VariableRef("yDim")}),
        )
        assert lint_template(t) == []

    def test_undeclared_reference(self):
        t = make_template(body=ObjectExpr({"field": VariableRef("zDim")}))
        codes = [(d.code, d.subject) for d in lint_template(t)]
        assert ("UndeclaredVariable", "zDim") in codes

    def test_unused_parameter(self):
        t = make_template(params=[Parameter("sort", BooleanType())])
        codes = [(d.code, d.subject) for d in lint_template(t)]
        assert ("UnusedParameter", "sort") in codes

    def test_duplicate_names_across_params_and_symbols(self):
        t = make_template(
            params=[Parameter("k", StringType())],
            body=ObjectExpr({"a": VariableRef("k")}),
            symbols=[Symbol("k")],
        )
        codes = [d.code for d in lint_template(t)]
        assert "DuplicateName" in codes

    def test_bad_param_type_config(self):
        t = make_template(
            params=[Parameter("w", NumberType(min=10, max=0, step=1))],
            body=ObjectExpr({"w": VariableRef("w")}),
        )
        codes = [d.code for d in lint_template(t)]
        assert "BadParamTypeConfig" in codes

    def test_invalid_default(self):
        t = make_template(
            params=[Parameter("agg", EnumType(("count",)), default_value="nope")],
            body=ObjectExpr({"a": VariableRef("agg")}),
        )
        codes = [d.code for d in lint_template(t)]
        assert "InvalidDefault" in codes

    def test_predicate_identifiers_count_as_references(self):
        t = make_template(
            params=[
                Parameter("sort", BooleanType()),
                Parameter(
                    "dir",
                    EnumType(("asc", "desc")),
                    display_predicate=parse_predicate("sort == true"),
                ),
            ],
            body=ObjectExpr(
                {
                    "s": Conditional(
                        parse_predicate("sort == true"), Atomic("-x"), None
                    ),
                    "d": VariableRef("dir"),
                }
            ),
        )
        assert lint_template(t) == []

    def test_undeclared_name_in_query(self):
        t = make_template(
            body=ObjectExpr(
                {"s": Conditional(parse_predicate("ghost == 1"), Atomic(1), None)}
            )
        )
        codes = [(d.code, d.subject) for d in lint_template(t)]
        assert ("UndeclaredVariable", "ghost") in codes

    def test_display_only_params_need_no_reference(self):
        t = make_template(params=[Parameter("hdr", SectionType("Layout"))])
        assert lint_template(t) == []

    def test_interpolation_references_are_seen(self):
        t = make_template(
            params=[Parameter("w", NumberType(20, 2000, 10))],
            body=ObjectExpr(
                {"size": InterpolatedString((VariableRef("w"), "px"))}
            ),
        )
        assert lint_template(t) == []

    def test_fixture_templates_are_clean(
        self, bar_template, scatter_template, table_template
    ):
        for t in (bar_template, scatter_template, table_template):
            assert lint_template(t) == []


class TestSettings:
    def test_lookup_unset_is_none(self):
        assert Settings().lookup("missing") is None

    def test_with_value_does_not_mutate(self):
        base = Settings({"a": 1})
        grown = base.with_value("b", 2)
        assert base.values == {"a": 1}
        assert grown.values == {"a": 1, "b": 2}

    def test_is_set_treats_null_as_unset(self):
        s = Settings({"a": None, "b": 1})
        assert not s.is_set("a")
        assert s.is_set("b")


class TestTemplateHelpers:
    def test_data_parameters_in_declaration_order(self):
        t = make_template(
            params=[
                Parameter("w", NumberType(0, 10, 1)),
                Parameter("x", DataTarget()),
                Parameter("cols", MultiDataTarget()),
            ],
            body=ObjectExpr(
                {
                    "w": VariableRef("w"),
                    "x": VariableRef("x"),
                    "c": VariableRef("cols"),
                }
            ),
        )
        assert [p.name for p in data_parameters(t)] == ["x", "cols"]

    def test_param_lookup(self, bar_template):
        assert bar_template.param("year") is not None
        assert bar_template.param("ghost") is None
