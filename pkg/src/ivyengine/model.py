"""Core domain model: JSON values, template expressions, parameters, settings.

Pure data shared by every other module.  Values are treated as immutable after
construction so they can be shared freely across threads; nothing here does
I/O.  The on-disk formats live in :mod:`ivyengine.formats`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Union

from . import predicate
from .predicate import Predicate

# --- JSON values ------------------------------------------------------------

JsonAtomic = Union[None, bool, int, float, str]
JsonValue = Union[JsonAtomic, list["JsonValue"], dict[str, "JsonValue"]]


def is_atomic(value: object) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


class DataRole(str, Enum):
    MEASURE = "Measure"
    DIMENSION = "Dimension"
    TIME = "Time"


ALL_ROLES: tuple[DataRole, ...] = (DataRole.MEASURE, DataRole.DIMENSION, DataRole.TIME)


class _Unset:
    """Sentinel distinguishing "no default declared" from a Null default."""

    _instance: "_Unset | None" = None

    def __new__(cls) -> "_Unset":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSET"


UNSET = _Unset()

# An argument value is an atomic or, for MultiDataTarget only, a list of
# column-name strings.
ArgumentValue = Union[JsonAtomic, list[str]]


# --- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Atomic:
    value: JsonAtomic


@dataclass(frozen=True)
class VariableRef:
    name: str


@dataclass(frozen=True)
class InterpolatedString:
    """A string with spliced references, e.g. ``"datum.year == [year]"``.

    Segments alternate literal text (str) and VariableRef; at least one
    segment is a VariableRef (a ref-free string is an Atomic).
    """

    segments: tuple[Union[str, VariableRef], ...]


@dataclass(frozen=True)
class ObjectExpr:
    fields: dict[str, "Expression"]


@dataclass(frozen=True)
class ListExpr:
    items: tuple["Expression", ...]


@dataclass(frozen=True)
class Conditional:
    """A conditional section; at least one branch is present.  A false query
    with no else-branch produces the deletion marker consumed by object and
    list evaluation."""

    query: Predicate
    then_branch: "Expression | None" = None
    else_branch: "Expression | None" = None


Expression = Union[Atomic, VariableRef, InterpolatedString, ObjectExpr, ListExpr, Conditional]


def iter_variable_names(expr: Expression) -> Iterator[str]:
    """Yield the name of every VariableRef in the expression, in document
    order, including refs inside interpolations and conditional branches."""
    if isinstance(expr, VariableRef):
        yield expr.name
    elif isinstance(expr, InterpolatedString):
        for seg in expr.segments:
            if isinstance(seg, VariableRef):
                yield seg.name
    elif isinstance(expr, ObjectExpr):
        for value in expr.fields.values():
            yield from iter_variable_names(value)
    elif isinstance(expr, ListExpr):
        for item in expr.items:
            yield from iter_variable_names(item)
    elif isinstance(expr, Conditional):
        if expr.then_branch is not None:
            yield from iter_variable_names(expr.then_branch)
        if expr.else_branch is not None:
            yield from iter_variable_names(expr.else_branch)


def iter_queries(expr: Expression) -> Iterator[Predicate]:
    """Yield every conditional query predicate in the expression."""
    if isinstance(expr, ObjectExpr):
        for value in expr.fields.values():
            yield from iter_queries(value)
    elif isinstance(expr, ListExpr):
        for item in expr.items:
            yield from iter_queries(item)
    elif isinstance(expr, Conditional):
        yield expr.query
        if expr.then_branch is not None:
            yield from iter_queries(expr.then_branch)
        if expr.else_branch is not None:
            yield from iter_queries(expr.else_branch)


# --- parameter types ---------------------------------------------------------

@dataclass(frozen=True)
class DataTarget:
    allowed_roles: tuple[DataRole, ...] = ALL_ROLES
    required: bool = False


@dataclass(frozen=True)
class MultiDataTarget:
    allowed_roles: tuple[DataRole, ...] = ALL_ROLES
    required: bool = False
    min_count: int | None = None
    max_count: int | None = None


@dataclass(frozen=True)
class StringType:
    pass


@dataclass(frozen=True)
class NumberType:
    min: float
    max: float
    step: float


@dataclass(frozen=True)
class BooleanType:
    pass


@dataclass(frozen=True)
class EnumType:
    allowed_values: tuple[str, ...]


@dataclass(frozen=True)
class TextType:
    """Display-only literal text shown in the widget column."""

    text: str = ""


@dataclass(frozen=True)
class SectionType:
    """Display-only section header grouping the widgets that follow."""

    label: str = ""


ParamType = Union[
    DataTarget, MultiDataTarget, StringType, NumberType, BooleanType,
    EnumType, TextType, SectionType,
]

DATA_PARAM_TYPES = (DataTarget, MultiDataTarget)
DISPLAY_ONLY_TYPES = (TextType, SectionType)


@dataclass(frozen=True)
class Parameter:
    name: str
    type: ParamType
    display_predicate: Predicate | None = None
    default_value: "ArgumentValue | _Unset" = UNSET

    @property
    def has_default(self) -> bool:
        return self.default_value is not UNSET


@dataclass(frozen=True)
class Symbol:
    """A template-specific constant usable wherever a column name is; its
    meaning comes from the template's own conditionals."""

    name: str
    description: str = ""


# --- filters and settings -----------------------------------------------------

@dataclass(frozen=True)
class RangeFilter:
    column: str
    min: float
    max: float


@dataclass(frozen=True)
class OneOfFilter:
    column: str
    values: tuple[JsonAtomic, ...]


Filter = Union[RangeFilter, OneOfFilter]


@dataclass
class Settings:
    """Argument values keyed by parameter name, plus optional data filters
    (the reserved ``$filters`` entry of the on-disk format)."""

    values: dict[str, ArgumentValue] = field(default_factory=dict)
    filters: tuple[Filter, ...] = ()

    def lookup(self, name: str) -> object:
        """Predicate-facing resolution: unset names are Null."""
        value = self.values.get(name)
        return value

    def is_set(self, name: str) -> bool:
        return self.values.get(name) is not None

    def with_value(self, name: str, value: ArgumentValue) -> "Settings":
        merged = dict(self.values)
        merged[name] = value
        return Settings(merged, self.filters)

    def copy(self) -> "Settings":
        return Settings(dict(self.values), self.filters)


# --- templates ----------------------------------------------------------------

@dataclass
class Template:
    name: str
    description: str
    language: str
    params: tuple[Parameter, ...]
    body: Expression
    symbols: tuple[Symbol, ...] = ()
    metadata: dict[str, str] = field(default_factory=dict)
    version: int = 1

    def param(self, name: str) -> Parameter | None:
        for p in self.params:
            if p.name == name:
                return p
        return None

    def with_version(self, version: int) -> "Template":
        return replace(self, version=version)


def data_parameters(t: Template) -> tuple[Parameter, ...]:
    """The template's data parameters (DataTarget/MultiDataTarget), in
    declaration order; these are the slots catalog search matches against."""
    return tuple(p for p in t.params if isinstance(p.type, DATA_PARAM_TYPES))


class MatchKind(str, Enum):
    COMPLETE = "Complete"
    PARTIAL = "Partial"
    NO_MATCH = "NoMatch"


@dataclass
class MatchResult:
    """Outcome of matching query columns against a template's data
    parameters; ``mapping`` is the witnessing injective column -> parameter
    assignment (empty for NoMatch)."""

    kind: MatchKind
    mapping: dict[str, str] = field(default_factory=dict)


# --- diagnostics ----------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class Violation:
    parameter: str
    reason: str


def validate_argument(p: Parameter, v: ArgumentValue) -> Violation | None:
    """Type-compatibility check for one argument value; None means ok.

    Null is accepted for every non-display parameter: it is the explicit
    spelling of "unset", and unset resolution is the evaluator's totality
    mechanism.
    """
    t = p.type
    if isinstance(t, DISPLAY_ONLY_TYPES):
        return Violation(p.name, "display-only parameter takes no value")
    if v is None:
        return None
    if isinstance(t, DataTarget):
        if not isinstance(v, str):
            return Violation(p.name, "expects a column or symbol name string")
        return None
    if isinstance(t, MultiDataTarget):
        if not isinstance(v, (list, tuple)) or not all(isinstance(x, str) for x in v):
            return Violation(p.name, "expects a list of column name strings")
        n = len(v)
        if t.min_count is not None and n < t.min_count:
            return Violation(p.name, f"needs at least {t.min_count} column(s), got {n}")
        if t.max_count is not None and n > t.max_count:
            return Violation(p.name, f"allows at most {t.max_count} column(s), got {n}")
        return None
    if isinstance(v, (list, tuple)):
        return Violation(p.name, "list values are only legal for MultiDataTarget")
    if isinstance(t, NumberType):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            return Violation(p.name, "expects a number")
        if not (t.min <= v <= t.max):
            return Violation(p.name, f"out of range [{t.min}, {t.max}]: {v}")
        return None
    if isinstance(t, BooleanType):
        if not isinstance(v, bool):
            return Violation(p.name, "expects true or false")
        return None
    if isinstance(t, EnumType):
        if not isinstance(v, str) or v not in t.allowed_values:
            return Violation(p.name, f"must be one of {list(t.allowed_values)}")
        return None
    if isinstance(t, StringType):
        if not isinstance(v, str):
            return Violation(p.name, "expects a string")
        return None
    return Violation(p.name, f"unknown parameter type {type(t).__name__}")


def _config_problems(t: ParamType) -> list[str]:
    problems: list[str] = []
    if isinstance(t, (DataTarget, MultiDataTarget)):
        if not t.allowed_roles:
            problems.append("allowedRoles must not be empty")
        if len(set(t.allowed_roles)) != len(t.allowed_roles):
            problems.append("allowedRoles contains duplicates")
    if isinstance(t, MultiDataTarget):
        for bound in (t.min_count, t.max_count):
            if bound is not None and (isinstance(bound, bool) or not isinstance(bound, int) or bound < 0):
                problems.append("count bounds must be non-negative integers")
                break
        if (
            t.min_count is not None
            and t.max_count is not None
            and t.min_count > t.max_count
        ):
            problems.append("minCount exceeds maxCount")
    if isinstance(t, NumberType):
        if t.min > t.max:
            problems.append("min exceeds max")
        if not t.step > 0:
            problems.append("step must be positive")
    if isinstance(t, EnumType):
        if not t.allowed_values:
            problems.append("allowedValues must not be empty")
        elif len(set(t.allowed_values)) != len(t.allowed_values):
            problems.append("allowedValues contains duplicates")
        if any(not isinstance(x, str) for x in t.allowed_values):
            problems.append("allowedValues must be strings")
    return problems


def lint_template(t: Template) -> list[Diagnostic]:
    """Well-formedness diagnostics: undeclared variable references, unused
    parameters, duplicate names, invalid parameter-type configs, and defaults
    that fail their own type.  An empty list means the template is clean."""
    diagnostics: list[Diagnostic] = []

    seen: set[str] = set()
    duplicates: set[str] = set()
    for name in [p.name for p in t.params] + [s.name for s in t.symbols]:
        if name in seen:
            duplicates.add(name)
        seen.add(name)
    for name in sorted(duplicates):
        diagnostics.append(
            Diagnostic("DuplicateName", name, f"{name!r} is declared more than once")
        )

    for p in t.params:
        for problem in _config_problems(p.type):
            diagnostics.append(
                Diagnostic("BadParamTypeConfig", p.name, f"{p.name}: {problem}")
            )
        if p.has_default:
            violation = validate_argument(p, p.default_value)  # type: ignore[arg-type]
            if violation is not None:
                diagnostics.append(
                    Diagnostic("InvalidDefault", p.name, f"default value: {violation.reason}")
                )

    declared = {p.name for p in t.params} | {s.name for s in t.symbols}

    referenced: set[str] = set(iter_variable_names(t.body))
    for query in iter_queries(t.body):
        referenced.update(predicate.identifiers(query))
    for p in t.params:
        if p.display_predicate is not None:
            referenced.update(predicate.identifiers(p.display_predicate))

    for name in sorted(referenced - declared):
        diagnostics.append(
            Diagnostic(
                "UndeclaredVariable", name,
                f"{name!r} is referenced but no parameter or symbol declares it",
            )
        )

    for p in t.params:
        if isinstance(p.type, DISPLAY_ONLY_TYPES):
            continue
        if p.name not in referenced:
            diagnostics.append(
                Diagnostic(
                    "UnusedParameter", p.name,
                    f"parameter {p.name!r} is never referenced by the body or any predicate",
                )
            )

    return diagnostics
