"""Catalog search, shelf assignment, settings translation, and fan-out.

A query (the columns of a dataset with their roles) matches a template when
an injective role-compatible mapping from every query column into the
template's data parameters exists; the match is complete when such a mapping
can also cover every required data parameter.  Both questions reduce to
maximum bipartite matching; the returned witness is upgraded to cover the
required side by walking alternating paths between the two matchings.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import IvyError, NoMatchError, SettingsViolationError
from .evaluator import apply_template
from .model import (
    ArgumentValue,
    DataRole,
    DataTarget,
    JsonValue,
    MatchKind,
    MatchResult,
    MultiDataTarget,
    Parameter,
    Settings,
    Template,
    data_parameters,
    validate_argument,
)

Query = list[tuple[str, DataRole]]


def _max_matching(adjacency: list[list[int]], allowed: set[int] | None = None) -> dict[int, int]:
    """Kuhn's augmenting-path algorithm.

    adjacency[c] lists the parameter slots column c may occupy; `allowed`
    restricts the slot side. Returns slot -> column.
    """
    matched: dict[int, int] = {}

    def try_assign(column: int, visited: set[int]) -> bool:
        for slot in adjacency[column]:
            if (allowed is None or slot in allowed) and slot not in visited:
                visited.add(slot)
                if slot not in matched or try_assign(matched[slot], visited):
                    matched[slot] = column
                    return True
        return False

    for column in range(len(adjacency)):
        try_assign(column, set())
    return matched


def _match_details(t: Template, query: Query) -> tuple[MatchResult, int]:
    """Match result plus the number of required parameters left uncovered."""
    params = data_parameters(t)
    required = {i for i, p in enumerate(params) if p.type.required}
    adjacency = [
        [i for i, p in enumerate(params) if role in p.type.allowed_roles]
        for _, role in query
    ]

    full = _max_matching(adjacency)
    required_only = _max_matching(adjacency, allowed=required)
    uncovered = len(required) - len(required_only)

    if len(full) < len(query):
        return MatchResult(MatchKind.NO_MATCH, {}), uncovered

    if uncovered == 0 and required - set(full):
        # Both sides are individually saturable; combine the two matchings so
        # one witness saturates all columns and all required slots at once.
        column_slot = {c: s for s, c in full.items()}
        required_column = {s: c for s, c in required_only.items()}
        for start in sorted(required - set(column_slot.values())):
            slot = start
            while True:
                column = required_column[slot]
                displaced = column_slot.get(column)
                column_slot[column] = slot
                if displaced is None or displaced not in required:
                    break
                slot = displaced
        full = {s: c for c, s in column_slot.items()}

    mapping = {query[c][0]: params[s].name for s, c in full.items()}
    kind = MatchKind.COMPLETE if uncovered == 0 else MatchKind.PARTIAL
    return MatchResult(kind, mapping), uncovered


def match_template(t: Template, query: Query) -> MatchResult:
    """Partial, Complete, or NoMatch, with a witnessing column -> parameter
    mapping."""
    result, _ = _match_details(t, query)
    return result


def search_catalog(
    templates: list[Template], query: Query
) -> list[tuple[Template, MatchResult]]:
    """One pass over the catalog; Complete before Partial, then fewer
    uncovered required parameters, then name."""
    ranked: list[tuple[tuple[int, int, str], Template, MatchResult]] = []
    for t in templates:
        result, uncovered = _match_details(t, query)
        if result.kind is MatchKind.NO_MATCH:
            continue
        order = (0 if result.kind is MatchKind.COMPLETE else 1, uncovered, t.name)
        ranked.append((order, t, result))
    ranked.sort(key=lambda item: item[0])
    return [(t, r) for _, t, r in ranked]


def _slot_fill(p: Parameter, s: Settings) -> object:
    value = s.values.get(p.name)
    return value if value not in (None, []) else None


def add_to_shelf(t: Template, column_name: str, role: DataRole, s: Settings) -> Settings:
    """Assign a column to the first declaration-order data parameter that
    accepts its role and has room; no slot means no change."""
    for p in data_parameters(t):
        if role not in p.type.allowed_roles:
            continue
        current = _slot_fill(p, s)
        if isinstance(p.type, DataTarget):
            if current is None:
                return s.with_value(p.name, column_name)
        else:
            held = list(current) if isinstance(current, list) else []
            if p.type.max_count is None or len(held) < p.type.max_count:
                return s.with_value(p.name, held + [column_name])
    return s


@dataclass(frozen=True)
class TranslationResult:
    settings: Settings
    flag: MatchKind  # Complete: everything carried; Partial: columns dropped
    dropped: tuple[str, ...] = ()


def _bound_columns(t: Template, s: Settings) -> list[tuple[str, Parameter]]:
    """(column name, source parameter) pairs in declaration order."""
    bound: list[tuple[str, Parameter]] = []
    for p in data_parameters(t):
        value = s.values.get(p.name)
        if isinstance(p.type, DataTarget) and isinstance(value, str):
            bound.append((value, p))
        elif isinstance(p.type, MultiDataTarget) and isinstance(value, list):
            bound.extend((v, p) for v in value)
    return bound


def _required_satisfied(t: Template, s: Settings) -> bool:
    for p in data_parameters(t):
        if not p.type.required:
            continue
        value = s.values.get(p.name)
        if isinstance(p.type, DataTarget) and not isinstance(value, str):
            return False
        if isinstance(p.type, MultiDataTarget):
            minimum = p.type.min_count if p.type.min_count is not None else 1
            if not isinstance(value, list) or len(value) < minimum:
                return False
    return True


def translate_settings(
    src: Template,
    dst: Template,
    s: Settings,
    roles: dict[str, DataRole] | None = None,
) -> TranslationResult:
    """Carry data bindings from one template to another via repeated shelf
    assignment in source declaration order; non-data parameters reset to the
    destination's defaults; filters carry over verbatim.

    Column roles come from the `roles` mapping when given, otherwise from the
    source parameter's allowed roles (tried in order).
    """
    out = Settings({}, s.filters)
    bound = _bound_columns(src, s)
    dropped: list[str] = []
    for column_name, source_param in bound:
        candidates = (
            [roles[column_name]]
            if roles is not None and column_name in roles
            else list(source_param.type.allowed_roles)
        )
        before = out
        for role in candidates:
            out = add_to_shelf(dst, column_name, role, before)
            if out is not before:
                break
        if out is before:
            dropped.append(column_name)
    if bound and len(dropped) == len(bound):
        raise NoMatchError(
            f"no column carried over from {src.name!r} to {dst.name!r}"
        )
    complete = not dropped and _required_satisfied(dst, out)
    return TranslationResult(
        out, MatchKind.COMPLETE if complete else MatchKind.PARTIAL, tuple(dropped)
    )


@dataclass(frozen=True)
class FanOutRequest:
    template_name: str
    base: Settings
    option_sets: dict[str, list[ArgumentValue]]


@dataclass(frozen=True)
class FanOutCell:
    settings: Settings
    spec: JsonValue | None = None
    error: IvyError | None = None


@dataclass(frozen=True)
class FanOutResult:
    cells: tuple[FanOutCell, ...]

    def __len__(self) -> int:
        return len(self.cells)

    def pairs(self) -> list[tuple[Settings, JsonValue]]:
        return [(c.settings, c.spec) for c in self.cells if c.error is None]


def _check_request(t: Template, req: FanOutRequest) -> None:
    from .model import Violation

    declared = {p.name: p for p in t.params}
    violations: list[Violation] = []
    for name, options in req.option_sets.items():
        if name not in declared:
            violations.append(Violation(name, "no such parameter"))
            continue
        if not options:
            violations.append(Violation(name, "option set is empty"))
            continue
        for option in options:
            v = validate_argument(declared[name], option)
            if v is not None:
                violations.append(v)
    if violations:
        raise SettingsViolationError(violations)


def fan_out(
    t: Template,
    req: FanOutRequest,
    d=None,
    *,
    registry=None,
    validate: bool = True,
    jobs: int | None = None,
) -> FanOutResult:
    """Cartesian product over the option sets in parameter declaration
    order; one cell per combination, errors recorded per cell.

    Cells may evaluate in parallel (`jobs` threads); assembly order is
    by combination index, independent of scheduling.
    """
    if req.template_name != t.name:
        raise NoMatchError(
            f"request names template {req.template_name!r}, got {t.name!r}"
        )
    _check_request(t, req)

    ordered_names = [p.name for p in t.params if p.name in req.option_sets]
    option_lists = [req.option_sets[name] for name in ordered_names]
    combos = list(itertools.product(*option_lists)) if ordered_names else [()]

    def build_settings(combo: tuple[ArgumentValue, ...]) -> Settings:
        values = dict(req.base.values)
        values.update(dict(zip(ordered_names, combo)))
        return Settings(values, req.base.filters)

    def run(settings: Settings) -> FanOutCell:
        try:
            spec = apply_template(t, settings, d, registry=registry, validate=validate)
            return FanOutCell(settings, spec=spec)
        except IvyError as exc:
            return FanOutCell(settings, error=exc)

    all_settings = [build_settings(c) for c in combos]
    if jobs is not None and jobs > 1 and len(all_settings) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cells = tuple(pool.map(run, all_settings))
    else:
        cells = tuple(run(s) for s in all_settings)
    return FanOutResult(cells)
