"""Rewrite rules: suggest abstracting literals in a spec body into parameters.

Rules pattern-match object fields of the parsed body (never raw text), so
application is exact and format-preserving.  Each language names a rule set;
the shipped sets are deliberately small:

  vega-lite: "field" values naming a dataset column -> DataTarget;
             numeric "width"/"height" -> Number; "scheme" strings -> Enum.
  vega:      the "field" rule, but only inside "encode" blocks.
  table:     no rules.

Suggestions carry the literal they saw; applying against a body whose value
at that path has changed is refused rather than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from .errors import StalePathError
from .languages import bundled_registry, format_pointer, parse_pointer
from .model import (
    Atomic,
    Conditional,
    DataTarget,
    EnumType,
    Expression,
    InterpolatedString,
    JsonAtomic,
    ListExpr,
    NumberType,
    ObjectExpr,
    Parameter,
    Template,
    VariableRef,
)


class SuggestionKind(str, Enum):
    ABSTRACT_DATA_FIELD = "AbstractDataField"
    ABSTRACT_LITERAL = "AbstractLiteral"


@dataclass(frozen=True)
class Suggestion:
    id: str
    description: str
    path: str
    kind: SuggestionKind
    proposed_param: Parameter
    replacement: VariableRef
    original: JsonAtomic


@dataclass(frozen=True)
class _Site:
    key: str
    value: JsonAtomic
    tokens: tuple[str, ...]
    columns: dict  # column name -> DataRole; empty without a dataset


@dataclass(frozen=True)
class RewriteRule:
    name: str
    matcher: Callable[[_Site], bool]
    builder: Callable[[_Site], tuple[SuggestionKind, str, Parameter]]


def _is_number(value: JsonAtomic) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _field_matches(site: _Site) -> bool:
    return site.key == "field" and isinstance(site.value, str) and site.value in site.columns


def _field_builds(site: _Site) -> tuple[SuggestionKind, str, Parameter]:
    role = site.columns[site.value]
    param = Parameter(
        site.key,
        DataTarget(allowed_roles=(role,), required=True),
        default_value=site.value,
    )
    return (
        SuggestionKind.ABSTRACT_DATA_FIELD,
        f'swap data field "{site.value}" with a {role.value} parameter',
        param,
    )


def _encode_field_matches(site: _Site) -> bool:
    return "encode" in site.tokens[:-1] and _field_matches(site)


def _size_matches(site: _Site) -> bool:
    return site.key in ("width", "height") and _is_number(site.value)


def _size_builds(site: _Site) -> tuple[SuggestionKind, str, Parameter]:
    value = site.value
    param = Parameter(
        site.key,
        NumberType(min=min(20, value), max=max(2000, value), step=10),
        default_value=value,
    )
    return (
        SuggestionKind.ABSTRACT_LITERAL,
        f"make {site.key} ({value}) adjustable",
        param,
    )


def _scheme_matches(site: _Site) -> bool:
    return site.key == "scheme" and isinstance(site.value, str)


def _scheme_builds(site: _Site) -> tuple[SuggestionKind, str, Parameter]:
    param = Parameter(
        site.key,
        EnumType(allowed_values=(site.value,)),
        default_value=site.value,
    )
    return (
        SuggestionKind.ABSTRACT_LITERAL,
        f'offer a choice of color scheme (currently "{site.value}")',
        param,
    )


RULE_SETS: dict[str, list[RewriteRule]] = {
    "vega-lite": [
        RewriteRule("data-field", _field_matches, _field_builds),
        RewriteRule("size", _size_matches, _size_builds),
        RewriteRule("scheme", _scheme_matches, _scheme_builds),
    ],
    "vega": [
        RewriteRule("encode-data-field", _encode_field_matches, _field_builds),
    ],
    "table": [],
}


def suggest(
    body: Expression,
    language_id: str,
    d=None,
    *,
    registry=None,
) -> list[Suggestion]:
    """Deterministic suggestion list in document order of the match paths.

    Already-abstracted regions (references, interpolations, conditionals)
    are never suggested against.
    """
    reg = registry if registry is not None else bundled_registry()
    rule_set = reg.language(language_id).rewrite_rule_set
    rules = RULE_SETS.get(rule_set, [])
    columns = {c.name: c.role for c in d.columns} if d is not None else {}

    suggestions: list[Suggestion] = []

    def visit(expr: Expression, tokens: tuple[str, ...]) -> None:
        if isinstance(expr, ObjectExpr):
            for key, value in expr.fields.items():
                child = tokens + (key,)
                if isinstance(value, Atomic):
                    site = _Site(key, value.value, child, columns)
                    for rule in rules:
                        if rule.matcher(site):
                            kind, description, param = rule.builder(site)
                            path = format_pointer(child)
                            suggestions.append(
                                Suggestion(
                                    id=f"{rule.name}:{path}",
                                    description=description,
                                    path=path,
                                    kind=kind,
                                    proposed_param=param,
                                    replacement=VariableRef(param.name),
                                    original=value.value,
                                )
                            )
                            break
                else:
                    visit(value, child)
        elif isinstance(expr, ListExpr):
            for index, item in enumerate(expr.items):
                visit(item, tokens + (str(index),))
        # Atomic leaves hold no key context; Conditional, VariableRef and
        # InterpolatedString subtrees are already template machinery.

    visit(body, ())
    return suggestions


def _fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    counter = 2
    while f"{base}{counter}" in taken:
        counter += 1
    return f"{base}{counter}"


def _replace_at(expr: Expression, tokens: list[str], original: JsonAtomic,
                replacement: Expression) -> Expression:
    if not tokens:
        if not (isinstance(expr, Atomic) and expr.value == original
                and type(expr.value) is type(original)):
            raise StalePathError("the value at the suggestion path has changed")
        return replacement
    head, rest = tokens[0], tokens[1:]
    if isinstance(expr, ObjectExpr):
        if head not in expr.fields:
            raise StalePathError(f"path segment {head!r} no longer exists")
        fields = dict(expr.fields)
        fields[head] = _replace_at(fields[head], rest, original, replacement)
        return ObjectExpr(fields)
    if isinstance(expr, ListExpr):
        if not head.isdigit() or int(head) >= len(expr.items):
            raise StalePathError(f"path segment {head!r} no longer exists")
        index = int(head)
        items = list(expr.items)
        items[index] = _replace_at(items[index], rest, original, replacement)
        return ListExpr(tuple(items))
    raise StalePathError(f"path segment {head!r} does not address an object or list")


def apply_suggestion(t: Template, sg: Suggestion) -> Template:
    """Rewrite the body at the suggestion path and append the new parameter.

    The parameter takes the site's key as its name, suffixed with 2, 3, ...
    on collision; the version is bumped.
    """
    taken = {p.name for p in t.params} | {s.name for s in t.symbols}
    fresh = _fresh_name(sg.proposed_param.name, taken)
    body = _replace_at(t.body, parse_pointer(sg.path), sg.original, VariableRef(fresh))
    param = replace(sg.proposed_param, name=fresh)
    return replace(t, body=body, params=t.params + (param,), version=t.version + 1)


def templatize(
    body: Expression,
    language_id: str,
    d=None,
    *,
    name: str,
    description: str = "",
    registry=None,
) -> Template:
    """Apply every available suggestion until none remain."""
    t = Template(name=name, description=description, language=language_id,
                 params=(), body=body)
    while True:
        pending = suggest(t.body, language_id, d, registry=registry)
        if not pending:
            return replace(t, version=1)
        t = apply_suggestion(t, pending[0])
