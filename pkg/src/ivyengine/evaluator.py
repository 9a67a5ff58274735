"""Template application: substitute arguments, then evaluate conditionals.

Evaluation is a structural recursion with a deletion marker (Bottom): an
else-less conditional whose query is false (or a then-less one whose query is
true) reduces to Bottom, and Bottom fields/elements are dropped from the
enclosing object or list without reordering the survivors.  A Bottom that
survives to the top level is an error, not an empty spec.

Predicates see argument values, never parameter names: queries are evaluated
against the settings, with unset names resolving to Null and symbols to their
own name strings.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from . import predicate as _predicate
from .errors import TopLevelBottomError
from .model import (
    Atomic,
    Conditional,
    Expression,
    InterpolatedString,
    JsonValue,
    ListExpr,
    ObjectExpr,
    Parameter,
    Settings,
    Symbol,
    Template,
    VariableRef,
)
from .canonical import atomic_text


class _BottomType:
    """Deletion marker. Consumed by object/list rules; never a JSON value."""

    _instance: Optional["_BottomType"] = None

    def __new__(cls) -> "_BottomType":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Bottom"


BOTTOM = _BottomType()

EvalOutcome = JsonValue | _BottomType

_Resolver = Callable[[str], JsonValue]


def _resolver(s: Settings, symbols: Sequence[Symbol]) -> _Resolver:
    symbol_names = {sym.name for sym in symbols}

    def lookup(name: str) -> JsonValue:
        if s.is_set(name):
            return s.values[name]
        if name in symbol_names:
            return name
        return None

    return lookup


def effective_settings(t: Template, s: Settings) -> Settings:
    """Overlay: declared defaults, overridden by the supplied settings."""
    values = {p.name: p.default_value for p in t.params if p.has_default}
    values.update(s.values)
    return Settings(values, s.filters)


def substitute(body: Expression, s: Settings, symbols: Sequence[Symbol] = ()) -> Expression:
    """Replace every variable reference; conditionals keep their queries.

    Whole-string references substitute typed values, interpolation segments
    splice canonical text. Unset names become Null so the result never
    contains a reference.
    """
    lookup = _resolver(s, symbols)

    def walk(expr: Expression) -> Expression:
        if isinstance(expr, Atomic):
            return expr
        if isinstance(expr, VariableRef):
            return Atomic(lookup(expr.name))
        if isinstance(expr, InterpolatedString):
            parts = [
                atomic_text(lookup(seg.name)) if isinstance(seg, VariableRef) else seg
                for seg in expr.segments
            ]
            return Atomic("".join(parts))
        if isinstance(expr, ObjectExpr):
            return ObjectExpr({k: walk(v) for k, v in expr.fields.items()})
        if isinstance(expr, ListExpr):
            return ListExpr(tuple(walk(v) for v in expr.items))
        if isinstance(expr, Conditional):
            return Conditional(
                query=expr.query,
                then_branch=walk(expr.then_branch) if expr.then_branch is not None else None,
                else_branch=walk(expr.else_branch) if expr.else_branch is not None else None,
            )
        raise TypeError(f"not an expression: {expr!r}")

    return walk(body)


def eval_predicate(p: _predicate.Predicate, s: Settings, symbols: Sequence[Symbol] = ()) -> bool:
    """Total evaluation of a parsed query against settings values."""
    return _predicate.evaluate(p, _resolver(s, symbols))


def evaluate_outcome(
    e: Expression, s: Settings, symbols: Sequence[Symbol] = ()
) -> EvalOutcome:
    """Reduce an expression to a JSON value or to Bottom.

    Accepts both pre-substituted expressions and raw bodies: any remaining
    reference resolves through the same lookup the queries use.
    """
    lookup = _resolver(s, symbols)

    def walk(expr: Expression) -> EvalOutcome:
        if isinstance(expr, Atomic):
            return expr.value
        if isinstance(expr, VariableRef):
            return lookup(expr.name)
        if isinstance(expr, InterpolatedString):
            return "".join(
                atomic_text(lookup(seg.name)) if isinstance(seg, VariableRef) else seg
                for seg in expr.segments
            )
        if isinstance(expr, ObjectExpr):
            out: dict[str, JsonValue] = {}
            for key, value in expr.fields.items():
                result = walk(value)
                if result is not BOTTOM:
                    out[key] = result
            return out
        if isinstance(expr, ListExpr):
            return [r for r in (walk(v) for v in expr.items) if r is not BOTTOM]
        if isinstance(expr, Conditional):
            branch = expr.then_branch if eval_predicate(expr.query, s, symbols) else expr.else_branch
            if branch is None:
                return BOTTOM
            return walk(branch)
        raise TypeError(f"not an expression: {expr!r}")

    return walk(e)


def evaluate(e: Expression, s: Settings, symbols: Sequence[Symbol] = ()) -> JsonValue:
    """evaluate_outcome, with top-level Bottom raised as an error."""
    outcome = evaluate_outcome(e, s, symbols)
    if outcome is BOTTOM:
        raise TopLevelBottomError("the whole spec was conditionally deleted")
    return outcome


def visible_params(t: Template, s: Settings) -> list[str]:
    """Names of parameters whose display predicate is absent or true, in
    declaration order. Predicates see effective settings (defaults applied)."""
    effective = effective_settings(t, s)
    names: list[str] = []
    for p in t.params:
        if p.display_predicate is None or eval_predicate(p.display_predicate, effective, t.symbols):
            names.append(p.name)
    return names


def apply_template(
    t: Template,
    s: Settings,
    d=None,
    *,
    registry=None,
    validate: bool = True,
) -> JsonValue:
    """Produce the final spec: t applied to s, optionally bound to a dataset.

    Defaults fill unset parameters before substitution. When a dataset is
    given, its filtered rows are injected at the language's data pointer
    unless the evaluated spec already binds data there. Validation against
    the language schema runs unless disabled.
    """
    from . import languages

    effective = effective_settings(t, s)
    spec = evaluate(substitute(t.body, effective, t.symbols), effective, t.symbols)

    reg = registry if registry is not None else languages.bundled_registry()
    if d is not None and reg.language(t.language).data_injection_pointer is not None:
        from .data import apply_filters

        rows = apply_filters(d, effective.filters).rows
        spec = reg.inject_data(t.language, spec, rows)
    if validate:
        errors = reg.validate_spec(t.language, spec)
        if errors:
            from .errors import SchemaViolationError

            raise SchemaViolationError(errors)
    return spec
