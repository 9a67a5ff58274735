"""Bidirectional mapping between the on-disk formats and core-model values.

Template documents (``*.ivy.json``) are strict JSON with exactly the top-level
keys ``name``, ``description``, ``language``, ``params``, ``symbols``,
``body``, plus optional ``metadata`` and ``version``.  Settings files
(``*.settings.json``) are flat JSON objects with a reserved ``$filters``
entry.  See docs/format.md for the full reference.

Body strings are scanned for bracket variables: a whole-string ``[name]`` is a
typed reference, brackets inside longer strings splice canonical text, and
``[[`` escapes a literal left bracket.  An object whose single key is
``$cond`` is a conditional section.  Serialization is the exact inverse over
canonical documents: parse(serialize(t)) == t and serialize(parse(d)) is
byte-identical to the canonical pretty-print of d.
"""

from __future__ import annotations

import re

from . import canonical, predicate
from .errors import (
    BadConditionalShapeError,
    BadFilterShapeError,
    BadParamTypeError,
    JsonSyntaxError,
    UnknownTopLevelKeyError,
)
from .model import (
    ALL_ROLES,
    Atomic,
    BooleanType,
    Conditional,
    DataRole,
    DataTarget,
    EnumType,
    Expression,
    Filter,
    InterpolatedString,
    JsonValue,
    ListExpr,
    MultiDataTarget,
    NumberType,
    ObjectExpr,
    OneOfFilter,
    ParamType,
    Parameter,
    RangeFilter,
    SectionType,
    Settings,
    StringType,
    Symbol,
    Template,
    TextType,
    UNSET,
    VariableRef,
    is_atomic,
)

FORMAT_VERSION = 1

_BRACKET_TOKEN = re.compile(r"\[\[|\[([A-Za-z_][A-Za-z0-9_]*)\]")

COND_KEY = "$cond"
FILTERS_KEY = "$filters"


# --- body expressions -------------------------------------------------------

def scan_string(text: str) -> Expression:
    """Scan one string value for bracket tokens.

    ``[[`` yields a literal ``[``; ``[name]`` yields a reference.  A string
    that is exactly one reference becomes VariableRef (typed substitution);
    any other string with references becomes InterpolatedString; a string
    without references stays Atomic (with escapes folded).
    """
    segments: list[str | VariableRef] = []
    literal: list[str] = []
    pos = 0
    for m in _BRACKET_TOKEN.finditer(text):
        literal.append(text[pos : m.start()])
        if m.group(0) == "[[":
            literal.append("[")
        else:
            flushed = "".join(literal)
            literal = []
            if flushed:
                segments.append(flushed)
            segments.append(VariableRef(m.group(1)))
        pos = m.end()
    literal.append(text[pos:])
    tail = "".join(literal)

    if not any(isinstance(s, VariableRef) for s in segments):
        return Atomic(tail if not segments else "".join(segments) + tail)  # type: ignore[arg-type]
    if tail:
        segments.append(tail)
    if len(segments) == 1 and isinstance(segments[0], VariableRef):
        return segments[0]
    return InterpolatedString(tuple(segments))


def escape_string(text: str) -> str:
    """Inverse of scan_string for literal text: every ``[`` is doubled."""
    return text.replace("[", "[[")


def _conditional_from_document(value: JsonValue) -> Conditional:
    if not isinstance(value, dict):
        raise BadConditionalShapeError("'$cond' value must be an object")
    unknown = set(value) - {"query", "true", "false"}
    if unknown:
        raise BadConditionalShapeError(
            f"'$cond' has unknown key(s): {sorted(unknown)}"
        )
    if "query" not in value or not isinstance(value["query"], str):
        raise BadConditionalShapeError("'$cond' needs a string 'query'")
    if "true" not in value and "false" not in value:
        raise BadConditionalShapeError("'$cond' needs at least one branch")
    return Conditional(
        query=predicate.parse(value["query"]),
        then_branch=expression_from_document(value["true"]) if "true" in value else None,
        else_branch=expression_from_document(value["false"]) if "false" in value else None,
    )


def expression_from_document(value: JsonValue) -> Expression:
    """Convert body-document JSON to an Expression (brackets and ``$cond``
    recognized)."""
    if isinstance(value, dict):
        if COND_KEY in value:
            if len(value) != 1:
                raise BadConditionalShapeError(
                    "'$cond' must be the only key of its object"
                )
            return _conditional_from_document(value[COND_KEY])
        return ObjectExpr({k: expression_from_document(v) for k, v in value.items()})
    if isinstance(value, list):
        return ListExpr(tuple(expression_from_document(v) for v in value))
    if isinstance(value, str):
        return scan_string(value)
    return Atomic(value)


def expression_from_spec(value: JsonValue) -> Expression:
    """Convert a raw grammar spec to an Expression with every string literal.

    This is the ingestion boundary for templatization: brackets in a pasted
    spec are ordinary characters, not references, and the reserved ``$cond``
    key is rejected rather than silently reinterpreted.
    """
    if isinstance(value, dict):
        if COND_KEY in value:
            raise BadConditionalShapeError(
                "raw specs may not use the reserved '$cond' key"
            )
        return ObjectExpr({k: expression_from_spec(v) for k, v in value.items()})
    if isinstance(value, list):
        return ListExpr(tuple(expression_from_spec(v) for v in value))
    return Atomic(value)


def expression_to_document(expr: Expression) -> JsonValue:
    """Convert an Expression back to body-document JSON."""
    if isinstance(expr, Atomic):
        if isinstance(expr.value, str):
            return escape_string(expr.value)
        return expr.value
    if isinstance(expr, VariableRef):
        return f"[{expr.name}]"
    if isinstance(expr, InterpolatedString):
        parts = []
        for seg in expr.segments:
            if isinstance(seg, VariableRef):
                parts.append(f"[{seg.name}]")
            else:
                parts.append(escape_string(seg))
        return "".join(parts)
    if isinstance(expr, ObjectExpr):
        return {k: expression_to_document(v) for k, v in expr.fields.items()}
    if isinstance(expr, ListExpr):
        return [expression_to_document(v) for v in expr.items]
    if isinstance(expr, Conditional):
        cond: dict[str, JsonValue] = {"query": expr.query.source}
        if expr.then_branch is not None:
            cond["true"] = expression_to_document(expr.then_branch)
        if expr.else_branch is not None:
            cond["false"] = expression_to_document(expr.else_branch)
        return {COND_KEY: cond}
    raise TypeError(f"not an expression: {expr!r}")


# --- parameter types ---------------------------------------------------------

_ROLE_NAMES = {r.value for r in ALL_ROLES}


def _roles_from_config(value: object, context: str) -> tuple[DataRole, ...]:
    if not isinstance(value, list) or not value:
        raise BadParamTypeError(f"{context}: allowedRoles must be a nonempty list")
    roles: list[DataRole] = []
    for item in value:
        if not isinstance(item, str) or item not in _ROLE_NAMES:
            raise BadParamTypeError(f"{context}: unknown data role {item!r}")
        role = DataRole(item)
        if role in roles:
            raise BadParamTypeError(f"{context}: duplicate role {item!r}")
        roles.append(role)
    return tuple(roles)


def _number_from_config(config: dict, key: str, context: str) -> float:
    value = config.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BadParamTypeError(f"{context}: {key!r} must be a number")
    return value


def _count_from_config(config: dict, key: str, context: str) -> int | None:
    if key not in config:
        return None
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise BadParamTypeError(f"{context}: {key!r} must be a non-negative integer")
    return value


def _check_config_keys(config: dict, allowed: set[str], context: str) -> None:
    unknown = set(config) - allowed
    if unknown:
        raise BadParamTypeError(f"{context}: unknown config key(s) {sorted(unknown)}")


def param_type_from_document(tag: object, config: object, context: str) -> ParamType:
    if not isinstance(tag, str):
        raise BadParamTypeError(f"{context}: 'type' must be a string tag")
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise BadParamTypeError(f"{context}: 'config' must be an object")

    if tag == "DataTarget" or tag == "MultiDataTarget":
        allowed = {"allowedRoles", "required"}
        if tag == "MultiDataTarget":
            allowed |= {"minCount", "maxCount"}
        _check_config_keys(config, allowed, context)
        roles = (
            _roles_from_config(config["allowedRoles"], context)
            if "allowedRoles" in config
            else ALL_ROLES
        )
        required = config.get("required", False)
        if not isinstance(required, bool):
            raise BadParamTypeError(f"{context}: 'required' must be a boolean")
        if tag == "DataTarget":
            return DataTarget(roles, required)
        min_count = _count_from_config(config, "minCount", context)
        max_count = _count_from_config(config, "maxCount", context)
        if min_count is not None and max_count is not None and min_count > max_count:
            raise BadParamTypeError(f"{context}: minCount exceeds maxCount")
        return MultiDataTarget(roles, required, min_count, max_count)
    if tag == "Number":
        _check_config_keys(config, {"min", "max", "step"}, context)
        low = _number_from_config(config, "min", context)
        high = _number_from_config(config, "max", context)
        step = _number_from_config(config, "step", context)
        if low > high:
            raise BadParamTypeError(f"{context}: min exceeds max")
        if not step > 0:
            raise BadParamTypeError(f"{context}: step must be positive")
        return NumberType(low, high, step)
    if tag == "Enum":
        _check_config_keys(config, {"allowedValues"}, context)
        values = config.get("allowedValues")
        if not isinstance(values, list) or not values:
            raise BadParamTypeError(f"{context}: allowedValues must be a nonempty list")
        if any(not isinstance(v, str) for v in values):
            raise BadParamTypeError(f"{context}: allowedValues must be strings")
        if len(set(values)) != len(values):
            raise BadParamTypeError(f"{context}: allowedValues contains duplicates")
        return EnumType(tuple(values))
    if tag == "String":
        _check_config_keys(config, set(), context)
        return StringType()
    if tag == "Boolean":
        _check_config_keys(config, set(), context)
        return BooleanType()
    if tag == "Text":
        _check_config_keys(config, {"text"}, context)
        text = config.get("text", "")
        if not isinstance(text, str):
            raise BadParamTypeError(f"{context}: 'text' must be a string")
        return TextType(text)
    if tag == "Section":
        _check_config_keys(config, {"label"}, context)
        label = config.get("label", "")
        if not isinstance(label, str):
            raise BadParamTypeError(f"{context}: 'label' must be a string")
        return SectionType(label)
    raise BadParamTypeError(f"{context}: unknown parameter type {tag!r}")


def param_type_to_document(t: ParamType) -> tuple[str, dict]:
    if isinstance(t, DataTarget):
        return "DataTarget", {
            "allowedRoles": [r.value for r in t.allowed_roles],
            "required": t.required,
        }
    if isinstance(t, MultiDataTarget):
        config: dict = {
            "allowedRoles": [r.value for r in t.allowed_roles],
            "required": t.required,
        }
        if t.min_count is not None:
            config["minCount"] = t.min_count
        if t.max_count is not None:
            config["maxCount"] = t.max_count
        return "MultiDataTarget", config
    if isinstance(t, NumberType):
        return "Number", {"min": t.min, "max": t.max, "step": t.step}
    if isinstance(t, EnumType):
        return "Enum", {"allowedValues": list(t.allowed_values)}
    if isinstance(t, StringType):
        return "String", {}
    if isinstance(t, BooleanType):
        return "Boolean", {}
    if isinstance(t, TextType):
        return "Text", {"text": t.text} if t.text else {}
    if isinstance(t, SectionType):
        return "Section", {"label": t.label} if t.label else {}
    raise TypeError(f"not a parameter type: {t!r}")


# --- parameters and symbols ---------------------------------------------------

_PARAM_KEYS = {"name", "type", "config", "displayPredicate", "defaultValue"}
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _argument_from_document(value: JsonValue, context: str):
    if is_atomic(value):
        return value
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return list(value)
    raise JsonSyntaxError(f"{context}: values must be atomic or a list of strings")


def parameter_from_document(doc: JsonValue, index: int) -> Parameter:
    context = f"params[{index}]"
    if not isinstance(doc, dict):
        raise JsonSyntaxError(f"{context}: must be an object")
    unknown = set(doc) - _PARAM_KEYS
    if unknown:
        raise JsonSyntaxError(f"{context}: unknown key(s) {sorted(unknown)}")
    name = doc.get("name")
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise JsonSyntaxError(f"{context}: 'name' must be an identifier")
    ptype = param_type_from_document(doc.get("type"), doc.get("config"), f"{context} ({name})")
    display = None
    if "displayPredicate" in doc:
        source = doc["displayPredicate"]
        if not isinstance(source, str):
            raise JsonSyntaxError(f"{context}: 'displayPredicate' must be a string")
        display = predicate.parse(source)
    default = UNSET
    if "defaultValue" in doc:
        default = _argument_from_document(doc["defaultValue"], f"{context} defaultValue")
    param = Parameter(name, ptype, display, default)
    if param.has_default:
        from .model import validate_argument

        violation = validate_argument(param, param.default_value)  # type: ignore[arg-type]
        if violation is not None:
            raise BadParamTypeError(f"{context}: default value invalid: {violation.reason}")
    return param


def parameter_to_document(p: Parameter) -> dict:
    tag, config = param_type_to_document(p.type)
    doc: dict = {"name": p.name, "type": tag}
    if config:
        doc["config"] = config
    if p.display_predicate is not None:
        doc["displayPredicate"] = p.display_predicate.source
    if p.has_default:
        doc["defaultValue"] = p.default_value
    return doc


def symbol_from_document(doc: JsonValue, index: int) -> Symbol:
    context = f"symbols[{index}]"
    if not isinstance(doc, dict):
        raise JsonSyntaxError(f"{context}: must be an object")
    unknown = set(doc) - {"name", "description"}
    if unknown:
        raise JsonSyntaxError(f"{context}: unknown key(s) {sorted(unknown)}")
    name = doc.get("name")
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise JsonSyntaxError(f"{context}: 'name' must be an identifier")
    description = doc.get("description", "")
    if not isinstance(description, str):
        raise JsonSyntaxError(f"{context}: 'description' must be a string")
    return Symbol(name, description)


def symbol_to_document(s: Symbol) -> dict:
    doc: dict = {"name": s.name}
    if s.description:
        doc["description"] = s.description
    return doc


# --- templates ------------------------------------------------------------------

_TEMPLATE_KEYS = {
    "name", "description", "language", "params", "symbols", "body",
    "metadata", "version",
}
_REQUIRED_TEMPLATE_KEYS = ("name", "description", "language", "params", "symbols", "body")


def template_from_document(doc: JsonValue) -> Template:
    if not isinstance(doc, dict):
        raise JsonSyntaxError("template document must be a JSON object")
    unknown = set(doc) - _TEMPLATE_KEYS
    if unknown:
        raise UnknownTopLevelKeyError(
            f"unknown top-level key(s): {sorted(unknown)}"
        )
    for key in _REQUIRED_TEMPLATE_KEYS:
        if key not in doc:
            raise JsonSyntaxError(f"template document missing key {key!r}")
    for key in ("name", "description", "language"):
        if not isinstance(doc[key], str):
            raise JsonSyntaxError(f"{key!r} must be a string")
    if not isinstance(doc["params"], list):
        raise JsonSyntaxError("'params' must be a list")
    if not isinstance(doc["symbols"], list):
        raise JsonSyntaxError("'symbols' must be a list")

    version = doc.get("version", 1)
    if isinstance(version, bool) or not isinstance(version, int) or version < 1:
        raise JsonSyntaxError("'version' must be a positive integer")

    metadata_doc = doc.get("metadata", {})
    if not isinstance(metadata_doc, dict) or any(
        not isinstance(v, str) for v in metadata_doc.values()
    ):
        raise JsonSyntaxError("'metadata' must be an object with string values")

    return Template(
        name=doc["name"],
        description=doc["description"],
        language=doc["language"],
        params=tuple(parameter_from_document(p, i) for i, p in enumerate(doc["params"])),
        body=expression_from_document(doc["body"]),
        symbols=tuple(symbol_from_document(s, i) for i, s in enumerate(doc["symbols"])),
        metadata=dict(metadata_doc),
        version=version,
    )


def template_to_document(t: Template) -> dict:
    doc: dict = {
        "name": t.name,
        "description": t.description,
        "language": t.language,
        "params": [parameter_to_document(p) for p in t.params],
        "symbols": [symbol_to_document(s) for s in t.symbols],
        "body": expression_to_document(t.body),
    }
    if t.metadata:
        doc["metadata"] = dict(t.metadata)
    if t.version != 1:
        doc["version"] = t.version
    return doc


def parse_template(data: bytes | str) -> Template:
    return template_from_document(canonical.loads(data))


def serialize_template(t: Template) -> bytes:
    return canonical.dump_bytes(template_to_document(t))


# --- settings ---------------------------------------------------------------------

def _filter_from_document(doc: JsonValue, index: int) -> Filter:
    context = f"$filters[{index}]"
    if not isinstance(doc, dict):
        raise BadFilterShapeError(f"{context}: must be an object")
    column = doc.get("column")
    if not isinstance(column, str):
        raise BadFilterShapeError(f"{context}: 'column' must be a string")
    kind = doc.get("kind")
    if kind == "range":
        unknown = set(doc) - {"column", "kind", "min", "max"}
        if unknown:
            raise BadFilterShapeError(f"{context}: unknown key(s) {sorted(unknown)}")
        low, high = doc.get("min"), doc.get("max")
        for label, value in (("min", low), ("max", high)):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise BadFilterShapeError(f"{context}: {label!r} must be a number")
        if low > high:  # type: ignore[operator]
            raise BadFilterShapeError(f"{context}: min exceeds max")
        return RangeFilter(column, low, high)  # type: ignore[arg-type]
    if kind == "oneOf":
        unknown = set(doc) - {"column", "kind", "values"}
        if unknown:
            raise BadFilterShapeError(f"{context}: unknown key(s) {sorted(unknown)}")
        values = doc.get("values")
        if not isinstance(values, list) or not all(is_atomic(v) for v in values):
            raise BadFilterShapeError(f"{context}: 'values' must be a list of atomics")
        return OneOfFilter(column, tuple(values))
    raise BadFilterShapeError(f"{context}: 'kind' must be \"range\" or \"oneOf\"")


def _filter_to_document(f: Filter) -> dict:
    if isinstance(f, RangeFilter):
        return {"column": f.column, "kind": "range", "min": f.min, "max": f.max}
    return {"column": f.column, "kind": "oneOf", "values": list(f.values)}


def settings_from_document(doc: JsonValue) -> Settings:
    if not isinstance(doc, dict):
        raise JsonSyntaxError("settings document must be a JSON object")
    values: dict = {}
    filters: tuple[Filter, ...] = ()
    for key, value in doc.items():
        if key == FILTERS_KEY:
            if not isinstance(value, list):
                raise BadFilterShapeError("'$filters' must be a list")
            filters = tuple(_filter_from_document(f, i) for i, f in enumerate(value))
        else:
            values[key] = _argument_from_document(value, f"settings[{key!r}]")
    return Settings(values, filters)


def settings_to_document(s: Settings) -> dict:
    doc: dict = dict(s.values)
    if s.filters:
        doc[FILTERS_KEY] = [_filter_to_document(f) for f in s.filters]
    return doc


def parse_settings(data: bytes | str) -> Settings:
    return settings_from_document(canonical.loads(data))


def serialize_settings(s: Settings) -> bytes:
    return canonical.dump_bytes(settings_to_document(s))
