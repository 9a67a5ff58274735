"""Grammar extension interface: per-language metadata, schema validation,
and data injection.

A language is metadata plus a vendored JSON Schema: an id, a display name,
an optional RFC 6901 pointer telling the engine where a dataset's rows may
be injected, and the name of the rewrite-rule set that understands the
grammar's idioms.  The bundled manifest pins each schema file by content
hash so validation results are reproducible.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
import threading
from dataclasses import dataclass, field
from typing import Iterable

import jsonschema

from .canonical import loads
from .errors import (
    BadSchemaError,
    DuplicateIdError,
    PointerUnresolvableError,
    UnknownLanguageError,
)
from .model import JsonValue

_MESSAGE_LIMIT = 500


@dataclass(frozen=True)
class SchemaIssue:
    """One validation failure, located by a JSON Pointer into the spec."""

    pointer: str
    message: str


@dataclass(frozen=True)
class LanguageSpec:
    id: str
    display_name: str
    schema: JsonValue
    data_injection_pointer: str | None = None
    rewrite_rule_set: str = ""


def parse_pointer(pointer: str) -> list[str]:
    """RFC 6901: split into reference tokens with ~1 and ~0 unescaped."""
    if pointer == "":
        return []
    if not pointer.startswith("/"):
        raise PointerUnresolvableError(f"pointer must start with '/': {pointer!r}")
    return [t.replace("~1", "/").replace("~0", "~") for t in pointer.split("/")[1:]]


def format_pointer(tokens: Iterable[object]) -> str:
    return "".join(
        "/" + str(t).replace("~", "~0").replace("/", "~1") for t in tokens
    )


class _Registered:
    __slots__ = ("spec", "validator")

    def __init__(self, spec: LanguageSpec, validator) -> None:
        self.spec = spec
        self.validator = validator


class LanguageRegistry:
    """Registered languages; registration at startup, lock-free reads after."""

    def __init__(self) -> None:
        self._languages: dict[str, _Registered] = {}
        self._lock = threading.Lock()

    def register_language(self, spec: LanguageSpec) -> None:
        if not isinstance(spec.schema, (dict, bool)):
            raise BadSchemaError(f"{spec.id}: schema must be an object or boolean")
        try:
            cls = jsonschema.validators.validator_for(spec.schema)
            cls.check_schema(spec.schema)
            validator = cls(spec.schema)
        except jsonschema.SchemaError as exc:
            raise BadSchemaError(f"{spec.id}: {exc.message}") from exc
        if spec.data_injection_pointer is not None:
            tokens = parse_pointer(spec.data_injection_pointer)
            if not tokens:
                raise PointerUnresolvableError(
                    f"{spec.id}: data injection pointer may not address the root"
                )
        with self._lock:
            if spec.id in self._languages:
                raise DuplicateIdError(f"language {spec.id!r} is already registered")
            self._languages[spec.id] = _Registered(spec, validator)

    def language(self, language_id: str) -> LanguageSpec:
        try:
            return self._languages[language_id].spec
        except KeyError:
            raise UnknownLanguageError(f"unknown language {language_id!r}") from None

    def language_ids(self) -> list[str]:
        return list(self._languages)

    def validate_spec(self, language_id: str, spec: JsonValue) -> list[SchemaIssue]:
        try:
            registered = self._languages[language_id]
        except KeyError:
            raise UnknownLanguageError(f"unknown language {language_id!r}") from None
        issues = []
        for error in registered.validator.iter_errors(spec):
            message = error.message
            if len(message) > _MESSAGE_LIMIT:
                message = message[:_MESSAGE_LIMIT] + "..."
            issues.append(SchemaIssue(format_pointer(error.absolute_path), message))
        return issues

    def inject_data(self, language_id: str, spec: JsonValue, rows: list) -> JsonValue:
        """Place rows at the language's injection pointer.

        A non-null value at the pointer's first token is an existing data
        binding and leaves the spec unchanged; an explicit null counts as
        absent. Only object levels are created, never array elements.
        """
        lang = self.language(language_id)
        pointer = lang.data_injection_pointer
        if pointer is None:
            raise PointerUnresolvableError(
                f"language {language_id!r} has no data injection pointer"
            )
        tokens = parse_pointer(pointer)
        if not isinstance(spec, dict):
            raise PointerUnresolvableError("can only inject into an object spec")
        if spec.get(tokens[0]) is not None:
            return spec
        for token in tokens:
            if token == "-" or token.isdigit():
                raise PointerUnresolvableError(
                    f"pointer {pointer!r} addresses an array element"
                )
        out = dict(spec)
        node = out
        for token in tokens[:-1]:
            child: dict[str, JsonValue] = {}
            node[token] = child
            node = child
        node[tokens[-1]] = rows
        return out


# --- bundled languages --------------------------------------------------------

def _read_resource(name: str) -> bytes:
    return (
        importlib.resources.files("ivyengine").joinpath("schemas").joinpath(name).read_bytes()
    )


def load_bundled_languages() -> list[LanguageSpec]:
    """Read the packaged manifest and its hash-pinned schema files."""
    manifest = json.loads(_read_resource("manifest.json"))
    specs = []
    for entry in manifest["languages"]:
        raw = _read_resource(entry["schemaFile"])
        digest = hashlib.sha256(raw).hexdigest()
        if digest != entry["schemaSha256"]:
            raise BadSchemaError(
                f"{entry['id']}: schema file {entry['schemaFile']} hash mismatch "
                f"(expected {entry['schemaSha256']}, got {digest})"
            )
        specs.append(
            LanguageSpec(
                id=entry["id"],
                display_name=entry["displayName"],
                schema=loads(raw),
                data_injection_pointer=entry["dataInjectionPointer"],
                rewrite_rule_set=entry["rewriteRuleSet"],
            )
        )
    return specs


def fresh_registry() -> LanguageRegistry:
    """A new registry preloaded with the bundled languages."""
    registry = LanguageRegistry()
    for spec in load_bundled_languages():
        registry.register_language(spec)
    return registry


_bundled: LanguageRegistry | None = None
_bundled_lock = threading.Lock()


def bundled_registry() -> LanguageRegistry:
    """The shared process-wide registry of bundled languages."""
    global _bundled
    if _bundled is None:
        with _bundled_lock:
            if _bundled is None:
                _bundled = fresh_registry()
    return _bundled
