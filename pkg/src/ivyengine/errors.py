"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` (surfaced by the CLI's
``--json-errors`` mode and the service's HTTP error mapping) and an
``http_status`` used when the error crosses the service boundary.
"""

from __future__ import annotations


class IvyError(Exception):
    """Base class for all engine errors."""

    code = "Error"
    http_status = 400

    def __init__(self, message: str, **detail: object) -> None:
        super().__init__(message)
        self.detail = dict(detail)

    def to_json_value(self) -> dict:
        out: dict = {"error": self.code, "message": str(self)}
        if self.detail:
            out["detail"] = self.detail
        return out


# --- document parsing ---------------------------------------------------

class JsonSyntaxError(IvyError):
    code = "JsonSyntax"


class UnknownTopLevelKeyError(IvyError):
    code = "UnknownTopLevelKey"


class BadParamTypeError(IvyError):
    code = "BadParamType"


class BadPredicateError(IvyError):
    code = "BadPredicate"

    def __init__(self, message: str, position: int, source: str = "") -> None:
        super().__init__(message, position=position, source=source)
        self.position = position
        self.source = source


class BadConditionalShapeError(IvyError):
    code = "BadConditionalShape"


class BadFilterShapeError(IvyError):
    code = "BadFilterShape"


# --- evaluation ----------------------------------------------------------

class TopLevelBottomError(IvyError):
    """The whole spec evaluated to the deletion marker; a template bug."""

    code = "TopLevelBottom"
    http_status = 422


class SettingsViolationError(IvyError):
    """One or more settings values failed validate_argument."""

    code = "SettingsViolation"
    http_status = 422

    def __init__(self, violations) -> None:
        self.violations = tuple(violations)
        detail = [{"parameter": v.parameter, "reason": v.reason} for v in self.violations]
        summary = "; ".join(f"{v.parameter}: {v.reason}" for v in self.violations)
        super().__init__(f"invalid settings: {summary}", violations=detail)


class SchemaViolationError(IvyError):
    code = "SchemaViolation"
    http_status = 422

    def __init__(self, errors) -> None:
        self.errors = tuple(errors)
        detail = [{"pointer": e.pointer, "message": e.message} for e in self.errors]
        super().__init__(
            f"spec violates the language schema ({len(self.errors)} error(s))",
            schemaErrors=detail,
        )


# --- languages -----------------------------------------------------------

class UnknownLanguageError(IvyError):
    code = "UnknownLanguage"


class DuplicateIdError(IvyError):
    code = "DuplicateId"
    http_status = 409


class BadSchemaError(IvyError):
    code = "BadSchema"


class PointerUnresolvableError(IvyError):
    code = "PointerUnresolvable"


# --- data ----------------------------------------------------------------

class RaggedCsvError(IvyError):
    code = "RaggedCsv"


class NonFlatJsonError(IvyError):
    code = "NonFlatJson"


class EmptyDatasetError(IvyError):
    code = "EmptyDataset"


class DatasetTooLargeError(IvyError):
    code = "DatasetTooLarge"


class UnknownColumnError(IvyError):
    code = "UnknownColumn"


# --- explore / rewrite ---------------------------------------------------

class NoMatchError(IvyError):
    code = "NoMatch"
    http_status = 422


class StalePathError(IvyError):
    code = "StalePath"
    http_status = 409


# --- metrics -------------------------------------------------------------

class DivisionByZeroError(IvyError, ZeroDivisionError):
    code = "DivisionByZero"


class EmptyExampleSetError(IvyError):
    code = "EmptyExampleSet"


class MissingSettingsError(IvyError):
    code = "MissingSettings"


# --- registry service ----------------------------------------------------

class UnknownTemplateError(IvyError):
    code = "UnknownTemplate"
    http_status = 404


class VersionConflictError(IvyError):
    code = "VersionConflict"
    http_status = 409
