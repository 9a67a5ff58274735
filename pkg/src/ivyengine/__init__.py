"""ivy-engine: parameterized templates over JSON visualization grammars.

Templates are functions from typed parameter settings to JSON specs:
bodies are JSON supersets with bracket variables and conditional sections,
applied by substituting arguments and evaluating conditionals with deletion
semantics.  The package also ships catalog search over data roles, fan-out
sweeps, templatization suggestions, corpus metrics, a registry service, and
a CLI.
"""

from .canonical import digest, dump_bytes, dumps, loads
from .data import Column, Dataset, apply_filters, infer_role, load_dataset
from .errors import (
    BadConditionalShapeError,
    BadFilterShapeError,
    BadParamTypeError,
    BadPredicateError,
    BadSchemaError,
    DatasetTooLargeError,
    DivisionByZeroError,
    DuplicateIdError,
    EmptyDatasetError,
    EmptyExampleSetError,
    IvyError,
    JsonSyntaxError,
    MissingSettingsError,
    NoMatchError,
    NonFlatJsonError,
    PointerUnresolvableError,
    RaggedCsvError,
    SchemaViolationError,
    SettingsViolationError,
    StalePathError,
    TopLevelBottomError,
    UnknownColumnError,
    UnknownLanguageError,
    UnknownTemplateError,
    UnknownTopLevelKeyError,
    VersionConflictError,
)
from .evaluator import (
    BOTTOM,
    apply_template,
    effective_settings,
    eval_predicate,
    evaluate,
    evaluate_outcome,
    substitute,
    visible_params,
)
from .explore import (
    FanOutCell,
    FanOutRequest,
    FanOutResult,
    TranslationResult,
    add_to_shelf,
    fan_out,
    match_template,
    search_catalog,
    translate_settings,
)
from .formats import (
    expression_from_document,
    expression_from_spec,
    expression_to_document,
    parse_settings,
    parse_template,
    serialize_settings,
    serialize_template,
    settings_from_document,
    settings_to_document,
    template_from_document,
    template_to_document,
)
from .languages import (
    LanguageRegistry,
    LanguageSpec,
    SchemaIssue,
    bundled_registry,
    fresh_registry,
)
from .metrics import (
    CoverageReport,
    SizeMeasure,
    ast_node_count,
    compression_ratio,
    concatenation_ratio,
    verify_coverage,
)
from .model import (
    ALL_ROLES,
    Atomic,
    BooleanType,
    Conditional,
    DataRole,
    DataTarget,
    Diagnostic,
    EnumType,
    InterpolatedString,
    ListExpr,
    MatchKind,
    MatchResult,
    MultiDataTarget,
    NumberType,
    ObjectExpr,
    OneOfFilter,
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
    Violation,
    lint_template,
    validate_argument,
)
from .predicate import Predicate, parse as parse_predicate
from .rewrite import (
    Suggestion,
    SuggestionKind,
    apply_suggestion,
    suggest,
    templatize,
)

__version__ = "0.1.0"
