"""Corpus analytics: compression ratio, concatenation ratios, coverage checks.

Size is measured two ways. LOC is the line count of the canonical 2-space
pretty print. AST is a node count where each atomic, object, list,
object-field, variable reference, interpolation segment, and conditional
counts as 1 (queries are strings, not subtrees, and do not count).  The AST
measure is invariant under re-serialization that preserves key order.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import canonical
from .errors import (
    DivisionByZeroError,
    EmptyExampleSetError,
    MissingSettingsError,
)
from .evaluator import apply_template
from .formats import (
    expression_from_spec,
    expression_to_document,
    parse_settings,
    parse_template,
)
from .model import (
    Atomic,
    Conditional,
    Expression,
    InterpolatedString,
    JsonValue,
    ListExpr,
    ObjectExpr,
    Template,
    VariableRef,
)


class SizeMeasure(str, Enum):
    LOC = "LOC"
    AST = "AST"


def compression_ratio(n_examples: int, n_excluded: int, n_templates: int) -> float:
    if n_templates <= 0:
        raise DivisionByZeroError("template count must be positive")
    if n_excluded > n_examples:
        raise ValueError("excluded count exceeds example count")
    return (n_examples - n_excluded) / n_templates


def ast_node_count(expr: Expression) -> int:
    if isinstance(expr, (Atomic, VariableRef)):
        return 1
    if isinstance(expr, InterpolatedString):
        return len(expr.segments)
    if isinstance(expr, ObjectExpr):
        return 1 + sum(1 + ast_node_count(v) for v in expr.fields.values())
    if isinstance(expr, ListExpr):
        return 1 + sum(ast_node_count(v) for v in expr.items)
    if isinstance(expr, Conditional):
        total = 1
        if expr.then_branch is not None:
            total += ast_node_count(expr.then_branch)
        if expr.else_branch is not None:
            total += ast_node_count(expr.else_branch)
        return total
    raise TypeError(f"not an expression: {expr!r}")


def line_count(document: JsonValue) -> int:
    return len(canonical.dumps(document).splitlines())


def size_of_spec(spec: JsonValue, measure: SizeMeasure) -> int:
    if measure is SizeMeasure.AST:
        return ast_node_count(expression_from_spec(spec))
    return line_count(spec)


def size_of_body(body: Expression, measure: SizeMeasure) -> int:
    if measure is SizeMeasure.AST:
        return ast_node_count(body)
    return line_count(expression_to_document(body))


def concatenation_ratio(
    example_specs: list[JsonValue], template_body: Expression, measure: SizeMeasure
) -> float:
    """Total size of the covered examples over the size of the template
    that captures them."""
    if not example_specs:
        raise EmptyExampleSetError("need at least one example")
    template_size = size_of_body(template_body, measure)
    if template_size <= 0:
        raise DivisionByZeroError("template size must be positive")
    return sum(size_of_spec(s, measure) for s in example_specs) / template_size


# --- coverage verification ------------------------------------------------------

def _prune(value: JsonValue, tokens: list[str]) -> JsonValue:
    """Drop the node addressed by the pointer tokens, when it resolves."""
    if not tokens:
        return value
    head, rest = tokens[0], tokens[1:]
    if isinstance(value, dict) and head in value:
        out = dict(value)
        if rest:
            out[head] = _prune(out[head], rest)
        else:
            del out[head]
        return out
    if isinstance(value, list) and head.isdigit() and int(head) < len(value):
        out = list(value)
        if rest:
            out[int(head)] = _prune(out[int(head)], rest)
        else:
            del out[int(head)]
        return out
    return value


def structurally_equal(
    a: JsonValue, b: JsonValue, ignore_paths: list[str] = ()
) -> tuple[bool, str]:
    """Equal trees with equal key order after canonical print; on mismatch
    the second element is a short unified diff."""
    from .languages import parse_pointer

    for pointer in ignore_paths:
        tokens = parse_pointer(pointer)
        a = _prune(a, tokens)
        b = _prune(b, tokens)
    left = canonical.dumps(a)
    right = canonical.dumps(b)
    if left == right:
        return True, ""
    diff = difflib.unified_diff(
        left.splitlines(), right.splitlines(), "produced", "expected", lineterm="", n=1
    )
    return False, "\n".join(list(diff)[:24])


@dataclass(frozen=True)
class ExampleReport:
    id: str
    covered_by: str
    passed: bool
    excluded: bool = False
    reason: str = ""
    diff: str = ""

    def to_json_value(self) -> dict:
        out: dict = {"id": self.id, "coveredBy": self.covered_by, "passed": self.passed}
        if self.excluded:
            out["excluded"] = True
            out["reason"] = self.reason
        if self.diff:
            out["diff"] = self.diff
        return out


@dataclass(frozen=True)
class TemplateReport:
    name: str
    examples_covered: int
    concatenation_loc: float
    concatenation_ast: float

    def to_json_value(self) -> dict:
        return {
            "name": self.name,
            "examplesCovered": self.examples_covered,
            "concatenationRatioLOC": self.concatenation_loc,
            "concatenationRatioAST": self.concatenation_ast,
        }


@dataclass(frozen=True)
class CoverageReport:
    examples: tuple[ExampleReport, ...]
    templates: tuple[TemplateReport, ...]
    n_examples: int
    n_excluded: int
    n_templates: int
    compression: float
    reported: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.examples if not e.excluded)

    def to_json_value(self) -> dict:
        out: dict = {
            "examples": [e.to_json_value() for e in self.examples],
            "templates": [t.to_json_value() for t in self.templates],
            "counts": {
                "nExamples": self.n_examples,
                "nExcluded": self.n_excluded,
                "nTemplates": self.n_templates,
            },
            "compressionRatio": self.compression,
            "allPassed": self.all_passed,
        }
        if self.reported:
            out["reported"] = self.reported
        return out

    def table(self) -> str:
        lines = ["example                        covered by                 result"]
        for e in self.examples:
            status = "excluded" if e.excluded else ("pass" if e.passed else "FAIL")
            lines.append(f"{e.id:<30} {e.covered_by:<26} {status}")
        lines.append("")
        lines.append("template                       examples   LOC ratio  AST ratio")
        for t in self.templates:
            lines.append(
                f"{t.name:<30} {t.examples_covered:>8}   "
                f"{t.concatenation_loc:>9.3f}  {t.concatenation_ast:>9.3f}"
            )
        lines.append("")
        lines.append(
            f"examples={self.n_examples} excluded={self.n_excluded} "
            f"templates={self.n_templates} compression={self.compression:.4f}"
        )
        if self.reported:
            lines.append(
                "reported corpus: "
                f"examples={self.reported.get('nExamples')} "
                f"excluded={self.reported.get('nExcluded')} "
                f"templates={self.reported.get('nTemplates')} "
                f"compression={self.reported.get('compressionRatio'):.4f}"
            )
        return "\n".join(lines)


def load_manifest(path: str | Path) -> tuple[dict, Path]:
    manifest_path = Path(path)
    manifest = canonical.loads(manifest_path.read_bytes())
    if not isinstance(manifest, dict):
        raise ValueError("manifest must be a JSON object")
    return manifest, manifest_path.parent


def verify_coverage(manifest: dict, base_dir: str | Path) -> CoverageReport:
    """Check that each non-excluded example is reproduced by its template
    under the settings supplied alongside the manifest."""
    base = Path(base_dir)

    templates: dict[str, Template] = {}
    for rel in manifest.get("templates", []):
        t = parse_template((base / rel).read_bytes())
        templates[t.name] = t

    example_reports: list[ExampleReport] = []
    covered: dict[str, list[JsonValue]] = {name: [] for name in templates}
    n_excluded = 0

    for entry in manifest.get("examples", []):
        example_id = entry["id"]
        covered_by = entry["coveredBy"]
        if covered_by == "excluded":
            n_excluded += 1
            example_reports.append(
                ExampleReport(
                    id=example_id,
                    covered_by="excluded",
                    passed=True,
                    excluded=True,
                    reason=entry.get("reason", ""),
                )
            )
            continue
        if covered_by not in templates:
            raise ValueError(f"example {example_id!r} names unknown template {covered_by!r}")
        if "settings" not in entry:
            raise MissingSettingsError(f"example {example_id!r} has no settings file")
        spec = canonical.loads((base / entry["spec"]).read_bytes())
        settings = parse_settings((base / entry["settings"]).read_bytes())
        produced = apply_template(templates[covered_by], settings, validate=False)
        ok, diff = structurally_equal(produced, spec, entry.get("ignorePaths", ()))
        covered[covered_by].append(spec)
        example_reports.append(
            ExampleReport(id=example_id, covered_by=covered_by, passed=ok, diff=diff)
        )

    template_reports = []
    for name, t in templates.items():
        specs = covered[name]
        if specs:
            template_reports.append(
                TemplateReport(
                    name=name,
                    examples_covered=len(specs),
                    concatenation_loc=concatenation_ratio(specs, t.body, SizeMeasure.LOC),
                    concatenation_ast=concatenation_ratio(specs, t.body, SizeMeasure.AST),
                )
            )
        else:
            template_reports.append(TemplateReport(name, 0, 0.0, 0.0))

    n_examples = len(manifest.get("examples", []))
    n_templates = len(templates)
    compression = compression_ratio(n_examples, n_excluded, n_templates)

    reported = {}
    counts = manifest.get("metadata", {}).get("reportedCounts")
    if counts:
        reported = {
            "nExamples": counts["nExamples"],
            "nExcluded": counts["nExcluded"],
            "nTemplates": counts["nTemplates"],
            "compressionRatio": compression_ratio(
                counts["nExamples"], counts["nExcluded"], counts["nTemplates"]
            ),
        }

    return CoverageReport(
        examples=tuple(example_reports),
        templates=tuple(template_reports),
        n_examples=n_examples,
        n_excluded=n_excluded,
        n_templates=n_templates,
        compression=compression,
        reported=reported,
    )
