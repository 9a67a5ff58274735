"""Command-line front door. Specs go to stdout, diagnostics to stderr.

Exit codes: 0 success, 1 validation or lint failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import canonical
from .config import load_config
from .data import Dataset, load_dataset
from .errors import IvyError, JsonSyntaxError
from .evaluator import apply_template
from .explore import FanOutRequest, fan_out, search_catalog
from .formats import (
    expression_from_spec,
    parse_settings,
    parse_template,
    serialize_template,
    settings_to_document,
    template_to_document,
)
from .metrics import load_manifest, verify_coverage
from .model import (
    BooleanType,
    DataRole,
    MultiDataTarget,
    NumberType,
    Parameter,
    Settings,
    Template,
    lint_template,
)
from .rewrite import suggest, templatize


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_dataset_file(path: str | None) -> Dataset | None:
    if path is None:
        return None
    if path.endswith(".csv"):
        return load_dataset(_read(path), "csv")
    if path.endswith(".json"):
        return load_dataset(_read(path), "json-array")
    raise JsonSyntaxError("dataset file must end in .csv or .json")


def _load_settings_file(path: str | None) -> Settings:
    if path is None:
        return Settings({})
    return parse_settings(_read(path))


def _emit(value, out: str | None) -> None:
    data = canonical.dump_bytes(value)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def _coerce_option(item: str, param: Parameter):
    if isinstance(param.type, NumberType):
        try:
            return int(item)
        except ValueError:
            pass
        try:
            return float(item)
        except ValueError:
            raise JsonSyntaxError(f"{param.name}: {item!r} is not a number") from None
    if isinstance(param.type, BooleanType):
        if item in ("true", "false"):
            return item == "true"
        raise JsonSyntaxError(f"{param.name}: expected true or false, got {item!r}")
    if isinstance(param.type, MultiDataTarget):
        return item.split("+")
    return item


def _parse_set_flags(t: Template, raw: list[str]) -> dict:
    declared = {p.name: p for p in t.params}
    option_sets = {}
    for entry in raw:
        if "=" not in entry:
            raise JsonSyntaxError(f"--set needs param=v1,v2 form, got {entry!r}")
        name, _, values = entry.partition("=")
        if name not in declared:
            raise JsonSyntaxError(f"--set names unknown parameter {name!r}")
        items = [v for v in values.split(",") if v != ""]
        if not items:
            raise JsonSyntaxError(f"--set {name}= has no values")
        option_sets[name] = [_coerce_option(v, declared[name]) for v in items]
    return option_sets


def _cmd_apply(args) -> int:
    t = parse_template(_read(args.template))
    s = _load_settings_file(args.settings)
    d = _load_dataset_file(args.data)
    spec = apply_template(t, s, d, validate=args.validate)
    _emit(spec, args.output)
    return 0


def _cmd_fanout(args) -> int:
    t = parse_template(_read(args.template))
    s = _load_settings_file(args.settings)
    d = _load_dataset_file(args.data)
    option_sets = _parse_set_flags(t, args.set or [])
    if not option_sets:
        raise JsonSyntaxError("fanout needs at least one --set")
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    req = FanOutRequest(template_name=t.name, base=s, option_sets=option_sets)
    result = fan_out(t, req, d, validate=args.validate, jobs=jobs)

    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for index, cell in enumerate(result.cells):
        digest = canonical.digest(settings_to_document(cell.settings))[:12]
        if cell.error is not None:
            failures += 1
            path = out_dir / f"{index:04d}-{digest}.error.json"
            path.write_bytes(canonical.dump_bytes({"error": cell.error.to_json_value()}))
            print(f"cell {index}: {cell.error}", file=sys.stderr)
        else:
            path = out_dir / f"{index:04d}-{digest}.json"
            path.write_bytes(canonical.dump_bytes(cell.spec))
    print(
        f"wrote {len(result.cells) - failures} specs"
        + (f", {failures} failed cells" if failures else "")
        + f" to {out_dir}",
        file=sys.stderr,
    )
    return 1 if failures else 0


def _cmd_search(args) -> int:
    catalog_dir = Path(args.catalog)
    templates = [
        parse_template(p.read_bytes())
        for p in sorted(catalog_dir.glob("*.ivy.json"))
    ]
    role_names = {r.value for r in DataRole}
    query = []
    for index, part in enumerate(p.strip() for p in args.roles.split(",") if p.strip()):
        if part not in role_names:
            raise JsonSyntaxError(f"unknown data role {part!r}")
        query.append((f"column{index}", DataRole(part)))
    ranked = search_catalog(templates, query)
    lines = [f"{'template':<32} {'match':<10} mapping"]
    for t, result in ranked:
        mapping = ", ".join(f"{c}->{p}" for c, p in sorted(result.mapping.items()))
        lines.append(f"{t.name:<32} {result.kind.value:<10} {mapping}")
    if not ranked:
        lines.append("(no matching templates)")
    print("\n".join(lines))
    return 0


def _suggestion_document(sg) -> dict:
    from .formats import parameter_to_document

    return {
        "id": sg.id,
        "description": sg.description,
        "path": sg.path,
        "kind": sg.kind.value,
        "param": parameter_to_document(sg.proposed_param),
        "replacement": f"[{sg.replacement.name}]",
        "original": sg.original,
    }


def _cmd_suggest(args) -> int:
    body = expression_from_spec(canonical.loads(_read(args.body)))
    d = _load_dataset_file(args.data)
    suggestions = suggest(body, args.language, d)
    _emit({"suggestions": [_suggestion_document(sg) for sg in suggestions]}, None)
    return 0


def _cmd_templatize(args) -> int:
    body = expression_from_spec(canonical.loads(_read(args.body)))
    d = _load_dataset_file(args.data)
    name = args.name or Path(args.body).stem.replace(".", "-")
    t = templatize(
        body, args.language, d, name=name, description=args.description
    )
    sys.stdout.buffer.write(serialize_template(t))
    return 0


def _cmd_validate(args) -> int:
    t = parse_template(_read(args.template))
    diagnostics = lint_template(t)
    _emit(
        [
            {"code": d.code, "subject": d.subject, "message": d.message}
            for d in diagnostics
        ],
        None,
    )
    for d in diagnostics:
        print(f"{d.code}: {d.subject}: {d.message}", file=sys.stderr)
    return 1 if diagnostics else 0


def _cmd_stats(args) -> int:
    manifest, base_dir = load_manifest(args.manifest)
    report = verify_coverage(manifest, base_dir)
    _emit(report.to_json_value(), None)
    print(report.table(), file=sys.stderr)
    return 0 if report.all_passed else 1


def _cmd_serve(args) -> int:
    from . import service

    config = load_config(args.config)
    service.run(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json-errors",
        action="store_true",
        help="emit failures as canonical JSON on stderr",
    )

    parser = argparse.ArgumentParser(
        prog="ivy",
        description="template engine for JSON visualization grammars",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", parents=[common], help="apply a template to settings")
    p.add_argument("-t", "--template", required=True)
    p.add_argument("-s", "--settings")
    p.add_argument("-d", "--data")
    p.add_argument("--validate", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_apply)

    p = sub.add_parser("fanout", parents=[common], help="cartesian sweep over option sets")
    p.add_argument("-t", "--template", required=True)
    p.add_argument("-s", "--settings")
    p.add_argument("-d", "--data")
    p.add_argument("--set", action="append", metavar="PARAM=V1,V2,...")
    p.add_argument("--jobs", type=int)
    p.add_argument("--validate", action="store_true")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(run=_cmd_fanout)

    p = sub.add_parser("search", parents=[common], help="rank catalog templates for roles")
    p.add_argument("--catalog", required=True, help="directory of *.ivy.json files")
    p.add_argument("--roles", required=True, help="comma-separated data roles")
    p.set_defaults(run=_cmd_search)

    p = sub.add_parser("suggest", parents=[common], help="templatization suggestions")
    p.add_argument("-b", "--body", required=True, help="raw spec JSON file")
    p.add_argument("-l", "--language", required=True)
    p.add_argument("-d", "--data")
    p.set_defaults(run=_cmd_suggest)

    p = sub.add_parser("templatize", parents=[common], help="apply every suggestion")
    p.add_argument("-b", "--body", required=True, help="raw spec JSON file")
    p.add_argument("-l", "--language", required=True)
    p.add_argument("-d", "--data")
    p.add_argument("--apply-all", action="store_true", help="apply all suggestions (default)")
    p.add_argument("--name")
    p.add_argument("--description", default="")
    p.set_defaults(run=_cmd_templatize)

    p = sub.add_parser("validate", parents=[common], help="lint a template document")
    p.add_argument("-t", "--template", required=True)
    p.set_defaults(run=_cmd_validate)

    p = sub.add_parser("stats", parents=[common], help="corpus coverage report")
    p.add_argument("--manifest", required=True)
    p.set_defaults(run=_cmd_stats)

    p = sub.add_parser("serve", parents=[common], help="run the registry service")
    p.add_argument("--config", help="config file (falls back to IVY_CONFIG)")
    p.set_defaults(run=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except IvyError as error:
        if args.json_errors:
            sys.stderr.write(canonical.dumps({"error": error.to_json_value()}))
        else:
            print(f"error [{error.code}]: {error}", file=sys.stderr)
        return 1
    except FileNotFoundError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
