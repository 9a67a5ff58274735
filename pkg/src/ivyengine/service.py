"""Shared template server: publish, fork, list, fetch, plus engine endpoints.

Persistence is an append-only log (one JSON line per publish event) next to
one canonical document file per (name, version).  Document files are written
to a temp path and swapped in with os.replace, so readers never observe a
partial template; replaying the log reconstructs the exact store state.

All responses are canonical JSON bytes, so equal states serve equal bytes.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError

from . import canonical
from .config import EngineConfig
from .data import Dataset, load_dataset
from .errors import (
    IvyError,
    JsonSyntaxError,
    SettingsViolationError,
    UnknownTemplateError,
    VersionConflictError,
)
from .evaluator import apply_template, visible_params
from .explore import FanOutRequest, fan_out, search_catalog, translate_settings
from .formats import (
    expression_from_document,
    parameter_to_document,
    settings_from_document,
    settings_to_document,
    serialize_template,
    template_from_document,
)
from .languages import bundled_registry
from .model import DataRole, Settings, Template, Violation, validate_argument
from .rewrite import suggest

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")


@dataclass(frozen=True)
class StoredTemplate:
    template: Template
    document: bytes  # canonical serialization, served verbatim on fetch
    owner: str
    created_at: str
    fork_of: tuple[str, int] | None = None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class TemplateStore:
    """Append-only, file-backed; writes serialized, reads lock-free."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "templates").mkdir(exist_ok=True)
        self._log_path = self.root / "log.jsonl"
        self._lock = threading.Lock()
        self._by_name: dict[str, list[StoredTemplate]] = {}
        self._replay()

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        for line in self._log_path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            event = canonical.loads(line)
            document = (self.root / event["file"]).read_bytes()
            template = template_from_document(canonical.loads(document))
            fork_of = tuple(event["forkOf"]) if event.get("forkOf") else None
            stored = StoredTemplate(
                template=template,
                document=document,
                owner=event["owner"],
                created_at=event["createdAt"],
                fork_of=fork_of,
            )
            self._by_name.setdefault(event["name"], []).append(stored)

    def _persist(self, stored: StoredTemplate) -> None:
        name, version = stored.template.name, stored.template.version
        rel = f"templates/{name}/{version}.json"
        target = self.root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_suffix(".json.tmp")
        tmp.write_bytes(stored.document)
        os.replace(tmp, target)
        event = {
            "event": "publish",
            "name": name,
            "version": version,
            "owner": stored.owner,
            "createdAt": stored.created_at,
            "forkOf": list(stored.fork_of) if stored.fork_of else None,
            "file": rel,
        }
        line = json.dumps(event, separators=(",", ":"), ensure_ascii=False)
        with open(self._log_path, "a", encoding="utf-8") as log:
            log.write(line + "\n")
            log.flush()
            os.fsync(log.fileno())

    def publish(
        self,
        template: Template,
        owner: str,
        expected_version: int | None = None,
        fork_of: tuple[str, int] | None = None,
    ) -> StoredTemplate:
        if not _NAME_RE.match(template.name):
            raise JsonSyntaxError(
                f"template name {template.name!r} is not a valid identifier"
            )
        with self._lock:
            history = self._by_name.get(template.name, [])
            latest = history[-1].template.version if history else 0
            if expected_version is not None and expected_version != latest:
                raise VersionConflictError(
                    f"expected version {expected_version}, latest is {latest}"
                )
            versioned = template.with_version(latest + 1)
            stored = StoredTemplate(
                template=versioned,
                document=serialize_template(versioned),
                owner=owner,
                created_at=_now(),
                fork_of=fork_of,
            )
            self._persist(stored)
            self._by_name.setdefault(template.name, []).append(stored)
            return stored

    def fork(self, source_name: str, new_name: str, owner: str) -> StoredTemplate:
        source = self.latest(source_name)
        renamed = Template(
            name=new_name,
            description=source.template.description,
            language=source.template.language,
            params=source.template.params,
            body=source.template.body,
            symbols=source.template.symbols,
            metadata=dict(source.template.metadata),
        )
        return self.publish(
            renamed,
            owner,
            fork_of=(source.template.name, source.template.version),
        )

    def latest(self, name: str) -> StoredTemplate:
        history = self._by_name.get(name)
        if not history:
            raise UnknownTemplateError(f"no template named {name!r}")
        return history[-1]

    def names(self) -> list[str]:
        return sorted(self._by_name)

    def all_latest(self) -> list[StoredTemplate]:
        return [self._by_name[name][-1] for name in self.names()]


def _canonical_response(value, status_code: int = 200) -> Response:
    return Response(
        content=canonical.dump_bytes(value),
        status_code=status_code,
        media_type="application/json",
    )


def _error_response(error: IvyError) -> Response:
    return _canonical_response({"error": error.to_json_value()}, error.http_status)


def _summary(stored: StoredTemplate) -> dict:
    t = stored.template
    out: dict = {
        "name": t.name,
        "version": t.version,
        "description": t.description,
        "language": t.language,
        "owner": stored.owner,
        "createdAt": stored.created_at,
    }
    if stored.fork_of:
        out["forkOf"] = {"name": stored.fork_of[0], "version": stored.fork_of[1]}
    return out


def _roles_query(raw: str) -> list[tuple[str, DataRole]]:
    names = {r.value for r in DataRole}
    query = []
    for index, part in enumerate(p.strip() for p in raw.split(",") if p.strip()):
        if part not in names:
            raise JsonSyntaxError(f"unknown data role {part!r} in roles query")
        query.append((f"column{index}", DataRole(part)))
    return query


async def _read_json(request: Request):
    return canonical.loads(await request.body())


def create_app(config: EngineConfig | None = None, registry=None) -> FastAPI:
    cfg = config if config is not None else EngineConfig()
    reg = registry if registry is not None else bundled_registry()
    store = TemplateStore(cfg.store_dir)
    datasets: dict[str, Dataset] = {}

    app = FastAPI(title="ivy registry", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.config = cfg

    @app.exception_handler(IvyError)
    async def on_ivy_error(request: Request, error: IvyError) -> Response:
        return _error_response(error)

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, error: RequestValidationError) -> Response:
        return _error_response(JsonSyntaxError(str(error)))

    def resolve_template(ref) -> Template:
        if isinstance(ref, str):
            return store.latest(ref).template
        return template_from_document(ref)

    def resolve_dataset(ref) -> Dataset | None:
        if ref is None:
            return None
        if not isinstance(ref, str) or ref not in datasets:
            raise JsonSyntaxError(f"unknown dataset {ref!r}")
        return datasets[ref]

    def parse_body_settings(doc) -> Settings:
        if doc is None:
            return Settings({})
        return settings_from_document(doc)

    @app.get("/health")
    async def health() -> Response:
        return _canonical_response({"status": "ok"})

    @app.post("/templates")
    async def publish(request: Request) -> Response:
        document = await _read_json(request)
        template = template_from_document(document)
        expected = None
        if "if-match" in request.headers:
            raw = request.headers["if-match"].strip().strip('"')
            try:
                expected = int(raw)
            except ValueError:
                raise JsonSyntaxError(f"If-Match must be an integer version, got {raw!r}")
        owner = request.headers.get("x-ivy-owner", "anonymous")
        stored = store.publish(template, owner, expected_version=expected)
        return _canonical_response(_summary(stored), status_code=201)

    @app.get("/templates")
    async def list_templates(roles: str | None = None) -> Response:
        latest = store.all_latest()
        if roles is None:
            return _canonical_response({"templates": [_summary(s) for s in latest]})
        query = _roles_query(roles)
        by_name = {s.template.name: s for s in latest}
        ranked = search_catalog([s.template for s in latest], query)
        results = []
        for template, match in ranked:
            entry = _summary(by_name[template.name])
            entry["match"] = {"kind": match.kind.value, "mapping": match.mapping}
            results.append(entry)
        return _canonical_response({"templates": results})

    @app.get("/templates/{name}")
    async def fetch(name: str) -> Response:
        stored = store.latest(name)
        return Response(content=stored.document, media_type="application/json")

    @app.post("/templates/{name}/fork")
    async def fork(name: str, request: Request) -> Response:
        body = await _read_json(request)
        if not isinstance(body, dict) or not isinstance(body.get("name"), str):
            raise JsonSyntaxError("fork body must be an object with a 'name' string")
        owner = request.headers.get("x-ivy-owner", "anonymous")
        stored = store.fork(name, body["name"], owner)
        return _canonical_response(_summary(stored), status_code=201)

    @app.post("/apply")
    async def apply(request: Request) -> Response:
        body = await _read_json(request)
        if not isinstance(body, dict) or "template" not in body:
            raise JsonSyntaxError("apply body must be an object with 'template'")
        template = resolve_template(body["template"])
        settings = parse_body_settings(body.get("settings"))
        dataset = resolve_dataset(body.get("dataset"))
        validate = body.get("validate", True)
        violations = _settings_violations(template, settings)
        if violations:
            raise SettingsViolationError(violations)
        spec = apply_template(
            template, settings, dataset, registry=reg, validate=bool(validate)
        )
        return _canonical_response(spec)

    @app.post("/visible-params")
    async def visible(request: Request) -> Response:
        body = await _read_json(request)
        if not isinstance(body, dict) or "template" not in body:
            raise JsonSyntaxError("body must be an object with 'template'")
        template = resolve_template(body["template"])
        settings = parse_body_settings(body.get("settings"))
        return _canonical_response({"visible": visible_params(template, settings)})

    @app.post("/fanout")
    async def fanout(request: Request) -> Response:
        body = await _read_json(request)
        if not isinstance(body, dict) or "template" not in body:
            raise JsonSyntaxError("fanout body must be an object with 'template'")
        template = resolve_template(body["template"])
        option_sets = body.get("optionSets")
        if not isinstance(option_sets, dict) or not option_sets:
            raise JsonSyntaxError("'optionSets' must be a nonempty object")
        req = FanOutRequest(
            template_name=template.name,
            base=parse_body_settings(body.get("settings")),
            option_sets=option_sets,
        )
        dataset = resolve_dataset(body.get("dataset"))
        result = fan_out(
            template,
            req,
            dataset,
            registry=reg,
            validate=bool(body.get("validate", True)),
            jobs=body.get("jobs"),
        )
        cells = []
        for cell in result.cells:
            entry: dict = {"settings": settings_to_document(cell.settings)}
            if cell.error is not None:
                entry["error"] = cell.error.to_json_value()
            else:
                entry["spec"] = cell.spec
            cells.append(entry)
        return _canonical_response({"cells": cells})

    @app.post("/suggest")
    async def suggest_endpoint(request: Request) -> Response:
        body = await _read_json(request)
        if not isinstance(body, dict) or "body" not in body or "language" not in body:
            raise JsonSyntaxError("suggest body must carry 'body' and 'language'")
        expr = expression_from_document(body["body"])
        columns = body.get("columns", [])
        dataset = None
        if columns:
            from .data import Column

            parsed = []
            for entry in columns:
                if (
                    not isinstance(entry, dict)
                    or not isinstance(entry.get("name"), str)
                    or entry.get("role") not in {r.value for r in DataRole}
                ):
                    raise JsonSyntaxError(
                        "'columns' entries must be {name, role} objects"
                    )
                parsed.append(Column(entry["name"], DataRole(entry["role"])))
            dataset = Dataset(tuple(parsed), [])
        suggestions = suggest(expr, body["language"], dataset, registry=reg)
        out = []
        for sg in suggestions:
            out.append(
                {
                    "id": sg.id,
                    "description": sg.description,
                    "path": sg.path,
                    "kind": sg.kind.value,
                    "param": parameter_to_document(sg.proposed_param),
                    "replacement": f"[{sg.replacement.name}]",
                    "original": sg.original,
                }
            )
        return _canonical_response({"suggestions": out})

    @app.post("/translate")
    async def translate(request: Request) -> Response:
        body = await _read_json(request)
        if not isinstance(body, dict) or "from" not in body or "to" not in body:
            raise JsonSyntaxError("translate body must carry 'from' and 'to'")
        source = resolve_template(body["from"])
        target = resolve_template(body["to"])
        settings = parse_body_settings(body.get("settings"))
        roles = None
        if "roles" in body:
            role_names = {r.value for r in DataRole}
            roles = {}
            for name, role in body["roles"].items():
                if role not in role_names:
                    raise JsonSyntaxError(f"unknown data role {role!r}")
                roles[name] = DataRole(role)
        result = translate_settings(source, target, settings, roles)
        return _canonical_response(
            {
                "settings": settings_to_document(result.settings),
                "flag": result.flag.value,
                "dropped": list(result.dropped),
            }
        )

    @app.post("/datasets")
    async def upload_dataset(file: UploadFile) -> Response:
        raw = await file.read()
        name = file.filename or "dataset"
        if name.endswith(".csv"):
            format = "csv"
        elif name.endswith(".json"):
            format = "json-array"
        else:
            raise JsonSyntaxError("dataset file must be .csv or .json")
        dataset = load_dataset(raw, format, max_bytes=cfg.max_dataset_bytes)
        dataset_id = "d" + hashlib.sha256(raw).hexdigest()[:12]
        datasets[dataset_id] = dataset
        return _canonical_response(
            {
                "id": dataset_id,
                "rowCount": len(dataset.rows),
                "columns": [
                    {"name": c.name, "role": c.role.value} for c in dataset.columns
                ],
            },
            status_code=201,
        )

    return app


def _settings_violations(t: Template, s: Settings) -> list[Violation]:
    declared = {p.name: p for p in t.params}
    violations = []
    for name, value in s.values.items():
        if name not in declared:
            violations.append(Violation(name, "no such parameter"))
            continue
        v = validate_argument(declared[name], value)
        if v is not None:
            violations.append(v)
    return violations


def run(config: EngineConfig) -> None:
    """Blocking server start (CLI `serve`)."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
