"""Swagger / OpenAPI 2.0 document model.

Loads JSON documents, resolves local `#/definitions/...` references
eagerly (rejecting cycles and dangling targets), normalizes base URLs,
and indexes specs by base URL for prefix matching. YAML and OpenAPI 3.x
input are out of scope.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

HTTP_METHODS = ("get", "put", "post", "delete", "options", "head", "patch")

_TEMPLATE_SEGMENT = re.compile(r"^\{[^/{}]+\}$")


class SpecError(Exception):
    """Structurally invalid specification; the document is skipped."""


@dataclass
class SchemaDef:
    type: str | None = None
    properties: dict[str, "SchemaDef"] = field(default_factory=dict)
    required: list[str] = field(default_factory=list)
    items: "SchemaDef | None" = None


@dataclass
class ParamDef:
    name: str
    location: str  # path query body formData header
    required: bool = False
    type: str | None = None
    schema: SchemaDef | None = None

    def __post_init__(self) -> None:
        if self.location == "path":
            self.required = True  # path parameters are always required


@dataclass
class OperationDef:
    method: str  # upper-case
    parameters: list[ParamDef] = field(default_factory=list)

    @property
    def body_schema(self) -> SchemaDef | None:
        for p in self.parameters:
            if p.location == "body":
                return p.schema
        return None


@dataclass
class PathItem:
    parameters: list[ParamDef] = field(default_factory=list)
    operations: dict[str, OperationDef] = field(default_factory=dict)


@dataclass
class ApiSpec:
    title: str
    version: str
    schemes: list[str]
    host: str
    base_path: str
    paths: dict[str, PathItem]
    source: str = ""

    def path_templates(self) -> list[str]:
        return sorted(self.paths)


@dataclass
class SpecIndex:
    entries: list[tuple[str, ApiSpec]] = field(default_factory=list)

    def base_urls(self) -> list[str]:
        return [base for base, _ in self.entries]


def load_spec(document_text: str, source: str = "") -> ApiSpec:
    """Parse and validate one Swagger 2.0 JSON document."""
    try:
        doc = json.loads(document_text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SpecError("document is not a JSON object")
    if doc.get("swagger") != "2.0":
        raise SpecError("missing or unsupported 'swagger' version (need \"2.0\")")
    host = doc.get("host")
    if not host or not isinstance(host, str):
        raise SpecError("missing 'host'")
    raw_paths = doc.get("paths")
    if not isinstance(raw_paths, dict):
        raise SpecError("missing 'paths'")

    definitions = doc.get("definitions") or {}
    if not isinstance(definitions, dict):
        raise SpecError("'definitions' is not an object")
    resolver = _SchemaResolver(definitions)

    schemes = [s.lower() for s in doc.get("schemes", []) if isinstance(s, str)]
    schemes = [s for s in schemes if s in ("http", "https")]
    if not schemes:
        schemes = ["http", "https"]

    base_path = doc.get("basePath", "") or ""
    if base_path and not base_path.startswith("/"):
        base_path = "/" + base_path
    base_path = base_path.rstrip("/")

    paths: dict[str, PathItem] = {}
    for template, item_doc in raw_paths.items():
        if not isinstance(template, str) or not template.startswith("/"):
            raise SpecError(f"path template {template!r} must begin with '/'")
        if not isinstance(item_doc, dict):
            raise SpecError(f"path item for {template!r} is not an object")
        item = PathItem()
        item.parameters = _load_params(item_doc.get("parameters", []), resolver, template)
        _require_single_body(item.parameters, f"path item {template!r}")
        for method in HTTP_METHODS:
            if method not in item_doc:
                continue
            op_doc = item_doc[method]
            if not isinstance(op_doc, dict):
                raise SpecError(f"operation {method} {template!r} is not an object")
            op = OperationDef(method=method.upper())
            op.parameters = _load_params(op_doc.get("parameters", []), resolver,
                                         f"{method} {template}")
            _require_single_body(op.parameters, f"operation {method} {template!r}")
            item.operations[method.upper()] = op
        paths[template] = item

    info = doc.get("info") or {}
    return ApiSpec(
        title=str(info.get("title", "")),
        version=str(info.get("version", "")),
        schemes=schemes,
        host=host.lower(),
        base_path=base_path,
        paths=paths,
        source=source,
    )


def _require_single_body(params: list[ParamDef], where: str) -> None:
    bodies = [p for p in params if p.location == "body"]
    if len(bodies) > 1:
        raise SpecError(f"{where} declares more than one body parameter")


def _load_params(raw: object, resolver: "_SchemaResolver", where: str) -> list[ParamDef]:
    if raw is None:
        return []
    if not isinstance(raw, list):
        raise SpecError(f"parameters of {where} are not a list")
    params: list[ParamDef] = []
    for p in raw:
        if not isinstance(p, dict):
            raise SpecError(f"parameter entry in {where} is not an object")
        name = p.get("name")
        location = p.get("in")
        if not isinstance(name, str) or not isinstance(location, str):
            raise SpecError(f"parameter in {where} lacks 'name' or 'in'")
        schema = None
        if "schema" in p:
            schema = resolver.resolve(p["schema"])
        params.append(ParamDef(
            name=name,
            location=location,
            required=bool(p.get("required", False)),
            type=p.get("type"),
            schema=schema,
        ))
    return params


class _SchemaResolver:
    """Builds SchemaDefs with eager local-ref resolution and cycle rejection."""

    def __init__(self, definitions: dict):
        self.definitions = definitions
        self._done: dict[str, SchemaDef] = {}
        self._building: set[str] = set()

    def resolve(self, node: object) -> SchemaDef:
        if not isinstance(node, dict):
            raise SpecError("schema is not an object")
        ref = node.get("$ref")
        if ref is not None:
            if not isinstance(ref, str) or not ref.startswith("#/definitions/"):
                raise SpecError(f"unsupported $ref {ref!r} (only #/definitions/... is resolved)")
            name = ref[len("#/definitions/"):]
            return self.by_name(name)
        schema = SchemaDef(type=node.get("type"))
        required = node.get("required")
        if isinstance(required, list):
            schema.required = [r for r in required if isinstance(r, str)]
        properties = node.get("properties")
        if isinstance(properties, dict):
            for prop_name, prop_node in properties.items():
                schema.properties[prop_name] = self.resolve(prop_node)
        items = node.get("items")
        if isinstance(items, dict):
            schema.items = self.resolve(items)
        return schema

    def by_name(self, name: str) -> SchemaDef:
        if name in self._done:
            return self._done[name]
        if name in self._building:
            raise SpecError(f"reference cycle through #/definitions/{name}")
        if name not in self.definitions:
            raise SpecError(f"dangling reference #/definitions/{name}")
        self._building.add(name)
        try:
            schema = self.resolve(self.definitions[name])
        finally:
            self._building.discard(name)
        self._done[name] = schema
        return schema


def base_urls(spec: ApiSpec) -> list[str]:
    """One normalized base URL per scheme."""
    return [f"{scheme}://{spec.host}{spec.base_path}" for scheme in sorted(spec.schemes)]


def effective_params(item: PathItem, op: OperationDef) -> list[ParamDef]:
    """Union of path-level and operation-level parameters.

    On a (name, location) collision the operation-level definition wins;
    an operation-level body parameter replaces any path-level body schema
    regardless of its name.
    """
    merged: dict[tuple[str, str], ParamDef] = {}
    op_has_body = any(p.location == "body" for p in op.parameters)
    for p in item.parameters:
        if p.location == "body" and op_has_body:
            continue
        merged[(p.name, p.location)] = p
    for p in op.parameters:
        merged[(p.name, p.location)] = p
    return list(merged.values())


def effective_body_schema(item: PathItem, op: OperationDef) -> SchemaDef | None:
    for p in effective_params(item, op):
        if p.location == "body":
            return p.schema
    return None


def required_query_params(item: PathItem, op: OperationDef) -> list[str]:
    return sorted(p.name for p in effective_params(item, op)
                  if p.location == "query" and p.required)


def query_param_names(item: PathItem, op: OperationDef) -> list[str]:
    return sorted(p.name for p in effective_params(item, op) if p.location == "query")


def required_formdata_params(item: PathItem, op: OperationDef) -> list[str]:
    return sorted(p.name for p in effective_params(item, op)
                  if p.location == "formData" and p.required)


def build_index(specs: list[ApiSpec]) -> SpecIndex:
    """Index every (scheme, spec) pair; lookups return all prefix matches."""
    index = SpecIndex()
    for spec in specs:
        for base in base_urls(spec):
            index.entries.append((base, spec))
    return index


def is_template_segment(segment: str) -> bool:
    return bool(_TEMPLATE_SEGMENT.match(segment))


def template_segments(template: str) -> list[str]:
    """Segments of a path template; the root path `/` has no segments."""
    stripped = template[1:] if template.startswith("/") else template
    if stripped == "":
        return []
    return stripped.split("/")
