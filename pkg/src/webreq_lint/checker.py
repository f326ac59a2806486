"""Conformance checking of extracted requests against indexed specifications.

A request is checked as the cross product of its candidate URLs, methods,
and data values: if any combination matches some specification endpoint,
the request is consistent and nothing is reported. Otherwise the finding
carries the deepest stage any combination reached, in the order
base -> path -> method -> payload/query.

Symbolic URL fragments act as wildcards during path matching, and
template variables act as wildcards in the other direction; a symbolic
fragment is however constrained to a single path segment, so a variable
that would have to span a `/` keeps the request from matching
(deliberately conservative). A symbolic fragment inside the base-URL
region makes the request unresolvable instead of inconsistent.
"""

from __future__ import annotations

import json
import urllib.parse
from dataclasses import dataclass, field
from enum import Enum

from webreq_lint.extraction import RequestDescriptor
from webreq_lint.openapi import (
    ApiSpec, OperationDef, PathItem, SchemaDef, SpecIndex,
    effective_body_schema, is_template_segment, query_param_names,
    required_formdata_params, required_query_params, template_segments,
)
from webreq_lint.values import (
    DNull, DObj, DStr, DSym, DataValue, LitSeg, StringValue, SymSeg,
)


class Outcome(str, Enum):
    CONSISTENT = "Consistent"
    NO_SPEC_MATCHED = "NoSpecMatched"
    PATH_MISMATCH = "PathMismatch"
    METHOD_MISMATCH = "MethodMismatch"
    PAYLOAD_MISMATCH = "PayloadMismatch"
    QUERY_MISMATCH = "QueryMismatch"
    UNRESOLVED = "Unresolved"

    def __str__(self) -> str:  # pragma: no cover
        return self.value


MISMATCH_OUTCOMES = (
    Outcome.NO_SPEC_MATCHED, Outcome.PATH_MISMATCH, Outcome.METHOD_MISMATCH,
    Outcome.PAYLOAD_MISMATCH, Outcome.QUERY_MISMATCH,
)


@dataclass
class CheckConfig:
    jquery_get_data_as_query: bool = False


@dataclass
class Finding:
    file: str
    line: int
    outcome: Outcome
    urls: list[str]
    note: str = ""
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class UrlParts:
    """A candidate URL split for matching.

    `leading_lit` is the literal text before the first symbolic fragment
    (the base-URL candidate region). Query keys are percent-decoded;
    `query_unresolved` is set when a symbolic fragment may hide the query
    string (a trailing variable) or occupies a key position.
    """

    value: StringValue
    leading_lit: str
    has_sym_after_lead: bool
    pre_query: StringValue
    query_pairs: tuple[tuple[str, StringValue], ...]
    query_unresolved: bool

    def render(self) -> str:
        return self.value.render()

    @property
    def query_keys(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.query_pairs)


@dataclass(frozen=True)
class EndpointMatch:
    spec: ApiSpec
    template: str
    item: PathItem = field(compare=False)
    operation: OperationDef = field(compare=False)

    @property
    def method(self) -> str:
        return self.operation.method


def split_url(value: StringValue) -> UrlParts:
    segments = value.segments
    leading_lit = segments[0].text if segments and isinstance(segments[0], LitSeg) else ""
    has_sym_after_lead = any(isinstance(s, SymSeg) for s in segments)

    pre, query, found = _split_at_question_mark(value)
    query_pairs: list[tuple[str, StringValue]] = []
    query_unresolved = False
    if found:
        for pair in _split_string_value(query, "&"):
            if not pair.segments:
                continue
            key_sv, val_sv, has_eq = _split_first(pair, "=")
            if not key_sv.is_literal:
                query_unresolved = True
                continue
            key = urllib.parse.unquote_plus(key_sv.literal_text)
            query_pairs.append((key, val_sv if has_eq else StringValue.literal("")))
    else:
        # no literal '?': a trailing symbolic fragment may still carry one
        path_segments = _split_string_value(pre, "/")
        if path_segments and not path_segments[-1].is_literal:
            query_unresolved = True
    return UrlParts(
        value=value,
        leading_lit=leading_lit,
        has_sym_after_lead=has_sym_after_lead,
        pre_query=pre,
        query_pairs=tuple(query_pairs),
        query_unresolved=query_unresolved,
    )


def _split_at_question_mark(value: StringValue) -> tuple[StringValue, StringValue, bool]:
    for i, seg in enumerate(value.segments):
        if isinstance(seg, LitSeg) and "?" in seg.text:
            before, after = seg.text.split("?", 1)
            pre = StringValue.of(*value.segments[:i], LitSeg(before))
            query = StringValue.of(LitSeg(after), *value.segments[i + 1:])
            return pre, query, True
    return value, StringValue.literal(""), False


def _split_string_value(value: StringValue, sep: str) -> list[StringValue]:
    parts: list[list] = [[]]
    for seg in value.segments:
        if isinstance(seg, SymSeg):
            parts[-1].append(seg)
            continue
        pieces = seg.text.split(sep)
        parts[-1].append(LitSeg(pieces[0]))
        for piece in pieces[1:]:
            parts.append([LitSeg(piece)])
    return [StringValue.of(*p) for p in parts]


def _split_first(value: StringValue, sep: str) -> tuple[StringValue, StringValue, bool]:
    for i, seg in enumerate(value.segments):
        if isinstance(seg, LitSeg) and sep in seg.text:
            before, after = seg.text.split(sep, 1)
            left = StringValue.of(*value.segments[:i], LitSeg(before))
            right = StringValue.of(LitSeg(after), *value.segments[i + 1:])
            return left, right, True
    return value, StringValue.literal(""), False


# --- base matching -----------------------------------------------------------


def _normalized_lead(lit: str) -> str:
    """Lower-case the scheme and authority portion; path case is preserved."""
    marker = lit.find("://")
    if marker < 0:
        return lit.lower()
    path_start = len(lit)
    for i in range(marker + 3, len(lit)):
        if lit[i] in "/?#":
            path_start = i
            break
    return lit[:path_start].lower() + lit[path_start:]


def _base_prefix_match(lead: str, base: str) -> bool:
    if not lead.startswith(base):
        return False
    return len(lead) == len(base) or lead[len(base)] in "/?"


def match_base(url: StringValue, index: SpecIndex) -> list[ApiSpec]:
    """Specs whose base URL is a literal prefix of the URL."""
    matched, _ = base_candidates(split_url(url), index)
    seen: list[ApiSpec] = []
    for _, spec in matched:
        if spec not in seen:
            seen.append(spec)
    return seen


def base_candidates(url: UrlParts, index: SpecIndex) -> tuple[list[tuple[str, ApiSpec]], bool]:
    """(matching (base, spec) pairs, whether a symbolic base prevented a verdict)."""
    lead = _normalized_lead(url.leading_lit)
    matched: list[tuple[str, ApiSpec]] = []
    symbolic = False
    for base, spec in index.entries:
        if _base_prefix_match(lead, base):
            matched.append((base, spec))
        elif url.has_sym_after_lead and base.startswith(lead):
            symbolic = True
    return matched, symbolic


# --- path matching -----------------------------------------------------------


def url_path_segments(url: UrlParts, base: str) -> list[StringValue] | None:
    """Path segments of the URL after truncating `base`; None if it cannot apply."""
    lead = _normalized_lead(url.leading_lit)
    if not lead.startswith(base):
        return None
    remainder = _drop_prefix(url.pre_query, len(base))
    segments = _split_string_value(remainder, "/")
    if segments and segments[0].is_literal and segments[0].literal_text == "":
        segments = segments[1:]  # leading '/'
    if segments and segments[-1].is_literal and segments[-1].literal_text == "" \
            and len(segments) == 1:
        segments = []  # bare trailing slash right after the base
    return segments


def _drop_prefix(value: StringValue, n: int) -> StringValue:
    out = []
    remaining = n
    for seg in value.segments:
        if remaining == 0:
            out.append(seg)
            continue
        if isinstance(seg, SymSeg):
            out.append(seg)
            continue
        if len(seg.text) <= remaining:
            remaining -= len(seg.text)
            continue
        out.append(LitSeg(seg.text[remaining:]))
        remaining = 0
    return StringValue.of(*out)


def match_path(url: UrlParts, spec: ApiSpec) -> list[tuple[str, PathItem]]:
    """Templates whose segments all match; wildcards on both sides.

    A symbolic URL segment matches exactly one template segment, and a
    `{var}` template segment matches exactly one URL segment.
    """
    results: list[tuple[str, PathItem]] = []
    for base in _spec_bases_for(url, spec):
        segments = url_path_segments(url, base)
        if segments is None:
            continue
        for template in spec.path_templates():
            t_segs = template_segments(template)
            if len(t_segs) != len(segments):
                continue
            if all(_segment_matches(u, t) for u, t in zip(segments, t_segs)):
                if (template, spec.paths[template]) not in results:
                    results.append((template, spec.paths[template]))
    return results


def _spec_bases_for(url: UrlParts, spec: ApiSpec) -> list[str]:
    from webreq_lint.openapi import base_urls
    lead = _normalized_lead(url.leading_lit)
    return [b for b in base_urls(spec) if _base_prefix_match(lead, b)]


def _segment_matches(url_seg: StringValue, template_seg: str) -> bool:
    if any(isinstance(s, SymSeg) for s in url_seg.segments):
        return True
    if is_template_segment(template_seg):
        return True
    return url_seg.literal_text == template_seg


# --- method matching ----------------------------------------------------------


def _is_symbolic_method(token: str) -> bool:
    return token.startswith("{") and token.endswith("}")


def effective_methods(methods: tuple[str, ...] | set[str]) -> list[str]:
    """The request's methods; an empty set defaults to GET."""
    tokens = sorted(set(methods))
    return tokens if tokens else ["GET"]


def match_method(methods, candidates: list[tuple[ApiSpec, str, PathItem]]) -> list[EndpointMatch]:
    """Endpoint matches whose path item defines one of the request's methods."""
    matches: list[EndpointMatch] = []
    for token in effective_methods(methods):
        for spec, template, item in candidates:
            if _is_symbolic_method(token):
                ops = [item.operations[m] for m in sorted(item.operations)]
            elif token in item.operations:
                ops = [item.operations[token]]
            else:
                ops = []
            for op in ops:
                m = EndpointMatch(spec=spec, template=template, item=item, operation=op)
                if m not in matches:
                    matches.append(m)
    return matches


# --- payload checking ----------------------------------------------------------


@dataclass
class PayloadResult:
    ok: bool
    applicable: bool
    missing: list[str] = field(default_factory=list)


def payload_applicable(matches: list[EndpointMatch]) -> bool:
    """The payload check applies only when every matched endpoint defines a schema."""
    return bool(matches) and all(
        effective_body_schema(m.item, m.operation) is not None for m in matches)


def data_satisfies_schema(data: DataValue | None, schema: SchemaDef) -> tuple[bool, list[str]]:
    """Required-property presence check; symbolic values satisfy any schema."""
    if data is None:
        return True, []  # no payload was extracted; nothing to contradict
    if isinstance(data, DSym):
        return True, []
    if isinstance(data, DStr):
        if not data.value.is_literal:
            return True, []
        # JSON-encoded literal payloads are parsed and then checked
        try:
            parsed = json.loads(data.value.literal_text)
        except json.JSONDecodeError:
            parsed = None
        if isinstance(parsed, dict):
            return _jsonable_satisfies(parsed, schema)
        return (not schema.required), list(schema.required)
    if isinstance(data, DObj):
        missing: list[str] = []
        for prop in schema.required:
            value = data.get(prop)
            if value is None:
                missing.append(prop)
                continue
            sub_schema = schema.properties.get(prop)
            if sub_schema is not None and isinstance(value, (DObj, DStr)):
                ok, sub_missing = data_satisfies_schema(value, sub_schema)
                if not ok:
                    missing.extend(f"{prop}.{m}" for m in sub_missing)
        return (not missing), missing
    # a fully known non-object payload cannot carry required properties
    return (not schema.required), list(schema.required)


def _jsonable_satisfies(obj: dict, schema: SchemaDef) -> tuple[bool, list[str]]:
    missing: list[str] = []
    for prop in schema.required:
        if prop not in obj:
            missing.append(prop)
            continue
        sub_schema = schema.properties.get(prop)
        if sub_schema is not None and isinstance(obj[prop], dict):
            ok, sub_missing = _jsonable_satisfies(obj[prop], sub_schema)
            if not ok:
                missing.extend(f"{prop}.{m}" for m in sub_missing)
    return (not missing), missing


def _formdata_satisfied(data: DataValue | None, match: EndpointMatch) -> tuple[bool, list[str]]:
    """Required formData params are checked only against fully literal objects."""
    required = required_formdata_params(match.item, match.operation)
    if not required:
        return True, []
    if not isinstance(data, DObj):
        return True, []
    from webreq_lint.values import data_is_fully_literal
    if not data_is_fully_literal(data):
        return True, []
    missing = [name for name in required if data.get(name) is None]
    return (not missing), missing


def check_payload(data, matches: list[EndpointMatch]) -> PayloadResult:
    """Whether some (data, endpoint) combination satisfies a body schema."""
    applicable = payload_applicable(matches)
    data_values = list(data) if data else [None]
    all_missing: list[str] = []
    for m in matches:
        for d in data_values:
            ok_schema, missing = (True, [])
            if applicable:
                schema = effective_body_schema(m.item, m.operation)
                ok_schema, missing = data_satisfies_schema(d, schema)
            ok_form, form_missing = _formdata_satisfied(d, m)
            if ok_schema and ok_form:
                return PayloadResult(ok=True, applicable=applicable)
            all_missing.extend(missing + form_missing)
    return PayloadResult(ok=not matches, applicable=applicable,
                         missing=sorted(set(all_missing)))


# --- query checking --------------------------------------------------------------


@dataclass
class QueryResult:
    ok: bool
    applicable: bool
    missing: list[str] = field(default_factory=list)
    extra: list[str] = field(default_factory=list)
    warned: bool = False


def query_applicable(matches: list[EndpointMatch]) -> bool:
    """The query check applies only when every matched endpoint requires a parameter."""
    return bool(matches) and all(
        required_query_params(m.item, m.operation) for m in matches)


def _data_query_keys(data: DataValue | None) -> list[str] | None:
    if isinstance(data, DObj):
        return list(data.keys)
    if isinstance(data, DStr) and data.value.is_literal:
        pairs = urllib.parse.parse_qsl(data.value.literal_text, keep_blank_values=True)
        return [k for k, _ in pairs]
    return None


def check_query(urls: list[UrlParts], data, matches: list[EndpointMatch],
                config: CheckConfig | None = None,
                methods: tuple[str, ...] = ()) -> QueryResult:
    """Whether some URL (plus GET data, when enabled) carries every required parameter."""
    config = config or CheckConfig()
    if not query_applicable(matches):
        return QueryResult(ok=True, applicable=False)
    data_values = list(data) if data else [None]
    tokens = effective_methods(tuple(methods))
    all_missing: list[str] = []
    all_extra: list[str] = []
    warned = False
    for url in urls:
        for m in matches:
            for d in data_values:
                ok, missing, extra, w = _combo_query(url, d, m, tokens, config)
                warned = warned or w
                if ok:
                    return QueryResult(ok=True, applicable=True, extra=extra, warned=w)
                all_missing.extend(missing)
                all_extra.extend(extra)
    return QueryResult(ok=False, applicable=True,
                       missing=sorted(set(all_missing)),
                       extra=sorted(set(all_extra)), warned=warned)


# --- request checking --------------------------------------------------------------


def _combo_query(url: UrlParts, data: DataValue | None, match: EndpointMatch,
                 tokens: list[str], config: CheckConfig) -> tuple[bool, list[str], list[str], bool]:
    """(ok, missing, extra, warned) for one (url, data, endpoint) combination."""
    required = required_query_params(match.item, match.operation)
    known = set(query_param_names(match.item, match.operation))
    keys = set(url.query_keys)
    if config.jquery_get_data_as_query and any(
            t == "GET" or _is_symbolic_method(t) for t in tokens):
        extra_keys = _data_query_keys(data)
        if extra_keys:
            keys |= set(extra_keys)
    missing = [name for name in required if name not in keys]
    warned = False
    if url.query_unresolved and missing:
        # the query string may be hidden inside a trailing variable
        warned = True
        missing = []
    return (not missing), missing, sorted(keys - known), warned


def _levenshtein(a: str, b: str, cap: int = 3) -> int:
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if min(cur) > cap:
            return cap + 1
        prev = cur
    return prev[-1]


def _near_miss_templates(url: UrlParts, specs: list[ApiSpec],
                         max_distance: int = 2) -> list[dict]:
    """Templates within a small edit distance of the URL path (typo hints)."""
    hints: list[dict] = []
    seen: set[str] = set()
    for spec in specs:
        for base in _spec_bases_for(url, spec):
            segments = url_path_segments(url, base)
            if segments is None:
                continue
            path_text = "/" + "/".join(s.render() for s in segments)
            for template in spec.path_templates():
                if template in seen:
                    continue
                distance = _levenshtein(path_text, template, cap=max_distance)
                if 0 < distance <= max_distance:
                    seen.add(template)
                    hints.append({"template": template, "distance": distance})
    hints.sort(key=lambda h: (h["distance"], h["template"]))
    return hints


def _port_of(url: UrlParts) -> str | None:
    lead = _normalized_lead(url.leading_lit)
    marker = lead.find("://")
    if marker < 0:
        return None
    authority = lead[marker + 3:].split("/", 1)[0].split("?", 1)[0]
    if ":" in authority:
        return authority.rsplit(":", 1)[1]
    return None


def check_request(descriptor: RequestDescriptor, index: SpecIndex,
                  config: CheckConfig | None = None) -> Finding:
    """Categorize one request; the outcome is the deepest stage reached."""
    config = config or CheckConfig()
    rendered_urls = sorted(u.render() for u in descriptor.urls)
    finding = Finding(file=descriptor.site.file, line=descriptor.site.line,
                      outcome=Outcome.CONSISTENT, urls=rendered_urls)

    urls = [split_url(u) for u in descriptor.urls]

    # stage 1: base URLs
    base_matched: list[tuple[UrlParts, ApiSpec]] = []
    any_definite_miss = False
    any_symbolic = False
    for url in urls:
        pairs, symbolic = base_candidates(url, index)
        specs_seen: list[ApiSpec] = []
        for _, spec in pairs:
            if spec not in specs_seen:
                specs_seen.append(spec)
        for spec in specs_seen:
            base_matched.append((url, spec))
        if symbolic and not pairs:
            any_symbolic = True
        elif not pairs:
            any_definite_miss = True
    if not base_matched:
        ports = sorted({p for p in (_port_of(u) for u in urls) if p})
        if any_definite_miss or not any_symbolic:
            finding.outcome = Outcome.NO_SPEC_MATCHED
            finding.note = "no specification base URL matches this request"
            if ports:
                finding.note += f" (URL carries port {', '.join(ports)})"
                finding.evidence["ports"] = ports
            finding.evidence["known_base_urls"] = index.base_urls()
        else:
            finding.outcome = Outcome.UNRESOLVED
            finding.note = "symbolic value in the base URL; request not checkable"
        return finding

    # stage 2: paths
    path_matched: list[tuple[UrlParts, ApiSpec, str, PathItem]] = []
    for url, spec in base_matched:
        for template, item in match_path(url, spec):
            path_matched.append((url, spec, template, item))
    if not path_matched:
        finding.outcome = Outcome.PATH_MISMATCH
        specs = []
        for _, spec in base_matched:
            if spec not in specs:
                specs.append(spec)
        hints: list[dict] = []
        for url, _ in base_matched:
            for hint in _near_miss_templates(url, specs):
                if hint not in hints:
                    hints.append(hint)
        hints.sort(key=lambda h: (h["distance"], h["template"]))
        finding.evidence["specs"] = sorted({s.title or s.host for s in specs})
        if hints:
            finding.evidence["nearest_templates"] = hints
            finding.note = f"possible typo: nearest path is {hints[0]['template']}"
        else:
            finding.note = "no path template matches; the endpoint may be deprecated or misspelled"
        return finding

    # stage 3: methods
    matched: list[tuple[UrlParts, EndpointMatch]] = []
    for url, spec, template, item in path_matched:
        for em in match_method(descriptor.methods, [(spec, template, item)]):
            pair = (url, em)
            if pair not in matched:
                matched.append(pair)
    if not matched:
        allowed = sorted({m for _, _, _, item in path_matched for m in item.operations})
        finding.outcome = Outcome.METHOD_MISMATCH
        finding.evidence["request_methods"] = effective_methods(descriptor.methods)
        finding.evidence["allowed_methods"] = allowed
        finding.note = (f"method {'/'.join(effective_methods(descriptor.methods))} "
                        f"not allowed; specification defines {', '.join(allowed)}")
        return finding

    # stage 4: payload and query over full combinations; both checks apply
    # only when every matched endpoint states the corresponding requirement
    endpoints = []
    for _, em in matched:
        if em not in endpoints:
            endpoints.append(em)
    pay_applicable = payload_applicable(endpoints)
    qry_applicable = query_applicable(endpoints)
    data_values: list[DataValue | None] = list(descriptor.data) or [None]
    tokens = effective_methods(descriptor.methods)

    payload_ok_somewhere = not pay_applicable
    combo_pass = False
    warned = False
    missing_payload: list[str] = []
    missing_query: list[str] = []
    extra_query: list[str] = []

    for url, em in matched:
        for d in data_values:
            p_ok = True
            if pay_applicable:
                schema = effective_body_schema(em.item, em.operation)
                p_ok, p_missing = data_satisfies_schema(d, schema)
                if not p_ok:
                    missing_payload.extend(p_missing)
            form_ok, form_missing = _formdata_satisfied(d, em)
            if not form_ok:
                missing_payload.extend(form_missing)
                p_ok = False
            q_ok, q_missing, q_extra, q_warned = _combo_query(
                url, d, em, tokens, config) if qry_applicable else (True, [], [], False)
            extra_query.extend(q_extra)
            missing_query.extend(q_missing)
            payload_ok_somewhere = payload_ok_somewhere or p_ok
            if p_ok and q_ok:
                combo_pass = True
                warned = warned or q_warned

    if extra_query:
        finding.evidence["extra_query_params"] = sorted(set(extra_query))
    if combo_pass:
        finding.outcome = Outcome.CONSISTENT
        if warned:
            finding.evidence["warnings"] = [
                "query parameters not verified: URL ends in a symbolic value"]
        return finding
    if pay_applicable and not payload_ok_somewhere:
        finding.outcome = Outcome.PAYLOAD_MISMATCH
        finding.evidence["missing_payload_properties"] = sorted(set(missing_payload))
        finding.note = ("payload lacks required properties: "
                        + ", ".join(sorted(set(missing_payload))))
        return finding
    finding.outcome = Outcome.QUERY_MISMATCH
    finding.evidence["missing_query_params"] = sorted(set(missing_query))
    finding.note = ("required query parameters missing from URL: "
                    + ", ".join(sorted(set(missing_query))))
    return finding
