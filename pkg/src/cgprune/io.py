"""Interchange files: line-delimited JSON for hierarchies and call graphs.

Each file is a stream of one-line JSON records: a header first (schema
version plus, for hierarchies, the project table), then the payload records.
Readers process one line at a time, so graph size never dictates parser
memory.  Writers emit canonical ordering and key-sorted records, making the
files byte-stable for a given value.

Loading validates: malformed lines raise RecordFormatError with file and
line position, wrong versions raise SchemaVersionError naming both versions,
and semantic violations (dangling parents, unknown types) surface as
HierarchyValidationError listing each offence.
"""

from __future__ import annotations

import json
from typing import Iterator, TextIO

from .model import (
    CallEdge,
    CallGraph,
    GraphError,
    MethodNode,
    MethodSignature,
    TypeHierarchy,
    TypeNode,
    build_call_graph,
    HierarchyValidationError,
    validate_call_graph,
    validate_hierarchy,
)

SCHEMA_VERSION = 1


class SchemaVersionError(GraphError):
    """File was written with a schema this reader does not support."""

    def __init__(self, path: str, found: object, supported: int):
        self.found = found
        self.supported = supported
        super().__init__(
            f"{path}: file has schema version {found!r}, "
            f"reader supports version {supported}"
        )


class RecordFormatError(GraphError):
    """A record line could not be parsed; carries file and line position."""

    def __init__(self, path: str, line: int, problem: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {problem}")


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _records(path: str, fh: TextIO) -> Iterator[tuple[int, dict]]:
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordFormatError(path, lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(record, dict) or "kind" not in record:
            raise RecordFormatError(path, lineno, "record must be an object with a 'kind'")
        yield lineno, record


def _check_header(path: str, lineno: int, record: dict, content: str) -> None:
    if record.get("kind") != "header":
        raise RecordFormatError(path, lineno, "first record must be the header")
    if record.get("schema") != SCHEMA_VERSION:
        raise SchemaVersionError(path, record.get("schema"), SCHEMA_VERSION)
    if record.get("content") != content:
        raise RecordFormatError(
            path,
            lineno,
            f"expected a {content} file, found content {record.get('content')!r}",
        )


def save_hierarchy(h: TypeHierarchy, path: str) -> None:
    """Write a hierarchy as header plus one type record per line."""
    projects = sorted({t.project_id for t in h.types.values()})
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump({
            "kind": "header",
            "schema": SCHEMA_VERSION,
            "content": "hierarchy",
            "core_project": h.core_project_id,
            "projects": projects,
        }) + "\n")
        for tid in h.sorted_ids():
            t = h.types[tid]
            fh.write(_dump({
                "kind": "type",
                "id": t.type_id,
                "fq": t.fq_name,
                "parents": list(t.parents),
                "declares": sorted(sig.to_text() for sig in t.declared),
                "project": t.project_id,
                "package": t.package_name,
                "core": t.is_core_lib,
            }) + "\n")


def load_hierarchy(path: str) -> TypeHierarchy:
    """Read and validate a hierarchy file.

    Raises SchemaVersionError, RecordFormatError (with position), or
    HierarchyValidationError when the parsed hierarchy breaks its rules.
    """
    types: dict[str, TypeNode] = {}
    core_project = "core"
    saw_header = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, record in _records(path, fh):
            if not saw_header:
                _check_header(path, lineno, record, "hierarchy")
                core_project = record.get("core_project", "core")
                saw_header = True
                continue
            if record["kind"] != "type":
                raise RecordFormatError(
                    path, lineno, f"unexpected record kind {record['kind']!r}"
                )
            try:
                tid = record["id"]
                node = TypeNode(
                    type_id=tid,
                    fq_name=record["fq"],
                    parents=tuple(record["parents"]),
                    declared=frozenset(
                        MethodSignature.from_text(s) for s in record["declares"]
                    ),
                    project_id=record["project"],
                    package_name=record.get("package", ""),
                    is_core_lib=bool(record.get("core", False)),
                )
            except KeyError as exc:
                raise RecordFormatError(
                    path, lineno, f"type record missing field {exc.args[0]!r}"
                ) from None
            except ValueError as exc:
                raise RecordFormatError(path, lineno, str(exc)) from None
            if tid in types:
                raise RecordFormatError(path, lineno, f"duplicate type id {tid!r}")
            types[tid] = node
    if not saw_header:
        raise RecordFormatError(path, 1, "empty file: missing header record")
    h = TypeHierarchy(types=types, core_project_id=core_project)
    violations = validate_hierarchy(h)
    if violations:
        raise HierarchyValidationError(violations)
    return h


def save_call_graph(cg: CallGraph, path: str) -> None:
    """Write a call graph as header, node records, then edge records."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump({
            "kind": "header",
            "schema": SCHEMA_VERSION,
            "content": "callgraph",
        }) + "\n")
        for node in cg.sorted_nodes():
            fh.write(_dump({"kind": "node", "id": node.uid}) + "\n")
        for e in cg.edges:
            fh.write(_dump({
                "kind": "edge",
                "src": e.source.uid,
                "dst": e.target.uid,
                "recv": e.receiver_type,
            }) + "\n")


def load_call_graph(path: str, h: TypeHierarchy) -> CallGraph:
    """Read a call graph file and validate it against its hierarchy.

    Edge endpoints become nodes even without an explicit node record;
    explicit node records exist to carry isolated methods.
    """
    nodes: list[MethodNode] = []
    edges: list[CallEdge] = []
    saw_header = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, record in _records(path, fh):
            if not saw_header:
                _check_header(path, lineno, record, "callgraph")
                saw_header = True
                continue
            try:
                if record["kind"] == "node":
                    nodes.append(MethodNode.from_uid(record["id"]))
                elif record["kind"] == "edge":
                    edges.append(CallEdge(
                        source=MethodNode.from_uid(record["src"]),
                        target=MethodNode.from_uid(record["dst"]),
                        receiver_type=record["recv"],
                    ))
                else:
                    raise RecordFormatError(
                        path, lineno, f"unexpected record kind {record['kind']!r}"
                    )
            except KeyError as exc:
                raise RecordFormatError(
                    path, lineno, f"record missing field {exc.args[0]!r}"
                ) from None
            except ValueError as exc:
                raise RecordFormatError(path, lineno, str(exc)) from None
    if not saw_header:
        raise RecordFormatError(path, 1, "empty file: missing header record")
    cg = build_call_graph(nodes, edges)
    violations = validate_call_graph(cg, h)
    if violations:
        raise HierarchyValidationError(violations)
    return cg


def apply_core_prefixes(h: TypeHierarchy, prefixes: list[str]) -> TypeHierarchy:
    """Re-flag types under any of the given name prefixes as core library.

    A type matches when its fully-qualified name or package starts with a
    prefix; matched types move into the hierarchy's core project so the
    core-project validation rule keeps holding.
    """
    if not prefixes:
        return h
    types = dict(h.types)
    for tid, t in types.items():
        hit = any(
            t.fq_name.startswith(p) or (t.package_name and t.package_name.startswith(p))
            for p in prefixes
        )
        if hit and not t.is_core_lib:
            types[tid] = TypeNode(
                type_id=t.type_id,
                fq_name=t.fq_name,
                parents=t.parents,
                declared=t.declared,
                project_id=h.core_project_id,
                package_name=t.package_name,
                is_core_lib=True,
            )
    return TypeHierarchy(types=types, core_project_id=h.core_project_id)
