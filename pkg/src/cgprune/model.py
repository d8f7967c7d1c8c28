"""Core domain model: type hierarchies and call graphs.

A TypeHierarchy is a DAG of types (multiple parents are allowed, since
interfaces exist) where each type declares a set of method signatures.
A CallGraph is a set of method nodes plus call edges; each edge carries
the receiver type that was written at the call site in addition to the
resolved target.

Everything here is immutable after construction and safe to share across
threads.  Analyses elsewhere in the package are pure functions over these
values.  Construction is permissive; `validate_hierarchy` reports rule
violations instead of raising, so callers (e.g. file loaders) decide how
strict to be.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping


class GraphError(Exception):
    """Base class for errors raised by graph lookups and validation."""


class UnknownTypeError(GraphError, KeyError):
    """A type id was referenced that does not exist in the hierarchy."""

    def __init__(self, type_id: str):
        super().__init__(type_id)
        self.type_id = type_id

    def __str__(self) -> str:
        return f"unknown type id: {self.type_id!r}"


class HierarchyValidationError(GraphError):
    """Raised when a hierarchy or call graph fails validation."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"{len(violations)} violation(s): {lines}")


_SIG_RE = re.compile(r"^([^()\s][^()]*)\((.*)\):(.+)$")


@dataclass(frozen=True, order=True)
class MethodSignature:
    """Structural method signature: name, parameter types, return type.

    Two signatures declared in unrelated types compare equal if all three
    fields match; that equality is what drives origin finding and pruning.
    """

    name: str
    param_types: tuple[str, ...] = ()
    return_type: str = "void"

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("signature name must be non-empty")

    def to_text(self) -> str:
        """Canonical one-token form, e.g. ``next():java.lang.Object``."""
        return f"{self.name}({','.join(self.param_types)}):{self.return_type}"

    @classmethod
    def from_text(cls, text: str) -> "MethodSignature":
        m = _SIG_RE.match(text)
        if m is None:
            raise ValueError(f"malformed signature text: {text!r}")
        name, params, ret = m.groups()
        param_types = tuple(p for p in params.split(",") if p) if params else ()
        return cls(name=name, param_types=param_types, return_type=ret)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class TypeNode:
    """One type in the hierarchy with its declared method signatures."""

    type_id: str
    fq_name: str
    parents: tuple[str, ...]
    declared: frozenset[MethodSignature]
    project_id: str
    package_name: str = ""
    is_core_lib: bool = False

    def declares(self, sig: MethodSignature) -> bool:
        return sig in self.declared


@dataclass(frozen=True)
class TypeHierarchy:
    """All types of one analysis run, indexed by type id.

    The parent relation is expected to be acyclic; run `validate_hierarchy`
    to check.  `core_project_id` is the reserved project id shared by every
    core-library type.
    """

    types: Mapping[str, TypeNode]
    core_project_id: str = "core"

    def node(self, type_id: str) -> TypeNode:
        try:
            return self.types[type_id]
        except KeyError:
            raise UnknownTypeError(type_id) from None

    def __contains__(self, type_id: str) -> bool:
        return type_id in self.types

    def sorted_ids(self) -> list[str]:
        return sorted(self.types)


@dataclass(frozen=True, order=True)
class MethodNode:
    """A defined method: the type that holds the body plus its signature."""

    defining_type: str
    signature: MethodSignature

    @property
    def uid(self) -> str:
        """Stable textual id, e.g. ``T2::next():java.lang.Object``."""
        return f"{self.defining_type}::{self.signature.to_text()}"

    @classmethod
    def from_uid(cls, uid: str) -> "MethodNode":
        type_id, sep, sig_text = uid.partition("::")
        if not sep or not type_id:
            raise ValueError(f"malformed method node id: {uid!r}")
        return cls(type_id, MethodSignature.from_text(sig_text))

    def __str__(self) -> str:
        return self.uid


@dataclass(frozen=True, order=True)
class CallEdge:
    """One call edge: source method, resolved target method, receiver type.

    `receiver_type` is the static type written at the call site; the target
    is one concrete resolution of that call.  Edge identity is the full
    (source, target, receiver) triple.
    """

    source: MethodNode
    target: MethodNode
    receiver_type: str


@dataclass(frozen=True)
class Violation:
    """A broken hierarchy or call-graph rule, named rather than raised."""

    type_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.type_id}: {self.message}"


@dataclass(frozen=True)
class CallGraph:
    """Immutable call graph: method nodes plus canonical-ordered edges.

    Node identity is content-derived, so ids stay stable across pruning.
    `duplicate_count` records how many duplicate input edges were collapsed
    at construction time.
    """

    nodes: frozenset[MethodNode]
    edges: tuple[CallEdge, ...]
    duplicate_count: int = 0

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def sorted_nodes(self) -> list[MethodNode]:
        return sorted(self.nodes)

    @cached_property
    def outgoing(self) -> Mapping[MethodNode, tuple[CallEdge, ...]]:
        """Edges grouped by source, in canonical order."""
        out: dict[MethodNode, list[CallEdge]] = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e)
        return {n: tuple(es) for n, es in out.items()}

    def outgoing_edges(self, node: MethodNode) -> tuple[CallEdge, ...]:
        return self.outgoing.get(node, ())


def build_call_graph(
    nodes: Iterable[MethodNode],
    edges: Iterable[CallEdge],
) -> CallGraph:
    """Construct a CallGraph in canonical form.

    Duplicate (source, target, receiver) triples are collapsed and counted.
    Edge endpoints are added to the node set if missing, so the endpoint
    invariant holds by construction.
    """
    edge_list = list(edges)
    unique = set(edge_list)
    node_set = set(nodes)
    for e in unique:
        node_set.add(e.source)
        node_set.add(e.target)
    return CallGraph(
        nodes=frozenset(node_set),
        edges=tuple(sorted(unique)),
        duplicate_count=len(edge_list) - len(unique),
    )


def validate_hierarchy(h: TypeHierarchy) -> list[Violation]:
    """Check hierarchy invariants; returns one Violation per broken rule.

    Rules checked: every parent id resolves (`dangling-parent`), the parent
    relation is acyclic (`cycle`, one violation per type on a cycle), and
    core-library types carry the reserved core project id (`core-project`).
    """
    violations: list[Violation] = []
    for tid in h.sorted_ids():
        node = h.types[tid]
        for p in node.parents:
            if p not in h.types:
                violations.append(
                    Violation(tid, "dangling-parent", f"parent {p!r} does not exist")
                )
        if node.is_core_lib and node.project_id != h.core_project_id:
            violations.append(
                Violation(
                    tid,
                    "core-project",
                    f"core type has project {node.project_id!r}, "
                    f"expected {h.core_project_id!r}",
                )
            )
    for tid in sorted(_cyclic_type_ids(h)):
        violations.append(Violation(tid, "cycle", "type participates in a parent cycle"))
    return violations


def _cyclic_type_ids(h: TypeHierarchy) -> set[str]:
    """Type ids on a parent cycle (members of a nontrivial SCC or self-loop)."""
    # Iterative Tarjan over the child -> parent relation; dangling parents
    # are skipped (they are reported separately).
    index_of: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    cyclic: set[str] = set()
    counter = 0

    for root in h.sorted_ids():
        if root in index_of:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index_of[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            parents = [p for p in h.types[v].parents if p in h.types]
            if pi < len(parents):
                work[-1] = (v, pi + 1)
                w = parents[pi]
                if w not in index_of:
                    work.append((w, 0))
                elif w in on_stack:
                    lowlink[v] = min(lowlink[v], index_of[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    lowlink[u] = min(lowlink[u], lowlink[v])
                if lowlink[v] == index_of[v]:
                    scc = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        scc.append(w)
                        if w == v:
                            break
                    if len(scc) > 1 or v in h.types[v].parents:
                        cyclic.update(scc)
    return cyclic


def ancestor_depths(h: TypeHierarchy, type_id: str) -> dict[str, int]:
    """Minimal parent-edge distance to each reflexive ancestor (self = 0).

    Never loops on cyclic input; the visited set caps every type at its
    first (minimal) depth.
    """
    h.node(type_id)
    depths = {type_id: 0}
    level = [type_id]
    depth = 0
    while level:
        depth += 1
        frontier: set[str] = set()
        for tid in level:
            for p in h.node(tid).parents:
                if p not in depths:
                    frontier.add(p)
        level = sorted(frontier)
        for p in level:
            depths[p] = depth
    return depths


def ancestors_of(h: TypeHierarchy, type_id: str) -> list[str]:
    """All strict transitive ancestors of `type_id`.

    Deduplicated, ordered breadth-first by (depth, type id); the type itself
    is excluded.
    """
    depths = ancestor_depths(h, type_id)
    strict = (tid for tid in depths if tid != type_id)
    return sorted(strict, key=lambda t: (depths[t], t))


def is_reflexive_descendant(h: TypeHierarchy, ancestor: str, type_id: str) -> bool:
    """True iff `type_id` is `ancestor` itself or transitively extends it."""
    h.node(ancestor)
    if ancestor == type_id:
        h.node(type_id)
        return True
    return ancestor in ancestors_of(h, type_id)


def children_index(h: TypeHierarchy) -> dict[str, list[str]]:
    """parent id -> sorted direct children ids (inverse of the parent lists)."""
    children: dict[str, list[str]] = {tid: [] for tid in h.types}
    for tid in h.sorted_ids():
        for p in h.types[tid].parents:
            if p in h.types:
                children[p].append(tid)
    return children


def reflexive_descendants(h: TypeHierarchy, type_id: str) -> set[str]:
    """`type_id` plus every type that transitively extends it."""
    children = children_index(h)
    h.node(type_id)
    seen = {type_id}
    frontier = [type_id]
    while frontier:
        nxt = []
        for tid in frontier:
            for c in children[tid]:
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


def reverse_adjacency(cg: CallGraph) -> Mapping[MethodNode, tuple[MethodNode, ...]]:
    """Predecessor view: target -> sources, one entry per edge.

    The total entry count equals the edge count, so edge multiplicity is
    preserved exactly.
    """
    preds: dict[MethodNode, list[MethodNode]] = {}
    for e in cg.edges:
        preds.setdefault(e.target, []).append(e.source)
    return {n: tuple(ps) for n, ps in preds.items()}


def validate_call_graph(cg: CallGraph, h: TypeHierarchy) -> list[Violation]:
    """Check a call graph against its hierarchy.

    Every node's defining type must exist and declare the node's signature;
    every edge's receiver type must exist.
    """
    violations: list[Violation] = []
    for n in cg.sorted_nodes():
        if n.defining_type not in h:
            violations.append(
                Violation(n.defining_type, "unknown-type", f"node {n.uid} has no type")
            )
        elif not h.types[n.defining_type].declares(n.signature):
            violations.append(
                Violation(
                    n.defining_type,
                    "undeclared-signature",
                    f"type does not declare {n.signature.to_text()}",
                )
            )
    for e in cg.edges:
        if e.receiver_type not in h:
            violations.append(
                Violation(
                    e.receiver_type,
                    "unknown-receiver",
                    f"edge {e.source.uid} -> {e.target.uid} has unknown receiver",
                )
            )
    return violations
