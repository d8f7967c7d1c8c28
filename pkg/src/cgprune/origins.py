"""Origin analysis: map call targets to the first declaration of their signature.

The origin of a method is the type highest up the hierarchy that first
declares its signature; every override below it is a derivative.  A handful
of origins (think ``Iterator.next``) typically account for a large share of
call-graph edges, which is what makes them pruning candidates.

When a signature is introduced independently by several unrelated ancestors
(e.g. two interfaces both declaring ``close()``), the full candidate set is
kept as diagnostics and the entry is chosen by the smallest
(depth-from-target, type id) key so results are deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

from .model import (
    CallGraph,
    MethodNode,
    MethodSignature,
    TypeHierarchy,
    ancestor_depths,
)


@dataclass(frozen=True, order=True)
class OriginRef:
    """The first declaration of a signature: origin type plus the signature."""

    origin_type: str
    signature: MethodSignature

    def render(self, h: TypeHierarchy | None = None) -> str:
        """Readable form, with the fully-qualified type name when available."""
        name = self.origin_type
        if h is not None and self.origin_type in h:
            name = h.types[self.origin_type].fq_name
        return f"{name}.{self.signature.to_text()}"


@dataclass(frozen=True)
class OriginMap:
    """Origin of every distinct edge-target method of one call graph.

    `ambiguous` holds the full candidate set for targets whose signature has
    several independent first declarations; `entries` already contains the
    deterministically chosen one.
    """

    entries: Mapping[MethodNode, OriginRef]
    ambiguous: Mapping[MethodNode, tuple[OriginRef, ...]] = field(default_factory=dict)

    def origin_of(self, node: MethodNode) -> OriginRef:
        return self.entries[node]

    def derivatives(self) -> dict[OriginRef, list[MethodNode]]:
        """Nodes grouped by their origin, each group in canonical order."""
        groups: dict[OriginRef, list[MethodNode]] = {}
        for node in sorted(self.entries):
            groups.setdefault(self.entries[node], []).append(node)
        return groups


@dataclass(frozen=True)
class OriginFrequencyTable:
    """Origins ranked by how many edges target one of their derivatives."""

    rows: tuple[tuple[OriginRef, int], ...]

    @property
    def total_edges(self) -> int:
        return sum(count for _, count in self.rows)

    def top(self, n: int) -> tuple[tuple[OriginRef, int], ...]:
        return self.rows[: max(n, 0)]


@dataclass(frozen=True)
class ExclusionList:
    """Origins whose derivatives are pruning candidates, grouped by signature.

    `declared_size` is the Top-N the list was built from, which can exceed
    the number of entries when the frequency table is shorter than N.
    """

    by_signature: Mapping[MethodSignature, frozenset[str]]
    declared_size: int

    def pair_count(self) -> int:
        return sum(len(types) for types in self.by_signature.values())

    def sorted_pairs(self) -> list[tuple[MethodSignature, str]]:
        return sorted(
            (sig, tid)
            for sig, types in self.by_signature.items()
            for tid in types
        )


def _first_declarers(
    h: TypeHierarchy,
    type_id: str,
    sig: MethodSignature,
    ancestor_cache: dict[str, frozenset[str]],
) -> list[OriginRef]:
    """Minimal first declarations of `sig` above (or at) `type_id`.

    Ordered by (depth from the type, type id); the head of the list is the
    canonical origin.
    """

    def strict_ancestors(tid: str) -> frozenset[str]:
        cached = ancestor_cache.get(tid)
        if cached is None:
            depths = ancestor_depths(h, tid)
            cached = frozenset(t for t in depths if t != tid)
            ancestor_cache[tid] = cached
        return cached

    depths = ancestor_depths(h, type_id)
    declarers = [tid for tid in depths if h.types[tid].declares(sig)]
    minimal = [
        tid
        for tid in declarers
        if not any(h.types[a].declares(sig) for a in strict_ancestors(tid))
    ]
    if not minimal:
        # target type does not declare its own signature (invalid graphs
        # only); fall back to self-origin so the map stays total
        minimal = [type_id]
    minimal.sort(key=lambda tid: (depths[tid], tid))
    return [OriginRef(tid, sig) for tid in minimal]


def find_origins(cg: CallGraph, h: TypeHierarchy) -> OriginMap:
    """Map every distinct edge target to its origin declaration.

    A method whose signature is not declared by any strict ancestor is its
    own origin.  Fully deterministic: ties between independent first
    declarations resolve by (depth, type id) and the losing candidates are
    exposed through `OriginMap.ambiguous`.
    """
    targets = sorted({e.target for e in cg.edges})
    entries: dict[MethodNode, OriginRef] = {}
    ambiguous: dict[MethodNode, tuple[OriginRef, ...]] = {}
    memo: dict[tuple[str, MethodSignature], list[OriginRef]] = {}
    ancestor_cache: dict[str, frozenset[str]] = {}
    for node in targets:
        key = (node.defining_type, node.signature)
        candidates = memo.get(key)
        if candidates is None:
            candidates = _first_declarers(
                h, node.defining_type, node.signature, ancestor_cache
            )
            memo[key] = candidates
        entries[node] = candidates[0]
        if len(candidates) > 1:
            ambiguous[node] = tuple(candidates)
    return OriginMap(entries=entries, ambiguous=ambiguous)


def _ranked(counts: Counter) -> tuple[tuple[OriginRef, int], ...]:
    """Descending by count; ties by (origin type, signature)."""
    return tuple(
        sorted(
            counts.items(),
            key=lambda item: (-item[1], item[0].origin_type, item[0].signature),
        )
    )


def origin_edge_frequencies(cg: CallGraph, origins: OriginMap) -> OriginFrequencyTable:
    """Rank origins by the number of edges targeting one of their derivatives.

    The counts sum to the edge count of the graph; the origin map must be
    total over the graph's edge targets.
    """
    counts: Counter = Counter()
    for e in cg.edges:
        try:
            counts[origins.entries[e.target]] += 1
        except KeyError:
            raise KeyError(
                f"origin map is not total: missing target {e.target.uid}"
            ) from None
    return OriginFrequencyTable(rows=_ranked(counts))


def unique_derivative_counts(
    cg: CallGraph, origins: OriginMap
) -> list[tuple[OriginRef, int]]:
    """Distinct derivative methods per origin, ranked like the frequency table."""
    for e in cg.edges:
        if e.target not in origins.entries:
            raise KeyError(f"origin map is not total: missing target {e.target.uid}")
    counts: Counter = Counter(origins.entries.values())
    return list(_ranked(counts))


def build_exclusion_list(table: OriginFrequencyTable, n: int) -> ExclusionList:
    """Group the first min(n, len(rows)) frequency rows by signature."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    grouped: dict[MethodSignature, set[str]] = {}
    for origin, _count in table.rows[:n]:
        grouped.setdefault(origin.signature, set()).add(origin.origin_type)
    return ExclusionList(
        by_signature={sig: frozenset(types) for sig, types in grouped.items()},
        declared_size=n,
    )
