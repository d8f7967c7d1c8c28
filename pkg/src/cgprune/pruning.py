"""Edge pruning against an exclusion list of high-frequency origins.

An edge is a candidate when its target's signature appears in the exclusion
list and the target's defining type descends (reflexively) from one of the
listed origin types.  Exhaustive mode drops every candidate; selective mode
asks a decision oracle per candidate and only drops those it condemns with
confidence strictly above a threshold.  Nodes are never removed, so node-set
metrics stay comparable before and after.

The exclusion list travels as a small tab-separated text file so runs can be
repeated on other machines byte for byte.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Mapping, Protocol

from .model import (
    CallEdge,
    CallGraph,
    MethodSignature,
    TypeHierarchy,
    children_index,
    is_reflexive_descendant,
)
from .origins import ExclusionList


@dataclass(frozen=True)
class PruneDecision:
    """Oracle verdict on one candidate edge."""

    prune: bool
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


class PruneDecisionOracle(Protocol):
    """Pluggable judge for candidate edges.

    `context` is an opaque record (method texts, features, anything) that a
    caller may attach per edge; the built-in oracles ignore it.
    """

    def decide(self, edge: CallEdge, context: object = None) -> PruneDecision: ...


class KeepAllOracle:
    """Condemns nothing; selective pruning becomes the identity."""

    def decide(self, edge: CallEdge, context: object = None) -> PruneDecision:
        return PruneDecision(prune=False, confidence=1.0)


class PruneAllOracle:
    """Condemns every candidate with full confidence."""

    def decide(self, edge: CallEdge, context: object = None) -> PruneDecision:
        return PruneDecision(prune=True, confidence=1.0)


class FixedTableOracle:
    """Replays decisions from a prepared edge table; unknown edges are kept."""

    def __init__(
        self,
        table: Mapping[CallEdge, PruneDecision],
        default: PruneDecision = PruneDecision(prune=False, confidence=1.0),
    ) -> None:
        self.table = dict(table)
        self.default = default

    def decide(self, edge: CallEdge, context: object = None) -> PruneDecision:
        return self.table.get(edge, self.default)


@dataclass(frozen=True)
class PruneResult:
    """Outcome of one pruning pass.

    candidate_edges counts edges matching the exclusion list; pruned_edges
    counts those actually removed (equal in exhaustive mode).  oracle_failures
    counts candidates kept because the oracle raised.
    """

    pruned_graph: CallGraph
    candidate_edges: int
    pruned_edges: int
    reduction_ratio: float
    elapsed: float
    oracle_failures: int = 0


def not_excluded(
    excl: ExclusionList,
    target_sig: MethodSignature,
    target_type: str,
    h: TypeHierarchy,
) -> bool:
    """True when an edge with this target survives the exclusion list.

    Signature match alone is not enough: the target's type must also descend
    from one of the origin types listed for that signature.
    """
    origin_types = excl.by_signature.get(target_sig)
    if not origin_types:
        return True
    return not any(
        is_reflexive_descendant(h, origin, target_type) for origin in origin_types
    )


def _excluded_cones(
    excl: ExclusionList, h: TypeHierarchy
) -> dict[MethodSignature, frozenset[str]]:
    """Per signature, every type that descends from a listed origin.

    Precomputing the descendant cones keeps the edge scan itself a flat
    membership test.
    """
    children = children_index(h)
    cones: dict[MethodSignature, frozenset[str]] = {}
    for sig, origin_types in excl.by_signature.items():
        reached: set[str] = set()
        for origin in origin_types:
            h.node(origin)
            queue = [origin]
            while queue:
                tid = queue.pop()
                if tid in reached:
                    continue
                reached.add(tid)
                queue.extend(children.get(tid, ()))
        cones[sig] = frozenset(reached)
    return cones


def prune_exhaustive(
    cg: CallGraph, excl: ExclusionList, h: TypeHierarchy
) -> PruneResult:
    """Drop every edge targeting a derivative of a listed origin.

    One linear scan over the edges after the descendant cones are
    precomputed.  Idempotent: the surviving edges contain no candidates.
    """
    start = time.perf_counter()
    cones = _excluded_cones(excl, h)
    kept = []
    pruned = 0
    for e in cg.edges:
        cone = cones.get(e.target.signature)
        if cone is not None and e.target.defining_type in cone:
            pruned += 1
        else:
            kept.append(e)
    elapsed = time.perf_counter() - start
    ratio = pruned / cg.edge_count if cg.edge_count else 0.0
    return PruneResult(
        pruned_graph=CallGraph(nodes=cg.nodes, edges=tuple(kept)),
        candidate_edges=pruned,
        pruned_edges=pruned,
        reduction_ratio=ratio,
        elapsed=elapsed,
    )


def prune_selective(
    cg: CallGraph,
    excl: ExclusionList,
    h: TypeHierarchy,
    oracle: PruneDecisionOracle,
    threshold: float = 0.95,
    context_provider: Callable[[CallEdge], object] | None = None,
) -> PruneResult:
    """Drop candidates the oracle condemns with confidence above `threshold`.

    The comparison is strict, so a threshold of 1.0 keeps everything.  An
    oracle failure keeps the edge (conservative) and is counted, never
    raised.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    start = time.perf_counter()
    cones = _excluded_cones(excl, h)
    kept = []
    candidates = 0
    pruned = 0
    failures = 0
    for e in cg.edges:
        cone = cones.get(e.target.signature)
        if cone is None or e.target.defining_type not in cone:
            kept.append(e)
            continue
        candidates += 1
        context = context_provider(e) if context_provider is not None else None
        try:
            decision = oracle.decide(e, context)
        except Exception:
            failures += 1
            kept.append(e)
            continue
        if decision.prune and decision.confidence > threshold:
            pruned += 1
        else:
            kept.append(e)
    elapsed = time.perf_counter() - start
    ratio = pruned / cg.edge_count if cg.edge_count else 0.0
    return PruneResult(
        pruned_graph=CallGraph(nodes=cg.nodes, edges=tuple(kept)),
        candidate_edges=candidates,
        pruned_edges=pruned,
        reduction_ratio=ratio,
        elapsed=elapsed,
        oracle_failures=failures,
    )


def save_exclusion_list(excl: ExclusionList, path: str, h: TypeHierarchy) -> None:
    """Write `signature<TAB>origin fully-qualified name`, sorted, one per line.

    The declared Top-N size rides along as a comment so a reloaded list
    reports the same size it was built with.
    """
    lines = [f"# declared-size: {excl.declared_size}"]
    for sig, tid in excl.sorted_pairs():
        lines.append(f"{sig.to_text()}\t{h.node(tid).fq_name}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_exclusion_list(path: str, h: TypeHierarchy) -> ExclusionList:
    """Read an exclusion list back, resolving type names against `h`.

    An unresolvable or ambiguous fully-qualified name is a hard error: a
    silently dropped entry would quietly weaken the pruning.
    """
    by_fq: dict[str, str | None] = {}
    for tid in h.sorted_ids():
        fq = h.types[tid].fq_name
        # None marks a duplicate name; only an error if it is referenced
        by_fq[fq] = None if fq in by_fq else tid
    grouped: dict[MethodSignature, set[str]] = {}
    declared_size: int | None = None
    pair_count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("declared-size:"):
                    declared_size = int(body.split(":", 1)[1].strip())
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'signature<TAB>type name', got {line!r}"
                )
            sig_text, fq = parts
            sig = MethodSignature.from_text(sig_text)
            if fq not in by_fq:
                raise ValueError(f"{path}:{lineno}: unknown type name {fq!r}")
            tid = by_fq[fq]
            if tid is None:
                raise ValueError(
                    f"{path}:{lineno}: type name {fq!r} is ambiguous in this hierarchy"
                )
            grouped.setdefault(sig, set()).add(tid)
            pair_count += 1
    return ExclusionList(
        by_signature={sig: frozenset(types) for sig, types in grouped.items()},
        declared_size=declared_size if declared_size is not None else pair_count,
    )
