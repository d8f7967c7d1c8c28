"""Synthetic corpora: seeded hierarchies, CHA-expanded call graphs, oracle.

The generator builds layered hierarchies (a type's parents always have
smaller indices, so cycles are impossible by construction) with a core slice
up front, then expands random call sites the way class-hierarchy analysis
would: one edge to every reflexive descendant of the receiver that declares
the called signature.

All randomness comes from Python's Mersenne Twister (`random.Random`) seeded
from GenParams, with the hierarchy and call-graph streams decoupled so either
can be regenerated alone.  Interchange files remain the portability contract;
the named PRNG just makes seeds reproducible across machines running this
implementation.

`brute_force_origins` is the reference oracle for origin analysis.  It
shares only the domain types with the fast implementation and re-derives
everything by exhaustive ancestor enumeration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    CallEdge,
    CallGraph,
    MethodNode,
    MethodSignature,
    TypeHierarchy,
    TypeNode,
    build_call_graph,
    children_index,
)
from .origins import OriginMap, OriginRef

# distinct streams for hierarchy and call-graph generation from one seed
_CALLGRAPH_SEED_OFFSET = 0x9E3779B9

CORE_PROJECT = "core"


@dataclass(frozen=True)
class GenParams:
    """Knobs for synthetic corpus generation.

    call_sites_per_method is an inclusive (low, high) range; (0, 0) produces
    an edgeless graph.
    """

    type_count: int = 50
    max_parents_per_type: int = 2
    signature_pool_size: int = 8
    override_probability: float = 0.5
    call_sites_per_method: tuple[int, int] = (0, 3)
    project_count: int = 3
    core_type_fraction: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("type_count", "max_parents_per_type", "signature_pool_size",
                     "project_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("override_probability", "core_type_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(
                    f"{name} must be in [0, 1], got {getattr(self, name)}"
                )
        low, high = self.call_sites_per_method
        if not 0 <= low <= high:
            raise ValueError(
                f"call_sites_per_method must satisfy 0 <= low <= high, "
                f"got {self.call_sites_per_method}"
            )


def signature_pool(size: int) -> list[MethodSignature]:
    """The fixed signature vocabulary for a pool size; index is part of the name."""
    pool = []
    for i in range(size):
        params = ("int",) if i % 3 == 2 else ()
        pool.append(MethodSignature(f"m{i:02d}", params, "obj"))
    return pool


def generate_hierarchy(p: GenParams) -> TypeHierarchy:
    """Layered random hierarchy: acyclic by construction, deterministic per seed.

    The first round(core_type_fraction * type_count) types form the core
    slice inside the reserved core project; everything after is spread over
    the non-core projects.  Each type declares up to 3 pool signatures,
    choosing with override_probability a signature some ancestor already
    declares (when one is available) and otherwise a fresh one no ancestor
    declares.  Zero override probability therefore guarantees every declared
    signature is a fresh self-origin, even if that leaves a type empty.
    """
    rng = random.Random(p.seed)
    pool = signature_pool(p.signature_pool_size)
    core_count = min(p.type_count, round(p.core_type_fraction * p.type_count))
    types: dict[str, TypeNode] = {}
    order: list[str] = []
    # signatures visible from each type's strict ancestors, built incrementally
    inherited: dict[str, frozenset[MethodSignature]] = {}
    for i in range(p.type_count):
        tid = f"T{i:03d}"
        is_core = i < core_count
        if is_core:
            project = CORE_PROJECT
            package = "core.internal"
        else:
            project = f"p{rng.randrange(p.project_count) + 1}"
            package = f"{project}.pkg{rng.randrange(3)}"
        parent_limit = min(p.max_parents_per_type, i)
        parent_count = rng.randint(0, parent_limit) if parent_limit else 0
        parents = tuple(
            order[j] for j in sorted(rng.sample(range(i), parent_count))
        )
        visible: frozenset[MethodSignature] = frozenset()
        for par in parents:
            visible |= inherited[par] | types[par].declared
        declared: set[MethodSignature] = set()
        for _ in range(rng.randint(1, min(3, p.signature_pool_size))):
            roll = rng.random()
            override_choices = sorted(visible - declared)
            fresh_choices = sorted(set(pool) - visible - declared)
            if roll < p.override_probability and override_choices:
                declared.add(rng.choice(override_choices))
            elif fresh_choices:
                declared.add(rng.choice(fresh_choices))
            elif override_choices and p.override_probability > 0:
                declared.add(rng.choice(override_choices))
            # with zero override probability and a saturated pool the type
            # may declare nothing; an override would break the self-origin
            # guarantee
        types[tid] = TypeNode(
            type_id=tid,
            fq_name=f"{package}.C{i:03d}",
            parents=parents,
            declared=frozenset(declared),
            project_id=project,
            package_name=package,
            is_core_lib=is_core,
        )
        order.append(tid)
        inherited[tid] = visible
    return TypeHierarchy(types=types, core_project_id=CORE_PROJECT)


def cha_targets(
    h: TypeHierarchy, receiver_type: str, sig: MethodSignature
) -> list[MethodNode]:
    """Every method a call on (receiver, sig) may dispatch to under CHA.

    One node per reflexive descendant of the receiver that declares the
    signature, in canonical order.
    """
    children = children_index(h)
    reached: set[str] = set()
    queue = [receiver_type]
    h.node(receiver_type)
    while queue:
        tid = queue.pop()
        if tid in reached:
            continue
        reached.add(tid)
        queue.extend(children.get(tid, ()))
    return [
        MethodNode(tid, sig) for tid in sorted(reached) if h.types[tid].declares(sig)
    ]


def generate_call_graph_cha(h: TypeHierarchy, p: GenParams) -> CallGraph:
    """Random call sites expanded CHA-style, deterministic per seed.

    Every declared method is a node.  Each method draws a call-site count
    from the configured range; each call site picks a declared
    (receiver type, signature) pair and emits one edge per CHA target of that
    pair.  Duplicate (source, target, receiver) triples collapse.
    """
    rng = random.Random(p.seed + _CALLGRAPH_SEED_OFFSET)
    methods = [
        MethodNode(tid, sig)
        for tid in h.sorted_ids()
        for sig in sorted(h.types[tid].declared)
    ]
    children = children_index(h)
    cone_cache: dict[str, list[str]] = {}

    def cone(receiver: str) -> list[str]:
        cached = cone_cache.get(receiver)
        if cached is None:
            reached: set[str] = set()
            queue = [receiver]
            while queue:
                tid = queue.pop()
                if tid in reached:
                    continue
                reached.add(tid)
                queue.extend(children.get(tid, ()))
            cached = sorted(reached)
            cone_cache[receiver] = cached
        return cached

    low, high = p.call_sites_per_method
    edges = []
    for source in methods:
        for _ in range(rng.randint(low, high)):
            site = rng.choice(methods)
            receiver, sig = site.defining_type, site.signature
            for tid in cone(receiver):
                if h.types[tid].declares(sig):
                    edges.append(
                        CallEdge(
                            source=source,
                            target=MethodNode(tid, sig),
                            receiver_type=receiver,
                        )
                    )
    return build_call_graph(methods, edges)


def _reflexive_ancestor_depths(h: TypeHierarchy, type_id: str) -> dict[str, int]:
    # independent of model.ancestor_depths on purpose: the oracle must not
    # inherit a traversal bug from the code under test
    depths = {type_id: 0}
    frontier = [type_id]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for tid in frontier:
            for parent in h.node(tid).parents:
                if parent not in depths:
                    depths[parent] = d
                    nxt.append(parent)
        frontier = nxt
    return depths


def brute_force_origins(cg: CallGraph, h: TypeHierarchy) -> OriginMap:
    """Reference origin analysis by exhaustive enumeration.

    For each distinct edge target: list every reflexive ancestor declaring
    the signature, discard those with a declaring strict ancestor, then pick
    the (depth, type id) minimum.  Quadratic and proud of it.
    """
    entries: dict[MethodNode, OriginRef] = {}
    ambiguous: dict[MethodNode, tuple[OriginRef, ...]] = {}
    for node in sorted({e.target for e in cg.edges}):
        sig = node.signature
        depths = _reflexive_ancestor_depths(h, node.defining_type)
        declarers = [tid for tid in depths if h.node(tid).declares(sig)]
        minimal = []
        for tid in declarers:
            above = _reflexive_ancestor_depths(h, tid)
            if not any(
                h.node(a).declares(sig) for a in above if a != tid
            ):
                minimal.append(tid)
        if not minimal:
            minimal = [node.defining_type]
        minimal.sort(key=lambda tid: (depths[tid], tid))
        entries[node] = OriginRef(minimal[0], sig)
        if len(minimal) > 1:
            ambiguous[node] = tuple(OriginRef(tid, sig) for tid in minimal)
    return OriginMap(entries=entries, ambiguous=ambiguous)
