"""Vulnerability reachability: who in the application can reach a flawed method.

Vulnerable methods are planted in dependency code (uniformly at random with a
fixed seed), then a breadth-first search over reversed edges finds every
caller that transitively reaches each one.  The headline numbers are the
count of (application method, vulnerable method) pairs and the fraction of
vulnerable methods reached by at least one application method; comparing the
numbers before and after pruning shows how much reachability the pruning
destroyed.

Sampling uses Python's Mersenne Twister (`random.Random`), so assignments are
reproducible for a given seed on any platform.  The assignment file, not the
generator, is the portability contract: persist it once and both graph
variants, or other tools, replay the exact same vulnerable set.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Mapping

from .model import CallGraph, GraphError, MethodNode, TypeHierarchy, reverse_adjacency


class NoEligibleNodesError(GraphError):
    """The graph has no node matching the requested vulnerability role."""


@dataclass(frozen=True)
class ProjectRoleMap:
    """Splits a graph's methods into application code and dependencies.

    Application nodes belong to the named project; dependency nodes are
    everything else, with core-library nodes excluded unless asked for.
    """

    application_project_id: str

    def is_application(self, h: TypeHierarchy, node: MethodNode) -> bool:
        t = h.node(node.defining_type)
        return t.project_id == self.application_project_id and not t.is_core_lib

    def is_dependency(
        self, h: TypeHierarchy, node: MethodNode, include_core: bool = False
    ) -> bool:
        t = h.node(node.defining_type)
        if t.project_id == self.application_project_id and not t.is_core_lib:
            return False
        return include_core or not t.is_core_lib


@dataclass(frozen=True)
class VulnerabilityAssignment:
    """A reproducible set of methods declared vulnerable.

    `requested` keeps the asked-for count even when fewer nodes were
    eligible, so reports can show both numbers.
    """

    vulnerable: frozenset[MethodNode]
    seed: int
    requested: int


def inject_artificial_cves(
    cg: CallGraph,
    h: TypeHierarchy,
    roles: ProjectRoleMap,
    count: int,
    seed: int,
    include_core: bool = False,
) -> VulnerabilityAssignment:
    """Sample `count` dependency methods (without replacement) as vulnerable.

    Eligible nodes are ordered canonically before sampling, so equal graphs
    and seeds give equal assignments no matter how the graph was assembled.
    Asking for more than exist yields all of them rather than failing.
    """
    if count <= 0:
        raise ValueError(f"count must be positive, got {count}")
    eligible = sorted(
        n for n in cg.nodes if roles.is_dependency(h, n, include_core=include_core)
    )
    if not eligible:
        raise NoEligibleNodesError(
            f"no dependency nodes outside project "
            f"{roles.application_project_id!r} to mark vulnerable"
        )
    rng = random.Random(seed)
    chosen = rng.sample(eligible, min(count, len(eligible)))
    return VulnerabilityAssignment(
        vulnerable=frozenset(chosen), seed=seed, requested=count
    )


@dataclass(frozen=True)
class ReachabilityResult:
    """Reachability of one graph's vulnerable methods from application code.

    `witnesses` (when collected) maps each reachable (application node,
    vulnerable node) pair to one concrete call path between them.
    """

    reachable_pairs: int
    reachable_vuln_fraction: float
    elapsed: float
    vulnerable: frozenset[MethodNode]
    reached_vulnerable: frozenset[MethodNode]
    witnesses: Mapping[tuple[MethodNode, MethodNode], tuple[MethodNode, ...]] | None = None


def _reach_one(
    preds: Mapping[MethodNode, tuple[MethodNode, ...]],
    vuln: MethodNode,
) -> tuple[set[MethodNode], dict[MethodNode, MethodNode]]:
    """Reverse BFS from one vulnerable node.

    Returns every node that reaches it, plus per-node successor links
    pointing one hop towards the vulnerable node (for path reconstruction).
    """
    next_hop: dict[MethodNode, MethodNode] = {}
    visited = {vuln}
    frontier = [vuln]
    while frontier:
        new_frontier = []
        for node in frontier:
            for caller in preds.get(node, ()):
                if caller not in visited:
                    visited.add(caller)
                    next_hop[caller] = node
                    new_frontier.append(caller)
        frontier = new_frontier
    return visited, next_hop


def propagate(
    cg: CallGraph,
    assignment: VulnerabilityAssignment,
    roles: ProjectRoleMap,
    h: TypeHierarchy,
    warmup: int = 0,
    repetitions: int = 1,
    collect_witnesses: bool = False,
) -> ReachabilityResult:
    """Measure application-to-vulnerable reachability over `cg`.

    The traversal runs `warmup` unmeasured times, then `repetitions` measured
    times; `elapsed` is the mean of the measured runs.  Counts are identical
    across runs (the traversal is deterministic), so only time is averaged.
    A self-call on a vulnerable application method would count as reaching
    itself only via a real edge; by construction vulnerable nodes are
    dependency nodes, so every counted pair crosses at least one edge.
    """
    if repetitions <= 0:
        raise ValueError(f"repetitions must be positive, got {repetitions}")
    if warmup < 0:
        raise ValueError(f"warmup must be non-negative, got {warmup}")
    missing = sorted(assignment.vulnerable - cg.nodes)
    if missing:
        raise ValueError(
            "assignment references nodes absent from the graph: "
            + ", ".join(n.uid for n in missing)
        )
    preds = reverse_adjacency(cg)
    vulnerable = sorted(assignment.vulnerable)
    app_nodes = frozenset(n for n in cg.nodes if roles.is_application(h, n))

    def run() -> tuple[int, set[MethodNode], dict[MethodNode, dict[MethodNode, MethodNode]]]:
        pairs = 0
        reached: set[MethodNode] = set()
        hops: dict[MethodNode, dict[MethodNode, MethodNode]] = {}
        for vuln in vulnerable:
            visited, next_hop = _reach_one(preds, vuln)
            reachers = (app_nodes & visited) - {vuln}
            if reachers:
                pairs += len(reachers)
                reached.add(vuln)
                if collect_witnesses:
                    hops[vuln] = next_hop
        return pairs, reached, hops

    for _ in range(warmup):
        run()
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        pairs, reached, hops = run()
        times.append(time.perf_counter() - t0)
    elapsed = sum(times) / len(times)

    witnesses = None
    if collect_witnesses:
        witnesses = {}
        for vuln, next_hop in hops.items():
            for app in sorted(app_nodes & set(next_hop)):
                path = [app]
                while path[-1] != vuln:
                    path.append(next_hop[path[-1]])
                witnesses[(app, vuln)] = tuple(path)
    fraction = len(reached) / len(vulnerable) if vulnerable else 0.0
    return ReachabilityResult(
        reachable_pairs=pairs,
        reachable_vuln_fraction=fraction,
        elapsed=elapsed,
        vulnerable=assignment.vulnerable,
        reached_vulnerable=frozenset(reached),
        witnesses=witnesses,
    )


@dataclass(frozen=True)
class DeltaReport:
    """Reachability change from a base graph to its pruned variant.

    Deltas are pruned minus base, so destroyed reachability shows up
    negative.  speedup is base elapsed over pruned elapsed: inf when pruning
    drove the time to zero, 1.0 when both rounds were too fast to measure.
    """

    pair_delta: int
    fraction_delta: float
    elapsed_delta: float
    speedup: float


def compare(base: ReachabilityResult, pruned: ReachabilityResult) -> DeltaReport:
    """Diff two propagation results over the same vulnerable set."""
    if base.vulnerable != pruned.vulnerable:
        raise ValueError("results cover different vulnerable sets; cannot compare")
    if pruned.elapsed > 0.0:
        speedup = base.elapsed / pruned.elapsed
    elif base.elapsed > 0.0:
        speedup = float("inf")
    else:
        speedup = 1.0
    return DeltaReport(
        pair_delta=pruned.reachable_pairs - base.reachable_pairs,
        fraction_delta=pruned.reachable_vuln_fraction - base.reachable_vuln_fraction,
        elapsed_delta=pruned.elapsed - base.elapsed,
        speedup=speedup,
    )


def save_assignment(assignment: VulnerabilityAssignment, path: str) -> None:
    """Persist an assignment as one method uid per line plus seed headers."""
    lines = [f"# seed: {assignment.seed}", f"# requested: {assignment.requested}"]
    lines.extend(n.uid for n in sorted(assignment.vulnerable))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_assignment(path: str) -> VulnerabilityAssignment:
    """Read an assignment file back; headers are optional and default to 0."""
    seed = 0
    requested = 0
    nodes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("seed:"):
                    seed = int(body.split(":", 1)[1].strip())
                elif body.startswith("requested:"):
                    requested = int(body.split(":", 1)[1].strip())
                continue
            try:
                nodes.append(MethodNode.from_uid(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    vulnerable = frozenset(nodes)
    return VulnerabilityAssignment(
        vulnerable=vulnerable,
        seed=seed,
        requested=requested if requested else len(vulnerable),
    )
