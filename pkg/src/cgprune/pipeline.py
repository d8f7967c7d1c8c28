"""Batch pipeline: load or generate graphs, analyze, prune, measure, report.

One run walks every graph in the corpus through the same stages: origin
analysis, frequency ranking, localness labelling, then for each Top-N in the
sweep: build the exclusion list, prune, re-run vulnerability propagation, and
diff against the unpruned baseline.  A stage failure drops that graph from
the report with a logged reason and the run continues.

Reports carry one record per (graph, N) plus per-N aggregates (mean and
population standard deviation, recomputable from the records).  Everything
except elapsed-time columns is deterministic for a fixed config; timing
columns are the ones whose names end in ``_s``.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .io import apply_core_prefixes, load_call_graph, load_hierarchy
from .localness import LocalnessOptions, label_all, localness_distribution
from .model import CallGraph, TypeHierarchy
from .origins import build_exclusion_list, find_origins, origin_edge_frequencies
from .pruning import (
    KeepAllOracle,
    PruneAllOracle,
    PruneDecisionOracle,
    prune_exhaustive,
    prune_selective,
)
from .synth import GenParams, generate_call_graph_cha, generate_hierarchy
from .vulnsim import ProjectRoleMap, compare, inject_artificial_cves, propagate

log = logging.getLogger(__name__)

DEFAULT_SWEEP = (1, 2, 3, 5, 10, 25, 50, 100, 1000)

MODES = ("exhaustive", "selective")
ORACLES = ("keep-all", "prune-all")


class ConfigError(ValueError):
    """The pipeline config file is malformed or inconsistent."""


@dataclass(frozen=True)
class GraphInput:
    """One on-disk graph: an id plus its hierarchy and call-graph files."""

    graph_id: str
    hierarchy_path: str
    callgraph_path: str


@dataclass(frozen=True)
class SyntheticSpec:
    """Generate `count` graphs from `params`, bumping the seed per graph."""

    count: int
    params: GenParams


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one pipeline run needs, loadable from a JSON file."""

    corpus: str = "corpus"
    inputs: tuple[GraphInput, ...] = ()
    synthetic: SyntheticSpec | None = None
    sweep: tuple[int, ...] = DEFAULT_SWEEP
    mode: str = "exhaustive"
    threshold: float = 0.95
    oracle: str = "keep-all"
    cve_count: int = 100
    cve_seed: int = 0
    include_core_cves: bool = False
    application_project: str = "p1"
    warmup: int = 1
    repetitions: int = 3
    localness_top: int = 10
    localness: LocalnessOptions = field(default_factory=LocalnessOptions)
    core_prefixes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.oracle not in ORACLES:
            raise ConfigError(f"oracle must be one of {ORACLES}, got {self.oracle!r}")
        if not self.inputs and self.synthetic is None:
            raise ConfigError("config names no input graphs and no synthetic spec")
        if any(n < 0 for n in self.sweep):
            raise ConfigError(f"sweep values must be non-negative, got {self.sweep}")

    @classmethod
    def from_mapping(cls, data: Mapping, base_dir: str = ".") -> "PipelineConfig":
        known = {
            "corpus", "inputs", "synthetic", "sweep", "mode", "threshold",
            "oracle", "cve_count", "cve_seed", "include_core_cves",
            "application_project", "warmup", "repetitions", "localness_top",
            "extended_hierarchy", "package_boundary", "core_prefixes",
        }
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

        def resolve(p: str) -> str:
            return p if os.path.isabs(p) else os.path.join(base_dir, p)

        inputs = []
        for i, item in enumerate(data.get("inputs", ())):
            try:
                inputs.append(GraphInput(
                    graph_id=item.get("id", f"g{i:03d}"),
                    hierarchy_path=resolve(item["hierarchy"]),
                    callgraph_path=resolve(item["callgraph"]),
                ))
            except KeyError as exc:
                raise ConfigError(
                    f"inputs[{i}] missing field {exc.args[0]!r}"
                ) from None
        synthetic = None
        if "synthetic" in data:
            spec = data["synthetic"]
            params_data = dict(spec.get("params", {}))
            if "call_sites_per_method" in params_data:
                params_data["call_sites_per_method"] = tuple(
                    params_data["call_sites_per_method"]
                )
            try:
                params = GenParams(**params_data)
            except TypeError as exc:
                raise ConfigError(f"synthetic.params: {exc}") from None
            count = spec.get("count", 1)
            if count < 1:
                raise ConfigError(f"synthetic.count must be positive, got {count}")
            synthetic = SyntheticSpec(count=count, params=params)
        kwargs = {
            k: data[k]
            for k in (
                "corpus", "mode", "threshold", "oracle", "cve_count", "cve_seed",
                "include_core_cves", "application_project", "warmup",
                "repetitions", "localness_top",
            )
            if k in data
        }
        if "sweep" in data:
            kwargs["sweep"] = tuple(data["sweep"])
        if "core_prefixes" in data:
            kwargs["core_prefixes"] = tuple(data["core_prefixes"])
        localness = LocalnessOptions(
            extended_hierarchy=data.get("extended_hierarchy", True),
            package_boundary=data.get("package_boundary", False),
        )
        return cls(
            inputs=tuple(inputs),
            synthetic=synthetic,
            localness=localness,
            **kwargs,
        )

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_mapping(data, base_dir=os.path.dirname(path) or ".")


@dataclass(frozen=True)
class GraphSummary:
    """Baseline facts about one graph before any pruning."""

    graph_id: str
    nodes: int
    edges: int
    duplicate_edges: int
    localness_levels: tuple[int, int, int, int]
    top_origins: tuple[tuple[str, int], ...]
    origin_localness: tuple[tuple[str, tuple[float, float, float, float] | None], ...]
    vulnerable_count: int
    base_pairs: int
    base_fraction: float
    base_elapsed_s: float


@dataclass(frozen=True)
class SweepRecord:
    """One (graph, Top-N) measurement row."""

    graph_id: str
    top_n: int
    nodes: int
    edges: int
    reduction_ratio: float
    reachable_pairs: int
    reachable_fraction: float
    pair_delta: int
    fraction_delta: float
    analysis_elapsed_s: float
    prune_elapsed_s: float


@dataclass(frozen=True)
class PipelineError:
    """Why one graph produced no records."""

    graph_id: str
    stage: str
    message: str


REPORT_COLUMNS = (
    "graph_id", "top_n", "nodes", "edges", "reduction_ratio",
    "reachable_pairs", "reachable_fraction", "pair_delta", "fraction_delta",
    "analysis_elapsed_s", "prune_elapsed_s",
)
AGGREGATE_COLUMNS = REPORT_COLUMNS[2:]
TIMING_COLUMNS = ("analysis_elapsed_s", "prune_elapsed_s")


@dataclass(frozen=True)
class AnalysisReport:
    """Everything one pipeline run produced."""

    corpus: str
    graphs: tuple[GraphSummary, ...]
    records: tuple[SweepRecord, ...]
    errors: tuple[PipelineError, ...]

    def aggregates(self) -> dict[int, dict[str, tuple[float, float]]]:
        """Per Top-N mean and population standard deviation of each column."""
        by_n: dict[int, list[SweepRecord]] = {}
        for r in self.records:
            by_n.setdefault(r.top_n, []).append(r)
        out: dict[int, dict[str, tuple[float, float]]] = {}
        for n in sorted(by_n):
            rows = by_n[n]
            cols: dict[str, tuple[float, float]] = {}
            for name in AGGREGATE_COLUMNS:
                values = [float(getattr(r, name)) for r in rows]
                cols[name] = (statistics.fmean(values), statistics.pstdev(values))
            out[n] = cols
        return out


def _sources(
    config: PipelineConfig,
) -> list[tuple[str, Callable[[], tuple[TypeHierarchy, CallGraph]]]]:
    sources: list[tuple[str, Callable[[], tuple[TypeHierarchy, CallGraph]]]] = []
    for gin in config.inputs:
        def load(gin: GraphInput = gin) -> tuple[TypeHierarchy, CallGraph]:
            h = load_hierarchy(gin.hierarchy_path)
            h = apply_core_prefixes(h, list(config.core_prefixes))
            return h, load_call_graph(gin.callgraph_path, h)
        sources.append((gin.graph_id, load))
    if config.synthetic is not None:
        base = config.synthetic.params
        for i in range(config.synthetic.count):
            params = GenParams(
                type_count=base.type_count,
                max_parents_per_type=base.max_parents_per_type,
                signature_pool_size=base.signature_pool_size,
                override_probability=base.override_probability,
                call_sites_per_method=base.call_sites_per_method,
                project_count=base.project_count,
                core_type_fraction=base.core_type_fraction,
                seed=base.seed + i,
            )
            def gen(params: GenParams = params) -> tuple[TypeHierarchy, CallGraph]:
                h = generate_hierarchy(params)
                return h, generate_call_graph_cha(h, params)
            sources.append((f"syn{i:03d}", gen))
    return sources


def _make_oracle(config: PipelineConfig) -> PruneDecisionOracle:
    return KeepAllOracle() if config.oracle == "keep-all" else PruneAllOracle()


def run_pipeline(config: PipelineConfig) -> AnalysisReport:
    """Run every configured graph through the full analysis.

    Deterministic given the config (and input files), except for elapsed
    times.  A failing graph is reported under `errors` and skipped whole, so
    aggregates never mix complete and partial sweeps.
    """
    graphs: list[GraphSummary] = []
    records: list[SweepRecord] = []
    errors: list[PipelineError] = []
    roles = ProjectRoleMap(application_project_id=config.application_project)
    for index, (graph_id, load) in enumerate(_sources(config)):
        stage = "load"
        try:
            h, cg = load()
            stage = "origins"
            origins = find_origins(cg, h)
            stage = "frequencies"
            table = origin_edge_frequencies(cg, origins)
            stage = "localness"
            labels = label_all(cg, h, config.localness)
            level_counts = Counter(labels.values())
            top = [origin for origin, _ in table.top(config.localness_top)]
            dist = localness_distribution(origins, labels, top)
            stage = "inject"
            assignment = inject_artificial_cves(
                cg, h, roles, config.cve_count, config.cve_seed + index,
                include_core=config.include_core_cves,
            )
            stage = "propagate-base"
            base = propagate(
                cg, assignment, roles, h,
                warmup=config.warmup, repetitions=config.repetitions,
            )
            summary = GraphSummary(
                graph_id=graph_id,
                nodes=cg.node_count,
                edges=cg.edge_count,
                duplicate_edges=cg.duplicate_count,
                localness_levels=tuple(level_counts.get(v, 0) for v in range(4)),
                top_origins=tuple(
                    (origin.render(h), count)
                    for origin, count in table.top(config.localness_top)
                ),
                origin_localness=tuple(
                    (origin.render(h), dist.per_origin[origin]) for origin in top
                ),
                vulnerable_count=len(assignment.vulnerable),
                base_pairs=base.reachable_pairs,
                base_fraction=base.reachable_vuln_fraction,
                base_elapsed_s=base.elapsed,
            )
            graph_records = []
            for n in config.sweep:
                stage = f"prune-top{n}"
                excl = build_exclusion_list(table, n)
                if config.mode == "exhaustive":
                    pr = prune_exhaustive(cg, excl, h)
                else:
                    pr = prune_selective(
                        cg, excl, h, _make_oracle(config), config.threshold
                    )
                stage = f"propagate-top{n}"
                prop = propagate(
                    pr.pruned_graph, assignment, roles, h,
                    warmup=config.warmup, repetitions=config.repetitions,
                )
                delta = compare(base, prop)
                graph_records.append(SweepRecord(
                    graph_id=graph_id,
                    top_n=n,
                    nodes=pr.pruned_graph.node_count,
                    edges=pr.pruned_graph.edge_count,
                    reduction_ratio=pr.reduction_ratio,
                    reachable_pairs=prop.reachable_pairs,
                    reachable_fraction=prop.reachable_vuln_fraction,
                    pair_delta=delta.pair_delta,
                    fraction_delta=delta.fraction_delta,
                    analysis_elapsed_s=prop.elapsed,
                    prune_elapsed_s=pr.elapsed,
                ))
        except Exception as exc:
            log.warning("graph %s failed at stage %s: %s", graph_id, stage, exc)
            errors.append(PipelineError(graph_id, stage, str(exc)))
            continue
        graphs.append(summary)
        records.extend(graph_records)
    return AnalysisReport(
        corpus=config.corpus,
        graphs=tuple(graphs),
        records=tuple(records),
        errors=tuple(errors),
    )


def write_report_csv(report: AnalysisReport, path: str) -> None:
    """Per-(graph, N) records, one row each, in run order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in report.records:
            writer.writerow([getattr(r, name) for name in REPORT_COLUMNS])


def write_aggregates_csv(report: AnalysisReport, path: str) -> None:
    """Per-N aggregate rows: `<column>_mean` and `<column>_std` pairs."""
    header = ["top_n"]
    for name in AGGREGATE_COLUMNS:
        header.extend([f"{name}_mean", f"{name}_std"])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for n, cols in sorted(report.aggregates().items()):
            row: list[object] = [n]
            for name in AGGREGATE_COLUMNS:
                mean, std = cols[name]
                row.extend([mean, std])
            writer.writerow(row)


def write_report_json(report: AnalysisReport, path: str) -> None:
    """The full report as one sorted-keys JSON document."""
    payload = {
        "corpus": report.corpus,
        "graphs": [
            {
                "graph_id": g.graph_id,
                "nodes": g.nodes,
                "edges": g.edges,
                "duplicate_edges": g.duplicate_edges,
                "localness_levels": list(g.localness_levels),
                "top_origins": [[name, count] for name, count in g.top_origins],
                "origin_localness": [
                    [name, list(dist) if dist is not None else None]
                    for name, dist in g.origin_localness
                ],
                "vulnerable_count": g.vulnerable_count,
                "base_pairs": g.base_pairs,
                "base_fraction": g.base_fraction,
                "base_elapsed_s": g.base_elapsed_s,
            }
            for g in report.graphs
        ],
        "records": [
            {name: getattr(r, name) for name in REPORT_COLUMNS}
            for r in report.records
        ],
        "aggregates": {
            str(n): {
                name: {"mean": mean, "std": std}
                for name, (mean, std) in cols.items()
            }
            for n, cols in report.aggregates().items()
        },
        "errors": [
            {"graph_id": e.graph_id, "stage": e.stage, "message": e.message}
            for e in report.errors
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
