"""Command-line interface.

Subcommands mirror the analysis stages: `gen` (synthetic corpora), `origins`
and `derivatives` (frequency tables), `localness` (per-origin level
distributions), `prune` (exhaustive or oracle-gated), `vuln-sim`
(vulnerability reachability, optionally diffing a pruned variant), and
`pipeline` (the whole batch run from a config file).

Exit codes: 0 success, 2 usage error (argparse), 3 validation error
(malformed or inconsistent inputs), 4 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from typing import Sequence

from .io import (
    RecordFormatError,
    SchemaVersionError,
    apply_core_prefixes,
    load_call_graph,
    load_hierarchy,
    save_call_graph,
    save_hierarchy,
)
from .localness import LocalnessOptions, label_all, localness_distribution
from .model import CallGraph, GraphError, HierarchyValidationError, TypeHierarchy
from .origins import build_exclusion_list, find_origins, origin_edge_frequencies, unique_derivative_counts
from .pipeline import (
    ConfigError,
    PipelineConfig,
    run_pipeline,
    write_aggregates_csv,
    write_report_csv,
    write_report_json,
)
from .pruning import (
    KeepAllOracle,
    PruneAllOracle,
    load_exclusion_list,
    prune_exhaustive,
    prune_selective,
    save_exclusion_list,
)
from .synth import GenParams, generate_call_graph_cha, generate_hierarchy
from .vulnsim import (
    ProjectRoleMap,
    compare,
    inject_artificial_cves,
    load_assignment,
    propagate,
    save_assignment,
)


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("hierarchy", help="hierarchy interchange file")
    p.add_argument("callgraph", help="call graph interchange file")
    p.add_argument(
        "--core-prefix",
        action="append",
        default=[],
        metavar="PREFIX",
        help="treat types whose name or package starts with PREFIX as core "
             "library (repeatable)",
    )


def _load_inputs(args: argparse.Namespace) -> tuple[TypeHierarchy, CallGraph]:
    h = load_hierarchy(args.hierarchy)
    if args.core_prefix:
        h = apply_core_prefixes(h, args.core_prefix)
    cg = load_call_graph(args.callgraph, h)
    return h, cg


def _open_out(path: str | None):
    if path is None:
        return sys.stdout
    return open(path, "w", newline="", encoding="utf-8")


def _write_rows(path: str | None, header: list[str], rows: list[list[object]]) -> None:
    out = _open_out(path)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_gen(args: argparse.Namespace) -> int:
    params = GenParams(
        type_count=args.types,
        max_parents_per_type=args.max_parents,
        signature_pool_size=args.sig_pool,
        override_probability=args.override_prob,
        call_sites_per_method=(args.call_sites[0], args.call_sites[1]),
        project_count=args.projects,
        core_type_fraction=args.core_fraction,
        seed=args.seed,
    )
    h = generate_hierarchy(params)
    cg = generate_call_graph_cha(h, params)
    save_hierarchy(h, args.out_hierarchy)
    save_call_graph(cg, args.out_callgraph)
    print(
        f"generated {len(h.types)} types, {cg.node_count} methods, "
        f"{cg.edge_count} edges (seed {params.seed})"
    )
    return 0


def cmd_origins(args: argparse.Namespace) -> int:
    h, cg = _load_inputs(args)
    origins = find_origins(cg, h)
    if origins.ambiguous:
        print(
            f"note: {len(origins.ambiguous)} target(s) had multiple candidate "
            f"origins; picked by (depth, type id)",
            file=sys.stderr,
        )
    table = origin_edge_frequencies(cg, origins)
    rows = table.rows if args.top == 0 else table.top(args.top)
    _write_rows(
        args.out,
        ["rank", "origin_type", "origin_fq", "signature", "edge_count"],
        [
            [i + 1, o.origin_type, h.node(o.origin_type).fq_name,
             o.signature.to_text(), count]
            for i, (o, count) in enumerate(rows)
        ],
    )
    return 0


def cmd_derivatives(args: argparse.Namespace) -> int:
    h, cg = _load_inputs(args)
    origins = find_origins(cg, h)
    counts = unique_derivative_counts(cg, origins)
    rows = counts if args.top == 0 else counts[: args.top]
    _write_rows(
        args.out,
        ["rank", "origin_type", "origin_fq", "signature", "derivative_count"],
        [
            [i + 1, o.origin_type, h.node(o.origin_type).fq_name,
             o.signature.to_text(), count]
            for i, (o, count) in enumerate(rows)
        ],
    )
    return 0


def cmd_localness(args: argparse.Namespace) -> int:
    h, cg = _load_inputs(args)
    options = LocalnessOptions(
        extended_hierarchy=not args.strict_hierarchy,
        package_boundary=args.package_boundary,
    )
    origins = find_origins(cg, h)
    table = origin_edge_frequencies(cg, origins)
    top = [o for o, _ in table.top(args.top)]
    labels = label_all(cg, h, options)
    dist = localness_distribution(origins, labels, top)
    rows = []
    for origin in top:
        levels = dist.per_origin[origin]
        cells = list(levels) if levels is not None else ["", "", "", ""]
        rows.append([origin.render(h), *cells])
    _write_rows(args.out, ["origin", "level0", "level1", "level2", "level3"], rows)
    return 0


def cmd_prune(args: argparse.Namespace) -> int:
    h, cg = _load_inputs(args)
    if args.exclusion_file:
        excl = load_exclusion_list(args.exclusion_file, h)
    else:
        origins = find_origins(cg, h)
        table = origin_edge_frequencies(cg, origins)
        excl = build_exclusion_list(table, args.top_n)
    if args.mode == "exhaustive":
        result = prune_exhaustive(cg, excl, h)
    else:
        oracle = KeepAllOracle() if args.oracle == "keep-all" else PruneAllOracle()
        result = prune_selective(cg, excl, h, oracle, args.threshold)
    save_call_graph(result.pruned_graph, args.out)
    if args.save_exclusion:
        save_exclusion_list(excl, args.save_exclusion, h)
    print(
        f"candidates {result.candidate_edges}, pruned {result.pruned_edges}, "
        f"kept {result.pruned_graph.edge_count} of {cg.edge_count} edges "
        f"(reduction {result.reduction_ratio:.4f}) in {result.elapsed:.4f}s"
    )
    if result.oracle_failures:
        print(
            f"note: oracle failed on {result.oracle_failures} edge(s); kept them",
            file=sys.stderr,
        )
    return 0


def cmd_vuln_sim(args: argparse.Namespace) -> int:
    h, cg = _load_inputs(args)
    roles = ProjectRoleMap(application_project_id=args.app_project)
    if args.assignment_in:
        assignment = load_assignment(args.assignment_in)
    else:
        assignment = inject_artificial_cves(
            cg, h, roles, args.cves, args.seed, include_core=args.include_core
        )
    if args.assignment_out:
        save_assignment(assignment, args.assignment_out)
    base = propagate(
        cg, assignment, roles, h,
        warmup=args.warmup, repetitions=args.repetitions,
    )
    print(
        f"base: {len(assignment.vulnerable)} vulnerable, "
        f"{base.reachable_pairs} reachable pairs, "
        f"fraction {base.reachable_vuln_fraction:.4f}, "
        f"elapsed {base.elapsed:.4f}s"
    )
    if args.compare_to:
        pruned_cg = load_call_graph(args.compare_to, h)
        pruned = propagate(
            pruned_cg, assignment, roles, h,
            warmup=args.warmup, repetitions=args.repetitions,
        )
        delta = compare(base, pruned)
        print(
            f"pruned: {pruned.reachable_pairs} reachable pairs, "
            f"fraction {pruned.reachable_vuln_fraction:.4f}, "
            f"elapsed {pruned.elapsed:.4f}s"
        )
        print(
            f"delta: pairs {delta.pair_delta:+d}, "
            f"fraction {delta.fraction_delta:+.4f}, "
            f"speedup {delta.speedup:.2f}x"
        )
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = PipelineConfig.from_file(args.config)
    report = run_pipeline(config)
    os.makedirs(args.out_dir, exist_ok=True)
    write_report_csv(report, os.path.join(args.out_dir, "report.csv"))
    write_aggregates_csv(report, os.path.join(args.out_dir, "aggregates.csv"))
    write_report_json(report, os.path.join(args.out_dir, "report.json"))
    print(
        f"corpus {report.corpus}: {len(report.graphs)} graph(s), "
        f"{len(report.records)} record(s), {len(report.errors)} error(s); "
        f"reports in {args.out_dir}"
    )
    for err in report.errors:
        print(f"error: {err.graph_id} failed at {err.stage}: {err.message}",
              file=sys.stderr)
    if report.errors and not report.records:
        return 4
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgprune",
        description="Origin-method-guided call graph pruning and "
                    "vulnerability reachability analysis",
    )
    parser.add_argument(
        "--verbose", action="store_true", help="log stage progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic hierarchy and call graph")
    p.add_argument("--out-hierarchy", required=True, metavar="PATH")
    p.add_argument("--out-callgraph", required=True, metavar="PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--types", type=int, default=50)
    p.add_argument("--max-parents", type=int, default=2)
    p.add_argument("--sig-pool", type=int, default=8)
    p.add_argument("--override-prob", type=float, default=0.5)
    p.add_argument("--call-sites", type=int, nargs=2, default=[0, 3],
                   metavar=("LOW", "HIGH"))
    p.add_argument("--projects", type=int, default=3)
    p.add_argument("--core-fraction", type=float, default=0.3)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("origins", help="rank origins by caused-edge frequency")
    _add_input_args(p)
    p.add_argument("--top", type=int, default=10, help="rows to emit (0 = all)")
    p.add_argument("--out", metavar="CSV", help="output file (default stdout)")
    p.set_defaults(func=cmd_origins)

    p = sub.add_parser("derivatives", help="rank origins by unique derivative count")
    _add_input_args(p)
    p.add_argument("--top", type=int, default=10, help="rows to emit (0 = all)")
    p.add_argument("--out", metavar="CSV", help="output file (default stdout)")
    p.set_defaults(func=cmd_derivatives)

    p = sub.add_parser("localness", help="per-origin localness level distribution")
    _add_input_args(p)
    p.add_argument("--top", type=int, default=10, help="origins to report")
    p.add_argument("--strict-hierarchy", action="store_true",
                   help="count only ancestor/descendant pairs as same hierarchy")
    p.add_argument("--package-boundary", action="store_true",
                   help="draw the level-2/3 line between packages, not projects")
    p.add_argument("--out", metavar="CSV", help="output file (default stdout)")
    p.set_defaults(func=cmd_localness)

    p = sub.add_parser("prune", help="prune edges targeting excluded derivatives")
    _add_input_args(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--top-n", type=int, metavar="N",
                       help="build the exclusion list from the Top-N origins")
    group.add_argument("--exclusion-file", metavar="PATH",
                       help="load a saved exclusion list instead")
    p.add_argument("--out", required=True, metavar="PATH",
                   help="where to write the pruned call graph")
    p.add_argument("--mode", choices=["exhaustive", "selective"],
                   default="exhaustive")
    p.add_argument("--oracle", choices=["keep-all", "prune-all"],
                   default="keep-all", help="decision oracle for selective mode")
    p.add_argument("--threshold", type=float, default=0.95,
                   help="selective mode prunes only above this confidence")
    p.add_argument("--save-exclusion", metavar="PATH",
                   help="also save the exclusion list that was applied")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("vuln-sim",
                       help="inject artificial CVEs and measure reachability")
    _add_input_args(p)
    p.add_argument("--app-project", required=True,
                   help="project id whose methods count as application code")
    p.add_argument("--cves", type=int, default=100,
                   help="how many dependency methods to mark vulnerable")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-core", action="store_true",
                   help="let core-library methods be marked vulnerable")
    p.add_argument("--assignment-in", metavar="PATH",
                   help="reuse a saved vulnerability assignment")
    p.add_argument("--assignment-out", metavar="PATH",
                   help="save the vulnerability assignment")
    p.add_argument("--compare-to", metavar="PATH",
                   help="pruned call graph to diff against")
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--repetitions", type=int, default=3)
    p.set_defaults(func=cmd_vuln_sim)

    p = sub.add_parser("pipeline", help="run the batch pipeline from a config file")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out-dir", default=".", metavar="DIR")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (HierarchyValidationError, SchemaVersionError, RecordFormatError,
            ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
