"""
Does pruning change which vulnerable methods an application can reach?
======================================================================

Mark a random sample of dependency methods as vulnerable, then run an
inverse BFS from each one over reversed call edges to find the
application methods that can reach it.  Repeating the measurement on a
pruned graph shows how much reachability (and traversal time) the
removed edges were carrying.
"""

from cgprune import (
    GenParams,
    ProjectRoleMap,
    build_exclusion_list,
    compare,
    find_origins,
    generate_call_graph_cha,
    generate_hierarchy,
    inject_artificial_cves,
    origin_edge_frequencies,
    propagate,
    prune_exhaustive,
)

params = GenParams(type_count=150, call_sites_per_method=(1, 5), seed=21)
h = generate_hierarchy(params)
cg = generate_call_graph_cha(h, params)

# project p1 plays the application; everything non-core and non-p1 is a
# dependency eligible to carry an artificial CVE
roles = ProjectRoleMap(application_project_id="p1")
assignment = inject_artificial_cves(cg, h, roles, count=15, seed=3)
print(f"{cg.edge_count} edges, {len(assignment.vulnerable)} vulnerable "
      f"dependency methods (seed {assignment.seed})")

base = propagate(cg, assignment, roles, h, warmup=1, repetitions=3,
                 collect_witnesses=True)
print(f"\nbaseline: {base.reachable_pairs} (application, vulnerable) pairs, "
      f"{base.reachable_vuln_fraction:.2f} of vulnerable methods reached, "
      f"{base.elapsed * 1e3:.2f} ms")

# each reported pair comes with one concrete call path as evidence
some_pair = sorted(base.witnesses)[0]
path = base.witnesses[some_pair]
print("\none witness path:")
for hop in path:
    print(f"  {hop.uid}")

# prune the Top-10 origins and measure again with the same assignment
table = origin_edge_frequencies(cg, find_origins(cg, h))
result = prune_exhaustive(cg, build_exclusion_list(table, 10), h)
pruned = propagate(result.pruned_graph, assignment, roles, h,
                   warmup=1, repetitions=3)
delta = compare(base, pruned)
print(f"\nafter pruning Top-10 ({result.pruned_edges} edges removed):")
print(f"  pairs     {base.reachable_pairs} -> {pruned.reachable_pairs} "
      f"({delta.pair_delta:+d})")
print(f"  fraction  {base.reachable_vuln_fraction:.2f} -> "
      f"{pruned.reachable_vuln_fraction:.2f} ({delta.fraction_delta:+.2f})")
print(f"  traversal speedup {delta.speedup:.2f}x")
