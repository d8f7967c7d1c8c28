"""
Localness levels: how far a method's calls escape
=================================================

Every method gets a level from 0 to 3 by scanning its outgoing edges:

  0  defined in the core library, or calls nothing outside it
  1  calls stay inside the method's own type hierarchy
  2  calls escape the hierarchy but stay in the same project
  3  at least one call crosses into another project (dominant: one such
     edge settles the level regardless of anything else)

Derivatives of a busy origin can then be summarized as a distribution
over the four levels, which is the evidence for whether pruning their
incoming edges is likely to be safe.
"""

from cgprune import (
    CallEdge,
    LocalnessOptions,
    MethodNode,
    MethodSignature,
    TypeHierarchy,
    TypeNode,
    build_call_graph,
    find_origins,
    label_all,
    localness_distribution,
    origin_edge_frequencies,
)


def sig(name):
    return MethodSignature(name)


def method(type_id, name):
    return MethodNode(type_id, sig(name))


def t(tid, fq, parents, declares, project, package, core=False):
    return TypeNode(tid, fq, tuple(parents),
                    frozenset(sig(n) for n in declares),
                    project_id=project, package_name=package,
                    is_core_lib=core)


h = TypeHierarchy(types={
    "Obj": t("Obj", "java.lang.Object", [], ["hashCode"],
             "jre", "java.lang", core=True),
    "It": t("It", "java.util.Iterator", ["Obj"], ["next"],
            "jre", "java.util", core=True),
    "MyIt": t("MyIt", "com.app.MyIter", ["It"], ["next", "helper"],
              "app", "com.app"),
    "LibIt": t("LibIt", "org.lib.LibIter", ["It"], ["next"],
               "lib", "org.lib"),
    "Svc": t("Svc", "com.app.Service", ["Obj"], ["run"],
             "app", "com.app"),
}, core_project_id="jre")

cg = build_call_graph([], [
    # MyIt.next calls its own helper: same hierarchy, level 1
    CallEdge(method("MyIt", "next"), method("MyIt", "helper"), "MyIt"),
    # the helper only touches the core library: level 0
    CallEdge(method("MyIt", "helper"), method("Obj", "hashCode"), "Obj"),
    # Svc.run fans out to both overriders; LibIt lives in another
    # project, so the cross-project edge forces level 3
    CallEdge(method("Svc", "run"), method("MyIt", "next"), "It"),
    CallEdge(method("Svc", "run"), method("LibIt", "next"), "It"),
    # LibIt.next calls back into the app project: level 3 from lib's view
    CallEdge(method("LibIt", "next"), method("Svc", "run"), "Svc"),
])

labels = label_all(cg, h)
print("per-method localness:")
for node in cg.sorted_nodes():
    print(f"  level {labels[node]}  {node.uid}")

# summarize the derivatives of the busiest origin
origins = find_origins(cg, h)
table = origin_edge_frequencies(cg, origins)
top = [origin for origin, _ in table.top(3)]
dist = localness_distribution(origins, labels, top)
print("\nper-origin level distribution (fractions over levels 0..3):")
for origin in top:
    levels = dist.per_origin[origin]
    cells = "  ".join(f"{v:.2f}" for v in levels)
    print(f"  {origin.render(h):35s} {cells}")

# the same corpus under a stricter notion of "same hierarchy": only
# ancestor/descendant pairs count, types merely sharing a non-core
# ancestor do not
strict = label_all(cg, h, LocalnessOptions(extended_hierarchy=False))
changed = {n for n in labels if labels[n] != strict[n]}
print(f"\nstrict hierarchy option changes {len(changed)} label(s)")
