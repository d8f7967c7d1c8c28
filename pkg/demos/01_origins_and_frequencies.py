"""
Finding origin methods and ranking them by caused edges
=======================================================

A small hand-built hierarchy: a core Object/Iterator pair and three
application classes, two of which override next().  We locate each call
target's origin method (the declaration where its signature first appears)
and rank origins by how many call edges they are responsible for.
"""

from cgprune import (
    CallEdge,
    MethodNode,
    MethodSignature,
    TypeHierarchy,
    TypeNode,
    build_call_graph,
    find_origins,
    origin_edge_frequencies,
    unique_derivative_counts,
    validate_hierarchy,
)


def sig(name):
    return MethodSignature(name)


def method(type_id, name):
    return MethodNode(type_id, sig(name))


# the hierarchy: Object and Iterator live in the core "jre" project,
# everything else is user code split over two projects
h = TypeHierarchy(types={
    "Obj": TypeNode("Obj", "java.lang.Object", (),
                    frozenset({sig("hashCode")}),
                    project_id="jre", package_name="java.lang",
                    is_core_lib=True),
    "It": TypeNode("It", "java.util.Iterator", ("Obj",),
                   frozenset({sig("next"), sig("hasNext")}),
                   project_id="jre", package_name="java.util",
                   is_core_lib=True),
    "MyIt": TypeNode("MyIt", "com.app.MyIter", ("It",),
                     frozenset({sig("next")}),
                     project_id="app", package_name="com.app"),
    "LibIt": TypeNode("LibIt", "org.lib.LibIter", ("It",),
                      frozenset({sig("next")}),
                      project_id="lib", package_name="org.lib"),
    "Svc": TypeNode("Svc", "com.app.Service", ("Obj",),
                    frozenset({sig("run")}),
                    project_id="app", package_name="com.app"),
}, core_project_id="jre")
assert validate_hierarchy(h) == []

# one call site on a statically-typed Iterator receiver expands, CHA style,
# to both overriders; the other edges are ordinary direct calls
cg = build_call_graph([], [
    CallEdge(method("Svc", "run"), method("MyIt", "next"), "It"),
    CallEdge(method("Svc", "run"), method("LibIt", "next"), "It"),
    CallEdge(method("MyIt", "next"), method("Obj", "hashCode"), "Obj"),
])

origins = find_origins(cg, h)
print("origin of each call target:")
for target in sorted(origins.entries):
    print(f"  {target.uid:30s} -> {origins.entries[target].render(h)}")

# both next() overrides trace back to the single declaration in Iterator,
# so that origin owns two of the three edges
table = origin_edge_frequencies(cg, origins)
print("\norigins ranked by caused edges:")
for rank, (origin, count) in enumerate(table.rows, start=1):
    print(f"  #{rank} {origin.render(h):35s} {count} edge(s)")

print("\norigins ranked by distinct derivative methods:")
for origin, count in unique_derivative_counts(cg, origins):
    print(f"  {origin.render(h):35s} {count} derivative(s)")
