"""Feynman graphs as half-edge (dart) structures.

A graph is a fixed-point-free involution on darts (its edges), a partition of
darts into vertices, and an injective labeling of the univalent external
vertices by 1..N.  Multigraph features (parallel edges, self-loops) are
first-class.  Isomorphism always means: a dart bijection commuting with the
involution, preserving the vertex partition, and fixing every external vertex.

Canonical labeling works per connected component by color refinement with
individualization backtracking, taking the minimum edge list over all
discrete orderings.  The same search tree yields the automorphism count: the
number of minimal leaves is the number of vertex-level automorphisms, and the
dart-level order follows by multiplying parallel-edge and self-loop factors.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import GraphStructureError


@dataclass(frozen=True)
class GradedDegree:
    nu: int      # internal vertex count minus one
    loops: int   # internal lines minus nu


class FeynmanGraph:
    """Immutable half-edge graph.

    involution: tuple, involution[d] = partner dart of d
    vertices:   tuple of sorted dart tuples, one per vertex
    external:   tuple of (label, vertex_index), labels exactly 1..N
    """

    __slots__ = ("involution", "vertices", "external", "_vertex_of",
                 "_canonical", "_aut")

    def __init__(self, involution: Sequence[int],
                 vertices: Sequence[Sequence[int]],
                 external: Mapping[int, int] | Sequence[tuple]):
        involution = tuple(int(d) for d in involution)
        vertices = tuple(tuple(sorted(int(d) for d in v)) for v in vertices)
        if hasattr(external, "items"):
            ext_items = external.items()
        else:
            ext_items = external
        ext = tuple(sorted((int(l), int(v)) for l, v in ext_items))

        n = len(involution)
        for d, p in enumerate(involution):
            if not 0 <= p < n or involution[p] != d or p == d:
                raise GraphStructureError(
                    f"involution is not a fixed-point-free involution at dart {d}")
        seen = [False] * n
        vertex_of = [-1] * n
        for vi, darts in enumerate(vertices):
            if not darts:
                raise GraphStructureError(f"vertex {vi} has no darts")
            for d in darts:
                if not 0 <= d < n or seen[d]:
                    raise GraphStructureError(
                        f"dart {d} missing or repeated in the vertex partition")
                seen[d] = True
                vertex_of[d] = vi
        if not all(seen):
            raise GraphStructureError("vertex partition does not cover all darts")

        labels = [l for l, _ in ext]
        if labels != list(range(1, len(labels) + 1)):
            raise GraphStructureError("external labels must be exactly 1..N")
        ext_vertices = [v for _, v in ext]
        if len(set(ext_vertices)) != len(ext_vertices):
            raise GraphStructureError("external labels must map to distinct vertices")
        for l, v in ext:
            if not 0 <= v < len(vertices):
                raise GraphStructureError(f"external label {l} points to no vertex")
            if len(vertices[v]) != 1:
                raise GraphStructureError(
                    f"external vertex for label {l} is not univalent")

        object.__setattr__(self, "involution", involution)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "external", ext)
        object.__setattr__(self, "_vertex_of", tuple(vertex_of))
        object.__setattr__(self, "_canonical", None)
        object.__setattr__(self, "_aut", None)

    def __setattr__(self, name, value):
        raise AttributeError("FeynmanGraph is immutable")

    # -- basic structure ----------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.involution)

    @property
    def n_external(self) -> int:
        return len(self.external)

    @property
    def external_map(self) -> dict:
        return dict(self.external)

    @property
    def external_vertex_set(self) -> frozenset:
        return frozenset(v for _, v in self.external)

    @property
    def internal_vertices(self) -> tuple:
        ext = self.external_vertex_set
        return tuple(v for v in range(len(self.vertices)) if v not in ext)

    def vertex_of(self, dart: int) -> int:
        return self._vertex_of[dart]

    def valence(self, vertex: int) -> int:
        return len(self.vertices[vertex])

    @property
    def valence_profile(self) -> dict:
        """Map m -> number of m-valent internal vertices."""
        prof: Counter = Counter()
        for v in self.internal_vertices:
            prof[self.valence(v)] += 1
        return dict(sorted(prof.items()))

    def edges(self) -> tuple:
        """Dart pairs (a, b) with a < b, sorted."""
        return tuple((d, p) for d, p in enumerate(self.involution) if d < p)

    def edge_vertex_pairs(self) -> tuple:
        """Edges as sorted (vertex, vertex) pairs, sorted; parallel edges repeat."""
        out = []
        for a, b in self.edges():
            u, v = self._vertex_of[a], self._vertex_of[b]
            out.append((u, v) if u <= v else (v, u))
        return tuple(sorted(out))

    def internal_edge_count(self) -> int:
        ext = self.external_vertex_set
        return sum(1 for u, v in self.edge_vertex_pairs()
                   if u not in ext and v not in ext)

    def gradings(self) -> GradedDegree:
        v = len(self.internal_vertices)
        i = self.internal_edge_count()
        nu = v - 1
        return GradedDegree(nu=nu, loops=i - nu)

    # -- connectivity -------------------------------------------------------

    def components(self) -> tuple:
        """Vertex sets of connected components, sorted by smallest vertex."""
        parent = list(range(len(self.vertices)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edge_vertex_pairs():
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        groups: dict = {}
        for v in range(len(self.vertices)):
            groups.setdefault(find(v), []).append(v)
        return tuple(tuple(sorted(g)) for g in
                     sorted(groups.values(), key=lambda g: min(g)))

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def is_one_particle_irreducible(self) -> bool:
        """Connected, and still connected after deleting any one internal edge."""
        if not self.is_connected():
            return False
        ext = self.external_vertex_set
        pairs = list(self.edge_vertex_pairs())
        for skip in range(len(pairs)):
            u, v = pairs[skip]
            if u in ext or v in ext:
                continue
            if u == v:
                continue  # removing a self-loop cannot disconnect
            remaining = pairs[:skip] + pairs[skip + 1:]
            if not _connected_on(len(self.vertices), remaining):
                return False
        return True

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "darts": self.n_darts,
            "involution": [list(e) for e in self.edges()],
            "vertices": [list(v) for v in self.vertices],
            "external": {str(l): v for l, v in self.external},
        }

    @classmethod
    def from_json(cls, obj) -> "FeynmanGraph":
        n = int(obj["darts"])
        inv = [-1] * n
        for a, b in obj["involution"]:
            a, b = int(a), int(b)
            if not (0 <= a < n and 0 <= b < n) or inv[a] != -1 or inv[b] != -1:
                raise GraphStructureError(f"bad involution pair [{a}, {b}]")
            inv[a], inv[b] = b, a
        external = {int(l): int(v) for l, v in obj["external"].items()}
        return cls(inv, obj["vertices"], external)

    def to_dot(self) -> str:
        lines = ["graph feynman {"]
        for label, v in self.external:
            lines.append(f'  x{label} [shape=box, label="{label}"];')
        names = {}
        for label, v in self.external:
            names[v] = f"x{label}"
        counter = 0
        for v in self.internal_vertices:
            names[v] = f"v{counter}"
            lines.append(f'  v{counter} [shape=circle, label="{self.valence(v)}"];')
            counter += 1
        for u, v in self.edge_vertex_pairs():
            lines.append(f"  {names[u]} -- {names[v]};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    # -- isomorphism machinery ----------------------------------------------

    def canonical_form(self) -> tuple:
        """(canonical string, canonically relabeled graph); equal strings
        characterize isomorphism with external labels fixed pointwise."""
        if self._canonical is None:
            object.__setattr__(self, "_canonical", _canonicalize(self))
        return self._canonical

    def canonical_string(self) -> str:
        return self.canonical_form()[0]

    def automorphism_order(self) -> int:
        if self._aut is None:
            object.__setattr__(self, "_aut", _automorphism_order(self))
        return self._aut

    def __repr__(self):
        prof = ",".join(f"{m}:{k}" for m, k in self.valence_profile.items())
        return (f"FeynmanGraph(N={self.n_external}, profile={{{prof}}}, "
                f"edges={list(self.edge_vertex_pairs())})")


def _connected_on(n_vertices: int, pairs: Iterable[tuple]) -> bool:
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    roots = {find(v) for v in range(n_vertices)}
    return len(roots) <= 1


def build_graph(n_external: int, internal_valences: Sequence[int],
                edges: Sequence[tuple]) -> FeynmanGraph:
    """Convenience constructor from vertex-level edge data.

    Vertices 0..n_external-1 are the external vertices for labels 1..N;
    internal vertices follow in the order of ``internal_valences``.  Each
    edge is a pair of vertex indices; self-loops are (v, v).
    """
    n_vertices = n_external + len(internal_valences)
    darts_at: list = [[] for _ in range(n_vertices)]
    involution = []
    for u, v in edges:
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise GraphStructureError(f"edge ({u},{v}) references no vertex")
        a = len(involution)
        involution.extend([a + 1, a])
        darts_at[u].append(a)
        darts_at[v].append(a + 1)
    for i in range(n_external):
        if len(darts_at[i]) != 1:
            raise GraphStructureError(
                f"external vertex {i} must have exactly one edge end")
    for j, m in enumerate(internal_valences):
        if len(darts_at[n_external + j]) != m:
            raise GraphStructureError(
                f"internal vertex {j} has {len(darts_at[n_external + j])} "
                f"edge ends, declared valence {m}")
    external = {i + 1: i for i in range(n_external)}
    return FeynmanGraph(involution, darts_at, external)


def relabel(graph: FeynmanGraph, dart_perm: Sequence[int]) -> FeynmanGraph:
    """Apply a dart permutation (new dart id = dart_perm[old]); structure kept."""
    n = graph.n_darts
    inv = [0] * n
    for d in range(n):
        inv[dart_perm[d]] = dart_perm[graph.involution[d]]
    vertices = [tuple(sorted(dart_perm[d] for d in v)) for v in graph.vertices]
    return FeynmanGraph(inv, vertices, graph.external_map)


# ---------------------------------------------------------------------------
# canonical labeling
# ---------------------------------------------------------------------------

def _adjacency(graph: FeynmanGraph, comp: Sequence[int]):
    """Per-vertex neighbor lists (by vertex, with multiplicity) within comp."""
    inside = set(comp)
    neigh: dict = {v: [] for v in comp}
    for u, v in graph.edge_vertex_pairs():
        if u in inside and v in inside:
            neigh[u].append(v)
            neigh[v].append(u)
    return neigh


def _refine(comp: Sequence[int], neigh: Mapping[int, list],
            colors: Mapping[int, int]) -> dict:
    """Iterated neighborhood refinement; color ids are dense ranks of sorted
    signatures, hence isomorphism-invariant."""
    colors = dict(colors)
    while True:
        sigs = {}
        for v in comp:
            sigs[v] = (colors[v], tuple(sorted(colors[u] for u in neigh[v])))
        ranking = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
        new = {v: ranking[sigs[v]] for v in comp}
        if new == colors:
            return colors
        colors = new


def _component_leaves(graph: FeynmanGraph, comp: Sequence[int]):
    """All discrete internal orderings reached by refinement plus
    individualization, with the component's external vertices pinned."""
    ext_of = {v: l for l, v in graph.external}
    internals = [v for v in comp if v not in ext_of]
    externals = sorted((ext_of[v], v) for v in comp if v in ext_of)
    neigh = _adjacency(graph, comp)

    init = {}
    for v in comp:
        if v in ext_of:
            init[v] = (0, ext_of[v])
        else:
            init[v] = (1, graph.valence(v))
    ranking = {s: i for i, s in enumerate(sorted(set(init.values())))}
    colors0 = {v: ranking[s] for v, s in init.items()}

    leaves = []

    def search(colors):
        colors = _refine(comp, neigh, colors)
        cells: dict = {}
        for v in internals:
            cells.setdefault(colors[v], []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            order = sorted(internals, key=lambda v: colors[v])
            leaves.append(order)
            return
        for v in sorted(target):
            branched = dict(colors)
            # give v a fresh color just below its cell, then re-rank densely
            branched[v] = (branched[v], 0)
            for u in comp:
                if u != v:
                    branched[u] = (branched[u], 1)
            rank = {s: i for i, s in enumerate(sorted(set(branched.values())))}
            search({u: rank[s] for u, s in branched.items()})

    search(colors0)
    return externals, leaves, neigh


def _component_key(graph: FeynmanGraph, externals, order):
    """Edge multiset of the component under a local vertex numbering:
    externals first (label order), then internals in the given order."""
    local = {}
    for i, (_label, v) in enumerate(externals):
        local[v] = i
    base = len(externals)
    for i, v in enumerate(order):
        local[v] = base + i
    inside = set(local)
    out = []
    for u, v in graph.edge_vertex_pairs():
        if u in inside:
            a, b = local[u], local[v]
            out.append((a, b) if a <= b else (b, a))
    return tuple(sorted(out))


def _canonical_component(graph: FeynmanGraph, comp: Sequence[int]):
    """(key, externals, best internal order, minimal-leaf count)."""
    externals, leaves, _ = _component_leaves(graph, comp)
    best_key = None
    best_order = None
    n_min = 0
    for order in leaves:
        key = _component_key(graph, externals, order)
        if best_key is None or key < best_key:
            best_key, best_order, n_min = key, order, 1
        elif key == best_key:
            n_min += 1
    if best_key is None:  # single vertex with no edges cannot occur (valence >= 1)
        raise GraphStructureError("component without edges")
    ext_labels = tuple(l for l, _ in externals)
    valences = tuple(graph.valence(v) for v in best_order)
    return (ext_labels, valences, best_key), externals, best_order, n_min


def _canonicalize(graph: FeynmanGraph):
    comps = graph.components()
    labeled = []
    vacuum = []
    for comp in comps:
        key, externals, order, _ = _canonical_component(graph, comp)
        if externals:
            labeled.append((externals[0][0], key, externals, order))
        else:
            vacuum.append((key, externals, order))
    labeled.sort(key=lambda item: item[0])
    vacuum.sort(key=lambda item: item[0])

    # global vertex numbering: all externals by label, then internals
    # component by component
    ext_map = {l: l - 1 for l, _ in graph.external}
    n_ext = graph.n_external
    new_index = {}
    for label, v in graph.external:
        new_index[v] = label - 1
    cursor = n_ext
    ordered_components = [(key, externals, order)
                          for _, key, externals, order in labeled]
    ordered_components += vacuum
    for _key, _externals, order in ordered_components:
        for v in order:
            new_index[v] = cursor
            cursor += 1

    edge_pairs = []
    for u, v in graph.edge_vertex_pairs():
        a, b = new_index[u], new_index[v]
        edge_pairs.append((a, b) if a <= b else (b, a))
    edge_pairs.sort()

    canon_string = "N{};V{};".format(n_ext, cursor) + ",".join(
        f"{a}-{b}" for a, b in edge_pairs)

    # rebuild the relabeled graph from the canonical edge list
    darts_at: list = [[] for _ in range(cursor)]
    involution = []
    for a, b in edge_pairs:
        d = len(involution)
        involution.extend([d + 1, d])
        darts_at[a].append(d)
        darts_at[b].append(d + 1)
    canon_graph = FeynmanGraph(involution, darts_at, ext_map)
    return canon_string, canon_graph


def _automorphism_order(graph: FeynmanGraph) -> int:
    """Order of the dart automorphism group fixing each external vertex."""
    if graph.n_darts == 0:
        return 1
    total = 1
    vacuum_keys: Counter = Counter()
    for comp in graph.components():
        key, externals, _order, n_min = _canonical_component(graph, comp)
        inside = set(comp)
        comp_factor = n_min  # vertex-level automorphisms of the component
        loops: Counter = Counter()
        multi: Counter = Counter()
        for u, v in graph.edge_vertex_pairs():
            if u in inside:
                if u == v:
                    loops[u] += 1
                else:
                    multi[(u, v)] += 1
        for m in multi.values():
            comp_factor *= math.factorial(m)
        for s in loops.values():
            comp_factor *= math.factorial(s) * 2 ** s
        total *= comp_factor
        if not externals:
            vacuum_keys[key] += 1
    for count in vacuum_keys.values():
        total *= math.factorial(count)
    return total


def canonical_form(graph: FeynmanGraph) -> tuple:
    return graph.canonical_form()


def automorphism_order(graph: FeynmanGraph) -> int:
    return graph.automorphism_order()


def gradings(graph: FeynmanGraph) -> GradedDegree:
    return graph.gradings()


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _matchings(darts: tuple):
    if not darts:
        yield ()
        return
    first = darts[0]
    rest = darts[1:]
    for i in range(len(rest)):
        head = (first, rest[i])
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield (head,) + tail


def _has_vacuum_component(graph: FeynmanGraph) -> bool:
    ext = graph.external_vertex_set
    return any(not (set(comp) & ext) for comp in graph.components())


def matchings_by_class(n_external: int, profile: Mapping[int, int]):
    """Enumerate all perfect matchings of the dart set for (N, profile) and
    bucket them by isomorphism class.

    Returns {canonical string: (representative graph, matching count)} where
    the representative is canonically relabeled.  The count per class times
    |Aut| equals prod_m n_m! (m!)^{n_m}: the pairing-count identity.
    """
    profile = {int(m): int(k) for m, k in profile.items() if int(k)}
    for m, k in profile.items():
        if m < 1 or k < 0:
            raise GraphStructureError(f"bad profile entry {m}:{k}")
    n_internal_darts = sum(m * k for m, k in profile.items())
    total = n_external + n_internal_darts
    if total % 2:
        raise GraphStructureError(
            "odd dart total: no perfect matchings", darts=total)

    vertex_of_dart = []
    valences = []
    for i in range(n_external):
        vertex_of_dart.append(i)
    vid = n_external
    for m in sorted(profile):
        for _ in range(profile[m]):
            valences.append(m)
            vertex_of_dart.extend([vid] * m)
            vid += 1
    n_vertices = vid

    # bucket matchings by their labeled edge multiset before canonicalizing
    multisets: Counter = Counter()
    for matching in _matchings(tuple(range(total))):
        pairs = []
        for a, b in matching:
            u, v = vertex_of_dart[a], vertex_of_dart[b]
            pairs.append((u, v) if u <= v else (v, u))
        multisets[tuple(sorted(pairs))] += 1

    external = {i + 1: i for i in range(n_external)}
    classes: dict = {}
    for edge_key, count in multisets.items():
        darts_at: list = [[] for _ in range(n_vertices)]
        involution: list = []
        for u, v in edge_key:
            d = len(involution)
            involution.extend([d + 1, d])
            darts_at[u].append(d)
            darts_at[v].append(d + 1)
        g = FeynmanGraph(involution, darts_at, external)
        canon, rep = g.canonical_form()
        if canon in classes:
            rep0, c0 = classes[canon]
            classes[canon] = (rep0, c0 + count)
        else:
            classes[canon] = (rep, count)
    return classes


def enumerate_graphs(n_external: int, profile: Mapping[int, int],
                     include_vacuum: bool = True) -> list:
    """One canonically-labeled representative per isomorphism class of
    graphs with the given external count and internal valence profile."""
    classes = matchings_by_class(n_external, profile)
    out = []
    for canon in sorted(classes):
        rep, _count = classes[canon]
        if not include_vacuum and _has_vacuum_component(rep):
            continue
        out.append(rep)
    return out


# ---------------------------------------------------------------------------
# contraction
# ---------------------------------------------------------------------------

def _selection_components(graph: FeynmanGraph, selection: frozenset):
    neigh: dict = {v: set() for v in selection}
    for u, v in graph.edge_vertex_pairs():
        if u in selection and v in selection and u != v:
            neigh[u].add(v)
            neigh[v].add(u)
    seen = set()
    comps = []
    for start in sorted(selection):
        if start in seen:
            continue
        stack = [start]
        comp = []
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            comp.append(v)
            stack.extend(neigh[v] - seen)
        comps.append(tuple(sorted(comp)))
    return comps


def contract(graph: FeynmanGraph, selection: Iterable[int]) -> FeynmanGraph:
    """Shrink each connected component of the vertex-induced subgraph on
    ``selection`` to a single internal vertex; edges inside a component
    disappear, boundary edges survive."""
    selection = frozenset(int(v) for v in selection)
    ext = graph.external_vertex_set
    for v in selection:
        if not 0 <= v < len(graph.vertices):
            raise GraphStructureError(f"selection references no vertex {v}")
        if v in ext:
            raise GraphStructureError(
                f"selection includes external vertex {v}")
    if not selection:
        return graph

    comps = _selection_components(graph, selection)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci

    vofd = graph._vertex_of
    removed = set()
    for d in range(graph.n_darts):
        u, w = vofd[d], vofd[graph.involution[d]]
        if u in selection and w in selection:
            removed.add(d)

    kept = [d for d in range(graph.n_darts) if d not in removed]
    renumber = {d: i for i, d in enumerate(kept)}
    new_involution = [renumber[graph.involution[d]] for d in kept]

    new_vertices = []
    old_to_new = {}
    for v in range(len(graph.vertices)):
        if v in selection:
            continue
        old_to_new[v] = len(new_vertices)
        new_vertices.append([renumber[d] for d in graph.vertices[v]])
    for ci, comp in enumerate(comps):
        boundary = []
        for v in comp:
            boundary.extend(renumber[d] for d in graph.vertices[v]
                            if d not in removed)
        if not boundary:
            raise GraphStructureError(
                "contracting a whole component would leave a vertex "
                "with no darts", component=list(comp))
        new_vertices.append(sorted(boundary))
    external = {l: old_to_new[v] for l, v in graph.external}
    return FeynmanGraph(new_involution, new_vertices, external)


def induced_subgraph(graph: FeynmanGraph, selection: Iterable[int]) -> FeynmanGraph:
    """The subgraph on the selected internal vertices with every edge among
    them (and nothing else); its own external set is empty."""
    selection = frozenset(int(v) for v in selection)
    ext = graph.external_vertex_set
    for v in selection:
        if not 0 <= v < len(graph.vertices):
            raise GraphStructureError(f"selection references no vertex {v}")
        if v in ext:
            raise GraphStructureError(f"selection includes external vertex {v}")
    vofd = graph._vertex_of
    kept = [d for d in range(graph.n_darts)
            if vofd[d] in selection and vofd[graph.involution[d]] in selection]
    renumber = {d: i for i, d in enumerate(kept)}
    involution = [renumber[graph.involution[d]] for d in kept]
    vertices = []
    for v in sorted(selection):
        darts = [renumber[d] for d in graph.vertices[v] if d in renumber]
        if not darts:
            raise GraphStructureError(
                f"vertex {v} has no edge inside the selection", vertex=v)
        vertices.append(darts)
    return FeynmanGraph(involution, vertices, {})


def disjoint_union(a: FeynmanGraph, b: FeynmanGraph) -> FeynmanGraph:
    """Disjoint union; external labels of ``b`` are shifted past those of ``a``."""
    off_d = a.n_darts
    off_v = len(a.vertices)
    involution = list(a.involution) + [d + off_d for d in b.involution]
    vertices = [list(v) for v in a.vertices]
    vertices += [[d + off_d for d in v] for v in b.vertices]
    external = dict(a.external)
    for l, v in b.external:
        external[l + a.n_external] = v + off_v
    return FeynmanGraph(involution, vertices, external)
