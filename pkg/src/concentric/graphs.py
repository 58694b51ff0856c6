"""Small graphs, their automorphisms and half-arc-transitivity.

A graph is *half-arc-transitive* (HAT) when its full automorphism group is
transitive on vertices and on edges but not on arcs.  The tools here work
on honest small instances (at most 64 vertices for automorphism search);
the graphs attached to ``Alt(2^m)`` are far too large to materialise.
"""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import BSGS, orbits, schreier_sims

__all__ = [
    "Graph",
    "DiGraph",
    "TransitivityReport",
    "HATVerdict",
    "holt_graph",
    "cycle_graph",
    "complete_graph",
    "orbital_digraph",
    "underlying_graph",
    "suborbits",
    "is_self_paired",
    "coset_graph",
    "enumerate_group",
    "transitivity_report",
    "hat_verdict",
    "tiny_automorphism_group",
    "automorphism_group_order",
    "export_graph",
    "import_graph",
    "GraphDemo",
    "DEMOS",
    "holt_demo",
    "orbital_demo",
    "coset_demo",
]

MAX_AUT_VERTICES = 64
MAX_ORBITAL_DEGREE = 1 << 14
MAX_GROUP_ELEMENTS = 10 ** 5


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``0 .. n-1`` with sorted neighbour lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u]]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def valency(self) -> int | None:
        """Common degree if the graph is regular, else ``None``."""
        degs = {len(a) for a in self.adjacency}
        if len(degs) == 1:
            return degs.pop()
        return 0 if not degs else None

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        perm = list(map(int, perm))
        if sorted(perm) != list(range(self.n)):
            return False
        edge_set = set(self.edges())
        for u, v in edge_set:
            a, b = perm[u], perm[v]
            if (min(a, b), max(a, b)) not in edge_set:
                return False
        return True

    def distance_matrix(self) -> np.ndarray:
        n = self.n
        dist = np.full((n, n), -1, dtype=np.int64)
        for s in range(n):
            dist[s, s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in self.adjacency[u]:
                    if dist[s, v] < 0:
                        dist[s, v] = dist[s, u] + 1
                        queue.append(v)
        return dist


@dataclass(frozen=True)
class DiGraph:
    n: int
    arcs: frozenset[tuple[int, int]]

    def out_degree(self, v: int) -> int:
        return sum(1 for (a, _) in self.arcs if a == v)

    def is_symmetric(self) -> bool:
        return all((b, a) in self.arcs for (a, b) in self.arcs)


# ---------------------------------------------------------------------------
# named graphs


def holt_graph() -> Graph:
    """The Holt graph: vertices ``(x, y)`` in ``Z_9 x Z_3`` (id ``3x + y``),
    ``(x, y)`` adjacent to ``(4x +- 1, y + 1)`` and ``(7x +- 7, y - 1)``."""
    def vid(x: int, y: int) -> int:
        return 3 * (x % 9) + (y % 3)

    edges = []
    for x in range(9):
        for y in range(3):
            for s in (1, -1):
                edges.append((vid(x, y), vid(4 * x + s, y + 1)))
                edges.append((vid(x, y), vid(7 * x + 7 * s, y - 1)))
    return Graph.from_edges(27, edges)


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


# ---------------------------------------------------------------------------
# orbitals


def _gens_lists(gens: Iterable) -> list[list[int]]:
    return [np.asarray(g, dtype=np.intp).tolist() for g in gens]


def orbital_digraph(gens: Iterable, degree: int, seed_pair: tuple[int, int]) -> DiGraph:
    """The orbit of ``seed_pair`` under the induced action on ordered pairs."""
    gl = _gens_lists(gens)
    if degree > MAX_ORBITAL_DEGREE:
        raise ValueError("degree too large to materialise an orbital")
    if len(orbits([np.asarray(g) for g in gl], degree)) != 1:
        raise ValueError("orbital graphs need a transitive group")
    start = (int(seed_pair[0]), int(seed_pair[1]))
    seen = {start}
    queue = deque([start])
    while queue:
        a, b = queue.popleft()
        for g in gl:
            img = (g[a], g[b])
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return DiGraph(degree, frozenset(seen))


def underlying_graph(dg: DiGraph) -> Graph:
    return Graph.from_edges(dg.n, {(min(a, b), max(a, b)) for a, b in dg.arcs if a != b})


def suborbits(bsgs: BSGS, base_point: int) -> list[list[int]]:
    """Orbits of the stabiliser of ``base_point``."""
    gens = bsgs.point_stabilizer(base_point)
    return orbits(gens, bsgs.degree)


def is_self_paired(gens: Iterable, degree: int, seed_pair: tuple[int, int]) -> bool:
    dg = orbital_digraph(gens, degree, seed_pair)
    return (seed_pair[1], seed_pair[0]) in dg.arcs


# ---------------------------------------------------------------------------
# coset graphs


def enumerate_group(gens: Iterable, degree: int) -> list[tuple[int, ...]]:
    """All elements of ``<gens>`` as image tuples (bounded enumeration)."""
    gl = _gens_lists(gens)
    ident = tuple(range(degree))
    seen = {ident}
    queue = deque([ident])
    while queue:
        a = queue.popleft()
        for g in gl:
            b = tuple(g[i] for i in a)  # a then g
            if b not in seen:
                if len(seen) >= MAX_GROUP_ELEMENTS:
                    raise ValueError("group too large to enumerate")
                seen.add(b)
                queue.append(b)
    return sorted(seen)


def _mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(b[i] for i in a)  # a then b


def _inv(a: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def coset_graph(group_elements: Iterable, subgroup_gens: Iterable, connector) -> Graph:
    """Graph on the right cosets ``Kx``; ``Kx ~ Ky`` iff
    ``x y^{-1}`` lies in ``K {g, g^{-1}} K``."""
    elems = [tuple(int(v) for v in np.asarray(e)) for e in group_elements]
    elem_set = set(elems)
    if not elems:
        raise ValueError("empty group")
    degree = len(elems[0])
    k_elems = enumerate_group(list(subgroup_gens), degree) if subgroup_gens else [tuple(range(degree))]
    if not set(k_elems) <= elem_set:
        raise ValueError("subgroup generators do not lie in the group")
    g = tuple(int(v) for v in np.asarray(connector))
    if g not in elem_set:
        raise ValueError("connector does not lie in the group")
    coset_of: dict[tuple[int, ...], int] = {}
    reps: list[tuple[int, ...]] = []
    for x in elems:
        if x in coset_of:
            continue
        cid = len(reps)
        reps.append(x)
        for k in k_elems:
            coset_of[_mul(k, x)] = cid
    double = {_mul(_mul(k1, s), k2) for k1 in k_elems for k2 in k_elems for s in (g, _inv(g))}
    edges = set()
    for cid, x in enumerate(reps):
        for dd in double:
            y = coset_of[_mul(dd, x)]
            if y != cid:
                edges.add((min(cid, y), max(cid, y)))
    return Graph.from_edges(len(reps), edges)


# ---------------------------------------------------------------------------
# transitivity


@dataclass(frozen=True)
class TransitivityReport:
    vertex_transitive: bool
    edge_transitive: bool
    arc_transitive: bool
    vertex_orbits: int
    edge_orbits: int
    arc_orbits: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class HATVerdict:
    is_hat: bool
    reason: str
    report: TransitivityReport

    @property
    def label(self) -> str:
        return "HAT" if self.is_hat else "not-HAT"


def _count_orbits(items: list, act) -> int:
    index = {it: i for i, it in enumerate(items)}
    parent = list(range(len(items)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, it in enumerate(items):
        for img in act(it):
            a, b = find(i), find(index[img])
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(len(items))})


def transitivity_report(gens: Iterable, graph: Graph) -> TransitivityReport:
    gl = _gens_lists(gens)
    for g in gl:
        if not graph.is_automorphism(g):
            raise ValueError("a generator is not an automorphism of the graph")
    nv = len(orbits([np.asarray(g) for g in gl], graph.n)) if gl else graph.n
    edges = graph.edges()
    ne = _count_orbits(edges, lambda e: [(min(g[e[0]], g[e[1]]), max(g[e[0]], g[e[1]])) for g in gl])
    arcs = graph.arcs()
    na = _count_orbits(arcs, lambda a: [(g[a[0]], g[a[1]]) for g in gl])
    return TransitivityReport(nv == 1, ne <= 1, na <= 1, nv, ne, na)


def hat_verdict(graph: Graph, gens: Iterable | None = None) -> HATVerdict:
    """HAT iff vertex- and edge-transitive but not arc-transitive.

    Without ``gens`` the full automorphism group is computed (the
    definition quantifies over it).
    """
    if gens is None:
        gens = tiny_automorphism_group(graph)
    rep = transitivity_report(gens, graph)
    if not rep.vertex_transitive:
        return HATVerdict(False, f"{rep.vertex_orbits} vertex orbits", rep)
    if not graph.edges():
        return HATVerdict(False, "no edges", rep)
    if not rep.edge_transitive:
        return HATVerdict(False, f"{rep.edge_orbits} edge orbits", rep)
    if rep.arc_transitive:
        return HATVerdict(False, "arc-transitive", rep)
    return HATVerdict(True, "vertex- and edge-transitive, two arc orbits", rep)


# ---------------------------------------------------------------------------
# automorphisms


def _extend(adj: list[set[int]], dist: np.ndarray, order: list[int],
            fixed: dict[int, int]) -> list[int] | None:
    """Backtracking: extend the partial map ``fixed`` to an automorphism."""
    n = len(adj)
    mapping = dict(fixed)
    used = set(mapping.values())
    rest = [v for v in order if v not in mapping]

    def candidates(v: int) -> list[int]:
        out = []
        for w in range(n):
            if w in used or len(adj[w]) != len(adj[v]):
                continue
            if all(dist[v, u] == dist[w, fu] for u, fu in mapping.items()):
                out.append(w)
        return out

    def rec(idx: int) -> bool:
        if idx == len(rest):
            return True
        v = rest[idx]
        for w in candidates(v):
            mapping[v] = w
            used.add(w)
            if rec(idx + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    for u, fu in fixed.items():
        for v, fv in fixed.items():
            if dist[u, v] != dist[fu, fv]:
                return None
    if not rec(0):
        return None
    return [mapping[v] for v in range(n)]


def tiny_automorphism_group(graph: Graph) -> list[np.ndarray]:
    """Generators of the full automorphism group (``n <= 64``).

    Works down a vertex ordering: for level ``i`` it looks, for every
    target not yet in the orbit of ``v_i`` under the generators found so
    far, for an automorphism fixing ``v_0 .. v_{i-1}`` and sending ``v_i``
    there.  Distances to already-mapped vertices prune the search, which
    is exact because automorphisms preserve the distance matrix.
    """
    n = graph.n
    if n > MAX_AUT_VERTICES:
        raise ValueError(f"automorphism search is limited to {MAX_AUT_VERTICES} vertices")
    if n == 0:
        return []
    adj = [set(a) for a in graph.adjacency]
    dist = graph.distance_matrix()
    # BFS order from vertex 0 per component keeps constraints tight
    order: list[int] = []
    seen: set[int] = set()
    for s in range(n):
        if s in seen:
            continue
        seen.add(s)
        queue = deque([s])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    gens: list[list[int]] = []
    for i in range(n - 1, -1, -1):
        v = order[i]
        fixed = {u: u for u in order[:i]}
        # orbit of v under the generators found so far (they fix order[:i])
        orb = {v}
        frontier = [v]
        while frontier:
            nxt = []
            for q in frontier:
                for g in gens:
                    if g[q] not in orb:
                        orb.add(g[q])
                        nxt.append(g[q])
            frontier = nxt
        for w in range(n):
            if w in orb or w in fixed:
                continue
            trial = dict(fixed)
            trial[v] = w
            perm = _extend(adj, dist, order, trial)
            if perm is None:
                continue
            gens.append(perm)
            # grow the orbit with the new generator
            frontier = list(orb)
            while frontier:
                nxt = []
                for q in frontier:
                    for g in gens:
                        if g[q] not in orb:
                            orb.add(g[q])
                            nxt.append(g[q])
                frontier = nxt
    for g in gens:
        assert graph.is_automorphism(g)
    return [np.asarray(g, dtype=np.intp) for g in gens]


def automorphism_group_order(graph: Graph) -> int:
    gens = tiny_automorphism_group(graph)
    return schreier_sims(gens, graph.n).order if gens else 1


# ---------------------------------------------------------------------------
# export


def export_graph(graph: Graph, fmt: str) -> bytes:
    """Serialise as ``"dot"`` or ``"graphml"`` with 0-based ids."""
    fmt = fmt.lower()
    if fmt == "dot":
        lines = ["graph G {"]
        lines += [f"  {v};" for v in range(graph.n)]
        lines += [f"  {u} -- {v};" for u, v in graph.edges()]
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "graphml":
        ns = "http://graphml.graphdrawing.org/xmlns"
        root = ET.Element("graphml", xmlns=ns)
        g = ET.SubElement(root, "graph", id="G", edgedefault="undirected")
        for v in range(graph.n):
            ET.SubElement(g, "node", id=f"n{v}")
        for idx, (u, v) in enumerate(graph.edges()):
            ET.SubElement(g, "edge", id=f"e{idx}", source=f"n{u}", target=f"n{v}")
        buf = io.BytesIO()
        ET.ElementTree(root).write(buf, encoding="utf-8", xml_declaration=True)
        return buf.getvalue() + b"\n"
    raise ValueError(f"unsupported format {fmt!r} (use dot or graphml)")


def import_graph(data: bytes, fmt: str) -> Graph:
    fmt = fmt.lower()
    text = data.decode()
    if fmt == "dot":
        nodes: set[int] = set()
        edges = []
        for line in text.splitlines():
            line = line.strip().rstrip(";")
            if not line or line.startswith("graph") or line == "}":
                continue
            if "--" in line:
                u, v = (int(t) for t in line.split("--"))
                edges.append((u, v))
                nodes.update((u, v))
            else:
                nodes.add(int(line))
        n = max(nodes) + 1 if nodes else 0
        return Graph.from_edges(n, edges)
    if fmt == "graphml":
        root = ET.fromstring(text)
        ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
        graph = root.find("g:graph", ns)
        if graph is None:
            return Graph(0, ())
        ids = [int(nd.get("id")[1:]) for nd in graph.findall("g:node", ns)]
        edges = [(int(e.get("source")[1:]), int(e.get("target")[1:]))
                 for e in graph.findall("g:edge", ns)]
        n = max(ids) + 1 if ids else 0
        return Graph.from_edges(n, edges)
    raise ValueError(f"unsupported format {fmt!r} (use dot or graphml)")


# ---------------------------------------------------------------------------
# demos


@dataclass
class GraphDemo:
    name: str
    graph: Graph
    report: TransitivityReport
    verdict: HATVerdict
    info: dict


def _holt_aut() -> list[np.ndarray]:
    return tiny_automorphism_group(holt_graph())


def holt_demo() -> GraphDemo:
    g = holt_graph()
    gens = _holt_aut()
    order = schreier_sims(gens, g.n).order
    verdict = hat_verdict(g, gens)
    return GraphDemo("holt", g, verdict.report, verdict,
                     {"vertices": g.n, "valency": g.valency(), "aut_order": order})


def orbital_demo() -> GraphDemo:
    """Underlying graph of a non-self-paired orbital of length 2 for
    ``Aut(Holt)`` acting on the 27 vertices."""
    gens = _holt_aut()
    bsgs = schreier_sims(gens, 27)
    for orb in suborbits(bsgs, 0):
        if len(orb) == 2 and not is_self_paired(gens, 27, (0, orb[0])):
            seed = (0, orb[0])
            break
    else:  # pragma: no cover - the Holt group has such suborbits
        raise AssertionError("no non-self-paired suborbit of length 2")
    graph = underlying_graph(orbital_digraph(gens, 27, seed))
    verdict = hat_verdict(graph)
    return GraphDemo("orbital-demo", graph, verdict.report, verdict,
                     {"seed_pair": list(seed), "suborbit_length": 2, "self_paired": False,
                      "valency": graph.valency()})


def coset_demo() -> GraphDemo:
    """Coset graph of ``Aut(Holt)`` over a vertex stabiliser, with the
    first connector giving a connected 4-valent graph."""
    gens = _holt_aut()
    bsgs = schreier_sims(gens, 27)
    stab = bsgs.point_stabilizer(0)
    elems = enumerate_group(gens, 27)
    for g in elems:
        graph = coset_graph(elems, stab, g)
        if graph.valency() == 4 and graph.is_connected():
            break
    else:  # pragma: no cover
        raise AssertionError("no connector yields a connected 4-valent coset graph")
    k_elems = enumerate_group(stab, 27) if stab else [tuple(range(27))]
    verdict = hat_verdict(graph)
    return GraphDemo("coset-demo", graph, verdict.report, verdict,
                     {"group_order": len(elems), "subgroup_order": len(k_elems),
                      "connector": list(g), "valency": graph.valency()})


DEMOS = {"holt": holt_demo, "orbital-demo": orbital_demo, "coset-demo": coset_demo}
