"""Finite simple graphs, their Laplacians, and kernel-angle lower bounds.

Vertices are opaque string ids interned to dense indices by insertion order;
all deterministic choices (BFS roots, traversal order, component order) use
that insertion order.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .linalg import EIG_TOL, SparseHermitian, hermitian_eigs


@dataclass
class Graph:
    """Undirected simple graph.  Edges are stored canonically with the
    lower-index endpoint first; self loops and duplicates are rejected."""

    _index: dict = field(default_factory=dict)
    _ids: list = field(default_factory=list)
    _edges: list = field(default_factory=list)
    _edge_set: set = field(default_factory=set)
    _adj: list = field(default_factory=list)

    def __init__(self, vertices=(), edges=()):
        self._index = {}
        self._ids = []
        self._edges = []
        self._edge_set = set()
        self._adj = []
        for v in vertices:
            self.add_vertex(v)
        for a, b in edges:
            self.add_edge(a, b)

    def add_vertex(self, v: str) -> int:
        if v in self._index:
            return self._index[v]
        idx = len(self._ids)
        self._index[v] = idx
        self._ids.append(v)
        self._adj.append([])
        return idx

    def add_edge(self, a: str, b: str) -> None:
        if a not in self._index or b not in self._index:
            raise KeyError(f"edge ({a!r}, {b!r}) references an undeclared vertex")
        ia, ib = self._index[a], self._index[b]
        if ia == ib:
            raise ValueError(f"self loop on {a!r}")
        key = (min(ia, ib), max(ia, ib))
        if key in self._edge_set:
            raise ValueError(f"duplicate edge ({a!r}, {b!r})")
        self._edge_set.add(key)
        self._edges.append(key)
        self._adj[ia].append(ib)
        self._adj[ib].append(ia)

    @property
    def vertex_ids(self) -> list:
        return list(self._ids)

    @property
    def edges(self) -> list:
        """Edges as (id, id) pairs, lower interned index first."""
        return [(self._ids[a], self._ids[b]) for a, b in self._edges]

    def index_of(self, v: str) -> int:
        return self._index[v]

    def id_of(self, idx: int) -> str:
        return self._ids[idx]

    def __len__(self) -> int:
        return len(self._ids)

    def degree(self, v: str) -> int:
        return len(self._adj[self._index[v]])

    def neighbors(self, v: str) -> list:
        return [self._ids[i] for i in sorted(self._adj[self._index[v]])]

    def has_edge(self, a: str, b: str) -> bool:
        ia, ib = self._index[a], self._index[b]
        return (min(ia, ib), max(ia, ib)) in self._edge_set


def path_graph(length: int) -> Graph:
    """Path on ``length`` vertices named v0..v{length-1}."""
    ids = [f"v{i}" for i in range(length)]
    return Graph(ids, [(ids[i], ids[i + 1]) for i in range(length - 1)])


def complete_graph(size: int) -> Graph:
    ids = [f"v{i}" for i in range(size)]
    return Graph(ids, [(ids[i], ids[j]) for i in range(size) for j in range(i + 1, size)])


def laplacian(g: Graph) -> SparseHermitian:
    """Degree matrix minus adjacency matrix."""
    lap = SparseHermitian(len(g))
    for a, b in g._edges:
        lap.add(a, a, 1.0)
        lap.add(b, b, 1.0)
        lap.add(a, b, -1.0)
    return lap


def components(g: Graph) -> list:
    """Connected components as lists of vertex ids.  Each component is sorted
    by interned index and components are ordered by their least member."""
    seen = [False] * len(g)
    out = []
    for start in range(len(g)):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in sorted(g._adj[v]):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        out.append([g._ids[i] for i in sorted(comp)])
    return out


def bfs_tree(g: Graph, root_idx: int) -> tuple:
    """BFS order and parent map (by index) from a root, neighbors visited in
    index order.  Returns (order, parent) where parent[root] is -1."""
    parent = {root_idx: -1}
    order = [root_idx]
    queue = deque([root_idx])
    while queue:
        v = queue.popleft()
        for w in sorted(g._adj[v]):
            if w not in parent:
                parent[w] = v
                order.append(w)
                queue.append(w)
    return order, parent


def is_connected(g: Graph) -> bool:
    return len(g) > 0 and len(components(g)) == 1


def algebraic_connectivity(g: Graph) -> float:
    """Second smallest Laplacian eigenvalue.  Positive iff connected."""
    if len(g) < 2:
        raise ValueError("algebraic connectivity needs at least two vertices")
    vals = hermitian_eigs(laplacian(g), vectors=False).eigenvalues
    return float(vals[1])


def path_gap(length: int) -> float:
    """Closed form for the algebraic connectivity of the path graph."""
    if length < 2:
        raise ValueError("path gap needs length >= 2")
    return 2.0 * (1.0 - math.cos(math.pi / length))


def ground_space_basis(g: Graph) -> list:
    """Orthonormal Laplacian kernel basis: one uniform indicator vector per
    connected component, in component order."""
    out = []
    for comp in components(g):
        vec = np.zeros(len(g))
        for v in comp:
            vec[g.index_of(v)] = 1.0
        out.append(vec / math.sqrt(len(comp)))
    return out


def kitaev_bound(proj_a: np.ndarray, proj_b: np.ndarray, mu: float) -> float:
    """Geometric lower bound mu * (1 - cos angle) for a sum of two PSD
    operators whose kernels have the given orthogonal projectors; mu is the
    smaller of the two least nonzero eigenvalues."""
    prod = np.asarray(proj_a, dtype=complex) @ np.asarray(proj_b, dtype=complex)
    cos_angle = min(1.0, float(np.linalg.norm(prod, 2)))
    return mu * (1.0 - cos_angle)


def penalized_bound(g: Graph, penalties: set) -> tuple:
    """Smallest eigenvalue of Laplacian + sum of penalized-vertex projectors,
    together with its geometric lower bound.

    The bound is min(a(G), 1) * (1 - sqrt(1 - |P|/|V|)); the exact value is
    the bottom eigenvalue of the penalized operator.
    """
    if not is_connected(g):
        raise ValueError("penalized bound requires a connected graph")
    pset = {v for v in penalties}
    if not pset or pset == set(g.vertex_ids):
        raise ValueError("penalty set must be a nonempty proper subset of the vertices")
    unknown = pset - set(g.vertex_ids)
    if unknown:
        raise KeyError(f"penalty set references unknown vertices: {sorted(unknown)}")
    op = laplacian(g)
    for v in pset:
        op.add(g.index_of(v), g.index_of(v), 1.0)
    lam_min = float(hermitian_eigs(op, vectors=False).eigenvalues[0])
    mu = min(algebraic_connectivity(g), 1.0)
    cos_angle = math.sqrt(1.0 - len(pset) / len(g))
    return lam_min, mu * (1.0 - cos_angle)


def assert_edge_monotone(g: Graph, extra_edge: tuple, tol: float = EIG_TOL) -> None:
    """Adding an edge must not decrease algebraic connectivity."""
    before = algebraic_connectivity(g)
    bigger = Graph(g.vertex_ids, g.edges + [extra_edge])
    after = algebraic_connectivity(bigger)
    if after < before - tol:
        raise AssertionError(f"connectivity dropped from {before} to {after}")


# ---------------------------------------------------------------------------
# Serialization.

def to_json(g: Graph) -> str:
    return json.dumps({"vertices": g.vertex_ids, "edges": [list(e) for e in g.edges]})


def from_json(text: str) -> Graph:
    data = json.loads(text)
    return Graph(data["vertices"], [tuple(e) for e in data["edges"]])


def to_dot(g: Graph) -> str:
    lines = ["graph {"]
    for v in g.vertex_ids:
        lines.append(f'  "{v}";')
    for a, b in g.edges:
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_dot(text: str) -> Graph:
    """Parse the undirected subset of DOT used by ``to_dot``: a graph block
    with vertex statements and ``a -- b`` edge statements."""
    body = text.strip()
    start, end = body.find("{"), body.rfind("}")
    if start < 0 or end < 0 or end < start:
        raise ValueError("not a DOT graph block")
    g = Graph()
    edges = []
    for raw in body[start + 1 : end].split(";"):
        stmt = raw.strip()
        if not stmt:
            continue
        if "--" in stmt:
            left, _, right = stmt.partition("--")
            a, b = _dot_name(left), _dot_name(right)
            g.add_vertex(a)
            g.add_vertex(b)
            edges.append((a, b))
        else:
            g.add_vertex(_dot_name(stmt))
    for a, b in edges:
        g.add_edge(a, b)
    return g


def _dot_name(token: str) -> str:
    name = token.strip()
    if "[" in name:
        name = name[: name.index("[")].strip()
    if name.startswith('"') and name.endswith('"') and len(name) >= 2:
        name = name[1:-1]
    if not name:
        raise ValueError("empty vertex name in DOT input")
    return name
