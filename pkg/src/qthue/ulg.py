"""Unitary labelled graphs and their frustration-free Hamiltonians.

Each edge of a graph carries a unitary between the (uniform dimension)
Hilbert spaces of its endpoints.  Labels are stored once per edge, under the
direction whose source id is lexicographically smaller; reading the opposite
direction returns the adjoint.  A labelled graph is *simple* when every
directed cycle multiplies to the identity exactly; a cycle product equal to a
nontrivial global phase already breaks simplicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, algebraic_connectivity, bfs_tree, components, laplacian
from .linalg import (
    MATRIX_TOL,
    SparseHermitian,
    gate_display_name,
    hermitian_eigs,
    is_projector,
    is_unitary,
)


@dataclass
class SimplicityReport:
    simple: bool
    witness_cycle: list | None = None
    witness_product: np.ndarray | None = None
    deviation: float = 0.0


class NotSimpleError(ValueError):
    def __init__(self, report: SimplicityReport):
        super().__init__(
            f"labelled graph is not simple (cycle deviation {report.deviation:.3g})"
        )
        self.report = report


@dataclass
class Diagonalizer:
    """Block-diagonalizing unitary W = sum_s |s><s| (x) W_s together with the
    BFS vertex order used to build it."""

    w: np.ndarray
    expansion_order: list


class Ulg:
    """Graph plus vertex dimension plus unitary edge labels."""

    def __init__(self, vertex_dim: int, vertices=(), edges=()):
        if vertex_dim < 1:
            raise ValueError("vertex dimension must be positive")
        self.vertex_dim = vertex_dim
        self.graph = Graph()
        self._labels: dict = {}
        self.label_conflicts: list = []
        for v in vertices:
            self.add_vertex(v)
        for a, b, u in edges:
            self.add_edge(a, b, u)

    def add_vertex(self, v: str) -> None:
        self.graph.add_vertex(v)

    def add_edge(self, a: str, b: str, unitary, tol: float = MATRIX_TOL) -> None:
        """Attach an edge labelled with the unitary for direction a -> b.

        A parallel edge whose label agrees within tolerance is dropped as a
        duplicate; a disagreeing one is recorded as a label conflict, which
        makes the graph non-simple.
        """
        u = np.asarray(unitary, dtype=complex)
        if u.shape != (self.vertex_dim, self.vertex_dim):
            raise ValueError(
                f"label shape {u.shape} does not match vertex dimension {self.vertex_dim}"
            )
        if not is_unitary(u, tol):
            raise ValueError("edge label is not unitary within tolerance")
        key, store = ((a, b), u) if a < b else ((b, a), u.conj().T)
        if key in self._labels:
            if np.max(np.abs(self._labels[key] - store)) <= tol:
                return
            self.label_conflicts.append((key[0], key[1]))
            return
        self.graph.add_edge(a, b)
        self._labels[key] = store

    def label(self, a: str, b: str) -> np.ndarray:
        """Unitary for direction a -> b."""
        if a < b:
            return self._labels[(a, b)].copy()
        return self._labels[(b, a)].conj().T.copy()

    @property
    def edge_list(self) -> list:
        """Canonically directed edges (a, b) with stored label a -> b."""
        return sorted(self._labels.keys())

    def __len__(self) -> int:
        return len(self.graph)


def _bfs_conjugators(u: Ulg) -> tuple:
    """Per-vertex path unitaries from each component's BFS root, plus the BFS
    order and tree parent map (all by interned index)."""
    g = u.graph
    w_by_idx: dict = {}
    order_all: list = []
    parent_all: dict = {}
    for comp in components(g):
        root = g.index_of(comp[0])
        order, parent = bfs_tree(g, root)
        w_by_idx[root] = np.eye(u.vertex_dim, dtype=complex)
        for idx in order[1:]:
            p = parent[idx]
            step = u.label(g.id_of(p), g.id_of(idx))
            w_by_idx[idx] = step @ w_by_idx[p]
        order_all.extend(order)
        parent_all.update(parent)
    return w_by_idx, order_all, parent_all


def _tree_path(parent: dict, src: int, dst: int) -> list:
    """Vertex index path src -> dst through the BFS tree (shared root)."""
    up_src, up_dst = [src], [dst]
    seen = {src: 0}
    v = src
    while parent[v] != -1:
        v = parent[v]
        up_src.append(v)
        seen[v] = len(up_src) - 1
    v = dst
    while v not in seen:
        v = parent[v]
        up_dst.append(v)
    meet = v
    return up_src[: seen[meet] + 1] + list(reversed(up_dst[: up_dst.index(meet)]))


def check_simple(u: Ulg, tol: float = MATRIX_TOL) -> SimplicityReport:
    """BFS spanning-tree consistency check: every non-tree edge's label must
    match the tree path product exactly (not merely up to phase)."""
    if u.label_conflicts:
        a, b = u.label_conflicts[0]
        return SimplicityReport(False, [(a, b), (b, a)], None, float("inf"))
    g = u.graph
    w_by_idx, _, parent = _bfs_conjugators(u)
    tree_edges = {(min(i, parent[i]), max(i, parent[i])) for i in parent if parent[i] != -1}
    for a, b in u.edge_list:
        ia, ib = g.index_of(a), g.index_of(b)
        if (min(ia, ib), max(ia, ib)) in tree_edges:
            continue
        lab = u.label(a, b)
        dev = float(np.max(np.abs(w_by_idx[ib] - lab @ w_by_idx[ia])))
        if dev > tol:
            product = w_by_idx[ib].conj().T @ lab @ w_by_idx[ia]
            path = _tree_path(parent, ib, ia)
            cycle = [(g.id_of(x), g.id_of(y)) for x, y in zip(path, path[1:])]
            cycle.append((a, b))
            return SimplicityReport(False, cycle, product, dev)
    return SimplicityReport(True)


def associated_hamiltonian(u: Ulg) -> SparseHermitian:
    """Sum over edges of |a><a| + |b><b| - |a><b| (x) U+ - |b><a| (x) U on the
    space C^|S| (x) C^n.  Positive semidefinite by construction."""
    n = u.vertex_dim
    g = u.graph
    h = SparseHermitian(len(g) * n)
    for a, b in u.edge_list:
        ia, ib = g.index_of(a), g.index_of(b)
        lab = u.label(a, b)
        for j in range(n):
            h.add(ia * n + j, ia * n + j, 1.0)
            h.add(ib * n + j, ib * n + j, 1.0)
        for i in range(n):
            for j in range(n):
                if lab[i, j] != 0:
                    h.add(ib * n + i, ia * n + j, -lab[i, j])
    return h


def diagonalize(u: Ulg, tol: float = MATRIX_TOL) -> Diagonalizer:
    """Unitary W with W+ H W = Laplacian (x) identity; requires simplicity."""
    report = check_simple(u, tol)
    if not report.simple:
        raise NotSimpleError(report)
    g = u.graph
    n = u.vertex_dim
    w_by_idx, order, _ = _bfs_conjugators(u)
    w = np.zeros((len(g) * n, len(g) * n), dtype=complex)
    for idx, conj in w_by_idx.items():
        w[idx * n : (idx + 1) * n, idx * n : (idx + 1) * n] = conj
    return Diagonalizer(w, [g.id_of(i) for i in order])


def diagonalization_residual(u: Ulg, diag: Diagonalizer | None = None) -> float:
    """Max-norm of W+ H W minus Laplacian (x) identity."""
    diag = diag or diagonalize(u)
    h = associated_hamiltonian(u).to_dense()
    lap = laplacian(u.graph).to_dense()
    target = np.kron(lap, np.eye(u.vertex_dim))
    return float(np.max(np.abs(diag.w.conj().T @ h @ diag.w - target)))


def ground_space_history_states(u: Ulg) -> list:
    """Orthonormal kernel basis of the associated Hamiltonian: for component
    i and register basis vector j, sum_s |s> (x) W_s e_j / sqrt(|V_i|)."""
    report = check_simple(u)
    if not report.simple:
        raise NotSimpleError(report)
    g = u.graph
    n = u.vertex_dim
    w_by_idx, _, _ = _bfs_conjugators(u)
    out = []
    for comp in components(g):
        for j in range(n):
            vec = np.zeros(len(g) * n, dtype=complex)
            for v in comp:
                idx = g.index_of(v)
                vec[idx * n : (idx + 1) * n] = w_by_idx[idx][:, j]
            out.append(vec / np.sqrt(len(comp)))
    return out


def penalized_ulg_bound(u: Ulg, penalties: dict) -> dict:
    """Bottom eigenvalue of H plus per-vertex projector penalties, with a
    geometric lower bound.

    The bound multiplies three factors: the alignment factor mu from the
    worst pair of penalized vertices (path-conjugated complement projectors),
    the least nonzero eigenvalue min(a(G), 1), and the kernel angle term
    1 - cos(theta) with cos(theta)^2 = 1 - lambda_min(sum of conjugated
    penalty projectors) / |V|.  For identity projectors the angle term
    reduces to the bare-graph formula 1 - sqrt(1 - |P|/|V|).
    """
    if not penalties:
        raise ValueError("need at least one penalized vertex")
    g = u.graph
    n = u.vertex_dim
    if len(components(g)) != 1:
        raise ValueError("penalized bound requires a connected labelled graph")
    if len(g) < 2:
        raise ValueError("penalized bound requires at least two vertices")
    projs = {}
    for v, proj in penalties.items():
        p = np.asarray(proj, dtype=complex)
        if p.shape != (n, n) or not is_projector(p):
            raise ValueError(f"penalty at {v!r} is not an n x n projector")
        projs[v] = p

    h = associated_hamiltonian(u)
    for v, p in projs.items():
        idx = g.index_of(v)
        for i in range(n):
            for j in range(i, n):
                if p[i, j] != 0:
                    h.add(idx * n + i, idx * n + j, p[i, j])
    lam_min = float(hermitian_eigs(h, vectors=False).eigenvalues[0])

    w_by_idx, _, _ = _bfs_conjugators(u)
    ids = sorted(projs.keys())
    eye = np.eye(n)
    worst = 0.0
    if len(ids) == 1:
        worst = float(np.linalg.norm(eye - projs[ids[0]], 2))
    else:
        for i, vi in enumerate(ids):
            wi = w_by_idx[g.index_of(vi)]
            for vj in ids[i + 1 :]:
                wj = w_by_idx[g.index_of(vj)]
                # path unitary from vj to vi through the BFS tree
                path_u = wi @ wj.conj().T
                expr = (eye - projs[vi]) @ path_u @ (eye - projs[vj])
                worst = max(worst, float(np.linalg.norm(expr, 2)))
    mu = max(0.0, 1.0 - worst)

    penalty_sum = np.zeros((n, n), dtype=complex)
    for v, p in projs.items():
        wv = w_by_idx[g.index_of(v)]
        penalty_sum += wv.conj().T @ p @ wv
    angle_floor = float(hermitian_eigs(penalty_sum, vectors=False).eigenvalues[0])
    cos_angle = np.sqrt(max(0.0, 1.0 - angle_floor / len(g)))
    bound = mu * min(algebraic_connectivity(g), 1.0) * (1.0 - cos_angle)
    return {"lambda_min": lam_min, "lower_bound": bound, "mu": mu}


# ---------------------------------------------------------------------------
# Serialization.

def to_json(u: Ulg) -> str:
    edges = []
    for a, b in u.edge_list:
        lab = u.label(a, b)
        edges.append(
            {
                "source": a,
                "target": b,
                "unitary": [[[float(x.real), float(x.imag)] for x in row] for row in lab],
            }
        )
    return json.dumps(
        {"vertex_dim": u.vertex_dim, "vertices": u.graph.vertex_ids, "edges": edges}
    )


def from_json(text: str) -> Ulg:
    data = json.loads(text)
    u = Ulg(int(data["vertex_dim"]), data["vertices"])
    for e in data["edges"]:
        mat = np.array([[complex(re, im) for re, im in row] for row in e["unitary"]])
        u.add_edge(e["source"], e["target"], mat)
    return u


def to_dot(u: Ulg) -> str:
    lines = ["graph {"]
    for v in u.graph.vertex_ids:
        lines.append(f'  "{v}";')
    for a, b in u.edge_list:
        name = gate_display_name(u.label(a, b))
        lines.append(f'  "{a}" -- "{b}" [label="{name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
