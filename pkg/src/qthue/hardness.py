"""Score a rewriting block as a chain Hamiltonian.

The assembled operator is

    H = H_l + B_heads + p (P_boundaries + P) + P_in/out

on one irreducible evolution: the kinetic term of the labelled graph, a
bonus per head symbol, a bracket bonus/penalty pair, a penalty per
character pair outside the allowed adjacency set, and the marker
projectors extended over every chain position.  All penalty terms are
1- or 2-local and translation invariant; the desk-scale code evaluates
them string by string on the explored block.
"""

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, penalized_bound
from .linalg import hermitian_eigs, rot
from .qts import (EvolutionGraph, Marker, Qts, Rule, _lift_marker,
                  explore_evolution, qts_to_ulg, rule_edge_unitary)
from . import ulg as ulg_mod


class GapViolation(ValueError):
    """A promised energy separation failed numerically."""


def _syms(q: Qts, s) -> tuple:
    if isinstance(s, str):
        return tuple(s.split())
    s = tuple(s)
    if s and isinstance(s[0], int):
        return q.unintern(s)
    return s


def head_count(q: Qts, s) -> int:
    syms = _syms(q, s)
    heads = set(q.head_symbols)
    return sum(x in heads for x in syms)


def head_bonus(q: Qts, s) -> float:
    """Minus the number of head symbols in the string."""
    return -float(head_count(q, s))


def bracket_boundary_term(q: Qts) -> tuple:
    """The two local pieces of the boundary term.

    Returns ``(one_local, two_local)``: a bonus of -1 on every boundary
    symbol, and +1/2 on every ordered pair with exactly one boundary
    symbol.  Summed over a string with brackets at both ends and none
    adjacent to each other this gives exactly -1; with no brackets, 0.
    """
    boundary = set(q.boundary_symbols)
    one_local = {b: -1.0 for b in sorted(boundary)}
    two_local = {}
    for x in q.symbols:
        for y in q.symbols:
            if (x in boundary) != (y in boundary):
                two_local[(x, y)] = 0.5
    return one_local, two_local


def bracket_score(q: Qts, s) -> float:
    """Total of the boundary local terms on one string."""
    syms = _syms(q, s)
    boundary = set(q.boundary_symbols)
    total = -float(sum(x in boundary for x in syms))
    for i in range(len(syms) - 1):
        if (syms[i] in boundary) != (syms[i + 1] in boundary):
            total += 0.5
    return total


def boundary_energy(q: Qts, s, p: float) -> float:
    """Normalized boundary term: -1/p on strings bracketed at both ends,
    at least +1/2 - 1/(2p) on any string missing an end bracket.

    The raw score is affinely shifted so that the scaled term p * value
    contributes exactly -1 to a bracketed block and at least (p-1)/2 to a
    non-bracketed one.
    """
    score = bracket_score(q, s)
    # grouped to keep p * value exact when score is -1
    return (score + 1.0) + score / p


def is_bracketed(q: Qts, s) -> bool:
    syms = _syms(q, s)
    boundary = set(q.boundary_symbols)
    return len(syms) >= 2 and syms[0] in boundary and syms[-1] in boundary


def illegal_pair_positions(q: Qts, s, allowed) -> list:
    syms = _syms(q, s)
    return [i for i in range(len(syms) - 1)
            if (syms[i], syms[i + 1]) not in allowed]


def occurring_pairs(q: Qts, evolution: EvolutionGraph) -> frozenset:
    """Every ordered adjacent pair seen anywhere in the explored block."""
    pairs = set()
    for s in evolution.strings:
        syms = q.unintern(s)
        pairs.update(zip(syms, syms[1:]))
    return frozenset(pairs)


@dataclass
class PenaltyTerms:
    """Unscaled diagonal data of the assembled operator, per string."""

    head_bonus: np.ndarray
    boundary_term: np.ndarray
    illegal_pair_penalty: np.ndarray
    in_out_penalty: np.ndarray
    scale: float


@dataclass
class AssembledHamiltonian:
    """Block-restricted sum H_l + B_heads + p(P_boundaries + P) + P_in/out.

    The five terms are retained separately; ``matrix`` is their sum.
    """

    qts: Qts
    evolution: EvolutionGraph
    graph: "ulg_mod.Ulg"
    penalties: PenaltyTerms
    kinetic: np.ndarray
    register_dim: int

    @property
    def p(self) -> float:
        return self.penalties.scale

    @property
    def dim(self) -> int:
        return self.kinetic.shape[0]

    @property
    def terms(self) -> dict:
        r = self.register_dim
        eye = np.eye(r)
        pen = self.penalties
        return {
            "kinetic": self.kinetic,
            "head_bonus": np.kron(np.diag(pen.head_bonus), eye),
            "boundary": pen.scale * np.kron(np.diag(pen.boundary_term), eye),
            "illegal_pairs": pen.scale
            * np.kron(np.diag(pen.illegal_pair_penalty), eye),
            "markers": pen.in_out_penalty,
        }

    @property
    def matrix(self) -> np.ndarray:
        out = np.zeros_like(self.kinetic)
        for term in self.terms.values():
            out = out + term
        return out

    def lambda_min(self) -> float:
        return float(hermitian_eigs(self.matrix, vectors=False).eigenvalues[0])

    def head_range(self) -> tuple:
        counts = -self.penalties.head_bonus
        return int(counts.min()), int(counts.max())

    def classify(self) -> str:
        _, h_max = self.head_range()
        if h_max == 0:
            return "zero_head"
        if self.penalties.illegal_pair_penalty.any():
            return "illegal_pairs"
        if not all(is_bracketed(self.qts, s) for s in self.evolution.strings):
            return "non_bracketed"
        return "history"

    def diagonal_floor(self) -> float:
        """Least diagonal offset over strings; a lower bound on the energy
        since the kinetic and marker terms are positive semi-definite."""
        pen = self.penalties
        per_string = (pen.head_bonus
                      + pen.scale * pen.boundary_term
                      + pen.scale * pen.illegal_pair_penalty)
        return float(per_string.min())

    def kitaev_floor(self) -> float:
        """Geometric lower bound for blocks with illegal-pair strings.

        Vertex-norm compression reduces the block to its bare graph with
        a penalty of at least 1 on every illegal vertex, on top of the
        worst legal diagonal offset.  Requires the illegal diagonal to
        clear the legal one by the unit penalty, which holds whenever the
        scale exceeds the head-count spread.
        """
        pen = self.penalties
        illegal = np.flatnonzero(pen.illegal_pair_penalty)
        if illegal.size == 0:
            raise ValueError("no illegal-pair strings in this block")
        per_string = (pen.head_bonus
                      + pen.scale * pen.boundary_term
                      + pen.scale * pen.illegal_pair_penalty)
        legal = np.flatnonzero(pen.illegal_pair_penalty == 0)
        if legal.size == 0:
            return float(per_string.min())
        base = float(per_string[legal].min())
        if float(per_string[illegal].min()) < base + 1.0:
            return self.diagonal_floor()
        g = Graph(range(len(self.evolution.strings)))
        for si, ti, *_ in self.evolution.edges:
            if not g.has_edge(si, ti):
                g.add_edge(si, ti)
        _, bound = penalized_bound(g, set(int(i) for i in illegal))
        return base + bound

    def bound(self) -> float:
        floor = self.diagonal_floor()
        if self.penalties.illegal_pair_penalty.any():
            return max(floor, self.kitaev_floor())
        return floor

    def report(self) -> dict:
        lam = self.lambda_min()
        bound = self.bound()
        h_min, h_max = self.head_range()
        return {
            "class": self.classify(),
            "strings": len(self.evolution.strings),
            "register_dim": self.register_dim,
            "p": self.p,
            "lambda_min": lam,
            "bound": bound,
            "margin": lam - bound,
            "heads": [h_min, h_max],
            "bracketed": all(is_bracketed(self.qts, s)
                             for s in self.evolution.strings),
            "illegal_strings": int(
                np.count_nonzero(self.penalties.illegal_pair_penalty)),
        }


def assemble(q: Qts, evolution: EvolutionGraph, p: float = None,
             markers=(), allowed=None) -> AssembledHamiltonian:
    """Build the assembled operator on one explored block.

    ``p`` defaults to n^5 for chain length n and must be at least n.
    ``markers`` are (pattern, projector) pairs extended over every
    position; ``allowed`` is the adjacency set defining the illegal-pair
    penalty (None disables it).
    """
    if evolution.capped:
        raise ValueError("cannot assemble a capped exploration")
    n = len(q.unintern(evolution.seed))
    if p is None:
        p = float(n) ** 5
    p = float(p)
    if p < n:
        raise ValueError(f"scale p={p} is below the chain length {n}")

    graph = qts_to_ulg(q, evolution)
    r = graph.vertex_dim
    strings = evolution.strings
    kinetic = ulg_mod.associated_hamiltonian(graph).to_dense()

    heads = np.zeros(len(strings))
    boundary = np.zeros(len(strings))
    illegal = np.zeros(len(strings))
    in_out = np.zeros_like(kinetic)
    for i, s in enumerate(strings):
        syms = q.unintern(s)
        heads[i] = head_bonus(q, syms)
        boundary[i] = boundary_energy(q, syms, p)
        if allowed is not None:
            illegal[i] = len(illegal_pair_positions(q, syms, allowed))
        for marker in markers:
            width = len(marker.pattern)
            for off in range(len(syms) - width + 1):
                if tuple(syms[off:off + width]) == tuple(marker.pattern):
                    lifted = _lift_marker(q, s, off, marker)
                    in_out[i * r:(i + 1) * r, i * r:(i + 1) * r] += lifted

    pen = PenaltyTerms(heads, boundary, illegal, in_out, p)
    return AssembledHamiltonian(q, evolution, graph, pen, kinetic, r)


def completeness_energy(assembled: AssembledHamiltonian, psi) -> float:
    """Energy expectation of a block vector."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (assembled.dim,):
        raise ValueError(
            f"vector of dimension {psi.shape} is not in the block "
            f"(expected {assembled.dim})")
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise ValueError("zero vector")
    psi = psi / norm
    return float(np.real(psi.conj() @ assembled.matrix @ psi))


def history_energy(assembled: AssembledHamiltonian) -> float:
    """Least assembled energy over the kernel of the kinetic term."""
    basis = ulg_mod.ground_space_history_states(assembled.graph)
    v = np.column_stack(basis)
    small = v.conj().T @ assembled.matrix @ v
    return float(hermitian_eigs(small, vectors=False).eigenvalues[0])


def rejecting_bound(assembled: AssembledHamiltonian) -> float:
    """-2 plus the geometric lower bound on kinetic-plus-marker energy.

    Valid on a history block, where the diagonal offset is the uniform
    -2; the marker projectors become per-vertex penalties in the rotated
    frame of the labelled graph.
    """
    pen = {}
    q = assembled.qts
    names = assembled.evolution.display_strings()
    r = assembled.register_dim
    for i in range(len(names)):
        block = assembled.penalties.in_out_penalty[
            i * r:(i + 1) * r, i * r:(i + 1) * r]
        if np.any(block):
            w, vecs = np.linalg.eigh(block)
            proj = vecs[:, w > 0.5] @ vecs[:, w > 0.5].conj().T
            pen[names[i]] = proj
    out = ulg_mod.penalized_ulg_bound(assembled.graph, pen)
    return -2.0 + float(out["lower_bound"])


# -- slicing ----------------------------------------------------------------

def slice_pieces(evolution: EvolutionGraph, g: int) -> list:
    """Vertex groups after dropping cycle-closing edges and cutting the
    spanning forest at every g-th layer.  Kept edges stay inside a group."""
    if g < 1:
        raise ValueError("slice depth must be positive")
    n = len(evolution.strings)
    adj = [[] for _ in range(n)]
    for si, ti, *_ in evolution.edges:
        adj[si].append(ti)
        adj[ti].append(si)
    depth = [-1] * n
    kept = [[] for _ in range(n)]
    for root in range(n):
        if depth[root] >= 0:
            continue
        depth[root] = 0
        queue = [root]
        while queue:
            nxt = []
            for v in queue:
                for w in adj[v]:
                    if depth[w] < 0:
                        depth[w] = depth[v] + 1
                        if depth[w] // g == depth[v] // g:
                            kept[v].append(w)
                            kept[w].append(v)
                        nxt.append(w)
            queue = nxt
    seen = [False] * n
    pieces = []
    for root in range(n):
        if seen[root]:
            continue
        stack, piece = [root], []
        seen[root] = True
        while stack:
            v = stack.pop()
            piece.append(v)
            for w in kept[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        pieces.append(sorted(piece))
    return pieces


def sliced_report(assembled: AssembledHamiltonian, g: int) -> dict:
    """Per-piece spectra of the edge-cut operator.

    Removing edge terms removes positive semi-definite summands, so the
    minimum piece energy lower-bounds nothing and upper-bounds nothing of
    the original by itself; what holds is lambda_min(sliced) <=
    lambda_min(full), which the report states as ``monotone``.
    """
    ev = assembled.evolution
    q = assembled.qts
    r = assembled.register_dim
    pieces = slice_pieces(ev, g)
    piece_of = {}
    for k, piece in enumerate(pieces):
        for v in piece:
            piece_of[v] = k
    names = ev.display_strings()

    tree_edges = [[] for _ in pieces]
    counted = set()
    for si, ti, ri, pos, fwd in ev.edges:
        if piece_of[si] != piece_of[ti] or (si, ti) in counted:
            continue
        counted.add((si, ti))
        counted.add((ti, si))
        u = rule_edge_unitary(q, ev.strings[si], ri, pos, fwd)
        tree_edges[piece_of[si]].append((si, ti, u))

    diag = assembled.terms
    base = (diag["head_bonus"] + diag["boundary"]
            + diag["illegal_pairs"] + diag["markers"])
    results = []
    for k, piece in enumerate(pieces):
        sub = ulg_mod.Ulg(r, [names[v] for v in piece])
        for si, ti, u in tree_edges[k]:
            sub.add_edge(names[si], names[ti], u)
        kin = ulg_mod.associated_hamiltonian(sub).to_dense()
        idx = np.concatenate([np.arange(v * r, (v + 1) * r) for v in piece])
        h = kin + base[np.ix_(idx, idx)]
        lam = float(hermitian_eigs(h, vectors=False).eigenvalues[0])
        illegal = [v for v in piece
                   if assembled.penalties.illegal_pair_penalty[v] > 0]
        results.append({"vertices": len(piece), "lambda_min": lam,
                        "illegal_strings": len(illegal)})
    lam_sliced = min(rep["lambda_min"] for rep in results)
    lam_full = assembled.lambda_min()
    return {
        "pieces": results,
        "lambda_min_sliced": lam_sliced,
        "lambda_min_full": lam_full,
        "monotone": lam_sliced <= lam_full + 1e-9,
    }


def rescaled(assembled: AssembledHamiltonian) -> tuple:
    """The assembled matrix divided by 4p, and the divisor.

    Brings every local interaction below unit operator norm, matching the
    normalization under which promise thresholds are usually quoted; the
    promise gap shrinks by the same factor.
    """
    c = 4.0 * assembled.p
    return assembled.matrix / c, c


# -- toy system --------------------------------------------------------------

def toy_crossing(interior: int = 20, angle: float = 0.0) -> tuple:
    """A head sweeping once across a row holding a single quantum cell.

    The chain is ``| h a..a q a..a |`` with the head starting at interior
    slot 1 and the quantum cell at slot interior/2 + 1.  The head swaps
    right through the row; crossing the quantum cell applies a rotation
    by ``angle``.  The block has exactly ``interior`` strings on a path,
    and the crossing step is flagged by the in/out markers h q and q h.
    """
    if interior < 4 or interior % 2:
        raise ValueError("interior length must be even and at least 4")
    one = np.eye(1)
    rules = [
        Rule(("h", "a"), ("a", "h"), one),
        Rule(("h", "q"), ("q", "h"), rot(angle),
             gate_name=f"rot({angle!r})"),
    ]
    q = Qts(symbols=("|", "a", "h", "q"), quantum={"q"}, rules=rules,
            head_symbols=("h",), boundary_symbols=("|",))
    half = interior // 2
    seed = ("|", "h") + ("a",) * (half - 1) + ("q",) + ("a",) * (half - 1) + ("|",)
    proj = np.diag([0.0, 1.0])
    return q, seed, Marker(("h", "q"), proj), Marker(("q", "h"), proj)


def toy_accepting(interior: int = 20) -> tuple:
    """Crossing angle 1/interior^2: the marker energy 1 - cos(angle) stays
    below half the soundness epsilon interior^-4."""
    return toy_crossing(interior, angle=1.0 / interior ** 2)


def toy_rejecting(interior: int = 20) -> tuple:
    """Quarter-turn crossing: the rotated output projector is orthogonal
    to the input one, so the marker energy is maximal."""
    return toy_crossing(interior, angle=np.pi / 2)


def assemble_toy(builder, interior: int = 20, p: float = None) -> AssembledHamiltonian:
    q, seed, inp, out = builder(interior)
    ev = explore_evolution(q, q.parse_seed(" ".join(seed)))
    history = explore_evolution(q, q.parse_seed(" ".join(seed)))
    allowed = occurring_pairs(q, history)
    return assemble(q, ev, p=p, markers=(inp, out), allowed=allowed)


def promise_gap_report(interior: int = 20) -> tuple:
    """Alpha, beta and their separation for the toy crossing system.

    alpha = -2 + eps and beta = -2 + (1-eps)/M^3 with eps = M^-4 over the
    M = ``interior`` block strings.  Eigensolves an accepting and a
    rejecting instance and raises GapViolation if either lands on the
    wrong side or the gap closes below M^-3/4.
    """
    m = float(interior)
    eps = m ** -4
    alpha = -2.0 + eps
    beta = -2.0 + (1.0 - eps) / m ** 3
    gap = beta - alpha
    if gap < 0.25 / m ** 3:
        raise GapViolation(f"promise gap {gap} below {0.25 / m ** 3}")
    lam_acc = assemble_toy(toy_accepting, interior).lambda_min()
    if lam_acc > alpha:
        raise GapViolation(f"accepting energy {lam_acc} above alpha {alpha}")
    lam_rej = assemble_toy(toy_rejecting, interior).lambda_min()
    if lam_rej < beta:
        raise GapViolation(f"rejecting energy {lam_rej} below beta {beta}")
    return alpha, beta, gap
