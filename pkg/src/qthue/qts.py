"""Length-preserving string rewriting with unitary-weighted rules.

A system carries a finite alphabet split into classical and quantum symbols.
Rules are unordered pairs of equal-length, equal-quantum-weight strings; a
rule with q quantum symbols per side carries a d^q unitary acting on the
matched quantum cells in left-to-right order.  Restricting to strings of one
length and exploring rule applications yields a labelled graph whose vertex
Hilbert space is one qudit register per quantum cell of the seed.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import ulg as ulg_mod
from .linalg import (
    DimensionCapExceeded,
    MATRIX_TOL,
    SparseHermitian,
    gate_by_name,
    gate_display_name,
    hermitian_eigs,
    is_projector,
    is_unitary,
)

DEFAULT_EXPLORE_CAP = 10**6

# Full chain operators live on (|alphabet| * d)^N dimensions; refuse builds
# beyond this many basis states.
FULL_CHAIN_CAP = 20000


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class Rule:
    lhs: tuple
    rhs: tuple
    gate: np.ndarray
    gate_name: str = "id"

    def __post_init__(self):
        self.lhs = tuple(self.lhs)
        self.rhs = tuple(self.rhs)
        self.gate = np.asarray(self.gate, dtype=complex)


@dataclass
class Marker:
    """Substring pattern plus a projector on its quantum cells."""

    pattern: tuple
    projector: np.ndarray

    def __post_init__(self):
        self.pattern = tuple(self.pattern)
        self.projector = np.asarray(self.projector, dtype=complex)
        if not is_projector(self.projector):
            raise ValueError("marker operator must be an orthogonal projector")


class Qts:
    """Alphabet, quantum subset, and unitary-weighted rewrite rules."""

    def __init__(self, symbols, quantum, rules, qudit_dim: int = 2,
                 head_symbols=(), boundary_symbols=()):
        self.symbols = list(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols in alphabet")
        self.quantum = set(quantum)
        unknown = self.quantum - set(self.symbols)
        if unknown:
            raise ValueError(f"quantum symbols not in alphabet: {sorted(unknown)}")
        self.qudit_dim = int(qudit_dim)
        self.head_symbols = set(head_symbols)
        self.boundary_symbols = set(boundary_symbols)
        self._index = {s: i for i, s in enumerate(self.symbols)}
        self.rules = list(rules)
        for i, r in enumerate(self.rules):
            self._validate_rule(i, r)
        self._pattern_map = None

    def _validate_rule(self, i: int, r: Rule) -> None:
        if len(r.lhs) != len(r.rhs) or not r.lhs:
            raise ValueError(f"rule {i}: sides must be nonempty and equal length")
        if r.lhs == r.rhs:
            raise ValueError(f"rule {i}: sides must differ")
        for s in r.lhs + r.rhs:
            if s not in self._index:
                raise ValueError(f"rule {i}: symbol {s!r} not in alphabet")
        ql = sum(1 for s in r.lhs if s in self.quantum)
        qr = sum(1 for s in r.rhs if s in self.quantum)
        if ql != qr:
            raise ValueError(f"rule {i}: quantum weight differs across sides ({ql} vs {qr})")
        want = self.qudit_dim ** ql
        if r.gate.shape != (want, want):
            raise ValueError(f"rule {i}: gate shape {r.gate.shape}, expected {(want, want)}")
        if not is_unitary(r.gate):
            raise ValueError(f"rule {i}: gate is not unitary")

    def symbol_index(self, s: str) -> int:
        return self._index[s]

    def is_quantum(self, s: str) -> bool:
        return s in self.quantum

    def quantum_weight(self, string) -> int:
        return sum(1 for s in string if s in self.quantum)

    def locality(self) -> int:
        """Maximum rule length; ``locality_min`` gives the minimum."""
        if not self.rules:
            raise ValueError("locality of an empty rule set")
        return max(len(r.lhs) for r in self.rules)

    def locality_min(self) -> int:
        if not self.rules:
            raise ValueError("locality of an empty rule set")
        return min(len(r.lhs) for r in self.rules)

    # -- interned representation ------------------------------------------
    def intern(self, string) -> tuple:
        return tuple(self._index[s] for s in string)

    def unintern(self, state: tuple) -> tuple:
        return tuple(self.symbols[i] for i in state)

    def display(self, string) -> str:
        if all(len(s) == 1 for s in self.symbols):
            return "".join(string)
        return " ".join(string)

    def parse_seed(self, text: str):
        """Whitespace-separated symbols; a run without whitespace splits per
        character when every alphabet symbol is a single character."""
        text = text.strip()
        parts = text.split()
        if len(parts) > 1 or all(len(s) == 1 for s in self.symbols):
            if len(parts) == 1 and all(len(s) == 1 for s in self.symbols):
                parts = list(text)
        unknown = [p for p in parts if p not in self._index]
        if unknown:
            raise ValueError(f"seed symbols not in alphabet: {unknown}")
        return tuple(parts)

    def _patterns(self):
        if self._pattern_map is None:
            pat: dict = {}
            for ri, r in enumerate(self.rules):
                pat.setdefault(self.intern(r.lhs), []).append((ri, True))
                pat.setdefault(self.intern(r.rhs), []).append((ri, False))
            self._pattern_map = (pat, sorted({len(k) for k in pat}))
        return self._pattern_map


def neighbors(q: Qts, string) -> list:
    """All single-rule rewrites of a string, deduplicated by
    (result, rule, position).  Entries are (result, rule_idx, pos, forward)."""
    state = q.intern(string)
    out = []
    seen = set()
    for target, ri, pos, fwd in _int_neighbors(q, state):
        key = (target, ri, pos)
        if key in seen:
            continue
        seen.add(key)
        out.append((q.unintern(target), ri, pos, fwd))
    return out


def _int_neighbors(q: Qts, state: tuple):
    pat, lengths = q._patterns()
    n = len(state)
    for p in range(n):
        for length in lengths:
            if p + length > n:
                continue
            hits = pat.get(state[p : p + length])
            if not hits:
                continue
            for ri, fwd in hits:
                rule = q.rules[ri]
                other = rule.rhs if fwd else rule.lhs
                target = state[:p] + q.intern(other) + state[p + length :]
                yield target, ri, p, fwd


@dataclass
class EvolutionGraph:
    """Connected rewrite component explored breadth-first from a seed.

    ``strings`` lists interned states in discovery order; ``edges`` holds
    (src_idx, dst_idx, rule_idx, pos, forward) with forward meaning the rule
    was applied left side to right side going src -> dst.
    """

    qts: Qts
    seed: tuple
    strings: list
    edges: list
    capped: bool
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.strings)}

    def __len__(self) -> int:
        return len(self.strings)

    def display_strings(self) -> list:
        return [self.qts.display(self.qts.unintern(s)) for s in self.strings]

    def leaves(self) -> list:
        """Indices of strings with exactly one incident edge (dead ends)."""
        deg = [0] * len(self.strings)
        for a, b, _, _, _ in self.edges:
            deg[a] += 1
            deg[b] += 1
        return [i for i, d in enumerate(deg) if d <= 1 and len(self.strings) > 1]


def explore_evolution(q: Qts, seed, cap: int = DEFAULT_EXPLORE_CAP) -> EvolutionGraph:
    """BFS closure of a seed under rule applications, capped by vertex count."""
    if cap <= 0:
        raise ValueError("exploration cap must be positive")
    start = q.intern(seed)
    index = {start: 0}
    strings = [start]
    edges = []
    edge_keys = set()
    queue = deque([0])
    capped = False
    while queue:
        si = queue.popleft()
        state = strings[si]
        for target, ri, pos, fwd in _int_neighbors(q, state):
            ti = index.get(target)
            if ti is None:
                if len(strings) >= cap:
                    capped = True
                    continue
                ti = len(strings)
                index[target] = ti
                strings.append(target)
                queue.append(ti)
            ekey = (min(si, ti), max(si, ti), ri, pos)
            if ekey in edge_keys:
                continue
            edge_keys.add(ekey)
            edges.append((si, ti, ri, pos, fwd))
    return EvolutionGraph(q, start, strings, edges, capped)


def rule_edge_unitary(q: Qts, src: tuple, rule_idx: int, pos: int, forward: bool) -> np.ndarray:
    """Unitary on the seed-wide register space realized by one rule
    application, acting on the matched quantum cells and permuting register
    slots so that untouched cells keep their contents."""
    rule = q.rules[rule_idx]
    lhs, rhs = (rule.lhs, rule.rhs) if forward else (rule.rhs, rule.lhs)
    gate = rule.gate if forward else rule.gate.conj().T
    d = q.qudit_dim
    src_syms = q.unintern(src) if src and isinstance(src[0], int) else tuple(src)
    dst_syms = src_syms[:pos] + rhs + src_syms[pos + len(lhs) :]
    src_q = [i for i, s in enumerate(src_syms) if s in q.quantum]
    dst_q = [i for i, s in enumerate(dst_syms) if s in q.quantum]
    m = len(src_q)
    win = range(pos, pos + len(lhs))
    win_src = [k for k, i in enumerate(src_q) if i in win]
    win_dst = [k for k, i in enumerate(dst_q) if i in win]
    out_src = [k for k in range(m) if k not in win_src]
    out_dst = [k for k in range(m) if k not in win_dst]
    dim = d ** m
    kq = len(win_src)
    tgate = gate.reshape((d,) * (2 * kq))
    u = np.zeros((dim, dim), dtype=complex)
    for x in np.ndindex(*([d] * m)):
        col = 0
        for b in x:
            col = col * d + b
        xw = tuple(x[k] for k in win_src)
        for yw in np.ndindex(*([d] * kq)):
            amp = tgate[yw + xw]
            if amp == 0:
                continue
            y = [0] * m
            for k, val in zip(win_dst, yw):
                y[k] = val
            for k_dst, k_src in zip(out_dst, out_src):
                y[k_dst] = x[k_src]
            row = 0
            for b in y:
                row = row * d + b
            u[row, col] += amp
    return u


def qts_to_ulg(q: Qts, evolution: EvolutionGraph) -> ulg_mod.Ulg:
    """Labelled graph of an explored component: vertices are strings, the
    register space is one qudit per quantum cell of the seed, and labels come
    from rule applications.  Conflicting parallel labels are recorded on the
    result and break simplicity."""
    m = q.quantum_weight(q.unintern(evolution.seed))
    names = evolution.display_strings()
    out = ulg_mod.Ulg(q.qudit_dim ** m, names)
    for si, ti, ri, pos, fwd in evolution.edges:
        u = rule_edge_unitary(q, evolution.strings[si], ri, pos, fwd)
        out.add_edge(names[si], names[ti], u)
    return out


# ---------------------------------------------------------------------------
# Chain operators on registered sites.

def _compressed_site_basis(q: Qts) -> list:
    basis = []
    for s in q.symbols:
        if s in q.quantum:
            basis.extend((s, r) for r in range(q.qudit_dim))
        else:
            basis.append((s, None))
    return basis


def compressed_site_dim(q: Qts) -> int:
    ncl = len(q.symbols) - len(q.quantum)
    return ncl + len(q.quantum) * q.qudit_dim


def chain_hamiltonian(q: Qts, length: int, compressed: bool = True, block=None) -> SparseHermitian:
    """Translationally summed rule terms on a chain of ``length`` sites.

    Compressed sites are C^classical + (C^quantum x C^d); uncompressed sites
    carry a spectator qudit on every cell.  ``block`` restricts to the span
    of the given strings (with their registers), i.e. the corresponding
    principal submatrix.
    """
    if block is not None:
        if not compressed:
            return _chain_block_full(q, length, block)
        return _chain_block_compressed(q, length, block)
    if compressed:
        return _chain_full_space(q, length, compressed=True)
    return _chain_full_space(q, length, compressed=False)


def _site_states(q: Qts, compressed: bool) -> list:
    if compressed:
        return _compressed_site_basis(q)
    return [(s, r) for s in q.symbols for r in range(q.qudit_dim)]


def _chain_full_space(q: Qts, length: int, compressed: bool) -> SparseHermitian:
    site = _site_states(q, compressed)
    dim = len(site) ** length
    if dim > FULL_CHAIN_CAP:
        raise DimensionCapExceeded(f"chain dimension {dim} exceeds cap {FULL_CHAIN_CAP}")
    h = SparseHermitian(dim)
    states = list(np.ndindex(*([len(site)] * length)))
    sym_of = [s for s, _ in site]
    reg_of = [r for _, r in site]
    site_index = {pair: i for i, pair in enumerate(site)}

    def idx_of(cfg) -> int:
        out = 0
        for c in cfg:
            out = out * len(site) + c
        return out

    for cfg in states:
        syms = tuple(sym_of[c] for c in cfg)
        col = idx_of(cfg)
        for target, ri, pos, fwd in _rewrites_of(q, syms):
            # each endpoint contributes its own diagonal; the coupling is
            # added once, from the side matching the rule's left string
            h.add(col, col, 1.0)
            if not fwd:
                continue
            rule = q.rules[ri]
            row_cfgs = _apply_full(q, cfg, target, rule.lhs, rule.rhs, rule.gate,
                                   pos, reg_of, site_index, compressed)
            for row_cfg, amp in row_cfgs:
                h.add(idx_of(row_cfg), col, -amp)
    return h


def _rewrites_of(q: Qts, syms: tuple):
    state = q.intern(syms)
    seen = set()
    for target, ri, pos, fwd in _int_neighbors(q, state):
        key = (target, ri, pos)
        if key in seen:
            continue
        seen.add(key)
        yield q.unintern(target), ri, pos, fwd


def _apply_full(q, cfg, target, lhs, rhs, gate, pos, reg_of, site_index, compressed):
    """Row configurations and amplitudes for one forward rule application on
    a chain basis column.  Quantum cells of the window map in order; on
    uncompressed sites the spectator qudits of classical window cells follow
    order-preservingly."""
    d = q.qudit_dim
    length = len(lhs)
    lq = [i for i in range(length) if lhs[i] in q.quantum]
    rq = [i for i in range(length) if rhs[i] in q.quantum]
    lc = [i for i in range(length) if i not in lq]
    rc = [i for i in range(length) if i not in rq]
    regs_in = tuple(reg_of[cfg[pos + i]] for i in range(length))
    xw = tuple(regs_in[i] for i in lq)
    kq = len(lq)
    tgate = gate.reshape((d,) * (2 * kq)) if kq else gate.reshape(())
    rows = []
    for yw in np.ndindex(*([d] * kq)):
        amp = tgate[yw + xw] if kq else complex(tgate)
        if amp == 0:
            continue
        window_regs = [None] * length
        for k, i in enumerate(rq):
            window_regs[i] = yw[k]
        for k_dst, k_src in zip(rc, lc):
            window_regs[k_dst] = regs_in[k_src]
        row_cfg = list(cfg)
        for i in range(length):
            sym = target[pos + i]
            reg = None if (compressed and sym not in q.quantum) else window_regs[i]
            row_cfg[pos + i] = site_index[(sym, reg)]
        rows.append((tuple(row_cfg), amp))
    return rows


def _block_basis(q: Qts, block: list) -> tuple:
    """Basis of (string, register values) pairs for a uniform-weight block."""
    states = [q.intern(s) if s and not isinstance(s[0], int) else tuple(s) for s in block]
    weights = {q.quantum_weight(q.unintern(s)) for s in states}
    if len(weights) != 1:
        raise ValueError("block strings have differing quantum weight")
    m = weights.pop()
    d = q.qudit_dim
    regs = list(np.ndindex(*([d] * m))) if m else [()]
    return states, regs, m


def _chain_block_compressed(q: Qts, length: int, block) -> SparseHermitian:
    states, regs, m = _block_basis(q, block)
    for s in states:
        if len(s) != length:
            raise ValueError("block string length differs from chain length")
    index = {s: i for i, s in enumerate(states)}
    reg_index = {r: i for i, r in enumerate(regs)}
    d = q.qudit_dim
    dim = len(states) * len(regs)
    h = SparseHermitian(dim)
    for si, state in enumerate(states):
        syms = q.unintern(state)
        src_q = [i for i, s in enumerate(syms) if s in q.quantum]
        for target, ri, pos, fwd in _rewrites_of(q, syms):
            for k in range(len(regs)):
                h.add(si * len(regs) + k, si * len(regs) + k, 1.0)
            if not fwd:
                continue
            ti = index.get(q.intern(target))
            if ti is None:
                continue
            rule = q.rules[ri]
            lhs = rule.lhs
            gate = rule.gate
            dst_q = [i for i, s in enumerate(target) if s in q.quantum]
            win = range(pos, pos + len(lhs))
            win_src = [k for k, i in enumerate(src_q) if i in win]
            win_dst = [k for k, i in enumerate(dst_q) if i in win]
            out_src = [k for k in range(m) if k not in win_src]
            out_dst = [k for k in range(m) if k not in win_dst]
            kq = len(win_src)
            tgate = gate.reshape((d,) * (2 * kq)) if kq else gate.reshape(())
            for x in regs:
                xw = tuple(x[k] for k in win_src)
                col = si * len(regs) + reg_index[x]
                for yw in np.ndindex(*([d] * kq)):
                    amp = tgate[yw + xw] if kq else complex(tgate)
                    if amp == 0:
                        continue
                    y = [0] * m
                    for k, val in zip(win_dst, yw):
                        y[k] = val
                    for k_dst, k_src in zip(out_dst, out_src):
                        y[k_dst] = x[k_src]
                    row = ti * len(regs) + reg_index[tuple(y)]
                    h.add(row, col, -amp)
    return h


def _chain_block_full(q: Qts, length: int, block) -> SparseHermitian:
    """Principal submatrix of the uncompressed chain operator on the span of
    the block strings with all spectator qudits."""
    full = _chain_full_space(q, length, compressed=False)
    site = _site_states(q, False)
    block_syms = set()
    for s in block:
        state = tuple(s)
        block_syms.add(q.unintern(state) if state and isinstance(state[0], int) else state)
    keep = []
    for i, cfg in enumerate(np.ndindex(*([len(site)] * length))):
        syms = tuple(site[c][0] for c in cfg)
        if syms in block_syms:
            keep.append(i)
    pos = {g: i for i, g in enumerate(keep)}
    out = SparseHermitian(len(keep))
    for (r, c), v in full.entries.items():
        if r in pos and c in pos:
            out.add(pos[r], pos[c], v)
    return out


# ---------------------------------------------------------------------------
# Deciding with marker projectors.

@dataclass
class DecideReport:
    verdict: str
    lambda_min: float | None = None
    reason: str = ""
    in_match: tuple | None = None
    out_match: tuple | None = None


def find_marker(evolution: EvolutionGraph, pattern) -> tuple:
    """First (string index, offset) in BFS order where the pattern occurs."""
    q = evolution.qts
    target = q.intern(pattern)
    width = len(target)
    for si, state in enumerate(evolution.strings):
        for off in range(len(state) - width + 1):
            if state[off : off + width] == target:
                return si, off
    raise ValueError(f"marker pattern {q.display(pattern)!r} not reachable")


def _lift_marker(q: Qts, state: tuple, offset: int, marker: Marker) -> np.ndarray:
    from .linalg import embed_on_registers

    syms = q.unintern(state)
    all_regs = [i for i, s in enumerate(syms) if s in q.quantum]
    inside = [k for k, i in enumerate(all_regs) if offset <= i < offset + len(marker.pattern)]
    want = q.qudit_dim ** len(inside)
    if marker.projector.shape != (want, want):
        raise ValueError(
            f"marker projector dim {marker.projector.shape[0]} != {want} for its quantum cells"
        )
    return embed_on_registers(marker.projector, inside, len(all_regs), q.qudit_dim)


def decide(q: Qts, enc, inp: Marker, out: Marker, eps: float,
           cap: int = DEFAULT_EXPLORE_CAP) -> DecideReport:
    """Threshold the bottom eigenvalue of the two lifted marker projectors in
    the common rotated frame: accepts at <= eps/2, rejects at >= eps,
    undetermined between, on a capped exploration, or on a non-simple graph."""
    evolution = explore_evolution(q, enc, cap)
    if evolution.capped:
        return DecideReport("undetermined", reason="exploration hit the cap")
    graph = qts_to_ulg(q, evolution)
    report = ulg_mod.check_simple(graph)
    if not report.simple:
        return DecideReport("undetermined", reason="labelled graph is not simple")
    si, so = find_marker(evolution, inp.pattern), find_marker(evolution, out.pattern)
    a_full = _lift_marker(q, evolution.strings[si[0]], si[1], inp)
    b_full = _lift_marker(q, evolution.strings[so[0]], so[1], out)
    w_by_idx, _, _ = ulg_mod._bfs_conjugators(graph)
    g = graph.graph
    names = evolution.display_strings()
    wa = w_by_idx[g.index_of(names[si[0]])]
    wb = w_by_idx[g.index_of(names[so[0]])]
    op = wa.conj().T @ a_full @ wa + wb.conj().T @ b_full @ wb
    lam = float(hermitian_eigs(op, vectors=False).eigenvalues[0])
    if lam <= eps / 2:
        verdict = "accepts"
    elif lam >= eps:
        verdict = "rejects"
    else:
        verdict = "undetermined"
    return DecideReport(verdict, lam, in_match=si, out_match=so)


# ---------------------------------------------------------------------------
# Worked example: deciding parity of a unary number.

def even_number_example(n: int) -> tuple:
    """Unary walker whose register picks up a quarter turn per step: the
    marker energy vanishes exactly when n is even.

    Returns (system, seed, input marker, output marker).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    from .linalg import rot

    q = Qts(
        symbols=["*", "-", "$"],
        quantum={"*"},
        rules=[Rule(("*", "-"), ("-", "*"), rot(np.pi / 2), gate_name=f"rot({np.pi / 2!r})")],
    )
    seed = ("*",) + ("-",) * n + ("$",)
    proj = np.array([[0, 0], [0, 1]], dtype=complex)
    return q, seed, Marker(seed, proj), Marker(("*", "$"), proj)


# ---------------------------------------------------------------------------
# Rule DSL.

def parse_rules(text: str, qudit_dim: int = 2) -> Qts:
    """Parse `lhs <-> rhs [@ gate]` lines with a `# quantum: ...` header.

    Symbols are whitespace-separated tokens.  The alphabet lists header
    symbols first, then rule symbols by first appearance.
    """
    quantum: list = []
    order: list = []
    seen = set()
    rules = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("quantum:"):
                for tok in body[len("quantum:"):].split():
                    if tok not in seen:
                        seen.add(tok)
                        quantum.append(tok)
                        order.append(tok)
            continue
        tokens = raw.split()
        if "<->" not in tokens:
            raise ParseError(ln, 1, "missing <-> separator")
        sep = tokens.index("<->")
        lhs = tokens[:sep]
        rest = tokens[sep + 1 :]
        if "@" in rest:
            at = rest.index("@")
            rhs = rest[:at]
            gate_tokens = rest[at + 1 :]
            if not gate_tokens:
                raise ParseError(ln, _column(raw, "@") + 1, "missing gate after @")
        else:
            rhs = rest
            gate_tokens = None
        if not lhs:
            raise ParseError(ln, 1, "empty left side")
        if not rhs:
            raise ParseError(ln, _column(raw, "<->") + 3, "empty right side")
        if len(lhs) != len(rhs):
            raise ParseError(ln, 1, f"side lengths differ ({len(lhs)} vs {len(rhs)})")
        for tok in lhs + rhs:
            if tok not in seen:
                seen.add(tok)
                order.append(tok)
        ql = sum(1 for s in lhs if s in quantum)
        qr = sum(1 for s in rhs if s in quantum)
        if ql != qr:
            raise ParseError(ln, 1, f"quantum weight differs across sides ({ql} vs {qr})")
        dim = qudit_dim ** ql
        if gate_tokens is None:
            gate = np.eye(dim, dtype=complex)
            gate_name = "id"
        else:
            spec = " ".join(gate_tokens)
            col = _column(raw, "@") + 2
            gate, gate_name = _parse_gate(spec, dim, ln, col)
        rules.append(Rule(tuple(lhs), tuple(rhs), gate, gate_name))
    return Qts(order, set(quantum), rules, qudit_dim=qudit_dim)


def _column(raw: str, needle: str) -> int:
    at = raw.find(needle)
    return at + 1 if at >= 0 else 1


def _parse_gate(spec: str, dim: int, ln: int, col: int) -> tuple:
    spec = spec.strip()
    if spec.lower().startswith("mat"):
        try:
            rows = json.loads(spec[3:])
            gate = np.array([[complex(re, im) for re, im in row] for row in rows])
        except Exception as exc:
            raise ParseError(ln, col, f"bad matrix literal: {exc}") from None
    elif spec.lower() == "id":
        gate = np.eye(dim, dtype=complex)
    else:
        try:
            gate = gate_by_name(spec)
        except (KeyError, ValueError) as exc:
            raise ParseError(ln, col, str(exc)) from None
    if gate.shape != (dim, dim):
        raise ParseError(ln, col, f"gate dimension {gate.shape[0]} does not match {dim}")
    if not is_unitary(gate):
        raise ParseError(ln, col, "gate is not unitary")
    return gate, spec


def rules_dsl(q: Qts) -> str:
    """Round-trippable DSL text for a system."""
    lines = []
    if q.quantum:
        ordered = [s for s in q.symbols if s in q.quantum]
        lines.append("# quantum: " + " ".join(ordered))
    for r in q.rules:
        line = " ".join(r.lhs) + " <-> " + " ".join(r.rhs)
        if r.gate_name != "id":
            line += " @ " + r.gate_name
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evolution exports.

def evolution_to_json(evolution: EvolutionGraph) -> str:
    q = evolution.qts
    names = evolution.display_strings()
    edges = []
    for si, ti, ri, pos, fwd in evolution.edges:
        rule = q.rules[ri]
        edges.append(
            {
                "source": names[si],
                "target": names[ti],
                "rule": ri,
                "position": pos,
                "forward": fwd,
                "gate": rule.gate_name if rule.gate_name != "id"
                else gate_display_name(rule.gate),
            }
        )
    return json.dumps(
        {"seed": names[0], "strings": names, "edges": edges, "capped": evolution.capped}
    )


def evolution_to_dot(evolution: EvolutionGraph) -> str:
    q = evolution.qts
    names = evolution.display_strings()
    lines = ["graph {"]
    for name in names:
        lines.append(f'  "{name}";')
    for si, ti, ri, pos, _ in evolution.edges:
        rule = q.rules[ri]
        label = rule.gate_name if rule.gate_name != "id" else gate_display_name(rule.gate)
        lines.append(f'  "{names[si]}" -- "{names[ti]}" [label="{label}@{pos}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
