"""Ring machines: reversible Turing machines driven by one two-cell unitary.

A machine's tape is bent into a ring of n cells. Each cell carries a qubit,
a state slot (usually the dummy marker), a tape symbol, and a flag. One
fixed unitary, the head unitary, is applied to consecutive cell pairs in
cyclic order; every move, rewrite, and gate application of the simulated
machine happens inside such a window.

The flag alphabet is {-, <, >, h}. At most one cell holds an active flag:
"<" or ">" names the pending head move, "h" marks a halted machine. The
head unitary fires on the patterns (">", "-") and ("-", "<"), moving the
state slot into the neighbouring cell, rewriting via the transition
permutation, and raising the next flag. All other windows are left alone.

Reversibility of the underlying Turing machine is what makes the update a
permutation: transitions entering a common state must agree on direction
and write distinct symbols, so the transition table extends to a bijection
on (states + dummy) x alphabet and the erased flag can be recomputed from
the cell contents it produced.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from . import linalg

LEFT = "left"
RIGHT = "right"
MOVES = (LEFT, RIGHT)

FLAG_NONE = "-"
FLAG_LEFT = "<"
FLAG_RIGHT = ">"
FLAG_HALT = "h"
FLAGS = (FLAG_NONE, FLAG_LEFT, FLAG_RIGHT, FLAG_HALT)

#: stored in the state slot of every cell the head is not visiting
DUMMY = None

_MOVE_FLAG = {LEFT: FLAG_LEFT, RIGHT: FLAG_RIGHT}


class TmFormatError(ValueError):
    """Raised when machine source text cannot be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.reason = message


@dataclass(frozen=True)
class Transition:
    write: str
    move: str
    target: str


@dataclass
class Tm:
    """A deterministic Turing machine with optional gate states.

    The first state is initial, the last is the halting state, and the
    first alphabet symbol is the blank. ``gates`` assigns a one- or
    two-qubit unitary to a state; the gate fires whenever the machine
    enters that state.
    """

    states: list[str]
    alphabet: list[str]
    delta: dict[tuple[str, str], Transition]
    gates: dict[str, tuple[str, np.ndarray]] = field(default_factory=dict)

    @property
    def initial(self) -> str:
        return self.states[0]

    @property
    def final(self) -> str:
        return self.states[-1]

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    def validate(self) -> list[str]:
        """Collect the reasons this machine cannot be run, if any.

        Checks reversibility (entries into a common state agree on the
        move and write pairwise distinct symbols), that the initial state
        is only ever entered rightward, that the halting state has no
        outgoing transitions, and that gate assignments are sane.
        """
        problems: list[str] = []
        if len(self.states) < 2:
            problems.append("need at least an initial and a halting state")
        if len(set(self.states)) != len(self.states):
            problems.append("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            problems.append("duplicate alphabet symbols")
        if not self.alphabet:
            problems.append("empty alphabet")

        for (q, s), tr in sorted(self.delta.items()):
            for name, pool in ((q, self.states), (tr.target, self.states)):
                if name not in pool:
                    problems.append(f"transition {q},{s} uses unknown state {name}")
            for sym in (s, tr.write):
                if sym not in self.alphabet:
                    problems.append(f"transition {q},{s} uses unknown symbol {sym}")
            if tr.move not in MOVES:
                problems.append(f"transition {q},{s} has bad move {tr.move}")

        entries: dict[str, list[tuple[str, str, str]]] = {}
        for (q, s), tr in sorted(self.delta.items()):
            entries.setdefault(tr.target, []).append((q, s, tr.write))
        for target, rows in sorted(entries.items()):
            moves = {self.delta[(q, s)].move for q, s, _ in rows}
            if len(moves) > 1:
                problems.append(f"state {target} is entered from both directions")
            writes = [w for _, _, w in rows]
            if len(set(writes)) != len(writes):
                problems.append(f"state {target} is entered writing the same symbol twice")
        if self.states:
            for q, s, _ in entries.get(self.initial, []):
                if self.delta[(q, s)].move == LEFT:
                    problems.append("initial state is entered leftward, but it starts with a rightward flag")
            if any(q == self.final for (q, _) in self.delta):
                problems.append("halting state has outgoing transitions")
        for q, (name, g) in sorted(self.gates.items()):
            if q not in self.states:
                problems.append(f"gate on unknown state {q}")
            if g.shape not in ((2, 2), (4, 4)):
                problems.append(f"gate {name} on {q} must act on one or two qubits")
            elif not linalg.is_unitary(g):
                problems.append(f"gate {name} on {q} is not unitary")
        return problems

    def tables(self) -> "HeadTables":
        return _build_tables(self)

    def render(self) -> str:
        """Machine source text that parses back to an equal machine."""
        lines = [
            "states: " + " ".join(self.states),
            "alphabet: " + " ".join(self.alphabet),
        ]
        for q, (name, _) in sorted(self.gates.items()):
            lines.append(f"quantum-states: {q} -> {name}")
        for (q, s), tr in sorted(self.delta.items()):
            lines.append(f"delta: {q},{s} -> {tr.write},{tr.move},{tr.target}")
        return "\n".join(lines) + "\n"


def parse_tm(text: str) -> Tm:
    """Parse machine source text.

    Sections, one per line: ``states:`` (first is initial, last is
    halting), ``alphabet:`` (first is the blank), zero or more
    ``quantum-states: q -> gate`` lines, and ``delta: q,s -> w,move,q'``
    transition lines. ``#`` starts a comment.
    """
    states: list[str] | None = None
    alphabet: list[str] | None = None
    delta: dict[tuple[str, str], Transition] = {}
    gates: dict[str, tuple[str, np.ndarray]] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise TmFormatError(line_no, f"expected 'section: ...', got {line!r}")
        section, _, rest = line.partition(":")
        section = section.strip()
        rest = rest.strip()
        if section == "states":
            if states is not None:
                raise TmFormatError(line_no, "states given twice")
            states = rest.split()
            if len(states) < 2:
                raise TmFormatError(line_no, "need at least two states")
        elif section == "alphabet":
            if alphabet is not None:
                raise TmFormatError(line_no, "alphabet given twice")
            alphabet = rest.split()
            if not alphabet:
                raise TmFormatError(line_no, "empty alphabet")
        elif section == "quantum-states":
            m = re.fullmatch(r"(\S+)\s*->\s*(\S.*)", rest)
            if m is None:
                raise TmFormatError(line_no, "expected 'quantum-states: state -> gate'")
            q, gate_name = m.group(1), m.group(2).strip()
            if q in gates:
                raise TmFormatError(line_no, f"state {q} already has a gate")
            try:
                g = linalg.gate_by_name(gate_name)
            except ValueError as exc:
                raise TmFormatError(line_no, str(exc)) from exc
            if g.shape not in ((2, 2), (4, 4)):
                raise TmFormatError(line_no, f"gate {gate_name} must act on one or two qubits")
            gates[q] = (gate_name, g)
        elif section == "delta":
            m = re.fullmatch(r"(\S+)\s*,\s*(\S+)\s*->\s*(\S+)\s*,\s*(\S+)\s*,\s*(\S+)", rest)
            if m is None:
                raise TmFormatError(line_no, "expected 'delta: q,s -> w,move,q2'")
            q, s, w, move, target = m.groups()
            if move not in MOVES:
                raise TmFormatError(line_no, f"move must be 'left' or 'right', got {move!r}")
            if (q, s) in delta:
                raise TmFormatError(line_no, f"duplicate transition for {q},{s}")
            delta[(q, s)] = Transition(w, move, target)
        else:
            raise TmFormatError(line_no, f"unknown section {section!r}")

    if states is None:
        raise TmFormatError(0, "missing states section")
    if alphabet is None:
        raise TmFormatError(0, "missing alphabet section")
    return Tm(states=states, alphabet=alphabet, delta=delta, gates=gates)


@dataclass
class HeadTables:
    """Derived lookup tables for the head unitary.

    ``tmap`` is the transition permutation on (states + dummy) x alphabet,
    extended to a total bijection: dummy rows are fixed, rows outside the
    transition table stay put when possible, and the leftovers are paired
    in sorted order. ``d`` maps a state to the flag of the move entering
    it ("-" when nothing enters it). ``pred`` maps cell contents to the
    flag of the move that produced them, read off through the inverse
    permutation; it distinguishes a freshly rewritten cell from a waiting
    head, which is what keeps the flag recomputation reversible. ``v`` is
    the flag a state raises after executing: "h" for the halting state,
    else ``d``.
    """

    gamma: list[tuple[str | None, str]]
    tmap: dict[tuple[str | None, str], tuple[str | None, str]]
    inv: dict[tuple[str | None, str], tuple[str | None, str]]
    d: dict[str | None, str]
    pred: dict[tuple[str | None, str], str]
    v: dict[str | None, str]


def _build_tables(tm: Tm) -> HeadTables:
    problems = tm.validate()
    if problems:
        raise ValueError("machine is not runnable: " + "; ".join(problems))

    d: dict[str | None, str] = {q: FLAG_NONE for q in tm.states}
    d[DUMMY] = FLAG_NONE
    for tr in tm.delta.values():
        d[tr.target] = _MOVE_FLAG[tr.move]
    # the seeded flag is rightward, so the initial state behaves as if
    # it had been entered by a rightward move
    d[tm.initial] = FLAG_RIGHT

    v: dict[str | None, str] = dict(d)
    v[tm.final] = FLAG_HALT
    v[DUMMY] = FLAG_NONE

    gamma: list[tuple[str | None, str]] = [
        (q, s) for q in [DUMMY] + tm.states for s in tm.alphabet
    ]
    tmap: dict[tuple[str | None, str], tuple[str | None, str]] = {}
    for s in tm.alphabet:
        tmap[(DUMMY, s)] = (DUMMY, s)
    for (q, s), tr in tm.delta.items():
        tmap[(q, s)] = (tr.target, tr.write)
    image = set(tmap.values())
    rest = [(q, s) for q in tm.states for s in tm.alphabet if (q, s) not in tmap]
    for cell in list(rest):
        if cell not in image:
            tmap[cell] = cell
            image.add(cell)
            rest.remove(cell)
    holes = sorted(
        (q, s)
        for q in tm.states
        for s in tm.alphabet
        if (q, s) not in image
    )
    for src, dst in zip(sorted(rest), holes):
        tmap[src] = dst
    if set(tmap) != set(gamma) or set(tmap.values()) != set(gamma) or len(tmap) != len(gamma):
        raise AssertionError("transition completion failed to produce a permutation")

    inv = {dst: src for src, dst in tmap.items()}
    pred = {cell: d[inv[cell][0]] for cell in gamma}
    return HeadTables(gamma=gamma, tmap=tmap, inv=inv, d=d, pred=pred, v=v)


Cell = tuple  # (state-or-None, symbol, flag)


def _toggle(flag: str, active: str) -> str:
    """Swap a flag between "-" and ``active``; other values pass through."""
    if active == FLAG_NONE:
        return flag
    if flag == active:
        return FLAG_NONE
    if flag == FLAG_NONE:
        return active
    return flag


class HeadUnitary:
    """The fixed two-cell update, as a classical permutation plus gates.

    Stages, each a controlled permutation so the whole map is bijective:

    1. swap the state slots when the flags read (">", "-") or ("-", "<")
    2. clear the source flag, controlled on the moved state's entry
       direction and on the destination flag already being "-"
    3. apply the transition permutation to any cell whose flag is "-"
    4. raise the fresh flag on a cell whose contents were just produced
       by a move in this window's direction (the ``pred`` control; a
       waiting head fails it and is left alone)
    5. fire the gate of a freshly entered gate state on the window's
       qubit pair
    """

    def __init__(self, tm: Tm):
        self.tm = tm
        self.tables = tm.tables()

    def apply_cells(self, ca: Cell, cb: Cell) -> tuple[Cell, Cell, list[np.ndarray]]:
        """Map window contents; returns new cells plus 4x4 gates to apply
        to the (qubit_a, qubit_b) pair, in order."""
        t = self.tables
        qa, sa, fa = ca
        qb, sb, fb = cb

        if (fa == FLAG_RIGHT and fb == FLAG_NONE) or (fa == FLAG_NONE and fb == FLAG_LEFT):
            qa, qb = qb, qa

        if qb is not DUMMY and t.d[qb] == FLAG_RIGHT and fb == FLAG_NONE:
            fa = _toggle(fa, FLAG_RIGHT)
        if qa is not DUMMY and t.d[qa] == FLAG_LEFT and fa == FLAG_NONE:
            fb = _toggle(fb, FLAG_LEFT)

        if qa is not DUMMY and fa == FLAG_NONE:
            qa, sa = t.tmap[(qa, sa)]
        if qb is not DUMMY and fb == FLAG_NONE:
            qb, sb = t.tmap[(qb, sb)]

        if qa is not DUMMY and t.pred[(qa, sa)] == FLAG_LEFT:
            fa = _toggle(fa, t.v[qa])
        if qb is not DUMMY and t.pred[(qb, sb)] == FLAG_RIGHT:
            fb = _toggle(fb, t.v[qb])

        gates: list[np.ndarray] = []
        for q, s, side in ((qa, sa, 0), (qb, sb, 1)):
            want = FLAG_LEFT if side == 0 else FLAG_RIGHT
            if q in self.tm.gates and t.pred[(q, s)] == want:
                gates.append(self._lift(self.tm.gates[q][1], side))
        return (qa, sa, fa), (qb, sb, fb), gates

    @staticmethod
    def _lift(gate: np.ndarray, side: int) -> np.ndarray:
        """One-qubit gates act on the executed cell's qubit; two-qubit
        gates act on (qubit_a, qubit_b) in window order."""
        if gate.shape == (2, 2):
            eye = np.eye(2)
            return np.kron(gate, eye) if side == 0 else np.kron(eye, gate)
        return np.array(gate, dtype=complex)

    def cell_states(self) -> list[Cell]:
        return [
            (q, s, f)
            for (q, s) in self.tables.gamma
            for f in FLAGS
        ]

    def assert_classical_permutation(self) -> int:
        """Check bijectivity of the classical window map by enumeration.

        Returns the number of windows visited. Raises if two windows
        collide, which would make the head update non-unitary.
        """
        seen: dict[tuple[Cell, Cell], tuple[Cell, Cell]] = {}
        cells = self.cell_states()
        for ca in cells:
            for cb in cells:
                out_a, out_b, _ = self.apply_cells(ca, cb)
                key = (out_a, out_b)
                if key in seen:
                    raise AssertionError(
                        f"window map collides: {seen[key]} and {(ca, cb)} both reach {key}"
                    )
                seen[key] = (ca, cb)
        return len(seen)

    def matrix(self) -> np.ndarray:
        """Dense head unitary including the qubit pair. Only sensible for
        very small machines; the dimension is (8 * |gamma|)^2."""
        cells = self.cell_states()
        m = len(cells)
        index = {c: i for i, c in enumerate(cells)}
        dim = 4 * m * m
        out = np.zeros((dim, dim), dtype=complex)
        eye4 = np.eye(4, dtype=complex)
        for ca in cells:
            for cb in cells:
                out_a, out_b, gates = self.apply_cells(ca, cb)
                block = eye4
                for g in gates:
                    block = g @ block
                col = index[ca] * m + index[cb]
                row = index[out_a] * m + index[out_b]
                out[row * 4 : row * 4 + 4, col * 4 : col * 4 + 4] = block
        return _interleave_qubit_blocks(out, m)


def _interleave_qubit_blocks(op: np.ndarray, m: int) -> np.ndarray:
    # the builder above orders registers (gamma_a gamma_b, psi_a psi_b);
    # reorder to (psi_a psi_b, gamma_a gamma_b) so qubits come first, to
    # match the statevector layout used by the runner. Both orderings are
    # unitarily equivalent; tests only use spectra and unitarity.
    dim = 4 * m * m
    perm = np.zeros(dim, dtype=int)
    for c in range(m * m):
        for q in range(4):
            perm[q * m * m + c] = c * 4 + q
    return op[np.ix_(perm, perm)]


@dataclass
class RunResult:
    n: int
    halted: bool
    capped: bool
    halted_cell: int | None
    state: str | None
    tape: list[str]
    cells: list[Cell]
    applications: int
    executions: int
    psi: np.ndarray
    accept_overlap: float | None
    trace: list[dict]

    @property
    def sweeps(self) -> float:
        return self.applications / self.n


def input_layout(n: int, bits: list[int]) -> list[int]:
    """Place input bits on the qubit layer: right-aligned against the
    seam cell, which stays 0 along with the leading padding."""
    if len(bits) > n - 1:
        raise ValueError(f"{len(bits)} input bits do not fit on a ring of {n}")
    return [0] * (n - 1 - len(bits)) + [int(b) for b in bits] + [0]


def _statevector(bits: list[int]) -> np.ndarray:
    n = len(bits)
    psi = np.zeros(2**n, dtype=complex)
    idx = 0
    for b in bits:
        idx = idx * 2 + (1 if b else 0)
    psi[idx] = 1.0
    return psi


def _qubit_marginal(psi: np.ndarray, n: int, cell: int) -> float:
    """Probability that the given cell's qubit reads 1."""
    probs = np.abs(psi) ** 2
    shift = n - 1 - cell
    idx = np.arange(len(probs))
    return float(probs[(idx >> shift) & 1 == 1].sum())


def run_ring(
    tm: Tm,
    n: int,
    bits: list[int] | None = None,
    max_applications: int | None = None,
    collect_trace: bool = False,
    check_invariants: bool = True,
) -> RunResult:
    """Drive the ring until the machine halts or the application cap hits.

    Applications sweep the windows (n-1,0), (0,1), ..., (n-2,n-1) and
    repeat; starting at the seam consumes the seeded rightward flag first.
    ``bits`` assigns the qubit layer (cell order); default all zero.
    """
    if n < 2:
        raise ValueError("ring needs at least two cells")
    head = HeadUnitary(tm)
    t = head.tables
    if bits is None:
        bits = [0] * n
    if len(bits) != n:
        raise ValueError("need one qubit value per cell")
    cap = max_applications if max_applications is not None else 10_000

    cells: list[Cell] = [(DUMMY, tm.blank, FLAG_NONE) for _ in range(n)]
    cells[n - 1] = (tm.initial, tm.blank, FLAG_RIGHT)
    psi = _statevector(bits)
    trace: list[dict] = []
    applications = 0
    executions = 0
    halted_cell: int | None = None

    while applications < cap:
        w = (n - 1 + applications) % n
        a, b = w, (w + 1) % n
        ca, cb = cells[a], cells[b]
        triggered = (ca[2] == FLAG_RIGHT and cb[2] == FLAG_NONE) or (
            ca[2] == FLAG_NONE and cb[2] == FLAG_LEFT
        )
        out_a, out_b, gates = head.apply_cells(ca, cb)
        cells[a], cells[b] = out_a, out_b
        for g in gates:
            psi = linalg.embed_on_registers(g, [a, b], n) @ psi
        applications += 1
        if triggered:
            executions += 1
        if collect_trace and (out_a, out_b) != (ca, cb):
            trace.append(
                {
                    "application": applications,
                    "window": [a, b],
                    "before": [_cell_json(ca), _cell_json(cb)],
                    "after": [_cell_json(out_a), _cell_json(out_b)],
                    "gates": len(gates),
                }
            )
        if check_invariants:
            _assert_wellformed(cells, t)
        hit = [i for i in (a, b) if cells[i][2] == FLAG_HALT]
        if hit:
            halted_cell = hit[0]
            break

    halted = halted_cell is not None
    return RunResult(
        n=n,
        halted=halted,
        capped=not halted,
        halted_cell=halted_cell,
        state=cells[halted_cell][0] if halted else None,
        tape=[c[1] for c in cells],
        cells=list(cells),
        applications=applications,
        executions=executions,
        psi=psi,
        accept_overlap=_qubit_marginal(psi, n, halted_cell) if halted else None,
        trace=trace,
    )


def _cell_json(cell: Cell) -> list:
    q, s, f = cell
    return [q, s, f]


def _assert_wellformed(cells: list[Cell], t: HeadTables) -> None:
    active = [(i, c) for i, c in enumerate(cells) if c[2] != FLAG_NONE]
    if len(active) > 1:
        raise RuntimeError(f"more than one active flag: {active}")
    for i, (q, s, f) in enumerate(cells):
        if q is DUMMY and f != FLAG_NONE:
            raise RuntimeError(f"cell {i} has a flag but no state")
        if q is not DUMMY and f == FLAG_NONE:
            raise RuntimeError(f"cell {i} holds state {q} without a flag")
        if q is not DUMMY and f not in (t.v[q], FLAG_HALT):
            raise RuntimeError(f"cell {i} flag {f} disagrees with state {q}")


@dataclass
class TmRun:
    """Result of the plain, cell-by-cell reference simulation."""

    halted: bool
    stuck: bool
    capped: bool
    state: str
    position: int
    tape: list[str]
    steps: int
    psi: np.ndarray


def simulate_tm(tm: Tm, n: int, bits: list[int] | None = None, max_steps: int = 10_000) -> TmRun:
    """Reference simulation on a circular tape, written independently of
    the window mechanics: the head starts executing at cell 0 and halts
    on the cell where the final state is entered."""
    if bits is None:
        bits = [0] * n
    tape = [tm.blank] * n
    psi = _statevector(bits)
    pos, state = 0, tm.initial
    prev = n - 1
    steps = 0
    stuck = False
    while state != tm.final and steps < max_steps:
        tr = tm.delta.get((state, tape[pos]))
        if tr is None:
            stuck = True
            break
        tape[pos] = tr.write
        arrived_rightward = (pos - prev) % n == 1
        state = tr.target
        steps += 1
        if state in tm.gates:
            g = tm.gates[state][1]
            if g.shape == (2, 2):
                psi = linalg.embed_on_registers(g, [pos], n) @ psi
            elif arrived_rightward:
                psi = linalg.embed_on_registers(g, [prev, pos], n) @ psi
            else:
                psi = linalg.embed_on_registers(g, [pos, prev], n) @ psi
        if state == tm.final:
            break
        prev, pos = pos, (pos + (1 if tr.move == RIGHT else -1)) % n
    return TmRun(
        halted=state == tm.final,
        stuck=stuck,
        capped=not stuck and state != tm.final,
        state=state,
        position=pos,
        tape=tape,
        steps=steps,
        psi=psi,
    )


def differential_test(
    tm: Tm,
    n: int,
    bits: list[int] | None = None,
    max_steps: int = 1_000,
    tol: float = 1e-12,
) -> dict:
    """Run the ring and the reference simulation side by side and compare
    final tape, state, halting cell, step count, and statevector."""
    ref = simulate_tm(tm, n, bits=bits, max_steps=max_steps)
    ring = run_ring(tm, n, bits=bits, max_applications=(max_steps + 2) * n)
    psi_diff = float(np.max(np.abs(ref.psi - ring.psi)))
    checks = {
        "both_halted": ref.halted and ring.halted,
        "tape": ref.tape == ring.tape,
        "state": ref.state == (ring.state or ""),
        "cell": ref.position == ring.halted_cell,
        "steps": ref.steps == ring.executions,
        "psi": psi_diff <= tol,
        "overhead": ring.applications <= (ref.steps + 2) * n,
    }
    return {
        "n": n,
        "match": all(checks.values()),
        "checks": checks,
        "steps": ref.steps,
        "applications": ring.applications,
        "psi_diff": psi_diff,
    }


def run_report(result: RunResult) -> str:
    lines = [
        json.dumps(
            {
                "n": result.n,
                "halted": result.halted,
                "capped": result.capped,
                "halted_cell": result.halted_cell,
                "state": result.state,
                "tape": result.tape,
                "applications": result.applications,
                "executions": result.executions,
                "accept_overlap": result.accept_overlap,
            },
            sort_keys=True,
        )
    ]
    lines.extend(json.dumps(row, sort_keys=True) for row in result.trace)
    return "\n".join(lines) + "\n"


EXAMPLE_STAMP = """\
# walk right stamping three marks, then stop
states: start s1 s2 stop
alphabet: _ 1
delta: start,_ -> 1,right,s1
delta: s1,_ -> 1,right,s2
delta: s2,_ -> 1,right,stop
"""

EXAMPLE_BOUNCE = """\
# step right, turn around, rewrite the first mark, stop on the start cell
states: start out back stop
alphabet: _ a b
delta: start,_ -> a,right,out
delta: out,_ -> a,left,back
delta: back,a -> b,left,stop
"""

EXAMPLE_SHUTTLE = """\
# sweep right, walk back rewriting, turn again and stop on a rewritten cell
states: start out walk turn stop
alphabet: _ x y z
delta: start,_ -> x,right,out
delta: out,_ -> x,left,walk
delta: walk,x -> y,left,walk
delta: walk,_ -> z,right,turn
delta: turn,y -> z,right,stop
"""

EXAMPLE_FLIP = """\
# stamping walk that flips the qubit under each fresh mark
states: start s1 s2 stop
alphabet: _ 1
quantum-states: s1 -> x
quantum-states: s2 -> x
delta: start,_ -> 1,right,s1
delta: s1,_ -> 1,right,s2
delta: s2,_ -> 1,right,stop
"""

EXAMPLE_TURN = """\
# turning walk that rotates one qubit and then swaps a neighbouring pair
states: start out back stop
alphabet: _ a b
quantum-states: out -> rot(0.7853981633974483)
quantum-states: stop -> swap
delta: start,_ -> a,right,out
delta: out,_ -> a,left,back
delta: back,a -> b,left,stop
"""

EXAMPLE_ORBIT = """\
# endless clockwise walk; never reaches its halting state
states: go stop
alphabet: _
delta: go,_ -> _,right,go
"""

EXAMPLE_INVALID = """\
# two entries into mid disagree on direction and repeat a written symbol
states: start mid stop
alphabet: _ m
delta: start,_ -> m,right,mid
delta: start,m -> m,left,mid
delta: stop,_ -> m,right,mid
"""

EXAMPLES = {
    "stamp": EXAMPLE_STAMP,
    "bounce": EXAMPLE_BOUNCE,
    "shuttle": EXAMPLE_SHUTTLE,
    "flip": EXAMPLE_FLIP,
    "turn": EXAMPLE_TURN,
    "orbit": EXAMPLE_ORBIT,
}
