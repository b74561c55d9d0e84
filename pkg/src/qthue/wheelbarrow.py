"""A fixed 48-symbol rewrite machine built from two rotating queues.

Every rule swaps or rewrites one adjacent pair, so the system is a quantum
Thue system over a fixed alphabet and can be fed to the evolution explorer,
the labelled-graph builder, and the chain operators unchanged.  The alphabet
splits into five classes:

* slot symbols: six instruction digits ``:T :U :A :S :H r``, data cells
  ``:0 :1``, and their travelling carrier forms (``@`` prefixes plus the
  special-purpose carriers ``;1 "1 *0 *1 :!``),
* quantum cells ``-:a`` and carrier forms, each holding one qubit register,
* exactly one head per configuration: ``I o w R`` or an instruction head
  ``OT OU OA OS OH``,
* brackets ``| ? !`` closing the string at both ends,
* walkers ``g b G B + X Y Z C D``, the ghost clock and counter machinery.

The intended run has two phases.  A counting phase turns tape cells one by
one into a base-six digit string: a ghost cycles from the right wall to the
left wall, becomes an increment token, bumps the digit wheel (digit order
``:T :U :A :S :H r`` for values zero to five, fresh digits born from blank
``:0`` cells), and a walker then picks up the front tape cell and carries
it past the yard marker ``o`` to the sleeping ghost at the back.  When the
lead digit reads ``:H`` and the tape is exhausted, the left wall flips to
``?`` and the machine enters the instruction phase: each pass dispatches
the front digit as a carrier, the digit parks at the wheel's back, and its
head rewrites the yard front (rotate, Toffoli, controlled rotation, swap,
or revert).  Both queues turn against each other like a wheel and its load,
and the reachable set of strings stays polynomial in the length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections import Counter, deque

import numpy as np

from . import ulg as ulg_mod
from .linalg import SWAP, rot
from .qts import (
    DEFAULT_EXPLORE_CAP,
    EvolutionGraph,
    Marker,
    Qts,
    Rule,
    compressed_site_dim,
    explore_evolution,
    qts_to_ulg,
)

# ---------------------------------------------------------------------------
# Alphabet.

PROGRAM_DIGITS = (":T", ":U", ":A", ":S", ":H", "r")
DATA_CELLS = (":0", ":1")
DIGIT_CARRIERS = ("@T", "@U", "@A", "@S", "@H", "@r")
DATA_CARRIERS = ("@0", "@1")
TOFFOLI_CARRIERS = (";1", '"1')
SWAP_CARRIERS = ("*0", "*1")
CONTROL_MARK = ":!"

CLASS_SLOT = (
    PROGRAM_DIGITS + DATA_CELLS + DIGIT_CARRIERS + DATA_CARRIERS
    + TOFFOLI_CARRIERS + SWAP_CARRIERS + (CONTROL_MARK,)
)
CLASS_QUANTUM = ("-:a", "-@a", "-;a", '-"a', "-*a")
CLASS_HEAD = ("I", "o", "w", "R", "OT", "OU", "OA", "OS", "OH")
CLASS_BRACKET = ("|", "?", "!")
CLASS_WALKER = ("g", "b", "G", "B", "+", "X", "Y", "Z", "C", "D")

SYMBOLS = CLASS_SLOT + CLASS_QUANTUM + CLASS_HEAD + CLASS_BRACKET + CLASS_WALKER

SYMBOL_CLASSES = {
    "slot": frozenset(CLASS_SLOT),
    "quantum": frozenset(CLASS_QUANTUM),
    "head": frozenset(CLASS_HEAD),
    "bracket": frozenset(CLASS_BRACKET),
    "walker": frozenset(CLASS_WALKER),
}

INSTRUCTION_HEADS = ("OT", "OU", "OA", "OS", "OH")
DIGIT_VALUE = {s: i for i, s in enumerate(PROGRAM_DIGITS)}

# Dropped when the data alphabet is folded into the quantum cells.
REDUCED_REMOVED = frozenset(
    DATA_CELLS + DATA_CARRIERS + SWAP_CARRIERS + (CONTROL_MARK, "-;a", '-"a')
)
REDUCED_QUANTUM = ("-:a", "-@a", "-*a")

CU_ANGLE = math.pi / 8


def symbol_class(s: str) -> str:
    for name, members in SYMBOL_CLASSES.items():
        if s in members:
            return name
    raise KeyError(f"not an alphabet symbol: {s!r}")


# ---------------------------------------------------------------------------
# Rule tables.  Each family emits its full rules and, where the folded system
# keeps an image, the reduced rule.  Folding maps :0 :1 -> -:a, @0 @1 -> -@a,
# *0 *1 -> -*a; rules whose image would create or destroy a register are
# dropped, and the controlled-rotation chain collapses to one gated rule.

_TABLES = None


def rule_tables():
    """(full, reduced) rule lists, built once and cached."""
    global _TABLES
    if _TABLES is None:
        _TABLES = _build_tables()
    return _TABLES


def _build_tables():
    full = []
    reduced = {}
    fullq = frozenset(CLASS_QUANTUM)
    redq = frozenset(REDUCED_QUANTUM)

    def F(a, b, c, d, gate=None, name="id"):
        full.append(_rule((a, b), (c, d), fullq, gate, name))

    def R(a, b, c, d, gate=None, name="id"):
        rule = _rule((a, b), (c, d), redq, gate, name)
        for key in (((a, b), (c, d)), ((c, d), (a, b))):
            prev = reduced.get(key)
            if prev is not None:
                if prev.gate_name != rule.gate_name:
                    raise ValueError(
                        f"folded rule conflict at {key}: "
                        f"{prev.gate_name} vs {rule.gate_name}"
                    )
                return
        reduced[((a, b), (c, d))] = rule

    # -- opening: I walks the tape, then trades the back wall b for o/B ----
    for t in (":0", ":1", "-:a"):
        F("I", t, t, "I")
    R("I", "-:a", "-:a", "I")
    F("I", "b", "o", "B")
    R("I", "b", "o", "B")

    # -- ghost state changes at the walls ----------------------------------
    F("B", "|", "G", "|")
    R("B", "|", "G", "|")
    F("g", "|", "b", "|")
    R("g", "|", "b", "|")

    # -- ghosts drift through digits, cells, and the yard marker -----------
    for gh in ("G", "g"):
        for s in PROGRAM_DIGITS + (":0", ":1", "-:a", "o"):
            F(gh, s, s, gh)
        for s in PROGRAM_DIGITS + ("-:a", "o"):
            R(gh, s, s, gh)

    # -- base-six increment at the left wall -------------------------------
    F("|", "G", "|", "+")
    R("|", "G", "|", "+")
    F("+", "r", ":T", "+")  # top digit wraps, carry continues right
    R("+", "r", ":T", "+")
    F("+", ":T", ":U", "X")  # staged bump, X confirms another digit follows
    R("+", ":T", ":U", "X")
    for x in PROGRAM_DIGITS:
        F("X", x, "Z", x)
        R("X", x, "Z", x)
    F(":U", "Z", "C", ":U")
    R(":U", "Z", "C", ":U")
    F("+", ":0", ":U", "Y")  # digit born from a blank cell; no folded image
    F("Y", "-:a", "Z", "-:a")  # Y confirms the new digit ends the wheel
    R("Y", "-:a", "Z", "-:a")
    for c in DATA_CELLS:
        F("Y", c, "Z", c)
    for a, b in ((":U", ":A"), (":A", ":S"), (":S", ":H"), (":H", "r")):
        F("+", a, "C", b)
        R("+", a, "C", b)
    F(":T", "C", "C", ":T")  # C returns left through freshly wrapped digits
    R(":T", "C", "C", ":T")
    F("|", "C", "|", "D")
    R("|", "C", "|", "D")
    for x in PROGRAM_DIGITS:
        F("D", x, x, "D")
        R("D", x, x, "D")
    F("D", "-:a", "-@a", "g")  # pickup drops an idle ghost in the old slot
    R("D", "-:a", "-@a", "g")
    F("D", ":0", "@0", "g")
    F("D", ":1", "@1", "g")

    # -- carriers walk right and deposit on the sleeping ghost -------------
    # Registers are counted by rank along the string.  A walking carrier
    # hands its cargo to each quantum cell it crosses and takes that cell's
    # content onward, so rank contents never move and a full revolution of
    # the yard closes as the identity.  Only the exchange instruction below
    # carries cargo across a cell with an explicit swap.
    for c in DATA_CELLS:
        F("-@a", c, c, "-@a")
    F("-@a", "-:a", "-:a", "-@a")
    R("-@a", "-:a", "-:a", "-@a")
    for cc in DATA_CARRIERS:
        for dd in DATA_CELLS:
            F(cc, dd, dd, cc)
        F(cc, "-:a", "-:a", cc)
        F(cc, "o", "o", cc)
    F("-@a", "o", "o", "-@a")
    R("-@a", "o", "o", "-@a")
    F("@0", "b", ":0", "B")
    F("@1", "b", ":1", "B")
    F("-@a", "b", "-:a", "B")
    R("-@a", "b", "-:a", "B")

    # -- instruction phase: wall flip, ghost capture, dispatch -------------
    F("|", ":H", "?", ":H")
    R("|", ":H", "?", ":H")
    F("?", "G", "!", "g")
    R("?", "G", "!", "g")
    for x, xx in zip(PROGRAM_DIGITS, DIGIT_CARRIERS):
        F("!", x, "?", xx)
        R("!", x, "?", xx)
    for xx in DIGIT_CARRIERS:
        for y in PROGRAM_DIGITS:
            F(xx, y, y, xx)
            R(xx, y, y, xx)

    # Toffoli: front :1 arms a pending carrier that tests the next two cells
    F("@T", "o", ":T", "OT")
    R("@T", "o", ":T", "OT")
    F("OT", ":0", "o", "@0")
    R("OT", "-:a", "o", "-@a")
    F("OT", ":1", "o", ";1")
    F(";1", ":0", "@1", ":0")
    F(";1", ":1", ":1", '"1')
    F('"1', ":0", "@1", ":1")
    F('"1', ":1", "@1", ":0")

    # controlled rotation: front :1 gates the two quantum cells behind it
    cu = np.eye(4, dtype=complex)
    cu[2:, 2:] = rot(CU_ANGLE)
    F("@U", "o", ":U", "OU")
    R("@U", "o", ":U", "OU")
    F("OU", ":0", "o", "@0")
    F("OU", ":1", "o", ":!")
    F(":!", "-:a", ":1", "-;a")
    F("-;a", "-:a", '-"a', "-:a", gate=cu, name=f"crot({CU_ANGLE!r})")
    F(":1", '-"a', "@1", "-:a")
    R("OU", "-:a", "o", "-@a", gate=rot(CU_ANGLE), name=f"rot({CU_ANGLE!r})")

    # ancilla: rotates quantum cells and spent :1 cells, refuses :0
    F("@A", "o", ":A", "OA")
    R("@A", "o", ":A", "OA")
    F("OA", "-:a", "o", "-@a")
    R("OA", "-:a", "o", "-@a")
    F("OA", ":1", "o", "@1")

    # swap: the second yard cell leaves for the back instead of the first
    F("@S", "o", ":S", "OS")
    R("@S", "o", ":S", "OS")
    F("OS", ":0", "o", "*0")
    F("OS", ":1", "o", "*1")
    F("OS", "-:a", "o", "-*a")
    R("OS", "-:a", "o", "-*a")
    for sc, c in zip(SWAP_CARRIERS, DATA_CELLS):
        for dd, ddc in zip(DATA_CELLS, DATA_CARRIERS):
            F(sc, dd, ddc, c)
        F(sc, "-:a", "-@a", c)
    F("-*a", ":0", "@0", "-:a")
    F("-*a", ":1", "@1", "-:a")
    F("-*a", "-:a", "-@a", "-:a", gate=SWAP, name="swap")
    R("-*a", "-:a", "-@a", "-:a", gate=SWAP, name="swap")

    # halt digit: only ever rotates a blank front
    F("@H", "o", ":H", "OH")
    R("@H", "o", ":H", "OH")
    F("OH", ":0", "o", "@0")
    R("OH", "-:a", "o", "-@a")

    # revert: R runs the last deposit backwards to the yard front
    F("@r", "o", "r", "R")
    R("@r", "o", "r", "R")
    F("R", "g", "R", "G")
    R("R", "g", "R", "G")
    F("R", "-@a", "w", "-:a")
    R("R", "-@a", "w", "-:a")
    F("R", "@0", "w", ":0")
    F("R", "@1", "w", ":1")
    F("w", "g", "o", "G")
    R("w", "g", "o", "G")

    return full, list(reduced.values())


def _rule(lhs, rhs, quantum, gate, name):
    k = sum(1 for s in lhs if s in quantum)
    if gate is None:
        gate = np.eye(2 ** k, dtype=complex)
    return Rule(lhs, rhs, gate, name)


_SYSTEMS = {}


def full_qts() -> Qts:
    if "full" not in _SYSTEMS:
        _SYSTEMS["full"] = Qts(
            SYMBOLS, CLASS_QUANTUM, rule_tables()[0], qudit_dim=2,
            head_symbols=CLASS_HEAD, boundary_symbols=CLASS_BRACKET,
        )
    return _SYSTEMS["full"]


def reduced_qts() -> Qts:
    """The folded system: data cells merged into the quantum registers."""
    if "reduced" not in _SYSTEMS:
        symbols = tuple(s for s in SYMBOLS if s not in REDUCED_REMOVED)
        _SYSTEMS["reduced"] = Qts(
            symbols, REDUCED_QUANTUM, rule_tables()[1], qudit_dim=2,
            head_symbols=CLASS_HEAD, boundary_symbols=CLASS_BRACKET,
        )
    return _SYSTEMS["reduced"]


def reduced_profile() -> dict:
    q = reduced_qts()
    return {
        "symbols": len(q.symbols),
        "quantum_symbols": len(q.quantum),
        "site_dim": compressed_site_dim(q),
        "rules": len(q.rules),
    }


# ---------------------------------------------------------------------------
# Adjacency table: the ordered symbol pairs that may ever sit next to each
# other in a reachable string.  Everything outside is penalized energetically
# and doubles as the corrupted-seed detector.

_CARRY_PAIRS = frozenset({
    (":T", "+"), (":U", "X"), (":U", "Y"), (":U", "Z"), (":U", "C"),
    (":T", "C"),
})

# Rules act in both directions, so the reachable component also contains
# strings produced by running a phase backwards out of the middle of another
# one.  Four such detours leave neighbour pairs the forward phases never
# produce; each group below lists one mechanism's full closure over digits
# and cell values.
_REVERSAL_PAIRS = frozenset(
    # A data carrier beside the idle ghost can re-absorb into a scout,
    # (carrier, g) -> (D, cell), so D acquires every carrier left-context.
    {(left, "D") for left in ("o", "R", "?", ":0", ":1", "-:a")}
    # An execution step read backwards, (o, carrier) -> (head, cell),
    # rebuilds an instruction head whose left neighbour is a tape cell.
    | {(cell, hd) for cell in (":0", ":1", "-:a") for hd in INSTRUCTION_HEADS}
    # A deposit read backwards re-launches the carrier, whose walk to the
    # wall puts it directly right of the bracket.
    | {("|", dc) for dc in DIGIT_CARRIERS}
    # The yard flip read backwards, (o, G) -> (w, g), lets the ghost park
    # against the wall while w is still live.
    | {("w", "b")}
)

_ALLOWED = None


def allowed_pairs() -> frozenset:
    global _ALLOWED
    if _ALLOWED is None:
        _ALLOWED = _build_allowed()
    return _ALLOWED


def _build_allowed() -> frozenset:
    px = PROGRAM_DIGITS
    cc = DATA_CELLS
    carried = (
        (CONTROL_MARK,) + SWAP_CARRIERS + TOFFOLI_CARRIERS + DATA_CARRIERS
        + ("-;a", '-"a', "-*a", "-@a")
    )
    cell_row = (
        ("|", "o", "w", "R") + cc + ("-:a", "g", "b", "G", "B", "I") + carried
    )
    rows = {
        "|": px + cc + ("-:a", "G", "I", "+", "C", "D"),
        "?": px + ("G", "+", "C") + DIGIT_CARRIERS,
        "!": px + ("g",),
        "o": ("|",) + cc + ("-:a", "g", "b", "G", "B") + carried,
        "w": cc + ("-:a", "g"),
        "R": cc + ("-:a", "g", "G") + carried,
        "g": ("|",) + px + ("o",) + cc + ("-:a",),
        "b": ("|",),
        "G": ("|",) + px + ("o",) + cc + ("-:a",),
        "B": ("|",),
        "I": cc + ("-:a", "g", "b"),
        "+": px + cc,
        "X": px,
        "Y": ("-:a",) + cc,
        "Z": px + cc + ("-:a",),
        "C": px,
        "D": px + ("o",) + cc + ("-:a",),
        CONTROL_MARK: ("-:a", "g"),
        ";1": cc + ("g",),
        '"1': cc + ("g",),
        "-;a": ("-:a", "g"),
        '-"a': ("-:a", "g", "b"),
        "-*a": cc + ("-:a", "g"),
        "-@a": ("o",) + cc + ("-:a", "g", "b"),
        "OT": (":0", ":1", "g"),
        "OU": (":0", ":1", "g"),
        "OA": (":1", "-:a", "g"),
        "OS": (":0", ":1", "-:a", "g"),
        "OH": (":0", "g"),
    }
    for x in px:
        rows[x] = (
            px + ("o", "w", "R") + cc + ("-:a", "g", "G", "D")
            + DIGIT_CARRIERS + INSTRUCTION_HEADS + carried
        )
    for s in cc + ("-:a",):
        rows[s] = cell_row
    for xx in DIGIT_CARRIERS:
        rows[xx] = px + ("o",) + cc + ("-:a", "g")
    for dc in DATA_CARRIERS:
        rows[dc] = ("o",) + cc + ("-:a", "g", "b")
    for sc in SWAP_CARRIERS:
        rows[sc] = cc + ("-:a", "g")
    pairs = {(a, b) for a, row in rows.items() for b in row}
    pairs |= _CARRY_PAIRS
    pairs |= _REVERSAL_PAIRS
    return frozenset(pairs)


def caption_checks() -> dict:
    """Three spot checks on the adjacency table."""
    allowed = allowed_pairs()
    return {
        "wall_meets_ghost": ("|", "G") in allowed,
        "no_digit_before_dispatch": all((x, "!") not in allowed for x in PROGRAM_DIGITS),
        "halt_head_refuses_one": ("OH", ":1") not in allowed,
    }


def markers() -> tuple:
    """Input and output marker: the ancilla head facing a quantum cell,
    penalizing its register's |1> component."""
    pi1 = np.array([[0.0, 0.0], [0.0, 1.0]])
    return Marker(("OA", "-:a"), pi1), Marker(("OA", "-:a"), pi1)


# ---------------------------------------------------------------------------
# Instances.  A seed is "| I t1 .. tm b |".  During counting, cell number
# 6^j + j (one-indexed) is eaten as the j-th digit birth, so those cells must
# be blank; the rest leave for the yard in order and face the instruction
# wheel forever after.  Encoding replays both wheels symbolically, binding a
# cell the first time an instruction inspects it and rejecting conflicts.

_ENCODE_CAP = 10_000
_BIND_PREFERENCE = (":0", "-:a", ":1")


class EncodingConflict(ValueError):
    pass


class _Cell:
    __slots__ = ("idx", "original", "value")

    def __init__(self, idx: int):
        self.idx = idx
        self.original = None
        self.value = None

    def examine(self, allowed) -> str:
        if self.value is None:
            self.original = next(s for s in _BIND_PREFERENCE if s in allowed)
            self.value = self.original
        elif self.value not in allowed:
            raise EncodingConflict(
                f"tape cell {self.idx} holds {self.value} where the wheel "
                f"needs one of {sorted(allowed)}"
            )
        return self.value


def _eff_toffoli(yard):
    if yard[0].examine({":0", ":1"}) == ":0":
        yard.rotate(-1)
        return
    if yard[1].examine({":0", ":1"}) == ":0":
        yard.rotate(-1)
        return
    third = yard[2].examine({":0", ":1"})
    yard[2].value = ":1" if third == ":0" else ":0"
    a = yard.popleft()
    b = yard.popleft()
    yard.appendleft(b)
    yard.append(a)


def _eff_controlled(yard):
    if yard[0].examine({":0", ":1"}) == ":1":
        yard[1].examine({"-:a"})
        yard[2].examine({"-:a"})
    yard.rotate(-1)


def _eff_ancilla(yard):
    yard[0].examine({":1", "-:a"})
    yard.rotate(-1)


def _eff_swap(yard):
    yard[0].examine({":0", ":1", "-:a"})
    yard[1].examine({":0", ":1", "-:a"})
    a = yard.popleft()
    b = yard.popleft()
    yard.appendleft(a)
    yard.append(b)


def _eff_halt(yard):
    yard[0].examine({":0"})
    yard.rotate(-1)


def _eff_revert(yard):
    yard.rotate(1)


_INSTRUCTION_EFFECTS = {
    ":T": _eff_toffoli,
    ":U": _eff_controlled,
    ":A": _eff_ancilla,
    ":S": _eff_swap,
    ":H": _eff_halt,
    "r": _eff_revert,
}


def base_six(c: int) -> list:
    """Digit values, least significant first."""
    if c < 0:
        raise ValueError("count must be nonnegative")
    out = [c % 6]
    c //= 6
    while c:
        out.append(c % 6)
        c //= 6
    return out


def count_is_valid(c: int) -> bool:
    """The lead digit must be the flip digit :H and no other digit may be."""
    digits = base_six(c)
    return digits[0] == 4 and digits.count(4) == 1


def valid_counts(n_max: int) -> list:
    out = []
    c = 4
    while c + len(base_six(c)) + 4 <= n_max:
        if count_is_valid(c):
            out.append(c)
        c += 6
    return out


@dataclass
class Instance:
    """A runnable seed together with its switch-over bookkeeping."""

    c_star: int
    n: int
    seed: tuple
    tape: tuple
    digits: tuple
    deposits: tuple
    quantum_cells: int
    cycle_length: int

    def display(self) -> str:
        return " ".join(self.seed)


def encode_instance(c_star: int) -> Instance:
    if not count_is_valid(c_star):
        raise ValueError(
            f"count {c_star} is not encodable: base-six digits must read 4 "
            "exactly once, in the lead position"
        )
    digit_vals = base_six(c_star)
    m = c_star + len(digit_vals)
    growth = []
    p, j = 1, 0
    while p <= c_star:
        growth.append(p + j - 1)
        p *= 6
        j += 1
    assert len(growth) == len(digit_vals)
    cells = [_Cell(i) for i in range(m)]
    for gi in growth:
        cells[gi].examine({":0"})
    yard = deque(c for i, c in enumerate(cells) if i not in set(growth))
    assert len(yard) == c_star
    wheel = deque(PROGRAM_DIGITS[v] for v in digit_vals)

    seen = {}
    steps = 0
    while True:
        key = (tuple(wheel), tuple((c.idx, c.value) for c in yard))
        if key in seen:
            cycle = steps - seen[key]
            break
        seen[key] = steps
        instr = wheel[0]
        wheel.rotate(-1)
        _INSTRUCTION_EFFECTS[instr](yard)
        steps += 1
        if steps > _ENCODE_CAP:
            raise EncodingConflict("instruction wheel failed to close a cycle")

    tape = tuple(c.original if c.original is not None else ":0" for c in cells)
    deposits = tuple(
        tape[i] for i in range(m) if i not in set(growth)
    )
    seed = ("|", "I") + tape + ("b", "|")
    return Instance(
        c_star=c_star,
        n=len(seed),
        seed=seed,
        tape=tape,
        digits=tuple(PROGRAM_DIGITS[v] for v in digit_vals),
        deposits=deposits,
        quantum_cells=sum(1 for t in tape if t == "-:a"),
        cycle_length=cycle,
    )


def smallest_instances(k: int = 3) -> list:
    """The k shortest runnable instances.  Counts whose wheels demand
    contradictory cell values (the first is 52) are skipped."""
    out = []
    c = 4
    while len(out) < k:
        if count_is_valid(c):
            try:
                out.append(encode_instance(c))
            except EncodingConflict:
                pass
        c += 6
    return out


# ---------------------------------------------------------------------------
# History checks.

@dataclass
class HistoryChecks:
    size: int
    capped: bool
    bracketed: bool
    single_head: bool
    pairs_ok: bool
    offending_pairs: tuple
    simple: bool | None
    inventory: dict

    @property
    def ok(self) -> bool:
        return (
            not self.capped and self.bracketed and self.single_head
            and self.pairs_ok and self.simple is not False
        )


def explore_instance(inst: Instance, cap: int = DEFAULT_EXPLORE_CAP) -> EvolutionGraph:
    return explore_evolution(full_qts(), inst.seed, cap)


def _edge_register_routing(q: Qts, src: tuple, rule_idx: int, pos: int,
                           forward: bool):
    """Destination-register sources for one rule application, or None when
    the gate is not a plain register routing (identity or swap)."""
    rule = q.rules[rule_idx]
    lhs, rhs = (rule.lhs, rule.rhs) if forward else (rule.rhs, rule.lhs)
    src_syms = q.unintern(src)
    dst_syms = src_syms[:pos] + rhs + src_syms[pos + len(lhs):]
    src_q = [i for i, s in enumerate(src_syms) if s in q.quantum]
    dst_q = [i for i, s in enumerate(dst_syms) if s in q.quantum]
    win = range(pos, pos + len(lhs))
    win_src = [k for k, i in enumerate(src_q) if i in win]
    win_dst = [k for k, i in enumerate(dst_q) if i in win]
    k = len(win_src)
    gate = rule.gate
    if np.max(np.abs(gate - np.eye(gate.shape[0]))) <= 1e-12:
        window_map = list(range(k))
    elif k == 2 and np.max(np.abs(gate - SWAP)) <= 1e-12:
        window_map = [1, 0]
    else:
        return None
    routing = [0] * len(src_q)
    out_src = [j for j in range(len(src_q)) if j not in win_src]
    out_dst = [j for j in range(len(src_q)) if j not in win_dst]
    for a, b in zip(out_dst, out_src):
        routing[a] = b
    for slot, source in zip(win_dst, window_map):
        routing[slot] = win_src[source]
    return routing


def check_simple_routed(ev: EvolutionGraph) -> bool:
    """Gauge consistency when every edge merely reroutes registers: each
    vertex gets the register permutation accumulated from the seed, and every
    off-tree edge must agree with it.  Raises if some gate is not a routing."""
    q = ev.qts
    m = q.quantum_weight(q.unintern(ev.seed))
    ident = list(range(m))
    gauges = {0: ident}
    adj = {}
    for si, ti, ri, pos, fwd in ev.edges:
        adj.setdefault(si, []).append((ti, ri, pos, fwd))
        adj.setdefault(ti, []).append((si, ri, pos, not fwd))
    queue = deque([0])
    pending = list(ev.edges)
    while queue:
        si = queue.popleft()
        for ti, ri, pos, fwd in adj.get(si, ()):  # tree growth
            if ti in gauges:
                continue
            r = _edge_register_routing(q, ev.strings[si], ri, pos, fwd)
            if r is None:
                raise ValueError("edge gate is not a register routing")
            gauges[ti] = [gauges[si][r[j]] for j in range(m)]
            queue.append(ti)
    for si, ti, ri, pos, fwd in pending:
        r = _edge_register_routing(q, ev.strings[si], ri, pos, fwd)
        if r is None:
            raise ValueError("edge gate is not a register routing")
        if [gauges[si][r[j]] for j in range(m)] != gauges[ti]:
            return False
    return True


def check_history(ev: EvolutionGraph, build_ulg: bool = True) -> HistoryChecks:
    """Shape checks over one explored component: brackets only at the ends,
    exactly one head symbol per string, adjacent pairs inside the allowed
    table, and (optionally) gauge consistency of the labelled graph."""
    q = ev.qts
    brackets = {q.symbol_index(s) for s in CLASS_BRACKET if s in q._index}
    heads = {q.symbol_index(s) for s in CLASS_HEAD if s in q._index}
    allowed = {
        (q.symbol_index(a), q.symbol_index(b))
        for a, b in allowed_pairs()
        if a in q._index and b in q._index
    }
    bracketed = True
    single_head = True
    occurring = set()
    track = {name: q.symbol_index(name) for name in ("?", "!", "R", "w", "G") if name in q._index}
    counts = Counter()
    for s in ev.strings:
        if not (s[0] in brackets and s[-1] in brackets):
            bracketed = False
        if any(c in brackets for c in s[1:-1]):
            bracketed = False
        if sum(1 for c in s if c in heads) != 1:
            single_head = False
        occurring.update(zip(s, s[1:]))
        for name, code in track.items():
            if code in s:
                counts[name] += 1
    offending = tuple(
        sorted((q.symbols[a], q.symbols[b]) for a, b in occurring - allowed)
    )
    simple = None
    if build_ulg:
        m = q.quantum_weight(q.unintern(ev.seed))
        if m <= 4:
            simple = ulg_mod.check_simple(qts_to_ulg(q, ev)).simple
        else:
            # dense per-edge unitaries would not fit; every gate in these
            # orbits is a register routing, checked exactly instead
            simple = check_simple_routed(ev)
    inventory = {
        "strings": len(ev.strings),
        "edges": len(ev.edges),
        "dead_ends": len(ev.leaves()),
        "flipped_wall": counts["?"],
        "dispatching": counts["!"],
        "reverting": counts["R"],
        "restoring": counts["w"],
        "active_ghost": counts["G"],
    }
    return HistoryChecks(
        size=len(ev.strings),
        capped=ev.capped,
        bracketed=bracketed,
        single_head=single_head,
        pairs_ok=not offending,
        offending_pairs=offending,
        simple=simple,
        inventory=inventory,
    )


def check_rule_classes() -> list:
    """Per-rule shape audit: bracket membership is preserved cell by cell and
    every rule conserves the class census, so heads are never created or
    destroyed and the walls can never multiply."""
    problems = []
    brackets = SYMBOL_CLASSES["bracket"]
    for r in full_qts().rules:
        for i, (a, b) in enumerate(zip(r.lhs, r.rhs)):
            if (a in brackets) != (b in brackets):
                problems.append(f"{r.lhs} <-> {r.rhs}: bracket moved at cell {i}")
        if Counter(map(symbol_class, r.lhs)) != Counter(map(symbol_class, r.rhs)):
            problems.append(f"{r.lhs} <-> {r.rhs}: class census changed")
    return problems


def check_marker_shape() -> dict:
    inp, out = markers()
    report = {}
    for name, mk in (("input", inp), ("output", out)):
        heads = sum(1 for s in mk.pattern if s in SYMBOL_CLASSES["head"])
        report[name] = {
            "width": len(mk.pattern),
            "heads": heads,
            "quantum_cells": sum(1 for s in mk.pattern if s in CLASS_QUANTUM),
            "rank": int(round(float(np.trace(mk.projector).real))),
        }
    return report


def corrupted_seed_check(inst: Instance, position: int, symbol: str,
                         cap: int | None = None) -> dict:
    """Explore a deliberately damaged seed.  Healthy outcomes: either some
    reachable string exposes a pair outside the allowed table, or the whole
    component is exhausted without the cap biting."""
    if not 0 <= position < inst.n:
        raise ValueError("corruption position outside the string")
    seed = list(inst.seed)
    if symbol == seed[position]:
        raise ValueError("corruption must change the symbol")
    seed[position] = symbol
    q = full_qts()
    ev = explore_evolution(q, tuple(seed), cap if cap else 10 * inst.n ** 3)
    allowed = allowed_pairs()
    illegal = None
    for s in ev.strings:
        syms = q.unintern(s)
        for pair in zip(syms, syms[1:]):
            if pair not in allowed:
                illegal = pair
                break
        if illegal:
            break
    return {
        "position": position,
        "symbol": symbol,
        "strings": len(ev.strings),
        "capped": ev.capped,
        "illegal_pair": illegal,
        "detected": illegal is not None or not ev.capped,
    }


def size_exponent(points) -> float:
    """Least-squares slope of log(size) against log(length)."""
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("need at least two points to fit an exponent")
    xs = np.log([float(n) for n, _ in pts])
    ys = np.log([float(s) for _, s in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def verify_instance(inst: Instance, cap: int = DEFAULT_EXPLORE_CAP,
                    build_ulg: bool = True) -> dict:
    """One instance's full report: exploration size, shape checks, and the
    branch inventory."""
    ev = explore_instance(inst, cap)
    hc = check_history(ev, build_ulg=build_ulg)
    return {
        "c_star": inst.c_star,
        "n": inst.n,
        "quantum_cells": inst.quantum_cells,
        "size": hc.size,
        "capped": hc.capped,
        "bracketed": hc.bracketed,
        "single_head": hc.single_head,
        "pairs_ok": hc.pairs_ok,
        "offending_pairs": list(hc.offending_pairs),
        "simple": hc.simple,
        "inventory": hc.inventory,
        "ok": hc.ok,
    }
