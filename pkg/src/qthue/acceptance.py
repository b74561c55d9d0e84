"""Ten end-to-end checks over the whole library.

Each criterion function returns (ok, detail); CRITERIA lists them in a
fixed order.  The test suite and the selftest command both walk this
list and print one verdict line per criterion.
"""

import itertools

import numpy as np

from . import graphs, hardness as hd, qrm, wheelbarrow as wb
from .linalg import hermitian_eigs, rot
from .qts import (Marker, chain_hamiltonian, decide, even_number_example,
                  explore_evolution, parse_rules, qts_to_ulg)
from .ulg import (Ulg, associated_hamiltonian, check_simple,
                  diagonalization_residual)

RNG_SEED = 20260816


def criterion_path_gaps() -> tuple:
    worst = 0.0
    for length in range(2, 51):
        a = graphs.algebraic_connectivity(graphs.path_graph(length))
        worst = max(worst, abs(a - graphs.path_gap(length)))
    return worst <= 1e-9, f"lengths 2..50, max error {worst:.2e}"


def criterion_fiedler_connectivity() -> tuple:
    checked = 0
    for k in range(2, 7):
        slots = list(itertools.combinations(range(k), 2))
        for mask in range(2 ** len(slots)):
            g = graphs.Graph(range(k))
            for bit, (a, b) in enumerate(slots):
                if mask >> bit & 1:
                    g.add_edge(a, b)
            connected = len(graphs.components(g)) == 1
            positive = graphs.algebraic_connectivity(g) > 1e-12
            if connected != positive:
                return False, f"mismatch on {k} vertices, mask {mask}"
            checked += 1
    return True, f"{checked} graphs on 2..6 vertices"


def _random_connected_graph(rng) -> graphs.Graph:
    k = int(rng.integers(2, 41))
    g = graphs.Graph(range(k))
    for i in range(1, k):
        g.add_edge(int(rng.integers(0, i)), i)
    for _ in range(int(rng.integers(0, k))):
        a, b = rng.integers(0, k, size=2)
        if a != b and not g.has_edge(int(a), int(b)):
            g.add_edge(int(a), int(b))
    return g


def criterion_kitaev_graph_bound() -> tuple:
    lam, bound = graphs.penalized_bound(graphs.path_graph(3), {"v2"})
    if abs(lam - 0.19806226419516165) > 1e-9:
        return False, f"worked three-vertex case eigenvalue off: {lam}"
    if abs(bound - 0.18350341907227394) > 1e-9:
        return False, f"worked three-vertex case bound off: {bound}"
    rng = np.random.default_rng(RNG_SEED)
    worst = np.inf
    for trial in range(500):
        g = _random_connected_graph(rng)
        k = len(g)
        size = int(rng.integers(1, k))
        penalties = set(rng.choice(k, size=size, replace=False).tolist())
        lam, bound = graphs.penalized_bound(g, penalties)
        worst = min(worst, lam - bound)
        if lam < bound - 1e-9:
            return False, f"trial {trial}: eigenvalue {lam} below bound {bound}"
    return True, f"500 random graphs, worst margin {worst:.2e}"


def _random_unitary(rng, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def criterion_ulg_semiclassical() -> tuple:
    rng = np.random.default_rng(RNG_SEED + 1)
    worst_spec, worst_res = 0.0, 0.0
    for trial in range(200):
        k = int(rng.integers(2, 13))
        n = int(rng.integers(1, 5))
        gauges = [_random_unitary(rng, n) for _ in range(k)]
        u = Ulg(n, range(k))
        for i in range(1, k):
            j = int(rng.integers(0, i))
            u.add_edge(j, i, gauges[i] @ gauges[j].conj().T)
        for _ in range(int(rng.integers(0, k))):
            a, b = (int(x) for x in rng.integers(0, k, size=2))
            if a != b and not u.graph.has_edge(a, b):
                u.add_edge(a, b, gauges[b] @ gauges[a].conj().T)
        if not check_simple(u).simple:
            return False, f"trial {trial}: constructed graph not simple"
        h = associated_hamiltonian(u).to_dense()
        lap = graphs.laplacian(u.graph).to_dense()
        got = np.sort(np.linalg.eigvalsh(h))
        want = np.sort(np.repeat(np.linalg.eigvalsh(lap), n))
        worst_spec = max(worst_spec, float(np.max(np.abs(got - want))))
        worst_res = max(worst_res, diagonalization_residual(u))
        if worst_spec > 1e-8 or worst_res > 1e-8:
            return False, (f"trial {trial}: spectrum {worst_spec:.2e}, "
                           f"residual {worst_res:.2e}")
    return True, (f"200 graphs, spectrum error {worst_spec:.2e}, "
                  f"residual {worst_res:.2e}")


def criterion_thue_example() -> tuple:
    q = parse_rules("c <-> b\na b <-> c c\n")
    seen = set()
    sizes = []
    isolated_aaa = False
    for syms in itertools.product("abc", repeat=3):
        if q.intern(syms) in seen:
            continue
        seed = q.parse_seed(" ".join(syms))
        ev = explore_evolution(q, seed)
        seen.update(ev.strings)
        sizes.append(len(ev.strings))
        if syms == ("a", "a", "a"):
            isolated_aaa = len(ev.strings) == 1
    if len(seen) != 27:
        return False, f"covered {len(seen)} of 27 strings"
    if sorted(sizes) != [1, 2, 6, 18]:
        return False, f"component sizes {sorted(sizes)}"
    if not isolated_aaa:
        return False, "aaa is not isolated"
    return True, "27 strings in components 18+6+2+1, aaa isolated"


def criterion_even_system() -> tuple:
    proj = np.diag([0.0, 1.0])
    r = rot(np.pi / 2)
    for n in range(1, 9):
        q, seed, inp, out = even_number_example(n)
        ev = explore_evolution(q, seed)
        h_chain = chain_hamiltonian(q, n + 2, block=ev.strings)
        h_ulg = associated_hamiltonian(qts_to_ulg(q, ev))
        a = hermitian_eigs(h_chain, vectors=False).eigenvalues
        b = hermitian_eigs(h_ulg, vectors=False).eigenvalues
        if np.max(np.abs(np.sort(a) - np.sort(b))) > 1e-8:
            return False, f"n={n}: chain and graph spectra differ"
        rn = np.linalg.matrix_power(r, n)
        oracle = float(np.linalg.eigvalsh(proj + rn.conj().T @ proj @ rn)[0])
        want = "accepts" if oracle <= 0.25 else "rejects"
        got = decide(q, seed, inp, out, eps=0.5).verdict
        if got != want:
            return False, f"n={n}: decide says {got}, oracle {oracle}"
    return True, "n=1..8 spectra match, verdicts follow the rotation oracle"


def criterion_qrm_differential() -> tuple:
    names = ["bounce", "flip", "shuttle", "stamp", "turn"]
    runs = 0
    for name in names:
        tm = qrm.parse_tm(qrm.EXAMPLES[name])
        for n in range(4, 9):
            rep = qrm.differential_test(tm, n)
            if not rep["match"]:
                return False, f"{name} n={n}: {rep['checks']}"
            if rep["applications"] > 200:
                return False, f"{name} n={n}: {rep['applications']} applications"
            runs += 1
    return True, f"{len(names)} machines, rings 4..8, {runs} exact matches"


def criterion_wheelbarrow_structure() -> tuple:
    captions = wb.caption_checks()
    if not all(captions.values()):
        return False, f"caption checks {captions}"
    bad_rules = wb.check_rule_classes()
    if bad_rules:
        return False, f"{len(bad_rules)} rules break the class census"
    for inst in wb.smallest_instances(3):
        rep = wb.verify_instance(inst)
        if not rep["ok"]:
            return False, f"n={inst.n}: {rep}"
    window = []
    c = 4
    while len(window) < 7:
        if wb.count_is_valid(c):
            try:
                inst = wb.encode_instance(c)
            except wb.EncodingConflict:
                c += 6
                continue
            ev = wb.explore_instance(inst)
            if ev.capped:
                return False, f"n={inst.n}: exploration capped"
            window.append((inst.n, len(ev.strings)))
        c += 6
    exponent = wb.size_exponent(window[-4:])
    lengths = [n for n, _ in window[-4:]]
    if exponent > 3.3:
        return False, f"size exponent {exponent:.4f} over lengths {lengths}"
    return True, (f"3 instances verified; size exponent {exponent:.4f} "
                  f"over lengths {lengths}")


def criterion_hardness_energies() -> tuple:
    q, seed, inp, out = hd.toy_crossing(20)
    ev = explore_evolution(q, q.parse_seed(" ".join(seed)))
    allowed = hd.occurring_pairs(q, ev)
    eps = 20.0 ** -4

    ghost = Marker(("q", "q"), np.diag([0.0, 1.0]))
    lam = hd.assemble(q, ev, markers=(ghost,), allowed=allowed).lambda_min()
    if abs(lam + 2.0) > 1e-9:
        return False, f"unmatched-marker history block at {lam}"

    lam_acc = hd.assemble_toy(hd.toy_accepting, 20).lambda_min()
    if lam_acc > -2.0 + eps:
        return False, f"accepting instance at {lam_acc}"
    lam_rej = hd.assemble_toy(hd.toy_rejecting, 20).lambda_min()
    beta = -2.0 + (1.0 - eps) / 20.0 ** 3
    if lam_rej < beta:
        return False, f"rejecting instance at {lam_rej} below {beta}"

    ev0 = explore_evolution(q, q.parse_seed(" ".join(["a"] * 22)))
    lam0 = hd.assemble(q, ev0, markers=(inp, out), allowed=allowed).lambda_min()
    if lam0 < 0.0:
        return False, f"zero-head block at {lam0}"

    ev1 = explore_evolution(q, q.parse_seed(" ".join(["h"] + ["a"] * 21)))
    asm1 = hd.assemble(q, ev1, markers=(inp, out), allowed=allowed)
    if asm1.lambda_min() < -1.0 + asm1.p - 1e-6:
        return False, f"non-bracketed block at {asm1.lambda_min()}"

    qw = wb.full_qts()
    evw = wb.explore_instance(wb.encode_instance(4))
    lam_w = hd.assemble(qw, evw, markers=wb.markers(),
                        allowed=wb.allowed_pairs()).lambda_min()
    if abs(lam_w + 2.0) > 1e-9:
        return False, f"smallest instance history block at {lam_w}"
    return True, (f"history -2, accepting {lam_acc - -2.0:.1e} above, "
                  f"rejecting margin {lam_rej - beta:.1e}")


def criterion_local_dimension() -> tuple:
    profile = wb.reduced_profile()
    ok = profile["quantum_symbols"] == 3 and profile["site_dim"] == 42
    return ok, (f"{profile['quantum_symbols']} quantum symbols, "
                f"site dimension {profile['site_dim']}")


CRITERIA = [
    ("path_gaps", criterion_path_gaps),
    ("fiedler_connectivity", criterion_fiedler_connectivity),
    ("kitaev_graph_bound", criterion_kitaev_graph_bound),
    ("ulg_semiclassical", criterion_ulg_semiclassical),
    ("thue_example", criterion_thue_example),
    ("even_system", criterion_even_system),
    ("qrm_differential", criterion_qrm_differential),
    ("wheelbarrow_structure", criterion_wheelbarrow_structure),
    ("hardness_energies", criterion_hardness_energies),
    ("local_dimension", criterion_local_dimension),
]


def run_all(emit=print) -> bool:
    """Run every criterion, emit one verdict line each, return overall."""
    all_ok = True
    for name, fn in CRITERIA:
        ok, detail = fn()
        all_ok = all_ok and ok
        emit(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
