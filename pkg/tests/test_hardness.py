"""Energy structure of the assembled chain operator: completeness at -2,
soundness floors per block class, and the promise gap of the toy system."""

import numpy as np
import pytest

from qthue import hardness as hd
from qthue import wheelbarrow as wb
from qthue.linalg import hermitian_eigs
from qthue.qts import EvolutionGraph, Marker, explore_evolution


INTERIOR = 20
EPS = INTERIOR ** -4


def toy_block(angle: float = 0.0):
    q, seed, inp, out = hd.toy_crossing(INTERIOR, angle)
    ev = explore_evolution(q, q.parse_seed(" ".join(seed)))
    return q, ev, inp, out


def test_bracket_local_terms():
    q, *_ = toy_block()
    one, two = hd.bracket_boundary_term(q)
    assert one == {"|": -1.0}
    assert two[("|", "a")] == 0.5 and two[("a", "|")] == 0.5
    assert ("a", "h") not in two and ("|", "|") not in two


def test_bracket_score_examples():
    q, *_ = toy_block()
    assert hd.bracket_score(q, "| a a a |") == -1.0
    assert hd.bracket_score(q, "a a a a") == 0.0
    # one interior bracket nets to zero
    assert hd.bracket_score(q, "a a | a a") == pytest.approx(0.0)
    assert hd.bracket_score(q, "| a a a a") == -0.5


def test_head_bonus():
    q, *_ = toy_block()
    assert hd.head_bonus(q, "| h a a |") == -1.0
    assert hd.head_bonus(q, "a a a") == 0.0
    assert hd.head_bonus(q, "h a h") == -2.0


def test_assemble_rejects_bad_input():
    q, ev, inp, out = toy_block()
    with pytest.raises(ValueError, match="below the chain length"):
        hd.assemble(q, ev, p=2.0)
    capped = EvolutionGraph(q, ev.seed, ev.strings, ev.edges, capped=True)
    with pytest.raises(ValueError, match="capped"):
        hd.assemble(q, capped)


def test_history_block_no_marker_match():
    q, ev, *_ = toy_block()
    ghost = Marker(("q", "q"), np.diag([0.0, 1.0]))
    asm = hd.assemble(q, ev, markers=(ghost,),
                      allowed=hd.occurring_pairs(q, ev))
    assert asm.classify() == "history"
    assert asm.lambda_min() == pytest.approx(-2.0, abs=1e-9)
    # ground space is exactly the kinetic kernel
    spec = hermitian_eigs(asm.matrix)
    ground = spec.eigenvalues < -2.0 + 1e-9
    assert int(ground.sum()) == asm.register_dim


def test_term_decomposition():
    q, ev, inp, out = toy_block(angle=0.3)
    asm = hd.assemble(q, ev, markers=(inp, out),
                      allowed=hd.occurring_pairs(q, ev))
    total = sum(asm.terms.values())
    assert np.max(np.abs(total - asm.matrix)) <= 1e-12
    # every term except the kinetic one is diagonal in the string index
    r = asm.register_dim
    for name, term in asm.terms.items():
        if name == "kinetic":
            continue
        for i in range(len(ev.strings)):
            for j in range(len(ev.strings)):
                if i != j:
                    block = term[i * r:(i + 1) * r, j * r:(j + 1) * r]
                    assert not block.any(), name


def test_penalty_terms_psd_parts():
    q, ev, inp, out = toy_block(angle=0.7)
    asm = hd.assemble(q, ev, markers=(inp, out),
                      allowed=hd.occurring_pairs(q, ev))
    pen = asm.penalties
    assert (pen.illegal_pair_penalty >= 0).all()
    w = np.linalg.eigvalsh(pen.in_out_penalty)
    assert w.min() >= -1e-12


def test_completeness_energy():
    q, ev, inp, out = toy_block(angle=np.pi / 2)
    asm = hd.assemble(q, ev, markers=(inp, out),
                      allowed=hd.occurring_pairs(q, ev))
    from qthue.ulg import ground_space_history_states
    for psi in ground_space_history_states(asm.graph):
        e = hd.completeness_energy(asm, psi)
        markers = psi.conj() @ asm.terms["markers"] @ psi
        assert e == pytest.approx(-2.0 + np.real(markers), abs=1e-9)
    with pytest.raises(ValueError, match="not in the block"):
        hd.completeness_energy(asm, np.ones(3))
    # least history energy equals -2 + lambda_min(decide operator)/M
    assert hd.history_energy(asm) == pytest.approx(-2.0 + 1.0 / INTERIOR,
                                                   abs=1e-9)


def test_accepting_instance():
    asm = hd.assemble_toy(hd.toy_accepting, INTERIOR)
    lam = asm.lambda_min()
    assert lam <= -2.0 + EPS
    assert lam >= -2.0 - 1e-9


def test_rejecting_instance():
    asm = hd.assemble_toy(hd.toy_rejecting, INTERIOR)
    beta = -2.0 + (1.0 - EPS) / INTERIOR ** 3
    lam = asm.lambda_min()
    geom = hd.rejecting_bound(asm)
    assert geom >= beta
    assert lam >= geom - 1e-9


def test_promise_gap_report():
    alpha, beta, gap = hd.promise_gap_report(INTERIOR)
    assert alpha == pytest.approx(-2.0 + EPS)
    assert beta == pytest.approx(-2.0 + (1.0 - EPS) / INTERIOR ** 3)
    assert gap == pytest.approx(beta - alpha)
    assert gap >= 0.25 / INTERIOR ** 3


@pytest.mark.parametrize("m", [2, 3, 5, 10, 40])
def test_gap_positive_for_all_sizes(m):
    eps = m ** -4
    assert (1.0 - eps) / m ** 3 - eps > 0


def test_zero_head_block():
    q, _, inp, out = toy_block()
    allowed = hd.occurring_pairs(q, toy_block()[1])
    ev = explore_evolution(q, q.parse_seed(" ".join(["a"] * 22)))
    asm = hd.assemble(q, ev, markers=(inp, out), allowed=allowed)
    assert asm.classify() == "zero_head"
    assert asm.lambda_min() >= 0.0


def test_non_bracketed_block():
    q, _, inp, out = toy_block()
    allowed = hd.occurring_pairs(q, toy_block()[1])
    ev = explore_evolution(q, q.parse_seed(" ".join(["h"] + ["a"] * 21)))
    asm = hd.assemble(q, ev, markers=(inp, out), allowed=allowed)
    assert asm.classify() == "non_bracketed"
    p = asm.p
    assert asm.lambda_min() >= -1.0 + p - 1e-6
    assert asm.report()["bound"] == pytest.approx(-1.0 + p)


def test_illegal_pair_block():
    q, _, inp, out = toy_block()
    allowed = hd.occurring_pairs(q, toy_block()[1])
    seed = ("|", "h", "h") + ("a",) * 18 + ("|",)
    ev = explore_evolution(q, q.parse_seed(" ".join(seed)))
    asm = hd.assemble(q, ev, markers=(inp, out), allowed=allowed)
    rep = asm.report()
    assert rep["class"] == "illegal_pairs"
    assert rep["strings"] == 190
    assert rep["illegal_strings"] == 19
    assert rep["margin"] >= -1e-9


def test_slicing_monotone():
    q, _, inp, out = toy_block()
    allowed = hd.occurring_pairs(q, toy_block()[1])
    seed = ("|", "h", "h") + ("a",) * 18 + ("|",)
    ev = explore_evolution(q, q.parse_seed(" ".join(seed)))
    asm = hd.assemble(q, ev, markers=(inp, out), allowed=allowed)
    rep = hd.sliced_report(asm, 5)
    assert rep["monotone"]
    assert rep["lambda_min_sliced"] <= rep["lambda_min_full"] + 1e-9
    assert sum(p["vertices"] for p in rep["pieces"]) == 190
    # pieces cover the whole block and a single huge slice recovers it
    whole = hd.sliced_report(asm, 10 ** 6)
    assert len(whole["pieces"]) == 1
    assert whole["lambda_min_sliced"] == pytest.approx(
        rep["lambda_min_full"], abs=1e-9)


def test_slice_pieces_partition():
    q, ev, *_ = toy_block()
    pieces = hd.slice_pieces(ev, 4)
    flat = sorted(v for piece in pieces for v in piece)
    assert flat == list(range(len(ev.strings)))
    with pytest.raises(ValueError):
        hd.slice_pieces(ev, 0)


def test_rescaled():
    q, ev, inp, out = toy_block()
    asm = hd.assemble(q, ev, markers=(inp, out))
    m, c = hd.rescaled(asm)
    assert c == 4.0 * asm.p
    assert np.allclose(m * c, asm.matrix)


def test_wheelbarrow_smallest_block():
    q = wb.full_qts()
    ev = wb.explore_instance(wb.encode_instance(4))
    inp, out = wb.markers()
    asm = hd.assemble(q, ev, markers=(inp, out), allowed=wb.allowed_pairs())
    rep = asm.report()
    assert rep["class"] == "history"
    assert rep["strings"] == 566
    assert rep["register_dim"] == 1
    assert rep["heads"] == [1, 1]
    assert rep["illegal_strings"] == 0
    # no quantum cells at this length, so the markers never match
    assert rep["lambda_min"] == pytest.approx(-2.0, abs=1e-9)
