"""Unitary labelled graphs: simplicity, spectra, history states, bounds."""

import math

import numpy as np
import pytest

from qthue import ulg
from qthue.graphs import path_graph
from qthue.linalg import PAULI_X, PAULI_Y, PAULI_Z, hermitian_eigs, rot, tensor
from qthue.ulg import (
    NotSimpleError,
    Ulg,
    associated_hamiltonian,
    check_simple,
    diagonalization_residual,
    diagonalize,
    ground_space_history_states,
    penalized_ulg_bound,
)

I2 = np.eye(2, dtype=complex)


def identity_ulg(k: int, n: int = 2) -> Ulg:
    ids = [f"v{i}" for i in range(k)]
    return Ulg(n, ids, [(ids[i], ids[i + 1], np.eye(n)) for i in range(k - 1)])


def four_cycle(w_label) -> Ulg:
    edges = [
        ("a", "b", PAULI_X),
        ("b", "c", PAULI_Y),
        ("c", "d", w_label),
        ("d", "a", I2),
    ]
    return Ulg(2, list("abcd"), edges)


def test_constructor_checks():
    with pytest.raises(ValueError):
        Ulg(0)
    u = Ulg(2, ["a", "b"])
    with pytest.raises(ValueError):
        u.add_edge("a", "b", np.eye(3))
    with pytest.raises(ValueError):
        u.add_edge("a", "b", np.array([[1, 1], [0, 1]]))


def test_duplicate_edges_dedupe_or_conflict():
    u = Ulg(2, ["a", "b"], [("a", "b", PAULI_X)])
    u.add_edge("a", "b", PAULI_X)
    assert len(u.graph.edges) == 1 and not u.label_conflicts

    u.add_edge("b", "a", PAULI_X)  # adjoint of X is X: still the same rule
    assert not u.label_conflicts

    u.add_edge("a", "b", PAULI_Z)
    assert u.label_conflicts == [("a", "b")]
    assert not check_simple(u).simple


def test_reverse_label_is_adjoint():
    r = rot(0.4)
    u = Ulg(2, ["a", "b"], [("a", "b", r)])
    assert np.allclose(u.label("b", "a"), r.conj().T)


def test_all_identity_labels_are_simple():
    rep = check_simple(identity_ulg(5))
    assert rep.simple and rep.deviation <= 1e-12


def test_consistent_cycle_is_simple():
    # traversing a -> b -> c -> d -> a multiplies to (iZ) Y X = identity
    rep = check_simple(four_cycle(1j * PAULI_Z))
    assert rep.simple


def test_inconsistent_cycle_reports_witness():
    rep = check_simple(four_cycle(PAULI_Z))
    assert not rep.simple
    assert rep.deviation > 1e-9
    # the witness product is the full cycle holonomy Z Y X = -i 1
    assert rep.witness_cycle
    assert np.allclose(rep.witness_product, -1j * np.eye(2))


def test_global_phase_is_not_simple():
    ids = list("abc")
    u = Ulg(1, ids, [("a", "b", [[1]]), ("b", "c", [[1]]), ("a", "c", [[1j]])])
    assert not check_simple(u).simple


def test_associated_hamiltonian_single_edge_scalar():
    u = Ulg(1, ["a", "b"], [("a", "b", [[1]])])
    assert np.array_equal(
        associated_hamiltonian(u).to_dense().real, [[1, -1], [-1, 1]]
    )


def test_associated_hamiltonian_single_edge_qubit():
    u = Ulg(2, ["a", "b"], [("a", "b", PAULI_X)])
    h = associated_hamiltonian(u).to_dense()
    assert np.array_equal(h[:2, :2], I2)
    assert np.array_equal(h[2:, 2:], I2)
    assert np.array_equal(h[:2, 2:], -PAULI_X)
    assert hermitian_eigs(h).eigenvalues == pytest.approx([0, 0, 2, 2], abs=1e-12)


def test_rule_inversion_leaves_hamiltonian_entry_exact():
    r = rot(0.4)
    fwd = Ulg(2, ["a", "b"], [("a", "b", r)])
    rev = Ulg(2, ["a", "b"], [("b", "a", r.conj().T)])
    assert np.array_equal(
        associated_hamiltonian(fwd).to_dense(), associated_hamiltonian(rev).to_dense()
    )


def test_simple_spectrum_is_repeated_laplacian():
    ids = ["v0", "v1", "v2"]
    u = Ulg(2, ids, [("v0", "v1", rot(0.3)), ("v1", "v2", rot(1.1))])
    got = hermitian_eigs(associated_hamiltonian(u)).eigenvalues
    lap = hermitian_eigs(
        np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]], dtype=float)
    ).eigenvalues
    assert got == pytest.approx(np.repeat(lap, 2), abs=1e-8)


def test_diagonalize_identity_labels():
    diag = diagonalize(identity_ulg(3))
    assert np.array_equal(diag.w, np.eye(6))
    assert diag.expansion_order == ["v0", "v1", "v2"]


def test_diagonalize_single_edge():
    u = Ulg(2, ["a", "b"], [("a", "b", PAULI_X)])
    diag = diagonalize(u)
    want = np.zeros((4, 4), dtype=complex)
    want[:2, :2] = I2
    want[2:, 2:] = PAULI_X
    assert np.array_equal(diag.w, want)
    target = tensor([[1, -1], [-1, 1]], I2)
    h = associated_hamiltonian(u).to_dense()
    assert np.allclose(diag.w.conj().T @ h @ diag.w, target)


def test_diagonalize_consistent_four_cycle():
    r1, r2 = rot(0.3), rot(-0.9)
    u = Ulg(
        2,
        list("abcd"),
        [
            ("a", "b", r1),
            ("b", "c", r2),
            ("c", "d", (r2 @ r1).conj().T),
            ("d", "a", I2),
        ],
    )
    assert diagonalization_residual(u) <= 1e-9


def test_diagonalize_rejects_non_simple():
    with pytest.raises(NotSimpleError):
        diagonalize(four_cycle(PAULI_Z))
    with pytest.raises(NotSimpleError):
        ground_space_history_states(four_cycle(PAULI_Z))


def test_history_state_single_edge():
    u = Ulg(2, ["a", "b"], [("a", "b", PAULI_X)])
    vecs = ground_space_history_states(u)
    assert len(vecs) == 2
    want = np.array([1, 0, 0, 1]) / math.sqrt(2)  # |a,0> + |b,1>
    assert vecs[0] == pytest.approx(want)


def test_history_states_identity_path():
    vecs = ground_space_history_states(identity_ulg(3))
    uniform = np.ones(3) / math.sqrt(3)
    for j, v in enumerate(vecs):
        assert v == pytest.approx(tensor(uniform.reshape(3, 1), np.eye(2)[:, [j]]).ravel())


def test_kernel_dimension_counts_components_times_registers():
    u = Ulg(
        2,
        list("abcd"),
        [("a", "b", rot(0.2)), ("c", "d", PAULI_Y)],
    )
    vecs = ground_space_history_states(u)
    assert len(vecs) == 2 * 2
    h = associated_hamiltonian(u).to_dense()
    gram = np.array([[np.vdot(x, y) for y in vecs] for x in vecs])
    assert np.allclose(gram, np.eye(4), atol=1e-8)
    for v in vecs:
        assert np.linalg.norm(h @ v) <= 1e-8
    vals = hermitian_eigs(h).eigenvalues
    assert sum(x < 1e-9 for x in vals) == 4


def test_penalized_bound_aligned_kernels_vacuous():
    proj = np.diag([0.0, 1.0])
    u = Ulg(2, ["a", "b"], [("a", "b", I2)])
    rep = penalized_ulg_bound(u, {"a": proj, "b": proj})
    assert rep["mu"] == pytest.approx(0.0)
    assert rep["lower_bound"] == pytest.approx(0.0)
    assert rep["lambda_min"] >= -1e-12


def test_penalized_bound_crossed_kernels():
    proj = np.diag([0.0, 1.0])
    u = Ulg(2, ["a", "b"], [("a", "b", PAULI_X)])
    rep = penalized_ulg_bound(u, {"a": proj, "b": proj})
    assert rep["mu"] == pytest.approx(1.0)
    assert rep["lambda_min"] == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-9)
    assert rep["lambda_min"] >= rep["lower_bound"] - 1e-9


def test_penalized_bound_single_vertex_matches_graph_lemma():
    ids = ["v0", "v1", "v2"]
    u = Ulg(1, ids, [("v0", "v1", [[1]]), ("v1", "v2", [[1]])])
    rep = penalized_ulg_bound(u, {"v2": [[1.0]]})
    assert rep["lambda_min"] == pytest.approx(0.19806226419516165, abs=1e-9)
    assert rep["lower_bound"] == pytest.approx(1.0 - math.sqrt(2.0 / 3.0), abs=1e-12)


def test_penalized_bound_input_checks():
    u = Ulg(2, ["a", "b"], [("a", "b", I2)])
    with pytest.raises(ValueError):
        penalized_ulg_bound(u, {})
    with pytest.raises(ValueError):
        penalized_ulg_bound(u, {"a": PAULI_X})  # unitary, not a projector
    disconnected = Ulg(2, list("abc"), [("a", "b", I2)])
    with pytest.raises(ValueError):
        penalized_ulg_bound(disconnected, {"a": np.diag([0.0, 1.0])})


def test_json_round_trip():
    u = Ulg(2, ["a", "b", "c"], [("a", "b", rot(0.5)), ("b", "c", PAULI_Y)])
    back = ulg.from_json(ulg.to_json(u))
    assert back.vertex_dim == 2
    assert back.graph.vertex_ids == ["a", "b", "c"]
    for a, b in u.edge_list:
        assert np.allclose(back.label(a, b), u.label(a, b))


def test_dot_labels_registry_gates():
    u = Ulg(2, ["a", "b"], [("a", "b", PAULI_X)])
    text = ulg.to_dot(u)
    assert 'label="X"' in text
