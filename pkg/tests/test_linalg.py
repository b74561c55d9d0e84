"""Operator toolbox: sparse Hermitian storage, eigensolving, tensors, gates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qthue import linalg
from qthue.linalg import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SWAP,
    DimensionCapExceeded,
    SparseHermitian,
    embed_on_registers,
    gate_by_name,
    gate_display_name,
    hermitian_eigs,
    is_projector,
    is_unitary,
    lowest_eigenvalues,
    rot,
    tensor,
)


def random_hermitian(rng, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


# --- SparseHermitian storage -------------------------------------------------

def test_add_folds_lower_triangle_by_conjugation():
    op = SparseHermitian(2)
    op.add(1, 0, 1j)
    assert op.entries == {(0, 1): -1j}
    m = op.to_dense()
    assert m[1, 0] == 1j and m[0, 1] == -1j


def test_add_cancels_to_empty():
    op = SparseHermitian(2)
    op.add(0, 1, 1.0)
    op.add(1, 0, -1.0)
    assert op.entries == {}


def test_diagonal_must_stay_real():
    op = SparseHermitian(2)
    with pytest.raises(ValueError):
        op.add(0, 0, 0.5j)


def test_entry_outside_dimension():
    op = SparseHermitian(2)
    with pytest.raises(IndexError):
        op.add(0, 2, 1.0)


def test_dense_round_trip_and_scipy_agree():
    rng = np.random.default_rng(7)
    m = random_hermitian(rng, 6)
    op = SparseHermitian.from_dense(m)
    assert np.allclose(op.to_dense(), m)
    assert np.allclose(op.to_scipy().toarray(), m)


def test_from_dense_rejects_non_hermitian():
    with pytest.raises(ValueError):
        SparseHermitian.from_dense(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        SparseHermitian.from_dense(np.ones((2, 3)))


def test_operator_sum_and_scaling():
    rng = np.random.default_rng(8)
    a, b = random_hermitian(rng, 5), random_hermitian(rng, 5)
    sa, sb = SparseHermitian.from_dense(a), SparseHermitian.from_dense(b)
    assert np.allclose((sa + sb).to_dense(), a + b)
    assert np.allclose(sa.scaled(-2.5).to_dense(), -2.5 * a)
    with pytest.raises(ValueError):
        sa + SparseHermitian(4)


# --- Eigensolver -------------------------------------------------------------

def test_single_edge_laplacian_spectrum():
    vals = hermitian_eigs(np.array([[1.0, -1.0], [-1.0, 1.0]])).eigenvalues
    assert vals == pytest.approx([0.0, 2.0], abs=1e-12)


def test_triangle_laplacian_spectrum():
    m = 2.0 * np.eye(3) - (np.ones((3, 3)) - np.eye(3))
    vals = hermitian_eigs(m).eigenvalues
    assert vals == pytest.approx([0.0, 3.0, 3.0], abs=1e-12)


def test_identity_spectrum():
    vals = hermitian_eigs(np.eye(5)).eigenvalues
    assert vals == pytest.approx([1.0] * 5)


def test_dimension_cap_refused():
    with pytest.raises(DimensionCapExceeded):
        hermitian_eigs(np.eye(9), dim_cap=8)


def test_non_hermitian_refused():
    with pytest.raises(ValueError):
        hermitian_eigs(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigenpairs_trace_orthonormality_residual():
    # sum of eigenvalues vs trace, Gram matrix vs identity, residual norm
    rng = np.random.default_rng(11)
    for dim in (1, 2, 3, 8, 17, 33, 64):
        m = random_hermitian(rng, dim)
        spec = hermitian_eigs(m)
        assert np.all(np.diff(spec.eigenvalues) >= 0)
        assert np.sum(spec.eigenvalues) == pytest.approx(np.trace(m).real, abs=1e-8)
        gram = spec.eigenvectors.conj().T @ spec.eigenvectors
        assert np.max(np.abs(gram - np.eye(dim))) <= 1e-8
        assert spec.residual_norm <= 1e-8


def test_lowest_eigenvalues_lanczos_matches_closed_form():
    length = 600
    op = SparseHermitian(length)
    for i in range(length - 1):
        op.add(i, i, 1.0)
        op.add(i + 1, i + 1, 1.0)
        op.add(i, i + 1, -1.0)
    got = lowest_eigenvalues(op, 3)
    want = [2.0 * (1.0 - np.cos(np.pi * k / length)) for k in range(3)]
    assert got == pytest.approx(want, abs=1e-8)


# --- Tensor products ---------------------------------------------------------

def test_tensor_examples():
    assert np.array_equal(tensor(np.eye(1), PAULI_X), PAULI_X)
    assert tensor(PAULI_X, np.eye(2))[0, 2] == 1
    assert np.array_equal(np.diag(tensor(PAULI_Z, PAULI_Z)).real, [1, -1, -1, 1])


complex_entries = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).map(
    lambda t: complex(*t)
)
small_matrix = st.lists(
    st.lists(complex_entries, min_size=2, max_size=2), min_size=2, max_size=2
).map(np.array)


@settings(max_examples=50, deadline=None)
@given(small_matrix, small_matrix, small_matrix)
def test_tensor_associative_exactly(a, b, c):
    assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


# --- Predicates --------------------------------------------------------------

def test_is_unitary():
    assert is_unitary(PAULI_X)
    assert is_unitary(rot(np.pi / 3))
    assert not is_unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert not is_unitary(np.ones((2, 3)))


def test_is_projector():
    assert is_projector(np.diag([0.0, 1.0]))
    assert is_projector(np.full((2, 2), 0.5))
    assert not is_projector(PAULI_X)
    assert not is_projector(np.array([[0.0, 1.0], [0.0, 0.0]]))


# --- Register embedding ------------------------------------------------------

def test_embed_single_qubit_gate():
    assert np.array_equal(embed_on_registers(PAULI_X, [0], 2), tensor(PAULI_X, np.eye(2)))
    assert np.array_equal(embed_on_registers(PAULI_X, [1], 2), tensor(np.eye(2), PAULI_X))


def test_embed_respects_register_order():
    # swap on (2, 0) of three qubits: basis |b0 b1 b2> goes to |b2 b1 b0>
    full = embed_on_registers(SWAP, [2, 0], 3)
    for b in range(8):
        b0, b1, b2 = (b >> 2) & 1, (b >> 1) & 1, b & 1
        target = (b2 << 2) | (b1 << 1) | b0
        assert full[target, b] == 1
    assert is_unitary(full)


def test_embed_rejects_bad_registers():
    with pytest.raises(ValueError):
        embed_on_registers(PAULI_X, [0, 1], 2)
    with pytest.raises(ValueError):
        embed_on_registers(SWAP, [0, 0], 2)
    with pytest.raises(IndexError):
        embed_on_registers(PAULI_X, [2], 2)


# --- Gate registry -----------------------------------------------------------

def test_rotation_convention():
    r = rot(np.pi / 2)
    assert np.allclose(r @ np.array([1.0, 0.0]), [0.0, -1.0])
    assert np.allclose(r @ np.array([0.0, 1.0]), [1.0, 0.0])


def test_gate_by_name():
    assert np.array_equal(gate_by_name("x"), PAULI_X)
    assert np.array_equal(gate_by_name("SWAP"), SWAP)
    assert np.allclose(gate_by_name("rot(0.5)"), rot(0.5))
    cr = gate_by_name("crot(0.3)")
    assert np.array_equal(cr[:2, :2], np.eye(2))
    assert np.allclose(cr[2:, 2:], rot(0.3))
    with pytest.raises(KeyError):
        gate_by_name("hadamard")


@pytest.mark.parametrize(
    "gate",
    [PAULI_X, PAULI_Y, PAULI_Z, SWAP, rot(0.7), gate_by_name("crot(-1.2)")],
    ids=["x", "y", "z", "swap", "rot", "crot"],
)
def test_display_name_round_trips(gate):
    name = gate_display_name(gate)
    assert name != "U"
    assert np.allclose(gate_by_name(name), gate, atol=1e-6)


def test_display_name_falls_back_to_generic():
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    assert gate_display_name(h) == "U"
