"""Hermitian operators, eigensolvers, and the small gate registry.

Everything downstream stores operators either as dense complex arrays or as
``SparseHermitian`` (dimension plus upper-triangle entries).  Eigenvalue work
is delegated to LAPACK via numpy, with a Lanczos path for large sparse
operators when only the extremal end of the spectrum is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

# Global numerical tolerances.  MATRIX_TOL guards exactness claims about
# matrix entries (unitarity, hermiticity, products); EIG_TOL guards
# eigenvalue/eigenvector residuals, which accumulate more error.
MATRIX_TOL = 1e-9
EIG_TOL = 1e-8

# Above this dimension a full dense diagonalization is refused; callers must
# restrict to a block or ask only for extremal eigenvalues.
DENSE_DIM_CAP = 8192


class DimensionCapExceeded(ValueError):
    """Raised when a full diagonalization is requested above the dense cap."""


@dataclass
class SparseHermitian:
    """Hermitian operator stored as dimension plus upper-triangle entries.

    ``entries`` maps (row, col) with row <= col to complex values.  Diagonal
    entries must be real; ``add`` folds lower-triangle writes into the upper
    triangle by conjugation so the stored object is Hermitian by construction.
    """

    dim: int
    entries: dict = field(default_factory=dict)

    def add(self, row: int, col: int, value: complex) -> None:
        if not (0 <= row < self.dim and 0 <= col < self.dim):
            raise IndexError(f"entry ({row}, {col}) outside dimension {self.dim}")
        if row > col:
            row, col = col, row
            value = np.conj(value)
        key = (row, col)
        new = self.entries.get(key, 0.0) + value
        if row == col:
            if abs(new.imag if isinstance(new, complex) else 0.0) > MATRIX_TOL:
                raise ValueError(f"diagonal entry ({row},{row}) has imaginary part {new}")
            new = complex(new).real
        if new == 0:
            self.entries.pop(key, None)
        else:
            self.entries[key] = new

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for (r, c), v in self.entries.items():
            m[r, c] = v
            if r != c:
                m[c, r] = np.conj(v)
        return m

    def to_scipy(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for (r, c), v in self.entries.items():
            rows.append(r)
            cols.append(c)
            vals.append(v)
            if r != c:
                rows.append(c)
                cols.append(r)
                vals.append(np.conj(v))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim), dtype=complex)

    def scaled(self, factor: float) -> "SparseHermitian":
        out = SparseHermitian(self.dim)
        for (r, c), v in self.entries.items():
            out.entries[(r, c)] = v * factor
        return out

    def __add__(self, other: "SparseHermitian") -> "SparseHermitian":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = SparseHermitian(self.dim, dict(self.entries))
        for (r, c), v in other.entries.items():
            new = out.entries.get((r, c), 0.0) + v
            if new == 0:
                out.entries.pop((r, c), None)
            else:
                out.entries[(r, c)] = new
        return out

    @staticmethod
    def from_dense(m: np.ndarray, tol: float = MATRIX_TOL) -> "SparseHermitian":
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("expected a square matrix")
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("matrix is not Hermitian within tolerance")
        out = SparseHermitian(m.shape[0])
        for r in range(m.shape[0]):
            if m[r, r].real != 0:
                out.entries[(r, r)] = m[r, r].real
            for c in range(r + 1, m.shape[1]):
                if m[r, c] != 0:
                    out.entries[(r, c)] = m[r, c]
        return out


@dataclass
class Spectrum:
    """Eigenvalues in ascending order, optional eigenvectors (as columns),
    and the worst-case residual norm max_i ||A v_i - lam_i v_i||_2."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    residual_norm: float = 0.0


def _as_dense(op) -> np.ndarray:
    if isinstance(op, SparseHermitian):
        return op.to_dense()
    return np.asarray(op, dtype=complex)


def hermitian_eigs(op, vectors: bool = True, dim_cap: int = DENSE_DIM_CAP) -> Spectrum:
    """Full spectrum of a Hermitian operator, ascending, with residual check.

    Refuses dimensions above ``dim_cap``; use ``lowest_eigenvalues`` there.
    """
    dim = op.dim if isinstance(op, SparseHermitian) else np.asarray(op).shape[0]
    if dim > dim_cap:
        raise DimensionCapExceeded(f"dimension {dim} exceeds dense cap {dim_cap}")
    m = _as_dense(op)
    if np.max(np.abs(m - m.conj().T)) > MATRIX_TOL * max(1.0, np.max(np.abs(m))):
        raise ValueError("operator is not Hermitian within tolerance")
    m = (m + m.conj().T) / 2
    if vectors:
        vals, vecs = np.linalg.eigh(m)
        resid = float(np.max(np.linalg.norm(m @ vecs - vecs * vals, axis=0))) if dim else 0.0
        return Spectrum(vals, vecs, resid)
    vals = np.linalg.eigvalsh(m)
    return Spectrum(vals, None, 0.0)


def lowest_eigenvalues(op, k: int = 1) -> np.ndarray:
    """The k smallest eigenvalues, ascending.  Uses Lanczos on large sparse
    operators and dense LAPACK otherwise."""
    dim = op.dim if isinstance(op, SparseHermitian) else np.asarray(op).shape[0]
    if k >= dim or dim <= 512 or not isinstance(op, SparseHermitian):
        vals = hermitian_eigs(op, vectors=False, dim_cap=max(dim, DENSE_DIM_CAP)).eigenvalues
        return vals[:k]
    mat = op.to_scipy()
    # sigma-less shift-invert is fragile near degenerate ground spaces, so
    # shift by a bound on the spectral radius and ask for largest magnitude.
    bound = spla.norm(mat, np.inf) + 1.0
    shifted = mat - bound * sp.identity(dim, dtype=complex, format="csr")
    vals = spla.eigsh(shifted, k=k, which="LM", return_eigenvectors=False, maxiter=5000)
    return np.sort(vals + bound)


def tensor(*ops) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for o in ops[1:]:
        out = np.kron(out, np.asarray(o, dtype=complex))
    return out


def is_unitary(m: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def is_projector(m: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if np.max(np.abs(m - m.conj().T)) > tol:
        return False
    return bool(np.max(np.abs(m @ m - m)) <= tol)


def embed_on_registers(gate: np.ndarray, regs: list[int], total: int, d: int = 2) -> np.ndarray:
    """Lift a gate acting on the listed register indices (in the gate's own
    factor order) to the full d^total space, identity elsewhere."""
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (d ** len(regs), d ** len(regs)):
        raise ValueError("gate dimension does not match register count")
    if len(set(regs)) != len(regs):
        raise ValueError("duplicate register index")
    if any(not 0 <= r < total for r in regs):
        raise IndexError("register index out of range")
    full = np.zeros((d ** total, d ** total), dtype=complex)
    tgate = gate.reshape((d,) * (2 * len(regs)))
    rest = [i for i in range(total) if i not in regs]
    for basis_in in np.ndindex(*([d] * total)):
        col = 0
        for b in basis_in:
            col = col * d + b
        sub_in = tuple(basis_in[r] for r in regs)
        for sub_out in np.ndindex(*([d] * len(regs))):
            amp = tgate[sub_out + sub_in]
            if amp == 0:
                continue
            out_state = list(basis_in)
            for r, b in zip(regs, sub_out):
                out_state[r] = b
            row = 0
            for b in out_state:
                row = row * d + b
            full[row, col] += amp
    return full


# ---------------------------------------------------------------------------
# Gate registry.  rot(theta) follows the row convention
# [[cos, sin], [-sin, cos]], so rot(pi/2) maps |0> to -|1> and |1> to |0>.

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
TOFFOLI = np.eye(8, dtype=complex)
TOFFOLI[[6, 7], :] = TOFFOLI[[7, 6], :]


def rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


NAMED_GATES = {
    "id": ID2,
    "x": PAULI_X,
    "y": PAULI_Y,
    "z": PAULI_Z,
    "swap": SWAP,
    "toffoli": TOFFOLI,
}


def gate_by_name(name: str) -> np.ndarray:
    """Resolve a registry gate name, including rot(<radians>)."""
    key = name.strip()
    low = key.lower()
    if low in NAMED_GATES:
        return NAMED_GATES[low].copy()
    if low.startswith("rot(") and low.endswith(")"):
        return rot(float(low[4:-1]))
    if low.startswith("crot(") and low.endswith(")"):
        g = np.eye(4, dtype=complex)
        g[2:, 2:] = rot(float(low[5:-1]))
        return g
    raise KeyError(f"unknown gate name: {name!r}")


def gate_display_name(u: np.ndarray, tol: float = MATRIX_TOL) -> str:
    """Best-effort display name for a unitary: a registry name, rot(theta)
    for real rotations, or the generic label "U"."""
    u = np.asarray(u, dtype=complex)
    if u.shape == (1, 1):
        return "id" if abs(u[0, 0] - 1) <= tol else "U"
    for name, g in NAMED_GATES.items():
        if g.shape == u.shape and np.max(np.abs(u - g)) <= tol:
            return "id" if name == "id" else name.upper() if len(name) == 1 else name
    if u.shape == (2, 2) and np.max(np.abs(u.imag)) <= tol:
        c, s = u[0, 0].real, u[0, 1].real
        if abs(u[1, 0].real + s) <= tol and abs(u[1, 1].real - c) <= tol:
            theta = math.atan2(s, c)
            if np.max(np.abs(u - rot(theta))) <= tol:
                return f"rot({theta:.6g})"
    if u.shape == (4, 4) and np.max(np.abs(u.imag)) <= tol:
        if np.max(np.abs(u[:2, :2] - np.eye(2))) <= tol and np.max(np.abs(u[:2, 2:])) <= tol \
                and np.max(np.abs(u[2:, :2])) <= tol:
            c, s = u[2, 2].real, u[2, 3].real
            theta = math.atan2(s, c)
            if np.max(np.abs(u[2:, 2:] - rot(theta))) <= tol:
                return f"crot({theta:.6g})"
    return "U"
