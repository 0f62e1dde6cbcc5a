"""Dense and sparse-support pure states, reduced density matrices, entropies.

Basis ordering is fixed globally: qubit 1 is the most significant bit of the
computational-basis index, so ``|q1 q2 ... qn>`` has index ``int("q1q2...qn", 2)``.
Qubit arguments are 1-based throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_FLOOR = -1e-9
EIGEN_RESIDUAL_TOL = 1e-8

# automatic sparse form: many qubits, small support
SPARSE_MIN_QUBITS = 13
SPARSE_MAX_SUPPORT = 2**16

INDEX_DTYPE = np.uint64


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over ``n_qubits`` qubits.

    Dense form stores all ``2**n`` amplitudes with ``support=None``. Sparse form
    stores strictly increasing ``support`` indices (``uint64``, so up to 64
    qubits fit) with matching nonzero ``amplitudes``.
    """

    n_qubits: int
    amplitudes: np.ndarray
    support: np.ndarray | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if self.support is None:
            if amps.shape != (2**self.n_qubits,):
                raise ValueError(
                    f"dense state over {self.n_qubits} qubits needs {2**self.n_qubits} amplitudes, "
                    f"got shape {amps.shape}"
                )
        else:
            idx = np.asarray(self.support, dtype=INDEX_DTYPE)
            object.__setattr__(self, "support", idx)
            if idx.shape != amps.shape or idx.ndim != 1:
                raise ValueError("support and amplitudes must be 1-D and equally long")
            if idx.size and np.any(idx[1:] <= idx[:-1]):
                raise ValueError("support indices must be strictly increasing")
            if np.any(amps == 0):
                raise ValueError("sparse form must not store zero amplitudes")
            if self.n_qubits < 64 and idx.size and int(idx[-1]) >= 2**self.n_qubits:
                raise ValueError("support index out of range")
        dev = abs(float(np.vdot(amps, amps).real) - 1.0)
        if dev > NORM_TOL:
            raise ValueError(f"state is not normalized (|norm^2 - 1| = {dev:.3g})")

    @property
    def is_sparse(self) -> bool:
        return self.support is not None

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def to_dense(self) -> np.ndarray:
        if self.support is None:
            return self.amplitudes.copy()
        if self.n_qubits > 24:
            raise MemoryError(f"refusing to densify a {self.n_qubits}-qubit state")
        out = np.zeros(self.dim, dtype=complex)
        out[self.support.astype(np.int64)] = self.amplitudes
        return out

    def norm_deviation(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)

    @classmethod
    def from_dense(cls, amplitudes, normalize: bool = False) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(amps.size)))
        if 2**n != amps.size:
            raise ValueError(f"length {amps.size} is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def from_support(cls, n_qubits: int, support, amplitudes, normalize: bool = False) -> "PureState":
        """Build a state from (index, amplitude) pairs, choosing dense or sparse form.

        Sparse form is used when ``n_qubits >= SPARSE_MIN_QUBITS`` and the support is
        at most ``SPARSE_MAX_SUPPORT`` long; zero amplitudes are dropped.
        """
        idx = np.asarray(support, dtype=INDEX_DTYPE).ravel()
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        order = np.argsort(idx, kind="stable")
        idx, amps = idx[order], amps[order]
        if idx.size > 1 and np.any(idx[1:] == idx[:-1]):
            raise ValueError("duplicate support index")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        keep = amps != 0
        idx, amps = idx[keep], amps[keep]
        if n_qubits >= SPARSE_MIN_QUBITS and idx.size <= SPARSE_MAX_SUPPORT:
            return cls(n_qubits, amps, idx)
        dense = np.zeros(2**n_qubits, dtype=complex)
        dense[idx.astype(np.int64)] = amps
        return cls(n_qubits, dense)


def basis_state(bits: str) -> PureState:
    """Computational basis state from a bit string, e.g. ``basis_state("01")``."""
    n = len(bits)
    return PureState.from_support(n, [int(bits, 2)], [1.0])


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product ``a (x) b``; ``a`` supplies the more significant qubits."""
    n = a.n_qubits + b.n_qubits
    if not a.is_sparse and not b.is_sparse:
        return PureState(n, np.kron(a.amplitudes, b.amplitudes))
    ia, aa = _support_of(a)
    ib, ab = _support_of(b)
    idx = (ia[:, None] << INDEX_DTYPE(b.n_qubits)) | ib[None, :]
    amps = aa[:, None] * ab[None, :]
    return PureState.from_support(n, idx.ravel(), amps.ravel())


def _support_of(state: PureState) -> tuple[np.ndarray, np.ndarray]:
    if state.is_sparse:
        return state.support, state.amplitudes
    nz = np.flatnonzero(state.amplitudes)
    return nz.astype(INDEX_DTYPE), state.amplitudes[nz]


def _check_qubit(n_qubits: int, i: int) -> None:
    if not 1 <= i <= n_qubits:
        raise IndexError(f"qubit index {i} out of range 1..{n_qubits}")


def reduce_to_qubit(state: PureState, i: int) -> np.ndarray:
    """2x2 reduced density matrix of qubit ``i`` (1-based)."""
    n = state.n_qubits
    _check_qubit(n, i)
    if not state.is_sparse:
        psi = state.amplitudes.reshape(2 ** (i - 1), 2, 2 ** (n - i))
        return np.einsum("aib,ajb->ij", psi, psi.conj())
    idx, amps = state.support, state.amplitudes
    mask = INDEX_DTYPE(1) << INDEX_DTYPE(n - i)
    high = (idx & mask) != 0
    rho = np.zeros((2, 2), dtype=complex)
    rho[1, 1] = np.sum(np.abs(amps[high]) ** 2)
    rho[0, 0] = np.sum(np.abs(amps[~high]) ** 2)
    # coherence <0|rho|1> pairs index j (bit clear) with j | mask (bit set)
    lo_idx, lo_amp = idx[~high], amps[~high]
    partners = lo_idx | mask
    pos = np.searchsorted(idx, partners)
    pos_c = np.minimum(pos, idx.size - 1)
    hit = idx[pos_c] == partners
    rho[0, 1] = np.sum(lo_amp[hit] * amps[pos_c[hit]].conj())
    rho[1, 0] = np.conj(rho[0, 1])
    return rho


def qubit_marginals(batch: np.ndarray) -> np.ndarray:
    """Per-qubit reduced matrices for a batch of dense states.

    ``batch`` has shape ``(M, 2**n)``; returns ``(M, n, 2, 2)``.
    """
    batch = np.asarray(batch)
    m, dim = batch.shape
    n = dim.bit_length() - 1
    out = np.empty((m, n, 2, 2), dtype=complex)
    for i in range(1, n + 1):
        psi = batch.reshape(m, 2 ** (i - 1), 2, 2 ** (n - i))
        out[:, i - 1] = np.einsum("maib,majb->mij", psi, psi.conj())
    return out


def bit_matrix(n: int) -> np.ndarray:
    """``(2**n, n)`` 0/1 matrix whose entry ``[j, i-1]`` is the bit of qubit ``i`` in index ``j``."""
    j = np.arange(2**n)[:, None]
    return ((j >> (n - 1 - np.arange(n))[None, :]) & 1).astype(float)


def excitation_probabilities(probs: np.ndarray) -> np.ndarray:
    """``<E_i>`` for every qubit from computational-basis probabilities ``(M, 2**n)``."""
    probs = np.asarray(probs, dtype=float)
    n = probs.shape[-1].bit_length() - 1
    return probs @ bit_matrix(n)


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    dim = rho.shape[0]
    if dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    return rho


def hermitian_eigenvalues(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in descending order.

    Each eigenpair is checked against ``||rho v - lambda v|| <= EIGEN_RESIDUAL_TOL``;
    a violation raises ``np.linalg.LinAlgError``.
    """
    rho = np.asarray(rho, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(rho)
    resid = np.linalg.norm(rho @ vecs - vecs * vals, axis=0)
    if np.any(resid > EIGEN_RESIDUAL_TOL):
        raise np.linalg.LinAlgError(f"eigen-decomposition residual {resid.max():.3g} too large")
    return vals[::-1].copy()


def shannon_entropy(probs, axis: int = -1) -> np.ndarray | float:
    """Base-2 Shannon entropy with ``0 log 0 = 0``; works along ``axis`` of a batch."""
    p = np.asarray(probs, dtype=float)
    p = np.where(p > 0.0, p, 0.0)
    logs = np.log2(np.where(p > 0.0, p, 1.0))
    return -np.sum(p * logs, axis=axis)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """``-Tr rho log2 rho`` in bits."""
    rho = check_density_matrix(rho)
    lam = hermitian_eigenvalues(rho)
    if lam[-1] < EIGEN_FLOOR:
        raise ValueError(f"density matrix has negative eigenvalue {lam[-1]:.3g}")
    lam = np.clip(lam, 0.0, 1.0)
    s = float(shannon_entropy(lam))
    return min(max(s, 0.0), np.log2(rho.shape[0]))


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho) ** 2))
