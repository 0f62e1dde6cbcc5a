"""Entanglement and occupation functionals of pure states."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .statevec import PureState, purity, qubit_marginals, reduce_to_qubit, von_neumann_entropy

MEASURE_KINDS = ("entanglement_entropy_bits", "global_entanglement", "purity", "mean_excitation")


@dataclass(frozen=True)
class MeasureResult:
    value: float
    kind: str

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")

    def __float__(self):
        return float(self.value)


def entanglement_entropy(state: PureState) -> float:
    """Entropy (bits) of either qubit of a two-qubit pure state."""
    if state.n_qubits != 2:
        raise ValueError(f"entanglement entropy needs exactly 2 qubits, got {state.n_qubits}")
    s1 = von_neumann_entropy(reduce_to_qubit(state, 1))
    s2 = von_neumann_entropy(reduce_to_qubit(state, 2))
    assert abs(s1 - s2) < 1e-8, "marginal entropies of a pure bipartite state must agree"
    return s1


def qubit_purity(state: PureState, i: int) -> float:
    return purity(reduce_to_qubit(state, i))


def mean_excitation(state: PureState, i: int) -> float:
    """``Tr(rho_i |1><1|)``."""
    return float(reduce_to_qubit(state, i)[1, 1].real)


def global_entanglement(state: PureState) -> float:
    """``Q = n - sum_i Tr rho_i**2``, ranging over ``[0, n/2]``."""
    n = state.n_qubits
    return float(n - sum(qubit_purity(state, i) for i in range(1, n + 1)))


def meyer_wallach(state: PureState) -> float:
    """Normalized variant ``(2/n) Q`` with maximum 1 for any qubit count."""
    return 2.0 * global_entanglement(state) / state.n_qubits


def global_entanglement_batch(batch: np.ndarray) -> np.ndarray:
    """``Q`` for every row of a dense batch ``(M, 2**n)``."""
    rho = qubit_marginals(batch)
    n = rho.shape[1]
    purities = np.sum(np.abs(rho) ** 2, axis=(2, 3))
    return n - purities.sum(axis=1)


def dicke_support(n: int, N: int) -> np.ndarray:
    """Basis indices with exactly ``N`` ones, in the lexicographic order of the excited qubits.

    Order follows ``itertools.combinations(range(1, n+1), N)``: for ``n=4, N=2`` the
    entries are ``|1100>, |1010>, |1001>, |0110>, |0101>, |0011>``.
    """
    if not 1 <= N <= n - 1:
        raise ValueError(f"excitation number {N} outside 1..{n - 1}")
    out = []
    for qubits in combinations(range(1, n + 1), N):
        idx = 0
        for q in qubits:
            idx |= 1 << (n - q)
        out.append(idx)
    return np.array(out, dtype=np.uint64)


def dicke_Q_closed_form(coeffs, n: int, N: int) -> float:
    """Global entanglement of a generalized Dicke state from ``|c|**2`` alone.

    ``coeffs`` follow :func:`dicke_support` order. Supported: ``N=1`` for any ``n``,
    and ``N=2`` with ``n=4``.
    """
    p = np.abs(np.asarray(coeffs, dtype=complex)) ** 2
    if N == 1:
        if p.size != n:
            raise ValueError(f"N=1 needs {n} coefficients, got {p.size}")
        return float(2.0 * (1.0 - np.sum(p**2)))
    if N == 2 and n == 4:
        if p.size != 6:
            raise ValueError(f"n=4, N=2 needs 6 coefficients, got {p.size}")
        c12, c13, c14, c23, c24, c34 = p
        return float(2.0 * (1.0 - (c12 - c34) ** 2 - (c13 - c24) ** 2 - (c14 - c23) ** 2))
    raise ValueError(f"no closed form for n={n}, N={N}")


def dicke_Q_batch(coeffs: np.ndarray, n: int, N: int) -> np.ndarray:
    """``Q`` for a batch of generalized Dicke coefficient rows ``(M, C(n, N))``.

    Works for any ``N``: each single-qubit marginal is diagonal because flipping one
    qubit changes the excitation number, so ``Tr rho_i**2 = (1-e_i)**2 + e_i**2``.
    """
    p = np.abs(np.asarray(coeffs)) ** 2
    support = dicke_support(n, N)
    bits = np.array([[(int(j) >> (n - i)) & 1 for i in range(1, n + 1)] for j in support], dtype=float)
    e = p @ bits
    return n - np.sum((1.0 - e) ** 2 + e**2, axis=1)
