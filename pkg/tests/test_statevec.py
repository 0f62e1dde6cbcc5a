import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephase_lab.statevec import (
    PureState,
    basis_state,
    check_density_matrix,
    excitation_probabilities,
    hermitian_eigenvalues,
    qubit_marginals,
    reduce_to_qubit,
    shannon_entropy,
    tensor,
    von_neumann_entropy,
)


def random_vector(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@st.composite
def states(draw, min_qubits=1, max_qubits=4):
    n = draw(st.integers(min_qubits, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    return PureState(n, random_vector(np.random.default_rng(seed), 2**n))


def brute_partial_trace(psi, n, i):
    """Sum rho[j, k] over all index pairs that agree everywhere except qubit i."""
    rho = np.outer(psi, psi.conj())
    out = np.zeros((2, 2), dtype=complex)
    shift = n - i
    for j in range(2**n):
        for k in range(2**n):
            if (j ^ k) & ~(1 << shift) == 0:
                out[(j >> shift) & 1, (k >> shift) & 1] += rho[j, k]
    return out


def bisection_eigenvalues(h, tol=1e-13):
    """Roots of det(h - x I) on [-||h||, ||h||] by sign changes plus bisection."""
    bound = np.abs(h).sum() + 1.0

    def charpoly(x):
        return np.linalg.det(h - x * np.eye(h.shape[0])).real

    grid = np.linspace(-bound, bound, 20001)
    vals = np.array([charpoly(x) for x in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            lo, hi = a, b
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if charpoly(lo) * charpoly(mid) <= 0:
                    hi = mid
                else:
                    lo = mid
            roots.append(0.5 * (lo + hi))
    return np.sort(roots)[::-1]


class TestPureState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="normalized"):
            PureState(1, np.array([1.0, 1.0]))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            PureState(2, np.array([1.0, 0.0]))

    def test_sparse_round_trip(self):
        s = PureState.from_support(14, [3, 1], [0.6, 0.8j])
        assert s.is_sparse
        assert list(s.support) == [1, 3]
        dense = s.to_dense()
        assert dense[1] == 0.8j and dense[3] == 0.6

    def test_small_states_are_dense(self):
        assert not PureState.from_support(3, [0], [1.0]).is_sparse

    def test_sparse_rejects_unsorted(self):
        with pytest.raises(ValueError, match="increasing"):
            PureState(14, np.array([0.6, 0.8]), np.array([5, 2], dtype=np.uint64))

    def test_from_dense_normalize(self):
        s = PureState.from_dense([3.0, 4.0], normalize=True)
        assert np.allclose(s.amplitudes, [0.6, 0.8])


class TestTensor:
    def test_basis_product(self):
        out = tensor(basis_state("0"), basis_state("1"))
        assert np.allclose(out.amplitudes, [0, 1, 0, 0])

    def test_uniform(self):
        plus = PureState(1, np.array([1, 1]) / np.sqrt(2))
        assert np.allclose(tensor(plus, plus).amplitudes, 0.5)

    def test_pairwise_product_oracle(self):
        rng = np.random.default_rng(1)
        a, b = random_vector(rng, 2), random_vector(rng, 2)
        out = tensor(PureState(1, a), PureState(1, b)).amplitudes
        expected = [a[j] * b[k] for j in range(2) for k in range(2)]
        assert np.allclose(out, expected, atol=1e-15)

    def test_sparse_matches_dense(self):
        rng = np.random.default_rng(2)
        a = PureState.from_support(13, [5, 900], random_vector(rng, 2))
        b = PureState(1, random_vector(rng, 2))
        out = tensor(a, b)
        assert out.is_sparse
        assert np.allclose(out.to_dense(), np.kron(a.to_dense(), b.amplitudes))


class TestReduce:
    def test_product_marginal(self):
        assert np.allclose(reduce_to_qubit(basis_state("01"), 2), np.diag([0, 1]))

    def test_bell_marginal(self):
        bell = PureState(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
        assert np.allclose(reduce_to_qubit(bell, 1), np.eye(2) / 2)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(3)
        psi = random_vector(rng, 8)
        got = reduce_to_qubit(PureState(3, psi), 2)
        assert np.allclose(got, brute_partial_trace(psi, 3, 2), atol=1e-14)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            reduce_to_qubit(basis_state("00"), 3)

    def test_sparse_matches_dense(self):
        rng = np.random.default_rng(4)
        support = np.sort(rng.choice(2**14, size=40, replace=False))
        s = PureState.from_support(14, support, random_vector(rng, 40))
        dense = PureState(14, s.to_dense())
        for i in (1, 7, 14):
            assert np.allclose(reduce_to_qubit(s, i), reduce_to_qubit(dense, i), atol=1e-14)

    def test_batch_marginals(self):
        rng = np.random.default_rng(5)
        batch = np.array([random_vector(rng, 8) for _ in range(3)])
        m = qubit_marginals(batch)
        for row in range(3):
            for i in range(3):
                assert np.allclose(m[row, i], reduce_to_qubit(PureState(3, batch[row]), i + 1))

    @given(states())
    def test_marginal_is_density_matrix(self, state):
        for i in range(1, state.n_qubits + 1):
            check_density_matrix(reduce_to_qubit(state, i))


class TestEntropy:
    def test_pure(self):
        assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)

    def test_scalar_evaluation(self):
        lam = [0.8, 0.1, 0.1]
        expected = -sum(x * np.log2(x) for x in lam)
        got = von_neumann_entropy(np.diag([0.8, 0.1, 0.1, 0.0]))
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.9219, abs=1e-4)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            von_neumann_entropy(np.eye(2))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            von_neumann_entropy(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_shannon_zero_convention(self):
        assert shannon_entropy([1.0, 0.0]) == 0.0
        assert np.allclose(shannon_entropy(np.array([[0.5, 0.5], [1.0, 0.0]]), axis=1), [1.0, 0.0])

    @given(states(max_qubits=3))
    @settings(max_examples=50)
    def test_bounds(self, state):
        rho = reduce_to_qubit(state, 1)
        s = von_neumann_entropy(rho)
        assert 0.0 <= s <= 1.0


class TestEigenvalues:
    def test_identity(self):
        assert np.allclose(hermitian_eigenvalues(np.eye(2) / 2), [0.5, 0.5])

    def test_diag_descending(self):
        assert np.allclose(hermitian_eigenvalues(np.diag([0.2, 0.7])), [0.7, 0.2])

    def test_bisection_oracle(self):
        rng = np.random.default_rng(6)
        psi = random_vector(rng, 4)
        # a generic Hermitian matrix built from a pure state plus a random Hermitian part
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = np.outer(psi, psi.conj()) + 0.3 * (a + a.conj().T)
        assert np.allclose(hermitian_eigenvalues(h), bisection_eigenvalues(h), atol=1e-9)


def test_excitation_probabilities():
    probs = np.abs(np.array([[0.0, 0.6, 0.8, 0.0]])) ** 2
    # |01> has qubit 2 excited, |10> has qubit 1 excited
    assert np.allclose(excitation_probabilities(probs), [[0.64, 0.36]])


def test_bit_order_matches_kron():
    for bits in itertools.product("01", repeat=3):
        s = "".join(bits)
        assert np.argmax(np.abs(basis_state(s).amplitudes)) == int(s, 2)
