"""Seeded generators for every random-state ensemble.

Haar states use the Hurwitz angle parametrization: for dimension ``l`` draw
``xi_k ~ U[0,1)`` and ``phi_k ~ U[0,2pi)`` for ``k = 1..l-1``, set
``sin(theta_k) = xi_k**(1/(2k))`` and build the amplitudes as nested products of
sines capped by a cosine. Batch functions return dense arrays of shape
``(count, 2**n)``; the single-draw functions wrap one row as a ``PureState``.

Randomness comes from ``numpy.random.Philox`` streams keyed by ``(seed, stream)``,
see :func:`make_rng`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .measures import dicke_support
from .statevec import PureState, excitation_probabilities

MAX_ATTEMPTS = 10**7
PIN_TOL = 1e-14


class InfeasibleEnsembleError(RuntimeError):
    """Rejection sampling hit its attempt limit."""

    def __init__(self, message: str, attempts: int, accepted: int):
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for sample stream ``stream`` of run ``seed``.

    Streams are independent and addressable, so chunk ``c`` of a run always sees
    the same numbers no matter which worker processes it.
    """
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


# -- Haar ---------------------------------------------------------------------


def hurwitz_probabilities(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Squared moduli ``|c_m|**2`` of ``count`` Hurwitz vectors in ``C**dim``.

    Only the ``xi_k`` are drawn here; :func:`attach_phases` supplies the ``phi_k``
    afterwards, so rejection samplers can skip phases for rejected draws.
    """
    if dim == 1:
        return np.ones((count, 1))
    xi = rng.random((count, dim - 1))
    k = np.arange(1, dim, dtype=float)
    with np.errstate(divide="ignore"):
        log_xi = np.log(xi)
    # reversed so column m refers to theta_{dim-1-m}
    sin2 = np.exp(log_xi / k)[:, ::-1]
    cos2 = -np.expm1(log_xi / k)[:, ::-1]
    probs = np.empty((count, dim))
    probs[:, 0] = 1.0
    np.cumprod(sin2, axis=1, out=probs[:, 1:])
    probs[:, : dim - 1] *= cos2
    return probs


def attach_phases(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Amplitudes ``sqrt(p_m) exp(i phi)``; component 0 stays real."""
    count, dim = probs.shape
    amps = np.sqrt(probs).astype(complex)
    if dim > 1:
        phi = rng.random((count, dim - 1)) * (2.0 * np.pi)
        amps[:, 1:] *= np.exp(1j * phi[:, ::-1])
    return amps


def hurwitz_batch(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-random unit vectors in ``C**dim`` with a real first component."""
    return attach_phases(hurwitz_probabilities(dim, count, rng), rng)


def haar_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    return hurwitz_batch(2**n, count, rng)


def haar_state(n: int, rng: np.random.Generator) -> PureState:
    if n < 1:
        raise ValueError("n must be >= 1")
    return PureState(n, haar_batch(n, 1, rng)[0])


def random_su2_batch(count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar SU(2) matrices ``[[a, -b*], [b, a*]]`` of shape ``(count, 2, 2)``.

    ``(a, b)`` is the one-qubit Hurwitz vector with an extra uniform phase on ``a``.
    """
    col = hurwitz_batch(2, count, rng)
    col[:, 0] *= np.exp(2j * np.pi * rng.random(count))
    a, b = col[:, 0], col[:, 1]
    out = np.empty((count, 2, 2), dtype=complex)
    out[:, 0, 0] = a
    out[:, 1, 0] = b
    out[:, 0, 1] = -b.conj()
    out[:, 1, 1] = a.conj()
    return out


def random_su2(rng: np.random.Generator) -> np.ndarray:
    return random_su2_batch(1, rng)[0]


# -- products -----------------------------------------------------------------


def kron_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise Kronecker product of two batches of vectors."""
    return (a[:, :, None] * b[:, None, :]).reshape(a.shape[0], -1)


def separable_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Products ``U_1|0> (x) ... (x) U_n|0>`` with independent Haar ``U_i``."""
    cols = random_su2_batch(count * n, rng)[:, :, 0].reshape(count, n, 2)
    out = cols[:, 0]
    for i in range(1, n):
        out = kron_rows(out, cols[:, i])
    return out


def separable_state(n: int, rng: np.random.Generator) -> PureState:
    return PureState(n, separable_batch(n, 1, rng)[0])


def cluster_batch(partition, count: int, rng: np.random.Generator) -> np.ndarray:
    """Products of independent Haar states on consecutive qubit blocks of the given sizes."""
    sizes = [int(s) for s in partition]
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError(f"invalid partition {partition!r}")
    out = haar_batch(sizes[0], count, rng)
    for s in sizes[1:]:
        out = kron_rows(out, haar_batch(s, count, rng))
    return out


def cluster_state(partition, rng: np.random.Generator, n_qubits: int | None = None) -> PureState:
    n = sum(int(s) for s in partition)
    if n_qubits is not None and n != n_qubits:
        raise ValueError(f"partition {list(partition)} sums to {n}, expected {n_qubits}")
    return PureState(n, cluster_batch(partition, 1, rng)[0])


# -- energy-constrained -------------------------------------------------------


def default_delta(n: int) -> float:
    return 0.01 if n <= 2 else 0.02


def energy_mask(batch: np.ndarray, E: float, delta: float, probabilities: bool = False) -> np.ndarray:
    """Rows whose every qubit has ``|<E_i> - E| <= delta``.

    ``batch`` holds amplitudes, or ``|amplitude|**2`` when ``probabilities`` is set.
    """
    probs = batch if probabilities else np.abs(batch) ** 2
    exc = excitation_probabilities(probs)
    return np.all(np.abs(exc - E) <= delta, axis=1)


def pin_excitations(batch: np.ndarray, E: float, max_iter: int = 100_000) -> np.ndarray:
    """Rescale amplitude magnitudes until every qubit has ``<E_i> = E`` exactly.

    Iterative proportional fitting on the binary marginals of ``|psi|**2``; phases are
    untouched. Meant for nearly-constrained inputs such as rejection-sampled states.
    Convergence is slow for rows with nearly empty basis states, so only rows still
    off target keep iterating. Raises ``RuntimeError`` if some row misses ``PIN_TOL``.
    """
    out = np.array(batch, dtype=complex)
    m, dim = out.shape
    n = dim.bit_length() - 1
    if not 0.0 < E < 1.0:
        raise ValueError("pinning needs 0 < E < 1")
    active = np.arange(m)
    for _ in range(max_iter):
        exc = excitation_probabilities(np.abs(out[active]) ** 2)
        active = active[np.max(np.abs(exc - E), axis=1) >= PIN_TOL]
        if active.size == 0:
            break
        rows = out[active]
        for i in range(n):
            e = excitation_probabilities(np.abs(rows) ** 2)[:, i]
            view = rows.reshape(active.size, 2**i, 2, 2 ** (n - 1 - i))
            view[:, :, 0, :] *= np.sqrt((1.0 - E) / (1.0 - e))[:, None, None]
            view[:, :, 1, :] *= np.sqrt(E / e)[:, None, None]
        out[active] = rows
    else:
        raise RuntimeError(f"{active.size} states did not reach <E_i> = {E} within {max_iter} sweeps")
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out


class EnergyConstrainedSampler:
    """Rejection sampler for Haar states with all ``<E_i>`` within ``delta`` of ``E``.

    Attempt and acceptance counts accumulate across calls.
    """

    def __init__(self, n: int, E: float, delta: float | None = None, max_attempts: int = MAX_ATTEMPTS,
                 chunk: int = 4096):
        if not 0.0 <= E <= 1.0:
            raise ValueError(f"E={E} outside [0, 1]")
        self.n = n
        self.E = E
        self.delta = default_delta(n) if delta is None else delta
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        self.max_attempts = max_attempts
        self.chunk = chunk
        self.attempts = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0

    def attempt(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``size`` Haar candidates and return the accepted ones as amplitudes."""
        probs = hurwitz_probabilities(2**self.n, size, rng)
        mask = energy_mask(probs, self.E, self.delta, probabilities=True)
        self.attempts += size
        self.accepted += int(mask.sum())
        return attach_phases(probs[mask], rng)

    def draw_batch(self, count: int, rng: np.random.Generator) -> np.ndarray:
        got, tried = [], 0
        have = 0
        while have < count:
            if tried >= self.max_attempts * count:
                raise InfeasibleEnsembleError(
                    f"energy-constrained sampler (n={self.n}, E={self.E}, delta={self.delta}) accepted "
                    f"{have} of {tried} attempts (rate {have / max(tried, 1):.2e})",
                    tried,
                    have,
                )
            size = min(self.chunk, self.max_attempts * count - tried)
            kept = self.attempt(size, rng)
            tried += size
            got.append(kept)
            have += kept.shape[0]
        out = np.concatenate(got)[:count]
        assert np.all(energy_mask(out, self.E, self.delta))
        return out


def energy_constrained(n: int, E: float, delta: float | None, rng: np.random.Generator,
                       max_attempts: int = MAX_ATTEMPTS) -> PureState:
    sampler = EnergyConstrainedSampler(n, E, delta, max_attempts=max_attempts, chunk=256)
    return PureState(n, sampler.draw_batch(1, rng)[0])


def boundary_state_2q(E: float, x: float) -> PureState:
    """Real nonnegative state ``(sqrt(1-x-E), sqrt(x), sqrt(x), sqrt(E-x))``; both qubits have ``<E_i> = E``."""
    if not 0.0 <= E <= 1.0:
        raise ValueError(f"E={E} outside [0, 1]")
    if not -1e-15 <= x <= min(E, 1.0 - E) + 1e-15:
        raise ValueError(f"x={x} outside [0, min(E, 1-E)]")
    w = np.clip([1.0 - x - E, x, x, E - x], 0.0, None)
    return PureState(2, np.sqrt(w).astype(complex))


# -- generalized Dicke --------------------------------------------------------


def dicke_batch(n: int, N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Hurwitz-random coefficients ``(count, C(n, N))`` in :func:`dicke_support` order."""
    if not 1 <= N <= n - 1:
        raise ValueError(f"excitation number {N} outside 1..{n - 1}")
    return hurwitz_batch(comb(n, N), count, rng)


def dicke_embed(coeffs: np.ndarray, n: int, N: int) -> np.ndarray:
    """Dense ``(M, 2**n)`` vectors from Dicke coefficient rows."""
    coeffs = np.atleast_2d(coeffs)
    out = np.zeros((coeffs.shape[0], 2**n), dtype=complex)
    out[:, dicke_support(n, N).astype(np.int64)] = coeffs
    return out


def dicke_generalized(n: int, N: int, rng: np.random.Generator) -> PureState:
    coeffs = dicke_batch(n, N, 1, rng)[0]
    return PureState.from_support(n, dicke_support(n, N), coeffs)


# -- ensemble specs -----------------------------------------------------------

ENSEMBLE_KINDS = ("haar", "separable", "clusters", "energy_constrained", "dicke")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n_qubits: int
    count: int = 1
    seed: int = 0
    partition: tuple = ()
    E: float | None = None
    delta: float | None = None
    N: int | None = None

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n_qubits < 1 or self.count < 1:
            raise ValueError("n_qubits and count must be >= 1")
        if self.kind == "clusters" and sum(self.partition) != self.n_qubits:
            raise ValueError(f"partition {list(self.partition)} does not sum to {self.n_qubits}")
        if self.kind == "energy_constrained":
            if self.E is None or not 0.0 <= self.E <= 1.0:
                raise ValueError("energy-constrained ensemble needs E in [0, 1]")
            if self.delta is not None and self.delta <= 0:
                raise ValueError("delta must be positive")
        if self.kind == "dicke" and (self.N is None or not 1 <= self.N <= self.n_qubits - 1):
            raise ValueError(f"dicke ensemble needs 1 <= N <= {self.n_qubits - 1}")

    @property
    def effective_delta(self) -> float | None:
        if self.kind != "energy_constrained":
            return None
        return default_delta(self.n_qubits) if self.delta is None else self.delta

    def to_text(self) -> str:
        if self.kind == "clusters":
            return "clusters=" + "+".join(str(s) for s in self.partition)
        if self.kind == "energy_constrained":
            return f"energy={self.E}:{self.effective_delta}"
        if self.kind == "dicke":
            return f"dicke={self.N}"
        return self.kind


def parse_ensemble(text: str, n_qubits: int, count: int = 1, seed: int = 0) -> EnsembleSpec:
    """Parse ``haar``, ``separable``, ``clusters=2+2+2``, ``energy=0.2:0.01`` or ``dicke=1``."""
    tok = text.strip().lower()
    if tok in ("haar", "separable"):
        return EnsembleSpec(tok, n_qubits, count, seed)
    key, sep, val = tok.partition("=")
    if not sep:
        raise ValueError(f"cannot parse ensemble spec {text!r}")
    try:
        if key == "clusters":
            part = tuple(int(v) for v in val.split("+"))
            return EnsembleSpec("clusters", n_qubits, count, seed, partition=part)
        if key == "energy":
            e, _, d = val.partition(":")
            return EnsembleSpec("energy_constrained", n_qubits, count, seed, E=float(e),
                                delta=float(d) if d else None)
        if key == "dicke":
            return EnsembleSpec("dicke", n_qubits, count, seed, N=int(val))
    except ValueError as exc:
        raise ValueError(f"cannot parse ensemble spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown ensemble kind in {text!r}")
