"""System coupling ``A_S = sum_i A_i``, its pointer basis, and the dephasing map.

Each qubit couples to the oscillator number operator through a 2x2 Hermitian
operator ``A_i = a0*I + ax*X + ay*Y + az*Z`` or not at all (``ISOLATED``). The
product of single-qubit eigenframes diagonalizes ``A_S``; its eigenvalue on the
pointer index ``j`` is the sum of the per-qubit eigenvalues picked by the bits of
``j`` (bit 0 -> ``lambda_p``, bit 1 -> ``lambda_m``).
"""

from __future__ import annotations

import functools
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .statevec import INDEX_DTYPE, PureState, check_density_matrix, shannon_entropy, von_neumann_entropy

GROUP_TOL = 1e-9
FRAME_TOL = 1e-10
MAX_DENSE_QUBITS = 20


@dataclass(frozen=True)
class QubitOperator:
    a0: float = 0.0
    ax: float = 0.0
    ay: float = 0.0
    az: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.a0, self.ax, self.ay, self.az])):
            raise ValueError("Pauli coefficients must be finite")

    @property
    def pauli_norm(self) -> float:
        return float(np.sqrt(self.ax**2 + self.ay**2 + self.az**2))

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.a0 + self.az, self.ax - 1j * self.ay], [self.ax + 1j * self.ay, self.a0 - self.az]]
        )

    def scaled(self, factor: float) -> "QubitOperator":
        return QubitOperator(self.a0 * factor, self.ax * factor, self.ay * factor, self.az * factor)


class _Isolated:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ISOLATED"

    def __reduce__(self):
        return (_Isolated, ())


ISOLATED = _Isolated()


def sigma(axis: str, scale: float = 1.0) -> QubitOperator:
    """``scale * sigma_axis`` with ``axis`` one of ``x``, ``y``, ``z``."""
    kw = {"x": "ax", "y": "ay", "z": "az"}
    if axis not in kw:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    return QubitOperator(**{kw[axis]: float(scale)})


@dataclass(frozen=True)
class InteractionSpec:
    per_qubit: tuple
    eigenvalue_tolerance: float = GROUP_TOL

    def __post_init__(self):
        items = tuple(self.per_qubit)
        for op in items:
            if op is not ISOLATED and not isinstance(op, QubitOperator):
                raise TypeError(f"expected QubitOperator or ISOLATED, got {op!r}")
        if not items:
            raise ValueError("interaction spec needs at least one qubit")
        object.__setattr__(self, "per_qubit", items)
        if not any(isinstance(op, QubitOperator) and op.pauli_norm > 0 for op in items):
            warnings.warn("no qubit couples to the environment; dephasing is trivial", stacklevel=3)

    @property
    def n_qubits(self) -> int:
        return len(self.per_qubit)

    def scaled(self, factor: float) -> "InteractionSpec":
        return InteractionSpec(
            tuple(op if op is ISOLATED else op.scaled(factor) for op in self.per_qubit),
            self.eigenvalue_tolerance,
        )

    def to_text(self) -> str:
        tokens = []
        for op in self.per_qubit:
            if op is ISOLATED:
                tokens.append("i")
            else:
                tokens.append(":".join(repr(float(v)) for v in (op.a0, op.ax, op.ay, op.az)))
        return ",".join(tokens)


_SHORTHAND = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?([xyz])$")


def parse_interaction(text: str) -> InteractionSpec:
    """Parse the comma-separated CLI format.

    Tokens are ``i`` (isolated), ``a0:ax:ay:az``, or a Pauli shorthand ``x``/``y``/``z``
    with an optional numeric scale prefix such as ``2z`` or ``0.5x``.
    """
    ops = []
    for raw in text.split(","):
        tok = raw.strip().lower()
        if not tok:
            raise ValueError(f"empty token in interaction spec {text!r}")
        if tok == "i":
            ops.append(ISOLATED)
            continue
        m = _SHORTHAND.match(tok)
        if m:
            ops.append(sigma(m.group(2), float(m.group(1)) if m.group(1) else 1.0))
            continue
        parts = tok.split(":")
        if len(parts) != 4:
            raise ValueError(f"cannot parse interaction token {raw!r}")
        try:
            ops.append(QubitOperator(*(float(p) for p in parts)))
        except ValueError as exc:
            raise ValueError(f"cannot parse interaction token {raw!r}") from exc
    return InteractionSpec(tuple(ops))


def distinct_magnitudes(k: int) -> list[float]:
    """Coupling strengths whose signed subset sums are all different.

    Powers of two keep every ``+-r_1 +- ... +- r_k`` distinct. Beyond 24 qubits
    that spectrum can no longer be resolved at the grouping tolerance, so
    consecutive integers are used instead; they still separate all states with a
    single excitation, which is what the large sparse runs need.
    """
    if k <= 24:
        return [float(2**j) for j in range(k)]
    return [float(j + 1) for j in range(k)]


def distinct_couplings(n: int, axis: str = "z", interacting: int | None = None) -> InteractionSpec:
    """Couple qubits ``1..interacting`` via ``r_i * sigma_axis`` and isolate the rest."""
    k = n if interacting is None else interacting
    if not 0 <= k <= n:
        raise ValueError(f"interacting qubit count {k} outside 0..{n}")
    mags = distinct_magnitudes(k)
    return InteractionSpec(tuple(sigma(axis, mags[i]) if i < k else ISOLATED for i in range(n)))


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero component is real and positive."""
    for x in v:
        if abs(x) > FRAME_TOL:
            return v * (abs(x) / x)
    return v


def single_qubit_eigensystem(op) -> tuple[float, float, np.ndarray]:
    """Return ``(lambda_p, lambda_m, frame)`` where ``frame[:, 0]``/``frame[:, 1]`` are the eigenvectors.

    A zero Pauli vector (or ``ISOLATED``) gives the identity frame.
    """
    if op is ISOLATED:
        return 0.0, 0.0, np.eye(2, dtype=complex)
    r = op.pauli_norm
    if r == 0.0:
        return float(op.a0), float(op.a0), np.eye(2, dtype=complex)
    theta = np.arccos(np.clip(op.az / r, -1.0, 1.0))
    phi = np.arctan2(op.ay, op.ax)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u_p = _phase_fix(np.array([c, np.exp(1j * phi) * s]))
    u_m = _phase_fix(np.array([-np.exp(-1j * phi) * s, c]))
    frame = np.column_stack([u_p, u_m])
    return float(op.a0 + r), float(op.a0 - r), frame


def group_eigenvalues(values: np.ndarray, tol: float = GROUP_TOL) -> np.ndarray:
    """Label values so that neighbours in sorted order within ``tol*max(1,|v|)`` share a label.

    Labels are consecutive integers in ascending eigenvalue order.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(values, kind="stable")
    sv = values[order]
    gaps = np.diff(sv)
    scale = np.maximum(1.0, np.abs(sv[1:]))
    new_group = gaps > tol * scale
    labels_sorted = np.concatenate([[0], np.cumsum(new_group)])
    labels = np.empty_like(labels_sorted)
    labels[order] = labels_sorted
    return labels


@dataclass(frozen=True, eq=False)
class PointerBasis:
    """Eigenframes of every qubit plus the eigenvalue grouping of ``A_S``.

    ``levels[i]`` holds the eigenvalue contribution of qubit ``i+1`` for bit 0 and
    bit 1. ``eigenvalues``/``group_of`` cover all ``2**n`` pointer indices and are
    only materialized for ``n <= MAX_DENSE_QUBITS``.
    """

    n_qubits: int
    frames: tuple
    levels: np.ndarray
    tolerance: float
    eigenvalues: np.ndarray | None = None
    group_of: np.ndarray | None = None
    _order: np.ndarray | None = field(default=None, repr=False)
    _starts: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_groups(self) -> int | None:
        return None if self.group_of is None else int(self.group_of.max()) + 1

    @property
    def all_distinct(self) -> bool:
        return self.group_of is not None and self.n_groups == 2**self.n_qubits

    @property
    def groups(self) -> list[np.ndarray]:
        if self.group_of is None:
            raise ValueError("groups are not materialized for this many qubits")
        bounds = list(self._starts) + [self._order.size]
        return [np.sort(self._order[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]

    @functools.cached_property
    def identity_frames(self) -> tuple[bool, ...]:
        return tuple(bool(np.allclose(f, np.eye(2), atol=FRAME_TOL)) for f in self.frames)

    @functools.cached_property
    def monomial_frames(self) -> bool:
        return all(np.count_nonzero(np.abs(f) > FRAME_TOL, axis=0).max() == 1 for f in self.frames)

    def eigenvalues_at(self, indices) -> np.ndarray:
        """Eigenvalues of ``A_S`` at the given pointer indices (any qubit count)."""
        idx = np.asarray(indices, dtype=INDEX_DTYPE)
        out = np.zeros(idx.shape)
        n = self.n_qubits
        for i in range(n):
            bit = ((idx >> INDEX_DTYPE(n - 1 - i)) & INDEX_DTYPE(1)).astype(bool)
            out += np.where(bit, self.levels[i, 1], self.levels[i, 0])
        return out

    def group_sums(self, probs: np.ndarray) -> np.ndarray:
        """Sum pointer-basis probabilities ``(..., 2**n)`` within each eigenvalue group."""
        if self.all_distinct:
            return probs
        return np.add.reduceat(probs[..., self._order], self._starts, axis=-1)


@functools.lru_cache(maxsize=256)
def build_pointer_basis(spec: InteractionSpec) -> PointerBasis:
    n = spec.n_qubits
    frames, levels = [], np.zeros((n, 2))
    for i, op in enumerate(spec.per_qubit):
        lp, lm, frame = single_qubit_eigensystem(op)
        frames.append(frame)
        levels[i] = (lp, lm)
    basis = PointerBasis(n, tuple(frames), levels, spec.eigenvalue_tolerance)
    if n > MAX_DENSE_QUBITS:
        return basis
    ev = basis.eigenvalues_at(np.arange(2**n))
    labels = group_eigenvalues(ev, spec.eigenvalue_tolerance)
    order = np.argsort(labels, kind="stable")
    starts = np.flatnonzero(np.r_[True, np.diff(labels[order]) != 0])
    return PointerBasis(n, tuple(frames), levels, spec.eigenvalue_tolerance, ev, labels, order, starts)


def _basis(spec_or_basis) -> PointerBasis:
    if isinstance(spec_or_basis, PointerBasis):
        return spec_or_basis
    return build_pointer_basis(spec_or_basis)


def _apply_per_qubit(batch: np.ndarray, mats, skip) -> np.ndarray:
    """Apply 2x2 matrices qubit-by-qubit to a batch of dense vectors ``(M, 2**n)``."""
    m, dim = batch.shape
    n = len(mats)
    out = batch
    for i, (u, sk) in enumerate(zip(mats, skip)):
        if sk:
            continue
        view = out.reshape(m, 2**i, 2, 2 ** (n - 1 - i))
        out = np.einsum("ab,mxby->mxay", u, view).reshape(m, dim)
    return out


def to_pointer_basis(batch: np.ndarray, spec_or_basis) -> np.ndarray:
    """Coefficients ``c`` of dense states in the pointer basis; ``batch`` is ``(M, 2**n)`` or ``(2**n,)``."""
    basis = _basis(spec_or_basis)
    arr = np.asarray(batch, dtype=complex)
    single = arr.ndim == 1
    arr2 = arr[None, :] if single else arr
    if arr2.shape[1] != 2**basis.n_qubits:
        raise ValueError(f"state dimension {arr2.shape[1]} does not match {basis.n_qubits} qubits")
    out = _apply_per_qubit(arr2, [f.conj().T for f in basis.frames], basis.identity_frames)
    return out[0] if single else out


def from_pointer_basis(matrix: np.ndarray, basis: PointerBasis) -> np.ndarray:
    """Rotate a pointer-basis operator back to the computational basis."""
    full = np.ones((1, 1), dtype=complex)
    for f in basis.frames:
        full = np.kron(full, f)
    return full @ matrix @ full.conj().T


def _sparse_pointer_coefficients(state: PureState, basis: PointerBasis):
    """Pointer-basis support and coefficients of a sparse state with monomial frames."""
    idx, amps = state.support.copy(), state.amplitudes.copy()
    n = state.n_qubits
    for i, f in enumerate(basis.frames):
        if basis.identity_frames[i]:
            continue
        shift = INDEX_DTYPE(n - 1 - i)
        bit = (idx >> shift) & INDEX_DTYPE(1)
        new_idx = idx.copy()
        new_amp = amps.copy()
        for k in range(2):
            row = int(np.argmax(np.abs(f[:, k])))
            sel = bit == row
            new_idx[sel] = (idx[sel] & ~(INDEX_DTYPE(1) << shift)) | (INDEX_DTYPE(k) << shift)
            new_amp[sel] = amps[sel] * np.conj(f[row, k])
        idx, amps = new_idx, new_amp
    order = np.argsort(idx)
    return idx[order], amps[order]


def _check_dims(state: PureState, basis: PointerBasis) -> None:
    if state.n_qubits != basis.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, interaction has {basis.n_qubits}")


def dephase_final(state: PureState, spec) -> np.ndarray:
    """t -> infinity system state: coherences between different eigenvalue groups removed."""
    basis = _basis(spec)
    _check_dims(state, basis)
    if basis.group_of is None:
        raise ValueError("dense dephased matrix needs a materialized pointer basis")
    c = to_pointer_basis(state.to_dense(), basis)
    rho_c = np.outer(c, c.conj())
    rho_c[basis.group_of[:, None] != basis.group_of[None, :]] = 0.0
    return from_pointer_basis(rho_c, basis)


def dephase_matrix(rho: np.ndarray, spec) -> np.ndarray:
    """Apply the same group-zeroing map to an arbitrary density matrix."""
    basis = _basis(spec)
    full = np.ones((1, 1), dtype=complex)
    for f in basis.frames:
        full = np.kron(full, f)
    rho_c = full.conj().T @ rho @ full
    rho_c = np.where(basis.group_of[:, None] == basis.group_of[None, :], rho_c, 0.0)
    return full @ rho_c @ full.conj().T


def final_entropy(state: PureState, spec, method: str = "auto") -> float:
    """Von Neumann entropy (bits) of the fully dephased state.

    For a pure input each diagonal block of ``|c><c|`` is an outer product, so its
    only nonzero eigenvalue is the block's summed weight; the default path is
    therefore the Shannon entropy of group-summed ``|c_j|**2``. ``method="eig"``
    diagonalizes the dephased matrix instead.
    """
    basis = _basis(spec)
    _check_dims(state, basis)
    if method == "eig":
        return von_neumann_entropy(dephase_final(state, basis))
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if state.is_sparse:
        if basis.monomial_frames:
            idx, c = _sparse_pointer_coefficients(state, basis)
            p = np.abs(c) ** 2
            labels = group_eigenvalues(basis.eigenvalues_at(idx), basis.tolerance)
            sums = np.bincount(labels, weights=p)
            return float(shannon_entropy(sums))
        if state.n_qubits > MAX_DENSE_QUBITS:
            raise ValueError("sparse states with rotated frames need n <= MAX_DENSE_QUBITS")
    c = to_pointer_basis(state.to_dense(), basis)
    return float(shannon_entropy(basis.group_sums(np.abs(c) ** 2)))


def final_entropies(batch: np.ndarray, spec) -> np.ndarray:
    """Vectorized :func:`final_entropy` over dense states ``(M, 2**n)``."""
    basis = _basis(spec)
    c = to_pointer_basis(batch, basis)
    return shannon_entropy(basis.group_sums(np.abs(c) ** 2), axis=-1)


def support_final_entropies(coeffs: np.ndarray, support, spec) -> np.ndarray:
    """Final entropies for a batch of states sharing one computational-basis support.

    ``coeffs`` is ``(M, len(support))``. All coupled qubits must have the identity
    frame (``sigma_z``-type couplings), so support indices are pointer indices and
    any qubit count works.
    """
    basis = _basis(spec)
    if not all(basis.identity_frames):
        raise ValueError("support path needs computational-basis pointer frames")
    labels = group_eigenvalues(basis.eigenvalues_at(support), basis.tolerance)
    p = np.abs(np.asarray(coeffs)) ** 2
    if labels.max() + 1 == labels.size:
        return shannon_entropy(p, axis=-1)
    onehot = np.zeros((labels.size, labels.max() + 1))
    onehot[np.arange(labels.size), labels] = 1.0
    return shannon_entropy(p @ onehot, axis=-1)


@dataclass(frozen=True)
class EvolutionParams:
    beta: float = 1.0
    omega: float = 1.0
    mode: str = "exact-series"
    nu_cutoff: float | None = None

    def __post_init__(self):
        if not (self.beta > 0 and self.omega > 0):
            raise ValueError("beta and omega must be positive")
        if self.mode not in ("exact-series", "continuum-cutoff"):
            raise ValueError(f"unknown evolution mode {self.mode!r}")
        if self.mode == "continuum-cutoff" and (self.nu_cutoff is None or self.nu_cutoff <= 0):
            raise ValueError("continuum-cutoff mode needs a positive nu_cutoff")

    @property
    def q(self) -> float:
        return float(np.exp(-self.beta * self.omega))


def decoherence_factor(t, delta, params: EvolutionParams = EvolutionParams()):
    """Thermal average of ``exp(i t nu delta)`` over the oscillator Gibbs weights.

    In ``exact-series`` mode this is the geometric sum ``(1-q)/(1-q e^{i t delta})``
    with ``q = exp(-beta*omega)``. In ``continuum-cutoff`` mode the sum over
    ``nu`` becomes an integral over ``[0, nu_cutoff]`` with density
    ``exp(-beta*omega*nu)``, evaluated in closed form.
    """
    x = np.asarray(t, dtype=float) * np.asarray(delta, dtype=float)
    if params.mode == "exact-series":
        q = params.q
        out = (1.0 - q) / (1.0 - q * np.exp(1j * x))
    else:
        k = params.beta * params.omega
        nc = params.nu_cutoff
        z = 1j * x - k
        norm = k / -np.expm1(-k * nc)
        small = np.abs(x) < 1e-12
        with np.errstate(invalid="ignore", divide="ignore"):
            val = norm * np.expm1(z * nc) / np.where(small, 1.0, z)
        out = np.where(small, 1.0 + 0j, val)
    out = np.where(x == 0.0, 1.0 + 0j, out)
    return out[()] if out.ndim == 0 else out


def evolve(state: PureState, spec, t: float, params: EvolutionParams = EvolutionParams()) -> np.ndarray:
    """Reduced system state at time ``t``."""
    basis = _basis(spec)
    _check_dims(state, basis)
    if basis.eigenvalues is None:
        raise ValueError("evolve needs a materialized pointer basis")
    c = to_pointer_basis(state.to_dense(), basis)
    a = basis.eigenvalues
    gap = a[None, :] - a[:, None]  # a_k - a_j for entry (j, k)
    factor = decoherence_factor(t, gap, params)
    same = basis.group_of[:, None] == basis.group_of[None, :]
    factor = np.where(same, 1.0, factor)
    rho_c = np.outer(c, c.conj()) * factor
    return from_pointer_basis(rho_c, basis)


__all__ = [
    "ISOLATED",
    "EvolutionParams",
    "InteractionSpec",
    "PointerBasis",
    "QubitOperator",
    "build_pointer_basis",
    "check_density_matrix",
    "decoherence_factor",
    "dephase_final",
    "dephase_matrix",
    "distinct_couplings",
    "evolve",
    "final_entropies",
    "final_entropy",
    "group_eigenvalues",
    "parse_interaction",
    "sigma",
    "single_qubit_eigensystem",
    "support_final_entropies",
    "to_pointer_basis",
]
