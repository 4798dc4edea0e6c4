"""Dense linear algebra for two-copy simulation at small qubit counts.

Operators and states are plain numpy arrays (complex128): a dense operator on
m qubits is a 2^m x 2^m matrix, a state a length-2^m vector.  Qubit 0 is the
leftmost tensor factor (most significant basis bit).  Two-copy systems put
copy 1 on qubits 0..n-1 and copy 2 on qubits n..2n-1; region bookkeeping is
done by basis-index permutations, never by physically reordering amplitudes
twice.

Budgets: state vectors up to 2^16 amplitudes, dense two-copy operators only up
to n = 5 per copy.  Above that, callers must use the partial-inner-product
shortcuts (``complement_bell_overlap``) instead of materialized projectors.
"""

from __future__ import annotations

import logging

import numpy as np

from . import pauli
from .errors import BudgetError, ValidationError

logger = logging.getLogger(__name__)

STATE_QUBIT_CAP = 16  # total qubits in any state vector
TWO_COPY_OPERATOR_CAP = 5  # per-copy qubits for materialized two-copy operators
PAULI_EXPANSION_CAP = 6


def _require_qubits(m: int, cap: int, what: str):
    if m > cap:
        raise BudgetError(f"{what} needs {m} qubits, cap is {cap}")


def _qubit_count(dim: int) -> int:
    m = dim.bit_length() - 1
    if 1 << m != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return m


def basis_permutation(order: tuple[int, ...], n: int) -> np.ndarray:
    """Index map sigma with sigma[c] = index of c when qubits are reordered.

    ``order`` lists the qubits that become positions 0, 1, ... (leftmost
    first); omitted qubits follow in ascending order.  Permuting a state is
    ``psi_new[sigma[c]] = psi[c]``.
    """
    rest = tuple(q for q in range(n) if q not in order)
    full = order + rest
    if sorted(full) != list(range(n)):
        raise ValidationError(f"bad qubit order {order} for n={n}")
    cols = np.arange(1 << n, dtype=np.int64)
    sigma = np.zeros(1 << n, dtype=np.int64)
    for pos, q in enumerate(full):
        sigma |= ((cols >> (n - 1 - q)) & 1) << (n - 1 - pos)
    return sigma


def permute_state(psi: np.ndarray, order: tuple[int, ...], n: int) -> np.ndarray:
    """State in the basis where ``order`` lists the leading qubits."""
    sigma = basis_permutation(order, n)
    out = np.empty_like(psi)
    out[sigma] = psi
    return out


def embed(op: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Extend an operator acting on the listed qubits (in order) to n qubits."""
    k = _qubit_count(op.shape[0])
    if k != len(qubits):
        raise ValidationError(f"operator acts on {k} qubits, got {len(qubits)} targets")
    _require_qubits(n, pauli.DENSE_QUBIT_CAP, "dense embedding")
    sigma = basis_permutation(tuple(qubits), n)
    big = np.kron(op, np.eye(1 << (n - k), dtype=np.complex128))
    return big[np.ix_(sigma, sigma)]


def partial_trace(A: np.ndarray, keep: tuple[int, ...], n: int) -> np.ndarray:
    """Trace out all qubits not in ``keep`` (result ordered as ``keep``)."""
    sigma = basis_permutation(tuple(keep), n)
    inv = np.empty_like(sigma)
    inv[sigma] = np.arange(sigma.size)
    dK = 1 << len(keep)
    dR = (1 << n) // dK
    B = A[np.ix_(inv, inv)].reshape(dK, dR, dK, dR)
    return np.einsum("arbr->ab", B)


def bell_state(m: int) -> np.ndarray:
    """Maximally entangled state of two m-qubit registers."""
    _require_qubits(2 * m, STATE_QUBIT_CAP, "Bell state")
    d = 1 << m
    return (np.eye(d, dtype=np.complex128) / np.sqrt(d)).reshape(-1)


def apply_two_copy(A: np.ndarray, B: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """(A tensor B) applied to a two-copy state, via one reshape."""
    d = A.shape[0]
    return (A @ psi.reshape(d, d) @ B.T).reshape(-1)


def swap_region(region: tuple[int, ...], n: int) -> np.ndarray:
    """Involution on H^{x2} exchanging the region factors of the two copies."""
    _require_qubits(n, TWO_COPY_OPERATOR_CAP, "dense two-copy swap")
    d = 1 << n
    rm = 0
    for q in set(region):
        if not 0 <= q < n:
            raise ValidationError(f"region qubit {q} outside 0..{n - 1}")
        rm |= 1 << (n - 1 - q)
    idx = np.arange(d * d, dtype=np.int64)
    a, b = idx >> n, idx & (d - 1)
    new = (((a & ~rm) | (b & rm)) << n) | ((b & ~rm) | (a & rm))
    M = np.zeros((d * d, d * d), dtype=np.complex128)
    M[new, idx] = 1.0
    return M


def bell_projector_on_complement(region: tuple[int, ...], n: int) -> np.ndarray:
    """Identity on both region factors, Bell projector on the complements."""
    _require_qubits(n, TWO_COPY_OPERATOR_CAP, "dense two-copy projector")
    d = 1 << n
    lm = 0
    for q in set(region):
        if not 0 <= q < n:
            raise ValidationError(f"region qubit {q} outside 0..{n - 1}")
        lm |= 1 << (n - 1 - q)
    cm = (d - 1) ^ lm
    d_comp = 1 << (n - len(set(region)))
    idx = np.arange(d * d, dtype=np.int64)
    a, b = idx >> n, idx & (d - 1)
    aligned = (a & cm) == (b & cm)
    aL, bL = a & lm, b & lm
    match = (aL[:, None] == aL[None, :]) & (bL[:, None] == bL[None, :])
    weightmat = (aligned[:, None] & aligned[None, :]) & match
    return weightmat.astype(np.complex128) / d_comp


def complement_bell_overlap(
    psi: np.ndarray, region: tuple[int, ...], n: int
) -> np.ndarray:
    """Partial inner product of a two-copy state with the complement Bell pair.

    Returns the matrix T (indexed by the two region factors) such that the
    Born probability of ``bell_projector_on_complement`` is ||T||_F^2.  This
    avoids materializing the projector and works up to the state-vector cap.
    """
    _require_qubits(2 * n, STATE_QUBIT_CAP, "two-copy state")
    reg = tuple(sorted(set(region)))
    comp = tuple(q for q in range(n) if q not in reg)
    order = reg + comp + tuple(n + q for q in reg) + tuple(n + q for q in comp)
    chi = permute_state(psi, order, 2 * n)
    dL, dC = 1 << len(reg), 1 << len(comp)
    T = np.einsum("axbx->ab", chi.reshape(dL, dC, dL, dC))
    return T / np.sqrt(dC)


def pauli_coefficients(A: np.ndarray) -> dict[pauli.PauliString, complex]:
    """Coefficients a_T = Tr[T A]/d over all canonical Paulis T."""
    n = _qubit_count(A.shape[0])
    _require_qubits(n, PAULI_EXPANSION_CAP, "full Pauli expansion")
    d = 1 << n
    out = {}
    for key in range(4**n):
        T = pauli.from_key(key, n)
        out[T] = pauli.trace_with(T, A) / d
    return out


def povm_probability(psi: np.ndarray, Pi: np.ndarray) -> float:
    """Born probability <psi|Pi|psi>, clamped to [0, 1]."""
    if not np.allclose(Pi, Pi.conj().T, atol=1e-9):
        raise ValidationError("POVM element is not Hermitian")
    value = float(np.real(np.vdot(psi, Pi @ psi)))
    clamped = min(1.0, max(0.0, value))
    if abs(clamped - value) > 1e-9:
        logger.warning("clamped Born probability %.3e beyond 1e-9", value)
    return clamped
