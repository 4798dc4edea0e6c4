"""Shared oracles for the test suite.

The dense oracle builds Pauli matrices by explicit Kronecker chains with its
own phase bookkeeping, independent of the bit-packed implementation, so the
two can check each other.
"""

import numpy as np
import pytest

I2 = np.eye(2, dtype=np.complex128)
X2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)

LETTER_MATRICES = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def kron_chain(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli word, leftmost letter on the most significant bit."""
    out = np.array([[1.0 + 0.0j]])
    for ch in letters:
        out = np.kron(out, LETTER_MATRICES[ch])
    return out


def dense_oracle(P) -> np.ndarray:
    """Dense matrix of a phased PauliString built with kron chains only."""
    from designgap import pauli

    return (1j ** P.phase_exp) * kron_chain(pauli.to_text(pauli.PauliString(P.n, P.x_bits, P.z_bits)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
