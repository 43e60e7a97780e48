"""Shared test utilities: independent oracles and random object factories.

The DU oracle here deliberately avoids the package's polar fixed-point
route: it reduces the qubit problem to a real symmetric 4x4 eigenproblem.
"""

from __future__ import annotations

import numpy as np

from unitarity import KrausChannel

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


def qubit_du_oracle(kraus_ops):
    """Closed-form DU of a qubit channel, with a maximizing unitary.

    Every qubit unitary is a global phase times x0*I + i(x1*X + x2*Y + x3*Z)
    for a real unit 4-vector x, so sum_k |tr(U† E_k)|^2 becomes x^T A x for
    a real symmetric PSD 4x4 matrix A built from the Pauli overlaps of the
    Kraus operators. The DU is the top eigenvalue of A divided by 4.
    """
    a = np.zeros((4, 4))
    for op in kraus_ops:
        c = np.array(
            [np.trace(op)]
            + [-1j * np.trace(p @ op) for p in (PAULI_X, PAULI_Y, PAULI_Z)]
        )
        a += np.outer(c.real, c.real) + np.outer(c.imag, c.imag)
    vals, vecs = np.linalg.eigh(a)
    x = vecs[:, -1]
    witness = x[0] * PAULI_I + 1j * (x[1] * PAULI_X + x[2] * PAULI_Y + x[3] * PAULI_Z)
    return float(vals[-1]) / 4.0, witness


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix (normalized Wishart)."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) element (unit determinant)."""
    from unitarity import haar_unitary

    u = haar_unitary(2, rng)
    det = np.linalg.det(u)
    return u * np.exp(-0.5j * np.angle(det))


def random_mixed_unitary_channel(
    rng: np.random.Generator, n_ops: int | None = None
) -> KrausChannel:
    """Random qubit channel sum_k p_k U_k rho U_k† with SU(2) unitaries."""
    if n_ops is None:
        n_ops = int(rng.integers(2, 5))
    probs = rng.dirichlet(np.ones(n_ops))
    ops = tuple(np.sqrt(p) * random_su2(rng) for p in probs)
    return KrausChannel(2, ops)


def remix_kraus(ch: KrausChannel, rng: np.random.Generator, extra: int = 0) -> KrausChannel:
    """Equivalent channel under an isometric remixing of the Kraus set.

    New operators A_m = sum_k v[m, k] E_k where v is the first k columns of
    a Haar unitary of size k + extra; the channel action is unchanged.
    """
    from unitarity import haar_unitary

    k = ch.n_ops
    v = haar_unitary(k + extra, rng)[:, :k]
    ops = np.stack(ch.kraus)
    mixed = np.einsum("mk,kab->mab", v, ops)
    return KrausChannel(ch.dim, tuple(mixed))
