"""Dense complex-matrix kernels used throughout the package.

Everything operates on plain numpy ``complex128`` arrays in row-major order.
Spectral outputs (singular values, Hermitian eigenvalues) are always sorted
in descending order so downstream results serialize deterministically.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Frobenius-norm tolerance for unitarity / Hermiticity validation. Double
# precision decompositions on dim <= 64 matrices stay well below this.
UNITARY_TOL = 1e-9
HERMITIAN_TOL = 1e-9

# Singular values / eigenvalue weights below this count as zero in rank
# decisions (double-precision noise floor).
RANK_CUTOFF = 1e-12


class PolarFactors(NamedTuple):
    """Polar decomposition ``a = unitary @ psd``."""

    unitary: np.ndarray
    psd: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D, C-ordered complex128 array with finite entries."""
    m = np.ascontiguousarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


def frobenius(a) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(a† b)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``a = u @ diag(s) @ vh``.

    Singular values are real, nonnegative and descending.
    """
    a = as_matrix(a)
    u, s, vh = np.linalg.svd(a)
    return u, s, vh


def polar(a) -> PolarFactors:
    """Polar decomposition of a square matrix via its SVD.

    Returns ``(w, p)`` with ``a = w @ p``, ``w`` unitary and ``p`` Hermitian
    PSD. The SVD route (``w = u @ vh``) keeps ``w`` unitary even when ``a``
    is rank deficient, and ``w`` maximizes |tr(v† a)| over unitaries ``v``
    with maximum tr(sqrt(a† a)).
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"polar decomposition needs a square matrix, got {a.shape}")
    u, s, vh = np.linalg.svd(a)
    w = u @ vh
    p = (vh.conj().T * s) @ vh
    return PolarFactors(w, p)


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(vals, vecs)`` with eigenvalues descending and eigenvectors in
    the columns of ``vecs``, so ``h = vecs @ diag(vals) @ vecs†``. Raises if
    the input is not Hermitian within HERMITIAN_TOL. No canonical basis is
    promised inside degenerate eigenspaces.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got {h.shape}")
    defect = float(np.linalg.norm(h - h.conj().T))
    if defect > HERMITIAN_TOL * max(1.0, float(np.linalg.norm(h))):
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    vals, vecs = np.linalg.eigh(h)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary of the given dimension.

    QR of a complex Ginibre matrix, with the R-diagonal phases pushed into Q
    (Q * diag(r_jj/|r_jj|)); the raw QR convention alone is not Haar.
    Deterministic for a given generator state.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = np.where(np.abs(d) > 0.0, d / np.where(np.abs(d) > 0.0, np.abs(d), 1.0), 1.0)
    return q * ph


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state: a normalized complex Gaussian vector."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def unitarity_defect(u) -> float:
    """Frobenius norm of U†U - I."""
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got {u.shape}")
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def assert_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate unitarity within ``tol``; returns the coerced matrix."""
    u = as_matrix(u)
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} > {tol:.1e})")
    return u
