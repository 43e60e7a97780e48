"""Quantum channels as Kraus operator sets.

A channel acts as rho -> sum_k E_k rho E_k†, with trace preservation
requiring sum_k E_k† E_k = I. This module provides construction and
validation, conversion to and from the process (chi) matrix, the canonical
orthogonal Kraus form, detection of mixed-unitary structure, the standard
named single-qubit channels, Haar-dilation random channel sampling, and
channel composition.

Chi-matrix convention: operator basis A_j = |m><n| with flat index
j = m * dim + n, i.e. row-major flattening of the matrix units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import RANK_CUTOFF, as_matrix, haar_unitary

# Frobenius tolerance on sum_k E_k† E_k - I for trace preservation.
TRACE_PRESERVATION_TOL = 1e-9

# Default tolerance for the "F† F proportional to I" test that detects
# mixed-unitary structure in canonical Kraus operators.
PROPORTIONALITY_TOL = 1e-8

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

STANDARD_KINDS = ("depolarizing", "bit_flip", "phase_flip", "amplitude_damping")


class ChannelValidationError(ValueError):
    """A channel violated a contract (e.g. not trace preserving)."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A quantum process given by Kraus operators on a dim-dimensional system.

    The constructor checks shapes and finiteness only; trace preservation is
    checked by :func:`validate` (report style) or enforced by
    :func:`require_trace_preserving`. Instances are immutable.
    """

    dim: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        ops = tuple(as_matrix(op) for op in self.kraus)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        for op in ops:
            if op.shape != (self.dim, self.dim):
                raise ValueError(
                    f"Kraus operator shape {op.shape} does not match dim {self.dim}"
                )
        object.__setattr__(self, "kraus", ops)

    @property
    def n_ops(self) -> int:
        return len(self.kraus)


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    """Process matrix chi in the |m><n| operator basis (j = m*dim + n)."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mat)
        d2 = self.dim * self.dim
        if m.shape != (d2, d2):
            raise ValueError(f"chi must be {d2}x{d2} for dim {self.dim}, got {m.shape}")
        object.__setattr__(self, "mat", m)


@dataclass(frozen=True, eq=False)
class CanonicalKraus:
    """Orthogonalized Kraus set with <F_i, F_k> = delta_ik * weights[k].

    ``ops`` are sorted by descending weight; operators with weight at or
    below the rank cutoff are dropped. ``mixing`` is the full unitary u of
    the diagonalization with F_i = sum_j conj(u[i, j]) * E_j; rows beyond
    len(ops) correspond to the dropped zero-weight combinations.
    """

    dim: int
    ops: tuple[np.ndarray, ...]
    weights: np.ndarray
    mixing: np.ndarray


@dataclass(frozen=True, eq=False)
class MixedUnitaryForm:
    """Channel written as E_k = alpha_k U_k with U_k unitary.

    When derived from the canonical form of a qubit mixed-unitary channel
    the unitaries are pairwise orthogonal in the Hilbert-Schmidt inner
    product. For trace-preserving channels sum_k |alpha_k|^2 = 1. Each U_k
    carries the fixed phase convention that its first nonzero entry (in
    row-major scan) is real positive.
    """

    dim: int
    unitaries: tuple[np.ndarray, ...]
    coefficients: np.ndarray


@dataclass(frozen=True)
class ValidationReport:
    """Trace-preservation check result."""

    residual: float
    passed: bool
    tol: float = TRACE_PRESERVATION_TOL


def identity_channel(dim: int) -> KrausChannel:
    """The do-nothing channel {I}."""
    return KrausChannel(dim, (np.eye(dim, dtype=np.complex128),))


def unitary_channel(u) -> KrausChannel:
    """Channel with the single Kraus operator u."""
    u = as_matrix(u)
    return KrausChannel(u.shape[0], (u,))


def convex_unitary_mixture(unitaries, probs) -> KrausChannel:
    """Channel sum_k p_k U_k rho U_k† as Kraus operators {sqrt(p_k) U_k}."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or len(unitaries) != probs.size:
        raise ValueError("need one probability per unitary")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("probabilities must be nonnegative and sum to 1")
    ops = tuple(np.sqrt(p) * as_matrix(u) for p, u in zip(probs, unitaries))
    return KrausChannel(ops[0].shape[0], ops)


def validate(ch: KrausChannel, tol: float = TRACE_PRESERVATION_TOL) -> ValidationReport:
    """Report the trace-preservation residual ||sum_k E_k† E_k - I||_F."""
    acc = np.zeros((ch.dim, ch.dim), dtype=np.complex128)
    for op in ch.kraus:
        acc += op.conj().T @ op
    residual = float(np.linalg.norm(acc - np.eye(ch.dim)))
    return ValidationReport(residual=residual, passed=residual <= tol, tol=tol)


def require_trace_preserving(ch: KrausChannel, tol: float = TRACE_PRESERVATION_TOL) -> None:
    """Raise ChannelValidationError if the channel is not trace preserving."""
    report = validate(ch, tol)
    if not report.passed:
        raise ChannelValidationError(
            f"channel is not trace preserving (residual {report.residual:.3e} > {tol:.1e})"
        )


def apply_channel(ch: KrausChannel, rho) -> np.ndarray:
    """Apply the channel to a density matrix: sum_k E_k rho E_k†."""
    rho = as_matrix(rho)
    if rho.shape != (ch.dim, ch.dim):
        raise ValueError(f"state shape {rho.shape} does not match channel dim {ch.dim}")
    if np.linalg.norm(rho - rho.conj().T) > 1e-9 * max(1.0, float(np.linalg.norm(rho))):
        raise ValueError("state must be Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("state must have unit trace")
    out = np.zeros_like(rho)
    for op in ch.kraus:
        out += op @ rho @ op.conj().T
    return out


def kraus_to_chi(ch: KrausChannel) -> ChiMatrix:
    """Process matrix chi_{jl} = sum_k c_{kj} c*_{kl} with c_k = vec(E_k).

    ``vec`` is row-major flattening, matching the A_j = |m><n| basis with
    j = m*dim + n. The result is Hermitian PSD by construction.
    """
    v = np.stack([op.ravel() for op in ch.kraus])
    chi = v.T @ v.conj()
    return ChiMatrix(ch.dim, chi)


def chi_to_kraus(
    x: ChiMatrix,
    *,
    cutoff: float = RANK_CUTOFF,
    psd_tol: float = 1e-9,
) -> KrausChannel:
    """Recover Kraus operators from a chi matrix by eigendecomposition.

    E_k = sqrt(lambda_k) * unvec(v_k) for eigenpairs of chi; eigenvalues at
    or below ``cutoff`` are dropped. Raises ChannelValidationError when chi
    fails Hermiticity or PSD beyond tolerance.
    """
    mat = x.mat
    scale = max(1.0, float(np.linalg.norm(mat)))
    if np.linalg.norm(mat - mat.conj().T) > 1e-9 * scale:
        raise ChannelValidationError("chi matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(mat)
    if vals.min() < -psd_tol * max(1.0, float(vals.max())):
        raise ChannelValidationError(
            f"chi matrix is not PSD (min eigenvalue {vals.min():.3e})"
        )
    order = np.argsort(vals)[::-1]
    ops = []
    for k in order:
        if vals[k] <= cutoff:
            break
        ops.append(np.sqrt(vals[k]) * vecs[:, k].reshape(x.dim, x.dim))
    if not ops:
        raise ChannelValidationError("chi matrix has no weight above the rank cutoff")
    return KrausChannel(x.dim, tuple(ops))


def canonicalize(ch: KrausChannel, *, cutoff: float = RANK_CUTOFF) -> CanonicalKraus:
    """Diagonalize the correlation matrix W_jk = <E_j, E_k> into orthogonal form.

    With W = u† D u (D descending), the operators F_i = sum_j conj(u[i, j]) E_j
    satisfy <F_i, F_k> = delta_ik D_kk and represent the same channel.
    Combinations with weight at or below ``cutoff`` are discarded; at most
    dim^2 operators survive.
    """
    ops = np.stack(ch.kraus)
    k, n = ops.shape[0], ch.dim
    v = ops.reshape(k, n * n)
    w_mat = v.conj() @ v.T
    vals, vecs = np.linalg.eigh(w_mat)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    f_ops = np.einsum("ji,jab->iab", vecs, ops)
    keep = vals > cutoff
    weights = np.clip(vals[keep], 0.0, None)
    kept = tuple(np.ascontiguousarray(f_ops[i]) for i in range(k) if keep[i])
    if len(kept) > n * n:
        raise ChannelValidationError(
            f"correlation matrix rank {len(kept)} exceeds dim^2 = {n * n}"
        )
    return CanonicalKraus(dim=n, ops=kept, weights=weights, mixing=vecs.conj().T)


def as_mixed_unitary(
    ck: CanonicalKraus, tol: float = PROPORTIONALITY_TOL
) -> MixedUnitaryForm | None:
    """Extract E_k = alpha_k U_k structure from a canonical Kraus set.

    Each operator is tested for F† F proportional to I within ``tol``
    (Frobenius norm, relative to max(1, tr F† F)). Returns None when any
    operator fails; this is the regular "not mixed-unitary" outcome, not an
    error.
    """
    n = ck.dim
    unitaries = []
    coeffs = []
    for f_op in ck.ops:
        gram = f_op.conj().T @ f_op
        c = float(np.trace(gram).real) / n
        if np.linalg.norm(gram - c * np.eye(n)) > tol * max(1.0, c * n):
            return None
        a = np.sqrt(max(c, 0.0))
        u = f_op / a
        flat = u.ravel()
        first = flat[np.abs(flat) > 1e-12]
        phase = first[0] / abs(first[0]) if first.size else 1.0
        unitaries.append(np.ascontiguousarray(u / phase))
        coeffs.append(a * phase)
    return MixedUnitaryForm(
        dim=n, unitaries=tuple(unitaries), coefficients=np.asarray(coeffs)
    )


def standard_channel(kind: str, param: float) -> KrausChannel:
    """Standard single-qubit noise channels.

    depolarizing (p):      sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z
    bit_flip (p):          sqrt(p) I, sqrt(1-p) X
    phase_flip (p):        sqrt(p) I, sqrt(1-p) Z
    amplitude_damping (g): [[1, 0], [0, sqrt(1-g)]], [[0, sqrt(g)], [0, 0]]

    Operators with an exactly zero coefficient are omitted, so e.g.
    depolarizing at p = 0 is the single-operator identity channel.
    """
    if not 0.0 <= param <= 1.0:
        raise ValueError(f"parameter must be in [0, 1], got {param}")
    if kind == "depolarizing":
        weighted = [
            (1.0 - 0.75 * param, PAULI_I),
            (0.25 * param, PAULI_X),
            (0.25 * param, PAULI_Y),
            (0.25 * param, PAULI_Z),
        ]
    elif kind == "bit_flip":
        weighted = [(param, PAULI_I), (1.0 - param, PAULI_X)]
    elif kind == "phase_flip":
        weighted = [(param, PAULI_I), (1.0 - param, PAULI_Z)]
    elif kind == "amplitude_damping":
        e0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - param)]], dtype=np.complex128)
        e1 = np.array([[0.0, np.sqrt(param)], [0.0, 0.0]], dtype=np.complex128)
        ops = (e0,) if param == 0.0 else (e0, e1)
        return KrausChannel(2, ops)
    else:
        raise ValueError(f"unknown channel kind {kind!r}; expected one of {STANDARD_KINDS}")
    ops = tuple(np.sqrt(w) * op for w, op in weighted if w != 0.0)
    return KrausChannel(2, ops)


def random_channel(
    sys_dim: int,
    env_dim: int,
    rng: np.random.Generator,
    env_state=None,
) -> KrausChannel:
    """Random channel from a Haar unitary on system (x) environment.

    Draws a Haar unitary of dimension sys_dim * env_dim, couples the system
    to the environment prepared in ``env_state`` (default |0>), and traces
    the environment: E_k = (I (x) <k|) U (I (x) |env>) for k < env_dim.
    Trace preserving by construction.
    """
    if sys_dim < 2:
        raise ValueError(f"sys_dim must be >= 2, got {sys_dim}")
    if env_dim < 1:
        raise ValueError(f"env_dim must be >= 1, got {env_dim}")
    u = haar_unitary(sys_dim * env_dim, rng)
    t = u.reshape(sys_dim, env_dim, sys_dim, env_dim)
    if env_state is None:
        ops = t[:, :, :, 0]
    else:
        e = np.asarray(env_state, dtype=np.complex128).ravel()
        if e.shape != (env_dim,):
            raise ValueError(f"env_state must have length {env_dim}")
        if abs(np.linalg.norm(e) - 1.0) > 1e-12:
            raise ValueError("env_state must be normalized")
        ops = np.einsum("akbt,t->akb", t, e)
    kraus = tuple(np.ascontiguousarray(ops[:, k, :]) for k in range(env_dim))
    return KrausChannel(sys_dim, kraus)


def compose(f: KrausChannel, e: KrausChannel) -> KrausChannel:
    """Composition f after e, with Kraus set {F_j E_k} compressed to the
    canonical orthogonal form (at most dim^2 operators)."""
    if f.dim != e.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {e.dim}")
    products = tuple(fj @ ek for fj in f.kraus for ek in e.kraus)
    ck = canonicalize(KrausChannel(f.dim, products))
    return KrausChannel(f.dim, ck.ops)
