"""Dense linear-algebra helpers shared by the formalism modules."""

from __future__ import annotations

import numpy as np


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def spectral_apply(m: np.ndarray, func) -> np.ndarray:
    """``func`` applied to a Hermitian matrix through its eigendecomposition."""
    w, v = np.linalg.eigh(hermitian_part(np.asarray(m, dtype=complex)))
    return (v * func(w)) @ v.conj().T


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Square root of a positive semidefinite matrix; negative roundoff is clamped to 0."""
    return spectral_apply(m, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def sqrt_complement(m: np.ndarray) -> np.ndarray:
    """``sqrt(1 - m)`` for a positive contraction."""
    return spectral_apply(m, lambda w: np.sqrt(np.clip(1.0 - w, 0.0, None)))


def trace_norm(m: np.ndarray) -> float:
    """Schatten-1 norm of a Hermitian matrix."""
    return float(np.abs(np.linalg.eigvalsh(hermitian_part(m))).sum())


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return u.shape[0] == u.shape[1] and np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # fix the phase ambiguity of QR so that the law is exactly Haar
    return q * (d / np.abs(d))


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))
