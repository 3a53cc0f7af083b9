"""Covariance matrices of passive (gauge-invariant) fermionic Gaussian states.

A covariance is a Hermitian matrix ``0 <= G <= 1`` holding the two-point
function ``G[i, j] = tr(rho a_i a_j^dagger)``.  With this convention
``G = 1`` is the Fock vacuum and ``G = 0`` the fully occupied state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidDelta, NotDenseEnough, NotHermitian, SpectrumOutOfRange

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-9
DIAGONALITY_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _descending_order(values: np.ndarray) -> np.ndarray:
    # stable: ties keep their incoming index order
    return np.argsort(-values, kind="stable")


@dataclass(frozen=True, eq=False)
class Covariance:
    """Validated covariance with cached eigendecomposition.

    ``eigenvalues`` are sorted non-increasingly and ``eigenvectors[:, j]``
    belongs to ``eigenvalues[j]``.  Instances are immutable; use
    :func:`validate` or :meth:`from_eigh` to build them.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_eigh(cls, eigenvalues, eigenvectors) -> "Covariance":
        """Assemble from a trusted spectral decomposition (values in [0, 1])."""
        values = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, 1.0)
        vectors = np.asarray(eigenvectors, dtype=complex)
        order = _descending_order(values)
        values, vectors = values[order], vectors[:, order]
        matrix = (vectors * values) @ vectors.conj().T
        matrix = 0.5 * (matrix + matrix.conj().T)
        return cls(_frozen(matrix), _frozen(values), _frozen(vectors))

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "Covariance":
        return validate(np.diag(np.asarray(values, dtype=float)))

    def apply(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Spectral calculus: ``V func(lambda) V^dagger``."""
        v = self.eigenvectors
        return (v * func(self.eigenvalues)) @ v.conj().T

    def sqrt(self) -> np.ndarray:
        return self.apply(np.sqrt)

    def sqrt_complement(self) -> np.ndarray:
        """``sqrt(1 - G)``."""
        return self.apply(lambda x: np.sqrt(1.0 - x))

    def conjugate_by(self, u: np.ndarray) -> "Covariance":
        """``u G u^dagger`` for a unitary ``u``, reusing the spectrum."""
        u = np.asarray(u)
        return Covariance.from_eigh(self.eigenvalues, u @ self.eigenvectors)

    def restrict(self, indices: Sequence[int]) -> "Covariance":
        """Principal submatrix, i.e. the covariance of the marginal on ``indices``."""
        idx = np.asarray(indices, dtype=int)
        return validate(self.matrix[np.ix_(idx, idx)])

    def is_projection(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.minimum(self.eigenvalues, 1.0 - self.eigenvalues) <= tol))

    def __repr__(self) -> str:
        return f"Covariance(dim={self.dim}, eigenvalues={np.round(self.eigenvalues, 6).tolist()})"


def validate(matrix) -> Covariance:
    """Check ``0 <= matrix <= 1`` and return a :class:`Covariance`.

    Raises
    ------
    NotHermitian
        If ``||M - M^dagger||_F`` exceeds ``1e-12 * max(1, ||M||_F)``.
    SpectrumOutOfRange
        If an eigenvalue lies outside ``[-1e-9, 1 + 1e-9]``.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"covariance must be a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.linalg.norm(m)))
    asym = float(np.linalg.norm(m - m.conj().T))
    if asym > HERMITIAN_TOL * scale:
        raise NotHermitian(f"||M - M^dagger||_F = {asym:.3e}")
    m = 0.5 * (m + m.conj().T)

    offdiag = m - np.diag(np.diag(m))
    if not np.any(offdiag):
        values = np.diag(m).real.copy()
        vectors = np.eye(m.shape[0], dtype=complex)
    else:
        values, vectors = np.linalg.eigh(m)
        residual = vectors.conj().T @ m @ vectors
        residual -= np.diag(np.diag(residual))
        if np.linalg.norm(residual) > DIAGONALITY_TOL * scale:
            raise NotHermitian("eigendecomposition failed to diagonalize the input")

    lo, hi = float(values.min()), float(values.max())
    if lo < -SPECTRUM_TOL or hi > 1.0 + SPECTRUM_TOL:
        raise SpectrumOutOfRange(f"eigenvalues span [{lo:.6g}, {hi:.6g}], need [0, 1]")

    order = _descending_order(values)
    values = np.clip(values[order], 0.0, 1.0)
    vectors = vectors[:, order]
    return Covariance(_frozen(m), _frozen(values), _frozen(vectors))


def as_covariance(obj) -> Covariance:
    return obj if isinstance(obj, Covariance) else validate(obj)


@dataclass(frozen=True)
class SpectralDensityReport:
    density: float
    worst_gap: float
    witness_x: float

    def is_dense(self, eps: float) -> bool:
        """True iff the spectrum is ``eps``-dense (strict inequality)."""
        return self.density < eps


def spectral_density(K: Covariance) -> SpectralDensityReport:
    """Exact ``sup_x min_j |lambda_j - x|`` over ``x`` in ``[0, 1]``."""
    lam = np.asarray(K.eigenvalues, dtype=float)
    points = np.concatenate(([1.0], lam, [0.0]))
    gaps = points[:-1] - points[1:]
    worst_gap = float(gaps.max())

    # endpoint distances count in full, interior gaps only by half
    best, witness = 1.0 - lam[0], 1.0
    if lam[-1] > best:
        best, witness = lam[-1], 0.0
    if lam.size > 1:
        inner = lam[:-1] - lam[1:]
        j = int(np.argmax(inner))
        if inner[j] / 2 > best:
            best, witness = inner[j] / 2, 0.5 * (lam[j] + lam[j + 1])
    return SpectralDensityReport(float(best), worst_gap, float(witness))


def clip_spectrum(G: Covariance, delta: float) -> Covariance:
    """Clamp every eigenvalue of ``G`` into ``[delta, 1 - delta]``."""
    if not 0.0 < delta <= 0.5:
        raise InvalidDelta(f"delta must lie in (0, 1/2], got {delta}")
    clipped = np.clip(G.eigenvalues, delta, 1.0 - delta)
    return Covariance.from_eigh(clipped, G.eigenvectors)


def direct_sum(*covs: Covariance) -> Covariance:
    """Block-diagonal covariance; the state is the tensor product of the inputs."""
    total = sum(c.dim for c in covs)
    matrix = np.zeros((total, total), dtype=complex)
    vectors = np.zeros((total, total), dtype=complex)
    offset = 0
    for c in covs:
        block = slice(offset, offset + c.dim)
        matrix[block, block] = c.matrix
        vectors[block, block] = c.eigenvectors
        offset += c.dim
    values = np.concatenate([c.eigenvalues for c in covs])
    order = _descending_order(values)
    return Covariance(_frozen(matrix), _frozen(values[order]), _frozen(vectors[:, order]))


def select_dense_subspace(K: Covariance, eps: float) -> tuple[np.ndarray, Covariance]:
    """Pick at most ``ceil(2/eps)`` eigen-directions of ``K`` that stay ``eps``-dense.

    Returns the selected positions in ``K.eigenvalues`` (increasing) and the
    diagonal restriction of ``K`` to them.  Selection walks the sorted
    spectrum from the top, always jumping to the furthest eigenvalue still
    closer than ``2 eps`` to the last one taken.  Any two jumps then cover at
    least ``2 eps``, which yields the size bound.
    """
    report = spectral_density(K)
    if not report.density < eps:
        raise NotDenseEnough(f"spectral density {report.density:.6g} is not below eps={eps:.6g}")
    lam = K.eigenvalues
    n = lam.size
    if n <= 2.0 / eps:
        chosen = np.arange(n)
    else:
        # first pick: smallest eigenvalue still within eps of x = 1
        i = int(np.nonzero(1.0 - lam <= eps)[0][-1])
        picks = [i]
        while lam[i] >= eps:
            # compare differences: lam[i] - 2 eps can round past an attained gap
            reachable = np.nonzero(lam[i] - lam[i + 1:] <= 2.0 * eps)[0]
            i = i + 1 + int(reachable[-1])
            picks.append(i)
        chosen = np.asarray(picks, dtype=int)
    return chosen, Covariance.diagonal(lam[chosen])


def binary_entropy(x) -> np.ndarray:
    """``h(x) = -x log x - (1 - x) log(1 - x)`` in nats, with ``h(0) = h(1) = 0``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0, -x * np.log(np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, -(1 - x) * np.log(np.where(x < 1, 1 - x, 1.0)), 0.0)
    return a + b


def gaussian_entropy(G: Covariance) -> float:
    """Von Neumann entropy (nats) of the Gaussian state with covariance ``G``."""
    return float(np.sum(binary_entropy(G.eigenvalues)))

