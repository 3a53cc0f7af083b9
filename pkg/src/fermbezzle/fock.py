"""Exact Fock-space oracle for passive Gaussian states.

Occupation-basis conventions: the basis state with integer label ``x`` has
mode ``i`` (0-based) occupied iff bit ``i`` of ``x`` is set, so mode 0 is the
least significant bit.  The state for an occupied set ``i_1 < ... < i_k`` is
``a^dagger_{i_1} ... a^dagger_{i_k} |vac>``, which fixes the Jordan-Wigner
sign of ``a_j`` to the parity of the occupied modes below ``j``.

Everything here is dense and exponential in the number of modes; a mode cap
(default 12, overridable through ``FERMBEZZLE_FOCK_CAP`` or the ``cap``
argument) guards against accidental 2^n blow-ups.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .covariance import as_covariance
from .errors import DimensionMismatch, FermbezzleError, NotUnitary, TooManyModes

DEFAULT_CAP = 12
UNITARY_TOL = 1e-10


def mode_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get("FERMBEZZLE_FOCK_CAP")
    return int(env) if env else DEFAULT_CAP


def _check_modes(n: int, cap: int | None) -> None:
    limit = mode_cap(cap)
    if n > limit:
        raise TooManyModes(f"{n} modes exceeds the Fock-space cap of {limit}")


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    modes: int
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (2 ** self.modes, 2 ** self.modes):
            raise DimensionMismatch(f"expected a {2 ** self.modes}-dimensional matrix, got {m.shape}")
        if np.linalg.norm(m - m.conj().T) > 1e-10:
            raise FermbezzleError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-10:
            raise FermbezzleError(f"density matrix has trace {np.trace(m).real:.12g}")

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_positive(self, tol: float = 1e-9) -> bool:
        return self.min_eigenvalue() >= -tol


@dataclass(frozen=True, eq=False)
class FockUnitary:
    modes: int
    matrix: np.ndarray

    def conjugate(self, rho: FockDensityMatrix) -> FockDensityMatrix:
        """``U rho U^dagger``."""
        if rho.modes != self.modes:
            raise DimensionMismatch(f"{self.modes}-mode unitary applied to {rho.modes}-mode state")
        out = self.matrix @ rho.matrix @ self.matrix.conj().T
        return FockDensityMatrix(self.modes, 0.5 * (out + out.conj().T))


@dataclass(frozen=True)
class NumberDistribution:
    """Distribution of the total fermion number ``N``; index = particle count."""

    probabilities: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.arange(self.probabilities.size) @ self.probabilities)

    def total_variation(self, other: "NumberDistribution") -> float:
        return total_variation(self, other)


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    x = np.arange(2 ** n)
    counts = np.zeros(2 ** n, dtype=int)
    for i in range(n):
        counts += (x >> i) & 1
    counts.setflags(write=False)
    return counts


def annihilation_operators(n: int) -> list[np.ndarray]:
    """Dense matrices of ``a_0, ..., a_{n-1}`` in the occupation basis."""
    _check_modes(n, None)
    dim = 2 ** n
    x = np.arange(dim)
    ops = []
    for j in range(n):
        occupied = ((x >> j) & 1).astype(bool)
        below = x & ((1 << j) - 1)
        sign = np.where(popcounts(n)[below] % 2 == 0, 1.0, -1.0)
        a = np.zeros((dim, dim))
        src = x[occupied]
        a[src - (1 << j), src] = sign[occupied]
        ops.append(a)
    return ops


def number_operator(n: int) -> np.ndarray:
    return np.diag(popcounts(n).astype(float))


def _subsets(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.array(list(combinations(range(n), k)), dtype=int).reshape(-1, k)
    labels = (1 << idx).sum(axis=1)
    return idx, labels


def fock_unitary(u, cap: int | None = None) -> FockUnitary:
    """Second quantization ``Gamma(u)`` of a single-particle unitary.

    ``<J| Gamma(u) |I> = det(u[J, I])`` for occupied sets ``I``, ``J`` of equal
    size (rows and columns in increasing mode order); all other elements vanish.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n):
        raise NotUnitary(f"expected a square matrix, got {u.shape}")
    if np.linalg.norm(u.conj().T @ u - np.eye(n)) > UNITARY_TOL:
        raise NotUnitary("single-particle matrix is not unitary")
    _check_modes(n, cap)

    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    out[0, 0] = 1.0
    for k in range(1, n + 1):
        idx, labels = _subsets(n, k)
        count = idx.shape[0]
        block = np.empty((count, count), dtype=complex)
        rows_per_chunk = max(1, (1 << 22) // (count * k * k))
        for start in range(0, count, rows_per_chunk):
            rows = idx[start:start + rows_per_chunk]
            minors = u[rows[:, None, :, None], idx[None, :, None, :]]
            block[start:start + rows_per_chunk] = np.linalg.det(minors)
        out[np.ix_(labels, labels)] = block
    return FockUnitary(n, out)


def _product_diagonal(eigenvalues: np.ndarray) -> np.ndarray:
    """Diagonal of the product state with P(mode j empty) = eigenvalues[j]."""
    diag = np.ones(1)
    for lam in eigenvalues:
        # new mode is the next more significant bit
        diag = np.concatenate((diag * lam, diag * (1.0 - lam)))
    return diag


def gaussian_state(G, cap: int | None = None) -> FockDensityMatrix:
    """Density matrix ``rho_G`` whose Wick moments are determinants of ``G``.

    Built as ``Gamma(V) diag Gamma(V)^dagger`` from ``G = V diag(lambda) V^dagger``,
    with mode ``j`` empty with probability ``lambda_j`` in the rotated basis.
    """
    G = as_covariance(G)
    _check_modes(G.dim, cap)
    diag = _product_diagonal(G.eigenvalues)
    V = G.eigenvectors
    if np.allclose(V, np.eye(G.dim), atol=0.0, rtol=0.0):
        matrix = np.diag(diag).astype(complex)
    else:
        gamma = fock_unitary(V, cap=cap).matrix
        matrix = (gamma * diag) @ gamma.conj().T
        matrix = 0.5 * (matrix + matrix.conj().T)
    return FockDensityMatrix(G.dim, matrix)


def tensor(rho_a: FockDensityMatrix, rho_b: FockDensityMatrix) -> FockDensityMatrix:
    """State of the joint system with the modes of ``rho_a`` first.

    Exact for even states (all Gaussian states are even).
    """
    # first modes are the low bits, so they are the fast Kronecker index
    return FockDensityMatrix(rho_a.modes + rho_b.modes, np.kron(rho_b.matrix, rho_a.matrix))


def reduce_to_first(rho: FockDensityMatrix, keep: int) -> FockDensityMatrix:
    """Partial trace over every mode except the first ``keep``."""
    if not 0 <= keep <= rho.modes:
        raise DimensionMismatch(f"cannot keep {keep} of {rho.modes} modes")
    lo, hi = 2 ** keep, 2 ** (rho.modes - keep)
    t = rho.matrix.reshape(hi, lo, hi, lo)
    return FockDensityMatrix(keep, np.einsum("iajb,ij->ab", t, np.eye(hi)))


def _same_modes(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> None:
    if rho.modes != sigma.modes:
        raise DimensionMismatch(f"states on {rho.modes} and {sigma.modes} modes")


def trace_distance(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """``1/2 ||rho - sigma||_1``."""
    _same_modes(rho, sigma)
    diff = rho.matrix - sigma.matrix
    value = 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())
    return min(max(value, 0.0), 1.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def transition_probability(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """``(tr sqrt(rho) sqrt(sigma))^2`` (not Uhlmann's fidelity)."""
    _same_modes(rho, sigma)
    overlap = np.trace(_psd_sqrt(rho.matrix) @ _psd_sqrt(sigma.matrix)).real
    return float(min(max(overlap, 0.0), 1.0) ** 2)


def entropy(rho: FockDensityMatrix) -> float:
    """Von Neumann entropy in nats."""
    mu = np.linalg.eigvalsh(rho.matrix)
    mu = mu[mu > 1e-14]
    return float(-(mu * np.log(mu)).sum())


def number_distribution(G) -> NumberDistribution:
    """Poisson-binomial law of ``N`` with occupation probabilities ``1 - lambda_j``.

    Works at the covariance level for any number of modes.
    """
    G = as_covariance(G)
    probs = np.ones(1)
    for p in 1.0 - G.eigenvalues:
        probs = np.concatenate((probs * (1.0 - p), [0.0])) + np.concatenate(([0.0], probs * p))
    return NumberDistribution(probs)


def measured_number_distribution(rho: FockDensityMatrix) -> NumberDistribution:
    """Distribution of ``N`` read off the diagonal of a Fock density matrix."""
    diag = np.diag(rho.matrix).real
    return NumberDistribution(np.bincount(popcounts(rho.modes), weights=diag, minlength=rho.modes + 1))


def total_variation(p: NumberDistribution, q: NumberDistribution) -> float:
    a, b = p.probabilities, q.probabilities
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    return 0.5 * float(np.abs(a - b).sum())


def expectation(rho: FockDensityMatrix, op: np.ndarray) -> complex:
    return complex(np.trace(rho.matrix @ op))

