"""Covariance generators: ladder spectra, XX-chain ground states and random inputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .covariance import Covariance, validate
from .errors import FermbezzleError, OddLength, UnknownModel
from .linalg import haar_orthogonal, haar_unitary
from .selfdual import SelfDualCovariance, from_passive, majorana_basis


def ladder(n: int) -> Covariance:
    """Diagonal covariance with eigenvalues ``1 - j/n`` for ``j = 1..n``."""
    if n < 1:
        raise FermbezzleError(f"ladder needs n >= 1, got {n}")
    return Covariance.diagonal(1.0 - np.arange(1, n + 1) / n)


def hopping_matrix(L: int, boundary: str = "open") -> np.ndarray:
    """Single-particle XX Hamiltonian ``-sum_i (a_i^dagger a_{i+1} + h.c.)``.

    ``boundary="ring"`` closes the chain, antiperiodically when ``L/2`` is
    even so that the half-filled ground state is non-degenerate.
    """
    h = -(np.eye(L, k=1) + np.eye(L, k=-1))
    if boundary == "ring":
        sign = -1.0 if (L // 2) % 2 == 0 else 1.0
        h[0, -1] = h[-1, 0] = -sign
    elif boundary != "open":
        raise FermbezzleError(f"unknown boundary {boundary!r}")
    return h


def xx_chain_half(L: int, boundary: str = "open") -> Covariance:
    """Covariance of the first ``L/2`` sites of the half-filled XX chain on ``L`` sites."""
    if L % 2:
        raise OddLength(f"chain length must be even, got {L}")
    if L < 4:
        raise FermbezzleError(f"chain length must be at least 4, got {L}")
    _, phi = np.linalg.eigh(hopping_matrix(L, boundary))
    occupied = phi[:, : L // 2]
    # <a_j^dagger a_i> = (occupied occupied^dagger)_{ij}; G = 1 - that
    fermi = occupied @ occupied.conj().T
    half = L // 2
    return validate(np.eye(half) - fermi[:half, :half])


def random_unitary(n: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    return haar_unitary(n, np.random.default_rng(seed))


def random_covariance(n: int, seed: int | np.random.Generator | None = None) -> Covariance:
    """Haar-rotated covariance with independent uniform eigenvalues; deterministic per seed."""
    if n < 1:
        raise FermbezzleError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    values = rng.uniform(0.0, 1.0, n)
    u = haar_unitary(n, rng)
    return Covariance.from_eigh(values, u)


def random_projection(n: int, rank: int, seed: int | np.random.Generator | None = None) -> Covariance:
    """Pure passive covariance: projection onto a Haar-random ``rank``-dimensional subspace."""
    rng = np.random.default_rng(seed)
    values = np.r_[np.ones(rank), np.zeros(n - rank)]
    return Covariance.from_eigh(values, haar_unitary(n, rng))


def random_pure_bipartite(n_a: int, n_b: int, seed: int | np.random.Generator | None = None) -> Covariance:
    """Generic pure passive state on ``n_a + n_b`` modes, half filled (A modes first)."""
    n = n_a + n_b
    return random_projection(n, n // 2, seed)


def random_bogoliubov(m: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Random Bogoliubov transformation ``Q O Q^dagger`` with ``O`` Haar-orthogonal."""
    rng = np.random.default_rng(seed)
    q = majorana_basis(m)
    return q @ haar_orthogonal(2 * m, rng) @ q.conj().T


def random_selfdual(m: int, seed: int | np.random.Generator | None = None) -> SelfDualCovariance:
    """Generic non-passive self-dual covariance: a Bogoliubov rotation of a random passive one."""
    rng = np.random.default_rng(seed)
    s = from_passive(random_covariance(m, rng)).matrix
    u = random_bogoliubov(m, rng)
    return SelfDualCovariance(u.conj().T @ s @ u)


@dataclass(frozen=True)
class SpectrumModel:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def build(self) -> Covariance:
        p = self.params
        if self.kind == "ladder":
            return ladder(int(p["n"]))
        if self.kind in ("xx", "xx_chain_half"):
            return xx_chain_half(int(p["L"]), p.get("boundary", "open"))
        if self.kind in ("random", "random_haar"):
            return random_covariance(int(p["n"]), p.get("seed", 0))
        if self.kind == "explicit":
            return validate(np.asarray(p["matrix"]))
        raise UnknownModel(f"unknown spectrum model {self.kind!r}")
