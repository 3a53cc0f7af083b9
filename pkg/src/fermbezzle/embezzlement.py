"""Gaussian embezzlement: explicit matching unitaries and their certificates.

Given an embezzling covariance ``K`` with ``eps``-dense spectrum and two
covariances ``F``, ``G`` on ``d`` ancilla modes, :func:`construct_plan` builds a
passive unitary ``u`` on ``n + d`` modes (embezzler modes first) such that
``u (K + F) u^dagger`` is close to ``K + G``.  The unitary matches the sorted
spectra of ``K + F`` and ``K + G`` on a small ``eps``-dense, ``delta``-confined
part of ``K``, and acts trivially elsewhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from . import fock
from .bounds import eta
from .covariance import (
    Covariance,
    as_covariance,
    direct_sum,
    select_dense_subspace,
    spectral_density,
    validate,
)
from .errors import (
    BoundViolation,
    DimensionMismatch,
    IncompatibleSplit,
    NonFaithfulMarginal,
    NotSorted,
    TooManyModes,
    TrivialSpectrum,
)
from .linalg import hermitian_part, spectral_apply

THEOREM_CONSTANT = 11.0
FAITHFUL_TOL = 1e-12


def _same_dim(a: Covariance, b: Covariance) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions {a.dim} and {b.dim}")


def _sorted_desc(x) -> np.ndarray:
    return -np.sort(-np.asarray(x, dtype=float), kind="stable")


def eta_sorted(a: np.ndarray, b: np.ndarray) -> float:
    """``eta`` of two commuting covariances given their paired eigenvalues."""
    a, b = np.clip(a, 0.0, 1.0), np.clip(b, 0.0, 1.0)
    return float(np.linalg.norm(np.sqrt((1 - a) * b) - np.sqrt(a * (1 - b))))


def _overlap_gain(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``c(a_i, b_j) = a_i b_j + sqrt(a_i(1-a_i) b_j(1-b_j))`` as a matrix."""
    a, b = np.clip(a, 0.0, 1.0)[:, None], np.clip(b, 0.0, 1.0)[None, :]
    return a * b + np.sqrt(a * (1 - a) * b * (1 - b))


def eta_min(A, B) -> tuple[float, np.ndarray]:
    """``inf_u eta(u A u^dagger, B)`` and an optimal eigenvalue pairing.

    ``eta^2 = tr A + tr B - 2 sum_ij D_ij c(alpha_i, beta_j)`` with ``D``
    doubly stochastic, so the infimum is attained at a permutation and is
    found exactly by linear assignment.  Returns ``perm`` such that the
    ``i``-th eigenvalue of ``A`` is paired with the ``perm[i]``-th of ``B``.
    """
    A, B = as_covariance(A), as_covariance(B)
    _same_dim(A, B)
    alpha, beta = A.eigenvalues, B.eigenvalues
    gain = _overlap_gain(alpha, beta)
    rows, cols = linear_sum_assignment(gain, maximize=True)
    value = alpha.sum() + beta.sum() - 2.0 * gain[rows, cols].sum()
    perm = np.empty_like(cols)
    perm[rows] = cols
    return math.sqrt(max(value, 0.0)), perm


# --- sorted spectra -------------------------------------------------------


def sorted_eigen_distance(A, B, p: float = 2) -> float:
    """``|| lambda(A)_sorted - lambda(B)_sorted ||_p = inf_u || u A u^dagger - B ||_p``."""
    A, B = as_covariance(A), as_covariance(B)
    _same_dim(A, B)
    if p not in (1, 2, np.inf, math.inf, "inf"):
        raise ValueError(f"p must be 1, 2 or inf, got {p!r}")
    order = np.inf if p == "inf" else p
    return float(np.linalg.norm(A.eigenvalues - B.eigenvalues, ord=order))


@dataclass(frozen=True)
class SortedSpectrumMatch:
    joint_source: np.ndarray
    joint_target: np.ndarray
    linf_gap: float
    l1_gap: float


def sorted_spectrum_match(k, f, g) -> SortedSpectrumMatch:
    """Sorted joint spectra ``(k + f)`` and ``(k + g)`` with their distances."""
    src = _sorted_desc(np.r_[k, f])
    tgt = _sorted_desc(np.r_[k, g])
    diff = np.abs(src - tgt)
    return SortedSpectrumMatch(src, tgt, float(diff.max(initial=0.0)), float(diff.sum()))


def _check_sorted(name: str, x: np.ndarray) -> None:
    if np.any(np.diff(x) > 0):
        raise NotSorted(f"{name} must be non-increasing")


def _vector_density(k: np.ndarray) -> float:
    points = np.r_[1.0, k, 0.0]
    gaps = points[:-1] - points[1:]
    return float(max(gaps[0], gaps[-1], (gaps[1:-1].max(initial=0.0)) / 2))


def pad_endpoints(k: np.ndarray, eps: float) -> np.ndarray:
    """``(max(k_1 + eps, 1), k_1, ..., k_n, min(k_n - eps, 0))``."""
    return np.r_[max(k[0] + eps, 1.0), k, min(k[-1] - eps, 0.0)]


def interleave_bound_check(k, f, g, *, check: bool = True) -> tuple[float, float]:
    """Compare ``||(k+f)_sorted - (k+g)_sorted||_inf`` with ``d * max gap(k)``.

    All inputs must be non-increasing.  If ``k`` does not bracket ``f`` and
    ``g``, the gap is measured on the padded vector of :func:`pad_endpoints`
    with ``eps`` the spectral density of ``k``.  Returns ``(lhs, rhs)``; with
    ``check=True`` a :class:`BoundViolation` is raised unless
    ``lhs <= max_{|i-j| <= d} |k_i - k_j| <= rhs``.
    """
    k, f, g = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (k, f, g))
    for name, x in (("k", k), ("f", f), ("g", g)):
        _check_sorted(name, x)
    if f.size != g.size:
        raise DimensionMismatch(f"f and g have sizes {f.size} and {g.size}")
    d = f.size
    lhs = sorted_spectrum_match(k, f, g).linf_gap
    bracketed = k[0] >= max(f[0], g[0]) and k[-1] <= min(f[-1], g[-1])
    kt = k if bracketed else pad_endpoints(k, _vector_density(k))
    gaps = kt[:-1] - kt[1:]
    rhs = d * float(gaps.max(initial=0.0))
    if check:
        span = kt[: kt.size - d] - kt[d:] if kt.size > d else np.array([kt[0] - kt[-1]])
        mid = float(span.max(initial=0.0))
        tol = 1e-12
        if not (lhs <= mid + tol and mid <= rhs + tol):
            raise BoundViolation(f"interleaving bound fails: {lhs:.6g} <= {mid:.6g} <= {rhs:.6g}")
    return lhs, rhs


def covariance_distance_no_go(F, G, K, *, check: bool = True) -> tuple[float, float]:
    """Sorted l1 distance of ``(F + K, G + K)`` and of ``(F, G)``; the first is never smaller."""
    F, G, K = as_covariance(F), as_covariance(G), as_covariance(K)
    _same_dim(F, G)
    lhs = sorted_spectrum_match(K.eigenvalues, F.eigenvalues, G.eigenvalues).l1_gap
    rhs = sorted_eigen_distance(F, G, 1)
    if check and lhs < rhs - 1e-12:
        raise BoundViolation(f"sorted l1 distance dropped from {rhs:.6g} to {lhs:.6g}")
    return lhs, rhs


# --- the protocol --------------------------------------------------------


def protocol_delta(eps: float, d: int) -> float:
    """``delta = sqrt(2d/eps + d^2) eps / 2``, clamped to ``1/2``."""
    return min(0.5, 0.5 * math.sqrt(2.0 * d / eps + d * d) * eps)


def theorem_bound(eps: float, d: int) -> float:
    return THEOREM_CONSTANT * d * eps ** 0.25


def chain_bound(eps: float, d: int, delta: float, n_eps: int) -> float:
    """``2 sqrt(2 d delta) (2 + sqrt((n_eps + d) d) eps / delta)``: the proof's intermediate bound."""
    return 2.0 * math.sqrt(2.0 * d * delta) * (2.0 + math.sqrt((n_eps + d) * d) * eps / delta)


@dataclass(frozen=True, eq=False)
class EmbezzlementPlan:
    """All choices of one run of the protocol plus its certificates.

    ``subspace_indices`` and ``active_indices`` index ``K.eigenvalues``;
    the unitary acts as ``block_unitary`` on the span of the active
    eigenvectors of ``K`` together with the ``d`` ancilla modes (in this
    order) and as the identity elsewhere.  ``matching[i] = j`` pairs the
    ``i``-th eigenvector of the active block of ``K + F`` with the ``j``-th
    of ``K + G`` (active ``K`` directions first, then the eigenvectors of
    ``F`` resp. ``G``).
    """

    K: Covariance
    F: Covariance
    G: Covariance
    eps: float
    delta: float
    subspace_indices: np.ndarray
    active_indices: np.ndarray
    matching: np.ndarray
    block_unitary: np.ndarray
    eta_achieved: float
    certified_bound: float
    theorem_bound: float
    chain_bound: float

    @property
    def n(self) -> int:
        return self.K.dim

    @property
    def d(self) -> int:
        return self.F.dim

    @property
    def n_eps(self) -> int:
        return int(self.subspace_indices.size)

    @property
    def vacuous(self) -> bool:
        """True when the theorem bound exceeds 1 and so says nothing."""
        return self.theorem_bound > 1.0

    @property
    def nonvacuous_regime(self) -> bool:
        return self.eps * self.d ** 4 <= THEOREM_CONSTANT ** -4

    def _embedding(self) -> np.ndarray:
        n, d = self.n, self.d
        emb = np.zeros((n + d, self.active_indices.size + d), dtype=complex)
        emb[:n, : self.active_indices.size] = self.K.eigenvectors[:, self.active_indices]
        emb[n:, self.active_indices.size:] = np.eye(d)
        return emb

    @cached_property
    def unitary(self) -> np.ndarray:
        """The full ``(n + d) x (n + d)`` single-particle unitary."""
        emb = self._embedding()
        size = self.n + self.d
        u = np.eye(size, dtype=complex) + emb @ (self.block_unitary - np.eye(emb.shape[1])) @ emb.conj().T
        return u

    def initial_covariance(self) -> Covariance:
        return direct_sum(self.K, self.F)

    def target_covariance(self) -> Covariance:
        return direct_sum(self.K, self.G)

    def final_covariance(self) -> Covariance:
        """``u (K + F) u^dagger``."""
        return self.initial_covariance().conjugate_by(self.unitary)

    def eta_full(self) -> float:
        """``eta`` evaluated on the full ``n + d`` mode space (costlier than the stored value)."""
        return eta(self.final_covariance(), self.target_covariance())

    def check_certificates(self) -> None:
        """Raise :class:`BoundViolation` if a stored certificate fails."""
        raw = math.sqrt(2.0) * self.eta_achieved
        if raw > self.chain_bound * (1 + 1e-9) + 1e-12:
            raise BoundViolation(f"sqrt(2) eta = {raw:.6g} exceeds the chain bound {self.chain_bound:.6g}")
        if self.certified_bound > self.theorem_bound + 1e-9:
            raise BoundViolation(f"certificate {self.certified_bound:.6g} exceeds {self.theorem_bound:.6g}")


def _block_eigen(k_values: np.ndarray, M: Covariance) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of ``diag(k_values) + M`` with descending stable order."""
    a = k_values.size
    values = np.r_[k_values, M.eigenvalues]
    vectors = np.zeros((a + M.dim, a + M.dim), dtype=complex)
    vectors[:a, :a] = np.eye(a)
    vectors[a:, a:] = M.eigenvectors
    order = np.argsort(-values, kind="stable")
    return values[order], order, vectors[:, order]


def construct_plan(K, F, G, *, use_window: bool = True) -> EmbezzlementPlan:
    """Build the matching unitary for ``K + F -> K + G``.

    Steps: measure the density ``eps`` of ``K``; choose ``delta``; select an
    ``eps``-dense set of at most ``ceil(2/eps)`` eigen-directions of ``K``;
    keep those with eigenvalue in ``[delta, 1 - delta]`` (all of them if
    ``use_window`` is False); match the sorted eigenvectors of ``K + F`` and
    ``K + G`` on that block.

    Raises
    ------
    TrivialSpectrum
        If ``eps >= 1`` (``K`` has no usable spectrum).
    DimensionMismatch
        If ``F`` and ``G`` differ in size.
    """
    K, F, G = as_covariance(K), as_covariance(F), as_covariance(G)
    _same_dim(F, G)
    d = F.dim
    eps = spectral_density(K).density
    if eps >= 1.0:
        raise TrivialSpectrum(f"spectral density {eps} >= 1")
    delta = protocol_delta(eps, d)
    # the measured density is attained, so select with the next float above it
    selected, _ = select_dense_subspace(K, float(np.nextafter(eps, 2.0)))
    lam = K.eigenvalues[selected]
    if use_window:
        keep = (lam >= delta) & (lam <= 1.0 - delta)
        active = selected[keep]
    else:
        active = selected
    k_active = K.eigenvalues[active]

    src_vals, src_order, w_f = _block_eigen(k_active, F)
    tgt_vals, tgt_order, w_g = _block_eigen(k_active, G)
    block_u = w_g @ w_f.conj().T
    matching = np.empty_like(src_order)
    matching[src_order] = tgt_order

    # unitary and direct-sum invariance reduce eta to the active block, on
    # which both transformed covariances are diagonal in the same basis
    value = eta_sorted(src_vals, tgt_vals)
    return EmbezzlementPlan(
        K=K,
        F=F,
        G=G,
        eps=float(eps),
        delta=float(delta),
        subspace_indices=np.asarray(selected, dtype=int),
        active_indices=np.asarray(active, dtype=int),
        matching=matching.astype(int),
        block_unitary=block_u,
        eta_achieved=value,
        certified_bound=min(1.0, math.sqrt(2.0) * value),
        theorem_bound=theorem_bound(eps, d),
        chain_bound=chain_bound(eps, d, delta, selected.size),
    )


def verify_plan_exact(plan: EmbezzlementPlan, cap: int | None = None) -> float:
    """Exact Fock-space trace distance between ``Gamma(u) rho_{K+F} Gamma(u)^dagger`` and ``rho_{K+G}``."""
    final = fock.gaussian_state(plan.final_covariance(), cap=cap)
    target = fock.gaussian_state(plan.target_covariance(), cap=cap)
    return fock.trace_distance(final, target)


# --- kappa at oracle scale -----------------------------------------------


@dataclass(frozen=True)
class KappaEstimate:
    upper: float
    lower: float
    eta_min: float
    best_unitary: np.ndarray
    candidates: int


def _tie_groups(values: np.ndarray, tol: float = 1e-12) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, values.size + 1):
        if i == values.size or values[start] - values[i] > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def _tie_permutations(values: np.ndarray, limit: int) -> list[np.ndarray]:
    """Permutations of sorted positions that only reshuffle equal eigenvalues."""
    groups = [g for g in _tie_groups(values) if g.size > 1]
    base = np.arange(values.size)
    perms = [base]
    per_group = [list(itertools.permutations(g)) for g in groups]
    for combo in itertools.islice(itertools.product(*per_group), 1, limit):
        p = base.copy()
        for g, image in zip(groups, combo):
            p[g] = image
        perms.append(p)
    return perms


def kappa_exact_small(K, F, G, *, trials: int = 100, seed: int = 0, step: float = 0.1,
                      max_modes: int = 9, tie_limit: int = 720) -> KappaEstimate:
    """Upper estimate of ``kappa(F, G | K)`` by exact Fock evaluation of candidate unitaries.

    Candidates are all sorted matchings differing by permutations of equal
    eigenvalues, the assignment-optimal matching for ``eta``, the windowed
    protocol unitary, followed by a seeded random local search
    ``u -> exp(i H) u``.  The companion lower bound is
    ``1 - exp(-eta_min^2 / 2)`` with ``eta_min = inf_u eta``.
    """
    K, F, G = as_covariance(K), as_covariance(F), as_covariance(G)
    _same_dim(F, G)
    total = K.dim + F.dim
    if total > max_modes:
        raise TooManyModes(f"{total} modes exceeds the limit of {max_modes}")
    initial, target = direct_sum(K, F), direct_sum(K, G)
    rho_target = fock.gaussian_state(target, cap=max_modes)

    def distance(u: np.ndarray) -> float:
        moved = Covariance.from_eigh(initial.eigenvalues, u @ initial.eigenvectors)
        return fock.trace_distance(fock.gaussian_state(moved, cap=max_modes), rho_target)

    wf, wg = initial.eigenvectors, target.eigenvectors
    candidates = [wg[:, p] @ wf.conj().T for p in _tie_permutations(target.eigenvalues, tie_limit)]
    value, perm = eta_min(initial, target)
    candidates.append(wg[:, perm] @ wf.conj().T)
    candidates.append(construct_plan(K, F, G).unitary)

    scores = [distance(u) for u in candidates]
    best = int(np.argmin(scores))
    best_u, best_score = candidates[best], scores[best]

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if best_score <= 0.0:
            break
        h = rng.standard_normal((total, total)) + 1j * rng.standard_normal((total, total))
        h = step * hermitian_part(h) / math.sqrt(total)
        trial = expm(1j * h) @ best_u
        score = distance(trial)
        if score < best_score:
            best_u, best_score = trial, score
        else:
            step *= 0.97
    lower = 1.0 - math.exp(-value ** 2 / 2.0)
    return KappaEstimate(best_score, lower, value, best_u, len(candidates) + trials)


# --- bipartite lift ------------------------------------------------------


def _coupling_isometry(state: Covariance, n_a: int) -> np.ndarray:
    """``u~ = G_BA (G_A (1 - G_A))^{-1/2}`` for a pure bipartite covariance."""
    g = state.matrix
    g_a, g_ba = g[:n_a, :n_a], g[n_a:, :n_a]
    w = np.linalg.eigvalsh(g_a)
    if np.any(w * (1 - w) <= FAITHFUL_TOL):
        raise NonFaithfulMarginal("marginal on A has eigenvalues in {0, 1}")
    inv_sqrt = spectral_apply(g_a, lambda x: 1.0 / np.sqrt(x * (1.0 - x)))
    return g_ba @ inv_sqrt


def _complement_basis(state: Covariance, iso: np.ndarray, n_a: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of ``range(iso)^perp`` diagonalizing ``G_B`` there (descending)."""
    n_b = iso.shape[0]
    proj = np.eye(n_b) - iso @ iso.conj().T
    w, v = np.linalg.eigh(hermitian_part(proj))
    basis = v[:, w > 0.5]
    g_b = state.matrix[n_a:, n_a:]
    vals, rot = np.linalg.eigh(hermitian_part(basis.conj().T @ g_b @ basis))
    order = np.argsort(-vals, kind="stable")
    return np.round(vals[order]), basis @ rot[:, order]


def _is_pure(state: Covariance) -> bool:
    return state.is_projection(1e-9)


def lift_to_bipartite(u_a, initial, target, n_a: int) -> tuple[np.ndarray, np.ndarray]:
    """Local unitary ``u_B`` on B completing ``u_A`` on A for pure bipartite states.

    ``initial`` and ``target`` are pure passive covariances on ``n_a + n_b``
    modes (A first) with faithful A marginals.  With
    ``u_B = u~_target u_A u~_initial^dagger`` the global ``eta`` equals
    ``sqrt(2)`` times the marginal ``eta`` of ``u_A``.  ``u_a`` may be an
    :class:`EmbezzlementPlan`.
    """
    if isinstance(u_a, EmbezzlementPlan):
        u_a = u_a.unitary
    u_a = np.asarray(u_a, dtype=complex)
    T, S = as_covariance(initial), as_covariance(target)
    _same_dim(T, S)
    if u_a.shape != (n_a, n_a) or not 0 < n_a < T.dim:
        raise IncompatibleSplit(f"u_A of shape {u_a.shape} does not fit a split at {n_a}")
    if not (_is_pure(T) and _is_pure(S)):
        raise IncompatibleSplit("bipartite states must be pure")
    iso_t = _coupling_isometry(T, n_a)
    iso_s = _coupling_isometry(S, n_a)
    u_b = iso_s @ u_a @ iso_t.conj().T
    if T.dim - n_a > n_a:
        vals_t, comp_t = _complement_basis(T, iso_t, n_a)
        vals_s, comp_s = _complement_basis(S, iso_s, n_a)
        if not np.array_equal(vals_t, vals_s):
            raise IncompatibleSplit("pure parts of the B marginals have different fillings")
        u_b = u_b + comp_s @ comp_t.conj().T
    return u_a, u_b


def local_unitary(u_a: np.ndarray, u_b: np.ndarray) -> np.ndarray:
    n_a, n_b = u_a.shape[0], u_b.shape[0]
    out = np.zeros((n_a + n_b, n_a + n_b), dtype=complex)
    out[:n_a, :n_a] = u_a
    out[n_a:, n_a:] = u_b
    return out


def bipartite_instance(marginal_initial, marginal_target) -> tuple[Covariance, Covariance]:
    """Pure bipartite covariances (A modes first) purifying two A marginals."""
    from .selfdual import passive_purification

    return passive_purification(marginal_initial), passive_purification(marginal_target)


# --- particle-number bookkeeping -----------------------------------------


@dataclass(frozen=True)
class NumberShift:
    total_variation: float
    mean_shift: float
    total_system_variation: float


def number_shift(plan: EmbezzlementPlan) -> NumberShift:
    """Change of the embezzler's fermion-number distribution under the protocol."""
    n = plan.n
    before = fock.number_distribution(plan.K)
    final = plan.final_covariance()
    after = fock.number_distribution(validate(final.matrix[:n, :n]))
    whole = fock.total_variation(
        fock.number_distribution(plan.initial_covariance()), fock.number_distribution(final)
    )
    return NumberShift(fock.total_variation(before, after), after.mean - before.mean, whole)
