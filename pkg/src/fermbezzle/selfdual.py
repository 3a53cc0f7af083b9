r"""Self-dual and Majorana descriptions of general (non-passive) Gaussian states.

The doubled single-particle space :math:`\mathbb C^m \oplus \mathbb C^m` carries
the antiunitary involution :math:`C(\xi_1 \oplus \xi_2) = \bar\xi_2 \oplus \bar\xi_1`
(complex conjugation in the standard basis composed with the block swap).  On
operators this reads ``C X C = swap @ conj(X) @ swap``.  A self-dual
covariance ``S`` satisfies ``0 <= S <= 1`` and ``S + C S C = 1``; the field
operators are ``B(xi_1 + xi_2) = a^dagger(xi_1) + a(conj(xi_2))`` and
``omega(B(xi)^dagger B(eta)) = <xi, S eta>``.

The Majorana basis of the real subspace ``{v : C v = v}`` is
``v_j = e_j + e_j`` and ``v_{j+m} = i e_j - i e_j``; in it the Majorana
covariance ``A = -i (2S - 1)`` is a real antisymmetric matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .covariance import Covariance, as_covariance, validate
from .errors import (
    DimensionMismatch,
    FermbezzleError,
    IncompatibleSplit,
    NotAntisymmetric,
    NotBasisProjection,
    NotReal,
    NotSelfDual,
    OddDimension,
    PatternTooLong,
)
from .linalg import hermitian_part, sqrt_complement, sqrt_psd

TOL = 1e-10
PURE_THRESHOLD = 1e-12
MAX_PATTERN = 8


def swap(m: int) -> np.ndarray:
    """Block swap ``xi_1 + xi_2 -> xi_2 + xi_1`` on the doubled space."""
    z, one = np.zeros((m, m)), np.eye(m)
    return np.block([[z, one], [one, z]])


def conjugate_by_c(x: np.ndarray) -> np.ndarray:
    """``C X C`` for a linear operator ``X`` on the doubled space."""
    s = swap(x.shape[0] // 2)
    return s @ np.conj(x) @ s


def majorana_basis(m: int) -> np.ndarray:
    """Unitary whose columns are the Majorana basis vectors divided by sqrt(2)."""
    one = np.eye(m)
    return np.block([[one, 1j * one], [one, -1j * one]]) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class SelfDualCovariance:
    matrix: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.matrix, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise NotSelfDual(f"need an even square matrix, got shape {s.shape}")
        if np.linalg.norm(s - s.conj().T) > TOL:
            raise NotSelfDual("matrix is not Hermitian")
        s = hermitian_part(s)
        w = np.linalg.eigvalsh(s)
        if w[0] < -TOL or w[-1] > 1.0 + TOL:
            raise NotSelfDual(f"spectrum [{w[0]:.3g}, {w[-1]:.3g}] leaves [0, 1]")
        defect = np.linalg.norm(s + conjugate_by_c(s) - np.eye(s.shape[0]))
        if defect > TOL:
            raise NotSelfDual(f"||S + CSC - 1|| = {defect:.3e}")
        object.__setattr__(self, "matrix", s)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2

    def is_projection(self, tol: float = TOL) -> bool:
        return bool(np.linalg.norm(self.matrix @ self.matrix - self.matrix) <= tol)


@dataclass(frozen=True, eq=False)
class BasisProjection(SelfDualCovariance):
    """Self-dual covariance of a pure Gaussian state (``S^2 = S``)."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_projection():
            raise NotBasisProjection("S^2 != S")


@dataclass(frozen=True, eq=False)
class MajoranaCovariance:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix)
        if np.iscomplexobj(a):
            if np.abs(a.imag).max(initial=0.0) > 1e-12:
                raise NotReal("Majorana covariance must be real")
            a = a.real
        a = np.asarray(a, dtype=float)
        if np.abs(a + a.T).max(initial=0.0) > 1e-12:
            raise NotAntisymmetric("Majorana covariance must be antisymmetric")
        if a.size and np.linalg.norm(a, 2) > 1.0 + TOL:
            raise FermbezzleError("Majorana covariance has singular values above 1")
        object.__setattr__(self, "matrix", 0.5 * (a - a.T))

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


def _as_selfdual(x) -> SelfDualCovariance:
    if isinstance(x, SelfDualCovariance):
        return x
    if isinstance(x, Covariance):
        return from_passive(x)
    return SelfDualCovariance(np.asarray(x))


def _as_matrix(x) -> np.ndarray:
    return np.asarray(x.matrix if hasattr(x, "matrix") else x, dtype=complex)


def from_passive(G) -> SelfDualCovariance:
    """``S = G + (1 - conj(G))`` (block diagonal) for a passive covariance ``G``."""
    G = as_covariance(G)
    g = G.matrix
    z = np.zeros_like(g)
    s = np.block([[g, z], [z, np.eye(G.dim) - np.conj(g)]])
    return BasisProjection(s) if G.is_projection() else SelfDualCovariance(s)


def to_majorana(S) -> MajoranaCovariance:
    S = _as_selfdual(S)
    q = majorana_basis(S.modes)
    a = q.conj().T @ (-1j * (2.0 * S.matrix - np.eye(2 * S.modes))) @ q
    residue = np.abs(a.imag).max(initial=0.0)
    if residue > TOL:
        raise NotReal(f"imaginary residue {residue:.3e}; S is not C-compatible")
    return MajoranaCovariance(a.real)


def from_majorana(A) -> SelfDualCovariance:
    """Inverse of :func:`to_majorana`: ``S = (1 + i A) / 2``."""
    a = A.matrix if isinstance(A, MajoranaCovariance) else np.asarray(A, dtype=float)
    q = majorana_basis(a.shape[0] // 2)
    op = q @ a @ q.conj().T
    return SelfDualCovariance(0.5 * (np.eye(a.shape[0]) + 1j * op))


def passive_majorana_formula(G) -> np.ndarray:
    """Closed form ``1_2 (x) 2 Im G + i sigma_y (x) (2 Re G - 1)`` of the Majorana matrix."""
    g = as_covariance(G).matrix
    i_sigma_y = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(2), 2.0 * g.imag) + np.kron(i_sigma_y, 2.0 * g.real - np.eye(g.shape[0]))


def purification_projection(x) -> np.ndarray:
    """Projection ``[[S, sqrt(S(1-S))], [sqrt(S(1-S)), 1 - S]]`` on the doubled space.

    Accepts any positive contraction (passive or self-dual covariance, or a
    plain matrix).  The result is a projection whose upper-left block is ``S``.
    """
    s = _as_matrix(x)
    off = sqrt_psd(s) @ sqrt_complement(s)
    off = hermitian_part(off)
    return np.block([[s, off], [off, np.eye(s.shape[0]) - s]])


def passive_purification(G) -> Covariance:
    """Pure passive covariance on ``2n`` modes whose first ``n`` modes carry ``G``."""
    return validate(purification_projection(as_covariance(G)))


def rotation_unitary(x) -> np.ndarray:
    """``U_S = [[sqrt(S), -sqrt(1-S)], [sqrt(1-S), sqrt(S)]]``."""
    s = _as_matrix(x)
    a, b = sqrt_psd(s), sqrt_complement(s)
    return np.block([[a, -b], [b, a]])


def eta_unitary_square(S, T) -> float:
    """``||U_S^2 - U_T^2||_2 / (2 sqrt 2)``, which equals ``eta(S, T)``.

    In the scalar case ``U_s`` is a rotation by ``theta`` with
    ``cos(theta) = sqrt(s)``, so ``||U_s^2 - U_t^2||_2 = 2 sqrt 2 |sin(theta_s - theta_t)|``
    while ``eta = |sin(theta_s - theta_t)|``.
    """
    us, ut = rotation_unitary(S), rotation_unitary(T)
    return float(np.linalg.norm(us @ us - ut @ ut)) / (2.0 * math.sqrt(2.0))


def araki_transition(S, T) -> float:
    """Transition probability ``det(M M^dagger)^(1/2)`` of two Gaussian states.

    ``M = sqrt(S) sqrt(T) + sqrt(1-S) sqrt(1-T)`` with self-dual covariances;
    passive covariances are lifted with :func:`from_passive` first.
    """
    s, t = _as_selfdual(S).matrix, _as_selfdual(T).matrix
    if s.shape != t.shape:
        raise DimensionMismatch(f"shapes {s.shape} and {t.shape}")
    m = sqrt_psd(s) @ sqrt_psd(t) + sqrt_complement(s) @ sqrt_complement(t)
    # singular values avoid the under/overflow of det on large blocks
    sv = np.linalg.svd(m, compute_uv=False)
    return float(min(1.0, np.prod(sv)))


# --- Bogoliubov transformations -------------------------------------------


def is_bogoliubov(u: np.ndarray, tol: float = TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    unitary = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol
    return bool(unitary and np.linalg.norm(conjugate_by_c(u) - u) <= tol)


def swap_bogoliubov(m: int) -> np.ndarray:
    """Particle-hole swap ``xi_1 + xi_2 -> xi_2 + xi_1``; maps ``G`` to ``1 - conj(G)``."""
    if m < 1:
        raise FermbezzleError("need at least one mode")
    return swap(m).astype(complex)


def passive_bogoliubov(v: np.ndarray) -> np.ndarray:
    """Doubled-space form ``v + conj(v)`` of a passive single-particle unitary."""
    v = np.asarray(v, dtype=complex)
    z = np.zeros_like(v)
    return np.block([[v, z], [z, np.conj(v)]])


def apply_bogoliubov(S, u: np.ndarray) -> SelfDualCovariance:
    """Covariance ``u^dagger S u`` of the transformed state ``omega o alpha_u``."""
    if not is_bogoliubov(u):
        raise FermbezzleError("u is not a Bogoliubov transformation (unitary with CuC = u)")
    s = _as_selfdual(S).matrix
    return SelfDualCovariance(hermitian_part(u.conj().T @ s @ u))


def passivize(S) -> tuple[Covariance, np.ndarray]:
    """Bogoliubov ``u`` with ``u^dagger S u = G + (1 - conj(G))``.

    Eigenvectors with eigenvalue above 1/2 span half of the target; the
    ``1/2``-eigenspace is split into a Lagrangian pair using a real (C-fixed)
    basis.  Returns the passive covariance ``G`` (spectrum in ``[1/2, 1]``)
    and ``u``.
    """
    s = _as_selfdual(S).matrix
    m = s.shape[0] // 2
    w, vecs = np.linalg.eigh(s)
    upper = vecs[:, w > 0.5 + 1e-9]
    half = vecs[:, np.abs(w - 0.5) <= 1e-9]
    columns = [upper]
    if half.shape[1]:
        q = majorana_basis(m)
        coords = q.conj().T @ half
        real_span = np.hstack([coords.real, coords.imag])
        left, _, _ = np.linalg.svd(real_span, full_matrices=False)
        r = left[:, : half.shape[1]]
        pairs = (r[:, 0::2] + 1j * r[:, 1::2]) / math.sqrt(2.0)
        columns.append(q @ pairs)
    v_plus = np.hstack(columns)
    if v_plus.shape[1] != m:
        raise NotSelfDual("spectrum is not symmetric about 1/2")
    u = np.hstack([v_plus, swap(m) @ np.conj(v_plus)])
    g = hermitian_part(v_plus.conj().T @ s @ v_plus)
    return validate(g), u


# --- bipartite normal form -----------------------------------------------


@dataclass(frozen=True, eq=False)
class NormalForm:
    """Split of a bipartite pure covariance into pure and entangled blocks.

    All blocks live in the regrouped layout ``(h_A + h_A) + (h_B + h_B)``.
    ``basis_*`` hold orthonormal columns spanning the faithful (``r``) and
    pure (``n``) parts; ``faithful_a`` is diagonal in ``basis_a_faithful``.
    """

    q_a: np.ndarray
    faithful_a: np.ndarray
    v: np.ndarray
    q_b: np.ndarray
    basis_a_faithful: np.ndarray
    basis_a_pure: np.ndarray
    basis_b_faithful: np.ndarray
    basis_b_pure: np.ndarray
    order: np.ndarray

    def assemble(self) -> np.ndarray:
        """Rebuild ``S`` in the original ``(h_A + h_B) + (h_A + h_B)`` layout."""
        ra, na, rb, nb = self.basis_a_faithful, self.basis_a_pure, self.basis_b_faithful, self.basis_b_pure
        s = self.faithful_a
        cross = sqrt_psd(s) @ sqrt_complement(s)
        sa = ra @ s @ ra.conj().T + na @ self.q_a @ na.conj().T
        sb = rb @ self.v @ (np.eye(s.shape[0]) - s) @ self.v.conj().T @ rb.conj().T + nb @ self.q_b @ nb.conj().T
        sba = rb @ self.v @ cross @ ra.conj().T
        regrouped = np.block([[sa, sba.conj().T], [sba, sb]])
        out = np.empty_like(regrouped)
        out[np.ix_(self.order, self.order)] = regrouped
        return out


def _regroup_order(m: int, n_a: int) -> np.ndarray:
    a = np.r_[np.arange(n_a), m + np.arange(n_a)]
    b = np.r_[np.arange(n_a, m), m + np.arange(n_a, m)]
    return np.r_[a, b]


def _split_spectrum(block: np.ndarray):
    w, vecs = np.linalg.eigh(block)
    faithful = w * (1.0 - w) > PURE_THRESHOLD
    return w, vecs, faithful


def normal_form(S, n_a: int, *, check_selfdual: bool = True, regroup: bool = True) -> NormalForm:
    """Normal form of a pure bipartite state with subsystem A = the first ``n_a`` modes.

    The A-B coupling is ``S_BA = v |S_BA|`` (polar decomposition); ``v``
    restricts to a unitary between the faithful parts of the marginals.
    Pass ``check_selfdual=False`` to decompose a projection that is only
    self-dual relative to a different conjugation, and ``regroup=False`` when
    the first ``2 n_a`` coordinates already span A's doubled space (both hold
    for a purification built by :func:`purification_projection`).
    """
    if check_selfdual:
        S = S if isinstance(S, BasisProjection) else BasisProjection(_as_matrix(S))
        s = S.matrix
    else:
        s = _as_matrix(S)
        if np.linalg.norm(s @ s - s) > TOL:
            raise NotBasisProjection("S^2 != S")
    m = s.shape[0] // 2
    if not 0 <= n_a <= m:
        raise IncompatibleSplit(f"cannot split {m} modes at {n_a}")
    order = _regroup_order(m, n_a) if regroup else np.arange(2 * m)
    r = s[np.ix_(order, order)]
    k = 2 * n_a
    sa, sb, sba = r[:k, :k], r[k:, k:], r[k:, :k]

    wa, va, fa = _split_spectrum(sa)
    wb, vb, fb = _split_spectrum(sb)
    if fa.sum() != fb.sum():
        raise NotBasisProjection("faithful parts of the two marginals differ in dimension")
    ra, rb = va[:, fa], vb[:, fb]
    s_tilde = np.diag(wa[fa]).astype(complex)
    scale = 1.0 / np.sqrt(wa[fa] * (1.0 - wa[fa]))
    v_tilde = rb.conj().T @ sba @ ra * scale
    return NormalForm(
        q_a=np.diag(np.round(wa[~fa])).astype(complex),
        faithful_a=s_tilde,
        v=v_tilde,
        q_b=np.diag(np.round(wb[~fb])).astype(complex),
        basis_a_faithful=ra,
        basis_a_pure=va[:, ~fa],
        basis_b_faithful=rb,
        basis_b_pure=vb[:, ~fb],
        order=order,
    )


# --- Pfaffians and Wick moments ------------------------------------------


def _check_antisymmetric(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotAntisymmetric(f"need a square matrix, got shape {a.shape}")
    if a.shape[0] % 2:
        raise OddDimension(f"Pfaffian of odd dimension {a.shape[0]}")
    if np.abs(a + a.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(a).max(initial=0.0)):
        raise NotAntisymmetric("matrix is not antisymmetric")
    return a


def pfaffian(a) -> complex | float:
    """Pfaffian by Parlett-Reid tridiagonalization with partial pivoting, O(n^3)."""
    a = np.array(_check_antisymmetric(a), dtype=complex if np.iscomplexobj(a) else float)
    n = a.shape[0]
    result = 1.0
    for k in range(0, n - 1, 2):
        # bring the largest entry of column k (below the diagonal) to row k+1
        p = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if p != k + 1:
            a[[k + 1, p], k:] = a[[p, k + 1], k:]
            a[k:, [k + 1, p]] = a[k:, [p, k + 1]]
            result = -result
        pivot = a[k, k + 1]
        if pivot == 0:
            return 0.0 * result
        result *= pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return result


def pfaffian_expansion(a) -> complex | float:
    """Pfaffian by recursive expansion along the first row; use for dimension <= 8."""
    a = _check_antisymmetric(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    rest = np.arange(1, n)
    for j in range(1, n):
        keep = rest[rest != j]
        total += (-1) ** (j + 1) * a[0, j] * pfaffian_expansion(a[np.ix_(keep, keep)])
    return total


Pattern = Sequence[tuple[int, bool]]


def _field_vector(mode: int, dagger: bool, m: int) -> np.ndarray:
    xi = np.zeros(2 * m, dtype=complex)
    # a^dagger(e_i) = B(e_i + 0), a(e_i) = B(0 + e_i)
    xi[mode if dagger else m + mode] = 1.0
    return xi


def two_point_matrix(S, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """``T[i, j] = omega(B(xi_i) B(xi_j))`` for field vectors ``xi_i``.

    Evaluated as ``c_i^T (1 + i A) c_j`` with ``c = W^dagger xi / 2`` the
    coordinates in the Majorana basis ``W`` (columns ``e_j + e_j`` and
    ``i e_j - i e_j``) and ``A`` the Majorana covariance.
    """
    A = to_majorana(S).matrix
    q = majorana_basis(A.shape[0] // 2)
    coords = q.conj().T @ np.column_stack(vectors) / math.sqrt(2.0)
    return coords.T @ (np.eye(A.shape[0]) + 1j * A) @ coords


def two_point(S, xi: np.ndarray, zeta: np.ndarray) -> complex:
    """``omega(B(xi) B(zeta))``."""
    return complex(two_point_matrix(S, [xi, zeta])[0, 1])


def _is_antinormal(pattern: Pattern) -> bool:
    daggers = [d for _, d in pattern]
    return daggers == sorted(daggers)


def wick_moment(state, pattern: Pattern, route: str = "auto") -> complex:
    """Expectation of an ordered product of creation/annihilation operators.

    ``pattern`` lists ``(mode, dagger)`` pairs from left to right, e.g.
    ``[(0, False), (1, True)]`` is ``a_0 a_1^dagger``.  The determinant route
    applies to passive covariances and products of the form
    ``a_{i_k} ... a_{i_1} a^dagger_{j_1} ... a^dagger_{j_l}``; the Pfaffian
    route handles any pattern for any self-dual covariance.
    """
    pattern = [(int(i), bool(d)) for i, d in pattern]
    if len(pattern) > MAX_PATTERN:
        raise PatternTooLong(f"pattern of length {len(pattern)} exceeds {MAX_PATTERN}")
    passive = isinstance(state, Covariance)
    if route == "auto":
        route = "det" if passive and _is_antinormal(pattern) else "pfaffian"
    if route == "det":
        if not passive or not _is_antinormal(pattern):
            raise FermbezzleError("determinant route needs a passive covariance and an a...a a^dagger...a^dagger pattern")
        rows = [i for i, d in reversed(pattern) if not d]
        cols = [j for j, d in pattern if d]
        if len(rows) != len(cols):
            return 0.0
        if not rows:
            return 1.0
        return complex(np.linalg.det(state.matrix[np.ix_(rows, cols)]))
    if route != "pfaffian":
        raise FermbezzleError(f"unknown route {route!r}")

    S = _as_selfdual(state)
    n = len(pattern)
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    full = two_point_matrix(S, [_field_vector(i, d, S.modes) for i, d in pattern])
    # Wick's rule: the moment is the Pfaffian of the ordered contractions
    upper = np.triu(full, 1)
    return complex(pfaffian(upper - upper.T))
