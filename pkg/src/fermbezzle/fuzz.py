"""Seeded randomized checks of the inequalities behind the protocol.

Each fuzzer draws ``iterations`` random cases, evaluates both sides of one
inequality (or identity) in vectorized batches and returns a
:class:`FuzzReport`.  A failure means a case violated the statement beyond
its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import eta
from .covariance import Covariance, direct_sum
from .linalg import haar_unitary
from .selfdual import eta_unitary_square, purification_projection

FUZZERS = ("list-sort", "no-go", "ps-trick", "eta-props")
BATCH = 4096


@dataclass(frozen=True)
class FuzzReport:
    which: str
    iterations: int
    failures: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _sorted_rows(x: np.ndarray) -> np.ndarray:
    return -np.sort(-x, axis=1)


def _batches(iterations: int):
    done = 0
    while done < iterations:
        size = min(BATCH, iterations - done)
        yield size
        done += size


def _max_gap(x: np.ndarray) -> np.ndarray:
    return (x[:, :-1] - x[:, 1:]).max(axis=1)


def _window_span(x: np.ndarray, d: int) -> np.ndarray:
    """``max_{|i-j| <= d} |x_i - x_j|`` for sorted rows."""
    if x.shape[1] <= d:
        return x[:, 0] - x[:, -1]
    return (x[:, :-d] - x[:, d:]).max(axis=1)


def _list_sort_batch(rng: np.random.Generator, size: int, n: int, d: int):
    k = _sorted_rows(rng.uniform(0, 1, (size, n)))
    f = _sorted_rows(rng.uniform(0, 1, (size, d)))
    g = _sorted_rows(rng.uniform(0, 1, (size, d)))
    lhs = np.abs(_sorted_rows(np.hstack([k, f])) - _sorted_rows(np.hstack([k, g]))).max(axis=1)

    ends = np.hstack([np.ones((size, 1)), k, np.zeros((size, 1))])
    gaps = ends[:, :-1] - ends[:, 1:]
    eps = np.maximum(np.maximum(gaps[:, 0], gaps[:, -1]), gaps[:, 1:-1].max(axis=1, initial=0.0) / 2)
    padded = np.hstack([np.maximum(k[:, :1] + eps[:, None], 1.0), k, np.minimum(k[:, -1:] - eps[:, None], 0.0)])
    bracketed = (k[:, 0] >= np.maximum(f[:, 0], g[:, 0])) & (k[:, -1] <= np.minimum(f[:, -1], g[:, -1]))

    if n > 1:
        mid = np.where(bracketed, _window_span(k, d), _window_span(padded, d))
        rhs = d * np.where(bracketed, _max_gap(k), _max_gap(padded))
    else:
        mid = np.where(bracketed, 0.0, _window_span(padded, d))
        rhs = d * np.where(bracketed, 0.0, _max_gap(padded))
    return lhs, mid, rhs


def fuzz_list_sort(iterations: int, seed: int = 0, max_n: int = 12, max_d: int = 3) -> FuzzReport:
    """``||(k+f)_sorted - (k+g)_sorted||_inf <= max_{|i-j|<=d}|k_i - k_j| <= d max gap(k)``."""
    rng = np.random.default_rng(seed)
    failures, worst = 0, math.inf
    for size in _batches(iterations):
        n = int(rng.integers(1, max_n + 1))
        d = int(rng.integers(1, max_d + 1))
        lhs, mid, rhs = _list_sort_batch(rng, size, n, d)
        margin = np.minimum(mid - lhs, rhs - mid)
        failures += int(np.count_nonzero(margin < -1e-12))
        worst = min(worst, float(margin.min()))
    return FuzzReport("list-sort", iterations, failures, worst)


def fuzz_no_go(iterations: int, seed: int = 0, max_n: int = 12, max_d: int = 4) -> FuzzReport:
    """Sorted l1 distance of ``(F+K, G+K)`` is at least that of ``(F, G)``."""
    rng = np.random.default_rng(seed)
    failures, worst = 0, math.inf
    for size in _batches(iterations):
        n = int(rng.integers(1, max_n + 1))
        d = int(rng.integers(1, max_d + 1))
        k = rng.uniform(0, 1, (size, n))
        f = rng.uniform(0, 1, (size, d))
        g = rng.uniform(0, 1, (size, d))
        lhs = np.abs(_sorted_rows(np.hstack([f, k])) - _sorted_rows(np.hstack([g, k]))).sum(axis=1)
        rhs = np.abs(_sorted_rows(f) - _sorted_rows(g)).sum(axis=1)
        margin = lhs - rhs
        failures += int(np.count_nonzero(margin < -1e-12))
        worst = min(worst, float(margin.min()))
    return FuzzReport("no-go", iterations, failures, worst)


def _batched_haar(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def _near_identity(rng: np.random.Generator, size: int, n: int, scale: float = 1e-2) -> np.ndarray:
    z = np.eye(n) + scale * (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def _rotate(u: np.ndarray, values: np.ndarray) -> np.ndarray:
    return (u * values[:, None, :]) @ np.conj(np.swapaxes(u, 1, 2))


def _batched_eta_squared(a_vals, a_vecs, b_vals, b_vecs) -> np.ndarray:
    def roots(vals, vecs):
        return _rotate(vecs, np.sqrt(vals)), _rotate(vecs, np.sqrt(1 - vals))

    sa, ca = roots(a_vals, a_vecs)
    sb, cb = roots(b_vals, b_vecs)
    x = ca @ sb - sa @ cb
    return np.sum(np.abs(x) ** 2, axis=(1, 2))


def fuzz_ps_trick(iterations: int, seed: int = 0, max_n: int = 6) -> FuzzReport:
    """``eta(A, B)^2 <= (4/delta) ||A - B||_2^2`` for ``A`` confined to ``[delta, 1 - delta]``.

    Half of the cases also confine ``B`` and test the sharper ``1/delta`` form.
    Pairs are drawn close together as well as far apart so both regimes of
    the inequality are exercised.
    """
    rng = np.random.default_rng(seed)
    failures, worst = 0, math.inf
    for size in _batches(iterations):
        n = int(rng.integers(1, max_n + 1))
        delta = rng.uniform(1e-3, 0.5, size)
        both = rng.random(size) < 0.5
        a_vals = delta[:, None] + (1 - 2 * delta[:, None]) * rng.uniform(0, 1, (size, n))
        b_vals = rng.uniform(0, 1, (size, n))
        b_vals = np.where(both[:, None], delta[:, None] + (1 - 2 * delta[:, None]) * b_vals, b_vals)
        a_vecs = _batched_haar(rng, size, n)
        near = rng.random(size) < 0.5
        # near pairs: small spectral perturbation with a small rotation
        b_vecs = np.where(near[:, None, None], a_vecs @ _near_identity(rng, size, n), _batched_haar(rng, size, n))
        tweak = rng.normal(0, 1e-2, (size, n))
        b_near = np.clip(a_vals + tweak, np.where(both, delta, 0.0)[:, None], np.where(both, 1 - delta, 1.0)[:, None])
        b_vals = np.where(near[:, None], b_near, b_vals)

        eta2 = _batched_eta_squared(a_vals, a_vecs, b_vals, b_vecs)
        diff = _rotate(a_vecs, a_vals) - _rotate(b_vecs, b_vals)
        frob2 = np.sum(np.abs(diff) ** 2, axis=(1, 2))
        factor = np.where(both, 1.0, 4.0)
        bound = factor / delta * frob2
        margin = bound - eta2
        failures += int(np.count_nonzero(margin < -1e-10))
        worst = min(worst, float(margin.min()))
    return FuzzReport("ps-trick", iterations, failures, worst)


def _random_cov(rng: np.random.Generator, n: int) -> Covariance:
    return Covariance.from_eigh(rng.uniform(0, 1, n), haar_unitary(n, rng))


def eta_identity_residuals(rng: np.random.Generator, n: int) -> dict[str, float]:
    """Residuals of the four eta identities on one random instance."""
    a, b, c = _random_cov(rng, n), _random_cov(rng, n), _random_cov(rng, int(rng.integers(1, 4)))
    u = haar_unitary(n, rng)
    base = eta(a, b)
    pa, pb = purification_projection(a), purification_projection(b)
    eta_p = eta(pa, pb)
    return {
        "direct_sum": abs(eta(direct_sum(a, c), direct_sum(b, c)) - base),
        "unitary": abs(eta(a.conjugate_by(u), b.conjugate_by(u)) - base),
        "purification": abs(eta_p ** 2 - 2.0 * base ** 2),
        "unitary_square": abs(eta_unitary_square(a.matrix, b.matrix) - base),
    }


def fuzz_eta_props(iterations: int, seed: int = 0, max_n: int = 5, tol: float = 1e-10) -> FuzzReport:
    """Direct-sum and unitary invariance, purification doubling and the unitary-square identity."""
    rng = np.random.default_rng(seed)
    failures, worst = 0, math.inf
    for _ in range(iterations):
        res = eta_identity_residuals(rng, int(rng.integers(1, max_n + 1)))
        largest = max(res.values())
        failures += int(largest > tol)
        worst = min(worst, tol - largest)
    return FuzzReport("eta-props", iterations, failures, worst)


def run(which: str, iterations: int, seed: int = 0) -> FuzzReport:
    table = {
        "list-sort": fuzz_list_sort,
        "no-go": fuzz_no_go,
        "ps-trick": fuzz_ps_trick,
        "eta-props": fuzz_eta_props,
    }
    if which not in table:
        raise ValueError(f"unknown fuzzer {which!r}; choose from {', '.join(FUZZERS)}")
    return table[which](iterations, seed)
