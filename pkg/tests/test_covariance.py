import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_cov
from fermbezzle.covariance import (
    Covariance,
    clip_spectrum,
    direct_sum,
    select_dense_subspace,
    spectral_density,
    validate,
)
from fermbezzle.errors import InvalidDelta, NotDenseEnough, NotHermitian, SpectrumOutOfRange
from fermbezzle.spectra import ladder

spectra = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=40)


def test_validate_identity():
    cov = validate(np.eye(2))
    np.testing.assert_array_equal(cov.eigenvalues, [1.0, 1.0])


def test_validate_sorts_descending():
    cov = validate(np.diag([0.3, 0.7]))
    np.testing.assert_allclose(cov.eigenvalues, [0.7, 0.3])


def test_validate_rejects_out_of_range():
    with pytest.raises(SpectrumOutOfRange):
        validate(np.diag([1.5, 0.0]))


def test_validate_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        validate(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_validate_is_idempotent(rng):
    cov = random_cov(rng, 5)
    again = validate(cov.matrix)
    np.testing.assert_allclose(again.matrix, cov.matrix, atol=1e-14)
    np.testing.assert_allclose(again.eigenvalues, cov.eigenvalues, atol=1e-12)


def test_eigenvectors_diagonalize(rng):
    cov = random_cov(rng, 6)
    d = cov.eigenvectors.conj().T @ cov.matrix @ cov.eigenvectors
    np.testing.assert_allclose(d, np.diag(cov.eigenvalues), atol=1e-10)


def test_arrays_are_read_only(rng):
    cov = random_cov(rng, 3)
    with pytest.raises(ValueError):
        cov.matrix[0, 0] = 0.0


def test_ties_keep_index_order():
    cov = validate(np.diag([0.5, 0.2, 0.5]))
    np.testing.assert_array_equal(np.argmax(np.abs(cov.eigenvectors), axis=0), [0, 2, 1])


@pytest.mark.parametrize("n", [1, 2, 8, 33])
def test_ladder_density(n):
    rep = spectral_density(ladder(n))
    assert rep.density == pytest.approx(1 / n, abs=1e-15)
    assert rep.density <= rep.worst_gap


def test_density_midpoint_witness():
    rep = spectral_density(Covariance.diagonal([0.0, 0.5, 1.0]))
    assert rep.density == pytest.approx(0.25)
    assert rep.witness_x in (0.25, 0.75)


def test_density_endpoint_witness():
    rep = spectral_density(Covariance.diagonal([0.5]))
    assert rep.density == 0.5
    assert rep.witness_x in (0.0, 1.0)
    assert not rep.is_dense(0.5) and rep.is_dense(0.5000001)


@given(spectra)
def test_density_matches_brute_force(values):
    rep = spectral_density(Covariance.diagonal(values))
    grid = np.linspace(0, 1, 2001)
    brute = np.abs(grid[:, None] - np.asarray(values)[None, :]).min(axis=1).max()
    assert brute <= rep.density + 1e-12
    assert rep.density <= brute + 1.0 / 2000
    assert min(abs(rep.witness_x - v) for v in values) == pytest.approx(rep.density, abs=1e-12)


@given(spectra)
def test_density_pigeonhole(values):
    rep = spectral_density(Covariance.diagonal(values))
    assert rep.density >= 1 / (2 * (len(values) + 1)) - 1e-15
    assert rep.density <= rep.worst_gap + 1e-15


def test_clip_examples():
    np.testing.assert_allclose(np.diag(clip_spectrum(Covariance.diagonal([1, 0]), 0.1).matrix).real, [0.9, 0.1])
    np.testing.assert_allclose(clip_spectrum(Covariance.diagonal([0.5]), 0.1).matrix, [[0.5]])
    clipped = clip_spectrum(Covariance.diagonal([0.95, 0.4, 0.02]), 0.05)
    np.testing.assert_allclose(np.diag(clipped.matrix).real, np.clip([0.95, 0.4, 0.02], 0.05, 0.95))


@pytest.mark.parametrize("delta", [0.0, -0.1, 0.51])
def test_clip_rejects_delta(delta):
    with pytest.raises(InvalidDelta):
        clip_spectrum(Covariance.diagonal([0.5]), delta)


def test_clip_keeps_eigenvectors(rng):
    cov = random_cov(rng, 4)
    clipped = clip_spectrum(cov, 0.2)
    assert clipped.eigenvalues.min() >= 0.2 and clipped.eigenvalues.max() <= 0.8
    commutator = clipped.matrix @ cov.matrix - cov.matrix @ clipped.matrix
    assert np.linalg.norm(commutator) < 1e-12


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.5))
def test_clip_never_moves_away_from_window(seed, delta):
    rng = np.random.default_rng(seed)
    g = random_cov(rng, 4)
    inside = random_cov(rng, 4, delta, 1 - delta)
    before = np.linalg.norm(g.matrix - inside.matrix)
    after = np.linalg.norm(clip_spectrum(g, delta).matrix - inside.matrix)
    assert after <= before + 1e-12


def test_direct_sum():
    out = direct_sum(Covariance.diagonal([1.0]), Covariance.diagonal([0.0]))
    np.testing.assert_array_equal(out.matrix, np.diag([1.0, 0.0]))


def test_direct_sum_spectrum_is_union(rng):
    a, b = random_cov(rng, 3), random_cov(rng, 2)
    out = direct_sum(a, b)
    np.testing.assert_allclose(out.eigenvalues, np.sort(np.r_[a.eigenvalues, b.eigenvalues])[::-1])
    np.testing.assert_allclose(out.matrix[:3, :3], a.matrix)
    np.testing.assert_allclose(out.apply(lambda x: x), out.matrix, atol=1e-14)


def test_select_dense_subspace_ladder():
    idx, sub = select_dense_subspace(ladder(100), 0.1)
    assert idx.size <= 20
    assert spectral_density(sub).density < 0.1


def test_select_all_when_small():
    idx, _ = select_dense_subspace(ladder(5), 0.3)
    np.testing.assert_array_equal(idx, np.arange(5))


def test_select_rejects_sparse():
    with pytest.raises(NotDenseEnough):
        select_dense_subspace(Covariance.diagonal([0.5]), 0.4)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.integers(1, 400), st.floats(0.005, 0.6))
def test_select_dense_subspace_fuzz(seed, n, slack):
    rng = np.random.default_rng(seed)
    K = Covariance.diagonal(rng.uniform(0, 1, n))
    eps = spectral_density(K).density * (1 + slack) + 1e-12
    idx, sub = select_dense_subspace(K, eps)
    assert idx.size <= math.ceil(2 / eps)
    assert spectral_density(sub).density < eps
    assert np.all(np.diff(idx) > 0)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.integers(2, 40))
def test_select_at_attained_density(seed, n):
    # selecting with the next float above the measured density must succeed
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.choice(np.linspace(0, 1, 9), n))[::-1]
    K = Covariance.diagonal(lam)
    eps = spectral_density(K).density
    if eps >= 1:
        return
    chosen, _ = select_dense_subspace(K, float(np.nextafter(eps, 2.0)))
    assert chosen.size <= math.ceil(2 / eps)
