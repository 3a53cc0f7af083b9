import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_cov
from fermbezzle import fock
from fermbezzle.bounds import (
    Convention,
    bittel_bound,
    entropy_lower_bound,
    eta,
    eta_trace_norm_bound,
    ps_trick_bound,
    sandwich,
)
from fermbezzle.covariance import Covariance, direct_sum, gaussian_entropy
from fermbezzle.embezzlement import construct_plan
from fermbezzle.errors import DimensionMismatch, WindowViolation
from fermbezzle.linalg import haar_unitary
from fermbezzle.selfdual import from_passive
from fermbezzle.spectra import ladder, random_projection

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)


def test_eta_zero_on_equal(rng):
    a = random_cov(rng, 3)
    assert eta(a, a) == pytest.approx(0.0, abs=1e-7)


def test_eta_orthogonal_projections():
    assert eta(Covariance.diagonal([1, 0]), Covariance.diagonal([0, 1])) == pytest.approx(math.sqrt(2))


@given(st.floats(0, 1), st.floats(0, 1))
def test_eta_scalar(a, b):
    expected = abs(math.sqrt((1 - a) * b) - math.sqrt(a * (1 - b)))
    assert eta(Covariance.diagonal([a]), Covariance.diagonal([b])) == pytest.approx(expected, abs=1e-12)


def test_eta_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eta(Covariance.diagonal([0.5]), Covariance.diagonal([0.5, 0.5]))


@settings(max_examples=100)
@given(seeds, dims)
def test_eta_symmetric_and_invariant(seed, n):
    rng = np.random.default_rng(seed)
    a, b, c = random_cov(rng, n), random_cov(rng, n), random_cov(rng, 2)
    u = haar_unitary(n, rng)
    base = eta(a, b)
    assert eta(b, a) == pytest.approx(base, abs=1e-12)
    assert eta(direct_sum(a, c), direct_sum(b, c)) == pytest.approx(base, abs=1e-12)
    assert eta(a.conjugate_by(u), b.conjugate_by(u)) == pytest.approx(base, abs=1e-12)


@settings(max_examples=50)
@given(seeds, dims)
def test_eta_on_projections_is_frobenius(seed, n):
    rng = np.random.default_rng(seed)
    p = random_projection(n, int(rng.integers(0, n + 1)), rng)
    q = random_projection(n, int(rng.integers(0, n + 1)), rng)
    assert eta(p, q) == pytest.approx(np.linalg.norm(p.matrix - q.matrix), abs=1e-12)


@settings(max_examples=50)
@given(seeds, dims)
def test_eta_selfdual_bridge(seed, n):
    rng = np.random.default_rng(seed)
    f, g = random_cov(rng, n), random_cov(rng, n)
    assert eta(from_passive(f), from_passive(g)) == pytest.approx(math.sqrt(2) * eta(f, g), abs=1e-12)


def test_sandwich_equal_states(rng):
    a = random_cov(rng, 3)
    rep = sandwich(a, a)
    assert rep.lower == pytest.approx(0.0, abs=1e-12) and rep.upper == pytest.approx(0.0, abs=1e-7)
    assert rep.convention is Convention.PASSIVE


@pytest.mark.parametrize("n", [1, 2, 5])
def test_sandwich_vacuum_vs_full(n):
    vac, full = Covariance.diagonal(np.ones(n)), Covariance.diagonal(np.zeros(n))
    rep = sandwich(vac, full)
    assert rep.eta == pytest.approx(math.sqrt(n))
    assert rep.lower == pytest.approx(1 - math.exp(-n / 2))
    assert rep.contains(fock.trace_distance(fock.gaussian_state(vac), fock.gaussian_state(full)))


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 6))
def test_sandwich_against_oracle(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_cov(rng, n), random_cov(rng, n)
    rep = sandwich(a, b)
    exact = fock.trace_distance(fock.gaussian_state(a), fock.gaussian_state(b))
    assert 0 <= rep.lower <= rep.upper <= 1
    assert rep.contains(exact, 1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4))
def test_selfdual_sandwich_against_oracle(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_cov(rng, n), random_cov(rng, n)
    rep = sandwich(from_passive(a), from_passive(b))
    assert rep.convention is Convention.SELFDUAL
    exact = fock.trace_distance(fock.gaussian_state(a), fock.gaussian_state(b))
    assert rep.contains(exact, 1e-9)


def test_ps_trick_requires_window():
    with pytest.raises(WindowViolation):
        ps_trick_bound(Covariance.diagonal([0.05]), Covariance.diagonal([0.5]), 0.1)


def test_ps_trick_equal():
    a = Covariance.diagonal([0.3, 0.6])
    assert ps_trick_bound(a, a, 0.2) == 0.0


@settings(max_examples=200)
@given(seeds, dims, st.floats(0.001, 0.5), st.booleans())
def test_ps_trick_holds(seed, n, delta, both):
    rng = np.random.default_rng(seed)
    a = random_cov(rng, n, delta, 1 - delta)
    b = random_cov(rng, n, delta, 1 - delta) if both else random_cov(rng, n)
    bound = ps_trick_bound(a, b, delta, check=True)
    assert eta(a, b) ** 2 <= bound * (1 + 1e-9) + 1e-12
    one_sided = 4 / delta * np.linalg.norm(a.matrix - b.matrix) ** 2
    assert eta(a, b) ** 2 <= one_sided * (1 + 1e-9) + 1e-12


def test_trace_norm_bound_examples(rng):
    a = random_cov(rng, 3)
    assert eta_trace_norm_bound(a, a) == pytest.approx(0.0, abs=1e-12)
    p, q = Covariance.diagonal([1, 0]), Covariance.diagonal([0, 1])
    assert eta(p, q) ** 2 == pytest.approx(2.0)
    assert eta_trace_norm_bound(p, q) == pytest.approx(4.0)


@settings(max_examples=100)
@given(seeds, dims)
def test_trace_norm_bound_holds(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_cov(rng, n), random_cov(rng, n)
    eta_trace_norm_bound(a, b)
    eta_trace_norm_bound(from_passive(a), from_passive(b))


def test_bittel_examples():
    a = Covariance.diagonal([0.2, 0.7])
    assert bittel_bound(a, a) == 0.0
    for d in (1, 3):
        assert bittel_bound(Covariance.diagonal(np.ones(d)), Covariance.diagonal(np.zeros(d))) / 2 == d / 2


def test_bittel_comparison_both_directions():
    # embezzlement instance: the trace-norm bound is vacuous, eta is not
    plan = construct_plan(ladder(256), Covariance.diagonal([0.9, 0.9]), Covariance.diagonal([0.1, 0.1]))
    initial, target = plan.final_covariance(), plan.target_covariance()
    assert bittel_bound(initial, target) > 1
    assert math.sqrt(2) * plan.eta_achieved < 0.2
    # small perturbation: the trace-norm bound wins
    f, g = Covariance.diagonal([0.5]), Covariance.diagonal([0.51])
    assert sandwich(f, g).upper > bittel_bound(f, g)


def test_entropy_lower_bound():
    assert entropy_lower_bound(0.25) == pytest.approx(math.log(2))
    assert entropy_lower_bound(1.0) == 0.0
    assert gaussian_entropy(ladder(40)) >= 10 * math.log(2)
    assert entropy_lower_bound(1 / 40) == pytest.approx(10 * math.log(2))
