import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schottky4 import theta
from schottky4.errors import DomainError, ValidationError
from schottky4.theta import Characteristic, SiegelPoint


def test_parity():
    assert theta.parity(Characteristic((0, 0), (0, 0))) == "even"
    assert theta.parity(Characteristic((1,), (1,))) == "odd"
    with pytest.raises(ValidationError):
        Characteristic((2,), (0,))
    with pytest.raises(ValidationError):
        Characteristic((1, 0), (0,))


@pytest.mark.parametrize("h,n", [(1, 3), (2, 10), (3, 36), (4, 136)])
def test_even_counts(h, n):
    chars = theta.even_characteristics(h)
    assert len(chars) == n
    g = h + 1
    assert n == 2 ** (g - 2) * (2 ** (g - 1) + 1)
    keys = [(c.eps, c.eps_prime) for c in chars]
    assert keys == sorted(keys)


def test_point_validation():
    with pytest.raises(ValidationError):
        SiegelPoint(np.array([[1j, 0.1], [0.2, 1j]]))
    with pytest.raises(ValidationError):
        SiegelPoint(np.array([[1j, 2j], [2j, 1j]]))
    with pytest.raises(ValidationError):
        SiegelPoint(np.eye(5) * 1j)
    tau = theta.random_point(3, np.random.default_rng(0))
    assert SiegelPoint.from_json(json.loads(json.dumps(tau.to_json()))) == tau
    with pytest.raises(ValidationError):
        SiegelPoint.from_json({"g": 2, "re": [0, 0], "im": [1, 0, 0, 1]})


def test_radius_examples():
    assert theta.truncation_radius(np.eye(1), 1e-10) <= 4
    assert theta.truncation_radius(0.5 * np.eye(4), 1e-10) > theta.truncation_radius(np.eye(4), 1e-10)
    assert theta.truncation_radius(np.eye(2), 1e3) == 0
    with pytest.raises(ValidationError):
        theta.truncation_radius(0.01 * np.eye(2), 1e-8)


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.integers(1, 4))
def test_radius_monotone(l1, l2, g):
    lo, hi = sorted((l1, l2))
    assert theta.truncation_radius(hi * np.eye(g), 1e-9) <= theta.truncation_radius(lo * np.eye(g), 1e-9)


def test_tau_i_closed_form():
    value = theta.theta_constant(Characteristic((0,), (0,)), 1j * np.eye(1), 1e-12)
    assert abs(value - math.pi ** 0.25 / math.gamma(0.75)) < 1e-12
    assert abs(value - 1.08643481) < 1e-8


@pytest.mark.parametrize("h", [1, 2, 3])
def test_odd_constants_vanish(h):
    tau = theta.random_point(h, np.random.default_rng(h))
    odd = [c for c in theta.all_characteristics(h) if c.parity]
    vals = theta.theta_constants(tau, odd, 1e-12)
    assert np.abs(vals).max() < 1e-12


def test_constants_at_2i():
    tau = 2j * np.eye(3)
    chars = theta.even_characteristics(3)
    vals = theta.theta_constants(tau, chars, 1e-12)
    assert np.abs(vals.imag).max() < 1e-12
    for c, v in zip(chars, vals):
        # at diagonal tau the constant factors; a (1, 1) coordinate is an odd factor
        if any(a and b for a, b in zip(c.eps, c.eps_prime)):
            assert abs(v) < 1e-12
        else:
            assert v.real > 0
    assert vals[0].real >= 1


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_block_factorization(seed):
    rng = np.random.default_rng(seed)
    t1 = theta.random_point(1, rng)
    t2 = theta.random_point(2, rng)
    tau = theta.diag_blocks(t1, t2)
    for c1 in theta.even_characteristics(1):
        for c2 in theta.even_characteristics(2):
            c = Characteristic(c1.eps + c2.eps, c1.eps_prime + c2.eps_prime)
            whole = theta.theta_constant(c, tau)
            prod = theta.theta_constant(c1, t1) * theta.theta_constant(c2, t2)
            assert abs(whole - prod) <= 1e-10 * abs(prod) + 1e-12


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(theta.all_characteristics(2)))
@settings(max_examples=30, deadline=None)
def test_reflection_in_z(seed, c):
    rng = np.random.default_rng(seed)
    tau = theta.random_point(2, rng)
    z = rng.uniform(-0.3, 0.3, 2) + 1j * rng.uniform(-0.3, 0.3, 2)
    a = theta.theta_function(c, tau, z)
    b = theta.theta_function(c, tau, -z)
    assert abs(b - (-1) ** c.parity * a) < 1e-11


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=10, deadline=None)
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    tau = theta.random_point(3, rng)
    perm = rng.permutation(3)
    tau_p = SiegelPoint(tau.mat[np.ix_(perm, perm)])
    for c in theta.even_characteristics(3)[::5]:
        cp = Characteristic(tuple(c.eps[i] for i in perm), tuple(c.eps_prime[i] for i in perm))
        assert abs(theta.theta_constant(c, tau) - theta.theta_constant(cp, tau_p)) < 1e-12


def _big_box(c, tau, z, R=12):
    g = len(tau)
    n = np.array(list(itertools.product(range(-R, R + 1), repeat=g)), float) + np.array(c.eps) / 2
    q = np.einsum("ni,ij,nj->n", n, tau, n)
    return np.exp(1j * np.pi * (q + 2 * n @ (z + np.array(c.eps_prime) / 2))).sum()


@pytest.mark.parametrize("tol", [1e-4, 1e-6, 1e-8, 1e-10])
def test_tolerance_honesty(tol):
    rng = np.random.default_rng(5)
    for g in (1, 2, 3):
        tau = theta.random_point(g, rng, scale=0.6, spread=0.1)
        z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.4, 0.4, g)
        for c in theta.all_characteristics(g)[:4]:
            exact = _big_box(c, tau.mat, z)
            assert abs(theta.theta_function(c, tau, z, tol) - exact) < tol


def test_domain_errors():
    c = Characteristic((0,), (0,))
    with pytest.raises(DomainError):
        theta.theta_function(c, 1j * np.eye(1), np.array([3j]))
    with pytest.raises(ValidationError):
        theta.theta_function(Characteristic((0, 0), (0, 0)), 1j * np.eye(1))
    with pytest.raises(ValidationError):
        theta.theta_constant(c, 0.01j * np.eye(1))


def test_mp_constants_match_double():
    tau = theta.random_point(2, np.random.default_rng(9))
    chars = theta.even_characteristics(2)
    a = theta.theta_constants(tau, chars, 1e-13)
    b = np.array([complex(v) for v in theta.theta_constants_mp(tau, chars, 30)])
    assert np.abs(a - b).max() < 1e-12
