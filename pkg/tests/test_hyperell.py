import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schottky4 import hyperell
from schottky4.errors import ConvergenceError, ValidationError


def test_validate_examples():
    assert hyperell.validate_curve([-2, -1, 1, 2]).g == 1
    assert hyperell.validate_curve(range(10)).g == 4
    assert list(hyperell.validate_curve([3, 1, 2, 0]).branch) == [0, 1, 2, 3]


@pytest.mark.parametrize("branch", [[0, 0, 1, 2], [0, 1, 2], [0, 1], [0, 1, 2, float("nan")],
                                    [0, 1e-12, 1, 2], ["a", 1, 2, 3]])
def test_validate_errors(branch):
    with pytest.raises(ValidationError):
        hyperell.validate_curve(branch)


def test_agm_oracle_genus_one():
    curve = hyperell.validate_curve([-2, -1, 1, 2])
    tau = hyperell.jacobian_point(curve).mat[0, 0]
    assert abs(tau - hyperell.elliptic_tau_agm([-2, -1, 1, 2])) < 1e-10
    assert abs(tau - 1.5634019226961116j) < 1e-10


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4, unique=True))
@settings(max_examples=25, deadline=None)
def test_agm_oracle_random(b):
    b = sorted(b)
    if min(np.diff(b)) < 0.2:
        return
    tau = hyperell.jacobian_point(hyperell.validate_curve(b)).mat[0, 0]
    assert abs(tau - hyperell.elliptic_tau_agm(b)) < 1e-10


def test_genus4_riemann_relations():
    curve = hyperell.validate_curve(range(10))
    data = hyperell.converged_periods(curve)
    sym, lam = hyperell.riemann_check(data.tau)
    assert sym < 1e-8 and lam > 0
    assert data.drift < 1e-9
    tau = hyperell.jacobian_point(curve)
    assert tau.g == 4 and np.abs(tau.mat.real).max() < 1e-12


@given(st.floats(0.2, 5), st.floats(-10, 10))
@settings(max_examples=10, deadline=None)
def test_affine_invariance(alpha, beta):
    b = np.array([0, 1, 2.5, 3, 4.2, 6])
    t0 = hyperell.jacobian_point(hyperell.validate_curve(b)).mat
    t1 = hyperell.jacobian_point(hyperell.validate_curve(alpha * b + beta)).mat
    assert np.abs(t0 - t1).max() < 1e-8


def test_convergence_gate():
    curve = hyperell.validate_curve(hyperell.pinched_branch_points(range(5), [1e-6] * 5))
    with pytest.raises(ConvergenceError):
        hyperell.periods(curve, 16)
    with pytest.raises(ValidationError):
        hyperell.periods(curve, 8)


def test_load_curve(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"branch": [0, 1, 2, 3]}))
    assert hyperell.load_curve(p).g == 1
    p.write_text(json.dumps([0, 1, 2, 3]))
    with pytest.raises(ValidationError):
        hyperell.load_curve(p)


def test_pinched_points():
    b = hyperell.pinched_branch_points([0, 1], [0.1, 0.2])
    assert np.allclose(b, [-0.1, 0.1, 0.8, 1.2])
