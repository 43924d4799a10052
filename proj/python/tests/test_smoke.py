import os

import numpy as np
import pytest

import dcpx

FIXTURES = os.environ.get("DCPX_FIXTURE_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "tests", "fixtures"))


def soft(b, k):
    return np.sign(b) * np.maximum(np.abs(b) - k, 0.0)


def test_signed_dcp():
    x = dcpx.Variable(1, "x")
    e = dcpx.square(dcpx.square(x))
    assert dcpx.curvature(e) == "convex"
    assert dcpx.curvature(e, signs=False) == "unknown"
    assert dcpx.sign(e) == "nonneg"


def test_lasso_matches_soft_threshold():
    b = np.array([3.0, -2.0, 1.0, 0.2, 0.0])
    x = dcpx.Variable(5, "x")
    gamma = dcpx.Parameter(1, "nonneg", "gamma")
    prob = dcpx.minimize(dcpx.sum_squares(np.eye(5) @ x - dcpx.Constant(b.reshape(5, 1))) + gamma * dcpx.norm1(x))
    for g in (0.1, 1.0, 10.0):
        sol = dcpx.solve(prob, {gamma: g})
        assert sol.status == "optimal"
        assert np.allclose(sol.value_of(x), soft(b, g / 2), atol=1e-4)
    assert prob.canonicalization_count() == 1


def test_sweep_and_jobs():
    with open(os.path.join(FIXTURES, "lasso.dcp")) as f:
        lp = dcpx.parse(f.read())
    gamma = lp.symbols["gamma"]
    values = dcpx.logspace(-2, 2, 8)
    one = dcpx.sweep(lp.problem, gamma, values, jobs=1)
    four = dcpx.sweep(lp.problem, gamma, values, jobs=4)
    assert [s.value for s in one] == [s.value for s in four]
    assert all(s.status == "optimal" for s in one)


def test_add_problems_flow():
    f, s1, s2 = dcpx.Variable(1, "f"), dcpx.Variable(1, "s1"), dcpx.Variable(1, "s2")
    edge = dcpx.minimize(dcpx.square(f))
    v1 = dcpx.minimize(dcpx.square(s1 - 1.0), [s1 - f == 0.0])
    v2 = dcpx.minimize(dcpx.square(s2 + 1.0), [s2 + f == 0.0])
    prob = edge + v1 + v2
    assert len(prob.constraints) == 2
    sol = dcpx.solve(prob)
    assert sol.value_of(f)[0] == pytest.approx(2 / 3, abs=1e-4)


def test_errors_are_typed():
    x = dcpx.Variable(2)
    y = dcpx.Variable(3)
    with pytest.raises(dcpx.Error, match="ShapeMismatch"):
        x + y
    with pytest.raises(dcpx.Error, match="NotDcp"):
        dcpx.solve(dcpx.minimize(x[0], [dcpx.square(x[0]) == 1.0]))


def test_cli_entry():
    code, out, err = dcpx.run_cli(["solve", os.path.join(FIXTURES, "lp_simple.dcp")])
    assert code == 0
    assert out.startswith("status: optimal\noptval: 2.0000\n")
    assert err == ""
