import numpy as np
import pytest

from qoptbench.optimizers import SpsaGains, simplex_minimize, spsa_minimize


def rosenbrock(x):
    return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2


def reference_spsa(f, theta0, max_iter, gains, rng):
    """Independent re-derivation of the same iteration, used as an oracle."""
    a, c, alpha, gamma = gains.a, gains.c, gains.alpha, gains.gamma
    stability = max_iter / 10.0
    theta = np.array(theta0, dtype=float)
    best_value, best_theta = np.inf, None
    for k in range(max_iter):
        ak = a / (k + 1 + stability) ** alpha
        ck = c / (k + 1) ** gamma
        delta = rng.integers(0, 2, size=theta.size) * 2.0 - 1.0
        yp = f(theta + ck * delta)
        ym = f(theta - ck * delta)
        for y, point in ((yp, theta + ck * delta), (ym, theta - ck * delta)):
            if y < best_value:
                best_value, best_theta = y, point
        theta = theta - ak * (yp - ym) / (2 * ck) * delta
    return best_theta, best_value


def test_spsa_quadratic():
    res = spsa_minimize(
        lambda x: (x[0] - 2) ** 2, np.array([0.0]), 500, rng=np.random.default_rng(7)
    )
    assert abs(res.best_theta[0] - 2.0) < 0.05


def test_spsa_deterministic_given_seed():
    runs = [
        spsa_minimize(
            rosenbrock, np.zeros(2), 300, rng=np.random.default_rng(3)
        )
        for _ in range(2)
    ]
    assert runs[0].history == runs[1].history
    assert np.array_equal(runs[0].best_theta, runs[1].best_theta)


def test_spsa_rosenbrock_vs_independent_reference():
    gains = SpsaGains()
    res = spsa_minimize(
        rosenbrock, np.zeros(2), 5000, gains=gains, rng=np.random.default_rng(0)
    )
    ref_theta, ref_value = reference_spsa(
        rosenbrock, np.zeros(2), 5000, gains, np.random.default_rng(0)
    )
    assert res.best_value == pytest.approx(ref_value, rel=1e-12)
    assert np.allclose(res.best_theta, ref_theta)
    assert res.best_value < 1e-1


def test_spsa_rejects_nonfinite():
    with pytest.raises(ValueError):
        spsa_minimize(lambda x: float("nan"), np.zeros(1), 5)


def test_spsa_budget_accounting():
    res = spsa_minimize(lambda x: float(x @ x), np.zeros(3), 40)
    assert res.iterations == 40
    assert res.evaluations == 80
    assert len(res.history) == 80


def test_simplex_quadratic():
    res = simplex_minimize(lambda x: (x[0] - 2) ** 2, np.array([0.0]), 200)
    assert abs(res.best_theta[0] - 2.0) < 1e-4
    assert res.evaluations <= 200


def test_simplex_constant_runs_out_budget():
    res = simplex_minimize(lambda x: 1.25, np.array([0.0, 0.0]), 321)
    assert res.evaluations == 321
    assert res.best_value == 1.25


def test_simplex_rosenbrock():
    res = simplex_minimize(rosenbrock, np.zeros(2), 5000)
    assert res.best_value < 1e-3


def test_simplex_deterministic():
    a = simplex_minimize(rosenbrock, np.zeros(2), 500)
    b = simplex_minimize(rosenbrock, np.zeros(2), 500)
    assert a.history == b.history


def test_best_so_far_monotone():
    for res in (
        spsa_minimize(rosenbrock, np.zeros(2), 200, rng=np.random.default_rng(1)),
        simplex_minimize(rosenbrock, np.zeros(2), 400),
    ):
        best = np.inf
        for _, value in res.history:
            best = min(best, value)
        assert res.best_value == best
        values = [v for _, v in res.history]
        running = np.minimum.accumulate(values)
        assert np.all(np.diff(running) <= 0)


def test_budget_validation():
    with pytest.raises(ValueError):
        spsa_minimize(lambda x: 0.0, np.zeros(1), 0)
    with pytest.raises(ValueError):
        simplex_minimize(lambda x: 0.0, np.zeros(1), 0)
