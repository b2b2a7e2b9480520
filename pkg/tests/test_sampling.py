import numpy as np
import pytest

from qcosamp.errors import NumericalInvariantError, UnsupportedModeError, ValidationError
from qcosamp.sampling import (ErrorReport, SweepResult, default_grid, mse, quartiles,
                              random_values_trial, sweep)
from qcosamp.spec import ConstantData, Steerable, single

NU2 = single(2, -0.2, 2.1)


def test_exact_mode_matches_analytic():
    res = sweep(NU2, default_grid(9))
    np.testing.assert_allclose(res.estimated, res.exact, atol=1e-12)
    assert mse(res).mse == pytest.approx(0, abs=1e-24)


def test_fixed_seed_is_deterministic():
    a = sweep(NU2, default_grid(5), 1000, 3)
    b = sweep(NU2, default_grid(5), 1000, 3)
    assert a.estimated == b.estimated
    assert sweep(NU2, default_grid(5), 1000, 4).estimated != a.estimated


def test_parallel_sweep_keeps_grid_order():
    a = sweep(NU2, default_grid(7), 500, 9)
    b = sweep(NU2, default_grid(7), 500, 9, workers=3)
    assert a.estimated == b.estimated and a.x_grid == b.x_grid


def test_shot_noise_bound():
    res = sweep(NU2, default_grid(33), 8192, 21)
    for est, p in zip(res.estimated, res.exact):
        assert abs(est - p) <= 5 * np.sqrt(p * (1 - p) / 8192) + 1e-12
    for h in res.histograms:
        assert sum(h.counts.values()) == 8192 and set(h.counts) <= {"0", "1"}


def test_mse_definition():
    r = SweepResult([0.0], [0.51], [0.5], 10, 0)
    assert mse(r).mse == pytest.approx(1e-4)
    assert isinstance(mse(r), ErrorReport)


def test_constant_argument_sweep():
    xs = tuple(np.linspace(-np.pi, np.pi, 8, endpoint=False))
    spec = single(1, 0.3, 0.2, ConstantData(xs, 3))
    exact = sweep(spec)
    np.testing.assert_allclose(exact.estimated, exact.exact, atol=1e-12)
    noisy = sweep(spec, shots=8192, seed=2)
    assert mse(noisy).mse < 1e-3


def test_sweep_errors():
    with pytest.raises(UnsupportedModeError):
        sweep(single(1, 0, 0, Steerable(2)))
    with pytest.raises(ValidationError):
        sweep(NU2, [0.0], 100, None)
    with pytest.raises(ValidationError):
        sweep(NU2, [4.0])
    with pytest.raises(ValidationError):
        sweep(NU2, [0.0], -1)
    with pytest.raises(NumericalInvariantError):
        SweepResult([0.0], [0.1, 0.2], [0.3], 1, 0)


def test_random_trials_exact_mode_is_zero():
    reps = random_values_trial(20, 0, 5)
    assert all(r.mse < 1e-24 for r in reps)
    with pytest.raises(ValidationError):
        random_values_trial(0, 10, 1)


def test_more_shots_lower_median():
    lo = [quartiles(random_values_trial(200, 1024, s))[1] for s in range(3)]
    hi = [quartiles(random_values_trial(200, 8192, s))[1] for s in range(3)]
    assert np.mean(hi) < np.mean(lo)
