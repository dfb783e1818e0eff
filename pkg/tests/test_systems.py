import numpy as np
import pytest

from crossmap import DataError, NumericalError
from crossmap.systems import (GeneratorSpec, gen_coupled_logistic,
                              gen_lagged_logistic, gen_lorenz, gen_moran_fork,
                              gen_unidirectional_logistic, generate)


def logistic_iterates(n, x0, r):
    v = np.empty(n)
    v[0] = x0
    for t in range(1, n):
        v[t] = r * v[t - 1] * (1.0 - v[t - 1])
    return v


class TestCoupledLogistic:
    def test_first_step_hand_values(self):
        x, y = gen_coupled_logistic(2)
        assert x.values[0] == 0.2 and y.values[0] == 0.5
        assert x.values[1] == pytest.approx(0.606, abs=1e-12)
        assert y.values[1] == pytest.approx(0.942, abs=1e-12)

    def test_decoupled_equals_univariate(self):
        x, y = gen_coupled_logistic(300, bxy=0.0, byx=0.0)
        assert np.array_equal(x.values, logistic_iterates(300, 0.2, 3.8))
        assert np.array_equal(y.values, logistic_iterates(300, 0.5, 3.8))

    def test_stays_in_unit_interval(self):
        x, y = gen_coupled_logistic(10_000)
        for s in (x, y):
            assert s.values.min() >= 0.0 and s.values.max() <= 1.0

    def test_escape_reports_step(self):
        with pytest.raises(NumericalError, match="step"):
            gen_coupled_logistic(1000, rx=4.2)

    def test_burn_in_is_a_shift(self):
        full_x, full_y = gen_coupled_logistic(250)
        x, y = gen_coupled_logistic(200, burn_in=50)
        assert np.array_equal(x.values, full_x.values[50:])
        assert np.array_equal(y.values, full_y.values[50:])

    def test_steps_validation(self):
        with pytest.raises(DataError):
            gen_coupled_logistic(0)


class TestUnidirectionalLogistic:
    def test_first_step_hand_values(self):
        x, y = gen_unidirectional_logistic(2)
        # 3.8*0.5*0.5 - 0.08*0.5 = 0.91
        assert y.values[1] == pytest.approx(0.91, abs=1e-12)
        # the X update matches the bidirectional generator exactly
        bx, _ = gen_coupled_logistic(2)
        assert x.values[1] == bx.values[1]

    def test_y_is_autonomous(self):
        _, y1 = gen_unidirectional_logistic(200, x0=0.2)
        _, y2 = gen_unidirectional_logistic(200, x0=0.9)
        assert np.array_equal(y1.values, y2.values)

    def test_stays_in_unit_interval(self):
        x, y = gen_unidirectional_logistic(10_000)
        for s in (x, y):
            assert s.values.min() >= 0.0 and s.values.max() <= 1.0


class TestLaggedLogistic:
    def test_x_is_autonomous_logistic(self):
        x, _ = gen_lagged_logistic(300, delay=2, coupling=0.1)
        assert np.array_equal(x.values, logistic_iterates(300, 0.2, 3.8))

    def test_zero_coupling_decouples(self):
        _, y = gen_lagged_logistic(300, delay=3, coupling=0.0)
        assert np.array_equal(y.values, logistic_iterates(300, 0.5, 3.8))

    def test_recurrence_oracle(self):
        # independent reimplementation of the documented update rule
        d, c = 3, 0.2
        x, y = gen_lagged_logistic(50, delay=d, coupling=c)
        for t in range(1, 50):
            i = t - d
            drive = x.values[i] if i >= 0 else 0.2
            want = 3.8 * y.values[t - 1] * (1 - y.values[t - 1]) \
                - c * y.values[t - 1] * drive
            assert y.values[t] == pytest.approx(want, abs=1e-15)

    def test_delay_one_is_contemporaneous_coupling(self):
        x, y = gen_lagged_logistic(100, delay=1, coupling=0.08)
        for t in range(1, 100):
            want = 3.8 * y.values[t - 1] * (1 - y.values[t - 1]) \
                - 0.08 * y.values[t - 1] * x.values[t - 1]
            assert y.values[t] == pytest.approx(want, abs=1e-15)

    def test_stays_in_unit_interval(self):
        for d in (1, 2, 4):
            x, y = gen_lagged_logistic(10_000, delay=d, coupling=0.1)
            for s in (x, y):
                assert s.values.min() >= 0.0 and s.values.max() <= 1.0

    def test_negative_delay_rejected(self):
        with pytest.raises(DataError):
            gen_lagged_logistic(100, delay=-1)


class TestMoranFork:
    def test_deterministic(self):
        a = gen_moran_fork(500)
        b = gen_moran_fork(500)
        for s, t in zip(a, b):
            assert np.array_equal(s.values, t.values)

    def test_zero_coupling_decouples_everything(self):
        z, a, b = gen_moran_fork(300, coupling=0.0)
        assert np.array_equal(z.values, logistic_iterates(300, 0.4, 3.8))
        assert np.array_equal(a.values, logistic_iterates(300, 0.2, 3.7))
        assert np.array_equal(b.values, logistic_iterates(300, 0.6, 3.9))

    def test_stays_in_unit_interval(self):
        for s in gen_moran_fork(10_000):
            assert s.values.min() >= 0.0 and s.values.max() <= 1.0

    def test_noise_driver_consumes_seed(self):
        z1, a1, _ = gen_moran_fork(200, driver_kind="noise", seed=1)
        z2, _, _ = gen_moran_fork(200, driver_kind="noise", seed=1)
        z3, _, _ = gen_moran_fork(200, driver_kind="noise", seed=2)
        assert np.array_equal(z1.values, z2.values)
        assert not np.array_equal(z1.values, z3.values)
        assert a1.values.min() >= 0.0

    def test_unknown_driver(self):
        with pytest.raises(DataError):
            gen_moran_fork(100, driver_kind="sine")


class TestLorenz:
    def test_zero_initial_is_fixed_point(self):
        for s in gen_lorenz(50, initial=(0.0, 0.0, 0.0)):
            assert not s.values.any()

    def test_step_halving_consistency(self):
        coarse = gen_lorenz(101, dt=0.01)
        fine = gen_lorenz(201, dt=0.005)
        for c, f in zip(coarse, fine):
            assert np.max(np.abs(c.values - f.values[::2])) < 1e-3

    def test_finite_long_run(self):
        for s in gen_lorenz(5000):
            assert np.all(np.isfinite(s.values))

    def test_wing_dependent_correlation_sign(self):
        from crossmap import windowed_pearson
        x, _, z = gen_lorenz(4000)
        assert windowed_pearson(x, z, 100, 400) < -0.3
        assert windowed_pearson(x, z, 2900, 3200) > 0.3

    def test_bad_dt(self):
        with pytest.raises(DataError):
            gen_lorenz(10, dt=0.0)


class TestGeneratorSpec:
    def test_dispatch_with_params(self):
        spec = GeneratorSpec(kind="lagged_logistic", steps=100,
                             params={"delay": 4, "coupling": 0.2})
        x, y = generate(spec)
        direct_x, direct_y = gen_lagged_logistic(100, delay=4, coupling=0.2)
        assert np.array_equal(x.values, direct_x.values)
        assert np.array_equal(y.values, direct_y.values)

    def test_unknown_kind(self):
        with pytest.raises(DataError):
            GeneratorSpec(kind="henon", steps=10)

    def test_bad_counts(self):
        with pytest.raises(DataError):
            GeneratorSpec(kind="lorenz", steps=0)
        with pytest.raises(DataError):
            GeneratorSpec(kind="lorenz", steps=10, burn_in=-1)

    def test_bad_param_name(self):
        spec = GeneratorSpec(kind="lorenz", steps=10, params={"zeta": 1.0})
        with pytest.raises(DataError, match="parameters"):
            generate(spec)

    def test_seed_reaches_noise_driver(self):
        spec1 = GeneratorSpec(kind="moran_fork", steps=100,
                              params={"driver_kind": "noise"}, seed=5)
        spec2 = GeneratorSpec(kind="moran_fork", steps=100,
                              params={"driver_kind": "noise"}, seed=6)
        z1 = generate(spec1)[0]
        z2 = generate(spec2)[0]
        assert not np.array_equal(z1.values, z2.values)

    def test_burn_in_shift_property(self):
        for kind in ("coupled_logistic", "unidirectional_logistic",
                     "lagged_logistic", "moran_fork", "lorenz"):
            full = generate(GeneratorSpec(kind=kind, steps=150))
            cut = generate(GeneratorSpec(kind=kind, steps=100, burn_in=50))
            for f, c in zip(full, cut):
                assert np.array_equal(c.values, f.values[50:])
