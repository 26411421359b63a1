import math

import numpy as np
import pytest

from cmlwealth import (
    ConfigurationError,
    InitSpec,
    LatticeState,
    ModelParams,
    init_state,
    local_field,
    run,
    step,
)
from cmlwealth.lattice import DIVERGENCE_THRESHOLD


def homogeneous(n, c):
    return LatticeState(x=np.full(n, float(c)))


class TestModelParams:
    def test_rejects_tiny_lattice(self):
        with pytest.raises(ConfigurationError):
            ModelParams(n=2, r=4.0, a=0.5)

    def test_rejects_nonpositive_r(self):
        with pytest.raises(ConfigurationError):
            ModelParams(n=5, r=0.0, a=0.5)

    def test_rejects_negative_a(self):
        with pytest.raises(ConfigurationError):
            ModelParams(n=5, r=2.0, a=-0.1)

    def test_vector_params_must_match_n(self):
        with pytest.raises(ConfigurationError):
            ModelParams(n=5, r=np.ones(4), a=0.5)
        p = ModelParams(n=4, r=np.array([1.0, 2.0, 3.0, 4.0]), a=0.5)
        assert p.r_array().tolist() == [1.0, 2.0, 3.0, 4.0]
        assert p.a_array().tolist() == [0.5] * 4


class TestInitState:
    def test_values_in_range(self):
        s = init_state(5, InitSpec(lo=1, hi=100, seed=42))
        assert s.t == 0
        assert np.all(s.x >= 1) and np.all(s.x < 100)

    def test_deterministic(self):
        a = init_state(5, InitSpec(lo=1, hi=100, seed=42))
        b = init_state(5, InitSpec(lo=1, hi=100, seed=42))
        assert np.array_equal(a.x, b.x)

    def test_large_sample_mean(self):
        # E[U(1,100)] = 50.5; CLT bound 3*sigma/sqrt(n) ~ 0.27
        s = init_state(100_000, InitSpec(lo=1, hi=100, seed=7))
        assert 48 <= s.x.mean() <= 53

    def test_invalid_range(self):
        with pytest.raises(ConfigurationError):
            InitSpec(lo=5, hi=5, seed=0)
        with pytest.raises(ConfigurationError):
            InitSpec(lo=-1, hi=5, seed=0)

    def test_invalid_n(self):
        with pytest.raises(ConfigurationError):
            init_state(2, InitSpec(lo=1, hi=2, seed=0))


class TestLocalField:
    def test_periodic_wrap(self):
        s = LatticeState(x=np.array([1.0, 2.0, 3.0]))
        assert local_field(s, 0) == 2.5

    def test_homogeneous(self):
        assert local_field(homogeneous(7, 3.3), 4) == 3.3

    def test_interior_site(self):
        s = LatticeState(x=np.array([1.0, 2.0, 3.0, 4.0]))
        assert local_field(s, 2) == 3.0


class TestStep:
    def test_zero_fixed_point(self):
        p = ModelParams(n=6, r=4.0, a=0.6)
        out = step(homogeneous(6, 0.0), p)
        assert np.all(out.x == 0.0)
        assert out.t == 1 and not out.divergent

    @pytest.mark.parametrize("r,a", [(4.0, 0.6), (8.0, 0.92), (2.0, 1.5)])
    def test_homogeneous_fixed_point(self, r, a):
        xstar = math.log(r) / abs(1 - a)
        p = ModelParams(n=8, r=r, a=a)
        out = step(homogeneous(8, xstar), p)
        assert np.allclose(out.x, xstar, rtol=1e-12)

    def test_against_straight_line_oracle(self):
        # Independent per-site evaluation of the update rule.
        x = [1.0, 2.0, 3.0, 4.0]
        r, a = 4.0, 0.6
        n = len(x)
        expected = []
        for i in range(n):
            psi = (x[(i - 1) % n] + x[(i + 1) % n]) / 2
            expected.append(r * x[i] * math.exp(-abs(x[i] - a * psi)))
        out = step(LatticeState(x=np.array(x)), ModelParams(n=n, r=r, a=a))
        assert np.allclose(out.x, expected, rtol=1e-15)

    def test_nonnegativity(self):
        rng = np.random.default_rng(0)
        p = ModelParams(n=50, r=6.0, a=1.2)
        s = LatticeState(x=rng.uniform(0, 100, 50))
        for _ in range(20):
            s = step(s, p)
            assert np.all(s.x >= 0)

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(0.1, 10, 31)
        p = ModelParams(n=31, r=5.0, a=0.8)
        stepped = step(LatticeState(x=x), p).x
        for k in (1, 7, 30):
            rotated = step(LatticeState(x=np.roll(x, k)), p).x
            assert np.array_equal(rotated, np.roll(stepped, k))

    def test_reflection_equivariance(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(0.1, 10, 24)
        p = ModelParams(n=24, r=5.0, a=0.8)
        assert np.array_equal(step(LatticeState(x=x[::-1]), p).x,
                              step(LatticeState(x=x), p).x[::-1])

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 50, 40)
        p = ModelParams(n=40, r=3.0, a=0.4)
        a1 = step(LatticeState(x=x.copy()), p)
        a2 = step(LatticeState(x=x.copy()), p)
        assert np.array_equal(a1.x, a2.x)

    def test_size_mismatch(self):
        with pytest.raises(ConfigurationError):
            step(homogeneous(5, 1.0), ModelParams(n=6, r=2.0, a=0.5))


class TestRun:
    def test_zero_steps_identity(self):
        s = homogeneous(5, 2.0)
        out = run(s, ModelParams(n=5, r=4.0, a=0.6), 0)
        assert out is s

    def test_composition(self):
        rng = np.random.default_rng(4)
        p = ModelParams(n=20, r=4.0, a=0.6)
        s = LatticeState(x=rng.uniform(1, 100, 20))
        manual = s
        for _ in range(10):
            manual = step(manual, p)
        assert np.array_equal(run(s, p, 10).x, manual.x)
        assert run(s, p, 10).t == 10

    def test_geometric_divergence_at_unit_coupling(self):
        # Homogeneous state with a=1: the coupling term cancels and the
        # wealths grow by exactly r per step until the threshold trips.
        p = ModelParams(n=5, r=4.0, a=1.0)
        s = homogeneous(5, 1.0)
        k = 5
        out = run(s, p, k)
        assert np.allclose(out.x, 4.0 ** k, rtol=1e-12)
        out = run(s, p, 10_000)
        assert out.divergent
        assert out.t <= math.ceil(math.log(DIVERGENCE_THRESHOLD) / math.log(4.0)) + 1

    def test_fixed_point_drift_over_100_steps(self):
        r, a = 4.0, 0.6
        xstar = math.log(r) / abs(1 - a)
        out = run(homogeneous(10, xstar), ModelParams(n=10, r=r, a=a), 100)
        assert np.allclose(out.x, xstar, rtol=1e-10)

    def test_negative_steps(self):
        with pytest.raises(ConfigurationError):
            run(homogeneous(5, 1.0), ModelParams(n=5, r=2.0, a=0.5), -1)
