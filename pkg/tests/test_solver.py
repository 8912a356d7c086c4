import math

import numpy as np
import pytest

from lqa import (
    IsingProblem,
    SolverConfig,
    SolverError,
    SolverState,
    anneal,
    brute_force_ground,
    cost,
    energy,
    gradient,
    init_weights,
)
from lqa.solver import (
    spin_readout,
    update_adam,
    update_momentum,
    update_vanilla,
)
from conftest import random_ising


def finite_difference_gradient(p, w, t, gamma, h=1e-5):
    g = np.zeros_like(w)
    for i in range(len(w)):
        wp, wm = w.copy(), w.copy()
        wp[i] += h
        wm[i] -= h
        g[i] = (cost(p, wp, t, gamma) - cost(p, wm, t, gamma)) / (2 * h)
    return g


class TestCost:
    def test_origin_at_t0_is_minus_n(self, rng):
        p = random_ising(7, rng)
        assert cost(p, np.zeros(7), 0.0, 0.5) == pytest.approx(-7.0)

    def test_origin_at_t1_is_zero(self, rng):
        p = random_ising(7, rng)
        assert cost(p, np.zeros(7), 1.0, 0.5) == pytest.approx(0.0)

    def test_saturated_limit_matches_energy(self, rng):
        p = random_ising(10, rng)
        w = 20.0 * rng.choice([-1.0, 1.0], 10)
        e = energy(p, np.sign(w))
        gamma = 0.7
        assert cost(p, w, 1.0, gamma) == pytest.approx(gamma * e, rel=1e-6)

    def test_state_caches_normalised(self, rng):
        state = SolverState(w=rng.uniform(-2.0, 2.0, size=30))
        z, x = state.caches()
        np.testing.assert_allclose(z * z + x * x, 1.0, atol=1e-12)
        assert np.all(np.abs(z) < 1.0)


class TestGradient:
    def test_zero_at_origin(self, rng):
        # the transverse-field minimum becomes a saddle: gradient is
        # identically zero there for every problem, t and gamma
        for n in (3, 11):
            p = random_ising(n, rng)
            for t in (0.0, 0.4, 1.0):
                assert np.all(gradient(p, np.zeros(n), t, 2.0) == 0.0)

    def test_matches_finite_differences(self, rng):
        p = random_ising(50, rng)
        w = rng.normal(size=50)
        g = gradient(p, w, 0.37, 1.3)
        fd = finite_difference_gradient(p, w, 0.37, 1.3)
        assert np.linalg.norm(g - fd) / np.linalg.norm(g) < 1e-5

    def test_single_spin_closed_form(self):
        p = IsingProblem(J=np.zeros((1, 1)))
        for w0, t in [(0.3, 0.2), (-1.1, 0.8), (2.5, 0.5)]:
            g = gradient(p, np.array([w0]), t, 1.0)[0]
            th = math.tanh(w0)
            # derivative of -(1-t)cos((pi/2) tanh w)
            expected = (
                (math.pi / 2)
                * (1 - t)
                * math.sin(math.pi / 2 * th)
                * (1 - th * th)
            )
            assert g == pytest.approx(expected, rel=1e-12)


class TestUpdaters:
    def test_vanilla_zero_grad_noop(self):
        st = SolverState(w=np.ones(3))
        update_vanilla(st, np.zeros(3), 0.5)
        assert np.array_equal(st.w, np.ones(3))

    def test_vanilla_step(self):
        st = SolverState(w=np.zeros(3))
        update_vanilla(st, np.ones(3), 0.5)
        assert np.array_equal(st.w, -0.5 * np.ones(3))

    def test_vanilla_linearity(self, rng):
        g1, g2 = rng.normal(size=4), rng.normal(size=4)
        a = SolverState(w=np.zeros(4))
        update_vanilla(a, g1, 0.3)
        update_vanilla(a, g2, 0.3)
        b = SolverState(w=np.zeros(4))
        update_vanilla(b, g1 + g2, 0.3)
        np.testing.assert_allclose(a.w, b.w, atol=1e-15)

    def test_momentum_zero_mu_is_vanilla(self, rng):
        g = rng.normal(size=5)
        a = SolverState(w=np.zeros(5))
        update_momentum(a, g, 0.2, 0.0)
        b = SolverState(w=np.zeros(5))
        update_vanilla(b, g, 0.2)
        np.testing.assert_allclose(a.w, b.w)

    def test_momentum_first_step(self, rng):
        g = rng.normal(size=5)
        st = SolverState(w=np.zeros(5))
        update_momentum(st, g, 0.4, 0.99)
        np.testing.assert_allclose(st.velocity, -0.4 * g)
        np.testing.assert_allclose(st.w, -0.4 * g)

    def test_momentum_geometric_series(self):
        # constant gradient: v_k = -eta*g*(1 - mu^k)/(1 - mu)
        g = np.array([1.0])
        eta, mu, k = 0.1, 0.99, 40
        st = SolverState(w=np.zeros(1))
        for _ in range(k):
            update_momentum(st, g, eta, mu)
        expected = -eta * (1 - mu**k) / (1 - mu)
        assert st.velocity[0] == pytest.approx(expected, rel=1e-12)

    def test_adam_zero_grad_noop(self):
        st = SolverState(w=np.ones(3), step_index=1)
        update_adam(st, np.zeros(3), 0.5)
        assert np.array_equal(st.w, np.ones(3))

    def test_adam_first_step_formula(self, rng):
        # at k=1 bias correction cancels: step is eta*g/(|g| + eps')
        g = rng.normal(size=6)
        eta, eps = 0.3, 1e-8
        st = SolverState(w=np.zeros(6), step_index=1)
        update_adam(st, g, eta, 0.9, 0.999, eps)
        expected = -eta * g / (np.abs(g) + eps)
        np.testing.assert_allclose(st.w, expected, rtol=1e-10)

    def test_adam_bounded_update(self, rng):
        eta = 0.25
        st = SolverState(w=np.zeros(8))
        for k in range(1, 200):
            st.step_index = k
            before = st.w.copy()
            update_adam(st, rng.normal(size=8, scale=10.0 ** rng.integers(-3, 4)), eta)
            assert np.all(np.abs(st.w - before) <= eta * 1.2)

    def test_adam_requires_step_counter(self):
        st = SolverState(w=np.zeros(2), step_index=0)
        with pytest.raises(ValueError):
            update_adam(st, np.ones(2), 0.1)


class TestInitWeights:
    def test_zero_scale(self):
        assert np.all(init_weights(10, 0.0, 1) == 0.0)

    def test_seed_determinism(self):
        np.testing.assert_array_equal(init_weights(50, 0.1, 9), init_weights(50, 0.1, 9))

    def test_uniform_statistics(self):
        n = 100_000
        w = init_weights(n, 0.25, 3)
        assert np.max(np.abs(w)) <= 0.25
        # mean of U[-s, s] has std s/sqrt(3n)
        assert abs(w.mean()) < 3 * 0.25 / math.sqrt(3 * n)


class TestAnneal:
    def test_two_spin_ground_state(self):
        p = IsingProblem(J=np.array([[0.0, 1.0], [1.0, 0.0]]))
        cfg = SolverConfig(steps=200, gamma=1.0, step_size=0.1, momentum=0.9, optimizer="momentum")
        s, _ = anneal(p, cfg, init_weights(2, 0.1, 0))
        assert energy(p, s) == -2.0

    def test_stays_at_saddle_without_momentum(self, rng):
        p = random_ising(20, rng)
        cfg = SolverConfig(steps=100, gamma=1.0, step_size=0.1, momentum=0.0, optimizer="vanilla")
        s, trace = anneal(p, SolverConfig(**{**cfg.__dict__, "trace_stride": 1}), np.zeros(20))
        assert np.all(s == 1.0)  # sign(0) -> +1
        assert all(c == pytest.approx(-(1 - t) * 20) for t, c in zip(trace.ts, trace.costs))

    def test_bitwise_determinism(self, rng):
        p = random_ising(30, rng)
        cfg = SolverConfig(steps=150, gamma=0.5, step_size=0.5, optimizer="adam", trace_stride=1)
        w0 = init_weights(30, 0.1, 2)
        s1, t1 = anneal(p, cfg, w0)
        s2, t2 = anneal(p, cfg, w0)
        assert np.array_equal(s1, s2)
        assert t1.costs == t2.costs and t1.energies == t2.energies

    def test_readout_scale_invariance(self, rng):
        w = rng.normal(size=25)
        scale = rng.uniform(0.1, 10.0, size=25)
        np.testing.assert_array_equal(spin_readout(w), spin_readout(w * scale))

    def test_nonfinite_abort_names_step(self, rng):
        inf = np.inf
        p = IsingProblem(J=np.array([[0.0, inf], [inf, 0.0]]))
        cfg = SolverConfig(steps=10, gamma=1.0, step_size=1.0, optimizer="vanilla")
        with pytest.raises(SolverError, match=r"step \d+"):
            anneal(p, cfg, np.array([0.1, 0.2]))

    def test_schedule_hits_endpoint(self, rng):
        p = random_ising(5, rng)
        cfg = SolverConfig(steps=7, gamma=1.0, step_size=0.01, optimizer="vanilla", trace_stride=1)
        _, trace = anneal(p, cfg, init_weights(5, 0.1, 1))
        assert trace.ts[0] == pytest.approx(1 / 7)
        assert trace.ts[-1] == 1.0

    def test_custom_schedule(self, rng):
        p = random_ising(5, rng)
        cfg = SolverConfig(
            steps=10, gamma=1.0, step_size=0.01, optimizer="vanilla",
            schedule=lambda i, n: (i / n) ** 2, trace_stride=1,
        )
        _, trace = anneal(p, cfg, init_weights(5, 0.1, 1))
        assert trace.ts == [(i / 10) ** 2 for i in range(1, 11)]

    def test_finds_ground_state_fig1_scale(self, rng):
        # 20 spins, couplings U[-1,1]: momentum-assisted anneal should
        # reach the exact optimum in a majority of random inits
        p = random_ising(20, rng)
        e0, _ = brute_force_ground(p)
        cfg = SolverConfig(steps=500, gamma=1.0, step_size=0.02, momentum=0.99, optimizer="momentum")
        hits = 0
        for trial in range(50):
            s, _ = anneal(p, cfg, init_weights(20, 0.1, np.random.SeedSequence([4, trial])))
            hits += energy(p, s) == pytest.approx(e0, abs=1e-9 * np.abs(p.J).sum())
        assert hits > 25


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"steps": 0},
            {"gamma": 0.0},
            {"step_size": -1.0},
            {"momentum": 1.5},
            {"optimizer": "sgd"},
            {"trace_stride": -1},
        ],
    )
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)
