import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import nlevel.propagator as propagator
from nlevel import (
    EigenConvergenceError,
    EvolutionConfig,
    SystemSpec,
    build_full_hamiltonian,
    build_shift,
    evolve,
    exp_step,
    hermitian_eig,
)


def max_abs(m):
    return float(np.max(np.abs(m)))


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (m + m.conj().T)


class TestHermitianEig:
    def test_diagonal_input_sorted(self):
        w, v = hermitian_eig(np.diag([3.0, -1.0, 0.5]))
        assert np.allclose(w, [-1.0, 0.5, 3.0], atol=1e-14)
        # columns must be the permuted basis vectors up to phase
        assert max_abs(np.abs(v) - np.abs(np.eye(3)[:, [1, 2, 0]])) <= 1e-12

    def test_sigma_x_spectrum(self):
        w, v = hermitian_eig(np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(w, [-1.0, 1.0], atol=1e-13)
        for k in range(2):
            assert max_abs(v[:, k].conj() @ v[:, k] - 1.0) <= 1e-13

    def test_ring_coupling_degenerate_pair(self):
        # shift + shift^dagger on three sites: eigenvalues 2cos(2 pi k / 3)
        s = build_shift(3)
        w, _ = hermitian_eig(s + s.conj().T)
        assert np.allclose(w, [-1.0, -1.0, 2.0], atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_matches_reference_solver(self, n):
        rng = np.random.default_rng(500 + n)
        for _ in range(5):
            h = random_hermitian(rng, n)
            w, v = hermitian_eig(h)
            assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-11)
            assert max_abs(v @ np.diag(w) @ v.conj().T - h) <= 1e-10
            assert max_abs(v.conj().T @ v - np.eye(n)) <= 1e-10

    def test_eigenvalues_ascending(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            w, _ = hermitian_eig(random_hermitian(rng, 6))
            assert np.all(np.diff(w) >= -1e-14)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not hermitian"):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_rectangular(self):
        with pytest.raises(ValueError, match="square"):
            hermitian_eig(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            hermitian_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestExpStep:
    def test_zero_dt_is_identity(self):
        rng = np.random.default_rng(3)
        h = random_hermitian(rng, 4)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        assert max_abs(exp_step(h, 0.0, psi) - psi) <= 1e-13

    def test_diagonal_hamiltonian_phases(self):
        energies = np.array([0.7, -0.2, 1.4])
        psi = np.ones(3, dtype=complex) / math.sqrt(3)
        dt = 0.83
        got = exp_step(np.diag(energies), dt, psi)
        expected = np.exp(-1j * energies * dt) * psi
        assert max_abs(got - expected) <= 1e-13

    def test_composition(self):
        rng = np.random.default_rng(9)
        h = random_hermitian(rng, 5)
        psi = rng.normal(size=5) + 1j * rng.normal(size=5)
        psi /= np.linalg.norm(psi)
        dt = 0.37
        twice = exp_step(h, dt, exp_step(h, dt, psi))
        once = exp_step(h, 2 * dt, psi)
        assert max_abs(twice - once) <= 1e-12

    def test_preserves_norm(self):
        rng = np.random.default_rng(21)
        h = random_hermitian(rng, 6)
        psi = rng.normal(size=6) + 1j * rng.normal(size=6)
        psi /= np.linalg.norm(psi)
        out = exp_step(h, 1.9, psi)
        assert abs(np.linalg.norm(out) - 1.0) <= 1e-12

    def test_rejects_mismatched_state(self):
        with pytest.raises(ValueError, match="does not match"):
            exp_step(np.eye(3), 0.1, np.ones(2, dtype=complex))


class TestEvolutionConfig:
    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError, match="dt"):
            EvolutionConfig(t_start=0.0, t_end=1.0, dt=0.0)

    def test_rejects_reversed_interval(self):
        with pytest.raises(ValueError, match="t_end"):
            EvolutionConfig(t_start=1.0, t_end=1.0, dt=0.1)

    def test_rejects_bad_sample_every(self):
        with pytest.raises(ValueError, match="sample_every"):
            EvolutionConfig(t_start=0.0, t_end=1.0, dt=0.1, sample_every=0)
        with pytest.raises(ValueError, match="sample_every"):
            EvolutionConfig(t_start=0.0, t_end=1.0, dt=0.1, sample_every=True)

    def test_rejects_oversized_grid(self):
        with pytest.raises(ValueError, match="steps"):
            EvolutionConfig(t_start=0.0, t_end=1.0, dt=1e-12)


THREE_LEVEL = SystemSpec(
    n=3,
    energies=(-1.0, 0.3, 1.1),
    g=0.25,
    omega=1.0,
    drive_model="generalized",
)


class TestEvolve:
    def test_undriven_populations_frozen(self):
        spec = SystemSpec(n=3, energies=(-1.0, 0.3, 1.1))
        config = EvolutionConfig(
            t_start=0.0, t_end=5.0, dt=0.01,
            initial_state=np.array([1.0, 1.0, 1.0]) / math.sqrt(3),
        )
        traj = evolve(spec, config)
        assert max_abs(traj.populations - traj.populations[0]) <= 1e-12

    def test_time_grid_lands_on_endpoint(self):
        config = EvolutionConfig(t_start=0.0, t_end=1.0, dt=0.3)
        traj = evolve(THREE_LEVEL, config)
        # ceil(1/0.3) = 4 steps, last one shortened
        assert traj.times.shape == (5,)
        assert np.allclose(traj.times[:4], [0.0, 0.3, 0.6, 0.9], atol=1e-15)
        assert traj.times[-1] == 1.0

    def test_integer_ratio_keeps_step_count(self):
        config = EvolutionConfig(t_start=0.0, t_end=30.0, dt=0.005, sample_every=20)
        traj = evolve(THREE_LEVEL, config)
        # 6000 steps sampled every 20th, plus the initial instant
        assert traj.times.shape == (301,)
        assert traj.times[-1] == 30.0

    def test_times_strictly_increasing(self):
        config = EvolutionConfig(t_start=0.5, t_end=3.7, dt=0.07, sample_every=3)
        traj = evolve(THREE_LEVEL, config)
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[0] == 0.5
        assert traj.times[-1] == 3.7

    def test_sample_count_with_remainder(self):
        # 5 steps sampled every 2nd: instants 0, 2, 4, plus the final 5th
        config = EvolutionConfig(t_start=0.0, t_end=1.5, dt=0.3, sample_every=2)
        traj = evolve(THREE_LEVEL, config)
        assert traj.times.shape == (4,)

    def test_single_step_when_dt_exceeds_span(self):
        config = EvolutionConfig(t_start=0.0, t_end=1.0, dt=5.0)
        traj = evolve(THREE_LEVEL, config)
        assert traj.times.shape == (2,)
        assert traj.times[-1] == 1.0

    def test_norm_error_stays_small(self):
        config = EvolutionConfig(t_start=0.0, t_end=20.0, dt=0.01)
        traj = evolve(THREE_LEVEL, config)
        assert float(np.max(traj.norm_errors)) <= 1e-10
        assert np.allclose(traj.populations.sum(axis=1), 1.0, atol=1e-10)

    def test_resonant_two_level_transfer(self):
        # driving at the level splitting swaps the populations as sin^2(g t / 2)
        g = 0.05
        period = 2.0 * math.pi / g
        spec = SystemSpec(
            n=2, energies=(0.5, -0.5), g=g, omega=1.0, drive_model="rwa2"
        )
        config = EvolutionConfig(
            t_start=0.0, t_end=period, dt=period / 2000, initial_state=1
        )
        traj = evolve(spec, config)
        predicted = np.sin(0.5 * g * traj.times) ** 2
        assert float(np.max(np.abs(traj.populations[:, 0] - predicted))) <= 1e-3

    def test_cosine_drive_matches_generalized_bitwise(self):
        base = dict(n=2, energies=(0.5, -0.5), g=0.3, omega=1.0)
        config = EvolutionConfig(t_start=0.0, t_end=8.0, dt=0.02, sample_every=4)
        a = evolve(SystemSpec(drive_model="cosine2", **base), config)
        b = evolve(SystemSpec(drive_model="generalized", **base), config)
        assert np.array_equal(a.populations, b.populations)
        assert np.array_equal(a.times, b.times)

    def test_populations_invariant_under_energy_offset(self):
        shift = 2.75
        base = SystemSpec(
            n=3, energies=(-1.0, 0.3, 1.1), g=0.25, omega=1.0,
            drive_model="generalized", include_delta0=True,
        )
        lifted = SystemSpec(
            n=3,
            energies=tuple(e + shift for e in (-1.0, 0.3, 1.1)),
            g=0.25, omega=1.0,
            drive_model="generalized", include_delta0=True,
        )
        config = EvolutionConfig(t_start=0.0, t_end=6.0, dt=0.01)
        a = evolve(base, config)
        b = evolve(lifted, config)
        assert max_abs(a.populations - b.populations) <= 1e-9

    def test_populations_ignore_trace_term(self):
        plain = SystemSpec(n=3, energies=(-1.0, 0.3, 1.1), g=0.25, omega=1.0,
                           drive_model="generalized")
        offset = SystemSpec(n=3, energies=(-1.0, 0.3, 1.1), g=0.25, omega=1.0,
                            drive_model="generalized", include_delta0=True)
        config = EvolutionConfig(t_start=0.0, t_end=6.0, dt=0.01)
        a = evolve(plain, config)
        b = evolve(offset, config)
        assert max_abs(a.populations - b.populations) <= 1e-9

    def test_second_order_convergence(self):
        t_end = 10.0
        ref = evolve(
            THREE_LEVEL,
            EvolutionConfig(t_start=0.0, t_end=t_end, dt=t_end / 8192),
        ).final_state
        errors = []
        for steps in (128, 256, 512):
            traj = evolve(
                THREE_LEVEL,
                EvolutionConfig(t_start=0.0, t_end=t_end, dt=t_end / steps),
            )
            errors.append(float(np.linalg.norm(traj.final_state - ref)))
        for coarse, fine in zip(errors, errors[1:]):
            assert 3.3 <= coarse / fine <= 4.8

    def test_final_state_matches_last_sample(self):
        config = EvolutionConfig(t_start=0.0, t_end=2.0, dt=0.01, sample_every=7)
        traj = evolve(THREE_LEVEL, config)
        assert max_abs(np.abs(traj.final_state) ** 2 - traj.populations[-1]) <= 1e-14
        assert traj.n == 3


class TestInitialState:
    CONFIG = dict(t_start=0.0, t_end=1.0, dt=0.05)

    def test_index_equals_explicit_vector(self):
        a = evolve(THREE_LEVEL, EvolutionConfig(initial_state=1, **self.CONFIG))
        b = evolve(
            THREE_LEVEL,
            EvolutionConfig(initial_state=[0.0, 1.0, 0.0], **self.CONFIG),
        )
        assert np.array_equal(a.populations, b.populations)

    def test_amplitudes_are_normalized(self):
        a = evolve(THREE_LEVEL, EvolutionConfig(initial_state=2, **self.CONFIG))
        b = evolve(
            THREE_LEVEL,
            EvolutionConfig(initial_state=[0.0, 0.0, 5.0], **self.CONFIG),
        )
        assert np.array_equal(a.populations, b.populations)

    def test_rejects_zero_vector(self):
        config = EvolutionConfig(initial_state=[0.0, 0.0, 0.0], **self.CONFIG)
        with pytest.raises(ValueError, match="zero vector"):
            evolve(THREE_LEVEL, config)

    def test_rejects_wrong_length(self):
        config = EvolutionConfig(initial_state=[1.0, 0.0], **self.CONFIG)
        with pytest.raises(ValueError, match="amplitudes"):
            evolve(THREE_LEVEL, config)

    def test_rejects_out_of_range_index(self):
        config = EvolutionConfig(initial_state=3, **self.CONFIG)
        with pytest.raises(ValueError, match="outside"):
            evolve(THREE_LEVEL, config)

    def test_rejects_bool(self):
        config = EvolutionConfig(initial_state=True, **self.CONFIG)
        with pytest.raises(ValueError):
            evolve(THREE_LEVEL, config)


class TestKernelStatusPlumbing:
    # fake kernels stand in for the jit path so the error mapping is pinned
    # without manufacturing a genuinely divergent matrix

    @staticmethod
    def _fake_loop(status, fail_t):
        def fake(h0, drive, omega, psi0, t_start, t_end, dt, n_steps,
                 sample_every, off_tol, max_sweeps, herm_tol):
            times = np.zeros(1)
            pops = np.zeros((1, psi0.shape[0]))
            errs = np.zeros(1)
            return times, pops, errs, psi0, status, fail_t
        return fake

    def test_no_convergence_raises(self, monkeypatch):
        monkeypatch.setattr(propagator, "evolve_loop", self._fake_loop(1, 0.25))
        config = EvolutionConfig(t_start=0.0, t_end=1.0, dt=0.5)
        with pytest.raises(EigenConvergenceError, match="t = 0.25"):
            evolve(THREE_LEVEL, config)

    def test_not_hermitian_raises(self, monkeypatch):
        monkeypatch.setattr(propagator, "evolve_loop", self._fake_loop(2, 0.75))
        config = EvolutionConfig(t_start=0.0, t_end=1.0, dt=0.5)
        with pytest.raises(ValueError, match="not hermitian"):
            evolve(THREE_LEVEL, config)


class TestFallbackParity:
    def test_pure_python_path_matches(self):
        # run the same short evolution in a subprocess with the jit disabled
        # and compare sampled populations
        script = (
            "import json, numpy as np\n"
            "from nlevel import SystemSpec, EvolutionConfig, evolve\n"
            "spec = SystemSpec(n=3, energies=(-1.0, 0.3, 1.1), g=0.25,\n"
            "                  omega=1.0, drive_model='generalized')\n"
            "config = EvolutionConfig(t_start=0.0, t_end=4.0, dt=0.05)\n"
            "traj = evolve(spec, config)\n"
            "print(json.dumps({'times': traj.times.tolist(),\n"
            "                  'pops': traj.populations.tolist()}))\n"
        )
        results = []
        for flag in ("0", "1"):
            env = dict(os.environ, NLEVEL_NO_NUMBA=flag)
            proc = subprocess.run(
                [sys.executable, "-c", script],
                capture_output=True, text=True, env=env, check=True,
            )
            results.append(json.loads(proc.stdout))
        a, b = results
        assert a["times"] == b["times"]
        assert np.allclose(np.array(a["pops"]), np.array(b["pops"]), atol=1e-12)
