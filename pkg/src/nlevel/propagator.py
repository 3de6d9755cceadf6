"""Midpoint-exponential propagation of driven n-level systems.

Each step applies exp(-i dt H(t + dt/2)) to the state, with the matrix
exponential evaluated through a full hermitian eigendecomposition (cyclic
Jacobi, see _kernels).  The scheme is second order in dt and unitary to
solver precision, so norm drift doubles as an error diagnostic.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import (
    HERMITIAN_TOL,
    JACOBI_MAX_SWEEPS,
    JACOBI_OFF_TOL,
    STATUS_NO_CONVERGENCE,
    STATUS_NOT_HERMITIAN,
    evolve_loop,
    jacobi_eigh,
)
from .hamiltonian import SystemSpec, _as_real, build_drift, drive_coefficient

__all__ = [
    "EigenConvergenceError",
    "EvolutionConfig",
    "Trajectory",
    "hermitian_eig",
    "exp_step",
    "evolve",
    "MAX_STEPS",
]

MAX_STEPS = 10**8


class EigenConvergenceError(RuntimeError):
    """Cyclic Jacobi failed to reach the off-diagonal threshold."""


def hermitian_eig(h):
    """Eigenvalues (ascending) and eigenvector columns of a hermitian matrix.

    The input is symmetrized as (H + H^dagger)/2 before decomposition; an
    anti-hermitian residue above 1e-10 raises ValueError.  Equal eigenvalues
    keep the order the Jacobi sweep produced them in.
    """
    a = np.array(h, dtype=np.complex128, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    residue = 0.5 * float(np.max(np.abs(a - a.conj().T)))
    if residue > HERMITIAN_TOL:
        raise ValueError(
            f"matrix is not hermitian (anti-hermitian residue {residue:.3e})"
        )
    a = 0.5 * (a + a.conj().T)
    w, v, sweeps = jacobi_eigh(a, JACOBI_OFF_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise EigenConvergenceError(
            f"cyclic Jacobi did not converge within {JACOBI_MAX_SWEEPS} sweeps"
        )
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def exp_step(h_mid, dt, psi):
    """Apply exp(-i dt h_mid) to psi through the eigendecomposition of h_mid."""
    dt = _as_real(dt, "dt")
    w, v = hermitian_eig(h_mid)
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (w.shape[0],):
        raise ValueError(
            f"state length {psi.shape} does not match matrix dimension {w.shape[0]}"
        )
    y = v.conj().T @ psi
    y = y * np.exp(-1j * w * dt)
    return v @ y


@dataclass(frozen=True)
class EvolutionConfig:
    """Time grid and initial state for a propagation run.

    ``initial_state`` is either a basis index or an explicit amplitude
    sequence (normalized on intake).  Every ``sample_every``-th step is
    recorded; the initial and final instants are always included, and the
    last step is shortened so the run ends exactly at ``t_end``.
    """

    t_start: float
    t_end: float
    dt: float
    initial_state: object = 0
    sample_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "t_start", _as_real(self.t_start, "t_start"))
        object.__setattr__(self, "t_end", _as_real(self.t_end, "t_end"))
        object.__setattr__(self, "dt", _as_real(self.dt, "dt"))
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end <= self.t_start:
            raise ValueError(
                f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]"
            )
        if isinstance(self.sample_every, bool) or not isinstance(
            self.sample_every, (int, np.integer)
        ):
            raise ValueError(f"sample_every must be an integer, got {self.sample_every!r}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")
        object.__setattr__(self, "sample_every", int(self.sample_every))
        if (self.t_end - self.t_start) / self.dt > MAX_STEPS:
            raise ValueError(
                f"time grid exceeds {MAX_STEPS} steps; increase dt or shorten the span"
            )


@dataclass(frozen=True)
class Trajectory:
    """Sampled populations of a propagation run.

    ``times[k]`` is the sample instant, ``populations[k, i]`` is |psi_i|^2,
    and ``norm_errors[k]`` is | ||psi|| - 1 |, a unitarity diagnostic.
    ``final_state`` is the state vector at t_end.
    """

    times: np.ndarray
    populations: np.ndarray
    norm_errors: np.ndarray
    final_state: np.ndarray

    @property
    def n(self) -> int:
        return self.populations.shape[1]


def _initial_vector(n: int, initial_state) -> np.ndarray:
    if isinstance(initial_state, bool):
        raise ValueError("initial_state must be a basis index or amplitude sequence")
    if isinstance(initial_state, (int, np.integer)):
        idx = int(initial_state)
        if not 0 <= idx < n:
            raise ValueError(f"initial state index {idx} outside [0, {n})")
        psi = np.zeros(n, dtype=np.complex128)
        psi[idx] = 1.0
        return psi
    arr = np.asarray(initial_state, dtype=np.complex128)
    if arr.shape != (n,):
        raise ValueError(f"initial state must have {n} amplitudes, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("initial state amplitudes must be finite")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ValueError("initial state must not be the zero vector")
    return arr / norm


def _step_count(span: float, dt: float) -> int:
    # back off by one ulp-scale factor so span/dt == integer N stays N steps
    n_steps = int(math.ceil((span / dt) * (1.0 - 1e-12)))
    return max(n_steps, 1)


def evolve(spec: SystemSpec, config: EvolutionConfig) -> Trajectory:
    """Propagate the spec's initial value problem over the config's time grid.

    The Hamiltonian is rebuilt at every step midpoint, so the drive phase is
    exact.  Raises EigenConvergenceError if the eigensolver stalls at some
    step (the failing time is reported).
    """
    h0 = np.ascontiguousarray(build_drift(spec))
    drive = np.ascontiguousarray(drive_coefficient(spec))
    psi0 = _initial_vector(spec.n, config.initial_state)
    n_steps = _step_count(config.t_end - config.t_start, config.dt)
    times, pops, norm_errors, final_state, status, fail_t = evolve_loop(
        h0,
        drive,
        float(spec.omega),
        psi0,
        float(config.t_start),
        float(config.t_end),
        float(config.dt),
        n_steps,
        config.sample_every,
        JACOBI_OFF_TOL,
        JACOBI_MAX_SWEEPS,
        HERMITIAN_TOL,
    )
    if status == STATUS_NO_CONVERGENCE:
        raise EigenConvergenceError(
            f"eigensolver failed to converge at t = {fail_t!r}"
        )
    if status == STATUS_NOT_HERMITIAN:
        raise ValueError(f"Hamiltonian is not hermitian at t = {fail_t!r}")
    return Trajectory(
        times=times.copy(),
        populations=pops.copy(),
        norm_errors=norm_errors.copy(),
        final_state=final_state.copy(),
    )
