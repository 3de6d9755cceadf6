"""Hamiltonian assembly for a periodically driven n-level system (hbar = 1).

The static part is the discrete Fourier transform of the level energies
expanded over clock-matrix powers; the drive couples the levels cyclically
through the shift matrix.  Supported drive models:

* ``"none"``         static Hamiltonian only
* ``"generalized"``  (g/2) (e^{i w t} S + e^{-i w t} S^dagger) with S the
                     shift matrix, any n
* ``"cosine2"``      g cos(w t) sigma_x, two levels only (identical to
                     "generalized" at n = 2)
* ``"rwa2"``         rotating-wave coupling for two levels; exactly resonant
                     at w = E0 - E1
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import _check_dim, build_shift, root_power

__all__ = [
    "DRIVE_MODELS",
    "SystemSpec",
    "energies_to_deltas",
    "deltas_to_energies",
    "build_drift",
    "build_interaction",
    "interaction_diagonal",
    "drive_coefficient",
    "build_full_hamiltonian",
]

DRIVE_MODELS = ("none", "generalized", "cosine2", "rwa2")

_TWO_LEVEL_MODELS = ("cosine2", "rwa2")


def _as_real(value, what: str) -> float:
    if isinstance(value, bool) or isinstance(value, (complex, np.complexfloating)):
        raise ValueError(f"{what} must be a real number, got {value!r}")
    if not isinstance(value, (int, float, np.integer, np.floating)):
        raise ValueError(f"{what} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite, got {value}")
    return value


def _phase(x: float) -> complex:
    # e^{ix} assembled from cos/sin so every builder shares the same rounding
    return complex(math.cos(x), math.sin(x))


@dataclass(frozen=True)
class SystemSpec:
    """Physical description of a driven n-level system.

    ``energies`` are the bare level energies E_0 .. E_{n-1}.  ``g`` is the
    drive amplitude and ``omega`` the drive angular frequency.  With
    ``include_delta0`` the mean-energy identity term stays in the static
    Hamiltonian; it only rotates the global phase of a trajectory.
    """

    n: int
    energies: tuple
    g: float = 0.0
    omega: float = 0.0
    drive_model: str = "none"
    include_delta0: bool = False

    def __post_init__(self):
        n = _check_dim(self.n)
        object.__setattr__(self, "n", n)
        energies = tuple(_as_real(e, "energy") for e in self.energies)
        if len(energies) != n:
            raise ValueError(
                f"expected {n} energies, got {len(energies)}"
            )
        object.__setattr__(self, "energies", energies)
        g = _as_real(self.g, "g")
        if g < 0:
            raise ValueError(f"g must be non-negative, got {g}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "omega", _as_real(self.omega, "omega"))
        if self.drive_model not in DRIVE_MODELS:
            raise ValueError(
                f"drive_model must be one of {DRIVE_MODELS}, got {self.drive_model!r}"
            )
        if self.drive_model in _TWO_LEVEL_MODELS and n != 2:
            raise ValueError(f"drive_model {self.drive_model!r} requires n = 2, got n = {n}")
        if not isinstance(self.include_delta0, bool):
            raise ValueError("include_delta0 must be a bool")


def energies_to_deltas(energies) -> np.ndarray:
    """Fourier coefficients Delta_j = (1/n) sum_k sigma^((n-j)k mod n) E_k.

    For real energies the coefficients pair up as Delta_{n-j} == conj(Delta_j)
    and Delta_0 is the mean energy.
    """
    arr = np.asarray(energies)
    if np.iscomplexobj(arr):
        raise ValueError("energies must be real")
    e = arr.astype(np.float64)
    if e.ndim != 1 or e.shape[0] < 2:
        raise ValueError("energies must be a 1-d sequence of length >= 2")
    if not np.all(np.isfinite(e)):
        raise ValueError("energies must be finite")
    n = e.shape[0]
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    return root_power(n, (n - j) * k) @ e / n


def deltas_to_energies(deltas, imag_tol: float = 1e-10) -> np.ndarray:
    """Invert the coefficient map: E_m = sum_j sigma^(m j) Delta_j.

    The reconstruction must come out real; an imaginary residue larger than
    ``imag_tol`` raises ValueError, smaller ones are discarded.
    """
    d = np.asarray(deltas, dtype=np.complex128)
    if d.ndim != 1 or d.shape[0] < 2:
        raise ValueError("deltas must be a 1-d sequence of length >= 2")
    if not np.all(np.isfinite(d)):
        raise ValueError("deltas must be finite")
    n = d.shape[0]
    m = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    e = root_power(n, m * j) @ d
    residue = float(np.max(np.abs(e.imag)))
    if residue > imag_tol:
        raise ValueError(
            f"reconstructed energies are not real (max imaginary part {residue:.3e})"
        )
    return np.ascontiguousarray(e.real)


def build_drift(spec: SystemSpec) -> np.ndarray:
    """Static Hamiltonian sum_{j>=1} Delta_j clock^j, plus Delta_0 I if kept.

    Every clock power is diagonal, so the sum is assembled directly on the
    diagonal.  With include_delta0 the result reproduces diag(energies) up to
    rounding; without it the trace is zero.
    """
    n = spec.n
    deltas = energies_to_deltas(spec.energies)
    k = np.arange(n)
    diag = np.zeros(n, dtype=np.complex128)
    start = 0 if spec.include_delta0 else 1
    for j in range(start, n):
        diag = diag + deltas[j] * root_power(n, j * k)
    return np.diag(diag)


def build_interaction(n: int, g, omega, t) -> np.ndarray:
    """Cyclic drive (g/2)(e^{i w t} S + e^{-i w t} S^dagger) at time t.

    Hermitian by construction.  At n = 2 this reduces to g cos(w t) sigma_x.
    """
    n = _check_dim(n)
    g = _as_real(g, "g")
    omega = _as_real(omega, "omega")
    t = _as_real(t, "t")
    m = (0.5 * g * _phase(omega * t)) * build_shift(n)
    return m + m.conj().T


def interaction_diagonal(n: int, omega, t) -> np.ndarray:
    """Drive in the Fourier frame: diag(cos(w t + 2 pi k / n)), k = 0..n-1.

    Satisfies (1/2)(e^{i w t} S + e^{-i w t} S^dagger) = W @ D @ W^dagger.
    """
    n = _check_dim(n)
    omega = _as_real(omega, "omega")
    t = _as_real(t, "t")
    k = np.arange(n)
    return np.diag(np.cos(omega * t + 2.0 * np.pi * k / n)).astype(np.complex128)


def drive_coefficient(spec: SystemSpec) -> np.ndarray:
    """Constant matrix A such that the drive equals e^{i w t} A + h.c.

    "none" gives zeros, "generalized" and "cosine2" give (g/2) S, and "rwa2"
    gives (g/2) sigma_minus, which pairs e^{-i w t} with sigma_plus and makes
    w = E0 - E1 the exact resonance.
    """
    n = spec.n
    if spec.drive_model == "none":
        return np.zeros((n, n), dtype=np.complex128)
    if spec.drive_model in ("generalized", "cosine2"):
        return 0.5 * spec.g * build_shift(n)
    # rwa2
    sigma_minus = np.zeros((2, 2), dtype=np.complex128)
    sigma_minus[1, 0] = 1.0
    return 0.5 * spec.g * sigma_minus


def build_full_hamiltonian(spec: SystemSpec, t) -> np.ndarray:
    """Hamiltonian at time t for the spec's drive model."""
    t = _as_real(t, "t")
    m = _phase(spec.omega * t) * drive_coefficient(spec)
    return build_drift(spec) + m + m.conj().T
