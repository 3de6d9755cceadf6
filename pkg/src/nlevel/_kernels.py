"""Hot numerical kernels: complex cyclic Jacobi and the stepping loop.

Written as plain nested loops over complex128 arrays so the same source runs
both compiled (numba) and interpreted; see _accel for the path selection.
Status codes instead of exceptions keep the functions nopython-compatible.
"""

import math

import numpy as np

from ._accel import maybe_jit

JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-10

# evolve_loop / jacobi_eigh status codes
STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1
STATUS_NOT_HERMITIAN = 2


def _jacobi_eigh_impl(a, off_tol, max_sweeps):
    """Diagonalize a hermitian matrix in place by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvector columns, sweeps); sweeps is -1 when the
    off-diagonal Frobenius norm failed to reach off_tol within max_sweeps.
    Eigenvalues come back in sweep order, not sorted.
    """
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    sweeps = 0
    while True:
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 += abs(a[p, q]) ** 2
        if math.sqrt(2.0 * off2) <= off_tol:
            break
        if sweeps >= max_sweeps:
            w_fail = np.empty(n, dtype=np.float64)
            for i in range(n):
                w_fail[i] = a[i, i].real
            return w_fail, v, -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                # factor out the phase, then a real rotation zeroes the pair
                w = apq / r
                wc = w.conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * wc * aiq
                    a[i, q] = s * aip + c * wc * aiq
                for j in range(n):
                    apj = a[p, j]
                    aqj = a[q, j]
                    a[p, j] = c * apj - s * w * aqj
                    a[q, j] = s * apj + c * w * aqj
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * wc * viq
                    v[i, q] = s * vip + c * wc * viq
    w_out = np.empty(n, dtype=np.float64)
    for i in range(n):
        w_out[i] = a[i, i].real
    return w_out, v, sweeps


jacobi_eigh = maybe_jit(_jacobi_eigh_impl)


def _evolve_loop_impl(
    h0,
    drive,
    omega,
    psi0,
    t_start,
    t_end,
    dt,
    n_steps,
    sample_every,
    off_tol,
    max_sweeps,
    herm_tol,
):
    """Midpoint-exponential stepping of i dpsi/dt = H(t) psi.

    H(t) = h0 + e^{i omega t} drive + h.c. is rebuilt at each step midpoint,
    symmetrized, eigendecomposed, and applied as a phase factor per eigenpair.
    The last step is shortened so the final sample lands exactly on t_end.
    Samples are taken at step 0, every sample_every-th step, and the last
    step.  Returns (times, populations, norm_errors, final_state, status,
    fail_time).
    """
    n = psi0.shape[0]
    n_samples = n_steps // sample_every + 1
    if n_steps % sample_every != 0:
        n_samples += 1
    times = np.empty(n_samples, dtype=np.float64)
    pops = np.empty((n_samples, n), dtype=np.float64)
    norm_errors = np.empty(n_samples, dtype=np.float64)

    psi = psi0.copy()
    h = np.empty((n, n), dtype=np.complex128)
    y = np.empty(n, dtype=np.complex128)
    scratch = np.empty(n, dtype=np.complex128)

    norm2 = 0.0
    for i in range(n):
        p = psi[i].real ** 2 + psi[i].imag ** 2
        pops[0, i] = p
        norm2 += p
    times[0] = t_start
    norm_errors[0] = abs(math.sqrt(norm2) - 1.0)
    k_out = 1

    status = STATUS_OK
    fail_t = 0.0
    for m in range(n_steps):
        t0 = t_start + m * dt
        if m == n_steps - 1:
            t1 = t_end
        else:
            t1 = t_start + (m + 1) * dt
        step = t1 - t0
        tm = t0 + 0.5 * step

        z = complex(math.cos(omega * tm), math.sin(omega * tm))
        for i in range(n):
            for j in range(n):
                h[i, j] = h0[i, j] + z * drive[i, j] + (z * drive[j, i]).conjugate()

        residue = 0.0
        for i in range(n):
            for j in range(i, n):
                d = h[i, j] - h[j, i].conjugate()
                rr = 0.5 * abs(d)
                if rr > residue:
                    residue = rr
        if residue > herm_tol:
            status = STATUS_NOT_HERMITIAN
            fail_t = tm
            break
        for i in range(n):
            for j in range(i, n):
                avg = 0.5 * (h[i, j] + h[j, i].conjugate())
                h[i, j] = avg
                h[j, i] = avg.conjugate()

        w, v, sweeps = jacobi_eigh(h, off_tol, max_sweeps)
        if sweeps < 0:
            status = STATUS_NO_CONVERGENCE
            fail_t = tm
            break

        # psi <- v @ (e^{-i w step} * (v^dagger @ psi))
        for i in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += v[k, i].conjugate() * psi[k]
            ang = w[i] * step
            y[i] = acc * complex(math.cos(ang), -math.sin(ang))
        for i in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += v[i, k] * y[k]
            scratch[i] = acc
        for i in range(n):
            psi[i] = scratch[i]

        if (m + 1) % sample_every == 0 or m + 1 == n_steps:
            norm2 = 0.0
            for i in range(n):
                p = psi[i].real ** 2 + psi[i].imag ** 2
                pops[k_out, i] = p
                norm2 += p
            times[k_out] = t1
            norm_errors[k_out] = abs(math.sqrt(norm2) - 1.0)
            k_out += 1

    return times[:k_out], pops[:k_out], norm_errors[:k_out], psi, status, fail_t


evolve_loop = maybe_jit(_evolve_loop_impl)
