"""Compiled inner loops: Gaussian ODE stepping and single-trajectory event loop.

State vector (complex, dimensionless, lengths in units of R, time in units
of M R^2 / hbar):

    y[0] = w = 1 / a          with a = A R^2
    y[1:4] = beta = b / a     with b = B R
    y[4] = c = C

In these variables free evolution is linear (dw/dtau = 2i, beta constant),
which keeps Re(A) well conditioned when |Im A| >> Re A.

With ``s = i g kappa / 2 + lam`` (g = G M^3 R / hbar^2, lam = Lambda M R^4 / hbar):

    da/dtau = -2i a^2 + s
    db/dtau = -2i a b + 2 s mu            (mu = Re b / (2 Re a))
    dc/dtau = -i (6 a - b.b) / 2 - s mu.mu

The ``mu`` terms come from centring both the spring and the QMUPL term on
the packet itself, ``-s |x - mu|^2``, so neither exerts a net force on the
centre.
"""

import math

import numpy as np
from numba import njit

OK = 0
NONPOSITIVE_WIDTH = 1
STEP_FAILURE = 2

# Dormand-Prince 5(4) tableau
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)
MAX_STEPS_PER_SEGMENT = 2_000_000


@njit(cache=True)
def kappa_scalar(dt, amp):
    if dt <= 2.0:
        return amp * (1.0 - 0.5625 * dt + dt * dt * dt / 32.0)
    return 1.0 / (dt * dt * dt)


@njit(cache=True)
def rhs(y, g, amp, lam, out):
    w = y[0]
    a = 1.0 / w
    ra = a.real
    if not ra > 0.0:
        return False
    s = 1j * 0.5 * g * kappa_scalar(math.sqrt(0.75 / ra), amp) + lam
    out[0] = 2j - s * w * w
    bb = 0j
    mm = 0.0
    for i in range(3):
        b = y[1 + i] * a
        bb += b * b
        mu = 0.5 * b.real / ra
        mm += mu * mu
        out[1 + i] = w * (2.0 * s * mu - s * y[1 + i])
    out[4] = -0.5j * (6.0 * a - bb) - s * mm
    return True


@njit(cache=True)
def _scaled_error(y, ynew, err, rtol, atol):
    # Re w and |w| are controlled separately so Re(A) keeps its relative accuracy.
    e = 0.0
    sc = atol + rtol * max(abs(y[0].real), abs(ynew[0].real))
    e = max(e, abs(err[0].real) / sc)
    sc = atol + rtol * max(abs(y[0]), abs(ynew[0]))
    e = max(e, abs(err[0].imag) / sc)
    # beta is a length; never demand more than rtol of the packet width
    nb0 = 0.0
    nb1 = 0.0
    for i in range(1, 4):
        nb0 += abs(y[i]) ** 2
        nb1 += abs(ynew[i]) ** 2
    width = abs(y[0]) / math.sqrt(abs(y[0].real))
    sc = atol + rtol * max(math.sqrt(max(nb0, nb1)), width)
    for i in range(1, 4):
        e = max(e, abs(err[i]) / sc)
    sc = atol + rtol * max(1.0, abs(y[4]), abs(ynew[4]))
    e = max(e, abs(err[4]) / sc)
    return e


@njit(cache=True)
def integrate_segment(y, t0, t1, h, g, amp, lam, rtol, atol, max_step):
    """Advance ``y`` in place from t0 to t1. Returns (status, next_h, t_reached)."""
    n = 5
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    k5 = np.empty(n, np.complex128)
    k6 = np.empty(n, np.complex128)
    k7 = np.empty(n, np.complex128)
    tmp = np.empty(n, np.complex128)
    ynew = np.empty(n, np.complex128)
    err = np.empty(n, np.complex128)
    t = t0
    span = t1 - t0
    if span <= 0.0:
        return OK, h, t
    if not h > 0.0:
        h = span
    h = min(h, max_step)
    if not rhs(y, g, amp, lam, k1):
        return NONPOSITIVE_WIDTH, h, t
    steps = 0
    proposed = h
    while t < t1:
        steps += 1
        if steps > MAX_STEPS_PER_SEGMENT:
            return STEP_FAILURE, h, t
        last = False
        if t + h >= t1 or (t1 - t - h) < 1e-14 * abs(t1):
            h = t1 - t
            last = True
        if h <= 1e-15 * max(abs(t), 1e-300):
            return STEP_FAILURE, h, t
        for i in range(n):
            tmp[i] = y[i] + h * A21 * k1[i]
        ok = rhs(tmp, g, amp, lam, k2)
        if ok:
            for i in range(n):
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            ok = rhs(tmp, g, amp, lam, k3)
        if ok:
            for i in range(n):
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            ok = rhs(tmp, g, amp, lam, k4)
        if ok:
            for i in range(n):
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            ok = rhs(tmp, g, amp, lam, k5)
        if ok:
            for i in range(n):
                tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            ok = rhs(tmp, g, amp, lam, k6)
        if ok:
            for i in range(n):
                ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            ok = rhs(ynew, g, amp, lam, k7)
        if not ok:
            # a trial stage left the normalizable region: shrink and retry
            h *= 0.25
            continue
        for i in range(n):
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        e = _scaled_error(y, ynew, err, rtol, atol)
        if e <= 1.0:
            t = t1 if last else t + h
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            fac = 5.0 if e == 0.0 else min(5.0, max(0.2, 0.9 * e ** -0.2))
            if not last:
                proposed = min(h * fac, max_step)
            else:
                proposed = min(max(proposed, h * fac), max_step)
            h = proposed
        else:
            h *= max(0.2, 0.9 * e ** -0.2)
    return OK, proposed, t


@njit(cache=True)
def free_step(y, dt):
    """Exact free propagation by ``dt`` (no gravity, no continuous decoherence)."""
    w0 = y[0]
    w1 = w0 + 2j * dt
    bb = 0j
    for i in range(3):
        bb += y[1 + i] * y[1 + i]
    y[4] += -1.5 * np.log(w1 / w0) + 0.5j * bb * dt / (w0 * w1)
    y[0] = w1


@njit(cache=True)
def apply_jump_dimless(y, alpha, x0):
    w = y[0]
    a = 1.0 / w
    a_new = a + 0.5 * alpha
    inv = 1.0 / a_new
    for i in range(3):
        b = y[1 + i] * a + alpha * x0[i]
        y[1 + i] = b * inv
    y[0] = inv


@njit(cache=True)
def run_trajectory_kernel(
    y0,
    sample_t,
    jump_t,
    jump_alpha,
    z,
    g,
    amp,
    lam,
    rtol,
    atol,
    max_step,
    closed_form,
    snaps,
    jump_info,
):
    """Interleave deterministic evolution with jumps; fill ``snaps`` at ``sample_t``.

    ``jump_info[k]`` receives (x0_x, x0_y, x0_z, Re a before, Re a after).
    Returns (status, time of failure).
    """
    y = y0.copy()
    ns = sample_t.shape[0]
    nj = jump_t.shape[0]
    i_s = 0
    i_j = 0
    t = 0.0
    h = 0.0
    x0 = np.empty(3)
    while i_s < ns:
        if i_j < nj and jump_t[i_j] < sample_t[i_s]:
            t_next = jump_t[i_j]
            is_jump = True
        else:
            t_next = sample_t[i_s]
            is_jump = False
        if t_next > t:
            if closed_form:
                free_step(y, t_next - t)
            else:
                status, h, t_reached = integrate_segment(y, t, t_next, h, g, amp, lam, rtol, atol, max_step)
                if status != OK:
                    return status, t_reached
            t = t_next
        if is_jump:
            alpha = jump_alpha[i_j]
            a = 1.0 / y[0]
            ra = a.real
            sigma = math.sqrt(0.25 / ra + 0.5 / alpha)
            for i in range(3):
                mu = (y[1 + i] * a).real / (2.0 * ra)
                x0[i] = mu + sigma * z[i_j, i]
            apply_jump_dimless(y, alpha, x0)
            # same Gaussian product, so the norm constant follows by renormalization outside
            jump_info[i_j, 0] = x0[0]
            jump_info[i_j, 1] = x0[1]
            jump_info[i_j, 2] = x0[2]
            jump_info[i_j, 3] = ra
            jump_info[i_j, 4] = (1.0 / y[0]).real
            i_j += 1
        else:
            for i in range(5):
                snaps[i_s, i] = y[i]
            i_s += 1
    return OK, t
