"""Compiled inner loops of the time integrator.

Conservative finite-difference semi-discretization on a uniform node grid:
upwind-biased (Fromm) mass fluxes, central momentum fluxes with a small
grid-scale hyperdiffusive correction, central viscous fluxes, pointwise
antisymmetric drag.  Node 0 is strong Dirichlet inflow; the outflow closes
with a zeroth-order ghost copy.

All loops are sequential with a fixed evaluation order, so repeated runs are
bit-identical.  Work layout (rows of the `work` array):
0..3 scratch fields (u, v, p1, p2), 4..7 face fluxes, 8..11 tendencies,
12..19 the two Runge-Kutta stage states.
"""
from __future__ import annotations

import numpy as np
from numba import njit

N_WORK_ROWS = 20


@njit(cache=True, fastmath=False)
def _pressure_arr(x, A, g, out):
    if g == 1.0:
        for i in range(x.shape[0]):
            out[i] = A * x[i]
    elif g == 2.0:
        for i in range(x.shape[0]):
            out[i] = A * x[i] * x[i]
    else:
        for i in range(x.shape[0]):
            out[i] = A * x[i] ** g


@njit(cache=True, fastmath=False)
def _sound_speed_sq(x, A, g):
    # p'(rho) with the same fast paths as the pressure
    if g == 1.0:
        return A
    elif g == 2.0:
        return 2.0 * A * x
    return A * g * x ** (g - 1.0)


@njit(cache=True, fastmath=False)
def _rhs(rho, m1, n, m2, A1, g1, A2, g2, mu, chi, drag_scale, dx,
         u, v, p1, p2, F1, F2, H1, H2, d):
    """Semi-discrete tendency; returns the four boundary mass fluxes
    (phase-1 in, phase-1 out, phase-2 in, phase-2 out)."""
    N = rho.shape[0]
    for i in range(N):
        u[i] = m1[i] / rho[i]
        v[i] = m2[i] / n[i]
    _pressure_arr(rho, A1, g1, p1)
    _pressure_arr(n, A2, g2, p2)

    # face j lies between nodes j-1 and j, j = 1..N-1
    for j in range(1, N):
        uf = 0.5 * (u[j - 1] + u[j])
        vf = 0.5 * (v[j - 1] + v[j])

        if uf > 0.0:
            if j >= 2:
                rf = rho[j - 1] + 0.25 * (rho[j] - rho[j - 2])
            else:
                # downwind-cell slope: same leading face error as the
                # interior reconstruction, so no accuracy seam at the face
                rf = rho[1] - 0.25 * (rho[2] - rho[0])
        else:
            if j <= N - 2:
                rf = rho[j] - 0.25 * (rho[j + 1] - rho[j - 1])
            else:
                rf = rho[N - 2] + 0.25 * (rho[N - 1] - rho[N - 3])
        F1[j] = uf * rf

        if vf > 0.0:
            if j >= 2:
                nf = n[j - 1] + 0.25 * (n[j] - n[j - 2])
            else:
                nf = n[1] - 0.25 * (n[2] - n[0])
        else:
            if j <= N - 2:
                nf = n[j] - 0.25 * (n[j + 1] - n[j - 1])
            else:
                nf = n[N - 2] + 0.25 * (n[N - 1] - n[N - 3])
        F2[j] = vf * nf

        h1c = 0.5 * (m1[j - 1] * u[j - 1] + p1[j - 1] + m1[j] * u[j] + p1[j])
        h2c = 0.5 * (m2[j - 1] * v[j - 1] + p2[j - 1] + m2[j] * v[j] + p2[j])
        if j >= 2 and j <= N - 2:
            c1 = np.sqrt(_sound_speed_sq(0.5 * (rho[j - 1] + rho[j]), A1, g1))
            c2 = np.sqrt(_sound_speed_sq(0.5 * (n[j - 1] + n[j]), A2, g2))
            h1c += chi * (abs(uf) + c1) * (m1[j + 1] - 3.0 * m1[j]
                                           + 3.0 * m1[j - 1] - m1[j - 2])
            h2c += chi * (abs(vf) + c2) * (m2[j + 1] - 3.0 * m2[j]
                                           + 3.0 * m2[j - 1] - m2[j - 2])
        nvf = 0.5 * (n[j - 1] + n[j])
        H1[j] = h1c - mu * (u[j] - u[j - 1]) / dx
        H2[j] = h2c - nvf * (v[j] - v[j - 1]) / dx

    for i in range(1, N):
        if i < N - 1:
            dF1 = F1[i + 1] - F1[i]
            dF2 = F2[i + 1] - F2[i]
            dH1 = H1[i + 1] - H1[i]
            dH2 = H2[i + 1] - H2[i]
        else:
            # ghost copy of the last node: convective flux collapses to the
            # nodal flux, viscous flux vanishes
            dF1 = rho[N - 1] * u[N - 1] - F1[N - 1]
            dF2 = n[N - 1] * v[N - 1] - F2[N - 1]
            dH1 = (m1[N - 1] * u[N - 1] + p1[N - 1]) - H1[N - 1]
            dH2 = (m2[N - 1] * v[N - 1] + p2[N - 1]) - H2[N - 1]
        drag = drag_scale * n[i] * (v[i] - u[i])
        d[0, i] = -dF1 / dx
        d[1, i] = -dH1 / dx + drag
        d[2, i] = -dF2 / dx
        d[3, i] = -dH2 / dx - drag
    d[0, 0] = 0.0
    d[1, 0] = 0.0
    d[2, 0] = 0.0
    d[3, 0] = 0.0
    return F1[1], rho[N - 1] * u[N - 1], F2[1], n[N - 1] * v[N - 1]


@njit(cache=True, fastmath=False)
def rk3_step(q, A1, g1, A2, g2, mu, chi, drag_scale, dx, dt, bc, work):
    """One three-stage strong-stability step in place.

    Returns (status, f1net, f2net): status 0 on success, 1 on positivity
    loss, 2 on non-finite values; f*net are the net boundary mass inflows of
    this step with the exact stage weights, for the conservation audit.
    """
    N = q.shape[1]
    u = work[0]; v = work[1]; p1 = work[2]; p2 = work[3]
    F1 = work[4]; F2 = work[5]; H1 = work[6]; H2 = work[7]
    d = work[8:12]
    q1 = work[12:16]
    q2 = work[16:20]

    i1a, o1a, i2a, o2a = _rhs(q[0], q[1], q[2], q[3], A1, g1, A2, g2, mu, chi,
                              drag_scale, dx, u, v, p1, p2, F1, F2, H1, H2, d)
    for k in range(4):
        for i in range(N):
            q1[k, i] = q[k, i] + dt * d[k, i]
        q1[k, 0] = bc[k]
    i1b, o1b, i2b, o2b = _rhs(q1[0], q1[1], q1[2], q1[3], A1, g1, A2, g2, mu, chi,
                              drag_scale, dx, u, v, p1, p2, F1, F2, H1, H2, d)
    for k in range(4):
        for i in range(N):
            q2[k, i] = 0.75 * q[k, i] + 0.25 * (q1[k, i] + dt * d[k, i])
        q2[k, 0] = bc[k]
    i1c, o1c, i2c, o2c = _rhs(q2[0], q2[1], q2[2], q2[3], A1, g1, A2, g2, mu, chi,
                              drag_scale, dx, u, v, p1, p2, F1, F2, H1, H2, d)
    for k in range(4):
        for i in range(N):
            q[k, i] = (q[k, i] + 2.0 * (q2[k, i] + dt * d[k, i])) / 3.0
        q[k, 0] = bc[k]

    status = 0
    for i in range(N):
        if not (q[0, i] > 0.0) or not (q[2, i] > 0.0):
            status = 1
        if (q[0, i] != q[0, i] or q[1, i] != q[1, i]
                or q[2, i] != q[2, i] or q[3, i] != q[3, i]):
            status = 2
    f1net = dt * ((i1a - o1a) + (i1b - o1b) + 4.0 * (i1c - o1c)) / 6.0
    f2net = dt * ((i2a - o2a) + (i2b - o2b) + 4.0 * (i2c - o2c)) / 6.0
    return status, f1net, f2net


@njit(cache=True, fastmath=False)
def stable_dt(q, A1, g1, A2, g2, mu, cfl, dx):
    """Advective/viscous step bound: cfl * min(dx/s_max, dx^2/(2 max(mu/rho, 1)))."""
    N = q.shape[1]
    smax = 1e-300
    numax = 1.0
    for i in range(N):
        u_ = q[1, i] / q[0, i]
        v_ = q[3, i] / q[2, i]
        c1 = np.sqrt(_sound_speed_sq(q[0, i], A1, g1))
        c2 = np.sqrt(_sound_speed_sq(q[2, i], A2, g2))
        s = abs(u_) + c1
        if abs(v_) + c2 > s:
            s = abs(v_) + c2
        if s > smax:
            smax = s
        if mu / q[0, i] > numax:
            numax = mu / q[0, i]
    adv = dx / smax
    visc = dx * dx / (2.0 * numax)
    return cfl * (adv if adv < visc else visc)


@njit(cache=True, fastmath=False)
def advance(q, t, t_target, A1, g1, A2, g2, mu, chi, drag_scale, cfl, dx, bc, work):
    """March q from t to t_target with per-step stability-limited dt.

    On positivity loss the step is retried with halved dt (8 attempts)
    before giving up.  Returns (t, status, f1net, f2net, n_steps).
    """
    f1acc = 0.0
    f2acc = 0.0
    nsteps = 0
    status = 0
    N = q.shape[1]
    qsave = np.empty((4, N))
    while t < t_target:
        dt = stable_dt(q, A1, g1, A2, g2, mu, cfl, dx)
        if t + dt > t_target:
            dt = t_target - t
        for k in range(4):
            for i in range(N):
                qsave[k, i] = q[k, i]
        st, f1, f2 = rk3_step(q, A1, g1, A2, g2, mu, chi, drag_scale, dx, dt, bc, work)
        retry = 0
        while st == 1 and retry < 8:
            for k in range(4):
                for i in range(N):
                    q[k, i] = qsave[k, i]
            dt *= 0.5
            st, f1, f2 = rk3_step(q, A1, g1, A2, g2, mu, chi, drag_scale, dx, dt, bc, work)
            retry += 1
        f1acc += f1
        f2acc += f2
        t += dt
        nsteps += 1
        if st != 0:
            status = st
            break
    return t, status, f1acc, f2acc, nsteps
