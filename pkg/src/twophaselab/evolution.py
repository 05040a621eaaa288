"""Time integration of the inflow problem and its energy diagnostics.

The evolved unknowns are the conserved fields (rho, rho*u, n, n*v) on the
profile's grid; node 0 carries the inflow Dirichlet data exactly.  A run owns
its state: concurrent runs never share mutable arrays, and all reductions are
fixed-order so identical configurations reproduce identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis
from .errors import BlowUpError, GridMismatchError, InvalidParameterError
from .kernels import N_WORK_ROWS, advance, rk3_step, stable_dt
from .model import ModelParams, pressure_derivative
from .stationary import StationaryProfile

CFL = 0.4
CHI_HYPER = 0.02   # grid-scale momentum dissipation coefficient


@dataclass
class EvolutionState:
    """Primitive fields at one time level on a shared grid."""

    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    n: np.ndarray
    v: np.ndarray
    time: float = 0.0

    def conserved(self) -> np.ndarray:
        return np.stack([self.rho, self.rho * self.u, self.n, self.n * self.v])

    @staticmethod
    def from_conserved(x, q, time) -> "EvolutionState":
        return EvolutionState(x=x, rho=q[0].copy(), u=(q[1] / q[0]),
                              n=q[2].copy(), v=(q[3] / q[2]), time=time)


@dataclass
class PerturbationState:
    """Pointwise differences from the stationary profile."""

    phi: np.ndarray        # rho - rho~
    psi: np.ndarray        # u - u~
    phi_bar: np.ndarray    # n - n~
    psi_bar: np.ndarray    # v - v~

    def sup_norm(self) -> float:
        return float(max(np.max(np.abs(self.phi)), np.max(np.abs(self.psi)),
                         np.max(np.abs(self.phi_bar)), np.max(np.abs(self.psi_bar))))


@dataclass
class EnergyReport:
    """Energy content and dissipation of the perturbation at one time."""

    time: float
    e_total: float
    dissipation: float
    l2_norm: float
    h1_norm: float
    sup_norm: float

    def to_row(self):
        return (self.time, self.e_total, self.dissipation, self.l2_norm,
                self.h1_norm, self.sup_norm)


@dataclass
class RunResult:
    """Outcome of a time integration with its conservation audit."""

    state: EvolutionState
    reports: list
    n_steps: int
    mass_audit: tuple   # relative drifts (phase 1, phase 2)

    @property
    def final(self) -> EnergyReport:
        return self.reports[-1]


def _boundary_values(profile: StationaryProfile) -> np.ndarray:
    f = profile.far
    return np.array([f.rho_minus, f.rho_minus * f.u_minus,
                     f.n_minus, f.n_minus * f.u_minus])


def gaussian_bump(x: np.ndarray, center: float, width: float) -> np.ndarray:
    """Smooth localized bump, not yet boundary-compatible."""
    return np.exp(-((x - center) / width) ** 2)


def init_state(profile: StationaryProfile, perturbation_spec: dict | None) -> EvolutionState:
    """Profile plus an admissible initial perturbation.

    perturbation_spec: None or a mapping with keys kind ("gaussian"), center,
    width, fields (mapping of rho/u/n/v to relative weights), and exactly one
    of amplitude or h1_target (the latter rescales the bump so the combined
    H1 norm of the perturbation hits the target).  The perturbation must
    vanish at the inflow node and preserve positivity.
    """
    x = profile.x
    fields = {"rho": profile.rho.copy(), "u": profile.u.copy(),
              "n": profile.n.copy(), "v": profile.v.copy()}
    if perturbation_spec:
        spec = dict(perturbation_spec)
        kind = spec.pop("kind", "gaussian")
        if kind != "gaussian":
            raise InvalidParameterError(f"unknown perturbation kind {kind!r}")
        center = float(spec.pop("center"))
        width = float(spec.pop("width"))
        weights = spec.pop("fields", {"u": 1.0, "v": 1.0})
        amplitude = spec.pop("amplitude", None)
        h1_target = spec.pop("h1_target", None)
        max_h1 = float(spec.pop("max_h1", 0.1))
        if spec:
            raise InvalidParameterError(f"unknown perturbation keys {sorted(spec)}")
        if (amplitude is None) == (h1_target is None):
            raise InvalidParameterError(
                "perturbation needs exactly one of amplitude / h1_target")
        bump = gaussian_bump(x, center, width)
        if bump[0] > 1e-6 * np.max(bump):
            raise InvalidParameterError("perturbation does not vanish at the inflow")
        bump[0] = 0.0
        unknown = set(weights) - set(fields)
        if unknown:
            raise InvalidParameterError(f"unknown perturbation fields {sorted(unknown)}")
        shapes = {k: w * bump for k, w in weights.items()}
        if h1_target is not None:
            base = _h1_norm(x, list(shapes.values()))
            if base <= 0:
                raise InvalidParameterError("degenerate perturbation shape")
            amplitude = float(h1_target) / base
        for k, s in shapes.items():
            fields[k] = fields[k] + amplitude * s
        h1 = _h1_norm(x, [fields["rho"] - profile.rho, fields["u"] - profile.u,
                          fields["n"] - profile.n, fields["v"] - profile.v])
        if h1 > max_h1:
            raise InvalidParameterError(
                f"perturbation H1 norm {h1:.3e} exceeds the admissible bound {max_h1:.3e}")
        if np.min(fields["rho"]) <= 0 or np.min(fields["n"]) <= 0:
            raise InvalidParameterError("perturbation violates positivity")
    state = EvolutionState(x=x, rho=fields["rho"], u=fields["u"],
                           n=fields["n"], v=fields["v"], time=0.0)
    _pin_boundary(state, profile)
    return state


def _pin_boundary(state: EvolutionState, profile: StationaryProfile):
    f = profile.far
    state.rho[0] = f.rho_minus
    state.u[0] = f.u_minus
    state.n[0] = f.n_minus
    state.v[0] = f.u_minus


def _h1_norm(x, comps) -> float:
    tot = 0.0
    for f in comps:
        fx = analysis.derivative(x, f)
        tot += analysis.grid_integral(x, f * f) + analysis.grid_integral(x, fx * fx)
    return math.sqrt(tot)


def perturbation(state: EvolutionState, profile: StationaryProfile) -> PerturbationState:
    """Difference fields against the profile; boundary values are exact zeros."""
    if state.x.shape != profile.x.shape or not np.array_equal(state.x, profile.x):
        raise GridMismatchError("state and profile grids differ")
    p = PerturbationState(phi=state.rho - profile.rho, psi=state.u - profile.u,
                          phi_bar=state.n - profile.n, psi_bar=state.v - profile.v)
    p.psi[0] = 0.0
    p.psi_bar[0] = 0.0
    return p


def pressure_potential(density, ref_density, A: float, g: float):
    """Convex pressure potential of a density against a reference.

    Closed forms for g = 1 (logarithmic) and g > 1, with a series fallback
    near the reference where the closed form cancels catastrophically.
    """
    rho = np.asarray(density, dtype=float)
    ref = np.asarray(ref_density, dtype=float)
    d = rho - ref
    if g == 1.0:
        bulk = A * rho * (np.log(rho / ref) + ref / rho - 1.0)
    else:
        bulk = A * rho * ((rho ** (g - 1.0) - ref ** (g - 1.0)) / (g - 1.0)
                          + ref ** (g - 1.0) * (ref / rho - 1.0))
    # quadratic leading term with its cubic correction, accurate where d is tiny
    p1 = A * g * ref ** (g - 1.0)
    p2 = A * g * (g - 1.0) * ref ** (g - 2.0)
    series = rho * (d * d * p1 / (2.0 * ref ** 2)
                    + d ** 3 * (p2 / ref ** 2 - 4.0 * p1 / ref ** 3) / 6.0)
    small = np.abs(d) < 1e-5 * ref
    return np.where(small, series, bulk)


def energy(state: EvolutionState, profile: StationaryProfile,
           params: ModelParams) -> EnergyReport:
    """Relative energy, dissipation, and perturbation norms at one time level."""
    pert = perturbation(state, profile)
    x = state.x
    phi1 = pressure_potential(state.rho, profile.rho, params.A1, params.gamma)
    phi2 = pressure_potential(state.n, profile.n, params.A2, params.alpha)
    e1 = state.rho * (pert.psi ** 2 / 2.0 + phi1)
    e2 = state.n * (pert.psi_bar ** 2 / 2.0 + phi2)
    e_total = analysis.grid_integral(x, e1 + e2)
    psix = analysis.derivative(x, pert.psi)
    psibx = analysis.derivative(x, pert.psi_bar)
    diss = analysis.grid_integral(
        x, state.n * (pert.psi_bar - pert.psi) ** 2
        + params.mu * psix ** 2 + state.n * psibx ** 2)
    comps = [pert.phi, pert.psi, pert.phi_bar, pert.psi_bar]
    l2 = math.sqrt(sum(analysis.grid_integral(x, c * c) for c in comps))
    h1 = _h1_norm(x, comps)
    return EnergyReport(time=state.time, e_total=e_total, dissipation=diss,
                        l2_norm=l2, h1_norm=h1, sup_norm=pert.sup_norm())


def step(state: EvolutionState, params: ModelParams, dt: float,
         profile: StationaryProfile, drag_scale: float = 1.0) -> EvolutionState:
    """Advance a single step of size dt (caller guarantees stability bounds).

    drag_scale = 0 decouples the phases; it exists for diagnostic runs that
    isolate one phase, never for production physics."""
    q = state.conserved()
    work = np.zeros((N_WORK_ROWS, q.shape[1]))
    bc = _boundary_values(profile)
    dx = state.x[1] - state.x[0]
    status, _, _ = rk3_step(q, params.A1, params.gamma, params.A2, params.alpha,
                            params.mu, CHI_HYPER, drag_scale, dx, dt, bc, work)
    if status == 1:
        raise BlowUpError("positivity lost in a forced step", time=state.time)
    if status == 2:
        raise BlowUpError("non-finite values in a forced step", time=state.time)
    return EvolutionState.from_conserved(state.x, q, state.time + dt)


def suggested_dt(state: EvolutionState, params: ModelParams) -> float:
    return float(stable_dt(state.conserved(), params.A1, params.gamma,
                           params.A2, params.alpha, params.mu, CFL,
                           state.x[1] - state.x[0]))


def run(state: EvolutionState, params: ModelParams, profile: StationaryProfile,
        t_end: float, report_every: float, drag_scale: float = 1.0) -> RunResult:
    """March to t_end, emitting an EnergyReport every report_every time units.

    The conservation audit compares the discrete mass of each phase over the
    updated nodes against the accumulated boundary fluxes; the relative
    drifts are reported in the result.
    """
    if report_every <= 0:
        raise InvalidParameterError("report_every must be positive")
    x = state.x
    dx = x[1] - x[0]
    q = state.conserved()
    work = np.zeros((N_WORK_ROWS, q.shape[1]))
    bc = _boundary_values(profile)
    reports = [energy(state, profile, params)]
    m1_0 = float(np.sum(q[0, 1:])) * dx
    m2_0 = float(np.sum(q[2, 1:])) * dx
    acc1 = acc2 = 0.0
    drift1 = drift2 = 0.0
    t = state.time
    n_steps = 0
    target_end = state.time + t_end
    while t < target_end - 1e-14 * max(1.0, target_end):
        t_next = min(t + report_every, target_end)
        t, status, f1, f2, ns = advance(q, t, t_next, params.A1, params.gamma,
                                        params.A2, params.alpha, params.mu,
                                        CHI_HYPER, drag_scale, CFL, dx, bc, work)
        acc1 += f1
        acc2 += f2
        n_steps += ns
        snap = EvolutionState.from_conserved(x, q, t)
        if status == 1:
            raise BlowUpError("positivity lost (retry budget exhausted)", time=t,
                              diagnostics={"min_rho": float(np.min(q[0])),
                                           "min_n": float(np.min(q[2]))})
        if status == 2:
            bad = int(np.argmax(~np.isfinite(q[0] * q[1] * q[2] * q[3])))
            raise BlowUpError("non-finite state detected", time=t,
                              diagnostics={"node": bad, "x": float(x[bad])})
        reports.append(energy(snap, profile, params))
        m1 = float(np.sum(q[0, 1:])) * dx
        m2 = float(np.sum(q[2, 1:])) * dx
        drift1 = max(drift1, abs(m1 - m1_0 - acc1) / m1_0)
        drift2 = max(drift2, abs(m2 - m2_0 - acc2) / m2_0)
    final = EvolutionState.from_conserved(x, q, t)
    return RunResult(state=final, reports=reports, n_steps=n_steps,
                     mass_audit=(drift1, drift2))


def perturbation_residual(prev: EvolutionState, nxt: EvolutionState,
                          profile: StationaryProfile, params: ModelParams) -> dict:
    """Defect of the perturbation-form equations over one time interval.

    Time derivatives are first differences of the two states; spatial terms
    are evaluated at the midpoint state.  Serves as a consistency diagnostic
    for the conservative update, not as an evolution path.
    """
    if not np.array_equal(prev.x, nxt.x):
        raise GridMismatchError("states live on different grids")
    x = prev.x
    dt = nxt.time - prev.time
    if dt <= 0:
        raise InvalidParameterError("states must be time-ordered")

    mid = EvolutionState(x=x, rho=0.5 * (prev.rho + nxt.rho),
                         u=0.5 * (prev.u + nxt.u), n=0.5 * (prev.n + nxt.n),
                         v=0.5 * (prev.v + nxt.v),
                         time=0.5 * (prev.time + nxt.time))
    pa = perturbation(prev, profile)
    pb = perturbation(nxt, profile)
    pm = perturbation(mid, profile)
    d = analysis.derivative
    dx_ = lambda f: d(x, f)

    rho_t, u_t, n_t, v_t = profile.rho, profile.u, profile.n, profile.v
    rho_tx, u_tx = dx_(rho_t), dx_(u_t)
    n_tx, v_tx = dx_(n_t), dx_(v_t)
    u_txx = dx_(u_tx)

    phi_t = (pb.phi - pa.phi) / dt
    psi_t = (pb.psi - pa.psi) / dt
    phib_t = (pb.phi_bar - pa.phi_bar) / dt
    psib_t = (pb.psi_bar - pa.psi_bar) / dt

    rho, u, n, v = mid.rho, mid.u, mid.n, mid.v
    phi, psi, phib, psib = pm.phi, pm.psi, pm.phi_bar, pm.psi_bar
    p1r = pressure_derivative(params, 1, rho)
    p1t = pressure_derivative(params, 1, rho_t)
    p2n = pressure_derivative(params, 2, n)
    p2t = pressure_derivative(params, 2, n_t)

    r1 = phi_t + u * dx_(phi) + rho * dx_(psi) + (psi * rho_tx + phi * u_tx)

    F1 = -(-params.mu * (1.0 / rho - 1.0 / rho_t) * u_txx + psi * u_tx
           + (p1r / rho - p1t / rho_t) * rho_tx
           - (n / rho - n_t / rho_t) * (v_t - u_t))
    r2 = (psi_t + u * dx_(psi) + (p1r / rho) * dx_(phi)
          - params.mu * dx_(dx_(psi)) / rho - (n / rho) * (psib - psi) - F1)

    r3 = phib_t + v * dx_(phib) + n * dx_(psib) + (psib * n_tx + phib * v_tx)

    F2 = -(psib * v_tx + (p2n / n - p2t / n_t) * n_tx
           - dx_(phib * v_tx) / n - (1.0 / n - 1.0 / n_t) * dx_(n_t * v_tx))
    r4 = (psib_t + v * dx_(psib) + (p2n / n) * dx_(phib)
          - dx_(n * dx_(psib)) / n + (psib - psi) - F2)

    # boundary stencils are one-sided and the Dirichlet node is pinned: skip
    # the first and last two nodes of the defect measurement
    sl = slice(2, -2)
    return {"continuity_1": float(np.max(np.abs(r1[sl]))),
            "momentum_1": float(np.max(np.abs(r2[sl]))),
            "continuity_2": float(np.max(np.abs(r3[sl]))),
            "momentum_2": float(np.max(np.abs(r4[sl])))}
