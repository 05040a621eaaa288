"""Stationary boundary-layer profiles on the half line by manifold shooting.

The flow-regime dispatch mirrors the spectral structure at the far field:

* supersonic: one decaying direction; one-parameter backward shoot matched on
  u(0), with the v boundary value an acceptance check (it is not free);
* subsonic: two decaying directions; two-parameter backward shoot matched on
  (u(0), v(0));
* sonic: one neutral direction carrying algebraic decay plus one decaying
  direction; the neutral branch is built from a numerically computed
  quadratic correction of the center direction and a projected scalar flow,
  and the decaying direction enters as a linearized boundary layer.

Backward integration runs in deviation variables (du, w, dv) = (u - u_plus,
u_x, v - u_plus) with expm1/log1p forms of the pressure terms, so seeds many
orders of magnitude below the background state remain meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import analysis, model
from .errors import (InvalidParameterError, NoProfileError, RegimeError,
                     StructuralError)
from .model import FarFieldData, ModelParams, RegimeLabel
from .spectrum import FarFieldJacobian, SpectrumReport, assemble_jacobian, eigen_spectrum

TOL_BC = 1e-8          # absolute tolerance on boundary matching
TAIL_TOL = 1e-8        # relative tolerance on far-end flatness
NEWTON_BUDGET = 60
SHOOT_EFOLDS = 25.0        # seed depth in e-folds of the slow stable rate
SEPARATION_EFOLDS = 14.0   # growth budget of the fast mode relative to the slow
RTOL_ODE = 1e-10
ATOL_ODE = 1e-24       # deviation variables: keep error control purely relative


@dataclass
class GridSpec:
    """Output grid: n_nodes uniform points on [0, L]; L = None means policy."""

    n_nodes: int = 4096
    L: float | None = None


@dataclass
class CenterManifoldData:
    """Quadratic reduction data at a sonic far field.

    a is the quadratic coefficient of the reduced scalar flow (positive for
    admissible exponents), b the skew constant entering its normalization,
    sigma0 the center amplitude at x = 0 once a profile has been solved
    (negative for an admissible inflow datum).
    """

    a: float
    b: float
    sigma0: float | None = None


@dataclass
class StationaryProfile:
    """Grid-sampled stationary solution plus construction diagnostics.

    `dense` evaluates the deviation fields (du, w, dv) at arbitrary
    abscissae; it exists so verification code can refine the grid without
    re-solving.
    """

    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    n: np.ndarray
    v: np.ndarray
    w: np.ndarray                 # du/dx along the profile
    regime: RegimeLabel
    far: FarFieldData
    shooting_params: dict
    residual_norm: float = math.nan
    boundary_mismatch: tuple = (0.0, 0.0)
    slope0: tuple = (0.0, 0.0)    # (u_x(0), v_x(0))
    dense: object = field(default=None, repr=False)

    @property
    def delta(self) -> float:
        return self.far.delta

    def flux_defects(self) -> tuple[float, float]:
        """Relative constancy defects of both phase fluxes."""
        f1 = self.far.rho_plus * self.far.u_plus
        f2 = self.far.n_plus * self.far.u_plus
        return (float(np.max(np.abs(self.rho * self.u - f1)) / f1),
                float(np.max(np.abs(self.n * self.v - f2)) / f2))


def domain_length(far: FarFieldData, spec: SpectrumReport) -> float:
    """Truncation policy: exponential tails sized by the slow stable rate,
    sonic tails sized so delta * L = 40."""
    if spec.regime.tag == model.SONIC:
        return 50.0 if far.delta == 0 else 40.0 / far.delta
    stable = spec.stable
    if not stable:
        return 50.0
    m_slow = min(-l.real for l in stable)
    return max(50.0, 12.0 / m_slow)


def deviation_rhs(params: ModelParams, far: FarFieldData):
    """Right-hand side of the first-order stationary system in deviations.

    Written so that all far-field cancellations are exact: differences of the
    power-law terms use expm1/log1p and the drag uses (dv - du) directly.
    """
    A1, A2, g, al, mu = params.A1, params.A2, params.gamma, params.alpha, params.mu
    up = far.u_plus
    K1 = far.rho_plus * up
    K2 = far.n_plus * up
    C1 = A1 * K1 ** g
    C2 = A2 * K2 ** al
    iug = up ** (-g)
    iua = up ** (-al)

    def rhs(z):
        du, w, dv = z
        ut = up + du
        vt = up + dv
        f2 = ((K1 - g * C1 * ut ** (-g - 1.0)) * w - K2 * (dv - du) / vt) / mu
        d1 = iug * math.expm1(-g * math.log1p(du / up))
        d2 = iua * math.expm1(-al * math.log1p(dv / up))
        f3 = (vt / K2) * (K1 * du + C1 * d1 + K2 * dv + C2 * d2 - mu * w)
        return np.array([w, f2, f3])

    return rhs


def _constant_profile(params, far, spec, grid: GridSpec) -> StationaryProfile:
    L = grid.L if grid.L is not None else domain_length(far, spec)
    x = np.linspace(0.0, L, grid.n_nodes)
    ones = np.ones_like(x)

    def dense(xq):
        return np.zeros((3, np.asarray(xq, dtype=float).size))

    return StationaryProfile(
        x=x, rho=far.rho_plus * ones, u=far.u_plus * ones,
        n=far.n_plus * ones, v=far.u_plus * ones, w=np.zeros_like(x),
        regime=spec.regime, far=far,
        shooting_params={"kind": "constant"}, residual_norm=0.0,
        boundary_mismatch=(0.0, 0.0), slope0=(0.0, 0.0), dense=dense)


def _stable_basis(spec: SpectrumReport):
    """Real fundamental decaying solutions; basis_at(x) stacks them as columns.

    A complex pair contributes the real and imaginary parts of one member, so
    the basis and the shooting amplitudes stay real in every regime.
    """
    pairs = []  # (eigenvalue, eigenvector)
    for lam, r in ((spec.lambda1, spec.r1), (spec.lambda2, spec.r2),
                   (spec.lambda3, spec.r3)):
        if lam.real < 0 and lam in spec.stable:
            pairs.append((lam, r))
    pairs.sort(key=lambda p: -p[0].real)  # slow first

    modes = []
    used_conj = set()
    for lam, r in pairs:
        key = (round(lam.real, 14), round(abs(lam.imag), 14))
        if abs(lam.imag) <= 1e-13 * max(1.0, abs(lam)):
            modes.append(("real", lam.real, r.real))
        elif key not in used_conj:
            used_conj.add(key)
            modes.append(("pair", lam, r))

    def basis_at(x):
        cols = []
        for kind, lam, r in modes:
            if kind == "real":
                cols.append(r * math.exp(lam * x))
            else:
                e = r * np.exp(lam * x)
                cols.append(e.real)
                cols.append(e.imag)
        return np.array(cols, dtype=float).T  # 3 x npar

    npar = basis_at(0.0).shape[1]
    m_slow = min(-l.real for l in spec.stable)
    m_fast = max(-l.real for l in spec.stable)
    return basis_at, npar, m_slow, m_fast


def _shoot_exponential(params, far, spec, grid: GridSpec) -> StationaryProfile:
    """Backward shooting from the decaying subspace for Mach != 1 profiles."""
    up = far.u_plus
    delta = far.delta
    target = far.u_minus - up
    rhs = deviation_rhs(params, far)
    basis_at, npar, m_slow, m_fast = _stable_basis(spec)
    L = grid.L if grid.L is not None else domain_length(far, spec)
    # the seed must sit deep enough on the decaying family to make linear
    # seeding exact, but not so deep that the fast mode outgrows the slow one
    # by more than the error control can track backward
    Ls = min(L, SHOOT_EFOLDS / m_slow)
    if m_fast - m_slow > 1e-12:
        Ls = min(Ls, SEPARATION_EFOLDS / (m_fast - m_slow))

    guard = 0.6 * up  # integration stops before a velocity can change sign

    def blow_up(y, z):
        return guard - max(abs(z[0]), abs(z[2]))
    blow_up.terminal = True

    def integrate(a, dense=False):
        seed = basis_at(Ls) @ a
        return solve_ivp(lambda y, z: -rhs(z), (0.0, Ls), seed,
                         rtol=RTOL_ODE, atol=ATOL_ODE,
                         dense_output=dense, events=blow_up)

    def mismatch(a):
        sol = integrate(a)
        if sol.status != 0 or sol.t[-1] < Ls:
            return None
        z0 = sol.y[:, -1]
        if npar == 1:
            return np.array([z0[0] - target])
        return np.array([z0[0] - target, z0[2] - target])

    # linear prediction of the amplitudes at x = 0
    B0 = basis_at(0.0)
    rows = B0[[0], :] if npar == 1 else B0[[0, 2], :]
    tvec = np.full(rows.shape[0], target)
    a = np.linalg.lstsq(rows, tvec, rcond=None)[0]

    F = mismatch(a)
    it = 0
    while it < NEWTON_BUDGET:
        if F is None:
            raise NoProfileError(
                "backward integration left the admissible tube before "
                "reaching the boundary", iterations=it)
        if np.max(np.abs(F)) < 0.1 * TOL_BC:
            break
        Jac = np.zeros((len(F), npar))
        for k in range(npar):
            h = 1e-5 * delta + 1e-8 * abs(a[k])
            da = np.zeros(npar)
            da[k] = h
            Fk = mismatch(a + da)
            if Fk is None:
                da[k] = -h
                Fk = mismatch(a + da)
                if Fk is None:
                    raise NoProfileError("shooting map not evaluable near the "
                                         "current iterate", iterations=it)
                h = -h
            Jac[:, k] = (Fk - F) / h
        try:
            step = np.linalg.solve(Jac, F)
        except np.linalg.LinAlgError as exc:
            raise NoProfileError(f"singular shooting Jacobian: {exc}",
                                 iterations=it) from exc
        Fn = None
        damp = 1.0
        for _ in range(8):
            Fn = mismatch(a - damp * step)
            if Fn is not None and np.max(np.abs(Fn)) < np.max(np.abs(F)):
                break
            damp *= 0.5
        a = a - damp * step
        F = Fn
        it += 1
    else:
        if npar == 1:
            a, F = _bisect_scalar(mismatch, float(a[0]), target)
            a = np.array([a])
        if F is None or np.max(np.abs(F)) >= 0.1 * TOL_BC:
            worst = float(np.max(np.abs(F))) if F is not None else math.inf
            raise NoProfileError(
                f"shooting did not converge within budget (|mismatch| = {worst:.3e}); "
                "inflow datum outside the empirically admissible set",
                mismatch=None if F is None else tuple(F), iterations=it)

    # final solve with dense output, then sample the output grid
    x = np.linspace(0.0, L, grid.n_nodes)
    sol = integrate(a, dense=True)

    def dense(xq):
        xq = np.asarray(xq, dtype=float)
        out = np.empty((3, xq.size))
        ins = xq <= Ls
        if np.any(ins):
            out[:, ins] = sol.sol(Ls - xq[ins])
        for i in np.nonzero(~ins)[0]:
            out[:, i] = basis_at(xq[i]) @ a
        return out

    z = dense(x)
    z0 = z[:, 0]
    du_mis = abs(z0[0] - target)
    dv_mis = abs(z0[2] - target)
    if npar == 1 and dv_mis > TOL_BC:
        # the decaying family fixes v(0) once u(0) is matched; a mismatch of
        # order 2*delta means the inflow datum cannot be reached at all
        raise NoProfileError(
            "one-parameter decaying family matched u(0) but leaves "
            f"|v(0) - u_minus| = {dv_mis:.6e} (tolerance {TOL_BC:.1e}); "
            "inflow datum outside the empirically admissible set",
            mismatch=(du_mis, dv_mis), iterations=it)

    tail_dev = max(abs(z[0, -1]), abs(z[2, -1])) / up
    if tail_dev > TAIL_TOL:
        raise NoProfileError(
            f"domain too short: relative tail deviation {tail_dev:.3e} exceeds "
            f"{TAIL_TOL:.1e}; increase L", iterations=it)
    return _assemble_profile(params, far, spec, x, z, rhs,
                             {"kind": "stable-manifold",
                              "amplitudes": [float(v) for v in np.atleast_1d(a)],
                              "L_shoot": Ls, "iterations": it},
                             (du_mis, dv_mis), dense)


def _bisect_scalar(mismatch, a_guess: float, target: float):
    """Bisection fallback for the one-parameter shoot when Newton stalls.

    The zero-amplitude trajectory misses the boundary by exactly -target, so
    a bracket is sought by expanding the linear guess geometrically.
    """
    f0 = -target
    a_lo, f_lo = 0.0, f0
    a_hi = None
    a_try = a_guess
    for _ in range(40):
        F = mismatch(np.array([a_try]))
        if F is not None and F[0] * f_lo < 0:
            a_hi, f_hi = a_try, F[0]
            break
        if F is not None:
            a_lo, f_lo = a_try, F[0]
        a_try *= 2.0
    if a_hi is None:
        return a_guess, None
    for _ in range(NEWTON_BUDGET):
        a_mid = 0.5 * (a_lo + a_hi)
        F = mismatch(np.array([a_mid]))
        if F is None:
            return a_mid, None
        if abs(F[0]) < 0.1 * TOL_BC:
            return a_mid, F
        if F[0] * f_lo < 0:
            a_hi = a_mid
        else:
            a_lo, f_lo = a_mid, F[0]
    return a_mid, F


def left_null_vector(J: FarFieldJacobian) -> np.ndarray:
    """Left null vector of a sonic Jacobian, normalized against the center
    eigenvector (1, 0, 1)."""
    _, _, Vt = np.linalg.svd(J.entries.T)
    ell = Vt[-1]
    s = ell[0] + ell[2]
    if abs(s) < 1e-12:
        raise StructuralError("left null vector orthogonal to center direction")
    return ell / s


def center_manifold_coeff(params: ModelParams, far: FarFieldData) -> CenterManifoldData:
    """Quadratic coefficient a and skew constant b of the sonic reduction."""
    regime = model.classify_regime(params, far)
    if regime.tag != model.SONIC:
        raise RegimeError(
            f"center reduction requires a sonic far field, got {regime.tag}")
    rp, np_, up = far.rho_plus, far.n_plus, far.u_plus
    A1, A2, g, al, mu = params.A1, params.A2, params.gamma, params.alpha, params.mu
    b = rp * (up ** 2 - A1 * g * rp ** (g - 1.0)) / (abs(up) * math.sqrt((mu + np_) * np_))
    a = (A1 * g * (g + 1.0) * rp ** g + A2 * al * (al + 1.0) * np_ ** al) \
        / (2.0 * up ** 2 * (mu + np_) * (1.0 + b * b))
    return CenterManifoldData(a=a, b=b)


def center_reduction(params: ModelParams, far: FarFieldData, J: FarFieldJacobian):
    """Numerically computed quadratic reduction of the neutral direction.

    Returns (ell, a_proj, q): the left null projector, the projected quadratic
    coefficient, and the quadratic correction of the center curve normalized
    by ell . q = 0.  a_proj comes from a finite-difference evaluation of the
    quadratic part of the vector field, independent of the closed form.
    """
    rhs = deviation_rhs(params, far)
    ell = left_null_vector(J)
    r3 = np.array([1.0, 0.0, 1.0])
    eps = 1e-4 * max(1.0, far.u_plus)
    Q3 = (rhs(eps * r3) + rhs(-eps * r3)) / (2.0 * eps * eps)
    a_proj = float(ell @ Q3)
    A = np.vstack([J.entries, ell])
    b = np.concatenate([a_proj * r3 - Q3, [0.0]])
    q, *_ = np.linalg.lstsq(A, b, rcond=None)
    return ell, a_proj, q


def _solve_sonic(params, far, spec, grid: GridSpec) -> StationaryProfile:
    """Center-branch construction with a linearized decaying boundary layer.

    Shooting unknowns are (sigma0, s_hat): center amplitude and decaying
    amplitude at x = 0.  Both boundary conditions are algebraic in the
    unknowns, so the Newton iteration is exact and cheap; the profile itself
    comes from integrating the projected scalar flow.
    """
    up = far.u_plus
    target = far.u_minus - up
    J = assemble_jacobian(params, far)
    rhs = deviation_rhs(params, far)
    cm = center_manifold_coeff(params, far)
    ell, a_proj, q = center_reduction(params, far, J)
    if abs(a_proj - cm.a) > 1e-6 * abs(cm.a):
        raise StructuralError(
            f"projected quadratic coefficient {a_proj!r} disagrees with the "
            f"closed form {cm.a!r}")

    r3 = np.array([1.0, 0.0, 1.0])
    lam2 = spec.lambda2.real           # the decaying eigenvalue
    r2 = spec.r2.real

    def G(s):
        # projected scalar flow along the corrected center curve
        return float(ell @ rhs(s * r3 + s * s * q))

    def bc_mismatch(p):
        s0, sh = p
        z0 = s0 * r3 + s0 * s0 * q + sh * r2
        return np.array([z0[0] - target, z0[2] - target])

    p = np.array([target, 0.0])
    F = bc_mismatch(p)
    it = 0
    while np.max(np.abs(F)) > 1e-15 and it < NEWTON_BUDGET:
        Jm = np.zeros((2, 2))
        for k in range(2):
            h = 1e-9 * max(1.0, abs(p[k]))
            dp = np.zeros(2)
            dp[k] = h
            Jm[:, k] = (bc_mismatch(p + dp) - F) / h
        try:
            p = p - np.linalg.solve(Jm, F)
        except np.linalg.LinAlgError as exc:
            raise NoProfileError(f"singular sonic boundary system: {exc}",
                                 iterations=it) from exc
        F = bc_mismatch(p)
        it += 1
    if np.max(np.abs(F)) > 0.1 * TOL_BC:
        raise NoProfileError("sonic boundary matching failed",
                             mismatch=tuple(F), iterations=it)
    sigma0, s_hat = float(p[0]), float(p[1])
    if sigma0 >= 0.0:
        raise NoProfileError(
            "sonic construction requires a negative center amplitude at the "
            f"boundary, got sigma0 = {sigma0:.3e}; inflow datum outside the "
            "empirically admissible set", mismatch=tuple(F), iterations=it)
    cm.sigma0 = sigma0

    L = grid.L if grid.L is not None else domain_length(far, spec)
    x = np.linspace(0.0, L, grid.n_nodes)
    sol = solve_ivp(lambda t, s: [G(s[0])], (0.0, L), [sigma0],
                    rtol=1e-12, atol=1e-20, dense_output=True)
    if sol.status != 0:
        raise NoProfileError("center-branch integration failed: " + sol.message)

    def dense(xq):
        xq = np.asarray(xq, dtype=float)
        s = sol.sol(xq)[0]
        lay = s_hat * np.exp(lam2 * xq)
        return (s[None, :] * r3[:, None] + (s * s)[None, :] * q[:, None]
                + lay[None, :] * r2[:, None])

    z = dense(x)
    du_diffs = np.diff(z[0])
    dv_diffs = np.diff(z[2])
    if du_diffs.min() < -1e-10 or dv_diffs.min() < -1e-10:
        raise NoProfileError(
            "sonic profile lost monotonicity "
            f"(min du = {du_diffs.min():.3e}, min dv = {dv_diffs.min():.3e})",
            iterations=it)

    z0 = z[:, 0]
    mis = (abs(z0[0] - target), abs(z0[2] - target))
    return _assemble_profile(params, far, spec, x, z, rhs,
                             {"kind": "center-branch", "sigma0": sigma0,
                              "s_hat": s_hat, "a": cm.a, "a_projected": a_proj,
                              "b": cm.b, "iterations": it},
                             mis, dense)


def _assemble_profile(params, far, spec, x, z, rhs, shooting_params,
                      boundary_mismatch, dense) -> StationaryProfile:
    up = far.u_plus
    u = up + z[0]
    v = up + z[2]
    if np.min(u) <= 0 or np.min(v) <= 0:
        raise NoProfileError("velocity field lost positivity along the profile")
    prof = StationaryProfile(
        x=x, rho=far.rho_plus * up / u, u=u, n=far.n_plus * up / v, v=v,
        w=z[1].copy(), regime=spec.regime, far=far,
        shooting_params=shooting_params, boundary_mismatch=boundary_mismatch,
        slope0=(float(z[1, 0]), float(rhs(z[:, 0])[2])), dense=dense)
    prof.residual_norm = profile_residual(prof, params, far)
    return prof


def profile_residual(profile: StationaryProfile, params: ModelParams,
                     far: FarFieldData) -> float:
    """Max relative defect of the first-order system along the sampled profile.

    Fourth-order interior differences of the stored deviation fields against
    the exact right-hand side, each equation normalized by its own scale.
    """
    rhs = deviation_rhs(params, far)
    up = far.u_plus
    z = np.vstack([profile.u - up, profile.w, profile.v - up])
    h = profile.x[1] - profile.x[0]
    dz = (z[:, :-4] - 8.0 * z[:, 1:-3] + 8.0 * z[:, 3:-1] - z[:, 4:]) / (12.0 * h)
    F = np.empty_like(z)
    for i in range(z.shape[1]):
        F[:, i] = rhs(z[:, i])
    scale = np.maximum(np.max(np.abs(F), axis=1, keepdims=True), 1e-30)
    return float(np.max(np.abs(dz - F[:, 2:-2]) / scale))


def solve_stationary(params: ModelParams, far: FarFieldData,
                     grid: GridSpec | None = None,
                     force_regime: str | None = None) -> StationaryProfile:
    """Construct the stationary profile for the given inflow data.

    delta = 0 short-circuits to the constant far-field state.  force_regime
    overrides the Mach classification for callers probing the dispatch
    boundary; it does not change the data.
    """
    grid = grid or GridSpec()
    if grid.n_nodes < 16:
        raise InvalidParameterError("grid must have at least 16 nodes")
    J = assemble_jacobian(params, far)
    spec = eigen_spectrum(J)
    if force_regime is not None:
        if force_regime not in (model.SUPERSONIC, model.SUBSONIC, model.SONIC):
            raise RegimeError(f"unknown regime {force_regime!r}")
        spec.regime = RegimeLabel(tag=force_regime, mach=spec.regime.mach)
    if far.delta == 0.0:
        return _constant_profile(params, far, spec, grid)
    if spec.regime.tag == model.SONIC:
        return _solve_sonic(params, far, spec, grid)
    return _shoot_exponential(params, far, spec, grid)


@dataclass
class DecayReport:
    """Fitted tail behaviour of a profile against its spectral prediction."""

    regime: str
    trivial: bool
    model_selected: str | None = None
    rate: float | None = None
    rate_reference: float | None = None
    rate_rel_err: float | None = None
    r_squared: float | None = None
    recip_slope: float | None = None
    recip_slope_reference: float | None = None
    recip_slope_rel_err: float | None = None
    loglog_exponent: float | None = None
    amplitude_bound: float | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "regime", "trivial", "model_selected", "rate", "rate_reference",
            "rate_rel_err", "r_squared", "recip_slope", "recip_slope_reference",
            "recip_slope_rel_err", "loglog_exponent", "amplitude_bound",
            "warnings")}


def decay_report(profile: StationaryProfile, spec: SpectrumReport,
                 delta: float | None = None,
                 cm: CenterManifoldData | None = None) -> DecayReport:
    """Fit the profile tail and compare against the spectral prediction.

    For Mach != 1 the prediction is the slowest decaying rate; at the sonic
    point the reciprocal of the neutral coordinate grows linearly in x with
    slope given by the quadratic reduction coefficient.
    """
    far = profile.far
    delta = far.delta if delta is None else delta
    if delta == 0.0:
        return DecayReport(regime=profile.regime.tag, trivial=True,
                           warnings=["constant profile: decay rates undefined"])

    x = profile.x
    up = far.u_plus
    du = np.abs(profile.u - up)
    dv = np.abs(profile.v - up)
    total4 = (np.abs(profile.rho - far.rho_plus) + du
              + np.abs(profile.n - far.n_plus) + dv)
    rep = DecayReport(regime=profile.regime.tag, trivial=False)

    if profile.regime.tag == model.SONIC:
        if cm is None:
            raise RegimeError("sonic decay report requires center reduction data")
        P = np.column_stack([spec.r1.real, spec.r2.real, spec.r3.real])
        z = np.vstack([profile.u - up, profile.w, profile.v - up])
        z3 = np.linalg.solve(P, z)[2]
        fit_r = analysis.fit_reciprocal(x, np.abs(z3))
        rep.warnings += fit_r.warnings
        rep.recip_slope = fit_r.rate_or_slope
        rep.recip_slope_reference = cm.a
        rep.recip_slope_rel_err = abs(fit_r.rate_or_slope / cm.a - 1.0)
        fit_ll = analysis.fit_loglog(x, du)
        rep.warnings += fit_ll.warnings
        rep.loglog_exponent = fit_ll.rate_or_slope
        rep.r_squared = fit_r.r_squared
        rep.model_selected = "algebraic"
        w = analysis.default_window_mask(x, total4)
        rep.amplitude_bound = float(np.max(total4[w] * (1.0 + delta * x[w]) / delta))
        return rep

    y = du + dv
    fit_exp = analysis.fit_exponential_tail(x, y)
    fit_alg = analysis.fit_algebraic_tail(x, y)
    rep.warnings += fit_exp.warnings
    rep.rate = fit_exp.rate_or_slope
    rep.r_squared = fit_exp.r_squared
    stable = spec.stable
    rep.rate_reference = min(-l.real for l in stable) if stable else None
    if rep.rate_reference:
        rep.rate_rel_err = abs(rep.rate / rep.rate_reference - 1.0)
    rep.model_selected = ("exponential"
                          if fit_exp.r_squared >= (fit_alg.loglog_r_squared or 0.0)
                          else "algebraic")
    w = analysis.default_window_mask(x, total4)
    rep.amplitude_bound = float(np.max(total4[w] * np.exp(rep.rate * x[w]) / delta))
    return rep


@dataclass
class SweepRow:
    delta: float
    ux0: float | None
    vx0: float | None
    error: str | None = None


@dataclass
class SweepResult:
    rows: list
    exponent: float | None
    r_squared: float | None
    max_ratio: float | None

    def to_dict(self) -> dict:
        return {
            "rows": [{"delta": r.delta, "ux0": r.ux0, "vx0": r.vx0,
                      "error": r.error} for r in self.rows],
            "exponent": self.exponent,
            "r_squared": self.r_squared,
            "max_ratio": self.max_ratio,
        }


def boundary_slope_sweep(params: ModelParams, far: FarFieldData,
                         delta_list, grid: GridSpec | None = None) -> SweepResult:
    """Boundary-slope magnitudes |u_x(0)|, |v_x(0)| across a delta sweep.

    The sweep keeps the far-field state of `far` fixed and moves the inflow
    velocity to u_plus -/+ delta, following the side the base data sits on.
    Rows that fail to produce a profile carry the error message; the scaling
    fit uses the successful delta > 0 rows.
    """
    grid = grid or GridSpec()
    sign = -1.0 if far.u_minus <= far.u_plus else 1.0
    rows = []
    for d in delta_list:
        if d < 0:
            rows.append(SweepRow(delta=d, ux0=None, vx0=None,
                                 error="negative delta"))
            continue
        try:
            f = model.far_field_from_plus(far.rho_plus, far.n_plus,
                                          far.u_plus, far.u_plus + sign * d)
            prof = solve_stationary(params, f, grid)
            rows.append(SweepRow(delta=float(d), ux0=abs(prof.slope0[0]),
                                 vx0=abs(prof.slope0[1])))
        except (NoProfileError, StructuralError) as exc:
            rows.append(SweepRow(delta=float(d), ux0=None, vx0=None,
                                 error=str(exc)))
    good = [(r.delta, r.ux0) for r in rows if r.error is None and r.delta > 0]
    if len(good) >= 2:
        dd = np.array([g[0] for g in good])
        ss = np.array([max(g[1], 1e-300) for g in good])
        co, r2 = analysis.linear_fit(np.log(dd), np.log(ss))
        exponent, r_squared = float(co[0]), float(r2)
        max_ratio = float(np.max(ss / dd))
    else:
        exponent = r_squared = max_ratio = None
    return SweepResult(rows=rows, exponent=exponent, r_squared=r_squared,
                       max_ratio=max_ratio)
