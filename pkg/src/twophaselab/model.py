"""Constitutive model: power-law pressures, far-field algebra, Mach classification.

Everything here is pure arithmetic on validated immutable data; all operations
are safe for unrestricted concurrent use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, InvalidParameterError

# Relative half-width of the sonic band in Mach number.  Sonic runs are meant
# to be *constructed* (solve u+ = c+ for one parameter), not classified out of
# arbitrary inputs, so the band only has to absorb rounding.
TOL_SONIC = 1e-9

SUPERSONIC = "Supersonic"
SUBSONIC = "Subsonic"
SONIC = "Sonic"

_MODEL_KEYS = ("A1", "A2", "gamma", "alpha", "mu",
               "rho_minus", "n_minus", "u_minus", "u_plus")


@dataclass(frozen=True)
class ModelParams:
    """The five constitutive constants of the two-phase system.

    Pressure laws are p1(rho) = A1*rho**gamma and p2(n) = A2*n**alpha;
    mu is the (constant) viscosity of phase 1.  Phase 2 carries the
    density-weighted viscosity n, which needs no constant.
    """

    A1: float
    A2: float
    gamma: float
    alpha: float
    mu: float

    def __post_init__(self):
        if not (self.A1 > 0 and self.A2 > 0):
            raise InvalidParameterError("pressure coefficients must be positive")
        if not (self.gamma >= 1.0 and self.alpha >= 1.0):
            raise InvalidParameterError("adiabatic exponents must be >= 1")
        if not self.mu > 0:
            raise InvalidParameterError("viscosity mu must be positive")


@dataclass(frozen=True)
class FarFieldData:
    """Boundary (x=0) and far-field (x->inf) states tied by flux compatibility.

    Both phase fluxes are constant for a stationary flow, which forces
    u+*rho+ = u-*rho- and u+*n+ = u-*n-.  delta = |u+ - u-| is the smallness
    parameter controlling profile amplitude.
    """

    rho_plus: float
    n_plus: float
    u_plus: float
    rho_minus: float
    n_minus: float
    u_minus: float
    delta: float

    def __post_init__(self):
        for name in ("rho_plus", "n_plus", "u_plus", "rho_minus", "n_minus", "u_minus"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")
        f1 = self.u_plus * self.rho_plus
        f2 = self.u_minus * self.rho_minus
        if abs(f1 - f2) > 1e-12 * max(abs(f1), abs(f2)):
            raise InvalidParameterError("phase-1 flux compatibility violated")
        g1 = self.u_plus * self.n_plus
        g2 = self.u_minus * self.n_minus
        if abs(g1 - g2) > 1e-12 * max(abs(g1), abs(g2)):
            raise InvalidParameterError("phase-2 flux compatibility violated")
        d = abs(self.u_plus - self.u_minus)
        if abs(self.delta - d) > 1e-12 * max(1.0, d):
            raise InvalidParameterError("delta must equal |u_plus - u_minus|")


@dataclass(frozen=True)
class RegimeLabel:
    tag: str
    mach: float


def pressure(params: ModelParams, phase: int, density: float):
    """Power-law pressure of the selected phase; density may be an array."""
    import numpy as np

    if phase not in (1, 2):
        raise InvalidParameterError("phase must be 1 or 2")
    if np.any(np.asarray(density) <= 0):
        raise InvalidParameterError("density must be positive")
    if phase == 1:
        return params.A1 * density ** params.gamma
    return params.A2 * density ** params.alpha


def pressure_derivative(params: ModelParams, phase: int, density: float):
    """d(pressure)/d(density) for the selected phase."""
    import numpy as np

    if phase not in (1, 2):
        raise InvalidParameterError("phase must be 1 or 2")
    if np.any(np.asarray(density) <= 0):
        raise InvalidParameterError("density must be positive")
    if phase == 1:
        return params.A1 * params.gamma * density ** (params.gamma - 1.0)
    return params.A2 * params.alpha * density ** (params.alpha - 1.0)


def sound_speed(params: ModelParams, rho_plus: float, n_plus: float) -> float:
    """Mixture sound speed at the far field."""
    if not (rho_plus > 0 and n_plus > 0):
        raise InvalidParameterError("far-field densities must be positive")
    num = (params.A1 * params.gamma * rho_plus ** params.gamma
           + params.A2 * params.alpha * n_plus ** params.alpha)
    return math.sqrt(num / (rho_plus + n_plus))


def mach_number(params: ModelParams, far: FarFieldData) -> float:
    return abs(far.u_plus) / sound_speed(params, far.rho_plus, far.n_plus)


def classify_regime(params: ModelParams, far: FarFieldData) -> RegimeLabel:
    m = mach_number(params, far)
    if m > 1.0 + TOL_SONIC:
        tag = SUPERSONIC
    elif m < 1.0 - TOL_SONIC:
        tag = SUBSONIC
    else:
        tag = SONIC
    return RegimeLabel(tag=tag, mach=m)


def complete_far_field(params: ModelParams, rho_minus: float, n_minus: float,
                       u_minus: float, u_plus: float) -> FarFieldData:
    """Derive the far-field densities from the boundary data by flux constancy."""
    for name, val in (("rho_minus", rho_minus), ("n_minus", n_minus),
                      ("u_minus", u_minus), ("u_plus", u_plus)):
        if not val > 0:
            raise InvalidParameterError(f"{name} must be positive")
    rho_plus = rho_minus * u_minus / u_plus
    n_plus = n_minus * u_minus / u_plus
    return FarFieldData(rho_plus=rho_plus, n_plus=n_plus, u_plus=u_plus,
                        rho_minus=rho_minus, n_minus=n_minus, u_minus=u_minus,
                        delta=abs(u_plus - u_minus))


def far_field_from_plus(rho_plus: float, n_plus: float, u_plus: float,
                        u_minus: float) -> FarFieldData:
    """Convenience constructor anchoring exact values on the far-field side."""
    for name, val in (("rho_plus", rho_plus), ("n_plus", n_plus),
                      ("u_plus", u_plus), ("u_minus", u_minus)):
        if not val > 0:
            raise InvalidParameterError(f"{name} must be positive")
    return FarFieldData(rho_plus=rho_plus, n_plus=n_plus, u_plus=u_plus,
                        rho_minus=rho_plus * u_plus / u_minus,
                        n_minus=n_plus * u_plus / u_minus,
                        u_minus=u_minus, delta=abs(u_plus - u_minus))


def sonic_stability_margin(params: ModelParams, far: FarFieldData) -> float:
    """Margin (RHS - LHS) of the sonic stability hypothesis.

    Nonnegative means the hypothesis holds.  With gamma = alpha = 1 both
    bracketed terms vanish, so the right side is zero; that degenerate case is
    evaluated literally, not special-cased.
    """
    p1p = pressure_derivative(params, 1, far.rho_plus)
    p2p = pressure_derivative(params, 2, far.n_plus)
    lhs = abs(p1p - p2p)
    b1 = (1.0 + far.rho_plus / far.n_plus) * math.sqrt((params.gamma - 1.0) * p1p)
    b2 = (1.0 + far.n_plus / far.rho_plus) * math.sqrt((params.alpha - 1.0) * p2p)
    rhs = math.sqrt(2.0) * far.u_plus * min(b1, b2)
    return rhs - lhs


def model_from_config(section) -> tuple[ModelParams, FarFieldData]:
    """Parse the strict physical-parameter section of a configuration document.

    Exactly the keys {A1, A2, gamma, alpha, mu, rho_minus, n_minus, u_minus,
    u_plus} are accepted; anything else is rejected.
    """
    if not isinstance(section, dict):
        raise ConfigError("model section must be a JSON object")
    unknown = set(section) - set(_MODEL_KEYS)
    if unknown:
        raise ConfigError(f"unknown model keys: {sorted(unknown)}")
    missing = set(_MODEL_KEYS) - set(section)
    if missing:
        raise ConfigError(f"missing model keys: {sorted(missing)}")
    vals = {}
    for k in _MODEL_KEYS:
        v = section[k]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"model key {k} must be a number")
        vals[k] = float(v)
    try:
        params = ModelParams(A1=vals["A1"], A2=vals["A2"], gamma=vals["gamma"],
                             alpha=vals["alpha"], mu=vals["mu"])
        far = complete_far_field(params, vals["rho_minus"], vals["n_minus"],
                                 vals["u_minus"], vals["u_plus"])
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return params, far
