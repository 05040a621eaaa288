"""Cross-cutting verification utilities: tail fits, weighted inequalities,
composite quadrature.

Fit routines are least-squares lines in transformed coordinates; they serve
the decay-law checks only and deliberately avoid general-purpose statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError

# Fraction of the domain used by the default tail window, and the relative
# floor below which values are treated as rounding noise.
WINDOW_FRACTION = 0.6
FLOOR_FACTOR = 1e3 * np.finfo(float).eps
MIN_POINTS = 8


@dataclass
class FitResult:
    """Outcome of a one-parameter tail fit.

    `model` is one of exponential / algebraic / power; rate_or_slope carries
    the decay rate, reciprocal slope, or log-log exponent depending on the
    model.  The window is the abscissa range actually used.
    """

    model: str
    rate_or_slope: float
    r_squared: float
    window: tuple
    intercept: float = 0.0
    low_confidence: bool = False
    loglog_exponent: float | None = None
    loglog_r_squared: float | None = None
    warnings: list = field(default_factory=list)


def linear_fit(x: np.ndarray, y: np.ndarray):
    """Least-squares line y ~ c0*x + c1; returns ((c0, c1), r_squared)."""
    co = np.polyfit(x, y, 1)
    resid = y - np.polyval(co, x)
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= np.finfo(float).tiny:
        return co, 0.0
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return co, min(max(r2, 0.0), 1.0)


def default_window_mask(x: np.ndarray, y: np.ndarray,
                        window: tuple | None = None,
                        warnings_out: list | None = None) -> np.ndarray:
    """Boolean mask of the fit window: trailing fraction of the domain with
    floor-level values trimmed; shrinks toward earlier x when the trailing
    window is entirely below the floor."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    floor = FLOOR_FACTOR * np.max(np.abs(y))
    above = np.abs(y) > floor
    if window is not None:
        mask = (x >= window[0]) & (x <= window[1]) & above
        if np.count_nonzero(mask) < MIN_POINTS:
            raise InsufficientDataError(
                f"window {window} contains {int(np.count_nonzero(mask))} usable "
                f"points (need {MIN_POINTS})")
        return mask
    x0 = x[0] + (1.0 - WINDOW_FRACTION) * (x[-1] - x[0])
    mask = (x >= x0) & above
    if np.count_nonzero(mask) >= MIN_POINTS:
        return mask
    # trailing window sits below the floor: fit the tail of the usable part
    idx = np.nonzero(above)[0]
    if idx.size < MIN_POINTS:
        raise InsufficientDataError(
            f"only {idx.size} points above the numerical floor (need {MIN_POINTS})")
    if warnings_out is not None:
        warnings_out.append("fit window shrunk: trailing values at numerical floor")
    keep = idx[int((1.0 - WINDOW_FRACTION) * idx.size):]
    mask = np.zeros_like(above)
    mask[keep] = True
    return mask


def fit_exponential_tail(x, y, window: tuple | None = None) -> FitResult:
    """Fit y ~ C exp(-rate x) by a least-squares line on (x, log y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    warns: list = []
    mask = default_window_mask(x, y, window, warns)
    if np.any(y[mask] <= 0):
        raise InsufficientDataError("exponential fit requires positive values")
    co, r2 = linear_fit(x[mask], np.log(y[mask]))
    low = r2 < 0.9
    if low:
        warns.append("low-confidence fit: r_squared below 0.9")
    return FitResult(model="exponential", rate_or_slope=float(-co[0]),
                     r_squared=r2, window=(float(x[mask][0]), float(x[mask][-1])),
                     intercept=float(math.exp(co[1])), low_confidence=low,
                     warnings=warns)


def fit_reciprocal(x, y, window: tuple | None = None) -> FitResult:
    """Fit 1/y ~ slope*x + c; the slope estimates the quadratic-flow coefficient."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    warns: list = []
    mask = default_window_mask(x, y, window, warns)
    if np.any(y[mask] <= 0):
        raise InsufficientDataError("reciprocal fit requires positive values")
    co, r2 = linear_fit(x[mask], 1.0 / y[mask])
    low = r2 < 0.9
    if low:
        warns.append("low-confidence fit: r_squared below 0.9")
    return FitResult(model="algebraic", rate_or_slope=float(co[0]), r_squared=r2,
                     window=(float(x[mask][0]), float(x[mask][-1])),
                     intercept=float(co[1]), low_confidence=low, warnings=warns)


def fit_loglog(x, y, window: tuple | None = None) -> FitResult:
    """Fit y ~ C x^p by a line on (log x, log y); p is the returned slope."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    warns: list = []
    mask = default_window_mask(x, y, window, warns)
    mask &= x > 0
    if np.count_nonzero(mask) < MIN_POINTS:
        raise InsufficientDataError("log-log fit needs positive abscissae")
    if np.any(y[mask] <= 0):
        raise InsufficientDataError("log-log fit requires positive values")
    co, r2 = linear_fit(np.log(x[mask]), np.log(y[mask]))
    low = r2 < 0.9
    if low:
        warns.append("low-confidence fit: r_squared below 0.9")
    return FitResult(model="power", rate_or_slope=float(co[0]), r_squared=r2,
                     window=(float(x[mask][0]), float(x[mask][-1])),
                     intercept=float(math.exp(co[1])), low_confidence=low,
                     warnings=warns)


def fit_algebraic_tail(x, y, window: tuple | None = None) -> FitResult:
    """Combined algebraic-tail fit: reciprocal slope plus log-log exponent."""
    rec = fit_reciprocal(x, y, window)
    try:
        ll = fit_loglog(x, y, window)
        rec.loglog_exponent = ll.rate_or_slope
        rec.loglog_r_squared = ll.r_squared
    except InsufficientDataError as exc:
        rec.warnings.append(f"log-log stage skipped: {exc}")
    return rec


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights on n uniform nodes with spacing h.

    Even interval counts use plain Simpson; odd counts close the last three
    intervals with the 3/8 rule, keeping fourth-order accuracy throughout.
    Falls back to trapezoid for fewer than 4 nodes.
    """
    if n < 2:
        raise InsufficientDataError("quadrature needs at least 2 nodes")
    w = np.zeros(n)
    if n < 4:
        w[:] = h
        w[0] = w[-1] = h / 2.0
        return w
    m = n - 1  # interval count
    if m % 2 == 0:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (h / 3.0)
    # Simpson on the first m-3 intervals, 3/8 on the last three
    k = m - 3
    if k > 0:
        w[0] = 1.0
        w[1:k:2] = 4.0
        w[2:k:2] = 2.0
        w[k] = 1.0
        w[:k + 1] *= h / 3.0
    w38 = np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    w[k:] += w38
    return w


def grid_integral(x: np.ndarray, y: np.ndarray) -> float:
    """Composite fourth-order integral of y over the uniform grid x."""
    h = x[1] - x[0]
    return float(simpson_weights(x.size, h) @ y)


def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Second-order first derivative on a uniform grid (one-sided at the ends)."""
    h = x[1] - x[0]
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    return d


@dataclass
class WeightedInequalityReport:
    """Both weighted trace inequalities evaluated with explicit constants."""

    exp_lhs: float
    exp_rhs: float
    exp_constant: float
    exp_ratio: float
    exp_holds: bool
    alg_lhs: float
    alg_rhs: float
    alg_constant: float
    alg_ratio: float
    alg_holds: bool
    j: float
    delta: float
    c0: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "exp_lhs", "exp_rhs", "exp_constant", "exp_ratio", "exp_holds",
            "alg_lhs", "alg_rhs", "alg_constant", "alg_ratio", "alg_holds",
            "j", "delta", "c0")}


def weighted_inequality_check(psi: np.ndarray, x: np.ndarray, c0: float,
                              delta: float, j: float = 3.0) -> WeightedInequalityReport:
    """Check the exponentially and algebraically weighted trace inequalities.

    Constants come from |psi(x)|^2 <= 2 psi(0)^2 + 2 x ||psi_x||^2 integrated
    against each weight: max(2/c0, 2/c0^2) for the exponential weight and
    max(2 delta/(j-1), 2/((j-2)(j-1))) for the algebraic weight with j > 2.
    """
    if j <= 2:
        raise InsufficientDataError("algebraic weight requires j > 2")
    psi = np.asarray(psi, dtype=float)
    x = np.asarray(x, dtype=float)
    psix = derivative(x, psi)
    h1x = grid_integral(x, psix ** 2)
    bdry = psi[0] ** 2

    exp_lhs = delta * grid_integral(x, np.exp(-c0 * x) * psi ** 2)
    exp_rhs = delta * (bdry + h1x)
    c_exp = max(2.0 / c0, 2.0 / c0 ** 2)

    wgt = delta ** j / (1.0 + delta * x) ** j
    alg_lhs = grid_integral(x, wgt * psi ** 2)
    alg_rhs = delta ** (j - 2.0) * (bdry + h1x)
    c_alg = max(2.0 * delta / (j - 1.0), 2.0 / ((j - 2.0) * (j - 1.0)))

    tiny = 1e-300

    def ratio(lhs, c, rhs):
        return lhs / max(c * rhs, tiny) if lhs > 0 else 0.0

    slack = 1.0 + 1e-12  # quadrature rounding headroom on an analytic bound
    return WeightedInequalityReport(
        exp_lhs=exp_lhs, exp_rhs=exp_rhs, exp_constant=c_exp,
        exp_ratio=ratio(exp_lhs, c_exp, exp_rhs),
        exp_holds=exp_lhs <= c_exp * exp_rhs * slack,
        alg_lhs=alg_lhs, alg_rhs=alg_rhs, alg_constant=c_alg,
        alg_ratio=ratio(alg_lhs, c_alg, alg_rhs),
        alg_holds=alg_lhs <= c_alg * alg_rhs * slack,
        j=j, delta=delta, c0=c0)
