"""Closed-form roots of a real monic cubic with Newton polish.

The characteristic polynomial is written as lam**3 - tr*lam**2 + e2*lam - det,
i.e. in terms of the three matrix invariants, so the solver doubles as an
eigenvalue routine for 3x3 matrices whose invariants are known exactly.
"""
from __future__ import annotations

import cmath
import math

import numpy as np


def roots_from_invariants(tr: float, e2: float, det: float) -> np.ndarray:
    """Three complex roots of lam^3 - tr lam^2 + e2 lam - det.

    Trigonometric branch for three real roots, Cardano for a complex pair,
    then two Newton sweeps in complex arithmetic.  A det of exactly zero is
    factored out so a structurally zero root stays exactly zero.
    """
    if det == 0.0:
        s = cmath.sqrt(tr * tr - 4.0 * e2)
        lam = np.array([0.0, (tr + s) / 2.0, (tr - s) / 2.0], dtype=complex)
        return _polish(lam, tr, e2, det, skip_zero=True)

    # depressed cubic t^3 + p t + q with lam = t + tr/3
    p = e2 - tr * tr / 3.0
    q = -det + tr * e2 / 3.0 - 2.0 * tr ** 3 / 27.0
    disc = -4.0 * p ** 3 - 27.0 * q * q
    if disc >= 0.0 and p < 0.0:
        # three real roots, trigonometric form
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = min(1.0, max(-1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        t = np.array([m * math.cos(theta - 2.0 * math.pi * k / 3.0)
                      for k in range(3)], dtype=complex)
    elif disc < 0.0:
        # one real root by Cardano (disc < 0 makes the radicand positive, so
        # everything stays real).  Take the sign branch that avoids the
        # cancellation of -q/2 against the radical, and the real cube root.
        sq = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
        u3 = -q / 2.0 - sq if q > 0.0 else -q / 2.0 + sq
        u = math.copysign(abs(u3) ** (1.0 / 3.0), u3)
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        t = _deflate(u + v, p)
    else:
        # disc == 0 with p >= 0 means p = q = 0: triple root at the origin
        t = np.zeros(3, dtype=complex)
    lam = t + tr / 3.0
    return _polish(lam, tr, e2, det, skip_zero=False)


def _deflate(t0: float, p: float) -> np.ndarray:
    # t^3 + p t + q = (t - t0)(t^2 + t0 t + (p + t0^2))
    b = t0
    c = p + t0 * t0
    s = cmath.sqrt(b * b - 4.0 * c)
    return np.array([t0, (-b + s) / 2.0, (-b - s) / 2.0], dtype=complex)


def _polish(lam: np.ndarray, tr: float, e2: float, det: float,
            skip_zero: bool) -> np.ndarray:
    for _ in range(2):
        f = lam ** 3 - tr * lam ** 2 + e2 * lam - det
        fp = 3.0 * lam ** 2 - 2.0 * tr * lam + e2
        step = np.where(fp != 0, f / np.where(fp == 0, 1.0, fp), 0.0)
        if skip_zero:
            step[0] = 0.0
        lam = lam - step
    # enforce conjugate symmetry on a genuine complex pair
    im = np.abs(lam.imag)
    if np.count_nonzero(im > 0) == 2:
        a, b = np.argsort(-im)[:2]
        mean = 0.5 * (lam[a] + np.conj(lam[b]))
        lam[a] = mean
        lam[b] = np.conj(mean)
    return lam
