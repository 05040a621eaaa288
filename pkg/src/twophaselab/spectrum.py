"""Far-field Jacobian of the stationary system and its spectral classification.

The stationary equations reduce to a first-order system for the deviation
(du, w, dv) = (u - u_plus, u_x, v - v_plus) from the far-field state; the
Jacobian at the origin controls how profiles can decay and therefore which
shooting strategy applies in each Mach regime.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .cubic import roots_from_invariants
from .errors import StructuralError
from .model import FarFieldData, ModelParams, RegimeLabel

# Relative tolerance used when testing eigenvalue sign patterns.
PATTERN_TOL = 1e-9


@dataclass(frozen=True)
class FarFieldJacobian:
    """3x3 linearization at the far-field equilibrium, with its invariants."""

    entries: np.ndarray
    params: ModelParams
    far: FarFieldData

    @property
    def trace(self) -> float:
        e = self.entries
        return e[0, 0] + e[1, 1] + e[2, 2]

    @property
    def second_invariant(self) -> float:
        """Sum of principal 2x2 minors (= sum of pairwise eigenvalue products)."""
        e = self.entries
        return ((e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])
                + (e[0, 0] * e[2, 2] - e[0, 2] * e[2, 0])
                + (e[1, 1] * e[2, 2] - e[1, 2] * e[2, 1]))

    @property
    def det(self) -> float:
        # cofactor expansion along the structural first row (0, 1, 0); it
        # preserves the exact cancellation of the sonic zero eigenvalue,
        # unlike a generic LU determinant
        e = self.entries
        return -(e[1, 0] * e[2, 2] - e[1, 2] * e[2, 0])


@dataclass
class SpectrumReport:
    """Eigen-decomposition of the far-field Jacobian plus regime consistency.

    lambda1/lambda2 are the paired eigenvalues (possibly complex conjugates);
    lambda3 is the distinguished real eigenvalue whose sign flips with the
    regime: negative for supersonic, positive for subsonic, zero at the sonic
    point.  invariants_check holds the relative residuals of (product, sum,
    pairwise-sum) against (det, trace, second invariant).
    """

    lambda1: complex
    lambda2: complex
    lambda3: complex
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    regime: RegimeLabel
    invariants_check: tuple = field(default=(0.0, 0.0, 0.0))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3])

    @property
    def stable(self) -> list[complex]:
        """Eigenvalues with negative real part (forward-decaying directions)."""
        scale = max(1.0, float(np.max(np.abs(self.eigenvalues))))
        return [l for l in self.eigenvalues if l.real < -PATTERN_TOL * scale]

    def to_dict(self) -> dict:
        def c(z):
            return {"re": float(np.real(z)), "im": float(np.imag(z))}

        return {
            "lambda1": c(self.lambda1),
            "lambda2": c(self.lambda2),
            "lambda3": c(self.lambda3),
            "eigenvectors": [[c(v) for v in r] for r in (self.r1, self.r2, self.r3)],
            "regime": self.regime.tag,
            "mach": self.regime.mach,
            "invariants_check": {
                "product": self.invariants_check[0],
                "sum": self.invariants_check[1],
                "pairwise_sum": self.invariants_check[2],
            },
        }


def assemble_jacobian(params: ModelParams, far: FarFieldData) -> FarFieldJacobian:
    """Exact entries of the far-field Jacobian in (du, w, dv) coordinates."""
    A1, A2, g, al, mu = params.A1, params.A2, params.gamma, params.alpha, params.mu
    rp, np_, up = far.rho_plus, far.n_plus, far.u_plus
    b_num = rp * up ** 2 - A1 * g * rp ** g
    c_num = np_ * up ** 2 - A2 * al * np_ ** al
    J = np.array([
        [0.0, 1.0, 0.0],
        [np_ / mu, b_num / (mu * up), -np_ / mu],
        [b_num / (np_ * up), -mu / np_, c_num / (np_ * up)],
    ])
    return FarFieldJacobian(entries=J, params=params, far=far)


def eigenvector(J: FarFieldJacobian, lam: complex) -> np.ndarray:
    """Eigenvector (1, lam, *) from the first two Jacobian rows.

    The first component never vanishes for this matrix structure, so the
    normalization is global.  Valid for lam = 0 as well.
    """
    mu, np_ = J.params.mu, J.far.n_plus
    B = J.entries[1, 1]
    third = -(mu / np_) * (lam * lam - B * lam - np_ / mu)
    v = np.array([1.0, lam, third], dtype=complex)
    return v


def eigen_spectrum(J: FarFieldJacobian) -> SpectrumReport:
    """Closed-form spectrum, eigenvectors, and regime-consistency check.

    Raises StructuralError when the computed sign pattern does not match the
    Mach classification; that flags a parameter set outside the regime table
    the profile solvers assume.
    """
    tr, e2, det = J.trace, J.second_invariant, J.det
    lam = roots_from_invariants(tr, e2, det)

    scale = max(1.0, float(np.max(np.abs(lam))))
    prod_res = abs(np.prod(lam) - det) / max(1.0, abs(det))
    sum_res = abs(np.sum(lam) - tr) / max(1.0, abs(tr))
    pair = lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2]
    pair_res = abs(pair - e2) / max(1.0, abs(e2))

    regime = model.classify_regime(J.params, J.far)
    tol = PATTERN_TOL * scale
    re = lam.real

    if regime.tag == model.SUPERSONIC:
        i3 = int(np.argmin(re))
        ok = re[i3] < tol and all(re[i] > -tol for i in range(3) if i != i3)
    elif regime.tag == model.SUBSONIC:
        i3 = int(np.argmax(re))
        ok = re[i3] > -tol and all(re[i] < tol for i in range(3) if i != i3)
    else:
        i3 = int(np.argmin(np.abs(lam)))
        rest = sorted(re[i] for i in range(3) if i != i3)
        ok = abs(lam[i3]) <= tol and rest[0] < tol and rest[1] > -tol
    if not ok:
        raise StructuralError(
            f"eigenvalue pattern {np.round(lam, 12)} inconsistent with "
            f"regime {regime.tag} (Mach {regime.mach:.12g})")

    others = [lam[i] for i in range(3) if i != i3]
    others.sort(key=lambda z: (-z.real, -z.imag))
    l1, l2 = others
    l3 = lam[i3]

    report = SpectrumReport(
        lambda1=l1, lambda2=l2, lambda3=l3,
        r1=eigenvector(J, l1), r2=eigenvector(J, l2), r3=eigenvector(J, l3),
        regime=regime,
        invariants_check=(float(prod_res), float(sum_res), float(pair_res)),
    )
    return report
