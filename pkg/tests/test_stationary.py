import math

import numpy as np
import pytest

from twophaselab import (GridSpec, ModelParams, NoProfileError, RegimeError,
                         assemble_jacobian, boundary_slope_sweep,
                         center_manifold_coeff, decay_report, eigen_spectrum,
                         far_field_from_plus, solve_stationary)
from twophaselab.spectrum import SpectrumReport
from twophaselab.stationary import (_stable_basis, center_reduction,
                                    domain_length)


def base():
    return ModelParams(A1=1.0, A2=1.0, gamma=1.0, alpha=1.0, mu=1.0)


def physical_residual(profile, params, far, refine=2):
    """Independent oracle: fourth-order defect of the first-order system in
    the physical velocity variables, plain arithmetic throughout."""
    A1, A2, g, al, mu = params.A1, params.A2, params.gamma, params.alpha, params.mu
    up = far.u_plus
    K1, K2 = far.rho_plus * up, far.n_plus * up
    C1, C2 = A1 * K1 ** g, A2 * K2 ** al
    n_fine = refine * (profile.x.size - 1) + 1
    xf = np.linspace(profile.x[0], profile.x[-1], n_fine)
    z = profile.dense(xf)
    u = up + z[0]
    w = z[1]
    v = up + z[2]
    h = xf[1] - xf[0]

    def d4(y):
        return (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)

    f1 = w
    f2 = ((K1 - g * C1 * u ** (-g - 1.0)) * w - (K2 / v) * (v - u)) / mu
    Q = (K1 * (u - up) + C1 * (u ** (-g) - up ** (-g))
         + K2 * (v - up) + C2 * (v ** (-al) - up ** (-al)))
    f3 = (v / K2) * (Q - mu * w)
    res = np.array([d4(u) - f1[2:-2], d4(w) - f2[2:-2], d4(v) - f3[2:-2]])
    scale = np.array([[max(np.max(np.abs(f1)), 1e-30)],
                      [max(np.max(np.abs(f2)), 1e-30)],
                      [max(np.max(np.abs(f3)), 1e-30)]])
    return float(np.max(np.abs(res) / scale))


class TestConstantProfile:
    def test_delta_zero_is_fixed_point(self):
        far = far_field_from_plus(1.0, 1.0, 2.0, 2.0)
        prof = solve_stationary(base(), far, GridSpec(n_nodes=128))
        assert prof.residual_norm == 0.0
        np.testing.assert_array_equal(prof.u, np.full(128, 2.0))
        np.testing.assert_array_equal(prof.rho, np.ones(128))
        assert prof.slope0 == (0.0, 0.0)

    def test_trivial_decay_report(self):
        far = far_field_from_plus(1.0, 1.0, 2.0, 2.0)
        prof = solve_stationary(base(), far, GridSpec(n_nodes=128))
        spec = eigen_spectrum(assemble_jacobian(base(), far))
        rep = decay_report(prof, spec)
        assert rep.trivial
        assert rep.rate is None


@pytest.fixture(scope="module")
def subsonic_profile(subsonic_far):
    return solve_stationary(base(), subsonic_far, GridSpec())


@pytest.fixture(scope="module")
def sonic_bundle(sonic_far):
    params = base()
    prof = solve_stationary(params, sonic_far, GridSpec())
    spec = eigen_spectrum(assemble_jacobian(params, sonic_far))
    cm = center_manifold_coeff(params, sonic_far)
    return prof, spec, cm


class TestSubsonicProfile:
    @pytest.fixture()
    def profile(self, subsonic_profile):
        return subsonic_profile

    def test_boundary_matching(self, profile):
        assert max(profile.boundary_mismatch) <= 1e-8

    def test_flux_constancy(self, profile):
        assert max(profile.flux_defects()) <= 1e-8

    def test_positivity(self, profile):
        assert np.min(profile.rho) > 0 and np.min(profile.n) > 0

    def test_independent_residual(self, profile, subsonic_far):
        assert physical_residual(profile, base(), subsonic_far) <= 1e-6

    def test_tail_flat(self, profile, subsonic_far):
        up = subsonic_far.u_plus
        assert abs(profile.u[-1] - up) <= 1e-8 * up
        assert abs(profile.v[-1] - up) <= 1e-8 * up

    def test_exponential_tail_rate(self, profile, subsonic_far):
        spec = eigen_spectrum(assemble_jacobian(base(), subsonic_far))
        rep = decay_report(profile, spec)
        assert rep.model_selected == "exponential"
        assert rep.rate_rel_err <= 0.05
        assert rep.r_squared >= 0.99
        # fitted constant of the pointwise amplitude bound stays order one
        assert 0.0 < rep.amplitude_bound < 1e3

    def test_increasing_grid(self, profile):
        assert np.all(np.diff(profile.x) > 0)
        assert profile.x[0] == 0.0


class TestSupersonicObstruction:
    def test_v_boundary_unreachable(self, supersonic_far):
        # the single decaying direction has opposite-sign u and v components,
        # so matching u(0) leaves |v(0) - u_minus| at about 2*delta
        with pytest.raises(NoProfileError) as err:
            solve_stationary(base(), supersonic_far, GridSpec(n_nodes=512))
        assert err.value.mismatch is not None
        du_mis, dv_mis = err.value.mismatch
        assert du_mis <= 1e-8
        assert dv_mis == pytest.approx(2e-3, rel=0.05)

    def test_stable_eigenvector_sign_structure(self, supersonic_far):
        spec = eigen_spectrum(assemble_jacobian(base(), supersonic_far))
        r = spec.r3.real  # the decaying direction
        assert r[0] * r[2] < 0

    def test_forcing_supersonic_on_sonic_data_also_obstructed(self, sonic_far):
        with pytest.raises(NoProfileError):
            solve_stationary(base(), sonic_far, GridSpec(n_nodes=256),
                             force_regime="Supersonic")


class TestSonicProfile:
    @pytest.fixture()
    def bundle(self, sonic_bundle):
        return sonic_bundle

    def test_boundary_matching(self, bundle):
        prof, _, _ = bundle
        assert max(prof.boundary_mismatch) <= 1e-8

    def test_flux_constancy(self, bundle):
        prof, _, _ = bundle
        assert max(prof.flux_defects()) <= 1e-8

    def test_monotone_velocities(self, bundle):
        prof, _, _ = bundle
        assert np.min(np.diff(prof.u)) >= -1e-10
        assert np.min(np.diff(prof.v)) >= -1e-10

    def test_neutral_coordinate_negative(self, bundle):
        prof, spec, _ = bundle
        P = np.column_stack([spec.r1.real, spec.r2.real, spec.r3.real])
        up = prof.far.u_plus
        z3 = np.linalg.solve(P, np.vstack([prof.u - up, prof.w, prof.v - up]))[2]
        assert np.all(z3 < 0)

    def test_reciprocal_slope_matches_quadratic_coefficient(self, bundle):
        prof, spec, cm = bundle
        rep = decay_report(prof, spec, cm=cm)
        assert rep.recip_slope_rel_err <= 0.10
        assert abs(rep.loglog_exponent - (-1.0)) <= 0.10
        assert 0.0 < rep.amplitude_bound < 1e3

    def test_sigma0_recorded_negative(self, bundle):
        prof, _, _ = bundle
        assert prof.shooting_params["sigma0"] < 0

    def test_domain_policy(self, bundle, sonic_far):
        prof, _, _ = bundle
        assert prof.x[-1] == pytest.approx(40.0 / sonic_far.delta)


class TestCenterManifoldCoefficient:
    def test_symmetric_sample(self):
        far = far_field_from_plus(1.0, 1.0, 1.0, 1.0)
        cm = center_manifold_coeff(base(), far)
        assert cm.b == 0.0
        assert cm.a == pytest.approx(1.0, abs=1e-15)

    def test_hand_value_with_quadratic_phase1(self):
        # gamma=2, alpha=1, A1 chosen so the state is sonic at u+=1:
        # c+^2 = (2*A1 + 1)/2 = 1 forces A1 = 1/2; then b = 0 and
        # a = (0.5*2*3 + 1*1*2) / (2*1*2*1) = 1.25 by hand
        params = ModelParams(A1=0.5, A2=1.0, gamma=2.0, alpha=1.0, mu=1.0)
        far = far_field_from_plus(1.0, 1.0, 1.0, 1.0)
        cm = center_manifold_coeff(params, far)
        assert cm.b == pytest.approx(0.0, abs=1e-15)
        assert cm.a == pytest.approx(1.25, abs=1e-12)

    def test_positive_for_random_sonic_states(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            A1, A2 = np.exp(rng.uniform(np.log(0.2), np.log(5.0), 2))
            g, al = rng.uniform(1.0, 3.0, 2)
            mu = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
            rp, np_ = np.exp(rng.uniform(np.log(0.2), np.log(5.0), 2))
            # solve u+ = c+ for u_plus
            params = ModelParams(A1=float(A1), A2=float(A2), gamma=float(g),
                                 alpha=float(al), mu=mu)
            c = math.sqrt((A1 * g * rp ** g + A2 * al * np_ ** al) / (rp + np_))
            far = far_field_from_plus(float(rp), float(np_), c, c)
            cm = center_manifold_coeff(params, far)
            assert cm.a > 0

    def test_non_sonic_rejected(self, subsonic_far):
        with pytest.raises(RegimeError):
            center_manifold_coeff(base(), subsonic_far)

    def test_projection_agrees_with_closed_form(self):
        params = ModelParams(A1=0.5, A2=1.0, gamma=2.0, alpha=1.0, mu=1.0)
        far = far_field_from_plus(1.0, 1.0, 1.0, 1.0)
        J = assemble_jacobian(params, far)
        _, a_proj, _ = center_reduction(params, far, J)
        cm = center_manifold_coeff(params, far)
        assert a_proj == pytest.approx(cm.a, rel=1e-8)


class TestNonUnitExponents:
    def test_subsonic_profile_general_pressure_laws(self):
        params = ModelParams(A1=1.0, A2=1.0, gamma=1.4, alpha=2.0, mu=0.7)
        far = far_field_from_plus(1.2, 0.8, 0.5, 0.499)
        prof = solve_stationary(params, far, GridSpec())
        assert max(prof.boundary_mismatch) <= 1e-8
        assert max(prof.flux_defects()) <= 1e-8
        assert physical_residual(prof, params, far) <= 1e-6

    def test_asymmetric_sonic_profile(self):
        # mixture sound speed sqrt(1.5) with unequal pressure coefficients:
        # nonzero skew constant and a genuine decaying boundary layer
        params = ModelParams(A1=1.0, A2=2.0, gamma=1.0, alpha=1.0, mu=1.0)
        up = math.sqrt(1.5)
        far = far_field_from_plus(1.0, 1.0, up, up - 1e-3)
        cm = center_manifold_coeff(params, far)
        assert cm.b == pytest.approx(0.5 / math.sqrt(3.0), rel=1e-12)
        prof = solve_stationary(params, far, GridSpec(n_nodes=2048))
        assert prof.shooting_params["s_hat"] != 0.0
        assert max(prof.boundary_mismatch) <= 1e-8
        assert np.min(np.diff(prof.u)) >= -1e-10
        spec = eigen_spectrum(assemble_jacobian(params, far))
        rep = decay_report(prof, spec, cm=cm)
        assert rep.recip_slope_rel_err <= 0.10
        assert abs(rep.loglog_exponent - (-1.0)) <= 0.10


class TestDomainPolicy:
    def test_exponential_truncation(self, subsonic_far):
        spec = eigen_spectrum(assemble_jacobian(base(), subsonic_far))
        m_slow = min(-l.real for l in spec.stable)
        assert domain_length(subsonic_far, spec) == max(50.0, 12.0 / m_slow)

    def test_explicit_override(self, subsonic_far):
        prof = solve_stationary(base(), subsonic_far, GridSpec(n_nodes=256, L=80.0))
        assert prof.x[-1] == 80.0


class TestStableBasis:
    def test_synthetic_complex_pair(self):
        # no sampled parameter set produced a complex pair, so the pair
        # handling is exercised with a synthetic spectrum
        lam = complex(-1.0, 2.0)
        r = np.array([1.0 + 0.0j, lam, 0.5 - 0.25j])
        spec = SpectrumReport(lambda1=lam, lambda2=lam.conjugate(),
                              lambda3=3.0 + 0.0j, r1=r, r2=r.conjugate(),
                              r3=np.array([1.0, 3.0, 0.0], dtype=complex),
                              regime=None)
        basis_at, npar, m_slow, m_fast = _stable_basis(spec)
        assert npar == 2
        assert m_slow == pytest.approx(1.0)
        assert m_fast == pytest.approx(1.0)
        B = basis_at(0.7)
        e = r * np.exp(lam * 0.7)
        np.testing.assert_allclose(B[:, 0], e.real, rtol=1e-14)
        np.testing.assert_allclose(B[:, 1], e.imag, rtol=1e-14)


class TestBisectionFallback:
    def test_scalar_bracketing_root(self):
        from twophaselab.stationary import _bisect_scalar

        target = -1e-3  # mismatch(0) = -target > 0 by construction
        mismatch = lambda a: np.array([math.tanh(3.0 * a[0]) - target])
        root, F = _bisect_scalar(mismatch, -1e-5, target)
        assert F is not None and abs(F[0]) < 1e-9
        assert root == pytest.approx(math.atanh(target) / 3.0, rel=1e-4)

    def test_unbracketable_reports_failure(self):
        from twophaselab.stationary import _bisect_scalar

        mismatch = lambda a: np.array([1.0 + a[0] ** 2])  # never crosses zero
        root, F = _bisect_scalar(mismatch, 1e-3, -1.0)
        assert F is None


class TestBoundarySlopeSweep:
    def test_zero_delta_row_exact(self, base_params):
        far = far_field_from_plus(1.0, 1.0, 0.5, 0.5)
        res = boundary_slope_sweep(base_params, far, [0.0, 1e-3],
                                   GridSpec(n_nodes=256))
        assert res.rows[0].ux0 == 0.0 and res.rows[0].vx0 == 0.0

    def test_halving_delta_roughly_halves_slope(self, base_params):
        far = far_field_from_plus(1.0, 1.0, 0.5, 0.5)
        res = boundary_slope_sweep(base_params, far, [1e-3, 5e-4],
                                   GridSpec(n_nodes=256))
        r1, r2 = res.rows
        assert r2.ux0 == pytest.approx(0.5 * r1.ux0, rel=0.05)
        assert 0.9 <= res.exponent <= 1.1

    def test_ratio_uniformly_bounded(self, base_params):
        far = far_field_from_plus(1.0, 1.0, 0.5, 0.5)
        deltas = list(np.logspace(-4, -2, 5))
        res = boundary_slope_sweep(base_params, far, deltas, GridSpec(n_nodes=512))
        ratios = [r.ux0 / r.delta for r in res.rows]
        assert max(ratios) <= 2.0 * min(ratios)

    def test_failing_rows_recorded(self, base_params):
        far = far_field_from_plus(1.0, 1.0, 2.0, 2.0)  # supersonic base
        res = boundary_slope_sweep(base_params, far, [1e-3, 1e-4],
                                   GridSpec(n_nodes=256))
        assert all(r.error is not None for r in res.rows)
        assert res.exponent is None
