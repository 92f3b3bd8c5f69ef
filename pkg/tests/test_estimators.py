import numpy as np
import pytest

from panelbreak import (
    PanelMatrix,
    WeightScheme,
    check_sigma,
    check_sigma_grid,
    delta_hat,
    estimate_variances,
    kappa_hat,
    make_weights,
    sigma_hat,
)
from panelbreak.cusum import cusum_matrix, m_grid
from panelbreak.estimators import adjusted_grids, checked_squares_grid


class TestWeightScheme:
    def test_ols_ones(self):
        w = make_weights("ols", 10)
        np.testing.assert_array_equal(w.w_vec, np.ones(9))

    def test_wls_inverse_square(self):
        w = make_weights("wls", 10)
        np.testing.assert_allclose(w.w_vec, m_grid(10) ** -2)

    def test_point_tau_indicator(self):
        w = make_weights("tau", 10, tau=0.5)
        expected = np.zeros(9)
        expected[4] = 1.0  # k = floor(0.5 * 10) = 5, 1-based
        np.testing.assert_array_equal(w.w_vec, expected)

    def test_point_tau_boundary_rejected(self):
        with pytest.raises(ValueError):
            make_weights("tau", 10, tau=0.05)
        with pytest.raises(ValueError):
            make_weights("tau", 10, tau=1.5)

    def test_custom_validation(self):
        with pytest.raises(ValueError):
            make_weights("custom", 10, w_vec=np.ones(5))
        with pytest.raises(ValueError):
            make_weights("custom", 10, w_vec=-np.ones(9))
        with pytest.raises(ValueError):
            make_weights("custom", 10, w_vec=np.zeros(9))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            WeightScheme(kind="gls", t=10)

    def test_ols_eta_identity(self):
        w = make_weights("ols", 123)
        m = m_grid(123)
        direct = np.sum(m) / np.sum(m**2)
        assert abs(w.eta - direct) < 1e-12 * abs(direct)

    def test_wls_eta_log_growth(self):
        w = make_weights("wls", 10_000)
        assert 0.9 <= w.eta / (2 * np.log(10_000)) <= 1.1

    def test_labels(self):
        assert make_weights("ols", 10).label == "ols"
        assert make_weights("tau", 10, tau=0.25).label == "tau:0.25"


class TestSigmaHat:
    def test_constant_panels_zero(self):
        p = PanelMatrix(np.full((4, 12), 3.0))
        for kind in ("ols", "wls"):
            assert sigma_hat(p, make_weights(kind, 12)) == 0.0

    def test_point_tau_equals_direct_formula(self, rng):
        p = PanelMatrix(rng.standard_normal((7, 20)))
        w = make_weights("tau", 20, tau=0.5)
        z = cusum_matrix(p)
        direct = np.mean(z[:, 9] ** 2) / 0.25
        assert sigma_hat(p, w) == pytest.approx(direct, rel=1e-12)

    def test_small_instance_oracle(self):
        # N=1, T=4, PointTau(1/2): estimate is Z^2(1/2)/m(1/2) by hand
        p = PanelMatrix(np.array([[1.0, 2.0, 3.0, 4.0]]))
        w = make_weights("tau", 4, tau=0.5)
        assert sigma_hat(p, w) == pytest.approx((-1.0) ** 2 / 0.25, rel=1e-12)

    def test_normal_equation_orthogonality(self, gauss_panel, rng):
        from panelbreak.cusum import cusum_squares_mean

        z_bar = cusum_squares_mean(gauss_panel)
        for kind in ("ols", "wls"):
            w = make_weights(kind, gauss_panel.n_time)
            s2 = sigma_hat(gauss_panel, w)
            resid = z_bar - s2 * w.m_vec
            dot = np.sum(w.w_vec * w.m_vec * resid)
            scale = np.sum(w.w_vec * w.m_vec * np.abs(z_bar))
            assert abs(dot) <= 1e-10 * scale


class TestKappaHat:
    def test_constant_zero(self):
        p = PanelMatrix(np.full((4, 12), 3.0))
        assert kappa_hat(p, make_weights("ols", 12)) == 0.0

    def test_quartic_scaling(self, gauss_panel):
        w = make_weights("ols", gauss_panel.n_time)
        base = kappa_hat(gauss_panel, w)
        scaled = kappa_hat(PanelMatrix(3.0 * gauss_panel.values), w)
        assert scaled == pytest.approx(81.0 * base, rel=1e-10)

    def test_estimate_variances_bundle(self, gauss_panel):
        w = make_weights("wls", gauss_panel.n_time)
        est = estimate_variances(gauss_panel, w)
        assert est.sigma2 == pytest.approx(sigma_hat(gauss_panel, w))
        assert est.kappa2 == pytest.approx(kappa_hat(gauss_panel, w))
        assert est.sigma2 >= 0 and est.kappa2 >= 0


class TestDeltaHat:
    def test_hand_example(self):
        p = PanelMatrix(np.array([[0.0, 0.0, 1.0, 1.0]]))
        assert delta_hat(p, 0, 0.5) == pytest.approx(1.0)

    def test_exact_step_recovered(self):
        y = np.concatenate([np.full(6, 2.0), np.full(4, 5.5)])
        p = PanelMatrix(y[None, :])
        assert delta_hat(p, 0, 0.6) == pytest.approx(3.5)

    def test_constant_zero(self):
        p = PanelMatrix(np.full((1, 8), 4.0))
        assert delta_hat(p, 0, 0.5) == 0.0

    def test_u_range_checked(self, gauss_panel):
        with pytest.raises(ValueError):
            delta_hat(gauss_panel, 0, 0.001)


class TestCheckSigma:
    def test_constant_zero(self):
        p = PanelMatrix(np.full((3, 10), 1.0))
        assert check_sigma(p, 0.5) == 0.0

    def test_exact_break_u_match_kills_break_term(self):
        # pure step data: removing the estimated change at the true u
        # leaves a flat panel, so the adjusted estimate is exactly 0
        p = PanelMatrix(np.array([[0.0, 0.0, 1.0, 1.0]]))
        assert check_sigma(p, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_grid_matches_pointwise(self, gauss_panel):
        grid = check_sigma_grid(gauss_panel)
        t = gauss_panel.n_time
        for k in (1, t // 2, t - 1):
            assert grid[k - 1] == pytest.approx(check_sigma(gauss_panel, k / t))

    def test_identity_against_explicit_recentering(self, rng):
        # brute force: subtract delta_hat * step, recompute the CUSUM
        # regression directly, compare with the vectorized grid
        p = PanelMatrix(rng.standard_normal((6, 16)))
        t = p.n_time
        u_idx = 7  # u = 8/16
        y = p.values.copy()
        for i in range(p.n_panels):
            d = delta_hat(p, i, (u_idx + 1) / t)
            y[i, u_idx + 1 :] -= d
        z_check = cusum_matrix(PanelMatrix(y))
        zc_bar = np.mean(z_check**2, axis=0)
        _, m_check = adjusted_grids(t)
        mc = m_check[:, u_idx]
        direct = np.sum(mc * zc_bar) / np.sum(mc**2)
        assert check_sigma_grid(p)[u_idx] == pytest.approx(direct, rel=1e-10)

    def test_weighted_variant_runs(self, gauss_panel):
        w = make_weights("wls", gauss_panel.n_time)
        grid = check_sigma_grid(gauss_panel, w)
        assert grid.shape == (gauss_panel.n_time - 1,)
        assert np.all(np.isfinite(grid))

    def test_checked_squares_grid_diagonal(self, gauss_panel):
        # at s = u the adjusted CUSUM vanishes: Z(u) - Z(u) g(u,u)/m(u) = 0
        z = cusum_matrix(gauss_panel)
        zc = checked_squares_grid(z, gauss_panel.n_time)
        np.testing.assert_allclose(np.diag(zc), 0.0, atol=1e-12)
