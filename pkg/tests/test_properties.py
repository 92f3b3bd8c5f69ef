"""Property-based invariants of the statistic pipeline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from panelbreak import (
    PanelMatrix,
    check_sigma_grid,
    compute_statistic,
    cusum_matrix,
    kappa_hat,
    make_weights,
    sigma_hat,
)
from panelbreak.panel import column_means


def panels(min_n=1, max_n=6, min_t=4, max_t=12):
    shapes = st.tuples(
        st.integers(min_n, max_n), st.integers(min_t, max_t)
    )
    return shapes.flatmap(
        lambda s: hnp.arrays(
            np.float64,
            s,
            elements=st.floats(-50, 50, allow_nan=False, width=32),
        )
    ).map(PanelMatrix)


def nondegenerate(p):
    """Panels whose rows all vary, so kappa_hat stays off the floor."""
    return bool(np.all(np.ptp(p.values, axis=1) > 1e-3))


@given(panels(), st.floats(-100, 100, allow_nan=False))
def test_cusum_location_invariance(p, c):
    shifted = PanelMatrix(p.values + c)
    np.testing.assert_allclose(
        cusum_matrix(shifted), cusum_matrix(p), atol=1e-8
    )


@given(panels(), st.floats(0.1, 10))
def test_cusum_scale_equivariance(p, c):
    scaled = PanelMatrix(c * p.values)
    np.testing.assert_allclose(
        cusum_matrix(scaled), c * cusum_matrix(p), rtol=1e-9, atol=1e-9
    )


@given(panels())
def test_column_means_time_permutation_invariant(p):
    rng = np.random.default_rng(0)
    perm = rng.permutation(p.n_time)
    np.testing.assert_allclose(
        column_means(PanelMatrix(p.values[:, perm])), column_means(p)
    )


@given(panels(), st.sampled_from(["ols", "wls"]))
def test_estimator_location_invariance(p, kind):
    w = make_weights(kind, p.n_time)
    shifted = PanelMatrix(p.values + 17.5)
    assert sigma_hat(shifted, w) == pytest.approx(
        sigma_hat(p, w), rel=1e-7, abs=1e-9
    )
    assert kappa_hat(shifted, w) == pytest.approx(
        kappa_hat(p, w), rel=1e-7, abs=1e-9
    )


@given(panels(), st.floats(0.5, 4.0), st.sampled_from(["ols", "wls"]))
def test_estimator_scale_laws(p, c, kind):
    w = make_weights(kind, p.n_time)
    scaled = PanelMatrix(c * p.values)
    assert sigma_hat(scaled, w) == pytest.approx(
        c**2 * sigma_hat(p, w), rel=1e-8, abs=1e-10
    )
    assert kappa_hat(scaled, w) == pytest.approx(
        c**4 * kappa_hat(p, w), rel=1e-8, abs=1e-10
    )


@given(panels(min_n=2), st.floats(0.5, 4.0))
def test_check_sigma_scale_law(p, c):
    scaled = PanelMatrix(c * p.values)
    np.testing.assert_allclose(
        check_sigma_grid(scaled), c**2 * check_sigma_grid(p),
        rtol=1e-8, atol=1e-10,
    )


@settings(deadline=None)
@given(
    panels(min_n=2).filter(nondegenerate),
    st.floats(0.5, 4.0),
    st.sampled_from(["hat", "check"]),
    st.sampled_from(["sup", "integral"]),
)
def test_normalized_statistic_scale_invariant(p, c, estimator, functional):
    w = make_weights("ols", p.n_time)
    _, _, norm_base, _ = compute_statistic(p, w, estimator, functional)
    _, _, norm_scaled, _ = compute_statistic(
        PanelMatrix(c * p.values), w, estimator, functional
    )
    assert norm_scaled == pytest.approx(norm_base, rel=1e-6, abs=1e-8)


@settings(deadline=None)
@given(panels(min_n=2).filter(nondegenerate))
def test_statistic_panel_permutation_invariant(p):
    rng = np.random.default_rng(1)
    perm = rng.permutation(p.n_panels)
    w = make_weights("wls", p.n_time)
    base = compute_statistic(p, w)
    permuted = compute_statistic(PanelMatrix(p.values[perm]), w)
    assert permuted[2] == pytest.approx(base[2], rel=1e-9)
