"""Centered test processes and normalized break-detection statistics.

The plain process plugs the weighted-regression variance estimate into
V(s) = sqrt(N) * (z_bar(s) - sigma^2 m_T(s)); the change-adjusted variant
evaluates, for each candidate break point u, the process at s = u with the
u-specific adjusted variance estimate. Sup statistics are normalized by
kappa_hat, integral statistics by kappa_hat^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .cusum import cusum_matrix, m_grid
from .estimators import (
    CUSTOM,
    WeightScheme,
    check_sigma_grid,
    kappa_hat,
    sigma_hat,
)
from .panel import PanelMatrix

KAPPA_FLOOR = 1e-12


class DegenerateDataError(Exception):
    """kappa_hat^2 below floor; only (near-)constant panels reach this."""


@dataclass(frozen=True)
class TestProcess:
    values: NDArray[np.float64] = field(repr=False)
    sigma2_used: float | NDArray[np.float64]
    kind: str  # "plain" | "change-adjusted"


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    kappa: float
    normalized: float
    critical_value: float | None
    p_value: float | None
    decision: bool
    alpha: float
    metadata: dict


def v_process(p: PanelMatrix, sigma2: float, z_bar=None) -> TestProcess:
    """V(k/T) = sqrt(N) * (z_bar[k] - sigma2 * m_T(k/T)), k = 1..T-1."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    if z_bar is None:
        z_bar = np.mean(cusum_matrix(p) ** 2, axis=0)
    vals = np.sqrt(p.n_panels) * (z_bar - sigma2 * m_grid(p.n_time))
    return TestProcess(values=vals, sigma2_used=sigma2, kind="plain")


def sup_stat(tp: TestProcess) -> float:
    return float(np.max(np.abs(tp.values)))


def integral_stat(tp: TestProcess, t: int | None = None) -> float:
    """Step-function quadrature of the squared process: T^(-1) sum V(k/T)^2."""
    t = t if t is not None else tp.values.shape[0] + 1
    return float(np.sum(tp.values**2) / t)


def check_v_process(p: PanelMatrix, w: WeightScheme | None = None) -> TestProcess:
    """Change-adjusted process: V(u; sigma_check^2(u)) evaluated at s = u,
    for every u = k/T on the grid."""
    z = cusum_matrix(p)
    z_bar = np.mean(z**2, axis=0)
    sig_grid = check_sigma_grid(p, w)
    vals = np.sqrt(p.n_panels) * (z_bar - sig_grid * m_grid(p.n_time))
    return TestProcess(values=vals, sigma2_used=sig_grid, kind="change-adjusted")


def check_v_statistic(p: PanelMatrix, w: WeightScheme | None = None) -> float:
    """Sup over the u-grid of |V(u; sigma_check^2(u))|."""
    return sup_stat(check_v_process(p, w))


class _PanelWork:
    """Per-panel intermediates shared across several tests on the same data:
    the CUSUM matrix, its second/fourth-power means, and (lazily) the
    adjusted squared-CUSUM grid, which no test needs twice."""

    def __init__(self, p: PanelMatrix):
        self.t = p.n_time
        self.n = p.n_panels
        self.z = cusum_matrix(p)
        z2 = self.z**2
        self.z_bar = np.mean(z2, axis=0)
        self.z4_bar = np.mean(z2**2, axis=0)
        self._z_check = None

    @property
    def z_check(self):
        from .estimators import checked_squares_grid

        if self._z_check is None:
            self._z_check = checked_squares_grid(self.z, self.t)
        return self._z_check

    def statistic(self, scheme: WeightScheme, estimator_kind: str, functional: str):
        if estimator_kind not in ("hat", "check"):
            raise ValueError(f"unknown estimator kind {estimator_kind!r}")
        if functional not in ("sup", "integral"):
            raise ValueError(f"unknown functional {functional!r}")
        from .estimators import check_sigma_from_grid

        m = m_grid(self.t)
        m2 = m**2
        wv = scheme.w_vec
        k2 = float(np.sum(wv * m2 * self.z4_bar) / (3.0 * np.sum(wv * m2 * m2)))
        if k2 < KAPPA_FLOOR:
            raise DegenerateDataError(
                f"kappa_hat^2={k2:.3e} below floor {KAPPA_FLOOR}; data nearly constant"
            )
        if estimator_kind == "hat":
            s2 = float(np.sum(wv * m * self.z_bar) / scheme.beta2)
            vals = np.sqrt(self.n) * (self.z_bar - s2 * m)
        else:
            # OLS uses the unweighted adjusted regression; any other scheme
            # inserts its W into both quadratic forms.
            w = scheme if scheme.kind != "ols" else None
            sig_grid = check_sigma_from_grid(self.z_check, self.t, w)
            vals = np.sqrt(self.n) * (self.z_bar - sig_grid * m)
        argmax_u = None
        if functional == "sup":
            k_star = int(np.argmax(np.abs(vals)))
            stat = float(abs(vals[k_star]))
            argmax_u = (k_star + 1) / self.t
            normalized = float(stat / np.sqrt(k2))
        else:
            stat = float(np.sum(vals**2) / self.t)
            normalized = float(stat / k2)
        return stat, k2, normalized, argmax_u


def batch_statistics(p: PanelMatrix, tests) -> NDArray[np.float64]:
    """Normalized statistics for several (scheme, estimator_kind, functional)
    triples, sharing all per-panel intermediates."""
    work = _PanelWork(p)
    return np.array([work.statistic(*triple)[2] for triple in tests])


def compute_statistic(
    p: PanelMatrix,
    scheme: WeightScheme,
    estimator_kind: str = "hat",
    functional: str = "sup",
):
    """Full statistic pipeline.

    Returns (statistic, kappa2, normalized, argmax_u) where argmax_u is the
    grid point attaining the sup (diagnostic only; None for integral).
    """
    return _PanelWork(p).statistic(scheme, estimator_kind, functional)


def run_test(
    p: PanelMatrix,
    scheme: WeightScheme,
    estimator_kind: str = "hat",
    functional: str = "sup",
    calibration: str = "asymptotic",
    alpha: float = 0.05,
    seed: int = 0,
    b_reps: int = 500,
    grid_size: int = 1000,
    n_paths: int = 10_000,
    cache_dir: str | None = None,
    p_max: int = 8,
    hac_bandwidth: int | None = None,
) -> TestOutcome:
    """Run a complete break test and return the decision with provenance."""
    if calibration not in ("asymptotic", "bootstrap"):
        raise ValueError(f"unknown calibration {calibration!r}")
    stat, k2, normalized, argmax_u = compute_statistic(
        p, scheme, estimator_kind, functional
    )
    meta = {
        "scheme": scheme.label,
        "estimator": estimator_kind,
        "functional": functional,
        "calibration": calibration,
        "seed": seed,
        "n_panels": p.n_panels,
        "n_time": p.n_time,
        "argmax_u": argmax_u,
    }
    if calibration == "asymptotic":
        from .limitdist import (
            LimitKernel,
            build_crit_table,
            critical_value,
            dh_finite,
            load_or_build_crit_table,
            simulate_sup_distribution,
        )

        if estimator_kind == "check":
            # The adjusted statistic tracks the oracle-variance process
            # under the null; calibrate against the uncorrected kernel.
            table = load_or_build_crit_table(
                "oracle", None, functional, grid_size, n_paths, seed, cache_dir
            )
        elif scheme.kind == CUSTOM:
            # no closed-form limit constants: simulate from finite-T ones
            d_t, h_t = dh_finite(scheme)
            grid = np.arange(1, scheme.t) / scheme.t
            kern = LimitKernel.from_constants(grid, d_t, h_t)
            sample = simulate_sup_distribution(kern, functional, n_paths, seed)
            cv = float(np.quantile(sample, 1.0 - alpha))
            meta["grid"] = scheme.t - 1
            decision = bool(normalized > cv)
            return TestOutcome(stat, float(np.sqrt(k2)), normalized, cv, None,
                               decision, alpha, meta)
        else:
            table = load_or_build_crit_table(
                scheme.kind, scheme.tau, functional, grid_size, n_paths, seed,
                cache_dir,
            )
        cv = critical_value(table, alpha)
        meta["grid"] = table.grid_size
        meta["n_paths"] = table.n_paths
        decision = bool(normalized > cv)
        return TestOutcome(stat, float(np.sqrt(k2)), normalized, cv, None,
                           decision, alpha, meta)

    from .bootstrap import bootstrap_pvalue

    pval, _, diag = bootstrap_pvalue(
        p, scheme, functional=functional, estimator_kind=estimator_kind,
        b_reps=b_reps, seed=seed, p_max=p_max, hac_bandwidth=hac_bandwidth,
    )
    meta.update(diag)
    meta["b_reps"] = b_reps
    decision = bool(pval < alpha)
    return TestOutcome(stat, float(np.sqrt(k2)), normalized, None, pval,
                       decision, alpha, meta)
