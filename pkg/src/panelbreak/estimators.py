"""Weighted-regression nuisance estimators.

The cross-sectional mean of squared CUSUMs is regressed on m_T(.) with
diagonal weights W to estimate the mean long-run variance sigma_bar^2;
fourth powers regressed on m_T^2 estimate kappa_bar^2 = mean of sigma_i^4.
The design matrix is a single column, so every fit reduces to weighted dot
products accumulated in O(T).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from .cusum import cusum_matrix, cusum_squares_mean, cusum_fourth_mean, g, m_grid
from .panel import PanelMatrix

OLS = "ols"
WLS = "wls"
POINT_TAU = "tau"
CUSTOM = "custom"


@dataclass(frozen=True)
class WeightScheme:
    """Nonnegative regression weights w over the grid k=1..T-1.

    Derived quantities:
      beta2   = m' W m
      eta     = m' w / beta2          (leverage ratio; admissible schemes
                                       need eta = o(T / sqrt(N)))
      eta_dd  = m2' w / (m2' W m2), with m2[k] = m_T(k/T)^2
    """

    kind: str
    t: int
    tau: float | None = None
    w_vec: NDArray[np.float64] = field(repr=False, default=None)

    def __post_init__(self):
        m = m_grid(self.t)
        if self.kind == OLS:
            w = np.ones(self.t - 1)
        elif self.kind == WLS:
            w = m**-2
        elif self.kind == POINT_TAU:
            if self.tau is None or not 0.0 < self.tau < 1.0:
                raise ValueError(f"PointTau requires tau in (0,1), got {self.tau}")
            k = int(np.floor(self.tau * self.t))
            if not 1 <= k <= self.t - 1:
                raise ValueError(
                    f"tau={self.tau} too close to the boundary for T={self.t}"
                )
            w = np.zeros(self.t - 1)
            w[k - 1] = 1.0
        elif self.kind == CUSTOM:
            w = np.asarray(self.w_vec, dtype=np.float64)
            if w.shape != (self.t - 1,):
                raise ValueError(f"custom weights must have length T-1={self.t - 1}")
            if np.any(w < 0) or not np.any(w > 0):
                raise ValueError("weights must be nonnegative and not all zero")
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        w.setflags(write=False)
        object.__setattr__(self, "w_vec", w)

    @property
    def m_vec(self) -> NDArray[np.float64]:
        return m_grid(self.t)

    @property
    def beta2(self) -> float:
        m = self.m_vec
        return float(np.sum(self.w_vec * m * m))

    @property
    def eta(self) -> float:
        return float(np.sum(self.m_vec * self.w_vec)) / self.beta2

    @property
    def eta_dd(self) -> float:
        m2 = self.m_vec**2
        return float(np.sum(m2 * self.w_vec) / np.sum(self.w_vec * m2 * m2))

    @property
    def label(self) -> str:
        if self.kind == POINT_TAU:
            return f"tau:{self.tau:g}"
        return self.kind


def make_weights(kind: str, t: int, tau: float | None = None, w_vec=None) -> WeightScheme:
    """Build one of the named weight schemes (or a custom vector)."""
    return WeightScheme(kind=kind, t=t, tau=tau, w_vec=w_vec)


@dataclass(frozen=True)
class VarianceEstimate:
    sigma2: float
    kappa2: float
    scheme: WeightScheme


def sigma_hat(p: PanelMatrix, w: WeightScheme, z_bar=None) -> float:
    """WLS slope of z_bar on m: estimator of the mean long-run variance.

    For a point-mass weight at floor(tau*T) this reduces exactly to
    N^(-1) * sum_i Z_i^2(tau) / m_T(tau).
    """
    if z_bar is None:
        z_bar = cusum_squares_mean(p)
    m = w.m_vec
    return float(np.sum(w.w_vec * m * z_bar) / w.beta2)


def kappa_hat(p: PanelMatrix, w: WeightScheme, z4_bar=None) -> float:
    """WLS slope of fourth-power means on m^2, divided by 3: kappa_bar^2 estimate."""
    if z4_bar is None:
        z4_bar = cusum_fourth_mean(p)
    m2 = w.m_vec**2
    return float(np.sum(w.w_vec * m2 * z4_bar) / (3.0 * np.sum(w.w_vec * m2 * m2)))


def estimate_variances(p: PanelMatrix, w: WeightScheme) -> VarianceEstimate:
    z = cusum_matrix(p)
    z_bar = np.mean(z**2, axis=0)
    z4_bar = np.mean(z**4, axis=0)
    return VarianceEstimate(
        sigma2=sigma_hat(p, w, z_bar=z_bar),
        kappa2=kappa_hat(p, w, z4_bar=z4_bar),
        scheme=w,
    )


def delta_hat(p: PanelMatrix, i: int, u: float) -> float:
    """Estimated size of a change at floor(T*u) in panel i:
    mean after the split minus mean up to the split (exact integer split)."""
    t = p.n_time
    k = int(np.floor(t * u))
    if not 1 <= k <= t - 1:
        raise ValueError(f"u={u} gives split {k} outside 1..{t - 1}")
    y = p.values[i]
    return float(np.mean(y[k:]) - np.mean(y[:k]))


@lru_cache(maxsize=8)
def adjusted_grids(t: int):
    """Grids for the change-adjusted regression, indexed [k, u]:
    ratio = g(k/T,u)/m_T(u) and the regressor m_check = m_T(k/T) - g^2/m_T(u)."""
    m = m_grid(t)
    s = np.arange(1, t) / t
    gg = g(s[:, None], s[None, :])
    ratio = gg / m[None, :]
    m_check = m[:, None] - gg * ratio
    ratio.setflags(write=False)
    m_check.setflags(write=False)
    return ratio, m_check


def checked_squares_grid(z: NDArray[np.float64], t: int) -> NDArray[np.float64]:
    """z_check[k,j] = N^(-1) sum_i Zcheck_i(k/T, j/T)^2 for all grid pairs,
    from the precomputed CUSUM matrix z (N x (T-1)).

    Uses the identity Zcheck_i(s,u) = Z_i(s) - Z_i(u) g(s,u)/m(u), which
    follows from delta_hat_i(u) = -Z_i(u) / (sqrt(T) m_T(u)) and linearity
    of the CUSUM map. Cost: one N x (T-1)^2 cross-product.
    """
    n = z.shape[0]
    ratio, _ = adjusted_grids(t)
    z_bar = np.mean(z**2, axis=0)
    cross = (z.T @ z) / n  # A[k,j] = N^-1 sum_i Z_i(k) Z_i(j)
    return z_bar[:, None] - 2.0 * ratio * cross + ratio**2 * z_bar[None, :]


def check_sigma_from_grid(
    z_check: NDArray[np.float64], t: int, w: WeightScheme | None = None
) -> NDArray[np.float64]:
    """Weighted slope of the adjusted regression for every u on the grid."""
    _, m_check = adjusted_grids(t)
    if w is None:
        num = np.sum(m_check * z_check, axis=0)
        den = np.sum(m_check**2, axis=0)
    else:
        wv = w.w_vec[:, None]
        num = np.sum(wv * m_check * z_check, axis=0)
        den = np.sum(wv * m_check**2, axis=0)
    if np.any(den <= 0):
        raise AssertionError("degenerate adjusted regressor; cannot occur for T >= 3")
    return num / den


def check_sigma_grid(p: PanelMatrix, w: WeightScheme | None = None) -> NDArray[np.float64]:
    """Change-adjusted variance estimates sigma_check^2(u) on the whole
    u-grid u = j/T, j = 1..T-1.

    Regresses the adjusted squared-CUSUM means on the adjusted regressor
    m_T(k/T) - g^2(k/T,u)/m_T(u). The unweighted (OLS) form follows the
    construction for the plain regression; passing a WeightScheme inserts
    W into both quadratic forms (weighted generalization).
    """
    t = p.n_time
    z_check = checked_squares_grid(cusum_matrix(p), t)
    return check_sigma_from_grid(z_check, t, w)


def check_sigma(p: PanelMatrix, u: float, w: WeightScheme | None = None) -> float:
    """sigma_check^2(u) at a single u in (0,1)."""
    t = p.n_time
    k = int(np.floor(t * u))
    if not 1 <= k <= t - 1:
        raise ValueError(f"u={u} gives split {k} outside 1..{t - 1}")
    return float(check_sigma_grid(p, w)[k - 1])
