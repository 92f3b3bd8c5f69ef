"""Seeded synthetic data generators for the simulation designs.

Error models:
  - AR1(rho): e_t = rho*e_{t-1} + eps_t, |rho| < 1
  - ARMA21 (fixed): e_t = 0.2*e_{t-1} - 0.3*e_{t-2} + eps_t + 0.2*eps_{t-1}

with eps i.i.d. standard normal. Panels are mutually independent.
Determinism contract: output depends only on (seed, parameters), never on
scheduling; innovations are drawn in a single vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .panel import BreakSpec, PanelMatrix

DEFAULT_BURN_IN = 200


@dataclass(frozen=True)
class ErrorModel:
    """Stationary error process for every panel."""

    kind: str  # "ar1" or "arma21"
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ar1", "arma21"):
            raise ValueError(f"unknown error model {self.kind!r}")
        if self.kind == "ar1" and not abs(self.rho) < 1:
            raise ValueError(f"AR(1) requires |rho| < 1, got rho={self.rho}")

    @property
    def long_run_variance(self) -> float:
        """Theoretical long-run variance (sum of MA coefficients squared)."""
        if self.kind == "ar1":
            return 1.0 / (1.0 - self.rho) ** 2
        return ((1.0 + 0.2) / (1.0 - 0.2 + 0.3)) ** 2


@dataclass(frozen=True)
class FactorSpec:
    """Common-factor structure adding lambda_i' f_t to every cell.

    ``loading_rule`` is either a scalar (same loading for every panel and
    factor coordinate) or an explicit N x p matrix.
    """

    p: int
    loading_rule: float | np.ndarray = 1.0

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("number of factors must be >= 0")

    def loadings(self, n: int) -> np.ndarray:
        if self.p == 0:
            return np.zeros((n, 0))
        if np.isscalar(self.loading_rule):
            lam = np.full((n, self.p), float(self.loading_rule))
        else:
            lam = np.asarray(self.loading_rule, dtype=np.float64)
            if lam.shape != (n, self.p):
                raise ValueError(
                    f"loading matrix shape {lam.shape} does not match (N,p)=({n},{self.p})"
                )
        if not np.all(np.isfinite(lam)):
            raise ValueError("loadings must be finite")
        return lam


def weak_loadings(n: int) -> FactorSpec:
    """lambda_i = N^(-1/2): weak cross-sectional dependence regime."""
    return FactorSpec(p=1, loading_rule=n ** (-0.5))


def strong_loadings(n: int) -> FactorSpec:
    """lambda_i = N^(-1/8): strong cross-sectional dependence regime."""
    return FactorSpec(p=1, loading_rule=n ** (-0.125))


def gen_errors(
    model: ErrorModel,
    n: int,
    t: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed=None,
) -> PanelMatrix:
    """Generate N independent stationary error series of length T."""
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((n, t + burn_in))
    if model.kind == "ar1":
        e = lfilter([1.0], [1.0, -model.rho], eps, axis=1)
    else:
        e = lfilter([1.0, 0.2], [1.0, -0.2, 0.3], eps, axis=1)
    return PanelMatrix(e[:, burn_in:])


def inject_break(p: PanelMatrix, spec: BreakSpec) -> PanelMatrix:
    """Add delta_i * I(t > t0) to panel i, with t0 = floor(theta*T)."""
    if spec.deltas.shape[0] != p.n_panels:
        raise ValueError(
            f"delta vector length {spec.deltas.shape[0]} != N={p.n_panels}"
        )
    t0 = spec.change_time(p.n_time)
    out = p.values.copy()
    out[:, t0:] += spec.deltas[:, None]
    return PanelMatrix(out)


def uniform_break_spec(
    n: int,
    theta: float = 0.5,
    low: float = -0.4,
    high: float = 0.4,
    change_fraction: float = 0.5,
    seed=None,
) -> BreakSpec:
    """Breaks of size U[low,high] in the first ceil(change_fraction*N) panels.

    Panel order is exchangeable under the DGP, so putting the changed
    panels first is statistically irrelevant and keeps replications
    reproducible.
    """
    rng = np.random.default_rng(seed)
    n_changed = int(np.ceil(change_fraction * n))
    deltas = np.zeros(n)
    deltas[:n_changed] = rng.uniform(low, high, size=n_changed)
    return BreakSpec(theta=theta, deltas=deltas)


def add_factors(p: PanelMatrix, fs: FactorSpec, seed=None):
    """Add the common-factor component lambda_i' f_t to every cell.

    Factors are i.i.d. standard normal p-vectors. Returns
    (panel, factors T x p, loadings N x p, diagnostics) where diagnostics
    holds lambda_bar = N^(-1/2) * sum ||lambda_i||^2 (the weak/strong
    dependence dial) and Q_hat = (sum ||lambda_i||^2)^(-1) sum lambda_i lambda_i'.
    """
    lam = fs.loadings(p.n_panels)
    if fs.p == 0:
        diagnostics = {"lambda_bar": 0.0, "q_hat": np.zeros((0, 0))}
        return p, np.zeros((p.n_time, 0)), lam, diagnostics
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((p.n_time, fs.p))
    out = PanelMatrix(p.values + lam @ f.T)
    norms2 = np.sum(lam**2, axis=1)
    total = float(np.sum(norms2))
    diagnostics = {
        "lambda_bar": total / np.sqrt(p.n_panels),
        "q_hat": (lam.T @ lam) / total if total > 0 else np.zeros((fs.p, fs.p)),
    }
    return out, f, lam, diagnostics
