"""Factor-model wild bootstrap for cross-sectionally dependent panels.

Pipeline: center each panel at its time average, estimate the number of
common factors by the Bai-Ng information criterion, extract factors and
loadings by principal components, then resample: residuals multiplied by
serially correlated Gaussian multipliers, factors redrawn from a normal
law with the estimated long-run covariance, and the full test statistic
recomputed on each pseudo-panel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from .estimators import WeightScheme
from .panel import PanelMatrix

DEFAULT_P_MAX = 8


@dataclass(frozen=True)
class FactorFit:
    p_hat: int
    loadings: NDArray[np.float64] = field(repr=False)  # N x p_hat
    factors: NDArray[np.float64] = field(repr=False)  # T x p_hat
    residuals: NDArray[np.float64] = field(repr=False)  # N x T
    ic_values: NDArray[np.float64] = field(repr=False, default=None)


def estimate_factors(p: PanelMatrix, p_max: int = DEFAULT_P_MAX) -> FactorFit:
    """Principal-components factor fit with the factor count chosen by the
    Bai-Ng IC_p2 criterion over 0..p_max.

    Factors are sqrt(T) times the top eigenvectors of eta'eta (so that
    T^(-1) sum_t f_t f_t' = I), loadings are T^(-1) eta f.
    """
    n, t = p.n_panels, p.n_time
    if p_max > min(n, t) - 1:
        raise ValueError(f"p_max={p_max} exceeds min(N,T)-1={min(n, t) - 1}")
    eta = p.values - p.values.mean(axis=1, keepdims=True)
    gram = eta.T @ eta  # T x T
    eigvals, eigvecs = np.linalg.eigh(gram)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]

    total_ss = float(np.sum(eta**2))
    penalty = (n + t) / (n * t) * np.log(min(n, t))
    ics = np.empty(p_max + 1)
    for k in range(p_max + 1):
        # residual sum of squares after removing k components
        rss = total_ss - float(np.sum(eigvals[:k]))
        v_k = max(rss / (n * t), 1e-300)
        ics[k] = np.log(v_k) + k * penalty
    p_hat = int(np.argmin(ics))

    if p_hat == 0:
        return FactorFit(0, np.zeros((n, 0)), np.zeros((t, 0)), eta, ics)
    f = np.sqrt(t) * eigvecs[:, :p_hat]
    lam = eta @ f / t
    resid = eta - lam @ f.T
    return FactorFit(p_hat, lam, f, resid, ics)


def multiplier_bandwidth(t: int) -> float:
    """b_T = log T."""
    return float(np.log(t))


def multiplier_kernel(s) -> NDArray[np.float64]:
    """K(s) = min(2 max(0, 1-|s|), 1): flat at 1 for |s| <= 1/2, linear to
    0 at |s| = 1. A valid (trapezoidal) correlation function."""
    s = np.abs(np.asarray(s, dtype=float))
    return np.minimum(2.0 * np.maximum(0.0, 1.0 - s), 1.0)


@lru_cache(maxsize=8)
def _multiplier_spectrum(t: int):
    """Circulant square-root filter for the multiplier covariance.

    The trapezoidal kernel sampled on the integer lattice is indefinite
    (its flat top would force correlation 1 within half a bandwidth, which
    no stationary process can realize), so we use the nearest realizable
    kernel: embed on a circle of size M >= 2T, clip negative spectral
    values to zero, and rescale to unit variance. Returns (M, sqrt of the
    rfft spectrum).
    """
    bt = multiplier_bandwidth(t)
    m = 1 << max(4, int(np.ceil(np.log2(2 * t))))
    lag = np.minimum(np.arange(m), m - np.arange(m))
    c = multiplier_kernel(lag / bt)
    spec = np.clip(np.fft.rfft(c).real, 0.0, None)
    var = np.fft.irfft(spec, n=m)[0]
    return m, np.sqrt(spec / var)


def gen_multipliers(n: int, t: int, seed=None) -> NDArray[np.float64]:
    """N independent stationary Gaussian multiplier rows with unit variance
    and (near-)trapezoidal covariance K((u-v)/b_T); serial dependence dies
    out beyond lag b_T."""
    if t < 2:
        raise ValueError("need T >= 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    m, root = _multiplier_spectrum(t)
    z = rng.standard_normal((n, m))
    xi = np.fft.irfft(np.fft.rfft(z, axis=1) * root[None, :], n=m, axis=1)
    return np.ascontiguousarray(xi[:, :t])


def longrun_cov(f: NDArray[np.float64], bandwidth: int) -> NDArray[np.float64]:
    """Bartlett-kernel HAC estimate of the long-run covariance of the rows
    of the T x p matrix f, symmetrized and clipped to PSD."""
    if bandwidth < 0:
        raise ValueError("bandwidth must be >= 0")
    f = np.asarray(f, dtype=float)
    t = f.shape[0]
    fc = f - f.mean(axis=0, keepdims=True)
    cov = fc.T @ fc / t
    for j in range(1, min(bandwidth, t - 1) + 1):
        gamma_j = fc[j:].T @ fc[:-j] / t
        weight = 1.0 - j / (bandwidth + 1.0)
        cov = cov + weight * (gamma_j + gamma_j.T)
    cov = 0.5 * (cov + cov.T)
    eigvals, eigvecs = np.linalg.eigh(cov)
    return (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T


def _bootstrap_panel(
    fit: FactorFit, lr_chol: NDArray[np.float64], rng: np.random.Generator
) -> PanelMatrix:
    n, t = fit.residuals.shape
    xi = gen_multipliers(n, t, rng)
    e_star = xi * fit.residuals
    if fit.p_hat > 0:
        f_star = rng.standard_normal((t, fit.p_hat)) @ lr_chol.T
        values = fit.loadings @ f_star.T + e_star
    else:
        values = e_star
    return PanelMatrix(values)


def bootstrap_statistics(
    p: PanelMatrix,
    tests: list[tuple[WeightScheme, str, str]],
    b_reps: int,
    seed=0,
    p_max: int = DEFAULT_P_MAX,
    hac_bandwidth: int | None = None,
):
    """Observed and bootstrap-replicate normalized statistics for several
    tests sharing one set of pseudo-panels.

    ``tests`` is a list of (scheme, estimator_kind, functional) triples.
    Returns (observed array, B x len(tests) replicate matrix, diagnostics).
    """
    from .teststat import batch_statistics

    if b_reps < 1:
        raise ValueError("need at least one bootstrap replicate")
    fit = estimate_factors(p, p_max=p_max)
    if hac_bandwidth is None:
        hac_bandwidth = int(np.floor(p.n_time ** (1.0 / 3.0)))
    if fit.p_hat > 0:
        lr = longrun_cov(fit.factors, hac_bandwidth)
        # PSD clip can leave exact zeros; eigen-based square root is safe
        eigvals, eigvecs = np.linalg.eigh(lr)
        lr_chol = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    else:
        lr_chol = np.zeros((0, 0))

    observed = batch_statistics(p, tests)
    reps = np.empty((b_reps, len(tests)))
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(b_reps)
    for b, child in enumerate(children):
        star = _bootstrap_panel(fit, lr_chol, np.random.default_rng(child))
        reps[b] = batch_statistics(star, tests)
    lam_bar = float(np.sum(fit.loadings**2) / np.sqrt(p.n_panels))
    diag = {"p_hat": fit.p_hat, "lambda_bar": lam_bar, "hac_bandwidth": hac_bandwidth}
    return observed, reps, diag


def bootstrap_pvalue(
    p: PanelMatrix,
    scheme: WeightScheme,
    functional: str = "sup",
    estimator_kind: str = "hat",
    b_reps: int = 500,
    seed=0,
    p_max: int = DEFAULT_P_MAX,
    hac_bandwidth: int | None = None,
):
    """Wild-bootstrap p-value for one test: (1 + #{V*_b >= V_obs}) / (B + 1)."""
    observed, reps, diag = bootstrap_statistics(
        p, [(scheme, estimator_kind, functional)], b_reps, seed, p_max, hac_bandwidth
    )
    pval = (1.0 + float(np.sum(reps[:, 0] >= observed[0]))) / (b_reps + 1.0)
    return pval, reps[:, 0], diag
