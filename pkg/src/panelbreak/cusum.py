"""Grid functions and per-panel CUSUM processes.

Everything lives on the discrete grid s = k/T, k = 1..T-1; every process
involved is a step function of floor(T*s), so suprema over (0,1) are exact
maxima over this grid.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .panel import PanelMatrix

# Above this T, partial sums are accumulated in extended precision: the
# CUSUM is a difference of large partial sums.
_LONGDOUBLE_THRESHOLD = 10_000


from functools import lru_cache


@lru_cache(maxsize=32)
def m_grid(t: int) -> NDArray[np.float64]:
    """m_T(k/T) = (k/T)(1 - k/T) for k = 1..T-1."""
    if t < 3:
        raise ValueError(f"need T >= 3, got {t}")
    s = np.arange(1, t) / t
    out = s * (1.0 - s)
    out.setflags(write=False)
    return out


def g(s, t):
    """g(s,t) = (s ^ t)(1 - s v t); symmetric, 0 <= g <= 1/4."""
    s, t = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
    return np.minimum(s, t) * (1.0 - np.maximum(s, t))


def g_matrix(t: int) -> NDArray[np.float64]:
    """(T-1)x(T-1) matrix with entry (k,l) = g(k/T, l/T)."""
    s = np.arange(1, t) / t
    return g(s[:, None], s[None, :])


def cusum_matrix(p: PanelMatrix) -> NDArray[np.float64]:
    """All CUSUM paths at once: N x (T-1) matrix of Z_{i,T}(k/T).

    Z_{i,T}(k/T) = T^(-1/2) * sum_{j<=k} (Y_{i,j} - mean_i).
    """
    t = p.n_time
    dev = p.values - p.values.mean(axis=1, keepdims=True)
    if t >= _LONGDOUBLE_THRESHOLD:
        z = np.cumsum(dev.astype(np.longdouble), axis=1).astype(np.float64)
    else:
        z = np.cumsum(dev, axis=1)
    return z[:, : t - 1] / np.sqrt(t)


def cusum(p: PanelMatrix, i: int) -> NDArray[np.float64]:
    """CUSUM path of panel i (0-based index), on the grid k=1..T-1."""
    if not 0 <= i < p.n_panels:
        raise IndexError(f"panel index {i} out of range 0..{p.n_panels - 1}")
    return cusum_matrix(p)[i]


def cusum_squares_mean(p: PanelMatrix) -> NDArray[np.float64]:
    """z_bar[k] = N^(-1) * sum_i Z_{i,T}^2(k/T), k = 1..T-1."""
    z = cusum_matrix(p)
    return np.mean(z**2, axis=0)


def cusum_fourth_mean(p: PanelMatrix) -> NDArray[np.float64]:
    """N^(-1) * sum_i Z_{i,T}^4(k/T), k = 1..T-1."""
    z = cusum_matrix(p)
    return np.mean(z**4, axis=0)
