"""Limit-null covariance kernel, Gaussian path simulation, critical values.

The centered test process converges (after kappa-normalization) to a
zero-mean Gaussian process with covariance

    gamma(s,t | D,h) = 2 { g^2(s,t) - h(s)m(t) - h(t)m(s) + D m(s)m(t) },

where D and h depend on the weight scheme. Closed forms exist for the
named schemes; finite-T counterparts D_T, h_T are quadratic forms in the
weights, evaluated here in O(T) via prefix sums (the g^2 matrix is never
materialized).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .cusum import g, m_grid
from .estimators import OLS, POINT_TAU, WLS, WeightScheme

STANDARD_ALPHAS = (0.20, 0.15, 0.10, 0.05, 0.025, 0.01)

CACHE_VERSION = 1


class KernelNotPSDError(Exception):
    """Kernel matrix not positive semi-definite even after jitter escalation."""


def dh_closed(kind: str, tau: float | None = None):
    """Closed-form limit constants (D, h) for the named weight schemes."""
    if kind == OLS:
        d = 13.0 / 28.0

        def h(s):
            ms = np.asarray(s) * (1.0 - np.asarray(s))
            return 1.5 * ms**2 * (1.0 + 2.0 * ms)

    elif kind == WLS:
        d = np.pi**2 / 3.0 - 3.0

        def h(s):
            s = np.asarray(s, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = -(
                    s**2 * np.log(s)
                    + (1.0 - s) ** 2 * np.log(1.0 - s)
                    + s * (1.0 - s)
                )
            return np.where((s <= 0) | (s >= 1), 0.0, val)

    elif kind == "oracle":
        # Kernel of the test process with a known variance plugged in:
        # no estimation-effect correction terms.
        d = 0.0

        def h(s):
            return np.zeros_like(np.asarray(s, dtype=float))

    elif kind == POINT_TAU:
        if tau is None or not 0.0 < tau < 1.0:
            raise ValueError("PointTau requires tau in (0,1)")
        d = 1.0
        m_tau = tau * (1.0 - tau)

        def h(s):
            return g(s, tau) ** 2 / m_tau

    else:
        raise ValueError(f"no closed-form limit constants for kind {kind!r}")
    return d, h


def dh_finite(w: WeightScheme):
    """Finite-T constants (D_T, h_T on the grid k=1..T-1) for any scheme.

    Both reduce to v[k] = sum_l g^2(k/T,l/T) w_l m_l, which splits into a
    prefix and a suffix sum because g factorizes on either side of the
    diagonal.
    """
    t = w.t
    s = np.arange(1, t) / t
    m = w.m_vec
    wm = w.w_vec * m
    a = s**2 * wm  # contribution of l <= k
    b = (1.0 - s) ** 2 * wm  # contribution of l > k
    prefix = np.cumsum(a)
    suffix = np.concatenate([np.cumsum(b[::-1])[::-1][1:], [0.0]])
    v = (1.0 - s) ** 2 * prefix + s**2 * suffix
    beta2 = w.beta2
    d_t = float(np.sum(w.w_vec * m * v) / beta2**2)
    h_t = v / beta2
    return d_t, h_t


def kernel_matrix(
    grid: NDArray[np.float64], d: float, h_vals: NDArray[np.float64]
) -> NDArray[np.float64]:
    """gamma(s,t | D,h) evaluated on grid x grid."""
    m = grid * (1.0 - grid)
    gg = g(grid[:, None], grid[None, :])
    return 2.0 * (
        gg**2
        - h_vals[:, None] * m[None, :]
        - h_vals[None, :] * m[:, None]
        + d * m[:, None] * m[None, :]
    )


@dataclass(frozen=True)
class LimitKernel:
    """Discretized limit kernel with its Cholesky factor for path simulation."""

    grid: NDArray[np.float64]
    d: float
    h_vals: NDArray[np.float64]
    gamma: NDArray[np.float64] = field(repr=False, default=None)
    chol: NDArray[np.float64] = field(repr=False, default=None)

    @classmethod
    def build(cls, kind: str, tau: float | None = None, grid_size: int = 1000):
        """Kernel for a named scheme from its closed-form constants."""
        grid = np.arange(1, grid_size + 1) / (grid_size + 1)
        d, h = dh_closed(kind, tau)
        return cls.from_constants(grid, d, h(grid))

    @classmethod
    def from_constants(cls, grid, d, h_vals):
        gamma = kernel_matrix(np.asarray(grid, float), d, np.asarray(h_vals, float))
        chol = _stable_cholesky(gamma)
        return cls(grid=np.asarray(grid, float), d=d, h_vals=np.asarray(h_vals, float),
                   gamma=gamma, chol=chol)


def _stable_cholesky(gamma: NDArray[np.float64]) -> NDArray[np.float64]:
    """Lower Cholesky factor with escalating diagonal jitter (3 retries)."""
    scale = float(np.max(np.diag(gamma)))
    for jitter in (0.0, 1e-13 * scale, 1e-12 * scale, 1e-11 * scale):
        try:
            return np.linalg.cholesky(gamma + jitter * np.eye(gamma.shape[0]))
        except np.linalg.LinAlgError:
            continue
    min_eig = float(np.linalg.eigvalsh(gamma)[0])
    raise KernelNotPSDError(
        f"kernel not PSD after jitter escalation; minimum eigenvalue {min_eig:.3e}"
    )


def simulate_sup_distribution(
    k: LimitKernel, functional: str = "sup", n_paths: int = 10_000, seed=None
) -> NDArray[np.float64]:
    """i.i.d. draws of sup_s |G(s)| (or the quadrature integral of G^2)."""
    if functional not in ("sup", "integral"):
        raise ValueError(f"unknown functional {functional!r}")
    rng = np.random.default_rng(seed)
    gsize = k.grid.shape[0]
    out = np.empty(n_paths)
    # chunked so memory stays bounded for large n_paths
    chunk = max(1, min(n_paths, 2000))
    pos = 0
    while pos < n_paths:
        b = min(chunk, n_paths - pos)
        paths = k.chol @ rng.standard_normal((gsize, b))
        if functional == "sup":
            out[pos : pos + b] = np.max(np.abs(paths), axis=0)
        else:
            out[pos : pos + b] = np.sum(paths**2, axis=0) / (gsize + 1)
        pos += b
    return out


@dataclass(frozen=True)
class CritTable:
    """Simulated quantiles of the limit functional for one weight scheme."""

    kind: str
    tau: float | None
    functional: str
    grid_size: int
    n_paths: int
    seed: int
    quantiles: dict  # alpha -> critical value (the empirical 1-alpha quantile)

    def to_dict(self) -> dict:
        return {
            "version": CACHE_VERSION,
            "kind": self.kind,
            "tau": self.tau,
            "functional": self.functional,
            "grid": self.grid_size,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "quantiles": {f"{a:g}": v for a, v in self.quantiles.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CritTable":
        return cls(
            kind=d["kind"],
            tau=d["tau"],
            functional=d["functional"],
            grid_size=d["grid"],
            n_paths=d["n_paths"],
            seed=d["seed"],
            quantiles={float(a): v for a, v in d["quantiles"].items()},
        )


def build_crit_table(
    kind: str,
    tau: float | None = None,
    functional: str = "sup",
    grid_size: int = 1000,
    n_paths: int = 10_000,
    seed: int = 0,
    alphas=STANDARD_ALPHAS,
) -> CritTable:
    kern = LimitKernel.build(kind, tau, grid_size)
    sample = simulate_sup_distribution(kern, functional, n_paths, seed)
    qs = {a: float(np.quantile(sample, 1.0 - a)) for a in alphas}
    return CritTable(
        kind=kind, tau=tau, functional=functional, grid_size=grid_size,
        n_paths=n_paths, seed=seed, quantiles=qs,
    )


def critical_value(table: CritTable, alpha: float) -> float:
    """(1-alpha) quantile, interpolated linearly between stored levels."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    levels = sorted(table.quantiles)
    if alpha in table.quantiles:
        return table.quantiles[alpha]
    if alpha < levels[0] or alpha > levels[-1]:
        raise KeyError(
            f"alpha={alpha} outside tabulated levels [{levels[0]}, {levels[-1]}]"
        )
    vals = [table.quantiles[a] for a in levels]
    return float(np.interp(alpha, levels, vals))


def _cache_key(kind, tau, functional, grid_size, n_paths, seed) -> str:
    tau_part = "none" if tau is None else f"{tau:g}"
    return f"{kind}_{tau_part}_{functional}_g{grid_size}_p{n_paths}_s{seed}"


def default_cache_dir() -> str:
    base = os.environ.get("PANELBREAK_CACHE", None)
    if base is None:
        base = os.path.join(
            os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")),
            "panelbreak",
        )
    return base


def load_or_build_crit_table(
    kind: str,
    tau: float | None = None,
    functional: str = "sup",
    grid_size: int = 1000,
    n_paths: int = 10_000,
    seed: int = 0,
    cache_dir: str | None = None,
) -> CritTable:
    """Fetch a cached table or simulate and cache it (atomic write)."""
    cache_dir = cache_dir or default_cache_dir()
    key = _cache_key(kind, tau, functional, grid_size, n_paths, seed)
    path = os.path.join(cache_dir, key + ".json")
    if os.path.exists(path):
        with open(path) as fh:
            payload = json.load(fh)
        if payload.get("version") == CACHE_VERSION:
            return CritTable.from_dict(payload)
    table = build_crit_table(kind, tau, functional, grid_size, n_paths, seed)
    os.makedirs(cache_dir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(table.to_dict(), fh, indent=1)
    os.replace(tmp, path)
    return table
