"""Empirical estimators and model diagnostics.

Covers binned correlation estimates with a factorial-moment-consistent
normalization, the truncated-drift scan used to probe the finite-window
limit fields, the labeled tail sum that tracks how much high-label mass
can reach a window, fourth-moment path regularity, and a two-sample KS
distance.

    est = estimate_rho(samples, 1, np.linspace(-4.0, 2.0, 61))
    scan = drift_truncation_scan(envs, spec, -1.0, [10.0, 20.0, 40.0])
    tail = erf_tail_sum(samples, TightnessParams(r=10, L=50, T=20, c=1, Q=1), [50, 150])
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .core import Family, ModelSpec
from .models import TruncationParams, TruncationVariant, truncated_drift_at

__all__ = [
    "CorrelationEstimate",
    "TightnessParams",
    "TruncationScan",
    "erf_fn",
    "freedman_diaconis_edges",
    "estimate_rho",
    "palm_intensity",
    "drift_truncation_scan",
    "erf_tail_sum",
    "holder_moment",
    "log_log_slope",
    "ks_distance",
]


def erf_fn(t):
    """Complementary normal tail (1/sqrt(2 pi)) int_t^inf e^(-x^2/2) dx."""
    out = 0.5 * erfc(np.asarray(t, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class CorrelationEstimate:
    """Binned intensity estimate.

    ``density`` is counts per unit volume per sample: order 1 divides by
    bin volume, order 2 by the product of the two cell volumes, so
    summing density * volume over a box reproduces the empirical
    factorial moment of that box exactly.
    """

    bins: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    n_samples: int
    stderr: np.ndarray
    order: int

    def __post_init__(self) -> None:
        if np.any(self.density < 0):
            raise ValueError("density must be nonnegative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


@dataclass(frozen=True)
class TightnessParams:
    """Window radius r, label cutoff L, horizon T, diffusion bound c, tail constant Q."""

    r: float
    L: int
    T: float
    c: float
    Q: float = 1.0

    def __post_init__(self) -> None:
        if min(self.r, self.T, self.c, self.Q) <= 0 or self.L <= 0:
            raise ValueError("all tightness parameters must be positive")


@dataclass(frozen=True)
class TruncationScan:
    r_values: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_samples: int
    variant_gap_mean: np.ndarray | None = None
    variant_gap_stderr: np.ndarray | None = None


def _points_list(samples) -> list[np.ndarray]:
    out = []
    for s in samples:
        pts = np.asarray(getattr(s, "points", s), dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        out.append(pts)
    return out


def freedman_diaconis_edges(values: np.ndarray, floor: float = 0.05) -> np.ndarray:
    """Histogram edges with the Freedman-Diaconis width, floored below."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size < 2:
        raise ValueError("need at least two values to bin")
    q75, q25 = np.quantile(v, 0.75), np.quantile(v, 0.25)
    width = max(2.0 * (q75 - q25) / v.size ** (1.0 / 3.0), floor)
    lo, hi = v[0], v[-1]
    n_bins = max(1, int(math.ceil((hi - lo) / width)))
    return lo + width * np.arange(n_bins + 1)


def estimate_rho(samples, order: int, bins=None, *, window: float | None = None) -> CorrelationEstimate:
    """Binned correlation estimate of order 1 or 2.

    1d families: order 1 bins positions, order 2 bins ordered pairs on
    the (x, y) product grid (density is then a matrix).  Planar samples:
    order 1 bins |x| into annuli, order 2 bins the separations from
    points inside the disk of radius ``window`` (required there) to
    every other point.  ``bins=None`` picks Freedman-Diaconis edges
    from the pooled data.
    """
    pts = _points_list(samples)
    if len(pts) < 1:
        raise ValueError("need at least one sample")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    dim = pts[0].shape[1]
    if any(p.shape[1] != dim for p in pts):
        raise ValueError("samples must share one dimension")
    if dim not in (1, 2):
        raise ValueError("estimators cover 1d and planar samples")
    n_samples = len(pts)

    if dim == 1:
        values = [p[:, 0] for p in pts]
        if bins is None:
            bins = freedman_diaconis_edges(np.concatenate(values))
        bins = np.asarray(bins, dtype=float)
        widths = np.diff(bins)
        if order == 1:
            counts = np.zeros(len(bins) - 1)
            for v in values:
                counts += np.histogram(v, bins)[0]
            vol = widths
        else:
            counts = np.zeros((len(bins) - 1, len(bins) - 1))
            for v in values:
                a = np.repeat(v, len(v))
                b = np.tile(v, len(v))
                keep = a != b
                counts += np.histogram2d(a[keep], b[keep], bins=(bins, bins))[0]
            vol = widths[:, None] * widths[None, :]
    else:
        radii = [np.sqrt(np.sum(p * p, axis=1)) for p in pts]
        if order == 1:
            if bins is None:
                bins = freedman_diaconis_edges(np.concatenate(radii))
            bins = np.asarray(bins, dtype=float)
            counts = np.zeros(len(bins) - 1)
            for r in radii:
                counts += np.histogram(r, bins)[0]
            vol = math.pi * np.diff(bins**2)
        else:
            if window is None:
                raise ValueError("planar order-2 estimates need a window radius")
            # window the first point only; clipping the partner too would
            # undercount large separations near the window boundary
            seps = []
            for p, r in zip(pts, radii):
                q = p[r <= window]
                if q.shape[0] >= 1 and p.shape[0] >= 2:
                    d = q[:, None, :] - p[None, :, :]
                    s = np.sqrt(np.sum(d * d, axis=2))
                    seps.append(s[s > 0.0])
            pooled = np.concatenate(seps) if seps else np.zeros(0)
            if bins is None:
                bins = freedman_diaconis_edges(pooled)
            bins = np.asarray(bins, dtype=float)
            counts = np.histogram(pooled, bins)[0].astype(float)
            vol = (math.pi * window**2) * (math.pi * np.diff(bins**2))

    density = counts / (n_samples * vol)
    stderr = np.sqrt(counts) / (n_samples * vol)
    return CorrelationEstimate(
        bins=bins, counts=counts, density=density, n_samples=n_samples, stderr=stderr, order=order
    )


def palm_intensity(pair: CorrelationEstimate, point: CorrelationEstimate, min_count: float = 10.0) -> np.ndarray:
    """Conditional intensity rho2(x, y) / rho1(x) on the shared 1d grid.

    Rows with fewer than ``min_count`` points in the conditioning bin are
    NaN (the ratio degenerates on empty bins).
    """
    if pair.order != 2 or point.order != 1:
        raise ValueError("palm_intensity expects (order-2, order-1) estimates")
    if pair.density.ndim != 2 or not np.array_equal(pair.bins, point.bins):
        raise ValueError("estimates must share one position grid")
    out = np.full_like(pair.density, np.nan)
    ok = point.counts > min_count
    out[ok, :] = pair.density[ok, :] / point.density[ok, None]
    return out


def drift_truncation_scan(env_samples, spec: ModelSpec, x, r_list) -> TruncationScan:
    """Ensemble mean and standard error of the truncated drift at x.

    For the planar family each environment is evaluated in both window
    variants; ``mean`` follows the centered one and the variant gap
    |centered - origin| is reported alongside.
    """
    envs = _points_list(env_samples)
    if len(envs) < 100:
        raise ValueError("need at least 100 environment samples")
    r_values = np.asarray(list(r_list), dtype=float)
    if r_values.size == 0 or np.any(r_values <= 0):
        raise ValueError("r_list must contain positive radii")
    planar = spec.family is Family.GINIBRE
    vals = np.empty((r_values.size, len(envs), spec.dimension))
    gaps = np.empty((r_values.size, len(envs))) if planar else None
    for k, r in enumerate(r_values):
        if planar:
            tc = TruncationParams(radius=r, variant=TruncationVariant.CENTERED)
            to = TruncationParams(radius=r, variant=TruncationVariant.ORIGIN)
        else:
            tc = TruncationParams(radius=r)
        for j, env in enumerate(envs):
            bc = truncated_drift_at(spec, x, env, tc)
            vals[k, j] = bc
            if planar:
                bo = truncated_drift_at(spec, x, env, to)
                gaps[k, j] = float(np.sqrt(np.sum((bc - bo) ** 2)))
    mean = vals.mean(axis=1)
    stderr = vals.std(axis=1, ddof=1) / math.sqrt(len(envs))
    return TruncationScan(
        r_values=r_values,
        mean=mean,
        stderr=stderr,
        n_samples=len(envs),
        variant_gap_mean=gaps.mean(axis=1) if planar else None,
        variant_gap_stderr=gaps.std(axis=1, ddof=1) / math.sqrt(len(envs)) if planar else None,
    )


def erf_tail_sum(samples, params: TightnessParams, L_list) -> np.ndarray:
    """Average over samples of sum_{i > L} Erf((|s_i| - r) / (sqrt(c) T)).

    Labels are modulus-ascending, so the sum collects the high-label
    (far) particles; it is nonincreasing in L.  Indices beyond a sample's
    particle count contribute nothing.
    """
    pts = _points_list(samples)
    if not pts:
        raise ValueError("need at least one sample")
    ls = np.asarray(list(L_list), dtype=int)
    if np.any(ls < 0):
        raise ValueError("label cutoffs must be >= 0")
    denom = math.sqrt(params.c) * params.T
    totals = np.zeros(ls.size)
    for p in pts:
        moduli = np.sort(np.sqrt(np.sum(p * p, axis=1)))
        terms = erf_fn((moduli - params.r) / denom)
        suffix = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
        totals += suffix[np.minimum(ls, len(terms))]
    return totals / len(pts)


def holder_moment(ensemble, lag_list, *, m: int | None = None, a: float = math.inf) -> np.ndarray:
    """Empirical fourth moment of increments per lag.

    Averages |X(t+lag) - X(t)|^4 over paths, the first ``m`` particles,
    and every recorded pair at that lag; paths whose max module over
    those particles exceeds ``a`` are excluded.  Lags must sit on the
    recording grid.
    """
    times, states = ensemble.times, ensemble.states
    if len(times) < 2:
        raise ValueError("ensemble has no increments")
    dt_rec = times[1] - times[0]
    n_particles = states.shape[2]
    m = n_particles if m is None else m
    if not 1 <= m <= n_particles:
        raise ValueError("m must lie in [1, particle count]")
    sel = states[:, :, :m, :]
    if math.isfinite(a):
        mods = np.sqrt(np.sum(sel * sel, axis=3)).max(axis=(1, 2))
        sel = sel[mods <= a]
        if sel.shape[0] == 0:
            raise ValueError("no path satisfies the max-module restriction")
    out = np.empty(len(list(lag_list)))
    for idx, lag in enumerate(lag_list):
        k = round(float(lag) / dt_rec)
        if abs(float(lag) - k * dt_rec) > 1e-9 * dt_rec or not 0 <= k < len(times):
            raise ValueError(f"lag {lag} is not on the recording grid")
        if k == 0:
            out[idx] = 0.0
            continue
        diff = sel[:, k:, :, :] - sel[:, :-k, :, :]
        out[idx] = float(np.mean(np.sum(diff * diff, axis=3) ** 2))
    return out


def log_log_slope(x, y) -> float:
    """Least-squares slope of log y against log x (both positive)."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValueError("need at least two points")
    design = np.column_stack([lx, np.ones_like(lx)])
    return float(np.linalg.lstsq(design, ly, rcond=None)[0][0])


def ks_distance(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    b = np.sort(np.asarray(sample_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be nonempty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
