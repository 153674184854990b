"""Desk-scale acceptance checks, one per release criterion.

Every check freezes its seeds and tolerances, so a pass is reproducible
bit for bit; ``run_all`` executes them in registry order and returns one
``CheckResult`` per check.  The heavy SDE checks take a few minutes each;
the whole suite runs in under ten minutes on one core.

Usage:
    from ibrownian.acceptance import CHECKS, run_all

    for res in run_all():
        print(res.line())

    res, = run_all(["non-collision"])
    assert res.passed
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammainc
from scipy.stats import ks_2samp

from .core import Family, ModelSpec, RngStream
from . import kernels
from . import sampling
from . import stats
from .sde import IntegratorConfig, simulate

__all__ = ["CheckResult", "CHECKS", "run_all"]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one acceptance check."""

    name: str
    passed: bool
    value: float
    threshold: float
    detail: str
    wall_time: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (
            f"{mark} {self.name}: value {self.value:.4g} vs threshold "
            f"{self.threshold:.4g} ({self.detail}) [{self.wall_time:.1f}s]"
        )


def _one_sample_ks(values: np.ndarray, cdf) -> float:
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    c = np.asarray(cdf(v), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(np.abs(c - hi)), np.max(np.abs(c - lo))))


def check_ginibre_bulk_intensity() -> CheckResult:
    # 50 planar samples at n = 100; the point density well inside the
    # cloud must match the flat value 1/pi to 10% relative
    t0 = time.perf_counter()
    pts, _ = sampling.sample_ginibre_ensemble(100, RngStream(101), 50)
    radius = 0.6 * math.sqrt(100)
    est = stats.estimate_rho(list(pts), 1, bins=np.array([0.0, radius]))
    scaled = float(est.density[0]) * math.pi
    value = abs(scaled - 1.0)
    return CheckResult(
        name="ginibre-bulk-intensity",
        passed=value <= 0.1,
        value=value,
        threshold=0.1,
        detail=f"relative error of pi * rho = {scaled:.4f} inside radius {radius:.1f}",
        wall_time=time.perf_counter() - t0,
    )


def check_airy_edge_density() -> CheckResult:
    # 5000 tridiagonal samples at n = 400; scaled one-point density on
    # [-4, 2] vs the soft-edge kernel diagonal, sup discrepancy <= 0.05.
    # Bin width 0.5 keeps the per-bin counting noise (sigma ~ 0.01)
    # well under the tolerance; the reference is bin-averaged to match.
    t0 = time.perf_counter()
    draws, _ = sampling.sample_airy_ensemble(400, 2.0, RngStream(201), 5000)
    edges = np.linspace(-4.0, 2.0, 13)
    hist, _ = np.histogram(draws.ravel(), bins=edges)
    width = edges[1] - edges[0]
    ref = np.empty(edges.size - 1)
    for i in range(ref.size):
        g = np.linspace(edges[i], edges[i + 1], 21)
        ref[i] = np.trapezoid([kernels.airy_kernel(v, v) for v in g], g) / width
    value = float(np.max(np.abs(hist / (5000.0 * width) - ref)))
    return CheckResult(
        name="airy-edge-density",
        passed=value <= 0.05,
        value=value,
        threshold=0.05,
        detail="sup |empirical - kernel diagonal| over [-4, 2], width 0.5",
        wall_time=time.perf_counter() - t0,
    )


def check_airy_special_function() -> CheckResult:
    # evaluator vs a high-order ODE integration of y'' = x y started from
    # the exact values at 0, plus a direct second-difference residual
    t0 = time.perf_counter()
    ai0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
    aip0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))

    def rhs(t, y):
        return [y[1], t * y[0]]

    xs = np.linspace(-10.0, 5.0, 301)
    ai, aip = kernels.airy_fn(xs)
    err = 0.0
    for side in (-10.0, 5.0):
        sel = xs < 0 if side < 0 else xs >= 0
        sol = solve_ivp(rhs, (0.0, side), [ai0, aip0], method="DOP853",
                        rtol=1e-13, atol=1e-16, dense_output=True)
        vals = sol.sol(xs[sel])
        err = max(err, float(np.max(np.abs(ai[sel] - vals[0]))),
                  float(np.max(np.abs(aip[sel] - vals[1]))))

    # five-point stencil residual away from the series/asymptotic switch,
    # where the 1/h^2 amplification of the branch mismatch would dominate
    h = 5e-3
    grid = np.linspace(-9.5, 4.5, 141)
    grid = grid[np.abs(np.abs(grid) - 6.0) > 0.05]
    vals = {k: kernels.airy_fn(grid + k * h)[0] for k in (-2, -1, 0, 1, 2)}
    second = (-vals[2] + 16 * vals[1] - 30 * vals[0] + 16 * vals[-1] - vals[-2]) / (12 * h * h)
    resid = float(np.max(np.abs(second - grid * vals[0])))
    value = max(err, resid)
    return CheckResult(
        name="airy-special-function",
        passed=value <= 1e-8,
        value=value,
        threshold=1e-8,
        detail=f"max(ODE oracle gap {err:.2e}, stencil residual {resid:.2e}) on [-10, 5]",
        wall_time=time.perf_counter() - t0,
    )


def check_bessel_kernel_identity() -> CheckResult:
    # the recurrence and derivative forms of the hard-edge kernel are
    # algebraically identical; require 1e-9 agreement on a 50 x 50 grid
    t0 = time.perf_counter()
    grid = np.linspace(0.5, 80.0, 50)
    value = 0.0
    for a in (1.0, 2.0):
        for x in grid:
            for y in grid:
                v1 = kernels.bessel_kernel(a, x, y, form="recurrence")
                v2 = kernels.bessel_kernel(a, x, y, form="derivative")
                value = max(value, abs(v1 - v2))
    return CheckResult(
        name="bessel-kernel-identity",
        passed=value <= 1e-9,
        value=value,
        threshold=1e-9,
        detail="max |recurrence - derivative| over (0.5, 80)^2, alpha in {1, 2}",
        wall_time=time.perf_counter() - t0,
    )


def check_dyson_stationarity() -> CheckResult:
    # start 2000 paths from exact equilibrium, run to T = 0.5, and compare
    # every particle's marginal between t = 0 and t = T
    t0 = time.perf_counter()
    spec = ModelSpec(family=Family.AIRY, beta=2.0, n_particles=20)
    starts, _ = sampling.sample_airy_ensemble(20, 2.0, RngStream(501), 2000)
    cfg = IntegratorConfig(dt=5e-4, t_final=0.5, dt_record=0.5, max_substep_depth=30)
    ens = simulate(spec, list(starts), cfg, RngStream(502), on_failure="drop")
    first = np.sort(ens.states[:, 0, :, 0], axis=1)
    last = np.sort(ens.states[:, -1, :, 0], axis=1)
    value = max(ks_2samp(first[:, i], last[:, i]).statistic for i in range(20))
    return CheckResult(
        name="dyson-stationarity",
        passed=value <= 0.05,
        value=value,
        threshold=0.05,
        detail=f"max per-particle KS(t=0, t=0.5), {len(ens.failed_paths)} of 2000 paths flagged",
        wall_time=time.perf_counter() - t0,
    )


def check_ito_square_root_consistency() -> CheckResult:
    # the squared-coordinate system mapped through sqrt must match the
    # direct system in law; compare per-particle marginals at t = 0.2
    t0 = time.perf_counter()
    z0 = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
    sq = ModelSpec(family=Family.SQUARE_BESSEL, beta=2.0, alpha=1.0, n_particles=5)
    rt = ModelSpec(family=Family.SQRT_SQUARE_BESSEL, beta=2.0, alpha=1.0, n_particles=5)
    cfg = IntegratorConfig(dt=1e-3, t_final=0.2, dt_record=0.2, max_substep_depth=30)
    ens_sq = simulate(sq, [z0**2] * 2000, cfg, RngStream(605), on_failure="drop")
    ens_rt = simulate(rt, [z0] * 2000, cfg, RngStream(606), on_failure="drop")
    a = np.sort(np.sqrt(ens_sq.states[:, -1, :, 0]), axis=1)
    b = np.sort(ens_rt.states[:, -1, :, 0], axis=1)
    value = max(float(ks_2samp(a[:, i], b[:, i]).statistic) for i in range(5))
    pooled = float(ks_2samp(a.ravel(), b.ravel()).statistic)
    flagged = len(ens_sq.failed_paths) + len(ens_rt.failed_paths)
    return CheckResult(
        name="ito-square-root-consistency",
        passed=value <= 0.05,
        value=value,
        threshold=0.05,
        detail=f"max per-particle KS (pooled marginal {pooled:.4f}), {flagged} paths flagged",
        wall_time=time.perf_counter() - t0,
    )


def check_airy_drift_truncation_trend() -> CheckResult:
    # 1000 window realizations of the infinite edge system; the truncated
    # interaction at x = -1 must show the Cauchy-sequence trend in r.
    # Environments come from the window sampler (a matrix approximant
    # carries a finite-size density bend that reverses the trend) and are
    # rescaled to the density convention of the compensator 2*sqrt(r).
    t0 = time.perf_counter()
    envs, _ = sampling.sample_airy_field((-92.0, 6.0), RngStream(701), 1000)
    scale = math.pi ** (-2.0 / 3.0)
    spec = ModelSpec(family=Family.AIRY, beta=2.0, n_particles=1000)
    scan = stats.drift_truncation_scan([scale * e for e in envs], spec, -1.0, [10.0, 20.0, 40.0])
    m10, m20, m40 = (float(scan.mean[i, 0]) for i in range(3))
    inner = abs(m20 - m10)
    value = abs(m40 - m20)
    return CheckResult(
        name="airy-drift-truncation-trend",
        passed=value <= inner and value <= 0.15,
        value=value,
        threshold=0.15,
        detail=f"|D(40)-D(20)| vs |D(20)-D(10)| = {inner:.4f}, means ({m10:.3f}, {m20:.3f}, {m40:.3f})",
        wall_time=time.perf_counter() - t0,
    )


def check_ginibre_variant_gap() -> CheckResult:
    # the two truncated-drift windows agree as r grows: the mean gap
    # |centered - origin| must fall strictly across r = (6, 10, 16)
    t0 = time.perf_counter()
    pts, _ = sampling.sample_ginibre_ensemble(400, RngStream(801), 200)
    spec = ModelSpec(family=Family.GINIBRE, beta=2.0, n_particles=400)
    radii = [0.3 * 20.0, 0.5 * 20.0, 0.8 * 20.0]
    scan = stats.drift_truncation_scan(list(pts), spec, np.array([1.0, 0.0]), radii)
    g = [float(v) for v in scan.variant_gap_mean]
    value = max(g[1] - g[0], g[2] - g[1])
    return CheckResult(
        name="ginibre-variant-gap",
        passed=value < 0.0,
        value=value,
        threshold=0.0,
        detail=f"max successive gap increase, gaps ({g[0]:.3f}, {g[1]:.3f}, {g[2]:.3f})",
        wall_time=time.perf_counter() - t0,
    )


def check_non_collision() -> CheckResult:
    # 500 soft-edge paths must keep their ordering on every recorded
    # interval, and hard-edge paths must stay strictly positive
    t0 = time.perf_counter()
    airy = ModelSpec(family=Family.AIRY, beta=2.0, n_particles=10)
    starts, _ = sampling.sample_airy_ensemble(10, 2.0, RngStream(901), 500)
    cfg = IntegratorConfig(dt=1e-4, t_final=0.05, dt_record=1e-3)
    ens = simulate(airy, list(starts), cfg, RngStream(902))
    swaps = int(ens.ordering_violations)

    bes = ModelSpec(family=Family.BESSEL, beta=2.0, alpha=1.0, n_particles=10)
    opts = sampling.McmcOptions(burn_in_sweeps=3000, thin_sweeps=10)
    bstarts, _ = sampling.sample_bessel_chain(10, 1.0, RngStream(903), 50, options=opts)
    ens_b = simulate(bes, bstarts, cfg, RngStream(904))
    min_state = float(np.min(ens_b.states))
    return CheckResult(
        name="non-collision",
        passed=swaps == 0 and min_state > 0.0,
        value=float(swaps),
        threshold=0.0,
        detail=f"ordering violations over 500 paths; min hard-edge state {min_state:.3f} > 0",
        wall_time=time.perf_counter() - t0,
    )


def check_holder_moment_slope() -> CheckResult:
    # fourth moment of increments over dyadic lags: diffusive scaling
    # means slope 2 in log-log, accepted within [1.8, 2.2]
    t0 = time.perf_counter()
    spec = ModelSpec(family=Family.AIRY, beta=2.0, n_particles=10)
    starts, _ = sampling.sample_airy_ensemble(10, 2.0, RngStream(1001), 200)
    cfg = IntegratorConfig(dt=2e-4, t_final=0.128, dt_record=2e-3)
    ens = simulate(spec, list(starts), cfg, RngStream(1002))
    lags = [0.002 * 2**k for k in range(6)]
    value = stats.log_log_slope(lags, stats.holder_moment(ens, lags))
    return CheckResult(
        name="holder-moment-slope",
        passed=1.8 <= value <= 2.2,
        value=value,
        threshold=2.2,
        detail="log-log slope of E|increment|^4 over lags 0.002 * 2^k, k < 6",
        wall_time=time.perf_counter() - t0,
    )


def check_tail_sum_decay() -> CheckResult:
    # the far-particle tail sum is nonincreasing in the label cutoff and
    # collapses by >= 10x between cutoffs n/4 and 3n/4
    t0 = time.perf_counter()
    draws, _ = sampling.sample_airy_ensemble(200, 2.0, RngStream(1101), 300)
    params = stats.TightnessParams(r=10.0, L=50, T=20.0, c=1.0)
    cuts = list(range(0, 201, 10))
    vals = stats.erf_tail_sum(list(draws), params, cuts)
    drops = np.diff(vals)
    monotone = bool(np.all(drops <= 1e-12))
    ratio = float(vals[cuts.index(50)] / vals[cuts.index(150)])
    return CheckResult(
        name="tail-sum-decay",
        passed=monotone and ratio >= 10.0,
        value=ratio,
        threshold=10.0,
        detail=f"value(L=50)/value(L=150), monotone nonincreasing: {monotone}",
        wall_time=time.perf_counter() - t0,
    )


def check_sampler_closed_forms() -> CheckResult:
    # single-particle laws against exact distributions at 10^4 draws,
    # plus tridiagonal vs dense spectra at n = 50
    t0 = time.perf_counter()
    worst = 0.0
    parts = []

    draws, _ = sampling.sample_airy_ensemble(1, 2.0, RngStream(1201), 10_000)
    ks = _one_sample_ks(draws[:, 0], lambda v: 1.0 - stats.erf_fn(v + 2.0))
    worst = max(worst, ks)
    parts.append(f"gaussian {ks:.4f}")

    pts, _ = sampling.sample_ginibre_ensemble(1, RngStream(1202), 10_000)
    r2 = np.sum(pts[:, 0, :] ** 2, axis=1)
    ks = _one_sample_ks(r2, lambda v: 1.0 - np.exp(-v))
    worst = max(worst, ks)
    parts.append(f"complex-gaussian {ks:.4f}")

    opts = sampling.McmcOptions(burn_in_sweeps=2000, thin_sweeps=10)
    samples, _ = sampling.sample_bessel_chain(1, 1.0, RngStream(1203), 10_000, options=opts)
    xs = np.array([s.points[0, 0] for s in samples])
    ks = _one_sample_ks(xs, lambda v: gammainc(2.0, v / 4.0))
    worst = max(worst, ks)
    parts.append(f"gamma {ks:.4f}")

    tri, _ = sampling.sample_airy_ensemble(50, 2.0, RngStream(1204), 400, method="tridiagonal")
    dense, _ = sampling.sample_airy_ensemble(50, 2.0, RngStream(1205), 400, method="dense")
    ks = float(ks_2samp(tri.ravel(), dense.ravel()).statistic)
    worst = max(worst, ks)
    parts.append(f"tri-vs-dense {ks:.4f}")

    return CheckResult(
        name="sampler-closed-forms",
        passed=worst <= 0.02,
        value=worst,
        threshold=0.02,
        detail=", ".join(parts),
        wall_time=time.perf_counter() - t0,
    )


CHECKS = {
    "ginibre-bulk-intensity": check_ginibre_bulk_intensity,
    "airy-edge-density": check_airy_edge_density,
    "airy-special-function": check_airy_special_function,
    "bessel-kernel-identity": check_bessel_kernel_identity,
    "dyson-stationarity": check_dyson_stationarity,
    "ito-square-root-consistency": check_ito_square_root_consistency,
    "airy-drift-truncation-trend": check_airy_drift_truncation_trend,
    "ginibre-variant-gap": check_ginibre_variant_gap,
    "non-collision": check_non_collision,
    "holder-moment-slope": check_holder_moment_slope,
    "tail-sum-decay": check_tail_sum_decay,
    "sampler-closed-forms": check_sampler_closed_forms,
}


def run_all(names=None) -> list[CheckResult]:
    """Run the named checks (all twelve when names is None), in order."""
    if names is None:
        names = list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check names: {', '.join(unknown)}")
    return [CHECKS[n]() for n in names]
