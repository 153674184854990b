"""Path integration for the finite and truncated-limit particle SDEs.

The default scheme is Euler-Maruyama with recursive substep halving:
a base step is split until the drift move |b| h stays below both the
configured cap and a tenth of the smallest interparticle gap, which is
what keeps the singular pair drifts stable.  A tamed scheme (divide the
drift by 1 + dt |b|) is available as a fallback that never substeps.

Recording is decoupled from integration: states land on the grid
t_k = k * dt_record.  Every (path, recording interval) pair draws from
its own RNG substream, so a run is bitwise reproducible from (seed,
config) alone, restartable from any recorded state, and independent of
the worker count.

    spec = ModelSpec(Family.AIRY, 10, beta=2.0)
    cfg = IntegratorConfig(dt=1e-4, t_final=0.05, dt_record=1e-3)
    start = label(sample_airy_equilibrium(10, 2.0, RngStream(1)),
                  LabelScheme.ASCENDING_VALUE)
    ens = simulate(spec, [start] * 100, cfg, RngStream(2))
    assert check_ordering(ens) == 0
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    LabeledState,
    LabelScheme,
    ModelSpec,
    RngStream,
    SingularConfigurationError,
    StepFailureError,
)
from .models import (
    TruncationParams,
    diffusion_kind,
    diffusion_sigma,
    DiffusionKind,
    drift_finite_all,
    drift_limit_truncated_all,
)

__all__ = [
    "Scheme",
    "BoundaryPolicy",
    "IntegratorConfig",
    "PathEnsemble",
    "step",
    "simulate",
    "check_ordering",
]

_REJECT_RETRIES = 100


class Scheme(str, enum.Enum):
    EULER_MARUYAMA = "euler_maruyama"
    TAMED_EULER = "tamed_euler"


class BoundaryPolicy(str, enum.Enum):
    REFLECT = "reflect"
    REJECT_STEP = "reject_step"


@dataclass(frozen=True)
class IntegratorConfig:
    """Numerical parameters of one integration run.

    ``dt_record`` defaults to ``dt`` and must be an integer multiple of
    it.  ``truncation`` switches the drift to the radius-r truncated
    limit field.  ``noise_scale`` is a test hook (0 silences the noise);
    production runs leave it at 1.
    """

    dt: float
    t_final: float
    dt_record: float | None = None
    max_substep_depth: int = 20
    drift_cap_delta: float = 0.5
    boundary_policy: BoundaryPolicy = BoundaryPolicy.REFLECT
    scheme: Scheme = Scheme.EULER_MARUYAMA
    truncation: TruncationParams | None = None
    noise_scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "boundary_policy", BoundaryPolicy(self.boundary_policy))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.t_final < 0:
            raise ValueError("t_final must be >= 0")
        if not 0 <= self.max_substep_depth <= 30:
            raise ValueError("max_substep_depth must lie in [0, 30]")
        if not self.drift_cap_delta > 0:
            raise ValueError("drift_cap_delta must be > 0")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0")
        if self.truncation is not None and not isinstance(self.truncation, TruncationParams):
            raise ValueError("truncation must be a TruncationParams or None")
        if self.dt_record is not None:
            m = round(self.dt_record / self.dt)
            if m < 1 or abs(self.dt_record - m * self.dt) > 1e-9 * self.dt:
                raise ValueError("dt_record must be a positive integer multiple of dt")

    @property
    def record_step(self) -> float:
        return self.dt if self.dt_record is None else self.dt_record

    @property
    def substeps_per_record(self) -> int:
        return round(self.record_step / self.dt)


@dataclass(frozen=True)
class PathEnsemble:
    """Recorded trajectories of one simulate() call.

    ``states`` has shape (paths, len(times), n, d); row k of path p is the
    labeled state at ``times[k]``.  Labels follow particles (the time
    series is a path, not a per-time re-sorting).  ``ordering_violations``
    counts adjacent-pair order swaps between consecutive recorded states
    of 1d families and is None otherwise.  ``failed_paths`` lists
    (requested index, reason) for paths flagged by a step failure and
    excluded from ``states``; ``path_seeds`` identifies the survivors.
    """

    times: np.ndarray
    states: np.ndarray
    spec: ModelSpec
    path_seeds: tuple
    substeps: np.ndarray
    max_depth_used: int
    ordering_violations: int | None
    failed_paths: tuple = ()

    def __post_init__(self) -> None:
        if self.states.ndim != 4 or self.states.shape[1] != len(self.times):
            raise ValueError("states must have shape (paths, len(times), n, d)")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("recording grid must be strictly increasing")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("all recorded states must be finite")
        if self.states.shape[0] != len(self.path_seeds):
            raise ValueError("one trajectory per surviving path required")

    @property
    def n_paths(self) -> int:
        return self.states.shape[0]

    def trajectory(self, path: int) -> list[LabeledState]:
        scheme = LabelScheme.ASCENDING_VALUE if self.states.shape[3] == 1 else LabelScheme.ASCENDING_MODULUS
        return [LabeledState(self.states[path, k], scheme) for k in range(len(self.times))]


# ---------------------------------------------------------------------------
# single-step machinery
# ---------------------------------------------------------------------------


class _StepStats:
    __slots__ = ("substeps", "max_depth")

    def __init__(self) -> None:
        self.substeps = 0
        self.max_depth = 0


def _drift(spec: ModelSpec, pts: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    try:
        if cfg.truncation is not None:
            return drift_limit_truncated_all(spec, pts, cfg.truncation)
        return drift_finite_all(spec, pts)
    except SingularConfigurationError as exc:
        raise StepFailureError(f"drift evaluation hit a singular configuration: {exc}") from exc


def _min_gap(pts: np.ndarray) -> float:
    n = pts.shape[0]
    if n < 2:
        return math.inf
    if pts.shape[1] == 1:
        x = np.sort(pts[:, 0])
        return float(np.min(np.diff(x)))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    dist[np.diag_indices(n)] = np.inf
    return float(np.min(dist))


def _leaf_move(spec, pts, b, h, g, cfg, stats, depth):
    sig = None
    if diffusion_kind(spec) is not DiffusionKind.IDENTITY:
        sig = diffusion_sigma(spec, pts)
    root_h = math.sqrt(h)
    for _ in range(_REJECT_RETRIES):
        xi = g.standard_normal(pts.shape)
        noise = xi if sig is None else sig * xi
        new = pts + b * h + cfg.noise_scale * root_h * noise
        if spec.nonnegative_domain and np.min(new) <= 0.0:
            if cfg.boundary_policy is BoundaryPolicy.REJECT_STEP:
                continue
            new = np.abs(new)
        stats.substeps += 1
        stats.max_depth = max(stats.max_depth, depth)
        return new
    raise StepFailureError(f"boundary rejection budget ({_REJECT_RETRIES}) exhausted")


def _advance(spec, pts, h, depth, g, cfg, stats) -> np.ndarray:
    b = _drift(spec, pts, cfg)
    if cfg.scheme is Scheme.TAMED_EULER:
        norms = np.sqrt(np.sum(b * b, axis=1, keepdims=True))
        return _leaf_move(spec, pts, b / (1.0 + h * norms), h, g, cfg, stats, depth)
    bmax = float(np.max(np.sqrt(np.sum(b * b, axis=1)))) if b.size else 0.0
    gap = _min_gap(pts)
    split = bmax * h > min(cfg.drift_cap_delta, 0.1 * gap)
    if not split and cfg.noise_scale > 0.0 and math.isfinite(gap):
        # the drift cap alone leaves the substep noise at a fixed ~0.45
        # fraction of the gap (both scale with it), which lets diffusion
        # hop a crossing; also resolving the noise against the gap makes
        # label swaps vanish while keeping the same dip statistics
        scaled_root_h = cfg.noise_scale * math.sqrt(h)
        if diffusion_kind(spec) is DiffusionKind.IDENTITY:
            split = scaled_root_h > 0.1 * gap
        else:
            # state-dependent noise: a swap is a per-pair event, so test
            # each adjacent pair against its own coefficient instead of
            # the global max against the global gap (that bound forces
            # deep substepping of well-separated high-noise particles)
            x = np.sort(pts[:, 0])
            sig = diffusion_sigma(spec, x[:, None])[:, 0]
            pair_sig = np.maximum(sig[1:], sig[:-1])
            split = bool(np.any(scaled_root_h * pair_sig > 0.1 * np.diff(x)))
    if split:
        if depth >= cfg.max_substep_depth:
            raise StepFailureError(
                f"substep depth {cfg.max_substep_depth} exhausted (|b| = {bmax:.3g}, h = {h:.3g})"
            )
        pts = _advance(spec, pts, 0.5 * h, depth + 1, g, cfg, stats)
        return _advance(spec, pts, 0.5 * h, depth + 1, g, cfg, stats)
    return _leaf_move(spec, pts, b, h, g, cfg, stats, depth)


def step(spec: ModelSpec, state, dt: float, rng, cfg: IntegratorConfig) -> LabeledState:
    """One base step of length dt (substepping internally as needed)."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if isinstance(rng, RngStream):
        g = rng.generator()
    elif isinstance(rng, np.random.Generator):
        g = rng
    else:
        raise TypeError("rng must be an RngStream or numpy Generator")
    pts = np.array(getattr(state, "points", state), dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    out = _advance(spec, pts, float(dt), 0, g, cfg, _StepStats())
    scheme = getattr(
        state, "scheme", LabelScheme.ASCENDING_VALUE if pts.shape[1] == 1 else LabelScheme.ASCENDING_MODULUS
    )
    return LabeledState(out, scheme)


# ---------------------------------------------------------------------------
# path-level driver
# ---------------------------------------------------------------------------


def _integrate_path(task):
    spec, cfg, pts0, stream, path_idx, start_interval, n_rec = task
    m = cfg.substeps_per_record
    rec = np.empty((n_rec + 1,) + pts0.shape)
    rec[0] = pts0
    stats = _StepStats()
    pts = pts0
    try:
        for j in range(n_rec):
            g = stream.generator(path_idx, start_interval + j)
            for _ in range(m):
                pts = _advance(spec, pts, cfg.dt, 0, g, cfg, stats)
            rec[j + 1] = pts
    except StepFailureError as exc:
        return None, stats.substeps, stats.max_depth, f"path {path_idx}: {exc}"
    return rec, stats.substeps, stats.max_depth, None


def _count_order_swaps(states: np.ndarray) -> int:
    if states.shape[1] < 2 or states.shape[2] < 2:
        return 0
    sgn = np.sign(np.diff(states[..., 0], axis=2))
    return int(np.sum(sgn[:, 1:, :] * sgn[:, :-1, :] < 0))


def simulate(
    spec: ModelSpec,
    initial,
    cfg: IntegratorConfig,
    rng: RngStream,
    *,
    workers: int | None = None,
    start_interval: int = 0,
    on_failure: str = "raise",
) -> PathEnsemble:
    """Integrate one trajectory per initial state.

    Noise for path p on recording interval j comes from the substream
    ``rng.generator(p, start_interval + j)``; restarting from a recorded
    state with the matching ``start_interval`` reproduces the tail
    bitwise.  ``workers`` > 1 distributes paths over processes without
    changing any output.

    Near-collisions below the substep resolution end a path with a step
    failure.  ``on_failure="raise"`` propagates the first one with its
    path index; ``"drop"`` excludes flagged paths from the ensemble and
    lists them in ``failed_paths`` (their noise streams are untouched,
    so surviving paths are bitwise independent of the flagged ones).
    """
    if not isinstance(rng, RngStream):
        raise TypeError("simulate requires an RngStream (determinism contract)")
    if start_interval < 0:
        raise ValueError("start_interval must be >= 0")
    if on_failure not in ("raise", "drop"):
        raise ValueError("on_failure must be 'raise' or 'drop'")
    rs = cfg.record_step
    n_rec = round(cfg.t_final / rs)
    if abs(cfg.t_final - n_rec * rs) > 1e-9 * rs:
        raise ValueError("t_final must be an integer multiple of dt_record")

    starts = []
    for state in initial:
        pts = np.array(getattr(state, "points", state), dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[1] != spec.dimension:
            raise ValueError(f"initial state dimension {pts.shape[1]} != family dimension {spec.dimension}")
        starts.append(pts)
    if not starts:
        raise ValueError("at least one initial state is required")

    tasks = [(spec, cfg, pts, rng, p, start_interval, n_rec) for p, pts in enumerate(starts)]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_integrate_path, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_integrate_path(t) for t in tasks]

    failures = tuple((p, r[3]) for p, r in enumerate(results) if r[0] is None)
    if failures and on_failure == "raise":
        raise StepFailureError(failures[0][1])
    survivors = [p for p, r in enumerate(results) if r[0] is not None]
    if not survivors:
        raise StepFailureError(f"all paths failed; first: {failures[0][1]}")

    states = np.stack([results[p][0] for p in survivors])
    states.setflags(write=False)
    times = (start_interval + np.arange(n_rec + 1)) * rs
    violations = _count_order_swaps(states) if spec.dimension == 1 else None
    return PathEnsemble(
        times=times,
        states=states,
        spec=spec,
        path_seeds=tuple((rng.seed, rng.stream_id, p) for p in survivors),
        substeps=np.array([results[p][1] for p in survivors]),
        max_depth_used=max(results[p][2] for p in survivors),
        ordering_violations=violations,
        failed_paths=failures,
    )


def check_ordering(ensemble: PathEnsemble) -> int:
    """Adjacent-pair order swaps between consecutive recorded states.

    Defined for 1d families only; 0 means no recorded collision/crossing.
    """
    if ensemble.states.shape[3] != 1:
        raise ValueError("ordering is defined for 1d families only")
    return _count_order_swaps(ensemble.states)
