"""Command-line entry point: reproducible, config-driven runs.

Every subcommand resolves one RunConfig (defaults, then an INI config
file, then flags), echoes the resolved config into the output directory,
and writes plain-CSV artifacts there; a run is reproducible from the
echoed config alone.  Exit codes: 0 success, 1 acceptance-check failure,
2 config error, 3 numerical failure.

Usage:
    ibrownian sample --model ginibre --n 100 --n-samples 50 --seed 7
    ibrownian simulate --model airy --n 10 --paths 50 --dt 1e-4 --t-final 0.01
    ibrownian kernel --kernel airy2 --grid -4:2:0.05
    ibrownian correlate --model airy --n 40 --n-samples 200 --order 2
    ibrownian drift-diag --model ginibre --n 100 --n-samples 150 --x 1,0 --r-list 3,5,8
    ibrownian tightness --model airy --n 100 --n-samples 200 --L-list 0,25,50,75
    ibrownian moments --model airy --n 10 --paths 100 --lags 0.002,0.004,0.008
    ibrownian verify --suite quick

The only environment variable read is IBROWNIAN_WORKERS (process count
for path integration; defaults to 1).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import (
    Configuration,
    DomainError,
    Family,
    ModelSpec,
    RngStream,
    SingularConfigurationError,
    StepFailureError,
    save_configurations,
)
from . import kernels
from .models import TruncationParams, TruncationVariant, log_derivative
from . import sampling
from . import stats
from .acceptance import CHECKS, run_all
from .sde import IntegratorConfig, simulate

__all__ = ["RunConfig", "ConfigError", "run", "main"]

# checks lasting minutes are excluded from the quick suite
_SLOW_CHECKS = ("dyson-stationarity", "ito-square-root-consistency")

_SAMPLED_FAMILIES = (
    Family.AIRY,
    Family.GINIBRE,
    Family.BESSEL,
    Family.LENNARD_JONES,
    Family.RIESZ,
)


class ConfigError(Exception):
    """Invalid configuration; the message starts with the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class RunConfig:
    """Flat run configuration; every field has a default.

    The INI section of each field is the prefix in _SECTIONS below; flags
    use the same names with dashes.  List-valued fields are comma strings
    so the whole config stays diff-able plain text.
    """

    # model
    family: str = "airy"
    n: int = 10
    beta: float = 2.0
    alpha: float = 1.0
    riesz_a: int = 5
    free_c: float = 0.5
    free_theta: float = 1.0
    # integrator
    dt: float = 1e-3
    t_final: float = 0.1
    dt_record: float = 0.0  # 0 records every base step
    max_substep_depth: int = 20
    drift_cap_delta: float = 0.5
    scheme: str = "euler_maruyama"
    truncation_radius: float = 0.0  # 0 keeps the full finite-system drift
    truncation_variant: str = "centered"
    # sampler
    n_samples: int = 100
    method: str = "tridiagonal"
    burn_in_sweeps: int = 10_000
    thin_sweeps: int = 10
    paths: int = 100
    initial: str = "auto"  # auto | equilibrium | spaced
    # diagnostics
    order: int = 1
    bins: str = "auto"  # "auto" or comma-separated edges
    window: float = 0.0  # planar pair-estimate window radius (0 = unset)
    x: str = "-1.0"  # evaluation point, comma-separated per dimension
    r_list: str = "5,10,20"
    s: float = 2.0
    L_list: str = "0,25,50,75,100"
    lags: str = "0.002,0.004,0.008,0.016,0.032"
    kernel: str = "airy2"
    grid: str = "-4:2:0.05"
    r: float = 10.0
    T: float = 20.0
    c: float = 1.0
    q: float = 1.0
    # run
    seed: int = 0
    out: str = "ibrownian-out"
    suite: str = "full"  # quick | full
    checks: str = ""  # comma-separated check names; overrides suite

_SECTIONS = {
    "model": ("family", "n", "beta", "alpha", "riesz_a", "free_c", "free_theta"),
    "integrator": (
        "dt",
        "t_final",
        "dt_record",
        "max_substep_depth",
        "drift_cap_delta",
        "scheme",
        "truncation_radius",
        "truncation_variant",
    ),
    "sampler": ("n_samples", "method", "burn_in_sweeps", "thin_sweeps", "paths", "initial"),
    "diagnostics": (
        "order",
        "bins",
        "window",
        "x",
        "r_list",
        "s",
        "L_list",
        "lags",
        "kernel",
        "grid",
        "r",
        "T",
        "c",
        "q",
    ),
    "run": ("seed", "out", "suite", "checks"),
}

_FIELD_SECTION = {name: section for section, names in _SECTIONS.items() for name in names}
_FIELD_TYPE = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, name: str, raw: str):
    kind = _FIELD_TYPE[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return str(raw)
    except ValueError:
        raise ConfigError(key, f"expected {kind}, got {raw!r}") from None


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Resolve defaults <- INI file <- explicit flag overrides."""
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keys are case-sensitive (L_list)
        read = parser.read(path)
        if not read:
            raise ConfigError("config", f"cannot read config file {path!r}")
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ConfigError(section, "unknown config section")
            for name, raw in parser.items(section):
                if name not in _SECTIONS[section]:
                    raise ConfigError(f"{section}.{name}", "unknown config key")
                setattr(cfg, name, _coerce(f"{section}.{name}", name, raw))
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def echo_config(cfg: RunConfig, out_dir: Path) -> None:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    for section, names in _SECTIONS.items():
        parser[section] = {name: str(getattr(cfg, name)) for name in names}
    with open(out_dir / "config.ini", "w", encoding="utf-8") as fh:
        parser.write(fh)


# ---------------------------------------------------------------------------
# parsing helpers (all failures name the offending key)
# ---------------------------------------------------------------------------


def _floats(key: str, text: str) -> list[float]:
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    if not items:
        raise ConfigError(key, "expected a comma-separated list of numbers")
    try:
        return [float(t) for t in items]
    except ValueError:
        raise ConfigError(key, f"expected numbers, got {text!r}") from None


def _ints(key: str, text: str) -> list[int]:
    return [int(round(v)) for v in _floats(key, text)]


def _grid(key: str, text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(key, f"expected lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(key, f"expected numbers in lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise ConfigError(key, "grid needs lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _family(cfg: RunConfig) -> Family:
    name = cfg.family.strip().lower().replace("-", "_")
    try:
        return Family(name)
    except ValueError:
        known = ", ".join(f.value for f in Family)
        raise ConfigError("model.family", f"unknown family {cfg.family!r} (one of: {known})") from None


def _model_spec(cfg: RunConfig) -> ModelSpec:
    fam = _family(cfg)
    kwargs = {}
    if fam in (Family.BESSEL, Family.SQUARE_BESSEL, Family.SQRT_SQUARE_BESSEL):
        kwargs["alpha"] = cfg.alpha
    if fam is Family.RIESZ:
        kwargs["riesz_a"] = cfg.riesz_a
    if fam in (Family.LENNARD_JONES, Family.RIESZ):
        kwargs["free_c"] = cfg.free_c
        kwargs["free_theta"] = cfg.free_theta
    try:
        return ModelSpec(family=fam, n_particles=cfg.n, beta=cfg.beta, **kwargs)
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from None


def _workers() -> int | None:
    raw = os.environ.get("IBROWNIAN_WORKERS")
    if raw is None:
        return None
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError("IBROWNIAN_WORKERS", f"expected an integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError("IBROWNIAN_WORKERS", "worker count must be >= 1")
    return count


def _mcmc_options(cfg: RunConfig) -> sampling.McmcOptions:
    try:
        return sampling.McmcOptions(burn_in_sweeps=cfg.burn_in_sweeps, thin_sweeps=cfg.thin_sweeps)
    except ValueError as exc:
        raise ConfigError("sampler", str(exc)) from None


def _draw_equilibrium(cfg: RunConfig, spec: ModelSpec, rng: RngStream, count: int) -> list[Configuration]:
    fam = spec.family
    if fam is Family.AIRY:
        try:
            draws, _ = sampling.sample_airy_ensemble(spec.n_particles, spec.beta, rng, count, method=cfg.method)
        except ValueError as exc:
            raise ConfigError("sampler.method", str(exc)) from None
        return [Configuration(row[:, None], dimension=1) for row in draws]
    if fam is Family.GINIBRE:
        pts, _ = sampling.sample_ginibre_ensemble(spec.n_particles, rng, count)
        return [Configuration(p, dimension=2) for p in pts]
    if fam is Family.BESSEL:
        samples, _ = sampling.sample_bessel_chain(
            spec.n_particles, spec.alpha, rng, count, options=_mcmc_options(cfg)
        )
        return samples
    if fam in (Family.LENNARD_JONES, Family.RIESZ):
        samples, _ = sampling.sample_gibbs_chain(spec, rng, count, options=_mcmc_options(cfg))
        return samples
    supported = ", ".join(f.value for f in _SAMPLED_FAMILIES)
    raise ConfigError(
        "model.family", f"{fam.value} has no equilibrium sampler (one of: {supported})"
    )


def _spaced_initial(spec: ModelSpec) -> np.ndarray:
    n, d = spec.n_particles, spec.dimension
    if d == 1:
        return np.arange(1.0, n + 1.0)[:, None]
    side = int(math.ceil(n ** (1.0 / d)))
    axes = [np.arange(side, dtype=float) - 0.5 * (side - 1)] * d
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return mesh[:n]


def _initial_states(cfg: RunConfig, spec: ModelSpec, rng: RngStream) -> list:
    mode = cfg.initial.strip().lower()
    has_sampler = spec.family in _SAMPLED_FAMILIES
    if mode == "auto":
        mode = "equilibrium" if has_sampler else "spaced"
    if mode == "equilibrium":
        return _draw_equilibrium(cfg, spec, rng, cfg.paths)
    if mode == "spaced":
        return [_spaced_initial(spec)] * cfg.paths
    raise ConfigError("sampler.initial", f"expected auto, equilibrium or spaced, got {cfg.initial!r}")


def _integrator_config(cfg: RunConfig, spec: ModelSpec) -> IntegratorConfig:
    trunc = None
    if cfg.truncation_radius > 0:
        variant = None
        if spec.family is Family.GINIBRE:
            try:
                variant = TruncationVariant(cfg.truncation_variant.strip().lower())
            except ValueError:
                raise ConfigError(
                    "integrator.truncation_variant",
                    f"expected centered or origin, got {cfg.truncation_variant!r}",
                ) from None
        trunc = TruncationParams(radius=cfg.truncation_radius, cutoff=cfg.s, variant=variant)
    try:
        return IntegratorConfig(
            dt=cfg.dt,
            t_final=cfg.t_final,
            dt_record=None if cfg.dt_record == 0 else cfg.dt_record,
            max_substep_depth=cfg.max_substep_depth,
            drift_cap_delta=cfg.drift_cap_delta,
            scheme=cfg.scheme,
            truncation=trunc,
        )
    except ValueError as exc:
        raise ConfigError("integrator", str(exc)) from None


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_sample(cfg: RunConfig, out: Path) -> int:
    spec = _model_spec(cfg)
    configs = _draw_equilibrium(cfg, spec, RngStream(cfg.seed), cfg.n_samples)
    target = out / "samples.csv"
    save_configurations(target, configs)
    print(f"wrote {len(configs)} {spec.family.value} configurations (n = {spec.n_particles}) to {target}")
    return 0


def _cmd_simulate(cfg: RunConfig, out: Path) -> int:
    spec = _model_spec(cfg)
    icfg = _integrator_config(cfg, spec)
    initial = _initial_states(cfg, spec, RngStream(cfg.seed, 0))
    ens = simulate(spec, initial, icfg, RngStream(cfg.seed, 1), workers=_workers())
    coords = ["x", "y", "z"][: spec.dimension]
    rows = []
    for p in range(ens.states.shape[0]):
        for k, t in enumerate(ens.times):
            for i in range(spec.n_particles):
                rows.append([_fmt(t), p, i] + [_fmt(v) for v in ens.states[p, k, i]])
    target = out / "trajectory.csv"
    _write_csv(target, ["t", "path_id", "particle_id"] + coords, rows)
    swaps = "-" if ens.ordering_violations is None else str(ens.ordering_violations)
    print(
        f"integrated {ens.states.shape[0]} paths to t = {cfg.t_final} "
        f"(ordering violations {swaps}, max substep depth {ens.max_depth_used}); wrote {target}"
    )
    return 0


def _cmd_kernel(cfg: RunConfig, out: Path) -> int:
    xs = _grid("diagnostics.grid", cfg.grid)
    try:
        kid = kernels.KernelId(cfg.kernel.strip().lower())
    except ValueError:
        known = ", ".join(k.value for k in kernels.KernelId)
        raise ConfigError("diagnostics.kernel", f"unknown kernel {cfg.kernel!r} (one of: {known})") from None
    try:
        if kid is kernels.KernelId.AIRY2:
            vals = [kernels.airy_kernel(v, v) for v in xs]
        elif kid is kernels.KernelId.BESSEL:
            vals = [kernels.bessel_kernel(cfg.alpha, v, v) for v in xs]
        else:
            vals = [1.0 / math.pi] * len(xs)
    except (ValueError, DomainError) as exc:
        raise ConfigError("diagnostics.grid", str(exc)) from None
    target = out / "kernel.csv"
    _write_csv(target, ["x", "value"], ([_fmt(v), _fmt(k)] for v, k in zip(xs, vals)))
    print(f"wrote {len(xs)} diagonal values of {kid.value} to {target}")
    return 0


def _cmd_correlate(cfg: RunConfig, out: Path) -> int:
    spec = _model_spec(cfg)
    if cfg.order not in (1, 2):
        raise ConfigError("diagnostics.order", f"expected 1 or 2, got {cfg.order}")
    if spec.dimension == 2 and cfg.order == 2 and cfg.window == 0:
        raise ConfigError("diagnostics.window", "required for planar order-2 estimates")
    configs = _draw_equilibrium(cfg, spec, RngStream(cfg.seed), cfg.n_samples)
    edges = None if cfg.bins.strip().lower() == "auto" else np.asarray(_floats("diagnostics.bins", cfg.bins))
    window = None if cfg.window == 0 else cfg.window
    try:
        est = stats.estimate_rho(configs, cfg.order, bins=edges, window=window)
    except ValueError as exc:
        raise ConfigError("diagnostics", str(exc)) from None
    target = out / "correlation.csv"
    b = est.bins
    if est.density.ndim == 2:
        rows = [
            [_fmt(b[i]), _fmt(b[i + 1]), _fmt(b[j]), _fmt(b[j + 1]), _fmt(est.density[i, j]), _fmt(est.stderr[i, j])]
            for i in range(est.density.shape[0])
            for j in range(est.density.shape[1])
        ]
        _write_csv(target, ["x_lo", "x_hi", "y_lo", "y_hi", "density", "stderr"], rows)
    else:
        label = "sep" if (spec.dimension == 2 and cfg.order == 2) else ("radius" if spec.dimension == 2 else "x")
        rows = [
            [_fmt(b[i]), _fmt(b[i + 1]), _fmt(est.density[i]), _fmt(est.stderr[i])]
            for i in range(est.density.size)
        ]
        _write_csv(target, [f"{label}_lo", f"{label}_hi", "density", "stderr"], rows)
    print(f"wrote order-{cfg.order} correlation estimate ({est.density.size} bins) to {target}")
    return 0


def _cmd_drift_diag(cfg: RunConfig, out: Path) -> int:
    spec = _model_spec(cfg)
    x = np.asarray(_floats("diagnostics.x", cfg.x))
    if x.size != spec.dimension:
        raise ConfigError("diagnostics.x", f"expected {spec.dimension} coordinates, got {x.size}")
    r_list = _floats("diagnostics.r_list", cfg.r_list)
    configs = _draw_equilibrium(cfg, spec, RngStream(cfg.seed), cfg.n_samples)
    try:
        scan = stats.drift_truncation_scan(configs, spec, x if spec.dimension > 1 else float(x[0]), r_list)
    except ValueError as exc:
        key = "sampler.n_samples" if "environment samples" in str(exc) else "diagnostics.r_list"
        raise ConfigError(key, str(exc)) from None
    coords = ["x", "y", "z"][: spec.dimension]
    header = ["r"] + [f"mean_{c}" for c in coords] + [f"stderr_{c}" for c in coords]
    rows = []
    for k, rv in enumerate(scan.r_values):
        row = [_fmt(rv)] + [_fmt(v) for v in scan.mean[k]] + [_fmt(v) for v in scan.stderr[k]]
        rows.append(row)
    if scan.variant_gap_mean is not None:
        header += ["variant_gap_mean", "variant_gap_stderr"]
        for k, row in enumerate(rows):
            row += [_fmt(scan.variant_gap_mean[k]), _fmt(scan.variant_gap_stderr[k])]
    target = out / "drift_scan.csv"
    _write_csv(target, header, rows)

    # per-sample split of the log-derivative at x, exact in the cutoff s
    dec_rows = []
    for j, config in enumerate(configs):
        try:
            dec = log_derivative(spec, x if spec.dimension > 1 else float(x[0]), config, cfg.s)
        except SingularConfigurationError as exc:
            raise SingularConfigurationError(f"sample {j}: {exc}") from None
        dec_rows.append(
            [j]
            + [_fmt(v) for v in np.atleast_1d(dec.free)]
            + [_fmt(v) for v in np.atleast_1d(dec.near)]
            + [_fmt(v) for v in np.atleast_1d(dec.far)]
        )
    dec_header = (
        ["sample_id"]
        + [f"free_{c}" for c in coords]
        + [f"near_{c}" for c in coords]
        + [f"far_{c}" for c in coords]
    )
    dec_target = out / "decomposition.csv"
    _write_csv(dec_target, dec_header, dec_rows)
    print(f"wrote truncation scan over r = {r_list} to {target} and cutoff split (s = {cfg.s}) to {dec_target}")
    return 0


def _cmd_tightness(cfg: RunConfig, out: Path) -> int:
    spec = _model_spec(cfg)
    L_list = _ints("diagnostics.L_list", cfg.L_list)
    if any(v < 0 for v in L_list):
        raise ConfigError("diagnostics.L_list", "label cutoffs must be >= 0")
    configs = _draw_equilibrium(cfg, spec, RngStream(cfg.seed), cfg.n_samples)
    try:
        params = stats.TightnessParams(r=cfg.r, L=max(1, L_list[0]), T=cfg.T, c=cfg.c, Q=cfg.q)
    except ValueError as exc:
        raise ConfigError("diagnostics", str(exc)) from None
    vals = stats.erf_tail_sum(configs, params, L_list)
    target = out / "tightness.csv"
    _write_csv(target, ["L", "value"], ([lv, _fmt(v)] for lv, v in zip(L_list, vals)))
    print(f"wrote tail sums over L = {L_list} to {target}")
    return 0


def _cmd_moments(cfg: RunConfig, out: Path) -> int:
    spec = _model_spec(cfg)
    icfg = _integrator_config(cfg, spec)
    lags = _floats("diagnostics.lags", cfg.lags)
    initial = _initial_states(cfg, spec, RngStream(cfg.seed, 0))
    ens = simulate(spec, initial, icfg, RngStream(cfg.seed, 1), workers=_workers())
    try:
        moments = stats.holder_moment(ens, lags)
    except ValueError as exc:
        raise ConfigError("diagnostics.lags", str(exc)) from None
    target = out / "moments.csv"
    _write_csv(target, ["lag", "moment4"], ([_fmt(l), _fmt(m)] for l, m in zip(lags, moments)))
    positive = [(l, m) for l, m in zip(lags, moments) if l > 0 and m > 0]
    if len(positive) >= 2:
        slope = stats.log_log_slope([p[0] for p in positive], [p[1] for p in positive])
        print(f"wrote fourth moments for {len(lags)} lags to {target}; log-log slope {slope:.4f}")
    else:
        print(f"wrote fourth moments for {len(lags)} lags to {target}")
    return 0


def _cmd_verify(cfg: RunConfig, out: Path) -> int:
    if cfg.checks.strip():
        names = [c.strip() for c in cfg.checks.split(",") if c.strip()]
        unknown = [c for c in names if c not in CHECKS]
        if unknown:
            known = ", ".join(CHECKS)
            raise ConfigError("run.checks", f"unknown checks {', '.join(unknown)} (one of: {known})")
    elif cfg.suite == "quick":
        names = [c for c in CHECKS if c not in _SLOW_CHECKS]
    elif cfg.suite == "full":
        names = list(CHECKS)
    else:
        raise ConfigError("run.suite", f"expected quick or full, got {cfg.suite!r}")
    results = []
    for name in names:
        res = CHECKS[name]()
        results.append(res)
        print(res.line(), flush=True)
    target = out / "verify.csv"
    _write_csv(
        target,
        ["name", "passed", "value", "threshold", "wall_time"],
        ([r.name, int(r.passed), _fmt(r.value), _fmt(r.threshold), _fmt(r.wall_time)] for r in results),
    )
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed; wrote {target}")
    return 1 if failed else 0


_COMMANDS = {
    "sample": _cmd_sample,
    "simulate": _cmd_simulate,
    "kernel": _cmd_kernel,
    "correlate": _cmd_correlate,
    "drift-diag": _cmd_drift_diag,
    "tightness": _cmd_tightness,
    "moments": _cmd_moments,
    "verify": _cmd_verify,
}


def run(subcommand: str, cfg: RunConfig) -> int:
    """Execute one subcommand against a resolved config; returns the exit code."""
    if subcommand not in _COMMANDS:
        raise ConfigError("subcommand", f"unknown subcommand {subcommand!r}")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    echo_config(cfg, out)
    return _COMMANDS[subcommand](cfg, out)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibrownian",
        description="Interacting Brownian particle systems: sampling, integration, diagnostics.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    flag_of = {
        "family": "--model",
        "n": "--n",
        "T": "--T",
        "L_list": "--L-list",
    }
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"{name} run (see module docstring)")
        # values like "-4:2:0.05" or "-1,0" must parse as values, not flags;
        # no option here starts with a digit, so widening is unambiguous
        p._negative_number_matcher = re.compile(r"^-\d")
        p.add_argument("--config", default=None, help="INI config file; flags override it")
        for field in fields(RunConfig):
            flag = flag_of.get(field.name, "--" + field.name.replace("_", "-"))
            kind = {"int": int, "float": float, "str": str}[field.type]
            p.add_argument(flag, dest=field.name, type=kind, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    try:
        cfg = load_config(args.config, overrides)
        return run(args.subcommand, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (StepFailureError, SingularConfigurationError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
