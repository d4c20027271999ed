"""Command-line experiment driver.

Runs the named experiment over a grid of intensities, one process-pool
block per grid value, and writes a flat record table.  Records are byte
identical across reruns with the same configuration except for the
runtime_ms column; every block derives its randomness from the
(experiment, dimension, intensity, seed) tuple, so worker scheduling
cannot change the output.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytics, models, ppp
from .geomcore import direction_grid, unit_ball_volume, validate_dimension
from .ppp import RngStream

CSV_HEADER = ["experiment", "d", "lambda", "replicate", "seed", "metric",
              "value", "std_error", "runtime_ms"]

EXPERIMENTS = ("radius-convergence", "volume-sweep", "coupling", "crofton",
               "warmup-1d", "meeting-counts", "cone")

EXPERIMENT_DEFAULTS = {
    "radius-convergence": dict(d=2, lambda_grid=(10.0, 50.0, 200.0), samples=100_000),
    "volume-sweep": dict(d=2, lambda_grid=(50.0, 200.0, 1000.0, 10000.0), samples=20_000),
    "coupling": dict(d=2, lambda_grid=(1000.0, 3000.0, 10000.0), replicates=200,
                     grid_size=1024),
    "crofton": dict(d=2, lambda_grid=(2.0,), replicates=8000),
    "warmup-1d": dict(d=1, lambda_grid=(100.0,), replicates=100_000),
    "meeting-counts": dict(d=2, lambda_grid=(10000.0,), replicates=2000, eps=1e-3),
    "cone": dict(d=2, lambda_grid=(5.0,), samples=20_000),
}


class ConfigError(ValueError):
    """Bad experiment configuration; reported with exit code 2."""


class NumericalFailure(RuntimeError):
    """Non-finite metric or an uncertifiable cell; reported with exit code 3."""


@dataclass
class ExperimentConfig:
    experiment: str
    d: int = 2
    lambda_grid: tuple[float, ...] = ()
    replicates: int = 200
    samples: int = 20_000
    seed: int = 12345
    grid_size: int = 1024
    eps: float = 1e-3
    output_path: str = ""
    format: str = "csv"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        try:
            self.d = validate_dimension(self.d)
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None
        if not self.lambda_grid:
            raise ConfigError("lambda grid must not be empty")
        if any(not np.isfinite(v) or v <= 0 for v in self.lambda_grid):
            raise ConfigError("lambda grid values must be positive and finite")
        if len(set(self.lambda_grid)) != len(self.lambda_grid):
            raise ConfigError("lambda grid values must be distinct")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.grid_size < 8:
            raise ConfigError("grid_size must be >= 8")
        if not 0.0 < self.eps < 0.25:
            raise ConfigError("eps must lie in (0, 0.25)")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if not self.output_path:
            self.output_path = f"randset-{self.experiment}.{self.format}"


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    d: int
    lam: float
    replicate: int
    seed: int
    metric: str
    value: float
    std_error: float | None
    runtime_ms: float

    def row(self) -> list[str]:
        return [self.experiment, str(self.d), repr(float(self.lam)),
                str(self.replicate), str(self.seed), self.metric,
                repr(float(self.value)),
                "" if self.std_error is None else repr(float(self.std_error)),
                repr(float(self.runtime_ms))]


# ---------------------------------------------------------------------------
# configuration parsing

_INT_KEYS = {"d", "replicates", "samples", "seed", "grid_size"}
_FLOAT_KEYS = {"eps"}
_STR_KEYS = {"experiment", "output_path", "format"}


def _parse_lambda_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in str(text).replace(";", ",").split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"could not parse lambda grid from {text!r}") from None


def parse_config_file(path: str) -> dict:
    """Read key=value (or key: value) lines; # starts a comment."""
    out: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        elif ":" in line:
            key, _, val = line.partition(":")
        else:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key == "lambda" or key == "lambda_grid":
            out["lambda_grid"] = _parse_lambda_grid(val)
        elif key in _INT_KEYS:
            try:
                out[key] = int(val)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: {key} must be an integer") from None
        elif key in _FLOAT_KEYS:
            try:
                out[key] = float(val)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: {key} must be a number") from None
        elif key in _STR_KEYS:
            out[key] = val
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def build_config(experiment: str, file_options: dict, cli_options: dict) -> ExperimentConfig:
    """Defaults, then config file, then command-line flags."""
    merged = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    merged.update({k: v for k, v in file_options.items() if v is not None})
    merged.update({k: v for k, v in cli_options.items() if v is not None})
    merged.pop("experiment", None)
    try:
        return ExperimentConfig(experiment=experiment, **merged)
    except TypeError as e:
        raise ConfigError(str(e)) from None


# ---------------------------------------------------------------------------
# metric blocks (one per lambda grid value; must stay picklable)


def _rec(out: list, metric: str, value: float, se: float | None = None):
    out.append((metric, float(value), None if se is None else float(se)))


def _transformed_ks(out: list, tag: str, sample: np.ndarray, law) -> None:
    """KS of lam*omega_d*w(R) against Exp(1) truncated at the atom image,
    plus the gap between the empirical and exact atom mass."""
    zmax = law.transform(1.0)
    inner = sample[sample < 1.0]
    z = law.transform(inner)

    def trunc_cdf(t):
        return (1.0 - np.exp(-np.minimum(t, zmax))) / -np.expm1(-zmax)

    _rec(out, f"ks_{tag}", analytics.ks_statistic(z, trunc_cdf))
    atom = float(np.mean(sample == 1.0))
    n = sample.size
    _rec(out, f"atom_gap_{tag}", atom - law.atom_mass(),
         np.sqrt(max(atom * (1 - atom), law.atom_mass()) / n))


def _block_radius_convergence(cfg: ExperimentConfig, lam: float) -> list[tuple]:
    d = cfg.d
    if cfg.samples < 2:
        raise ConfigError("radius-convergence needs samples >= 2")
    rng = RngStream(cfg.seed).spawn("radius-convergence", d, float(lam))
    mu = ppp.uniform_radial_law(d)
    n = cfg.samples

    ball_law = analytics.RadiusLaw(d, lam)
    radii = models.sample_axis_radii(d, lam, mu, models.BALL, n, rng.spawn("process"))
    exact = ball_law.sample(n, rng.spawn("exact"))
    out: list[tuple] = []
    _transformed_ks(out, "ball_process", radii, ball_law)
    _transformed_ks(out, "ball_exact", exact, ball_law)
    from scipy.stats import ks_2samp

    _rec(out, "two_sample_ks_p", ks_2samp(radii, exact).pvalue)
    if d >= 2:
        hs_law = analytics.RadiusLaw(
            d, lam, miss_fn=lambda r: analytics.halfspace_uniform_weight(d, r))
        q = models.sample_axis_radii(d, lam, mu, models.HALF_SPACE, n,
                                     rng.spawn("hs-process"))
        _transformed_ks(out, "halfspace_process", q, hs_law)
    vq = analytics.expected_volume_quadrature(d, lam)
    vmc, se = analytics.radius_moment_volume(d, radii)
    _rec(out, "volume_mc", vmc, se)
    _rec(out, "volume_quadrature", vq)
    _rec(out, "volume_sigma_gap", (vmc - vq) / se)
    return out


def _hit_or_miss_ball_volume(d: int, lam: float, samples: int,
                             rng: RngStream) -> tuple[float, float]:
    """Brute-force volume of the ball-model intersection: uniform points in
    the unit ball tested against every pinned copy by squared distance.
    Independent of the star-radius route, so it closes the consistency
    triangle with the quadrature and radius-moment estimates."""
    mu = ppp.uniform_radial_law(d)
    reps = max(2, samples // 10)
    pts_per = 2000
    wd = unit_ball_volume(d)
    fracs = np.empty(reps)
    for i in range(reps):
        r = rng.spawn("real", i)
        real = models.sample_intersection_model(d, lam, mu, models.BALL, r)
        g = r.spawn("probe").gen
        x = g.standard_normal((pts_per, d))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        x *= g.random(pts_per)[:, None] ** (1.0 / d)
        if real.count == 0:
            fracs[i] = 1.0
            continue
        centers = real.pin_radii[:, None] * real.pin_dirs
        d2 = (np.sum(x * x, axis=1)[:, None] - 2.0 * x @ centers.T
              + np.sum(centers * centers, axis=1)[None, :])
        fracs[i] = np.mean(np.all(d2 <= 1.0 + 1e-12, axis=1))
    return wd * float(fracs.mean()), wd * float(fracs.std(ddof=1) / np.sqrt(reps))


def _block_volume_sweep(cfg: ExperimentConfig, lam: float) -> list[tuple]:
    d = cfg.d
    if cfg.samples < 2:
        raise ConfigError("volume-sweep needs samples >= 2")
    rng = RngStream(cfg.seed).spawn("volume-sweep", d, float(lam))
    out: list[tuple] = []
    vq = analytics.expected_volume_quadrature(d, lam)
    const = analytics.asymptotic_volume_constant(d)
    _rec(out, "volume_quadrature", vq)
    _rec(out, "scaled_volume", lam**d * vq)
    _rec(out, "asymptotic_constant", const)
    _rec(out, "rel_gap_to_limit", lam**d * vq / const - 1.0)
    if lam <= 1000.0:
        mu = ppp.uniform_radial_law(d)
        radii = models.sample_axis_radii(d, lam, mu, models.BALL, cfg.samples,
                                         rng.spawn("ball-mc"))
        vmc, se = analytics.radius_moment_volume(d, radii)
        _rec(out, "volume_mc", vmc, se)
        _rec(out, "volume_sigma_gap", (vmc - vq) / se)
    if lam <= 200.0:
        vhm, hm_se = _hit_or_miss_ball_volume(d, lam, cfg.samples,
                                              rng.spawn("hit-or-miss"))
        _rec(out, "volume_hit_or_miss", vhm, hm_se)
        _rec(out, "hit_or_miss_sigma_gap", (vhm - vq) / hm_se)
    if d == 2:
        # uniform pinned half-space model: E|I| = (4/(lam pi))(1 - e^{-lam pi^2/4})
        hq = 4.0 / (lam * np.pi) * -np.expm1(-lam * np.pi**2 / 4.0)
        _rec(out, "hs_scaled_volume_closed", lam * hq)
        if lam <= 1000.0:
            mu = ppp.uniform_radial_law(2)
            q = models.sample_axis_radii(2, lam, mu, models.HALF_SPACE, cfg.samples,
                                         rng.spawn("halfspace-mc"))
            hmc, hse = analytics.radius_moment_volume(2, q)
            _rec(out, "hs_scaled_volume_mc", lam * hmc, lam * hse)
            _rec(out, "hs_sigma_gap", (hmc - hq) / hse)
    return out


def _block_coupling(cfg: ExperimentConfig, lam: float) -> list[tuple]:
    if cfg.d != 2:
        raise ConfigError("the coupling experiment requires d = 2")
    if cfg.replicates < 2:
        raise ConfigError("coupling needs replicates >= 2")
    rng = RngStream(cfg.seed).spawn("coupling", 2, float(lam))
    grid = direction_grid(2, cfg.grid_size)
    eps = np.log(lam) ** 2 / (2.0 * lam)
    n = cfg.replicates
    haus = np.empty(n)
    flags = np.empty(n)
    occupied = 0
    contained = 0
    for i in range(n):
        r = rng.spawn(i)
        tess = ppp.sample_shell(2, lam / 2.0, eps, "both", r.spawn("tess"))
        outp = models.coupling_transform(tess, eps, r.spawn("bulk"), grid)
        haus[i] = outp.hausdorff_scaled
        flags[i] = outp.tess_cell.flagged_fraction
        pts = tess.points
        if pts.shape[0]:
            ang = np.arctan2(pts[:, 1], pts[:, 0])
            arcs = np.unique(np.minimum((ang + np.pi) * 3.0 / np.pi, 5.0).astype(int))
            occupied += arcs.size == 6
        contained += models.shell_containment_indicator(2, lam, r.spawn("contain"), grid)
    out: list[tuple] = []
    _rec(out, "coupling_eps", eps)
    _rec(out, "hausdorff_scaled_mean", haus.mean(), haus.std(ddof=1) / np.sqrt(n))
    _rec(out, "hausdorff_scaled_median", float(np.median(haus)))
    _rec(out, "hausdorff_scaled_p90", float(np.quantile(haus, 0.9)))
    _rec(out, "hausdorff_scaled_max", haus.max())
    _rec(out, "flagged_fraction_mean", flags.mean())
    frac = contained / n
    _rec(out, "containment_fraction", frac,
         np.sqrt(max(frac * (1 - frac), 1.0 / n) / n))
    # all six arcs of the shell occupied at least 1 - coupon_bound of the time
    occ = occupied / n
    _rec(out, "arc_occupancy_freq", occ, np.sqrt(max(occ * (1 - occ), 1.0 / n) / n))
    _rec(out, "arc_occupancy_floor", max(0.0, 1.0 - ppp.coupon_bound(6, 1.0 / 6.0, lam)))
    prob, ok = ppp.poisson_log_tail_check(lam, 2)
    _rec(out, "poisson_log_tail_prob", prob)
    _rec(out, "poisson_log_tail_ok", float(ok))
    return out


def _block_crofton(cfg: ExperimentConfig, rate: float) -> list[tuple]:
    d = cfg.d
    if d < 2:
        raise ConfigError("the crofton experiment requires d >= 2")
    if cfg.replicates < 2:
        raise ConfigError("crofton needs replicates >= 2")
    rng = RngStream(cfg.seed).spawn("crofton", d, float(rate))
    n = cfg.replicates
    vols = np.empty(n)
    enlargements = 0
    unbounded = 0
    done, attempt = 0, 0
    while done < n:
        try:
            cell = models.crofton_cell(d, rng.spawn("cell", attempt), radial_rate=rate)
        except models.UnboundedCellError:
            unbounded += 1
            attempt += 1
            if unbounded > max(100, n // 10):
                raise NumericalFailure("too many uncertifiable zero cells") from None
            continue
        vols[done] = cell.volume
        enlargements += cell.enlargements > 0
        done += 1
        attempt += 1
    if np.any(vols <= 0):
        raise NumericalFailure("degenerate zero cell with nonpositive volume")
    inv = 1.0 / vols
    scale = (2.0 / rate) ** d
    mean, mean_se = vols.mean(), vols.std(ddof=1) / np.sqrt(n)
    imean, imean_se = inv.mean(), inv.std(ddof=1) / np.sqrt(n)
    mom = analytics.crofton_moments(d)
    out: list[tuple] = []
    _rec(out, "zero_cell_volume_mean", mean, mean_se)
    _rec(out, "zero_cell_volume_exact", mom.zero_cell_mean * scale)
    # heavy upper tail: 1/volume of the zero cell has infinite variance, so
    # this estimator creeps up toward 1/E[V_typ] from below; diagnostic only
    _rec(out, "inverse_volume_mean", imean, imean_se)
    length = 3.0
    reps = max(2, min(8 * n, 64_000))
    cnt = np.array([models.segment_crossing_count(d, length, rng.spawn("chord", i),
                                                  radial_rate=rate)
                    for i in range(reps)], dtype=float)
    chat = cnt.mean() / length
    chat_se = cnt.std(ddof=1) / (length * np.sqrt(reps))
    typical = (2.0 / chat) ** d / unit_ball_volume(d)
    ratio = mean / typical
    ratio_se = ratio * np.sqrt((mean_se / mean) ** 2 + (d * chat_se / chat) ** 2)
    _rec(out, "chord_rate_mc", chat, chat_se)
    _rec(out, "chord_rate_exact", mom.chord_rate * rate / 2.0)
    _rec(out, "typical_mean_exact", mom.typical_mean * scale)
    _rec(out, "moment_ratio_est", ratio, ratio_se)
    _rec(out, "moment_ratio_exact", mom.moment_ratio)
    _rec(out, "enlargement_fraction", enlargements / n)
    _rec(out, "unbounded_count", unbounded)
    if d == 2:
        cl = np.array([models.segment_crossing_count(2, length, rng.spawn("seg", i),
                                                     radial_rate=2.0 * np.pi)
                       for i in range(min(reps, 4000))], dtype=float)
        _rec(out, "crossing_rate_classical", cl.mean() / length,
             cl.std(ddof=1) / (length * np.sqrt(cl.size)))
    return out


def _block_warmup(cfg: ExperimentConfig, lam: float) -> list[tuple]:
    if cfg.d != 1:
        raise ConfigError("the warmup-1d experiment requires d = 1")
    if cfg.replicates < 2:
        raise ConfigError("warmup-1d needs replicates >= 2")
    rng = RngStream(cfg.seed).spawn("warmup-1d", cfg.d, float(lam))
    st = models.interval_intersection_stats(lam, cfg.replicates, rng)
    out: list[tuple] = []
    n = cfg.replicates
    _rec(out, "scaled_length_mean", st["scaled_length_mean"],
         np.sqrt(st["scaled_length_var"] / n))
    _rec(out, "scaled_length_mean_exact", 2.0 * -np.expm1(-lam))
    _rec(out, "scaled_length_var", st["scaled_length_var"])
    _rec(out, "endpoint_corr", st["endpoint_corr"], 1.0 / np.sqrt(n))
    from scipy.special import gammainc

    z = lam * (st["hi"] - st["lo"])
    _rec(out, "ks_gamma2", analytics.ks_statistic(z, lambda x: gammainc(2.0, x)))
    return out


def _block_meeting(cfg: ExperimentConfig, lam: float) -> list[tuple]:
    if cfg.replicates < 2:
        raise ConfigError("meeting-counts needs replicates >= 2")
    rng = RngStream(cfg.seed).spawn("meeting-counts", cfg.d, float(lam))
    out: list[tuple] = []
    for model in models.MEETING_MODELS:
        mean, se, asym = models.meeting_count_mc(model, cfg.d, lam, cfg.eps,
                                                 cfg.replicates, rng.spawn(model))
        _rec(out, f"{model}_mean", mean, se)
        _rec(out, f"{model}_asymptotic", asym)
        _rec(out, f"{model}_sigma_gap", (mean - asym) / se)
    return out


_CONE_BETAS = (np.pi / 3.0, np.pi / 2.0, 2.0 * np.pi / 3.0)
_CONE_PROBE = 0.4
_CONE_SMALL_R = (0.16, 0.08, 0.04, 0.02)


def _block_cone(cfg: ExperimentConfig, lam: float) -> list[tuple]:
    if cfg.d != 2:
        raise ConfigError("the cone experiment requires d = 2")
    if cfg.samples < 2:
        raise ConfigError("cone needs samples >= 2")
    rng = RngStream(cfg.seed).spawn("cone", cfg.d, float(lam))
    mu = ppp.uniform_radial_law(2)
    r = _CONE_PROBE
    out: list[tuple] = []
    for beta in _CONE_BETAS:
        tag = f"beta_{beta:.4f}"
        shape = models.cone(beta)
        w, wse = analytics.miss_weight_mc(shape, mu, 2, r, 400_000,
                                          rng.spawn("weight", float(beta)))
        radii = models.sample_axis_radii(2, lam, mu, shape, cfg.samples,
                                         rng.spawn("radii", float(beta)))
        emp = float(np.mean(radii > r))
        emp_se = np.sqrt(max(emp * (1 - emp), 1.0 / cfg.samples) / cfg.samples)
        pred = np.exp(-lam * np.pi * w)
        pred_se = pred * lam * np.pi * wse
        _rec(out, f"{tag}_miss_weight", w, wse)
        _rec(out, f"{tag}_weight_closed_gap",
             w - analytics.cone_uniform_weight(beta, r), wse)
        _rec(out, f"{tag}_survival_emp", emp, emp_se)
        _rec(out, f"{tag}_survival_pred", pred, pred_se)
        _rec(out, f"{tag}_gap_sigma",
             (emp - pred) / np.sqrt(emp_se**2 + pred_se**2))
        # linear-coefficient probe: weight/r across shrinking r; in the
        # quadratic regime (which includes beta = pi/2, where the weight is
        # exactly pi r^2/4) the ratio keeps falling instead of stabilizing
        for rs in _CONE_SMALL_R:
            ws, wss = analytics.miss_weight_mc(shape, mu, 2, rs, 400_000,
                                               rng.spawn("small", float(beta), rs))
            _rec(out, f"{tag}_weight_over_r_{rs:.2f}", ws / rs, wss / rs)
        # volume scalings: lam^2 is the scale the linear-coefficient reading
        # would stabilize; lam^1 is the scale the quadratic weight implies
        vmc, vse = analytics.radius_moment_volume(2, radii)
        rr = 0.5 * np.sin(beta)
        coef = analytics.cone_uniform_weight(beta, rr) / rr**2
        vcl = -np.expm1(-lam * np.pi * coef) / (lam * coef)
        _rec(out, f"{tag}_scaled_volume_l2", lam**2 * vmc, lam**2 * vse)
        _rec(out, f"{tag}_scaled_volume_l1", lam * vmc, lam * vse)
        _rec(out, f"{tag}_volume_closed_l1", lam * vcl)
        _rec(out, f"{tag}_volume_sigma_gap", (vmc - vcl) / vse)
    return out


_BLOCKS = {
    "radius-convergence": _block_radius_convergence,
    "volume-sweep": _block_volume_sweep,
    "coupling": _block_coupling,
    "crofton": _block_crofton,
    "warmup-1d": _block_warmup,
    "meeting-counts": _block_meeting,
    "cone": _block_cone,
}


def _run_block(cfg: ExperimentConfig, lam: float) -> tuple[float, list[tuple], float]:
    t0 = time.perf_counter()
    metrics = _BLOCKS[cfg.experiment](cfg, lam)
    ms = (time.perf_counter() - t0) * 1000.0
    return lam, metrics, ms


def _worker_count(n_blocks: int) -> int:
    env = os.environ.get("RANDSET_THREADS", "")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError("RANDSET_THREADS must be an integer") from None
        if cap < 1:
            raise ConfigError("RANDSET_THREADS must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_blocks))


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Run all lambda blocks and flatten the metrics into records.

    The seed column holds each block's derived stream id, so any record can
    be regenerated in isolation; the replicate column indexes records
    within their block, making (experiment, lambda, replicate) unique.
    """
    workers = _worker_count(len(cfg.lambda_grid))
    results: dict[float, tuple[list[tuple], float]] = {}
    if workers == 1 or len(cfg.lambda_grid) == 1:
        for lam in cfg.lambda_grid:
            lam_, metrics, ms = _run_block(cfg, lam)
            results[lam_] = (metrics, ms)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for lam_, metrics, ms in pool.map(_run_block, [cfg] * len(cfg.lambda_grid),
                                              cfg.lambda_grid):
                results[lam_] = (metrics, ms)
    records: list[ExperimentRecord] = []
    for lam in cfg.lambda_grid:
        metrics, ms = results[lam]
        block_seed = RngStream(cfg.seed).spawn(cfg.experiment, cfg.d, float(lam)).stream_id
        for idx, (metric, value, se) in enumerate(metrics):
            records.append(ExperimentRecord(cfg.experiment, cfg.d, lam, idx,
                                            block_seed, metric, value, se, ms))
    bad = [r for r in records if not np.isfinite(r.value)
           or (r.std_error is not None and not np.isfinite(r.std_error))]
    if bad:
        raise NumericalFailure(
            f"non-finite metric value in {bad[0].metric} at lambda={bad[0].lam:g}")
    return records


def write_records(records: list[ExperimentRecord], path: str, fmt: str) -> None:
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in records:
                w.writerow(r.row())
        return
    payload = [{
        "experiment": r.experiment, "d": r.d, "lambda": r.lam,
        "replicate": r.replicate, "seed": r.seed, "metric": r.metric,
        "value": r.value, "std_error": r.std_error, "runtime_ms": r.runtime_ms,
    } for r in records]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="randset",
        description="Monte Carlo experiments for random intersection sets and "
                    "Poisson tessellation cells.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--d", type=int, dest="d")
    parser.add_argument("--lambda", dest="lambda_grid", metavar="GRID",
                        help="comma-separated intensity grid, e.g. 10,50,200")
    parser.add_argument("--replicates", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--grid-size", type=int, dest="grid_size")
    parser.add_argument("--eps", type=float)
    parser.add_argument("--out", dest="output_path")
    parser.add_argument("--format", choices=("csv", "json"))
    args = parser.parse_args(argv)

    try:
        file_options = parse_config_file(args.config) if args.config else {}
        cli_options = {k: v for k, v in vars(args).items()
                       if k not in ("experiment", "config")}
        if cli_options.get("lambda_grid") is not None:
            cli_options["lambda_grid"] = _parse_lambda_grid(cli_options["lambda_grid"])
        cfg = build_config(args.experiment, file_options, cli_options)
    except ConfigError as e:
        print(f"randset: config error: {e}", file=sys.stderr)
        return 2

    try:
        records = run_experiment(cfg)
    except ConfigError as e:
        print(f"randset: config error: {e}", file=sys.stderr)
        return 2
    except (NumericalFailure, models.UnboundedCellError) as e:
        print(f"randset: numerical failure: {e}", file=sys.stderr)
        return 3

    write_records(records, cfg.output_path, cfg.format)
    print(f"wrote {len(records)} records to {cfg.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
