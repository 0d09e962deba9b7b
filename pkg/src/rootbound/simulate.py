"""Monte-Carlo engine for the exponential-functional construction.

The geometric Brownian motion E_t = exp(B_t + sign*nu*t) is simulated by
exact Gaussian increments of X = log E^2; the Lamperti clock
A_t = integral of E^2 is accumulated by the trapezoid rule, and the
square-root-boundary crossing of the associated Bessel process happens at
the first t with E_t^2 <= (b + A_t)/c, whence sigma = A_tau.

Determinism contract: paths are partitioned into fixed blocks of
_BLOCK_SIZE, each block owning a Philox (counter-based) substream keyed by
(seed, stream_id, purpose, block index).  The partition depends only on
n_paths, so results are bit-identical no matter how many worker threads
execute the blocks.  Changing _BLOCK_SIZE changes the streams and therefore
the samples; it is a constant, not a knob.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .transforms import BesselSpec, Boundary

__all__ = [
    "SimConfig",
    "HittingSample",
    "HittingResult",
    "SampleSet",
    "PerpetuityResult",
    "AffinePairs",
    "gamma_sample",
    "sample_dufresne",
    "sample_hitting_time",
    "sample_hitting_times",
    "sample_perpetuity_truncated",
    "sample_perpetuities",
    "sample_affine_pair",
    "sample_affine_pairs",
    "gbm_path",
]

_BLOCK_SIZE = 4096

# substream purposes (third spawn-key component)
_P_HIT = 0
_P_Z1 = 1
_P_Z2 = 2
_P_PERP = 3
_P_GBM = 4

_PERP_REL_TOL = 1e-10


@dataclass(frozen=True)
class SimConfig:
    n_paths: int
    seed: int
    dt: float = 1e-4
    max_bm_time: float = 50.0
    stream_id: int = 0

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise DomainError("n_paths must be >= 1")
        if not (self.dt > 0.0):
            raise DomainError("dt must be positive")
        if self.max_bm_time < 100.0 * self.dt:
            raise DomainError("max_bm_time must be at least 100*dt")
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be nonnegative integers")


def _substream(cfg: SimConfig, purpose: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(cfg.stream_id, purpose, block))
    return np.random.Generator(np.random.Philox(ss))


def _blocks(n: int):
    for i, start in enumerate(range(0, n, _BLOCK_SIZE)):
        yield i, min(_BLOCK_SIZE, n - start)


def _run_blocks(cfg: SimConfig, purpose: int, worker, threads: int):
    """Execute worker(rng, block_size) per block, merge in block order."""
    tasks = [(i, size) for i, size in _blocks(cfg.n_paths)]

    def run(task):
        i, size = task
        return worker(_substream(cfg, purpose, i), size)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, tasks))
    return [run(t) for t in tasks]


# --- exact samplers ---------------------------------------------------------

def gamma_sample(alpha: float, rng: np.random.Generator, size=None):
    """Gamma(alpha, 1) draws: Marsaglia-Tsang squeeze for alpha >= 1,
    boosted by gamma_alpha = gamma_(alpha+1) * U^(1/alpha) below 1."""
    if not (alpha > 0.0) or not math.isfinite(alpha):
        raise DomainError("gamma_sample requires alpha > 0")
    scalar = size is None
    n = 1 if scalar else int(size)
    boost = alpha < 1.0
    a = alpha + 1.0 if boost else alpha
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        x = rng.standard_normal(pending.size)
        v = (1.0 + c * x) ** 3
        u = rng.random(pending.size)
        ok = v > 0.0
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(invalid="ignore", divide="ignore"):
            slow = np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(np.where(ok, v, 1.0)))
        accept = ok & (squeeze | slow)
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    if boost:
        out *= rng.random(n) ** (1.0 / alpha)
    return float(out[0]) if scalar else out


def sample_dufresne(nu: float, rng: np.random.Generator, size=None):
    """Exact draws of Z = 1/(2 gamma_nu), the law of the full perpetuity."""
    g = gamma_sample(nu, rng, size)
    return 0.5 / g if size is None else 0.5 / g


# --- path kernels -----------------------------------------------------------

def _hit_block(nu: float, sign: int, b: float, c: float, dt: float,
               max_steps: int, rng: np.random.Generator, n: int):
    """Crossing sampler for one block of paths.

    Endpoint crossings of X = log E^2 below the moving level log((b+A)/c)
    are refined by linear interpolation within the step.  Steps whose both
    endpoints stay above the level still cross with the Brownian-bridge
    probability exp(-d0*d1/(2dt)) (X has variance 4dt per step, boundary
    linearized), which one uniform per path per step tests; without this
    the missed-excursion bias scales like sqrt(dt) and dominates the MC
    error at the sample sizes the verification suite uses.
    """
    sq2 = 2.0 * math.sqrt(dt)
    drift = 2.0 * sign * nu * dt
    x = np.zeros(n)
    e2 = np.ones(n)
    acc = np.zeros(n)
    # distance of X above the boundary level, > 0 while alive
    dist = np.full(n, math.log(c / b))
    alive = np.arange(n)
    sigma = np.full(n, np.nan)
    crossed = np.zeros(n, dtype=bool)
    bm_time = np.full(n, np.nan)
    for step in range(1, max_steps + 1):
        z = rng.standard_normal(alive.size)
        u = rng.random(alive.size)
        x = x + sq2 * z + drift
        e2n = np.exp(x)
        accn = acc + 0.5 * dt * (e2 + e2n)
        dn = x - np.log((b + accn) / c)
        hit = dn <= 0.0
        bridge = ~hit & (np.log(u) < -dist * dn / (2.0 * dt))
        cross = hit | bridge
        if cross.any():
            d0 = dist[cross]
            d1 = dn[cross]
            # hit: root of the linear interpolant; bridge: both gaps
            # positive, weight toward the nearer endpoint
            theta = d0 / np.where(d1 <= 0.0, d0 - d1, d0 + d1)
            ids = alive[cross]
            sigma[ids] = acc[cross] + theta * (accn[cross] - acc[cross])
            crossed[ids] = True
            bm_time[ids] = (step - 1 + theta) * dt
            keep = ~cross
            x, e2, acc, dist, alive = x[keep], e2n[keep], accn[keep], dn[keep], alive[keep]
        else:
            e2, acc, dist = e2n, accn, dn
        if alive.size == 0:
            break
    bad = crossed & ~np.isfinite(sigma)
    if bad.any():
        crossed[bad] = False
        sigma[bad] = np.nan
    return sigma, crossed, bm_time


def _perp_block(nu: float, dt: float, max_steps: int, unit_steps: int,
                rng: np.random.Generator, n: int):
    sq2 = 2.0 * math.sqrt(dt)
    drift = -2.0 * nu * dt
    x = np.zeros(n)
    e2 = np.ones(n)
    acc = np.zeros(n)
    mark = np.zeros(n)
    alive = np.arange(n)
    values = np.empty(n)
    bounds = np.empty(n)
    capped = np.zeros(n, dtype=bool)
    for step in range(1, max_steps + 1):
        z = rng.standard_normal(alive.size)
        x = x + sq2 * z + drift
        e2n = np.exp(x)
        acc = acc + 0.5 * dt * (e2 + e2n)
        e2 = e2n
        if step % unit_steps == 0:
            inc = acc - mark
            rel = inc / acc
            done = rel < _PERP_REL_TOL
            if done.any():
                ids = alive[done]
                values[ids] = acc[done]
                bounds[ids] = rel[done]
                keep = ~done
                x, e2, acc, mark, alive = x[keep], e2[keep], acc[keep], mark[keep], alive[keep]
            mark = acc.copy()
            if alive.size == 0:
                break
    if alive.size:
        values[alive] = acc
        bounds[alive] = (acc - mark) / acc
        capped[alive] = True
    return values, bounds, capped


# --- result containers ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HittingSample:
    sigma: float
    crossed: bool
    bm_time_at_cross: float


@dataclass(frozen=True, eq=False)
class HittingResult:
    sigma: np.ndarray = field(repr=False)
    crossed: np.ndarray = field(repr=False)
    bm_time_at_cross: np.ndarray = field(repr=False)
    n_requested: int

    @property
    def excluded_fraction(self) -> float:
        return 1.0 - float(np.count_nonzero(self.crossed)) / self.n_requested

    @property
    def valid_sigma(self) -> np.ndarray:
        return self.sigma[self.crossed]


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray = field(repr=False)
    label: str
    seed: int
    n_requested: int
    n_valid: int

    def __post_init__(self) -> None:
        if self.n_valid > self.n_requested:
            raise DomainError("n_valid cannot exceed n_requested")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("sample values must be finite")

    def to_csv(self) -> str:
        lines = [
            f"# label: {self.label}",
            f"# seed: {self.seed}",
            f"# n_requested: {self.n_requested}",
            f"# n_valid: {self.n_valid}",
            "value",
        ]
        lines.extend(repr(float(v)) for v in self.values)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "label": self.label,
            "seed": self.seed,
            "n_requested": self.n_requested,
            "n_valid": self.n_valid,
            "values": [float(v) for v in self.values],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True, eq=False)
class PerpetuityResult:
    values: np.ndarray = field(repr=False)
    truncation_bounds: np.ndarray = field(repr=False)
    capped: np.ndarray = field(repr=False)

    @property
    def capped_fraction(self) -> float:
        return float(np.count_nonzero(self.capped)) / self.values.size


@dataclass(frozen=True, eq=False)
class AffinePairs:
    lhs: SampleSet
    rhs: SampleSet
    excluded_fraction: float


# --- public sampling API ----------------------------------------------------

def sample_hitting_time(spec: BesselSpec, bnd: Boundary, cfg: SimConfig,
                        rng: np.random.Generator | None = None) -> HittingSample:
    """One crossing time of R_u^2 = (b+u)/c (sigma in Bessel-clock units).

    With rng omitted, the draw uses the block-0 substream and equals the
    first path of a 1-path batch with the same config (the vectorized
    batch interleaves draws across paths, so it is not a prefix of larger
    batches).
    """
    if bnd.is_degenerate:
        return HittingSample(0.0, True, 0.0)
    if rng is None:
        rng = _substream(cfg, _P_HIT, 0)
    max_steps = int(round(cfg.max_bm_time / cfg.dt))
    sigma, crossed, bm = _hit_block(spec.nu, spec.sign, bnd.b, bnd.c,
                                    cfg.dt, max_steps, rng, 1)
    if crossed[0]:
        return HittingSample(float(sigma[0]), True, float(bm[0]))
    return HittingSample(math.nan, False, math.nan)


def sample_hitting_times(spec: BesselSpec, bnd: Boundary, cfg: SimConfig,
                         threads: int = 1) -> HittingResult:
    """n_paths crossings, block-parallel, deterministic merge by block index."""
    if bnd.is_degenerate:
        n = cfg.n_paths
        return HittingResult(np.zeros(n), np.ones(n, dtype=bool), np.zeros(n), n)
    max_steps = int(round(cfg.max_bm_time / cfg.dt))

    def worker(rng, size):
        return _hit_block(spec.nu, spec.sign, bnd.b, bnd.c, cfg.dt,
                          max_steps, rng, size)

    parts = _run_blocks(cfg, _P_HIT, worker, threads)
    sigma = np.concatenate([p[0] for p in parts])
    crossed = np.concatenate([p[1] for p in parts])
    bm = np.concatenate([p[2] for p in parts])
    return HittingResult(sigma, crossed, bm, cfg.n_paths)


def sample_perpetuity_truncated(nu: float, cfg: SimConfig,
                                rng: np.random.Generator | None = None) -> float:
    """One truncated perpetuity draw: A accumulated until the increment over
    the last unit of BM-time drops below 1e-10 of the total (or the time cap).
    """
    if not (nu > 0.0):
        raise DomainError("nu must be > 0")
    if rng is None:
        rng = _substream(cfg, _P_PERP, 0)
    max_steps = int(round(cfg.max_bm_time / cfg.dt))
    unit_steps = max(1, int(round(1.0 / cfg.dt)))
    values, _, _ = _perp_block(nu, cfg.dt, max_steps, unit_steps, rng, 1)
    return float(values[0])


def sample_perpetuities(nu: float, cfg: SimConfig, threads: int = 1) -> PerpetuityResult:
    if not (nu > 0.0):
        raise DomainError("nu must be > 0")
    max_steps = int(round(cfg.max_bm_time / cfg.dt))
    unit_steps = max(1, int(round(1.0 / cfg.dt)))

    def worker(rng, size):
        return _perp_block(nu, cfg.dt, max_steps, unit_steps, rng, size)

    parts = _run_blocks(cfg, _P_PERP, worker, threads)
    values = np.concatenate([p[0] for p in parts])
    bounds = np.concatenate([p[1] for p in parts])
    capped = np.concatenate([p[2] for p in parts])
    return PerpetuityResult(values, bounds, capped)


def sample_affine_pair(nu: float, bnd: Boundary, cfg: SimConfig,
                       rng: np.random.Generator | None = None):
    """One (lhs, rhs) draw of the affine identity
    b + Z = (b + sigma)(1 + Z'/c) in law.

    The batch API keys the three ingredients to distinct substreams; here a
    single rng is consumed sequentially, which preserves independence.
    """
    spec = BesselSpec(nu, -1)
    if rng is None:
        rng = _substream(cfg, _P_Z1, 0)
    z1 = sample_dufresne(nu, rng)
    z2 = sample_dufresne(nu, rng)
    hit = sample_hitting_time(spec, bnd, cfg, rng)
    if not hit.crossed:
        raise DomainError("path did not cross within max_bm_time; increase it")
    lhs = bnd.b + z1
    rhs = (bnd.b + hit.sigma) * (1.0 + z2 / bnd.c)
    return lhs, rhs


def sample_affine_pairs(nu: float, bnd: Boundary, cfg: SimConfig,
                        threads: int = 1) -> AffinePairs:
    """Batch lhs/rhs samples; non-crossed paths are dropped from rhs and
    reported via excluded_fraction."""
    spec = BesselSpec(nu, -1)
    hits = sample_hitting_times(spec, bnd, cfg, threads)
    z1 = sample_dufresne(nu, _substream(cfg, _P_Z1, 0), cfg.n_paths)
    z2 = sample_dufresne(nu, _substream(cfg, _P_Z2, 0), cfg.n_paths)
    lhs_vals = bnd.b + z1
    mask = hits.crossed
    rhs_vals = (bnd.b + hits.sigma[mask]) * (1.0 + z2[mask] / bnd.c)
    lhs = SampleSet(lhs_vals, "affine_lhs", cfg.seed, cfg.n_paths, cfg.n_paths)
    rhs = SampleSet(rhs_vals, "affine_rhs", cfg.seed, cfg.n_paths, int(mask.sum()))
    return AffinePairs(lhs, rhs, hits.excluded_fraction)


def gbm_path(nu: float, sign: int, n_steps: int, dt: float,
             rng: np.random.Generator):
    """One discretized path of (t, E^2, A) for diagnostics and tests."""
    if sign not in (-1, 1):
        raise DomainError("sign must be -1 or +1")
    z = rng.standard_normal(n_steps)
    x = np.concatenate([[0.0], np.cumsum(2.0 * math.sqrt(dt) * z + 2.0 * sign * nu * dt)])
    e2 = np.exp(x)
    acc = np.concatenate([[0.0], np.cumsum(0.5 * dt * (e2[1:] + e2[:-1]))])
    t = np.arange(n_steps + 1) * dt
    return t, e2, acc
