"""Named, seeded pass/fail verifications of every distributional identity.

Each check compares two independent routes to the same quantity: exact
sampler vs closed-form CDF, path simulation vs Mellin transform, quadrature
vs series special functions, or the two index signs against each other.
A report never averages the routes together; it measures their gap.

Checks own disjoint RNG streams (fixed per-check stream ids), so the suite
is reproducible as a whole and check-by-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, RootboundError
from .inversion import (
    InversionConfig,
    build_contour_table,
    cdf_from_density,
    default_grid,
    density_curve,
)
from .numerics import (
    ks_critical_value,
    ks_one_sample,
    ks_two_sample,
    regularized_incomplete_gamma_upper,
)
from .simulate import (
    Boundary,
    SimConfig,
    sample_affine_pairs,
    sample_hitting_times,
    sample_perpetuities,
)
from .transforms import (
    BesselSpec,
    duality_residual,
    gamma_expectation,
    gamma_expectation_via_u,
    mellin_transform,
)

__all__ = [
    "VerificationReport",
    "verify_dufresne",
    "verify_affine",
    "verify_transform_mc",
    "verify_duality",
    "verify_whittaker",
    "verify_inversion",
    "run_all",
    "reports_to_json",
    "reports_to_text",
]

# per-check stream ids, so checks sharing a seed never share paths
_STREAM_DUFRESNE = 1
_STREAM_AFFINE = 2
_STREAM_TRANSFORM = 3
_STREAM_INVERSION = 4

_KS_LEVEL = 0.99


@dataclass(frozen=True)
class VerificationReport:
    name: str
    params: dict
    statistic: float
    threshold: float
    passed: bool
    n_samples: int
    seed: int
    notes: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "passed": self.passed,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "notes": self.notes,
        }


def _report(name: str, params: dict, statistic: float, threshold: float,
            n_samples: int, seed: int, notes: str) -> VerificationReport:
    return VerificationReport(name, params, float(statistic), float(threshold),
                              bool(statistic <= threshold), int(n_samples),
                              int(seed), notes)


def reports_to_json(reports) -> str:
    payload = [r.to_dict() for r in reports]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def reports_to_text(reports) -> str:
    lines = [f"{'check':<14} {'statistic':>14} {'threshold':>14} verdict"]
    for r in reports:
        verdict = "pass" if r.passed else "FAIL"
        lines.append(f"{r.name:<14} {r.statistic:>14.6g} {r.threshold:>14.6g} {verdict}")
    n_bad = sum(not r.passed for r in reports)
    lines.append(f"{len(reports)} checks, {n_bad} failed")
    return "\n".join(lines) + "\n"


def verify_dufresne(nu: float, N: int, seed: int, dt: float = 1e-3,
                    max_bm_time: float = 50.0, control_shift: float = 0.0,
                    threads: int = 1) -> VerificationReport:
    """KS test of truncated-perpetuity draws against the inverse-gamma law
    F(y) = Q(nu, 1/(2y)).  control_shift perturbs the reference nu only
    (negative control)."""
    if N < 10_000:
        raise RootboundError("need N >= 10^4 for the asymptotic KS threshold")
    cfg = SimConfig(n_paths=N, seed=seed, dt=dt, max_bm_time=max_bm_time,
                    stream_id=_STREAM_DUFRESNE)
    res = sample_perpetuities(nu, cfg, threads=threads)
    nu_ref = nu + control_shift

    def cdf(y):
        return regularized_incomplete_gamma_upper(nu_ref, 0.5 / np.asarray(y))

    stat = ks_one_sample(res.values, cdf)
    threshold = ks_critical_value(N, _KS_LEVEL)
    notes = (f"capped_fraction={res.capped_fraction:.3e}; "
             f"max_truncation_bound={float(res.truncation_bounds.max()):.3e}")
    if control_shift:
        notes += f"; control_shift={control_shift!r}"
    params = {"nu": nu, "N": N, "dt": dt, "max_bm_time": max_bm_time,
              "control_shift": control_shift}
    return _report("dufresne", params, stat, threshold, N, seed, notes)


def verify_affine(nu: float, bnd: Boundary, N: int, dt: float, seed: int,
                  control_b_shift: float = 0.0, threads: int = 1) -> VerificationReport:
    """Two-sample KS between b + Z and (b + sigma)(1 + Z'/c).

    control_b_shift builds the rhs from a shifted boundary while the lhs
    keeps the true b (negative control)."""
    if N < 10_000:
        raise RootboundError("need N >= 10^4 for the asymptotic KS threshold")
    cfg = SimConfig(n_paths=N, seed=seed, dt=dt, stream_id=_STREAM_AFFINE)
    bnd_rhs = Boundary(bnd.b + control_b_shift, bnd.c) if control_b_shift else bnd
    pairs = sample_affine_pairs(nu, bnd_rhs, cfg, threads=threads)
    lhs = pairs.lhs.values - control_b_shift  # undo the shift on the Z side
    rhs = pairs.rhs.values
    stat = ks_two_sample(lhs, rhs)
    n_eff = lhs.size * rhs.size / (lhs.size + rhs.size)
    threshold = ks_critical_value(n_eff, _KS_LEVEL)
    notes = f"excluded_fraction={pairs.excluded_fraction:.3e}"
    if pairs.excluded_fraction > 1e-3:
        notes += "; WARNING: excluded fraction exceeds 1e-3"
    if control_b_shift:
        notes += f"; control_b_shift={control_b_shift!r}"
    params = {"nu": nu, "b": bnd.b, "c": bnd.c, "N": N, "dt": dt,
              "control_b_shift": control_b_shift}
    return _report("affine", params, stat, threshold, N, seed, notes)


def verify_transform_mc(spec: BesselSpec, bnd: Boundary, s_grid, N: int,
                        dt: float, seed: int, perturbation: float = 0.0,
                        threads: int = 1) -> VerificationReport:
    """Max z-score over s of |MC mean of (b+sigma)^(-s) - closed form| / SE.

    perturbation scales the closed form by (1 + perturbation) (negative
    control)."""
    cfg = SimConfig(n_paths=N, seed=seed, dt=dt, stream_id=_STREAM_TRANSFORM)
    hits = sample_hitting_times(spec, bnd, cfg, threads=threads)
    y = bnd.b + hits.valid_sigma
    n = y.size
    zs = []
    for s in s_grid:
        w = y ** (-float(s))
        mean = float(w.mean())
        se = float(w.std(ddof=1)) / math.sqrt(n)
        closed = float(mellin_transform(spec, bnd, float(s))) * (1.0 + perturbation)
        zs.append(abs(mean - closed) / se)
    stat = max(zs)
    notes = (f"excluded_fraction={hits.excluded_fraction:.3e}; "
             f"z_scores=[{', '.join(f'{z:.3f}' for z in zs)}]")
    if hits.excluded_fraction > 1e-3:
        notes += "; WARNING: excluded fraction exceeds 1e-3"
    if perturbation:
        notes += f"; perturbation={perturbation!r}"
    params = {"nu": spec.nu, "sign": spec.sign, "b": bnd.b, "c": bnd.c,
              "s_grid": [float(s) for s in s_grid], "N": N, "dt": dt,
              "perturbation": perturbation}
    return _report("transform-mc", params, stat, 3.5, N, seed, notes)


def verify_duality(nu: float, bnd: Boundary, s_grid) -> VerificationReport:
    """Max residual of the index-duality relation over a grid of real s."""
    residuals = [duality_residual(nu, bnd, float(s)) for s in s_grid]
    stat = max(residuals)
    params = {"nu": nu, "b": bnd.b, "c": bnd.c,
              "s_grid": [float(s) for s in s_grid]}
    notes = "deterministic evaluation; no sampling"
    return _report("duality", params, stat, 1e-10, 0, 0, notes)


def _whittaker_grid(seed: int, size: int = 20):
    """Seeded (alpha, beta, p) triples; the second Tricomi parameter
    alpha+1-p is kept away from integers (the connection formula divides
    by sin(pi*(alpha+1-p)), amplifying roundoff by ~1/(pi*dist), so a
    0.05 margin preserves the series route's 8-digit budget), and
    beta >= 0.1 keeps z = 1/(2 beta) <= 5 where the series converges."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    grid = []
    while len(grid) < size:
        alpha = 0.3 + 4.7 * rng.random()
        beta = 0.1 + 1.9 * rng.random()
        p = 0.3 + 3.7 * rng.random()
        second = alpha + 1.0 - p
        if abs(second - round(second)) < 0.05:
            continue
        grid.append((alpha, beta, p))
    return grid


def verify_whittaker(param_grid=None, seed: int = 0) -> VerificationReport:
    """Max relative gap between the direct quadrature route and the
    Tricomi-U (Whittaker) route to E[(1+2*beta*gamma_alpha)^(-p)]."""
    grid = list(param_grid) if param_grid is not None else _whittaker_grid(seed)
    rels = []
    for alpha, beta, p in grid:
        direct = gamma_expectation(alpha, beta, p)
        via_u = gamma_expectation_via_u(alpha, beta, p)
        rels.append(abs(direct - via_u) / abs(direct))
    stat = max(rels)
    params = {"grid": [[float(a), float(b), float(p)] for a, b, p in grid]}
    notes = "integral route vs confluent-hypergeometric route"
    return _report("whittaker", params, stat, 1e-7, len(grid), seed, notes)


def _flipped_cdf_statistic(spec, bnd, cfg, samples, threads: int) -> tuple[float, str]:
    """Negative control: invert with the conjugate phase (wrong orientation)
    and measure the KS distance of the samples against whatever comes out."""
    table = build_contour_table(spec, bnd, cfg, threads=threads)
    ys = default_grid(spec, bnd, table=table)
    w = np.full(table.t_nodes.size, cfg.step)
    w[0] *= 0.5
    w[-1] *= 0.5
    mw = table.m_values * w
    phase = np.exp(-1j * np.outer(np.log(ys), table.t_nodes))
    dens = (phase @ mw).real * ys ** (cfg.contour_abscissa - 1.0) / math.pi
    dens = np.clip(dens, 0.0, None)
    mass = float(np.trapezoid(dens, ys))
    if not (0.99 <= mass <= 1.01):
        return math.inf, f"flipped orientation broke normalization (mass={mass:.4f})"
    cdf_vals = np.concatenate([[0.0], np.cumsum(np.diff(ys) * 0.5 * (dens[1:] + dens[:-1]))])
    stat = ks_one_sample(samples, lambda y: np.interp(y, ys, cdf_vals, left=0.0,
                                                      right=cdf_vals[-1]))
    return stat, "flipped orientation"


def verify_inversion(spec: BesselSpec, bnd: Boundary, N: int,
                     cfg: InversionConfig | None = None, seed: int = 0,
                     dt: float = 2e-4, orientation: int = 1,
                     threads: int = 1) -> VerificationReport:
    """KS test of simulated b + sigma against the CDF obtained by inverting
    the closed-form transform.  orientation=-1 flips the inversion phase
    (negative control)."""
    cfg = cfg or InversionConfig()
    sim = SimConfig(n_paths=N, seed=seed, dt=dt, stream_id=_STREAM_INVERSION)
    hits = sample_hitting_times(spec, bnd, sim, threads=threads)
    samples = bnd.b + hits.valid_sigma
    threshold = ks_critical_value(samples.size, _KS_LEVEL) + 0.01
    params = {"nu": spec.nu, "sign": spec.sign, "b": bnd.b, "c": bnd.c,
              "N": N, "dt": dt, "contour_abscissa": cfg.contour_abscissa,
              "half_height": cfg.half_height, "step": cfg.step,
              "orientation": orientation}
    if orientation == -1:
        try:
            stat, extra = _flipped_cdf_statistic(spec, bnd, cfg, samples, threads)
        except NormalizationError as exc:
            stat, extra = math.inf, f"flipped orientation raised: {exc}"
        notes = f"excluded_fraction={hits.excluded_fraction:.3e}; {extra}"
        return _report("inversion", params, stat, threshold, N, seed, notes)
    curve = density_curve(spec, bnd, icfg=cfg, threads=threads)
    cdf = cdf_from_density(curve)
    stat = ks_one_sample(samples, cdf.evaluate)
    notes = (f"excluded_fraction={hits.excluded_fraction:.3e}; "
             f"truncation_error={curve.truncation_error:.3e}")
    return _report("inversion", params, stat, threshold, N, seed, notes)


_ALL_CHECKS = ("dufresne", "affine", "transform-mc", "duality", "whittaker",
               "inversion")


def run_all(seed: int, threads: int = 1, checks=None) -> list[VerificationReport]:
    """The pinned default suite.  Parameters are fixed here (and echoed in
    each report) so a (seed, check list) pair fully determines the output."""
    selected = _ALL_CHECKS if checks is None else tuple(checks)
    unknown = [c for c in selected if c not in _ALL_CHECKS]
    if unknown:
        raise RootboundError(f"unknown checks: {unknown}")
    bnd = Boundary(0.25, 1.0)
    neg = BesselSpec(0.5, -1)
    out = []
    for name in selected:
        if name == "dufresne":
            out.append(verify_dufresne(1.0, 30_000, seed, dt=1e-3, threads=threads))
        elif name == "affine":
            out.append(verify_affine(0.5, bnd, 20_000, 5e-4, seed, threads=threads))
        elif name == "transform-mc":
            # dt=1e-4 keeps the time-discretization bias of the sigma samples
            # near 1 SE at this N (it roughly doubles at 2e-4)
            out.append(verify_transform_mc(neg, bnd, (0.5, 1.0, 2.0), 20_000,
                                           1e-4, seed, threads=threads))
        elif name == "duality":
            out.append(verify_duality(0.5, bnd, (0.5, 1.0, 2.0)))
        elif name == "whittaker":
            out.append(verify_whittaker(seed=seed))
        elif name == "inversion":
            # coarser contour step: the phase factor stays well sampled and
            # the table costs half as much as the library default
            cfg = InversionConfig(step=0.2)
            out.append(verify_inversion(neg, bnd, 30_000, cfg, seed,
                                        threads=threads))
    return out
