"""Monte Carlo harness built on the disk model.

Every trial ``t`` of an experiment uses the child stream ``stream.child(t)``,
and the same trial streams are reused across grid points, so estimates at
different densities are computed on coupled (nested) samples.  Trials can
be spread over worker threads; results are gathered in trial order, so the
output does not depend on the number of workers.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import bounds
from .model import (
    Direction,
    HeteroParams,
    build_clusters,
    component_stats,
    has_crossing,
    realize,
    simultaneous_crossing,
)
from .pointprocess import SeededStream, Window, sample_ppp

log = logging.getLogger(__name__)

Z95 = 1.959963984540054

__all__ = [
    "CrossingEstimate",
    "estimate_crossing_prob",
    "estimate_simultaneous",
    "LambdaCEstimate",
    "estimate_lambda_c",
    "SweepResult",
    "phase_diagram",
    "UniquenessRow",
    "uniqueness_ratio_experiment",
    "GuardZoneCertificate",
    "GuardZoneSearchFailed",
    "NoConvergence",
    "edge_closed_trial",
    "estimate_edge_closed",
    "guard_zone_search",
    "PdfCheck",
    "pdf_check",
]


class NoConvergence(RuntimeError):
    pass


def _run(fn, n: int, threads: int = 1) -> list:
    if threads is None or threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _half_width(successes: int, trials: int) -> float:
    p = successes / trials
    return Z95 * math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class CrossingEstimate:
    probability: float
    successes: int
    trials: int
    half_width_95: float
    direction: str
    network: str

    @classmethod
    def from_counts(cls, successes: int, trials: int, direction, network: str) -> "CrossingEstimate":
        if trials < 1:
            raise ValueError("trials must be >= 1")
        return cls(
            successes / trials, int(successes), int(trials),
            _half_width(successes, trials), Direction.parse(direction).value, network,
        )


def estimate_crossing_prob(
    density: float,
    diameter: float,
    window: Window,
    direction=Direction.LR,
    trials: int = 200,
    stream: SeededStream = SeededStream(0),
    threads: int = 1,
) -> CrossingEstimate:
    """Crossing probability of a plain Boolean model with connection distance ``diameter``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(t):
        pts = sample_ppp(density, window, stream.child(t))
        return has_crossing(build_clusters(pts, diameter, window), direction)

    hits = sum(_run(one, trials, threads))
    return CrossingEstimate.from_counts(hits, trials, direction, "single")


def _mean_crossing(density, diameter, window, trials, stream, threads, criterion):
    # fraction of trials crossing, averaged over the directions the criterion uses
    def one(t):
        lab = build_clusters(sample_ppp(density, window, stream.child(t)), diameter, window)
        lr = has_crossing(lab, Direction.LR)
        if criterion == "long":
            return float(lr)
        return 0.5 * (lr + has_crossing(lab, Direction.TB))

    return float(np.mean(_run(one, trials, threads)))


@dataclass(frozen=True)
class LambdaCEstimate:
    diameter: float
    estimate: float
    ci_low: float
    ci_high: float
    heights: tuple[float, ...]
    per_height: tuple[tuple[float, float, float, float], ...]  # (height, estimate, ci_low, ci_high)
    bracket: tuple[float, float]
    trials: int
    criterion: str

    @property
    def heights_consistent(self) -> bool:
        """Whether the per-height confidence intervals overlap."""
        lo = max(r[2] for r in self.per_height)
        hi = min(r[3] for r in self.per_height)
        return lo <= hi


def estimate_lambda_c(
    diameter: float,
    window_heights=(20.0, 40.0),
    trials: int = 200,
    stream: SeededStream = SeededStream(0),
    *,
    criterion: str = "mean",
    rel_tol: float = 2e-3,
    max_iter: int = 60,
    threads: int = 1,
) -> LambdaCEstimate:
    """Critical density of the Boolean model by bisection on crossing probability one half.

    For each height ``n`` (in length units) the window is ``[0, 2n] x [0, n]``.
    With ``criterion="mean"`` the statistic is the average of the L-R and T-B
    crossing probabilities of that window; ``"long"`` uses the L-R crossing
    alone, which at finite ``n`` crosses one half well above the critical
    density.  Samples are nested in density, so each estimated curve is
    monotone and bisection is well posed.  The confidence interval is the
    range of densities where the curve lies within the binomial 95% band
    around one half.
    """
    if not diameter > 0:
        raise ValueError("diameter must be positive")
    heights = tuple(float(h) for h in window_heights)
    if len(heights) < 2:
        raise ValueError("need at least two window heights for the consistency check")
    if criterion not in ("mean", "long"):
        raise ValueError("criterion must be 'mean' or 'long'")
    band = Z95 * 0.5 / math.sqrt(trials)
    rows = []
    for h_idx, h in enumerate(heights):
        window = Window.from_size(2.0 * h, h)
        sub = stream.child(h_idx)
        cache: dict[float, float] = {}

        def curve(lam):
            if lam not in cache:
                cache[lam] = _mean_crossing(lam, diameter, window, trials, sub, threads, criterion)
            return cache[lam]

        hi = 1.0 / diameter**2
        for _ in range(max_iter):
            if curve(hi) > 0.5 + band:
                break
            hi *= 2.0
        else:
            raise NoConvergence(f"could not bracket the critical density at height {h}")

        def solve(level, lo, hi):
            for _ in range(max_iter):
                if hi - lo <= rel_tol * hi:
                    return lo, hi
                mid = 0.5 * (lo + hi)
                if curve(mid) < level:
                    lo = mid
                else:
                    hi = mid
            raise NoConvergence(f"bisection did not reach rel_tol={rel_tol} at height {h}")

        b_lo, b_hi = solve(0.5, 0.0, hi)
        c_lo = solve(0.5 - band, 0.0, hi)[0]
        c_hi = solve(0.5 + band, 0.0, hi)[1]
        rows.append((h, 0.5 * (b_lo + b_hi), c_lo, c_hi, (b_lo, b_hi)))
        log.info("height %g: lambda_c in [%g, %g], CI [%g, %g]", h, b_lo, b_hi, c_lo, c_hi)
    best = rows[int(np.argmax(heights))]
    return LambdaCEstimate(
        diameter=float(diameter),
        estimate=best[1],
        ci_low=best[2],
        ci_high=best[3],
        heights=heights,
        per_height=tuple(r[:4] for r in rows),
        bracket=best[4],
        trials=trials,
        criterion=criterion,
    )


def _sim_trial(params: HeteroParams, stream: SeededStream, direction, guard_margin=None):
    rz = realize(params, stream, guard_margin)
    return simultaneous_crossing(rz, params, direction)


def estimate_simultaneous(
    params: HeteroParams,
    trials: int = 200,
    stream: SeededStream = SeededStream(0),
    direction=Direction.LR,
    threads: int = 1,
) -> dict[str, CrossingEstimate]:
    """Crossing estimates for the primary network, the secondary network and both at once."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    res = _run(lambda t: _sim_trial(params, stream.child(t), direction), trials, threads)
    p = sum(a for a, _ in res)
    s = sum(b for _, b in res)
    both = sum(a and b for a, b in res)
    return {
        "primary": CrossingEstimate.from_counts(p, trials, direction, "primary"),
        "secondary": CrossingEstimate.from_counts(s, trials, direction, "secondary"),
        "both": CrossingEstimate.from_counts(both, trials, direction, "both"),
    }


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[HeteroParams, ...]
    estimates: tuple[dict, ...]
    bound_overlay: tuple[bounds.BoundReport, ...]
    master_seed: int
    trials: int
    direction: str

    def rows(self) -> list[dict]:
        """One flat record per grid point, in grid (lambda_p-major) order."""
        out = []
        for params, est, rep in zip(self.grid, self.estimates, self.bound_overlay):
            row = {
                "lambda_p": params.lambda_p,
                "lambda_s": params.lambda_s,
                "p_cross_primary": est["primary"].probability,
                "p_cross_secondary": est["secondary"].probability,
                "p_cross_both": est["both"].probability,
                "ci_primary": est["primary"].half_width_95,
                "ci_secondary": est["secondary"].half_width_95,
                "ci_both": est["both"].half_width_95,
            }
            for k, v in rep.as_dict().items():
                if k not in ("lambda_p", "lambda_s"):
                    row["bound_" + k] = v
            out.append(row)
        return out


def phase_diagram(
    D_t: float,
    d_t: float,
    D_f: float,
    lambda_p_values,
    lambda_s_values,
    window: Window,
    trials: int = 200,
    stream: SeededStream = SeededStream(0),
    *,
    direction=Direction.LR,
    threads: int = 1,
    critical: bounds.CriticalConstant = bounds.DEFAULT_CRITICAL,
    p8: float = bounds.P8_SITE,
) -> SweepResult:
    """Monte Carlo crossing estimates over a ``(lambda_p, lambda_s)`` grid, with bound overlay.

    The grid is ordered lambda_p-major.  Trial ``t`` uses the same stream at
    every grid point, so along each axis the samples are nested.
    """
    lp = [float(v) for v in lambda_p_values]
    ls = [float(v) for v in lambda_s_values]
    if not lp or not ls:
        raise ValueError("grid must be non-empty")
    grid = tuple(HeteroParams(D_t, d_t, D_f, a, b, window) for a in lp for b in ls)
    estimates = tuple(estimate_simultaneous(p, trials, stream, direction, threads) for p in grid)
    overlay = tuple(bounds.bound_report(p, critical, p8) for p in grid)
    return SweepResult(grid, estimates, overlay, stream.master_seed, trials, Direction.parse(direction).value)


@dataclass(frozen=True)
class UniquenessRow:
    window_size: float
    network: str
    mean_ratio: float
    half_width_95: float
    mean_largest_fraction: float
    trials: int


def _ratio(labeling) -> tuple[float, float]:
    largest, second, _ = component_stats(labeling)
    if largest == 0:
        return 0.0, 0.0
    return second / largest, largest / labeling.n_nodes


def uniqueness_ratio_experiment(
    params: HeteroParams,
    window_sizes,
    trials: int = 200,
    stream: SeededStream = SeededStream(0),
    networks=("primary", "secondary"),
    *,
    threads: int = 1,
    critical: bounds.CriticalConstant = bounds.DEFAULT_CRITICAL,
) -> list[UniquenessRow]:
    """Mean second-largest / largest component size ratio on growing square windows.

    ``params.window`` is ignored; each size ``s`` uses ``[0, s]^2``.  Empty
    realizations contribute ratio 0.
    """
    if "primary" in networks and params.lambda_p <= bounds.lambda_c_scaled(params.D_t, critical):
        warnings.warn("primary density is not supercritical", stacklevel=2)
    if "secondary" in networks and params.lambda_s <= bounds.lambda_c_scaled(params.d_t, critical):
        warnings.warn("secondary density is not supercritical", stacklevel=2)
    rows = []
    for s_idx, size in enumerate(window_sizes):
        p = params.replace(window=Window.from_size(size))
        sub = stream.child(s_idx)

        def one(t):
            rz = realize(p, sub.child(t))
            out = {}
            if "primary" in networks:
                out["primary"] = _ratio(build_clusters(rz.primary, p.D_t, p.window))
            if "secondary" in networks:
                out["secondary"] = _ratio(build_clusters(rz.active_secondary, p.d_t, p.window))
            return out

        res = _run(one, trials, threads)
        for net in networks:
            r = np.array([x[net][0] for x in res])
            frac = np.array([x[net][1] for x in res])
            hw = Z95 * r.std(ddof=1) / math.sqrt(trials) if trials > 1 else math.inf
            rows.append(UniquenessRow(float(size), net, float(r.mean()), float(hw), float(frac.mean()), trials))
    return rows


# --- guard-zone certification via the bond discretization -----------------


def edge_closed_trial(ell: float, d_t: float, lambda_s: float, stream: SeededStream) -> bool:
    """One draw of the secondary-only edge event; True when it fails.

    The edge rectangle is ``[0, 1.5 ell] x [0, 0.5 ell]``.  It needs an L-R
    crossing of the whole rectangle and T-B crossings of the two end squares
    ``[0, ell/2]`` and ``[ell, 3 ell/2]`` (horizontally), each built only from
    secondary nodes inside the respective region.
    """
    rect = Window(0.0, 0.0, 1.5 * ell, 0.5 * ell)
    pts = sample_ppp(lambda_s, rect, stream)
    if not has_crossing(build_clusters(pts, d_t, rect), Direction.LR):
        return True
    for sq in (Window(0.0, 0.0, 0.5 * ell, 0.5 * ell), Window(ell, 0.0, 1.5 * ell, 0.5 * ell)):
        if not has_crossing(build_clusters(pts.restrict(sq), d_t, sq), Direction.TB):
            return True
    return False


def estimate_edge_closed(ell, d_t, lambda_s, trials, stream, threads=1) -> int:
    """Number of failed edge events in ``trials`` independent draws."""
    return int(sum(_run(lambda t: edge_closed_trial(ell, d_t, lambda_s, stream.child(t)), trials, threads)))


def _upper_95(failures: int, trials: int) -> float:
    # one-sided Clopper-Pearson upper limit
    if failures >= trials:
        return 1.0
    return float(stats.beta.ppf(0.95, failures + 1, trials - failures))


@dataclass(frozen=True)
class GuardZoneCertificate:
    ell: float
    D_f: float
    estimated_prob_A_closed: float
    prob_A_closed_upper: float
    q_bound: float
    threshold: float
    certified: bool
    D_t: float
    d_t: float
    lambda_p: float
    lambda_s: float
    trials: int
    failures: int
    ell_history: tuple = field(default=())
    notes: tuple = field(default=())


class GuardZoneSearchFailed(RuntimeError):
    def __init__(self, message: str, certificate: GuardZoneCertificate):
        super().__init__(message)
        self.certificate = certificate


def guard_zone_search(
    lambda_p: float,
    lambda_s: float,
    D_t: float,
    d_t: float,
    trials: int = 20000,
    stream: SeededStream = SeededStream(0),
    *,
    ell_factor: float = 1.05,
    ell_growth: float = 1.25,
    max_ell_steps: int = 12,
    bisect_iter: int = 60,
    threads: int = 1,
    critical: bounds.CriticalConstant = bounds.DEFAULT_CRITICAL,
) -> GuardZoneCertificate:
    """Find a lattice spacing and a positive guard radius that pass the Peierls criterion.

    1. Starting just above ``2 (2 D_t + d_t)``, the spacing grows until the
       one-sided 95% upper limit on the edge-failure probability is below a
       third of the threshold.
    2. The guard radius is halved from ``d_t`` until the closed-edge bound is
       below the threshold, then refined by bisection towards the largest
       certified value.

    The upper limit, not the point estimate, enters the bound.

    Raises
    ------
    GuardZoneSearchFailed
        if no spacing in the budget drives the failure probability low
        enough; the uncertified certificate is attached.
    """
    threshold = bounds.peierls_threshold()
    notes = []
    if lambda_p <= bounds.lambda_c_scaled(D_t, critical):
        notes.append("lambda_p not above the primary critical density")
    if lambda_s <= bounds.lambda_c_scaled(d_t, critical):
        notes.append("lambda_s not above the secondary critical density")
    for n in notes:
        log.warning(n)
    ell_min = 2.0 * (2.0 * D_t + d_t)
    ell = ell_factor * ell_min
    history = []
    for step in range(max_ell_steps):
        failures = estimate_edge_closed(ell, d_t, lambda_s, trials, stream.child(step), threads)
        upper = _upper_95(failures, trials)
        history.append((ell, failures, trials, upper))
        log.info("ell=%g: %d/%d edge failures (upper %.3g)", ell, failures, trials, upper)
        if upper < threshold / 3.0:
            break
        ell *= ell_growth
    else:
        ell, failures, _, upper = history[-1]
        cert = GuardZoneCertificate(
            ell, 0.0, failures / trials, upper, min(2.0 * upper, 1.0), threshold, False,
            D_t, d_t, lambda_p, lambda_s, trials, failures, tuple(history), tuple(notes),
        )
        raise GuardZoneSearchFailed(
            f"edge failure probability stayed above {threshold / 3:.3g} up to ell={ell:.4g}", cert
        )

    def q(D):
        return bounds.peierls_q_bound(bounds.PeierlsParams(ell, D, upper, lambda_p, lambda_s, d_t))

    # q is increasing in D with q(0) = 2 * upper < threshold
    lo, hi = 0.0, d_t
    if q(hi) < threshold:
        while q(hi) < threshold and hi < ell:
            lo, hi = hi, 2.0 * hi
    else:
        while q(hi) >= threshold:
            hi *= 0.5
            if hi == 0.0:
                break
        lo, hi = hi, 2.0 * hi
    for _ in range(bisect_iter):
        mid = 0.5 * (lo + hi)
        if q(mid) < threshold:
            lo = mid
        else:
            hi = mid
    D_f = lo
    qb = q(D_f)
    certified = qb < threshold and ell > ell_min and D_f > 0
    assert not certified or (qb < threshold and ell > ell_min)
    return GuardZoneCertificate(
        ell, D_f, failures / trials, upper, qb, threshold, certified,
        D_t, d_t, lambda_p, lambda_s, trials, failures, tuple(history), tuple(notes),
    )


@dataclass(frozen=True)
class PdfCheck:
    side: float
    samples: int
    ks_statistic: float
    normalization_residual: float
    seam_gap: float


def pdf_check(side: float, samples: int = 1_000_000, stream: SeededStream = SeededStream(0)) -> PdfCheck:
    """Compare simulated pair distances in ``[0, side]^2`` with the analytic density.

    Reports the Kolmogorov-Smirnov distance to the quadrature CDF, the
    deviation of the total mass from one, and the gap between the two
    analytic branches at ``t = side``.
    """
    from scipy.interpolate import PchipInterpolator

    from .geometry import integrate, pair_distance_cdf_table, pair_distance_pdf, pair_distance_pdf_branches

    rng = stream.generator()
    u = rng.uniform(0.0, side, size=(samples, 2, 2))
    d = np.sort(np.hypot(u[:, 0, 0] - u[:, 1, 0], u[:, 0, 1] - u[:, 1, 1]))
    ts, cdf = pair_distance_cdf_table(side)
    F = np.clip(PchipInterpolator(ts, cdf)(d), 0.0, 1.0)
    i = np.arange(1, samples + 1)
    ks = float(max(np.max(i / samples - F), np.max(F - (i - 1) / samples)))
    top = math.sqrt(2.0) * side
    mass = integrate(lambda t: pair_distance_pdf(t, side), 0.0, side) + integrate(
        lambda t: pair_distance_pdf(t, side), side, top
    )
    first, second = pair_distance_pdf_branches(side, side)
    return PdfCheck(float(side), int(samples), ks, abs(mass - 1.0), abs(first - second))
