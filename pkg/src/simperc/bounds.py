"""Closed-form necessary and sufficient density conditions.

Intensity-valued bounds follow one convention: when the defining logarithm
degenerates the feasible set is empty and the bound is reported as ``0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

from .geometry import integrate, lens_area, pair_distance_pdf
from .model import HeteroParams

log = logging.getLogger(__name__)

__all__ = [
    "CriticalConstant",
    "DEFAULT_CRITICAL",
    "P8_SITE",
    "NotApplicable",
    "lambda_c_scaled",
    "necessary_vacancy_bound",
    "subsquare_count",
    "necessary_site_bound",
    "necessary_site_bound_printed_cor",
    "box_side",
    "dependency_range",
    "k_dependent_threshold",
    "sufficient_p_tilde",
    "SufficientCheck",
    "sufficient_condition_check",
    "sufficient_simple_bound",
    "peierls_threshold",
    "peierls_series",
    "PeierlsParams",
    "peierls_q_bound",
    "peierls_guard_radius",
    "BoundReport",
    "bound_report",
]

# critical site probability of the 8-neighbour square lattice, via the matching
# lattice identity p_c(8-nbr) = 1 - p_c(4-nbr site), with p_c(4-nbr site) = 0.59274621
P8_SITE = 1.0 - 0.59274621


class NotApplicable(ValueError):
    """The hypothesis of a bound fails, so the bound says nothing."""


@dataclass(frozen=True)
class CriticalConstant:
    """Critical density of the Boolean model with unit connection distance."""

    lambda_c_unit: float = 1.436
    source: str = "literature value (filling factor 1.1281 for disks of radius 1/2)"

    def __post_init__(self):
        if not self.lambda_c_unit > 0:
            raise ValueError("lambda_c_unit must be positive")


DEFAULT_CRITICAL = CriticalConstant()


def lambda_c_scaled(diameter: float, c: CriticalConstant = DEFAULT_CRITICAL) -> float:
    """Critical density for connection distance ``diameter``: ``lambda_c(1) / diameter**2``."""
    if not diameter > 0:
        raise ValueError("diameter must be positive")
    return c.lambda_c_unit / (diameter * diameter)


def necessary_vacancy_bound(D_f: float, d_t: float, c: CriticalConstant = DEFAULT_CRITICAL) -> float:
    """Upper limit on ``lambda_p`` from the vacancy argument; needs ``2 D_f > d_t``."""
    if not (D_f >= 0 and d_t > 0):
        raise ValueError("need D_f >= 0 and d_t > 0")
    if not 2.0 * D_f > d_t:
        raise NotApplicable(f"2*D_f = {2 * D_f} does not exceed d_t = {d_t}")
    return c.lambda_c_unit / (4.0 * D_f * D_f - d_t * d_t)


def subsquare_count(d_t: float, D_f: float) -> int:
    """``n_p = ceil(sqrt(2) d_t / D_f) ** 2``."""
    if not D_f > 0:
        raise ValueError("D_f must be positive")
    m = math.ceil(math.sqrt(2.0) * d_t / D_f)
    return m * m


def necessary_site_bound(
    lambda_s: float,
    d_t: float,
    D_f: float,
    p8: float = P8_SITE,
    squared_area: bool = False,
) -> float:
    """Upper limit on ``lambda_p`` from the 8-neighbour site discretization.

    A cell of side ``d_t`` is closed when it has no secondary node or when all
    ``n_p`` sub-squares hold a primary.  ``squared_area=True`` uses sub-square
    area ``d_t**2 / n_p**2`` instead of ``d_t**2 / n_p`` (sensitivity check).
    Returns 0 when even ``lambda_p = 0`` leaves the closed probability at or
    above ``1 - p8``.
    """
    if not D_f > 0:
        raise ValueError("D_f must be positive")
    if not 0 < p8 < 1:
        raise ValueError("p8 must lie in (0, 1)")
    n_p = subsquare_count(d_t, D_f)
    occupied = -math.expm1(-lambda_s * d_t * d_t)
    if occupied <= p8:
        return 0.0
    ratio = (occupied - p8) / occupied
    root = math.exp(math.log(ratio) / n_p)
    scale = (n_p * n_p if squared_area else n_p) / (d_t * d_t)
    return -scale * math.log1p(-root)


def necessary_site_bound_printed_cor(lambda_s: float, d_t: float, D_f: float) -> float:
    """The shortcut form ``-(n_p/d_t^2) ln(1 - (2/3 - exp(-lambda_s d_t^2))^(1/n_p))``, evaluated as written."""
    if not D_f > 0:
        raise ValueError("D_f must be positive")
    n_p = subsquare_count(d_t, D_f)
    base = 2.0 / 3.0 - math.exp(-lambda_s * d_t * d_t)
    if base <= 0:
        return 0.0
    root = math.exp(math.log(base) / n_p)
    return -(n_p / (d_t * d_t)) * math.log1p(-root)


def box_side(variant: str, d_t: float) -> float:
    """Box side for the 4-neighbour (``d_t/sqrt 5``) or 8-neighbour (``d_t/(2 sqrt 2)``) site model."""
    if variant == "four":
        return d_t / math.sqrt(5.0)
    if variant == "eight":
        return d_t / (2.0 * math.sqrt(2.0))
    raise ValueError(f"variant must be 'four' or 'eight', not {variant!r}")


def dependency_range(variant: str, D_f: float, d_t: float) -> int:
    """``k_4 = ceil(2 sqrt5 D_f / d_t)`` or ``k_8 = ceil(4 sqrt2 D_f / d_t)``."""
    return math.ceil(2.0 * D_f / box_side(variant, d_t))


def k_dependent_threshold(k: int) -> float:
    """Site probability ``1 - 3**-(2k+1)**2`` above which a k-dependent model percolates."""
    return -math.expm1(-((2 * k + 1) ** 2) * math.log(3.0))


def _overlap_integral(side: float, D_f: float, lambda_p: float, abs_tol: float) -> float:
    # E[exp(lambda_p (S(T, D_f) - pi D_f^2))] for T the pair distance in a box
    area = math.pi * D_f * D_f

    def g(t):
        return pair_distance_pdf(t, side) * math.exp(lambda_p * (lens_area(t, D_f) - area))

    knots = sorted({0.0, side, math.sqrt(2.0) * side, min(2.0 * D_f, math.sqrt(2.0) * side)})
    return sum(integrate(g, a, b, abs_tol=abs_tol) for a, b in zip(knots, knots[1:]) if b > a)


def sufficient_p_tilde(
    variant: str,
    D_f: float,
    d_t: float,
    lambda_p: float,
    lambda_s: float,
    abs_tol: float = 1e-10,
) -> float:
    """Lower bound on the probability that a box holds a secondary node with a spectrum opportunity.

    Counts the one-node term exactly and, for two or more nodes, the
    inclusion-exclusion of two of them, whose joint guard area depends on
    their random separation.  Values are not clamped; out-of-range results
    are logged.
    """
    if not (d_t > 0 and D_f >= 0 and lambda_p >= 0 and lambda_s >= 0):
        raise ValueError("need d_t > 0, D_f >= 0 and non-negative densities")
    side = box_side(variant, d_t)
    mean = lambda_s * side * side
    one = mean * math.exp(-mean)
    many = -math.expm1(-mean) - one
    guard = math.exp(-lambda_p * math.pi * D_f * D_f)
    if D_f == 0 or lambda_p == 0:
        bracket = 1.0
    else:
        bracket = 2.0 - _overlap_integral(side, D_f, lambda_p, abs_tol)
    value = one * guard + many * guard * bracket
    if not 0.0 <= value <= 1.0:
        log.warning("p_tilde_%s = %r outside [0, 1]", variant, value)
    return value


@dataclass(frozen=True)
class SufficientCheck:
    holds: bool
    primary_supercritical: bool
    p_tilde_4: float
    p_tilde_8: float
    k_4: int
    k_8: int
    p4k: float
    p8k: float

    @property
    def ratio(self) -> float:
        return max(self.p_tilde_4 / self.p4k, self.p_tilde_8 / self.p8k)


def sufficient_condition_check(
    params: HeteroParams,
    c: CriticalConstant = DEFAULT_CRITICAL,
    p4k: float | None = None,
    p8k: float | None = None,
) -> SufficientCheck:
    """Site-discretization sufficient condition for simultaneous percolation.

    ``p4k`` / ``p8k`` are the k-dependent site thresholds; when omitted the
    conservative ``1 - 3**-(2k+1)**2`` values are used.
    """
    k4 = dependency_range("four", params.D_f, params.d_t)
    k8 = dependency_range("eight", params.D_f, params.d_t)
    for name, p in (("p4k", p4k), ("p8k", p8k)):
        if p is not None and not 0 < p < 1:
            raise ValueError(f"{name} must lie in (0, 1), got {p}")
    # default thresholds may round to 1.0 for large k, making the condition unattainable
    p4k = k_dependent_threshold(k4) if p4k is None else p4k
    p8k = k_dependent_threshold(k8) if p8k is None else p8k
    pt4 = sufficient_p_tilde("four", params.D_f, params.d_t, params.lambda_p, params.lambda_s)
    pt8 = sufficient_p_tilde("eight", params.D_f, params.d_t, params.lambda_p, params.lambda_s)
    primary_ok = params.lambda_p > lambda_c_scaled(params.D_t, c)
    holds = primary_ok and max(pt4 / p4k, pt8 / p8k) > 1.0
    return SufficientCheck(holds, primary_ok, pt4, pt8, k4, k8, p4k, p8k)


def sufficient_simple_bound(lambda_s: float, d_t: float, D_f: float) -> float:
    """Upper limit on ``lambda_p`` below which the one-node box estimate beats the k-dependent threshold."""
    if not D_f > 0:
        raise ValueError("D_f must be positive")
    k8 = dependency_range("eight", D_f, d_t)
    log_num = math.log1p(-math.exp(-lambda_s * d_t * d_t / 8.0)) if lambda_s > 0 else -math.inf
    log_den = math.log(k_dependent_threshold(k8))
    gap = log_num - log_den
    if not gap > 0:
        return 0.0
    return gap / (math.pi * D_f * D_f)


def peierls_threshold() -> float:
    """Largest closed-edge probability for which the dual-circuit series stays below one."""
    return ((11.0 - 2.0 * math.sqrt(10.0)) / 27.0) ** 4


def peierls_series(q: float) -> float:
    """Closed form of ``sum_n 4 n 3**(n-2) q**(n/4)``; finite only for ``3 q**(1/4) < 1``."""
    r = q**0.25
    if 3.0 * r >= 1.0:
        return math.inf
    return 4.0 * r / (3.0 * (1.0 - 3.0 * r) ** 2)


@dataclass(frozen=True)
class PeierlsParams:
    ell: float
    D_f: float
    prob_A_closed: float
    lambda_p: float
    lambda_s: float
    d_t: float

    def exponent_rate(self) -> float:
        """Coefficient ``c`` with ``q_bound = 2 Pr(A=0) + 1 - exp(-c D_f**2)``."""
        pa = 1.0 - self.prob_A_closed
        return (
            math.pi * self.lambda_p * self.lambda_s / pa
            * (3.0 * self.ell + self.d_t) * (self.ell + self.d_t) / 4.0
        )


def peierls_q_bound(p: PeierlsParams) -> float:
    """Upper bound on the closed-edge probability of the bond discretization, clamped to 1."""
    if not 0 <= p.prob_A_closed < 1:
        raise ValueError("prob_A_closed must lie in [0, 1)")
    val = 2.0 * p.prob_A_closed - math.expm1(-p.exponent_rate() * p.D_f * p.D_f)
    return min(val, 1.0)


def peierls_guard_radius(p: PeierlsParams, target: float) -> float:
    """Largest ``D_f`` with ``peierls_q_bound == target`` (ignores ``p.D_f``); ``nan`` if unreachable."""
    room = target - 2.0 * p.prob_A_closed
    if room <= 0:
        return math.nan
    rate = p.exponent_rate()
    if rate == 0:
        return math.inf
    return math.sqrt(-math.log1p(-room) / rate)


@dataclass(frozen=True)
class BoundReport:
    D_t: float
    d_t: float
    D_f: float
    lambda_p: float
    lambda_s: float
    lambda_c_unit: float
    p8: float
    lambda_s_min: float
    lambda_p_min: float
    lambda_p_max_vacancy: float | None
    vacancy_applicable: bool
    lambda_p_max_site: float
    site_feasible: bool
    lambda_p_max_site_printed_cor: float
    site_printed_cor_feasible: bool
    lambda_p_max_sufficient_simple: float
    sufficient_simple_feasible: bool
    sufficient_simple_holds: bool
    p_tilde_4: float
    p_tilde_8: float
    p_tilde_in_range: bool
    sufficient_holds: bool
    n_p: int | None
    k_4: int
    k_8: int

    def as_dict(self) -> dict:
        return asdict(self)


def bound_report(params: HeteroParams, c: CriticalConstant = DEFAULT_CRITICAL, p8: float = P8_SITE) -> BoundReport:
    """Evaluate every bound at one parameter point."""
    D_t, d_t, D_f = params.D_t, params.d_t, params.D_f
    lp, ls = params.lambda_p, params.lambda_s
    lambda_s_min = lambda_c_scaled(d_t, c)
    lambda_p_min = lambda_c_scaled(D_t, c)
    try:
        vac = necessary_vacancy_bound(D_f, d_t, c)
    except NotApplicable:
        vac = None
    if D_f > 0:
        n_p = subsquare_count(d_t, D_f)
        site = necessary_site_bound(ls, d_t, D_f, p8)
        cor = necessary_site_bound_printed_cor(ls, d_t, D_f)
        simple = sufficient_simple_bound(ls, d_t, D_f)
    else:
        # no guard zone: secondaries are never silenced
        n_p, site, cor, simple = None, math.inf, math.inf, math.inf
    chk = sufficient_condition_check(params, c)
    return BoundReport(
        D_t=D_t, d_t=d_t, D_f=D_f, lambda_p=lp, lambda_s=ls,
        lambda_c_unit=c.lambda_c_unit, p8=p8,
        lambda_s_min=lambda_s_min,
        lambda_p_min=lambda_p_min,
        lambda_p_max_vacancy=vac,
        vacancy_applicable=vac is not None,
        lambda_p_max_site=site,
        site_feasible=site > 0,
        lambda_p_max_site_printed_cor=cor,
        site_printed_cor_feasible=cor > 0,
        lambda_p_max_sufficient_simple=simple,
        sufficient_simple_feasible=simple > 0,
        sufficient_simple_holds=lp > lambda_p_min and lp < simple,
        p_tilde_4=chk.p_tilde_4,
        p_tilde_8=chk.p_tilde_8,
        p_tilde_in_range=0.0 <= chk.p_tilde_4 <= 1.0 and 0.0 <= chk.p_tilde_8 <= 1.0,
        sufficient_holds=chk.holds,
        n_p=n_p,
        k_4=chk.k_4,
        k_8=chk.k_8,
    )
