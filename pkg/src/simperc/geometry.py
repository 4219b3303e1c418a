"""Closed-form planar geometry and a scalar adaptive quadrature.

All lengths share one (arbitrary) unit. Every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "integrate",
    "lens_area",
    "lens_area_arctan",
    "pair_distance_pdf",
    "pair_distance_pdf_branches",
    "pair_distance_cdf_table",
]


class QuadratureError(ArithmeticError):
    """Raised when adaptive subdivision runs out of depth before reaching the tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    lower: float
    upper: float
    abs_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"lower ({self.lower}) must not exceed upper ({self.upper})")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def _simpson(fa, fm, fb, a, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    *,
    abs_tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Adaptive Simpson estimate of ``f`` on ``[lower, upper]``.

    The error budget is split evenly between the two halves at every
    subdivision; a panel is accepted once the Richardson difference is below
    ``15 * tol``. The extrapolated value ``S2 + (S2 - S1)/15`` is returned.

    Raises
    ------
    QuadratureError
        if some panel still misses its tolerance at ``max_depth``.
    """
    spec = QuadratureSpec(lower, upper, abs_tol, max_depth)
    a, b = spec.lower, spec.upper
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, a, b)
    return _adapt(f, a, b, fa, fm, fb, whole, spec.abs_tol, spec.max_depth)


def _adapt(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = _simpson(fa, flm, fm, a, m)
    right = _simpson(fm, frm, fb, m, b)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"tolerance {tol:.3g} not met on [{a!r}, {b!r}] (|delta|/15 = {abs(delta) / 15:.3g})"
        )
    return _adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _adapt(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )


def _check_lens(distance, radius):
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not distance >= 0:
        raise ValueError(f"center distance must be non-negative, got {distance}")


def lens_area(distance: float, radius: float) -> float:
    """Area of the intersection of two disks of equal ``radius`` whose centers are ``distance`` apart."""
    _check_lens(distance, radius)
    if distance >= 2.0 * radius:
        return 0.0
    x = distance / (2.0 * radius)
    area = 2.0 * radius * radius * math.acos(x) - 0.5 * distance * math.sqrt(
        4.0 * radius * radius - distance * distance
    )
    return min(max(area, 0.0), math.pi * radius * radius)


def lens_area_arctan(distance: float, radius: float) -> float:
    # arctan form, kept as an independent cross-check of lens_area
    _check_lens(distance, radius)
    if distance >= 2.0 * radius:
        return 0.0
    root = math.sqrt(4.0 * radius * radius - distance * distance)
    return (
        -0.5 * distance * root
        - 2.0 * radius * radius * math.atan(distance / root)
        + math.pi * radius * radius
    )


def pair_distance_pdf_branches(t: float, side: float) -> tuple[float, float]:
    """Evaluate both analytic branches of the pair-distance density at ``t``.

    The first branch is meaningful on ``[0, side]`` and the second on
    ``[side, sqrt(2) side]``; at ``t == side`` both are defined and agree.
    Outside a branch's domain its slot is ``nan``.
    """
    if not side > 0:
        raise ValueError(f"side must be positive, got {side}")
    if not t >= 0:
        raise ValueError(f"t must be non-negative, got {t}")
    l2 = side * side
    scale = 4.0 * t / (l2 * l2)
    first = second = math.nan
    if t <= side:
        first = scale * (0.5 * math.pi * l2 - 2.0 * side * t + 0.5 * t * t)
    if side <= t <= math.sqrt(2.0) * side:
        arg = min((2.0 * l2 - t * t) / (t * t), 1.0)
        second = scale * (
            l2 * math.asin(arg)
            + 2.0 * side * math.sqrt(max(t * t - l2, 0.0))
            - l2
            - 0.5 * t * t
        )
    return first, second


def pair_distance_pdf(t: float, side: float) -> float:
    """Density of the distance between two independent uniform points in a square of side ``side``.

    Support is ``[0, sqrt(2) * side]``; zero elsewhere.
    """
    first, second = pair_distance_pdf_branches(t, side)
    if t <= side:
        return first
    if t <= math.sqrt(2.0) * side:
        return max(second, 0.0)
    return 0.0


def pair_distance_cdf_table(side: float, knots: int = 2001, abs_tol: float = 1e-12):
    """CDF of the pair distance at ``knots`` equally spaced points of the support.

    Each increment is an adaptive-quadrature integral of :func:`pair_distance_pdf`.
    Returns ``(t, F)`` as lists.
    """
    top = math.sqrt(2.0) * side
    ts = [top * i / (knots - 1) for i in range(knots)]
    # keep the branch seam on a knot boundary
    if side not in ts:
        ts = sorted(ts + [side])
    cdf = [0.0]
    for a, b in zip(ts, ts[1:]):
        cdf.append(cdf[-1] + integrate(lambda t: pair_distance_pdf(t, side), a, b, abs_tol=abs_tol))
    return ts, cdf
