"""The coupled primary/secondary disk model.

Primary nodes link at distance ``<= D_t``.  A secondary node is active only
when no primary node lies within ``D_f`` of it, and active secondary nodes
link at distance ``<= d_t``.  Percolation is judged operationally through
occupied crossings of the observation window.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._kernels import any_within, cluster_labels
from .pointprocess import PointSet, SeededStream, Window, sample_ppp

__all__ = [
    "Direction",
    "HeteroParams",
    "Realization",
    "ClusterLabeling",
    "filter_active_secondary",
    "build_clusters",
    "has_crossing",
    "component_stats",
    "realize",
    "simultaneous_crossing",
]


class Direction(str, enum.Enum):
    LR = "L-R"
    TB = "T-B"

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        key = str(value).upper().replace("_", "-")
        aliases = {"LR": cls.LR, "L-R": cls.LR, "TB": cls.TB, "T-B": cls.TB}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown crossing direction {value!r}") from None


@dataclass(frozen=True)
class HeteroParams:
    """One point ``(D_t, d_t, D_f, lambda_p, lambda_s)`` plus the observation window."""

    D_t: float
    d_t: float
    D_f: float
    lambda_p: float
    lambda_s: float
    window: Window

    def __post_init__(self):
        if not self.D_t > 0:
            raise ValueError("D_t must be positive")
        if not self.d_t > 0:
            raise ValueError("d_t must be positive")
        if not self.D_f >= 0:
            raise ValueError("D_f must be non-negative")
        if not (self.lambda_p >= 0 and self.lambda_s >= 0):
            raise ValueError("densities must be non-negative")

    def replace(self, **changes) -> "HeteroParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class Realization:
    """One sampled world.

    ``primary`` holds the primary nodes inside the window (the network that is
    clustered); ``guard_primary`` additionally includes primaries in the
    ``guard_margin`` ring around the window, which still silence secondaries
    near the edge.
    """

    primary: PointSet
    secondary: PointSet
    active_mask: np.ndarray
    guard_primary: PointSet
    guard_margin: float

    @property
    def active_secondary(self) -> PointSet:
        return self.secondary.subset(self.active_mask)


@dataclass(frozen=True)
class ClusterLabeling:
    component_id: np.ndarray
    component_sizes: np.ndarray
    touches_left: np.ndarray
    touches_right: np.ndarray
    touches_bottom: np.ndarray
    touches_top: np.ndarray
    connection_radius: float

    @property
    def n_components(self) -> int:
        return len(self.component_sizes)

    @property
    def n_nodes(self) -> int:
        return len(self.component_id)


def filter_active_secondary(primary: PointSet | np.ndarray, secondary: PointSet | np.ndarray, D_f: float) -> np.ndarray:
    """``mask[i]`` is False iff some primary point is within distance ``<= D_f`` of secondary point ``i``."""
    if D_f < 0:
        raise ValueError("D_f must be non-negative")
    p = primary.points if isinstance(primary, PointSet) else np.asarray(primary, float)
    s = secondary.points if isinstance(secondary, PointSet) else np.asarray(secondary, float)
    return ~any_within(s, p, float(D_f))


def build_clusters(points: PointSet | np.ndarray, connection_radius: float, window: Window) -> ClusterLabeling:
    """Connected components of the ``distance <= connection_radius`` graph.

    Each node carries a disk of radius ``connection_radius / 2``; a component
    touches a window edge when one of its disks reaches that edge.
    """
    if not connection_radius > 0:
        raise ValueError("connection_radius must be positive")
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, float).reshape(-1, 2)
    labels, k = cluster_labels(pts, connection_radius)
    rho = 0.5 * connection_radius
    sizes = np.bincount(labels, minlength=k).astype(np.int64)

    def flag(node_mask):
        out = np.zeros(k, bool)
        out[labels[node_mask]] = True
        return out

    return ClusterLabeling(
        component_id=labels,
        component_sizes=sizes,
        touches_left=flag(pts[:, 0] - window.x_min <= rho),
        touches_right=flag(window.x_max - pts[:, 0] <= rho),
        touches_bottom=flag(pts[:, 1] - window.y_min <= rho),
        touches_top=flag(window.y_max - pts[:, 1] <= rho),
        connection_radius=float(connection_radius),
    )


def has_crossing(labeling: ClusterLabeling, direction=Direction.LR) -> bool:
    d = Direction.parse(direction)
    if d is Direction.LR:
        return bool(np.any(labeling.touches_left & labeling.touches_right))
    return bool(np.any(labeling.touches_top & labeling.touches_bottom))


def component_stats(labeling: ClusterLabeling) -> tuple[int, int, int]:
    """``(largest, second_largest, count)``; missing sizes are reported as 0."""
    sizes = np.sort(labeling.component_sizes)[::-1]
    largest = int(sizes[0]) if len(sizes) else 0
    second = int(sizes[1]) if len(sizes) > 1 else 0
    return largest, second, len(sizes)


def realize(params: HeteroParams, stream: SeededStream, guard_margin: float | None = None) -> Realization:
    """Sample both networks from independent child streams and mark active secondaries.

    Primaries are drawn on the window dilated by ``guard_margin`` (default
    ``D_f``) so that secondaries near the edge see the primaries just outside.
    Couplings across different ``D_f`` must pass a common ``guard_margin``.
    """
    margin = params.D_f if guard_margin is None else float(guard_margin)
    if margin < params.D_f:
        raise ValueError("guard_margin must be at least D_f")
    w = params.window
    guard = sample_ppp(params.lambda_p, w.dilate(margin), stream.child(0))
    primary = guard.restrict(w)
    secondary = sample_ppp(params.lambda_s, w, stream.child(1))
    mask = filter_active_secondary(guard, secondary, params.D_f)
    mask.setflags(write=False)
    return Realization(primary, secondary, mask, guard, margin)


def simultaneous_crossing(realization: Realization, params: HeteroParams, direction=Direction.LR) -> tuple[bool, bool]:
    """Crossing indicators ``(primary, secondary)`` for one realization."""
    w = params.window
    prim = build_clusters(realization.primary, params.D_t, w)
    sec = build_clusters(realization.active_secondary, params.d_t, w)
    return has_crossing(prim, direction), has_crossing(sec, direction)
