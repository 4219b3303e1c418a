"""Seeded homogeneous Poisson point processes on rectangles.

Sampling is organised so that, for a fixed stream and window, the point set
drawn at density ``a`` is a subset of the one drawn at any ``b >= a``.  Each
point carries a uniform "intensity mark" on ``[0, density * area)`` in expected
count units; the process at density ``lam`` keeps the points whose mark falls
below ``lam * area``.  Marks are generated in fixed-size chunks, each from its
own child stream, so the chunks that are shared between two densities are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Window",
    "SeededStream",
    "PointSet",
    "sample_ppp",
    "sample_coupled_ppp",
    "CHUNK_COUNT",
]

# expected number of points per mark chunk; fixing it is what makes samples nested
CHUNK_COUNT = 512.0


@dataclass(frozen=True)
class Window:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(f"degenerate window {self}")

    @classmethod
    def from_size(cls, width: float, height: float | None = None) -> "Window":
        """Window ``[0, width] x [0, height]`` (square when height is omitted)."""
        return cls(0.0, 0.0, float(width), float(width if height is None else height))

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def dilate(self, margin: float) -> "Window":
        if margin < 0:
            raise ValueError("margin must be non-negative")
        return Window(self.x_min - margin, self.y_min - margin, self.x_max + margin, self.y_max + margin)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points in the closed window."""
        p = np.asarray(points, dtype=float).reshape(-1, 2)
        return (
            (p[:, 0] >= self.x_min)
            & (p[:, 0] <= self.x_max)
            & (p[:, 1] >= self.y_min)
            & (p[:, 1] <= self.y_max)
        )


@dataclass(frozen=True)
class SeededStream:
    """Reproducible random stream identified by a master seed and a key path.

    Two streams with different ``(master_seed, stream_id)`` are statistically
    independent (numpy ``SeedSequence`` spawn keys feeding a Philox counter
    generator).  ``child`` extends the key path, which is how per-trial and
    per-network streams are derived.
    """

    master_seed: int
    stream_id: tuple[int, ...] = ()

    def __post_init__(self):
        sid = self.stream_id
        if isinstance(sid, (int, np.integer)):
            sid = (int(sid),)
        sid = tuple(int(s) for s in sid)
        if any(s < 0 for s in sid):
            raise ValueError("stream ids must be non-negative")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "stream_id", sid)

    def child(self, *ids: int) -> "SeededStream":
        return SeededStream(self.master_seed, self.stream_id + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    generating_density: float
    window: Window
    # per-point intensity marks in expected-count units; used for couplings
    marks: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64).reshape(-1, 2))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.marks is not None:
            m = np.ascontiguousarray(np.asarray(self.marks, dtype=np.float64))
            if m.shape != (len(pts),):
                raise ValueError("marks must have one entry per point")
            m.setflags(write=False)
            object.__setattr__(self, "marks", m)

    def __len__(self) -> int:
        return len(self.points)

    def restrict(self, window: Window) -> "PointSet":
        keep = window.contains(self.points)
        marks = None if self.marks is None else self.marks[keep]
        return PointSet(self.points[keep], self.generating_density, window, marks)

    def subset(self, mask: np.ndarray) -> "PointSet":
        marks = None if self.marks is None else self.marks[mask]
        return PointSet(self.points[mask], self.generating_density, self.window, marks)


def _chunk(window: Window, stream: SeededStream, k: int):
    rng = stream.child(k).generator()
    n = rng.poisson(CHUNK_COUNT)
    xy = np.empty((n, 2))
    xy[:, 0] = rng.uniform(window.x_min, window.x_max, n)
    xy[:, 1] = rng.uniform(window.y_min, window.y_max, n)
    marks = (k + rng.uniform(0.0, 1.0, n)) * CHUNK_COUNT
    return xy, marks


def sample_ppp(density: float, window: Window, stream: SeededStream) -> PointSet:
    """Poisson point process of intensity ``density`` on ``window``.

    Deterministic given ``stream``; nested in ``density`` for a fixed stream
    and window.
    """
    if not density >= 0:
        raise ValueError(f"density must be non-negative, got {density}")
    mean = density * window.area
    if not math.isfinite(mean):
        raise ValueError("density * area must be finite")
    nchunks = int(math.ceil(mean / CHUNK_COUNT))
    parts, mark_parts = [], []
    for k in range(nchunks):
        xy, marks = _chunk(window, stream, k)
        keep = marks < mean
        parts.append(xy[keep])
        mark_parts.append(marks[keep])
    if parts:
        pts = np.concatenate(parts)
        marks = np.concatenate(mark_parts)
    else:
        pts, marks = np.empty((0, 2)), np.empty(0)
    return PointSet(pts, float(density), window, marks)


def sample_coupled_ppp(
    density_max: float,
    sub_densities,
    window: Window,
    stream: SeededStream,
) -> list[PointSet]:
    """Thinning coupling: one PPP per entry of ``sub_densities``.

    A base process is drawn at ``density_max`` and each point keeps a single
    uniform retention mark; the process for ``lam`` keeps the points whose
    mark is below ``lam / density_max``.  Sets for smaller densities are
    therefore subsets of those for larger ones.
    """
    subs = [float(s) for s in sub_densities]
    if any(not s >= 0 for s in subs):
        raise ValueError("sub-densities must be non-negative")
    if any(s > density_max for s in subs):
        raise ValueError(f"every sub-density must be <= density_max={density_max}")
    base = sample_ppp(density_max, window, stream)
    # retention probability lam/density_max, read off the intensity mark
    u = base.marks / (density_max * window.area) if len(base) else base.marks
    out = []
    for s in subs:
        keep = u < (s / density_max if density_max > 0 else 0.0)
        out.append(PointSet(base.points[keep], s, window, base.marks[keep]))
    return out
