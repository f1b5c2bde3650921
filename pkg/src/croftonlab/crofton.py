"""Crofton-type volume estimation by random intersection counting: curve
length on round spheres against great hyperspheres, and algebraic-curve area
in CP^2 against random projective lines.

With all family measures normalized to probability laws, the length of a
curve on any S^n equals pi times the expected number of crossings with a
uniformly random great hypersphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .estimate import McEstimate, run_batches
from .intersections import HomogeneousCurve, line_curve_count, sample_projective_line
from .sampling import RandomStream, sample_sphere

LENGTH_FACTOR = np.pi  # length per expected crossing, every sphere dimension
VERTEX_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SphericalPolyline:
    """A discretized curve on S^n: ordered unit vertices in R^(n+1) joined by
    minorizing geodesic arcs, optionally closed."""

    vertices: np.ndarray
    closed: bool

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 2 or verts.shape[1] < 2:
            raise DimensionMismatch("polyline needs >= 2 vertices in R^(n+1), n >= 1")
        norms = np.linalg.norm(verts, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise DimensionMismatch("polyline vertices must be unit vectors")
        dots = self._segment_dots(verts, self.closed)
        if np.any(dots >= 1.0 - 1e-9) or np.any(dots <= -1.0 + 1e-9):
            raise DimensionMismatch("consecutive vertices may be neither equal nor antipodal")
        object.__setattr__(self, "vertices", verts)

    @staticmethod
    def _segment_dots(verts: np.ndarray, closed: bool) -> np.ndarray:
        nxt = np.roll(verts, -1, axis=0) if closed else verts[1:]
        cur = verts if closed else verts[:-1]
        return np.sum(cur * nxt, axis=1)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def sphere_dim(self) -> int:
        return self.ambient_dim - 1

    def rotate(self, g: np.ndarray) -> "SphericalPolyline":
        return SphericalPolyline(self.vertices @ np.asarray(g).T, self.closed)

    def subdivide(self) -> "SphericalPolyline":
        """Insert geodesic midpoints; the length is unchanged."""
        verts = self.vertices
        nxt = np.roll(verts, -1, axis=0) if self.closed else verts[1:]
        cur = verts if self.closed else verts[:-1]
        mids = cur + nxt
        mids /= np.linalg.norm(mids, axis=1, keepdims=True)
        out = np.empty((cur.shape[0] + verts.shape[0], verts.shape[1]))
        out[0::2] = verts if self.closed else verts[:-1]
        out[1::2] = mids
        if not self.closed:
            out = np.vstack([out, verts[-1:]])
        return SphericalPolyline(out, self.closed)


def latitude_polyline(
    colatitude: float, segments: int = 360, ambient_dim: int = 3, closed: bool = True
) -> SphericalPolyline:
    """Inscribed polygon of the circle at a fixed colatitude on S^2, embedded
    in the first three coordinates of R^ambient_dim."""
    if ambient_dim < 3:
        raise DimensionMismatch("latitude circles need ambient dimension >= 3")
    phi = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=not closed)
    verts = np.zeros((segments, ambient_dim))
    verts[:, 0] = np.sin(colatitude) * np.cos(phi)
    verts[:, 1] = np.sin(colatitude) * np.sin(phi)
    verts[:, 2] = np.cos(colatitude)
    return SphericalPolyline(verts, closed)


def polyline_length(c: SphericalPolyline) -> float:
    """Total arc length, the sum of arccos of consecutive inner products."""
    dots = SphericalPolyline._segment_dots(c.vertices, c.closed)
    return float(np.sum(np.arccos(np.clip(dots, -1.0, 1.0))))


def count_great_hypersphere(c: SphericalPolyline, u: np.ndarray) -> int | None:
    """Number of crossings of the polyline with the great hypersphere normal
    to u, or None when a vertex lies on it (a degenerate draw to resample).
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (c.ambient_dim,):
        raise DimensionMismatch("normal vector dimension does not match the polyline")
    heights = c.vertices @ u
    if np.min(np.abs(heights)) < VERTEX_TIE_TOL:
        return None
    nxt = np.roll(heights, -1) if c.closed else heights[1:]
    cur = heights if c.closed else heights[:-1]
    return int(np.sum(cur * nxt < 0.0))


def _count_batch(c: SphericalPolyline, stream: RandomStream, count: int) -> tuple[np.ndarray, int]:
    """Crossing counts for ``count`` non-degenerate random normals, chunked
    to bound the height-matrix working set."""
    chunk = max(1, 4_000_000 // c.vertices.shape[0])
    counts = np.empty(count)
    rejected = 0
    done = 0
    while done < count:
        size = min(chunk, count - done)
        heights = sample_sphere(c.ambient_dim, stream, size) @ c.vertices.T
        bad = np.min(np.abs(heights), axis=1) < VERTEX_TIE_TOL
        while np.any(bad):
            rejected += int(bad.sum())
            heights[bad] = sample_sphere(c.ambient_dim, stream, int(bad.sum())) @ c.vertices.T
            bad = np.min(np.abs(heights), axis=1) < VERTEX_TIE_TOL
        nxt = np.roll(heights, -1, axis=1) if c.closed else heights[:, 1:]
        cur = heights if c.closed else heights[:, :-1]
        counts[done:done + size] = np.sum(cur * nxt < 0.0, axis=1)
        done += size
    return counts, rejected


def crofton_length(
    c: SphericalPolyline,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Length estimate pi * mean(crossing count) over uniform great
    hyperspheres; degenerate draws are resampled and reported via
    ``rejected``."""
    if samples < 100:
        raise DimensionMismatch("crofton_length needs at least 100 samples")

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        counts, rejected = _count_batch(c, sub, count)
        return LENGTH_FACTOR * counts, rejected

    return run_batches(worker, samples, stream, batches, threads)


def calibrate_zeta(
    n: int,
    reference: SphericalPolyline,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Empirical length-per-crossing constant length / E[count] for a
    reference curve of known length; validates the hard-coded pi.

    The stderr follows from the delta method; when the crossing rate is too
    small to resolve, the estimate is flagged LowPower.
    """
    if reference.sphere_dim != n:
        raise DimensionMismatch("reference polyline does not live on S^n")
    length = polyline_length(reference)
    if length <= 0.0:
        raise DimensionMismatch("reference length must be positive")

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        return _count_batch(reference, sub, count)

    counts = run_batches(worker, samples, stream, batches, threads)
    if counts.mean <= 0.0:
        return McEstimate(np.inf, np.inf, counts.samples, stream.seed, counts.rejected, "LowPower")
    value = length / counts.mean
    stderr = length * counts.stderr / counts.mean**2
    flag = "LowPower" if counts.stderr >= counts.mean / 3.0 else None
    return McEstimate(value, stderr, counts.samples, stream.seed, counts.rejected, flag)


def crofton_area_cp2(
    curve: HomogeneousCurve,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Area of an algebraic curve in CP^2 in units of the area of a line:
    the mean number of distinct meeting points with uniform projective lines.
    """

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        values = np.empty(count)
        rejected = 0
        for i in range(count):
            p, q, rej = sample_projective_line(sub)
            rejected += rej
            _, distinct = line_curve_count(curve, (p, q))
            values[i] = distinct
        return values, rejected

    return run_batches(worker, samples, stream, batches, threads)


POLYLINE_HEADER = "SPHERE"


def write_polyline(c: SphericalPolyline, path: str | Path) -> None:
    lines = [f"{POLYLINE_HEADER} {c.sphere_dim} {'CLOSED' if c.closed else 'OPEN'}"]
    for vert in c.vertices:
        lines.append(" ".join(f"{x:.17g}" for x in vert))
    Path(path).write_text("\n".join(lines) + "\n")


def read_polyline(path: str | Path) -> SphericalPolyline:
    """Parse the plain-text polyline format: a "SPHERE n CLOSED|OPEN" header
    then one whitespace-separated vertex per line."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise DimensionMismatch("empty polyline file")
    head = text[0].split()
    if len(head) != 3 or head[0] != POLYLINE_HEADER or head[2] not in ("CLOSED", "OPEN"):
        raise DimensionMismatch(f"bad polyline header: {text[0]!r}")
    n = int(head[1])
    verts = np.array([[float(x) for x in line.split()] for line in text[1:] if line.strip()])
    if verts.ndim != 2 or verts.shape[1] != n + 1:
        raise DimensionMismatch("vertex rows do not match the header dimension")
    return SphericalPolyline(verts, head[2] == "CLOSED")
