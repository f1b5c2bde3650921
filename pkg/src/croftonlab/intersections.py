"""Exact intersection machinery: sub-Grassmannian transversality, line-curve
intersection counts in CP^2 with the equidistribution experiment, and the
scalar-circle example in the unitary group.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np

from .errors import DegenerateLine, DimensionMismatch, IdenticallyZero
from .sampling import RandomStream, sample_cp_point
from .frames import complexify_vector

REL_RANK_TOL = 1e-9
DEGENERACY_TOL = 1e-9
ROOT_CLUSTER_RADIUS = 1e-8
CHART_SWITCH_TOL = 1e-8
# sqrt(eps) noise floor of the chordal wedge for dependent unit pairs
LINE_DEPENDENCE_TOL = 1e-7


@dataclass(frozen=True)
class LinearSubspace:
    """A linear subspace of R^n held as a spanning matrix (columns need not
    be orthonormal but must be numerically independent)."""

    span_matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.span_matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[1] < 1:
            raise DimensionMismatch("span matrix must be n x d with d >= 1")
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[-1] <= REL_RANK_TOL * sv[0]:
            raise DimensionMismatch("span matrix is numerically rank deficient")
        object.__setattr__(self, "span_matrix", mat)

    @property
    def ambient_dim(self) -> int:
        return self.span_matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.span_matrix.shape[1]


def _numerical_rank(mat: np.ndarray) -> int:
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > REL_RANK_TOL * sv[0]))


def intersection_dim(a: LinearSubspace, b: LinearSubspace) -> int:
    """dim(A) + dim(B) - rank([A | B]) with a relative singular-value cutoff."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    joint = np.hstack([a.span_matrix, b.span_matrix])
    return a.rank + b.rank - _numerical_rank(joint)


def _meet_columns(y: np.ndarray, k: int, l: int) -> np.ndarray:
    """The l columns [y e_1 .. y e_k | e_{k+1} .. e_l] inside R^(l+m)."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if not 1 <= k <= l <= n:
        raise DimensionMismatch(f"need 1 <= k <= l <= ambient, got k={k} l={l} ambient={n}")
    fixed = np.zeros((n, l - k))
    fixed[k:l] = np.eye(l - k)
    return np.hstack([y[:, :k], fixed])


def degeneracy_volume(y: np.ndarray, k: int, l: int) -> float:
    """Parallelepiped volume of the rotated k-block columns joined with the
    complementary (l-k) coordinate columns; zero exactly when they collide.
    """
    g = _meet_columns(y, k, l)
    det = np.linalg.det(g.T @ g)
    return float(np.sqrt(max(det, 0.0)))


def grassmann_meet(y: np.ndarray, k: int, l: int, m: int) -> LinearSubspace | None:
    """The unique common l-plane containing both y R^k and the coordinate
    (l-k)-plane, or None when the configuration is degenerate.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (l + m, l + m):
        raise DimensionMismatch(f"rotation must be {(l + m, l + m)}, got {y.shape}")
    if degeneracy_volume(y, k, l) <= DEGENERACY_TOL:
        return None
    return LinearSubspace(_meet_columns(y, k, l))


def swap_rotation(k: int, l: int, m: int) -> np.ndarray:
    """Rotation of R^(l+m) swapping e_1 with e_{k+1} (determinant corrected),
    a constructed degenerate configuration for ``grassmann_meet``.
    """
    n = l + m
    if n < k + 2:
        raise DimensionMismatch("ambient too small for the swap construction")
    y = np.eye(n)
    y[[0, k], :] = y[[k, 0], :]
    y[:, -1] *= -1.0  # permutation has det -1; flip one untouched axis
    if n - 1 in (0, k):
        raise DimensionMismatch("no free axis for the determinant correction")
    return y


@dataclass(frozen=True)
class HomogeneousCurve:
    """A degree-d homogeneous polynomial in three complex variables, stored as
    a monomial-indexed coefficient map {(a, b, c): coeff} with a + b + c = d.
    """

    degree: int
    coefficients: dict

    def __post_init__(self):
        if self.degree < 1:
            raise DimensionMismatch("curve degree must be at least 1")
        coeffs = {}
        for key, value in self.coefficients.items():
            a, b, c = (int(v) for v in key)
            if a < 0 or b < 0 or c < 0 or a + b + c != self.degree:
                raise DimensionMismatch(f"monomial {key} does not match degree {self.degree}")
            coeffs[(a, b, c)] = complex(value)
        if not any(abs(v) > 0.0 for v in coeffs.values()):
            raise DimensionMismatch("curve needs at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def fermat(cls, degree: int) -> "HomogeneousCurve":
        """x^d + y^d + z^d, smooth in every degree."""
        d = int(degree)
        return cls(d, {(d, 0, 0): 1.0, (0, d, 0): 1.0, (0, 0, d): 1.0})

    def evaluate(self, point: np.ndarray) -> complex:
        x, y, z = np.asarray(point, dtype=complex)
        total = 0.0 + 0.0j
        for (a, b, c), coeff in self.coefficients.items():
            total += coeff * x**a * y**b * z**c
        return complex(total)

    def gradient(self, point: np.ndarray) -> np.ndarray:
        x, y, z = np.asarray(point, dtype=complex)
        grad = np.zeros(3, dtype=complex)
        for (a, b, c), coeff in self.coefficients.items():
            if a:
                grad[0] += coeff * a * x ** (a - 1) * y**b * z**c
            if b:
                grad[1] += coeff * b * x**a * y ** (b - 1) * z**c
            if c:
                grad[2] += coeff * c * x**a * y**b * z ** (c - 1)
        return grad

    def restrict(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Coefficients (g_0 .. g_d) of the binary form F(s p + t q), where
        g_j multiplies s^(d-j) t^j."""
        p = np.asarray(p, dtype=complex)
        q = np.asarray(q, dtype=complex)
        g = np.zeros(self.degree + 1, dtype=complex)
        for (a, b, c), coeff in self.coefficients.items():
            term = _linear_power(p[0], q[0], a)
            term = np.convolve(term, _linear_power(p[1], q[1], b))
            term = np.convolve(term, _linear_power(p[2], q[2], c))
            g += coeff * term
        return g


def _linear_power(u: complex, v: complex, power: int) -> np.ndarray:
    """Binary coefficients of (u s + v t)^power, s-degree descending."""
    return np.array([comb(power, j) * u ** (power - j) * v**j for j in range(power + 1)])


def _projective_roots(g: np.ndarray) -> list[np.ndarray]:
    """All deg(g) roots of a nonzero binary form as unit representatives in
    C^2. Leading coefficients below the chart cutoff are treated as roots at
    the pole [1 : 0]; the rest come from the companion matrix of the
    dehomogenized polynomial.
    """
    g = np.asarray(g, dtype=complex)
    g = g / np.max(np.abs(g))
    lead = 0
    while lead < g.size - 1 and abs(g[lead]) < CHART_SWITCH_TOL:
        lead += 1
    roots = [np.array([1.0 + 0.0j, 0.0 + 0.0j]) for _ in range(lead)]
    core = g[lead:]
    if core.size > 1:
        for s in np.roots(core):
            rep = np.array([s, 1.0 + 0.0j])
            roots.append(rep / np.linalg.norm(rep))
    return roots


def _chordal_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(a[0] * b[1] - a[1] * b[0]))


def _cluster_count(roots: list[np.ndarray], radius: float) -> int:
    reps: list[np.ndarray] = []
    for root in roots:
        if not any(_chordal_distance(root, rep) < radius for rep in reps):
            reps.append(root)
    return len(reps)


def line_curve_count(
    curve: HomogeneousCurve, line: tuple[np.ndarray, np.ndarray]
) -> tuple[int, int]:
    """(with_multiplicity, distinct) intersection counts of the curve with the
    projective line through two independent points of C^3.

    Raises IdenticallyZero when the line lies inside the curve and
    DegenerateLine when the two points are projectively dependent.
    """
    p = np.asarray(line[0], dtype=complex)
    q = np.asarray(line[1], dtype=complex)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    wedge = np.sqrt(max(0.0, 1.0 - abs(np.vdot(p, q)) ** 2))
    if wedge < LINE_DEPENDENCE_TOL:
        raise DegenerateLine("line points are projectively dependent")
    g = curve.restrict(p, q)
    scale = max(abs(v) for v in curve.coefficients.values())
    if np.max(np.abs(g)) < 1e-10 * scale:
        raise IdenticallyZero("restricted form vanishes: line lies inside the curve")
    roots = _projective_roots(g)
    return curve.degree, _cluster_count(roots, ROOT_CLUSTER_RADIUS)


def tangent_line(curve: HomogeneousCurve, point: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two points spanning the projective tangent line at a smooth curve
    point (the point itself plus an independent gradient-orthogonal vector).
    """
    point = np.asarray(point, dtype=complex)
    grad = curve.gradient(point)
    if np.linalg.norm(grad) == 0.0:
        raise DegenerateLine("tangent undefined at a singular point")
    # Two independent solutions of <grad, v> = 0 always exist in C^3; Euler's
    # relation puts the base point among them.
    basis = []
    for idx in range(3):
        cand = np.zeros(3, dtype=complex)
        cand[idx] = 1.0
        cand = cand - (grad @ cand) / (grad @ grad.conj()).real * grad.conj()
        if np.linalg.norm(cand) > 1e-9:
            basis.append(cand / np.linalg.norm(cand))
    for cand in basis:
        wedge = np.sqrt(max(0.0, 1.0 - abs(np.vdot(point / np.linalg.norm(point), cand)) ** 2))
        if wedge > 1e-6:
            return point, cand
    raise DegenerateLine("could not complete the tangent line")


@dataclass(frozen=True)
class EquidistributionResult:
    """Tally of distinct intersection counts over random projective lines."""

    histogram: dict
    exceptional_fraction: float
    samples: int
    seed: int
    rejected: int = 0


def sample_projective_line(
    stream: RandomStream, n: int = 3
) -> tuple[np.ndarray, np.ndarray, int]:
    """Two independent Fubini-Study points of CP^(n-1) as complex vectors;
    dependent pairs (measure zero) are redrawn and counted."""
    rejected = 0
    while True:
        p = complexify_vector(sample_cp_point(n, stream))
        q = complexify_vector(sample_cp_point(n, stream))
        if np.sqrt(max(0.0, 1.0 - abs(np.vdot(p, q)) ** 2)) >= LINE_DEPENDENCE_TOL:
            return p, q, rejected
        rejected += 1


def equidistribution_experiment(
    curve: HomogeneousCurve,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> EquidistributionResult:
    """Histogram of distinct line-curve intersection counts over uniformly
    random lines, with the fraction of lines missing the generic count.
    """
    if samples < 100:
        raise DimensionMismatch("equidistribution needs at least 100 samples")
    from .estimate import batch_sizes  # local import to keep module layering flat

    batches = max(1, int(batches))
    sizes = batch_sizes(int(samples), batches)
    subs = stream.splits(batches)

    def one(i: int) -> tuple[Counter, int]:
        hist: Counter = Counter()
        rejected = 0
        for _ in range(sizes[i]):
            p, q, rej = sample_projective_line(subs[i])
            rejected += rej
            _, distinct = line_curve_count(curve, (p, q))
            hist[distinct] += 1
        return hist, rejected

    if threads > 1 and batches > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(batches)))
    else:
        results = [one(i) for i in range(batches)]
    hist: Counter = Counter()
    rejected = 0
    for h, rej in results:
        hist.update(h)
        rejected += rej
    exceptional = sum(v for key, v in hist.items() if key != curve.degree)
    return EquidistributionResult(
        dict(sorted(hist.items())), exceptional / samples, int(samples), stream.seed, rejected
    )


CURVE_HEADER = "CURVE"


def write_curve(curve: HomogeneousCurve, path) -> None:
    lines = [f"{CURVE_HEADER} {curve.degree}"]
    for (a, b, c), coeff in sorted(curve.coefficients.items()):
        lines.append(f"{a} {b} {c} {coeff.real:.17g} {coeff.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve(path) -> HomogeneousCurve:
    """Parse the plain-text curve format: a "CURVE d" header then one
    "a b c re im" monomial coefficient per line."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise DimensionMismatch("empty curve file")
    head = text[0].split()
    if len(head) != 2 or head[0] != CURVE_HEADER:
        raise DimensionMismatch(f"bad curve header: {text[0]!r}")
    degree = int(head[1])
    coeffs = {}
    for line in text[1:]:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise DimensionMismatch(f"bad curve coefficient line: {line!r}")
        a, b, c = int(parts[0]), int(parts[1]), int(parts[2])
        coeffs[(a, b, c)] = float(parts[3]) + 1j * float(parts[4])
    return HomogeneousCurve(degree, coeffs)


def su_circle_intersections(n: int) -> tuple[list[np.ndarray], float]:
    """The n scalar unitary matrices where the determinant-one subgroup meets
    the scalar circle, plus the largest inner product (in the negative-trace
    metric) between the circle tangent and a traceless skew-Hermitian basis.
    """
    if n < 1:
        raise DimensionMismatch("unitary group size must be at least 1")
    points = [np.exp(2j * np.pi * k / n) * np.eye(n, dtype=complex) for k in range(n)]
    tangent = 1j * np.eye(n, dtype=complex)
    residual = 0.0
    for eta in _traceless_skew_hermitian_basis(n):
        residual = max(residual, abs(np.trace(tangent @ eta)))
    return points, float(residual)


def _traceless_skew_hermitian_basis(n: int) -> list[np.ndarray]:
    basis = []
    for j in range(n - 1):
        d = np.zeros((n, n), dtype=complex)
        d[j, j] = 1j
        d[j + 1, j + 1] = -1j
        basis.append(d)
    for j in range(n):
        for k in range(j + 1, n):
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = 1.0
            a[k, j] = -1.0
            basis.append(a)
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = 1j
            s[k, j] = 1j
            basis.append(s)
    return basis
