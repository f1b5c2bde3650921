"""Monte Carlo estimation and maximization of deformation coefficients.

A deformation coefficient measures how often a moving family of planes meets
a candidate plane, normalized so every family law is a probability measure;
only ratios and maximizer locations are asserted, never absolute constants.
Families covered: complex hyperplanes of projective space, sub-Grassmannian
orbits acting blockwise, block-interleaved wedge objectives (real and
complex), and the averaged projection volume against random complex lines.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateVector, DimensionMismatch, NotUnit
from .estimate import McEstimate, RunningStats, batch_sizes, pairwise_merge, run_batches
from .frames import (
    ComplexStructure,
    InterleaveOperator,
    OrthoFrame,
    batch_projection_volume,
    block_form,
    kahler_angle,
    orthonormalize,
)
from .sampling import (
    RandomStream,
    random_frame,
    sample_cp_point,
    sample_rotation,
    sample_sphere,
    sample_torus_s3,
    sample_unitary,
)

KIND_CP = "cp-hyperplanes"
KIND_GRASSMANN = "grassmann"
KIND_INTERLEAVED = "interleaved"
KIND_INTERLEAVED_COMPLEX = "interleaved-complex"
KIND_WIRTINGER = "wirtinger"
KINDS = (KIND_CP, KIND_GRASSMANN, KIND_INTERLEAVED, KIND_INTERLEAVED_COMPLEX, KIND_WIRTINGER)


@dataclass(frozen=True)
class FamilySpec:
    """A moving family of planes together with its fixed reference plane.

    ``geometry`` holds the kind-specific sizes; ``reference_plane`` is the
    plane transported by the family action (and the natural maximizer
    candidate for the scan).
    """

    kind: str
    geometry: tuple[int, ...]
    reference_plane: OrthoFrame

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DimensionMismatch(f"unknown family kind {self.kind!r}")

    @property
    def ambient_dim(self) -> int:
        return self.reference_plane.ambient_dim

    @property
    def plane_rank(self) -> int:
        return self.reference_plane.rank

    @classmethod
    def cp_hyperplanes(cls, n: int) -> "FamilySpec":
        """Complex hyperplanes of CP^n acting on 2-planes of R^(2n)."""
        if n < 1:
            raise DimensionMismatch("cp-hyperplanes needs n >= 1")
        ref = OrthoFrame(np.eye(2 * n)[:, :2])  # the first complex line
        return cls(KIND_CP, (n,), ref)

    @classmethod
    def grassmann(cls, k: int, l: int, m: int) -> "FamilySpec":
        """Blockwise rotation orbit of the km-dimensional block-interleaved
        coordinate plane inside R^(l m)."""
        if not 1 <= k <= l or m < 1:
            raise DimensionMismatch("grassmann needs 1 <= k <= l and m >= 1")
        op = InterleaveOperator(l, m)
        cols = [op.embed(np.eye(l)[:, i], r) for r in range(m) for i in range(k)]
        return cls(KIND_GRASSMANN, (k, l, m), OrthoFrame(np.stack(cols, axis=1)))

    @classmethod
    def interleaved(cls, m: int, p: int, q: int) -> "FamilySpec":
        """Wedge-of-block-copies objective on mp-planes of R^(q m)."""
        if not 1 <= p <= q or m < 1:
            raise DimensionMismatch("interleaved needs 1 <= p <= q and m >= 1")
        op = InterleaveOperator(q, m)
        cols = [op.embed(np.eye(q)[:, i], r) for r in range(m) for i in range(p)]
        return cls(KIND_INTERLEAVED, (m, p, q), OrthoFrame(np.stack(cols, axis=1)))

    @classmethod
    def interleaved_complex(cls, m: int, p: int, q: int) -> "FamilySpec":
        """Complex-line wedge objective on 2pm-planes of realified (C^q)^m."""
        if not 1 <= p <= q or m < 1:
            raise DimensionMismatch("interleaved-complex needs 1 <= p <= q and m >= 1")
        op = InterleaveOperator(2 * q, m)
        eye = np.eye(2 * q)
        cols = [op.embed(eye[:, i], r) for r in range(m) for i in range(2 * p)]
        return cls(KIND_INTERLEAVED_COMPLEX, (m, p, q), OrthoFrame(np.stack(cols, axis=1)))

    @classmethod
    def wirtinger_cp(cls, n: int, k: int) -> "FamilySpec":
        """Complex k-plane orbit acting on 2k-planes of realified C^(n+1)."""
        if n < 1 or not 1 <= k <= n + 1:
            raise DimensionMismatch("wirtinger needs n >= 1 and 1 <= k <= n+1")
        ref = OrthoFrame(np.eye(2 * (n + 1))[:, : 2 * k])
        return cls(KIND_WIRTINGER, (n, k), ref)


def _apply_j_pairs(x: np.ndarray) -> np.ndarray:
    """Standard complex structure on pairwise coordinates, batched."""
    out = np.empty_like(x)
    out[..., 0::2] = -x[..., 1::2]
    out[..., 1::2] = x[..., 0::2]
    return out


def _interleaved_frames(x: np.ndarray, m: int) -> np.ndarray:
    """(N, q) block vectors -> (N, q m, m) frames of their m block copies."""
    n, q = x.shape
    frames = np.zeros((n, q * m, m))
    for r in range(m):
        frames[:, r * q:(r + 1) * q, r] = x
    return frames


def _interleaved_complex_frames(x: np.ndarray, m: int) -> np.ndarray:
    """(N, 2q) realified complex vectors -> (N, 2 q m, 2 m) frames of the m
    block copies of the complex line through each vector."""
    n, qq = x.shape
    jx = _apply_j_pairs(x)
    frames = np.zeros((n, qq * m, 2 * m))
    for r in range(m):
        frames[:, r * qq:(r + 1) * qq, 2 * r] = x
        frames[:, r * qq:(r + 1) * qq, 2 * r + 1] = jx
    return frames


def family_frames(spec: FamilySpec, stream: RandomStream, size: int) -> np.ndarray:
    """A stack of moving-family frames (size, ambient, frame rank) drawn from
    the family's invariant law."""
    if spec.kind == KIND_CP:
        (n,) = spec.geometry
        u = sample_unitary(n, stream, size)
        return np.einsum("Nij,jc->Nic", u, spec.reference_plane.columns)
    if spec.kind == KIND_WIRTINGER:
        n, _ = spec.geometry
        u = sample_unitary(n + 1, stream, size)
        return np.einsum("Nij,jc->Nic", u, spec.reference_plane.columns)
    if spec.kind == KIND_GRASSMANN:
        k, l, m = spec.geometry
        rot = sample_rotation(l, stream, size)
        blocks = spec.reference_plane.columns.reshape(m, l, -1)
        out = np.einsum("Nij,mjc->Nmic", rot, blocks)
        return out.reshape(size, l * m, -1)
    if spec.kind == KIND_INTERLEAVED:
        m, _, q = spec.geometry
        return _interleaved_frames(sample_sphere(q, stream, size), m)
    if spec.kind == KIND_INTERLEAVED_COMPLEX:
        m, _, q = spec.geometry
        return _interleaved_complex_frames(sample_cp_point(q, stream, size), m)
    raise DimensionMismatch(f"unknown family kind {spec.kind!r}")


def _check_candidate(V: OrthoFrame, spec: FamilySpec) -> None:
    if V.ambient_dim != spec.ambient_dim or V.rank != spec.plane_rank:
        raise DimensionMismatch(
            f"candidate plane {V.columns.shape} does not fit family "
            f"(ambient {spec.ambient_dim}, rank {spec.plane_rank})"
        )


def deformation_coefficient(
    V: OrthoFrame,
    spec: FamilySpec,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Mean polyvector pairing of V against the transported reference plane:
    the family's deformation coefficient under the probability normalization.
    """
    if spec.kind in (KIND_INTERLEAVED, KIND_INTERLEAVED_COMPLEX):
        raise DimensionMismatch("interleaved kinds use the interleaved objectives")
    _check_candidate(V, spec)

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        return batch_projection_volume(V, family_frames(spec, sub, count)), 0

    return run_batches(worker, samples, stream, batches, threads)


def cp_tau_grid(
    taus: np.ndarray,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> list[McEstimate]:
    """Hyperplane-family coefficients of 2-planes with the given Kahler
    angles, all evaluated on common torus draws from S^3.

    The integrand is |(a1^2 + b1^2) cos(tau) + (a2 b1 - a1 b2) sin(tau)|; at
    tau = 0 its expectation is exactly 1/2.
    """
    if samples < 1000:
        raise DimensionMismatch("cp_tau_grid needs at least 1000 samples")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    batches = max(1, int(batches))
    sizes = batch_sizes(int(samples), batches)
    subs = stream.splits(batches)

    def one(i: int) -> list[RunningStats]:
        t = sample_torus_s3(subs[i], sizes[i])
        a1 = np.sin(t.beta) * np.cos(t.alpha)
        a2 = np.sin(t.beta) * np.sin(t.alpha)
        b1 = np.cos(t.beta) * np.cos(t.gamma)
        b2 = np.cos(t.beta) * np.sin(t.gamma)
        radial = a1 * a1 + b1 * b1
        rotational = a2 * b1 - a1 * b2
        return [
            RunningStats.from_values(np.abs(radial * np.cos(tau) + rotational * np.sin(tau)))
            for tau in taus
        ]

    if threads > 1 and batches > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_batch = list(pool.map(one, range(batches)))
    else:
        per_batch = [one(i) for i in range(batches)]
    out = []
    for j in range(taus.size):
        stats = pairwise_merge([per_batch[i][j] for i in range(batches)])
        out.append(stats.to_estimate(stream.seed))
    return out


def cp_tau_coefficient(
    tau: float,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Single-angle version of ``cp_tau_grid``."""
    return cp_tau_grid(np.array([tau]), samples, stream, batches, threads)[0]


def interleaved_objective(
    V: OrthoFrame,
    m: int,
    q: int,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Mean projection volume onto V of the wedge of the m block copies of a
    uniform unit vector of R^q."""
    _check_interleaved(V, m, block=q)

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        frames = _interleaved_frames(sample_sphere(q, sub, count), m)
        return batch_projection_volume(V, frames), 0

    return run_batches(worker, samples, stream, batches, threads)


def interleaved_objective_complex(
    V: OrthoFrame,
    m: int,
    q: int,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Complex variant: the wedge interleaves the m block copies of the
    complex line through a Fubini-Study-uniform point of CP^(q-1)."""
    _check_interleaved(V, m, block=2 * q, complex_rank=True)

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        frames = _interleaved_complex_frames(sample_cp_point(q, sub, count), m)
        return batch_projection_volume(V, frames), 0

    return run_batches(worker, samples, stream, batches, threads)


def _check_interleaved(V: OrthoFrame, m: int, block: int, complex_rank: bool = False):
    if m < 1 or V.ambient_dim != block * m:
        raise DimensionMismatch(f"plane ambient {V.ambient_dim} is not block {block} times {m}")
    unit = 2 * m if complex_rank else m
    if V.rank % unit:
        raise DimensionMismatch(f"plane rank {V.rank} is not a multiple of {unit}")
    if V.rank // m > block:
        raise DimensionMismatch("plane rank exceeds block capacity")


def wirtinger_objective(
    V: OrthoFrame,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
) -> McEstimate:
    """Mean projection volume onto V of a Fubini-Study-uniform complex line
    of the realified ambient space."""
    if V.ambient_dim % 2 or V.rank % 2 or V.rank < 2:
        raise DimensionMismatch("wirtinger objective needs even rank in even ambient dimension")

    def worker(sub: RandomStream, count: int) -> tuple[np.ndarray, int]:
        x = sample_cp_point(V.ambient_dim // 2, sub, count)
        frames = np.stack([x, _apply_j_pairs(x)], axis=2)
        return batch_projection_volume(V, frames), 0

    return run_batches(worker, samples, stream, batches, threads)


def interleaved_objective_bounds(
    V: OrthoFrame,
    m: int,
    q: int,
    samples: int,
    stream: RandomStream,
) -> tuple[McEstimate, McEstimate, McEstimate]:
    """(objective, product bound, eigenvalue bound) on common draws.

    Per sample the wedge projection volume is at most the product of the
    block projection lengths (Hadamard), which is at most
    m^(-m/2) (sum of squared block projections)^(m/2) (means inequality), so
    the three estimates are ordered pointwise.
    """
    _check_interleaved(V, m, block=q)
    x = sample_sphere(q, stream.split(0), samples)
    frames = _interleaved_frames(x, m)
    vol = batch_projection_volume(V, frames)
    lengths = np.empty((samples, m))
    for r in range(m):
        rows = V.columns[r * q:(r + 1) * q, :]
        lengths[:, r] = np.linalg.norm(x @ rows, axis=1)
    hadamard = np.prod(lengths, axis=1)
    eigen = (np.sum(lengths**2, axis=1) / m) ** (m / 2.0)
    return (
        RunningStats.from_values(vol).to_estimate(stream.seed),
        RunningStats.from_values(hadamard).to_estimate(stream.seed),
        RunningStats.from_values(eigen).to_estimate(stream.seed),
    )


def eigenvalue_bound(eta: np.ndarray, m: int) -> float:
    """Deterministic quadrature of the spectral upper bound
    m^(-m/2) E[(sum_j eta_j x_j^2)^(m/2)] over the unit sphere of R^q.

    The bound is convex in each eigenvalue for m >= 3, so its maximum over
    the simplex {0 <= eta_j <= m, sum eta_j = m p} sits at vectors with
    entries in {0, m}.
    """
    eta = np.asarray(eta, dtype=float)
    q = eta.size
    scale = m ** (-m / 2.0)
    if q == 1:
        return scale * float(eta[0]) ** (m / 2.0)
    if q == 2:
        val, _ = integrate.quad(
            lambda t: (eta[0] * np.cos(t) ** 2 + eta[1] * np.sin(t) ** 2) ** (m / 2.0),
            0.0,
            2.0 * np.pi,
        )
        return scale * val / (2.0 * np.pi)
    if q == 3:
        val, _ = integrate.dblquad(
            lambda phi, theta: (
                eta[0] * (np.sin(theta) * np.cos(phi)) ** 2
                + eta[1] * (np.sin(theta) * np.sin(phi)) ** 2
                + eta[2] * np.cos(theta) ** 2
            )
            ** (m / 2.0)
            * np.sin(theta),
            0.0,
            np.pi,
            0.0,
            2.0 * np.pi,
        )
        return scale * val / (4.0 * np.pi)
    raise DimensionMismatch("quadrature provided for q <= 3 only")


def tasaki_plane(
    q: int, u: np.ndarray | None = None, stream: RandomStream | None = None
) -> OrthoFrame:
    """The 2-plane spanned by a unit vector of R^(2q) and its image under the
    twisted pair structure (block shift on the first block, negated on the
    second). Such planes are twisted-complex but generally not products.
    """
    if u is None:
        if stream is None:
            raise DegenerateVector("tasaki_plane needs a vector or a stream to draw one")
        u = sample_sphere(2 * q, stream)
    u = np.asarray(u, dtype=float)
    if u.shape != (2 * q,):
        raise DimensionMismatch(f"vector must live in R^{2 * q}")
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise NotUnit("tasaki_plane needs a unit vector")
    twisted = ComplexStructure.twisted_pair(q)
    iu = twisted.matrix @ u
    if abs(float(u @ iu)) >= 1.0 - 1e-9:  # cannot occur: the structure is skew
        raise DegenerateVector("vector is degenerate for the twisted structure")
    return orthonormalize(np.stack([u, iu], axis=1))


def product_plane(vectors: np.ndarray, m: int) -> OrthoFrame:
    """Exact product plane: the interleaved block copies of a q x p stack of
    independent block vectors."""
    base = orthonormalize(np.asarray(vectors, dtype=float))
    q, p = base.columns.shape
    op = InterleaveOperator(q, m)
    cols = [op.embed(base.columns[:, i], r) for r in range(m) for i in range(p)]
    return OrthoFrame(np.stack(cols, axis=1))


def structure_test_product(
    V: OrthoFrame, m: int, q: int, tol: float
) -> tuple[bool, dict[str, float]]:
    """Whether V is an interleaved product plane within tolerance: all block
    projection forms coincide and the first one has a {0, 1} spectrum."""
    if V.rank % m:
        raise DimensionMismatch(f"rank {V.rank} is not divisible by {m}")
    op = InterleaveOperator(q, m)
    forms = [block_form(V, r, op).matrix for r in range(m)]
    mismatch = 0.0
    for mat in forms[1:]:
        mismatch = max(mismatch, float(np.max(np.abs(mat - forms[0]))))
    eig = np.linalg.eigvalsh(forms[0])
    spectrum_gap = float(np.max(np.minimum(np.abs(eig), np.abs(1.0 - eig)))) if eig.size else 0.0
    residuals = {"block_mismatch": mismatch, "spectrum_gap": spectrum_gap}
    return mismatch <= tol and spectrum_gap <= tol, residuals


def structure_test_complex(
    V: OrthoFrame, structure: ComplexStructure, tol: float
) -> tuple[bool, dict[str, float]]:
    """Whether the span of V is invariant under the given complex structure."""
    if V.ambient_dim != structure.dim:
        raise DimensionMismatch("plane and structure dimensions differ")
    jv = structure.matrix @ V.columns
    resid = jv - V.columns @ (V.columns.T @ jv)
    residual = float(np.max(np.abs(resid)))
    return residual <= tol, {"complex_residual": residual}


@dataclass(frozen=True)
class StructureDiagnosis:
    """Classification of a plane against the known maximizer families."""

    product_form: bool
    i_prime_complex: bool
    residuals: dict


def diagnose_structure(V: OrthoFrame, spec: FamilySpec, tol: float = 0.05) -> StructureDiagnosis:
    """Structure tests appropriate to the family kind.

    Block families run the product test, plus the twisted-complex test when
    there are exactly two blocks (both families attain the maximum there).
    Unitary families test invariance under the standard complex structure and
    report the Kahler angle for 2-planes.
    """
    residuals: dict[str, float] = {}
    if spec.kind in (KIND_GRASSMANN, KIND_INTERLEAVED, KIND_INTERLEAVED_COMPLEX):
        if spec.kind == KIND_GRASSMANN:
            _, l, m = spec.geometry
            block = l
        else:
            m = spec.geometry[0]
            q = spec.geometry[2]
            block = q if spec.kind == KIND_INTERLEAVED else 2 * q
        product_ok, res = structure_test_product(V, m, block, tol)
        residuals.update(res)
        twisted_ok = False
        if m == 2:
            twisted_ok, res = structure_test_complex(
                V, ComplexStructure.twisted_pair(block), tol
            )
            residuals.update(res)
        return StructureDiagnosis(product_ok, twisted_ok, residuals)
    complex_ok, res = structure_test_complex(V, ComplexStructure.standard(spec.ambient_dim), tol)
    residuals.update(res)
    if V.rank == 2:
        angle = kahler_angle(V, ComplexStructure.standard(spec.ambient_dim))
        residuals["kahler_tau"] = float(angle.tau)
    return StructureDiagnosis(False, complex_ok, residuals)


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a random-restart stochastic ascent over candidate planes."""

    best_plane: OrthoFrame
    best_value: McEstimate
    restarts: int
    structure: StructureDiagnosis
    restart_values: tuple[float, ...]
    restart_converged: tuple[bool, ...]

    @property
    def nonconverged(self) -> int:
        return sum(0 if ok else 1 for ok in self.restart_converged)


def _objective_frames(spec: FamilySpec, stream: RandomStream, size: int) -> np.ndarray:
    """Frames defining the per-restart common-random-number objective.

    The wirtinger kind ascends its line-projection objective directly (the
    deformation coefficient shares its maximizers but not its scale).
    """
    if spec.kind == KIND_WIRTINGER:
        n, _ = spec.geometry
        x = sample_cp_point(n + 1, stream, size)
        return np.stack([x, _apply_j_pairs(x)], axis=2)
    return family_frames(spec, stream, size)


def _rotate_plane(cols: np.ndarray, a: np.ndarray, b: np.ndarray, angle: float) -> np.ndarray:
    """Rotate the frame by the given angle in the oriented plane span(a, b)
    with a inside the frame span and b orthogonal to it."""
    ca = a @ cols
    cb = b @ cols
    out = cols + np.outer(a, (np.cos(angle) - 1.0) * ca - np.sin(angle) * cb)
    out += np.outer(b, np.sin(angle) * ca + (np.cos(angle) - 1.0) * cb)
    return out


def _ascend(
    spec: FamilySpec,
    restart_stream: RandomStream,
    samples_per_eval: int,
    step_init: float,
    step_floor: float,
    max_evals: int,
) -> tuple[OrthoFrame, float, bool]:
    """One hill climb on a fixed sample set; returns the final plane, its
    common-random-number value, and whether the step floor was reached."""
    frames = _objective_frames(spec, restart_stream.split(0), samples_per_eval)
    rank = spec.plane_rank
    ambient = spec.ambient_dim
    plane = random_frame(ambient, rank, restart_stream.split(1))
    if rank == ambient:
        return plane, 1.0, True
    directions = restart_stream.split(2).generator

    def value(v: OrthoFrame) -> float:
        return float(np.mean(batch_projection_volume(v, frames)))

    best = value(plane)
    evals = 1
    step = step_init
    fails = 0
    accepts = 0
    free_dim = rank * (ambient - rank)
    fail_limit = min(16, max(8, free_dim))
    accept_cap = min(24, max(12, 2 * free_dim))  # maximizer sets can be ridges
    while evals < max_evals and step > step_floor:
        coeffs = directions.standard_normal(rank)
        inside = plane.columns @ coeffs
        inside_norm = np.linalg.norm(inside)
        if inside_norm < 1e-12:
            continue
        inside /= inside_norm
        raw = directions.standard_normal(ambient)
        raw -= plane.columns @ (plane.columns.T @ raw)
        norm = np.linalg.norm(raw)
        if norm < 1e-12:
            continue
        outside = raw / norm
        accepted = False
        for angle in (step, -step):
            cand = orthonormalize(_rotate_plane(plane.columns, inside, outside, angle))
            cand_value = value(cand)
            evals += 1
            if cand_value > best:
                plane, best = cand, cand_value
                accepted = True
                break
            if evals >= max_evals:
                break
        if accepted:
            fails = 0
            accepts += 1
        else:
            fails += 1
        if fails >= fail_limit or accepts >= accept_cap:
            step *= 0.5
            fails = 0
            accepts = 0
    return plane, best, step <= step_floor


def maximizer_scan(
    spec: FamilySpec,
    restarts: int,
    samples_per_eval: int,
    stream: RandomStream,
    step_init: float = 0.5,
    step_floor: float = 1e-4,
    max_evals: int = 2000,
    tol: float = 0.05,
    threads: int = 1,
) -> ScanResult:
    """Random-restart stochastic ascent over the Grassmannian of candidate
    planes.

    Each restart draws one fixed evaluation sample set (common random
    numbers), climbs along geodesic two-plane rotations with step halving on
    non-improvement, and stops at the step floor. The winner is re-evaluated
    on fresh draws and classified by the structure tests.
    """
    if restarts < 1:
        raise DimensionMismatch("maximizer_scan needs at least one restart")
    if samples_per_eval < 1000:
        raise DimensionMismatch("maximizer_scan needs at least 1000 samples per evaluation")

    def one(i: int) -> tuple[OrthoFrame, float, bool]:
        return _ascend(spec, stream.split(i), samples_per_eval, step_init, step_floor, max_evals)

    if threads > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, range(restarts)))
    else:
        outcomes = [one(i) for i in range(restarts)]
    values = tuple(float(v) for _, v, _ in outcomes)
    converged = tuple(bool(c) for _, _, c in outcomes)
    best_idx = int(np.argmax(values))
    best_plane = outcomes[best_idx][0]

    fresh = stream.split(restarts)
    if spec.kind == KIND_INTERLEAVED:
        m, _, q = spec.geometry
        best_value = interleaved_objective(best_plane, m, q, 4 * samples_per_eval, fresh)
    elif spec.kind == KIND_INTERLEAVED_COMPLEX:
        m, _, q = spec.geometry
        best_value = interleaved_objective_complex(best_plane, m, q, 4 * samples_per_eval, fresh)
    elif spec.kind == KIND_WIRTINGER:
        best_value = wirtinger_objective(best_plane, 4 * samples_per_eval, fresh)
    else:
        best_value = deformation_coefficient(best_plane, spec, 4 * samples_per_eval, fresh)
    structure = diagnose_structure(best_plane, spec, tol)
    return ScanResult(best_plane, best_value, restarts, structure, values, converged)
