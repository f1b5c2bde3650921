"""Exact linear-algebra kernel: orthonormal frames, polyvector pairings,
block-interleaving operators, complex structures, and block projection forms.

A k-plane is represented by an orthonormal k-frame (an ``OrthoFrame``); all
pairings are taken in absolute value, so orientation is never tracked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotUnit, RankDeficient

ORTHONORMAL_TOL = 1e-10
RANK_TOL = 1e-9
UNIT_TOL = 1e-12
STRUCTURE_TOL = 1e-12


@dataclass(frozen=True)
class OrthoFrame:
    """An orthonormal k-frame spanning a k-plane in R^n.

    ``columns`` is an n-by-k matrix whose columns are the frame vectors;
    the Gram matrix must equal the identity to within ORTHONORMAL_TOL.
    """

    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.ndim != 2 or cols.shape[0] < cols.shape[1] or cols.shape[1] < 1:
            raise DimensionMismatch(f"frame needs an n x k matrix with k <= n, got {cols.shape}")
        gram = cols.T @ cols
        err = np.max(np.abs(gram - np.eye(cols.shape[1])))
        if err > ORTHONORMAL_TOL:
            raise RankDeficient(f"columns are not orthonormal (max Gram deviation {err:.3e})")
        object.__setattr__(self, "columns", cols)

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def rotate(self, g: np.ndarray) -> "OrthoFrame":
        """Frame for the image plane under an orthogonal map g."""
        return OrthoFrame(np.asarray(g) @ self.columns)

    def projector(self) -> np.ndarray:
        """Matrix of the orthogonal projection onto the spanned plane."""
        return self.columns @ self.columns.T

    def complement(self) -> "OrthoFrame":
        """An orthonormal frame of the orthogonal complement."""
        n, k = self.columns.shape
        if k == n:
            raise DimensionMismatch("full-rank frame has a trivial complement")
        vals, vecs = np.linalg.eigh(np.eye(n) - self.projector())
        comp, _ = np.linalg.qr(vecs[:, vals > 0.5])
        return OrthoFrame(comp)


def orthonormalize(vectors: np.ndarray) -> OrthoFrame:
    """Gram-Schmidt in input-column order; the first output column is the
    normalized first input column.

    Raises RankDeficient when the smallest singular value of the input is
    at or below RANK_TOL.
    """
    mat = np.asarray(vectors, dtype=float)
    if mat.ndim == 1:
        mat = mat[:, None]
    if np.min(np.linalg.svd(mat, compute_uv=False)) <= RANK_TOL:
        raise RankDeficient("input columns are numerically dependent")
    n, k = mat.shape
    out = np.empty((n, k))
    for j in range(k):
        v = mat[:, j].copy()
        for _ in range(2):  # one reorthogonalization pass for 1e-10 Gram accuracy
            v -= out[:, :j] @ (out[:, :j].T @ v)
        out[:, j] = v / np.linalg.norm(v)
    return OrthoFrame(out)


def pairing(V: OrthoFrame, W: OrthoFrame) -> float:
    """|<V, W>| for two k-planes: the absolute determinant of the k x k
    matrix of mutual inner products. Equals 1 exactly when the spans coincide.
    """
    if V.ambient_dim != W.ambient_dim or V.rank != W.rank:
        raise DimensionMismatch(
            f"pairing needs equal shapes, got {V.columns.shape} vs {W.columns.shape}"
        )
    return float(abs(np.linalg.det(V.columns.T @ W.columns)))


def projection_volume(V: OrthoFrame, Z: OrthoFrame) -> float:
    """j-volume of the orthogonal projection of the unit simple j-vector Z
    onto the plane V (j <= rank V). Coincides with ``pairing`` when j = rank V.
    """
    if V.ambient_dim != Z.ambient_dim:
        raise DimensionMismatch("projection_volume needs a common ambient space")
    if Z.rank > V.rank:
        raise DimensionMismatch("projected polyvector rank exceeds the target plane rank")
    g = V.columns.T @ Z.columns
    det = np.linalg.det(g.T @ g)
    return float(np.sqrt(max(det, 0.0)))


def batch_projection_volume(V: OrthoFrame, frames: np.ndarray) -> np.ndarray:
    """Vectorized ``projection_volume`` against a stack of frames (N, n, j)."""
    if frames.shape[1] != V.ambient_dim or frames.shape[2] > V.rank:
        raise DimensionMismatch("frame stack incompatible with the target plane")
    g = np.matmul(V.columns.T, frames)  # (N, rank, j)
    if frames.shape[2] == V.rank:
        return np.abs(np.linalg.det(g))
    dets = np.linalg.det(np.matmul(g.transpose(0, 2, 1), g))
    return np.sqrt(np.clip(dets, 0.0, None))


@dataclass(frozen=True)
class ComplexStructure:
    """An orthogonal matrix J with J^2 = -I on an even-dimensional real space."""

    matrix: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.matrix, dtype=float)
        n = j.shape[0]
        if j.ndim != 2 or j.shape != (n, n) or n % 2:
            raise DimensionMismatch("complex structure needs a square even-dimensional matrix")
        if np.max(np.abs(j @ j + np.eye(n))) > STRUCTURE_TOL:
            raise DimensionMismatch("matrix squared is not -identity")
        if np.max(np.abs(j.T @ j - np.eye(n))) > STRUCTURE_TOL:
            raise DimensionMismatch("matrix is not orthogonal")
        object.__setattr__(self, "matrix", j)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ self.matrix.T

    @classmethod
    def standard(cls, dim: int) -> "ComplexStructure":
        """Pairwise structure on R^(2n): e(2i) -> e(2i+1) -> -e(2i)."""
        if dim % 2:
            raise DimensionMismatch("standard structure needs an even dimension")
        return cls(np.kron(np.eye(dim // 2), np.array([[0.0, -1.0], [1.0, 0.0]])))

    @classmethod
    def twisted_pair(cls, block_dim: int) -> "ComplexStructure":
        """Structure on two stacked blocks of R^q sending (x, y) to (-y, x):
        the block shift on the first block and its negative on the second.
        """
        return cls(np.kron(np.array([[0.0, -1.0], [1.0, 0.0]]), np.eye(block_dim)))


def realify_matrix(u: np.ndarray) -> np.ndarray:
    """Real 2n x 2n image of a complex n x n matrix under the pairwise
    coordinate convention (z_k = x_{2k} + i x_{2k+1}); batched over leading axes.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[-1]
    out = np.zeros(u.shape[:-2] + (2 * n, 2 * n))
    out[..., 0::2, 0::2] = u.real
    out[..., 0::2, 1::2] = -u.imag
    out[..., 1::2, 0::2] = u.imag
    out[..., 1::2, 1::2] = u.real
    return out


def complexify_vector(x: np.ndarray) -> np.ndarray:
    """Complex n-vector from a real 2n-vector in pairwise convention."""
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def realify_vector(z: np.ndarray) -> np.ndarray:
    """Inverse of ``complexify_vector``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


@dataclass(frozen=True)
class InterleaveOperator:
    """Cyclic block shift on R^(q*m) viewed as m stacked blocks of R^q."""

    block_dim: int
    copies: int

    def __post_init__(self):
        if self.block_dim < 1 or self.copies < 1:
            raise DimensionMismatch("block_dim and copies must be positive")

    @property
    def dim(self) -> int:
        return self.block_dim * self.copies

    def matrix(self) -> np.ndarray:
        perm = np.roll(np.eye(self.copies), 1, axis=0)
        return np.kron(perm, np.eye(self.block_dim))

    def apply(self, x: np.ndarray, power: int = 1) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        blocks = x.reshape(x.shape[:-1] + (self.copies, self.block_dim))
        return np.roll(blocks, power % self.copies, axis=-2).reshape(x.shape)

    def embed(self, x: np.ndarray, block: int) -> np.ndarray:
        """Copy of a block vector placed in the given block of R^(q*m)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.block_dim:
            raise DimensionMismatch("embedded vector must have the block dimension")
        out = np.zeros(x.shape[:-1] + (self.dim,))
        q = self.block_dim
        out[..., block * q:(block + 1) * q] = x
        return out

    def block_rows(self, mat: np.ndarray, block: int) -> np.ndarray:
        q = self.block_dim
        return mat[block * q:(block + 1) * q]


def interleaved_wedge(x: np.ndarray, op: InterleaveOperator) -> OrthoFrame:
    """Frame of the simple m-vector built from the m block copies of a unit x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (op.block_dim,):
        raise DimensionMismatch("vector must live in a single block")
    if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
        raise NotUnit("interleaved_wedge needs a unit vector")
    cols = np.stack([op.embed(x, r) for r in range(op.copies)], axis=1)
    return OrthoFrame(cols)


@dataclass(frozen=True)
class ProjectionForm:
    """Symmetric PSD form on R^q with spectrum inside [0, 1]."""

    matrix: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.matrix, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DimensionMismatch("projection form must be square")
        if np.max(np.abs(b - b.T)) > ORTHONORMAL_TOL:
            raise DimensionMismatch("projection form must be symmetric")
        eig = np.linalg.eigvalsh((b + b.T) / 2.0)
        if eig.min() < -ORTHONORMAL_TOL or eig.max() > 1.0 + ORTHONORMAL_TOL:
            raise DimensionMismatch("projection form spectrum escapes [0, 1]")
        object.__setattr__(self, "matrix", (b + b.T) / 2.0)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def block_form(V: OrthoFrame, r: int, op: InterleaveOperator) -> ProjectionForm:
    """Quadratic form on R^q giving the squared length of the V-projection of
    the r-th block copy of a vector.
    """
    if V.ambient_dim != op.dim:
        raise DimensionMismatch("frame ambient dimension must equal block_dim * copies")
    if not 0 <= r < op.copies:
        raise DimensionMismatch(f"block index {r} outside [0, {op.copies})")
    a = op.block_rows(V.columns, r)  # q x d slice of the frame
    return ProjectionForm(a @ a.T)


def trace_identity(V: OrthoFrame, op: InterleaveOperator) -> float:
    """Sum over blocks of the projection-form traces; always equals rank V."""
    if V.ambient_dim != op.dim:
        raise DimensionMismatch("frame ambient dimension must equal block_dim * copies")
    return float(sum(block_form(V, r, op).trace() for r in range(op.copies)))


class KahlerAngle(NamedTuple):
    tau: float
    v1: np.ndarray
    v2: np.ndarray
    v2_arbitrary: bool


def kahler_angle(V: OrthoFrame, J: ComplexStructure) -> KahlerAngle:
    """Normal form of a 2-plane in a Hermitian space.

    Returns (tau, v1, v2) with V spanned by v1 and cos(tau) J v1 + sin(tau) v2,
    tau in [0, pi/2]. cos(tau) is the absolute inner product of one frame
    vector with J applied to the other, which is basis independent. When the
    plane is J-invariant v2 is undetermined; a deterministic filler is
    returned with v2_arbitrary set.
    """
    if V.rank != 2:
        raise DimensionMismatch("kahler_angle is defined for 2-planes")
    if V.ambient_dim != J.dim:
        raise DimensionMismatch("frame and complex structure dimensions differ")
    k = V.columns.T @ J.matrix @ V.columns  # 2x2, skew up to rounding
    cos_tau = float(min(np.linalg.svd(k, compute_uv=False)[0], 1.0))
    tau = float(np.arccos(cos_tau))
    x1 = V.columns[:, 0]
    x2 = V.columns[:, 1].copy()
    if float(x1 @ J.matrix @ x2) > 0.0:
        x2 = -x2  # orient so that <x1, J x2> = -cos(tau)
    sin_tau = np.sqrt(max(0.0, 1.0 - cos_tau * cos_tau))
    if sin_tau < 1e-8:
        jx1 = J.matrix @ x1
        v2 = None
        for idx in range(V.ambient_dim):
            cand = np.zeros(V.ambient_dim)
            cand[idx] = 1.0
            cand -= (cand @ x1) * x1 + (cand @ jx1) * jx1
            norm = np.linalg.norm(cand)
            if norm > 0.5:
                v2 = cand / norm
                break
        return KahlerAngle(tau, x1, v2, True)
    v2 = (x2 - cos_tau * (J.matrix @ x1)) / sin_tau
    return KahlerAngle(tau, x1, v2 / np.linalg.norm(v2), False)
