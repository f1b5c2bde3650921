"""Seeded, splittable randomness and exact-invariance samplers for spheres,
rotation and unitary groups, torus coordinates on S^3, and Fubini-Study
points of complex projective space.

Every sampler is a deterministic function of its ``RandomStream``; all laws
are probability measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .frames import OrthoFrame, orthonormalize, realify_matrix

_SEED_MASK = (1 << 64) - 1


@dataclass
class RandomStream:
    """A seeded random source addressed by (seed, path).

    Identical (seed, path) pairs replay identical sample sequences; ``split``
    derives statistically independent child streams. A stream is single
    consumer: share work across splits, never across one stream.
    """

    seed: int
    path: tuple[int, ...] = ()
    _generator: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.seed = int(self.seed) & _SEED_MASK
        self.path = tuple(int(p) for p in self.path)

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    def split(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + (int(index),))

    def splits(self, count: int) -> list["RandomStream"]:
        return [self.split(i) for i in range(count)]


def sample_sphere(q: int, stream: RandomStream, size: int | None = None) -> np.ndarray:
    """Uniform point(s) on the unit sphere of R^q. Shape (q,) or (size, q)."""
    if q < 1:
        raise DimensionMismatch("sphere dimension must be at least 1")
    shape = (q,) if size is None else (size, q)
    x = stream.generator.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def sample_rotation(n: int, stream: RandomStream, size: int | None = None) -> np.ndarray:
    """Haar rotation(s) in SO(n) via QR of a Gaussian matrix.

    The triangular factor's diagonal signs are absorbed into Q (making the
    factorization unique, hence Q Haar on O(n)), then one column is negated
    if needed to reach determinant +1.
    """
    if n < 1:
        raise DimensionMismatch("rotation dimension must be at least 1")
    shape = (n, n) if size is None else (size, n, n)
    z = stream.generator.standard_normal(shape)
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d = np.where(d == 0, 1.0, d)
    q = q * d[..., None, :]
    neg = np.linalg.det(q) < 0
    if size is None:
        if neg:
            q[:, -1] = -q[:, -1]
    else:
        q[neg, :, -1] = -q[neg, :, -1]
    return q


def sample_unitary(n: int, stream: RandomStream, size: int | None = None) -> np.ndarray:
    """Haar unitary matrices realified to 2n x 2n real matrices commuting
    with the standard complex structure.
    """
    if n < 1:
        raise DimensionMismatch("unitary dimension must be at least 1")
    u = sample_complex_unitary(n, stream, size)
    return realify_matrix(u)


def sample_complex_unitary(n: int, stream: RandomStream, size: int | None = None) -> np.ndarray:
    """Haar unitary matrices in their native complex n x n form."""
    if n < 1:
        raise DimensionMismatch("unitary dimension must be at least 1")
    shape = (n, n) if size is None else (size, n, n)
    g = stream.generator
    z = (g.standard_normal(shape) + 1j * g.standard_normal(shape)) * np.sqrt(0.5)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = d / np.where(np.abs(d) == 0, 1.0, np.abs(d))
    return q * phase[..., None, :].conj()


@dataclass(frozen=True)
class TorusPoint:
    """Torus coordinates of a point of S^3.

    The induced coordinates are (sin b cos a, sin b sin a, cos b cos g,
    cos b sin g); fields may be scalars or equally shaped arrays.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        pt = self.embed()
        norms = np.linalg.norm(pt, axis=-1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise DimensionMismatch("torus coordinates do not land on the unit sphere")

    def embed(self) -> np.ndarray:
        """The corresponding point(s) of S^3 in R^4."""
        a, b, g = self.alpha, self.beta, self.gamma
        return np.stack(
            [
                np.sin(b) * np.cos(a),
                np.sin(b) * np.sin(a),
                np.cos(b) * np.cos(g),
                np.cos(b) * np.sin(g),
            ],
            axis=-1,
        )


def sample_torus_s3(stream: RandomStream, size: int | None = None) -> TorusPoint:
    """Uniform S^3 point(s) expressed in torus coordinates.

    The marginal density of beta on [0, pi/2] is sin(2 beta); alpha and gamma
    are independent uniforms on [0, 2 pi).
    """
    x = sample_sphere(4, stream, size)
    alpha = np.mod(np.arctan2(x[..., 1], x[..., 0]), 2.0 * np.pi)
    gamma = np.mod(np.arctan2(x[..., 3], x[..., 2]), 2.0 * np.pi)
    beta = np.arctan2(np.hypot(x[..., 0], x[..., 1]), np.hypot(x[..., 2], x[..., 3]))
    return TorusPoint(alpha, beta, gamma)


def sample_cp_point(n: int, stream: RandomStream, size: int | None = None) -> np.ndarray:
    """Unit representative(s) in R^(2n) of Fubini-Study-uniform points of
    CP^(n-1); the induced complex line is uniform because the sphere law
    pushes forward along the Hopf quotient.
    """
    if n < 1:
        raise DimensionMismatch("projective space needs at least one complex dimension")
    return sample_sphere(2 * n, stream, size)


def random_frame(ambient_dim: int, rank: int, stream: RandomStream) -> OrthoFrame:
    """Invariantly distributed orthonormal frame (uniform on the Stiefel
    manifold, hence a uniform plane)."""
    mat = stream.generator.standard_normal((ambient_dim, rank))
    return orthonormalize(mat)
