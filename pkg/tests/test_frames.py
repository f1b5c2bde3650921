"""Exact linear-algebra kernel tests: frames, pairings, block forms, angles."""

import numpy as np
import pytest

from croftonlab.errors import DimensionMismatch, NotUnit, RankDeficient
from croftonlab.frames import (
    ComplexStructure,
    InterleaveOperator,
    OrthoFrame,
    batch_projection_volume,
    block_form,
    interleaved_wedge,
    kahler_angle,
    orthonormalize,
    pairing,
    projection_volume,
    trace_identity,
)
from croftonlab.sampling import RandomStream, random_frame, sample_rotation


def frame(*cols):
    return OrthoFrame(np.stack([np.asarray(c, dtype=float) for c in cols], axis=1))


def test_orthonormalize_identity_passthrough():
    out = orthonormalize(np.eye(3))
    assert np.allclose(out.columns, np.eye(3), atol=1e-14)


def test_orthonormalize_gram_schmidt_by_hand():
    out = orthonormalize(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))
    assert np.allclose(out.columns[:, 0], [1, 0, 0], atol=1e-14)
    assert np.allclose(out.columns[:, 1], [0, 1, 0], atol=1e-14)


def test_orthonormalize_rescaling_only():
    out = orthonormalize(np.array([[2.0, 0.0], [0.0, 0.0], [0.0, 3.0]]))
    assert np.allclose(out.columns[:, 0], [1, 0, 0], atol=1e-14)
    assert np.allclose(out.columns[:, 1], [0, 0, 1], atol=1e-14)


def test_orthonormalize_first_column_convention():
    rng = np.random.default_rng(3)
    mat = rng.standard_normal((5, 3))
    out = orthonormalize(mat)
    assert np.allclose(out.columns[:, 0], mat[:, 0] / np.linalg.norm(mat[:, 0]), atol=1e-12)


def test_orthonormalize_rank_deficient():
    with pytest.raises(RankDeficient):
        orthonormalize(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))


def test_frame_invariant_enforced():
    with pytest.raises(RankDeficient):
        OrthoFrame(np.array([[1.0, 0.5], [0.0, 1.0], [0.0, 0.0]]))


def test_pairing_identical_spans():
    v = frame([1, 0, 0], [0, 1, 0])
    assert pairing(v, v) == pytest.approx(1.0, abs=1e-12)
    # same span, different basis
    w = orthonormalize(np.array([[1.0, 1.0], [1.0, -1.0], [0.0, 0.0]]))
    assert pairing(v, w) == pytest.approx(1.0, abs=1e-12)


def test_pairing_singular_gram():
    v = frame([1, 0, 0], [0, 1, 0])
    w = frame([1, 0, 0], [0, 0, 1])
    assert pairing(v, w) == pytest.approx(0.0, abs=1e-12)


def test_pairing_dihedral_angle():
    ang = np.pi / 3
    v = frame([1, 0, 0], [0, 1, 0])
    w = frame([1, 0, 0], [0, np.cos(ang), np.sin(ang)])
    assert pairing(v, w) == pytest.approx(0.5, abs=1e-12)


def test_pairing_dimension_mismatch():
    v = frame([1, 0, 0], [0, 1, 0])
    w = frame([1, 0, 0])
    with pytest.raises(DimensionMismatch):
        pairing(v, w)
    with pytest.raises(DimensionMismatch):
        pairing(v, frame([1, 0, 0, 0], [0, 1, 0, 0]))


def test_pairing_rotation_invariance():
    stream = RandomStream(11)
    v = random_frame(5, 2, stream.split(0))
    w = random_frame(5, 2, stream.split(1))
    base = pairing(v, w)
    rotations = sample_rotation(5, stream.split(2), 1000)
    worst = max(abs(pairing(v.rotate(g), w.rotate(g)) - base) for g in rotations)
    assert worst <= 1e-10


def test_pairing_symmetry():
    stream = RandomStream(12)
    v = random_frame(6, 3, stream.split(0))
    w = random_frame(6, 3, stream.split(1))
    assert pairing(v, w) == pytest.approx(pairing(w, v), abs=1e-12)


def test_pairing_hadamard_bound():
    stream = RandomStream(13)
    for i in range(50):
        v = random_frame(6, 3, stream.split(2 * i))
        w = random_frame(6, 3, stream.split(2 * i + 1))
        bound = np.prod([np.linalg.norm(v.columns.T @ w.columns[:, j]) for j in range(3)])
        assert pairing(v, w) <= bound + 1e-12


def test_projection_volume_containment():
    v = frame([1, 0, 0], [0, 1, 0])
    z = frame([0, 1, 0])
    assert projection_volume(v, z) == pytest.approx(1.0, abs=1e-12)


def test_projection_volume_orthogonal():
    v = frame([1, 0, 0], [0, 1, 0])
    assert projection_volume(v, frame([0, 0, 1])) == pytest.approx(0.0, abs=1e-12)


def test_projection_volume_diagonal_vector():
    v = frame([1, 0, 0], [0, 1, 0])
    z = frame(np.array([1, 0, 1]) / np.sqrt(2))
    assert projection_volume(v, z) == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_projection_volume_matches_pairing_at_equal_rank():
    stream = RandomStream(14)
    v = random_frame(5, 2, stream.split(0))
    w = random_frame(5, 2, stream.split(1))
    assert projection_volume(v, w) == pytest.approx(pairing(v, w), abs=1e-12)


def test_projection_volume_rank_order():
    v = frame([1, 0, 0])
    with pytest.raises(DimensionMismatch):
        projection_volume(v, frame([1, 0, 0], [0, 1, 0]))


def test_batch_projection_volume_agrees():
    stream = RandomStream(15)
    v = random_frame(6, 3, stream.split(0))
    frames = np.stack([random_frame(6, 2, stream.split(i + 1)).columns for i in range(20)])
    batched = batch_projection_volume(v, frames)
    single = [projection_volume(v, OrthoFrame(f)) for f in frames]
    assert np.allclose(batched, single, atol=1e-12)


def test_interleaved_wedge_block_shift():
    op = InterleaveOperator(2, 2)
    w = interleaved_wedge(np.array([1.0, 0.0]), op)
    assert np.allclose(w.columns[:, 0], [1, 0, 0, 0])
    assert np.allclose(w.columns[:, 1], [0, 0, 1, 0])


def test_interleaved_wedge_scalar_blocks():
    op = InterleaveOperator(1, 3)
    w = interleaved_wedge(np.array([1.0]), op)
    assert np.allclose(w.columns, np.eye(3))


def test_interleaved_wedge_single_copy():
    op = InterleaveOperator(4, 1)
    x = np.array([0.5, 0.5, 0.5, 0.5])
    w = interleaved_wedge(x, op)
    assert np.allclose(w.columns[:, 0], x)


def test_interleaved_wedge_not_unit():
    with pytest.raises(NotUnit):
        interleaved_wedge(np.array([1.0, 1.0]), InterleaveOperator(2, 2))


def test_interleave_operator_cyclic():
    op = InterleaveOperator(3, 4)
    mat = op.matrix()
    assert np.allclose(np.linalg.matrix_power(mat, 4), np.eye(12))
    assert np.allclose(mat.T @ mat, np.eye(12))
    x = np.arange(12.0)
    assert np.allclose(op.apply(x), mat @ x)


def test_block_form_block_aligned():
    # interleaved copies of span(e1) in two blocks of R^2: every block form is
    # the rank-one coordinate projector
    op = InterleaveOperator(2, 2)
    v = interleaved_wedge(np.array([1.0, 0.0]), op)
    for r in range(2):
        assert np.allclose(block_form(v, r, op).matrix, np.diag([1.0, 0.0]), atol=1e-12)


def test_block_form_single_block():
    # V = all of block 0: the zeroth form is the identity, the others vanish
    q, m = 3, 2
    op = InterleaveOperator(q, m)
    v = OrthoFrame(np.eye(q * m)[:, :q])
    assert np.allclose(block_form(v, 0, op).matrix, np.eye(q), atol=1e-12)
    assert np.allclose(block_form(v, 1, op).matrix, 0.0, atol=1e-12)


def test_block_form_eigenvalue_range():
    stream = RandomStream(16)
    for i, (q, m) in enumerate([(2, 2), (3, 2), (2, 3), (4, 3)]):
        d = min(q * m, q + i)
        v = random_frame(q * m, d, stream.split(i))
        op = InterleaveOperator(q, m)
        for r in range(m):
            eig = block_form(v, r, op).eigenvalues()
            assert eig.min() >= -1e-10 and eig.max() <= 1.0 + 1e-10


def test_trace_identity_full_space():
    op = InterleaveOperator(2, 2)
    v = OrthoFrame(np.eye(4))
    assert trace_identity(v, op) == pytest.approx(4.0, abs=1e-10)


def test_trace_identity_equal_block_vector():
    op = InterleaveOperator(2, 2)
    x = np.array([1.0, 0.0, 1.0, 0.0]) / np.sqrt(2)
    assert trace_identity(OrthoFrame(x[:, None]), op) == pytest.approx(1.0, abs=1e-10)


def test_trace_identity_random_frames_with_oracle():
    # identity plus a brute-force double sum over an independent orthonormal
    # basis of the block space
    stream = RandomStream(17)
    cases = 0
    i = 0
    for q in (2, 3, 4):
        for m in (1, 2, 3):
            op = InterleaveOperator(q, m)
            for d in range(1, q * m + 1):
                if cases >= 100:
                    break
                v = random_frame(q * m, d, stream.split(i))
                i += 1
                assert trace_identity(v, op) == pytest.approx(d, abs=1e-10)
                basis = sample_rotation(q, stream.split(1000 + i))
                proj = v.projector()
                brute = 0.0
                for r in range(m):
                    for j in range(q):
                        w = op.embed(basis[:, j], r)
                        brute += float(w @ proj @ w)
                assert brute == pytest.approx(d, abs=1e-10)
                cases += 1
    assert cases >= 50


def test_complex_structure_standard():
    j = ComplexStructure.standard(4)
    e1 = np.eye(4)[:, 0]
    assert np.allclose(j.matrix @ e1, np.eye(4)[:, 1])
    assert np.allclose(j.matrix @ j.matrix, -np.eye(4), atol=1e-12)


def test_complex_structure_rejects_non_structure():
    with pytest.raises(DimensionMismatch):
        ComplexStructure(np.eye(4))
    with pytest.raises(DimensionMismatch):
        ComplexStructure(np.eye(3))


def test_twisted_pair_structure():
    j = ComplexStructure.twisted_pair(3)
    x = np.arange(6.0)
    out = j.matrix @ x
    assert np.allclose(out[:3], -x[3:])
    assert np.allclose(out[3:], x[:3])


def test_kahler_angle_complex_line():
    j = ComplexStructure.standard(4)
    v = frame([1, 0, 0, 0], [0, 1, 0, 0])  # span(e1, J e1)
    result = kahler_angle(v, j)
    assert result.tau == pytest.approx(0.0, abs=1e-8)
    assert result.v2_arbitrary


def test_kahler_angle_totally_real():
    j = ComplexStructure.standard(4)
    v = frame([1, 0, 0, 0], [0, 0, 1, 0])
    result = kahler_angle(v, j)
    assert result.tau == pytest.approx(np.pi / 2, abs=1e-12)
    assert not result.v2_arbitrary


@pytest.mark.parametrize("alpha", [0.1, 0.4, np.pi / 4, 1.0, 1.4])
def test_kahler_angle_interpolates(alpha):
    j = ComplexStructure.standard(6)
    e = np.eye(6)
    x2 = np.cos(alpha) * e[:, 1] + np.sin(alpha) * e[:, 2]
    result = kahler_angle(frame(e[:, 0], x2), j)
    assert result.tau == pytest.approx(alpha, abs=1e-12)


def test_kahler_angle_basis_independent():
    stream = RandomStream(18)
    j = ComplexStructure.standard(6)
    v = random_frame(6, 2, stream.split(0))
    tau0 = kahler_angle(v, j).tau
    gen = stream.split(1).generator
    for _ in range(50):
        theta = gen.uniform(0, 2 * np.pi)
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        rebased = OrthoFrame(v.columns @ rot)
        assert kahler_angle(rebased, j).tau == pytest.approx(tau0, abs=1e-10)


def test_kahler_angle_normal_form_reproduces_span():
    stream = RandomStream(19)
    j = ComplexStructure.standard(6)
    for i in range(20):
        v = random_frame(6, 2, stream.split(i))
        result = kahler_angle(v, j)
        if result.v2_arbitrary:
            continue
        x2 = np.cos(result.tau) * (j.matrix @ result.v1) + np.sin(result.tau) * result.v2
        rebuilt = orthonormalize(np.stack([result.v1, x2], axis=1))
        assert pairing(rebuilt, v) == pytest.approx(1.0, abs=1e-10)


def test_complement_orthogonality():
    stream = RandomStream(20)
    v = random_frame(7, 3, stream.split(0))
    comp = v.complement()
    assert comp.rank == 4
    assert np.max(np.abs(v.columns.T @ comp.columns)) < 1e-10
