"""Left-inverse construction: pseudo-inverse, parameterized family, square inverse."""

import numpy as np
import pytest

from groupsampling import (DimensionMismatchError, FrameConditionError, GroupSpec,
                           SequenceMatrix, SingularCharacterError, TransferMatrix,
                           VectorSequence, apply, diagnostics, left_inverse_family,
                           moore_penrose, square_inverse, transfer, verify_left_inverse)


def rand_system(rng, group, m, n):
    vals = rng.standard_normal((m, n, group.order)) + 1j * rng.standard_normal(
        (m, n, group.order))
    return SequenceMatrix(group, vals)


def rand_transfer(rng, group, rows, cols):
    mats = rng.standard_normal((group.order, rows, cols)) + 1j * rng.standard_normal(
        (group.order, rows, cols))
    return TransferMatrix(group, mats)


def rand_frame_system(rng, group, m, n, floor=1e-6):
    while True:
        a = rand_system(rng, group, m, n)
        d = diagnostics(a)
        if d.beta > 0 and d.delta / d.beta ** n > floor:
            return a


class TestMoorePenrose:
    def test_two_channel_constant(self):
        g = GroupSpec((2,))
        a = SequenceMatrix(g, np.array([[[1, 0]], [[1, 0]]], dtype=complex))
        b = moore_penrose(a)
        np.testing.assert_allclose(b.transfer.matrices, 0.5 * np.ones((2, 1, 2)), atol=1e-14)

    def test_identity(self):
        g = GroupSpec((3, 2))
        b = moore_penrose(SequenceMatrix.identity(g, 2))
        np.testing.assert_allclose(b.coefficients.values,
                                   SequenceMatrix.identity(g, 2).values, atol=1e-14)

    def test_scaled_delta(self):
        g = GroupSpec((4,))
        a = SequenceMatrix(g, 2.0 * SequenceMatrix.identity(g, 1).values)
        b = moore_penrose(a)
        np.testing.assert_allclose(b.transfer.matrices, 0.5 * np.ones((4, 1, 1)), atol=1e-14)
        expected = 0.5 * SequenceMatrix.identity(g, 1).values
        np.testing.assert_allclose(b.coefficients.values, expected, atol=1e-14)

    def test_rejects_non_frame(self):
        g = GroupSpec((2,))
        a = SequenceMatrix(g, np.array([[[1, 1]]], dtype=complex))
        with pytest.raises(FrameConditionError) as err:
            moore_penrose(a)
        assert err.value.delta == 0.0
        assert "delta" in str(err.value)

    def test_residual_small(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rand_frame_system(rng, GroupSpec((2, 3)), 3, 2)
            assert verify_left_inverse(a, moore_penrose(a)) < 1e-9

    def test_real_symmetric_gives_real_dual(self):
        g = GroupSpec((4,))
        a = SequenceMatrix(g, np.array([[[2, 0.5, 0, 0.5]]], dtype=complex))
        b = moore_penrose(a)
        assert np.abs(b.coefficients.values.imag).max() < 1e-12


class TestFamily:
    def test_zero_parameter_is_pseudo_inverse(self):
        rng = np.random.default_rng(1)
        g = GroupSpec((3,))
        a = rand_frame_system(rng, g, 3, 2)
        c = TransferMatrix(g, np.zeros((g.order, 2, 3)))
        fam = left_inverse_family(a, c)
        np.testing.assert_allclose(fam.transfer.matrices,
                                   moore_penrose(a).transfer.matrices, atol=1e-12)

    def test_square_case_collapses(self):
        rng = np.random.default_rng(2)
        g = GroupSpec((4,))
        a = rand_frame_system(rng, g, 2, 2)
        base = moore_penrose(a).transfer.matrices
        for _ in range(5):
            fam = left_inverse_family(a, rand_transfer(rng, g, 2, 2))
            assert np.abs(fam.transfer.matrices - base).max() < 1e-8 * (
                1 + np.abs(base).max())

    def test_hand_example(self):
        g = GroupSpec((2,))
        a = SequenceMatrix(g, np.array([[[1, 0]], [[1, 0]]], dtype=complex))
        c = TransferMatrix(g, np.tile(np.array([[1.0, 0.0]]), (2, 1, 1)))
        fam = left_inverse_family(a, c)
        np.testing.assert_allclose(fam.transfer.matrices,
                                   np.tile(np.array([[1.0, 0.0]]), (2, 1, 1)), atol=1e-14)
        assert verify_left_inverse(a, fam) < 1e-14

    def test_every_member_is_left_inverse(self):
        rng = np.random.default_rng(3)
        g = GroupSpec((2, 2))
        a = rand_frame_system(rng, g, 4, 2)
        for _ in range(20):
            fam = left_inverse_family(a, rand_transfer(rng, g, 2, 4))
            assert verify_left_inverse(a, fam) < 1e-9

    def test_pseudo_inverse_minimizes_norm(self):
        rng = np.random.default_rng(4)
        g = GroupSpec((3,))
        for _ in range(5):
            a = rand_frame_system(rng, g, 3, 2)
            base = np.linalg.norm(moore_penrose(a).transfer.matrices)
            for _ in range(10):
                fam = left_inverse_family(a, rand_transfer(rng, g, 2, 3))
                assert np.linalg.norm(fam.transfer.matrices) >= base - 1e-12

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(5)
        g = GroupSpec((3,))
        a = rand_frame_system(rng, g, 3, 2)
        with pytest.raises(DimensionMismatchError):
            left_inverse_family(a, rand_transfer(rng, g, 3, 2))


class TestVerify:
    def test_zero_candidate(self):
        g = GroupSpec((4,))
        a = SequenceMatrix.identity(g, 1)
        zero = SequenceMatrix.zeros(g, 1, 1)
        assert verify_left_inverse(a, zero) == pytest.approx(1.0)


class TestSquareInverse:
    def test_identity(self):
        g = GroupSpec((2, 2))
        b = square_inverse(SequenceMatrix.identity(g, 2))
        np.testing.assert_allclose(b.coefficients.values,
                                   SequenceMatrix.identity(g, 2).values, atol=1e-14)

    def test_scalar_reciprocal(self):
        g = GroupSpec((4,))
        a = SequenceMatrix(g, np.array([[[1, 0.5, 0, 0]]], dtype=complex))
        b = square_inverse(a)
        expected = 1.0 / np.array([1.5, 1 - 0.5j, 0.5, 1 + 0.5j])
        np.testing.assert_allclose(b.transfer.matrices[:, 0, 0], expected, atol=1e-12)

    def test_singular_character_reported(self):
        g = GroupSpec((2,))
        a = SequenceMatrix(g, np.array([[[1, 1]]], dtype=complex))
        with pytest.raises(SingularCharacterError) as err:
            square_inverse(a)
        assert err.value.characters == [(1,)]

    def test_non_square_rejected(self):
        g = GroupSpec((2,))
        a = SequenceMatrix(g, np.ones((2, 1, 2), dtype=complex))
        with pytest.raises(DimensionMismatchError):
            square_inverse(a)


class TestReconstructionIdentity:
    def test_roundtrip_on_random_frames(self):
        rng = np.random.default_rng(6)
        g = GroupSpec((2, 3))
        for _ in range(20):
            a = rand_frame_system(rng, g, 3, 2)
            b = moore_penrose(a)
            x = VectorSequence(g, rng.standard_normal((2, g.order))
                               + 1j * rng.standard_normal((2, g.order)))
            back = apply(b.coefficients, apply(a, x))
            assert np.abs(back.values - x.values).max() < 1e-9 * (
                1 + np.abs(x.values).max())

    def test_transfer_dump_in_json(self):
        rng = np.random.default_rng(7)
        a = rand_frame_system(rng, GroupSpec((3,)), 2, 1)
        payload = moore_penrose(a).to_json_dict()
        assert payload["kind"] == "moore_penrose"
        assert "transfer" in payload and "entries" in payload
        t = TransferMatrix.from_json_dict(payload["transfer"])
        np.testing.assert_allclose(t.matrices, moore_penrose(a).transfer.matrices)
