"""Tests for operator specs, realization, and spectral structure.

Oracles: hand-computed 2x2 eigenpairs, closed-form Jordan powers, and naive
repeated matrix multiplication. Frozen matrices below were worked out by hand.
"""

import json
import math

import numpy as np
import pytest

from recurlab import (
    DenseMatrix,
    DiagonalUnimodular,
    DirectSum,
    Inverse,
    JordanBlock,
    Power,
    Scale,
    WeightedBackwardShiftTruncation,
    direct_sum,
    eigen_span_residual,
    eigenvector_from_power_relation,
    jdg_split,
    principal_angle,
    realize,
    spec_from_json_dict,
    spec_to_json_dict,
    unimodular_eigenpairs,
)
from recurlab.errors import (
    DimensionError,
    NotAPowerFixedPointError,
    NotPowerBoundedError,
    SingularOperatorError,
    SizeCapError,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def oracle_power(m, n):
    """Naive repeated multiplication, the reference for matrix powers."""
    out = np.eye(m.shape[0], dtype=complex)
    for _ in range(n):
        out = m @ out
    return out


def hand_swap_eigenpairs():
    """Characteristic polynomial of [[0,1],[1,0]] by hand: t^2 - 1."""
    v_plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    v_minus = np.array([1.0, -1.0]) / math.sqrt(2.0)
    return [(1.0, v_plus), (-1.0, v_minus)]


SWAP = DenseMatrix(((0.0, 1.0), (1.0, 0.0)))


# ---------------------------------------------------------------------------
# realization


class TestRealize:
    def test_quarter_rotation_matrix(self):
        T = realize(DiagonalUnimodular((0.25,)))
        assert T.dim == 1
        assert abs(T.matrix[0, 0] - 1j) < 1e-15

    def test_jordan_block(self):
        T = realize(JordanBlock(1.0, 2))
        assert np.array_equal(T.matrix, np.array([[1, 1], [0, 1]], dtype=complex))

    def test_inverse_rotation_is_exact_conjugate(self):
        fwd = realize(DiagonalUnimodular((0.25, GOLDEN)))
        bwd = realize(Inverse(DiagonalUnimodular((0.25, GOLDEN))))
        assert abs(bwd.matrix[0, 0] + 1j) < 1e-15
        # bitwise conjugate, the basis of exact inverse-symmetry of return sets
        assert np.array_equal(bwd.matrix, np.conj(fwd.matrix))

    def test_weighted_shift_action(self):
        T = realize(WeightedBackwardShiftTruncation((2.0, 3.0), 3))
        assert np.array_equal(T.apply(np.array([0, 1, 0], dtype=complex)),
                              np.array([2, 0, 0], dtype=complex))
        assert np.array_equal(T.apply(np.array([0, 0, 1], dtype=complex)),
                              np.array([0, 3, 0], dtype=complex))
        assert np.array_equal(T.apply(np.array([1, 0, 0], dtype=complex)),
                              np.zeros(3, dtype=complex))

    def test_direct_sum_spec(self):
        T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                               DiagonalUnimodular((-0.25,)))))
        assert T.block_dims == (1, 1)
        assert np.allclose(T.matrix, np.diag([1j, -1j]), atol=1e-15)

    def test_direct_sum_with_scale(self):
        T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                               Scale(0.5, DenseMatrix(((1.0,),))))))
        assert np.allclose(T.matrix, np.diag([1j, 0.5]), atol=1e-15)

    def test_two_by_two_sum(self):
        T = realize(DirectSum((SWAP, SWAP)))
        assert T.dim == 4 and T.block_dims == (2, 2)
        assert np.array_equal(T.matrix[:2, :2], T.matrix[2:, 2:])
        assert not T.matrix[:2, 2:].any()

    def test_power_spec(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
        T = realize(Power(3, DenseMatrix(tuple(map(tuple, m)))))
        assert np.allclose(T.matrix, oracle_power(m, 3), rtol=1e-14)

    def test_negative_power_is_inverse_power(self):
        T = realize(Power(-2, DiagonalUnimodular((0.25,))))
        assert abs(T.matrix[0, 0] + 1.0) < 1e-15  # (-i)^2 = -1

    def test_dense_inverse(self):
        T = realize(Inverse(JordanBlock(1.0, 2)))
        assert np.allclose(T.matrix, np.array([[1, -1], [0, 1]]), atol=1e-14)

    def test_singular_inverse_rejected(self):
        with pytest.raises(SingularOperatorError):
            realize(Inverse(DenseMatrix(((1.0, 0.0), (0.0, 0.0)))))

    def test_dimension_cap(self):
        with pytest.raises(SizeCapError):
            realize(DiagonalUnimodular(tuple([0.1] * 65)))

    def test_power_bound_metadata_rotation(self):
        T = realize(DiagonalUnimodular((GOLDEN,)))
        assert abs(T.power_bound_estimate - 1.0) < 1e-12
        assert abs(T.operator_norm_estimate - 1.0) < 1e-9

    def test_power_bound_metadata_jordan_growth(self):
        # ||J(i,2)^n|| grows like n: roughly 257 at the scan horizon 256
        T = realize(JordanBlock(1j, 2))
        assert 250 < T.power_bound_estimate < 300
        assert T.power_norm_end > 2 * T.power_norm_mid * 0.9


class TestApplyConsistency:
    def test_dense_apply_matches_matmul_bitwise(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        T = realize(DenseMatrix(tuple(map(tuple, m))))
        v = rng.normal(size=5) + 1j * rng.normal(size=5)
        assert np.array_equal(T.apply(v), T.matrix @ v)

    def test_diagonal_rows_match_per_row_bitwise(self):
        rng = np.random.default_rng(8)
        T = realize(DiagonalUnimodular(tuple(rng.uniform(size=4))))
        rows = rng.normal(size=(10, 4)) + 1j * rng.normal(size=(10, 4))
        broadcast = T.apply_to_rows(rows)
        for i in range(10):
            assert np.array_equal(broadcast[i], T.apply(rows[i]))

    def test_direct_sum_apply_matches_parts_bitwise(self):
        rng = np.random.default_rng(9)
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        T1 = realize(DenseMatrix(tuple(map(tuple, m))))
        T2 = realize(DiagonalUnimodular((GOLDEN,)))
        T = direct_sum([T1, T2])
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        joint = T.apply(v)
        assert np.array_equal(joint[:2], T1.apply(v[:2]))
        assert np.array_equal(joint[2:], T2.apply(v[2:]))

    def test_block_norms_max_convention(self):
        T = direct_sum([realize(SWAP), realize(DiagonalUnimodular((0.25,)))])
        v = np.array([3.0, 4.0, 12.0], dtype=complex)
        # max(||(3,4)||, ||12||) = max(5, 12)
        assert T.norm_of(v) == 12.0
        assert T.norm_convention == "max_components"

    def test_single_block_norm_is_euclidean(self):
        T = realize(SWAP)
        v = np.array([3.0, 4.0], dtype=complex)
        assert T.norm_of(v) == 5.0


# ---------------------------------------------------------------------------
# spectral structure


class TestUnimodularEigenpairs:
    def test_mixed_diagonal(self):
        T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                               Scale(0.5, DenseMatrix(((1.0,),))))))
        data = unimodular_eigenpairs(T)
        assert data.unimodular_indices == (0,)
        lam, v = data.unimodular_pairs[0]
        assert abs(lam - 1j) < 1e-15
        assert abs(abs(v[0]) - 1.0) < 1e-12 and abs(v[1]) < 1e-12
        assert data.espan_basis.shape == (2, 1)

    def test_swap_matrix_hand_eigenpairs(self):
        T = realize(SWAP)
        data = unimodular_eigenpairs(T)
        assert len(data.unimodular_indices) == 2
        for lam_expected, v_expected in hand_swap_eigenpairs():
            found = [
                (lam, v)
                for lam, v in data.unimodular_pairs
                if abs(lam - lam_expected) < 1e-12
            ]
            assert len(found) == 1
            _, v = found[0]
            # match up to phase
            assert abs(abs(np.vdot(v_expected, v)) - 1.0) < 1e-12

    def test_jordan_block_geometric_multiplicity(self):
        # both numeric eigenvectors collapse onto e1; the span has rank 1
        T = realize(JordanBlock(1.0, 2))
        data = unimodular_eigenpairs(T)
        assert data.espan_basis.shape == (2, 1)
        assert abs(abs(data.espan_basis[0, 0]) - 1.0) < 1e-12

    def test_residuals_within_budget_on_normal_matrices(self):
        rng = np.random.default_rng(77)
        for _ in range(20):
            d = int(rng.integers(2, 11))
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            q, _ = np.linalg.qr(g)
            lam = np.exp(2j * np.pi * rng.uniform(size=d))
            m = (q * lam) @ q.conj().T
            T = realize(DenseMatrix(tuple(map(tuple, m))))
            data = unimodular_eigenpairs(T)
            assert max(data.residuals) <= data.residual_budget
            assert len(data.unimodular_indices) == d


class TestEigenSpanResidual:
    def setup_method(self):
        self.T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                                    Scale(0.5, DenseMatrix(((1.0,),))))))
        self.data = unimodular_eigenpairs(self.T)

    def test_inside_span(self):
        assert eigen_span_residual(np.array([1, 0], dtype=complex), self.data) < 1e-12

    def test_orthogonal_to_span(self):
        r = eigen_span_residual(np.array([0, 1], dtype=complex), self.data)
        assert abs(r - 1.0) < 1e-12

    def test_diagonal_mix(self):
        x = np.array([1, 1], dtype=complex) / math.sqrt(2.0)
        r = eigen_span_residual(x, self.data)
        assert abs(r - 1.0 / math.sqrt(2.0)) < 1e-12

    def test_empty_span_gives_norm(self):
        T = realize(Scale(0.5, DenseMatrix(((1.0,),))))
        data = unimodular_eigenpairs(T)
        assert data.espan_basis.shape == (1, 0)
        assert eigen_span_residual(np.array([2.0 + 0j]), data) == 2.0


class TestJdgSplit:
    def test_mixed_diagonal(self):
        T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                               Scale(0.5, DenseMatrix(((1.0,),))))))
        rev, fl = jdg_split(T)
        assert rev.shape == (2, 1) and fl.shape == (2, 1)
        assert principal_angle(rev, np.eye(2, 1, dtype=complex)) < 1e-12
        assert principal_angle(fl, np.eye(2, 2, dtype=complex)[:, 1:]) < 1e-12

    def test_three_by_three(self):
        T = realize(DenseMatrix(((1.0, 0, 0), (0, -1.0, 0), (0, 0, 0.9))))
        rev, fl = jdg_split(T)
        assert rev.shape[1] == 2 and fl.shape[1] == 1
        e12 = np.eye(3, dtype=complex)[:, :2]
        assert principal_angle(rev, e12) < 1e-12

    def test_unimodular_jordan_rejected(self):
        T = realize(JordanBlock(1j, 2))
        with pytest.raises(NotPowerBoundedError):
            jdg_split(T)

    def test_expanding_operator_rejected(self):
        T = realize(Scale(2.0, DenseMatrix(((1.0,),))))
        with pytest.raises(NotPowerBoundedError):
            jdg_split(T)

    def test_contractive_jordan_accepted(self):
        T = realize(JordanBlock(0.5, 3))
        rev, fl = jdg_split(T)
        assert rev.shape[1] == 0 and fl.shape[1] == 3

    def test_split_spans_match_eigenstructure(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            d = int(rng.integers(2, 8))
            j = int(rng.integers(1, d))
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            q, _ = np.linalg.qr(g)
            lam = np.concatenate([
                np.exp(2j * np.pi * rng.uniform(size=j)),
                rng.uniform(0.2, 0.9, size=d - j)
                * np.exp(2j * np.pi * rng.uniform(size=d - j)),
            ])
            m = (q * lam) @ q.conj().T
            T = realize(DenseMatrix(tuple(map(tuple, m))))
            rev, fl = jdg_split(T)
            assert rev.shape[1] == j and fl.shape[1] == d - j
            assert principal_angle(rev, q[:, :j]) < 1e-10


class TestPowerRelationExtraction:
    def test_swap_chain_frozen(self):
        # chain by hand: y1 = (1 - T)e1 = e1 - e2, y2 = (-1 - T)y1 = 0
        T = realize(SWAP)
        y, lam = eigenvector_from_power_relation(
            T, np.array([1.0, 0.0], dtype=complex), 2, 1.0
        )
        assert np.array_equal(y, np.array([1.0, -1.0], dtype=complex))
        assert abs(lam + 1.0) < 1e-12

    def test_scalar_rotation_chain(self):
        T = realize(DiagonalUnimodular((0.25,)))
        y, lam = eigenvector_from_power_relation(
            T, np.array([1.0 + 0j]), 4, 1.0
        )
        assert abs(lam - 1j) < 1e-12
        assert np.linalg.norm(T.apply(y) - lam * y) < 1e-12 * np.linalg.norm(y)

    def test_exact_eigenvector_short_circuits(self):
        T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                               Scale(0.5, DenseMatrix(((1.0,),))))))
        x = np.array([1.0, 0.0], dtype=complex)
        alpha = complex(T.matrix[0, 0])
        y, lam = eigenvector_from_power_relation(T, x, 1, alpha)
        assert np.array_equal(y, x)
        assert abs(lam - alpha) < 1e-12

    def test_not_a_fixed_point(self):
        T = realize(DirectSum((DiagonalUnimodular((0.25,)),
                               Scale(0.5, DenseMatrix(((1.0,),))))))
        with pytest.raises(NotAPowerFixedPointError):
            eigenvector_from_power_relation(
                T, np.array([0.0, 1.0], dtype=complex), 1, 1j
            )

    def test_alpha_must_be_unimodular(self):
        T = realize(SWAP)
        with pytest.raises(NotAPowerFixedPointError):
            eigenvector_from_power_relation(
                T, np.array([1.0, 0.0], dtype=complex), 2, 0.5
            )

    def test_zero_vector_rejected(self):
        T = realize(SWAP)
        with pytest.raises(NotAPowerFixedPointError):
            eigenvector_from_power_relation(T, np.zeros(2, dtype=complex), 2, 1.0)


class TestPrincipalAngle:
    def test_identical_spans(self):
        q = np.linalg.qr(np.random.default_rng(5).normal(size=(4, 2)))[0]
        assert principal_angle(q, q) < 1e-12

    def test_rank_mismatch_is_right_angle(self):
        e = np.eye(3, dtype=complex)
        assert principal_angle(e[:, :1], e[:, :2]) == pytest.approx(np.pi / 2)

    def test_orthogonal_spans(self):
        e = np.eye(2, dtype=complex)
        assert principal_angle(e[:, :1], e[:, 1:]) == pytest.approx(np.pi / 2)

    def test_empty_spans_agree(self):
        z = np.zeros((3, 0), dtype=complex)
        assert principal_angle(z, z) == 0.0


# ---------------------------------------------------------------------------
# spec serialization


class TestSpecJson:
    CASES = [
        DiagonalUnimodular((0.25, GOLDEN)),
        SWAP,
        JordanBlock(1j, 3),
        WeightedBackwardShiftTruncation((2.0, 1.5), 3),
        DirectSum((DiagonalUnimodular((0.5,)), JordanBlock(0.5, 2))),
        Scale(0.5 + 0.5j, DiagonalUnimodular((0.1,))),
        Inverse(DiagonalUnimodular((0.3,))),
        Power(3, DenseMatrix(((1.0, 0.5), (0.0, 1.0)))),
    ]

    @pytest.mark.parametrize("spec", CASES, ids=lambda s: type(s).__name__)
    def test_round_trip_preserves_realization(self, spec):
        text = json.dumps(spec_to_json_dict(spec))
        again = spec_from_json_dict(json.loads(text))
        assert np.array_equal(realize(spec).matrix, realize(again).matrix)

    def test_unknown_tag_rejected(self):
        with pytest.raises(ValueError):
            spec_from_json_dict({"type": "banana"})

    def test_missing_tag_rejected(self):
        with pytest.raises(ValueError):
            spec_from_json_dict({"angles_turns": [0.25]})


class TestValidation:
    def test_wrong_shape_matrix(self):
        with pytest.raises(DimensionError):
            realize(DenseMatrix(((1.0, 2.0),)))

    def test_empty_direct_sum(self):
        with pytest.raises(DimensionError):
            realize(DirectSum(()))

    def test_jordan_size_positive(self):
        with pytest.raises(DimensionError):
            realize(JordanBlock(1.0, 0))

    def test_shift_needs_enough_weights(self):
        with pytest.raises(DimensionError):
            realize(WeightedBackwardShiftTruncation((1.0,), 3))
