import numpy as np
import pytest

from sepdeg.core.errors import FieldMismatch, InvariantCheckFailed, ShapeMismatch, Singular
from sepdeg.core.gf import default_field
from sepdeg.core.linalg import (
    MatrixFq, check_annihilates, check_rank_nullity, kernel_basis, mat_inv, mat_mul, mat_pow,
    mat_rank, mat_vec, stack_rows, vector,
)


def test_inverse_over_f2(f2):
    A = MatrixFq.from_entries(f2, [[1, 1], [0, 1]])
    assert mat_inv(A) == A
    assert A @ mat_inv(A) == MatrixFq.identity(f2, 2)


def test_inverse_over_f4(f4):
    a = f4.element((0, 1))
    A = MatrixFq.from_entries(f4, [[a]])
    assert mat_inv(A).entry(0, 0) == a + 1


def test_singular_matrix(f2):
    with pytest.raises(Singular):
        mat_inv(MatrixFq.from_entries(f2, [[1, 1], [1, 1]]))


def test_canonical_kernel_f2(f2):
    K = kernel_basis(MatrixFq.from_entries(f2, [[0, 1, 1]]))
    assert [k.tolist() for k in K] == [[1, 0, 0], [0, 1, 1]]


def test_canonical_kernel_f3(f3):
    K = kernel_basis(MatrixFq.from_entries(f3, [[1, 2]]))
    assert [k.tolist() for k in K] == [[1, 1]]


def test_kernel_of_invertible_is_empty(f3):
    assert kernel_basis(MatrixFq.from_entries(f3, [[1, 2], [0, 1]])) == []


def test_rank(f3):
    assert mat_rank(MatrixFq.identity(f3, 4)) == 4
    assert mat_rank(MatrixFq.from_entries(f3, [[1, 2], [2, 1]])) == 1
    assert mat_rank(MatrixFq.zeros(f3, 2, 3)) == 0


def test_power_and_negative_power(f3):
    A = MatrixFq.from_entries(f3, [[1, 1], [0, 1]])
    assert mat_pow(A, 3) == MatrixFq.identity(f3, 2)
    assert mat_pow(A, -1) == mat_inv(A)
    assert mat_pow(A, 0) == MatrixFq.identity(f3, 2)


def test_matrix_vector(f3):
    A = MatrixFq.from_entries(f3, [[1, 1], [0, 2]])
    assert mat_vec(A, vector(f3, [1, 1])).tolist() == [2, 2]


def test_shape_and_field_checks(f2, f3):
    with pytest.raises(ShapeMismatch):
        mat_mul(MatrixFq.zeros(f2, 2, 3), MatrixFq.zeros(f2, 2, 3))
    with pytest.raises(FieldMismatch):
        mat_mul(MatrixFq.identity(f2, 2), MatrixFq.identity(f3, 2))
    with pytest.raises(ShapeMismatch):
        stack_rows([MatrixFq.zeros(f2, 1, 2), MatrixFq.zeros(f2, 1, 3)])
    with pytest.raises(ShapeMismatch):
        mat_inv(MatrixFq.zeros(f2, 2, 3))


def test_check_annihilates_rejects_bad_kernel(f2):
    data = np.array([[1, 0]], dtype=np.int64)
    with pytest.raises(InvariantCheckFailed):
        check_annihilates(data, np.array([[1, 1]], dtype=np.int64), f2.ops)
    check_annihilates(data, np.array([[0, 1]], dtype=np.int64), f2.ops)


def test_rank_nullity_catches_a_short_kernel(f2):
    data = np.array([[0, 1, 1]], dtype=np.int64)
    full = np.array([[1, 0, 0], [0, 1, 1]], dtype=np.int64)
    check_rank_nullity(data, full, f2.ops)
    short = full[:1]
    check_annihilates(data, short, f2.ops)
    with pytest.raises(InvariantCheckFailed):
        check_rank_nullity(data, short, f2.ops)


def test_matrices_are_immutable(f2):
    A = MatrixFq.identity(f2, 2)
    with pytest.raises(ValueError):
        A.data[0, 0] = 0


def test_rank_of_nilpotent_shift(f2):
    J = MatrixFq.from_entries(f2, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert mat_rank(J - MatrixFq.identity(f2, 3)) == 2


def test_zero_matrix_is_singular(f3):
    with pytest.raises(Singular):
        mat_inv(MatrixFq.zeros(f3, 2, 2))


def test_rank_nullity(f3):
    A = MatrixFq.from_entries(f3, [[1, 2, 0, 1], [2, 1, 0, 2], [0, 0, 1, 1]])
    assert mat_rank(A) + len(kernel_basis(A)) == A.cols


def test_inverse_and_kernel_over_f729():
    spec = default_field(3, 6)
    a = spec.element((0, 1))
    A = MatrixFq.from_entries(spec, [[a, 1], [1, 0]])
    assert A @ mat_inv(A) == MatrixFq.identity(spec, 2)
    B = MatrixFq.from_entries(spec, [[a, a * a]])
    (k,) = kernel_basis(B)
    assert k[1] == 1
    assert spec.decode(k[0]) == -a
    assert mat_vec(B, k).tolist() == [0]
