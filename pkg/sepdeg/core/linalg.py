"""Dense exact matrix algebra over F_{p^k}.

Matrices hold numpy int64 arrays of element codes (see `gf`); every
operation goes through the field's vectorized `ops`.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np

from sepdeg.config import Config
from sepdeg.core.errors import FieldMismatch, InvariantCheckFailed, ShapeMismatch, Singular
from sepdeg.core.gf import FieldOps, FieldSpec, FqElement

logger = logging.getLogger(__name__)


class MatrixFq:
    __slots__ = ('spec', 'data')

    def __init__(self, spec: FieldSpec, data):
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ShapeMismatch(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        arr.setflags(write=False)
        self.spec = spec
        self.data = arr

    @classmethod
    def from_entries(cls, spec: FieldSpec, rows: Sequence[Sequence]) -> 'MatrixFq':
        """Build from nested rows of ints, coordinate tuples or FqElements."""
        data = [[spec.encode(spec.element(x)) for x in row] for row in rows]
        if not data:
            raise ShapeMismatch("matrix needs at least one row")
        return cls(spec, data)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> 'MatrixFq':
        return cls(spec, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> 'MatrixFq':
        return cls(spec, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def ops(self) -> FieldOps:
        return self.spec.ops

    def entry(self, i: int, j: int) -> FqElement:
        return self.spec.decode(self.data[i, j])

    def key(self) -> bytes:
        return self.data.tobytes()

    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> 'MatrixFq':
        return MatrixFq(self.spec, self.data.T)

    def __matmul__(self, other: 'MatrixFq') -> 'MatrixFq':
        return mat_mul(self, other)

    def __add__(self, other: 'MatrixFq') -> 'MatrixFq':
        _check_same_shape(self, other)
        return MatrixFq(self.spec, self.ops.add(self.data, other.data))

    def __sub__(self, other: 'MatrixFq') -> 'MatrixFq':
        _check_same_shape(self, other)
        return MatrixFq(self.spec, self.ops.sub(self.data, other.data))

    def __eq__(self, other):
        if not isinstance(other, MatrixFq):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.spec, self.data.shape, self.key()))

    def __repr__(self):
        return f"MatrixFq({self.spec.name}, {self.data.tolist()})"


def _check_field(A: MatrixFq, B: MatrixFq):
    if A.spec != B.spec:
        raise FieldMismatch(f"matrices over {A.spec.name} and {B.spec.name}")


def _check_same_shape(A: MatrixFq, B: MatrixFq):
    _check_field(A, B)
    if A.data.shape != B.data.shape:
        raise ShapeMismatch(f"shapes {A.data.shape} and {B.data.shape} differ")


def vector(spec: FieldSpec, values: Sequence) -> np.ndarray:
    """Code vector from ints, coordinate sequences or FqElements."""
    return np.array([spec.encode(spec.element(v)) for v in values], dtype=np.int64)


# --- products and powers ----------------------------------------------------

def mat_mul(A: MatrixFq, B: MatrixFq) -> MatrixFq:
    _check_field(A, B)
    if A.cols != B.rows:
        raise ShapeMismatch(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    return MatrixFq(A.spec, A.ops.dot(A.data, B.data))


def mat_pow(A: MatrixFq, e: int) -> MatrixFq:
    if not A.is_square():
        raise ShapeMismatch("only square matrices have powers")
    if e < 0:
        return mat_pow(mat_inv(A), -e)
    result = MatrixFq.identity(A.spec, A.rows)
    base = A
    while e:
        if e & 1:
            result = result @ base
        base = base @ base
        e >>= 1
    return result


def mat_vec(A: MatrixFq, v: np.ndarray) -> np.ndarray:
    if A.cols != len(v):
        raise ShapeMismatch(f"{A.rows}x{A.cols} matrix applied to length-{len(v)} vector")
    return A.ops.dot(A.data, np.asarray(v, dtype=np.int64)[:, None])[:, 0]


# --- elimination ------------------------------------------------------------

def row_reduce(data: np.ndarray, ops: FieldOps) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form with first-nonzero pivoting; returns (R, pivot columns)."""
    R = np.array(data, dtype=np.int64, copy=True)
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = ops.mul(R[r], ops.inv(R[r, c]))
        col = R[:, c].copy()
        col[r] = 0
        targets = np.nonzero(col)[0]
        if targets.size:
            R[targets] = ops.sub(R[targets], ops.mul(col[targets, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def kernel_from_rref(R: np.ndarray, pivots: List[int], ops: FieldOps) -> Tuple[np.ndarray, List[int]]:
    """Canonical right-kernel basis (one row per free column, ascending)."""
    n = R.shape[1]
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    K = np.zeros((len(free), n), dtype=np.int64)
    if free:
        K[np.arange(len(free)), free] = 1
        if pivots:
            K[:, pivots] = ops.neg(R[:len(pivots)][:, free].T)
    return K, free


def check_annihilates(data: np.ndarray, K: np.ndarray, ops: FieldOps):
    """Raise unless data @ k = 0 for every row k of K."""
    if K.shape[0] == 0 or data.shape[0] == 0:
        return
    if np.any(ops.dot(data, K.T)):
        raise InvariantCheckFailed("kernel vector not annihilated by its matrix")


def check_rank_nullity(data: np.ndarray, K: np.ndarray, ops: FieldOps):
    """Raise unless K has cols - rank rows, with the rank taken from the transpose."""
    data = np.asarray(data, dtype=np.int64)
    _, pivots = row_reduce(data.T, ops)
    if K.shape[0] + len(pivots) != data.shape[1]:
        raise InvariantCheckFailed(
            f"kernel of size {K.shape[0]} but rank {len(pivots)} on {data.shape[1]} columns")


def kernel_matrix(A: MatrixFq) -> np.ndarray:
    R, pivots = row_reduce(A.data, A.ops)
    K, _ = kernel_from_rref(R, pivots, A.ops)
    if Config.STRICT_CHECKS:
        check_annihilates(A.data, K, A.ops)
        check_rank_nullity(A.data, K, A.ops)
    return K


def kernel_basis(A: MatrixFq) -> List[np.ndarray]:
    """Basis of {x : A x = 0} in reduced row-echelon canonical form."""
    return list(kernel_matrix(A))


def mat_rank(A: MatrixFq) -> int:
    _, pivots = row_reduce(A.data, A.ops)
    return len(pivots)


def mat_inv(A: MatrixFq) -> MatrixFq:
    if not A.is_square():
        raise ShapeMismatch(f"cannot invert a {A.rows}x{A.cols} matrix")
    n = A.rows
    aug = np.concatenate([A.data, np.eye(n, dtype=np.int64)], axis=1)
    R, pivots = row_reduce(aug, A.ops)
    if pivots[:n] != list(range(n)):
        raise Singular(f"{n}x{n} matrix is singular over {A.spec.name}")
    return MatrixFq(A.spec, R[:, n:])


def stack_rows(As: Sequence[MatrixFq]) -> MatrixFq:
    if not As:
        raise ShapeMismatch("nothing to stack")
    first = As[0]
    for B in As[1:]:
        _check_field(first, B)
        if B.cols != first.cols:
            raise ShapeMismatch(f"column counts {first.cols} and {B.cols} differ")
    return MatrixFq(first.spec, np.concatenate([B.data for B in As], axis=0))
