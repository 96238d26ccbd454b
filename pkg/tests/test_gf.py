import itertools

import numpy as np
import pytest

from sepdeg.core.errors import (
    BadDegree, BadParameter, DivisionByZero, FieldMismatch, FieldTooLarge, NonPrime, NoSuchRoot,
    ReducibleModulus,
)
from sepdeg.core.gf import (
    PolyFieldOps, default_field, element_order, fq_make, is_irreducible, primitive_element,
    root_of_unity, smallest_degree_for,
)


def test_f4_arithmetic(f4):
    a = f4.element((0, 1))
    assert a * a == a + 1
    assert a.inverse() == a + 1
    assert a * a.inverse() == f4.one()
    assert element_order(a) == 3
    assert f4.encode(a) == 2
    assert str(a + 1) == "a + 1"


def test_canonical_enumeration(f4):
    assert [str(e) for e in f4.elements()] == ['0', 'a', '1', 'a + 1']
    assert f4.element_codes() == [0, 2, 1, 3]


def test_encode_decode_agree(f4):
    for code in range(f4.q):
        assert f4.encode(f4.decode(code)) == code
    assert f4.encode(f4.zero()) == 0
    assert f4.encode(f4.one()) == 1


def test_prime_field_rendering(f3):
    assert str(f3.element(5)) == "2"
    assert f3.element(-1) == f3.element(2)


def test_fq_make_validation():
    with pytest.raises(NonPrime):
        fq_make(4, 1, [0, 1])
    with pytest.raises(ReducibleModulus):
        fq_make(2, 2, [1, 0, 1])
    with pytest.raises(BadDegree):
        fq_make(2, 2, [1, 1])
    with pytest.raises(BadDegree):
        fq_make(3, 0, [1])


def test_default_moduli_are_irreducible():
    assert default_field(3, 2).modulus == (2, 2, 1)
    assert is_irreducible(3, (2, 2, 1))
    f8 = default_field(2, 3)
    assert is_irreducible(2, f8.modulus)
    assert f8.q == 8


def test_zero_has_no_inverse(f4):
    with pytest.raises(DivisionByZero):
        f4.zero().inverse()
    with pytest.raises(ZeroDivisionError):
        f4.one() / f4.zero()


def test_mixing_fields_is_rejected(f2, f4):
    with pytest.raises(FieldMismatch):
        f4.one() + f2.one()
    with pytest.raises(FieldMismatch):
        f2.element((0, 1))


def test_trailing_zero_coordinates_fit_smaller_fields(f2, f4):
    assert f2.element((1, 0)) == f2.one()
    assert f4.element((0, 1, 0, 0)) == f4.element((0, 1))


def test_roots_of_unity(f2, f4):
    assert root_of_unity(f4, 3) == f4.element((0, 1))
    assert root_of_unity(f4, 1) == f4.one()
    with pytest.raises(NoSuchRoot):
        root_of_unity(f2, 3)
    assert element_order(primitive_element(default_field(3, 2))) == 8


def test_smallest_degree_for():
    assert smallest_degree_for(2, [3]) == 2
    assert smallest_degree_for(2, [7]) == 3
    assert smallest_degree_for(3, [2]) == 1
    assert smallest_degree_for(2, [1], min_k=2) == 2


@pytest.mark.parametrize('p,k', [(2, 2), (3, 2), (2, 3)])
def test_vector_ops_match_element_arithmetic(p, k):
    spec = default_field(p, k)
    codes = list(range(spec.q))
    pairs = np.array(list(itertools.product(codes, codes)), dtype=np.int64)
    a, b = pairs[:, 0], pairs[:, 1]
    expected_sum = [spec.encode(spec.decode(x) + spec.decode(y)) for x, y in pairs]
    expected_prod = [spec.encode(spec.decode(x) * spec.decode(y)) for x, y in pairs]
    assert spec.ops.add(a, b).tolist() == expected_sum
    assert spec.ops.mul(a, b).tolist() == expected_prod
    nonzero = np.arange(1, spec.q)
    assert np.all(spec.ops.mul(nonzero, spec.ops.inv(nonzero)) == 1)


@pytest.mark.parametrize('p,k', [(2, 9), (3, 6), (5, 4)])
def test_large_fields_use_digit_arithmetic(p, k):
    spec = default_field(p, k)
    assert isinstance(spec.ops, PolyFieldOps)
    rng = np.random.default_rng(p * 100 + k)
    a = rng.integers(0, spec.q, size=200)
    b = rng.integers(0, spec.q, size=200)
    expected_sum = [spec.encode(spec.decode(x) + spec.decode(y)) for x, y in zip(a, b)]
    expected_diff = [spec.encode(spec.decode(x) - spec.decode(y)) for x, y in zip(a, b)]
    expected_prod = [spec.encode(spec.decode(x) * spec.decode(y)) for x, y in zip(a, b)]
    assert spec.ops.add(a, b).tolist() == expected_sum
    assert spec.ops.sub(a, b).tolist() == expected_diff
    assert spec.ops.mul(a, b).tolist() == expected_prod
    nonzero = a[a != 0]
    assert np.all(spec.ops.mul(nonzero, spec.ops.inv(nonzero)) == 1)
    assert int(spec.ops.inv(np.int64(0))) == 0


def test_field_size_limit():
    with pytest.raises(FieldTooLarge):
        smallest_degree_for(2, [37])
    with pytest.raises(FieldTooLarge):
        default_field(2, 21)
    with pytest.raises(FieldTooLarge):
        fq_make(2, 21, [1] + [0] * 20 + [1])
    with pytest.raises(BadParameter):
        smallest_degree_for(2, [6])
    assert smallest_degree_for(2, [31 * 11]) == 10

def test_scalar_ops_match_vector_ops(f4):
    sops = f4.ops_scalar
    for x, y in itertools.product(range(4), repeat=2):
        assert sops.mul(x, y) == int(f4.ops.mul(np.array([x]), np.array([y]))[0])
        assert sops.add(x, y) == int(f4.ops.add(np.array([x]), np.array([y]))[0])


@pytest.mark.parametrize('p,k', [(2, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4)])
def test_inverses_and_root_orders_exhaustive(p, k):
    spec = default_field(p, k)
    for e in spec.elements():
        if not e.is_zero():
            assert e * e.inverse() == spec.one()
    for m in range(1, spec.q):
        if (spec.q - 1) % m == 0:
            assert element_order(root_of_unity(spec, m)) == m


def test_inverse_in_f5():
    f5 = default_field(5, 1)
    assert f5.element(3).inverse() == f5.element(2)
