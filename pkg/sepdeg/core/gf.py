"""Exact arithmetic in prime fields F_p and extension fields F_{p^k}.

Scalar values are `FqElement`s. Vector code (linalg, invariants) works on
numpy arrays of integer *codes*: the code of an element is its coordinate
sequence read as a base-p number, constant coordinate least significant,
so 0 and 1 are codes of zero and one and prime-field residues are their own
codes. The canonical enumeration order (lexicographic on coordinates) is a
separate notion, see `FieldSpec.elements`.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, divisors, isprime, symbols

from sepdeg.config import Config
from sepdeg.core.errors import (
    BadDegree, BadParameter, DivisionByZero, FieldMismatch, FieldTooLarge, NoSuchRoot,
    NonPrime, ReducibleModulus,
)

logger = logging.getLogger(__name__)

_t = symbols('t')


@dataclass(frozen=True)
class FieldSpec:
    p: int
    k: int
    modulus: Tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def name(self) -> str:
        return f"F{self.q}"

    def zero(self) -> 'FqElement':
        return FqElement(self, (0,) * self.k)

    def one(self) -> 'FqElement':
        return FqElement(self, (1,) + (0,) * (self.k - 1))

    def element(self, value: Union[int, Sequence[int], 'FqElement']) -> 'FqElement':
        """Coerce an integer (prime subfield) or a coordinate sequence into the field.

        Coordinates past the k-th must be zero.
        """
        if isinstance(value, FqElement):
            if value.spec != self:
                raise FieldMismatch(f"element of {value.spec.name} used in {self.name}")
            return value
        if isinstance(value, (int, np.integer)):
            return FqElement(self, (int(value) % self.p,) + (0,) * (self.k - 1))
        coords = [int(c) for c in value]
        while len(coords) > self.k and coords[-1] % self.p == 0:
            coords.pop()
        if len(coords) > self.k:
            raise FieldMismatch(f"{len(coords)} coordinates do not fit {self.name} (k={self.k})")
        coords += [0] * (self.k - len(coords))
        return FqElement(self, tuple(c % self.p for c in coords))

    def elements(self) -> Iterator['FqElement']:
        """All field elements in canonical (lexicographic ascending) order."""
        for coords in itertools.product(range(self.p), repeat=self.k):
            yield FqElement(self, coords)

    def encode(self, e: 'FqElement') -> int:
        code = 0
        for c in reversed(e.coeffs):
            code = code * self.p + c
        return code

    def decode(self, code: int) -> 'FqElement':
        code = int(code)
        coords = []
        for _ in range(self.k):
            coords.append(code % self.p)
            code //= self.p
        return FqElement(self, tuple(coords))

    def element_codes(self) -> List[int]:
        """Codes of all elements in canonical enumeration order."""
        return [self.encode(e) for e in self.elements()]

    @cached_property
    def ops(self) -> 'FieldOps':
        if self.k == 1:
            return PrimeFieldOps(self)
        if self.q <= Config.TABLE_FIELD_LIMIT:
            return TableFieldOps(self)
        return PolyFieldOps(self)

    @cached_property
    def ops_scalar(self) -> 'ScalarOps':
        if self.k == 1:
            return PrimeScalarOps(self.p)
        if self.q <= Config.TABLE_FIELD_LIMIT:
            return TableScalarOps(self.ops)
        return ElementScalarOps(self)

    def to_dict(self) -> dict:
        return {'p': self.p, 'k': self.k, 'modulus': list(self.modulus)}


@dataclass(frozen=True)
class FqElement:
    spec: FieldSpec
    coeffs: Tuple[int, ...]

    def _coerce(self, other) -> 'FqElement':
        if isinstance(other, FqElement):
            if other.spec != self.spec:
                raise FieldMismatch(f"{self.spec.name} and {other.spec.name} elements mixed")
            return other
        if isinstance(other, (int, np.integer)):
            return self.spec.element(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.spec.p
        return FqElement(self.spec, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.spec.p
        return FqElement(self.spec, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FqElement(self.spec, _mulmod(self.coeffs, other.coeffs, self.spec))

    __rmul__ = __mul__

    def inverse(self) -> 'FqElement':
        if self.is_zero():
            raise DivisionByZero(f"zero has no inverse in {self.spec.name}")
        return self ** (self.spec.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.spec.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __int__(self):
        return self.spec.encode(self)

    def __str__(self):
        if self.spec.k == 1:
            return str(self.coeffs[0])
        terms = []
        for i in range(self.spec.k - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                power = 'a' if i == 1 else f'a^{i}'
                terms.append(power if c == 1 else f'{c}*{power}')
        return ' + '.join(terms) if terms else '0'

    def __repr__(self):
        return f"FqElement({self.spec.name}, {list(self.coeffs)})"


def _mulmod(a: Sequence[int], b: Sequence[int], spec: FieldSpec) -> Tuple[int, ...]:
    p, k, mod = spec.p, spec.k, spec.modulus
    prod = [0] * (2 * k - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    # t^k = -(mod[0] + ... + mod[k-1] t^(k-1))
    for d in range(2 * k - 2, k - 1, -1):
        c = prod[d] % p
        if c:
            for i in range(k):
                prod[d - k + i] -= c * mod[i]
        prod[d] = 0
    return tuple(x % p for x in prod[:k])


# --- field construction -----------------------------------------------------

def fq_make(p: int, k: int, modulus: Sequence[int]) -> FieldSpec:
    """Validate (p, k, modulus) and return the field; the modulus is constant term first."""
    if not isprime(p):
        raise NonPrime(p)
    if k < 1:
        raise BadDegree(f"extension degree must be >= 1, got {k}")
    _check_size(p, k)
    modulus = tuple(int(c) for c in modulus)
    if len(modulus) != k + 1 or modulus[-1] != 1:
        raise BadDegree(f"modulus {list(modulus)} is not monic of degree {k}")
    if any(c < 0 or c >= p for c in modulus):
        raise BadParameter(f"modulus coefficients must lie in [0,{p})")
    if k > 1 and not is_irreducible(p, modulus):
        raise ReducibleModulus(p, modulus)
    return FieldSpec(p, k, modulus)


def _check_size(p: int, k: int):
    if p ** k > Config.FIELD_SIZE_LIMIT:
        raise FieldTooLarge(p, k, Config.FIELD_SIZE_LIMIT)


def is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    return Poly(list(reversed(modulus)), _t, modulus=p).is_irreducible


@lru_cache(maxsize=None)
def default_field(p: int, k: int = 1) -> FieldSpec:
    """Built-in modulus when tabled, else the first monic irreducible in canonical order."""
    _check_size(p, k)
    if (p, k) in Config.BUILTIN_MODULI:
        return fq_make(p, k, Config.BUILTIN_MODULI[(p, k)])
    if k == 1:
        return fq_make(p, 1, (0, 1))
    for low in itertools.product(range(p), repeat=k):
        modulus = tuple(reversed(low)) + (1,)
        if is_irreducible(p, modulus):
            logger.info(f"Using modulus {list(modulus)} for F_{p}^{k}")
            return fq_make(p, k, modulus)
    raise ReducibleModulus(p, ())


def smallest_degree_for(p: int, orders: Sequence[int], min_k: int = 1) -> int:
    """Smallest k >= min_k such that F_{p^k} contains elements of every order given."""
    if any(m > 0 and m % p == 0 for m in orders):
        raise BadParameter(f"no field of characteristic {p} has elements of order divisible by {p}")
    k = max(1, min_k)
    _check_size(p, k)
    while any((p ** k - 1) % m for m in orders if m > 0):
        k += 1
        _check_size(p, k)
    return k


# --- element queries --------------------------------------------------------

def element_order(a: FqElement) -> int:
    if a.is_zero():
        raise DivisionByZero("zero has no multiplicative order")
    one = a.spec.one()
    for t in divisors(a.spec.q - 1):
        if a ** t == one:
            return t
    raise AssertionError("unreachable: a^(q-1) = 1")


def root_of_unity(spec: FieldSpec, m: int) -> FqElement:
    """First element of exact order m in canonical enumeration order."""
    if m < 1 or (spec.q - 1) % m:
        raise NoSuchRoot(m, spec.q)
    for e in spec.elements():
        if not e.is_zero() and element_order(e) == m:
            return e
    raise NoSuchRoot(m, spec.q)


def primitive_element(spec: FieldSpec) -> FqElement:
    return root_of_unity(spec, spec.q - 1)


# --- vectorized arithmetic on codes -----------------------------------------

class FieldOps:
    """Elementwise field arithmetic on numpy int64 arrays of element codes."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def dot(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for t in range(A.shape[1]):
            out = self.add(out, self.mul(A[:, t, None], B[None, t, :]))
        return out


class PrimeFieldOps(FieldOps):
    def __init__(self, spec: FieldSpec):
        super().__init__(spec)
        self.p = spec.p
        self._inv = np.array([0] + [pow(x, self.p - 2, self.p) for x in range(1, self.p)],
                             dtype=np.int64)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        return self._inv[a]

    def dot(self, A, B):
        return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % self.p


class TableFieldOps(FieldOps):
    """Addition and multiplication tables built from log/exp of a primitive element."""

    def __init__(self, spec: FieldSpec):
        super().__init__(spec)
        q, p, k = spec.q, spec.p, spec.k
        digits = np.array([spec.decode(c).coeffs for c in range(q)], dtype=np.int64)
        weights = p ** np.arange(k, dtype=np.int64)
        self._add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self._neg = ((-digits) % p) @ weights

        g = primitive_element(spec)
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = spec.one()
        for i in range(q - 1):
            code = spec.encode(x)
            exp[i] = code
            log[code] = i
            x = x * g
        nz = np.arange(1, q)
        self._mul = np.zeros((q, q), dtype=np.int64)
        self._mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        self._inv = np.zeros(q, dtype=np.int64)
        self._inv[1:] = exp[(-log[nz]) % (q - 1)]
        logger.debug(f"Built arithmetic tables for {spec.name}")

    def add(self, a, b):
        return self._add[a, b]

    def sub(self, a, b):
        return self._add[a, self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a, b]

    def inv(self, a):
        return self._inv[a]

    def dot(self, A, B):
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for t in range(A.shape[1]):
            out = self._add[out, self._mul[A[:, t, None], B[None, t, :]]]
        return out


class PolyFieldOps(FieldOps):
    """Polynomial-basis arithmetic on base-p digit arrays, for fields past the table limit."""

    def __init__(self, spec: FieldSpec):
        super().__init__(spec)
        self.p, self.k = spec.p, spec.k
        self._weights = spec.p ** np.arange(spec.k, dtype=np.int64)
        self._modulus = np.array(spec.modulus[:spec.k], dtype=np.int64)

    def _digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._weights) % self.p

    def _codes(self, digits: np.ndarray) -> np.ndarray:
        return (digits % self.p) @ self._weights

    def add(self, a, b):
        return self._codes(self._digits(a) + self._digits(b))

    def sub(self, a, b):
        return self._codes(self._digits(a) - self._digits(b))

    def neg(self, a):
        return self._codes(-self._digits(a))

    def mul(self, a, b):
        da, db = np.broadcast_arrays(self._digits(a), self._digits(b))
        p, k = self.p, self.k
        prod = np.zeros(da.shape[:-1] + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            prod[..., i:i + k] += da[..., i, None] * db
        prod %= p
        # t^k = -(mod[0] + ... + mod[k-1] t^(k-1))
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[..., d, None].copy()
            prod[..., d - k:d] = (prod[..., d - k:d] - c * self._modulus) % p
        return self._codes(prod[..., :k])

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        result = np.ones_like(a)
        base = a
        e = self.spec.q - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result


# --- scalar arithmetic on codes (polynomial coefficients) --------------------

class ScalarOps:
    """Field arithmetic on single codes held as Python ints."""

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def neg(self, a: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError


class PrimeScalarOps(ScalarOps):
    def __init__(self, p: int):
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p


class TableScalarOps(ScalarOps):
    def __init__(self, ops: TableFieldOps):
        self._add = ops._add
        self._neg = ops._neg
        self._mul = ops._mul

    def add(self, a, b):
        return int(self._add[a, b])

    def neg(self, a):
        return int(self._neg[a])

    def mul(self, a, b):
        return int(self._mul[a, b])


class ElementScalarOps(ScalarOps):
    def __init__(self, spec: FieldSpec):
        self.spec = spec

    def add(self, a, b):
        return self.spec.encode(self.spec.decode(a) + self.spec.decode(b))

    def neg(self, a):
        return self.spec.encode(-self.spec.decode(a))

    def mul(self, a, b):
        return self.spec.encode(self.spec.decode(a) * self.spec.decode(b))
