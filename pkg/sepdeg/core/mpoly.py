"""Sparse multivariate polynomials over F_{p^k}.

A polynomial maps exponent tuples to nonzero coefficient codes. Terms are
kept and rendered in descending lexicographic order of exponents. Coefficients
passed in from outside go through FieldSpec.element, so a plain int is a
prime-subfield residue; numpy code arrays stay codes.
"""
from functools import lru_cache
from types import MappingProxyType
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from sepdeg.core.errors import ArityMismatch, FieldMismatch
from sepdeg.core.gf import FieldSpec, FqElement

Monomial = Tuple[int, ...]


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> Tuple[Monomial, ...]:
    """All exponent vectors of length nvars summing to d, descending lex."""
    if nvars == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, d: int) -> Mapping[Monomial, int]:
    return MappingProxyType({m: i for i, m in enumerate(monomials_of_degree(nvars, d))})


def render_monomial(m: Monomial) -> str:
    factors = []
    for i, a in enumerate(m):
        if a == 1:
            factors.append(f"x{i + 1}")
        elif a > 1:
            factors.append(f"x{i + 1}^{a}")
    return '*'.join(factors) if factors else '1'


class Polynomial:
    __slots__ = ('spec', 'nvars', '_terms')

    def __init__(self, spec: FieldSpec, nvars: int, terms: Mapping[Monomial, object] = None):
        self.spec = spec
        self.nvars = nvars
        clean: Dict[Monomial, int] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(a) for a in m)
            if len(m) != nvars:
                raise ArityMismatch(f"monomial {m} has {len(m)} exponents, expected {nvars}")
            code = spec.encode(spec.element(c))
            if code:
                clean[m] = code
        self._terms = clean

    @classmethod
    def _from_codes(cls, spec: FieldSpec, nvars: int, terms: Mapping[Monomial, int]) -> 'Polynomial':
        poly = cls(spec, nvars)
        poly._terms = {m: int(c) for m, c in terms.items() if c}
        return poly

    # --- constructors ---

    @classmethod
    def constant(cls, spec: FieldSpec, nvars: int, c=1) -> 'Polynomial':
        return cls(spec, nvars, {(0,) * nvars: spec.element(c)})

    @classmethod
    def variable(cls, spec: FieldSpec, nvars: int, i: int) -> 'Polynomial':
        m = [0] * nvars
        m[i] = 1
        return cls(spec, nvars, {tuple(m): 1})

    @classmethod
    def linear_form(cls, spec: FieldSpec, codes: Sequence[int]) -> 'Polynomial':
        """sum_j codes[j] * x_{j+1}"""
        n = len(codes)
        terms = {}
        for j, c in enumerate(codes):
            if c:
                m = [0] * n
                m[j] = 1
                terms[tuple(m)] = int(c)
        return cls._from_codes(spec, n, terms)

    @classmethod
    def from_vector(cls, spec: FieldSpec, monomials: Sequence[Monomial], codes) -> 'Polynomial':
        nvars = len(monomials[0]) if monomials else 0
        return cls._from_codes(spec, nvars, dict(zip(monomials, codes)))

    # --- queries ---

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return MappingProxyType(self._terms)

    def monomials(self) -> List[Monomial]:
        return sorted(self._terms, reverse=True)

    def coefficient(self, m: Monomial) -> FqElement:
        return self.spec.decode(self._terms.get(tuple(m), 0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def leading_coefficient(self) -> FqElement:
        if not self._terms:
            return self.spec.zero()
        return self.spec.decode(self._terms[max(self._terms)])

    def to_vector(self, monomials: Sequence[Monomial]) -> np.ndarray:
        return np.array([self._terms.get(m, 0) for m in monomials], dtype=np.int64)

    # --- arithmetic ---

    def _check(self, other: 'Polynomial'):
        if other.spec != self.spec:
            raise FieldMismatch(f"polynomials over {self.spec.name} and {other.spec.name}")
        if other.nvars != self.nvars:
            raise ArityMismatch(f"{self.nvars} and {other.nvars} variables")

    def __add__(self, other: 'Polynomial') -> 'Polynomial':
        self._check(other)
        ops = self.spec.ops_scalar
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = ops.add(terms.get(m, 0), c)
        return Polynomial._from_codes(self.spec, self.nvars, terms)

    def __neg__(self) -> 'Polynomial':
        ops = self.spec.ops_scalar
        return Polynomial._from_codes(self.spec, self.nvars, {m: ops.neg(c) for m, c in self._terms.items()})

    def __sub__(self, other: 'Polynomial') -> 'Polynomial':
        return self + (-other)

    def scale(self, c) -> 'Polynomial':
        ops = self.spec.ops_scalar
        code = self.spec.encode(self.spec.element(c))
        return Polynomial._from_codes(self.spec, self.nvars, {m: ops.mul(v, code) for m, v in self._terms.items()})

    def monic(self) -> 'Polynomial':
        """Rescaled so the lex-greatest coefficient is 1."""
        if not self._terms:
            return self
        return self.scale(self.leading_coefficient().inverse())

    def __mul__(self, other: 'Polynomial') -> 'Polynomial':
        return poly_mul(self, other)

    def __pow__(self, e: int) -> 'Polynomial':
        result = Polynomial.constant(self.spec, self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.spec == other.spec and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.spec, self.nvars, frozenset(self._terms.items())))

    def __str__(self):
        if not self._terms:
            return '0'
        parts = []
        for m in self.monomials():
            c = self.spec.decode(self._terms[m])
            mono = render_monomial(m)
            coeff = str(c)
            if mono == '1':
                parts.append(coeff)
            elif coeff == '1':
                parts.append(mono)
            else:
                if ' + ' in coeff:
                    coeff = f'({coeff})'
                parts.append(f'{coeff}*{mono}')
        return ' + '.join(parts)

    def __repr__(self):
        return f"Polynomial({self.spec.name}, {self})"


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    ops = f.spec.ops_scalar
    terms: Dict[Monomial, int] = {}
    for m1, c1 in f._terms.items():
        for m2, c2 in g._terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            terms[m] = ops.add(terms.get(m, 0), ops.mul(c1, c2))
    return Polynomial._from_codes(f.spec, f.nvars, terms)


def substitute_linear(f: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Replace x_i by images[i] and expand; images are homogeneous linear or zero."""
    if len(images) != f.nvars:
        raise ArityMismatch(f"{len(images)} images for {f.nvars} variables")
    if not images:
        return f
    nvars = images[0].nvars
    for img in images:
        if img.spec != f.spec:
            raise FieldMismatch("image over a different field")
        if img.nvars != nvars:
            raise ArityMismatch("images have differing numbers of variables")
        if not img.is_zero() and (img.degree() != 1 or not img.is_homogeneous()):
            raise ArityMismatch(f"image {img} is not homogeneous linear")
    powers: Dict[Tuple[int, int], Polynomial] = {}

    def power(i: int, a: int) -> Polynomial:
        if (i, a) not in powers:
            powers[(i, a)] = images[i] ** a
        return powers[(i, a)]

    result = Polynomial(f.spec, nvars)
    for m, c in f._terms.items():
        term = Polynomial.constant(f.spec, nvars, f.spec.decode(c))
        for i, a in enumerate(m):
            if a:
                term = term * power(i, a)
        result = result + term
    return result


def evaluate(f: Polynomial, point: Sequence) -> FqElement:
    """f at a point given as an array of codes or as a sequence of elements.

    Plain ints in a sequence are prime-subfield residues.
    """
    if len(point) != f.nvars:
        raise ArityMismatch(f"point of length {len(point)} for {f.nvars} variables")
    spec = f.spec
    if isinstance(point, np.ndarray):
        values = [spec.decode(v) for v in point]
    else:
        values = [spec.element(v) for v in point]
    total = spec.zero()
    for m, c in f._terms.items():
        term = spec.decode(c)
        for v, a in zip(values, m):
            if a:
                term = term * v ** a
        total = total + term
    return total
