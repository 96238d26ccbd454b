"""Representations built from module recipes, group closures and structural data.

Basis conventions (part of the report contract):
  jordan / w_module   e_1..e_n with sigma^-1(e_i) = e_i + e_{i+1}; the stored
                      "sigma" matrix is (I + N)^-1.
  klein v2m / w2m     h_1..h_m then e_1..e_m, so coordinates are x_1..x_m, y_1..y_m
  klein v_odd         h_1..h_{m+1} then e_1..e_m (x_1..x_{m+1}, y_1..y_m)
  klein w_odd         the block matrices of type (v) as written
  klein regular       group elements 1, s1, s2, s1*s2 (closure order)
  borel               X, Y with sigma_{a,b}(Y) = aX + bY
  sym_power           monomials of degree n in the inner basis, descending lex
  dihedral            rho^i sigma^j at index j*n + i
"""
import hashlib
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.combinatorics import Permutation
from sympy.ntheory import primitive_root

from sepdeg.config import Config
from sepdeg.core.errors import (
    BadParameter, CapExceeded, DescriptorError, FieldMismatch, InvariantCheckFailed,
    LabelMismatch, NotUnipotent, UnknownGenerator,
)
from sepdeg.core.gf import FieldSpec, FqElement, element_order
from sepdeg.core.linalg import (
    MatrixFq, kernel_basis, mat_inv, mat_pow, mat_rank, stack_rows,
)
from sepdeg.core.mpoly import Polynomial, monomials_of_degree, substitute_linear

logger = logging.getLogger(__name__)

Coords = Tuple[int, ...]


# --- descriptors ------------------------------------------------------------

@dataclass(frozen=True)
class JordanDesc:
    p: int
    r: int
    n: int

    def to_dict(self):
        return {'type': 'jordan', 'p': self.p, 'r': self.r, 'n': self.n}


@dataclass(frozen=True)
class WModuleDesc:
    p: int
    r: int
    m: int
    n: int
    lam: Coords = (1,)

    def to_dict(self):
        return {'type': 'w', 'p': self.p, 'r': self.r, 'm': self.m, 'n': self.n,
                'lambda': list(self.lam)}


KLEIN_VARIANTS = ('regular', 'v2m', 'w2m', 'v_odd', 'w_odd')


@dataclass(frozen=True)
class KleinDesc:
    variant: str
    m: int = 1
    lam: Coords = (0,)

    def to_dict(self):
        d = {'type': 'klein', 'variant': self.variant}
        if self.variant != 'regular':
            d['m'] = self.m
        if self.variant == 'v2m':
            d['lambda'] = list(self.lam)
        return d


@dataclass(frozen=True)
class PermDesc:
    n: int
    gens: Tuple[Tuple[int, ...], ...]
    p: Optional[int] = None

    def to_dict(self):
        d = {'type': 'perm', 'n': self.n, 'gens': [list(g) for g in self.gens]}
        if self.p is not None:
            d['p'] = self.p
        return d


@dataclass(frozen=True)
class BorelDesc:
    p: int

    def to_dict(self):
        return {'type': 'borel', 'p': self.p}


@dataclass(frozen=True)
class DihedralDesc:
    n: int
    p: int = 2

    def to_dict(self):
        return {'type': 'dihedral', 'n': self.n, 'p': self.p}


@dataclass(frozen=True)
class SymPowerDesc:
    inner: 'ModuleDescriptor'
    n: int

    def to_dict(self):
        return {'type': 'sym', 'n': self.n, 'inner': self.inner.to_dict()}


@dataclass(frozen=True)
class DualDesc:
    inner: 'ModuleDescriptor'

    def to_dict(self):
        return {'type': 'dual', 'inner': self.inner.to_dict()}


@dataclass(frozen=True)
class SumDesc:
    summands: Tuple['ModuleDescriptor', ...]

    def to_dict(self):
        return {'type': 'sum', 'summands': [s.to_dict() for s in self.summands]}


ModuleDescriptor = Union[JordanDesc, WModuleDesc, KleinDesc, PermDesc, BorelDesc,
                         DihedralDesc, SymPowerDesc, DualDesc, SumDesc]


def characteristic(desc: ModuleDescriptor) -> Optional[int]:
    """The characteristic a descriptor pins down, or None (perm without p)."""
    if isinstance(desc, KleinDesc):
        return 2
    if isinstance(desc, (SymPowerDesc, DualDesc)):
        return characteristic(desc.inner)
    if isinstance(desc, SumDesc):
        chars = {characteristic(s) for s in desc.summands} - {None}
        if len(chars) > 1:
            raise DescriptorError(f"summands in different characteristics {sorted(chars)}")
        return chars.pop() if chars else None
    return getattr(desc, 'p', None)


def lambda_coords(desc: ModuleDescriptor) -> List[Coords]:
    if isinstance(desc, (WModuleDesc,)):
        return [desc.lam]
    if isinstance(desc, KleinDesc) and desc.variant == 'v2m':
        return [desc.lam]
    if isinstance(desc, (SymPowerDesc, DualDesc)):
        return lambda_coords(desc.inner)
    if isinstance(desc, SumDesc):
        return [c for s in desc.summands for c in lambda_coords(s)]
    return []


def klein_summands(desc: ModuleDescriptor) -> Optional[List[KleinDesc]]:
    """Klein summands of a klein descriptor or a direct sum of them, else None."""
    if isinstance(desc, KleinDesc):
        return [desc]
    if isinstance(desc, SumDesc):
        parts = [klein_summands(s) for s in desc.summands]
        if all(part is not None for part in parts):
            return [k for part in parts for k in part]
    return None


def jordan_summands(desc: ModuleDescriptor) -> Optional[List[JordanDesc]]:
    """Jordan summands sharing one (p, r), else None."""
    if isinstance(desc, JordanDesc):
        return [desc]
    if isinstance(desc, SumDesc):
        parts = [jordan_summands(s) for s in desc.summands]
        if all(part is not None for part in parts):
            flat = [j for part in parts for j in part]
            if len({(j.p, j.r) for j in flat}) == 1:
                return flat
    return None


def w_summands(desc: ModuleDescriptor) -> Optional[List[WModuleDesc]]:
    """W-module summands sharing one (p, r, m), else None."""
    if isinstance(desc, WModuleDesc):
        return [desc]
    if isinstance(desc, SumDesc):
        parts = [w_summands(s) for s in desc.summands]
        if all(part is not None for part in parts):
            flat = [w for part in parts for w in part]
            if len({(w.p, w.r, w.m) for w in flat}) == 1:
                return flat
    return None


# --- representations --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MatrixGroupRep:
    spec: FieldSpec
    dim: int
    generators: Tuple[Tuple[str, MatrixFq], ...]
    descriptor: Optional[ModuleDescriptor] = None
    group_order: Optional[int] = None

    @property
    def labels(self) -> List[str]:
        return [label for label, _ in self.generators]

    @property
    def matrices(self) -> List[MatrixFq]:
        return [A for _, A in self.generators]

    def generator(self, label: str) -> MatrixFq:
        for name, A in self.generators:
            if name == label:
                return A
        raise UnknownGenerator(label)

    @cached_property
    def inverses(self) -> Dict[str, MatrixFq]:
        return {label: mat_inv(A) for label, A in self.generators}

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.spec.p, self.spec.k, self.spec.modulus, self.dim)).encode())
        for label, A in self.generators:
            h.update(label.encode())
            h.update(A.key())
        return h.hexdigest()

    def describe(self) -> dict:
        return self.descriptor.to_dict() if self.descriptor is not None else {'type': 'matrices'}


def make_rep(spec: FieldSpec, generators: Sequence[Tuple[str, MatrixFq]],
             descriptor: Optional[ModuleDescriptor] = None,
             group_order: Optional[int] = None) -> MatrixGroupRep:
    """Validate shapes, fields and invertibility, then wrap."""
    if not generators:
        raise BadParameter("a representation needs at least one generator")
    dim = generators[0][1].rows
    seen = set()
    for label, A in generators:
        if label in seen:
            raise LabelMismatch(f"duplicate generator label {label!r}")
        seen.add(label)
        if A.spec != spec:
            raise FieldMismatch(f"generator {label!r} is over {A.spec.name}, expected {spec.name}")
        if A.rows != dim or A.cols != dim:
            raise BadParameter(f"generator {label!r} is {A.rows}x{A.cols}, expected {dim}x{dim}")
    rep = MatrixGroupRep(spec, dim, tuple(generators), descriptor, group_order)
    rep.inverses  # raises Singular for a non-invertible generator
    return rep


def _matrix(spec: FieldSpec, n: int, entries: Dict[Tuple[int, int], FqElement]) -> MatrixFq:
    data = np.eye(n, dtype=np.int64)
    for (i, j), v in entries.items():
        data[i, j] = spec.encode(spec.element(v))
    return MatrixFq(spec, data)


def _permutation_matrix(spec: FieldSpec, images: Sequence[int]) -> MatrixFq:
    n = len(images)
    data = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(images):
        data[j, i] = 1
    return MatrixFq(spec, data)


def _require_relation(ok: bool, what: str):
    if not ok:
        raise InvariantCheckFailed(f"defining relation fails: {what}")


def _lift_lambda(spec: FieldSpec, lam: Coords) -> FqElement:
    try:
        return spec.element(lam)
    except FieldMismatch as e:
        raise FieldMismatch(f"lambda={list(lam)} does not lie in {spec.name}: {e}")


def _jordan_sigma(spec: FieldSpec, n: int) -> MatrixFq:
    sigma_inv = _matrix(spec, n, {(i + 1, i): 1 for i in range(n - 1)})
    return mat_inv(sigma_inv)


# --- builders ---------------------------------------------------------------

def _build_jordan(desc: JordanDesc, spec: FieldSpec) -> MatrixGroupRep:
    if desc.r < 0 or not 1 <= desc.n <= desc.p ** desc.r:
        raise BadParameter(f"jordan needs 1 <= n <= p^r, got n={desc.n}, p^r={desc.p ** desc.r}")
    sigma = _jordan_sigma(spec, desc.n)
    I = MatrixFq.identity(spec, desc.n)
    _require_relation(mat_pow(sigma, desc.p ** desc.r) == I, "sigma^(p^r) = 1")
    return make_rep(spec, [('sigma', sigma)], desc, desc.p ** desc.r)


def _build_w(desc: WModuleDesc, spec: FieldSpec) -> MatrixGroupRep:
    p, r, m, n = desc.p, desc.r, desc.m, desc.n
    if m < 1 or math.gcd(p, m) != 1:
        raise BadParameter(f"w_module needs m >= 1 coprime to p, got m={m}")
    if r < 0 or not 1 <= n <= p ** r:
        raise BadParameter(f"w_module needs 1 <= n <= p^r, got n={n}")
    lam = _lift_lambda(spec, desc.lam)
    if lam.is_zero() or m % element_order(lam):
        raise BadParameter(f"lambda={lam} is not an m-th root of unity for m={m}")
    sigma = _jordan_sigma(spec, n)
    alpha = _matrix(spec, n, {(i, i): lam for i in range(n)})
    I = MatrixFq.identity(spec, n)
    _require_relation(mat_pow(sigma, p ** r) == I, "sigma^(p^r) = 1")
    _require_relation(mat_pow(alpha, m) == I, "alpha^m = 1")
    _require_relation(sigma @ alpha == alpha @ sigma, "sigma alpha = alpha sigma")
    return make_rep(spec, [('sigma', sigma), ('alpha', alpha)], desc, p ** r * m)


def _klein_type_ii(spec: FieldSpec, m: int, lam: FqElement) -> Tuple[MatrixFq, MatrixFq]:
    n = 2 * m
    s1 = {(m + j, j): 1 for j in range(m)}
    s2 = {}
    for j in range(m):
        s2[(m + j, j)] = lam
        if j + 1 < m:
            s2[(m + j + 1, j)] = spec.one()
    return _matrix(spec, n, s1), _matrix(spec, n, s2)


def _build_klein(desc: KleinDesc, spec: FieldSpec) -> MatrixGroupRep:
    if spec.p != 2:
        raise FieldMismatch(f"Klein four modules need characteristic 2, got {spec.p}")
    if desc.variant not in KLEIN_VARIANTS:
        raise BadParameter(f"unknown Klein variant {desc.variant!r}")
    m = desc.m
    if desc.variant != 'regular' and m < 1:
        raise BadParameter(f"Klein variant {desc.variant} needs m >= 1")

    if desc.variant == 'regular':
        index = {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}
        order = sorted(index, key=index.get)
        s1 = _permutation_matrix(spec, [index[((a + 1) % 2, b)] for a, b in order])
        s2 = _permutation_matrix(spec, [index[(a, (b + 1) % 2)] for a, b in order])
    elif desc.variant == 'v2m':
        s1, s2 = _klein_type_ii(spec, m, _lift_lambda(spec, desc.lam))
    elif desc.variant == 'w2m':
        s2, s1 = _klein_type_ii(spec, m, spec.zero())
    elif desc.variant == 'v_odd':
        n = 2 * m + 1
        s1 = _matrix(spec, n, {(m + 1 + i, i): 1 for i in range(m)})
        s2 = _matrix(spec, n, {(m + 1 + i - 1, i): 1 for i in range(1, m + 1)})
    else:
        n = 2 * m + 1
        s1 = _matrix(spec, n, {(i, m + 1 + i): 1 for i in range(m)})
        s2 = _matrix(spec, n, {(i + 1, m + 1 + i): 1 for i in range(m)})

    I = MatrixFq.identity(spec, s1.rows)
    _require_relation(s1 @ s1 == I and s2 @ s2 == I, "sigma_i^2 = 1")
    _require_relation(s1 @ s2 == s2 @ s1, "sigma1 sigma2 = sigma2 sigma1")
    return make_rep(spec, [('sigma1', s1), ('sigma2', s2)], desc, 4)


def _build_perm(desc: PermDesc, spec: FieldSpec) -> MatrixGroupRep:
    if not desc.gens:
        raise BadParameter("perm needs at least one generator")
    generators = []
    for i, images in enumerate(desc.gens):
        if len(images) != desc.n:
            raise BadParameter(f"permutation {list(images)} does not act on {desc.n} points")
        try:
            perm = Permutation(list(images))
        except ValueError as e:
            raise BadParameter(f"{list(images)} is not a permutation: {e}")
        generators.append((f"g{i + 1}", _permutation_matrix(spec, perm.array_form)))
    return make_rep(spec, generators, desc, None)


def _build_borel(desc: BorelDesc, spec: FieldSpec) -> MatrixGroupRep:
    p = desc.p
    g = primitive_root(p)
    tau = MatrixFq.from_entries(spec, [[1, 1], [0, 1]])
    beta = MatrixFq.from_entries(spec, [[1, 0], [0, g]])
    I = MatrixFq.identity(spec, 2)
    _require_relation(mat_pow(tau, p) == I, "tau^p = 1")
    _require_relation(mat_pow(beta, p - 1) == I, "beta^(p-1) = 1")
    return make_rep(spec, [('tau', tau), ('beta', beta)], desc, p * (p - 1))


def _build_dihedral(desc: DihedralDesc, spec: FieldSpec) -> MatrixGroupRep:
    n = desc.n
    if n < 2:
        raise BadParameter(f"dihedral needs n >= 2, got {n}")

    def idx(i, j):
        return j * n + i

    cells = [(i, j) for j in range(2) for i in range(n)]
    rho = _permutation_matrix(spec, [idx((i + 1) % n, j) for i, j in cells])
    sigma = _permutation_matrix(spec, [idx((-i) % n, (j + 1) % 2) for i, j in cells])
    I = MatrixFq.identity(spec, 2 * n)
    _require_relation(mat_pow(rho, n) == I and sigma @ sigma == I, "rho^n = sigma^2 = 1")
    _require_relation(sigma @ rho @ sigma == mat_inv(rho), "sigma rho sigma^-1 = rho^-1")
    return make_rep(spec, [('rho', rho), ('sigma', sigma)], desc, 2 * n)


def symmetric_power(rep: MatrixGroupRep, n: int, descriptor=None) -> MatrixGroupRep:
    """S^n of rep: g acts on a monomial in the basis by expanding the product of images."""
    if n < 0:
        raise BadParameter(f"symmetric power degree must be >= 0, got {n}")
    spec, w = rep.spec, rep.dim
    basis = monomials_of_degree(w, n)
    generators = []
    for label, A in rep.generators:
        images = [Polynomial.linear_form(spec, A.data[:, i]) for i in range(w)]
        columns = [
            substitute_linear(Polynomial(spec, w, {mono: 1}), images).to_vector(basis)
            for mono in basis
        ]
        generators.append((label, MatrixFq(spec, np.array(columns, dtype=np.int64).T)))
    return make_rep(spec, generators, descriptor, rep.group_order)


def dual(rep: MatrixGroupRep, descriptor=None) -> MatrixGroupRep:
    generators = [(label, rep.inverses[label].transpose()) for label in rep.labels]
    return make_rep(rep.spec, generators, descriptor, rep.group_order)


def direct_sum(reps: Sequence[MatrixGroupRep], descriptor=None) -> MatrixGroupRep:
    if not reps:
        raise BadParameter("direct sum of nothing")
    first = reps[0]
    for other in reps[1:]:
        if other.spec != first.spec:
            raise FieldMismatch(f"summands over {first.spec.name} and {other.spec.name}")
        if set(other.labels) != set(first.labels):
            raise LabelMismatch(f"generator labels {first.labels} and {other.labels} differ")
    if len(reps) == 1 and descriptor is None:
        return first
    dim = sum(r.dim for r in reps)
    generators = []
    for label in first.labels:
        data = np.zeros((dim, dim), dtype=np.int64)
        offset = 0
        for r in reps:
            data[offset:offset + r.dim, offset:offset + r.dim] = r.generator(label).data
            offset += r.dim
        generators.append((label, MatrixFq(first.spec, data)))
    orders = {r.group_order for r in reps}
    group_order = orders.pop() if len(orders) == 1 else None
    return make_rep(first.spec, generators, descriptor, group_order)


def build(desc: ModuleDescriptor, spec: FieldSpec) -> MatrixGroupRep:
    """Construct the representation a descriptor names over the given field."""
    p = characteristic(desc)
    if p is not None and p != spec.p:
        raise FieldMismatch(f"descriptor has characteristic {p}, field {spec.name} has {spec.p}")
    if isinstance(desc, JordanDesc):
        return _build_jordan(desc, spec)
    if isinstance(desc, WModuleDesc):
        return _build_w(desc, spec)
    if isinstance(desc, KleinDesc):
        return _build_klein(desc, spec)
    if isinstance(desc, PermDesc):
        return _build_perm(desc, spec)
    if isinstance(desc, BorelDesc):
        return _build_borel(desc, spec)
    if isinstance(desc, DihedralDesc):
        return _build_dihedral(desc, spec)
    if isinstance(desc, SymPowerDesc):
        return symmetric_power(build(desc.inner, spec), desc.n, desc)
    if isinstance(desc, DualDesc):
        return dual(build(desc.inner, spec), desc)
    if isinstance(desc, SumDesc):
        return direct_sum([build(s, spec) for s in desc.summands], desc)
    raise DescriptorError(f"unsupported descriptor {desc!r}")


# --- closure and structure --------------------------------------------------

@dataclass(frozen=True)
class GroupClosure:
    elements: Tuple[MatrixFq, ...]
    orders: Tuple[int, ...]
    center_indices: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_p_group(self, p: int) -> bool:
        n = self.order
        while n % p == 0:
            n //= p
        return n == 1


def close_group(rep: MatrixGroupRep, cap: int = None) -> GroupClosure:
    """Breadth-first closure: identity, then generators, then products in discovery order."""
    cap = cap or Config.GROUP_CAP
    identity = MatrixFq.identity(rep.spec, rep.dim)
    elements = [identity]
    index = {identity.key(): 0}
    i = 0
    while i < len(elements):
        for A in rep.matrices:
            prod = elements[i] @ A
            key = prod.key()
            if key not in index:
                if len(elements) >= cap:
                    raise CapExceeded(cap)
                index[key] = len(elements)
                elements.append(prod)
        i += 1

    orders = []
    for g in elements:
        power, t = g, 1
        while power.key() != identity.key():
            power = power @ g
            t += 1
        orders.append(t)
    center = tuple(
        idx for idx, g in enumerate(elements)
        if all(g @ A == A @ g for A in rep.matrices)
    )
    logger.info(f"Closed group: order {len(elements)}, center order {len(center)}")
    return GroupClosure(tuple(elements), tuple(orders), center)


def fixed_space(rep: MatrixGroupRep) -> List[np.ndarray]:
    I = MatrixFq.identity(rep.spec, rep.dim)
    return kernel_basis(stack_rows([A - I for A in rep.matrices]))


def jordan_type(A: MatrixFq, p: int) -> Tuple[int, ...]:
    """Jordan block sizes of a unipotent matrix, largest first."""
    if A.spec.p != p:
        raise FieldMismatch(f"matrix over {A.spec.name} is not in characteristic {p}")
    n = A.rows
    N = A - MatrixFq.identity(A.spec, n)
    if np.any(mat_pow(N, n).data):
        raise NotUnipotent("A - I is not nilpotent")
    ranks = [n]
    power = MatrixFq.identity(A.spec, n)
    for _ in range(n):
        power = power @ N
        ranks.append(mat_rank(power))
    at_least = [ranks[j - 1] - ranks[j] for j in range(1, n + 1)] + [0]
    sizes = []
    for j in range(n, 0, -1):
        sizes.extend([j] * (at_least[j - 1] - at_least[j]))
    return tuple(sizes)


def group_exponent(cl: GroupClosure) -> int:
    return math.lcm(*cl.orders)


def center_exponent(cl: GroupClosure) -> int:
    return math.lcm(*(cl.orders[i] for i in cl.center_indices))
