"""Brute-force invariant engine.

The graded action on degree-d monomials is built one degree at a time from the
coaction x_i -> sum_j (A_g^-1)_{ij} x_j, so that (g.f)(v) = f(g^-1 v). The
invariants of degree d are the kernel of the stacked (rho_d(g) - I). Columns
that share no row are independent, so the kernel is computed per connected
component of the row/column incidence graph and reassembled in canonical order.
"""
import logging
import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from sepdeg.config import Config
from sepdeg.core.errors import (
    ArityMismatch, BadParameter, BudgetExceeded, ComponentTooLarge, DegreeMismatch,
    InvariantCheckFailed, NotCyclicJordan, NotSeparated, PointBudgetExceeded, ZeroPoint,
)
from sepdeg.core.gf import FieldSpec
from sepdeg.core.linalg import (
    MatrixFq, check_annihilates, check_rank_nullity, kernel_basis, kernel_from_rref, row_reduce,
    vector,
)
from sepdeg.core.mpoly import (
    Monomial, Polynomial, monomial_index, monomials_of_degree, substitute_linear,
)
from sepdeg.core.reps import (
    GroupClosure, ModuleDescriptor, MatrixGroupRep, close_group, fixed_space, jordan_summands,
)
from sepdeg.utils.dimension_cache import DimensionCache

logger = logging.getLogger(__name__)

Column = Dict[int, int]


@dataclass(frozen=True, eq=False)
class GradedInvariantBasis:
    degree: int
    rep: MatrixGroupRep
    monomials: Tuple[Monomial, ...]
    vectors: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return len(self.monomials)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]

    @cached_property
    def basis(self) -> List[Polynomial]:
        return [Polynomial.from_vector(self.rep.spec, self.monomials, row) for row in self.vectors]


@dataclass(frozen=True)
class SeparationResult:
    point: Tuple[int, ...]
    degree_found: int
    witness: Polynomial
    per_degree_dims: Tuple[int, ...]


@dataclass(frozen=True)
class SweepResult:
    """Outcome of an epsilon sweep over projective representatives of a subspace.

    `value` is the largest epsilon seen. When `complete` is false the sweep
    stopped at `stop_degree` and `unresolved` points have epsilon beyond it.
    """
    quantity: str
    value: int
    point_count: int
    worst_point: Optional[Tuple[int, ...]]
    witness: Optional[Polynomial]
    per_degree_dims: Tuple[int, ...]
    resolved_by_degree: Dict[int, int] = field(default_factory=dict)
    complete: bool = True
    unresolved: int = 0


@dataclass(frozen=True)
class DivisibilityReport:
    degree: int
    checked: int
    violations: Tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


# --- coaction ---------------------------------------------------------------

def coaction(rep: MatrixGroupRep, label: str) -> List[Polynomial]:
    """Images of x_1..x_n under the generator `label`."""
    rep.generator(label)
    L = rep.inverses[label].data
    return [Polynomial.linear_form(rep.spec, L[i]) for i in range(rep.dim)]


def delta_op(rep: MatrixGroupRep, label: str, f: Polynomial) -> Polynomial:
    """(g.f) - f for the generator g named `label`."""
    return substitute_linear(f, coaction(rep, label)) - f


def projective_points(spec: FieldSpec, subspace: np.ndarray) -> np.ndarray:
    """One point per scalar class of span(subspace rows): coefficient vectors whose
    first nonzero entry is 1, in canonical lexicographic order."""
    b = subspace.shape[0]
    codes = spec.element_codes()
    coeffs = []
    for lead in range(b - 1, -1, -1):
        for tail in product(codes, repeat=b - 1 - lead):
            coeffs.append([0] * lead + [1] + list(tail))
    C = np.array(coeffs, dtype=np.int64).reshape(len(coeffs), b)
    return spec.ops.dot(C, subspace)


def projective_count(spec: FieldSpec, b: int) -> int:
    return (spec.q ** b - 1) // (spec.q - 1) if b else 0


def _next_level(spec: FieldSpec, L: np.ndarray, d: int, prev: List[Column]) -> List[Column]:
    """Columns of rho_d(g) from rho_{d-1}(g) via rho(x_i m') = rho(x_i) rho(m')."""
    n = L.shape[0]
    ops = spec.ops_scalar
    basis = monomials_of_degree(n, d)
    prev_basis = monomials_of_degree(n, d - 1)
    prev_index = monomial_index(n, d - 1)
    index = monomial_index(n, d)
    images = [[(j, int(c)) for j, c in enumerate(L[i]) if c] for i in range(n)]
    level = []
    for m in basis:
        i = next(k for k, a in enumerate(m) if a)
        lower = list(m)
        lower[i] -= 1
        source = prev[prev_index[tuple(lower)]]
        col: Column = {}
        for r, v in source.items():
            mono = prev_basis[r]
            for j, c in images[i]:
                raised = list(mono)
                raised[j] += 1
                t = index[tuple(raised)]
                col[t] = ops.add(col.get(t, 0), ops.mul(c, v))
        level.append({t: v for t, v in col.items() if v})
    return level


def _component_kernel(spec: FieldSpec, N: int, levels: Sequence[List[Column]]) -> np.ndarray:
    """Canonical kernel of the stacked (rho - I) matrices given as sparse columns."""
    sops = spec.ops_scalar
    minus_one = sops.neg(1)
    rows, cols, vals = [], [], []
    for g, level in enumerate(levels):
        offset = g * N
        for c, column in enumerate(level):
            for r, v in column.items():
                if r == c:
                    v = sops.add(v, minus_one)
                if v:
                    rows.append(offset + r)
                    cols.append(c)
                    vals.append(v)
            if c not in column:
                rows.append(offset + c)
                cols.append(c)
                vals.append(minus_one)

    nodes = N + N * len(levels)
    edges = coo_matrix((np.ones(len(rows), dtype=np.int8),
                        (np.array(cols, dtype=np.int64), N + np.array(rows, dtype=np.int64))),
                       shape=(nodes, nodes))
    _, labels = connected_components(edges, directed=False)

    comp_cols: Dict[int, List[int]] = defaultdict(list)
    for c in range(N):
        comp_cols[labels[c]].append(c)
    comp_entries: Dict[int, List[Tuple[int, int, int]]] = defaultdict(list)
    for r, c, v in zip(rows, cols, vals):
        comp_entries[labels[c]].append((r, c, v))

    ops = spec.ops
    found: List[Tuple[int, np.ndarray, np.ndarray]] = []
    for comp, ccols in comp_cols.items():
        entries = comp_entries.get(comp)
        if not entries:
            for c in ccols:
                found.append((c, np.array([c]), np.array([1], dtype=np.int64)))
            continue
        if len(ccols) > Config.COMPONENT_LIMIT:
            raise ComponentTooLarge(len(ccols), Config.COMPONENT_LIMIT)
        local_row = {r: i for i, r in enumerate(sorted({r for r, _, _ in entries}))}
        local_col = {c: j for j, c in enumerate(ccols)}
        dense = np.zeros((len(local_row), len(ccols)), dtype=np.int64)
        for r, c, v in entries:
            dense[local_row[r], local_col[c]] = v
        R, pivots = row_reduce(dense, ops)
        K, free = kernel_from_rref(R, pivots, ops)
        check_annihilates(dense, K, ops)
        if Config.STRICT_CHECKS:
            check_rank_nullity(dense, K, ops)
        where = np.array(ccols)
        for f, row in zip(free, K):
            found.append((ccols[f], where, row))

    found.sort(key=lambda item: item[0])
    out = np.zeros((len(found), N), dtype=np.int64)
    for i, (_, where, row) in enumerate(found):
        out[i, where] = row
    return out


class InvariantEngine:
    """Holds caps and the per-run memo of closures, graded actions and bases."""

    def __init__(self, group_cap: int = None, point_cap: int = None, cache_dir: str = None):
        self.group_cap = group_cap or Config.GROUP_CAP
        self.point_cap = point_cap or Config.POINT_CAP
        cache_dir = cache_dir if cache_dir is not None else Config.CACHE_DIR
        self.dimension_cache = DimensionCache(cache_dir) if cache_dir else None
        self._lock = threading.Lock()
        self._closures: Dict[str, GroupClosure] = {}
        self._levels: Dict[Tuple[str, str], List[List[Column]]] = {}
        self._bases: Dict[Tuple[str, int], GradedInvariantBasis] = {}

    # --- memo plumbing ---

    def closure(self, rep: MatrixGroupRep) -> GroupClosure:
        with self._lock:
            cached = self._closures.get(rep.fingerprint)
        if cached is not None:
            return cached
        cl = close_group(rep, self.group_cap)
        with self._lock:
            return self._closures.setdefault(rep.fingerprint, cl)

    def group_order(self, rep: MatrixGroupRep) -> int:
        return self.closure(rep).order

    def _graded_action(self, rep: MatrixGroupRep, label: str, d: int) -> List[Column]:
        key = (rep.fingerprint, label)
        with self._lock:
            levels = list(self._levels.get(key, [[{0: 1}]]))
        if len(levels) > d:
            return levels[d]
        L = rep.inverses[label].data
        while len(levels) <= d:
            levels.append(_next_level(rep.spec, L, len(levels), levels[-1]))
        with self._lock:
            if len(self._levels.get(key, ())) < len(levels):
                self._levels[key] = levels
        return levels[d]

    # --- graded invariants ---

    def invariant_basis(self, rep: MatrixGroupRep, d: int) -> GradedInvariantBasis:
        if d < 0:
            raise BadParameter(f"degree must be >= 0, got {d}")
        key = (rep.fingerprint, d)
        with self._lock:
            cached = self._bases.get(key)
        if cached is not None:
            return cached

        start = time.monotonic()
        monomials = monomials_of_degree(rep.dim, d)
        levels = [self._graded_action(rep, label, d) for label in rep.labels]
        vectors = _component_kernel(rep.spec, len(monomials), levels)
        vectors.setflags(write=False)
        result = GradedInvariantBasis(d, rep, monomials, vectors)
        logger.debug(f"Degree {d}: {result.dimension}/{len(monomials)} invariant "
                     f"({time.monotonic() - start:.3f}s)")
        with self._lock:
            result = self._bases.setdefault(key, result)
        if self.dimension_cache is not None:
            self.dimension_cache.put(self._dimension_key(rep, d), result.dimension)
        return result

    def _dimension_key(self, rep: MatrixGroupRep, d: int) -> str:
        descriptor = rep.describe() if rep.descriptor is not None else {'fingerprint': rep.fingerprint}
        return DimensionCache.make_key(descriptor, rep.spec.to_dict(), d)

    def invariant_dimension(self, rep: MatrixGroupRep, d: int) -> int:
        if self.dimension_cache is not None:
            hit = self.dimension_cache.get(self._dimension_key(rep, d))
            if hit is not None:
                return hit
        return self.invariant_basis(rep, d).dimension

    def monomial_in_invariants(self, rep: MatrixGroupRep, d: int, m: Monomial) -> bool:
        m = tuple(m)
        if len(m) != rep.dim:
            raise ArityMismatch(f"monomial {m} has {len(m)} exponents for a {rep.dim}-dim module")
        if sum(m) != d:
            raise DegreeMismatch(f"monomial {m} has degree {sum(m)}, expected {d}")
        column = monomial_index(rep.dim, d)[m]
        return bool(np.any(self.invariant_basis(rep, d).vectors[:, column]))

    # --- separation ---

    def _sweep(self, rep: MatrixGroupRep, points: np.ndarray, quantity: str,
               max_degree: int = None, budget: float = None,
               stop_degree: int = None) -> SweepResult:
        count = points.shape[0]
        if count == 0:
            return SweepResult(quantity, 0, 0, None, None, ())
        spec, ops = rep.spec, rep.spec.ops
        max_degree = max_degree or self.group_order(rep)
        deadline = time.monotonic() + budget if budget else None

        powers = [np.ones_like(points), points]
        remaining = np.arange(count)
        dims: List[int] = []
        resolved_by_degree: Dict[int, int] = {}
        value, worst, witness = 0, None, None
        d = 0
        while remaining.size:
            d += 1
            if stop_degree is not None and d > stop_degree:
                logger.info(f"{quantity}: stopped after degree {stop_degree} "
                            f"with {remaining.size} points unresolved")
                return SweepResult(quantity, value, count, worst, witness, tuple(dims),
                                   resolved_by_degree, False, int(remaining.size))
            if d > max_degree:
                raise NotSeparated(max_degree)
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded(budget, d)

            inv = self.invariant_basis(rep, d)
            dims.append(inv.dimension)
            if inv.dimension == 0:
                continue
            while len(powers) <= d:
                powers.append(ops.mul(powers[-1], points))
            stacked = np.stack(powers[:d + 1])[:, remaining, :]
            exps = np.array(inv.monomials, dtype=np.int64)
            monvals = np.ones((len(inv.monomials), remaining.size), dtype=np.int64)
            for i in range(rep.dim):
                monvals = ops.mul(monvals, stacked[exps[:, i], :, i])
            values = ops.dot(inv.vectors, monvals)
            hit = np.any(values != 0, axis=0)
            if hit.any():
                first = int(np.nonzero(hit)[0][0])
                value = d
                worst = tuple(int(c) for c in points[remaining[first]])
                witness = inv.basis[int(np.nonzero(values[:, first])[0][0])]
                resolved_by_degree[d] = int(hit.sum())
                remaining = remaining[~hit]
        return SweepResult(quantity, value, count, worst, witness, tuple(dims), resolved_by_degree)

    def epsilon(self, rep: MatrixGroupRep, v, max_degree: int = None) -> SeparationResult:
        """Smallest d > 0 with an invariant of degree d nonzero at v.

        v is a code array, or a sequence of ints (prime residues), coordinate
        tuples or field elements. When the orbit product of a coordinate form
        nonzero on v has a degree whose monomial space is wider than
        COMPONENT_LIMIT, that degree is not reduced: if nothing separates below
        it, the orbit product is the witness and per_degree_dims stops one short.
        """
        point = np.asarray(v, dtype=np.int64) if isinstance(v, np.ndarray) else vector(rep.spec, v)
        if point.shape != (rep.dim,):
            raise ArityMismatch(f"point of length {len(point)} for a {rep.dim}-dim module")
        if not point.any():
            raise ZeroPoint()
        coords = tuple(int(c) for c in point)
        images = self._separating_orbit(rep, point)
        bound = len(images) if images else None
        if (bound is not None and (max_degree is None or bound <= max_degree)
                and len(monomials_of_degree(rep.dim, bound)) > Config.COMPONENT_LIMIT):
            sweep = self._sweep(rep, point[None, :], 'epsilon', max_degree, stop_degree=bound - 1)
            if not sweep.complete:
                logger.info(f"epsilon: nothing below degree {bound}; the orbit product separates")
                return SeparationResult(coords, bound, self._product(rep, images),
                                        sweep.per_degree_dims)
        else:
            sweep = self._sweep(rep, point[None, :], 'epsilon', max_degree)
        return SeparationResult(coords, sweep.value, sweep.witness, sweep.per_degree_dims)

    def separation_sweep(self, rep: MatrixGroupRep, subspace: np.ndarray, quantity: str,
                         budget: float = None, stop_degree: int = None) -> SweepResult:
        b = subspace.shape[0]
        count = projective_count(rep.spec, b)
        if count > self.point_cap:
            raise PointBudgetExceeded(count, self.point_cap)
        points = projective_points(rep.spec, subspace) if b else np.zeros((0, rep.dim), dtype=np.int64)
        logger.info(f"{quantity}: sweeping {count} projective points over {rep.spec.name}")
        return self._sweep(rep, points, quantity, budget=budget, stop_degree=stop_degree)

    def delta_sweep(self, rep: MatrixGroupRep, **kwargs) -> SweepResult:
        fixed = np.array(fixed_space(rep), dtype=np.int64).reshape(-1, rep.dim)
        return self.separation_sweep(rep, fixed, 'delta', **kwargs)

    def gamma_sweep(self, rep: MatrixGroupRep, **kwargs) -> SweepResult:
        return self.separation_sweep(rep, np.eye(rep.dim, dtype=np.int64), 'gamma', **kwargs)

    def delta_value(self, rep: MatrixGroupRep) -> int:
        return self.delta_sweep(rep).value

    def gamma_value(self, rep: MatrixGroupRep) -> int:
        return self.gamma_sweep(rep).value

    # --- structural invariants ---

    def _orbit_images(self, rep: MatrixGroupRep, c: np.ndarray) -> List[np.ndarray]:
        """Distinct images over the closure of the linear form with coefficient codes c."""
        ops = rep.spec.ops
        seen, images = set(), []
        for h in self.closure(rep).elements:
            image = ops.dot(c[None, :], h.data)[0]
            key = image.tobytes()
            if key not in seen:
                seen.add(key)
                images.append(image)
        return images

    def _separating_orbit(self, rep: MatrixGroupRep, point: np.ndarray) -> Optional[List[np.ndarray]]:
        """Smallest orbit of a coordinate form x_i none of whose images vanish at point."""
        ops = rep.spec.ops
        best = None
        for i in np.nonzero(point)[0]:
            c = np.zeros(rep.dim, dtype=np.int64)
            c[i] = 1
            images = self._orbit_images(rep, c)
            values = ops.dot(np.array(images), point[:, None])[:, 0]
            if np.all(values != 0) and (best is None or len(images) < len(best)):
                best = images
        return best

    @staticmethod
    def _product(rep: MatrixGroupRep, images: Sequence[np.ndarray]) -> Polynomial:
        result = Polynomial.constant(rep.spec, rep.dim, 1)
        for image in images:
            result = result * Polynomial.linear_form(rep.spec, image)
        return result

    def orbit_product(self, rep: MatrixGroupRep, ell: Polynomial) -> Polynomial:
        """Product of the distinct images of a linear form over the closure."""
        if ell.spec != rep.spec or ell.nvars != rep.dim:
            raise ArityMismatch(f"linear form in {ell.nvars} variables for a {rep.dim}-dim module")
        if ell.is_zero() or ell.degree() != 1 or not ell.is_homogeneous():
            raise BadParameter(f"{ell} is not a nonzero linear form")
        c = ell.to_vector(monomials_of_degree(rep.dim, 1))
        result = self._product(rep, self._orbit_images(rep, c))
        for label in rep.labels:
            if not delta_op(rep, label, result).is_zero():
                raise InvariantCheckFailed(f"orbit product not fixed by {label}")
        return result

    def v_zero(self, rep: MatrixGroupRep) -> List[np.ndarray]:
        """Common zero set of the linear invariants, as a canonical kernel basis."""
        linear = self.invariant_basis(rep, 1).vectors
        if linear.shape[0] == 0:
            return list(np.eye(rep.dim, dtype=np.int64))
        basis = kernel_basis(MatrixFq(rep.spec, linear))
        ops = rep.spec.ops
        for w in basis:
            for A in rep.matrices:
                if np.any(ops.dot(linear, ops.dot(A.data, w[:, None]))):
                    raise InvariantCheckFailed("V0 is not stable under the group")
        return basis

    def terminal_divisibility_check(self, desc: ModuleDescriptor, rep: MatrixGroupRep,
                                    d: int) -> DivisibilityReport:
        """For monomials only in terminal variables, p^s must divide the exponent of
        every summand j with n_j > p^(s-1)."""
        summands = jordan_summands(desc) if desc is not None else None
        if not summands:
            raise NotCyclicJordan("descriptor is not a direct sum of Jordan modules of one Z_{p^r}")
        p, r = summands[0].p, summands[0].r
        sizes = [j.n for j in summands]
        if sum(sizes) != rep.dim:
            raise NotCyclicJordan("descriptor does not match the module dimension")
        terminals, offset = [], 0
        for n in sizes:
            terminals.append(offset + n - 1)
            offset += n
        others = set(range(rep.dim)) - set(terminals)

        inv = self.invariant_basis(rep, d)
        checked, violations = 0, []
        for f in inv.basis:
            for m in f.monomials():
                if any(m[i] for i in others):
                    continue
                checked += 1
                for s in range(1, r + 1):
                    for j, n in enumerate(sizes):
                        a = m[terminals[j]]
                        if n > p ** (s - 1) and a % p ** s:
                            violations.append({'invariant': str(f), 'monomial': list(m),
                                               'summand': j, 's': s, 'exponent': a})
        if violations:
            logger.warning(f"Degree {d}: {len(violations)} terminal divisibility violations")
        return DivisibilityReport(d, checked, tuple(violations))


_default_engine: Optional[InvariantEngine] = None
_default_lock = threading.Lock()


def default_engine() -> InvariantEngine:
    global _default_engine
    with _default_lock:
        if _default_engine is None:
            _default_engine = InvariantEngine()
        return _default_engine


def invariant_basis(rep: MatrixGroupRep, d: int) -> GradedInvariantBasis:
    return default_engine().invariant_basis(rep, d)


def monomial_in_invariants(rep: MatrixGroupRep, d: int, m: Monomial) -> bool:
    return default_engine().monomial_in_invariants(rep, d, m)


def epsilon(rep: MatrixGroupRep, v, max_degree: int = None) -> SeparationResult:
    return default_engine().epsilon(rep, v, max_degree)


def delta_value(rep: MatrixGroupRep) -> int:
    return default_engine().delta_value(rep)


def gamma_value(rep: MatrixGroupRep) -> int:
    return default_engine().gamma_value(rep)


def orbit_product(rep: MatrixGroupRep, ell: Polynomial) -> Polynomial:
    return default_engine().orbit_product(rep, ell)


def v_zero(rep: MatrixGroupRep) -> List[np.ndarray]:
    return default_engine().v_zero(rep)


def terminal_divisibility_check(desc: ModuleDescriptor, rep: MatrixGroupRep,
                                d: int) -> DivisibilityReport:
    return default_engine().terminal_divisibility_check(desc, rep, d)
