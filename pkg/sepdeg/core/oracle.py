"""Closed-form predictions for epsilon, delta and gamma, and the verifier that
compares them with the brute-force engine."""
import asyncio
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from sepdeg.config import Config
from sepdeg.core.errors import (
    BadGroupOrder, BadParameter, BudgetExceeded, EmptySupport, NotFaithful, NotPGroup,
    TrivialModule,
)
from sepdeg.core.gf import FieldSpec, element_order
from sepdeg.core.invariants import InvariantEngine
from sepdeg.core.linalg import MatrixFq, mat_pow, mat_rank
from sepdeg.core.reps import (
    GroupClosure, KleinDesc, MatrixGroupRep, ModuleDescriptor, build, center_exponent,
    fixed_space, jordan_summands, jordan_type, klein_summands, w_summands,
)

logger = logging.getLogger(__name__)

PREDICTION_KINDS = (
    'epsilon_cyclic', 'delta_cyclic', 'gamma_w', 'gamma_sum', 'klein_table',
    'pgroup_lower_bound', 'center_exponent_bound', 'pm_trichotomy',
    'delta_w', 'lemma_divide', 'klein_absence', 'expected',
)


@dataclass(frozen=True)
class Prediction:
    kind: str
    value: int
    exact: bool
    hypothesis: str

    def accepts(self, computed: int) -> bool:
        return computed == self.value if self.exact else self.value <= computed

    def to_dict(self) -> dict:
        return {'kind': self.kind, 'value': self.value, 'exact': self.exact,
                'hypothesis': self.hypothesis}

    @classmethod
    def from_dict(cls, d: dict) -> 'Prediction':
        return cls(d['kind'], d['value'], d['exact'], d['hypothesis'])


@dataclass
class TargetResult:
    target: str
    quantity: str
    predictions: List[Prediction]
    computed: Optional[int]
    verdict: str
    evidence: dict = field(default_factory=dict)
    millis: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            'target': self.target,
            'quantity': self.quantity,
            'predictions': [p.to_dict() for p in self.predictions],
            'computed': self.computed,
            'verdict': self.verdict,
            'evidence': self.evidence,
            'millis': self.millis,
        }

    @classmethod
    def from_dict(cls, d: dict) -> 'TargetResult':
        return cls(d['target'], d['quantity'], [Prediction.from_dict(p) for p in d['predictions']],
                   d['computed'], d['verdict'], d['evidence'], d['millis'])


@dataclass
class VerificationReport:
    descriptor: dict
    field_spec: dict
    results: List[TargetResult]
    version: str = Config.VERSION
    caps: dict = field(default_factory=dict)
    label: Optional[str] = None

    @property
    def verdict(self) -> str:
        return 'pass' if all(r.verdict == 'pass' for r in self.results) else 'fail'

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'version': self.version,
            'descriptor': self.descriptor,
            'field': self.field_spec,
            'caps': self.caps,
            'results': [r.to_dict() for r in self.results],
            'verdict': self.verdict,
        }

    @classmethod
    def from_dict(cls, d: dict) -> 'VerificationReport':
        return cls(d['descriptor'], d['field'], [TargetResult.from_dict(r) for r in d['results']],
                   d['version'], d['caps'], d.get('label'))


# --- number theory ----------------------------------------------------------

def lucas(t: int, s: int, p: int) -> int:
    """C(t, s) mod p from the base-p digits of t and s."""
    if t < 0 or s < 0:
        raise BadParameter(f"lucas needs t, s >= 0, got ({t}, {s})")
    result = 1
    while t or s:
        t, ti = divmod(t, p)
        s, si = divmod(s, p)
        if si > ti:
            return 0
        result = result * math.comb(ti, si) % p
    return result


def _ceil_log(p: int, n: int) -> int:
    """Smallest s >= 0 with p^s >= n, i.e. p^(s-1) < n <= p^s."""
    s = 0
    while p ** s < n:
        s += 1
    return s


# --- predictors -------------------------------------------------------------

def predict_epsilon_cyclic(n_list: Sequence[int], support: Iterable[int], p: int,
                           r: int = None) -> Prediction:
    """epsilon at a fixed point supported on the terminal vectors of `support` (0-based)."""
    support = sorted(set(support))
    if not support:
        raise EmptySupport("a nonzero fixed point needs a nonempty support")
    for j in support:
        if not 0 <= j < len(n_list):
            raise BadParameter(f"support index {j} outside 0..{len(n_list) - 1}")
    for n in n_list:
        if n < 1 or (r is not None and n > p ** r):
            raise BadParameter(f"summand dimension {n} outside 1..p^r")
    s = _ceil_log(p, min(n_list[j] for j in support))
    return Prediction('epsilon_cyclic', p ** s, True,
                      f"Z_{p}^r on V_n summands {list(n_list)}, fixed point supported on {support}")


def predict_delta_cyclic(n_list: Sequence[int], p: int, r: int) -> Prediction:
    """delta of a sum of Jordan modules: the faithful quotient Z_{p^s}, s from the largest block."""
    if not n_list:
        raise BadParameter("no summands")
    s = _ceil_log(p, max(n_list))
    return Prediction('delta_cyclic', p ** s, True,
                      f"Z_{p ** r} on V_n summands {list(n_list)}; image of order {p ** s}")


def predict_delta_cyclic_faithful(p: int, r: int, n_list: Sequence[int] = None) -> Prediction:
    if n_list is not None and max(n_list) <= p ** (r - 1):
        raise NotFaithful(f"no summand of {list(n_list)} exceeds p^(r-1) = {p ** (r - 1)}")
    return Prediction('delta_cyclic', p ** r, True, f"faithful Z_{p ** r}-module")


def predict_gamma_w(p: int, r: int, m: int, n: int, lambda_order: int) -> Prediction:
    if m < 1 or math.gcd(p, m) != 1:
        raise BadParameter(f"m={m} must be >= 1 and coprime to p={p}")
    if not 1 <= n <= p ** r:
        raise BadParameter(f"n={n} outside 1..p^r={p ** r}")
    if lambda_order < 1 or m % lambda_order:
        raise BadParameter(f"lambda order {lambda_order} does not divide m={m}")
    s = _ceil_log(p, n)
    return Prediction('gamma_w', p ** s * lambda_order, True,
                      f"W_(n={n}, lambda of order {lambda_order}) for Z_{p ** r * m}")


def predict_gamma_sum(parts: Sequence[Prediction]) -> Prediction:
    """Max rule over summand gamma values."""
    if not parts:
        raise BadParameter("no summands")
    return Prediction('gamma_sum', max(p.value for p in parts), True,
                      f"max of summand values {[p.value for p in parts]}")


def predict_gamma_cyclic(n_list: Sequence[int], p: int) -> Prediction:
    """gamma of a sum of Jordan modules by the max rule; V_n contributes p^s with p^(s-1) < n <= p^s."""
    return predict_gamma_sum([Prediction('gamma_sum', p ** _ceil_log(p, n), True, f"V_{n}")
                              for n in n_list])


def predict_delta_w(p: int, trivial_sizes: Sequence[int]) -> Prediction:
    """delta of a sum of W-modules: only lambda = 1 summands carry fixed points."""
    value = p ** _ceil_log(p, max(trivial_sizes)) if trivial_sizes else 0
    return Prediction('delta_w', value, True,
                      f"lambda = 1 summand dimensions {list(trivial_sizes)}")


def _klein_key(k: KleinDesc) -> Tuple[str, int, Tuple[int, ...]]:
    if k.variant == 'v2m':
        lam = tuple(c % 2 for c in k.lam)
        lam = lam + (0,) * (max(1, len(lam)) - len(lam))
        if any(lam[1:]) or lam[0] not in (0, 1):
            return ('v2m', k.m, (2,))
        return ('v2m', k.m, (0,))
    return (k.variant, k.m if k.variant != 'regular' else 0, ())


def _klein_value(k: KleinDesc) -> int:
    variant, m, lam = _klein_key(k)
    if variant == 'w_odd':
        return 2
    if variant in ('v2m', 'w2m') and m == 1 and lam != (2,):
        return 2
    return 4


def predict_klein(summands: Sequence[KleinDesc]) -> Prediction:
    """delta = gamma in {2, 4} for a nontrivial Klein four module."""
    if not summands:
        raise TrivialModule("a Klein four module needs at least one nontrivial summand")
    values = [_klein_value(k) for k in summands]
    names = [klein_label(k) for k in summands]
    return Prediction('klein_table', max(values), True,
                      f"Klein four summands {names} with values {values}")


def klein_label(k: KleinDesc) -> str:
    variant, m, lam = _klein_key(k)
    if variant == 'regular':
        return 'Vreg'
    if variant == 'v2m':
        return f"V{2 * m},{'0' if lam == (0,) else 'lam'}"
    if variant == 'w2m':
        return f"W{2 * m}"
    if variant == 'v_odd':
        return f"V{2 * m + 1}"
    return f"W{2 * m + 1}"


def pgroup_lower_bound(cl: GroupClosure, p: int) -> Prediction:
    """max p^r over elements of order p^r whose p^(r-1)-th power is central."""
    if not cl.is_p_group(p):
        raise NotPGroup(f"group of order {cl.order} is not a {p}-group")
    central = {cl.elements[i].key() for i in cl.center_indices}
    best = 1
    for g, order in zip(cl.elements, cl.orders):
        if order > best and mat_pow(g, order // p).key() in central:
            best = order
    return Prediction('pgroup_lower_bound', best, False,
                      f"{p}-group of order {cl.order}, element of order {best} with central power")


def predict_center_exponent(cl: GroupClosure, p: int) -> Prediction:
    if not cl.is_p_group(p):
        raise NotPGroup(f"group of order {cl.order} is not a {p}-group")
    return Prediction('center_exponent_bound', center_exponent(cl), False,
                      f"exponent of the center of a {p}-group of order {cl.order}")


def classify_pm(rep: MatrixGroupRep, engine: InvariantEngine = None) -> Prediction:
    """0, 1 or p for |G| = p*m with p not dividing m, from V^G and V0 alone."""
    engine = engine or InvariantEngine()
    p = rep.spec.p
    order = rep.group_order or engine.group_order(rep)
    if order % p or order % (p * p) == 0:
        raise BadGroupOrder(f"|G| = {order} is not p*m with gcd(p, m) = 1 for p = {p}")
    hypothesis = f"|G| = {order} = {p}*{order // p}"
    fixed = fixed_space(rep)
    if not fixed:
        return Prediction('pm_trichotomy', 0, True, hypothesis + ", V^G = 0")
    linear = engine.invariant_basis(rep, 1).vectors
    F = np.array(fixed, dtype=np.int64)
    if linear.shape[0] and mat_rank(MatrixFq(rep.spec, rep.spec.ops.dot(linear, F.T))) == len(fixed):
        return Prediction('pm_trichotomy', 1, True, hypothesis + ", V^G meets V0 trivially")
    return Prediction('pm_trichotomy', p, True, hypothesis + ", V^G meets V0 nontrivially")


def cyclic_parameters(rep: MatrixGroupRep, cl: GroupClosure) -> Optional[Tuple[int, int, Tuple[int, ...]]]:
    """(p, r, Jordan type) when the closure is a cyclic p-group generated by one matrix."""
    p = rep.spec.p
    if not cl.is_p_group(p) or cl.order == 1:
        return None
    generator = next((i for i, o in enumerate(cl.orders) if o == cl.order), None)
    if generator is None:
        return None
    r = _ceil_log(p, cl.order)
    return p, r, jordan_type(cl.elements[generator], p)


# --- verification -----------------------------------------------------------

TARGET_ORDER = ('delta', 'gamma', 'epsilon', 'lemma_divide', 'klein_absence')


@dataclass(frozen=True)
class Target:
    quantity: str
    argument: Optional[Tuple[int, ...]] = None

    @property
    def key(self) -> str:
        if self.quantity == 'epsilon':
            return f"epsilon@{list(self.argument)}".replace(' ', '')
        if self.quantity == 'lemma_divide':
            return f"lemma_divide@{self.argument[0]}"
        return self.quantity

    def sort_key(self):
        return (TARGET_ORDER.index(self.quantity), self.argument or ())


def klein_absence_variable(k: KleinDesc) -> int:
    """0-based index of y_m, the last e-dual coordinate."""
    if k.variant in ('v2m', 'w2m') and k.m >= 2:
        return 2 * k.m - 1
    if k.variant == 'v_odd':
        return 2 * k.m
    raise BadParameter(f"absence check needs v2m/w2m with m >= 2 or v_odd, got {k.variant} m={k.m}")


class Verifier:
    """Builds the module once, collects every applicable prediction per target and
    runs the brute-force engine on it."""

    def __init__(self, desc: ModuleDescriptor, spec: FieldSpec, engine: InvariantEngine = None,
                 expectations: Dict[str, int] = None, timings: bool = False,
                 budget: float = None):
        self.desc = desc
        self.spec = spec
        self.engine = engine or InvariantEngine()
        self.expectations = expectations or {}
        self.timings = timings
        self.budget = budget
        self.rep = build(desc, spec)
        self.closure = self.engine.closure(self.rep)

    # --- predictions ---

    def _structural_predictions(self, quantity: str) -> List[Prediction]:
        preds: List[Prediction] = []
        p = self.spec.p
        jordans = jordan_summands(self.desc)
        ws = w_summands(self.desc)
        kleins = klein_summands(self.desc)
        if jordans:
            sizes = [j.n for j in jordans]
            if quantity == 'delta':
                preds.append(predict_delta_cyclic(sizes, jordans[0].p, jordans[0].r))
            else:
                preds.append(predict_gamma_cyclic(sizes, jordans[0].p))
        elif ws:
            if quantity == 'delta':
                trivial = [w.n for w in ws if self.spec.element(w.lam) == self.spec.one()]
                preds.append(predict_delta_w(p, trivial))
            else:
                parts = [predict_gamma_w(w.p, w.r, w.m, w.n, element_order(self.spec.element(w.lam)))
                         for w in ws]
                preds.append(parts[0] if len(parts) == 1 else predict_gamma_sum(parts))
        elif kleins:
            preds.append(predict_klein(kleins))
        else:
            params = cyclic_parameters(self.rep, self.closure)
            if params is not None:
                cp, cr, sizes = params
                if quantity == 'delta':
                    preds.append(predict_delta_cyclic(list(sizes), cp, cr))
                else:
                    preds.append(predict_gamma_cyclic(list(sizes), cp))
        if self.closure.is_p_group(p) and self.closure.order > 1:
            preds.append(pgroup_lower_bound(self.closure, p))
            preds.append(predict_center_exponent(self.closure, p))
        if quantity == 'delta':
            order = self.rep.group_order or self.closure.order
            if order % p == 0 and order % (p * p):
                preds.append(classify_pm(self.rep, self.engine))
        if quantity in self.expectations:
            preds.append(Prediction('expected', self.expectations[quantity], True, 'user expectation'))
        return preds

    def _epsilon_predictions(self, point: np.ndarray) -> List[Prediction]:
        preds = []
        jordans = jordan_summands(self.desc)
        if jordans:
            sizes = [j.n for j in jordans]
            terminals = np.cumsum(sizes) - 1
            others = np.setdiff1d(np.arange(self.rep.dim), terminals)
            if not np.any(point[others]):
                support = [j for j, t in enumerate(terminals) if point[t]]
                preds.append(predict_epsilon_cyclic(sizes, support, jordans[0].p, jordans[0].r))
        if 'epsilon' in self.expectations:
            preds.append(Prediction('expected', self.expectations['epsilon'], True, 'user expectation'))
        return preds

    # --- brute force ---

    def _judge(self, target: Target, preds: List[Prediction], computed: Optional[int],
               evidence: dict) -> TargetResult:
        ok = computed is not None and all(p.accepts(computed) for p in preds)
        if computed is not None and target.quantity in ('delta', 'gamma', 'epsilon'):
            evidence['group_order'] = self.closure.order
            ok = ok and computed <= self.closure.order
        return TargetResult(target.key, target.quantity, preds, computed,
                            'pass' if ok else 'fail', evidence)

    def _run_sweep(self, target: Target) -> TargetResult:
        preds = self._structural_predictions(target.quantity)
        sweep_fn = self.engine.delta_sweep if target.quantity == 'delta' else self.engine.gamma_sweep
        try:
            sweep = sweep_fn(self.rep, budget=self.budget)
        except BudgetExceeded as e:
            logger.warning(f"{target.key}: {e}; degrading to degrees <= {Config.FALLBACK_DEGREE}")
            sweep = sweep_fn(self.rep, stop_degree=Config.FALLBACK_DEGREE)
        evidence = {
            'point_count': sweep.point_count,
            'per_degree_dims': list(sweep.per_degree_dims),
            'resolved_by_degree': {str(d): c for d, c in sorted(sweep.resolved_by_degree.items())},
            'worst_point': list(sweep.worst_point) if sweep.worst_point is not None else None,
            'witness': str(sweep.witness) if sweep.witness is not None else None,
        }
        if sweep.complete:
            return self._judge(target, preds, sweep.value, evidence)

        lower = Config.FALLBACK_DEGREE + 1
        evidence['mode'] = 'bound confirmation only'
        evidence['lower_bound'] = lower if sweep.unresolved else sweep.value
        ok = all(not p.exact and p.value <= evidence['lower_bound'] for p in preds)
        return TargetResult(target.key, target.quantity, preds, None,
                            'pass' if ok else 'fail', evidence)

    def _run_epsilon(self, target: Target) -> TargetResult:
        point = np.array(target.argument, dtype=np.int64)
        preds = self._epsilon_predictions(point)
        result = self.engine.epsilon(self.rep, point)
        evidence = {'point': list(result.point), 'witness': str(result.witness),
                    'per_degree_dims': list(result.per_degree_dims)}
        return self._judge(target, preds, result.degree_found, evidence)

    def _run_lemma_divide(self, target: Target) -> TargetResult:
        d = target.argument[0]
        report = self.engine.terminal_divisibility_check(self.desc, self.rep, d)
        preds = [Prediction('lemma_divide', 0, True,
                            f"p^s divides terminal exponents at degree {d}")]
        evidence = {'checked_monomials': report.checked, 'violations': list(report.violations)}
        return self._judge(target, preds, len(report.violations), evidence)

    def _run_klein_absence(self, target: Target) -> TargetResult:
        kleins = klein_summands(self.desc)
        if not kleins or len(kleins) != 1:
            raise BadParameter("klein_absence needs a single Klein four module")
        y = klein_absence_variable(kleins[0])
        present = []
        for d in (1, 2, 3):
            m = [0] * self.rep.dim
            m[y] = d
            if self.engine.monomial_in_invariants(self.rep, d, tuple(m)):
                present.append(d)
        preds = [Prediction('klein_absence', 0, True,
                            f"x{y + 1}^d absent from invariants for d in 1..3")]
        evidence = {'variable': f"x{y + 1}", 'degrees': [1, 2, 3], 'present_at': present}
        return self._judge(target, preds, len(present), evidence)

    def run_target(self, target: Target) -> TargetResult:
        start = time.monotonic()
        if target.quantity in ('delta', 'gamma'):
            result = self._run_sweep(target)
        elif target.quantity == 'epsilon':
            result = self._run_epsilon(target)
        elif target.quantity == 'lemma_divide':
            result = self._run_lemma_divide(target)
        elif target.quantity == 'klein_absence':
            result = self._run_klein_absence(target)
        else:
            raise BadParameter(f"unknown target {target.quantity!r}")
        if self.timings:
            result.millis = int((time.monotonic() - start) * 1000)
        logger.info(f"{target.key}: computed={result.computed} verdict={result.verdict}")
        return result

    async def run_all(self, targets: Sequence[Target], jobs: int) -> List[TargetResult]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            tasks = [loop.run_in_executor(pool, self.run_target, t) for t in targets]
            outcomes = await asyncio.gather(*tasks, return_exceptions=True)
        for outcome in outcomes:
            if isinstance(outcome, Exception):
                raise outcome
        return list(outcomes)


def verify(desc: ModuleDescriptor, spec: FieldSpec, targets: Iterable[Target],
           expectations: Dict[str, int] = None, engine: InvariantEngine = None,
           jobs: int = None, timings: bool = False, budget: float = None,
           label: str = None) -> VerificationReport:
    """Predict and brute-force every target; results ordered by canonical target key."""
    verifier = Verifier(desc, spec, engine, expectations, timings, budget)
    ordered = sorted(set(targets), key=lambda t: t.sort_key())

    results = asyncio.run(verifier.run_all(ordered, jobs or Config.JOBS))

    caps = {'group_cap': verifier.engine.group_cap, 'point_cap': verifier.engine.point_cap}
    return VerificationReport(desc.to_dict(), spec.to_dict(), results, Config.VERSION, caps, label)
