"""The built-in acceptance matrix run by `sepdeg verify --suite paper`."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sepdeg.config import Config
from sepdeg.core.errors import ComponentTooLarge
from sepdeg.core.gf import default_field
from sepdeg.core.invariants import InvariantEngine
from sepdeg.core.oracle import Target, VerificationReport, predict_epsilon_cyclic, verify
from sepdeg.core.reps import (
    BorelDesc, DihedralDesc, JordanDesc, KleinDesc, ModuleDescriptor, PermDesc, SumDesc,
    SymPowerDesc, WModuleDesc,
)

logger = logging.getLogger(__name__)

OMEGA = (0, 1)
DELTA = Target('delta')
GAMMA = Target('gamma')


def _eps(*point: int) -> Target:
    return Target('epsilon', tuple(point))


@dataclass(frozen=True)
class SuiteCase:
    label: str
    descriptor: ModuleDescriptor
    field: Tuple[int, int]
    targets: Tuple[Target, ...]
    heavy: bool = False
    expectations: Dict[str, int] = field(default_factory=dict)


def _klein(label: str, variant: str, m: int = 1, lam=(0,), k: int = 1, absence: bool = False) -> SuiteCase:
    targets = (DELTA, GAMMA) + ((Target('klein_absence'),) if absence else ())
    return SuiteCase(label, KleinDesc(variant, m, tuple(lam)), (2, k), targets)


def acceptance_cases() -> List[SuiteCase]:
    cases = [
        SuiteCase(f"cyclic-epsilon V{n} (p=2, r=2)", JordanDesc(2, 2, n), (2, 1),
                  (_eps(*([0] * (n - 1) + [1])), DELTA))
        for n in range(1, 5)
    ]
    cases.append(SuiteCase("cyclic V4 (p=3, r=2)", JordanDesc(3, 2, 4), (3, 1),
                           (_eps(0, 0, 0, 1), DELTA)))

    v3_v2 = SumDesc((JordanDesc(2, 2, 3), JordanDesc(2, 2, 2)))
    cases.append(SuiteCase("mixed support V3+V2", v3_v2, (2, 1),
                           (_eps(0, 0, 1, 0, 0), _eps(0, 0, 0, 0, 1), _eps(0, 0, 1, 0, 1), DELTA)))
    cases.append(SuiteCase("terminal divisibility V3+V2", v3_v2, (2, 1),
                           tuple(Target('lemma_divide', (d,)) for d in range(1, 7))))

    cases.append(SuiteCase("gamma W2,omega (Z6)", WModuleDesc(2, 1, 3, 2, OMEGA), (2, 2),
                           (DELTA, GAMMA)))
    cases.append(SuiteCase("gamma W2,1 + W1,omega (Z6)",
                           SumDesc((WModuleDesc(2, 1, 3, 2, (1,)), WModuleDesc(2, 1, 3, 1, OMEGA))),
                           (2, 2), (DELTA, GAMMA)))

    cases += [
        _klein("Klein Vreg", 'regular'),
        _klein("Klein V2,0", 'v2m', 1, (0,)),
        _klein("Klein V2,omega", 'v2m', 1, OMEGA, k=2),
        _klein("Klein V4,0", 'v2m', 2, (0,), absence=True),
        _klein("Klein V4,omega", 'v2m', 2, OMEGA, k=2, absence=True),
        _klein("Klein W2", 'w2m', 1),
        _klein("Klein W4", 'w2m', 2, absence=True),
        _klein("Klein V3", 'v_odd', 1, absence=True),
        _klein("Klein V5", 'v_odd', 2, absence=True),
        _klein("Klein W3", 'w_odd', 1),
        _klein("Klein W5", 'w_odd', 2),
    ]

    cases.append(SuiteCase("p-group bound D8 regular", DihedralDesc(4, 2), (2, 1), (DELTA,),
                           heavy=True))

    cases += [
        SuiteCase("pm A3 natural", PermDesc(3, ((1, 2, 0),), 3), (3, 1), (DELTA,)),
        SuiteCase("pm S3 natural", PermDesc(3, ((1, 0, 2), (1, 2, 0)), 3), (3, 1), (DELTA,)),
        SuiteCase("pm S^1 borel(3)", SymPowerDesc(BorelDesc(3), 1), (3, 1), (DELTA,)),
        SuiteCase("pm S^2 borel(3)", SymPowerDesc(BorelDesc(3), 2), (3, 1), (DELTA,)),
        SuiteCase("pm trivial Z6", WModuleDesc(2, 1, 3, 1, (1,)), (2, 1), (DELTA,)),
        SuiteCase("pm W1,omega (Z6)", WModuleDesc(2, 1, 3, 1, OMEGA), (2, 2), (DELTA,)),
    ]
    return cases


def run_suite(engine: InvariantEngine = None, jobs: int = None, timings: bool = False,
              budget: Optional[float] = None) -> List[VerificationReport]:
    engine = engine or InvariantEngine()
    budget = Config.HEAVY_BUDGET if budget is None else budget
    reports = []
    for case in acceptance_cases():
        spec = default_field(*case.field)
        logger.info(f"Suite case: {case.label} over {spec.name}")
        reports.append(verify(case.descriptor, spec, case.targets, case.expectations, engine,
                              jobs, timings, budget if case.heavy else None, case.label))
    failed = [r.label for r in reports if r.verdict != 'pass']
    if failed:
        logger.warning(f"Suite failures: {failed}")
    return reports


# --- tables -----------------------------------------------------------------

KLEIN_TABLE = (
    ('Vreg', KleinDesc('regular'), 1),
    ('V2,0', KleinDesc('v2m', 1, (0,)), 1),
    ('V2,omega', KleinDesc('v2m', 1, OMEGA), 2),
    ('V4,0', KleinDesc('v2m', 2, (0,)), 1),
    ('V4,omega', KleinDesc('v2m', 2, OMEGA), 2),
    ('W2', KleinDesc('w2m', 1), 1),
    ('W4', KleinDesc('w2m', 2), 1),
    ('V3', KleinDesc('v_odd', 1), 1),
    ('V5', KleinDesc('v_odd', 2), 1),
    ('W3', KleinDesc('w_odd', 1), 1),
    ('W5', KleinDesc('w_odd', 2), 1),
)

TableRows = Tuple[str, List[str], List[dict]]


def _exact_prediction(result) -> Optional[int]:
    return next((p.value for p in result.predictions if p.exact), None)


def klein_table(engine: InvariantEngine = None, jobs: int = None) -> TableRows:
    engine = engine or InvariantEngine()
    rows = []
    for name, desc, k in KLEIN_TABLE:
        report = verify(desc, default_field(2, k), (DELTA, GAMMA), engine=engine, jobs=jobs)
        delta, gamma = report.results
        computed = delta.computed if delta.computed == gamma.computed else f"{delta.computed}/{gamma.computed}"
        rows.append({'module': name, 'predicted': _exact_prediction(delta), 'computed': computed,
                     'verdict': report.verdict})
    return "Klein four group: delta = gamma", ['module', 'predicted', 'computed', 'verdict'], rows


def cyclic_epsilon_table(p: int = 2, r: int = 2, engine: InvariantEngine = None) -> TableRows:
    """Rows whose elimination outgrows Config.COMPONENT_LIMIT are reported as skipped."""
    engine = engine or InvariantEngine()
    spec = default_field(p, 1)
    rows = []
    for n in range(1, p ** r + 1):
        point = _eps(*([0] * (n - 1) + [1]))
        try:
            report = verify(JordanDesc(p, r, n), spec, (point,), engine=engine)
        except ComponentTooLarge as e:
            logger.warning(f"V_{n}: {e}; row skipped")
            rows.append({'n': n, 'predicted': predict_epsilon_cyclic([n], [0], p, r).value,
                         'computed': None, 'verdict': 'skipped'})
            continue
        result = report.results[0]
        rows.append({'n': n, 'predicted': _exact_prediction(result), 'computed': result.computed,
                     'verdict': result.verdict})
    return (f"Z_{p ** r} on V_n: epsilon at the fixed point e_n",
            ['n', 'predicted', 'computed', 'verdict'], rows)


def pm_table(engine: InvariantEngine = None) -> TableRows:
    engine = engine or InvariantEngine()
    rows = []
    for case in acceptance_cases():
        if not case.label.startswith('pm '):
            continue
        report = verify(case.descriptor, default_field(*case.field), (DELTA,), engine=engine)
        result = report.results[0]
        trichotomy = next(p.value for p in result.predictions if p.kind == 'pm_trichotomy')
        rows.append({'module': case.label[3:], 'predicted': trichotomy,
                     'computed': result.computed, 'verdict': result.verdict})
    return "|G| = p*m: delta in {0, 1, p}", ['module', 'predicted', 'computed', 'verdict'], rows
