import numpy as np
import pytest

from sepdeg.config import Config
from sepdeg.core.errors import (
    ArityMismatch, BadParameter, ComponentTooLarge, DegreeMismatch, NotCyclicJordan, NotSeparated,
    PointBudgetExceeded, ZeroPoint,
)
from sepdeg.core.invariants import (
    InvariantEngine, coaction, delta_op, projective_count, projective_points,
)
from sepdeg.core.linalg import MatrixFq
from sepdeg.core.mpoly import Polynomial, evaluate
from sepdeg.core.gf import default_field
from sepdeg.core.reps import (
    BorelDesc, JordanDesc, KleinDesc, PermDesc, SumDesc, SymPowerDesc, WModuleDesc, build, make_rep,
)
from sepdeg.utils.dimension_cache import DimensionCache

OMEGA = (0, 1)


def test_coaction(v2, f4):
    assert [str(f) for f in coaction(v2, 'sigma')] == ['x1', 'x1 + x2']
    w = build(WModuleDesc(2, 1, 3, 1, OMEGA), f4)
    assert str(coaction(w, 'alpha')[0]) == "(a + 1)*x1"


def test_delta_operator(v2, f2):
    x1, x2 = (Polynomial.variable(f2, 2, i) for i in range(2))
    assert delta_op(v2, 'sigma', x1).is_zero()
    assert delta_op(v2, 'sigma', x2) == x1
    assert delta_op(v2, 'sigma', x2 ** 2) == x1 ** 2


def test_invariant_basis_of_v2(v2, engine):
    assert [str(f) for f in engine.invariant_basis(v2, 1).basis] == ['x1']
    assert [str(f) for f in engine.invariant_basis(v2, 2).basis] == ['x1^2', 'x1*x2 + x2^2']
    assert [str(f) for f in engine.invariant_basis(v2, 0).basis] == ['1']


def test_basis_elements_are_invariant(engine, v3, w2_omega, klein_v4):
    for rep in (v3, w2_omega, klein_v4):
        for d in range(1, 5):
            for f in engine.invariant_basis(rep, d).basis:
                for label in rep.labels:
                    assert delta_op(rep, label, f).is_zero()


def test_trivial_group_keeps_everything(f2, engine):
    rep = make_rep(f2, [('g', MatrixFq.identity(f2, 3))])
    assert engine.invariant_dimension(rep, 2) == 6


def test_negative_degree(v2, engine):
    with pytest.raises(BadParameter):
        engine.invariant_basis(v2, -1)


def test_monomial_membership(v2, klein_v4, engine):
    assert engine.monomial_in_invariants(v2, 2, (0, 2))
    assert engine.monomial_in_invariants(v2, 1, (1, 0))
    assert not engine.monomial_in_invariants(v2, 1, (0, 1))
    assert not engine.monomial_in_invariants(klein_v4, 2, (0, 0, 0, 2))
    with pytest.raises(DegreeMismatch):
        engine.monomial_in_invariants(v2, 1, (1, 1))
    with pytest.raises(ArityMismatch):
        engine.monomial_in_invariants(v2, 1, (1,))


def test_epsilon(v2, v3, engine):
    result = engine.epsilon(v2, [0, 1])
    assert result.degree_found == 2
    assert str(result.witness) == "x1*x2 + x2^2"
    assert result.per_degree_dims == (1, 2)
    assert engine.epsilon(v3, [0, 0, 1]).degree_found == 4
    assert engine.epsilon(v3, [1, 0, 0]).degree_found == 1


def test_epsilon_input_checks(v2, engine):
    with pytest.raises(ZeroPoint):
        engine.epsilon(v2, [0, 0])
    with pytest.raises(ArityMismatch):
        engine.epsilon(v2, [1])
    with pytest.raises(NotSeparated):
        engine.epsilon(v2, [0, 1], max_degree=1)


def test_epsilon_is_scalar_invariant(f3, engine):
    rep = build(JordanDesc(3, 1, 2), f3)
    assert engine.epsilon(rep, [0, 1]).degree_found == 3
    assert engine.epsilon(rep, [0, 2]).degree_found == 3


def test_projective_points(f4):
    points = projective_points(f4, np.eye(2, dtype=np.int64))
    assert points.tolist() == [[0, 1], [1, 0], [1, 2], [1, 1], [1, 3]]
    assert projective_count(f4, 2) == 5
    assert projective_count(f4, 0) == 0


def test_delta_and_gamma(f3, f4, engine):
    assert engine.delta_value(build(JordanDesc(3, 2, 4), f3)) == 9
    assert engine.gamma_value(build(WModuleDesc(2, 1, 3, 2, OMEGA), f4)) == 6
    assert engine.delta_value(build(WModuleDesc(2, 1, 3, 1, OMEGA), f4)) == 0
    pair = SumDesc((WModuleDesc(2, 1, 3, 2, (1,)), WModuleDesc(2, 1, 3, 1, OMEGA)))
    assert engine.gamma_value(build(pair, f4)) == 3


def test_sweep_bookkeeping(v3, engine):
    sweep = engine.gamma_sweep(v3)
    assert sweep.point_count == 7
    assert sweep.value == 4
    assert sum(sweep.resolved_by_degree.values()) == 7
    assert sweep.complete


def test_stop_degree_leaves_points_unresolved(v3, engine):
    sweep = engine.delta_sweep(v3, stop_degree=2)
    assert not sweep.complete
    assert sweep.unresolved == 1


def test_point_cap(v3):
    with pytest.raises(PointBudgetExceeded):
        InvariantEngine(point_cap=3, cache_dir='').gamma_sweep(v3)


def test_orbit_product(v2, v3, f2, engine):
    assert str(engine.orbit_product(v2, Polynomial.variable(f2, 2, 1))) == "x1*x2 + x2^2"
    assert str(engine.orbit_product(v2, Polynomial.variable(f2, 2, 0))) == "x1"
    norm = engine.orbit_product(v3, Polynomial.variable(f2, 3, 2))
    assert norm.degree() == 4
    assert evaluate(norm, [0, 0, 1]) == f2.one()
    with pytest.raises(BadParameter):
        engine.orbit_product(v2, Polynomial.variable(f2, 2, 0) ** 2)


def test_v_zero(f2, f3, f4, engine):
    a3 = build(PermDesc(3, ((1, 2, 0),), 3), f3)
    zeros = engine.v_zero(a3)
    assert len(zeros) == 2
    assert all(int(v.sum()) % 3 == 0 for v in zeros)
    assert engine.v_zero(make_rep(f2, [('g', MatrixFq.identity(f2, 3))])) == []
    assert len(engine.v_zero(build(WModuleDesc(2, 1, 3, 1, OMEGA), f4))) == 1


def test_terminal_divisibility(f2, engine):
    desc = SumDesc((JordanDesc(2, 2, 3), JordanDesc(2, 2, 2)))
    rep = build(desc, f2)
    for d in range(1, 5):
        report = engine.terminal_divisibility_check(desc, rep, d)
        assert report.passed
    assert engine.terminal_divisibility_check(desc, rep, 4).checked > 0
    klein = KleinDesc('v2m', 1)
    with pytest.raises(NotCyclicJordan):
        engine.terminal_divisibility_check(klein, build(klein, f2), 2)


def test_dimension_cache(tmp_path, v3):
    engine = InvariantEngine(cache_dir=str(tmp_path))
    assert engine.invariant_dimension(v3, 2) == engine.invariant_basis(v3, 2).dimension
    assert len(list(tmp_path.glob('*.json'))) == 1

    key = DimensionCache.make_key(v3.describe(), v3.spec.to_dict(), 2)
    DimensionCache(str(tmp_path)).put(key, 99)
    assert InvariantEngine(cache_dir=str(tmp_path)).invariant_dimension(v3, 2) == 99


def test_w2_has_one_linear_invariant(f2, engine):
    assert engine.invariant_dimension(build(KleinDesc('w2m', 1), f2), 1) == 1


def test_epsilon_past_the_component_limit_uses_the_orbit_product(v3, f2, engine, monkeypatch):
    monkeypatch.setattr(Config, 'COMPONENT_LIMIT', 10)
    result = engine.epsilon(v3, [0, 0, 1])
    assert result.degree_found == 4
    assert len(result.per_degree_dims) == 3
    assert result.witness.degree() == 4
    assert evaluate(result.witness, [0, 0, 1]) == f2.one()
    assert engine.epsilon(v3, [1, 0, 0]).degree_found == 1


def test_component_limit(v3, engine, monkeypatch):
    monkeypatch.setattr(Config, 'COMPONENT_LIMIT', 2)
    with pytest.raises(ComponentTooLarge):
        engine.invariant_basis(v3, 2)


def test_delta_over_a_field_past_the_table_limit(engine):
    rep = build(JordanDesc(3, 1, 2), default_field(3, 6))
    assert engine.delta_value(rep) == 3
    assert engine.epsilon(rep, [0, 1]).degree_found == 3


def test_degree_one_invariants_of_a_symmetric_square(f3, engine):
    square = build(SymPowerDesc(BorelDesc(3), 2), f3)
    assert [str(f) for f in engine.invariant_basis(square, 1).basis] == ['x3']
