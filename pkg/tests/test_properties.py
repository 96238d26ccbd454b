"""Randomised and exhaustive cross-checks between the engine, the closed forms and
basic algebra. Seeds are fixed so failures reproduce."""
import math
import random

import numpy as np
import pytest

from sepdeg.core.gf import default_field
from sepdeg.core.invariants import coaction, delta_op, projective_points
from sepdeg.core.linalg import mat_vec
from sepdeg.core.mpoly import Polynomial, evaluate, monomials_of_degree, substitute_linear
from sepdeg.core.oracle import lucas, predict_epsilon_cyclic, predict_gamma_cyclic, predict_klein
from sepdeg.core.reps import (
    BorelDesc, JordanDesc, KleinDesc, SumDesc, SymPowerDesc, WModuleDesc, build, close_group,
    make_rep,
)

OMEGA = (0, 1)


@pytest.mark.parametrize('p', [2, 3, 5])
def test_lucas_matches_binomials(p):
    for t in range(201):
        for s in range(201):
            assert lucas(t, s, p) == math.comb(t, s) % p


def _modules():
    return [
        (build(JordanDesc(3, 1, 2), default_field(3, 1))),
        (build(JordanDesc(3, 2, 3), default_field(3, 1))),
        (build(WModuleDesc(2, 1, 3, 2, OMEGA), default_field(2, 2))),
        (build(KleinDesc('v2m', 1, OMEGA), default_field(2, 2))),
        (build(SymPowerDesc(BorelDesc(3), 1), default_field(3, 1))),
    ]


def test_epsilon_is_invariant_under_scalars(engine):
    rng = random.Random(2024)
    modules = _modules()
    for _ in range(100):
        rep = rng.choice(modules)
        q = rep.spec.q
        point = np.array([rng.randrange(q) for _ in range(rep.dim)], dtype=np.int64)
        if not point.any():
            point[0] = 1
        scalar = rng.randrange(1, q)
        scaled = rep.spec.ops.mul(point, np.full_like(point, scalar))
        eps = engine.epsilon(rep, point).degree_found
        assert engine.epsilon(rep, scaled).degree_found == eps
        assert 1 <= eps <= close_group(rep).order


def test_gamma_of_sum_is_max_of_summands(f2, engine):
    rng = random.Random(7)
    for _ in range(10):
        n1, n2 = rng.randint(1, 4), rng.randint(1, 4)
        desc = SumDesc((JordanDesc(2, 2, n1), JordanDesc(2, 2, n2)))
        gamma = engine.gamma_value(build(desc, f2))
        parts = [engine.gamma_value(build(JordanDesc(2, 2, n), f2)) for n in (n1, n2)]
        assert gamma == max(parts)
        assert gamma == predict_gamma_cyclic([n1, n2], 2).value


def test_delta_at_most_gamma_at_most_order(f2, f4, engine):
    reps = [
        build(JordanDesc(2, 2, 3), f2),
        build(KleinDesc('v_odd', 1), f2),
        build(KleinDesc('w2m', 1), f2),
        build(WModuleDesc(2, 1, 3, 2, (1,)), f4),
    ]
    for rep in reps:
        delta, gamma = engine.delta_value(rep), engine.gamma_value(rep)
        assert delta <= gamma <= close_group(rep).order


def test_action_matches_inverse_matrix(f2, v3, klein_v4):
    """(g.f)(v) = f(g^-1 v) over every point of F_2^n."""
    rng = random.Random(11)
    for rep in (v3, klein_v4):
        n = rep.dim
        monos = monomials_of_degree(n, 2)
        f = Polynomial(f2, n, {m: rng.randrange(2) for m in monos})
        points = projective_points(f2, np.eye(n, dtype=np.int64))
        for label in rep.labels:
            gf = substitute_linear(f, coaction(rep, label))
            inverse = rep.inverses[label]
            for v in points:
                assert evaluate(gf, v) == evaluate(f, mat_vec(inverse, v))


def test_subgroup_has_more_invariants(f4, engine):
    full = build(WModuleDesc(2, 1, 3, 2, OMEGA), f4)
    sigma_only = make_rep(f4, [('sigma', full.generator('sigma'))])
    for d in range(1, 4):
        assert engine.invariant_dimension(full, d) <= engine.invariant_dimension(sigma_only, d)


def test_sigma_only_basis_is_invariant(f4, engine):
    sigma_only = make_rep(f4, [('sigma', build(WModuleDesc(2, 1, 3, 2, OMEGA), f4).generator('sigma'))])
    for f in engine.invariant_basis(sigma_only, 3).basis:
        assert delta_op(sigma_only, 'sigma', f).is_zero()


def test_epsilon_cyclic_shrinks_with_support():
    sizes = (4, 3, 2, 1)
    values = [predict_epsilon_cyclic(sizes, range(k), 2).value for k in range(1, 5)]
    assert values == sorted(values, reverse=True)
    assert values == [4, 4, 2, 1]


def test_klein_sum_follows_max_rule():
    parts = [KleinDesc('w_odd', 1), KleinDesc('v2m', 1, (0,)), KleinDesc('v_odd', 2)]
    assert predict_klein(parts).value == max(predict_klein([k]).value for k in parts)
