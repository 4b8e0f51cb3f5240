import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from diagdiff.errors import ParameterIndexError, RigError, RigMismatchError
from diagdiff.rigs import (
    BOOLEAN, COMPLEX, DUAL_COMPLEX, F2, And, Const, DualArray, DualNumber, DualRig, Not, Or,
    PhaseExpr, Polynomial, PolynomialRig, TruthTableFn, Var, all_truth_tables, bool_partial,
    bool_partial_inductive, dual_add, dual_mul, f2_partial, f2_partial_via_boolean,
    formula_table, lift_smooth, phase_eval, phase_partial, pi0, pi1)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


# Dual numbers


def test_dual_add_componentwise():
    assert dual_add(DualNumber(1, 2), DualNumber(3, 4)) == DualNumber(4, 6)


def test_dual_add_identity_and_basis():
    a = DualNumber(2.5, -1.0)
    assert a + DualNumber(0, 0) == a
    assert DualNumber(1, 0) + DualNumber(0, 1) == DualNumber(1, 1)


def test_dual_mul_expansion():
    assert dual_mul(DualNumber(2, 3), DualNumber(5, 7)) == DualNumber(10, 29)


def test_epsilon_squares_to_zero():
    eps = DualNumber(0, 1)
    assert eps * eps == DualNumber(0, 0)


def test_dual_mul_identity():
    a = DualNumber(1.5 - 2j, 0.25j)
    assert a * DualNumber(1, 0) == a


def test_dual_numbers_over_different_rigs_do_not_mix():
    a = DualNumber(True, False, F2)
    b = DualNumber(1, 0, COMPLEX)
    with pytest.raises(RigMismatchError):
        dual_add(a, b)
    with pytest.raises(RigMismatchError):
        dual_mul(a, b)


def test_dual_numbers_over_f2():
    a, b = DualNumber(True, True, F2), DualNumber(True, False, F2)
    assert a * b == DualNumber(True, True, F2)
    assert a + a == DualNumber(False, False, F2)


def test_lift_smooth_examples():
    x = DualNumber(0.7, 1.3)
    assert lift_smooth(lambda a: a, lambda a: 1, x) == x
    assert lift_smooth(lambda a: 4.0, lambda a: 0.0, x) == DualNumber(4.0, 0.0)
    assert lift_smooth(math.sin, math.cos, DualNumber(0.0, 1.0)) == DualNumber(0.0, 1.0)


def test_lift_smooth_propagates_domain_errors():
    with pytest.raises(ValueError):
        lift_smooth(math.log, lambda a: 1 / a, DualNumber(-1.0, 1.0))


@given(cplx, cplx, cplx, cplx)
def test_dual_product_has_no_second_order_term(a, da, b, db):
    p = DualNumber(a, da) * DualNumber(b, db)
    assert p.re == a * b
    assert p.eps == a * db + da * b


@given(cplx, cplx, cplx, cplx)
def test_pi0_is_a_homomorphism(a, da, b, db):
    x, y = DualNumber(a, da), DualNumber(b, db)
    assert pi0(x + y) == pi0(x) + pi0(y)
    assert pi0(x * y) == pi0(x) * pi0(y)
    assert pi1(x + y) == pi1(x) + pi1(y)


@given(st.floats(-3, 3))
def test_dual_multiplication_is_the_product_rule(t):
    # a ↦ (f(t), f'(t)) then multiply, against the derivative of the product
    f, df = math.sin, math.cos
    g, dg = math.exp, math.exp
    x = DualNumber(t, 1.0)
    prod = lift_smooth(f, df, x) * lift_smooth(g, dg, x)
    assert prod.eps == pytest.approx(df(t) * g(t) + f(t) * dg(t), abs=1e-12)


# Rig laws


def _elements(rig):
    if rig in (F2, BOOLEAN):
        return [False, True]
    return [0, 1, 2.5 - 1j, -0.5j]


@pytest.mark.parametrize("rig", [F2, BOOLEAN, COMPLEX], ids=lambda r: r.name)
def test_rig_axioms(rig):
    for a, b, c in itertools.product(_elements(rig), repeat=3):
        assert rig.add(a, b) == rig.add(b, a)
        assert rig.mul(a, b) == rig.mul(b, a)
        assert rig.close(rig.add(rig.add(a, b), c), rig.add(a, rig.add(b, c)))
        assert rig.close(rig.mul(rig.mul(a, b), c), rig.mul(a, rig.mul(b, c)))
        assert rig.close(rig.mul(a, rig.add(b, c)), rig.add(rig.mul(a, b), rig.mul(a, c)))
        assert rig.mul(rig.zero, a) == rig.zero
        assert rig.add(rig.zero, a) == a
        assert rig.mul(rig.one, a) == a


def test_boolean_rig_has_no_negation():
    with pytest.raises(RigError):
        BOOLEAN.neg(True)
    assert BOOLEAN.add(True, True) is True
    assert F2.add(True, True) is False


@given(cplx, cplx, cplx, cplx, cplx, cplx)
def test_dual_rig_axioms(a, b, c, d, e, f):
    x, y, z = DualNumber(a, b), DualNumber(c, d), DualNumber(e, f)
    lhs, rhs = x * (y + z), x * y + x * z
    assert DUAL_COMPLEX.close(lhs, rhs, 1e-6 * (1 + abs(lhs.re) + abs(lhs.eps)))
    assert x * y == y * x


def test_dual_rig_arrays_follow_the_product_rule():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    da = rng.normal(size=(2, 3))
    b = rng.normal(size=(3, 2))
    db = rng.normal(size=(3, 2)) * 1j
    rig = DualRig(COMPLEX)
    out = rig.matmul(DualArray(a, da), DualArray(b, db))
    assert np.allclose(out.re, a @ b)
    assert np.allclose(out.eps, a @ db + da @ b)


# Polynomials: a rig with a derivation


polys = st.lists(st.tuples(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 3)), max_size=3),
                           st.integers(-5, 5)), max_size=4).map(
    lambda ts: Polynomial(tuple((tuple(m), c) for m, c in ts)))


@given(polys, polys, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_polynomial_derivation_laws(p, q, theta):
    rig = PolynomialRig(1)
    d = rig.derivation
    assert d(p + q) == d(p) + d(q)
    leibniz = d(p * q).evaluate(theta)
    expected = (p * d(q) + d(p) * q).evaluate(theta)
    assert abs(leibniz - expected) <= 1e-12 * (1 + abs(expected))


def test_polynomial_examples():
    t = Polynomial.var(0)
    p = t * t * 3 + 2
    assert p.partial(0) == t * 6
    assert p.evaluate([2.0]) == 14
    assert Polynomial.coerce(PhaseExpr(1.0, {0: 2.0})) == t * 2 + 1
    assert Polynomial.from_json(p.to_json()) == p


# Affine phases


def test_phase_eval_examples():
    assert phase_eval(PhaseExpr(math.pi, {0: 2.0}), [1.0]) == math.pi + 2
    assert phase_eval(PhaseExpr(math.pi), [0.4, 9.0]) == math.pi
    assert phase_eval(PhaseExpr(0, {0: 1, 1: 1}), [0.5, 0.25]) == 0.75


def test_phase_eval_rejects_missing_parameters():
    with pytest.raises(ParameterIndexError):
        phase_eval(PhaseExpr.param(2), [0.0, 1.0])


def test_phase_partial_examples():
    e = PhaseExpr(math.pi, {0: 2.0})
    assert phase_partial(e, 0) == 2
    assert phase_partial(e, 1) == 0
    assert phase_partial(PhaseExpr(1.0), 0) == 0


def test_phases_must_be_affine():
    with pytest.raises(TypeError):
        PhaseExpr.param(0) * PhaseExpr.param(1)
    with pytest.raises(TypeError):
        PhaseExpr.coerce("sin(θ0)")


coeff_maps = st.dictionaries(st.integers(0, 4), st.floats(-5, 5), max_size=4)


@given(st.floats(-5, 5), coeff_maps, st.lists(st.floats(-5, 5), min_size=5, max_size=5))
def test_phase_evaluation_is_affine(constant, coeffs, theta):
    e = PhaseExpr(constant, coeffs)
    expected = constant + sum(c * theta[i] for i, c in coeffs.items())
    assert phase_eval(e, theta) == pytest.approx(expected, abs=1e-12)
    for i in range(5):
        assert phase_partial(e, i) == coeffs.get(i, 0.0)


@given(st.floats(-5, 5), coeff_maps)
def test_phase_json_round_trip(constant, coeffs):
    e = PhaseExpr(constant, coeffs)
    assert PhaseExpr.from_json(e.to_json()) == e


# Truth tables


def test_truth_table_shape_is_checked():
    with pytest.raises(ValueError):
        TruthTableFn(2, 1, ((0,), (1,), (0,)))
    with pytest.raises(ValueError):
        TruthTableFn(1, 2, ((0, 1), (1,)))


def test_f2_partial_examples():
    conj = TruthTableFn.from_function(2, lambda x: x[0] & x[1])
    x1 = TruthTableFn.from_function(2, lambda x: x[1])
    assert f2_partial(conj, 0) == x1
    xor = TruthTableFn.from_function(2, lambda x: x[0] ^ x[1])
    assert f2_partial(xor, 0) == TruthTableFn.constant(2, 1)
    assert f2_partial(TruthTableFn.constant(3, 1), 2) == TruthTableFn.constant(3, 0)


def test_f2_partial_index_out_of_range():
    with pytest.raises(ParameterIndexError):
        f2_partial(TruthTableFn.constant(2, 0), 2)


def test_bool_partial_examples():
    disj = TruthTableFn.from_function(2, lambda x: x[0] | x[1], rig="B")
    not_x1 = TruthTableFn.from_function(2, lambda x: 1 - x[1], rig="B")
    assert bool_partial(disj, 0) == not_x1
    assert bool_partial(TruthTableFn.from_function(1, lambda x: x[0], rig="B"), 0) \
        == TruthTableFn.constant(1, 1, "B")
    assert bool_partial(TruthTableFn.from_function(1, lambda x: 1 - x[0], rig="B"), 0) \
        == TruthTableFn.constant(1, 0, "B")


def test_inductive_boolean_derivative_disagrees_on_disjunction():
    phi = Or(Var(0), Var(1))
    inductive = formula_table(bool_partial_inductive(phi, 0), 2)
    closed = bool_partial(formula_table(phi, 2), 0)
    assert inductive == TruthTableFn.constant(2, 1, "B")
    assert closed != inductive


def test_inductive_rules_agree_on_literals_and_conjunction():
    for phi in (Var(0), Not(Var(0)), Const(True), And(Var(0), Var(1))):
        assert formula_table(bool_partial_inductive(phi, 0), 2) == \
            bool_partial(formula_table(phi, 2), 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_f2_partials_ignore_their_variable(n):
    for f in all_truth_tables(n):
        for i in range(n):
            assert not f2_partial(f, i).depends_on(i)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_f2_and_boolean_derivatives_are_bridged(n):
    for f in all_truth_tables(n):
        for i in range(n):
            assert f2_partial_via_boolean(f, i) == f2_partial(f, i)


def test_bridge_example():
    conj = TruthTableFn.from_function(2, lambda x: x[0] & x[1])
    assert f2_partial_via_boolean(conj, 0) == TruthTableFn.from_function(2, lambda x: x[1])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_boolean_closed_form_semantics(n):
    for phi in all_truth_tables(n, "B"):
        for i in range(n):
            d = bool_partial(phi, i)
            for r in range(2 ** n):
                bits = [(r >> k) & 1 for k in range(n)]
                at0, at1 = list(bits), list(bits)
                at0[i], at1[i] = 0, 1
                assert d(*bits)[0] == (phi(*at1)[0] and not phi(*at0)[0])


def test_f2_leibniz_rule_fails_for_the_xor_derivative():
    # the XOR-of-restrictions operator is additive but not a derivation
    x0 = TruthTableFn.from_function(1, lambda x: x[0])
    assert f2_partial(x0 * x0, 0) != x0 * f2_partial(x0, 0) + f2_partial(x0, 0) * x0


def test_truth_table_json():
    f = TruthTableFn.from_function(2, lambda x: (x[0], x[0] ^ x[1]), coarity=2)
    assert f.to_json()["table"] == [[0, 0], [1, 1], [0, 1], [1, 0]]


def test_spider_phase_lift_matches_closed_form():
    x = DualNumber(0.3, 1.0)
    y = lift_smooth(lambda a: cmath.exp(0.5j * a), lambda a: 0.5j * cmath.exp(0.5j * a), x)
    assert abs(y.eps - 0.5j * cmath.exp(0.15j)) < 1e-15
