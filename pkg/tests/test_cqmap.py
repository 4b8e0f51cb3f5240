import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from diagdiff.autodiff import GradientRuleSet, diagram_derivative
from diagdiff.corpus import measured, random_unitary, rz_rx_cnot
from diagdiff.cqmap import (
    CQDim, CQMap, ShiftRule, cq_compose, cq_swap, cq_tensor, double, double_diagram, encode,
    is_completely_positive, measure, shift_rule_derivative)
from diagdiff.diagrams import Diagram, Doubled, FormalSum, Green, Hadamard, Id, Measure, Ty, ZSpider
from diagdiff.errors import MissingRuleError, ShiftRuleError, TypeCheckError
from diagdiff.interpret import interpret
from diagdiff.rigs import F2, PhaseExpr, Polynomial
from diagdiff.tensors import Tensor
from diagdiff.zx import H, Z, rz, theta

from oracles import apply_diagram, born, central_difference, rz as rz_matrix

seeds = st.integers(0, 2 ** 32 - 1)
angles = st.floats(-np.pi, np.pi, allow_nan=False)


def t2(m):
    return Tensor(np.asarray(m, dtype=complex), [2], [2])


def random_matrix(rng, n=2):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


# Composition and tensor


def test_cq_identity_is_a_unit():
    f = double(t2([[1, 2j], [0, 1]]))
    assert cq_compose(CQMap.id(CQDim(1, 2)), f) == f


def test_cq_tensor_of_classical_maps_is_kron():
    a = CQMap(np.array([[1, 2], [3, 4]]), CQDim(2, 1), CQDim(2, 1))
    b = CQMap(np.array([[0, 1j], [5, 6]]), CQDim(2, 1), CQDim(2, 1))
    assert np.array_equal(cq_tensor(a, b).array, np.kron(a.array, b.array))


@given(seeds)
def test_doubling_is_monoidal(seed):
    rng = np.random.default_rng(seed)
    a, b = t2(random_matrix(rng)), t2(random_matrix(rng))
    lhs = cq_tensor(double(a), double(b))
    assert lhs.allclose(double(a @ b), 1e-12)


def test_cq_swap_swaps_doubled_tensors():
    rng = np.random.default_rng(4)
    a, b = t2(random_matrix(rng)), t2(random_matrix(rng))
    q = CQDim(1, 2)
    lhs = cq_swap(q, q) >> cq_tensor(double(b), double(a))
    rhs = cq_tensor(double(a), double(b)) >> cq_swap(q, q)
    assert lhs.allclose(rhs, 1e-12)


# Doubling


def test_double_identity():
    assert np.array_equal(double(Tensor.id([2])).array, np.eye(4))


def test_double_scalar():
    assert double(Tensor(np.array([[2j]]))).entry(0) == 4


@given(angles)
def test_doubling_forgets_global_phase(phi):
    f = t2(random_matrix(np.random.default_rng(5)))
    assert double(f.scale(np.exp(1j * phi))).allclose(double(f), 1e-12)


def test_doubling_is_not_additive():
    i2 = Tensor.id([2])
    lhs = double(i2 + i2).array
    rhs = (double(i2) + double(i2)).array
    assert np.array_equal(lhs.imag, np.zeros((4, 4)))
    assert np.array_equal(lhs.real, 4 * np.eye(4))
    assert np.array_equal(rhs.real, 2 * np.eye(4))
    assert np.array_equal((lhs - rhs).real, 2 * np.eye(4))


def test_doubled_gradient_is_not_double_of_pure_gradient():
    # ∂ double(Rz) against double(∂Rz) at θ = 0.3
    d = double_diagram(rz(theta(0)))
    lifted = interpret(diagram_derivative(d, 0), [0.3]).array
    pure = interpret(diagram_derivative(rz(theta(0)), 0), [0.3])
    naive = double(pure).array
    assert np.allclose(np.diag(lifted), [0, -0.295520206661 + 0.955336489126j,
                                         -0.295520206661 - 0.955336489126j, 0], atol=1e-11)
    assert np.allclose(np.diag(naive), [0.25, -0.238834122281 - 0.073880051665j,
                                        -0.238834122281 + 0.073880051665j, 0.25], atol=1e-11)
    assert np.max(np.abs(lifted - naive)) > 1e-3


# Measurement and encoding


def test_measuring_plus_gives_uniform_distribution():
    plus = Tensor(np.array([1, 1]) / math.sqrt(2), [], [2])
    out = double(plus) >> measure()
    assert np.allclose(out.array.ravel(), [0.5, 0.5])


def test_measuring_zero():
    zero = Tensor(np.array([1, 0]), [], [2])
    assert np.array_equal((double(zero) >> measure()).array.ravel(), [1, 0])


def test_encode_then_measure_is_classical_identity():
    for a in (2, 3):
        out = encode(a) >> measure(a)
        assert np.array_equal(out.array, np.eye(a))
        assert out.dom == out.cod == CQDim(a, 1)


def test_measure_and_encode_are_completely_positive():
    assert is_completely_positive(measure())
    assert is_completely_positive(encode())


def test_doubled_maps_are_completely_positive():
    f = t2(random_matrix(np.random.default_rng(6)))
    assert is_completely_positive(double(f))


def test_negative_weight_is_flagged_but_still_a_cq_map():
    f = double(Tensor.id([2])).scale(-1)
    assert not is_completely_positive(f)
    assert isinstance(f, CQMap)


# Shift rule


def test_shift_for_half_eigenvalues_is_quarter_turn():
    assert ShiftRule(0.5).s == pytest.approx(math.pi / 2)
    assert ShiftRule(1.0).s == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("r, s", [(0.0, None), (-1.0, None), (0.5, 0.3)])
def test_inconsistent_shift_rules_are_rejected(r, s):
    with pytest.raises(ShiftRuleError):
        ShiftRule(r, s)


def test_shift_rule_terms():
    d = shift_rule_derivative(Doubled(ZSpider(1, 1, theta(0))), 0)
    terms = sorted((t.boxes[0].inner.phase.constant, c) for c, t in d.terms)
    assert terms == [(pytest.approx(-math.pi / 2), -0.5), (pytest.approx(math.pi / 2), 0.5)]


def test_shift_rule_on_constant_phase_is_zero():
    assert shift_rule_derivative(Doubled(ZSpider(1, 1, PhaseExpr(0.4))), 0).is_zero


def test_shift_rule_needs_a_spider():
    with pytest.raises(MissingRuleError):
        shift_rule_derivative(Doubled(Green(1, 1, Polynomial.var(0))), 0)
    assert shift_rule_derivative(Doubled(Hadamard()), 0).is_zero


@given(angles)
def test_shift_rule_matches_finite_differences_of_doubled_rz(t):
    d = shift_rule_derivative(Doubled(ZSpider(1, 1, theta(0))), 0)
    fd = central_difference(lambda p: np.kron(rz_matrix(p[0]).conj(), rz_matrix(p[0])), [t], 0)
    assert np.allclose(interpret(d, [t]).array, fd, atol=1e-8)


@given(angles, st.sampled_from([-2.0, -0.5, 1.0, 3.0]), st.integers(0, 2), st.integers(0, 2))
def test_shift_rule_scales_with_affine_coefficients(t, c, m, n):
    box = Doubled(ZSpider(m, n, theta(0, c, 0.2)))
    exact = interpret(FormalSum.coerce(shift_rule_derivative(box, 0)), [t]).array
    fd = central_difference(lambda p: interpret(FormalSum.coerce(box), p).array, [t], 0)
    assert np.allclose(exact, fd, atol=1e-8)


def test_wrong_shift_rule_gives_wrong_gradient():
    rules = GradientRuleSet(shift=ShiftRule(1.0))
    d = double_diagram(rz(theta(0)))
    wrong = interpret(diagram_derivative(d, 0, rules), [0.3]).array
    right = interpret(diagram_derivative(d, 0), [0.3]).array
    assert np.max(np.abs(wrong - right)) > 1e-3


# Measured circuits


THETA = [0.3, -0.7, 1.1, 0.4]
PROBS = [0.641341939591, 0.085456121122, 0.241079154051, 0.032122785236]
GRADS = {
    0: [0.0, 0.0, 0.0, 0.0],
    1: [0.234108082881, -0.234108082881, 0.088000760738, -0.088000760738],
    2: [-0.393210086664, -0.052393593367, 0.393210086664, 0.052393593367],
    3: [0.0, 0.0, 0.0, 0.0],
}


def test_measured_circuit_probabilities():
    out = interpret(measured(rz_rx_cnot()), THETA).array.ravel()
    assert np.allclose(out, PROBS, atol=1e-11)
    # agrees with the Born rule on the pure circuit
    state = apply_diagram(rz_rx_cnot(), THETA)[:, 0]
    assert np.allclose(out, born(state), atol=1e-12)


@pytest.mark.parametrize("index", sorted(GRADS))
def test_measured_circuit_gradients(index):
    d = measured(rz_rx_cnot())
    out = interpret(diagram_derivative(d, index), THETA).array.ravel()
    assert np.allclose(out, GRADS[index], atol=1e-11)


@given(seeds)
def test_measured_probabilities_are_normalised(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    d = measured(random_unitary(rng, n, 6, 4))
    out = interpret(d, rng.uniform(-np.pi, np.pi, size=4)).array.ravel()
    assert abs(out.sum() - 1) <= 1e-10
    assert out.min() >= -1e-12


@given(seeds)
def test_shift_rule_gradients_of_measured_circuits(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    d = measured(random_unitary(rng, n, 6, 4))
    point = rng.uniform(-np.pi, np.pi, size=4)
    for index in range(4):
        exact = interpret(diagram_derivative(d, index), point).array
        fd = central_difference(lambda p: interpret(d, p).array, point, index)
        assert np.max(np.abs(exact - fd)) <= 1e-8


def test_undoubled_wires_in_cq_circuits_are_type_errors():
    with pytest.raises(TypeCheckError):
        interpret(Z(1, 1) @ Id(Ty("q")))
    with pytest.raises(TypeCheckError):
        interpret(Id(Ty("q")) @ H())


def test_measurement_is_a_bit_matrix_over_f2():
    out = interpret(Diagram.from_box(Measure()), rig=F2)
    assert out.shape == (2, 4)
    ones = {(r, c) for r in range(2) for c in range(4) if out.entry(r, c)}
    assert ones == {(0, 0), (1, 3)}
