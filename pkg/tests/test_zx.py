import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from diagdiff.autodiff import diagram_derivative, stone_check, stone_generator
from diagdiff.corpus import random_spider
from diagdiff.diagrams import FormalSum, Green, Id, ZSpider
from diagdiff.errors import InterpretationError, RigError
from diagdiff.interpret import interpret
from diagdiff.rigs import F2, PhaseExpr, Polynomial
from diagdiff.tensors import expm
from diagdiff.zx import (
    H, R_Z, X, Z, algebraic_derivative, bell_state, cnot, green_rule, pauli_zx_gadget, rx, rz,
    spider_derivative, theta, x, zx_interpret)

from oracles import CNOT, HAD, I2, PX, PZ, central_difference, green, spider

seeds = st.integers(0, 2 ** 32 - 1)
angles = st.floats(-np.pi, np.pi, allow_nan=False)


# Semantics


def test_zero_phase_spider_is_identity():
    assert np.allclose(interpret(Z(1, 1, 0)).array, I2, atol=1e-15)


def test_pi_phase_spider():
    assert np.allclose(interpret(Z(1, 1, math.pi)).array, np.diag([-1j, 1j]), atol=1e-15)


def test_green_box_is_diagonal():
    a = 0.3 - 1.2j
    assert np.allclose(interpret(R_Z(1, 1, a)).array, np.diag([1, a]))


def test_scalar_spider_adds_the_two_corners():
    # Z^{0,0}(α) = e^{-iα/2} + e^{iα/2} = 2cos(α/2)
    assert np.isclose(interpret(Z(0, 0, 1.0)).entry(0), 2 * math.cos(0.5))


@given(st.integers(0, 3), st.integers(0, 3), angles)
def test_spider_matches_the_formula(m, n, alpha):
    assert np.allclose(interpret(Z(m, n, alpha)).array, spider(m, n, alpha), atol=1e-14)


@given(angles, angles)
def test_spider_fusion(a, b):
    lhs = interpret(Z(1, 1, a) >> Z(1, 1, b)).array
    assert np.allclose(lhs, interpret(Z(1, 1, a + b)).array, atol=1e-12)


def test_two_leg_fusion():
    lhs = interpret(Z(1, 2, 0.4) >> (Id(x) @ Z(1, 1, 0.9)) >> Z(2, 1, -0.2)).array
    # merging a copy through any diagonal on one leg fuses all phases
    assert np.allclose(lhs, interpret(Z(1, 1, 1.1)).array, atol=1e-12)


def test_cnot_and_bell():
    assert np.allclose(interpret(cnot()).array, CNOT, atol=1e-14)
    assert np.allclose(interpret(bell_state()).array.ravel(), [2 ** -0.5, 0, 0, 2 ** -0.5])


def test_zx_boxes_reject_bit_rigs():
    with pytest.raises(InterpretationError):
        zx_interpret(ZSpider(1, 1), rig=F2)


# X spiders


def test_x_spider_zero_is_identity():
    assert np.allclose(interpret(X(1, 1, 0)).array, I2, atol=1e-15)


def test_x_spider_pi():
    expected = HAD @ np.diag([-1j, 1j]) @ HAD
    out = interpret(X(1, 1, math.pi)).array
    assert np.allclose(out, expected, atol=1e-15)
    assert np.allclose(out, -1j * PX, atol=1e-15)


def test_x_spider_quarter_turn():
    expected = HAD @ spider(1, 1, math.pi / 2) @ HAD
    assert np.allclose(interpret(X(1, 1, theta(0)), [math.pi / 2]).array, expected, atol=1e-15)


# Spider rule


def test_spider_rule_coefficient_and_phase():
    d = spider_derivative(ZSpider(1, 1, theta(0)), 0)
    ((coeff, term),) = d.terms
    assert coeff == 0.5
    assert term.boxes[0].phase == PhaseExpr(math.pi, {0: 1.0})


def test_spider_rule_on_constant_phase_is_zero():
    assert spider_derivative(ZSpider(1, 1, PhaseExpr(0.7)), 0).is_zero


def test_spider_rule_with_doubled_coefficient():
    box = ZSpider(2, 3, theta(0, 2.0))
    ((coeff, term),) = spider_derivative(box, 0).terms
    assert coeff == 1.0
    assert term.boxes[0] == ZSpider(2, 3, theta(0, 2.0, math.pi))
    fd = central_difference(lambda t: spider(2, 3, 2 * t[0]), [0.4], 0)
    assert np.allclose(interpret(spider_derivative(box, 0), [0.4]).array, fd, atol=1e-8)


@given(seeds)
def test_spider_rule_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    box = random_spider(rng, max_legs=3, n_params=2)
    theta_ = rng.uniform(-np.pi, np.pi, size=2)
    for index in range(2):
        exact = interpret(spider_derivative(box, index), theta_).array
        fd = central_difference(lambda t: zx_interpret(box, t).array, theta_, index)
        assert np.max(np.abs(exact - fd)) <= 1e-8


@given(angles)
def test_derivative_factors_through_a_constant(t):
    # for Z(θ), ∂d = h ⨾ d with h = (1/2)·Z(π)
    h = interpret(0.5 * Z(1, 1, math.pi)).array
    lhs = interpret(diagram_derivative(Z(1, 1, theta(0)), 0), [t]).array
    assert np.allclose(lhs, h @ interpret(Z(1, 1, theta(0)), [t]).array, atol=1e-10)


@pytest.mark.parametrize("t", np.linspace(-3, 3, 7))
def test_product_rule_matches_fused_spider(t):
    twice = diagram_derivative(Z(1, 1, theta(0)) >> Z(1, 1, theta(0)), 0)
    fused = spider_derivative(ZSpider(1, 1, theta(0, 2.0)), 0)
    assert len(twice) == 2
    assert np.allclose(interpret(twice, [t]).array, interpret(fused, [t]).array, atol=1e-12)


# Algebraic green boxes


def test_green_derivative_of_the_variable():
    d = green_rule(Green(1, 1, Polynomial.var(0)), 0)
    assert np.allclose(interpret(d, [0.8]).array, np.diag([0, 1]))


def test_green_derivative_of_a_constant_is_zero():
    assert green_rule(Green(1, 1, Polynomial.const(2 + 1j)), 0).is_zero


def test_scalar_green_derivative_is_one():
    d = green_rule(Green(0, 0, Polynomial.var(0)), 0)
    assert np.isclose(interpret(d, [5.0]).entry(0), 1)


def test_green_derivative_with_non_constant_label():
    label = Polynomial.var(0) * Polynomial.var(0) * 3
    d = green_rule(Green(1, 2, label), 0)
    out = interpret(d, [0.7]).array
    expected = np.zeros((4, 2))
    expected[3, 1] = 6 * 0.7
    assert np.allclose(out, expected)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_green_derivative_matches_finite_differences(a, b):
    label = Polynomial.var(0) * Polynomial.var(1) + Polynomial.var(0) * 0.5
    d = R_Z(2, 1, label) >> H()
    exact = interpret(diagram_derivative(d, 0), [a, b]).array
    fd = central_difference(lambda t: HAD @ green(2, 1, t[0] * t[1] + 0.5 * t[0]), [a, b], 0)
    assert np.allclose(exact, fd, atol=1e-8)


def test_algebraic_derivative_needs_a_differential_rig():
    with pytest.raises(RigError):
        algebraic_derivative(Green(1, 1, Polynomial.var(0)), object())


# Stone's theorem


def test_stone_rz_rx():
    d = rz(theta(0)) @ rx(theta(0))
    report = stone_check(d)
    expected = -0.5 * (np.kron(PZ, I2) + np.kron(I2, PX))
    assert report.passed
    assert np.allclose(report.generator.array, expected, atol=1e-10)


def test_stone_pauli_gadget():
    report = stone_check(pauli_zx_gadget(theta(0)))
    assert report.passed
    assert np.allclose(report.generator.array, -0.5 * np.kron(PZ, PX), atol=1e-10)


@given(angles)
def test_rz_rx_is_an_exponential(t):
    expected = expm(-0.5j * t * (np.kron(PZ, I2) + np.kron(I2, PX)))
    out = interpret(rz(theta(0)) @ rx(theta(0)), [t]).array
    assert np.allclose(out, expected, atol=1e-10)


@given(angles)
def test_pauli_gadget_is_an_exponential(t):
    out = interpret(pauli_zx_gadget(theta(0)), [t]).array
    assert np.allclose(out, expm(-0.5j * t * np.kron(PZ, PX)), atol=1e-10)


def test_stone_identity_has_zero_generator():
    report = stone_check(Id(x @ x))
    assert report.passed
    assert np.allclose(report.generator.array, 0)


def test_stone_generator_is_self_adjoint():
    h = stone_generator(Z(1, 1, theta(0, 3.0)) >> H() >> Z(1, 1, theta(0, -1.0)) >> H()).array
    assert np.allclose(h, h.conj().T, atol=1e-12)


def test_stone_rejects_non_group():
    # a green box with a non-unitary label is not a one-parameter group
    report = stone_check(FormalSum.coerce(R_Z(1, 1, Polynomial.var(0) + 1)))
    assert not report.passed
