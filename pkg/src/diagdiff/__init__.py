"""Differentiable string diagrams: ZX and classical-quantum circuits as tensors."""

from diagdiff import colours
from diagdiff.autodiff import (
    DEFAULT_RULES, GradientRuleSet, bubble_derivative, dense, diagram_derivative, dual_eval,
    finite_difference, gradcheck, gradient, hadamard_product_diagram, nn_layer, stone_check,
    stone_generator)
from diagdiff.cqmap import (
    CQDim, CQMap, ShiftRule, cq_compose, cq_tensor, double, double_diagram, encode, measure,
    shift_rule_derivative)
from diagdiff.diagrams import (
    Bubble, BubbleColour, Diagram, Doubled, FormalSum, Id, Matrix, Ty, bubble_wrap, compose,
    load_json, register_colour, register_pointwise, sum_add, sum_scale, tensor)
from diagdiff.errors import DiagDiffError
from diagdiff.interpret import interpret
from diagdiff.rigs import (
    BOOLEAN, COMPLEX, DUAL_COMPLEX, F2, DualNumber, PhaseExpr, Polynomial, TruthTableFn,
    bool_partial, dual_add, dual_mul, f2_partial, f2_partial_via_boolean, lift_smooth, phase_eval,
    phase_partial)
from diagdiff.tensors import Tensor, conj, dagger, kron, mat_compose, matrix_exp
from diagdiff.zx import (
    H, R_Z, SWAP, X, Z, algebraic_derivative, cnot, spider_derivative, theta, x_spider)

__version__ = "0.1.0"
