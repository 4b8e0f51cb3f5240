"""
The ZX signature with affine phases, its matrix semantics and derivatives.

The green spider is scaled by a global phase so that ``Z(1, 1, θ)`` is the
usual ``Rz(θ)`` gate::

    [[Z^{m,n}(α)]] = e^{-iα/2} |0..0><0..0| + e^{iα/2} |1..1><1..1|
"""

from __future__ import annotations

import cmath
import math

from diagdiff.cqmap import delta
from diagdiff.diagrams import (
    Diagram, FormalSum, Green, Hadamard, Id, Scalar, Swap, Ty, ZSpider, wire_dim)
from diagdiff.errors import InterpretationError, RigError
from diagdiff.rigs import (
    COMPLEX, PhaseExpr, Polynomial, ScalarRig, Valuation, phase_partial)
from diagdiff.tensors import Tensor

x = Ty("x")


def _phase(value) -> PhaseExpr:
    return PhaseExpr.coerce(value)


def theta(index: int, coeff: float = 1.0, constant: float = 0.0) -> PhaseExpr:
    """The affine phase ``constant + coeff·θ_index``."""
    return PhaseExpr.param(index, coeff, constant)


def Z(m: int = 1, n: int = 1, phase=0.0) -> Diagram:
    return Diagram.from_box(ZSpider(m, n, _phase(phase)))


def H() -> Diagram:
    return Diagram.from_box(Hadamard())


def SWAP(left: str = "x", right: str = "x") -> Diagram:
    return Diagram.from_box(Swap(left, right))


def R_Z(m: int = 1, n: int = 1, label=0) -> Diagram:
    return Diagram.from_box(Green(m, n, Polynomial.coerce(label)))


def scalar(value: complex) -> Diagram:
    return Diagram.from_box(Scalar(value))


def hadamards(k: int) -> Diagram:
    out = Id(Ty())
    for _ in range(k):
        out = out @ H()
    return out


def x_spider(m: int = 1, n: int = 1, phase=0.0) -> Diagram:
    """The red spider, as a green spider conjugated by Hadamards."""
    return hadamards(m) >> Z(m, n, phase) >> hadamards(n)


X = x_spider


def rz(phase) -> Diagram:
    return Z(1, 1, phase)


def rx(phase) -> Diagram:
    return x_spider(1, 1, phase)


def cnot() -> Diagram:
    """CNOT from a copying green spider and a red XOR spider, normalised by √2."""
    return ((Z(1, 2) @ Id(x)) >> (Id(x) @ x_spider(2, 1))) @ scalar(math.sqrt(2))


def ket0() -> Diagram:
    """The normalised state |0>."""
    return (Z(0, 1) >> H()) @ scalar(1 / math.sqrt(2))


def bell_state() -> Diagram:
    """(|00> + |11>)/√2 from two green spiders."""
    return (Z(0, 1) >> Z(1, 2)) @ scalar(1 / math.sqrt(2))


def pauli_zx_gadget(phase) -> Diagram:
    """
    ``exp(-(i/2)·θ·Z⊗X)``: a CNOT-conjugated ``Rz`` on the second wire,
    with Hadamards turning the ZZ gadget into a ZX one.
    """
    return ((Id(x) @ H()) >> cnot() >> (Id(x) @ rz(phase))
            >> cnot() >> (Id(x) @ H()))


# Semantics ----------------------------------------------------------------


def _complex_like(rig: ScalarRig) -> bool:
    return rig is COMPLEX or getattr(rig, "base", None) is COMPLEX


def zx_matrix(box, valuation: Valuation):
    """The rig array of a ZX box at a parameter point."""
    rig = valuation.rig
    if not _complex_like(rig):
        raise InterpretationError(f"{box.name} has no interpretation over {rig.name}")
    match box:
        case ZSpider(m, n, phase):
            alpha = valuation.scalar(phase)
            minus = valuation.lift(lambda a: cmath.exp(-0.5j * a),
                                   lambda a: -0.5j * cmath.exp(-0.5j * a), alpha)
            plus = valuation.lift(lambda a: cmath.exp(0.5j * a),
                                  lambda a: 0.5j * cmath.exp(0.5j * a), alpha)
            return _two_corners(rig, m, n, minus, plus)
        case Hadamard():
            s = 1 / math.sqrt(2)
            return rig.from_entries([s, s, s, -s], (2, 2))
        case Green(m, n, label):
            return _two_corners(rig, m, n, rig.one, valuation.scalar(label))
        case Scalar(value):
            return rig.from_entries([value], (1, 1))
        case Swap(left, right):
            return swap_matrix(wire_dim(left), wire_dim(right), rig)
    raise InterpretationError(f"{box.name} is not a ZX box")


def _two_corners(rig: ScalarRig, m: int, n: int, first, last):
    """``first·|0..><0..| + last·|1..><1..|``; the corners coincide when m = n = 0."""
    rows, cols = 2 ** n, 2 ** m
    entries = [rig.zero] * (rows * cols)
    entries[0] = rig.add(entries[0], first)
    entries[-1] = rig.add(entries[-1], last)
    return rig.from_entries(entries, (rows, cols))


def swap_matrix(left: int, right: int, rig: ScalarRig = COMPLEX):
    size = left * right
    return rig.permute(rig.identity(size), (left, right), (1, 0), (size,), (0,))


def zx_interpret(box, theta=(), rig: ScalarRig = COMPLEX, seed: int | None = None) -> Tensor:
    valuation = Valuation(tuple(theta), rig, seed)
    return Tensor(zx_matrix(box, valuation), [wire_dim(o) for o in box.dom],
                  [wire_dim(o) for o in box.cod], rig)


def copy_matrix(dim: int, m: int, n: int, rig: ScalarRig = COMPLEX):
    return delta(dim, m, n, rig)


# Derivatives ----------------------------------------------------------------


def spider_derivative(spider: ZSpider, index: int) -> FormalSum:
    """``∂ Z(α) = (∂α / 2) · Z(α + π)``: the same spider, phase shifted by π."""
    coeff = phase_partial(spider.phase, index)
    if coeff == 0:
        return FormalSum.zero(spider.dom, spider.cod)
    shifted = ZSpider(spider.m, spider.n, spider.phase + math.pi)
    return FormalSum.coerce(shifted) * (coeff / 2)


def algebraic_derivative(box: Green, d_label) -> FormalSum:
    """
    ``∂ R_Z(a) = (∂a) · |1..1><1..1|``, drawn as ``(∂a)·(R_Z(1) - R_Z(0))``.

    A constant ``∂a`` becomes the coefficient; otherwise ``∂a`` is drawn as
    the scalar diagram ``R_Z^{0,0}(∂a) - R_Z^{0,0}(0)``.
    """
    try:
        d_label = Polynomial.coerce(d_label)
    except TypeError:
        raise RigError(f"label derivative {d_label!r} is not in a differential rig") from None
    projector = (FormalSum.coerce(Green(box.m, box.n, Polynomial.const(1)))
                 - FormalSum.coerce(Green(box.m, box.n, Polynomial())))
    constant = d_label.constant_value
    if constant is not None:
        return projector * constant
    label = (FormalSum.coerce(Green(0, 0, d_label))
             - FormalSum.coerce(Green(0, 0, Polynomial())))
    return label @ projector


def green_rule(box: Green, index: int) -> FormalSum:
    return algebraic_derivative(box, box.label.partial(index))
