"""
The interpretation functor from formal sums of diagrams to tensors.

A sum is read in one of two modes.  Pure mode sends each wire to its
dimension and produces a :class:`Tensor`; cq mode is chosen as soon as a sum
mentions quantum wires ``q`` or cq boxes, and produces a :class:`CQMap`.
Classical wires have quantum dimension 1, so a box on classical wires has the
same matrix in both modes.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from diagdiff.cqmap import (
    CQMap, cq_delta, cq_dim_of, cq_dim_of_type, cq_swap, delta, double, encode, measure)
from diagdiff.diagrams import (
    Bubble, Diagram, Doubled, Encode, FormalSum, Green, Hadamard, Matrix, Measure, Scalar,
    Spider, Swap, Tangent, Ty, ZSpider, get_colour, iter_boxes, wire_dim)
from diagdiff.errors import InterpretationError, ParameterIndexError
from diagdiff.rigs import COMPLEX, DualArray, DualRig, ScalarRig, Valuation
from diagdiff.tensors import Tensor
from diagdiff.zx import swap_matrix, zx_matrix

_CQ_KINDS = {"doubled", "measure", "encode"}


def is_cq(s: FormalSum) -> bool:
    """Whether a sum needs classical-quantum semantics (top level only)."""
    s = FormalSum.coerce(s)
    if "q" in s.wire_types():
        return True
    return any(b.kind in _CQ_KINDS for _, d in s.terms for b in d.boxes)


def dims_of(ty: Ty) -> list[int]:
    return [wire_dim(o) for o in ty]


def interpret(s, theta: Sequence[float] = (), rig: ScalarRig = COMPLEX,
              seed: int | None = None) -> Tensor:
    """
    Evaluate a diagram or formal sum at the parameter point ``theta``.

    Over a dual rig, ``seed`` names the parameter carrying the ε tangent.
    """
    return _interpret(FormalSum.coerce(s), Valuation(tuple(theta), rig, seed))


def _interpret(s: FormalSum, val: Valuation) -> Tensor:
    cq = is_cq(s)
    out = _zero(s.dom, s.cod, val.rig, cq)
    for coeff, term in s.terms:
        value = _diagram(term, val, cq)
        if coeff != 1:
            value = value.scale(coeff)
        out = out + value
    return out


def _zero(dom: Ty, cod: Ty, rig: ScalarRig, cq: bool) -> Tensor:
    if cq:
        d, c = cq_dim_of_type(dom), cq_dim_of_type(cod)
        return CQMap(rig.zeros((c.size, d.size)), d, c, rig)
    return Tensor.zeros(dims_of(dom), dims_of(cod), rig)


def _identity(ty: Ty, rig: ScalarRig, cq: bool) -> Tensor:
    if cq:
        return CQMap.id(cq_dim_of_type(ty), rig)
    return Tensor.id(dims_of(ty), rig)


def _diagram(d: Diagram, val: Valuation, cq: bool) -> Tensor:
    rig = val.rig
    state = _identity(d.dom, rig, cq)
    wires = d.dom
    for offset, box in d.layers:
        width = len(box.dom)
        left, right = wires[:offset], wires[offset + width:]
        layer = _identity(left, rig, cq) @ _box(box, val, cq) @ _identity(right, rig, cq)
        state = state >> layer
        wires = left @ box.cod @ right
    return state


def _box(box, val: Valuation, cq: bool) -> Tensor:
    if cq:
        return _cq_box(box, val)
    return _pure_box(box, val)


def _pure_box(box, val: Valuation) -> Tensor:
    rig = val.rig
    dom, cod = dims_of(box.dom), dims_of(box.cod)
    match box:
        case ZSpider() | Hadamard() | Green() | Scalar():
            data = zx_matrix(box, val)
        case Swap(left, right):
            data = swap_matrix(wire_dim(left), wire_dim(right), rig)
        case Spider(m, n, obj):
            data = delta(wire_dim(obj), m, n, rig)
        case Matrix(_, _, _, entries):
            data = rig.from_entries([val.scalar(e) for e in entries],
                                    (math.prod(cod), math.prod(dom)))
        case Bubble() | Tangent():
            data = _bubble_data(box, val)
        case Doubled() | Measure() | Encode():
            raise InterpretationError(f"{box.name} needs classical-quantum wires")
        case _:
            raise InterpretationError(f"no interpretation for box {box.name}")
    return Tensor(data, dom, cod, rig)


def _cq_box(box, val: Valuation) -> Tensor:
    rig = val.rig
    match box:
        case Doubled(inner):
            pure = _pure_box(inner, val)
            return double(pure)
        case Measure():
            return measure(2, rig)
        case Encode():
            return encode(2, rig)
        case Scalar():
            # a scalar in a cq circuit is a plain weight, not a doubled one
            return CQMap(rig.from_entries([rig.embed(box.value)], (1, 1)), rig=rig)
        case Swap(left, right):
            return cq_swap(cq_dim_of(left), cq_dim_of(right), rig)
        case Spider(m, n, obj):
            return cq_delta(cq_dim_of(obj), m, n, rig)
    if any(cq_dim_of(o).quantum != 1 for o in box.dom @ box.cod):
        raise InterpretationError(f"{box.name} has no classical-quantum interpretation")
    pure = _pure_box(box, val)
    return CQMap(pure.data, cq_dim_of_type(box.dom), cq_dim_of_type(box.cod), rig)


# Bubbles --------------------------------------------------------------------


def _bubble_data(box, val: Valuation):
    rig = val.rig
    colour = get_colour(box.colour)
    shape = (math.prod(dims_of(box.cod)), math.prod(dims_of(box.dom)))
    if isinstance(box, Tangent):
        if rig is not COMPLEX:
            raise InterpretationError("tangent boxes are only interpreted over the complex rig")
        primal = _interpret(box.primal, val).data
        tangent = _interpret(box.tangent, val).data
        return np.asarray(colour.jvp(primal, tangent), dtype=complex).reshape(shape)
    inner = _interpret(box.inner, val).data
    if isinstance(rig, DualRig):
        if rig.base is not COMPLEX:
            raise InterpretationError(f"bubbles over {rig.name} are not supported")
        if colour.pointwise:
            if colour.dfunc is None:
                raise InterpretationError(f"colour {colour.name} has no derivative to lift")
            re = colour.func(inner.re)
            eps = colour.dfunc(inner.re) * inner.eps
        else:
            if colour.jvp is None:
                raise InterpretationError(f"colour {colour.name} has no tangent map to lift")
            re = colour.func(inner.re)
            eps = colour.jvp(inner.re, inner.eps)
        return DualArray(np.asarray(re, dtype=complex).reshape(shape),
                         np.asarray(eps, dtype=complex).reshape(shape))
    if rig is COMPLEX:
        return np.asarray(colour.func(inner), dtype=complex).reshape(shape)
    if not colour.pointwise:
        raise InterpretationError(f"matrix-level colour {colour.name} needs the complex rig")
    return rig.reshape(rig.map_array(colour.func, inner), shape)


def check_params(s, theta: Sequence[float]) -> None:
    """Raise if ``theta`` does not cover every parameter of ``s``, bubbles included."""
    s = FormalSum.coerce(s)
    needed = set()
    for box in iter_boxes(s):
        needed |= box.params()
    missing = sorted(i for i in needed if i >= len(theta))
    if missing:
        raise ParameterIndexError(f"no value for parameters {missing}; got {len(theta)} values")
