"""
Classical-quantum maps and the parameter-shift rule.

A cq-map ``(a, b) -> (c, d)`` is an ``a·b² -> c·d²`` matrix.  Each side is
indexed as ``(classical, bar, plain)``: the classical index first, then the
index of the conjugate copy, then the index of the plain copy, which is the
layout that ``double(f) = conj(f) ⊗ f`` produces.  :func:`cq_tensor` regroups
the indices of a Kronecker product to keep this layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from diagdiff.diagrams import Diagram, Doubled, FormalSum, Layer, Ty, ZSpider
from diagdiff.errors import MissingRuleError, RigError, ShiftRuleError, TypeCheckError
from diagdiff.rigs import COMPLEX, ScalarRig, phase_partial
from diagdiff.tensors import Tensor, conj


class CQDim(NamedTuple):
    classical: int = 1
    quantum: int = 1

    def __mul__(self, other: CQDim) -> CQDim:
        return CQDim(self.classical * other.classical, self.quantum * other.quantum)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.classical, self.quantum, self.quantum)

    @property
    def size(self) -> int:
        return self.classical * self.quantum ** 2


def cq_dim_of(obj: str) -> CQDim:
    if obj == "q":
        return CQDim(1, 2)
    if obj == "c":
        return CQDim(2, 1)
    if obj.startswith("r"):
        return CQDim(int(obj[1:]), 1)
    raise TypeCheckError(f"wire {obj!r} has no classical-quantum interpretation; double pure boxes")


def cq_dim_of_type(ty) -> CQDim:
    out = CQDim()
    for obj in ty:
        out = out * cq_dim_of(obj)
    return out


class CQMap(Tensor):
    """A tensor between ``(classical, quantum)`` dimension pairs."""

    def __init__(self, data, dom: CQDim = CQDim(), cod: CQDim = CQDim(), rig: ScalarRig = COMPLEX):
        self.dom, self.cod = CQDim(*dom), CQDim(*cod)
        super().__init__(data, self.dom.dims, self.cod.dims, rig)

    @classmethod
    def id(cls, dim: CQDim = CQDim(), rig: ScalarRig = COMPLEX) -> CQMap:
        dim = CQDim(*dim)
        return cls(rig.identity(dim.size), dim, dim, rig)

    def _like(self, data, dom_dims=None, cod_dims=None):
        if dom_dims in (None, self.dom_dims) and cod_dims in (None, self.cod_dims):
            return CQMap(data, self.dom, self.cod, self.rig)
        return super()._like(data, dom_dims, cod_dims)

    def then(self, other: CQMap) -> CQMap:
        return cq_compose(self, other)

    def tensor(self, other: CQMap) -> CQMap:
        return cq_tensor(self, other)

    __rshift__ = then
    __matmul__ = tensor

    def __repr__(self) -> str:
        return f"CQMap({tuple(self.dom)} -> {tuple(self.cod)}, rig={self.rig.name})"


def _as_cq(f: Tensor) -> CQMap:
    if isinstance(f, CQMap):
        return f
    return CQMap(f.data, CQDim(math.prod(f.dom_dims), 1), CQDim(math.prod(f.cod_dims), 1), f.rig)


def cq_compose(f: CQMap, g: CQMap) -> CQMap:
    f, g = _as_cq(f), _as_cq(g)
    if f.cod != g.dom:
        raise TypeCheckError(f"cannot compose cq-maps: {tuple(f.cod)} != {tuple(g.dom)}")
    if f.rig is not g.rig:
        raise RigError("cq-maps over different rigs")
    return CQMap(f.rig.matmul(g.data, f.data), f.dom, g.cod, f.rig)


_REGROUP = (0, 3, 1, 4, 2, 5)


def cq_tensor(f: CQMap, g: CQMap) -> CQMap:
    """Kronecker product, then regroup both sides to (classical, bar, plain)."""
    f, g = _as_cq(f), _as_cq(g)
    if f.rig is not g.rig:
        raise RigError("cq-maps over different rigs")
    rig = f.rig
    data = rig.kron(f.data, g.data)
    data = rig.permute(data, f.cod.dims + g.cod.dims, _REGROUP,
                       f.dom.dims + g.dom.dims, _REGROUP)
    return CQMap(data, f.dom * g.dom, f.cod * g.cod, rig)


def double(f: Tensor) -> CQMap:
    """Embed a pure map as ``conj(f) ⊗ f``."""
    dom, cod = math.prod(f.dom_dims), math.prod(f.cod_dims)
    data = f.rig.kron(conj(f).data, f.data)
    return CQMap(data, CQDim(1, dom), CQDim(1, cod), f.rig)


def measure(a: int = 2, rig: ScalarRig = COMPLEX) -> CQMap:
    """``M_a = Σ_i |i><i,i|`` from ``(1, a)`` to ``(a, 1)``."""
    if a < 1:
        raise TypeCheckError("measurement needs a positive dimension")
    entries = [rig.zero] * (a * a * a)
    for i in range(a):
        entries[i * a * a + i * a + i] = rig.one
    return CQMap(rig.from_entries(entries, (a, a * a)), CQDim(1, a), CQDim(a, 1), rig)


def encode(a: int = 2, rig: ScalarRig = COMPLEX) -> CQMap:
    """``E_a = Σ_i |i,i><i|`` from ``(a, 1)`` to ``(1, a)``."""
    m = measure(a, rig)
    return CQMap(rig.transpose(m.data), CQDim(a, 1), CQDim(1, a), rig)


def cq_swap(left: CQDim, right: CQDim, rig: ScalarRig = COMPLEX) -> CQMap:
    """The symmetry ``left ⊗ right -> right ⊗ left`` in the regrouped layout."""
    left, right = CQDim(*left), CQDim(*right)
    size = (left * right).size
    grouped = left.dims + right.dims
    # reorder (cl, cr, bl, br, pl, pr) -> (cr, cl, br, bl, pr, pl)
    dims = (grouped[0], grouped[3], grouped[1], grouped[4], grouped[2], grouped[5])
    data = rig.permute(rig.identity(size), dims, (1, 0, 3, 2, 5, 4), (size,), (0,))
    return CQMap(data, left * right, right * left, rig)


def delta(dim: int, m: int, n: int, rig: ScalarRig = COMPLEX):
    """The rig array with entry 1 exactly where all ``m + n`` indices agree."""
    rows, cols = dim ** n, dim ** m
    entries = [rig.zero] * (rows * cols)
    row_step = sum(dim ** k for k in range(n))
    col_step = sum(dim ** k for k in range(m))
    for i in range(dim):
        k = i * row_step * cols + i * col_step
        entries[k] = rig.add(entries[k], rig.one)
    return rig.from_entries(entries, (rows, cols))


def cq_delta(dim: CQDim, m: int, n: int, rig: ScalarRig = COMPLEX) -> CQMap:
    """Copy/merge spider on a cq object: a delta on each index group."""
    dim = CQDim(*dim)
    data = rig.kron(rig.kron(delta(dim.classical, m, n, rig), delta(dim.quantum, m, n, rig)),
                    delta(dim.quantum, m, n, rig))
    dom = CQDim(dim.classical ** m, dim.quantum ** m)
    cod = CQDim(dim.classical ** n, dim.quantum ** n)
    return CQMap(data, dom, cod, rig)


def is_completely_positive(f: CQMap, tol: float = 1e-9) -> bool:
    """
    Flag whether a complex cq-map is completely positive: every block between
    classical basis states must have a positive semi-definite Choi matrix.
    """
    a, b = f.dom.classical, f.dom.quantum
    c, d = f.cod.classical, f.cod.quantum
    data = np.asarray(f.array).reshape(c, d, d, a, b, b)
    for i in range(c):
        for j in range(a):
            block = data[i, :, :, j, :, :]  # (bar_out, plain_out, bar_in, plain_in)
            choi = block.transpose(1, 3, 0, 2).reshape(d * b, d * b)
            if not np.allclose(choi, choi.conj().T, atol=tol):
                return False
            if np.linalg.eigvalsh((choi + choi.conj().T) / 2).min() < -tol:
                return False
    return True


@dataclass(frozen=True)
class ShiftRule:
    """Shift ``s = π/(4r)`` for a generator with eigenvalues ``±r``."""

    r: float = 0.5
    s: float | None = None

    def __post_init__(self):
        if not self.r > 0:
            raise ShiftRuleError(f"eigenvalue magnitude must be positive, got {self.r}")
        expected = math.pi / (4 * self.r)
        if self.s is None:
            object.__setattr__(self, "s", expected)
        elif abs(self.s - expected) > 1e-12:
            raise ShiftRuleError(f"shift {self.s} is inconsistent with r = {self.r}: "
                                 f"expected π/(4r) = {expected}")


SPIDER_SHIFT = ShiftRule(0.5)


def shift_rule_derivative(box: Doubled, index: int, rule: ShiftRule = SPIDER_SHIFT) -> FormalSum:
    """
    Gradient of a doubled one-parameter box as a difference of shifted copies.

    The output is scaled by the coefficient of θ_index in the phase, which
    covers affine phases such as ``2θ``.
    """
    spider = box.inner
    if not isinstance(spider, ZSpider):
        if not box.params():
            return FormalSum.zero(box.dom, box.cod)
        raise MissingRuleError(f"no parameter-shift rule for doubled {spider.name}")
    coeff = phase_partial(spider.phase, index)
    if coeff == 0:
        return FormalSum.zero(box.dom, box.cod)
    plus = Doubled(ZSpider(spider.m, spider.n, spider.phase + rule.s))
    minus = Doubled(ZSpider(spider.m, spider.n, spider.phase - rule.s))
    return FormalSum.coerce(plus) * (coeff * rule.r) + FormalSum.coerce(minus) * (-coeff * rule.r)


def double_diagram(d: Diagram) -> Diagram:
    """Double every box of a pure diagram, turning ``x`` wires into ``q`` wires."""
    def q(ty: Ty) -> Ty:
        return Ty(*["q"] * len(ty))
    return Diagram(q(d.dom), q(d.cod), tuple(Layer(o, Doubled(b)) for o, b in d.layers))
