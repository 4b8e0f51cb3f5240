"""
Differentiation of diagram sums, and the two oracles it is checked against.

:func:`diagram_derivative` extends per-box rules to whole sums with the
product rule: each term contributes one new term per layer, with that
layer's box replaced by its derivative.  :func:`dual_eval` evaluates over dual
numbers and :func:`finite_difference` takes central differences; both serve
as independent references in :func:`gradcheck`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from diagdiff.cqmap import CQMap, ShiftRule, SPIDER_SHIFT, shift_rule_derivative
from diagdiff.diagrams import (
    Box, Bubble, Diagram, FormalSum, Matrix, Spider, Swap, Tangent, Ty, ZSpider,
    bubble_wrap, get_colour, wire_dim)
from diagdiff.errors import MissingRuleError, ParameterIndexError, ParseError, TypeCheckError
from diagdiff.interpret import interpret
from diagdiff.rigs import DUAL_COMPLEX, PhaseExpr, phase_partial
from diagdiff.tensors import Tensor, matrix_exp
from diagdiff.zx import green_rule, spider_derivative

Rule = Callable[[Box, int, "GradientRuleSet"], FormalSum]


def _zero_rule(box: Box, index: int, rules: GradientRuleSet) -> FormalSum:
    return FormalSum.zero(box.dom, box.cod)


def _spider_rule(box: ZSpider, index: int, rules: GradientRuleSet) -> FormalSum:
    return spider_derivative(box, index)


def _green_rule(box, index: int, rules: GradientRuleSet) -> FormalSum:
    return green_rule(box, index)


def _matrix_rule(box: Matrix, index: int, rules: GradientRuleSet) -> FormalSum:
    partials = tuple(PhaseExpr(phase_partial(e, index)) for e in box.entries)
    if all(p.constant == 0 for p in partials):
        return FormalSum.zero(box.dom, box.cod)
    return FormalSum.coerce(Matrix(f"d{index}({box.label})", box.source, box.target, partials))


def _doubled_rule(box, index: int, rules: GradientRuleSet) -> FormalSum:
    return shift_rule_derivative(box, index, rules.shift)


def _bubble_rule(box: Bubble, index: int, rules: GradientRuleSet) -> FormalSum:
    return bubble_derivative(box, index, rules)


_DEFAULTS: dict[str, Rule] = {
    "zspider": _spider_rule,
    "green": _green_rule,
    "matrix": _matrix_rule,
    "doubled": _doubled_rule,
    "bubble": _bubble_rule,
    "h": _zero_rule,
    "swap": _zero_rule,
    "scalar": _zero_rule,
    "spider": _zero_rule,
    "measure": _zero_rule,
    "encode": _zero_rule,
}


@dataclass(frozen=True)
class GradientRuleSet:
    """Gradient rules by box kind, plus the shift rule used for doubled boxes."""

    rules: Mapping[str, Rule] = field(default_factory=lambda: MappingProxyType(dict(_DEFAULTS)))
    shift: ShiftRule = SPIDER_SHIFT

    def rule(self, box: Box) -> Rule:
        try:
            return self.rules[box.kind]
        except KeyError:
            raise MissingRuleError(f"no gradient rule for box kind {box.kind!r}") from None

    def derivative(self, box: Box, index: int) -> FormalSum:
        if index not in box.params():
            # still demand a rule so that uncovered kinds are reported
            self.rule(box)
            return FormalSum.zero(box.dom, box.cod)
        return self.rule(box)(box, index, self)

    @classmethod
    def from_json(cls, data: Mapping) -> GradientRuleSet:
        """
        Override the defaults, e.g. ``{"doubled": {"r": 1.0}}`` or
        ``{"zspider": "zero"}``; ``"none"`` removes a rule.
        """
        if not isinstance(data, Mapping):
            raise ParseError("a rule file must be a JSON object")
        rules, shift = dict(_DEFAULTS), SPIDER_SHIFT
        for kind, spec in data.items():
            if kind not in _DEFAULTS and kind != "tangent":
                raise ParseError(f"unknown box kind {kind!r} in rule file")
            if spec == "zero":
                rules[kind] = _zero_rule
            elif spec == "none":
                rules.pop(kind, None)
            elif spec == "default":
                continue
            elif kind == "doubled" and isinstance(spec, Mapping) and "r" in spec:
                shift = ShiftRule(float(spec["r"]), spec.get("s"))
            else:
                raise ParseError(f"cannot read rule {spec!r} for {kind!r}")
        return cls(MappingProxyType(rules), shift)


DEFAULT_RULES = GradientRuleSet()


def diagram_derivative(s, index: int, rules: GradientRuleSet = DEFAULT_RULES) -> FormalSum:
    """The product rule: one term per layer, with that layer's box differentiated."""
    s = FormalSum.coerce(s)
    terms = []
    for coeff, d in s.terms:
        for k, (_, box) in enumerate(d.layers):
            for c, replacement in rules.derivative(box, index):
                terms.append((coeff * c, d.replace_layer(k, replacement)))
    return FormalSum(s.dom, s.cod, tuple(terms))


# The chain rule ---------------------------------------------------------------


def _copy(obj: str, m: int, n: int) -> Diagram:
    if obj == "x":
        return Diagram.from_box(ZSpider(m, n))
    return Diagram.from_box(Spider(m, n, obj))


def permutation(wires: Sequence[str], order: Sequence[int]) -> Diagram:
    """
    A swap network sending wire ``order[k]`` to position ``k``, built from
    adjacent swaps.
    """
    if sorted(order) != list(range(len(wires))):
        raise ValueError(f"{order} is not a permutation of {len(wires)} wires")
    rank = {w: k for k, w in enumerate(order)}
    position = list(range(len(wires)))
    labels = list(wires)
    out = Diagram.id(Ty(*labels))
    changed = True
    while changed:
        changed = False
        for k in range(len(position) - 1):
            if rank[position[k]] > rank[position[k + 1]]:
                swap = Diagram.from_box(Swap(labels[k], labels[k + 1]))
                out = out >> (Diagram.id(Ty(*labels[:k])) @ swap @ Diagram.id(Ty(*labels[k + 2:])))
                position[k], position[k + 1] = position[k + 1], position[k]
                labels[k], labels[k + 1] = labels[k + 1], labels[k]
                changed = True
    return out


def _interleaved(ty: Ty) -> tuple[Ty, list[int]]:
    """``a1 a1 a2 a2 ...`` and the order taking it to ``a1 a2 ... a1 a2 ...``."""
    n = len(ty)
    doubled = Ty(*[o for o in ty for _ in range(2)])
    return doubled, [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]


def _spread(ty: Ty, m: int, n: int) -> Diagram:
    out = Diagram.id(Ty())
    for obj in ty:
        out = out @ _copy(obj, m, n)
    return out


def hadamard_product_diagram(f, g) -> FormalSum:
    """
    Entrywise product of parallel sums, drawn with spiders: copy every input
    wire, run ``f`` and ``g`` side by side, merge every output wire.  On the
    unit type there are no spiders and the result is ``f ⊗ g``.
    """
    f, g = FormalSum.coerce(f), FormalSum.coerce(g)
    if (f.dom, f.cod) != (g.dom, g.cod):
        raise TypeCheckError(f"hadamard product of non-parallel {f.dom} -> {f.cod} "
                             f"and {g.dom} -> {g.cod}")
    dom2, dom_order = _interleaved(f.dom)
    _, cod_order = _interleaved(f.cod)
    copy = _spread(f.dom, 1, 2) >> permutation(dom2, dom_order)
    inverse = [0] * len(cod_order)
    for k, w in enumerate(cod_order):
        inverse[w] = k
    merge = permutation(f.cod @ f.cod, inverse) >> _spread(f.cod, 2, 1)
    return copy >> (f @ g) >> merge


def bubble_derivative(box: Bubble, index: int, rules: GradientRuleSet = DEFAULT_RULES) -> FormalSum:
    """
    The chain rule.  Pointwise colours give ``(∂β)(d) ⊙ ∂d`` with the spider
    product; matrix-level colours give a tangent box carrying ``d`` and ``∂d``.
    """
    colour = get_colour(box.colour)
    d_inner = diagram_derivative(box.inner, index, rules)
    if d_inner.is_zero:
        return FormalSum.zero(box.dom, box.cod)
    if colour.pointwise:
        if colour.derivative is None:
            raise MissingRuleError(f"colour {colour.name!r} has no registered derivative")
        return hadamard_product_diagram(bubble_wrap(colour.derivative, box.inner), d_inner)
    if colour.jvp is None:
        raise MissingRuleError(f"colour {colour.name!r} has no tangent map")
    return FormalSum.coerce(Tangent(colour.name, box.inner, d_inner, box.dom, box.cod))


# Oracles ------------------------------------------------------------------------


def _with_data(t: Tensor, data) -> Tensor:
    if isinstance(t, CQMap):
        return CQMap(data, t.dom, t.cod)
    return Tensor(data, t.dom_dims, t.cod_dims)


def _check_index(index: int, theta: Sequence[float]) -> None:
    if not 0 <= index < len(theta):
        raise ParameterIndexError(f"parameter {index} is outside θ of length {len(theta)}")


def dual_eval(s, index: int, theta: Sequence[float]) -> tuple[Tensor, Tensor]:
    """Forward mode: seed ``θ_index + ε`` and split the result into (value, tangent)."""
    _check_index(index, theta)
    t = interpret(s, theta, DUAL_COMPLEX, index)
    return _with_data(t, t.data.re), _with_data(t, t.data.eps)


def finite_difference(s, index: int, theta: Sequence[float], h: float = 1e-5) -> Tensor:
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    _check_index(index, theta)
    plus, minus = list(theta), list(theta)
    plus[index] += h
    minus[index] -= h
    return (interpret(s, plus) - interpret(s, minus)).scale(1 / (2 * h))


def gradient(s, index: int, theta: Sequence[float],
             rules: GradientRuleSet = DEFAULT_RULES) -> Tensor:
    """The diagrammatic gradient, interpreted at ``theta``."""
    return interpret(diagram_derivative(s, index, rules), theta)


def _max_diff(a: Tensor, b: Tensor) -> float:
    return float(np.max(np.abs(np.asarray(a.data) - np.asarray(b.data)), initial=0.0))


DEFAULT_GRID = (-2.0, -0.7, 0.3, 1.1, 2.4)


@dataclass
class GradcheckReport:
    tol: float
    tol_exact: float
    h: float
    points: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p["pass"] for p in self.points)

    @property
    def max_deviation(self) -> dict[str, float]:
        keys = ("diagram_vs_dual", "diagram_vs_fd", "dual_vs_fd")
        return {k: max((p[k] for p in self.points), default=0.0) for k in keys}

    def to_json(self) -> dict:
        return {"pass": self.passed, "tol": self.tol, "tol_exact": self.tol_exact, "h": self.h,
                "max_deviation": self.max_deviation, "points": self.points}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def gradcheck(s, theta: Sequence[float] | None = None, grid: Iterable[float] | None = DEFAULT_GRID,
              params: Iterable[int] | None = None, rules: GradientRuleSet = DEFAULT_RULES,
              h: float = 1e-5, tol: float = 1e-6, tol_exact: float = 1e-10) -> GradcheckReport:
    """
    Compare the three gradients for every parameter at every grid point.

    Each grid value replaces ``θ_i`` in the base point ``theta`` (zeros by
    default) while the other parameters stay put.  ``grid=None`` checks the
    base point alone.
    """
    s = FormalSum.coerce(s)
    params = sorted(s.params() if params is None else params)
    size = max(params, default=-1) + 1
    base = list(theta) if theta is not None else [0.0] * size
    if len(base) < size:
        raise ParameterIndexError(f"θ has {len(base)} values but parameter {size - 1} is used")
    report = GradcheckReport(tol, tol_exact, h)
    for i in params:
        derivative = diagram_derivative(s, i, rules)
        for value in ((base[i],) if grid is None else tuple(grid)):
            point = list(base)
            point[i] = value
            diagram = interpret(derivative, point)
            dual = dual_eval(s, i, point)[1]
            fd = finite_difference(s, i, point, h)
            entry = {"param": i, "theta": point,
                     "diagram_vs_dual": _max_diff(diagram, dual),
                     "diagram_vs_fd": _max_diff(diagram, fd),
                     "dual_vs_fd": _max_diff(dual, fd)}
            entry["pass"] = (entry["diagram_vs_dual"] <= tol_exact
                             and entry["diagram_vs_fd"] <= tol and entry["dual_vs_fd"] <= tol)
            report.points.append(entry)
    return report


# Neural-network layers -----------------------------------------------------------


def dense(label: str, source: Ty, target: Ty, first: int) -> tuple[Diagram, int]:
    """A matrix box whose entries are fresh parameters ``θ_first, θ_first+1, ...``."""
    size = math.prod(_dims(source)) * math.prod(_dims(target))
    entries = tuple(PhaseExpr.param(first + k) for k in range(size))
    return Diagram.from_box(Matrix(label, source, target, entries)), first + size


def _dims(ty: Ty) -> list[int]:
    return [wire_dim(o) for o in ty]


def nn_layer(x, W, b, colour="sigmoid") -> Diagram:
    """``σ(x ⨾ W + b)`` as a bubble."""
    x, W, b = FormalSum.coerce(x), FormalSum.coerce(W), FormalSum.coerce(b)
    if x.cod != W.dom:
        raise TypeCheckError(f"input {x.cod} does not feed weights {W.dom}")
    return bubble_wrap(colour, (x >> W) + b)


# Stone's theorem ---------------------------------------------------------------------


@dataclass
class StoneReport:
    generator: Tensor
    times: tuple[float, ...]
    identity_error: float
    hermitian_error: float
    group_errors: list[float]
    tol: float

    @property
    def passed(self) -> bool:
        return (self.identity_error <= self.tol and self.hermitian_error <= self.tol
                and max(self.group_errors, default=0.0) <= self.tol)

    def to_json(self) -> dict:
        return {"pass": self.passed, "tol": self.tol, "times": list(self.times),
                "identity_error": self.identity_error, "hermitian_error": self.hermitian_error,
                "group_errors": self.group_errors, "generator": self.generator.to_json()}


STONE_TIMES = tuple(np.linspace(-2.0, 2.0, 9))


def stone_generator(s, index: int = 0, rules: GradientRuleSet = DEFAULT_RULES) -> Tensor:
    """``Ĥ = -i·(∂U)(0)`` from the diagrammatic gradient."""
    s = FormalSum.coerce(s)
    theta = [0.0] * (max(s.params() | {index}) + 1)
    return gradient(s, index, theta, rules).scale(-1j)


def stone_check(s, index: int = 0, times: Sequence[float] = STONE_TIMES, tol: float = 1e-10,
                rules: GradientRuleSet = DEFAULT_RULES) -> StoneReport:
    """Check that ``U(t) = exp(itĤ)`` on a time grid, ``U(0) = id`` and ``Ĥ = Ĥ†``."""
    s = FormalSum.coerce(s)
    extra = s.params() - {index}
    if extra:
        raise ParameterIndexError(f"a one-parameter diagram is needed; also uses {sorted(extra)}")
    h = stone_generator(s, index, rules)
    if h.shape[0] != h.shape[1]:
        raise TypeCheckError(f"{s.dom} -> {s.cod} is not an endomorphism")

    def at(t: float) -> Tensor:
        return interpret(s, [0.0] * index + [t])

    identity = Tensor.id(h.dom_dims)
    errors = [_max_diff(at(t), matrix_exp(h, t)) for t in times]
    hermitian = float(np.max(np.abs(h.array - h.array.conj().T), initial=0.0))
    return StoneReport(h, tuple(float(t) for t in times), _max_diff(at(0.0), identity),
                       hermitian, errors, tol)
