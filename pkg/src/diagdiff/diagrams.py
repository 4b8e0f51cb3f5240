"""
String diagrams with sums and bubbles.

A :class:`Diagram` is a domain, a codomain and a list of layers, each layer
being one box placed at an offset on the current list of wires.  A
:class:`FormalSum` is a list of parallel diagrams with complex coefficients.
Bubbles are boxes that carry a whole formal sum inside them, so the nesting
is arbitrary.

Wire names:

* ``x``: a qubit wire in a pure ZX diagram,
* ``q`` and ``c``: qubit and bit wires in a classical-quantum circuit,
* ``r<k>``: a classical vector wire of dimension ``k`` (e.g. ``r3``).

Composition is ``>>`` and tensor is ``@``, as in DisCoPy.

>>> from diagdiff.zx import Z, H
>>> d = Z(1, 1, 0.5) >> H()
>>> d.dom, d.cod, len(d)
(Ty('x'), Ty('x'), 2)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, ClassVar, Iterable, Iterator, NamedTuple, Union

import numpy as np

from diagdiff.errors import ColourError, ParseError, TypeCheckError
from diagdiff.rigs import PhaseExpr, Polynomial, fmt_complex


_WIRE = re.compile(r"^(x|q|c|r[1-9][0-9]*)$")


@dataclass(frozen=True)
class Ty:
    """A list of generating objects; the empty list is the monoidal unit."""

    objects: tuple[str, ...] = ()

    def __init__(self, *objects: str):
        for obj in objects:
            if not isinstance(obj, str) or not _WIRE.match(obj):
                raise TypeCheckError(f"unknown wire type {obj!r}")
        object.__setattr__(self, "objects", tuple(objects))

    def __matmul__(self, other: Ty) -> Ty:
        return Ty(*self.objects, *other.objects)

    def __pow__(self, n: int) -> Ty:
        return Ty(*(self.objects * n))

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self) -> Iterator[str]:
        return iter(self.objects)

    def __getitem__(self, key) -> Ty:
        if isinstance(key, slice):
            return Ty(*self.objects[key])
        return Ty(self.objects[key])

    def __repr__(self) -> str:
        return f"Ty({', '.join(map(repr, self.objects))})"


def wire_dim(obj: str) -> int:
    """Dimension of a wire in the pure (non-doubled) interpretation."""
    if obj in ("x", "q", "c"):
        return 2
    return int(obj[1:])


# Boxes ----------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Base class of the generators; subclasses fix ``kind``, dom and cod."""

    kind: ClassVar[str] = "box"

    @property
    def dom(self) -> Ty:
        raise NotImplementedError

    @property
    def cod(self) -> Ty:
        raise NotImplementedError

    @property
    def name(self) -> str:
        return self.kind

    @property
    def depth(self) -> int:
        return 0

    def params(self) -> set[int]:
        return set()


@dataclass(frozen=True)
class ZSpider(Box):
    """Green spider ``Z^{m,n}(α)`` with an affine phase."""

    m: int
    n: int
    phase: PhaseExpr = PhaseExpr()
    kind: ClassVar[str] = "zspider"

    def __post_init__(self):
        object.__setattr__(self, "phase", PhaseExpr.coerce(self.phase))
        if self.m < 0 or self.n < 0:
            raise TypeCheckError("spider legs must be non-negative")

    dom = property(lambda self: Ty(*["x"] * self.m))
    cod = property(lambda self: Ty(*["x"] * self.n))
    name = property(lambda self: f"Z({self.phase!r})")

    def params(self):
        return set(self.phase.params)


@dataclass(frozen=True)
class Hadamard(Box):
    kind: ClassVar[str] = "h"
    dom = property(lambda self: Ty("x"))
    cod = property(lambda self: Ty("x"))
    name = property(lambda self: "H")


@dataclass(frozen=True)
class Swap(Box):
    left: str = "x"
    right: str = "x"
    kind: ClassVar[str] = "swap"

    def __post_init__(self):
        Ty(self.left, self.right)

    dom = property(lambda self: Ty(self.left, self.right))
    cod = property(lambda self: Ty(self.right, self.left))


@dataclass(frozen=True)
class Green(Box):
    """Algebraic green box ``R_Z^{m,n}(a)`` labelled by a polynomial in θ."""

    m: int
    n: int
    label: Polynomial = Polynomial()
    kind: ClassVar[str] = "green"

    def __post_init__(self):
        object.__setattr__(self, "label", Polynomial.coerce(self.label))

    dom = property(lambda self: Ty(*["x"] * self.m))
    cod = property(lambda self: Ty(*["x"] * self.n))
    name = property(lambda self: f"R_Z({self.label!r})")

    def params(self):
        return {i for mono, _ in self.label.terms for i, _ in mono}


@dataclass(frozen=True)
class Scalar(Box):
    value: complex = 1
    kind: ClassVar[str] = "scalar"

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    dom = property(lambda self: Ty())
    cod = property(lambda self: Ty())
    name = property(lambda self: fmt_complex(self.value))


@dataclass(frozen=True)
class Spider(Box):
    """Copy/merge spider on any wire: the tensor with all indices equal."""

    m: int
    n: int
    obj: str = "c"
    kind: ClassVar[str] = "spider"

    def __post_init__(self):
        Ty(self.obj)

    dom = property(lambda self: Ty(*[self.obj] * self.m))
    cod = property(lambda self: Ty(*[self.obj] * self.n))


@dataclass(frozen=True)
class Measure(Box):
    kind: ClassVar[str] = "measure"
    dom = property(lambda self: Ty("q"))
    cod = property(lambda self: Ty("c"))


@dataclass(frozen=True)
class Encode(Box):
    kind: ClassVar[str] = "encode"
    dom = property(lambda self: Ty("c"))
    cod = property(lambda self: Ty("q"))


@dataclass(frozen=True)
class Doubled(Box):
    """A pure box embedded into cq circuits as ``conj(f) ⊗ f``."""

    inner: Box
    kind: ClassVar[str] = "doubled"

    def __post_init__(self):
        if not (set(self.inner.dom) | set(self.inner.cod)) <= {"x"}:
            raise TypeCheckError(f"only pure qubit boxes can be doubled, got {self.inner!r}")

    dom = property(lambda self: Ty(*["q"] * len(self.inner.dom)))
    cod = property(lambda self: Ty(*["q"] * len(self.inner.cod)))
    name = property(lambda self: f"double({self.inner.name})")

    def params(self):
        return self.inner.params()


@dataclass(frozen=True)
class Matrix(Box):
    """A named box with an explicit matrix of affine entries (cod-major)."""

    label: str
    source: Ty
    target: Ty
    entries: tuple[PhaseExpr, ...]
    kind: ClassVar[str] = "matrix"

    def __post_init__(self):
        entries = tuple(PhaseExpr.coerce(e) for e in np.ravel(np.asarray(self.entries, dtype=object)))
        size = _size(self.source) * _size(self.target)
        if len(entries) != size:
            raise TypeCheckError(f"matrix {self.label} needs {size} entries, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    dom = property(lambda self: self.source)
    cod = property(lambda self: self.target)
    name = property(lambda self: self.label)

    def params(self):
        return {i for e in self.entries for i in e.params}


@dataclass(frozen=True)
class Bubble(Box):
    """A coloured bubble around a formal sum, taken as a single box."""

    colour: str
    inner: FormalSum
    source: Ty
    target: Ty
    kind: ClassVar[str] = "bubble"

    dom = property(lambda self: self.source)
    cod = property(lambda self: self.target)
    name = property(lambda self: f"{self.colour}(...)")

    @property
    def depth(self):
        return self.inner.depth + 1

    def params(self):
        return self.inner.params()


@dataclass(frozen=True)
class Tangent(Box):
    """
    Forward derivative of a matrix-level bubble: interprets as the colour's
    Jacobian-vector product at ``primal`` applied to ``tangent``.
    """

    colour: str
    primal: FormalSum
    tangent: FormalSum
    source: Ty
    target: Ty
    kind: ClassVar[str] = "tangent"

    dom = property(lambda self: self.source)
    cod = property(lambda self: self.target)
    name = property(lambda self: f"d{self.colour}(...)")

    @property
    def depth(self):
        return max(self.primal.depth, self.tangent.depth) + 1

    def params(self):
        return self.primal.params() | self.tangent.params()


def _size(ty: Ty) -> int:
    out = 1
    for obj in ty:
        out *= wire_dim(obj)
    return out


# Diagrams -------------------------------------------------------------------


class Layer(NamedTuple):
    offset: int
    box: Box


@dataclass(frozen=True, eq=True)
class Diagram:
    """A layered string diagram: one box per layer, placed at an offset."""

    dom: Ty
    cod: Ty
    layers: tuple[Layer, ...] = ()

    def __post_init__(self):
        layers = tuple(Layer(int(o), b) for o, b in self.layers)
        object.__setattr__(self, "layers", layers)
        wires = self.dom.objects
        for k, (offset, box) in enumerate(layers):
            width = len(box.dom)
            if offset < 0 or offset + width > len(wires):
                raise TypeCheckError(
                    f"layer {k}: box {box.name} with {width} inputs at offset {offset} "
                    f"does not fit on {len(wires)} wires")
            if wires[offset:offset + width] != box.dom.objects:
                raise TypeCheckError(
                    f"layer {k}: box {box.name} expects {box.dom} "
                    f"but wires {offset}..{offset + width} carry {Ty(*wires[offset:offset + width])}")
            wires = wires[:offset] + box.cod.objects + wires[offset + width:]
        if wires != self.cod.objects:
            raise TypeCheckError(f"diagram ends on {Ty(*wires)}, declared codomain {self.cod}")

    @cached_property
    def _hash(self) -> int:
        return hash((self.dom, self.cod, self.layers))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def id(cls, ty: Ty = Ty()) -> Diagram:
        return cls(ty, ty, ())

    @classmethod
    def from_box(cls, box: Box) -> Diagram:
        return cls(box.dom, box.cod, (Layer(0, box),))

    def then(self, other: Diagram) -> Diagram:
        if isinstance(other, FormalSum):
            return FormalSum.coerce(self).then(other)
        if self.cod != other.dom:
            raise TypeCheckError(f"cannot compose: codomain {self.cod} != domain {other.dom}")
        return Diagram(self.dom, other.cod, self.layers + other.layers)

    def tensor(self, other: Diagram) -> Diagram:
        if isinstance(other, FormalSum):
            return FormalSum.coerce(self).tensor(other)
        shift = len(self.cod)
        layers = self.layers + tuple(Layer(o + shift, b) for o, b in other.layers)
        return Diagram(self.dom @ other.dom, self.cod @ other.cod, layers)

    __rshift__ = then
    __matmul__ = tensor

    def __add__(self, other) -> FormalSum:
        return FormalSum.coerce(self) + other

    def __rmul__(self, coeff: complex) -> FormalSum:
        return FormalSum.coerce(self) * coeff

    def __neg__(self) -> FormalSum:
        return FormalSum.coerce(self) * -1

    def __sub__(self, other) -> FormalSum:
        return FormalSum.coerce(self) - other

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self) -> Iterator[Layer]:
        return iter(self.layers)

    @property
    def boxes(self) -> list[Box]:
        return [b for _, b in self.layers]

    @property
    def depth(self) -> int:
        return max((b.depth for b in self.boxes), default=0)

    def params(self) -> set[int]:
        return set().union(*(b.params() for b in self.boxes))

    def wire_types(self) -> set[str]:
        """Every wire type appearing at this level (not inside bubbles)."""
        out = set(self.dom) | set(self.cod)
        for box in self.boxes:
            out |= set(box.dom) | set(box.cod)
        return out

    def replace_layer(self, k: int, replacement: Diagram) -> Diagram:
        """Substitute the box of layer ``k`` by a parallel diagram."""
        offset, box = self.layers[k]
        if (replacement.dom, replacement.cod) != (box.dom, box.cod):
            raise TypeCheckError(f"replacement for {box.name} is not parallel to it")
        inner = tuple(Layer(o + offset, b) for o, b in replacement.layers)
        return Diagram(self.dom, self.cod, self.layers[:k] + inner + self.layers[k + 1:])

    def to_json(self) -> dict:
        return diagram_to_json(self)

    def __repr__(self) -> str:
        body = " >> ".join(f"{b.name}@{o}" for o, b in self.layers) or "id"
        return f"Diagram({self.dom} -> {self.cod}: {body})"


def Id(ty: Ty = Ty()) -> Diagram:
    return Diagram.id(ty)


# Formal sums ----------------------------------------------------------------


@dataclass(frozen=True)
class FormalSum:
    """A complex linear combination of parallel diagrams.

    Structurally equal terms are merged by adding their coefficients, and
    terms with a zero coefficient are dropped, so the empty sum is zero.
    """

    dom: Ty
    cod: Ty
    terms: tuple[tuple[complex, Diagram], ...] = ()

    def __post_init__(self):
        merged: dict[Diagram, complex] = {}
        for coeff, term in self.terms:
            if (term.dom, term.cod) != (self.dom, self.cod):
                raise TypeCheckError(
                    f"non-parallel term {term.dom} -> {term.cod} in sum {self.dom} -> {self.cod}")
            merged[term] = merged.get(term, 0j) + complex(coeff)
        object.__setattr__(self, "terms",
                           tuple((c, d) for d, c in merged.items() if c != 0))

    @cached_property
    def _hash(self) -> int:
        return hash((self.dom, self.cod, self.terms))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def coerce(cls, value: Union[Diagram, FormalSum, Box]) -> FormalSum:
        if isinstance(value, FormalSum):
            return value
        if isinstance(value, Box):
            value = Diagram.from_box(value)
        if isinstance(value, Diagram):
            return cls(value.dom, value.cod, ((1, value),))
        raise TypeError(f"expected a diagram or formal sum, got {type(value).__name__}")

    @classmethod
    def zero(cls, dom: Ty, cod: Ty) -> FormalSum:
        return cls(dom, cod, ())

    def then(self, other) -> FormalSum:
        return compose(self, other)

    def tensor(self, other) -> FormalSum:
        return tensor(self, other)

    __rshift__ = then
    __matmul__ = tensor

    def __rrshift__(self, other) -> FormalSum:
        return compose(other, self)

    def __rmatmul__(self, other) -> FormalSum:
        return tensor(other, self)

    def __add__(self, other) -> FormalSum:
        return sum_add(self, other)

    __radd__ = __add__

    def __mul__(self, coeff: complex) -> FormalSum:
        return sum_scale(coeff, self)

    __rmul__ = __mul__

    def __neg__(self) -> FormalSum:
        return sum_scale(-1, self)

    def __sub__(self, other) -> FormalSum:
        return sum_add(self, sum_scale(-1, FormalSum.coerce(other)))

    def __iter__(self) -> Iterator[tuple[complex, Diagram]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def depth(self) -> int:
        return max((d.depth for _, d in self.terms), default=0)

    def params(self) -> set[int]:
        return set().union(*(d.params() for _, d in self.terms))

    def wire_types(self) -> set[str]:
        return set(self.dom) | set(self.cod) | set().union(*(d.wire_types() for _, d in self.terms))

    def to_json(self) -> dict:
        return sum_to_json(self)

    def __repr__(self) -> str:
        if not self.terms:
            return f"FormalSum.zero({self.dom}, {self.cod})"
        return " + ".join(f"{fmt_complex(c)}·{d!r}" for c, d in self.terms)


def compose(f, g) -> FormalSum:
    """Bilinear composition of sums: every pair of terms, coefficients multiplied."""
    f, g = FormalSum.coerce(f), FormalSum.coerce(g)
    if f.cod != g.dom:
        raise TypeCheckError(f"cannot compose: codomain {f.cod} != domain {g.dom}")
    return FormalSum(f.dom, g.cod, tuple(
        (a * b, d1.then(d2)) for a, d1 in f.terms for b, d2 in g.terms))


def tensor(f, g) -> FormalSum:
    f, g = FormalSum.coerce(f), FormalSum.coerce(g)
    return FormalSum(f.dom @ g.dom, f.cod @ g.cod, tuple(
        (a * b, d1.tensor(d2)) for a, d1 in f.terms for b, d2 in g.terms))


def sum_add(f, g) -> FormalSum:
    f, g = FormalSum.coerce(f), FormalSum.coerce(g)
    if (f.dom, f.cod) != (g.dom, g.cod):
        raise TypeCheckError(f"cannot add {f.dom} -> {f.cod} and {g.dom} -> {g.cod}")
    return FormalSum(f.dom, f.cod, f.terms + g.terms)


def sum_scale(coeff: complex, f) -> FormalSum:
    f = FormalSum.coerce(f)
    return FormalSum(f.dom, f.cod, tuple((coeff * c, d) for c, d in f.terms))


# Bubble colours -------------------------------------------------------------


def _same(ty: Ty) -> Ty:
    return ty


@dataclass(frozen=True)
class BubbleColour:
    """
    A non-linear operator drawn as a bubble.

    Pointwise colours act entrywise through ``func`` with derivative
    ``dfunc``; ``derivative`` names the registered colour that draws ``∂β``
    in the chain rule.  Matrix-level colours instead act on the whole
    interpreted matrix and supply a Jacobian-vector product ``jvp(x, dx)``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    dfunc: Callable[[np.ndarray], np.ndarray] | None = None
    derivative: str | None = None
    pointwise: bool = True
    jvp: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    dom_map: Callable[[Ty], Ty] = field(default=_same)
    cod_map: Callable[[Ty], Ty] = field(default=_same)

    @property
    def differentiable(self) -> bool:
        if self.pointwise:
            return self.derivative is not None
        return self.jvp is not None


COLOURS: dict[str, BubbleColour] = {}


def register_colour(colour: BubbleColour) -> BubbleColour:
    existing = COLOURS.get(colour.name)
    if existing is not None and existing is not colour:
        raise ColourError(f"colour {colour.name!r} is already registered")
    COLOURS[colour.name] = colour
    return colour


def register_pointwise(name: str, *derivatives: Callable[[np.ndarray], np.ndarray]) -> BubbleColour:
    """Register ``name`` and its derivative colours ``name'``, ``name''``, ...

    ``derivatives`` lists f, f', f'', ...; the last one gets no derivative colour.
    """
    names = [name + "'" * k for k in range(len(derivatives) - 1)]
    for k, colour_name in enumerate(names):
        register_colour(BubbleColour(
            colour_name, derivatives[k], dfunc=derivatives[k + 1],
            derivative=names[k + 1] if k + 1 < len(names) else None))
    return COLOURS[name]


def get_colour(name: Union[str, BubbleColour]) -> BubbleColour:
    if isinstance(name, BubbleColour):
        return name
    try:
        return COLOURS[name]
    except KeyError:
        raise ColourError(f"unregistered bubble colour {name!r}") from None


def bubble_wrap(colour: Union[str, BubbleColour], inner) -> Diagram:
    """Put a formal sum inside a coloured bubble and take it as one box."""
    colour = get_colour(colour)
    inner = FormalSum.coerce(inner)
    box = Bubble(colour.name, inner, colour.dom_map(inner.dom), colour.cod_map(inner.cod))
    return Diagram.from_box(box)


# JSON -----------------------------------------------------------------------


def _complex_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _read_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ParseError(f"expected a complex number [re, im], got {value!r}")


def box_to_json(box: Box) -> dict:
    match box:
        case ZSpider(m, n, phase):
            return {"kind": "zspider", "m": m, "n": n, "phase": phase.to_json()}
        case Hadamard():
            return {"kind": "h"}
        case Swap(left, right):
            return {"kind": "swap", "dom": [left, right]}
        case Green(m, n, label):
            return {"kind": "green", "m": m, "n": n, "label": label.to_json()}
        case Scalar(value):
            return {"kind": "scalar", "value": _complex_json(value)}
        case Spider(m, n, obj):
            return {"kind": "spider", "m": m, "n": n, "obj": obj}
        case Measure():
            return {"kind": "measure"}
        case Encode():
            return {"kind": "encode"}
        case Doubled(inner):
            return {"kind": "doubled", "inner": box_to_json(inner)}
        case Matrix(label, source, target, entries):
            return {"kind": "matrix", "name": label, "dom": list(source), "cod": list(target),
                    "entries": [e.to_json() for e in entries]}
        case Bubble(colour, inner, source, target):
            return {"kind": "bubble", "colour": colour, "dom": list(source),
                    "cod": list(target), "inner": sum_to_json(inner)}
        case Tangent(colour, primal, tangent_, source, target):
            return {"kind": "tangent", "colour": colour, "dom": list(source),
                    "cod": list(target), "primal": sum_to_json(primal),
                    "tangent": sum_to_json(tangent_)}
    raise TypeError(f"cannot serialise {box!r}")


def box_from_json(data: dict) -> Box:
    try:
        kind = data["kind"]
        match kind:
            case "zspider":
                return ZSpider(int(data["m"]), int(data["n"]), PhaseExpr.from_json(data.get("phase", 0.0)))
            case "h":
                return Hadamard()
            case "swap":
                return Swap(*data.get("dom", ["x", "x"]))
            case "green":
                return Green(int(data["m"]), int(data["n"]), Polynomial.from_json(data["label"]))
            case "scalar":
                return Scalar(_read_complex(data["value"]))
            case "spider":
                return Spider(int(data["m"]), int(data["n"]), data.get("obj", "c"))
            case "measure":
                return Measure()
            case "encode":
                return Encode()
            case "doubled":
                return Doubled(box_from_json(data["inner"]))
            case "matrix":
                return Matrix(data.get("name", "M"), Ty(*data["dom"]), Ty(*data["cod"]),
                              tuple(PhaseExpr.from_json(e) for e in data["entries"]))
            case "bubble":
                inner = sum_from_json(data["inner"])
                colour = get_colour(data["colour"])
                dom = Ty(*data["dom"]) if "dom" in data else colour.dom_map(inner.dom)
                cod = Ty(*data["cod"]) if "cod" in data else colour.cod_map(inner.cod)
                return Bubble(colour.name, inner, dom, cod)
            case "tangent":
                return Tangent(data["colour"], sum_from_json(data["primal"]),
                               sum_from_json(data["tangent"]), Ty(*data["dom"]), Ty(*data["cod"]))
    except (KeyError, TypeError, ValueError, AttributeError) as err:
        raise ParseError(f"malformed box {data!r}: {err}") from err
    raise ParseError(f"unknown box kind {kind!r}")


def diagram_to_json(d: Diagram) -> dict:
    return {"dom": list(d.dom), "cod": list(d.cod),
            "layers": [{"offset": o, "box": box_to_json(b)} for o, b in d.layers]}


def diagram_from_json(data: dict) -> Diagram:
    try:
        layers = tuple(Layer(int(layer["offset"]), box_from_json(layer["box"]))
                       for layer in data["layers"])
        return Diagram(Ty(*data["dom"]), Ty(*data["cod"]), layers)
    except (KeyError, TypeError) as err:
        raise ParseError(f"malformed diagram: {err}") from err


def sum_to_json(s: FormalSum) -> dict:
    return {"dom": list(s.dom), "cod": list(s.cod),
            "terms": [{"coeff": _complex_json(c), "diagram": diagram_to_json(d)}
                      for c, d in s.terms]}


def sum_from_json(data: dict) -> FormalSum:
    try:
        terms = tuple((_read_complex(t["coeff"]), diagram_from_json(t["diagram"]))
                      for t in data["terms"])
        if "dom" in data:
            dom, cod = Ty(*data["dom"]), Ty(*data["cod"])
        elif terms:
            dom, cod = terms[0][1].dom, terms[0][1].cod
        else:
            raise ParseError("an empty sum needs explicit dom and cod")
        return FormalSum(dom, cod, terms)
    except (KeyError, TypeError) as err:
        raise ParseError(f"malformed formal sum: {err}") from err


def load_json(data: dict) -> FormalSum:
    """Read either a diagram or a formal sum."""
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    if "terms" in data:
        return sum_from_json(data)
    if "layers" in data:
        return FormalSum.coerce(diagram_from_json(data))
    raise ParseError("expected a diagram (with 'layers') or a sum (with 'terms')")


def iter_boxes(s: FormalSum) -> Iterable[Box]:
    """Every box in the sum, descending into bubbles."""
    for _, d in s.terms:
        for box in d.boxes:
            yield box
            if isinstance(box, Bubble):
                yield from iter_boxes(box.inner)
            elif isinstance(box, Tangent):
                yield from iter_boxes(box.primal)
                yield from iter_boxes(box.tangent)
