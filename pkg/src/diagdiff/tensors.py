"""
Dense tensors over a rig: the category of matrices with Kronecker product.

A :class:`Tensor` from ``dom_dims`` to ``cod_dims`` stores its entries as a
2-d rig array of shape ``(prod(cod_dims), prod(dom_dims))``, i.e. row-major
with the codomain index major and the domain index minor.  Composition
``f >> g`` is the matrix product ``g @ f``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from diagdiff.errors import ParseError, RigError, TypeCheckError
from diagdiff.rigs import ABS_TOL, COMPLEX, ScalarRig


class Tensor:
    """A matrix over ``rig`` with lists of dimensions as domain and codomain."""

    def __init__(self, data, dom_dims: Sequence[int] = (), cod_dims: Sequence[int] = (),
                 rig: ScalarRig = COMPLEX):
        self.dom_dims = tuple(int(d) for d in dom_dims)
        self.cod_dims = tuple(int(d) for d in cod_dims)
        if any(d < 1 for d in self.dom_dims + self.cod_dims):
            raise TypeCheckError(f"dimensions must be positive: {self.dom_dims} -> {self.cod_dims}")
        self.rig = rig
        shape = (math.prod(self.cod_dims), math.prod(self.dom_dims))
        if isinstance(data, np.ndarray) and rig is COMPLEX:
            data = np.asarray(data, dtype=complex)
            if data.size != shape[0] * shape[1]:
                raise TypeCheckError(f"{data.size} entries cannot fill a {shape} tensor")
            data = data.reshape(shape)
        elif isinstance(data, (list, tuple)) and not hasattr(data, "re"):
            data = rig.from_entries(list(np.ravel(np.asarray(data, dtype=object))), shape)
        if rig.shape(data) != shape:
            raise TypeCheckError(f"data of shape {rig.shape(data)} does not match {shape}")
        self.data = data

    @classmethod
    def id(cls, dims: Sequence[int] = (), rig: ScalarRig = COMPLEX) -> Tensor:
        return cls(rig.identity(math.prod(dims)), dims, dims, rig)

    @classmethod
    def zeros(cls, dom_dims, cod_dims, rig: ScalarRig = COMPLEX) -> Tensor:
        return cls(rig.zeros((math.prod(cod_dims), math.prod(dom_dims))), dom_dims, cod_dims, rig)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rig.shape(self.data)

    @property
    def array(self) -> np.ndarray:
        """The entries as a complex numpy matrix (complex rig only)."""
        if self.rig is not COMPLEX:
            raise RigError(f"{self.rig.name} tensors have no complex array view")
        return self.data

    def _like(self, data, dom_dims=None, cod_dims=None) -> Tensor:
        """A tensor over the same rig; subclasses keep their extra bookkeeping."""
        return Tensor(data, self.dom_dims if dom_dims is None else dom_dims,
                      self.cod_dims if cod_dims is None else cod_dims, self.rig)

    def _check_rig(self, other: Tensor):
        if self.rig is not other.rig:
            raise RigError(f"tensors over different rigs: {self.rig.name}, {other.rig.name}")

    def then(self, other: Tensor) -> Tensor:
        return mat_compose(self, other)

    def tensor(self, other: Tensor) -> Tensor:
        return kron(self, other)

    __rshift__ = then
    __matmul__ = tensor

    def __add__(self, other: Tensor) -> Tensor:
        return entrywise(self, other, "add")

    def __mul__(self, other: Tensor) -> Tensor:
        return entrywise(self, other, "mul")

    def scale(self, c) -> Tensor:
        return self._like(self.rig.scale(c, self.data))

    def __rmul__(self, c) -> Tensor:
        return self.scale(c)

    def __sub__(self, other: Tensor) -> Tensor:
        return self + other.scale(-1)

    def entry(self, row: int, col: int = 0):
        return self.rig.entry(self.data, row, col)

    def allclose(self, other: Tensor, tol: float = ABS_TOL) -> bool:
        return (self.dom_dims, self.cod_dims) == (other.dom_dims, other.cod_dims) \
            and self.rig.allclose(self.data, other.data, tol)

    def max_abs_diff(self, other: Tensor) -> float:
        return float(np.max(np.abs(self.array - other.array), initial=0.0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.allclose(other, 0.0)

    __hash__ = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.dom_dims} -> {self.cod_dims}, rig={self.rig.name})"

    def to_json(self) -> dict:
        return tensor_to_json(self)


def mat_compose(f: Tensor, g: Tensor) -> Tensor:
    """``f >> g``: first ``f``, then ``g``."""
    f._check_rig(g)
    if f.cod_dims != g.dom_dims:
        raise TypeCheckError(f"cannot compose {f.cod_dims} with {g.dom_dims}")
    return f._like(f.rig.matmul(g.data, f.data), f.dom_dims, g.cod_dims)


def kron(f: Tensor, g: Tensor) -> Tensor:
    f._check_rig(g)
    return Tensor(f.rig.kron(f.data, g.data), f.dom_dims + g.dom_dims,
                  f.cod_dims + g.cod_dims, f.rig)


def entrywise(f: Tensor, g: Tensor, op: str = "mul") -> Tensor:
    f._check_rig(g)
    if (f.dom_dims, f.cod_dims) != (g.dom_dims, g.cod_dims):
        raise TypeCheckError(
            f"entrywise {op} of {f.dom_dims}->{f.cod_dims} and {g.dom_dims}->{g.cod_dims}")
    if op == "add":
        return f._like(f.rig.add_arrays(f.data, g.data))
    if op == "mul":
        return f._like(f.rig.mul_arrays(f.data, g.data))
    raise ValueError(f"unknown entrywise operation {op!r}")


def conj(f: Tensor) -> Tensor:
    """Entrywise conjugate; the shape and index order are unchanged."""
    if not f.rig.has_conj:
        raise RigError(f"rig {f.rig.name} has no conjugation")
    return f._like(f.rig.conj_array(f.data))


def dagger(f: Tensor) -> Tensor:
    if not f.rig.has_conj:
        raise RigError(f"rig {f.rig.name} has no conjugation")
    return Tensor(f.rig.transpose(f.rig.conj_array(f.data)), f.cod_dims, f.dom_dims, f.rig)


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise TypeCheckError(f"matrix exponential of a non-square {a.shape} matrix")
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    scaled = a / 2 ** squarings
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 40):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, 1) <= 1e-17 * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def matrix_exp(h: Tensor, t: float) -> Tensor:
    """``exp(i·t·H)`` for a square complex tensor ``H``."""
    if h.shape[0] != h.shape[1]:
        raise TypeCheckError(f"matrix exponential of non-square tensor {h!r}")
    return Tensor(expm(1j * t * h.array), h.dom_dims, h.cod_dims)


def tensor_to_json(f: Tensor) -> dict:
    data = np.asarray(f.array).ravel()
    return {"dom_dims": list(f.dom_dims), "cod_dims": list(f.cod_dims),
            "data": [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in data]}


def tensor_from_json(data: dict) -> Tensor:
    try:
        values = np.array([complex(re, im) for re, im in data["data"]], dtype=complex)
        return Tensor(values, data["dom_dims"], data["cod_dims"])
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"malformed tensor: {err}") from err
