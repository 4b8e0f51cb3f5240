"""
Commutative rigs, dual numbers and the parameter expressions used as phases.

A rig carries two layers of operations: scalar arithmetic (``add``, ``mul``,
``conj``) and the array-level operations that :class:`diagdiff.tensors.Tensor`
delegates to (``matmul``, ``kron``, ...).  The base class implements the array
layer on numpy object arrays with explicit loops, so any rig whose scalars
support the scalar layer can back a tensor.  The complex, dual and Boolean
rigs override it with vectorised numpy code.

Truth tables index their rows little-endian: row ``r`` assigns
``x_i = (r >> i) & 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from diagdiff.errors import ParameterIndexError, RigError, RigMismatchError

ABS_TOL = 1e-9


class ScalarRig:
    """A commutative rig together with its array operations."""

    name = "rig"
    has_neg = False
    has_conj = False

    @property
    def zero(self):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise RigError(f"rig {self.name} has no additive inverses")

    def conj(self, a):
        raise RigError(f"rig {self.name} has no conjugation")

    def embed(self, value):
        """Map a Python number into the rig."""
        raise RigError(f"cannot embed {value!r} into rig {self.name}")

    def lift(self, f: Callable, df: Callable, x):
        """Apply a smooth function; dual rigs also push the tangent through."""
        return f(x)

    def close(self, a, b, tol: float = ABS_TOL) -> bool:
        return a == b

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"

    # Array layer.  Arrays are 2-d numpy object arrays in the generic case.

    def from_entries(self, entries: Sequence, shape: tuple[int, int]):
        arr = np.empty(shape, dtype=object)
        arr.ravel()[:] = list(entries)
        return arr

    def zeros(self, shape: tuple[int, int]):
        return self.from_entries([self.zero] * (shape[0] * shape[1]), shape)

    def identity(self, n: int):
        arr = self.zeros((n, n))
        for i in range(n):
            arr[i, i] = self.one
        return arr

    def shape(self, arr) -> tuple[int, int]:
        return arr.shape

    def entry(self, arr, row: int, col: int):
        return arr[row, col]

    def matmul(self, a, b):
        n, k = a.shape
        k2, m = b.shape
        if k != k2:
            raise RigError(f"cannot multiply {a.shape} by {b.shape}")
        out = self.zeros((n, m))
        for i in range(n):
            for j in range(m):
                acc = self.zero
                for t in range(k):
                    acc = self.add(acc, self.mul(a[i, t], b[t, j]))
                out[i, j] = acc
        return out

    def kron(self, a, b):
        (n1, m1), (n2, m2) = a.shape, b.shape
        out = self.zeros((n1 * n2, m1 * m2))
        for i, j, k, l in itertools.product(range(n1), range(m1), range(n2), range(m2)):
            out[i * n2 + k, j * m2 + l] = self.mul(a[i, j], b[k, l])
        return out

    def add_arrays(self, a, b):
        return self._zip(self.add, a, b)

    def mul_arrays(self, a, b):
        return self._zip(self.mul, a, b)

    def scale(self, c, a):
        c = self.embed(c)
        return self._map(lambda x: self.mul(c, x), a)

    def conj_array(self, a):
        return self._map(self.conj, a)

    def transpose(self, a):
        return a.T.copy()

    def permute(self, a, row_dims, row_axes, col_dims, col_axes):
        """Reorder the row and column multi-indices of a 2-d array."""
        return _permute(a, row_dims, row_axes, col_dims, col_axes)

    def reshape(self, a, shape: tuple[int, int]):
        return a.reshape(shape)

    def map_array(self, f: Callable, a):
        return self._map(f, a)

    def allclose(self, a, b, tol: float = ABS_TOL) -> bool:
        if self.shape(a) != self.shape(b):
            return False
        return all(self.close(x, y, tol) for x, y in zip(a.ravel(), b.ravel()))

    def _zip(self, op, a, b):
        if a.shape != b.shape:
            raise RigError(f"shape mismatch {a.shape} vs {b.shape}")
        out = np.empty(a.shape, dtype=object)
        for idx in np.ndindex(a.shape):
            out[idx] = op(a[idx], b[idx])
        return out

    def _map(self, f, a):
        out = np.empty(a.shape, dtype=object)
        for idx in np.ndindex(a.shape):
            out[idx] = f(a[idx])
        return out


def _permute(a, row_dims, row_axes, col_dims, col_axes):
    row_dims, col_dims = tuple(row_dims), tuple(col_dims)
    nrow = len(row_dims)
    full = a.reshape(row_dims + col_dims)
    axes = tuple(row_axes) + tuple(nrow + ax for ax in col_axes)
    rows = math.prod(row_dims[ax] for ax in row_axes)
    return full.transpose(axes).reshape(rows, -1).copy()


class ComplexRig(ScalarRig):
    name = "complex"
    has_neg = True
    has_conj = True

    zero = 0j
    one = 1 + 0j

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def conj(self, a):
        return complex(a).conjugate()

    def embed(self, value):
        return complex(value)

    def close(self, a, b, tol: float = ABS_TOL) -> bool:
        return abs(a - b) <= tol

    def from_entries(self, entries, shape):
        return np.asarray(list(entries), dtype=complex).reshape(shape)

    def zeros(self, shape):
        return np.zeros(shape, dtype=complex)

    def identity(self, n):
        return np.eye(n, dtype=complex)

    def matmul(self, a, b):
        return a @ b

    def kron(self, a, b):
        return np.kron(a, b)

    def add_arrays(self, a, b):
        if a.shape != b.shape:
            raise RigError(f"shape mismatch {a.shape} vs {b.shape}")
        return a + b

    def mul_arrays(self, a, b):
        if a.shape != b.shape:
            raise RigError(f"shape mismatch {a.shape} vs {b.shape}")
        return a * b

    def scale(self, c, a):
        return complex(c) * a

    def conj_array(self, a):
        return a.conj()

    def map_array(self, f, a):
        return np.asarray(f(a), dtype=complex)

    def allclose(self, a, b, tol=ABS_TOL):
        return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))


class _BitRig(ScalarRig):
    """Shared array layer for the two-element rigs; scalars are Python bools."""

    zero = False
    one = True

    def mul(self, a, b):
        return bool(a) and bool(b)

    def embed(self, value):
        if value in (0, 1):
            return bool(value)
        raise RigError(f"cannot embed {value!r} into rig {self.name}")

    def from_entries(self, entries, shape):
        return np.asarray([bool(e) for e in entries], dtype=bool).reshape(shape)

    def zeros(self, shape):
        return np.zeros(shape, dtype=bool)

    def identity(self, n):
        return np.eye(n, dtype=bool)

    def kron(self, a, b):
        return np.kron(a, b).astype(bool)

    def mul_arrays(self, a, b):
        return a & b

    def map_array(self, f, a):
        return np.vectorize(lambda x: bool(f(x)), otypes=[bool])(a)

    def allclose(self, a, b, tol=ABS_TOL):
        return a.shape == b.shape and bool(np.all(a == b))


class F2Rig(_BitRig):
    """The field with two elements: XOR as sum, AND as product."""

    name = "F2"
    has_neg = True

    def add(self, a, b):
        return bool(a) != bool(b)

    def neg(self, a):
        return bool(a)

    def matmul(self, a, b):
        return (a.astype(np.int64) @ b.astype(np.int64)) % 2 == 1

    def add_arrays(self, a, b):
        return a ^ b


class BooleanRig(_BitRig):
    """Booleans with disjunction as sum: a rig that is not a ring."""

    name = "Boolean"

    def add(self, a, b):
        return bool(a) or bool(b)

    def matmul(self, a, b):
        return (a.astype(np.int64) @ b.astype(np.int64)) > 0

    def add_arrays(self, a, b):
        return a | b


COMPLEX = ComplexRig()
F2 = F2Rig()
BOOLEAN = BooleanRig()


# Dual numbers ---------------------------------------------------------------


@dataclass(frozen=True)
class DualNumber:
    """``re + eps·ε`` with ``ε² = 0`` over a base rig."""

    re: object
    eps: object
    rig: ScalarRig = field(default=COMPLEX, compare=False, repr=False)

    def __add__(self, other: DualNumber) -> DualNumber:
        return dual_add(self, other)

    def __mul__(self, other: DualNumber) -> DualNumber:
        return dual_mul(self, other)

    def __repr__(self) -> str:
        return f"{self.re} + {self.eps}ε"


def _check_same_rig(a: DualNumber, b: DualNumber) -> ScalarRig:
    if not isinstance(b, DualNumber) or a.rig is not b.rig:
        raise RigMismatchError(
            f"dual numbers over different rigs: {a.rig!r} and {getattr(b, 'rig', b)!r}")
    return a.rig


def dual_add(a: DualNumber, b: DualNumber) -> DualNumber:
    rig = _check_same_rig(a, b)
    return DualNumber(rig.add(a.re, b.re), rig.add(a.eps, b.eps), rig)


def dual_mul(a: DualNumber, b: DualNumber) -> DualNumber:
    rig = _check_same_rig(a, b)
    eps = rig.add(rig.mul(a.re, b.eps), rig.mul(a.eps, b.re))
    return DualNumber(rig.mul(a.re, b.re), eps, rig)


def lift_smooth(f: Callable, df: Callable, x: DualNumber) -> DualNumber:
    """Extend ``f`` with known derivative ``df`` to dual numbers."""
    return DualNumber(f(x.re), x.rig.mul(x.eps, df(x.re)), x.rig)


def pi0(x: DualNumber):
    return x.re


def pi1(x: DualNumber):
    return x.eps


class DualArray(NamedTuple):
    re: np.ndarray
    eps: np.ndarray


class DualRig(ScalarRig):
    """Dual numbers over ``base``; arrays are stored as ``(re, eps)`` pairs."""

    def __init__(self, base: ScalarRig = COMPLEX):
        self.base = base
        self.name = f"D[{base.name}]"
        self.has_neg = base.has_neg
        self.has_conj = base.has_conj

    @property
    def zero(self):
        return DualNumber(self.base.zero, self.base.zero, self.base)

    @property
    def one(self):
        return DualNumber(self.base.one, self.base.zero, self.base)

    def add(self, a, b):
        return dual_add(a, b)

    def mul(self, a, b):
        return dual_mul(a, b)

    def neg(self, a):
        return DualNumber(self.base.neg(a.re), self.base.neg(a.eps), self.base)

    def conj(self, a):
        return DualNumber(self.base.conj(a.re), self.base.conj(a.eps), self.base)

    def embed(self, value):
        if isinstance(value, DualNumber):
            return value
        return DualNumber(self.base.embed(value), self.base.zero, self.base)

    def lift(self, f, df, x):
        return lift_smooth(f, df, x)

    def close(self, a, b, tol=ABS_TOL):
        return self.base.close(a.re, b.re, tol) and self.base.close(a.eps, b.eps, tol)

    def from_entries(self, entries, shape):
        entries = [self.embed(e) for e in entries]
        return DualArray(self.base.from_entries([e.re for e in entries], shape),
                         self.base.from_entries([e.eps for e in entries], shape))

    def zeros(self, shape):
        return DualArray(self.base.zeros(shape), self.base.zeros(shape))

    def identity(self, n):
        return DualArray(self.base.identity(n), self.base.zeros((n, n)))

    def shape(self, arr):
        return self.base.shape(arr.re)

    def entry(self, arr, row, col):
        return DualNumber(self.base.entry(arr.re, row, col),
                          self.base.entry(arr.eps, row, col), self.base)

    def matmul(self, a, b):
        b_ = self.base
        return DualArray(b_.matmul(a.re, b.re),
                         b_.add_arrays(b_.matmul(a.re, b.eps), b_.matmul(a.eps, b.re)))

    def kron(self, a, b):
        b_ = self.base
        return DualArray(b_.kron(a.re, b.re),
                         b_.add_arrays(b_.kron(a.re, b.eps), b_.kron(a.eps, b.re)))

    def add_arrays(self, a, b):
        return DualArray(self.base.add_arrays(a.re, b.re), self.base.add_arrays(a.eps, b.eps))

    def mul_arrays(self, a, b):
        b_ = self.base
        return DualArray(b_.mul_arrays(a.re, b.re),
                         b_.add_arrays(b_.mul_arrays(a.re, b.eps), b_.mul_arrays(a.eps, b.re)))

    def scale(self, c, a):
        c = self.embed(c)
        b_ = self.base
        eps = b_.scale(c.re, a.eps)
        if c.eps != b_.zero:
            eps = b_.add_arrays(eps, b_.scale(c.eps, a.re))
        return DualArray(b_.scale(c.re, a.re), eps)

    def conj_array(self, a):
        return DualArray(self.base.conj_array(a.re), self.base.conj_array(a.eps))

    def transpose(self, a):
        return DualArray(self.base.transpose(a.re), self.base.transpose(a.eps))

    def permute(self, a, row_dims, row_axes, col_dims, col_axes):
        return DualArray(self.base.permute(a.re, row_dims, row_axes, col_dims, col_axes),
                         self.base.permute(a.eps, row_dims, row_axes, col_dims, col_axes))

    def reshape(self, a, shape):
        return DualArray(self.base.reshape(a.re, shape), self.base.reshape(a.eps, shape))

    def map_array(self, f, a):
        raise RigError("dual arrays need a tangent rule; use lift on entries")

    def allclose(self, a, b, tol=ABS_TOL):
        return self.base.allclose(a.re, b.re, tol) and self.base.allclose(a.eps, b.eps, tol)



DUAL_COMPLEX = DualRig(COMPLEX)


def fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    if z.real == 0:
        return f"{z.imag:g}i"
    return f"({z.real:g}{z.imag:+g}i)"


# Parameter expressions ------------------------------------------------------


@dataclass(frozen=True)
class PhaseExpr:
    """An affine expression ``constant + Σ coeff_i · θ_i`` in radians."""

    constant: float = 0.0
    coeffs: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if isinstance(self.coeffs, Mapping):
            object.__setattr__(self, "coeffs", tuple(self.coeffs.items()))
        merged: dict[int, float] = {}
        for index, coeff in self.coeffs:
            if int(index) != index or index < 0:
                raise ParameterIndexError(f"invalid parameter index {index!r}")
            merged[int(index)] = merged.get(int(index), 0.0) + float(coeff)
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "coeffs",
                           tuple(sorted((i, c) for i, c in merged.items() if c != 0.0)))

    @classmethod
    def param(cls, index: int, coeff: float = 1.0, constant: float = 0.0) -> PhaseExpr:
        return cls(constant, ((index, coeff),))

    @classmethod
    def coerce(cls, value) -> PhaseExpr:
        if isinstance(value, PhaseExpr):
            return value
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return cls(float(value))
        raise TypeError(f"phases must be affine expressions, got {value!r}")

    def __add__(self, other) -> PhaseExpr:
        other = PhaseExpr.coerce(other)
        return PhaseExpr(self.constant + other.constant, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self) -> PhaseExpr:
        return self * -1.0

    def __sub__(self, other) -> PhaseExpr:
        return self + (-PhaseExpr.coerce(other))

    def __mul__(self, scalar: float) -> PhaseExpr:
        if isinstance(scalar, PhaseExpr):
            raise TypeError("product of phases is not affine")
        return PhaseExpr(self.constant * scalar, tuple((i, c * scalar) for i, c in self.coeffs))

    __rmul__ = __mul__

    @property
    def params(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def __repr__(self) -> str:
        parts = [f"{c:g}·θ{i}" for i, c in self.coeffs]
        if self.constant or not parts:
            parts.insert(0, f"{self.constant:g}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"const": self.constant, "coeffs": {str(i): c for i, c in self.coeffs}}

    @classmethod
    def from_json(cls, data) -> PhaseExpr:
        if isinstance(data, (int, float)):
            return cls(float(data))
        coeffs = tuple((int(k), float(v)) for k, v in data.get("coeffs", {}).items())
        return cls(float(data.get("const", 0.0)), coeffs)


def phase_eval(expr: PhaseExpr, theta: Sequence[float]) -> float:
    total = expr.constant
    for index, coeff in expr.coeffs:
        if index >= len(theta):
            raise ParameterIndexError(
                f"phase {expr!r} uses θ{index} but only {len(theta)} values were given")
        total += coeff * theta[index]
    return total


def phase_partial(expr: PhaseExpr, index: int) -> float:
    return dict(expr.coeffs).get(index, 0.0)


# Polynomials: a differential rig with non-trivial derivations ---------------


Monomial = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Polynomial:
    """A polynomial in the parameters θ with complex coefficients."""

    terms: tuple[tuple[Monomial, complex], ...] = ()

    def __post_init__(self):
        merged: dict[Monomial, complex] = {}
        for mono, coeff in self.terms:
            powers: dict[int, int] = {}
            for i, p in mono:
                powers[int(i)] = powers.get(int(i), 0) + int(p)
            mono = tuple(sorted((i, p) for i, p in powers.items() if p))
            merged[mono] = merged.get(mono, 0j) + complex(coeff)
        object.__setattr__(self, "terms", tuple(sorted(
            (m, c) for m, c in merged.items() if c != 0)))

    @classmethod
    def const(cls, value: complex) -> Polynomial:
        return cls((((), value),))

    @classmethod
    def var(cls, index: int) -> Polynomial:
        return cls((((((index, 1),), 1),)))

    @classmethod
    def coerce(cls, value) -> Polynomial:
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, PhaseExpr):
            return cls(((((), value.constant),)
                        + tuple((((i, 1),), c) for i, c in value.coeffs)))
        if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
            return cls.const(value)
        raise TypeError(f"cannot read {value!r} as a polynomial")

    def __add__(self, other) -> Polynomial:
        return Polynomial(self.terms + Polynomial.coerce(other).terms)

    __radd__ = __add__

    def __mul__(self, other) -> Polynomial:
        other = Polynomial.coerce(other)
        terms = []
        for (m1, c1), (m2, c2) in itertools.product(self.terms, other.terms):
            powers = dict(m1)
            for i, p in m2:
                powers[i] = powers.get(i, 0) + p
            terms.append((tuple(powers.items()), c1 * c2))
        return Polynomial(tuple(terms))

    __rmul__ = __mul__

    def partial(self, index: int) -> Polynomial:
        terms = []
        for mono, coeff in self.terms:
            powers = dict(mono)
            p = powers.get(index, 0)
            if p:
                powers[index] = p - 1
                terms.append((tuple(powers.items()), coeff * p))
        return Polynomial(tuple(terms))

    def evaluate(self, theta: Sequence[float]) -> complex:
        total = 0j
        for mono, coeff in self.terms:
            value = coeff
            for i, p in mono:
                if i >= len(theta):
                    raise ParameterIndexError(
                        f"polynomial uses θ{i} but only {len(theta)} values were given")
                value *= theta[i] ** p
            total += value
        return total

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_value(self) -> complex | None:
        """The value if the polynomial is constant, else None."""
        if not self.terms:
            return 0j
        if len(self.terms) == 1 and self.terms[0][0] == ():
            return self.terms[0][1]
        return None

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for mono, c in self.terms:
            vars_ = "·".join(f"θ{i}" + (f"^{p}" if p > 1 else "") for i, p in mono)
            out.append(fmt_complex(c) + (f"·{vars_}" if vars_ else ""))
        return " + ".join(out)

    def to_json(self) -> dict:
        return {"poly": [{"powers": {str(i): p for i, p in mono},
                          "coeff": [c.real, c.imag]} for mono, c in self.terms]}

    @classmethod
    def from_json(cls, data) -> Polynomial:
        if isinstance(data, (int, float)):
            return cls.const(data)
        if isinstance(data, list):
            return cls.const(complex(data[0], data[1]))
        return cls(tuple((tuple((int(i), int(p)) for i, p in t["powers"].items()),
                          complex(*t["coeff"])) for t in data["poly"]))


class PolynomialRig(ScalarRig):
    """Polynomials in θ with the partial derivative in ``index`` as derivation."""

    has_neg = True

    def __init__(self, index: int = 0):
        self.index = index
        self.name = f"C[θ]/∂{index}"

    zero = Polynomial()
    one = Polynomial.const(1)

    def add(self, a, b):
        return Polynomial.coerce(a) + b

    def mul(self, a, b):
        return Polynomial.coerce(a) * b

    def neg(self, a):
        return Polynomial.coerce(a) * -1

    def embed(self, value):
        return Polynomial.coerce(value)

    def derivation(self, a) -> Polynomial:
        return Polynomial.coerce(a).partial(self.index)


# Truth tables and the discrete derivations -----------------------------------


@dataclass(frozen=True)
class TruthTableFn:
    """A function F2^n → F2^m (or B^n → B^m) as ``2^n`` rows of ``m`` bits."""

    arity: int
    coarity: int
    table: tuple[tuple[int, ...], ...]
    rig: str = "F2"

    def __post_init__(self):
        table = tuple(tuple(int(bool(b)) for b in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if self.rig not in ("F2", "B"):
            raise RigError(f"truth tables live in F2 or B, not {self.rig!r}")
        if len(table) != 2 ** self.arity:
            raise ValueError(f"expected {2 ** self.arity} rows, got {len(table)}")
        if any(len(row) != self.coarity for row in table):
            raise ValueError(f"every row needs {self.coarity} bits")

    @classmethod
    def from_function(cls, arity: int, f: Callable[[tuple[int, ...]], object],
                      coarity: int = 1, rig: str = "F2") -> TruthTableFn:
        rows = []
        for r in range(2 ** arity):
            value = f(tuple((r >> i) & 1 for i in range(arity)))
            rows.append(tuple(value) if coarity > 1 else (value,))
        return cls(arity, coarity, tuple(rows), rig)

    @classmethod
    def constant(cls, arity: int, bit: int, rig: str = "F2") -> TruthTableFn:
        return cls.from_function(arity, lambda x: bit, rig=rig)

    def __call__(self, *bits: int) -> tuple[int, ...]:
        return self.table[sum(int(b) << i for i, b in enumerate(bits))]

    def restrict(self, index: int, bit: int) -> TruthTableFn:
        """Substitute ``x_index := bit``; the result ignores ``x_index``."""
        self._check_index(index)
        rows = []
        for r in range(2 ** self.arity):
            rows.append(self.table[(r & ~(1 << index)) | (bit << index)])
        return TruthTableFn(self.arity, self.coarity, tuple(rows), self.rig)

    def negate_input(self, index: int) -> TruthTableFn:
        """Substitute ``x_index := ¬x_index``."""
        self._check_index(index)
        rows = tuple(self.table[r ^ (1 << index)] for r in range(2 ** self.arity))
        return TruthTableFn(self.arity, self.coarity, rows, self.rig)

    def depends_on(self, index: int) -> bool:
        self._check_index(index)
        bit = 1 << index
        return any(self.table[r] != self.table[r | bit] for r in range(2 ** self.arity) if not r & bit)

    def with_rig(self, rig: str) -> TruthTableFn:
        return TruthTableFn(self.arity, self.coarity, self.table, rig)

    def _zip(self, other: TruthTableFn, op) -> TruthTableFn:
        if (self.arity, self.coarity, self.rig) != (other.arity, other.coarity, other.rig):
            raise RigMismatchError("truth tables of different shape or rig")
        rows = tuple(tuple(op(a, b) for a, b in zip(r, s))
                     for r, s in zip(self.table, other.table))
        return TruthTableFn(self.arity, self.coarity, rows, self.rig)

    def __add__(self, other: TruthTableFn) -> TruthTableFn:
        if self.rig == "F2":
            return self._zip(other, lambda a, b: a ^ b)
        return self._zip(other, lambda a, b: a | b)

    def __mul__(self, other: TruthTableFn) -> TruthTableFn:
        return self._zip(other, lambda a, b: a & b)

    def __invert__(self) -> TruthTableFn:
        rows = tuple(tuple(1 - b for b in row) for row in self.table)
        return TruthTableFn(self.arity, self.coarity, rows, self.rig)

    def _check_index(self, index: int):
        if not 0 <= index < self.arity:
            raise ParameterIndexError(f"input x{index} out of range for arity {self.arity}")

    def to_json(self) -> dict:
        return {"arity": self.arity, "coarity": self.coarity, "rig": self.rig,
                "table": [list(row) for row in self.table]}


def f2_partial(f: TruthTableFn, index: int) -> TruthTableFn:
    """``(∂_i f)(x) = f(x[x_i := 0]) ⊕ f(x[x_i := 1])``."""
    if f.rig != "F2":
        raise RigMismatchError("f2_partial needs an F2 truth table")
    f._check_index(index)
    bit = 1 << index
    rows = tuple(tuple(a ^ b for a, b in zip(f.table[r & ~bit], f.table[r | bit]))
                 for r in range(2 ** f.arity))
    return TruthTableFn(f.arity, f.coarity, rows, "F2")


def bool_partial(phi: TruthTableFn, index: int) -> TruthTableFn:
    """``∂_i φ = ¬φ[x_i := 0] ∧ φ[x_i := 1]``."""
    if phi.rig != "B":
        raise RigMismatchError("bool_partial needs a Boolean truth table")
    return (~phi.restrict(index, 0)) * phi.restrict(index, 1)


def f2_partial_via_boolean(f: TruthTableFn, index: int) -> TruthTableFn:
    """
    ``∂_i f`` over F2 rebuilt from Boolean derivatives:
    ``∂_i φ ∨ ∂_i φ[x_i := ¬x_i]`` with ``φ`` the same table read in B.
    """
    phi = f.with_rig("B")
    return (bool_partial(phi, index) + bool_partial(phi.negate_input(index), index)).with_rig("F2")


# Propositional formulae, for the rule-by-rule Boolean derivative.


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


def evaluate_formula(phi, bits: Sequence[int]) -> bool:
    match phi:
        case Var(i):
            return bool(bits[i])
        case Const(v):
            return bool(v)
        case Not(a):
            return not evaluate_formula(a, bits)
        case And(a, b):
            return evaluate_formula(a, bits) and evaluate_formula(b, bits)
        case Or(a, b):
            return evaluate_formula(a, bits) or evaluate_formula(b, bits)
    raise TypeError(f"not a formula: {phi!r}")


def formula_table(phi, arity: int) -> TruthTableFn:
    return TruthTableFn.from_function(arity, lambda x: evaluate_formula(phi, x), rig="B")


def bool_partial_inductive(phi, index: int):
    """
    The derivative defined clause by clause: variables and constants directly,
    negation commutes with ∂, disjunction by linearity and conjunction by the
    product rule.  This disagrees with :func:`bool_partial` on ``x0 ∨ x1``.
    """
    match phi:
        case Var(i):
            return Const(i == index)
        case Const(_):
            return Const(False)
        case Not(a):
            return Not(bool_partial_inductive(a, index))
        case Or(a, b):
            return Or(bool_partial_inductive(a, index), bool_partial_inductive(b, index))
        case And(a, b):
            return Or(And(a, bool_partial_inductive(b, index)),
                      And(bool_partial_inductive(a, index), b))
    raise TypeError(f"not a formula: {phi!r}")


def all_truth_tables(arity: int, rig: str = "F2") -> Iterable[TruthTableFn]:
    """Every single-output function on ``arity`` bits, in binary order."""
    rows = 2 ** arity
    for code in range(2 ** rows):
        yield TruthTableFn(arity, 1, tuple(((code >> r) & 1,) for r in range(rows)), rig)


@dataclass(frozen=True)
class Valuation:
    """
    A parameter point θ read in a rig.  Over a dual rig, ``θ_seed`` is
    seeded as ``θ_seed + ε`` so every scalar carries its partial derivative.
    """

    theta: tuple[float, ...] = ()
    rig: ScalarRig = COMPLEX
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))

    @property
    def is_dual(self) -> bool:
        return isinstance(self.rig, DualRig)

    def scalar(self, expr):
        """Read a phase expression or polynomial at θ."""
        if isinstance(expr, PhaseExpr):
            value = phase_eval(expr, self.theta)
            tangent = phase_partial(expr, self.seed) if self.seed is not None else 0.0
        else:
            expr = Polynomial.coerce(expr)
            value = expr.evaluate(self.theta)
            tangent = expr.partial(self.seed).evaluate(self.theta) if self.seed is not None else 0.0
        if self.is_dual:
            base = self.rig.base
            return DualNumber(base.embed(value), base.embed(tangent), base)
        return self.rig.embed(value)

    def embed(self, value):
        return self.rig.embed(value)

    def lift(self, f: Callable, df: Callable, x):
        return self.rig.lift(f, df, x)
