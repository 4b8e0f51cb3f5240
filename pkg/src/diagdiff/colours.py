"""
Built-in bubble colours.

Pointwise colours come with a chain of derivative colours (``sigmoid``,
``sigmoid'``, ``sigmoid''``).  Matrix-level colours act on the whole
interpreted matrix and carry a Jacobian-vector product instead.
"""

from __future__ import annotations

import numpy as np

from diagdiff.diagrams import COLOURS, BubbleColour, Ty, register_colour, register_pointwise
from diagdiff.tensors import expm


def _sigmoid(x):
    return 1 / (1 + np.exp(-x))


def _dsigmoid(x):
    s = _sigmoid(x)
    return s * (1 - s)


def _ddsigmoid(x):
    s = _sigmoid(x)
    return s * (1 - s) * (1 - 2 * s)


def _relu(x):
    x = np.asarray(x)
    return np.where(x.real > 0, x, 0 * x)


def _step(x):
    # subgradient 0 at the kink
    x = np.asarray(x)
    return np.where(x.real > 0, 1 + 0 * x, 0 * x)


def _zero(x):
    return 0 * np.asarray(x)


def _one(x):
    return 1 + 0 * np.asarray(x)


def _identity(x):
    return x


def softmax(x):
    """Softmax over all entries of the matrix."""
    x = np.asarray(x)
    e = np.exp(x - np.max(x.real))
    return e / e.sum()


def softmax_jvp(x, dx):
    s = softmax(x)
    return s * (dx - np.sum(s * dx))


def _matexp(x):
    return expm(np.asarray(x))


def _matexp_jvp(x, dx):
    """Fréchet derivative of exp at ``x`` along ``dx`` from a block-triangular exponential."""
    x, dx = np.asarray(x), np.asarray(dx)
    n = x.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = x
    block[n:, n:] = x
    block[:n, n:] = dx
    return expm(block)[:n, n:]


def _to_unit(ty: Ty) -> Ty:
    return Ty()


def relative_entropy(name: str, target) -> BubbleColour:
    """
    Register the loss ``l(y) = Σ y_i log(y_i / y*_i)`` against a fixed
    distribution ``target``; its gradient is ``log(y_i / y*_i) + 1``.
    """
    target = np.asarray(target, dtype=float).reshape(-1, 1)

    def loss(y):
        y = np.asarray(y).reshape(target.shape)
        return np.array([[np.sum(y * np.log(y / target))]])

    def jvp(y, dy):
        y, dy = np.asarray(y).reshape(target.shape), np.asarray(dy).reshape(target.shape)
        return np.array([[np.sum((np.log(y / target) + 1) * dy)]])

    return register_colour(BubbleColour(name, loss, pointwise=False, jvp=jvp,
                                        cod_map=_to_unit))


register_pointwise("sigmoid", _sigmoid, _dsigmoid, _ddsigmoid)
register_pointwise("relu", _relu, _step, _zero)
register_pointwise("identity", _identity, _one, _zero)
register_pointwise("exp", np.exp, np.exp, np.exp, np.exp)
register_colour(BubbleColour("softmax", softmax, pointwise=False, jvp=softmax_jvp))
register_colour(BubbleColour("matexp", _matexp, pointwise=False, jvp=_matexp_jvp))

SIGMOID, RELU, IDENTITY = COLOURS["sigmoid"], COLOURS["relu"], COLOURS["identity"]
