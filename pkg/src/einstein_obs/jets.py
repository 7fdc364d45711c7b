"""Forward-mode automatic differentiation with nestable jets.

A :class:`Jet` carries a value and the partial derivatives of that value with
respect to a set of seeded variables.  Values and partials may be floats,
numpy arrays (batched evaluation) or other jets, so second derivatives come
from jets of jets.  Every seeding call draws a fresh tag; an operation between
jets of different tags treats the older (inner) one as a constant, which keeps
nested differentiation free of perturbation confusion.
"""
from __future__ import annotations

import itertools
from typing import Any, Callable, Sequence

import numpy as np

_tags = itertools.count(1)


def new_tag() -> int:
    return next(_tags)


class Jet:
    """Truncated first-order Taylor expansion ``value + sum(partials[i] dx_i)``."""

    __slots__ = ("value", "partials", "tag")
    __array_priority__ = 1000  # make ndarray <op> Jet defer to Jet

    def __init__(self, value: Any, partials: Sequence[Any], tag: int):
        self.value = value
        self.partials = tuple(partials)
        self.tag = tag

    def __repr__(self) -> str:
        return f"Jet({self.value!r}, {self.partials!r}, tag={self.tag})"

    @property
    def n(self) -> int:
        return len(self.partials)

    # Each binary op dispatches on tags: equal tags combine partials, otherwise
    # the jet with the larger tag is differentiated and the other is constant.
    def _outer(self, other):
        if isinstance(other, Jet) and other.tag > self.tag:
            return False
        return True

    def __add__(self, other):
        if not self._outer(other):
            return other.__radd__(self)
        if isinstance(other, Jet) and other.tag == self.tag:
            return Jet(self.value + other.value,
                       [p + q for p, q in zip(self.partials, other.partials)], self.tag)
        return Jet(self.value + other, self.partials, self.tag)

    def __radd__(self, other):
        return Jet(other + self.value, self.partials, self.tag)

    def __sub__(self, other):
        if not self._outer(other):
            return other.__rsub__(self)
        if isinstance(other, Jet) and other.tag == self.tag:
            return Jet(self.value - other.value,
                       [p - q for p, q in zip(self.partials, other.partials)], self.tag)
        return Jet(self.value - other, self.partials, self.tag)

    def __rsub__(self, other):
        return Jet(other - self.value, [-p for p in self.partials], self.tag)

    def __neg__(self):
        return Jet(-self.value, [-p for p in self.partials], self.tag)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not self._outer(other):
            return other.__rmul__(self)
        if isinstance(other, Jet) and other.tag == self.tag:
            u, v = self.value, other.value
            return Jet(u * v, [u * q + v * p for p, q in zip(self.partials, other.partials)],
                       self.tag)
        return Jet(self.value * other, [p * other for p in self.partials], self.tag)

    def __rmul__(self, other):
        return Jet(other * self.value, [other * p for p in self.partials], self.tag)

    def __truediv__(self, other):
        if not self._outer(other):
            return other.__rtruediv__(self)
        if isinstance(other, Jet) and other.tag == self.tag:
            q = self.value / other.value
            return Jet(q, [(p - q * r) / other.value for p, r in zip(self.partials, other.partials)],
                       self.tag)
        return Jet(self.value / other, [p / other for p in self.partials], self.tag)

    def __rtruediv__(self, other):
        q = other / self.value
        return Jet(q, [-(q * p) / self.value for p in self.partials], self.tag)

    def __pow__(self, k):
        if isinstance(k, Jet):
            return exp(k * log(self))
        if k == 0:
            return Jet(self.value ** 0, [0.0 * p for p in self.partials], self.tag)
        d = k * self.value ** (k - 1)
        return Jet(self.value ** k, [d * p for p in self.partials], self.tag)

    def __rpow__(self, base):
        return exp(self * np.log(base))


def _unary(leaf: Callable, deriv: Callable[[Any], Any]):
    def fn(x):
        if isinstance(x, Jet):
            d = deriv(x.value)
            return Jet(fn(x.value), [d * p for p in x.partials], x.tag)
        return leaf(x)

    fn.__name__ = leaf.__name__
    return fn


sin = _unary(np.sin, lambda v: cos(v))
cos = _unary(np.cos, lambda v: -sin(v))
exp = _unary(np.exp, lambda v: exp(v))
log = _unary(np.log, lambda v: 1.0 / v)
sqrt = _unary(np.sqrt, lambda v: 0.5 / sqrt(v))
tanh = _unary(np.tanh, lambda v: 1.0 - tanh(v) ** 2)


def primal(x):
    """Innermost value of a (possibly nested) jet."""
    while isinstance(x, Jet):
        x = x.value
    return x


def seed(point: Sequence[Any], order: int = 1) -> tuple:
    """Seed coordinate jets at ``point`` for derivatives up to ``order`` (1 or 2)."""
    n = len(point)
    if order == 0:
        return tuple(point)
    if order not in (1, 2):
        raise ValueError("order must be 0, 1 or 2")
    t1 = new_tag()
    unit = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    inner = tuple(Jet(point[i], unit[i], t1) for i in range(n))
    if order == 1:
        return inner
    t2 = new_tag()
    return tuple(Jet(inner[i], unit[i], t2) for i in range(n))


def _as_array(x, shape):
    return np.broadcast_to(np.asarray(x, dtype=float), shape)


def derivatives(fn: Callable, point: Sequence[Any], order: int = 2):
    """Value, gradient and (for ``order=2``) Hessian of ``fn`` at ``point``.

    ``point`` entries may be arrays of a common shape, in which case the
    outputs gain trailing axes ``(n,)`` and ``(n, n)`` after that shape.
    """
    n = len(point)
    shape = np.broadcast(*[np.asarray(p) for p in point]).shape
    out = fn(*seed(point, order))
    grad = np.zeros(shape + (n,))
    if order == 1:
        if isinstance(out, Jet):
            for i, p in enumerate(out.partials):
                grad[..., i] = _as_array(p, shape)
            return _as_array(out.value, shape).copy(), grad
        return _as_array(out, shape).copy(), grad
    hess = np.zeros(shape + (n, n))
    if not isinstance(out, Jet):
        return _as_array(out, shape).copy(), grad, hess
    val = out.value
    value = primal(val)
    for i, p in enumerate(out.partials):
        if isinstance(p, Jet):
            grad[..., i] = _as_array(p.value, shape)
            for j, q in enumerate(p.partials):
                hess[..., i, j] = _as_array(q, shape)
        else:
            grad[..., i] = _as_array(p, shape)
    return _as_array(value, shape).copy(), grad, hess


def partial(fn: Callable, j: int) -> Callable:
    """Return the function ``x -> d fn / d x_j`` (works on jet inputs too)."""

    def dfn(*x):
        tag = new_tag()
        xs = list(x)
        xs[j] = Jet(x[j], (1.0,), tag)
        out = fn(*xs)
        if isinstance(out, Jet) and out.tag == tag:
            return out.partials[0]
        return 0.0 * primal(x[j])

    return dfn
