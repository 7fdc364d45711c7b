"""Exterior algebra on 3- and 4-dimensional coordinate charts.

Forms are stored as a map from strictly increasing multi-indices to scalar
fields and are only ever evaluated pointwise.  Exterior derivatives use the
jets in :mod:`einstein_obs.jets`, so ``d`` of ``d`` of anything built from
differentiable coefficient functions is available without finite differences.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from . import jets


class ScalarField:
    """A coefficient function on a chart of dimension ``arity``.

    ``fn`` must accept ``arity`` positional arguments built from floats,
    numpy arrays or jets and use only the arithmetic and elementary
    functions in :mod:`einstein_obs.jets`.
    """

    __slots__ = ("fn", "arity")

    def __init__(self, fn: Callable, arity: int):
        self.fn = fn
        self.arity = arity

    @classmethod
    def constant(cls, c: float, arity: int) -> "ScalarField":
        return cls(lambda *x: c + 0.0 * jets.primal(x[0]), arity)

    @classmethod
    def coordinate(cls, i: int, arity: int) -> "ScalarField":
        return cls(lambda *x: x[i], arity)

    def __call__(self, *x):
        return self.fn(*x)

    def eval(self, point: Sequence[float]) -> jets.Jet:
        """Value and gradient at ``point`` as a first-order jet of floats."""
        value, grad = jets.derivatives(self.fn, point, order=1)
        return jets.Jet(float(value), [float(g) for g in grad], 0)

    def partial(self, j: int) -> "ScalarField":
        return ScalarField(jets.partial(self.fn, j), self.arity)

    def __mul__(self, other: "ScalarField | float") -> "ScalarField":
        f = self.fn
        if isinstance(other, ScalarField):
            g = other.fn
            return ScalarField(lambda *x: f(*x) * g(*x), self.arity)
        return ScalarField(lambda *x: other * f(*x), self.arity)

    __rmul__ = __mul__

    def __add__(self, other: "ScalarField") -> "ScalarField":
        f, g = self.fn, other.fn
        return ScalarField(lambda *x: f(*x) + g(*x), self.arity)

    def __neg__(self) -> "ScalarField":
        f = self.fn
        return ScalarField(lambda *x: -f(*x), self.arity)


def sort_sign(index: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Parity of the sorting permutation and the sorted index (sign 0 on repeats)."""
    idx = list(index)
    if len(set(idx)) < len(idx):
        return 0, tuple(sorted(idx))
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class DifferentialForm:
    """A p-form on an n-dimensional chart (n in {3, 4})."""

    def __init__(self, dim: int, degree: int,
                 components: Mapping[tuple[int, ...], ScalarField] | None = None):
        if dim not in (3, 4):
            raise ValueError(f"only 3- and 4-dimensional charts are supported, got {dim}")
        if degree < 0:
            raise ValueError("negative degree")
        self.dim = dim
        self.degree = degree
        comps: dict[tuple[int, ...], ScalarField] = {}
        if degree <= dim and components:
            for idx, f in components.items():
                if len(idx) != degree:
                    raise ValueError(f"index {idx} does not match degree {degree}")
                if any(i < 0 or i >= dim for i in idx):
                    raise ValueError(f"index {idx} out of range for dimension {dim}")
                sign, key = sort_sign(idx)
                if sign == 0:
                    continue
                g = f if sign > 0 else -f
                comps[key] = comps[key] + g if key in comps else g
        self.components = comps

    def __repr__(self) -> str:
        return f"DifferentialForm(dim={self.dim}, degree={self.degree}, terms={sorted(self.components)})"

    @classmethod
    def coordinate(cls, dim: int, i: int) -> "DifferentialForm":
        """The basis 1-form dx^i."""
        return cls(dim, 1, {(i,): ScalarField.constant(1.0, dim)})

    @classmethod
    def function(cls, f: ScalarField | Callable, dim: int) -> "DifferentialForm":
        if not isinstance(f, ScalarField):
            f = ScalarField(f, dim)
        return cls(dim, 0, {(): f})

    @classmethod
    def one_form(cls, coeffs: Sequence[ScalarField | Callable | None], dim: int) -> "DifferentialForm":
        comps = {}
        for i, c in enumerate(coeffs):
            if c is None:
                continue
            comps[(i,)] = c if isinstance(c, ScalarField) else ScalarField(c, dim)
        return cls(dim, 1, comps)

    def _check(self, other: "DifferentialForm") -> None:
        if not isinstance(other, DifferentialForm):
            raise TypeError("expected a DifferentialForm")
        if other.dim != self.dim:
            raise ValueError(f"chart dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        comps = dict(self.components)
        for k, f in other.components.items():
            comps[k] = comps[k] + f if k in comps else f
        return DifferentialForm(self.dim, self.degree, comps)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(self.dim, self.degree, {k: -f for k, f in self.components.items()})

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def scale(self, f: ScalarField | float) -> "DifferentialForm":
        return DifferentialForm(self.dim, self.degree, {k: g * f for k, g in self.components.items()})

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        return wedge(self, other)

    def __xor__(self, other: "DifferentialForm") -> "DifferentialForm":
        return wedge(self, other)

    def d(self) -> "DifferentialForm":
        return exterior_derivative(self)

    def at(self, point: Sequence[float]) -> dict[tuple[int, ...], float]:
        """Numeric coefficients at ``point`` keyed by increasing multi-index."""
        return {k: float(jets.primal(f(*point))) for k, f in self.components.items()}

    def dense(self, point: Sequence[float]) -> np.ndarray:
        """Fully antisymmetric coefficient tensor ``T`` with ``form = T_I dx^I / p!``."""
        out = np.zeros((self.dim,) * self.degree)
        for k, c in self.at(point).items():
            for perm in itertools.permutations(range(self.degree)):
                idx = tuple(k[p] for p in perm)
                out[idx] = _perm_sign(perm) * c
        return out


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    a._check(b)
    deg = a.degree + b.degree
    if deg > a.dim:
        return DifferentialForm(a.dim, deg)
    comps: dict[tuple[int, ...], ScalarField] = {}
    for ka, fa in a.components.items():
        for kb, fb in b.components.items():
            sign, key = sort_sign(ka + kb)
            if sign == 0:
                continue
            term = fa * fb if sign > 0 else -(fa * fb)
            comps[key] = comps[key] + term if key in comps else term
    return DifferentialForm(a.dim, deg, comps)


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    deg = a.degree + 1
    if deg > a.dim:
        return DifferentialForm(a.dim, deg)
    comps: dict[tuple[int, ...], ScalarField] = {}
    for k, f in a.components.items():
        for j in range(a.dim):
            if j in k:
                continue
            sign, key = sort_sign((j,) + k)
            term = f.partial(j)
            if sign < 0:
                term = -term
            comps[key] = comps[key] + term if key in comps else term
    return DifferentialForm(a.dim, deg, comps)


@lru_cache(maxsize=None)
def _perm_sign(perm: tuple[int, ...]) -> int:
    return sort_sign(perm)[0]


@lru_cache(maxsize=None)
def levi_civita(n: int) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        eps[perm] = _perm_sign(perm)
    eps.setflags(write=False)
    return eps


def alternate(prod: np.ndarray, p: int, q: int) -> np.ndarray:
    """Antisymmetrize the trailing ``p + q`` axes of a tensor product of a p- and q-form."""
    k = p + q
    lead = prod.ndim - k
    out = np.zeros_like(prod)
    for perm in itertools.permutations(range(k)):
        axes = tuple(range(lead)) + tuple(lead + i for i in perm)
        out = out + _perm_sign(perm) * np.transpose(prod, axes)
    return out / (math.factorial(p) * math.factorial(q))


def wedge_tensor(a: np.ndarray, b: np.ndarray, p: int, q: int) -> np.ndarray:
    """Wedge of antisymmetric coefficient tensors on their trailing axes.

    Tensors follow ``form = T_I e^I / p!``; leading axes broadcast.
    """
    a_ = a.reshape(a.shape + (1,) * q)
    b_ = b.reshape(b.shape[: b.ndim - q] + (1,) * p + b.shape[b.ndim - q:])
    return alternate(a_ * b_, p, q)


def hodge_sd_project(two_form: np.ndarray, orientation: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Split a 4-d two-form (orthonormal-frame antisymmetric matrix) into (+) and (-) parts.

    ``two_form[a, b]`` is the coefficient of ``e^a ^ e^b`` for ``a < b`` with the
    antisymmetric completion.  ``orientation=-1`` swaps the roles of the parts.
    """
    F = np.asarray(two_form, dtype=float)
    if F.shape[-2:] != (4, 4):
        raise ValueError("hodge_sd_project needs a 4x4 antisymmetric matrix")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    star = 0.5 * np.einsum("abcd,...cd->...ab", levi_civita(4), F) * orientation
    return 0.5 * (F + star), 0.5 * (F - star)
