"""Adiabatic limits of the signature eta invariant for circle bundles over surfaces.

For a circle bundle of Euler number e over a closed surface,
``(1/2) a-lim eta = e/3 - sign(e)``: the degree-one term of
``coth(e) - 1/e`` paired with the base, minus the signature of the 1x1
form ``B_e = (e)``.  All values are exact ``Fraction``s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

MAX_SERIES_ORDER = 20


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_B_e(e: int, base_dim: int = 2) -> int:
    """Signature of the pairing ``<x y e, [B]>`` on H^0(B) for a surface base: sign(e)."""
    if base_dim != 2:
        raise NotImplementedError("only surface bases (base_dim = 2) are supported")
    if int(e) != e:
        raise ValueError("Euler number must be an integer")
    return _sign(int(e))


def half_adiabatic_limit_circle_over_surface(e: int) -> Fraction:
    """Exact ``(1/2) a-lim eta = e/3 - sign(e)``; independent of the genus."""
    if int(e) != e:
        raise ValueError("Euler number must be an integer")
    e = int(e)
    return Fraction(e, 3) - sign_B_e(e)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = +1/2 convention; only even n are used here)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


@dataclass(frozen=True)
class EtaSeries:
    """Taylor coefficients (index = degree) of ``coth(e) - 1/e`` and of ``eta~(e)``."""
    order: int
    coth_minus_inv: tuple[Fraction, ...]
    eta_tilde: tuple[Fraction, ...]

    def evaluate(self, e: float, which: str = "coth_minus_inv") -> float:
        coeffs = getattr(self, which)
        return sum(float(c) * e ** k for k, c in enumerate(coeffs) if c)


def eta_tilde_series(order: int) -> EtaSeries:
    """Coefficients through degree ``order`` (at most 20).

    ``coth x - 1/x = sum_{k>=1} 2^{2k} B_{2k} x^{2k-1} / (2k)!`` and
    ``eta~(e) = 2 (1/(2 tanh(e/2)) - 1/e)`` is the same series at x = e/2.
    """
    if not 0 <= order <= MAX_SERIES_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_SERIES_ORDER}]")
    c = [Fraction(0)] * (order + 1)
    t = [Fraction(0)] * (order + 1)
    for k in range(1, order // 2 + 2):
        deg = 2 * k - 1
        if deg > order:
            break
        coef = Fraction(2 ** (2 * k)) * bernoulli(2 * k) / math.factorial(2 * k)
        c[deg] = coef
        t[deg] = coef / 2 ** deg
    return EtaSeries(order, tuple(c), tuple(t))


# ---------------------------------------------------------------------------
# boundary fibrations

@dataclass(frozen=True)
class CircleOverSurface:
    euler: int
    genus: int = 0

    def __post_init__(self):
        if int(self.euler) != self.euler:
            raise ValueError("Euler number must be an integer")
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")


@dataclass(frozen=True)
class ConeLink:
    eta: Rational | float
    volume: float | None = None
    alpha: Rational | float = 0
    volume_over_2pi2: Rational | None = None


@dataclass(frozen=True)
class UserEta:
    half_a_lim_eta: Rational | float


BoundaryFibration = CircleOverSurface | ConeLink | UserEta


@dataclass(frozen=True)
class EtaValue:
    half_a_lim_eta: Fraction | float
    provenance: str

    @property
    def exact(self) -> bool:
        return isinstance(self.half_a_lim_eta, Rational)


def _exact(v):
    if isinstance(v, Rational):
        return Fraction(v)
    return float(v)


def resolve_half_eta(f) -> EtaValue:
    if isinstance(f, CircleOverSurface):
        return EtaValue(half_adiabatic_limit_circle_over_surface(f.euler),
                        f"circle bundle over genus-{f.genus} surface, e={f.euler}")
    if isinstance(f, UserEta):
        return EtaValue(_exact(f.half_a_lim_eta), "user")
    if isinstance(f, ConeLink):
        v = _exact(f.eta)
        return EtaValue(v / 2, "cone link (user eta)")
    raise TypeError(f"unsupported boundary fibration {f!r}")


def flipped(f):
    """The same fibration with the opposite orientation (e, eta -> -e, -eta)."""
    if isinstance(f, CircleOverSurface):
        return CircleOverSurface(-f.euler, f.genus)
    if isinstance(f, UserEta):
        return UserEta(-f.half_a_lim_eta)
    if isinstance(f, ConeLink):
        return ConeLink(-f.eta, f.volume, f.alpha, f.volume_over_2pi2)
    raise TypeError(f"unsupported boundary fibration {f!r}")
