"""Hitchin-Thorpe-type inequalities evaluated in exact arithmetic.

Every mode compares ``lhs >= rhs``.  When both sides are rational the
comparison is exact; otherwise floats are compared with a 1e-12 band for
equality.  Circle-bundle ends use the convention ``tau - h`` by default
(``h = e/3 - sign e``), with ``tau + h`` available as the alternative.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any

from .eta import CircleOverSurface, ConeLink, flipped, resolve_half_eta
from .metrics import TopologicalData

FLOAT_TOL = 1e-12

VIOLATED = "Violated"
EQUALITY = "EqualityRigidity"
SATISFIED = "Satisfied"

CONVENTIONS = ("corollary", "theorem")

RIGIDITY = {
    "closed": "equality only for flat manifolds or quotients of K3",
    "kotschick": "equality only for flat manifolds or quotients of K3 or of hyperbolic 4-space",
    "fibered": "equality only for complete Calabi-Yau metrics",
    "cone": "equality only for asymptotically conical Calabi-Yau metrics",
    "nakajima": "equality case of the Ricci-flat ALE bound; not classified here",
    "anderson": "equality case of the conformally compact bound; not classified here",
}


class ObstructionInputError(ValueError):
    pass


# -- modes -------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedHT:
    name = "closed"


@dataclass(frozen=True)
class Kotschick:
    lam: float | Rational | None = None
    name = "kotschick"


@dataclass(frozen=True)
class FiberedEnd:
    fibration: Any = None
    name = "fibered"


@dataclass(frozen=True)
class Cone:
    volume: float | None = None
    eta: float | Rational | None = None
    alpha: float | Rational | None = None
    volume_over_2pi2: Rational | None = None
    name = "cone"


@dataclass(frozen=True)
class NakajimaALE:
    gamma_order: int | None = None
    eta_s: float | Rational | None = None
    name = "nakajima"


@dataclass(frozen=True)
class AndersonCC:
    renormalized_volume: float | Rational | None = None
    eta: float | Rational | None = None
    name = "anderson"


@dataclass(frozen=True)
class ObstructionInput:
    topo: TopologicalData
    mode: Any = field(default_factory=ClosedHT)


@dataclass
class Verdict:
    status: str
    lhs: Fraction | float
    rhs: Fraction | float
    mode: str
    rigidity_note: str = ""
    convention: str | None = None
    alternate: "Verdict | None" = None
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return isinstance(self.lhs, Fraction) and isinstance(self.rhs, Fraction)

    @property
    def divergent(self) -> bool:
        """True when the alternate convention gives a different status."""
        return self.alternate is not None and self.alternate.status != self.status

    def to_dict(self) -> dict:
        d = {
            "status": self.status,
            "mode": self.mode,
            "lhs": fmt_number(self.lhs),
            "rhs": fmt_number(self.rhs),
            "exact": self.exact,
            "rigidity_note": self.rigidity_note,
        }
        if self.convention is not None:
            d["convention"] = self.convention
        if self.alternate is not None:
            d["alternate"] = self.alternate.to_dict()
            d["conventions_diverge"] = self.divergent
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def fmt_number(v) -> str:
    """Exact rationals as ``p/q`` (or ``p``), floats as shortest round-trip decimals."""
    if isinstance(v, Rational):
        v = Fraction(v)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def _num(v, what: str):
    if v is None:
        raise ObstructionInputError(f"missing {what}")
    if isinstance(v, bool):
        raise ObstructionInputError(f"{what} must be a number")
    if isinstance(v, Rational):
        return Fraction(v)
    v = float(v)
    if not math.isfinite(v):
        raise ObstructionInputError(f"{what} must be finite")
    return v


def _compare(lhs, rhs) -> str:
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        if lhs < rhs:
            return VIOLATED
        return EQUALITY if lhs == rhs else SATISFIED
    d = float(lhs) - float(rhs)
    if abs(d) <= FLOAT_TOL * max(1.0, abs(float(lhs)), abs(float(rhs))):
        return EQUALITY
    return VIOLATED if d < 0 else SATISFIED


def _verdict(lhs, rhs, mode: str, convention=None) -> Verdict:
    status = _compare(lhs, rhs)
    note = RIGIDITY[mode] if status == EQUALITY else ""
    return Verdict(status, lhs, rhs, mode, note, convention)


def _fibered_rhs(tau, half, convention: str):
    inner = tau - half if convention == "corollary" else tau + half
    return Fraction(3, 2) * abs(inner)


def check(inp: ObstructionInput, convention: str = "corollary") -> Verdict:
    """Evaluate the inequality of ``inp.mode`` for the declared topology."""
    if convention not in CONVENTIONS:
        raise ObstructionInputError(f"unknown eta-sign convention {convention!r}")
    topo = inp.topo
    if topo is None:
        raise ObstructionInputError("missing topological data")
    chi, tau = Fraction(int(topo.chi)), Fraction(int(topo.tau))
    mode = inp.mode
    three_halves = Fraction(3, 2)

    if isinstance(mode, ClosedHT):
        return _verdict(chi, three_halves * abs(tau), "closed")

    if isinstance(mode, Kotschick):
        lam = _num(mode.lam, "volume entropy lambda")
        extra = Fraction(0) if lam == 0 else float(lam) ** 4 / (108 * math.pi ** 2)
        return _verdict(chi, three_halves * abs(tau) + extra, "kotschick")

    if isinstance(mode, FiberedEnd):
        fib = mode.fibration
        if fib is None:
            raise ObstructionInputError("missing boundary fibration")
        if isinstance(fib, ConeLink):
            raise ObstructionInputError("cone links belong to the cone mode")
        half = resolve_half_eta(fib).half_a_lim_eta
        if isinstance(fib, CircleOverSurface):
            v = _verdict(chi, _fibered_rhs(tau, half, convention), "fibered", convention)
            other = "theorem" if convention == "corollary" else "corollary"
            alt = _verdict(chi, _fibered_rhs(tau, half, other), "fibered", other)
            if alt.rhs != v.rhs:
                v.alternate = alt
                if alt.status != v.status:
                    v.notes.append(f"conventions diverge: {other} form gives {alt.status}")
            return v
        # a user-supplied eta always enters as tau + (1/2) a-lim eta
        return _verdict(chi, _fibered_rhs(tau, half, "theorem"), "fibered", "user")

    if isinstance(mode, Cone):
        if mode.volume_over_2pi2 is not None:
            vol_term = _num(mode.volume_over_2pi2, "volume / 2 pi^2")
        else:
            vol = _num(mode.volume, "link volume")
            vol_term = Fraction(0) if vol == 0 else float(vol) / (2 * math.pi ** 2)
        eta = _num(mode.eta, "link eta invariant")
        alpha = _num(mode.alpha, "alpha invariant")
        rhs = vol_term + three_halves * abs(tau + eta / 2) + alpha
        return _verdict(chi, rhs, "cone")

    if isinstance(mode, NakajimaALE):
        k = mode.gamma_order
        if k is None or int(k) != k or k < 1:
            raise ObstructionInputError("gamma_order must be a positive integer")
        eta_s = _num(mode.eta_s, "eta invariant of S^3/Gamma")
        return _verdict(chi, Fraction(1, int(k)) + three_halves * abs(tau + eta_s), "nakajima")

    if isinstance(mode, AndersonCC):
        V = _num(mode.renormalized_volume, "renormalized volume")
        eta = _num(mode.eta, "eta invariant of the conformal infinity")
        vterm = Fraction(0) if V == 0 else 3 * float(V) / (4 * math.pi ** 2)
        return _verdict(chi - vterm, three_halves * abs(tau - eta), "anderson")

    raise ObstructionInputError(f"unknown mode {mode!r}")


def flip_orientation(inp: ObstructionInput) -> ObstructionInput:
    """(tau, e, eta) -> (-tau, -e, -eta) for fibered ends."""
    topo = inp.topo.flipped()
    mode = inp.mode
    if isinstance(mode, FiberedEnd):
        mode = FiberedEnd(flipped(mode.fibration))
    return ObstructionInput(topo, mode)


# -- topology calculus ---------------------------------------------------------

def connected_sum(a: TopologicalData, b: TopologicalData) -> TopologicalData:
    return TopologicalData(a.chi + b.chi - 2, a.tau + b.tau)


def blowup(base: TopologicalData, k: int) -> TopologicalData:
    """``base # k CP^2-bar``: each summand adds (3, -1) and removes (2, 0)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return TopologicalData(base.chi + k, base.tau - k)


def min_obstructed_blowups(base: TopologicalData, fibration, convention: str = "corollary",
                           bound: int = 10 ** 6) -> int:
    """Smallest k for which ``base # k CP^2-bar`` violates the fibered-end inequality."""
    mode = FiberedEnd(fibration)
    for k in range(bound + 1):
        v = check(ObstructionInput(blowup(base, k), mode), convention)
        if v.status == VIOLATED:
            return k
    raise ValueError(f"no violation up to k = {bound}")
