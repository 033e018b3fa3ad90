"""Regular weight systems and quasi-homogeneity checks.

A potential is quasi-homogeneous of degree 2: assigning each ring
variable a rational weight w makes every monomial satisfy
sum(exponent * weight) = 2.  The integer form (a1, a2, a3; h) relates to
the rational weights by w = 2*a/h; the table convention does not fix
which a belongs to which variable, so integer systems are matched as
multisets and the assignment actually found is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Mapping, Optional, Tuple

from ._linalg import LinearSystemError, solve_unique
from .polyring import Poly

_TWO = Fraction(2)


class GradingError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSystem:
    a1: int
    a2: int
    a3: int
    h: int

    def __post_init__(self) -> None:
        triple = (self.a1, self.a2, self.a3)
        if any(a <= 0 for a in triple) or self.h <= 0:
            raise GradingError("weight system entries must be positive")
        if any(a >= self.h for a in triple):
            raise GradingError("each weight must be below the degree h")
        if gcd(gcd(self.a1, self.a2), self.a3) != 1:
            raise GradingError("weight triple must be coprime")

    def normalized_weights(self) -> Tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(2 * a, self.h) for a in (self.a1, self.a2, self.a3))


@dataclass(frozen=True)
class VariableWeights:
    weights: Tuple[Tuple[str, Fraction], ...]

    def __post_init__(self) -> None:
        for name, w in self.weights:
            if not (0 < w <= 1):
                raise GradingError(f"weight of {name!r} must lie in (0, 1], got {w}")
        names = [n for n, _ in self.weights]
        if len(set(names)) != len(names):
            raise GradingError("duplicate variable in weights")

    @staticmethod
    def of(mapping: Mapping[str, Fraction]) -> "VariableWeights":
        return VariableWeights(tuple((n, Fraction(w)) for n, w in mapping.items()))

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.weights)

    def __getitem__(self, name: str) -> Fraction:
        for n, w in self.weights:
            if n == name:
                return w
        raise KeyError(name)

    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.weights)

    def combine(self, other: "VariableWeights") -> "VariableWeights":
        overlap = set(self.names()) & set(other.names())
        if overlap:
            raise GradingError(f"cannot combine weights sharing variables {sorted(overlap)}")
        return VariableWeights(self.weights + other.weights)


def weights_from_potential(w_poly: Poly, names: Tuple[str, ...]) -> VariableWeights:
    """Solve sum(e_i * w_i) = 2 over all monomials of the potential."""
    if w_poly.is_zero():
        raise GradingError("zero potential has no weight system")
    idx = [w_poly.vt.index(n) for n in names]
    rows = []
    for mono in w_poly.monomials():
        for j, e in enumerate(mono):
            if e and j not in idx:
                raise GradingError(
                    f"potential involves {w_poly.vt.names[j]!r}, not among {names}"
                )
        rows.append([Fraction(mono[i]) for i in idx])
    try:
        sol = solve_unique(rows, [_TWO] * len(rows))
    except LinearSystemError as exc:
        raise GradingError(f"not quasi-homogeneous of degree 2: {exc}") from None
    return VariableWeights(tuple(zip(names, sol)))


def central_charge(vw: VariableWeights) -> Fraction:
    if len(vw.weights) != 3:
        raise GradingError("central charge is defined for three ring variables")
    return sum((1 - w for _, w in vw.weights), Fraction(0))


@dataclass(frozen=True)
class WeightMatchReport:
    ok: bool
    assignment: Dict[str, int] = field(default_factory=dict)
    message: str = ""


def check_weight_system(vw: VariableWeights, ws: WeightSystem) -> WeightMatchReport:
    """Match rational weights against an integer system as a multiset."""
    targets = list(ws.normalized_weights())
    assignment: Dict[str, int] = {}
    pool = list(zip((ws.a1, ws.a2, ws.a3), targets))
    for name, w in vw.weights:
        hit = next((k for k, (_, t) in enumerate(pool) if t == w), None)
        if hit is None:
            return WeightMatchReport(
                False, {}, f"variable {name!r} has weight {w}, not matched by {targets}"
            )
        assignment[name] = pool.pop(hit)[0]
    if pool:
        return WeightMatchReport(False, {}, f"unused weight entries {pool}")
    return WeightMatchReport(True, assignment, "multisets agree")


def euler_check(w_poly: Poly, vw: VariableWeights) -> bool:
    """True iff sum (w_i/2) * x_i * dW/dx_i equals W."""
    acc = Poly.zero(w_poly.vt)
    for name, w in vw.weights:
        acc = acc + (Poly.var(w_poly.vt, name) * w_poly.partial(name)).scale(w / 2)
    return acc == w_poly
