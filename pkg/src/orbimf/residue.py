"""Grothendieck residues and quantum dimensions.

The residue Res[g dv / (f1, f2, f3)] with the f_j the partial
derivatives of a quasi-homogeneous potential is computed through the
transformation law: find a cofactor matrix H with H.(f1,f2,f3) =
(v1^N1, v2^N2, v3^N3), then read off the coefficient of
v1^(N1-1) v2^(N2-1) v3^(N3-1) in g*det(H).  Any valid H gives the same
answer; the test suite exercises that with independently built lifts.

Quantum dimensions take the supertrace of the sixfold product of
entry-wise partial derivatives of the twisted differential, sources
first and then targets, each triple in its declared catalog order (the
product is order-sensitive and the order is part of the data).  With
three variables a side, the global sign prefactor is +1.  The left
dimension integrates the target variables out against the target
potential's partials; the right one the source variables against the
source potential's.  Both results must be free of ring variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Dict, List, Optional, Sequence, Tuple

from ._linalg import solve_dense
from .matfac import Matrix8, MatrixFactorization, matmul
from .polyring import Poly, VarTable

_ZERO = Fraction(0)


class ResidueError(ValueError):
    pass


def supertrace(matrix: Matrix8) -> Poly:
    """Trace over the even block (1..4) minus trace over the odd (5..8)."""
    acc = matrix[0][0]
    for i in range(1, 4):
        acc = acc + matrix[i][i]
    for i in range(4, 8):
        acc = acc - matrix[i][i]
    return acc


def _partial_matrix(m: MatrixFactorization, var: str) -> Matrix8:
    return tuple(tuple(p.partial(var) for p in row) for row in m.matrix)


def derivative_matrix_product(m: MatrixFactorization, order: Sequence[str]) -> Matrix8:
    """Product of the entry-wise partials of the twisted differential,
    one factor per variable, multiplied left to right in the given order."""
    factors = [_partial_matrix(m, v) for v in order]
    acc = factors[0]
    for f in factors[1:]:
        acc = matmul(acc, f)
    return acc


@dataclass(frozen=True)
class CofactorLift:
    vars: Tuple[str, str, str]
    exponents: Tuple[int, int, int]
    matrix: Tuple[Tuple[Poly, ...], ...]  # rows h_i with sum_j h_ij f_j = v_i^N_i

    def determinant(self) -> Poly:
        h = self.matrix
        return (
            h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
            - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
            + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0])
        )


def _recover_weights(f: Sequence[Poly], names: Sequence[str]) -> List[Fraction]:
    """Weights making each f_j homogeneous of degree 2 - w_j (f_j being
    the j-th partial of a degree-2 quasi-homogeneous potential)."""
    vt = f[0].vt
    idx = [vt.index(n) for n in names]
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for j, fj in enumerate(f):
        for mono in fj.monomials():
            row = [Fraction(mono[i]) for i in idx]
            row[j] += 1
            rows.append(row)
            rhs.append(Fraction(2))
    sol = solve_dense(rows, rhs)
    if sol is None or any(w <= 0 for w in sol):
        raise ResidueError("denominators are not partials of a quasi-homogeneous potential")
    return sol


def _monomials_of_weight(
    weights: Sequence[Fraction], target: Fraction
) -> List[Tuple[int, ...]]:
    """Exponent triples e with sum(e_i * w_i) == target."""
    bounds = [int(target / w) if target > 0 else 0 for w in weights]
    out = []
    for e in iter_product(*(range(b + 1) for b in bounds)):
        if sum(w * k for w, k in zip(weights, e)) == target:
            out.append(e)
    return out


def _solve_power_certificate(
    f: Sequence[Poly],
    names: Sequence[str],
    weights: Sequence[Fraction],
    var_index: int,
    exponent: int,
    reverse_ansatz: bool,
) -> Optional[List[Poly]]:
    """Row h with sum_j h_j f_j = v^exponent, homogeneous ansatz, or None."""
    vt = f[0].vt
    idx = [vt.index(n) for n in names]
    target = exponent * weights[var_index]
    ansatz: List[Tuple[int, Tuple[int, ...]]] = []  # (which f, exponents on names)
    for j in range(3):
        dj = target - (2 - weights[j])
        if dj < 0:
            continue
        monos = _monomials_of_weight(weights, dj)
        ansatz.extend((j, m) for m in monos)
    if reverse_ansatz:
        ansatz.reverse()
    if not ansatz:
        return None
    # One equation per monomial of sum_j h_j f_j, matching v^exponent.
    col_terms: List[Dict[Tuple[int, ...], Fraction]] = []
    support = set()
    for j, m in ansatz:
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for fm, fc in f[j].terms():
            key = tuple(fm[i] + e for i, e in zip(idx, m))
            terms[key] = terms.get(key, _ZERO) + fc
        col_terms.append(terms)
        support.update(terms)
    target_mono = tuple(
        exponent if k == var_index else 0 for k in range(len(names))
    )
    support.add(target_mono)
    support_list = sorted(support)
    row_of = {mono: r for r, mono in enumerate(support_list)}
    rows = [[_ZERO] * len(ansatz) for _ in support_list]
    for cidx, terms in enumerate(col_terms):
        for mono, c in terms.items():
            rows[row_of[mono]][cidx] = c
    rhs = [_ZERO] * len(support_list)
    rhs[row_of[target_mono]] = Fraction(1)
    sol = solve_dense(rows, rhs)
    if sol is None:
        return None
    return _assemble_row(vt, idx, ansatz, sol)


def _assemble_row(vt: VarTable, idx, ansatz, sol) -> List[Poly]:
    buckets: List[Dict[tuple, Fraction]] = [dict(), dict(), dict()]
    width = len(vt)
    for (j, m), c in zip(ansatz, sol):
        if not c:
            continue
        full = [0] * width
        for i, e in zip(idx, m):
            full[i] = e
        buckets[j][tuple(full)] = buckets[j].get(tuple(full), _ZERO) + c
    return [Poly(vt, b) for b in buckets]


def cofactor_lift(
    f: Sequence[Poly],
    names: Sequence[str],
    degree_cap: int = 24,
    exponents: Optional[Sequence[int]] = None,
    reverse_ansatz: bool = False,
) -> CofactorLift:
    """Cofactor matrix H with H.(f1,f2,f3) = (v1^N1, v2^N2, v3^N3).

    Without explicit exponents, each N_i is the smallest power not above
    the cap admitting a certificate.  `reverse_ansatz` flips the ansatz
    monomial order, steering the solver to a different valid H when the
    certificate is not unique.
    """
    if len(f) != 3 or len(names) != 3:
        raise ResidueError("exactly three denominators and three variables required")
    weights = _recover_weights(f, names)
    rows: List[List[Poly]] = []
    found: List[int] = []
    for i in range(3):
        wanted = None if exponents is None else exponents[i]
        row = None
        n = wanted if wanted is not None else 1
        while n <= degree_cap:
            row = _solve_power_certificate(f, names, weights, i, n, reverse_ansatz)
            if row is not None or wanted is not None:
                break
            n += 1
        if row is None:
            raise ResidueError(
                f"no power of {names[i]} up to {degree_cap} lies in the ideal"
            )
        rows.append(row)
        found.append(n)
    lift = CofactorLift(tuple(names), tuple(found), tuple(tuple(r) for r in rows))
    _assert_lift(lift, f)
    return lift


def _assert_lift(lift: CofactorLift, f: Sequence[Poly]) -> None:
    vt = f[0].vt
    for i in range(3):
        acc = Poly.zero(vt)
        for j in range(3):
            acc = acc + lift.matrix[i][j] * f[j]
        mono = [0] * len(vt)
        mono[vt.index(lift.vars[i])] = lift.exponents[i]
        if acc != Poly(vt, {tuple(mono): Fraction(1)}):
            raise ResidueError("cofactor identity violated")


def grothendieck_residue(
    g: Poly,
    f: Sequence[Poly],
    names: Sequence[str],
    lift: Optional[CofactorLift] = None,
    degree_cap: int = 24,
) -> Poly:
    """Res[g dv/(f1,f2,f3)]: coefficient of v^(N-1) in g*det(H)."""
    if lift is None:
        lift = cofactor_lift(f, names, degree_cap)
    vt = g.vt
    det = lift.determinant()
    if det.vt != vt:
        det = det.convert(vt, None)
    total = g * det
    key = [0] * len(vt)
    for name, n in zip(lift.vars, lift.exponents):
        key[vt.index(name)] = n - 1
    groups = total.coefficients_wrt(names)
    return groups.get(tuple(key), Poly.zero(vt))


@dataclass(frozen=True)
class QdimResult:
    value: Poly
    side: str
    lift: CofactorLift


def _degree_cap_for(potential: Poly) -> int:
    cap = 0
    for mono in potential.monomials():
        cap = max(cap, max(mono))
    return 3 * cap + 3


def _qdim(
    m: MatrixFactorization,
    v_in: Poly,
    w_out: Poly,
    side: str,
    lift: Optional[CofactorLift] = None,
) -> QdimResult:
    sources = v_in.support_vars()
    targets = w_out.support_vars()
    if len(sources) != 3 or len(targets) != 3:
        raise ResidueError("each potential must involve exactly three variables")
    prod = derivative_matrix_product(m, tuple(sources) + tuple(targets))
    s = supertrace(prod)
    if side == "left":
        over, against = targets, w_out
    else:
        over, against = sources, v_in
    partials = [against.partial(v) for v in over]
    if lift is None:
        lift = cofactor_lift(partials, over, _degree_cap_for(against))
    value = grothendieck_residue(s, partials, over, lift)
    ring_left = [v for v in value.support_vars() if v in m.vt.ring_vars]
    if ring_left:
        raise ResidueError(f"qdim_{side} retains ring variables {ring_left}")
    return QdimResult(value, side, lift)


def qdim_left(
    m: MatrixFactorization, v_in: Poly, w_out: Poly, lift: Optional[CofactorLift] = None
) -> QdimResult:
    return _qdim(m, v_in, w_out, "left", lift)


def qdim_right(
    m: MatrixFactorization, v_in: Poly, w_out: Poly, lift: Optional[CofactorLift] = None
) -> QdimResult:
    return _qdim(m, v_in, w_out, "right", lift)
