"""The 8x8 twisted differential built from six generating entries.

Rows and columns 1..4 are even, 5..8 odd; the matrix is nonzero only in
the two off-diagonal 4x4 blocks.  Writing a=d15, b=d16, c=d17, p=d25,
q=d26, s=d35, the imposed sign relations place the six generators as

    top block A (rows 1-4, cols 5-8)      bottom block B (rows 5-8, cols 1-4)
        ( a  b  c  0 )                        ( q -b -c  0 )
        ( p  q  0  c )                        (-p  a  0 -c )
        ( s  0  q -b )                        (-s  0  a  b )
        ( 0  s -p  a )                        ( 0 -s  p  q )

and the square is then the scalar matrix
(d15*d26 - d16*d25 - d17*d35) * Id for any six entries whatsoever; the
factorization condition is that this scalar reduce to a fixed sign times
the difference of potentials modulo the parameter constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ._groebner import groebner_basis, normal_form
from ._linalg import solve_dense
from .grading import VariableWeights
from .polyring import Poly, VarTable

Matrix8 = Tuple[Tuple[Poly, ...], ...]

ENTRY_NAMES = ("d15", "d16", "d17", "d25", "d26", "d35")


class MatFacError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixFactorization:
    vt: VarTable
    six: Tuple[Poly, Poly, Poly, Poly, Poly, Poly]  # d15,d16,d17,d25,d26,d35
    matrix: Matrix8

    def entry(self, name: str) -> Poly:
        return self.six[ENTRY_NAMES.index(name)]

    def nonzero_cells(self) -> int:
        return sum(1 for row in self.matrix for p in row if not p.is_zero())


def build_8x8(six: Sequence[Poly]) -> MatrixFactorization:
    if len(six) != 6:
        raise MatFacError("exactly six generating entries required")
    a, b, c, p, q, s = six
    vt = a.vt
    for e in six:
        if e.vt != vt:
            raise MatFacError("entries must share one variable table")
    z = Poly.zero(vt)
    top = (
        (a, b, c, z),
        (p, q, z, c),
        (s, z, q, -b),
        (z, s, -p, a),
    )
    bottom = (
        (q, -b, -c, z),
        (-p, a, z, -c),
        (-s, z, a, b),
        (z, -s, p, q),
    )
    rows: List[Tuple[Poly, ...]] = []
    for i in range(4):
        rows.append((z, z, z, z) + top[i])
    for i in range(4):
        rows.append(bottom[i] + (z, z, z, z))
    return MatrixFactorization(vt, tuple(six), tuple(rows))


def matmul(x: Matrix8, y: Matrix8) -> Matrix8:
    n = len(x)
    out: List[Tuple[Poly, ...]] = []
    for i in range(n):
        row: List[Poly] = []
        for j in range(n):
            acc = None
            for k in range(n):
                if x[i][k].is_zero() or y[k][j].is_zero():
                    continue
                term = x[i][k] * y[k][j]
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else Poly.zero(x[0][0].vt))
        out.append(tuple(row))
    return tuple(out)


def square(m: MatrixFactorization) -> Matrix8:
    return matmul(m.matrix, m.matrix)


def square_scalar(m: MatrixFactorization) -> Poly:
    """The single scalar the square equals: d15*d26 - d16*d25 - d17*d35."""
    a, b, c, p, q, s = m.six
    return a * q - b * p - c * s


@dataclass(frozen=True)
class PotentialReport:
    ok: bool
    epsilon: Optional[int]
    off_diagonal_zero: bool
    diagonal_uniform: bool
    failing: Tuple[str, ...] = ()

    def message(self) -> str:
        if self.ok:
            return f"square = ({self.epsilon:+d})*(difference)*Id modulo constraints"
        return "; ".join(self.failing) or "verification failed"


def verify_potential(
    m: MatrixFactorization,
    v_in: Poly,
    w_out: Poly,
    constraint_ideal: Sequence[Poly],
    spair_cap: int = 50000,
) -> PotentialReport:
    """Check square(m) = epsilon*(w_out - v_in)*Id modulo the ideal.

    Off-diagonal cells must vanish exactly, with no reduction; the
    diagonal residual is reduced coefficient-by-coefficient (over ring
    monomials) against a Groebner basis of the constraint ideal.
    """
    sq = square(m)
    failing: List[str] = []
    off_ok = True
    for i in range(8):
        for j in range(8):
            if i != j and not sq[i][j].is_zero():
                off_ok = False
                failing.append(f"off-diagonal cell ({i + 1},{j + 1}) nonzero")
    diag = [sq[i][i] for i in range(8)]
    diag_ok = all(d == diag[0] for d in diag)
    if not diag_ok:
        failing.append("diagonal cells disagree")
    delta = w_out - v_in
    basis = groebner_basis([g for g in constraint_ideal], spair_cap=spair_cap)
    epsilon: Optional[int] = None
    if off_ok and diag_ok:
        for eps in (1, -1):
            residual = diag[0] - delta.scale(Fraction(eps))
            coeffs = residual.coefficients_wrt(m.vt.ring_vars)
            if all(normal_form(c, basis).is_zero() for c in coeffs.values()):
                epsilon = eps
                break
        if epsilon is None:
            failing.append("diagonal residual not in the constraint ideal for either sign")
    ok = off_ok and diag_ok and epsilon is not None
    return PotentialReport(ok, epsilon, off_ok, diag_ok, tuple(failing))


@dataclass(frozen=True)
class GradingReport:
    ok: bool
    entry_degrees: Dict[str, Fraction]
    parameter_degrees: Dict[str, Fraction]
    pair_sums: Dict[str, Fraction]
    failing: Tuple[str, ...] = ()


def grading_check(m: MatrixFactorization, combined: VariableWeights) -> GradingReport:
    """Infer a rational degree for each parameter and each generator.

    One linear equation per term: ring weight of the term plus the
    parameter degrees it carries equals its generator's degree.  The
    joint system must be solvable (free unknowns default to 0), and the
    complementary pairs (d15,d26), (d16,d25), (d17,d35) must then have
    degrees summing to 2.
    """
    weights = combined.as_dict()
    vt = m.vt
    params = vt.param_vars
    n_params = len(params)
    param_col = {p: i for i, p in enumerate(params)}
    col_w = [Fraction(weights.get(n, 0)) if n not in param_col else None for n in vt.names]
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    failing: List[str] = []
    for k, (name, p) in enumerate(zip(ENTRY_NAMES, m.six)):
        if p.is_zero():
            failing.append(f"{name} is zero")
            continue
        for mono in p.monomials():
            row = [Fraction(0)] * (n_params + len(ENTRY_NAMES))
            ring_part = Fraction(0)
            for i, e in enumerate(mono):
                if not e:
                    continue
                w = col_w[i]
                if w is None:
                    row[param_col[vt.names[i]]] += e
                else:
                    ring_part += w * e
            row[n_params + k] = Fraction(-1)
            rows.append(row)
            rhs.append(-ring_part)
    solution = solve_dense(rows, rhs) if rows else None
    entry_degrees: Dict[str, Fraction] = {}
    parameter_degrees: Dict[str, Fraction] = {}
    pair_sums: Dict[str, Fraction] = {}
    if solution is None:
        failing.append("no degree assignment makes every generator homogeneous")
    else:
        parameter_degrees = {p: solution[i] for p, i in param_col.items()}
        entry_degrees = {n: solution[n_params + k] for k, n in enumerate(ENTRY_NAMES)}
        for left, right in (("d15", "d26"), ("d16", "d25"), ("d17", "d35")):
            total = entry_degrees[left] + entry_degrees[right]
            pair_sums[f"{left}+{right}"] = total
            if total != 2:
                failing.append(f"deg {left} + deg {right} = {total}, want 2")
    return GradingReport(not failing, entry_degrees, parameter_degrees, pair_sums, tuple(failing))
