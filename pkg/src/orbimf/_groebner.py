"""Buchberger's algorithm, normal forms, and Sylvester resultants.

Everything runs over Q with the degrevlex order fixed by the VarTable.
The basis computation applies the coprimality and chain criteria and a
normal selection strategy (smallest lcm first); work is bounded by an
S-pair budget so a runaway system fails loudly instead of hanging.

The resultant uses fraction-free Bareiss elimination on the Sylvester
matrix; the exact divisions it requires are performed by leading-term
peeling, which must terminate with remainder zero for intermediate
Bareiss entries.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .polyring import Monomial, Poly, degrevlex_key

_ZERO = Fraction(0)


class BudgetExceeded(RuntimeError):
    """S-pair budget exhausted before the basis stabilized."""


def _lead(p: Poly) -> Tuple[Monomial, Fraction]:
    lm = p.leading_monomial()
    return lm, p.coefficient(lm)


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_sub(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def _mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _heap_key(m: Monomial):
    """degrevlex_key negated componentwise, so a min-heap pops the
    largest monomial first."""
    return (-sum(m), tuple(e for e in reversed(m)))


def _normalized_tails(basis: Sequence[Poly]):
    """Per divisor: leading monomial plus the monic tail as an item list."""
    out = []
    for g in basis:
        glm, glc = _lead(g)
        tail = [(gm, gc / glc) for gm, gc in g.terms() if gm != glm]
        out.append((glm, tail))
    return out


def _reduce_by(coeffs: dict, divisors) -> dict:
    """Full reduction of the term dict against (lead, monic tail) pairs.

    Consumes `coeffs`; returns the remainder dict.  Terms are visited
    largest-first through a lazily deduplicated heap.
    """
    heap = [(_heap_key(m), m) for m in coeffs]
    heapq.heapify(heap)
    remainder: dict = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = coeffs.pop(m, _ZERO)
        if not c:
            continue
        for glm, tail in divisors:
            if _divides(glm, m):
                shift = _mono_sub(m, glm)
                for gm, gc in tail:
                    t = _mono_mul(gm, shift)
                    old = coeffs.get(t)
                    if old is None:
                        v = -c * gc
                        if v:
                            coeffs[t] = v
                            heapq.heappush(heap, (_heap_key(t), t))
                    else:
                        v = old - c * gc
                        if v:
                            coeffs[t] = v
                        else:
                            del coeffs[t]
                break
        else:
            remainder[m] = c
    return remainder


def normal_form(p: Poly, basis: Sequence[Poly]) -> Poly:
    """Fully reduced remainder of p modulo the basis (zero iff member,
    when the basis is Groebner)."""
    divisors = [d for d in _normalized_tails(b for b in basis if not b.is_zero())]
    if not divisors:
        return p
    coeffs = {m: c for m, c in p.terms()}
    return Poly(p.vt, _reduce_by(coeffs, divisors))


def _monic(p: Poly) -> Poly:
    _, lc = _lead(p)
    return p.scale(1 / lc)


def _spoly_dict(fi, fj) -> dict:
    """Term dict of the S-polynomial from two (lead, tail) records."""
    (mi, tail_i), (mj, tail_j) = fi, fj
    lcm = _mono_lcm(mi, mj)
    si, sj = _mono_sub(lcm, mi), _mono_sub(lcm, mj)
    out: dict = {}
    for gm, gc in tail_i:
        t = _mono_mul(gm, si)
        v = out.get(t, _ZERO) + gc
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    for gm, gc in tail_j:
        t = _mono_mul(gm, sj)
        v = out.get(t, _ZERO) - gc
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def groebner_basis(gens: Iterable[Poly], spair_cap: int = 50000) -> List[Poly]:
    """Reduced Groebner basis of the given generators (degrevlex)."""
    vt = None
    basis: List[Poly] = []
    for g in gens:
        if not g.is_zero():
            basis.append(_monic(g))
            vt = g.vt
    if not basis:
        return []
    leads: List[Monomial] = []
    divisors = []  # (lead monomial, monic tail items), aligned with basis
    for g in basis:
        glm, tail = _normalized_tails([g])[0]
        leads.append(glm)
        divisors.append((glm, tail))

    pending: List[Tuple[tuple, Tuple[int, int]]] = []  # (key of lcm, (i, j))
    processed = set()

    def queue_pair(i: int, j: int) -> None:
        lcm = _mono_lcm(leads[i], leads[j])
        if lcm == _mono_mul(leads[i], leads[j]):  # coprime leads
            processed.add((i, j))
            return
        heapq.heappush(pending, (degrevlex_key(lcm), (i, j)))

    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            queue_pair(i, j)
    spent = 0
    while pending:
        _, (i, j) = heapq.heappop(pending)
        processed.add((i, j))
        spent += 1
        if spent > spair_cap:
            raise BudgetExceeded(f"S-pair budget of {spair_cap} exhausted")
        lcm = _mono_lcm(leads[i], leads[j])
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if not _divides(leads[k], lcm):
                continue
            pik = (min(i, k), max(i, k))
            pjk = (min(j, k), max(j, k))
            if pik in processed and pjk in processed:
                skip = True
                break
        if skip:
            continue
        remainder = _reduce_by(_spoly_dict(divisors[i], divisors[j]), divisors)
        if not remainder:
            continue
        r = _monic(Poly(vt, remainder))
        basis.append(r)
        new = len(basis) - 1
        glm, tail = _normalized_tails([r])[0]
        leads.append(glm)
        divisors.append((glm, tail))
        for k in range(new):
            queue_pair(k, new)
    return interreduce(basis)


def interreduce(basis: Sequence[Poly]) -> List[Poly]:
    """Reduce each element against the rest; drop redundancies."""
    work = [p for p in basis if not p.is_zero()]
    # Drop elements whose lead another lead divides (ties: keep one copy).
    work.sort(key=lambda p: degrevlex_key(p.leading_monomial()))
    kept: List[Poly] = []
    for p in work:
        lm = p.leading_monomial()
        if any(_divides(q.leading_monomial(), lm) for q in kept):
            continue
        kept.append(p)
    changed = True
    while changed:
        changed = False
        for i in range(len(kept)):
            others = kept[:i] + kept[i + 1:]
            r = normal_form(kept[i], others) if others else kept[i]
            if r.is_zero():
                kept.pop(i)
                changed = True
                break
            r = _monic(r)
            if r != kept[i]:
                kept[i] = r
                changed = True
                break
    return sorted(kept, key=lambda p: degrevlex_key(p.leading_monomial()))


def is_member(p: Poly, basis: Sequence[Poly]) -> bool:
    return normal_form(p, basis).is_zero()


# ---------------------------------------------------------------------
# resultants


def _divide_exact(f: Poly, g: Poly) -> Poly:
    """Quotient f/g when the division is exact (leading-term peeling)."""
    vt = f.vt
    quot = Poly.zero(vt)
    glm, glc = _lead(g)
    while not f.is_zero():
        flm, flc = _lead(f)
        if not _divides(glm, flm):
            raise ArithmeticError("division is not exact")
        t = Poly(vt, {_mono_sub(flm, glm): flc / glc})
        quot = quot + t
        f = f - t * g
    return quot


def _univariate_coeffs_in(p: Poly, var: str) -> List[Poly]:
    """Coefficients of p as a polynomial in var, low to high, as Polys."""
    vt = p.vt
    i = vt.index(var)
    deg = p.degree_in(var)
    buckets: List[dict] = [dict() for _ in range(deg + 1)]
    for m, c in p.terms():
        rest = m[:i] + (0,) + m[i + 1:]
        buckets[m[i]][rest] = buckets[m[i]].get(rest, _ZERO) + c
    return [Poly(vt, b) for b in buckets]


def _bareiss_determinant(matrix: List[List[Poly]], vt) -> Poly:
    n = len(matrix)
    if n == 0:
        return Poly.const(vt, 1)
    m = [row[:] for row in matrix]
    sign = 1
    prev = Poly.const(vt, 1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = next((r for r in range(k + 1, n) if not m[r][k].is_zero()), None)
            if pivot_row is None:
                return Poly.zero(vt)
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = _divide_exact(num, prev) if not num.is_zero() else num
            m[i][k] = Poly.zero(vt)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant(p: Poly, q: Poly, var: str) -> Poly:
    """Sylvester resultant eliminating var; result does not involve var."""
    if p.is_zero() or q.is_zero():
        return Poly.zero(p.vt)
    a = _univariate_coeffs_in(p, var)
    b = _univariate_coeffs_in(q, var)
    m, n = len(a) - 1, len(b) - 1
    if m == 0 and n == 0:
        return Poly.const(p.vt, 1)
    if m == 0:
        return a[0] ** n
    if n == 0:
        return b[0] ** m
    vt = p.vt
    size = m + n
    zero = Poly.zero(vt)
    rows: List[List[Poly]] = []
    for shift in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(a)):
            row[shift + k] = c
        rows.append(row)
    for shift in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(b)):
            row[shift + k] = c
        rows.append(row)
    return _bareiss_determinant(rows, vt)
