"""Parameter constraints from the squaring identity, and their consumers.

Squaring the twisted differential leaves a residual square(d) - eps*delta*Id
whose cells are polynomials in the ring variables with coefficients in the
parameters; those coefficients generate the constraint ideal.  Everything
downstream works with that ideal: membership tests against the printed
generating sets, verification of shipped solution families inside their
quotient rings, non-vanishing certificates for quantum dimensions at
concrete points, and a resultant-based elimination oracle that rediscovers
one-parameter relations without touching the Groebner machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ._groebner import BudgetExceeded, groebner_basis, normal_form, resultant
from .catalog import EquivalenceEntry, SolutionFamily
from .matfac import build_8x8, square
from .numberfield import (
    NonzeroCertificate,
    NumberFieldError,
    QuotientElem,
    QuotientSpec,
    reduce as quotient_reduce,
    certify_value,
)
from .polyring import Poly, VarTable, format_poly, parse_poly
from .residue import qdim_left, qdim_right

__all__ = [
    "ConstraintSet",
    "derive_constraints",
    "paper_constraint_set",
    "groebner",
    "normal_form",
    "IdealComparison",
    "ideal_compare",
    "eliminate_linear",
    "FamilyReport",
    "verify_family",
    "QdimAtPoint",
    "NonvanishingReport",
    "nonvanishing_check",
    "computed_qdim",
    "QdimMatch",
    "QdimComparison",
    "compare_qdims",
    "CandidateRelation",
    "OracleReport",
    "OracleBudgetExceeded",
    "bruteforce_family_oracle",
    "BudgetExceeded",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _degrevlex_lead(p: Poly) -> Tuple[Tuple[int, ...], Fraction]:
    best = None
    for mono, coeff in p.terms():
        key = (sum(mono), tuple(-e for e in reversed(mono)))
        if best is None or key > best[0]:
            best = (key, mono, coeff)
    assert best is not None
    return best[1], best[2]


def _unit_normalize(p: Poly) -> Poly:
    """Integer coefficients with content 1 and positive leading sign."""
    den = 1
    for _, c in p.terms():
        den = den * c.denominator // gcd(den, c.denominator)
    num = 0
    for _, c in p.terms():
        num = gcd(num, abs((c * den).numerator))
    scaled = p.scale(Fraction(den, num))
    _, lead = _degrevlex_lead(scaled)
    return scaled.scale(-1) if lead < 0 else scaled


@dataclass(frozen=True)
class ConstraintSet:
    """Deduplicated, unit-normalized generators of a parameter ideal."""

    generators: Tuple[Poly, ...]
    provenance: str  # "derived" | "paper"
    epsilon: Optional[int] = None

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.is_zero():
                raise ValueError("constraint generators must be nonzero")

    @staticmethod
    def from_polys(
        gens: Sequence[Poly], provenance: str, epsilon: Optional[int] = None
    ) -> "ConstraintSet":
        seen: Dict[tuple, Poly] = {}
        for g in gens:
            if g.is_zero():
                continue
            n = _unit_normalize(g)
            seen.setdefault(tuple(sorted(n.terms())), n)
        ordered = sorted(
            seen.items(), key=lambda kv: (max(sum(m) for m, _ in kv[0]), kv[0])
        )
        return ConstraintSet(tuple(p for _, p in ordered), provenance, epsilon)

    def texts(self) -> Tuple[str, ...]:
        return tuple(format_poly(g) for g in self.generators)


def derive_constraints(entry: EquivalenceEntry) -> ConstraintSet:
    """Coefficients, over ring monomials, of square(d) - eps*(difference)*Id.

    The sign eps is detected by trying +1 then -1 and keeping the first
    choice whose residual system contains no nonzero constant (a constant
    generator makes the system unsolvable, so the sign must be wrong).
    An empty generator list means the identity holds for all parameters.
    """
    m = build_8x8(entry.six())
    sq = square(m)
    delta = entry.difference()
    ring = entry.vt.ring_vars
    first: Optional[List[Poly]] = None
    for eps in (1, -1):
        gens: List[Poly] = []
        impossible = False
        for i in range(8):
            for j in range(8):
                cell = sq[i][j]
                if i == j:
                    cell = cell - delta.scale(Fraction(eps))
                if cell.is_zero():
                    continue
                for coeff in cell.coefficients_wrt(ring).values():
                    if coeff.is_zero():
                        continue
                    if not coeff.support_vars():
                        impossible = True
                    gens.append(coeff)
        if not impossible:
            return ConstraintSet.from_polys(gens, "derived", epsilon=eps)
        if first is None:
            first = gens
    # neither sign admits solutions; expose the +1 residual for inspection
    return ConstraintSet.from_polys(first or [], "derived", epsilon=1)


def paper_constraint_set(entry: EquivalenceEntry) -> ConstraintSet:
    return ConstraintSet.from_polys(entry.paper_constraints(), "paper")


def groebner(
    constraints: Union[ConstraintSet, Sequence[Poly]], spair_cap: int = 50000
) -> List[Poly]:
    gens = (
        list(constraints.generators)
        if isinstance(constraints, ConstraintSet)
        else list(constraints)
    )
    return groebner_basis(gens, spair_cap=spair_cap)


@dataclass(frozen=True)
class IdealComparison:
    a_in_b: bool
    b_in_a: bool
    failing_a: Tuple[Poly, ...]  # generators of A outside the ideal of B
    failing_b: Tuple[Poly, ...]

    @property
    def equal(self) -> bool:
        return self.a_in_b and self.b_in_a


def ideal_compare(
    a: ConstraintSet,
    b: ConstraintSet,
    spair_cap: int = 50000,
    basis_a: Optional[Sequence[Poly]] = None,
    basis_b: Optional[Sequence[Poly]] = None,
) -> IdealComparison:
    """Two-way membership of generators, so transformed generating sets of
    one ideal still compare as equal.  Precomputed bases are reusable."""
    if basis_b is None:
        basis_b = groebner(b, spair_cap)
    if basis_a is None:
        basis_a = groebner(a, spair_cap)
    failing_a = tuple(
        g for g in a.generators if not normal_form(g, basis_b).is_zero()
    )
    failing_b = tuple(
        g for g in b.generators if not normal_form(g, basis_a).is_zero()
    )
    return IdealComparison(not failing_a, not failing_b, failing_a, failing_b)


def eliminate_linear(
    constraints: ConstraintSet, name: str
) -> Tuple[ConstraintSet, Poly]:
    """Remove a parameter that some generator pins down linearly with a
    constant coefficient; returns the reduced set and the solved value.

    Substituting the solved value is an isomorphism onto the smaller
    parameter ring, so ideal comparisons survive the move.
    """
    for g in constraints.generators:
        if g.degree_in(name) != 1:
            continue
        width = len(g.vt)
        i = g.vt.index(name)
        groups = g.coefficients_wrt([name])
        lin = groups.get(tuple(1 if j == i else 0 for j in range(width)))
        if lin is None or lin.support_vars():
            continue
        rest = groups.get((0,) * width, Poly.zero(g.vt))
        solved = rest.scale(Fraction(-1) / lin.constant_value())
        reduced = [
            h.substitute({name: solved}) for h in constraints.generators if h is not g
        ]
        return (
            ConstraintSet.from_polys(reduced, constraints.provenance, constraints.epsilon),
            solved,
        )
    raise ValueError(f"no generator is linear in {name!r} with a constant coefficient")


# -- solution families -------------------------------------------------


@dataclass(frozen=True)
class _FamilyRing:
    spec: QuotientSpec
    bindings: Dict[str, Poly]  # every entry parameter, frees map to themselves


def _family_ring(entry: EquivalenceEntry, family: SolutionFamily) -> _FamilyRing:
    gen_names = tuple(g for g, _ in family.generators)
    extra = tuple(v for v in family.free if v not in gen_names)
    names = gen_names + extra
    qvt = VarTable(names, param_vars=names)
    mps = tuple(parse_poly(text, qvt) for _, text in family.generators)
    spec = QuotientSpec(qvt, gen_names, mps, family.is_field)
    bindings: Dict[str, Poly] = {}
    for p in entry.parameters:
        if p in family.bindings:
            bindings[p] = parse_poly(family.bindings[p], qvt)
        else:
            bindings[p] = Poly.var(qvt, p)
    return _FamilyRing(spec, bindings)


@dataclass(frozen=True)
class FamilyReport:
    entry_id: str
    label: str
    ok: bool
    checked: int
    failures: Tuple[Tuple[str, str], ...]  # (generator, nonzero residue)


def verify_family(
    entry: EquivalenceEntry,
    family: SolutionFamily,
    constraints: Optional[ConstraintSet] = None,
) -> FamilyReport:
    """Substitute the family's bindings into every derived constraint and
    reduce in its quotient ring; each residue must vanish identically in
    the remaining free parameters."""
    cs = constraints if constraints is not None else derive_constraints(entry)
    ring = _family_ring(entry, family)
    failures: List[Tuple[str, str]] = []
    for g in cs.generators:
        residue = quotient_reduce(g.substitute(ring.bindings), ring.spec)
        if not residue.is_zero():
            failures.append((format_poly(g), format_poly(residue.rep)))
    return FamilyReport(entry.id, family.label, not failures, len(cs.generators), tuple(failures))


# -- quantum dimensions ------------------------------------------------


def computed_qdim(entry: EquivalenceEntry, side: str) -> Poly:
    """Residue-computed quantum dimension; a polynomial in the parameters."""
    if side not in ("left", "right"):
        raise ValueError("side must be left or right")
    m = build_8x8(entry.six())
    fn = qdim_left if side == "left" else qdim_right
    return fn(m, entry.potential_in(), entry.potential_out()).value


@dataclass(frozen=True)
class QdimAtPoint:
    origin: str  # "computed" | "printed"
    value: str
    certificate: Optional[NonzeroCertificate]
    error: Optional[str] = None

    @property
    def nonzero(self) -> bool:
        return self.certificate is not None and self.certificate.status in (
            "nonzero_exact",
            "nonzero_interval",
        )


@dataclass(frozen=True)
class NonvanishingReport:
    entry_id: str
    label: str
    side: str
    point: Tuple[Tuple[str, str], ...]  # free parameter -> value text
    computed: QdimAtPoint
    printed: QdimAtPoint

    @property
    def ok(self) -> bool:
        return self.computed.nonzero

    @property
    def excluded(self) -> bool:
        cert = self.computed.certificate
        return cert is not None and cert.status == "zero"

    @property
    def agree(self) -> bool:
        """Do the computed invariant and the printed closed form classify
        the point the same way (zero vs nonzero)?"""
        pc = self.printed.certificate
        cc = self.computed.certificate
        if pc is None or cc is None:
            return False
        return (pc.status == "zero") == (cc.status == "zero")


def _certify_at(
    elem: QuotientElem, family: SolutionFamily, origin: str, precision_bits: int
) -> QdimAtPoint:
    try:
        cert = certify_value(elem, family.root_choice, start_bits=precision_bits)
        return QdimAtPoint(origin, format_poly(elem.rep), cert)
    except NumberFieldError as exc:
        return QdimAtPoint(origin, format_poly(elem.rep), None, str(exc))


def nonvanishing_check(
    entry: EquivalenceEntry,
    family: SolutionFamily,
    side: str,
    point: Optional[Mapping[str, str]] = None,
    precision_bits: int = 128,
    computed_value: Optional[Poly] = None,
) -> NonvanishingReport:
    """Certify the quantum dimension nonzero at one concrete family point.

    Free parameters take values from `point`, falling back to the family's
    defaults.  The certificate that decides inclusion comes from the
    residue-computed invariant; the printed closed form is evaluated at
    the same point and reported next to it.  A zero computed value means
    the point is excluded, exactly the situation the catalog's discard
    notes describe.  Exact quotient fields certify by representation,
    anything else by an interval around the declared root.
    """
    if computed_value is None:
        computed_value = computed_qdim(entry, side)
    ring = _family_ring(entry, family)
    chosen: Dict[str, str] = {}
    for free in family.free:
        if point and free in point:
            chosen[free] = str(point[free])
        else:
            chosen[free] = str(family.default_value(free))
    free_map = {f: parse_poly(t, ring.spec.vt) for f, t in chosen.items()}

    def at_point(p: Poly) -> QuotientElem:
        q = p.substitute(ring.bindings)
        if free_map:
            q = q.substitute(free_map)
        return quotient_reduce(q, ring.spec)

    computed = _certify_at(at_point(computed_value), family, "computed", precision_bits)
    printed = _certify_at(at_point(entry.paper_qdim(side)), family, "printed", precision_bits)
    return NonvanishingReport(
        entry.id, family.label, side, tuple(sorted(chosen.items())), computed, printed
    )


@dataclass(frozen=True)
class QdimMatch:
    printed_side: str
    status: str  # "exact" | "exact_mod_ideal" | "unit_multiple" | "unmatched"
    matched_side: Optional[str]
    scalar: Optional[Fraction]
    mod_ideal: bool

    @property
    def matched(self) -> bool:
        return self.status != "unmatched"

    def passes(self, allow_unit: bool = False) -> bool:
        if self.status in ("exact", "exact_mod_ideal"):
            return True
        return allow_unit and self.status == "unit_multiple"


@dataclass(frozen=True)
class QdimComparison:
    entry_id: str
    computed_left: Poly
    computed_right: Poly
    left: QdimMatch
    right: QdimMatch


def _scalar_ratio(a: Poly, b: Poly) -> Optional[Fraction]:
    """The constant lambda with a = lambda*b, if one exists and is nonzero."""
    if a.is_zero() or b.is_zero():
        return None
    ta = dict(a.terms())
    tb = dict(b.terms())
    if set(ta) != set(tb):
        return None
    lam: Optional[Fraction] = None
    for mono, cb in tb.items():
        r = ta[mono] / cb
        if lam is None:
            lam = r
        elif lam != r:
            return None
    return lam


def compare_qdims(
    entry: EquivalenceEntry,
    basis: Optional[Sequence[Poly]] = None,
    spair_cap: int = 50000,
) -> QdimComparison:
    """Match each printed quantum-dimension formula against the computed
    invariants: exact equality first, then equality modulo the derived
    ideal, then a global nonzero rational multiple (scalar recorded), each
    tried on the same-name side before the opposite one."""
    if basis is None:
        basis = groebner(derive_constraints(entry), spair_cap)
    cl = computed_qdim(entry, "left")
    cr = computed_qdim(entry, "right")

    def match(side: str) -> QdimMatch:
        printed = entry.paper_qdim(side)
        order = [("left", cl), ("right", cr)]
        if side == "right":
            order.reverse()
        for name, comp in order:
            if printed == comp:
                return QdimMatch(side, "exact", name, _ONE, False)
        for name, comp in order:
            if normal_form(printed - comp, basis).is_zero():
                return QdimMatch(side, "exact_mod_ideal", name, _ONE, True)
        for name, comp in order:
            lam = _scalar_ratio(printed, comp)
            if lam is not None:
                return QdimMatch(side, "unit_multiple", name, lam, False)
        for name, comp in order:
            lam = _scalar_ratio(normal_form(printed, basis), normal_form(comp, basis))
            if lam is not None:
                return QdimMatch(side, "unit_multiple", name, lam, True)
        return QdimMatch(side, "unmatched", None, None, False)

    return QdimComparison(entry.id, cl, cr, match("left"), match("right"))


# -- resultant elimination oracle ---------------------------------------


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CandidateRelation:
    parameter: str
    minimal_poly: Poly  # squarefree, unit-normalized
    refuted: bool  # some generator reduced to a nonzero constant
    fully_satisfied: bool  # every generator reduced to zero


@dataclass(frozen=True)
class OracleReport:
    entry_id: str
    assignments: Tuple[Tuple[str, str], ...]
    candidates: Tuple[CandidateRelation, ...]
    inconsistent: bool
    notes: Tuple[str, ...]


def _dense_coeffs(p: Poly, name: str) -> List[Fraction]:
    other = [v for v in p.support_vars() if v != name]
    if other:
        raise ValueError(f"not univariate in {name!r}: {other}")
    i = p.vt.index(name)
    out = [_ZERO] * (p.degree_in(name) + 1)
    for mono, c in p.terms():
        out[mono[i]] += c
    return out


def _from_dense(coeffs: Sequence[Fraction], name: str, vt: VarTable) -> Poly:
    i = vt.index(name)
    width = len(vt)
    terms = {}
    for e, c in enumerate(coeffs):
        if c:
            terms[tuple(e if j == i else 0 for j in range(width))] = c
    return Poly(vt, terms)


def _dense_trim(a: List[Fraction]) -> List[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _dense_rem(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = list(a)
    while len(a) >= len(b) and _dense_trim(a):
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k in range(len(b)):
            a[shift + k] -= factor * b[k]
        _dense_trim(a)
    return a


def _dense_gcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a, b = _dense_trim(list(a)), _dense_trim(list(b))
    while b:
        a, b = b, _dense_rem(a, b)
        _dense_trim(b)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _dense_div_exact(a: List[Fraction], b: List[Fraction]) -> Optional[List[Fraction]]:
    a = _dense_trim(list(a))
    q = [_ZERO] * (len(a) - len(b) + 1) if len(a) >= len(b) else []
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = factor
        for k in range(len(b)):
            a[shift + k] -= factor * b[k]
        _dense_trim(a)
    return None if a else q


def _squarefree_part(p: Poly, name: str) -> Poly:
    coeffs = _dense_coeffs(p, name)
    deriv = [coeffs[e] * e for e in range(1, len(coeffs))]
    g = _dense_gcd(coeffs, deriv)
    if len(g) <= 1:
        return p
    q = _dense_div_exact(coeffs, g)
    assert q is not None
    return _from_dense(q, name, p.vt)


def uni_divides(d: Poly, p: Poly, name: str) -> bool:
    """Does the univariate d divide the univariate p exactly?"""
    return _dense_div_exact(_dense_coeffs(p, name), _dense_coeffs(d, name)) is not None


def _total_degree(p: Poly) -> int:
    return max((sum(m) for m in p.monomials()), default=0)


def _project_onto(
    system: Sequence[Poly],
    target: str,
    to_eliminate: Sequence[str],
    degree_cap: int,
    term_cap: int,
    notes: List[str],
) -> Tuple[Optional[Poly], bool]:
    """Eliminate variables by Sylvester resultants against a minimal-degree
    pivot until only the target survives; gcd of the univariate outcomes.
    Returns (projection, inconsistent)."""
    work = list(system)
    pending = list(to_eliminate)
    while pending:
        # cheapest variable first: smallest pivot degree, then fewest users
        def cost(v: str) -> Tuple[int, int, str]:
            degs = [g.degree_in(v) for g in work if g.degree_in(v) > 0]
            if not degs:
                return (0, 0, v)
            return (min(degs), len(degs), v)

        pending.sort(key=cost)
        var = pending.pop(0)
        touching = [g for g in work if g.degree_in(var) > 0]
        rest = [g for g in work if g.degree_in(var) == 0]
        if not touching:
            continue
        pivot = min(
            touching,
            key=lambda g: (g.degree_in(var), len(dict(g.terms())), sorted(g.terms())),
        )
        new: List[Poly] = []
        for g in touching:
            if g is pivot:
                continue
            r = resultant(pivot, g, var)
            if r.is_zero():
                notes.append(f"dropped a zero resultant while eliminating {var}")
                continue
            if not r.support_vars():
                return None, True
            r = _unit_normalize(r)
            if _total_degree(r) > degree_cap or len(dict(r.terms())) > term_cap:
                raise OracleBudgetExceeded(
                    f"projection past {var} exceeds the degree/term budget"
                )
            new.append(r)
        seen: Dict[tuple, Poly] = {}
        for g in rest + new:
            seen.setdefault(tuple(sorted(g.terms())), g)
        work = list(seen.values())
        if not work:
            return None, False
    univariates = [g for g in work if set(g.support_vars()) <= {target}]
    univariates = [g for g in univariates if g.support_vars()]
    if not univariates:
        return None, False
    acc = _dense_coeffs(univariates[0], target)
    for g in univariates[1:]:
        acc = _dense_gcd(acc, _dense_coeffs(g, target))
        if len(acc) <= 1:
            return None, False  # projections only share a trivial consequence
    return _from_dense(acc, target, univariates[0].vt), False


def _monic_in(p: Poly, name: str) -> Poly:
    coeffs = _dense_coeffs(p, name)
    return _from_dense([c / coeffs[-1] for c in coeffs], name, p.vt)


def bruteforce_family_oracle(
    entry: EquivalenceEntry,
    assignments: Mapping[str, Union[str, int, Fraction]],
    keep: Optional[str] = None,
    degree_cap: int = 64,
    term_cap: int = 20000,
) -> OracleReport:
    """Rediscover one-parameter relations by resultant elimination.

    After fixing the given parameters to rationals, the derived system is
    projected onto each remaining parameter (or just `keep`) through
    successive Sylvester resultants; every resultant stays inside the
    ideal, so the surviving univariate is a true consequence.  Its
    squarefree part is the candidate relation, re-checked by reducing the
    substituted system modulo the candidate: a generator collapsing to a
    nonzero constant refutes it, and all generators vanishing means the
    candidate alone already satisfies the system.  No Groebner steps are
    involved, which is the point of the cross-check.
    """
    cs = derive_constraints(entry)
    amap = {k: parse_poly(str(v), entry.vt) for k, v in assignments.items()}
    fixed = tuple(sorted((k, str(v)) for k, v in assignments.items()))
    base: List[Poly] = []
    for g in cs.generators:
        s = g.substitute(amap) if amap else g
        if s.is_zero():
            continue
        if not s.support_vars():
            return OracleReport(entry.id, fixed, (), True, ("a fixed parameter choice contradicts the system",))
        base.append(s)
    remaining = [
        p
        for p in entry.parameters
        if p not in assignments and any(g.degree_in(p) > 0 for g in base)
    ]
    if keep is not None and keep not in remaining:
        return OracleReport(
            entry.id, fixed, (), False, (f"{keep} is already absent from the system",)
        )
    targets = [keep] if keep is not None else remaining
    notes: List[str] = []
    candidates: List[CandidateRelation] = []
    for target in targets:
        others = [v for v in remaining if v != target]
        try:
            proj, inconsistent = _project_onto(
                base, target, others, degree_cap, term_cap, notes
            )
        except OracleBudgetExceeded as exc:
            notes.append(f"{target}: {exc}")
            continue
        if inconsistent:
            return OracleReport(entry.id, fixed, (), True, tuple(notes))
        if proj is None:
            notes.append(f"{target}: no univariate consequence survived")
            continue
        candidate = _unit_normalize(_squarefree_part(proj, target))
        spec = QuotientSpec(
            entry.vt, (target,), (_monic_in(candidate, target),), is_field=False
        )
        refuted = False
        fully = True
        for g in base:
            residue = quotient_reduce(g, spec).rep
            if residue.is_zero():
                continue
            fully = False
            if not residue.support_vars():
                refuted = True
        candidates.append(CandidateRelation(target, candidate, refuted, fully))
    return OracleReport(entry.id, fixed, tuple(candidates), False, tuple(notes))
