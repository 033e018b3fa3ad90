"""Constraint derivation, ideal comparison, families, and qdim matching."""

from __future__ import annotations

from fractions import Fraction

import pytest

from orbimf._groebner import BudgetExceeded, normal_form
from orbimf.catalog import SolutionFamily, load_catalog
from orbimf.constraints import (
    ConstraintSet,
    bruteforce_family_oracle,
    compare_qdims,
    computed_qdim,
    derive_constraints,
    eliminate_linear,
    groebner,
    ideal_compare,
    nonvanishing_check,
    paper_constraint_set,
    uni_divides,
    verify_family,
)
from orbimf.polyring import VarTable, format_poly, parse_poly


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


# -- derivation ----------------------------------------------------------

DERIVED = {
    "E14v1_E14v2": ("c^8 + 4",),
    "U12v1_U12v3": (
        "a2^2*b2 - a2*b2^2 - 1",
        "a1^2*b1 - a1*b1^2 - 1",
        "a2^2*b1 + 2*a1*a2*b2 - 2*a2*b1*b2 - a1*b2^2",
        "2*a1*a2*b1 - a2*b1^2 + a1^2*b2 - 2*a1*b1*b2",
    ),
    "U12v2_U12v3": (
        "a2^2*b1 + 2*a1*a2*b2 - 2*a2*b1*b2 - a1*b2^2 - 1",
        "a1^2*b1 - a1*b1^2 - 1",
        "a2^2*b2 - a2*b2^2",
        "2*a1*a2*b1 - a2*b1^2 + a1^2*b2 - 2*a1*b1*b2",
    ),
    "W12v1_W12v2": (
        "2*a1*b1 - b1^2 - 2*a1*b2 + 2*b1*b2 - b2^2 + 2*a2",
        "a1^2 - a1*b1",
        "4*a1^3*b1 - 4*a1^2*b1^2 + a1*b1^3 + 4*a1^2*b1*b2 - 2*a1*b1^2*b2"
        " + a1*b1*b2^2 + 4*a1^2*a2 - 2*a1*a2*b1 + 2*a1*a2*b2 + a2^2 + 1",
    ),
    "Z13v1_Z13v2": ("c*d^3 - 1", "c^6 + 4"),
}

SHAPES = {
    # (terms, total degree) per generator, for the entries whose texts
    # are too long to inline
    "W13v1_W13v2": ((10, 3), (13, 4), (18, 4), (42, 6)),
    "Q12v1_Q12v2": ((2, 2), (5, 3), (10, 3), (18, 4), (16, 4), (23, 5)),
}


def test_derived_generators_frozen(catalog):
    for eid, texts in DERIVED.items():
        cs = derive_constraints(catalog[eid])
        assert cs.texts() == texts, eid
    for eid, shapes in SHAPES.items():
        cs = derive_constraints(catalog[eid])
        got = tuple((g.num_terms(), g.total_degree()) for g in cs.generators)
        assert got == shapes, eid


def test_epsilon_is_plus_one_everywhere(catalog):
    for entry in catalog.values():
        assert derive_constraints(entry).epsilon == 1, entry.id


def test_constraint_set_normalizes_and_dedupes():
    vt = VarTable(("x", "y"), param_vars=("x", "y"))
    gens = [
        parse_poly("2*x - 4*y", vt),
        parse_poly("-x + 2*y", vt),
        parse_poly("0", vt),
    ]
    cs = ConstraintSet.from_polys(gens, provenance="test")
    assert cs.texts() == ("x - 2*y",)
    assert cs.provenance == "test"


# -- ideal comparison ----------------------------------------------------


def test_two_way_equality_where_it_holds_raw(catalog):
    for eid in ("E14v1_E14v2", "U12v1_U12v3", "U12v2_U12v3", "Z13v1_Z13v2", "W13v1_W13v2"):
        entry = catalog[eid]
        cmp_ = ideal_compare(paper_constraint_set(entry), derive_constraints(entry))
        assert cmp_.a_in_b and cmp_.b_in_a, eid
        assert cmp_.equal
        assert not cmp_.failing_a and not cmp_.failing_b


def test_w12_needs_one_linear_elimination(catalog):
    entry = catalog["W12v1_W12v2"]
    derived = derive_constraints(entry)
    printed = paper_constraint_set(entry)
    raw = ideal_compare(printed, derived)
    # the derived system still carries the determined parameter a2
    assert raw.a_in_b and not raw.b_in_a
    reduced, solved = eliminate_linear(derived, "a2")
    assert format_poly(solved) == "-a1*b1 + 1/2*b1^2 + a1*b2 - b1*b2 + 1/2*b2^2"
    assert reduced.texts() == printed.texts()
    assert ideal_compare(printed, reduced).equal


def test_eliminate_linear_requires_linear_occurrence(catalog):
    entry = catalog["E14v1_E14v2"]
    cs = derive_constraints(entry)
    with pytest.raises(ValueError):
        eliminate_linear(cs, "c")  # only c^8 available


def test_groebner_budget_is_enforced(catalog):
    cs = derive_constraints(catalog["Q12v1_Q12v2"])
    with pytest.raises(BudgetExceeded):
        groebner(cs, spair_cap=5)


# -- solution families ----------------------------------------------------


def test_every_shipped_family_satisfies_derived_constraints(catalog):
    seen = []
    for entry in catalog.values():
        cs = derive_constraints(entry)
        for fam in entry.families:
            report = verify_family(entry, fam, cs)
            assert report.ok, (entry.id, fam.label, report.failures)
            assert report.checked == len(cs.generators)
            seen.append(fam.label)
    assert len(seen) == 12


def test_wrong_minimal_polynomial_is_caught(catalog):
    entry = catalog["E14v1_E14v2"]
    broken = SolutionFamily(
        label="broken",
        generators=(("c", "c^4 - 2*c^2 + 1"),),
        is_field=False,
        bindings={"c": "c"},
        free=("a1", "a2", "a3", "a4", "b1", "b2", "b3"),
        free_defaults={},
        root_choice={"c": ("1", "1")},
    )
    report = verify_family(entry, broken)
    assert not report.ok
    assert report.failures


# -- nonvanishing at concrete points --------------------------------------


def test_e14_family_point_certificates(catalog):
    entry = catalog["E14v1_E14v2"]
    fam = entry.families[0]
    left = nonvanishing_check(entry, fam, "left")
    right = nonvanishing_check(entry, fam, "right")
    assert left.computed.certificate.status == "nonzero_exact"
    assert left.computed.value == "-1/2*c^3 + c"
    assert left.printed.value == "-1/2*c"
    assert right.computed.value == "c"
    assert right.printed.value == "-c^3 + 2*c"
    assert left.ok and right.ok and left.agree and right.agree


def test_w13_families_vanish_in_the_computed_channel(catalog):
    # every shipped W13 family sits on the branch where both invariants
    # are exactly zero, while the printed closed forms stay nonzero
    entry = catalog["W13v1_W13v2"]
    for fam in entry.families:
        for side in ("left", "right"):
            nv = nonvanishing_check(entry, fam, side)
            assert nv.computed.certificate.status == "zero", (fam.label, side)
            assert nv.printed.certificate.status in ("nonzero_exact", "nonzero_interval")
            assert nv.excluded and not nv.ok and not nv.agree


def test_z13_right_value_matches_printed_at_point(catalog):
    entry = catalog["Z13v1_Z13v2"]
    nv = nonvanishing_check(entry, entry.families[0], "right")
    assert nv.computed.value == nv.printed.value == "-t^2"
    assert nv.ok and nv.agree


W12_DISCARDED = SolutionFamily(
    label="W12 discarded a1=b1=0",
    generators=(("b2", "b2^4 + 4"),),
    is_field=False,
    bindings={"a1": "0", "b1": "0", "a2": "1/2*b2^2", "b2": "b2"},
    free=(),
    free_defaults={},
    root_choice={"b2": ("1", "1")},
)


def test_w12_discarded_points_lie_on_the_variety(catalog):
    entry = catalog["W12v1_W12v2"]
    report = verify_family(entry, W12_DISCARDED)
    assert report.ok


def test_w12_discard_rule_not_reproduced_by_computed_invariant(catalog):
    # the printed left formula vanishes at a1=b1=0, which is the stated
    # reason those four solutions were discarded; the residue-computed
    # invariant is nonzero there, so the two channels disagree
    entry = catalog["W12v1_W12v2"]
    nv = nonvanishing_check(entry, W12_DISCARDED, "left")
    assert nv.printed.certificate.status == "zero"
    assert nv.computed.certificate.status == "nonzero_interval"
    assert nv.computed.value == "1/4*b2^3"
    assert not nv.agree and not nv.excluded


def test_e14_avoidance_rule_not_reproduced_by_computed_invariant(catalog):
    # same story for the locus a3 - b3 + 4c = 0 on an E14 family
    entry = catalog["E14v1_E14v2"]
    nv = nonvanishing_check(entry, entry.families[0], "left", point={"a3": "-4*c"})
    assert nv.printed.certificate.status == "zero"
    assert nv.computed.certificate.status == "nonzero_exact"
    assert not nv.agree


def test_point_values_override_defaults(catalog):
    entry = catalog["E14v1_E14v2"]
    fam = entry.families[0]
    nv = nonvanishing_check(entry, fam, "left", point={"a3": "8", "b3": "0"})
    assert dict(nv.point)["a3"] == "8"
    # printed -(a3 - b3 + 4c)/8 becomes -1 - c/2
    assert nv.printed.value == "-1/2*c - 1"


# -- qdim comparison -------------------------------------------------------

MATCHES = {
    # (left status, left side, left scalar), (right status, right side, right scalar)
    "E14v1_E14v2": (("unmatched", None, None), ("unit_multiple", "left", Fraction(2))),
    "U12v1_U12v3": (("unmatched", None, None), ("unit_multiple", "left", Fraction(-36))),
    "U12v2_U12v3": (("unmatched", None, None), ("unmatched", None, None)),
    "W12v1_W12v2": (("unmatched", None, None), ("unit_multiple", "left", Fraction(-1))),
    "W13v1_W13v2": (("unmatched", None, None), ("unmatched", None, None)),
    "Z13v1_Z13v2": (("unmatched", None, None), ("unmatched", None, None)),
}

COMPUTED_RIGHT = {
    "E14v1_E14v2": "c",
    "U12v1_U12v3": "-a2*b1 + a1*b2",
    "U12v2_U12v3": "-a2*b1 + a1*b2",
    "W12v1_W12v2": "-2*a1 + b1 - b2",
    "W13v1_W13v2": "-a1*a3 - a3*b + a3*c - a1*f - b*f + c*f",
    "Z13v1_Z13v2": "-c*d",
}


def test_qdim_match_table_frozen(catalog):
    for eid, (left, right) in MATCHES.items():
        cq = compare_qdims(catalog[eid])
        got = (
            (cq.left.status, cq.left.matched_side, cq.left.scalar),
            (cq.right.status, cq.right.matched_side, cq.right.scalar),
        )
        assert got == (left, right), eid
        assert format_poly(cq.computed_right) == COMPUTED_RIGHT[eid]
    # the one mod-ideal unit match
    w12 = compare_qdims(catalog["W12v1_W12v2"])
    assert w12.right.mod_ideal and not w12.left.matched
    assert not w12.right.passes()
    assert w12.right.passes(allow_unit=True)


def test_qdim_product_reduces_to_one(catalog):
    # left and right invariants of one defect multiply to 1 in the
    # parameter quotient; W13 is the exception, carrying the branch
    # factor that separates its two solution components
    expected_w13 = "-a1*d^2 - b*d^2 + c*d^2 + 1"
    for eid in ("E14v1_E14v2", "U12v1_U12v3", "U12v2_U12v3", "W12v1_W12v2", "Z13v1_Z13v2", "W13v1_W13v2"):
        entry = catalog[eid]
        basis = groebner(derive_constraints(entry))
        product = computed_qdim(entry, "left") * computed_qdim(entry, "right")
        nf = normal_form(product, basis)
        if eid == "W13v1_W13v2":
            assert format_poly(nf) == expected_w13
        else:
            assert format_poly(nf) == "1", eid


# -- resultant elimination oracle ------------------------------------------


def test_oracle_rediscovers_e14_relation(catalog):
    report = bruteforce_family_oracle(catalog["E14v1_E14v2"], {}, keep="c")
    assert not report.inconsistent
    (cand,) = report.candidates
    assert format_poly(cand.minimal_poly) == "c^8 + 4"
    assert cand.fully_satisfied and not cand.refuted


def test_oracle_rediscovers_u12_cube_relations(catalog):
    rep1 = bruteforce_family_oracle(catalog["U12v2_U12v3"], {"a2": 0}, keep="b1")
    assert format_poly(rep1.candidates[0].minimal_poly) == "2*b1^3 - 1"
    rep2 = bruteforce_family_oracle(catalog["U12v2_U12v3"], {"b2": 0}, keep="a1")
    assert format_poly(rep2.candidates[0].minimal_poly) == "2*a1^3 + 1"


def test_oracle_rediscovers_w13_branch_relation(catalog):
    report = bruteforce_family_oracle(
        catalog["W13v1_W13v2"], {"b": 0, "a2": 0, "a3": 1, "g": 0}, keep="d"
    )
    (cand,) = report.candidates
    # d*(4*d^8 + 1): the second factor is the reduced one-parameter
    # relation, the first the degenerate d=0 branch
    assert format_poly(cand.minimal_poly) == "4*d^9 + d"
    target = parse_poly("4*d^8 + 1", cand.minimal_poly.vt)
    assert uni_divides(target, cand.minimal_poly, "d")


def test_oracle_u12v1_composite_candidate(catalog):
    report = bruteforce_family_oracle(catalog["U12v1_U12v3"], {}, keep="a1")
    (cand,) = report.candidates
    assert format_poly(cand.minimal_poly) == "2*a1^7 - a1^4 - a1"
    vt = cand.minimal_poly.vt
    for factor in ("a1", "a1^3 - 1", "2*a1^3 + 1"):
        assert uni_divides(parse_poly(factor, vt), cand.minimal_poly, "a1")


def test_oracle_flags_contradictory_assignment(catalog):
    report = bruteforce_family_oracle(catalog["E14v1_E14v2"], {"c": 1})
    assert report.inconsistent
    assert not report.candidates


def test_oracle_reports_absent_parameter(catalog):
    report = bruteforce_family_oracle(catalog["E14v1_E14v2"], {}, keep="a1")
    assert not report.candidates
    assert any("already absent" in note for note in report.notes)


def test_oracle_degenerates_on_q12(catalog):
    # the projection drops zero resultants and no univariate consequence
    # survives; recorded so the gap is visible, not an error
    report = bruteforce_family_oracle(catalog["Q12v1_Q12v2"], {"a5": 1}, keep="b1")
    assert not report.inconsistent
    assert not report.candidates
    assert any("no univariate consequence" in note for note in report.notes)
