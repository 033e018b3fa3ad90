"""Supertrace, cofactor lifts, residues, and quantum dimensions."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from orbimf.catalog import load_catalog
from orbimf.matfac import build_8x8
from orbimf.polyring import Poly, VarTable, format_poly, parse_poly
from orbimf.residue import (
    ResidueError,
    cofactor_lift,
    grothendieck_residue,
    qdim_left,
    qdim_right,
    supertrace,
)

DEMO_DIR = Path(__file__).parent / "data" / "demo"


def _ring(*names):
    vt = VarTable(tuple(names), ring_vars=tuple(names))
    return vt


def test_supertrace_signs():
    vt = _ring("x")
    z = Poly.zero(vt)
    rows = []
    for i in range(8):
        row = [z] * 8
        row[i] = Poly.const(vt, i + 1)
        rows.append(tuple(row))
    # rows 1..4 count positively, rows 5..8 negatively
    assert supertrace(tuple(rows)) == Poly.const(vt, (1 + 2 + 3 + 4) - (5 + 6 + 7 + 8))


def test_diagonal_lift_is_scaled_identity():
    names = ("x", "y", "z")
    vt = _ring(*names)
    w = parse_poly("x^7 + y^3 + z^2", vt)
    f = [w.partial(n) for n in names]
    lift = cofactor_lift(f, names)
    assert lift.exponents == (6, 2, 1)
    expect = {(0, 0): "1/7", (1, 1): "1/3", (2, 2): "1/2"}
    for i in range(3):
        for j in range(3):
            assert format_poly(lift.matrix[i][j]) == expect.get((i, j), "0")


def test_lift_handles_coupled_denominators():
    # x^4*z + y^3 + z^2 mixes x and z in two partials; the solved lift
    # must still express pure powers
    names = ("x", "y", "z")
    vt = _ring(*names)
    w = parse_poly("x^4*z + y^3 + z^2", vt)
    f = [w.partial(n) for n in names]
    lift = cofactor_lift(f, names)
    assert lift.exponents == (7, 2, 2)
    for i, name in enumerate(names):
        acc = Poly.zero(vt)
        for j in range(3):
            acc = acc + lift.matrix[i][j] * f[j]
        assert acc == parse_poly(f"{name}^{lift.exponents[i]}", vt)


def test_lift_rejects_inhomogeneous_denominators():
    names = ("x", "y", "z")
    vt = _ring(*names)
    w = parse_poly("x^3 + x^4 + y^3 + z^2", vt)
    f = [w.partial(n) for n in names]
    with pytest.raises(ResidueError):
        cofactor_lift(f, names)


def test_socle_residue_values():
    names = ("x", "y", "z")
    vt = _ring(*names)
    w = parse_poly("x^7 + y^3 + z^2", vt)
    f = [w.partial(n) for n in names]
    # the socle monomial x^5*y carries 1/(7*3*2); everything of other
    # weight, and everything reducible, drops to zero
    assert grothendieck_residue(parse_poly("x^5*y", vt), f, names) == Poly.const(
        vt, Fraction(1, 42)
    )
    for text in ("1", "x^5", "y^2", "x^12*y^4*z^2"):
        assert grothendieck_residue(parse_poly(text, vt), f, names).is_zero()


def test_residue_linearity():
    names = ("x", "y", "z")
    vt = _ring(*names)
    w = parse_poly("x^7 + y^3 + z^2", vt)
    f = [w.partial(n) for n in names]
    g1 = parse_poly("x^5*y + 3*x^2", vt)
    g2 = parse_poly("2*x^5*y - z", vt)
    combo = g1.scale(2) + g2.scale(-5)
    lhs = grothendieck_residue(combo, f, names)
    rhs = grothendieck_residue(g1, f, names).scale(2) + grothendieck_residue(
        g2, f, names
    ).scale(-5)
    assert lhs == rhs


def test_residue_independent_of_lift():
    # raising every certificate exponent by one produces a genuinely
    # different cofactor matrix; the residue must not notice
    rng = random.Random(2718)
    for poly_text in ("x^4*z + y^3 + z^2", "x^3*y + y^2*z + z^2*x"):
        names = ("x", "y", "z")
        vt = _ring(*names)
        w = parse_poly(poly_text, vt)
        f = [w.partial(n) for n in names]
        l1 = cofactor_lift(f, names)
        l2 = cofactor_lift(f, names, exponents=tuple(n + 1 for n in l1.exponents))
        assert l1.matrix != l2.matrix
        for _ in range(10):
            g = Poly.zero(vt)
            for _ in range(4):
                mono = "*".join(
                    f"{n}^{rng.randrange(0, 3)}" for n in names
                ).replace("^0", "^1")  # keep it simple, powers 1..2
                g = g + parse_poly(mono, vt).scale(rng.randrange(-9, 10) or 1)
            assert grothendieck_residue(g, f, names, lift=l1) == grothendieck_residue(
                g, f, names, lift=l2
            )


def test_identity_defect_has_unit_qdims():
    demo = load_catalog(DEMO_DIR)["DEMOv1_DEMOv2"]
    m = build_8x8(demo.six())
    one = Poly.const(demo.vt, 1)
    assert qdim_left(m, demo.potential_in(), demo.potential_out()).value == one
    assert qdim_right(m, demo.potential_in(), demo.potential_out()).value == one


def test_e14_qdims_are_parameter_free():
    entry = load_catalog()["E14v1_E14v2"]
    m = build_8x8(entry.six())
    left = qdim_left(m, entry.potential_in(), entry.potential_out()).value
    right = qdim_right(m, entry.potential_in(), entry.potential_out()).value
    assert format_poly(left) == "-1/4*c^7"
    assert format_poly(right) == "c"


def test_qdim_results_live_in_parameters_only():
    catalog = load_catalog()
    for entry in catalog.values():
        m = build_8x8(entry.six())
        for fn in (qdim_left, qdim_right):
            value = fn(m, entry.potential_in(), entry.potential_out()).value
            assert all(v in entry.parameters for v in value.support_vars()), entry.id
