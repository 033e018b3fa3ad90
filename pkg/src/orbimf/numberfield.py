"""Quotient rings Q[t1,...,tk]/(m1(t1),...,mk(tk)) and certified embeddings.

Each generator carries its own monic univariate minimal polynomial, so
reduction rewrites one exponent slot at a time and always terminates.
Elements are represented by reduced polynomials; the representative may
also involve extra "spectator" variables (free parameters riding along),
which reduction never touches.

Inversion solves an exact linear system over the monomial basis of the
quotient (representatives must be supported on generators only).  When a
quotient is not known to be a field, a failed inversion reports a zero
divisor instead of guessing.

embed_complex produces a rectangle with rational endpoints that is
guaranteed to contain the image of an element under the embedding that
sends each generator to a root of its minimal polynomial near the given
approximation.  The enclosure of each root is certified with the classic
bound  min_r |z0 - r| <= deg(m) * |m(z0)| / |m'(z0)|, evaluated in exact
rational arithmetic; floating point (mpmath) is only used to refine the
starting approximation, never in the certificate itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath

from ._linalg import solve_dense
from .polyring import Monomial, Poly, PolyError, VarTable

_ZERO = Fraction(0)


class NumberFieldError(ValueError):
    pass


class ZeroDivisorError(NumberFieldError):
    """The element is not invertible in this quotient."""


class PrecisionExceeded(NumberFieldError):
    """No conclusive interval before the working-precision cap."""


@dataclass(frozen=True)
class QuotientSpec:
    """Generators with independent monic univariate minimal polynomials."""

    vt: VarTable
    generators: Tuple[str, ...]
    minimal_polys: Tuple[Poly, ...]
    is_field: bool = False

    def __post_init__(self) -> None:
        if len(self.generators) != len(self.minimal_polys):
            raise NumberFieldError("one minimal polynomial per generator required")
        seen = set()
        for name, mp in zip(self.generators, self.minimal_polys):
            if name in seen:
                raise NumberFieldError(f"duplicate generator {name!r}")
            seen.add(name)
            if name not in self.vt:
                raise NumberFieldError(f"generator {name!r} missing from table")
            support = mp.support_vars()
            if support not in ((name,), ()):
                raise NumberFieldError(
                    f"minimal polynomial of {name!r} must be univariate in it, uses {support}"
                )
            d = mp.degree_in(name)
            if d < 1:
                raise NumberFieldError(f"minimal polynomial of {name!r} must have degree >= 1")
            i = self.vt.index(name)
            lead = mp.coefficient(tuple(d if j == i else 0 for j in range(len(self.vt))))
            if lead != 1:
                raise NumberFieldError(f"minimal polynomial of {name!r} must be monic")

    def degree(self, name: str) -> int:
        return self.minimal_polys[self.generators.index(name)].degree_in(name)

    def basis_size(self) -> int:
        n = 1
        for g in self.generators:
            n *= self.degree(g)
        return n


@dataclass(frozen=True)
class QuotientElem:
    spec: QuotientSpec
    rep: Poly  # fully reduced representative

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def __add__(self, other: "QuotientElem") -> "QuotientElem":
        self._check(other)
        return QuotientElem(self.spec, self.rep + other.rep)

    def __sub__(self, other: "QuotientElem") -> "QuotientElem":
        self._check(other)
        return QuotientElem(self.spec, self.rep - other.rep)

    def __neg__(self) -> "QuotientElem":
        return QuotientElem(self.spec, -self.rep)

    def __mul__(self, other: "QuotientElem") -> "QuotientElem":
        self._check(other)
        return reduce(self.rep * other.rep, self.spec)

    def __pow__(self, n: int) -> "QuotientElem":
        result = QuotientElem(self.spec, Poly.const(self.spec.vt, 1))
        base = self
        if n < 0:
            base = invert(self)
            n = -n
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _check(self, other: "QuotientElem") -> None:
        if self.spec != other.spec:
            raise NumberFieldError("elements of different quotient rings")

    def __str__(self) -> str:
        return str(self.rep)


def reduce(p: Poly, spec: QuotientSpec) -> QuotientElem:
    """Rewrite every generator exponent below its minimal-poly degree."""
    if p.vt != spec.vt:
        raise NumberFieldError("polynomial does not live in the quotient's table")
    tables: Dict[str, List[Poly]] = {}

    def power_rep(name: str, e: int) -> Poly:
        # residues of name^k modulo its minimal polynomial, built on demand
        tab = tables.get(name)
        if tab is None:
            mp = spec.minimal_polys[spec.generators.index(name)]
            d = mp.degree_in(name)
            gen = Poly.var(spec.vt, name)
            tail = gen ** d - mp  # name^d = tail, deg(tail) < d
            tab = [Poly.const(spec.vt, 1)]
            tables[name] = tab
            tab.append(gen if d > 1 else tail)
        while len(tab) <= e:
            mp = spec.minimal_polys[spec.generators.index(name)]
            d = mp.degree_in(name)
            gen = Poly.var(spec.vt, name)
            tail = gen ** d - mp
            nxt = tab[-1] * gen
            if nxt.degree_in(name) >= d:
                # single rewrite suffices: previous entry had degree < d
                i = spec.vt.index(name)
                carry = Poly.zero(spec.vt)
                keep = {}
                for m, c in nxt.terms():
                    if m[i] >= d:
                        lower = m[:i] + (m[i] - d,) + m[i + 1:]
                        carry = carry + Poly(spec.vt, {lower: c}) * tail
                    else:
                        keep[m] = c
                nxt = Poly(spec.vt, keep) + carry
            tab.append(nxt)
        return tab[e]

    gen_idx = {spec.vt.index(g): g for g in spec.generators}
    acc = Poly.zero(spec.vt)
    for m, c in p.terms():
        factor = Poly(spec.vt, {tuple(0 if i in gen_idx else e for i, e in enumerate(m)): c})
        for i, name in gen_idx.items():
            e = m[i]
            if e:
                factor = factor * power_rep(name, e)
        acc = acc + factor
    return QuotientElem(spec, acc)


def element(text_or_poly, spec: QuotientSpec) -> QuotientElem:
    from .polyring import parse_poly

    if isinstance(text_or_poly, Poly):
        return reduce(text_or_poly, spec)
    return reduce(parse_poly(str(text_or_poly), spec.vt), spec)


def _basis_monomials(spec: QuotientSpec) -> List[Monomial]:
    width = len(spec.vt)
    monos: List[Monomial] = [(0,) * width]
    for name in spec.generators:
        i = spec.vt.index(name)
        d = spec.degree(name)
        monos = [m[:i] + (e,) + m[i + 1:] for m in monos for e in range(d)]
    return monos


def invert(elem: QuotientElem) -> QuotientElem:
    """Multiplicative inverse via an exact linear solve over the basis."""
    spec = elem.spec
    extra = [v for v in elem.rep.support_vars() if v not in spec.generators]
    if extra:
        raise NumberFieldError(f"cannot invert element with free variables {extra}")
    if elem.is_zero():
        raise ZeroDivisorError("zero is not invertible")
    basis = _basis_monomials(spec)
    pos = {m: i for i, m in enumerate(basis)}
    cols = []
    for m in basis:
        prod = reduce(elem.rep * Poly(spec.vt, {m: Fraction(1)}), spec)
        col = [_ZERO] * len(basis)
        for mono, c in prod.rep.terms():
            col[pos[mono]] = c
        cols.append(col)
    a = [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]
    b = [_ZERO] * len(basis)
    b[pos[(0,) * len(spec.vt)]] = Fraction(1)
    x = solve_dense(a, b)
    if x is None:
        raise ZeroDivisorError(f"{elem.rep} is a zero divisor in this quotient")
    rep = Poly(spec.vt, {m: q for m, q in zip(basis, x) if q})
    return QuotientElem(spec, rep)


# ---------------------------------------------------------------------
# certified complex rectangles


@dataclass(frozen=True)
class ComplexBox:
    """Axis-aligned rectangle with rational endpoints; arithmetic is exact."""

    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    def __post_init__(self) -> None:
        if self.re_lo > self.re_hi or self.im_lo > self.im_hi:
            raise NumberFieldError("empty complex box")

    @staticmethod
    def point(re, im=0) -> "ComplexBox":
        re, im = Fraction(re), Fraction(im)
        return ComplexBox(re, re, im, im)

    def contains_zero(self) -> bool:
        return self.re_lo <= 0 <= self.re_hi and self.im_lo <= 0 <= self.im_hi

    def width(self) -> Fraction:
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def __add__(self, other: "ComplexBox") -> "ComplexBox":
        return ComplexBox(
            self.re_lo + other.re_lo,
            self.re_hi + other.re_hi,
            self.im_lo + other.im_lo,
            self.im_hi + other.im_hi,
        )

    def __mul__(self, other: "ComplexBox") -> "ComplexBox":
        re_products = [a * b for a in (self.re_lo, self.re_hi) for b in (other.re_lo, other.re_hi)]
        im_products = [a * b for a in (self.im_lo, self.im_hi) for b in (other.im_lo, other.im_hi)]
        cross1 = [a * b for a in (self.re_lo, self.re_hi) for b in (other.im_lo, other.im_hi)]
        cross2 = [a * b for a in (self.im_lo, self.im_hi) for b in (other.re_lo, other.re_hi)]
        return ComplexBox(
            min(re_products) - max(im_products),
            max(re_products) - min(im_products),
            min(cross1) + min(cross2),
            max(cross1) + max(cross2),
        )

    def scale(self, q: Fraction) -> "ComplexBox":
        a, b = self.re_lo * q, self.re_hi * q
        c, d = self.im_lo * q, self.im_hi * q
        return ComplexBox(min(a, b), max(a, b), min(c, d), max(c, d))

    def __pow__(self, n: int) -> "ComplexBox":
        acc = ComplexBox.point(1)
        for _ in range(n):
            acc = acc * self
        return acc

    def midpoint(self) -> Tuple[Fraction, Fraction]:
        return ((self.re_lo + self.re_hi) / 2, (self.im_lo + self.im_hi) / 2)


def _decimal_to_fraction(text: str) -> Fraction:
    return Fraction(str(text).strip())


def _sqrt_upper(q: Fraction) -> Fraction:
    """Rational upper bound for sqrt(q), q >= 0."""
    if q < 0:
        raise NumberFieldError("negative radicand")
    if q == 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    return Fraction(math.isqrt(n * d) + 1, d)


def _univariate_coeffs(mp: Poly, name: str) -> List[Fraction]:
    i = mp.vt.index(name)
    d = mp.degree_in(name)
    coeffs = [_ZERO] * (d + 1)
    for m, c in mp.terms():
        coeffs[m[i]] = c
    return coeffs


def _eval_rational_complex(coeffs: Sequence[Fraction], re: Fraction, im: Fraction) -> Tuple[Fraction, Fraction]:
    """Exact Horner evaluation of a rational polynomial at re + im*i."""
    acc_re, acc_im = _ZERO, _ZERO
    for c in reversed(coeffs):
        acc_re, acc_im = acc_re * re - acc_im * im + c, acc_re * im + acc_im * re
    return acc_re, acc_im


def certified_root_box(mp: Poly, name: str, approx: Tuple[str, str], precision_bits: int) -> ComplexBox:
    """Rectangle with rational endpoints containing a root of mp near approx.

    The approximation is refined by Newton iteration at the requested
    working precision; the returned radius is certified from the exact
    rational values m(z0), m'(z0) via  n*|m(z0)|/|m'(z0)|.
    """
    coeffs = _univariate_coeffs(mp, name)
    deriv = [c * k for k, c in enumerate(coeffs)][1:]
    n = len(coeffs) - 1
    with mpmath.workprec(precision_bits + 32):
        z = mpmath.mpc(mpmath.mpf(str(approx[0])), mpmath.mpf(str(approx[1])))
        fcoeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(coeffs)]
        dcoeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(deriv)]
        for _ in range(precision_bits):
            fv = mpmath.polyval(fcoeffs, z)
            dv = mpmath.polyval(dcoeffs, z)
            if dv == 0:
                break
            step = fv / dv
            z = z - step
            if abs(step) < mpmath.mpf(2) ** (-precision_bits - 8):
                break
        digits = max(20, int(precision_bits * 0.302) + 5)
        re = _decimal_to_fraction(mpmath.nstr(z.real, digits, strip_zeros=False))
        im = _decimal_to_fraction(mpmath.nstr(z.imag, digits, strip_zeros=False))
    f_re, f_im = _eval_rational_complex(coeffs, re, im)
    d_re, d_im = _eval_rational_complex(deriv, re, im)
    d_norm2 = d_re * d_re + d_im * d_im
    if d_norm2 == 0:
        raise PrecisionExceeded(f"derivative vanished at the approximation for {name!r}")
    f_norm2 = f_re * f_re + f_im * f_im
    radius = _sqrt_upper(Fraction(n * n) * f_norm2 / d_norm2)
    return ComplexBox(re - radius, re + radius, im - radius, im + radius)


def embed_complex(
    elem: QuotientElem,
    root_choice: Mapping[str, Tuple[str, str]],
    precision_bits: int = 128,
) -> ComplexBox:
    """Guaranteed enclosure of the element's image at the chosen roots."""
    spec = elem.spec
    extra = [v for v in elem.rep.support_vars() if v not in spec.generators]
    if extra:
        raise NumberFieldError(f"cannot embed element with free variables {extra}")
    boxes: Dict[str, ComplexBox] = {}
    for name, mp in zip(spec.generators, spec.minimal_polys):
        if name not in root_choice:
            if elem.rep.degree_in(name) > 0:
                raise NumberFieldError(f"no root choice given for generator {name!r}")
            continue
        boxes[name] = certified_root_box(mp, name, root_choice[name], precision_bits)
    acc = ComplexBox.point(0)
    gen_index = {spec.vt.index(g): g for g in spec.generators}
    for mono, coeff in elem.rep.terms():
        part = ComplexBox.point(coeff)
        for i, e in enumerate(mono):
            if e:
                part = part * (boxes[gen_index[i]] ** e)
        acc = acc + part
    return acc


@dataclass(frozen=True)
class NonzeroCertificate:
    status: str  # "zero" | "nonzero_exact" | "nonzero_interval"
    box: Optional[ComplexBox]
    precision_bits: Optional[int]


def certify_value(
    elem: QuotientElem,
    root_choice: Optional[Mapping[str, Tuple[str, str]]],
    start_bits: int = 128,
    cap_bits: int = 2048,
) -> NonzeroCertificate:
    """Decide zero / certified-nonzero for a quotient element.

    Exactly-zero representatives are reported as zero.  In a declared
    field any nonzero representative is already certified.  Otherwise the
    element is embedded at the chosen roots with doubling precision until
    the rectangle excludes zero.
    """
    if elem.is_zero():
        return NonzeroCertificate("zero", ComplexBox.point(0), None)
    if elem.spec.is_field:
        return NonzeroCertificate("nonzero_exact", None, None)
    if not root_choice:
        raise NumberFieldError("non-field quotient needs a root choice to certify nonzero")
    bits = start_bits
    while bits <= cap_bits:
        box = embed_complex(elem, root_choice, bits)
        if not box.contains_zero():
            return NonzeroCertificate("nonzero_interval", box, bits)
        bits *= 2
    raise PrecisionExceeded(
        f"no conclusive interval for {elem.rep} up to {cap_bits} bits"
    )
