"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a mapping from monomials to nonzero Fractions.  A monomial
is a tuple of non-negative integer exponents, one slot per variable of the
owning VarTable.  All arithmetic is exact; there is no floating point
anywhere in this module.

Variables are declared up front in a VarTable, which also records which
names play the role of ring variables and which are parameters.  Two
polynomials can only be combined when they share the same VarTable.

Printing and parsing use a small explicit grammar (no implicit
multiplication):

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | base ('^' natural)? ('/' nonzero-integer)?
    base   := natural | identifier | '(' expr ')'

Unary minus binds tighter than '+'/'-' but looser than '^', so "-x^2"
denotes -(x^2).  Scalar division is only allowed by a nonzero integer
literal.  Terms are printed in descending degree-reverse-lexicographic
order, which makes format(parse(s)) a canonical form and parse(format(p))
the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class PolyError(ValueError):
    """Base error for polynomial construction and arithmetic."""


class VarTableMismatch(PolyError):
    """Raised when combining polynomials over different VarTables."""


class ParseError(PolyError):
    """Syntax or identifier error while parsing; carries the position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class VarTable:
    """Ordered variable declarations plus the ring/parameter split.

    `names` fixes both the exponent-slot order of every monomial and the
    tie-breaking order used by degrevlex.  `ring_vars` and `param_vars`
    must be disjoint subsets of `names`; names in neither set are allowed
    (used e.g. for shorthand definitions and field generators).
    """

    names: Tuple[str, ...]
    ring_vars: Tuple[str, ...] = ()
    param_vars: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise PolyError(f"duplicate variable names in {self.names}")
        ring = set(self.ring_vars)
        par = set(self.param_vars)
        if ring & par:
            raise PolyError(f"variables declared both ring and parameter: {sorted(ring & par)}")
        missing = (ring | par) - set(self.names)
        if missing:
            raise PolyError(f"declared subset names not in table: {sorted(missing)}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def index(self, name: str) -> int:
        try:
            return self._index[name]  # type: ignore[attr-defined]
        except KeyError:
            raise PolyError(f"undeclared variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.names)


def degrevlex_key(m: Monomial) -> tuple:
    """Sort key; larger key means larger monomial in degrevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


class Poly:
    """Immutable sparse polynomial over a fixed VarTable."""

    __slots__ = ("vt", "_terms")

    def __init__(self, vt: VarTable, terms: Mapping[Monomial, Fraction] | None = None):
        cleaned: Terms = {}
        width = len(vt)
        if terms:
            for mono, coeff in terms.items():
                if len(mono) != width:
                    raise PolyError(f"monomial {mono} has wrong width for table of {width} variables")
                if any(e < 0 for e in mono):
                    raise PolyError(f"negative exponent in monomial {mono}")
                q = Fraction(coeff)
                if q:
                    cleaned[tuple(mono)] = q
        object.__setattr__(self, "vt", vt)
        object.__setattr__(self, "_terms", cleaned)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(vt: VarTable) -> "Poly":
        return Poly(vt)

    @staticmethod
    def const(vt: VarTable, value) -> "Poly":
        q = Fraction(value)
        if not q:
            return Poly(vt)
        return Poly(vt, {(0,) * len(vt): q})

    @staticmethod
    def var(vt: VarTable, name: str) -> "Poly":
        i = vt.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(vt)))
        return Poly(vt, {mono: _ONE})

    @staticmethod
    def _raw(vt: VarTable, terms: Terms) -> "Poly":
        """Trusted constructor: terms must already be canonical."""
        p = object.__new__(Poly)
        object.__setattr__(p, "vt", vt)
        object.__setattr__(p, "_terms", terms)
        return p

    # -- inspection ---------------------------------------------------

    def terms(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def monomials(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self._terms:
            return _ZERO
        if not self.is_constant():
            raise PolyError("polynomial is not constant")
        return next(iter(self._terms.values()))

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), _ZERO)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def degree_in(self, name: str) -> int:
        i = self.vt.index(name)
        if not self._terms:
            return -1
        return max(m[i] for m in self._terms)

    def support_vars(self) -> Tuple[str, ...]:
        used = [False] * len(self.vt)
        for m in self._terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(n for n, u in zip(self.vt.names, used) if u)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise PolyError("zero polynomial has no leading monomial")
        return max(self._terms, key=degrevlex_key)

    def weighted_degrees(self, weights: Mapping[str, Fraction]) -> set:
        """Set of weighted degrees of the terms (weight 0 for absent names)."""
        idx_w = [Fraction(weights.get(n, 0)) for n in self.vt.names]
        out = set()
        for m in self._terms:
            out.add(sum(w * e for w, e in zip(idx_w, m) if e))
        return out

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.vt is not other.vt and self.vt != other.vt:
            raise VarTableMismatch("polynomials belong to different variable tables")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vt == other.vt and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.vt.names, frozenset(self._terms.items())))

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(self.vt, out)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, _ZERO) - c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(self.vt, out)

    def __neg__(self) -> "Poly":
        return Poly._raw(self.vt, {m: -c for m, c in self._terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self._terms, other._terms
        if len(a) > len(b):
            a, b = b, a
        out: Terms = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(e1 + e2 for e1, e2 in zip(m1, m2))
                s = out.get(m, _ZERO) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly._raw(self.vt, out)

    def scale(self, value) -> "Poly":
        q = Fraction(value)
        if not q:
            return Poly(self.vt)
        return Poly._raw(self.vt, {m: c * q for m, c in self._terms.items()})

    def __truediv__(self, value) -> "Poly":
        q = Fraction(value)
        if not q:
            raise ZeroDivisionError("division of polynomial by zero scalar")
        return self.scale(1 / q)

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise PolyError(f"exponent must be a non-negative integer, got {n!r}")
        result = Poly.const(self.vt, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus and substitution ------------------------------------

    def partial(self, name: str) -> "Poly":
        i = self.vt.index(name)
        out: Terms = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                dm = m[:i] + (e - 1,) + m[i + 1:]
                s = out.get(dm, _ZERO) + c * e
                if s:
                    out[dm] = s
                else:
                    del out[dm]
        return Poly._raw(self.vt, out)

    def substitute(self, bindings: Mapping[str, "Poly"]) -> "Poly":
        """Simultaneous substitution.  Values fix the target table.

        Every value must share one VarTable; unbound variables must exist
        in that target table (they map to themselves).
        """
        if not bindings:
            return self
        target = next(iter(bindings.values())).vt
        for name, value in bindings.items():
            if name not in self.vt:
                raise PolyError(f"substitution for variable {name!r} absent from table")
            if value.vt != target:
                raise VarTableMismatch("substitution values use different variable tables")
        plain: Dict[int, Poly] = {}
        bound: Dict[int, Poly] = {}
        for i, name in enumerate(self.vt.names):
            if name in bindings:
                bound[i] = bindings[name]
            else:
                plain[i] = Poly.var(target, name) if name in target else None  # type: ignore[assignment]
        power_cache: Dict[Tuple[int, int], Poly] = {}

        def _pow(i: int, e: int, base: Poly) -> Poly:
            key = (i, e)
            got = power_cache.get(key)
            if got is None:
                got = base ** e
                power_cache[key] = got
            return got

        acc = Poly.zero(target)
        for m, c in self._terms.items():
            part = Poly.const(target, c)
            for i, e in enumerate(m):
                if not e:
                    continue
                if i in bound:
                    part = part * _pow(i, e, bound[i])
                else:
                    base = plain[i]
                    if base is None:
                        raise PolyError(
                            f"variable {self.vt.names[i]!r} is unbound and missing from the target table"
                        )
                    part = part * _pow(i, e, base)
            acc = acc + part
        return acc

    def convert(self, target: VarTable, rename: Optional[Mapping[str, str]] = None) -> "Poly":
        """Re-express over another table, matching variables by name.

        `rename` maps source names to target names before matching.
        """
        rename = dict(rename or {})
        slot: Dict[int, int] = {}
        for i, name in enumerate(self.vt.names):
            slot[i] = -1
        out: Terms = {}
        width = len(target)
        for m, c in self._terms.items():
            exps = [0] * width
            for i, e in enumerate(m):
                if not e:
                    continue
                j = slot[i]
                if j < 0:
                    name = rename.get(self.vt.names[i], self.vt.names[i])
                    j = target.index(name)
                    slot[i] = j
                exps[j] += e
            key = tuple(exps)
            s = out.get(key, _ZERO) + c
            if s:
                out[key] = s
            else:
                del out[key]
        return Poly._raw(target, out)

    def coefficients_wrt(self, names: Iterable[str]) -> Dict[Monomial, "Poly"]:
        """Group terms by their exponents in `names`.

        Keys are full-width monomials supported only on `names`; values are
        polynomials supported only on the complementary variables.
        """
        idxs = sorted(self.vt.index(n) for n in names)
        idx_set = set(idxs)
        width = len(self.vt)
        out: Dict[Monomial, Terms] = {}
        for m, c in self._terms.items():
            key = tuple(e if i in idx_set else 0 for i, e in enumerate(m))
            rest = tuple(0 if i in idx_set else e for i, e in enumerate(m))
            out.setdefault(key, {})[rest] = c
        return {k: Poly._raw(self.vt, t) for k, t in sorted(out.items(), key=lambda kv: degrevlex_key(kv[0]), reverse=True)}

    # -- printing -----------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


# ---------------------------------------------------------------------
# formatting


def _format_monomial(vt: VarTable, m: Monomial) -> str:
    parts = []
    for name, e in zip(vt.names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_coefficient(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Canonical textual form: degrevlex-descending, re-parseable."""
    if p.is_zero():
        return "0"
    chunks = []
    for m in sorted(p._terms, key=degrevlex_key, reverse=True):
        c = p._terms[m]
        mono = _format_monomial(p.vt, m)
        mag = abs(c)
        if not mono:
            body = _format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coefficient(mag)}*{mono}"
        chunks.append(("-" if c < 0 else "+", body))
    sign, body = chunks[0]
    text = body if sign == "+" else f"-{body}"
    for sign, body in chunks[1:]:
        text += f" {sign} {body}"
    return text


# ---------------------------------------------------------------------
# parsing


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._advance()

    def _advance(self) -> None:
        text, n = self.text, len(self.text)
        i = self.pos
        while i < n and text[i].isspace():
            i += 1
        self.tok_pos = i
        if i >= n:
            self.kind, self.value = "end", ""
            self.pos = i
            return
        ch = text[i]
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            self.kind, self.value = "int", text[i:j]
            self.pos = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            self.kind, self.value = "ident", text[i:j]
            self.pos = j
        elif ch in "+-*/^()":
            self.kind, self.value = ch, ch
            self.pos = i + 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)

    def take(self) -> Tuple[str, str, int]:
        out = (self.kind, self.value, self.tok_pos)
        self._advance()
        return out


class _Parser:
    def __init__(self, text: str, vt: VarTable):
        self.toks = _Tokenizer(text)
        self.vt = vt

    def parse(self) -> Poly:
        p = self._expr()
        if self.toks.kind != "end":
            raise ParseError(f"unexpected {self.toks.value!r}", self.toks.tok_pos)
        return p

    def _expr(self) -> Poly:
        acc = self._term()
        while self.toks.kind in ("+", "-"):
            op, _, _ = self.toks.take()
            rhs = self._term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def _term(self) -> Poly:
        acc = self._factor()
        while self.toks.kind == "*":
            self.toks.take()
            acc = acc * self._factor()
        return acc

    def _factor(self) -> Poly:
        if self.toks.kind == "-":
            self.toks.take()
            return -self._factor()
        p = self._base()
        if self.toks.kind == "^":
            self.toks.take()
            kind, value, pos = self.toks.take()
            if kind != "int":
                raise ParseError("exponent must be a natural number", pos)
            p = p ** int(value)
        if self.toks.kind == "/":
            self.toks.take()
            negate = False
            if self.toks.kind == "-":
                self.toks.take()
                negate = True
            kind, value, pos = self.toks.take()
            if kind != "int":
                raise ParseError("divisor must be an integer literal", pos)
            d = int(value)
            if d == 0:
                raise ParseError("division by zero", pos)
            p = p / (-d if negate else d)
        return p

    def _base(self) -> Poly:
        kind, value, pos = self.toks.take()
        if kind == "int":
            return Poly.const(self.vt, int(value))
        if kind == "ident":
            if value not in self.vt:
                raise ParseError(f"undeclared identifier {value!r}", pos)
            return Poly.var(self.vt, value)
        if kind == "(":
            p = self._expr()
            k, _, pos2 = self.toks.take()
            if k != ")":
                raise ParseError("expected ')'", pos2)
            return p
        raise ParseError(f"expected a number, identifier or '(', got {value!r}", pos)


def parse_poly(text: str, vt: VarTable) -> Poly:
    """Parse an expression into a polynomial over `vt`."""
    return _Parser(text, vt).parse()
