"""Machine-readable catalog: potential pairs, generating entries,
printed constraint systems, quantum-dimension formulas, and solution
families, with a validating loader.

Each equivalence lives in one JSON file.  Polynomial values are grammar
strings (see polyring).  A side record names its potential in the shared
potentials table, gives the renaming from table variables to the entry's
variables, and fixes the variable order used for derivatives (the order
is normative for quantum dimensions; the renaming is not).

Named abbreviations in "defs" expand sequentially, each may refer only
to earlier ones, so cycles cannot form.  "corrections" records carry the
full printed text of an entry next to the text actually shipped; the
test suite re-validates every correction against the squaring condition.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .grading import WeightSystem
from .polyring import ParseError, Poly, VarTable, parse_poly

SCHEMA_KEYS = (
    "id",
    "ring_vars_in",
    "ring_vars_out",
    "parameters",
    "defs",
    "entries",
    "paper_constraints",
    "paper_qdim_left",
    "paper_qdim_right",
    "families",
    "corrections",
)

ENTRY_KEYS = ("d15", "d16", "d17", "d25", "d26", "d35")


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class SidePotential:
    potential_key: str
    table_vars: Tuple[str, ...]
    poly_text: str
    weight_system: WeightSystem
    vars: Tuple[str, ...]  # derivative order, in entry variables
    renaming: Dict[str, str]  # table variable -> entry variable

    def potential(self, vt: VarTable) -> Poly:
        table_vt = VarTable(self.table_vars, ring_vars=self.table_vars)
        return parse_poly(self.poly_text, table_vt).convert(vt, self.renaming)


@dataclass(frozen=True)
class SolutionFamily:
    label: str
    generators: Tuple[Tuple[str, str], ...]  # (name, minimal polynomial text)
    is_field: bool
    bindings: Dict[str, str]  # parameter -> expression in generators/frees
    free: Tuple[str, ...]
    free_defaults: Dict[str, str]
    root_choice: Dict[str, Tuple[str, str]]

    def default_value(self, name: str) -> Fraction:
        return Fraction(self.free_defaults.get(name, "0"))


@dataclass(frozen=True)
class Correction:
    location: str
    printed: str
    corrected: str
    justification: str


@dataclass(frozen=True)
class EquivalenceEntry:
    id: str
    side_in: SidePotential
    side_out: SidePotential
    parameters: Tuple[str, ...]
    defs: Tuple[Tuple[str, str], ...]
    entry_texts: Dict[str, str]
    paper_constraint_texts: Tuple[str, ...]
    paper_qdim_left_text: str
    paper_qdim_right_text: str
    families: Tuple[SolutionFamily, ...]
    corrections: Tuple[Correction, ...]
    vt: VarTable = field(compare=False)

    # -- parsed views ---------------------------------------------------

    def defs_polys(self) -> Dict[str, Poly]:
        out: Dict[str, Poly] = {}
        for name, text in self.defs:
            ext = _extended_table(self.vt, tuple(out))
            p = parse_poly(text, ext)
            out[name] = _collapse(p, self.vt, out)
        return out

    def entry_poly(self, name: str, text: Optional[str] = None) -> Poly:
        defs = self.defs_polys()
        ext = _extended_table(self.vt, tuple(defs))
        p = parse_poly(self.entry_texts[name] if text is None else text, ext)
        return _collapse(p, self.vt, defs)

    def six(self) -> Tuple[Poly, ...]:
        return tuple(self.entry_poly(k) for k in ENTRY_KEYS)

    def potential_in(self) -> Poly:
        return self.side_in.potential(self.vt)

    def potential_out(self) -> Poly:
        return self.side_out.potential(self.vt)

    def difference(self) -> Poly:
        return self.potential_out() - self.potential_in()

    def paper_constraints(self) -> Tuple[Poly, ...]:
        return tuple(parse_poly(t, self.vt) for t in self.paper_constraint_texts)

    def paper_qdim(self, side: str) -> Poly:
        text = {"left": self.paper_qdim_left_text, "right": self.paper_qdim_right_text}[side]
        return parse_poly(text, self.vt)


def _extended_table(vt: VarTable, extra: Tuple[str, ...]) -> VarTable:
    if not extra:
        return vt
    return VarTable(vt.names + extra, vt.ring_vars, vt.param_vars + extra)


def _collapse(p: Poly, vt: VarTable, defs: Mapping[str, Poly]) -> Poly:
    """Substitute def names away and land back on the base table."""
    if p.vt == vt:
        return p
    used = {n: defs[n].convert(p.vt, None) for n in defs}
    return p.substitute(used).convert(vt, None)


def _load_potentials_table(directory: Optional[Path] = None) -> Dict[str, dict]:
    # A potentials.json sitting next to the entry files overrides the
    # packaged table, so self-contained catalogs work from any directory.
    if directory is not None:
        local = Path(directory) / "potentials.json"
        if local.is_file():
            return json.loads(local.read_text())
    text = resources.files("orbimf").joinpath("data/potentials.json").read_text()
    return json.loads(text)


def _side_from_json(obj: dict, potentials: Mapping[str, dict], where: str) -> SidePotential:
    for key in ("potential", "vars", "renaming"):
        if key not in obj:
            raise CatalogError(f"{where}: missing key {key!r}")
    pk = obj["potential"]
    if pk not in potentials:
        raise CatalogError(f"{where}: unknown potential {pk!r}")
    meta = potentials[pk]
    table_vars = tuple(meta["vars"])
    renaming = dict(obj["renaming"])
    if set(renaming) != set(table_vars):
        raise CatalogError(f"{where}: renaming keys must be exactly {table_vars}")
    targets = tuple(renaming[v] for v in table_vars)
    if len(set(targets)) != len(targets):
        raise CatalogError(f"{where}: renaming is not injective")
    side_vars = tuple(obj["vars"])
    if set(side_vars) != set(targets):
        raise CatalogError(
            f"{where}: derivative order {side_vars} must list the renamed variables {sorted(targets)}"
        )
    return SidePotential(
        pk, table_vars, meta["poly"], WeightSystem(*meta["weight_system"]), side_vars, renaming
    )


def load_entry(path: Path) -> EquivalenceEntry:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: invalid JSON: {exc}") from None
    extra = set(data) - set(SCHEMA_KEYS)
    missing = set(SCHEMA_KEYS) - set(data)
    if extra or missing:
        raise CatalogError(f"{path}: schema keys off (extra {sorted(extra)}, missing {sorted(missing)})")
    potentials = _load_potentials_table(Path(path).parent)
    side_in = _side_from_json(data["ring_vars_in"], potentials, f"{path}:ring_vars_in")
    side_out = _side_from_json(data["ring_vars_out"], potentials, f"{path}:ring_vars_out")
    overlap = set(side_in.vars) & set(side_out.vars)
    if overlap:
        raise CatalogError(f"{path}: sides share variables {sorted(overlap)}")
    parameters = tuple(data["parameters"])
    ring = side_in.vars + side_out.vars
    clash = set(ring) & set(parameters)
    if clash:
        raise CatalogError(f"{path}: names used as both ring variable and parameter: {sorted(clash)}")
    vt = VarTable(ring + parameters, ring_vars=ring, param_vars=parameters)
    defs = tuple((k, v) for k, v in data["defs"].items())
    entries = dict(data["entries"])
    if set(entries) != set(ENTRY_KEYS):
        raise CatalogError(f"{path}: entries must be exactly {ENTRY_KEYS}")
    families = tuple(
        SolutionFamily(
            label=f["label"],
            generators=tuple((g[0], g[1]) for g in f["generators"]),
            is_field=bool(f["is_field"]),
            bindings=dict(f["bindings"]),
            free=tuple(f["free"]),
            free_defaults=dict(f.get("free_defaults", {})),
            root_choice={k: (v[0], v[1]) for k, v in f.get("root_choice", {}).items()},
        )
        for f in data["families"]
    )
    corrections = tuple(
        Correction(c["location"], c["printed"], c["corrected"], c["justification"])
        for c in data["corrections"]
    )
    entry = EquivalenceEntry(
        id=data["id"],
        side_in=side_in,
        side_out=side_out,
        parameters=parameters,
        defs=defs,
        entry_texts=entries,
        paper_constraint_texts=tuple(data["paper_constraints"]),
        paper_qdim_left_text=data["paper_qdim_left"],
        paper_qdim_right_text=data["paper_qdim_right"],
        families=families,
        corrections=corrections,
        vt=vt,
    )
    validate(entry)
    return entry


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: Tuple[str, ...]


def validate(entry: EquivalenceEntry) -> ValidationReport:
    problems: List[str] = []
    try:
        defs = entry.defs_polys()
    except ParseError as exc:
        raise CatalogError(f"{entry.id}: defs do not parse: {exc}") from None
    for name in ENTRY_KEYS:
        try:
            p = entry.entry_poly(name)
        except ParseError as exc:
            raise CatalogError(f"{entry.id}: entry {name} does not parse: {exc}") from None
        leftover = [v for v in p.support_vars() if v in dict(entry.defs)]
        if leftover:
            problems.append(f"{name}: defs not fully expanded: {leftover}")
    for text in entry.paper_constraint_texts:
        p = parse_poly(text, entry.vt)
        bad = [v for v in p.support_vars() if v not in entry.parameters]
        if bad:
            problems.append(f"constraint {text!r} uses non-parameters {bad}")
    for side in ("left", "right"):
        p = entry.paper_qdim(side)
        bad = [v for v in p.support_vars() if v not in entry.parameters]
        if bad:
            problems.append(f"paper qdim_{side} uses non-parameters {bad}")
    for fam in entry.families:
        gen_names = [g for g, _ in fam.generators]
        bound = set(fam.bindings) | set(fam.free)
        if bound != set(entry.parameters):
            problems.append(
                f"family {fam.label!r}: bindings+free must cover parameters exactly "
                f"(got {sorted(bound)})"
            )
        if set(fam.bindings) & set(fam.free):
            problems.append(f"family {fam.label!r}: a parameter is both bound and free")
        for g, mp_text in fam.generators:
            gvt = VarTable(tuple(gen_names), param_vars=tuple(gen_names))
            mp = parse_poly(mp_text, gvt)
            if mp.support_vars() != (g,):
                problems.append(f"family {fam.label!r}: minimal polynomial of {g} not univariate")
    for corr in entry.corrections:
        if corr.location in ENTRY_KEYS:
            shipped = entry.entry_texts[corr.location]
        elif corr.location.startswith("paper_constraints[") and corr.location.endswith("]"):
            idx = int(corr.location[len("paper_constraints["):-1])
            shipped = entry.paper_constraint_texts[idx]
        else:
            problems.append(f"correction at unknown location {corr.location!r}")
            continue
        if corr.corrected != shipped:
            problems.append(
                f"correction at {corr.location}: 'corrected' text differs from the shipped text"
            )
    if problems:
        raise CatalogError(f"{entry.id}: " + "; ".join(problems))
    return ValidationReport(True, ())


def default_catalog_dir() -> Path:
    env = os.environ.get("ORBIMF_CATALOG")
    if env:
        return Path(env)
    return Path(str(resources.files("orbimf").joinpath("data")))


def load_catalog(directory: Optional[Path] = None) -> Dict[str, EquivalenceEntry]:
    base = Path(directory) if directory else default_catalog_dir()
    out: Dict[str, EquivalenceEntry] = {}
    for path in sorted(base.glob("*.json")):
        if path.name == "potentials.json":
            continue
        entry = load_entry(path)
        if entry.id in out:
            raise CatalogError(f"duplicate entry id {entry.id}")
        out[entry.id] = entry
    if not out:
        raise CatalogError(f"no catalog entries found under {base}")
    return out


def resolve_entry(catalog: Mapping[str, EquivalenceEntry], alias: str) -> EquivalenceEntry:
    """Exact id, prefix, or separator-insensitive substring match."""
    if alias in catalog:
        return catalog[alias]
    def squash(s: str) -> str:
        return "".join(ch for ch in s.lower() if ch.isalnum())
    hits = [k for k in catalog if k.lower().startswith(alias.lower())]
    if not hits:
        hits = [k for k in catalog if squash(alias) in squash(k)]
    if not hits:
        raise CatalogError(f"no catalog entry matches {alias!r} (have {sorted(catalog)})")
    if len(hits) > 1:
        raise CatalogError(f"{alias!r} is ambiguous: {sorted(hits)}")
    return catalog[hits[0]]
