"""Batch driver over the catalog.

Three subcommands: `verify` runs every check an entry supports and is the
pass/fail gate, `qdim` prints quantum dimensions (optionally evaluated at
a family point with a certificate), and `constraints` lists or compares
the parameter ideal.  Reports render as text by default and as versioned
JSON with --json; both carry the same facts.  Exit codes are stable:
0 all checks passed, 1 a verification failed, 2 usage or catalog error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import constraints as con
from ._groebner import BudgetExceeded
from .catalog import CatalogError, EquivalenceEntry, load_catalog, resolve_entry
from .grading import (
    GradingError,
    central_charge,
    check_weight_system,
    euler_check,
    weights_from_potential,
)
from .matfac import build_8x8, grading_check, verify_potential
from .numberfield import NonzeroCertificate
from .polyring import Poly, format_poly
from .residue import ResidueError

SCHEMA_VERSION = "orbimf-report/1"

_PASS = "PASS"
_FAIL = "FAIL"


def _cert_dict(cert: Optional[NonzeroCertificate]) -> Optional[dict]:
    if cert is None:
        return None
    out: dict = {"status": cert.status}
    if cert.precision_bits is not None:
        out["precision_bits"] = cert.precision_bits
    if cert.box is not None and cert.status == "nonzero_interval":
        mid = cert.box.midpoint()
        # rational endpoints can run to thousands of digits; floats suffice
        # for display, the exactness lives in the certified comparison
        out["box_midpoint"] = [float(mid[0]), float(mid[1])]
        out["box_width"] = float(cert.box.width())
    return out


def _qdim_point_dict(p: con.QdimAtPoint) -> dict:
    out = {"origin": p.origin, "value": p.value, "certificate": _cert_dict(p.certificate)}
    if p.error:
        out["error"] = p.error
    return out


def _grading_stage(entry: EquivalenceEntry) -> Tuple[bool, dict]:
    detail: dict = {}
    ok = True
    vws = {}
    for label, side, potential in (
        ("in", entry.side_in, entry.potential_in()),
        ("out", entry.side_out, entry.potential_out()),
    ):
        vw = weights_from_potential(potential, side.vars)
        vws[label] = vw
        match = check_weight_system(vw, side.weight_system)
        cc = central_charge(vw)
        h = side.weight_system.h
        detail[label] = {
            "potential": side.potential_key,
            "euler": euler_check(potential, vw),
            "weight_system_match": match.ok,
            "central_charge": str(cc),
            "coxeter_charge": str(Fraction(h + 2, h)),
            "charge_is_coxeter": cc == Fraction(h + 2, h),
        }
        ok = ok and match.ok and detail[label]["euler"]
    equal_cc = detail["in"]["central_charge"] == detail["out"]["central_charge"]
    detail["central_charges_equal"] = equal_cc
    ok = ok and equal_cc
    gr = grading_check(build_8x8(entry.six()), vws["in"].combine(vws["out"]))
    detail["matrix"] = {
        "ok": gr.ok,
        "pair_sums": {k: str(v) for k, v in sorted(gr.pair_sums.items())},
        "failing": list(gr.failing),
    }
    return ok and gr.ok, detail


def verify_entry(
    entry: EquivalenceEntry, spair_cap: int = 50000, precision: int = 128
) -> dict:
    """All checks for one entry; the returned dict is the JSON report."""
    report: dict = {"entry": entry.id, "stages": {}, "ok": True}
    started = time.perf_counter()

    def stage(name: str, ok: bool, detail, seconds: float) -> None:
        report["stages"][name] = {
            "ok": bool(ok),
            "detail": detail,
            "seconds": round(seconds, 3),
        }
        report["ok"] = report["ok"] and bool(ok)

    t0 = time.perf_counter()
    try:
        g_ok, g_detail = _grading_stage(entry)
    except GradingError as exc:
        g_ok, g_detail = False, {"error": str(exc)}
    stage("grading", g_ok, g_detail, time.perf_counter() - t0)

    t0 = time.perf_counter()
    derived = con.derive_constraints(entry)
    report["epsilon"] = derived.epsilon
    stage(
        "constraints",
        True,
        {"count": len(derived.generators), "generators": list(derived.texts())},
        time.perf_counter() - t0,
    )

    t0 = time.perf_counter()
    m = build_8x8(entry.six())
    pot = verify_potential(
        m, entry.potential_in(), entry.potential_out(), list(derived.generators), spair_cap
    )
    stage(
        "potential",
        pot.ok,
        {"epsilon": pot.epsilon, "message": pot.message()},
        time.perf_counter() - t0,
    )

    t0 = time.perf_counter()
    printed = con.paper_constraint_set(entry)
    basis_derived = con.groebner(derived, spair_cap)
    cmp_ = con.ideal_compare(printed, derived, spair_cap, basis_b=basis_derived)
    ideal_detail = {
        "printed_in_derived": cmp_.a_in_b,
        "derived_in_printed": cmp_.b_in_a,
        "equal": cmp_.equal,
        "failing_printed": [format_poly(g) for g in cmp_.failing_a],
        "failing_derived": [format_poly(g) for g in cmp_.failing_b],
    }
    if not cmp_.equal and cmp_.a_in_b:
        # the printed set may live in a smaller ring with a determined
        # parameter already solved away; eliminating it restores equality
        printed_support = {v for g in printed.generators for v in g.support_vars()}
        reduced = derived
        eliminated: List[str] = []
        for name in entry.parameters:
            if name in printed_support:
                continue
            try:
                reduced, _ = con.eliminate_linear(reduced, name)
            except ValueError:
                continue
            eliminated.append(name)
        if eliminated:
            again = con.ideal_compare(printed, reduced, spair_cap)
            if again.equal:
                ideal_detail["equal_after_eliminating"] = eliminated
    stage("ideal-compare", cmp_.a_in_b, ideal_detail, time.perf_counter() - t0)

    t0 = time.perf_counter()
    fam_reports = [con.verify_family(entry, fam, derived) for fam in entry.families]
    stage(
        "families",
        all(r.ok for r in fam_reports),
        [
            {"label": r.label, "ok": r.ok, "checked": r.checked, "failures": list(r.failures)}
            for r in fam_reports
        ]
        or "no families shipped",
        time.perf_counter() - t0,
    )

    t0 = time.perf_counter()
    qdims = {side: con.computed_qdim(entry, side) for side in ("left", "right")}
    non_detail = []
    non_ok = True
    for fam in entry.families:
        for side in ("left", "right"):
            nv = con.nonvanishing_check(
                entry, fam, side, precision_bits=precision, computed_value=qdims[side]
            )
            non_ok = non_ok and nv.ok
            non_detail.append(
                {
                    "label": nv.label,
                    "side": side,
                    "point": dict(nv.point),
                    "computed": _qdim_point_dict(nv.computed),
                    "printed": _qdim_point_dict(nv.printed),
                    "agree": nv.agree,
                }
            )
    stage(
        "nonvanishing",
        non_ok,
        non_detail or "no families shipped",
        time.perf_counter() - t0,
    )

    t0 = time.perf_counter()
    cq = con.compare_qdims(entry, basis=basis_derived)
    report["qdim_match"] = {
        "computed_left": format_poly(cq.computed_left),
        "computed_right": format_poly(cq.computed_right),
        "printed_left": format_poly(entry.paper_qdim("left")),
        "printed_right": format_poly(entry.paper_qdim("right")),
        "left": _match_dict(cq.left),
        "right": _match_dict(cq.right),
        "seconds": round(time.perf_counter() - t0, 3),
    }

    report["corrections"] = [
        {"location": c.location, "justification": c.justification}
        for c in entry.corrections
    ]
    report["seconds"] = round(time.perf_counter() - started, 3)
    return report


def _match_dict(match: con.QdimMatch) -> dict:
    return {
        "status": match.status,
        "matched_side": match.matched_side,
        "scalar": None if match.scalar is None else str(match.scalar),
        "mod_ideal": match.mod_ideal,
    }


def _render_match(match: dict) -> str:
    if match["status"] == "unmatched":
        return "unmatched"
    where = "modulo the derived ideal" if match["mod_ideal"] else "exactly"
    if match["status"] == "unit_multiple":
        return f"{match['scalar']} * computed {match['matched_side']} {where}"
    return f"equals computed {match['matched_side']} {where}"


def render_verify_text(report: dict) -> str:
    lines = [f"== {report['entry']} =="]
    order = ["grading", "constraints", "potential", "ideal-compare", "families", "nonvanishing"]
    for name in order:
        st = report["stages"][name]
        mark = _PASS if st["ok"] else _FAIL
        extra = ""
        if name == "constraints":
            n = st["detail"]["count"]
            extra = f"{n} generator{'s' if n != 1 else ''}, eps {report['epsilon']:+d}"
        elif name == "potential":
            extra = st["detail"]["message"]
        elif name == "ideal-compare":
            d = st["detail"]
            extra = (
                f"printed<=derived: {_yn(d['printed_in_derived'])}, "
                f"derived<=printed: {_yn(d['derived_in_printed'])}"
            )
            if d.get("equal_after_eliminating"):
                extra += f" (equal after eliminating {', '.join(d['equal_after_eliminating'])})"
        elif name == "families":
            d = st["detail"]
            extra = d if isinstance(d, str) else f"{sum(r['ok'] for r in d)}/{len(d)} verified"
        elif name == "nonvanishing":
            d = st["detail"]
            if isinstance(d, str):
                extra = d
            else:
                good = sum(
                    r["computed"]["certificate"] is not None
                    and r["computed"]["certificate"]["status"] != "zero"
                    for r in d
                )
                extra = f"{good}/{len(d)} certified nonzero (computed invariant)"
                zeros = [r for r in d if r["computed"]["certificate"] and r["computed"]["certificate"]["status"] == "zero"]
                for r in zeros:
                    extra += f"; {r['label']} {r['side']}: computed value is 0"
        elif name == "grading":
            d = st["detail"]
            if "error" in d:
                extra = d["error"]
            else:
                extra = f"central charge {d['in']['central_charge']} both sides"
        lines.append(f"  {name:<14} {mark}  {extra}")
    qm = report["qdim_match"]
    lines.append(f"  qdim-match     info  left: {_render_match(qm['left'])}; right: {_render_match(qm['right'])}")
    lines.append(f"    computed left:  {qm['computed_left']}")
    lines.append(f"    computed right: {qm['computed_right']}")
    lines.append(f"    printed  left:  {qm['printed_left']}")
    lines.append(f"    printed  right: {qm['printed_right']}")
    if report["corrections"]:
        lines.append(f"  corrections applied: {len(report['corrections'])}")
        for c in report["corrections"]:
            lines.append(f"    {c['location']}: {c['justification']}")
    lines.append(f"  result         {_PASS if report['ok'] else _FAIL}  ({report['seconds']}s)")
    return "\n".join(lines)


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _summary_table(reports: Sequence[dict], catalog) -> str:
    lines = ["", "entry                 pair                          eps  result"]
    for rep in reports:
        entry = catalog[rep["entry"]]
        pair = f"{entry.side_in.potential_key} ~ {entry.side_out.potential_key}"
        eps = rep.get("epsilon")
        eps_s = f"{eps:+d}" if eps is not None else "?"
        lines.append(
            f"{rep['entry']:<21} {pair:<29} {eps_s:<4} {_PASS if rep['ok'] else _FAIL}"
        )
    return "\n".join(lines)


def _worker_verify(args: Tuple[Optional[str], str, int, int]) -> dict:
    catalog_dir, entry_id, spair_cap, precision = args
    catalog = load_catalog(Path(catalog_dir) if catalog_dir else None)
    return verify_entry(catalog[entry_id], spair_cap, precision)


def cmd_verify(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    if args.all:
        ids = sorted(catalog)
    else:
        ids = [resolve_entry(catalog, args.entry).id]
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            work = [
                (str(args.catalog) if args.catalog else None, i, args.spair_cap, args.precision)
                for i in ids
            ]
            reports = list(pool.map(_worker_verify, work))
    else:
        reports = [verify_entry(catalog[i], args.spair_cap, args.precision) for i in ids]
    reports.sort(key=lambda r: r["entry"])
    if args.json:
        print(json.dumps({"schema": SCHEMA_VERSION, "seed": args.seed, "reports": reports}, indent=2))
    else:
        for rep in reports:
            print(render_verify_text(rep))
        if len(reports) > 1:
            print(_summary_table(reports, catalog))
    return 0 if all(r["ok"] for r in reports) else 1


def _find_family(entry: EquivalenceEntry, label: str):
    for fam in entry.families:
        if fam.label == label:
            return fam
    hits = [f for f in entry.families if label.lower() in f.label.lower()]
    if len(hits) == 1:
        return hits[0]
    have = [f.label for f in entry.families]
    raise CatalogError(f"no unique family matches {label!r} (have {have})")


def cmd_qdim(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    entry = resolve_entry(catalog, args.entry)
    sides = ("left", "right") if args.side == "both" else (args.side,)
    out: dict = {"schema": SCHEMA_VERSION, "entry": entry.id, "sides": {}}
    if args.family:
        fam = _find_family(entry, args.family)
        out["family"] = fam.label
        for side in sides:
            nv = con.nonvanishing_check(entry, fam, side, precision_bits=args.precision)
            block = {"computed": _qdim_point_dict(nv.computed), "point": dict(nv.point)}
            if args.compare_paper:
                block["printed"] = _qdim_point_dict(nv.printed)
                block["agree"] = nv.agree
            out["sides"][side] = block
    else:
        if args.compare_paper:
            cq = con.compare_qdims(entry, spair_cap=args.spair_cap)
            for side in sides:
                match = cq.left if side == "left" else cq.right
                value = cq.computed_left if side == "left" else cq.computed_right
                out["sides"][side] = {
                    "computed": format_poly(value),
                    "printed": format_poly(entry.paper_qdim(side)),
                    "match": _match_dict(match),
                }
        else:
            for side in sides:
                out["sides"][side] = {"computed": format_poly(con.computed_qdim(entry, side))}
    if args.json:
        print(json.dumps(out, indent=2))
        return 0
    for side in sides:
        block = out["sides"][side]
        if args.family:
            cert = block["computed"]["certificate"]
            status = cert["status"] if cert else block["computed"].get("error", "?")
            point = ", ".join(f"{k}={v}" for k, v in sorted(block["point"].items())) or "-"
            print(f"qdim_{side} [{out['family']}; {point}] = {block['computed']['value']}  ({status})")
            if args.compare_paper:
                pcert = block["printed"]["certificate"]
                pstat = pcert["status"] if pcert else block["printed"].get("error", "?")
                print(f"  printed form evaluates to {block['printed']['value']}  ({pstat})")
        else:
            print(f"qdim_{side} = {block['computed']}")
            if args.compare_paper:
                print(f"  printed: {block['printed']}  [{_render_match(block['match'])}]")
    return 0


def cmd_constraints(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    entry = resolve_entry(catalog, args.entry)
    derived = con.derive_constraints(entry)
    if args.compare_paper:
        printed = con.paper_constraint_set(entry)
        cmp_ = con.ideal_compare(printed, derived, args.spair_cap)
        payload = {
            "schema": SCHEMA_VERSION,
            "entry": entry.id,
            "epsilon": derived.epsilon,
            "derived": list(derived.texts()),
            "printed": list(printed.texts()),
            "printed_in_derived": cmp_.a_in_b,
            "derived_in_printed": cmp_.b_in_a,
            "equal": cmp_.equal,
            "failing_printed": [format_poly(g) for g in cmp_.failing_a],
            "failing_derived": [format_poly(g) for g in cmp_.failing_b],
        }
        if args.json:
            print(json.dumps(payload, indent=2))
        else:
            print(f"{entry.id}: printed<=derived: {_yn(cmp_.a_in_b)}, derived<=printed: {_yn(cmp_.b_in_a)}")
            for g in payload["failing_printed"]:
                print(f"  printed generator outside the derived ideal: {g}")
            for g in payload["failing_derived"]:
                print(f"  derived generator outside the printed ideal: {g}")
        return 0 if cmp_.a_in_b else 1
    if args.json:
        print(
            json.dumps(
                {
                    "schema": SCHEMA_VERSION,
                    "entry": entry.id,
                    "epsilon": derived.epsilon,
                    "generators": list(derived.texts()),
                },
                indent=2,
            )
        )
        return 0
    if not derived.generators:
        print("(no constraints)")
    else:
        for text in derived.texts():
            print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbimf",
        description="Exact verification of the matrix-factorization equivalence catalog.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--catalog", type=Path, default=None, help="catalog directory (or env ORBIMF_CATALOG)")
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; nothing is randomized")
        p.add_argument("--precision", type=int, default=128, help="starting bits for interval certificates")
        p.add_argument("--spair-cap", type=int, default=50000, help="S-pair budget per Groebner run")

    v = sub.add_parser("verify", help="run every check for one entry or the whole catalog")
    common(v)
    group = v.add_mutually_exclusive_group(required=True)
    group.add_argument("--entry", help="entry id (prefix or substring accepted)")
    group.add_argument("--all", action="store_true")
    v.add_argument("--jobs", type=int, default=1, help="verify entries in parallel processes")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("qdim", help="print quantum dimensions")
    common(q)
    q.add_argument("--entry", required=True)
    q.add_argument("--family", help="evaluate at this solution family's point")
    q.add_argument("--side", choices=("left", "right", "both"), default="both")
    q.add_argument("--compare-paper", action="store_true", help="also show the printed closed form")
    q.set_defaults(func=cmd_qdim)

    c = sub.add_parser("constraints", help="derived parameter constraints")
    common(c)
    c.add_argument("--entry", required=True)
    c.add_argument("--compare-paper", action="store_true", help="two-way ideal comparison against the printed system")
    c.add_argument("--emit", action="store_true", help="print the unit-normalized generators")
    c.set_defaults(func=cmd_constraints)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CatalogError as exc:
        print(f"unknown entry or bad catalog: {exc}", file=sys.stderr)
        return 2
    except (BudgetExceeded, ResidueError, con.OracleBudgetExceeded) as exc:
        print(f"verification aborted: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
