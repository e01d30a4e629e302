"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .arith import dot
from .cone import M_SIDE, N_SIDE, Cone, dual_cone
from .fan import FanError, format_monomial
from .gorenstein import GorensteinError, classify, find_splittings, nef_partition
from .pipeline import AssumptionError, ModelError, Verdict, run_exoflop
from .report import (
    InputError,
    dec,
    emit,
    enc,
    model_from_document,
    report_to_document,
    sigma_prime_from_document,
    vec,
)
from .triangulate import (
    PointConfig,
    RegularTriangulation,
    TriangulationError,
    extend_triangulation,
    find_regularity_weights,
    lower_hull_subdivision,
)

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError("", f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError("", f"invalid JSON in {path}: {exc}")


def _parse_vector(text: str) -> tuple:
    text = text.strip().strip("()[]")
    sep = ":" if ":" in text else ","
    return tuple(dec(t.strip()) for t in text.split(sep) if t.strip())


def _generators(doc, key: str = "generators") -> list:
    gens = doc.get(key) if isinstance(doc, dict) else doc
    if not isinstance(gens, list) or not gens:
        raise InputError(f"/{key}" if isinstance(doc, dict) else "", "expected a non-empty list of vectors")
    for i, g in enumerate(gens):
        if not isinstance(g, list):
            raise InputError(f"/{key}/{i}" if isinstance(doc, dict) else f"/{i}", "expected a vector")
    return [vec(g) for g in gens]


def _cone_from_file(path: str, side: Optional[str] = None) -> Cone:
    doc = _load(path)
    gens = _generators(doc)
    s = side or (doc.get("side", N_SIDE) if isinstance(doc, dict) else N_SIDE)
    return Cone(gens, len(gens[0]), s)


def _fmt(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _print_json(obj) -> None:
    print(emit(enc(obj)))


def _resolve_splitting(tokens: str, doc: dict, names: Sequence[str], rays) -> tuple:
    named = {k: vec(v) for k, v in (doc.get("named_vectors") or {}).items()}
    by_name = dict(zip(names, rays))
    out = []
    for tok in (t.strip() for t in tokens.split(",") if t.strip()):
        if tok in named:
            out.append(named[tok])
        elif tok in by_name:
            out.append(tuple(by_name[tok]))
        elif ":" in tok:
            out.append(_parse_vector(tok))
        else:
            raise InputError("/named_vectors", f"unknown splitting vector {tok!r}")
    return tuple(out)


def cmd_analyze(args) -> int:
    doc = _load(args.file)
    model = model_from_document(doc)
    flags = doc.get("flags") or {}
    rank = model.bundle.ambient_rank
    sp = sigma_prime_from_document(doc, rank)
    if args.sigma_prime:
        gens = _generators(_load(args.sigma_prime))
        sp = Cone(gens, rank)
    split = _resolve_splitting(args.splitting, doc, model.names, model.bundle.rays) if args.splitting else None
    mbar = _parse_vector(args.mbar) if args.mbar else (vec(flags["mbar"]) if flags.get("mbar") else None)
    rep = run_exoflop(model, sp, splitting=split,
                      smooth_input=args.smooth_input or flags.get("smooth_input", False),
                      smooth_output=args.smooth_output or flags.get("smooth_output", False),
                      mbar=mbar, height_bound=args.height_bound or flags.get("height_bound"))
    if args.json:
        print(emit(report_to_document(rep)))
    else:
        _print_report(rep)
    return EXIT_INCONCLUSIVE if rep.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def _print_report(rep) -> None:
    m = rep.model
    print(f"verdict: {rep.verdict.value}")
    for r in rep.reasons:
        print(f"  reason: {r}")
    for p in rep.provisos:
        print(f"  proviso: {p}")
    print(f"m = {_fmt(m.m_frak)}  n = {_fmt(m.n_frak)}  r = {m.r}")
    print("input charge rows: " + "; ".join(_fmt(r) for r in m.cox.charge_matrix))
    if rep.sigma_w:
        print(f"potential points: {len(rep.sigma_w.points)} (saturated: {rep.sigma_w.saturated}, "
              f"strictly inside the full slice: {rep.sigma_w.strict})")
    if rep.sigma_prime is not None:
        print("sigma_prime rays: " + " ".join(_fmt(v) for v in rep.sigma_prime.rays))
    if rep.assumption:
        a = rep.assumption
        print(f"assumption: clause i {a.clause_i}, clause ii {a.clause_ii}")
        for msg in a.messages:
            print(f"  {msg}")
        if a.partition:
            for i, (p, mm) in enumerate(zip(a.partition.splitting, a.partition.dual_splitting)):
                print(f"  p{i + 1} = {_fmt(p)}   m'{i + 1} = {_fmt(mm)}")
    if rep.psi:
        print(f"psi: {len(rep.psi.fan.rays)} rays, {len(rep.psi.fan.max_cones)} maximal cones, "
              f"mbar = {_fmt(rep.psi.mbar)}, certificate scale {rep.psi.certificate.scale}")
        for v in rep.psi.insertion_order:
            print(f"  inserted {_fmt(v)}")
    if rep.height:
        print(f"height case: {rep.height.case.value}")
    if rep.output:
        o = rep.output
        print(f"output base: {len(o.base.rays)} rays, {len(o.base.max_cones)} cones, complete {o.complete}, "
              f"smooth {o.smooth}, support matches {o.support_matches}")
        print("output charge rows: " + "; ".join(_fmt(r) for r in o.cox.charge_matrix))
        print("pairings <m, u> (rows: terms, columns: " + " ".join(o.names) + ")")
        for g in rep.rewritten:
            own = o.names[o.variables.index(g.splitting_point)]
            print(f"  g{g.index + 1} (times {own}):")
            for lab, row in zip(g.labels, g.exponents):
                exps = [0 if n == own else e for n, e in zip(o.names, row)]
                print(f"    {lab}: {' '.join(f'{e:>2}' for e in row)}   {lab}*{format_monomial(exps, o.names)}")
    if rep.criteria:
        c = rep.criteria
        print(f"criteria: route A {c.route_a} ({c.route_a_reason})"
              + (f", route B {c.route_b.passed} ({c.route_b.reason})" if c.route_b else ""))


def cmd_dual(args) -> int:
    C = _cone_from_file(args.file, args.side)
    D = dual_cone(C)
    if args.json:
        _print_json({"side": D.side, "rays": D.rays, "lineality": D.lineality,
                     "facets": D.facets, "equations": D.equations})
        return EXIT_OK
    print(f"dual cone ({D.side} side), dim {D.dim}")
    for r in D.rays:
        print(f"  ray {_fmt(r)}   checks: " + " ".join(str(dot(r, g)) for g in C.rays))
    for v in D.lineality:
        print(f"  lineality {_fmt(v)}")
    return EXIT_OK


def cmd_gorenstein(args) -> int:
    C = _cone_from_file(args.file)
    cert = classify(C)
    if args.json:
        _print_json({"kind": cert.kind.value, "m": cert.m_sigma, "n": cert.n_dual, "index": cert.index})
        return EXIT_OK
    line = cert.kind.value
    if cert.index is not None:
        line += f" index {cert.index}"
    if cert.m_sigma is not None:
        line += f", m={_fmt(cert.m_sigma)}"
    if cert.n_dual is not None:
        line += f", n={_fmt(cert.n_dual)}"
    print(line)
    if cert.m_sigma is not None:
        for v in C.rays:
            print(f"  <m, {_fmt(v)}> = {dot(cert.m_sigma, v)}")
    return EXIT_OK


def _m_n(C: Cone, args):
    cert = classify(C)
    m = _parse_vector(args.m) if args.m else cert.m_sigma
    n = _parse_vector(args.n) if args.n else cert.n_dual
    if m is None or n is None or any(Fraction(x).denominator != 1 for x in m):
        raise GorensteinError(f"cone is {cert.kind.value}; pass --m and --n explicitly")
    return tuple(int(x) for x in m), tuple(int(x) for x in n)


def cmd_split(args) -> int:
    C = _cone_from_file(args.file)
    m, n = _m_n(C, args)
    found = find_splittings(C, m, n, int(dot(m, n)), all_splittings=args.all)
    if args.json:
        _print_json([{"points": s.points, "has_repeats": s.has_repeats} for s in found])
    else:
        if not found:
            print("not completely split")
        for s in found:
            print(" + ".join(_fmt(p) for p in s.points) + f" = {_fmt(n)}")
    return EXIT_OK if found else EXIT_INCONCLUSIVE


def cmd_nef_partition(args) -> int:
    C = _cone_from_file(args.file)
    m, n = _m_n(C, args)
    split = [_parse_vector(t) for t in args.splitting.split(";")] if args.splitting else None
    P = nef_partition(C, split, m=m, n=n)
    if args.json:
        _print_json({"splitting": P.splitting, "dual_splitting": P.dual_splitting, "parts": P.parts,
                     "kernel_basis": P.kernel_basis,
                     "projected": [[v, i, pv] for v, i, pv in P.projected_generators()]})
        return EXIT_OK
    for i, (p, mm) in enumerate(zip(P.splitting, P.dual_splitting)):
        print(f"part {i + 1}: p = {_fmt(p)}, m' = {_fmt(mm)}")
        for v in P.parts[i]:
            print(f"  {_fmt(v)}   pairings {[dot(x, v) for x in P.dual_splitting]}   image {_fmt(P.project(v))}")
    return EXIT_OK


def _config(doc) -> PointConfig:
    pts = _generators(doc, "points")
    if "mbar" not in doc:
        raise InputError("/mbar", "required")
    return PointConfig(pts, vec(doc["mbar"]))


def cmd_triangulate(args) -> int:
    if args.extend:
        base_doc, new_doc = _load(args.extend[0]), _load(args.extend[1])
        cfg = _config(base_doc)
        cells = base_doc.get("cells")
        if cells is None:
            raise InputError("/cells", "base triangulation cells required")
        w = [dec(x) for x in base_doc["weights"]] if "weights" in base_doc else find_regularity_weights(cfg, cells)
        if w is None:
            raise TriangulationError("base triangulation is not regular")
        T0 = RegularTriangulation(cfg, tuple(tuple(sorted(c)) for c in cells), tuple(Fraction(x) for x in w))
        if not T0.verify():
            raise TriangulationError("weights do not certify the base triangulation")
        new = _generators(new_doc, "points")
        T = extend_triangulation(T0, new)
        result = {"points": T.config.points, "cells": T.cells, "weights": T.weights,
                  "insertions": [{"point": s.point, "case": s.case, "weight": s.weight, "refined": s.refined}
                                 for s in T.log]}
    else:
        if not args.file:
            raise InputError("", "a configuration file or --extend is required")
        doc = _load(args.file)
        cfg = _config(doc)
        if "weights" in doc:
            sub = lower_hull_subdivision(cfg, [dec(x) for x in doc["weights"]])
            result = {"cells": sub.cells, "is_triangulation": sub.is_triangulation}
        elif "cells" in doc:
            w = find_regularity_weights(cfg, doc["cells"])
            result = {"cells": doc["cells"], "regular": w is not None, "weights": w}
        else:
            raise InputError("", "need weights or cells")
    if args.json:
        _print_json(result)
    else:
        for k, v in result.items():
            if isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple, dict)):
                print(f"{k}:")
                for x in v:
                    if isinstance(x, dict):
                        print(f"  {_fmt(x['point'])}  case {x['case']}  weight {x['weight']}"
                              + ("  (pulling refinement)" if x["refined"] else ""))
                    else:
                        print(f"  {_fmt(x)}")
            elif isinstance(v, (list, tuple)):
                print(f"{k}: {_fmt(v)}")
            else:
                print(f"{k}: {v}")
    return EXIT_OK if result.get("regular", True) is not False else EXIT_INCONCLUSIVE


def cmd_fixtures(args) -> int:
    from . import fixtures
    if args.action == "list":
        print("aspinwall\nexample62\nlt:<n>  (n >= 2)")
        return EXIT_OK
    if args.action == "export":
        if len(args.names) != 1:
            raise InputError("", "export takes exactly one fixture name")
        text = json.dumps(enc(fixtures.build(args.names[0]).document), indent=2)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return EXIT_OK
    names = args.names or ["aspinwall", "example62", "lt:2", "lt:3"]
    try:
        results = fixtures.run_fixtures(names)
    except (KeyError, ValueError) as exc:
        raise InputError("", str(exc))
    ok = True
    for res in results:
        if args.json:
            continue
        status = "pass" if res.passed else "FAIL"
        print(f"{res.name}: {status} ({sum(c[1] for c in res.checks)}/{len(res.checks)} checks)")
        if not res.passed:
            label, detail = res.first_failure
            print(f"  first divergence: {label}: {detail}")
    ok = all(r.passed for r in results)
    if args.json:
        _print_json([{"name": r.name, "passed": r.passed,
                      "checks": [{"label": lab, "passed": p, "detail": d} for lab, p, d in r.checks]}
                     for r in results])
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exoflop", description="Exact toric exoflop computations.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the full pipeline on an input document")
    a.add_argument("file")
    a.add_argument("--sigma-prime", dest="sigma_prime")
    a.add_argument("--splitting", help="comma-separated vector names or colon-separated vectors")
    a.add_argument("--smooth-input", action="store_true")
    a.add_argument("--smooth-output", action="store_true")
    a.add_argument("--height-bound", type=int)
    a.add_argument("--mbar")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("dual", help="dual cone")
    d.add_argument("file")
    d.add_argument("--side", choices=[N_SIDE, M_SIDE])
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_dual)

    g = sub.add_parser("gorenstein", help="Gorenstein classification")
    g.add_argument("file")
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gorenstein)

    s = sub.add_parser("split", help="complete splittings")
    s.add_argument("file")
    s.add_argument("--all", action="store_true")
    s.add_argument("--m")
    s.add_argument("--n")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_split)

    n = sub.add_parser("nef-partition", help="nef partition from a completely split cone")
    n.add_argument("file")
    n.add_argument("--splitting", help="semicolon-separated vectors")
    n.add_argument("--m")
    n.add_argument("--n")
    n.add_argument("--json", action="store_true")
    n.set_defaults(func=cmd_nef_partition)

    t = sub.add_parser("triangulate", help="lower hulls, regularity certificates, extensions")
    t.add_argument("file", nargs="?")
    t.add_argument("--extend", nargs=2, metavar=("BASE", "NEW_POINTS"))
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_triangulate)

    f = sub.add_parser("fixtures", help="worked-example fixtures")
    f.add_argument("action", choices=["run", "list", "export"])
    f.add_argument("names", nargs="*")
    f.add_argument("-o", "--output")
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error at {exc.pointer or '/'}: {exc.args[0].split(': ', 1)[-1]}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelError, AssumptionError, FanError, GorensteinError, TriangulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
