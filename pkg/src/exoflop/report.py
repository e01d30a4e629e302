"""JSON documents for pipeline inputs and reports, and re-verification of report certificates."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import Any, Optional

import jsonschema

from .fan import Fan, TorusDivisor
from .pipeline import ExoflopReport, LGModel, PotentialEntry, PotentialSupport, build_lg_model
from .cone import Cone

SAFE = 2 ** 53 - 1
REPORT_SCHEMA = "exoflop-report/1"


class InputError(ValueError):
    """Malformed input; ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def enc(x) -> Any:
    """Exact JSON encoding: big integers and fractions become strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return enc(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x if abs(x) <= SAFE else str(x)
    if isinstance(x, dict):
        return {str(k): enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [enc(v) for v in x]
    if hasattr(x, "value"):
        return x.value
    raise TypeError(f"cannot encode {type(x).__name__}")


def dec(x) -> Any:
    """Inverse of :func:`enc` on numbers: ints stay ints, ``"p/q"`` become fractions."""
    if isinstance(x, str):
        try:
            if "/" in x:
                q = Fraction(x)
                return q.numerator if q.denominator == 1 else q
            return int(x)
        except ValueError:
            return x
    if isinstance(x, list):
        return [dec(v) for v in x]
    return x


def vec(x) -> tuple:
    return tuple(dec(v) for v in x)


def load_schema(name: str = "input.schema.json") -> dict:
    return json.loads(resources.files("exoflop").joinpath("schemas").joinpath(name).read_text("utf-8"))


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate_input(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        e = errors[0]
        raise InputError(_pointer(e.absolute_path), e.message)
    d = int(doc["lattice_rank"])
    nrays = len(doc["rays"])
    for i, r in enumerate(doc["rays"]):
        if len(r) != d:
            raise InputError(f"/rays/{i}", f"expected {d} coordinates, got {len(r)}")
    for i, c in enumerate(doc["max_cones"]):
        for j, k in enumerate(c):
            if not 0 <= int(k) < nrays:
                raise InputError(f"/max_cones/{i}/{j}", f"ray index {k} out of range")
    for i, D in enumerate(doc["divisors"]):
        if len(D) != nrays:
            raise InputError(f"/divisors/{i}", f"expected {nrays} coefficients, got {len(D)}")
    r = len(doc["divisors"])
    for i, e in enumerate(doc["potential"]):
        if len(e["point"]) != d + r:
            raise InputError(f"/potential/{i}/point", f"expected {d + r} coordinates")
    if "ray_names" in doc and len(doc["ray_names"]) != nrays + r:
        raise InputError("/ray_names", f"expected {nrays + r} names")
    for i, g in enumerate(doc.get("sigma_prime") or []):
        if len(g) != d + r:
            raise InputError(f"/sigma_prime/{i}", f"expected {d + r} coordinates")


def model_from_document(doc: dict) -> LGModel:
    validate_input(doc)
    base = Fan([vec(r) for r in doc["rays"]], doc["max_cones"], int(doc["lattice_rank"]))
    pot = PotentialSupport(tuple(
        PotentialEntry(vec(e["point"]), e.get("label", f"c{i + 1}"),
                       None if e.get("value") is None else Fraction(str(e["value"])))
        for i, e in enumerate(doc["potential"])))
    named = {k: vec(v) for k, v in (doc.get("named_vectors") or {}).items()}
    return build_lg_model(base, [TorusDivisor(vec(D)) for D in doc["divisors"]], pot,
                          doc.get("ray_names"), named)


def sigma_prime_from_document(doc: dict, rank: int) -> Optional[Cone]:
    gens = doc.get("sigma_prime")
    return Cone([vec(g) for g in gens], rank) if gens else None


def _fan_doc(F: Fan) -> dict:
    return {"rays": F.rays, "max_cones": F.max_cones}


def report_to_document(rep: ExoflopReport) -> dict:
    m = rep.model
    doc: dict = {
        "schema": REPORT_SCHEMA,
        "verdict": rep.verdict.value,
        "reasons": list(rep.reasons),
        "provisos": list(rep.provisos),
        "failed_stage": rep.failed_stage,
        "flags": {"smooth_input": rep.smooth_input, "smooth_output": rep.smooth_output},
        "input": {
            "base": _fan_doc(m.base),
            "divisors": [D.coeffs for D in m.divisors],
            "bundle": _fan_doc(m.bundle),
            "names": list(m.names),
            "m_frak": m.m_frak,
            "n_frak": m.n_frak,
            "charge_matrix": m.cox.charge_matrix,
            "torsion": [[d, row] for d, row in m.cox.torsion],
            "rcharge": m.rcharge,
            "potential": [{"label": e.label, "point": e.point} for e in m.potential.nonzero()],
        },
    }
    if rep.sigma_w:
        doc["sigma_w"] = {"points": rep.sigma_w.points, "dual_rays": rep.sigma_w.dual.rays,
                          "saturated": rep.sigma_w.saturated, "strict": rep.sigma_w.strict}
    if rep.sigma_prime is not None:
        doc["sigma_prime"] = {"rays": rep.sigma_prime.rays, "facets": rep.sigma_prime.facets}
    if rep.assumption:
        a = rep.assumption
        doc["assumption"] = {"clause_i": a.clause_i, "clause_ii": a.clause_ii,
                             "splitting": a.splitting, "messages": list(a.messages)}
        if a.partition:
            p = a.partition
            doc["assumption"]["nef_partition"] = {
                "dual_splitting": p.dual_splitting, "parts": p.parts,
                "kernel_basis": p.kernel_basis, "smith_diagonal": p.smith_diagonal}
    if rep.psi:
        ps = rep.psi
        doc["psi"] = {
            **_fan_doc(ps.fan), "mbar": ps.mbar,
            "points": ps.triangulation.config.points, "cells": ps.triangulation.cells,
            "weights": ps.triangulation.weights, "insertion_order": ps.insertion_order,
            "certificate": {"scale": ps.certificate.scale,
                            "functionals": [[c, f] for c, f in ps.certificate.functionals],
                            "ray_values": ps.certificate.ray_values},
        }
    if rep.height:
        doc["height"] = {"case": rep.height.case.value, "off_one": [[v, h] for v, h in rep.height.off_one]}
    if rep.output:
        o = rep.output
        doc["output"] = {
            "base": _fan_doc(o.base), "divisors": [D.coeffs for D in o.divisors],
            "variables": o.variables, "names": list(o.names), "lifted_bundle": _fan_doc(o.lifted_bundle),
            "charge_matrix": o.cox.charge_matrix, "torsion": [[d, row] for d, row in o.cox.torsion],
            "support_matches": o.support_matches, "complete": o.complete, "simplicial": o.simplicial,
            "smooth": o.smooth, "unused": o.unused,
            "g": [{"part": g.index, "splitting_point": g.splitting_point, "labels": list(g.labels),
                   "points": g.points, "exponents": g.exponents} for g in rep.rewritten],
        }
    if rep.criteria:
        c = rep.criteria
        doc["criteria"] = {"route_a": c.route_a, "route_a_reason": c.route_a_reason,
                           "route_b": None if c.route_b is None else {
                               "passed": c.route_b.passed, "reason": c.route_b.reason,
                               "height_bound": c.route_b.height_bound, "witness": c.route_b.witness},
                           "certified_by": c.certified_by}
    return enc(doc)


def emit(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def parse(text: str) -> dict:
    return json.loads(text)


def _dot(a, b):
    return sum(Fraction(x) * Fraction(y) for x, y in zip(a, b))


def verify_document(doc: dict) -> list[str]:
    """Re-check every certificate in a report using only its own numbers; returns failures."""
    bad = []
    inp = doc["input"]
    m, n = vec(inp["m_frak"]), vec(inp["n_frak"])
    rays = [vec(r) for r in inp["bundle"]["rays"]]
    for row in inp["charge_matrix"]:
        q = vec(row)
        if any(sum(c * r[k] for c, r in zip(q, rays)) != 0 for k in range(len(m))):
            bad.append("input charge row is not a relation among the rays")
    a = doc.get("assumption")
    if a and a.get("splitting"):
        sp = [vec(p) for p in a["splitting"]]
        if tuple(sum(c) for c in zip(*sp)) != n or any(_dot(m, p) != 1 for p in sp):
            bad.append("splitting points do not sum to n at height one")
        if a.get("nef_partition"):
            ds = [vec(x) for x in a["nef_partition"]["dual_splitting"]]
            if any(_dot(ds[i], sp[j]) != (i == j) for i in range(len(ds)) for j in range(len(sp))):
                bad.append("dual splitting is not dual to the splitting")
            for i, part in enumerate(a["nef_partition"]["parts"]):
                for v in part:
                    if [_dot(x, vec(v)) for x in ds] != [1 if k == i else 0 for k in range(len(ds))]:
                        bad.append(f"generator {v} is not in part {i}")
    ps = doc.get("psi")
    if ps:
        from .triangulate import PointConfig, lower_hull_subdivision
        cfg = PointConfig([vec(p) for p in ps["points"]], vec(ps["mbar"]))
        sub = lower_hull_subdivision(cfg, [dec(w) for w in ps["weights"]])
        if not sub.is_triangulation or [list(c) for c in sub.cells] != [list(c) for c in ps["cells"]]:
            bad.append("weights do not reproduce the triangulation")
        cert = ps["certificate"]
        prays = [vec(r) for r in ps["rays"]]
        for cell, f in cert["functionals"]:
            if any(_dot(vec(f), prays[i]) != dec(cert["ray_values"][i]) for i in cell):
                bad.append(f"conical functional on {cell} is not integral-linear")
    out = doc.get("output")
    if out:
        vars_ = [vec(v) for v in out["variables"]]
        for row in out["charge_matrix"]:
            q = vec(row)
            if any(sum(c * v[k] for c, v in zip(q, vars_)) != 0 for k in range(len(m))):
                bad.append("output charge row is not a relation among the variables")
        for g in out["g"]:
            for p, row in zip(g["points"], g["exponents"]):
                if [_dot(vec(p), v) for v in vars_] != list(vec(row)):
                    bad.append(f"exponents of {p} disagree with the pairings")
    return bad
