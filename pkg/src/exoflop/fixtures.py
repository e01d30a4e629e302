"""Worked examples as regenerable fixtures, each with its own assertion suite."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .arith import IntVector, same_row_lattice
from .cone import Cone, cones_equal, dual_cone
from .fan import Fan, TorusDivisor
from .gorenstein import HeightCase, Kind, classify, find_splittings
from .polytope import Polytope, height_one_points, lattice_points
from .pipeline import (
    ExoflopReport,
    LGModel,
    PotentialSupport,
    Verdict,
    build_lg_model,
    identity_exoflop,
    identity_matches,
    run_exoflop,
)


def unit(n: int, i: int) -> IntVector:
    return tuple(1 if k == i else 0 for k in range(n))


def simplex_fan(rays) -> Fan:
    """Complete fan on ``d + 1`` rays whose maximal cones are all ``d``-subsets."""
    k = len(rays)
    return Fan(rays, itertools.combinations(range(k), k - 1))


@dataclass
class Fixture:
    name: str
    model: LGModel
    sigma_prime: Optional[Cone] = None
    splittings: dict = field(default_factory=dict)
    smooth_input: bool = False
    smooth_output: bool = False
    document: dict = field(default_factory=dict)

    def run(self, splitting: Optional[str] = None) -> ExoflopReport:
        split = self.splittings.get(splitting) if splitting else None
        return run_exoflop(self.model, self.sigma_prime, splitting=split,
                           smooth_input=self.smooth_input, smooth_output=self.smooth_output)


def _document(model: LGModel, base_rays, cones, divisors, potential, **extra) -> dict:
    doc = {
        "schema": "exoflop-input/1",
        "lattice_rank": len(base_rays[0]),
        "rays": [list(r) for r in base_rays],
        "max_cones": [list(c) for c in cones],
        "divisors": [list(D) for D in divisors],
        "potential": [{"point": list(e.point), "label": e.label} for e in potential.entries],
        "ray_names": list(model.names),
    }
    doc.update(extra)
    return doc


# ---- projective 3-space with a special quartic

ASPINWALL_VERTICES = ((-1, -1, -1, 1), (-1, 3, -1, 1), (-1, -1, 3, 1),
                      (1, -1, -1, 1), (1, 1, -1, 1), (1, -1, 1, 1))
ASPINWALL_ADDED_CONE = ((-1, 0, 0, 1), (0, 1, 0, 1), (0, 0, 1, 1), (-1, -1, -1, 1))


def aspinwall() -> Fixture:
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]
    base = simplex_fan(rays)
    D = (1, 1, 1, 1)
    xi = lattice_points(Polytope.from_vertices(ASPINWALL_VERTICES))
    pot = PotentialSupport.from_points(xi)
    names = ("x1", "x2", "x3", "x0", "u")
    model = build_lg_model(base, [TorusDivisor(D)], pot, names, {"y": (-1, 0, 0, 1)})
    doc = _document(model, rays, base.max_cones, [D], pot, named_vectors={"y": [-1, 0, 0, 1]},
                    flags={"smooth_input": False, "smooth_output": True})
    # the quartic is special (x1-degree at most 2), so the input side is singular
    return Fixture("aspinwall", model, None, {}, smooth_input=False, smooth_output=True, document=doc)


# ---- rank-two bundles with two different splittings

RHO = {
    1: (2, 0, -1, 0, 1), 2: (0, 2, -1, 0, 1), 3: (-1, -1, 2, 1, 0), 4: (-1, -1, 0, 1, 0),
    5: (1, -1, 0, 1, 0), 6: (-1, 1, 0, 1, 0), 7: (0, 0, 1, 0, 1), 8: (0, 0, -1, 0, 1),
    9: (0, -1, 0, 1, 0), 10: (0, 1, 0, 0, 1), 11: (0, 0, 0, 1, 0), 12: (0, 0, 0, 0, 1),
}
XI_62 = ((1, 0, 0, 1, 0), (0, 1, 0, 1, 0), (0, 0, 1, 0, 1), (-1, -1, -1, 0, 1), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1))
M_FRAK_62 = (0, 0, 0, 1, 1)

# exponents of x1..x12 in each term of W
W_TABLE_62 = {
    "c1": {1: 2, 5: 2, 9: 1, 11: 1},
    "c2": {2: 2, 6: 2, 10: 1, 11: 1},
    "c3": {3: 2, 7: 2, 10: 1, 12: 1},
    "c4": {4: 2, 8: 2, 9: 1, 12: 1},
    "c5": {3: 1, 4: 1, 5: 1, 6: 1, 9: 1, 11: 1},
    "c6": {1: 1, 2: 1, 7: 1, 8: 1, 10: 1, 12: 1},
}
# coefficient of each bundle variable, as {label: exponents of x1..x4}
W_PRIME = {11: {"c1": (2, 0, 0, 0), "c2": (0, 2, 0, 0), "c5": (0, 0, 1, 1)},
           12: {"c3": (0, 0, 2, 0), "c4": (0, 0, 0, 2), "c6": (1, 1, 0, 0)}}
W_DOUBLE_PRIME = {9: {"c1": (2, 0, 0, 0), "c4": (0, 0, 0, 2), "c5": (0, 0, 1, 1)},
                  10: {"c2": (0, 2, 0, 0), "c3": (0, 0, 2, 0), "c6": (1, 1, 0, 0)}}


def sigma_62(*idx: int) -> Cone:
    return Cone([RHO[i] for i in idx], 5)


def example62() -> Fixture:
    rays = [RHO[i][:3] for i in (1, 2, 3, 4)]
    base = simplex_fan(rays)
    divisors = [(0, 0, 1, 1), (1, 1, 0, 0)]
    pot = PotentialSupport.from_points(XI_62)
    names = ("x1", "x2", "x3", "x4", "x11", "x12")
    named = {f"rho{i}": v for i, v in RHO.items()}
    model = build_lg_model(base, [TorusDivisor(D) for D in divisors], pot, names,
                           {f"x{i}": v for i, v in RHO.items()})
    sp = sigma_62(*range(1, 9))
    doc = _document(model, rays, base.max_cones, divisors, pot,
                    named_vectors={**{f"x{i}": list(v) for i, v in RHO.items()},
                                   **{k: list(v) for k, v in named.items()}},
                    sigma_prime=[list(RHO[i]) for i in range(1, 9)],
                    flags={"smooth_input": True, "smooth_output": True})
    return Fixture("example62", model, sp,
                   {"rho11,rho12": (RHO[11], RHO[12]), "rho9,rho10": (RHO[9], RHO[10])},
                   smooth_input=True, smooth_output=True, document=doc)


# ---- the parameterized family

def lt_rays(n: int) -> dict:
    """Closed-form rays in rank ``2n + 1``: base lifts, the two bundle rays and the extra rays."""
    N = 2 * n + 1
    e = [unit(N, i) for i in range(N)]
    d1 = tuple(sum(e[i][k] for i in range(n)) for k in range(N))
    d2 = tuple(sum(e[i][k] for i in range(n, 2 * n - 1)) for k in range(N))

    def comb(*terms):
        return tuple(sum(c * v[k] for c, v in terms) for k in range(N))

    out = {}
    for i in range(n):
        out[i + 1] = comb((n, e[i]), (-1, d2), (1, e[2 * n]))
    for i in range(n, 2 * n - 1):
        out[i + 1] = comb((-1, d1), (n, e[i]), (1, e[2 * n - 1]))
    out[2 * n] = comb((-1, d1), (1, e[2 * n - 1]))
    for i in range(n):
        out[2 * n + i + 1] = comb((-1, d1), (n, e[i]), (1, e[2 * n - 1]))
    for i in range(n - 1):
        out[3 * n + i + 1] = comb((-1, d2), (n, e[n + i]), (1, e[2 * n]))
    out[4 * n] = comb((-1, d2), (1, e[2 * n]))
    out["tau1"] = e[2 * n - 1]
    out["tau2"] = e[2 * n]
    return out


def lt_xi(n: int) -> tuple[IntVector, ...]:
    N = 2 * n + 1
    pts = []
    for i in range(n):
        pts.append(tuple(1 if k in (i, 2 * n - 1) else 0 for k in range(N)))
    for i in range(n, 2 * n - 1):
        pts.append(tuple(1 if k in (i, 2 * n) else 0 for k in range(N)))
    pts.append(tuple(-1 if k < 2 * n - 1 else (1 if k == 2 * n else 0) for k in range(N)))
    pts.append(unit(N, 2 * n - 1))
    pts.append(unit(N, 2 * n))
    return tuple(pts)


def lt_partition(n: int) -> dict:
    """Expected rewritten potential: label -> (part, exponents of x1..x4n)."""
    def mono(exps: dict) -> tuple:
        return tuple(exps.get(k, 0) for k in range(1, 4 * n + 1))

    out = {}
    for i in range(1, n + 1):
        out[f"c{i}"] = (0, mono({i: n, 2 * n + i: n}))
    for i in range(n + 1, 2 * n + 1):
        out[f"c{i}"] = (1, mono({i: n, 2 * n + i: n}))
    out[f"c{2 * n + 1}"] = (0, mono({k: 1 for k in range(n + 1, 3 * n + 1)}))
    out[f"c{2 * n + 2}"] = (1, mono({**{k: 1 for k in range(1, n + 1)},
                                      **{k: 1 for k in range(3 * n + 1, 4 * n + 1)}}))
    return out


def lt(n: int) -> Fixture:
    if n < 2:
        raise ValueError("the family needs n >= 2")
    R = lt_rays(n)
    d = 2 * n - 1
    rays = [R[i][:d] for i in range(1, 2 * n + 1)]
    base = simplex_fan(rays)
    D_tau1 = tuple(1 if i >= n else 0 for i in range(2 * n))
    D_tau2 = tuple(1 if i < n else 0 for i in range(2 * n))
    pot = PotentialSupport.from_points(lt_xi(n))
    names = tuple(f"x{i}" for i in range(1, 2 * n + 1)) + ("u1", "u2")
    named = {f"x{i}": R[i] for i in range(2 * n + 1, 4 * n + 1)}
    model = build_lg_model(base, [TorusDivisor(D_tau1), TorusDivisor(D_tau2)], pot, names, named)
    doc = _document(model, rays, base.max_cones, [D_tau1, D_tau2], pot,
                    named_vectors={k: list(v) for k, v in named.items()})
    return Fixture(f"lt:{n}", model, None, {}, document=doc)


# ---- assertion suites

@dataclass
class FixtureResult:
    name: str
    checks: list = field(default_factory=list)

    def check(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append((label, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def first_failure(self):
        return next(((lab, det) for lab, ok, det in self.checks if not ok), None)


def _table_by_name(report: ExoflopReport) -> dict:
    """label -> (part, {variable name: exponent})"""
    out = {}
    for part in report.rewritten:
        for lab, row in zip(part.labels, part.exponents):
            out[lab] = (part.index, dict(zip(report.output.names, row)))
    return out


def _restricted(report: ExoflopReport, keep: list[str]) -> dict:
    """Coefficient of each splitting variable restricted to ``keep``."""
    split_names = [report.output.names[report.output.variables.index(p)] for p in report.assumption.splitting]
    out: dict = {}
    for lab, (i, exps) in _table_by_name(report).items():
        own = split_names[i]
        ok = exps.get(own) == 1 and all(exps.get(s) == 0 for s in split_names if s != own)
        out.setdefault(own, {})[lab] = tuple(exps.get(k, 0) for k in keep) if ok else None
    return out


def check_aspinwall(fx: Fixture) -> FixtureResult:
    res = FixtureResult(fx.name)
    m = fx.model
    res.check("input charge lattice", same_row_lattice(m.cox.charge_matrix, [(1, 1, 1, 1, -4)]),
              str(m.cox.charge_matrix))
    rep = fx.run()
    res.check("sigma_prime is the dual of the potential cone",
              cones_equal(rep.sigma_prime, Cone([*m.bundle.rays[:4], (-1, 0, 0, 1)], 4)))
    added = {frozenset(rep.psi.fan.cone_vectors(c)) for c in rep.psi.fan.max_cones} - \
        {frozenset(m.bundle.cone_vectors(c)) for c in m.bundle.max_cones}
    res.check("extension adds exactly one simplex", added == {frozenset(ASPINWALL_ADDED_CONE)}, str(added))
    res.check("height case", rep.height.case is HeightCase.ALL_HEIGHTS_1, str(rep.height.case))
    out = rep.output
    res.check("output charge lattice", out is not None and same_row_lattice(
        out.cox.charge_matrix, [(1, 1, 1, 1, -4, 0), (1, 0, 0, 0, -2, 1)]),
        str(out and out.cox.charge_matrix))
    res.check("output base has six maximal cones and five rays",
              out is not None and len(out.base.max_cones) == 6 and len(out.base.rays) == 5)
    res.check("output is smooth and complete", out is not None and out.smooth and out.complete)
    res.check("verdict", rep.verdict is Verdict.CREPANT, rep.verdict.value)
    res.check("identity exoflop", identity_matches(m, identity_exoflop(m)))
    _soundness(res, rep)
    return res


def check_example62(fx: Fixture) -> FixtureResult:
    res = FixtureResult(fx.name)
    m = fx.model
    sigma = sigma_62(*range(1, 9))
    for label, C in (("sigma", sigma), ("sigma_2", sigma_62(1, 2, 3, 4, 9, 10))):
        cert = classify(C)
        res.check(f"{label} reflexive of index 2 with m = (0,0,0,1,1)",
                  cert.kind is Kind.REFLEXIVE_GORENSTEIN and cert.index == 2 and cert.m_sigma == M_FRAK_62,
                  f"{cert.kind.value} {cert.m_sigma} {cert.index}")
    s1 = sigma_62(1, 2, 3, 4, 11, 12)
    res.check("sigma_1 is split with respect to m", bool(find_splittings(s1, M_FRAK_62, M_FRAK_62, 2)))
    res.check("height-one slice of the dual", set(height_one_points(dual_cone(sigma), M_FRAK_62)) == set(XI_62))
    table = m.monomial_table([RHO[i] for i in range(1, 13)])
    expected = tuple(tuple(W_TABLE_62[f"c{k}"].get(i, 0) for i in range(1, 13)) for k in range(1, 7))
    res.check("W against all twelve rays", table == expected, str(table))
    keep = ["x1", "x2", "x3", "x4"]
    for key, want in (("rho11,rho12", W_PRIME), ("rho9,rho10", W_DOUBLE_PRIME)):
        rep = fx.run(key)
        got = _restricted(rep, keep) if rep.output else None
        res.check(f"rewrite with {key}", got == {f"x{k}": v for k, v in want.items()}, str(got))
        res.check(f"verdict with {key}", rep.verdict is Verdict.EQUIVALENCE, rep.verdict.value)
        _soundness(res, rep)
    res.check("identity exoflop", identity_matches(m, identity_exoflop(m)))
    return res


def lt_listed(n: int) -> list[IntVector]:
    R = lt_rays(n)
    return [R[i] for i in range(1, 4 * n + 1)] + [R["tau1"], R["tau2"]]


def check_lt(fx: Fixture, n: int) -> FixtureResult:
    res = FixtureResult(fx.name)
    m = fx.model
    R = lt_rays(n)
    res.check("bundle rays match the closed form",
              m.bundle.rays == tuple(R[i] for i in range(1, 2 * n + 1)) + (R["tau1"], R["tau2"]))
    rep = fx.run()
    listed = lt_listed(n)
    res.check("dual of the potential cone equals the cone on the listed vectors",
              cones_equal(rep.sigma_w.dual, Cone(listed, 2 * n + 1)))
    res.check("listed vectors are its rays plus the two bundle rays",
              set(rep.sigma_w.dual.rays) | {R["tau1"], R["tau2"]} == set(listed))
    crit = rep.criteria
    res.check("route A certifies", crit is not None and crit.route_a, crit.route_a_reason if crit else "")
    want = lt_partition(n)
    names = [f"x{i}" for i in range(1, 4 * n + 1)]
    got = {}
    if rep.output:
        for lab, (i, exps) in _table_by_name(rep).items():
            got[lab] = (i, tuple(exps.get(k, 0) for k in names))
    res.check("rewritten potential matches the closed form", got == want, str(got))
    res.check("verdict", rep.verdict is Verdict.CREPANT, rep.verdict.value)
    res.check("identity exoflop", identity_matches(m, identity_exoflop(m)))
    _soundness(res, rep)
    if n == 2:
        ref = example62()
        a, b = rep, ref.run("rho11,rho12")
        same = (a.model.bundle.rays == b.model.bundle.rays and a.sigma_w.points == b.sigma_w.points
                and a.sigma_prime.rays == b.sigma_prime.rays
                and a.assumption.splitting == b.assumption.splitting
                and a.assumption.partition.dual_splitting == b.assumption.partition.dual_splitting
                and a.output.variables == b.output.variables
                and [p.exponents for p in a.rewritten] == [p.exponents for p in b.rewritten])
        res.check("n = 2 agrees with the rank-two example", same)
    return res


def _soundness(res: FixtureResult, rep: ExoflopReport) -> None:
    part = rep.assumption.partition if rep.assumption else None
    ok = part is not None and all(
        sorted(dot_row(mm, v) for mm in part.dual_splitting) == [0] * (part.r - 1) + [1]
        for v in part.cone.rays)
    res.check("nef partition soundness", ok)


def dot_row(m, v) -> int:
    return sum(a * b for a, b in zip(m, v))


REGISTRY: dict[str, Callable[[], FixtureResult]] = {
    "aspinwall": lambda: check_aspinwall(aspinwall()),
    "example62": lambda: check_example62(example62()),
}


def build(name: str) -> Fixture:
    if name == "aspinwall":
        return aspinwall()
    if name == "example62":
        return example62()
    if name.startswith("lt:"):
        return lt(int(name[3:]))
    raise KeyError(f"unknown fixture {name!r}")


def run_fixture(name: str) -> FixtureResult:
    if name in REGISTRY:
        return REGISTRY[name]()
    if name.startswith("lt:"):
        n = int(name[3:])
        return check_lt(lt(n), n)
    raise KeyError(f"unknown fixture {name!r}")


def run_fixtures(names: list[str], threads: Optional[int] = None) -> list[FixtureResult]:
    """One fixture per worker; results come back in input order."""
    if threads is None:
        threads = int(os.environ.get("EXOFLOP_THREADS", "0") or 0) or min(4, len(names)) or 1
    if threads <= 1 or len(names) <= 1:
        return [run_fixture(n) for n in names]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_fixture, names))
