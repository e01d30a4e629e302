"""Acceptance criteria, one PASS/FAIL line each.

Every comparison is exact: integers and fractions compared with ``==``, tolerance zero.
Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; a normal run
repeats them in the terminal summary.
"""

import pytest

from exoflop.arith import fm_solve, matmul, primitive, rank, same_row_lattice, smith_normal_form
from exoflop.cone import Cone, cones_equal, dual_cone
from exoflop.fixtures import (
    ASPINWALL_ADDED_CONE,
    M_FRAK_62,
    RHO,
    W_DOUBLE_PRIME,
    W_PRIME,
    XI_62,
    aspinwall,
    example62,
    lt,
    lt_listed,
    lt_partition,
    lt_rays,
    sigma_62,
)
from exoflop.gorenstein import HeightCase, Kind, classify, completely_split
from exoflop.pipeline import (
    ModelError,
    PotentialSupport,
    Verdict,
    build_lg_model,
    identity_exoflop,
    identity_matches,
    rewrite_potential,
)
from exoflop.polytope import Polytope, height_one_points, is_integrally_closed
from exoflop.triangulate import (
    PointConfig,
    RegularTriangulation,
    covers_cone,
    extend_triangulation,
    find_regularity_weights,
    lower_hull_subdivision,
)

from oracles import (
    hull_volume,
    lp_feasible,
    random_extension,
    random_matrix,
    random_strict_cone,
    random_system,
    seeded,
)
from test_triangulate import MOTHER, TWISTED, volume
from test_pipeline import ANTI, P3

TOLERANCE = "exact, zero tolerance"
LINES = []
REEVE = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 2)]


def record(n, title, checks):
    bad = [label for label, ok in checks if not ok]
    status = "FAIL" if bad else "PASS"
    line = f"{status} criterion {n}: {title} [{TOLERANCE}]"
    if bad:
        line += " -- failed: " + "; ".join(bad)
    LINES.append(line)
    print(line)
    return bad


def soundness(partition):
    return all(sorted(sum(a * b for a, b in zip(f, v)) for f in partition.dual_splitting)
               == [0] * (partition.r - 1) + [1] for v in partition.cone.rays)


@pytest.mark.xfail(strict=True, reason="sigma_1 is almost Gorenstein, not reflexive; see the ledger")
def test_criterion_1_rank_two_example_cones():
    checks = []
    for label, idx in (("sigma", range(1, 9)), ("sigma_1", (1, 2, 3, 4, 11, 12)),
                       ("sigma_2", (1, 2, 3, 4, 9, 10))):
        C = sigma_62(*idx)
        cert = classify(C)
        checks.append((f"{label} reflexive of index 2 with m = (0,0,0,1,1) (got {cert.kind.value}, "
                       f"index {cert.index})",
                       cert.kind is Kind.REFLEXIVE_GORENSTEIN and cert.index == 2
                       and cert.m_sigma == M_FRAK_62))
        if cert.kind is Kind.REFLEXIVE_GORENSTEIN:
            checks.append((f"{label} completely split", bool(completely_split(C, cert))))
    slice_ = set(height_one_points(dual_cone(sigma_62(*range(1, 9))), M_FRAK_62))
    checks.append(("height-one slice of the dual is the six listed points", slice_ == set(XI_62)))
    assert not record(1, "example cones are reflexive Gorenstein of index 2 and split", checks)


def test_criterion_2_potential_rewrite():
    fx = example62()
    checks = []
    for key, want, extra in (("rho11,rho12", W_PRIME, (11, 12)), ("rho9,rho10", W_DOUBLE_PRIME, (9, 10))):
        rep = fx.run(key)
        partition = rep.assumption.partition
        order = (1, 2, 3, 4) + extra
        parts = rewrite_potential(fx.model, partition, rays=[RHO[i] for i in order])
        got = {}
        for part in parts:
            own = extra[part.index]
            for lab, row in zip(part.labels, part.exponents):
                coeff = dict(zip(order, row))
                ok = coeff[own] == 1 and all(coeff[o] == 0 for o in extra if o != own)
                got.setdefault(own, {})[lab] = tuple(row[:4]) if ok else None
        checks.append((f"monomial table with {key}", got == want))
        if key == "rho11,rho12":
            labels = [set(p.labels) for p in parts]
            checks.append(("partition {c1,c2,c5} / {c3,c4,c6}", labels == [{"c1", "c2", "c5"}, {"c3", "c4", "c6"}]))
    assert not record(2, "potential rewrite reproduces both displayed tables", checks)


def family_checks(n):
    fx = lt(n)
    R = lt_rays(n)
    rep = fx.run()
    listed = lt_listed(n)
    checks = [
        ("bundle rays match the closed form",
         fx.model.bundle.rays == tuple(R[i] for i in range(1, 2 * n + 1)) + (R["tau1"], R["tau2"])),
        (f"cone over the {4 * n + 2} listed vectors equals the dual cone",
         cones_equal(rep.sigma_w.dual, Cone(listed, 2 * n + 1))),
        ("listed vectors are primitive", all(primitive(v) == tuple(v) for v in listed)),
        ("listed vectors contain every extremal ray", set(rep.sigma_w.dual.rays) <= set(listed)),
        ("route A certifies", rep.criteria is not None and rep.criteria.route_a),
        ("saturated", rep.sigma_w.saturated),
    ]
    cert = classify(rep.sigma_w.dual)
    checks.append(("dual is reflexive of index 2",
                   cert.kind is Kind.REFLEXIVE_GORENSTEIN and cert.index == 2))
    names = [f"x{i}" for i in range(1, 4 * n + 1)]
    got = {}
    if rep.output:
        for part in rep.rewritten:
            for lab, row in zip(part.labels, part.exponents):
                exps = dict(zip(rep.output.names, row))
                got[lab] = (part.index, tuple(exps.get(k, 0) for k in names))
    checks.append(("rewritten potential matches the displayed partition", got == lt_partition(n)))
    if n == 2:
        b = example62().run("rho11,rho12")
        checks.append(("n = 2 is bit-identical to the rank-two example", (
            rep.model.bundle.rays == b.model.bundle.rays and rep.sigma_w.points == b.sigma_w.points
            and rep.sigma_prime.rays == b.sigma_prime.rays
            and rep.assumption.splitting == b.assumption.splitting
            and rep.assumption.partition.dual_splitting == b.assumption.partition.dual_splitting
            and rep.output.variables == b.output.variables
            and [p.exponents for p in rep.rewritten] == [p.exponents for p in b.rewritten])))
    return [(f"n = {n}: {label}", ok) for label, ok in checks]


def test_criterion_3_family():
    checks = family_checks(2) + family_checks(3)
    assert not record(3, "parameterized family at n = 2 and n = 3", checks)


def aspinwall_checks():
    fx = aspinwall()
    m = fx.model
    rep = fx.run()
    added = {frozenset(rep.psi.fan.cone_vectors(c)) for c in rep.psi.fan.max_cones} - \
        {frozenset(m.bundle.cone_vectors(c)) for c in m.bundle.max_cones}
    out = rep.output
    return rep, [
        ("input charge lattice", same_row_lattice(m.cox.charge_matrix, [(1, 1, 1, 1, -4)])),
        ("output charge lattice", out is not None and same_row_lattice(
            out.cox.charge_matrix, [(1, 1, 1, 1, -4, 0), (1, 0, 0, 0, -2, 1)])),
        ("exactly one simplex added", added == {frozenset(ASPINWALL_ADDED_CONE)}),
        ("height case AllHeights1", rep.height.case is HeightCase.ALL_HEIGHTS_1),
    ]


def test_aspinwall_combinatorics():
    # the parts of criterion 4 that hold; the verdict is checked separately below
    _, checks = aspinwall_checks()
    assert all(ok for _, ok in checks), checks


@pytest.mark.xfail(strict=True, reason="input hypersurface is singular, so the verdict is Crepant; see the ledger")
def test_criterion_4_quintic_compactification():
    rep, checks = aspinwall_checks()
    checks.append((f"verdict Equivalence (got {rep.verdict.value})", rep.verdict is Verdict.EQUIVALENCE))
    assert not record(4, "quintic compactification", checks)


def criterion_5a(rng, count=200):
    done = 0
    while done < count:
        C = random_strict_cone(rng)
        if C is None:
            continue
        done += 1
        if not cones_equal(dual_cone(dual_cone(C)), C):
            return done, False
    return done, True


def criterion_5b(rng, count=100):
    done = 0
    while done < count:
        inst = random_extension(rng)
        if inst is None:
            continue
        n, base, new, weights = inst
        cfg = PointConfig(base, (0,) * (n - 1) + (1,))
        sub = lower_hull_subdivision(cfg, weights)
        if not sub.is_triangulation:
            continue
        w0 = find_regularity_weights(cfg, sub.cells)
        T0 = RegularTriangulation(cfg, sub.cells, w0)
        T = extend_triangulation(T0, new)
        done += 1
        ok = (set(T0.cells) <= set(T.cells) and T.verify()
              and sum(volume(T.config, c) for c in T.cells) == hull_volume([p[:-1] for p in T.config.points])
              and covers_cone(T))
        if not ok:
            return done, False
    return done, True


def criterion_5c(rng, count=200):
    for _ in range(count):
        A = random_matrix(rng)
        snf = smith_normal_form(A)
        if [[int(x) for x in r] for r in matmul(matmul(snf.U, snf.S), snf.V)] != A:
            return False
        d = [x for x in snf.diagonal if x]
        if len(d) != rank(A) or any(d[i + 1] % d[i] for i in range(len(d) - 1)):
            return False
        n, system = random_system(rng)
        w = fm_solve(system, n)
        if (w is not None) != lp_feasible(system, n):
            return False
        if w is not None and not all(i.holds(w) for i in system):
            return False
    return True


def fixture_reports():
    ex = example62()
    asp = aspinwall()
    out = [("aspinwall", asp, asp.run())]
    out += [(f"example62 {key}", ex, ex.run(key)) for key in ex.splittings]
    for n in (2, 3):
        f = lt(n)
        out.append((f"lt:{n}", f, f.run()))
    return out


def test_criterion_5_property_suites():
    rng = seeded(20260501)
    n_a, ok_a = criterion_5a(rng)
    n_b, ok_b = criterion_5b(rng)
    checks = [
        (f"dual-dual involution on {n_a} strictly convex cones", ok_a and n_a == 200),
        (f"extension postconditions on {n_b} instances", ok_b and n_b == 100),
        ("SNF reconstruction and FM against the LP oracle on 200 instances", criterion_5c(rng)),
    ]
    runs = fixture_reports()
    for name, fx, rep in runs:
        part = rep.assumption.partition if rep.assumption else None
        checks.append((f"nef partition soundness on {name}", part is not None and soundness(part)))
    for name, fx, _ in runs:
        once = identity_exoflop(fx.model)
        twice = identity_exoflop(fx.model)
        checks.append((f"identity exoflop on {name}", identity_matches(fx.model, once)
                       and [p.exponents for p in once.rewritten] == [p.exponents for p in twice.rewritten]))
    assert not record(5, "property suites", checks)


def test_criterion_6_negative_controls():
    ok, witness = is_integrally_closed(Polytope.from_vertices(REEVE))
    try:
        build_lg_model(P3, ANTI, PotentialSupport.from_points([(0, 0, 0, 1), (1, 1, 1, 2)]))
        rejected = False
    except ModelError:
        rejected = True
    checks = [
        ("Reeve simplex witness (1,1,1) at height 2", not ok and witness == ((1, 1, 1), 2)),
        ("non-regular triangulations have no weights",
         all(find_regularity_weights(MOTHER, cells) is None for cells in TWISTED)),
        ("height-2 potential point rejected", rejected),
    ]
    assert not record(6, "negative controls", checks)
