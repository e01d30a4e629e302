from fractions import Fraction

import pytest

from exoflop.cone import Cone
from exoflop.fan import Fan, TorusDivisor, anticanonical, divisor_polytope
from exoflop.fixtures import RHO, aspinwall, example62, simplex_fan
from exoflop.gorenstein import HeightCase, HeightReport
from exoflop.pipeline import (
    PROVISOS,
    AssumptionError,
    AssumptionReport,
    ModelError,
    PotentialEntry,
    PotentialSupport,
    Verdict,
    _decide,
    build_lg_model,
    check_assumption,
    identity_exoflop,
    identity_matches,
    natural_splitting,
    rewrite_potential,
    run_exoflop,
    sigma_w,
    verify_resolution_criteria,
)
from exoflop.polytope import lattice_points
from exoflop.report import emit, parse, report_to_document, verify_document

P3 = simplex_fan([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)])
ANTI = [TorusDivisor((1, 1, 1, 1))]


def quartics():
    return [tuple(p) + (1,) for p in lattice_points(divisor_polytope(P3, anticanonical(P3)))]


def test_height_two_point_is_rejected():
    pot = PotentialSupport.from_points([(0, 0, 0, 1), (1, 1, 1, 2)])
    with pytest.raises(ModelError, match="height 2"):
        build_lg_model(P3, ANTI, pot)


def test_negative_pairing_is_rejected():
    with pytest.raises(ModelError, match="negatively"):
        build_lg_model(P3, ANTI, PotentialSupport.from_points([(-2, 0, 0, 1)]))


def test_divisors_must_partition_the_rays():
    pot = PotentialSupport.from_points([(0, 0, 0, 1)])
    with pytest.raises(ModelError):
        build_lg_model(P3, [TorusDivisor((2, 0, 0, 0))], pot)
    with pytest.raises(ModelError):
        build_lg_model(P3, [TorusDivisor((1, 1, 0, 0)), TorusDivisor((0, 1, 1, 1))], pot)


def test_base_must_be_complete():
    half = Fan([(1, 0), (0, 1)], [(0, 1)])
    with pytest.raises(ModelError, match="complete"):
        build_lg_model(half, [TorusDivisor((1, 1))], PotentialSupport.from_points([(0, 0, 1)]))


def test_potential_labels_are_unique():
    with pytest.raises(ModelError):
        PotentialSupport((PotentialEntry((0, 0, 0, 1), "a"), PotentialEntry((1, 0, 0, 1), "a")))


def test_zero_coefficients_drop_out():
    pot = PotentialSupport((PotentialEntry((0, 0, 0, 1), "a", Fraction(0)), PotentialEntry((1, 0, 0, 1), "b")))
    m = build_lg_model(P3, ANTI, pot)
    assert [e.label for e in m.potential.nonzero()] == ["b"]


def test_model_data():
    m = aspinwall().model
    assert m.m_frak == (0, 0, 0, 1) and m.n_frak == (0, 0, 0, 1)
    assert m.rcharge == (0, 0, 0, 0, 1)
    assert m.bundle.rays[-1] == (0, 0, 0, 1)
    assert m.name_of((0, 0, 0, 1)) == "u" and m.name_of((-1, 0, 0, 1)) == "y"


def test_full_anticanonical_system_is_not_strict():
    m = build_lg_model(P3, ANTI, PotentialSupport.from_points(quartics()))
    assert len(m.potential.entries) == 35
    assert not sigma_w(m).strict
    special = sigma_w(aspinwall().model)
    assert special.strict and special.saturated


def test_height_two_ray_fails_first_clause():
    m = aspinwall().model
    sp = Cone(list(m.bundle.rays) + [(-1, 1, 0, 2)], 4)
    rep = check_assumption(m, sp)
    assert not rep.clause_i and not rep.passed
    assert "height 2" in rep.messages[0]
    full = run_exoflop(m, sp)
    assert full.height.case is HeightCase.ALL_ABOVE_1
    assert full.verdict is Verdict.BACKWARD


def test_sigma_prime_must_contain_the_bundle():
    m = aspinwall().model
    with pytest.raises(AssumptionError):
        check_assumption(m, Cone([(0, 0, 0, 1)], 4))
    rep = run_exoflop(m, Cone([(0, 0, 0, 1)], 4))
    assert rep.verdict is Verdict.INCONCLUSIVE and rep.failed_stage == "assumption"


def test_verdict_table():
    ok = AssumptionReport(True, True, ((0, 1),), None)

    def h(case):
        return HeightReport(case, (), ())

    assert _decide(h(HeightCase.ALL_BELOW_1), ok, None, False)[0] is Verdict.FORWARD
    assert _decide(h(HeightCase.ALL_ABOVE_1), ok, None, False)[0] is Verdict.BACKWARD
    assert _decide(h(HeightCase.MIXED), ok, None, True)[0] is Verdict.INCONCLUSIVE
    assert _decide(h(HeightCase.ALL_HEIGHTS_1), ok, None, True)[0] is Verdict.INCONCLUSIVE
    bad = AssumptionReport(True, False, None, None, ("no splitting",))
    assert _decide(h(HeightCase.ALL_HEIGHTS_1), bad, None, True)[0] is Verdict.INCONCLUSIVE


def test_aspinwall_verdicts_depend_on_the_smoothness_flag():
    m = aspinwall().model
    plain = run_exoflop(m)
    assert plain.verdict is Verdict.CREPANT
    assert plain.provisos == PROVISOS
    assert run_exoflop(m, smooth_input=True).verdict is Verdict.EQUIVALENCE


def test_rewrite_partitions_the_terms():
    fx = example62()
    rep = check_assumption(fx.model, fx.sigma_prime, (RHO[11], RHO[12]))
    parts = rewrite_potential(fx.model, rep.partition)
    assert [p.labels for p in parts] == [("c1", "c2", "c5"), ("c3", "c4", "c6")]
    rep2 = check_assumption(fx.model, fx.sigma_prime, (RHO[9], RHO[10]))
    parts2 = rewrite_potential(fx.model, rep2.partition)
    assert [p.labels for p in parts2] == [("c1", "c4", "c5"), ("c2", "c3", "c6")]


def test_bad_splitting_is_reported():
    fx = example62()
    rep = check_assumption(fx.model, fx.sigma_prime, (RHO[11], RHO[11]))
    assert not rep.clause_ii and rep.partition is None


def test_identity_exoflop():
    m = aspinwall().model
    rep = identity_exoflop(m)
    assert rep.assumption.splitting == natural_splitting(m)
    assert identity_matches(m, rep)


def test_non_saturated_support_fails_route_a():
    # doubled square without its centre
    pts = [(0, 0, 1), (2, 0, 1), (0, 2, 1), (2, 2, 1), (1, 0, 1), (0, 1, 1), (2, 1, 1), (1, 2, 1)]
    crit = verify_resolution_criteria(pts, 1)
    assert not crit.route_a and "saturated" in crit.route_a_reason
    assert crit.certified_by == "B"


def test_report_round_trip_and_verification():
    rep = run_exoflop(aspinwall().model)
    doc = parse(emit(report_to_document(rep)))
    assert doc["verdict"] == "CrepantCategoricalResolution"
    assert verify_document(doc) == []
    doc["psi"]["weights"] = [0] * len(doc["psi"]["weights"])
    doc["psi"]["certificate"]["ray_values"][0] += 1
    doc["output"]["g"][0]["exponents"][0][0] += 1
    failures = verify_document(doc)
    assert any("weights" in f for f in failures)
    assert any("exponents" in f for f in failures)
    assert any("conical" in f for f in failures)
