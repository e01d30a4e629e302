"""The exoflop pipeline: model assembly, potential cone, assumption checks, rewriting and verdict."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .arith import IntVector, dot, primitive
from .cone import M_SIDE, Cone, cone_contains_cone, cones_equal, dual_cone
from .fan import (
    CoxData,
    Fan,
    FanError,
    TorusDivisor,
    cox_charge_matrix,
    is_complete,
    is_simplicial,
    is_smooth,
    support,
    vector_bundle_fan,
)
from .gorenstein import (
    GorensteinError,
    HeightCase,
    HeightReport,
    IntegralClosureRoute,
    NefPartition,
    SplittingCertificate,
    integrally_closed_route,
    nef_partition,
    nu_height_case,
    saturated_split_route,
)
from .polytope import is_saturated
from .triangulate import SemiprojectiveResult, boundary_fan, semiprojective_fan

PROVISOS = (
    "generic coefficients assumed; smoothness of the complete intersections is not verified",
    "Fano property of the output toric variety is certified only through completeness and height-one rays",
)


class ModelError(ValueError):
    pass


class AssumptionError(ValueError):
    pass


class Verdict(str, enum.Enum):
    CREPANT = "CrepantCategoricalResolution"
    FORWARD = "FullyFaithfulForward"
    BACKWARD = "FullyFaithfulBackward"
    EQUIVALENCE = "Equivalence"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PotentialEntry:
    point: IntVector
    label: str
    value: Optional[Fraction] = None

    @property
    def is_nonzero(self) -> bool:
        return self.value is None or self.value != 0


@dataclass(frozen=True)
class PotentialSupport:
    entries: tuple[PotentialEntry, ...]

    def __post_init__(self):
        entries = tuple(e if isinstance(e, PotentialEntry) else PotentialEntry(*e) for e in self.entries)
        entries = tuple(PotentialEntry(tuple(int(x) for x in e.point), str(e.label),
                                       None if e.value is None else Fraction(e.value)) for e in entries)
        object.__setattr__(self, "entries", entries)
        if len({e.point for e in entries}) != len(entries):
            raise ModelError("potential points must be distinct")
        if len({e.label for e in entries}) != len(entries):
            raise ModelError("potential labels must be unique")

    @classmethod
    def from_points(cls, points: Sequence[Sequence[int]], prefix: str = "c") -> "PotentialSupport":
        return cls(tuple(PotentialEntry(tuple(p), f"{prefix}{i + 1}") for i, p in enumerate(points)))

    @property
    def points(self) -> tuple[IntVector, ...]:
        return tuple(e.point for e in self.entries)

    def nonzero(self) -> tuple[PotentialEntry, ...]:
        return tuple(e for e in self.entries if e.is_nonzero)


@dataclass(frozen=True)
class LGModel:
    base: Fan
    divisors: tuple[TorusDivisor, ...]
    bundle: Fan
    potential: PotentialSupport
    cox: CoxData
    rcharge: tuple[int, ...]
    m_frak: IntVector
    n_frak: IntVector
    names: tuple[str, ...]
    named_vectors: tuple[tuple[str, IntVector], ...] = ()

    @property
    def r(self) -> int:
        return len(self.divisors)

    @property
    def bundle_support(self) -> Cone:
        return support(self.bundle)

    def name_of(self, v: Sequence[int]) -> Optional[str]:
        v = tuple(v)
        if v in self.bundle.rays:
            return self.names[self.bundle.rays.index(v)]
        for name, w in self.named_vectors:
            if w == v:
                return name
        return None

    def monomial_table(self, rays: Optional[Sequence[Sequence[int]]] = None) -> tuple[tuple[int, ...], ...]:
        """Exponents ``<m, u>`` of every nonzero potential term against ``rays``."""
        rays = self.bundle.rays if rays is None else rays
        return tuple(tuple(int(dot(e.point, u)) for u in rays) for e in self.potential.nonzero())


def build_lg_model(base: Fan, divisors: Sequence[TorusDivisor], potential: PotentialSupport,
                   names: Optional[Sequence[str]] = None,
                   named_vectors: Optional[Mapping[str, Sequence[int]]] = None) -> LGModel:
    if not is_simplicial(base):
        raise ModelError("base fan is not simplicial")
    if not is_complete(base):
        raise ModelError("base fan is not complete")
    divisors = tuple(D if isinstance(D, TorusDivisor) else TorusDivisor(tuple(D)) for D in divisors)
    if not divisors:
        raise ModelError("need at least one divisor")
    for D in divisors:
        if len(D.coeffs) != len(base.rays):
            raise ModelError("divisor length does not match the number of base rays")
        if any(a not in (0, 1) for a in D.coeffs):
            raise ModelError("divisor coefficients must be 0 or 1")
    for j in range(len(base.rays)):
        if sum(D.coeffs[j] for D in divisors) != 1:
            raise ModelError(f"base ray {j} is not in exactly one divisor")
    bundle = vector_bundle_fan(base, [-D for D in divisors])
    d, r = base.ambient_rank, len(divisors)
    n_frak = (0,) * d + (1,) * r
    for k, e in enumerate(potential.entries):
        if len(e.point) != d + r:
            raise ModelError(f"potential point {k} has length {len(e.point)}, expected {d + r}")
        h = dot(e.point, n_frak)
        if h != 1:
            raise ModelError(f"potential point {e.point} has height {h}, expected 1")
        bad = [u for u in bundle.rays if dot(e.point, u) < 0]
        if bad:
            raise ModelError(f"potential point {e.point} pairs negatively with ray {bad[0]}")
    if names is None:
        names = tuple(f"x{i + 1}" for i in range(len(bundle.rays)))
    if len(names) != len(bundle.rays):
        raise ModelError("one name per bundle ray required")
    nv = tuple((k, tuple(int(x) for x in v)) for k, v in (named_vectors or {}).items())
    return LGModel(base, divisors, bundle, potential, cox_charge_matrix(bundle),
                   (0,) * len(base.rays) + (1,) * r, n_frak, n_frak, tuple(names), nv)


@dataclass(frozen=True)
class SigmaW:
    points: tuple[IntVector, ...]
    cone: Cone
    dual: Cone
    saturated: bool
    strict: bool


def sigma_w(model: LGModel) -> SigmaW:
    pts = tuple(e.point for e in model.potential.nonzero())
    if not pts:
        raise ModelError("potential has no nonzero terms")
    C = Cone(pts, model.bundle.ambient_rank, M_SIDE)
    D = dual_cone(C)
    full = dual_cone(model.bundle_support)
    return SigmaW(pts, C, D, is_saturated(pts, C.ambient_rank), not cones_equal(C, full))


@dataclass(frozen=True)
class AssumptionReport:
    clause_i: bool
    clause_ii: bool
    splitting: Optional[tuple[IntVector, ...]]
    partition: Optional[NefPartition]
    messages: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.clause_i and self.clause_ii


def natural_splitting(model: LGModel) -> tuple[IntVector, ...]:
    d = model.base.ambient_rank
    return tuple(tuple(1 if k == d + i else 0 for k in range(d + model.r)) for i in range(model.r))


def check_assumption(model: LGModel, sigma_prime: Cone, splitting: Optional[Sequence[Sequence[int]]] = None,
                     sw: Optional[SigmaW] = None) -> AssumptionReport:
    sw = sw or sigma_w(model)
    if not cone_contains_cone(sigma_prime, model.bundle_support):
        raise AssumptionError("sigma_prime does not contain the support of the bundle fan")
    if not cone_contains_cone(sw.dual, sigma_prime):
        raise AssumptionError("sigma_prime is not contained in the dual of the potential cone")
    msgs = []
    off = [v for v in sigma_prime.rays if dot(model.m_frak, v) != 1]
    clause_i = not off and sigma_prime.is_full_dimensional
    if off:
        msgs.append(f"ray {off[0]} has height {dot(model.m_frak, off[0])}")
    split = tuple(tuple(int(x) for x in p) for p in (splitting or natural_splitting(model)))
    cert = SplittingCertificate(split, model.n_frak, len(set(split)) < len(split))
    part = None
    if len(split) != model.r or not cert.verify(sigma_prime, model.m_frak):
        msgs.append("splitting points are not r height-one points of sigma_prime summing to n")
    else:
        try:
            part = nef_partition(sigma_prime, split, m=model.m_frak, n=model.n_frak)
        except GorensteinError as exc:
            msgs.append(str(exc))
    return AssumptionReport(clause_i, part is not None, split, part, tuple(msgs))


@dataclass(frozen=True)
class RewrittenPart:
    """Terms of ``W`` carried by one splitting variable, as exponent rows against output variables."""

    index: int
    splitting_point: IntVector
    labels: tuple[str, ...]
    points: tuple[IntVector, ...]
    exponents: tuple[tuple[int, ...], ...]


def rewrite_potential(model: LGModel, partition: NefPartition,
                      rays: Optional[Sequence[Sequence[int]]] = None) -> tuple[RewrittenPart, ...]:
    rays = [tuple(u) for u in (partition.cone.rays if rays is None else rays)]
    groups: list[list] = [[] for _ in partition.splitting]
    for e in model.potential.nonzero():
        vals = [dot(e.point, p) for p in partition.splitting]
        if any(v < 0 for v in vals):
            raise AssumptionError(f"potential point {e.point} pairs negatively with a splitting point")
        ones = [i for i, v in enumerate(vals) if v == 1]
        if len(ones) != 1 or sum(vals) != 1:
            raise AssumptionError(f"potential point {e.point} pairs to {vals} with the splitting")
        groups[ones[0]].append(e)
    out = []
    for i, g in enumerate(groups):
        out.append(RewrittenPart(
            i, partition.splitting[i], tuple(e.label for e in g), tuple(e.point for e in g),
            tuple(tuple(int(dot(e.point, u)) for u in rays) for e in g)))
    return tuple(out)


@dataclass(frozen=True)
class OutputSide:
    """The toric vector bundle read off ``sigma_prime`` and its splitting.

    ``variables`` are vectors of the original lattice: lifts of the rays of
    ``base`` followed (in Cox order) by the splitting points. ``base`` lives in
    the quotient lattice, coordinatized by the partition's kernel basis.
    """

    base: Fan
    divisors: tuple[TorusDivisor, ...]
    variables: tuple[IntVector, ...]
    names: tuple[str, ...]
    lifted_bundle: Fan
    cox: CoxData
    support_matches: bool
    complete: bool
    simplicial: bool
    smooth: bool
    unused: tuple[IntVector, ...]


def build_output_side(model: LGModel, partition: NefPartition, candidates: Sequence[Sequence[int]],
                      sigma_prime: Cone) -> OutputSide:
    split = list(partition.splitting)
    cand = [tuple(v) for v in candidates if tuple(v) not in split and dot(model.m_frak, v) == 1]
    proj = [tuple(int(x) for x in partition.project(v)) for v in cand]
    for v, p in zip(cand, proj):
        if primitive(p) != p:
            raise FanError(f"{v} projects to the non-primitive vector {p}")
    if len(set(proj)) != len(proj):
        raise FanError("two output candidates project to the same point")
    fan, unused_idx = boundary_fan(proj)
    used = [cand[proj.index(u)] for u in fan.rays]
    order = [v for v in cand if v in used]
    base = Fan([proj[cand.index(v)] for v in order],
               [tuple(order.index(used[i]) for i in c) for c in fan.max_cones], fan.ambient_rank)
    cand_order = list(candidates)
    variables = [tuple(v) for v in cand_order if tuple(v) in order or tuple(v) in split]
    variables += [p for p in split if p not in variables]
    divisors = tuple(TorusDivisor(tuple(1 if partition.part_of(v) == i else 0 for v in order))
                     for i in range(partition.r))
    vidx = {v: k for k, v in enumerate(variables)}
    sidx = tuple(vidx[p] for p in split)
    cones = [tuple(vidx[order[i]] for i in c) + sidx for c in base.max_cones]
    lifted = Fan(variables, cones, sigma_prime.ambient_rank)
    try:
        ok = cones_equal(support(lifted), sigma_prime)
    except FanError:
        ok = False
    names = []
    for k, v in enumerate(variables):
        names.append(model.name_of(v) or f"y{k + 1}")
    return OutputSide(base, divisors, tuple(variables), tuple(names), lifted, cox_charge_matrix(lifted),
                      ok, is_complete(base), is_simplicial(base), is_smooth(base),
                      tuple(cand[i] for i in unused_idx))


@dataclass(frozen=True)
class CriteriaReport:
    route_a: bool
    route_a_reason: str
    route_b: Optional[IntegralClosureRoute]

    @property
    def certified_by(self) -> Optional[str]:
        if self.route_a:
            return "A"
        if self.route_b is not None and self.route_b.passed:
            return "B"
        return None


def verify_resolution_criteria(points: Sequence[Sequence[int]], r: int, height_bound: Optional[int] = None,
                               *, evaluate_both: bool = True) -> CriteriaReport:
    pts = [tuple(int(x) for x in p) for p in points]
    a, reason = saturated_split_route(pts, r)
    b = None
    if evaluate_both or not a:
        b = integrally_closed_route(Cone(pts, len(pts[0])), height_bound)
    return CriteriaReport(a, reason, b)


@dataclass(frozen=True)
class ExoflopReport:
    model: LGModel
    sigma_w: Optional[SigmaW]
    sigma_prime: Optional[Cone]
    assumption: Optional[AssumptionReport]
    psi: Optional[SemiprojectiveResult]
    height: Optional[HeightReport]
    output: Optional[OutputSide]
    rewritten: tuple[RewrittenPart, ...]
    criteria: Optional[CriteriaReport]
    verdict: Verdict
    reasons: tuple[str, ...]
    smooth_input: bool = False
    smooth_output: bool = False
    provisos: tuple[str, ...] = field(default=PROVISOS)
    failed_stage: Optional[str] = None


def _decide(height: HeightReport, assumption: AssumptionReport, output: Optional[OutputSide],
            smooth_input: bool) -> tuple[Verdict, list[str]]:
    reasons = []
    if height.case is HeightCase.ALL_ABOVE_1:
        return Verdict.BACKWARD, ["every new ray has height above one"]
    if height.case is HeightCase.ALL_BELOW_1:
        return Verdict.FORWARD, ["every new ray has height below one"]
    if height.case is HeightCase.MIXED:
        return Verdict.INCONCLUSIVE, ["new rays on both sides of height one"]
    if not assumption.passed:
        return Verdict.INCONCLUSIVE, ["assumption failed: " + "; ".join(assumption.messages)]
    if output is None or not (output.complete and output.simplicial and output.support_matches):
        return Verdict.INCONCLUSIVE, ["output fan is not a complete simplicial bundle base with support sigma_prime"]
    reasons.append("all rays at height one; both sides split; output base complete simplicial")
    if smooth_input:
        reasons.append("input side declared smooth")
        return Verdict.EQUIVALENCE, reasons
    return Verdict.CREPANT, reasons


def run_exoflop(model: LGModel, sigma_prime: Optional[Cone] = None, *,
                splitting: Optional[Sequence[Sequence[int]]] = None, smooth_input: bool = False,
                smooth_output: bool = False, mbar: Optional[Sequence] = None,
                height_bound: Optional[int] = None, criteria: bool = True) -> ExoflopReport:
    stage = "sigma_w"
    state: dict = {}
    try:
        sw = state["sigma_w"] = sigma_w(model)
        sp = state["sigma_prime"] = sigma_prime if sigma_prime is not None else sw.dual
        stage = "assumption"
        ass = state["assumption"] = check_assumption(model, sp, splitting, sw)
        stage = "semiprojective_fan"
        psi = state["psi"] = semiprojective_fan(sp, model.bundle, mbar)
        stage = "height_case"
        height = state["height"] = nu_height_case(psi.fan.rays, model.m_frak)
        out, parts = None, ()
        if ass.partition is not None:
            stage = "output_side"
            out = state["output"] = build_output_side(model, ass.partition, psi.fan.rays, sp)
            stage = "rewrite_potential"
            parts = state["rewritten"] = rewrite_potential(model, ass.partition, out.variables)
        crit = None
        if criteria:
            stage = "criteria"
            crit = state["criteria"] = verify_resolution_criteria(sw.points, model.r, height_bound,
                                                                  evaluate_both=False)
        verdict, reasons = _decide(height, ass, out, smooth_input)
        if smooth_output:
            reasons.append("output side declared smooth")
        return ExoflopReport(model, sw, sp, ass, psi, height, out, parts, crit, verdict, tuple(reasons),
                             smooth_input, smooth_output)
    except (ValueError, ArithmeticError) as exc:
        return ExoflopReport(model, state.get("sigma_w"), state.get("sigma_prime"), state.get("assumption"),
                             state.get("psi"), state.get("height"), state.get("output"),
                             state.get("rewritten", ()), state.get("criteria"), Verdict.INCONCLUSIVE,
                             (f"{stage}: {exc}",), smooth_input, smooth_output, PROVISOS, stage)


def identity_exoflop(model: LGModel) -> ExoflopReport:
    """Run with ``sigma_prime`` equal to the bundle support and the natural splitting."""
    return run_exoflop(model, model.bundle_support, splitting=natural_splitting(model), criteria=False)


def identity_matches(model: LGModel, report: ExoflopReport) -> bool:
    """Output base, divisors, variables and potential terms agree with the input up to ray order."""
    out = report.output
    if out is None or out.base != model.base:
        return False
    if sorted(out.variables) != sorted(model.bundle.rays):
        return False
    perm = [model.base.rays.index(u) for u in out.base.rays]
    for D, E in zip(model.divisors, out.divisors):
        if tuple(D.coeffs[j] for j in perm) != E.coeffs:
            return False
    expected = dict(zip((e.label for e in model.potential.nonzero()), model.monomial_table(out.variables)))
    got = {}
    for part in report.rewritten:
        got.update(zip(part.labels, part.exponents))
    return got == expected
