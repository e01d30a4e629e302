"""Gorenstein cone taxonomy, Cayley splittings, nef partitions and height cases."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arith import (
    IntVector,
    RatVector,
    dot,
    integer_kernel,
    is_integral,
    smith_normal_form,
    solve_rational,
    to_int_vector,
    transpose,
    vadd,
    vsub,
)
from .cone import Cone, dual_cone
from .polytope import Polytope, height_one_points, is_integrally_closed, is_saturated


class GorensteinError(ValueError):
    pass


class NotReflexiveError(GorensteinError):
    pass


class NotSplitError(GorensteinError):
    pass


class TorsionQuotientError(GorensteinError):
    pass


class Kind(str, enum.Enum):
    NOT_Q_GORENSTEIN = "NotQGorenstein"
    Q_GORENSTEIN = "QGorenstein"
    ALMOST_GORENSTEIN = "AlmostGorenstein"
    REFLEXIVE_GORENSTEIN = "ReflexiveGorenstein"


@dataclass(frozen=True)
class GorensteinCertificate:
    kind: Kind
    m_sigma: Optional[RatVector]
    n_dual: Optional[IntVector] = None
    index: Optional[int] = None

    @property
    def is_reflexive(self) -> bool:
        return self.kind is Kind.REFLEXIVE_GORENSTEIN


def gorenstein_element(C: Cone) -> Optional[RatVector]:
    """Rational ``m`` with ``<m, v> = 1`` on every primitive generator, if one exists."""
    if not C.rays:
        return None
    sol = solve_rational(list(C.rays), [1] * len(C.rays), C.ambient_rank)
    return None if sol.status == "none" else sol.point


def classify(C: Cone) -> GorensteinCertificate:
    if not C.is_strictly_convex():
        raise GorensteinError("classification needs a strictly convex cone")
    if not C.is_full_dimensional:
        raise GorensteinError("classification needs a full-dimensional cone")
    m = gorenstein_element(C)
    if m is None:
        return GorensteinCertificate(Kind.NOT_Q_GORENSTEIN, None)
    if not is_integral(m):
        return GorensteinCertificate(Kind.Q_GORENSTEIN, m)
    m = to_int_vector(m)
    n = gorenstein_element(dual_cone(C))
    if n is None or not is_integral(n):
        return GorensteinCertificate(Kind.ALMOST_GORENSTEIN, m)
    n = to_int_vector(n)
    return GorensteinCertificate(Kind.REFLEXIVE_GORENSTEIN, m, n, int(dot(m, n)))


@dataclass(frozen=True)
class SplittingCertificate:
    """Height-one lattice points of a cone summing to the dual Gorenstein element."""

    points: tuple[IntVector, ...]
    target: IntVector
    has_repeats: bool

    def verify(self, C: Cone, m: Sequence[int]) -> bool:
        total = tuple(sum(c) for c in zip(*self.points)) if self.points else ()
        return (all(C.contains(p) and dot(m, p) == 1 for p in self.points)
                and total == tuple(self.target))


def find_splittings(C: Cone, m: Sequence[int], target: Sequence[int], r: int, *,
                    all_splittings: bool = False, allow_repeats: bool = True) -> list:
    """Multisets of ``r`` points of ``C`` at ``m``-height one summing to ``target``.

    Points come from the sorted height-one slice and are combined as
    non-decreasing index sequences, so each multiset is visited once. Partial
    sums are pruned by requiring the remainder to stay in ``C``. The result is
    in canonical order: splittings using fewer non-generators of ``C`` first,
    then lexicographic.
    """
    target = tuple(int(x) for x in target)
    pts = sorted(height_one_points(C, m))
    found: list[SplittingCertificate] = []

    def rec(start: int, left: int, rest: tuple, chosen: list) -> bool:
        if left == 0:
            if all(x == 0 for x in rest):
                found.append(SplittingCertificate(tuple(chosen), target,
                                                  len(set(chosen)) < len(chosen)))
            return False
        for i in range(start, len(pts)):
            rem = vsub(rest, pts[i])
            if left > 1 and not C.contains(rem):
                continue
            if left == 1 and any(x != 0 for x in rem):
                continue
            chosen.append(pts[i])
            rec(i if allow_repeats else i + 1, left - 1, rem, chosen)
            chosen.pop()
        return False

    rec(0, r, target, [])
    gens = set(C.rays)
    found.sort(key=lambda s: (sum(1 for q in s.points if q not in gens), s.points))
    return found if all_splittings else found[:1]


def completely_split(C: Cone, cert: Optional[GorensteinCertificate] = None, *,
                     all_splittings: bool = False, allow_repeats: bool = True):
    """Splitting of a reflexive Gorenstein cone: ``r`` height-one points summing to ``n_dual``.

    Returns the canonical certificate or ``None``; with ``all_splittings``
    the full list.
    """
    if cert is None:
        cert = classify(C)
    if not cert.is_reflexive:
        raise NotReflexiveError(f"cone is {cert.kind.value}, not reflexive Gorenstein")
    found = find_splittings(C, cert.m_sigma, cert.n_dual, cert.index,
                            all_splittings=all_splittings, allow_repeats=allow_repeats)
    if all_splittings:
        return found
    return found[0] if found else None


@dataclass(frozen=True)
class NefPartition:
    """Nef-partition data read off a cone and its dual, both completely split.

    ``splitting`` are the points ``p_i`` of the cone, ``dual_splitting`` the
    functionals ``m'_i`` with ``<m'_i, p_j> = delta_ij``. Generators are
    grouped into ``parts`` by which ``m'_i`` takes the value 1. The quotient
    lattice by the ``p_i`` is coordinatized by ``kernel_basis``, a lattice
    basis of the common kernel of the ``m'_i``.
    """

    cone: Cone
    certificate: GorensteinCertificate
    splitting: tuple[IntVector, ...]
    dual_splitting: tuple[IntVector, ...]
    parts: tuple[tuple[IntVector, ...], ...]
    kernel_basis: tuple[IntVector, ...]
    smith_diagonal: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.splitting)

    def part_of(self, v: Sequence[int]) -> int:
        vals = [dot(m, v) for m in self.dual_splitting]
        hits = [i for i, x in enumerate(vals) if x == 1]
        if len(hits) != 1 or any(x != 0 for i, x in enumerate(vals) if i != hits[0]):
            raise GorensteinError(f"{tuple(v)} pairs to {vals} with the dual splitting")
        return hits[0]

    def project(self, x: Sequence) -> tuple:
        """Coordinates of the image of ``x`` in the quotient lattice."""
        k = list(x)
        for m, p in zip(self.dual_splitting, self.splitting):
            c = dot(m, x)
            k = [a - c * b for a, b in zip(k, p)]
        sol = solve_rational(transpose(self.kernel_basis, len(x)), k, len(self.kernel_basis))
        if sol.status != "unique":
            raise GorensteinError("projection failed: point not in the kernel lattice")
        return tuple(int(c) if c.denominator == 1 else c for c in sol.point)

    def lift(self, y: Sequence, i: Optional[int] = None) -> tuple:
        """Inverse of ``project`` on part ``i``: kernel point plus ``p_i``."""
        x = tuple(sum(c * b[j] for c, b in zip(y, self.kernel_basis)) for j in range(self.cone.ambient_rank))
        return vadd(x, self.splitting[i]) if i is not None else x

    def projected_generators(self) -> list[tuple[IntVector, int, tuple]]:
        """``(v, part, pi(v))`` for every generator that is not a splitting point."""
        out = []
        sp = set(self.splitting)
        for i, part in enumerate(self.parts):
            for v in part:
                if v not in sp:
                    out.append((v, i, self.project(v)))
        return out


def nef_partition(C: Cone, splitting: Optional[Sequence[Sequence[int]]] = None, *,
                  m: Optional[Sequence[int]] = None, n: Optional[Sequence[int]] = None) -> NefPartition:
    """Cayley data of ``C`` and its dual, assembled into a nef partition.

    Without ``m``/``n`` the cone must be reflexive Gorenstein and its own
    degree elements are used. With them (the pipeline passes the bundle's
    degree elements) only the two Cayley structures are required.
    """
    cert = classify(C)
    if m is None or n is None:
        if not cert.is_reflexive:
            raise NotReflexiveError(f"cone is {cert.kind.value}, not reflexive Gorenstein")
        m, n = cert.m_sigma, cert.n_dual
    m = tuple(int(x) for x in m)
    n = tuple(int(x) for x in n)
    r = int(dot(m, n))
    if splitting is None:
        found = find_splittings(C, m, n, r)
        if not found:
            raise NotSplitError("cone is not completely split")
        p = found[0].points
    else:
        p = tuple(tuple(int(x) for x in q) for q in splitting)
        s = SplittingCertificate(p, n, len(set(p)) < len(p))
        if len(p) != r or not s.verify(C, m):
            raise NotSplitError("supplied splitting is not r height-one points of the cone summing to n")
    D = dual_cone(C)
    candidates = find_splittings(D, n, m, r, all_splittings=True)
    if not candidates:
        raise NotSplitError("dual cone is not completely split")
    dual = None
    for cand in candidates:
        ms = list(cand.points)
        ordered = []
        for pj in p:
            hit = [mm for mm in ms if dot(mm, pj) == 1]
            if not hit:
                break
            ordered.append(hit[0])
            ms.remove(hit[0])
        else:
            if all(dot(ordered[i], p[j]) == (1 if i == j else 0)
                   for i in range(r) for j in range(r)):
                dual = tuple(ordered)
                break
    if dual is None:
        raise NotSplitError("no dual splitting is compatible with the chosen splitting points")
    snf = smith_normal_form([list(x) for x in p])
    if any(d != 1 for d in snf.diagonal):
        raise TorsionQuotientError(f"quotient by the splitting points has torsion {snf.diagonal}")
    parts: list[list[IntVector]] = [[] for _ in p]
    for v in C.rays:
        vals = [dot(mm, v) for mm in dual]
        ones = [i for i, x in enumerate(vals) if x == 1]
        if len(ones) != 1 or any(x != 0 for i, x in enumerate(vals) if i != ones[0]):
            raise GorensteinError(f"generator {v} pairs to {vals} with the dual splitting")
        parts[ones[0]].append(v)
    K = integer_kernel([list(mm) for mm in dual], C.ambient_rank)
    return NefPartition(C, cert, tuple(p), dual, tuple(tuple(sorted(x)) for x in parts),
                        tuple(K), snf.diagonal)


class HeightCase(str, enum.Enum):
    ALL_HEIGHTS_1 = "AllHeights1"
    ALL_ABOVE_1 = "AllAbove1"
    ALL_BELOW_1 = "AllBelow1"
    MIXED = "Mixed"


@dataclass(frozen=True)
class HeightReport:
    case: HeightCase
    at_one: tuple[IntVector, ...]
    off_one: tuple[tuple[IntVector, Fraction], ...]


def nu_height_case(points: Sequence[Sequence[int]], m_sigma: Sequence) -> HeightReport:
    at, off = [], []
    for v in points:
        h = dot(m_sigma, v)
        (at.append(tuple(v)) if h == 1 else off.append((tuple(v), Fraction(h))))
    if not off:
        case = HeightCase.ALL_HEIGHTS_1
    elif all(h > 1 for _, h in off):
        case = HeightCase.ALL_ABOVE_1
    elif all(h < 1 for _, h in off):
        case = HeightCase.ALL_BELOW_1
    else:
        case = HeightCase.MIXED
    return HeightReport(case, tuple(at), tuple(off))


@dataclass(frozen=True)
class IntegralClosureRoute:
    """Outcome of the integrally-closed-polytope criterion."""

    passed: bool
    reason: str
    height_bound: int
    witness: Optional[tuple] = None


def integrally_closed_route(C_w: Cone, height_bound: Optional[int] = None) -> IntegralClosureRoute:
    """Check that the supports of ``C_w`` and its dual are integrally closed Gorenstein polytopes.

    ``C_w`` is the cone over the potential points. The support is tested for
    integral closedness first, then the cone for reflexivity, then the dual
    support.
    """
    m = gorenstein_element(C_w)
    if m is None or not is_integral(m):
        return IntegralClosureRoute(False, "points do not lie on a lattice hyperplane", height_bound or 0)
    ok, res = _closed_support(C_w, to_int_vector(m), height_bound)
    if not ok:
        return res
    try:
        cert = classify(C_w)
    except GorensteinError as exc:
        return IntegralClosureRoute(False, str(exc), res.height_bound)
    if not cert.is_reflexive:
        return IntegralClosureRoute(False, f"cone over the points is {cert.kind.value}", res.height_bound)
    ok, res2 = _closed_support(dual_cone(C_w), cert.n_dual, height_bound, "dual support")
    if not ok:
        return res2
    return IntegralClosureRoute(True, "both supports integrally closed", max(res.height_bound, res2.height_bound))


def _closed_support(cone: Cone, m, height_bound, name="support"):
    P = Polytope.from_vertices(cone.rays, cone.ambient_rank)
    bound = height_bound if height_bound is not None else max(P.dim, 1)
    if any(dot(m, r) != 1 for r in cone.rays):
        return False, IntegralClosureRoute(False, f"{name} generators are not at height one", bound)
    ok, witness = is_integrally_closed(P, bound)
    if not ok:
        return False, IntegralClosureRoute(False, f"{name} is not integrally closed", bound, witness)
    return True, IntegralClosureRoute(True, f"{name} integrally closed", bound)


def saturated_split_route(points: Sequence[Sequence[int]], r: int) -> tuple[bool, str]:
    """Saturation of the points plus a completely split reflexive dual of index ``r``."""
    if not is_saturated(points):
        return False, "points are not saturated"
    C_w = Cone(points, len(points[0]))
    try:
        D = dual_cone(C_w)
        cert = classify(D)
    except GorensteinError as exc:
        return False, str(exc)
    if not cert.is_reflexive:
        return False, f"dual cone is {cert.kind.value}"
    if cert.index != r:
        return False, f"dual cone has index {cert.index}, expected {r}"
    if completely_split(D, cert) is None:
        return False, "dual cone is not completely split"
    return True, "saturated and dual completely split reflexive"
