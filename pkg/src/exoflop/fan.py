"""Fans, Cox charge data, vector-bundle fans, star subdivisions and divisor polytopes."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .arith import (
    IntVector,
    dot,
    integer_kernel,
    primitive,
    rank,
    smith_normal_form,
    transpose,
)
from .cone import N_SIDE, Cone, cones_equal
from .polytope import Polytope


class FanError(ValueError):
    pass


class NonConvexSupportError(FanError):
    pass


class NotSimplicialError(FanError):
    pass


class Fan:
    """Rays plus maximal cones given as ray-index sets.

    Cones that are faces of other listed cones are dropped, so
    ``max_cones`` really are the maximal ones. Use :meth:`validate` for the
    full face-to-face check; it is not run on construction.
    """

    def __init__(self, rays: Iterable[Sequence[int]], max_cones: Iterable[Iterable[int]],
                 ambient_rank: Optional[int] = None):
        self.rays: tuple[IntVector, ...] = tuple(primitive(r) for r in rays)
        if ambient_rank is None:
            if not self.rays:
                raise FanError("ambient rank required for a fan without rays")
            ambient_rank = len(self.rays[0])
        if any(len(r) != ambient_rank for r in self.rays):
            raise FanError("ray length does not match ambient rank")
        if len(set(self.rays)) != len(self.rays):
            raise FanError("duplicate rays")
        self.ambient_rank = ambient_rank
        cones = set()
        for c in max_cones:
            idx = tuple(sorted(set(int(i) for i in c)))
            if any(i < 0 or i >= len(self.rays) for i in idx):
                raise FanError(f"cone {idx} refers to a missing ray")
            cones.add(idx)
        maximal = [c for c in cones if not any(set(c) < set(d) for d in cones)]
        self.max_cones: tuple[tuple[int, ...], ...] = tuple(sorted(maximal))
        self._cones: dict[tuple, Cone] = {}

    def cone(self, idx: Sequence[int]) -> Cone:
        key = tuple(sorted(idx))
        if key not in self._cones:
            self._cones[key] = Cone([self.rays[i] for i in key], self.ambient_rank, N_SIDE)
        return self._cones[key]

    def cones(self) -> list[Cone]:
        return [self.cone(c) for c in self.max_cones]

    def ray_index(self, v: Sequence[int]) -> int:
        return self.rays.index(primitive(v))

    def cone_vectors(self, idx: Sequence[int]) -> frozenset:
        return frozenset(self.rays[i] for i in idx)

    def validate(self) -> None:
        """Raise :class:`FanError` unless this is a genuine fan."""
        used = set(itertools.chain.from_iterable(self.max_cones))
        if used != set(range(len(self.rays))):
            missing = sorted(set(range(len(self.rays))) - used)
            raise FanError(f"rays {missing} lie in no maximal cone")
        for c in self.max_cones:
            C = self.cone(c)
            if not C.is_strictly_convex():
                raise FanError(f"cone {c} is not strictly convex")
            if set(C.rays) != self.cone_vectors(c):
                raise FanError(f"cone {c} lists a generator that is not one of its rays")
        for a, b in itertools.combinations(self.max_cones, 2):
            common = set(a) & set(b)
            A, B = self.cone(a), self.cone(b)
            vecs = [self.rays[i] for i in common]
            if not (A.is_face_generated_by(vecs) and B.is_face_generated_by(vecs)):
                raise FanError(f"cones {a} and {b} share rays that do not form a common face")
            meet = A.intersection(B)
            if not cones_equal(meet, Cone(vecs, self.ambient_rank)):
                raise FanError(f"cones {a} and {b} overlap beyond their common face")

    def canonical(self) -> "Fan":
        order = sorted(range(len(self.rays)), key=lambda i: self.rays[i])
        pos = {old: new for new, old in enumerate(order)}
        return Fan([self.rays[i] for i in order],
                   [tuple(pos[i] for i in c) for c in self.max_cones], self.ambient_rank)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fan):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return (a.ambient_rank == b.ambient_rank and a.rays == b.rays
                and a.max_cones == b.max_cones)

    def __hash__(self) -> int:
        c = self.canonical()
        return hash((c.ambient_rank, c.rays, c.max_cones))

    def __repr__(self) -> str:
        return f"Fan(rays={list(self.rays)}, max_cones={list(self.max_cones)})"


@dataclass(frozen=True)
class TorusDivisor:
    """``sum a_rho D_rho``, one coefficient per ray."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))

    def __neg__(self) -> "TorusDivisor":
        return TorusDivisor(tuple(-a for a in self.coeffs))

    def __add__(self, other: "TorusDivisor") -> "TorusDivisor":
        return TorusDivisor(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    @classmethod
    def indicator(cls, n: int, indices: Iterable[int]) -> "TorusDivisor":
        s = set(indices)
        return cls(tuple(1 if i in s else 0 for i in range(n)))


def anticanonical(F: Fan) -> TorusDivisor:
    return TorusDivisor((1,) * len(F.rays))


@dataclass(frozen=True)
class CoxData:
    """Charge matrix (free part of the class group dual) and torsion characters.

    A torsion entry ``(d, row)`` is the character ``x -> <row, x> mod d``.
    """

    charge_matrix: tuple[IntVector, ...]
    torsion: tuple[tuple[int, IntVector], ...] = field(default=())


def cox_charge_matrix(F: Fan) -> CoxData:
    n = len(F.rays)
    R = [list(r) for r in F.rays]          # f(m) = (<m, u_rho>)_rho, so f = R
    charge = integer_kernel(transpose(R, F.ambient_rank), n) if n else ()
    torsion = []
    if n and F.ambient_rank:
        snf = smith_normal_form(R)
        for i, d in enumerate(snf.diagonal):
            if d > 1:
                torsion.append((d, tuple(int(x) % d for x in snf.U_inv[i])))
    return CoxData(tuple(charge), tuple(torsion))


def vector_bundle_fan(F: Fan, divisors: Sequence[TorusDivisor]) -> Fan:
    """Fan of the total space of ``O(D_1) + ... + O(D_r)``.

    Rays ``u_rho - sum_i a_{i,rho} e_i`` followed by ``e_1..e_r``; each maximal
    cone of ``F`` lifts to one maximal cone containing all the ``e_i``.
    """
    r = len(divisors)
    if r < 1:
        raise FanError("need at least one divisor")
    for D in divisors:
        if len(D.coeffs) != len(F.rays):
            raise FanError(f"divisor has {len(D.coeffs)} coefficients for {len(F.rays)} rays")
    rays = []
    for j, u in enumerate(F.rays):
        rays.append(tuple(u) + tuple(-D.coeffs[j] for D in divisors))
    base = len(rays)
    for i in range(r):
        rays.append(tuple(0 for _ in F.rays[0]) + tuple(1 if k == i else 0 for k in range(r)))
    cones = [tuple(c) + tuple(range(base, base + r)) for c in F.max_cones]
    return Fan(rays, cones, F.ambient_rank + r)


def star_subdivision(F: Fan, ray: Sequence[int]) -> Fan:
    v = primitive(ray)
    if v in F.rays:
        return F
    hits = [c for c in F.max_cones if F.cone(c).contains(v)]
    if not hits:
        raise FanError(f"ray {v} is outside the support")
    rays = list(F.rays) + [v]
    new = len(rays) - 1
    cones = [c for c in F.max_cones if c not in hits]
    for c in hits:
        C = F.cone(c)
        for f in C.facets:
            if dot(f, v) == 0:
                continue
            face = [w for w in C.rays if dot(f, w) == 0]
            cones.append(tuple(F.rays.index(w) for w in face) + (new,))
    return Fan(rays, cones, F.ambient_rank)


def support(F: Fan) -> Cone:
    """The cone ``|F|``; raises :class:`NonConvexSupportError` if the union is not convex.

    Certificate: the fan is pure of full dimension in the span of its rays and
    every facet of a maximal cone either lies in the boundary of the cone on
    all rays or is shared by exactly two maximal cones.
    """
    C = Cone(F.rays, F.ambient_rank)
    if not F.max_cones:
        return C
    if any(F.cone(c).dim != C.dim for c in F.max_cones):
        raise NonConvexSupportError("fan is not pure of the dimension of its ray span")
    for face, count in _facet_counts(F).items():
        vecs = [F.rays[i] for i in face]
        on_boundary = any(all(dot(f, w) == 0 for w in vecs) for f in C.facets)
        if count == 1 and not on_boundary:
            raise NonConvexSupportError(f"facet {sorted(face)} is an interior boundary")
        if count > 2 or (count == 2 and on_boundary):
            raise NonConvexSupportError(f"facet {sorted(face)} is shared {count} times")
    return C


def _facet_counts(F: Fan) -> Counter:
    counts: Counter = Counter()
    for c in F.max_cones:
        C = F.cone(c)
        for face in C.facet_ray_sets():
            counts[frozenset(F.rays.index(w) for w in face)] += 1
    return counts


def is_subfan(A: Fan, B: Fan) -> bool:
    if A.ambient_rank != B.ambient_rank:
        return False
    for a in A.max_cones:
        vecs = A.cone_vectors(a)
        ok = False
        for b in B.max_cones:
            if vecs <= B.cone_vectors(b) and B.cone(b).is_face_generated_by(vecs):
                ok = True
                break
        if not ok:
            return False
    return True


def is_simplicial(F: Fan) -> bool:
    return all(len(c) == rank([F.rays[i] for i in c]) for c in F.max_cones)


def is_smooth(F: Fan) -> bool:
    if not is_simplicial(F):
        return False
    for c in F.max_cones:
        snf = smith_normal_form([list(F.rays[i]) for i in c])
        if any(abs(d) != 1 for d in snf.diagonal):
            return False
    return True


def is_complete(F: Fan) -> bool:
    if not F.max_cones:
        return F.ambient_rank == 0
    if any(F.cone(c).dim != F.ambient_rank for c in F.max_cones):
        return False
    return all(n == 2 for n in _facet_counts(F).values())


def divisor_polytope(F: Fan, D: TorusDivisor) -> Polytope:
    """``{m : <m, u_rho> >= -a_rho}``; unbounded results raise."""
    if len(D.coeffs) != len(F.rays):
        raise FanError("divisor length does not match ray count")
    return Polytope.from_inequalities([(u, a) for u, a in zip(F.rays, D.coeffs)], F.ambient_rank)


def monomial_exponents(F: Fan, m: Sequence[int]) -> tuple[IntVector, bool]:
    """Exponent of ``x_rho`` is ``<m, u_rho>``; the flag says whether all are nonnegative."""
    exps = tuple(int(dot(m, u)) for u in F.rays)
    return exps, all(e >= 0 for e in exps)


def format_monomial(exps: Sequence[int], names: Optional[Sequence[str]] = None) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e == 0:
            continue
        name = names[i] if names else f"x{i + 1}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"
