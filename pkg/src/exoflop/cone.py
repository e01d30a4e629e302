"""Rational polyhedral cones with exact H/V conversion.

The conversion is a plain double description: the inequality system is
restricted to the row space of its own matrix (so the lineality space splits
off), seeded from a full-rank subsystem and then grown one constraint at a time
with the combinatorial adjacency test.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .arith import (
    IntVector,
    dot,
    integer_kernel,
    inverse,
    is_zero,
    primitive,
    primitive_ray,
    integral_scaling,
    row_space_basis,
    rref,
    transpose,
)

N_SIDE = "N"
M_SIDE = "M"


def other_side(side: str) -> str:
    return M_SIDE if side == N_SIDE else N_SIDE


def double_description(inequalities: Sequence[Sequence], n: int) -> tuple[list[IntVector], list[IntVector]]:
    """Generators of ``{x in Q^n : a . x >= 0 for all rows a}``.

    Returns ``(lineality_basis, rays)``; the cone is ``span(lineality) +
    Cone(rays)``. The rays live in the row space of the inequality matrix and
    are primitive integer vectors.
    """
    A = [tuple(a) for a in inequalities if not is_zero(a)]
    lineality = list(integer_kernel(A, n)) if A else [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    if not A:
        return lineality, []
    B = [integral_scaling(b) for b in row_space_basis(A)]  # k x n; any basis of the row space works
    k = len(B)
    C = [tuple(dot(a, b) for b in B) for a in A]

    # seed with k independent constraints: pivot columns of C transposed
    seed = rref(transpose(C))[1]
    M0 = [C[i] for i in seed]
    Minv = inverse(M0)
    rays: list[tuple[IntVector, frozenset]] = []
    for j in range(k):
        y = primitive_ray([Minv[i][j] for i in range(k)])
        zeros = frozenset(seed[i] for i in range(k) if i != j)
        rays.append((y, zeros))

    for idx, c in enumerate(C):
        if idx in seed:
            continue
        vals = [dot(c, y) for y, _ in rays]
        new = []
        for p in (i for i, v in enumerate(vals) if v > 0):
            for q in (i for i, v in enumerate(vals) if v < 0):
                common = rays[p][1] & rays[q][1]
                if len(common) < k - 2:
                    continue
                if any(common <= z for i, (_, z) in enumerate(rays) if i != p and i != q):
                    continue
                y = primitive_ray([vals[p] * a - vals[q] * b for a, b in zip(rays[q][0], rays[p][0])])
                new.append((y, common | {idx}))
        rays = ([(y, z | {idx}) for (y, z), v in zip(rays, vals) if v == 0]
                + [r for r, v in zip(rays, vals) if v > 0] + new)

    out = []
    seen = set()
    for y, _ in rays:
        x = primitive_ray([sum(yj * b[i] for yj, b in zip(y, B)) for i in range(n)])
        if x not in seen:
            seen.add(x)
            out.append(x)
    return lineality, sorted(out)


class Cone:
    """Cone generated by finitely many integer vectors.

    The H-representation (``facets`` and span ``equations``) and the minimal
    V-representation (``rays`` plus ``lineality``) are computed on first use.
    Facet normals are taken inside the linear span of the cone, which makes
    them canonical for lower-dimensional cones too.
    """

    def __init__(self, generators: Iterable[Sequence], ambient_rank: Optional[int] = None,
                 side: str = N_SIDE):
        gens = []
        seen = set()
        for g in generators:
            if is_zero(g):
                if ambient_rank is None:
                    ambient_rank = len(g)
                continue
            p = primitive_ray(g)
            if p not in seen:
                seen.add(p)
                gens.append(p)
        if ambient_rank is None:
            if not gens:
                raise ValueError("ambient rank required for a cone without generators")
            ambient_rank = len(gens[0])
        if any(len(g) != ambient_rank for g in gens):
            raise ValueError("generator length does not match ambient rank")
        if side not in (N_SIDE, M_SIDE):
            raise ValueError(f"unknown lattice side {side!r}")
        self.ambient_rank = ambient_rank
        self.side = side
        self.generators: tuple[IntVector, ...] = tuple(gens)
        self._lock = threading.Lock()
        self._hrep = None
        self._vrep = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_inequalities(cls, inequalities: Iterable[Sequence], ambient_rank: int,
                          equations: Iterable[Sequence] = (), side: str = N_SIDE) -> "Cone":
        rows = [tuple(a) for a in inequalities]
        for e in equations:
            rows.append(tuple(e))
            rows.append(tuple(-x for x in e))
        lin, rays = double_description(rows, ambient_rank)
        gens = list(rays) + list(lin) + [tuple(-x for x in v) for v in lin]
        return cls(gens, ambient_rank, side)

    @classmethod
    def orthant(cls, n: int, side: str = N_SIDE) -> "Cone":
        return cls([tuple(1 if i == j else 0 for j in range(n)) for i in range(n)], n, side)

    # -- lazy representations ------------------------------------------------

    def _compute(self):
        with self._lock:
            if self._hrep is None:
                eqs, facets = double_description(self.generators, self.ambient_rank)
                self._hrep = (tuple(facets), tuple(eqs))
            if self._vrep is None:
                facets, eqs = self._hrep
                rows = list(facets) + list(eqs) + [tuple(-x for x in e) for e in eqs]
                lin, rays = double_description(rows, self.ambient_rank)
                self._vrep = (tuple(rays), tuple(lin))

    @property
    def facets(self) -> tuple[IntVector, ...]:
        """Primitive inner facet normals (in the dual lattice)."""
        self._compute()
        return self._hrep[0]

    @property
    def equations(self) -> tuple[IntVector, ...]:
        """Lattice basis of the annihilator of the linear span."""
        self._compute()
        return self._hrep[1]

    @property
    def rays(self) -> tuple[IntVector, ...]:
        """Minimal generators of the pointed part."""
        self._compute()
        return self._vrep[0]

    @property
    def lineality(self) -> tuple[IntVector, ...]:
        self._compute()
        return self._vrep[1]

    @property
    def dim(self) -> int:
        return self.ambient_rank - len(self.equations)

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    # -- queries ---------------------------------------------------------------

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_rank:
            raise ValueError(f"rank mismatch: vector of length {len(v)} in rank {self.ambient_rank}")
        return all(dot(f, v) >= 0 for f in self.facets) and all(dot(e, v) == 0 for e in self.equations)

    def interior_contains(self, v: Sequence) -> bool:
        """Membership in the relative interior."""
        return self.contains(v) and all(dot(f, v) > 0 for f in self.facets)

    def is_strictly_convex(self) -> bool:
        return not self.lineality

    def tight_facets(self, v: Sequence) -> tuple[IntVector, ...]:
        return tuple(f for f in self.facets if dot(f, v) == 0)

    def is_face_generated_by(self, subset: Iterable[Sequence]) -> bool:
        """True iff ``subset`` (a set of rays of this cone) is the ray set of a face."""
        sub = {primitive(s) for s in subset}
        if not sub <= set(self.rays):
            return False
        if not sub:
            return not self.lineality
        normals = [f for f in self.facets if all(dot(f, s) == 0 for s in sub)]
        spanned = {r for r in self.rays if all(dot(f, r) == 0 for f in normals)}
        return spanned == sub

    def facet_ray_sets(self) -> list[frozenset]:
        return [frozenset(r for r in self.rays if dot(f, r) == 0) for f in self.facets]

    def intersection(self, other: "Cone") -> "Cone":
        _check_compatible(self, other)
        return Cone.from_inequalities(self.facets + other.facets, self.ambient_rank,
                                      self.equations + other.equations, self.side)

    def __repr__(self) -> str:
        return f"Cone({list(self.generators)}, rank={self.ambient_rank}, side={self.side})"


def _check_compatible(A: Cone, B: Cone) -> None:
    if A.ambient_rank != B.ambient_rank:
        raise ValueError(f"rank mismatch: {A.ambient_rank} vs {B.ambient_rank}")
    if A.side != B.side:
        raise ValueError(f"side mismatch: {A.side} vs {B.side}")


def dual_cone(C: Cone) -> Cone:
    """``{m : <m, v> >= 0 for all v in C}`` in the dual lattice."""
    gens = list(C.facets) + list(C.equations) + [tuple(-x for x in e) for e in C.equations]
    return Cone(gens, C.ambient_rank, other_side(C.side))


def contains(C: Cone, v: Sequence) -> bool:
    return C.contains(v)


def is_strictly_convex(C: Cone) -> bool:
    return C.is_strictly_convex()


def cone_contains_cone(A: Cone, B: Cone) -> bool:
    """Whether ``B`` is a subset of ``A``."""
    _check_compatible(A, B)
    return all(A.contains(g) for g in B.generators)


def cones_equal(A: Cone, B: Cone) -> bool:
    _check_compatible(A, B)
    return cone_contains_cone(A, B) and cone_contains_cone(B, A)


def pairing_matrix(vectors: Sequence[Sequence], functionals: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[dot(f, v) for v in vectors] for f in functionals]
