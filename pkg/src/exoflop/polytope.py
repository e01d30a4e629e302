"""Rational polytopes, lattice points, Cayley polytopes and closure checks."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .arith import IntVector, RatVector, dot, is_integral, rank, to_int_vector, vsub
from .cone import M_SIDE, Cone, double_description


class UnboundedPolytopeError(ValueError):
    pass


class Polytope:
    """Bounded rational polyhedron.

    Inequalities are pairs ``(normal, offset)`` meaning
    ``<normal, x> >= -offset``; equations are pairs meaning equality.
    Whichever representation was not supplied is computed by homogenizing and
    running the cone conversion.
    """

    def __init__(self, ambient_rank: int, inequalities=None, equations=(), vertices=None):
        self.ambient_rank = ambient_rank
        self._ineqs = None if inequalities is None else tuple(
            (tuple(a), b) for a, b in inequalities)
        self._eqs = tuple((tuple(a), b) for a, b in equations)
        self._vertices = None if vertices is None else tuple(
            tuple(Fraction(x) for x in v) for v in vertices)
        if self._ineqs is None and self._vertices is None:
            raise ValueError("need an H- or V-representation")
        if self._vertices is None:
            self._vertices = self._vertices_from_h()
        elif self._ineqs is None:
            self._ineqs, self._eqs = self._h_from_vertices()

    @classmethod
    def from_vertices(cls, points: Iterable[Sequence], ambient_rank: Optional[int] = None) -> "Polytope":
        pts = [tuple(p) for p in points]
        if ambient_rank is None:
            if not pts:
                raise ValueError("ambient rank required for the empty polytope")
            ambient_rank = len(pts[0])
        if not pts:
            return cls(ambient_rank, inequalities=[], equations=[], vertices=[])
        return cls(ambient_rank, vertices=pts)

    @classmethod
    def from_inequalities(cls, inequalities, ambient_rank: int, equations=()) -> "Polytope":
        return cls(ambient_rank, inequalities=inequalities, equations=equations)

    def _homogenized_rows(self):
        rows = [tuple(a) + (b,) for a, b in self._ineqs]
        for a, b in self._eqs:
            rows.append(tuple(a) + (b,))
            rows.append(tuple(-x for x in a) + (-b,))
        rows.append((0,) * self.ambient_rank + (1,))
        return rows

    def _vertices_from_h(self):
        lin, rays = double_description(self._homogenized_rows(), self.ambient_rank + 1)
        if lin or any(r[-1] == 0 for r in rays):
            raise UnboundedPolytopeError("polytope is unbounded")
        return tuple(sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in rays))

    def _h_from_vertices(self):
        if not self._vertices:
            return (), ()
        gens = []
        for v in self._vertices:
            den = math.lcm(*(x.denominator for x in v)) if v else 1
            gens.append(tuple(int(x * den) for x in v) + (den,))
        C = Cone(gens, self.ambient_rank + 1, M_SIDE)
        ineqs = tuple((f[:-1], f[-1]) for f in C.facets)
        eqs = tuple((e[:-1], e[-1]) for e in C.equations)
        # vertices are the rays of the homogenized cone
        self._vertices = tuple(sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in C.rays))
        return ineqs, eqs

    @property
    def inequalities(self):
        return self._ineqs

    @property
    def equations(self):
        return self._eqs

    @property
    def vertices(self) -> tuple[RatVector, ...]:
        return self._vertices

    @property
    def is_empty(self) -> bool:
        return not self._vertices

    @property
    def dim(self) -> int:
        if not self._vertices:
            return -1
        v0 = self._vertices[0]
        return rank([vsub(v, v0) for v in self._vertices[1:]]) if len(self._vertices) > 1 else 0

    def is_lattice_polytope(self) -> bool:
        return all(is_integral(v) for v in self._vertices)

    def contains(self, x: Sequence) -> bool:
        return (all(dot(a, x) + b >= 0 for a, b in self._ineqs)
                and all(dot(a, x) + b == 0 for a, b in self._eqs))

    def scaled(self, k: int) -> "Polytope":
        return Polytope.from_vertices([tuple(k * x for x in v) for v in self._vertices], self.ambient_rank)

    def __repr__(self) -> str:
        return f"Polytope(vertices={[tuple(map(str, v)) for v in self._vertices]})"


def lattice_points(P: Polytope) -> list[IntVector]:
    """All integer points of ``P``, in lexicographic order.

    Depth-first over coordinates inside the vertex bounding box; every
    inequality is used to tighten the range of the next coordinate given the
    ones already fixed and the box for the rest.
    """
    if P.is_empty:
        return []
    d = P.ambient_rank
    lo = [math.ceil(min(v[i] for v in P.vertices)) for i in range(d)]
    hi = [math.floor(max(v[i] for v in P.vertices)) for i in range(d)]
    if any(l > h for l, h in zip(lo, hi)):
        return []
    rows = [(tuple(a), Fraction(b)) for a, b in P.inequalities]
    for a, b in P.equations:
        rows.append((tuple(a), Fraction(b)))
        rows.append((tuple(-x for x in a), -Fraction(b)))
    # suffix maxima of a_j x_j over the box, per row
    suffix = []
    for a, _ in rows:
        s = [0] * (d + 1)
        for j in range(d - 1, -1, -1):
            s[j] = s[j + 1] + max(a[j] * lo[j], a[j] * hi[j])
        suffix.append(s)

    out: list[IntVector] = []
    x = [0] * d

    def rec(k: int, partial: list):
        if k == d:
            out.append(tuple(x))
            return
        lower, upper = lo[k], hi[k]
        for (a, b), s, p in zip(rows, suffix, partial):
            # a_k x_k >= -b - p - max over remaining coordinates
            need = -b - p - s[k + 1]
            c = a[k]
            if c > 0:
                lower = max(lower, math.ceil(need / c))
            elif c < 0:
                upper = min(upper, math.floor(need / c))
            elif need > 0:
                return
            if lower > upper:
                return
        for val in range(lower, upper + 1):
            x[k] = val
            rec(k + 1, [p + a[k] * val for (a, _), p in zip(rows, partial)])
        x[k] = 0

    rec(0, [0] * len(rows))
    return [p for p in out if P.contains(p)]


def cayley_polytope(parts: Sequence[Polytope], r: Optional[int] = None) -> Polytope:
    """``conv(P_1 x e_1, ..., P_r x e_r)`` in rank ``d + r``."""
    if r is None:
        r = len(parts)
    if r != len(parts):
        raise ValueError("r must equal the number of parts")
    if not parts:
        raise ValueError("need at least one part")
    d = parts[0].ambient_rank
    if any(p.ambient_rank != d for p in parts):
        raise ValueError("parts must share the ambient rank")
    verts = []
    for i, P in enumerate(parts):
        e = tuple(1 if j == i else 0 for j in range(r))
        verts.extend(tuple(v) + e for v in P.vertices)
    return Polytope.from_vertices(verts, d + r)


def convex_hull(points: Iterable[Sequence], ambient_rank: Optional[int] = None) -> Polytope:
    return Polytope.from_vertices(points, ambient_rank)


def is_saturated(points: Iterable[Sequence], ambient_rank: Optional[int] = None) -> bool:
    pts = {tuple(int(x) for x in p) for p in points}
    if not pts:
        return True
    P = Polytope.from_vertices(sorted(pts), ambient_rank)
    return set(lattice_points(P)) == pts


def is_integrally_closed(P: Polytope, height_bound: Optional[int] = None) -> tuple[bool, Optional[tuple[IntVector, int]]]:
    """Check that every lattice point of ``h P`` is a sum of ``h`` lattice points of ``P``.

    Heights ``2..height_bound`` are checked; the default bound is the
    dimension of ``P``. Returns ``(ok, witness)`` where the witness is
    ``(point, height)`` for the first failure.
    """
    if not P.is_lattice_polytope():
        raise ValueError("integral closedness is only defined for lattice polytopes")
    if P.is_empty:
        return True, None
    if height_bound is None:
        height_bound = max(P.dim, 1)
    base = lattice_points(P)
    sums = set(base)
    for h in range(2, height_bound + 1):
        sums = {tuple(a + b for a, b in zip(s, t)) for s in sums for t in base}
        for p in lattice_points(P.scaled(h)):
            if p not in sums:
                return False, (p, h)
    return True, None


def support_polytope(C: Cone, m: Sequence) -> Polytope:
    """Convex hull of the primitive generators of ``C``, all at height 1 under ``m``."""
    for v in C.rays:
        if dot(m, v) != 1:
            raise ValueError(f"generator {v} pairs to {dot(m, v)} with {tuple(m)}, not 1")
    if C.lineality:
        raise ValueError("support polytope needs a strictly convex cone")
    return Polytope.from_vertices(C.rays, C.ambient_rank)


def height_slice(C: Cone, m: Sequence, height: int = 1) -> Polytope:
    """``C`` intersected with the affine hyperplane ``<m, x> = height``."""
    ineqs = [(f, 0) for f in C.facets]
    eqs = [(e, 0) for e in C.equations] + [(tuple(m), -height)]
    return Polytope.from_inequalities(ineqs, C.ambient_rank, eqs)


def height_one_points(C: Cone, m: Sequence) -> list[IntVector]:
    return lattice_points(height_slice(C, m, 1))


def as_int_points(points: Iterable[Sequence]) -> list[IntVector]:
    return [to_int_vector(p) for p in points]
