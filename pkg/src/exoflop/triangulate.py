"""Regular triangulations, their extension to larger point sets, and semiprojective fans.

Point configurations live on an affine hyperplane ``<mbar, x> = 1`` that
misses the origin, so a point is its own homogenization: the cone over the
lifted points ``(p, w(p))`` has the lower hull as its facets with positive
last coordinate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arith import (
    Inequality,
    RatVector,
    dot,
    fm_solve,
    integral_scaling,
    primitive,
    rank,
    solve_rational,
    transpose,
)
from .cone import Cone, cone_contains_cone, cones_equal, dual_cone
from .fan import Fan, is_simplicial, is_subfan, support


class TriangulationError(ValueError):
    pass


class DegenerateConfigurationError(TriangulationError):
    pass


class NotRegularError(TriangulationError):
    pass


def _frac(v) -> RatVector:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class PointConfig:
    points: tuple[RatVector, ...]
    mbar: RatVector

    def __post_init__(self):
        pts = tuple(_frac(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mbar", _frac(self.mbar))
        if len(set(pts)) != len(pts):
            raise TriangulationError("configuration points must be distinct")
        for p in pts:
            if dot(self.mbar, p) != 1:
                raise TriangulationError(f"point {p} is not on the hyperplane <mbar, x> = 1")

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[int]], mbar: Sequence) -> "PointConfig":
        pts = []
        for u in rays:
            h = dot(mbar, u)
            if h <= 0:
                raise TriangulationError(f"ray {tuple(u)} does not pair positively with mbar")
            pts.append(tuple(Fraction(x) / h for x in u))
        return cls(tuple(pts), tuple(mbar))

    @property
    def ambient_rank(self) -> int:
        return len(self.mbar)

    @property
    def affine_dim(self) -> int:
        return rank(self.points) - 1 if self.points else -1

    def is_full_dimensional(self) -> bool:
        return rank(self.points) == self.ambient_rank

    def index(self, p) -> int:
        return self.points.index(_frac(p))


def _barycentric(cfg: PointConfig, cell: Sequence[int], q) -> Optional[RatVector]:
    A = transpose([cfg.points[i] for i in cell], cfg.ambient_rank)
    sol = solve_rational(A, list(q), len(cell))
    return sol.point if sol.status == "unique" else None


def _cell_contains(cfg: PointConfig, cell: Sequence[int], q) -> bool:
    lam = _barycentric(cfg, cell, q)
    return lam is not None and all(x >= 0 for x in lam)


@dataclass(frozen=True)
class Subdivision:
    cells: tuple[tuple[int, ...], ...]
    is_triangulation: bool


def _lifted_cone(cfg: PointConfig, weights: Sequence) -> Cone:
    gens = [integral_scaling(tuple(p) + (Fraction(w),)) for p, w in zip(cfg.points, weights)]
    return Cone(gens, cfg.ambient_rank + 1)


def lower_facets(cfg: PointConfig, weights: Sequence) -> list[tuple[RatVector, Fraction]]:
    """Lower facets of the lift as ``(u, mu)``: ``<u, p> + mu * w >= 0`` with ``mu > 0``."""
    C = _lifted_cone(cfg, weights)
    if C.equations:
        # affine weights: the whole lift is one lower facet
        out = []
        for e in C.equations:
            if e[-1] != 0:
                s = 1 if e[-1] > 0 else -1
                out.append((tuple(Fraction(s * x) for x in e[:-1]), Fraction(s * e[-1])))
        return out[:1]
    return [(f[:-1], Fraction(f[-1])) for f in C.facets if f[-1] > 0]


def lower_hull_subdivision(cfg: PointConfig, weights: Sequence) -> Subdivision:
    if len(weights) != len(cfg.points):
        raise TriangulationError("one weight per point required")
    if any(Fraction(w) < 0 for w in weights):
        raise TriangulationError("weights must be nonnegative")
    if not cfg.is_full_dimensional():
        raise DegenerateConfigurationError("configuration does not span its hyperplane")
    n = cfg.ambient_rank
    C = _lifted_cone(cfg, weights)
    if C.equations:
        cells = [tuple(range(len(cfg.points)))]
    else:
        cells = []
        for f in C.facets:
            if f[-1] <= 0:
                continue
            cell = tuple(i for i, (p, w) in enumerate(zip(cfg.points, weights))
                         if dot(f[:-1], p) + f[-1] * Fraction(w) == 0)
            cells.append(cell)
    cells = tuple(sorted(cells))
    return Subdivision(cells, all(len(c) == n for c in cells))


def _adjacent_pairs(cells: Sequence[Sequence[int]], n: int):
    by_ridge: dict[frozenset, list[int]] = {}
    for k, c in enumerate(cells):
        for ridge in itertools.combinations(sorted(c), n - 1):
            by_ridge.setdefault(frozenset(ridge), []).append(k)
    for ridge, ks in by_ridge.items():
        if len(ks) == 2:
            yield ks[0], ks[1]


def find_regularity_weights(cfg: PointConfig, cells: Sequence[Sequence[int]]) -> Optional[tuple[Fraction, ...]]:
    """Nonnegative weights whose lower hull is exactly ``cells``, or ``None``.

    Constraints are local: across every interior ridge the opposite vertex
    lifts strictly above the neighbouring cell's hyperplane, and every point
    not used as a vertex lifts strictly above the cell containing it. Weights
    on the first cell are fixed to zero (affine functions do not change the
    subdivision), and the strict system is solved by Fourier-Motzkin.
    """
    n = cfg.ambient_rank
    cells = [tuple(sorted(c)) for c in cells]
    if not cells:
        return None
    if any(len(c) != n or rank([cfg.points[i] for i in c]) != n for c in cells):
        raise TriangulationError("cells must be full-dimensional simplices")
    npts = len(cfg.points)
    fixed = set(cells[0])
    free = [i for i in range(npts) if i not in fixed]
    col = {i: k for k, i in enumerate(free)}

    def constraint(q: int, cell: Sequence[int]) -> Inequality:
        lam = _barycentric(cfg, cell, cfg.points[q])
        coeffs = [Fraction(0)] * len(free)
        if q in col:
            coeffs[col[q]] += 1
        for i, l in zip(cell, lam):
            if i in col:
                coeffs[col[i]] -= l
        return Inequality(tuple(coeffs), 0, True)

    system = []
    for a, b in _adjacent_pairs(cells, n):
        (q,) = set(cells[b]) - set(cells[a])
        system.append(constraint(q, cells[a]))
    used = set(itertools.chain.from_iterable(cells))
    for q in range(npts):
        if q in used:
            continue
        home = next((c for c in cells if _cell_contains(cfg, c, cfg.points[q])), None)
        if home is None:
            return None
        system.append(constraint(q, home))
    if free:
        sol = fm_solve(system, len(free))
        if sol is None:
            return None
    else:
        if any(not i.satisfied_trivially for i in system):
            return None
        sol = ()
    w = [Fraction(0)] * npts
    for i, k in col.items():
        w[i] = sol[k]
    low = min(w)
    w = tuple(x - low for x in w)
    if lower_hull_subdivision(cfg, w).cells != tuple(sorted(cells)):
        return None
    return w


@dataclass(frozen=True)
class RegularTriangulation:
    config: PointConfig
    cells: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]
    log: tuple = field(default=())

    def verify(self) -> bool:
        sub = lower_hull_subdivision(self.config, self.weights)
        return sub.is_triangulation and sub.cells == tuple(sorted(self.cells))

    def cell_points(self) -> list[tuple[RatVector, ...]]:
        return [tuple(self.config.points[i] for i in c) for c in self.cells]


def regular_triangulation(cfg: PointConfig, cells: Sequence[Sequence[int]]) -> RegularTriangulation:
    w = find_regularity_weights(cfg, cells)
    if w is None:
        raise NotRegularError("no weights realize this triangulation")
    return RegularTriangulation(cfg, tuple(sorted(tuple(sorted(c)) for c in cells)), w)


def pulling_refinement(vectors: Sequence[Sequence], cell: Sequence[int], order: Sequence[int]) -> list[tuple[int, ...]]:
    """Pulling triangulation of the cone on ``vectors[cell]``, pulling in ``order``.

    The vectors of a cell must lie on a common affine hyperplane missing the
    origin. Pulling with one global order restricts to faces, so refining
    several cells this way keeps them compatible.
    """
    cell = tuple(sorted(set(cell)))
    dim = rank([vectors[i] for i in cell])
    if len(cell) == dim:
        return [cell]
    pos = {i: k for k, i in enumerate(order)}
    v = min(cell, key=lambda i: pos.get(i, len(pos) + i))
    C = Cone([integral_scaling(vectors[i]) for i in cell], len(vectors[cell[0]]))
    out = []
    for f in C.facets:
        if dot(f, vectors[v]) == 0:
            continue
        face = tuple(i for i in cell if dot(f, vectors[i]) == 0)
        for s in pulling_refinement(vectors, face, order):
            out.append(tuple(sorted(s + (v,))))
    return sorted(set(out))


@dataclass(frozen=True)
class InsertionStep:
    point: RatVector
    case: int
    weight: Fraction
    refined: bool = False


def extend_triangulation(T0: RegularTriangulation, new_points: Sequence[Sequence]) -> RegularTriangulation:
    """Grow a regular triangulation to more points, keeping every old cell.

    Points are inserted in lexicographic order. A point inside the current
    hull gets weight ``1 + max w`` and is left unused; a point outside gets
    ``1 + max_F (-<u_F, v>) / mu_F`` over the current lower facets (clamped
    at zero), which puts it strictly above every old lower facet.
    """
    cfg0 = T0.config
    if rank(list(cfg0.points) + [_frac(p) for p in new_points]) != rank(cfg0.points):
        raise DegenerateConfigurationError("new points leave the span of the old configuration")
    if not cfg0.is_full_dimensional():
        raise DegenerateConfigurationError("base configuration does not span its hyperplane")
    pts = list(cfg0.points)
    w = list(T0.weights)
    cells = tuple(sorted(T0.cells))
    log = list(T0.log)
    existing = set(pts)
    for v in sorted({_frac(p) for p in new_points} - existing):
        cfg = PointConfig(tuple(pts), cfg0.mbar)
        if dot(cfg0.mbar, v) != 1:
            raise TriangulationError(f"point {v} is not on the hyperplane")
        if any(_cell_contains(cfg, c, v) for c in cells):
            wv, case = 1 + max(w), 1
        else:
            facets = lower_facets(cfg, w)
            wv = 1 + max(-dot(u, v) / mu for u, mu in facets)
            wv, case = max(wv, Fraction(0)), 2
        pts.append(v)
        w.append(wv)
        cfg = PointConfig(tuple(pts), cfg0.mbar)
        sub = lower_hull_subdivision(cfg, w)
        refined = False
        if not sub.is_triangulation:
            # only reachable through degenerate positions; refine and re-certify
            order = [len(pts) - 1] + list(range(len(pts) - 1))
            new_cells = []
            for c in sub.cells:
                new_cells.extend(pulling_refinement(pts, c, order))
            wr = find_regularity_weights(cfg, new_cells)
            if wr is None:
                raise NotRegularError("pulling refinement could not be certified")
            w, sub, refined = list(wr), lower_hull_subdivision(cfg, wr), True
        if not set(cells) <= set(sub.cells) and case == 2:
            raise TriangulationError("extension lost a cell of the previous triangulation")
        cells = sub.cells
        log.append(InsertionStep(v, case, w[-1], refined))
    out = RegularTriangulation(PointConfig(tuple(pts), cfg0.mbar), cells, tuple(w), tuple(log))
    if not set(T0.cells) <= set(out.cells):
        raise TriangulationError("extension does not contain the original triangulation")
    return out


@dataclass(frozen=True)
class ConicalCertificate:
    """Integral piecewise-linear support data: ``D * w`` is linear on each cone."""

    scale: int
    functionals: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    ray_values: tuple[int, ...]

    def verify(self, rays: Sequence[Sequence[int]]) -> bool:
        return all(dot(f, rays[i]) == self.ray_values[i] for cell, f in self.functionals for i in cell)


def conical_certificate(T: RegularTriangulation, rays: Optional[Sequence[Sequence[int]]] = None) -> ConicalCertificate:
    """Scale the weights so the induced function is integral on every cone.

    The value on ray ``u`` is ``<mbar, u> * w(u / <mbar, u>)``; on each cell
    it extends to a unique linear functional and ``D`` is the lcm of all
    denominators.
    """
    cfg = T.config
    if rays is None:
        rays = [integral_scaling(p) for p in cfg.points]
    vals = [dot(cfg.mbar, u) * w for u, w in zip(rays, T.weights)]
    funcs = []
    for c in T.cells:
        sol = solve_rational([rays[i] for i in c], [vals[i] for i in c], cfg.ambient_rank)
        if sol.status != "unique":
            raise TriangulationError(f"cell {c} is not a full-dimensional simplex")
        funcs.append((c, sol.point))
    den = math.lcm(*(x.denominator for _, f in funcs for x in f), *(v.denominator for v in vals))
    return ConicalCertificate(
        den,
        tuple((c, tuple(int(x * den) for x in f)) for c, f in funcs),
        tuple(int(v * den) for v in vals),
    )


@dataclass(frozen=True)
class SemiprojectiveResult:
    fan: Fan
    mbar: RatVector
    triangulation: RegularTriangulation
    certificate: ConicalCertificate
    insertion_order: tuple[tuple[int, ...], ...]


def default_mbar(sigma: Cone) -> tuple[int, ...]:
    """Sum of the primitive generators of the dual cone; positive on ``sigma`` minus the origin."""
    D = dual_cone(sigma)
    if D.lineality or not sigma.is_full_dimensional:
        raise TriangulationError("cone must be strictly convex and full-dimensional")
    return tuple(sum(c) for c in zip(*D.rays))


def semiprojective_fan(sigma_prime: Cone, subfan: Fan, mbar: Optional[Sequence] = None) -> SemiprojectiveResult:
    """Simplicial fan with support ``sigma_prime`` containing ``subfan``."""
    if not sigma_prime.is_strictly_convex():
        raise TriangulationError("sigma_prime must be strictly convex")
    if not is_simplicial(subfan):
        raise TriangulationError("subfan must be simplicial")
    if not all(sigma_prime.contains(u) for u in subfan.rays):
        raise TriangulationError("subfan is not contained in sigma_prime")
    if mbar is None:
        mbar = default_mbar(sigma_prime)
    mbar = _frac(mbar)
    if any(dot(mbar, u) <= 0 for u in sigma_prime.rays):
        raise TriangulationError("mbar is not positive on sigma_prime")
    cfg0 = PointConfig.from_rays(subfan.rays, mbar)
    w0 = find_regularity_weights(cfg0, subfan.max_cones)
    if w0 is None:
        raise NotRegularError("subfan is not a regular conical triangulation")
    T0 = RegularTriangulation(cfg0, tuple(sorted(subfan.max_cones)), w0)
    extra = [u for u in sigma_prime.rays if primitive(u) not in set(subfan.rays)]
    extra_pts = PointConfig.from_rays(extra, mbar).points if extra else ()
    T = extend_triangulation(T0, extra_pts)
    rays = list(subfan.rays)
    for p in T.config.points[len(rays):]:
        rays.append(primitive(integral_scaling(p)))
    psi = Fan(rays, T.cells, subfan.ambient_rank)
    if not is_simplicial(psi) or not is_subfan(subfan, psi):
        raise TriangulationError("extension failed its fan postconditions")
    if not cones_equal(support(psi), sigma_prime):
        raise TriangulationError("extension does not cover sigma_prime")
    cert = conical_certificate(T, rays)
    order = tuple(tuple(int(x) for x in integral_scaling(s.point)) for s in T.log)
    return SemiprojectiveResult(psi, mbar, T, cert, order)


def boundary_fan(vectors: Sequence[Sequence[int]], order: Optional[Sequence[int]] = None) -> tuple[Fan, tuple[int, ...]]:
    """Complete simplicial fan over the boundary of ``conv(vectors)``.

    The origin must be an interior point. Each facet's points are pulled in
    ``order`` (default: input order). Returns the fan on the used vectors and
    the indices of input vectors that ended up unused.
    """
    vecs = [tuple(int(x) for x in v) for v in vectors]
    d = len(vecs[0])
    if order is None:
        order = list(range(len(vecs)))
    hull = Cone([v + (1,) for v in vecs], d + 1)
    if hull.equations:
        raise TriangulationError("points do not span the space")
    cells = set()
    for f in hull.facets:
        normal, offset = f[:-1], f[-1]
        if offset <= 0:
            raise TriangulationError("origin is not an interior point of the hull")
        face = tuple(i for i, v in enumerate(vecs) if dot(normal, v) + offset == 0)
        for s in pulling_refinement(vecs, face, order):
            cells.add(s)
    used = sorted(set(itertools.chain.from_iterable(cells)))
    pos = {old: new for new, old in enumerate(used)}
    fan = Fan([vecs[i] for i in used], [tuple(pos[i] for i in c) for c in cells], d)
    unused = tuple(i for i in range(len(vecs)) if i not in pos)
    return fan, unused


def covers_cone(T: RegularTriangulation) -> bool:
    """Union of the cells equals the hull of all points (cone-level check)."""
    pts = [integral_scaling(p) for p in T.config.points]
    hull = Cone(pts, T.config.ambient_rank)
    fan = Fan([primitive(p) for p in pts], T.cells, T.config.ambient_rank)
    return cones_equal(support(fan), hull) and cone_contains_cone(hull, support(fan))
