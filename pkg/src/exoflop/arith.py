"""Exact integer and rational linear algebra.

Vectors are tuples of ``int`` or :class:`fractions.Fraction`; matrices are
tuples of row tuples. Nothing in here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Optional, Sequence

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]
Matrix = tuple[tuple, ...]


# ---------------------------------------------------------------------------
# vectors


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def unit_vector(n: int, i: int) -> IntVector:
    return tuple(1 if j == i else 0 for j in range(n))


def zero_vector(n: int) -> IntVector:
    return (0,) * n


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def gcd_list(values: Iterable[int]) -> int:
    return reduce(gcd, (abs(int(v)) for v in values), 0)


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else 0


def lcm_list(values: Iterable[int]) -> int:
    return reduce(lcm, values, 1)


def primitive(v: Sequence[int]) -> IntVector:
    """Divide an integer vector by the gcd of its entries.

    Raises:
        ValueError: for the zero vector, which has no primitive generator.
    """
    g = gcd_list(v)
    if g == 0:
        raise ValueError("zero vector has no primitive generator")
    return tuple(int(x) // g for x in v)


def integral_scaling(v: Sequence) -> IntVector:
    """Smallest positive multiple of a rational vector that is integral."""
    den = lcm_list(Fraction(x).denominator for x in v)
    return tuple(int(Fraction(x) * den) for x in v)


def primitive_ray(v: Sequence) -> IntVector:
    """Primitive integer generator of the ray through a rational vector."""
    return primitive(integral_scaling(v))


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def to_int_vector(v: Sequence) -> IntVector:
    if not is_integral(v):
        raise ValueError(f"vector {v} is not integral")
    return tuple(int(x) for x in v)


# ---------------------------------------------------------------------------
# matrices


def transpose(A: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in A)


def identity(n: int) -> Matrix:
    return tuple(unit_vector(n, i) for i in range(n))


def rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals and its pivot columns."""
    M = [[Fraction(x) for x in row] for row in A]
    ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def _int_rank(rows: list[list[int]]) -> int:
    # fraction-free elimination; entries stay integers
    r = 0
    ncols = len(rows[0])
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = [piv[c] * x - f * y for x, y in zip(rows[i], piv)]
                g = gcd_list(rows[i])
                if g > 1:
                    rows[i] = [x // g for x in rows[i]]
        r += 1
        if r == len(rows):
            break
    return r


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    if all(type(x) is int for row in A for x in row):
        return _int_rank([list(row) for row in A])
    return len(rref(A)[1])


def rational_kernel(A: Sequence[Sequence], ncols: int) -> list[RatVector]:
    """Basis of {x : A x = 0} over the rationals."""
    if not A:
        return [tuple(Fraction(x) for x in unit_vector(ncols, i)) for i in range(ncols)]
    M, pivots = rref(A)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(M, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def row_space_basis(A: Sequence[Sequence]) -> list[RatVector]:
    if not A:
        return []
    M, pivots = rref(A)
    return [tuple(M[i]) for i in range(len(pivots))]


def determinant(A: Sequence[Sequence]) -> Fraction:
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(row) + list(unit_vector(n, i)) for i, row in enumerate(A)]
    M, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in M]


# ---------------------------------------------------------------------------
# linear systems


@dataclass(frozen=True)
class Solution:
    """Solution set of ``A x = b``.

    ``status`` is ``"none"``, ``"unique"`` or ``"affine"``; for the latter two
    ``point`` is a particular solution and ``directions`` spans the kernel.
    """

    status: str
    point: Optional[RatVector] = None
    directions: tuple[RatVector, ...] = ()


def solve_rational(A: Sequence[Sequence], b: Sequence, ncols: Optional[int] = None) -> Solution:
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if len(A) != len(b):
        raise ValueError("row count of A must match length of b")
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    if not aug:
        kernel = tuple(rational_kernel([], n))
        return Solution("unique" if n == 0 else "affine", (Fraction(0),) * n, kernel)
    M, pivots = rref(aug)
    if n in pivots:
        return Solution("none")
    x = [Fraction(0)] * n
    for row, p in zip(M, pivots):
        x[p] = row[n]
    kernel = tuple(rational_kernel(A, n))
    return Solution("unique" if not kernel else "affine", tuple(x), kernel)


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


@dataclass(frozen=True)
class SmithDecomposition:
    """``A = U * S * V`` with ``U``, ``V`` unimodular and ``S`` diagonal.

    The inverses are kept because the cokernel of ``A`` is read off through
    ``U_inv``: ``Z^m / im(A) ~ (+) Z/d_i`` via ``x -> U_inv x``.
    """

    U: Matrix
    S: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        k = min(len(self.S), len(self.S[0]) if self.S else 0)
        return tuple(self.S[i][i] for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    L = [list(r) for r in identity(m)]       # D = L A R
    Linv = [list(r) for r in identity(m)]
    R = [list(r) for r in identity(n)]
    Rinv = [list(r) for r in identity(n)]

    def row_add(i, j, k):  # row_i += k row_j
        D[i] = [a + k * b for a, b in zip(D[i], D[j])]
        L[i] = [a + k * b for a, b in zip(L[i], L[j])]
        for row in Linv:  # Linv <- Linv E^{-1}: col_j -= k col_i
            row[j] -= k * row[i]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]
        for row in Linv:
            row[i], row[j] = row[j], row[i]

    def row_neg(i):
        D[i] = [-a for a in D[i]]
        L[i] = [-a for a in L[i]]
        for row in Linv:
            row[i] = -row[i]

    def col_add(i, j, k):  # col_i += k col_j
        for row in D:
            row[i] += k * row[j]
        for row in R:
            row[i] += k * row[j]
        Rinv[j] = [a - k * b for a, b in zip(Rinv[j], Rinv[i])]

    def col_swap(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]
        Rinv[i], Rinv[j] = Rinv[j], Rinv[i]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            if pi != t:
                row_swap(t, pi)
            if pj != t:
                col_swap(t, pj)
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // D[t][t]))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // D[t][t]))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            row_add(t, bad, 1)
        if t < m and t < n and D[t][t] < 0:
            row_neg(t)
        if all(D[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            break

    return SmithDecomposition(
        U=tuple(map(tuple, Linv)),
        S=tuple(map(tuple, D)),
        V=tuple(map(tuple, Rinv)),
        U_inv=tuple(map(tuple, L)),
        V_inv=tuple(map(tuple, R)),
    )


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form with zero rows dropped.

    Two integer matrices have the same row lattice iff their HNFs agree, which
    is how lattice equality is decided throughout the package.
    """
    M = [[int(x) for x in r] for r in rows if any(r)]
    if not M:
        return ()
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        # Euclid on column c among rows r..end
        while True:
            nz = [i for i in range(r, len(M)) if M[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[p] = M[p], M[r]
            if M[r][c] < 0:
                M[r] = [-x for x in M[r]]
            done = True
            for i in range(r + 1, len(M)):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    if M[i][c]:
                        done = False
            if done:
                break
        if r < len(M) and M[r][c] != 0:
            for i in range(r):
                q = M[i][c] // M[r][c]
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
            if r == len(M):
                break
    return tuple(tuple(row) for row in M[:r] if any(row))


def integer_kernel(A: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Lattice basis (in Hermite normal form) of ``{x in Z^n : A x = 0}``."""
    if not A:
        return identity(ncols)
    # x A^T = 0  <=>  rows of U_inv of the SNF of A^T past the rank
    snf = smith_normal_form(transpose(A))
    basis = snf.U_inv[snf.rank:]
    return hermite_normal_form(basis)


def same_row_lattice(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> bool:
    return hermite_normal_form(A) == hermite_normal_form(B)


# ---------------------------------------------------------------------------
# Fourier-Motzkin


@dataclass(frozen=True)
class Inequality:
    """``coeffs . x + const >= 0``, or ``> 0`` when ``strict``."""

    coeffs: tuple[Fraction, ...]
    const: Fraction = Fraction(0)
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "const", Fraction(self.const))

    def value(self, x: Sequence) -> Fraction:
        return dot(self.coeffs, x) + self.const

    def holds(self, x: Sequence) -> bool:
        v = self.value(x)
        return v > 0 if self.strict else v >= 0

    def normalized(self) -> "Inequality":
        vals = list(self.coeffs) + [self.const]
        den = lcm_list(v.denominator for v in vals)
        ints = [int(v * den) for v in vals]
        g = gcd_list(ints) or 1
        ints = [v // g for v in ints]
        return Inequality(tuple(ints[:-1]), ints[-1], self.strict)

    @property
    def trivial(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def satisfied_trivially(self) -> bool:
        return self.trivial and (self.const > 0 or (self.const == 0 and not self.strict))


def _prune(system: Iterable[Inequality]) -> list[Inequality]:
    best: dict[tuple, Inequality] = {}
    contradiction = None
    for ineq in system:
        ineq = ineq.normalized()
        if ineq.trivial:
            if not ineq.satisfied_trivially:
                contradiction = ineq
            continue
        prev = best.get(ineq.coeffs)
        if prev is None or ineq.const < prev.const or (ineq.const == prev.const and ineq.strict):
            best[ineq.coeffs] = ineq
    out = [best[k] for k in sorted(best)]
    if contradiction is not None:
        out.append(contradiction)
    return out


def fourier_motzkin_eliminate(system: Sequence[Inequality], var: int) -> list[Inequality]:
    """Project out variable ``var``; the coefficient slot stays (as zero).

    A pair combination is strict iff either parent is strict.
    """
    pos, neg, rest = [], [], []
    for ineq in system:
        c = ineq.coeffs[var]
        (pos if c > 0 else neg if c < 0 else rest).append(ineq)
    out = list(rest)
    for p in pos:
        for q in neg:
            a, b = p.coeffs[var], -q.coeffs[var]
            coeffs = tuple(x / a + y / b for x, y in zip(p.coeffs, q.coeffs))
            out.append(Inequality(coeffs, p.const / a + q.const / b, p.strict or q.strict))
    return _prune(out)


def _choose(lower, lower_strict, upper, upper_strict):
    if lower is None and upper is None:
        return Fraction(0)
    if upper is None:
        return lower + 1 if lower_strict else lower
    if lower is None:
        return upper - 1 if upper_strict else upper
    if lower == upper:
        return lower
    return (lower + upper) / 2


def fm_solve(system: Sequence[Inequality], nvars: int) -> Optional[RatVector]:
    """Exact feasibility by full elimination; returns a witness or ``None``."""
    stages = [_prune(system)]
    order = []
    remaining = set(range(nvars))
    while remaining:
        cur = stages[-1]
        # eliminate the variable producing the fewest pair combinations
        def cost(v):
            p = sum(1 for i in cur if i.coeffs[v] > 0)
            n = sum(1 for i in cur if i.coeffs[v] < 0)
            return p * n - p - n
        v = min(sorted(remaining), key=cost)
        order.append(v)
        remaining.discard(v)
        stages.append(fourier_motzkin_eliminate(cur, v))
    if any(i.trivial and not i.satisfied_trivially for i in stages[-1]):
        return None
    x = [Fraction(0)] * nvars
    for step in range(len(order) - 1, -1, -1):
        v = order[step]
        lo = hi = None
        lo_s = hi_s = False
        for ineq in stages[step]:
            c = ineq.coeffs[v]
            if c == 0:
                continue
            rest = ineq.value(x) - c * x[v]
            bound = -rest / c
            if c > 0:
                if lo is None or bound > lo or (bound == lo and ineq.strict):
                    lo, lo_s = bound, ineq.strict
            else:
                if hi is None or bound < hi or (bound == hi and ineq.strict):
                    hi, hi_s = bound, ineq.strict
        x[v] = _choose(lo, lo_s, hi, hi_s)
    witness = tuple(x)
    assert all(i.holds(witness) for i in system), "FM back-substitution failed"
    return witness
