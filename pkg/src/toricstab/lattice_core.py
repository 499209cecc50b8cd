"""Exact integer linear algebra on small dense matrices.

Matrices are plain lists of lists of Python ints (or Fractions where noted).
Everything here is value-semantic: inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from operator import mul
from typing import List, Sequence, Tuple

IntMatrix = List[List[int]]
Vector = Tuple[int, ...]


class LatticeError(ValueError):
    """Raised for malformed lattice input (zero vectors, dependent generators)."""


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def transpose(a: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*a)]


def dot(u: Sequence, v: Sequence):
    return sum(map(mul, u, v))


def determinant(a: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def rref(a: Sequence[Sequence]) -> Tuple[list, List[int]]:
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Sequence[Sequence]) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def int_rank(a: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, rows):
            mi = m[i]
            f = mi[c]
            mi[:] = [(p * x - f * y) // prev for x, y in zip(mi, m[r])]
        prev = p
        r += 1
        if r == rows:
            break
    return r


def solve(a: Sequence[Sequence], b: Sequence) -> List[Fraction]:
    """Unique solution of the square system a·x = b over Q."""
    n = len(a)
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)) or (len(piv) > n):
        raise LatticeError("singular system")
    return [m[i][n] for i in range(n)]


def rational_kernel(a: Sequence[Sequence], ncols: int | None = None) -> List[List[Fraction]]:
    """Basis of the rational null space of a (as vectors)."""
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return [[Fraction(int(i == j)) for j in range(cols)] for i in range(cols)]
    m, piv = rref(a)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise LatticeError("primitive() of the zero vector")
    return tuple(int(x) // g for x in v)


def primitive_rational(v: Sequence) -> Vector:
    """Smallest positive integer multiple of a rational vector that is integral."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


# ----------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> List[int]:
        k = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d != 0)

    def cokernel(self) -> Tuple[int, List[int]]:
        """(free rank, torsion factors > 1) of Z^rows / image(A)."""
        rows = len(self.D)
        return rows - self.rank, [d for d in self.invariant_factors if d > 1]


def smith_normal_form(a: Sequence[Sequence[int]]) -> SnfResult:
    """Return U, D, V with U·A·V = D diagonal, d_1 | d_2 | ..., U and V unimodular.

    Pivot is the entry of least nonzero absolute value in the active block,
    ties broken by (row, col), so U and V are reproducible.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [[int(x) for x in row] for row in a]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        m[dst] = [x + k * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):  # col dst += k * col src
        for row in m:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            dirty = False
            p = m[t][t]
            for i in range(t + 1, rows):
                if m[i][t]:
                    add_row(i, t, -(m[i][t] // p))
                    dirty = dirty or m[i][t] != 0
            for j in range(t + 1, cols):
                if m[t][j]:
                    add_col(j, t, -(m[t][j] // p))
                    dirty = dirty or m[t][j] != 0
            if dirty:
                # a smaller remainder exists in row/col t: move it to the pivot
                best = None
                for i in range(t, rows):
                    if m[i][t] and (best is None or abs(m[i][t]) < abs(m[best[0]][best[1]])):
                        best = (i, t)
                for j in range(t, cols):
                    if m[t][j] and (best is None or abs(m[t][j]) < abs(m[best[0]][best[1]])):
                        best = (t, j)
                swap_rows(t, best[0])
                swap_cols(t, best[1])
                continue
            # divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return SnfResult(U=u, D=m, V=v)


# ----------------------------------------------------------------------------
# Hermite normal form


def column_hnf(a: Sequence[Sequence[int]]) -> IntMatrix:
    """Canonical column-style Hermite form of an integer matrix.

    Column operations only, so the result is invariant under A -> A·W for
    unimodular W. Rows are processed top to bottom; each pivot is positive
    and the entries left of it in its row are reduced into [0, pivot).
    The top k rows of the result depend only on the top k rows of A.
    """
    m = [[int(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    c = 0
    pivots = []
    for r in range(rows):
        if c == cols:
            break
        # gcd-combine columns c.. into column c along row r
        while True:
            nz = [j for j in range(c, cols) if m[r][j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(m[r][j]), j))
            if j0 != c:
                for row in m:
                    row[c], row[j0] = row[j0], row[c]
            done = True
            for j in range(c + 1, cols):
                if m[r][j]:
                    q = m[r][j] // m[r][c]
                    for row in m:
                        row[j] -= q * row[c]
                    if m[r][j]:
                        done = False
            if done:
                break
        if m[r][c] == 0:
            continue
        if m[r][c] < 0:
            for row in m:
                row[c] = -row[c]
        p = m[r][c]
        for j in range(c):
            q = m[r][j] // p
            if q:
                for row in m:
                    row[j] -= q * row[c]
        pivots.append((r, c))
        c += 1
    return m


def row_hnf(a: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite form (upper echelon), zero rows dropped."""
    h = transpose(column_hnf(transpose(a))) if a else []
    return [row for row in h if any(row)]


# ----------------------------------------------------------------------------
# lattices


def kernel_lattice(a: Sequence[Sequence[int]], ncols: int | None = None) -> List[Vector]:
    """Z-basis of {x : A x = 0}, in row Hermite form (hence saturated and canonical)."""
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return [tuple(int(i == j) for j in range(cols)) for i in range(cols)]
    snf = smith_normal_form(a)
    r = snf.rank
    basis = [[snf.V[i][j] for i in range(cols)] for j in range(r, cols)]
    if not basis:
        return []
    return [tuple(row) for row in row_hnf(basis)]


@dataclass(frozen=True)
class SublatticeIndex:
    index: int
    # coset representatives sum_i c_i g_i with c_i in [0, 1), as (point, coefficients)
    cosets: List[Tuple[Vector, Tuple[Fraction, ...]]]
    saturation_basis: List[Vector]


def saturation_basis(generators: Sequence[Sequence[int]]) -> List[Vector]:
    """Z-basis of (Q-span of generators) ∩ Z^n."""
    snf = smith_normal_form(generators)
    r = snf.rank
    vinv = _inverse_unimodular(snf.V)
    return [tuple(vinv[i]) for i in range(r)]


def sublattice_index(generators: Sequence[Sequence[int]]) -> SublatticeIndex:
    """Index of the span of independent generators inside its saturation."""
    gens = [list(map(int, g)) for g in generators]
    if not gens:
        return SublatticeIndex(1, [((), ())], [])
    if rank(gens) < len(gens):
        raise LatticeError("generators are linearly dependent")
    n = len(gens[0])
    sat = saturation_basis(gens)
    k = len(gens)
    # coordinates of generators in the saturation basis: gens = C · sat
    coords = _coordinates(gens, sat)
    idx = abs(determinant(coords))
    assert idx.denominator == 1
    index = int(idx)
    # enumerate cosets: lattice points of the half-open parallelepiped
    # {sum c_i g_i : 0 <= c_i < 1}, in saturation coordinates y = c · coords
    cinv = _inverse_fraction(coords)
    reps = []
    snf = smith_normal_form(coords)
    ds = snf.invariant_factors
    vinv = _inverse_unimodular(snf.V)
    # Z^k / rowspace(coords) ≅ ⊕ Z/d_i with generators rows of V^{-1}
    for digits in product(*[range(d) for d in ds]):
        y = [sum(digits[i] * vinv[i][j] for i in range(k)) for j in range(k)]
        c = [sum(Fraction(y[i]) * cinv[i][j] for i in range(k)) for j in range(k)]
        c = [x - (x.numerator // x.denominator) for x in c]
        point = tuple(int(sum(c[i] * gens[i][j] for i in range(k))) for j in range(n))
        reps.append((point, tuple(c)))
    reps.sort(key=lambda pc: (sum(pc[1]) != 0, pc[1]))
    return SublatticeIndex(index, reps, sat)


def _coordinates(vectors, basis) -> List[List[Fraction]]:
    """Coefficients of each vector in the given (independent) basis."""
    bt = transpose(basis)
    out = []
    for v in vectors:
        m, piv = rref([list(row) + [x] for row, x in zip(bt, v)])
        k = len(basis)
        if len(piv) > k:
            raise LatticeError("vector outside span")
        out.append([m[i][k] for i in range(k)])
    return out


def _inverse_fraction(a) -> List[List[Fraction]]:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise LatticeError("singular matrix")
    return [row[n:] for row in m]


def _inverse_unimodular(a) -> IntMatrix:
    inv = _inverse_fraction(a)
    return [[int(x) for x in row] for row in inv]


def inverse_unimodular(a) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    inv = _inverse_fraction(a)
    if any(x.denominator != 1 for row in inv for x in row):
        raise LatticeError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def inverse_rational(a) -> List[List[Fraction]]:
    return _inverse_fraction(a)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else 0


def common_denominator(values) -> int:
    den = 1
    for x in values:
        den = lcm(den, Fraction(x).denominator)
    return den
