"""Exact convex geometry for polytopes of dimension at most 4.

The hull is an incremental beneath-beyond construction over integer points
(rational input is scaled to a common denominator first).  Boundary pieces
are kept simplicial during insertion and merged into facets by hyperplane at
the end, which keeps the visibility test a plain strict inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, gcd
from operator import mul
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .lattice_core import (
    LatticeError,
    column_hnf,
    common_denominator,
    dot,
    int_rank,
    primitive,
    rank,
    rref,
    solve,
)

MAX_DIM = 4


class PolytopeError(ValueError):
    pass


class DegenerateError(PolytopeError):
    def __init__(self, affine_rank: int, dim: int):
        super().__init__(f"points span an affine space of dimension {affine_rank} < {dim}")
        self.affine_rank = affine_rank
        self.dim = dim


class NotFanoError(PolytopeError):
    pass


def _det(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        a, b, c = m
        return (
            a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
        )
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * _det(minor)
    return total


def _normal_through(points: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Integer normal of the hyperplane through d affinely independent points."""
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    d = len(p0)
    if d == 1:
        return (1,)
    n = []
    for j in range(d):
        minor = [row[:j] + row[j + 1:] for row in diffs]
        n.append((-1) ** j * _det(minor))
    return tuple(n)


@dataclass(frozen=True)
class Facet:
    normal: Tuple[int, ...]  # primitive inner normal
    offset: Fraction  # <normal, x> >= offset on the polytope
    vertices: Tuple[int, ...]  # indices into the vertex list


@dataclass(frozen=True)
class _Hull:
    vertices: Tuple[Tuple[Fraction, ...], ...]
    facets: Tuple[Facet, ...]
    pieces: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]  # simplicial boundary pieces


def _hull_int(pts: List[Tuple[int, ...]], d: int):
    """Beneath-beyond on distinct integer points. Returns (pieces, normals)."""
    base = [0]
    for i in range(1, len(pts)):
        trial = base + [i]
        diffs = [[a - b for a, b in zip(pts[j], pts[base[0]])] for j in trial[1:]]
        if int_rank(diffs) == len(trial) - 1:
            base = trial
            if len(base) == d + 1:
                break
    if len(base) < d + 1:
        raise DegenerateError(len(base) - 1, d)
    centre = [sum(pts[i][k] for i in base) for k in range(d)]  # (d+1) * interior point

    facets: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], int]] = {}

    def add_facet(idx: Tuple[int, ...]):
        n = _normal_through([pts[i] for i in idx])
        off = dot(n, pts[idx[0]])
        if dot(n, centre) < (d + 1) * off:
            n = tuple(-x for x in n)
            off = -off
        facets[tuple(sorted(idx))] = (n, off)

    for skip in range(d + 1):
        add_facet(tuple(b for k, b in enumerate(base) if k != skip))

    in_base = set(base)
    for i, p in enumerate(pts):
        if i in in_base:
            continue
        visible = [key for key, (n, off) in facets.items() if sum(map(mul, n, p)) < off]
        if not visible:
            continue
        count: Dict[Tuple[int, ...], int] = {}
        for key in visible:
            for r in combinations(key, d - 1):
                count[r] = count.get(r, 0) + 1
        for key in visible:
            del facets[key]
        for r, c in count.items():
            if c == 1:
                add_facet(r + (i,))
    return facets


def _affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([[Fraction(a) - Fraction(b) for a, b in zip(p, p0)] for p in points[1:]])


def _hull(points: Iterable[Sequence], dim: Optional[int] = None) -> _Hull:
    raw = [tuple(Fraction(x) for x in p) for p in points]
    if not raw:
        raise PolytopeError("empty point set")
    d = len(raw[0]) if dim is None else dim
    if d < 1 or d > MAX_DIM:
        raise PolytopeError(f"dimension {d} not supported (1..{MAX_DIM})")
    uniq = list(dict.fromkeys(raw))
    den = common_denominator(x for p in uniq for x in p)
    ipts = [tuple(int(x * den) for x in p) for p in uniq]
    if d == 1:
        lo, hi = min(ipts), max(ipts)
        if lo == hi:
            raise DegenerateError(0, 1)
        verts = (tuple(Fraction(x, den) for x in lo), tuple(Fraction(x, den) for x in hi))
        facets = (Facet((1,), Fraction(lo[0], den), (0,)), Facet((-1,), Fraction(-hi[0], den), (1,)))
        return _Hull(verts, facets, ((verts[0],), (verts[1],)))
    raw_facets = _hull_int(ipts, d)

    planes: Dict[Tuple[Tuple[int, ...], int], None] = {}
    pieces = []
    used = set()
    for key, (n, off) in raw_facets.items():
        g = 0
        for x in n:
            g = gcd(g, x)
        planes[(tuple(x // g for x in n), off // g)] = None
        pieces.append(key)
        used.update(key)
    plane_list = sorted(planes)

    vert_idx = []
    for i in sorted(used):
        tight = [n for n, off in plane_list if dot(n, ipts[i]) == off]
        if int_rank(tight) == d:
            vert_idx.append(i)
    vert_idx.sort(key=lambda i: ipts[i])
    position = {i: k for k, i in enumerate(vert_idx)}
    vertices = tuple(tuple(Fraction(x, den) for x in ipts[i]) for i in vert_idx)
    facets = []
    for n, off in plane_list:
        on = tuple(position[i] for i in vert_idx if dot(n, ipts[i]) == off)
        facets.append(Facet(n, Fraction(off, den), on))
    piece_pts = tuple(
        tuple(tuple(Fraction(x, den) for x in ipts[i]) for i in key) for key in sorted(pieces)
    )
    return _Hull(vertices, tuple(facets), piece_pts)


# ----------------------------------------------------------------------------
# polytope types


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalPolytope:
    """Full-dimensional polytope with rational vertices and an exact H-representation."""

    def __init__(self, vertices: Iterable[Sequence], dim: Optional[int] = None, _hull_data: Optional[_Hull] = None):
        hull = _hull_data if _hull_data is not None else _hull(vertices, dim)
        self._h = hull
        self.dim = len(hull.vertices[0])

    @property
    def vertices(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return self._h.vertices

    @property
    def facets(self) -> Tuple[Facet, ...]:
        return self._h.facets

    @property
    def pieces(self):
        return self._h.pieces

    def contains(self, x: Sequence) -> bool:
        return all(dot(f.normal, x) >= f.offset for f in self.facets)

    def interior_contains(self, x: Sequence) -> bool:
        return all(dot(f.normal, x) > f.offset for f in self.facets)

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalPolytope) and self.vertex_set() == other.vertex_set()

    def __hash__(self) -> int:
        return hash(self.vertex_set())

    def __repr__(self) -> str:
        vs = ", ".join("(" + ",".join(_fmt(x) for x in v) + ")" for v in self.vertices)
        return f"{type(self).__name__}([{vs}])"

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [[_fmt(x) for x in v] for v in self.vertices]}


class FanoPolytope(RationalPolytope):
    """Lattice polytope with the origin strictly inside and primitive vertices."""

    def __init__(self, vertices: Iterable[Sequence[int]], _hull_data: Optional[_Hull] = None):
        pts = [tuple(int(x) for x in v) for v in vertices]
        given = set(pts)
        super().__init__(pts, _hull_data=_hull_data)
        verts = {tuple(int(x) for x in v) for v in self._h.vertices}
        if verts != given:
            raise NotFanoError("input contains points that are not vertices of the hull")
        if not all(f.offset < 0 for f in self.facets):
            raise NotFanoError("origin is not strictly interior")
        for v in verts:
            if primitive(v) != v:
                raise NotFanoError(f"vertex {v} is not primitive")

    @property
    def int_vertices(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(int(x) for x in v) for v in self.vertices)

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [list(v) for v in self.int_vertices]}


def is_fano_point_set(vertices: Sequence[Sequence[int]]) -> bool:
    try:
        FanoPolytope(vertices)
    except (PolytopeError, LatticeError):
        return False
    return True


# ----------------------------------------------------------------------------
# operations


def convex_hull(points: Iterable[Sequence], dim: Optional[int] = None) -> RationalPolytope:
    """Irredundant V- and H-representation of the hull of full-dimensional input."""
    return RationalPolytope(list(points), dim)


def hull_vertices_any_dim(points: Sequence[Sequence]) -> Tuple[Tuple[Fraction, ...], ...]:
    """Vertices of the hull of points that may span a lower-dimensional flat."""
    pts = list(dict.fromkeys(tuple(Fraction(x) for x in p) for p in points))
    if len(pts) > 1 and len(pts[0]) <= MAX_DIM:
        try:
            return _hull(pts).vertices
        except DegenerateError:
            pass
    if len(pts) == 1:
        return (pts[0],)
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    _, piv = rref(diffs)
    k = len(piv)
    if k == len(p0):
        return _hull(pts).vertices
    # the coordinate projection onto the pivot columns is injective on the flat
    proj = [tuple(p[c] for c in piv) for p in pts]
    back = dict(zip(proj, pts))
    if k == 1:
        lo, hi = min(proj), max(proj)
        return tuple(sorted((back[lo], back[hi])))
    return tuple(sorted(back[v] for v in _hull(proj).vertices))


def polar(p: RationalPolytope) -> RationalPolytope:
    """{u : <u, v> >= -1 for all v in P}; requires the origin strictly inside P."""
    if not all(f.offset < 0 for f in p.facets):
        raise NotFanoError("origin is not strictly interior; polar is unbounded")
    verts = [tuple(Fraction(x) / -f.offset for x in f.normal) for f in p.facets]
    q = RationalPolytope(verts)
    if all(x.denominator == 1 for v in q.vertices for x in v):
        try:
            return FanoPolytope([tuple(int(x) for x in v) for v in q.vertices], _hull_data=q._h)
        except NotFanoError:
            pass
    return q


def _simplex_volume_and_centroid(apex, face) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    d = len(apex)
    m = [[a - b for a, b in zip(v, apex)] for v in face]
    den = common_denominator(x for row in m for x in row)
    det = _det([[int(x * den) for x in row] for row in m])
    vol = Fraction(abs(det), den ** d * factorial(d))
    pts = [apex] + list(face)
    centroid = tuple(sum(p[k] for p in pts) / (d + 1) for k in range(d))
    return vol, centroid


def _fan_triangulation(q: RationalPolytope):
    apex = min(q.vertices)
    for piece in q.pieces:
        # skip pieces lying in a hyperplane through the apex
        n = None
        for f in q.facets:
            if all(dot(f.normal, x) == f.offset for x in piece):
                n = f
                break
        if dot(n.normal, apex) == n.offset:
            continue
        yield apex, piece


def volume(q: RationalPolytope) -> Fraction:
    """Euclidean volume via a fan triangulation from the lexicographically least vertex."""
    return sum((_simplex_volume_and_centroid(a, s)[0] for a, s in _fan_triangulation(q)), Fraction(0))


def volume_by_facets(q: RationalPolytope) -> Fraction:
    """Independent volume path: sum of pyramids over facets, recursing on dimension."""
    return _pyramid_volume(list(q.vertices), q.dim)


def _pyramid_volume(points, d: int) -> Fraction:
    if d == 1:
        xs = [p[0] for p in points]
        return max(xs) - min(xs)
    h = _hull(points)
    apex = h.vertices[0]
    total = Fraction(0)
    for f in h.facets:
        height = dot(f.normal, apex) - f.offset
        if height == 0:
            continue
        k = next(i for i, c in enumerate(f.normal) if c != 0)
        proj = [tuple(x for i, x in enumerate(h.vertices[j]) if i != k) for j in f.vertices]
        total += height * _pyramid_volume(proj, d - 1) / (d * abs(f.normal[k]))
    return total


def barycentre(q: RationalPolytope) -> Tuple[Fraction, ...]:
    """Exact centroid of the solid polytope."""
    total = Fraction(0)
    acc = [Fraction(0)] * q.dim
    for apex, piece in _fan_triangulation(q):
        vol, c = _simplex_volume_and_centroid(apex, piece)
        total += vol
        acc = [a + vol * x for a, x in zip(acc, c)]
    return tuple(a / total for a in acc)


@dataclass(frozen=True)
class KpsCheck:
    polystable: bool
    barycentre: Tuple[Fraction, ...]


def kps_toric_check(p: FanoPolytope) -> KpsCheck:
    """Barycentre criterion on the polar polytope."""
    b = barycentre(polar(p))
    return KpsCheck(all(x == 0 for x in b), b)


def anticanonical_degree(p: FanoPolytope) -> Fraction:
    return factorial(p.dim) * volume(polar(p))


# ----------------------------------------------------------------------------
# GL(n, Z) normal form


@dataclass(frozen=True)
class NormalFormData:
    rows: Tuple[Tuple[int, ...], ...]  # canonical vertex matrix, canonical row order
    # unimodular matrices W with {v·W : v in P} = normal form (row-vector convention)
    transforms: Tuple[Tuple[Tuple[int, ...], ...], ...]

    @property
    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(sorted(self.rows))

    @property
    def polytope(self) -> "FanoPolytope":
        return FanoPolytope(self.rows)


def _hnf_rows(rows):
    return tuple(tuple(r) for r in column_hnf(rows))


def gl_normal_form_data(p: RationalPolytope) -> NormalFormData:
    """Canonical representative of the GL(n,Z)-orbit of a lattice polytope.

    Minimises, over orderings of the vertices, the column Hermite form of the
    vertex matrix.  Because the first k rows of that form only depend on the
    first k vertices, orderings are grown row by row keeping only the prefixes
    whose newest row is minimal.
    """
    if not _is_fano_like(p):
        raise PolytopeError("normal form requires a lattice polytope with the origin inside")
    verts = [tuple(int(x) for x in v) for v in p.vertices]
    m = len(verts)
    frontier: List[Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...]]] = [((), ())]
    for k in range(m):
        best_row = None
        nxt = []
        for order, _ in frontier:
            rows = [verts[i] for i in order]
            for i in range(m):
                if i in order:
                    continue
                h = _hnf_rows(rows + [verts[i]])
                row = h[-1]
                if best_row is None or row < best_row:
                    best_row = row
                    nxt = [(order + (i,), h)]
                elif row == best_row:
                    nxt.append((order + (i,), h))
        frontier = nxt
    hnf = frontier[0][1]
    transforms = set()
    d = p.dim
    for order, _ in frontier:
        rows = [verts[i] for i in order]
        _, piv = rref([list(r) for r in zip(*rows)])  # indices of independent rows
        sub = [rows[i] for i in piv]
        target = [hnf[i] for i in piv]
        cols = [solve(sub, [t[j] for t in target]) for j in range(d)]
        w = tuple(tuple(int(cols[j][i]) for j in range(d)) for i in range(d))
        transforms.add(w)
    return NormalFormData(hnf, tuple(sorted(transforms)))


def _is_fano_like(p: RationalPolytope) -> bool:
    return all(f.offset < 0 for f in p.facets) and all(x.denominator == 1 for v in p.vertices for x in v)


def gl_normal_form(p: FanoPolytope) -> FanoPolytope:
    return gl_normal_form_data(p).polytope


def normal_form_key(p: FanoPolytope) -> Tuple[Tuple[int, ...], ...]:
    """Sorted vertices of the normal form; equal keys iff GL(n,Z)-equivalent."""
    return gl_normal_form_data(p).key


def apply_linear(p: RationalPolytope, w: Sequence[Sequence[int]]) -> RationalPolytope:
    """Image of P under x -> x·W."""
    imgs = [tuple(sum(v[i] * w[i][j] for i in range(len(v))) for j in range(len(w[0]))) for v in p.vertices]
    if isinstance(p, FanoPolytope):
        return FanoPolytope([tuple(int(x) for x in v) for v in imgs])
    return RationalPolytope(imgs)


# ----------------------------------------------------------------------------
# text format


def parse_polytope_text(text: str, rational: bool = False) -> RationalPolytope:
    """Parse `dim n` followed by one vertex per line; raise PolytopeInputError with a line number."""
    lines = text.splitlines()
    dim = None
    verts = []
    for lineno, line in enumerate(lines, start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if dim is None:
            parts = s.split()
            if len(parts) != 2 or parts[0] != "dim":
                raise PolytopeInputError(lineno, "expected header 'dim n'")
            try:
                dim = int(parts[1])
            except ValueError:
                raise PolytopeInputError(lineno, f"bad dimension {parts[1]!r}") from None
            continue
        parts = s.split()
        if len(parts) != dim:
            raise PolytopeInputError(lineno, f"expected {dim} coordinates, got {len(parts)}")
        try:
            vals = [Fraction(x) for x in parts]
        except (ValueError, ZeroDivisionError):
            raise PolytopeInputError(lineno, f"bad coordinate in {s!r}") from None
        if not rational and any(v.denominator != 1 for v in vals):
            raise PolytopeInputError(lineno, "lattice polytope coordinates must be integers")
        verts.append(tuple(vals))
    if dim is None:
        raise PolytopeInputError(len(lines) or 1, "missing header 'dim n'")
    if not verts:
        raise PolytopeInputError(len(lines) or 1, "no vertices")
    if rational and any(x.denominator != 1 for v in verts for x in v):
        return RationalPolytope(verts)
    return FanoPolytope([tuple(int(x) for x in v) for v in verts])


class PolytopeInputError(PolytopeError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def polytope_from_json(obj: dict) -> RationalPolytope:
    verts = [tuple(Fraction(x) for x in v) for v in obj["vertices"]]
    if any(len(v) != obj["dim"] for v in verts):
        raise PolytopeError("vertex length does not match dim")
    if all(x.denominator == 1 for v in verts for x in v):
        return FanoPolytope([tuple(int(x) for x in v) for v in verts])
    return RationalPolytope(verts)
