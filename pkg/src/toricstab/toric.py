"""Invariants of the toric variety defined by the spanning fan of a Fano polytope."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .lattice_core import (
    common_denominator,
    dot,
    kernel_lattice,
    lcm,
    rank,
    smith_normal_form,
    solve,
    sublattice_index,
    saturation_basis,
)
from .polytope import FanoPolytope, PolytopeError, polar


class ToricError(ValueError):
    pass


@dataclass(frozen=True)
class ClassGroupResult:
    free_rank: int
    torsion: Tuple[int, ...]

    @property
    def picard_rank_note(self) -> int:
        # equals the Picard rank when the fan is simplicial
        return self.free_rank

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def _rays(p: FanoPolytope) -> List[Tuple[int, ...]]:
    return list(p.int_vertices)


def class_group(p: FanoPolytope) -> ClassGroupResult:
    """Cokernel of M -> Z^rays, u -> (<u, rho_i>)_i."""
    snf = smith_normal_form(_rays(p))
    free, tors = snf.cokernel()
    return ClassGroupResult(free, tuple(tors))


@dataclass(frozen=True)
class QuotientWeights:
    orders: Tuple[int, ...]
    weights: Tuple[Tuple[int, ...], ...]


def quotient_weights(p: FanoPolytope) -> QuotientWeights:
    """Torsion of Cl for a simplex, as characters of mu_d acting on projective coordinates.

    The torsion factor Z/d contributes the row of U (from U·R·V = D) reduced mod d;
    each weight vector is normalised to start with 0 and to be the least
    representative under unit rescaling.
    """
    rays = _rays(p)
    if len(rays) != p.dim + 1:
        raise ToricError("quotient weights need a simplex")
    snf = smith_normal_form(rays)
    orders = []
    weights = []
    for i, d in enumerate(snf.invariant_factors):
        if d > 1:
            orders.append(d)
            weights.append(_normalise_weights(snf.U[i], d))
    return QuotientWeights(tuple(orders), tuple(weights))


def _normalise_weights(w: Sequence[int], d: int) -> Tuple[int, ...]:
    best = None
    for k in range(1, d):
        if gcd(k, d) != 1:
            continue
        cand = tuple(((x - w[0]) * k) % d for x in w)
        if best is None or cand < best:
            best = cand
    return best if best is not None else tuple(0 for _ in w)


def action_subgroup(orders: Sequence[int], weights: Sequence[Sequence[int]]) -> frozenset:
    """Subgroup of (Q/Z)^n modulo the diagonal generated by the characters w/d.

    Two presentations define the same quotient of projective space iff these agree.
    """
    n = len(weights[0]) if weights else 0
    gens = [tuple(Fraction(x, d) for x in w) for d, w in zip(orders, weights)]

    def norm(v):
        return tuple((x - v[0]) % 1 for x in v)

    group = {norm(tuple(Fraction(0) for _ in range(n)))}
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                s = norm(tuple(a + b for a, b in zip(g, h)))
                if s not in group:
                    group.add(s)
                    nxt.append(s)
        frontier = nxt
    return frozenset(group)


# ----------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class ConeSingularityReport:
    cone: Tuple[int, ...]  # ray indices into the polytope's vertex list
    kind: str  # smooth | A_n | cyclic-quotient | gorenstein-point
    order: int = 1
    weights: Tuple[int, ...] = ()
    gorenstein_index: int = 1
    canonical: bool = True
    witness: Optional[Tuple[int, ...]] = None
    witness_height: Optional[Fraction] = None

    @property
    def label(self) -> str:
        if self.kind == "A_n":
            return f"A{self.order - 1}"
        if self.kind == "cyclic-quotient":
            return f"1/{self.order}{self.weights}"
        if self.kind == "gorenstein-point":
            return f"index {self.gorenstein_index} ({'canonical' if self.canonical else 'non-canonical'})"
        return self.kind

    def to_json(self) -> dict:
        out = {"cone": list(self.cone), "kind": self.kind, "label": self.label}
        if self.kind in ("A_n", "cyclic-quotient"):
            out.update(order=self.order, weights=list(self.weights))
        if len(self.cone) >= 3:
            out.update(gorenstein_index=self.gorenstein_index, canonical=self.canonical)
            if self.witness is not None:
                out["witness"] = list(self.witness)
                out["witness_height"] = _fs(self.witness_height)
        return out


def _fs(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def edges(p: FanoPolytope) -> List[Tuple[int, int]]:
    """Pairs of vertex indices spanning an edge (a 2-cone of the spanning fan)."""
    out = []
    for i, j in combinations(range(len(p.vertices)), 2):
        normals = [f.normal for f in p.facets if i in f.vertices and j in f.vertices]
        if normals and rank(normals) == p.dim - 1:
            out.append((i, j))
    return out


def maximal_cones(p: FanoPolytope) -> List[Tuple[int, ...]]:
    return [f.vertices for f in p.facets]


def analyze_2d_cone(p: FanoPolytope, pair: Tuple[int, int]) -> ConeSingularityReport:
    """Cyclic quotient type 1/m(1,k) of the cone over an edge, in its saturated lattice."""
    i, j = pair
    if tuple(sorted(pair)) not in edges(p):
        raise ToricError(f"rays {pair} do not span a face")
    rays = _rays(p)
    r1, r2 = rays[i], rays[j]
    basis = saturation_basis([r1, r2])
    c1 = _coords(r1, basis)
    c2 = _coords(r2, basis)
    m, k = _two_dim_type(c1, c2)
    if m == 1:
        return ConeSingularityReport((i, j), "smooth")
    if (k + 1) % m == 0:
        return ConeSingularityReport((i, j), "A_n", order=m, weights=(1, m - 1))
    kinv = pow(k, -1, m)
    return ConeSingularityReport((i, j), "cyclic-quotient", order=m, weights=(1, min(k, kinv)))


def _coords(v, basis) -> Tuple[int, ...]:
    n = len(basis)
    # pick n independent coordinates
    cols = list(zip(*basis))
    chosen = []
    for c in range(len(cols)):
        if rank([[cols[x][r] for x in chosen + [c]] for r in range(n)]) == len(chosen) + 1:
            chosen.append(c)
        if len(chosen) == n:
            break
    a = [[basis[r][c] for r in range(n)] for c in chosen]
    sol = solve(a, [v[c] for c in chosen])
    assert all(x.denominator == 1 for x in sol)
    return tuple(int(x) for x in sol)


def _two_dim_type(a: Sequence[int], b: Sequence[int]) -> Tuple[int, int]:
    """Normalise the cone <a, b> in Z^2 to <(0,1), (m,-k)> with 0 <= k < m."""
    m = abs(a[0] * b[1] - a[1] * b[0])
    if m == 1:
        return 1, 0
    # unimodular g with g·a = (0, 1): a primitive, so extend by Bezout
    x, y = a
    # find (p, q) with p*y - q*x = 1... want rows g = [[y, -x], [p, q]] s.t. g a = (0, p x + q y) = (0,1)
    _, p, q = _egcd(x, y)  # p*x + q*y = 1
    g = [[y, -x], [p, q]]
    bb = (g[0][0] * b[0] + g[0][1] * b[1], g[1][0] * b[0] + g[1][1] * b[1])
    if bb[0] < 0:
        bb = (-bb[0], bb[1])  # reflect x -> -x, fixes (0,1)
    mm, t = bb
    k = (-t) % mm
    return mm, k


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _supporting_covector(p: FanoPolytope, cone: Sequence[int]) -> Tuple[Fraction, ...]:
    """The rational u with <u, rho> = 1 on every ray of the cone."""
    for f in p.facets:
        if set(cone) <= set(f.vertices) and len(f.vertices) == len(cone):
            return tuple(Fraction(x) / f.offset for x in f.normal)
    # not a facet: solve on the rays if they are independent
    rays = _rays(p)
    sub = [rays[i] for i in cone]
    if len(sub) != p.dim or rank(sub) != p.dim:
        raise ToricError(f"rays {tuple(cone)} do not span a maximal cone")
    return tuple(solve(sub, [1] * p.dim))


def analyze_3d_cone(p: FanoPolytope, cone: Sequence[int]) -> ConeSingularityReport:
    """Gorenstein index and canonicity of the torus-fixed point of a maximal cone."""
    rays = _rays(p)
    cone = tuple(cone)
    u = _supporting_covector(p, cone)
    index = common_denominator(u)
    gens = [rays[i] for i in cone]
    if len(gens) == p.dim and sublattice_index(gens).index == 1:
        return ConeSingularityReport(cone, "smooth")
    lo = [min(0, *(g[k] for g in gens)) for k in range(p.dim)]
    hi = [max(0, *(g[k] for g in gens)) for k in range(p.dim)]
    witnesses = []
    for x in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        s = dot(u, x)
        if not (0 < s < 1):
            continue
        # x lies in the cone iff x/s lies on the facet, i.e. in P
        y = tuple(Fraction(c) / s for c in x)
        if p.contains(y):
            witnesses.append((s, x))
    witnesses.sort()
    w = witnesses[0] if witnesses else None
    return ConeSingularityReport(
        cone,
        "gorenstein-point",
        order=len(gens),
        gorenstein_index=index,
        canonical=not witnesses,
        witness=w[1] if w else None,
        witness_height=w[0] if w else None,
    )


def non_canonical_points(p: FanoPolytope, cone: Sequence[int]) -> List[Tuple[int, ...]]:
    """All lattice points of the cone strictly between the origin and height 1."""
    rays = _rays(p)
    u = _supporting_covector(p, cone)
    gens = [rays[i] for i in cone]
    lo = [min(0, *(g[k] for g in gens)) for k in range(p.dim)]
    hi = [max(0, *(g[k] for g in gens)) for k in range(p.dim)]
    out = []
    for x in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        s = dot(u, x)
        if 0 < s < 1 and p.contains(tuple(Fraction(c) / s for c in x)):
            out.append(x)
    return out


def cone_coefficients(p: FanoPolytope, cone: Sequence[int], x: Sequence[int]) -> Tuple[Fraction, ...]:
    """Express x in the rays of a simplicial cone."""
    rays = _rays(p)
    gens = [rays[i] for i in cone]
    a = [[g[k] for g in gens] for k in range(p.dim)]
    return tuple(solve(a, list(x)))


# ----------------------------------------------------------------------------
# weighted projective embedding


@dataclass(frozen=True)
class Binomial:
    plus: Tuple[int, ...]
    minus: Tuple[int, ...]
    degree: int

    def to_json(self) -> dict:
        return {"plus": list(self.plus), "minus": list(self.minus), "degree": self.degree}


@dataclass(frozen=True)
class EmbeddingResult:
    generators: Tuple[Tuple[int, ...], ...]
    binomials: Tuple[Binomial, ...] = ()
    complete_intersection_degrees: Tuple[int, ...] = ()
    relations_searched: bool = True

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(g[-1] for g in self.generators)

    def names(self) -> List[str]:
        """x0, x1, ... for degree-1 generators, y0, y1, ... for degree 2, z.. beyond."""
        counters: Dict[int, int] = {}
        out = []
        for d in self.degrees:
            letter = {1: "x", 2: "y"}.get(d, f"w{d}_")
            k = counters.get(d, 0)
            counters[d] = k + 1
            out.append(f"{letter}{k}")
        return out

    def format_binomial(self, b: Binomial) -> str:
        names = self.names()

        def mono(e):
            parts = []
            for n, k in zip(names, e):
                if k == 1:
                    parts.append(n)
                elif k > 1:
                    parts.append(f"{n}^{k}")
            return "*".join(parts) or "1"

        return f"{mono(b.plus)} - {mono(b.minus)}"

    def to_json(self) -> dict:
        return {
            "generators": [list(g) for g in self.generators],
            "degrees": list(self.degrees),
            "names": self.names(),
            "binomials": [dict(b.to_json(), text=self.format_binomial(b)) for b in self.binomials],
            "complete_intersection_degrees": list(self.complete_intersection_degrees),
            "relations_searched": self.relations_searched,
        }


DENOMINATOR_CAP = 3


def _height_bound(dens: Sequence[int], dim: int) -> int:
    """Heights of Hilbert basis elements are below the sum of the d+1 largest ray heights."""
    top = sorted(dens, reverse=True)[: dim + 1]
    return max(sum(top) - 1, max(dens))


def lattice_points_of_dilate(q, k: int) -> List[Tuple[int, ...]]:
    """Lattice points of k·Q for a polytope given by its facets."""
    d = q.dim
    lo = [min(v[i] for v in q.vertices) * k for i in range(d)]
    hi = [max(v[i] for v in q.vertices) * k for i in range(d)]
    rng = [range(_ceil(a), _floor(b) + 1) for a, b in zip(lo, hi)]
    facets = [(f.normal, f.offset * k) for f in q.facets]
    return [x for x in product(*rng) if all(dot(n, x) >= off for n, off in facets)]


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


MAX_RELATION_GENERATORS = 12


def wps_embedding(
    p: FanoPolytope, degree_bound: int = 4, max_generators: int = MAX_RELATION_GENERATORS
) -> EmbeddingResult:
    """Hilbert basis of the cone over P° × {1}, plus binomial relations up to degree_bound.

    Relations are only searched when there are at most max_generators
    generators; the monomial count grows too fast beyond that.
    """
    gens = hilbert_basis(p)
    if len(gens) > max_generators:
        return EmbeddingResult(gens, relations_searched=False)
    return relation_binomials(EmbeddingResult(gens), degree_bound)


def hilbert_basis(p: FanoPolytope) -> Tuple[Tuple[int, ...], ...]:
    q = polar(p)
    dens = [common_denominator(v) for v in q.vertices]
    if max(dens) > DENOMINATOR_CAP:
        raise ToricError(f"polar denominators up to {max(dens)} exceed the cap {DENOMINATOR_CAP}")
    bound = _height_bound(dens, p.dim)
    layers: Dict[int, List[Tuple[int, ...]]] = {}
    members = set()
    for k in range(1, bound + 1):
        layers[k] = [x + (k,) for x in lattice_points_of_dilate(q, k)]
        members.update(layers[k])
    basis: List[Tuple[int, ...]] = []
    for k in range(1, bound + 1):
        for x in layers[k]:
            reducible = False
            for g in basis:
                if g[-1] >= k:
                    continue
                if tuple(a - b for a, b in zip(x, g)) in members:
                    reducible = True
                    break
            if not reducible:
                basis.append(x)
    basis.sort(key=lambda g: (g[-1], g))
    return tuple(basis)


def is_minimal_generating_set(gens: Sequence[Sequence[int]]) -> bool:
    """No generator is a nonnegative integer combination of the others (exhaustive)."""
    for i, g in enumerate(gens):
        others = [h for j, h in enumerate(gens) if j != i and h[-1] <= g[-1]]
        reachable = {tuple(0 for _ in g)}
        frontier = list(reachable)
        while frontier:
            nxt = []
            for r in frontier:
                for h in others:
                    s = tuple(a + b for a, b in zip(r, h))
                    if s[-1] <= g[-1] and s not in reachable:
                        reachable.add(s)
                        nxt.append(s)
            frontier = nxt
        if tuple(g) in reachable:
            return False
    return True


def _monomials(degrees: Sequence[int], bound: int):
    n = len(degrees)

    def rec(i, remaining):
        if i == n:
            yield ()
            return
        for e in range(remaining // degrees[i] + 1):
            for rest in rec(i + 1, remaining - e * degrees[i]):
                yield (e,) + rest

    return [m for m in rec(0, bound) if any(m)]


def relation_binomials(e: EmbeddingResult, degree_bound: int) -> EmbeddingResult:
    """All binomials x^a - x^b (disjoint supports) with equal image, degree <= bound.

    Monomials are grouped by their image in M ⊕ Z, so equal images give the
    lattice relation directly.  The complete-intersection check greedily keeps
    binomials, lowest degree first, whose exponent difference raises the rank
    of the relation span, until that rank reaches the codimension.
    """
    gens = e.generators
    degs = [g[-1] for g in gens]
    groups: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for m in _monomials(degs, degree_bound):
        img = tuple(sum(k * g[c] for k, g in zip(m, gens)) for c in range(len(gens[0])))
        groups.setdefault(img, []).append(m)
    binoms = []
    for img, ms in groups.items():
        for a, b in combinations(sorted(ms), 2):
            if any(x and y for x, y in zip(a, b)):
                continue
            plus, minus = (a, b) if a > b else (b, a)
            binoms.append(Binomial(plus, minus, img[-1]))
    binoms.sort(key=lambda b: (b.degree, b.plus, b.minus))
    codim = len(gens) - len(gens[0])
    chosen: List[Tuple[int, ...]] = []
    ci: List[int] = []
    for b in binoms:
        diff = tuple(x - y for x, y in zip(b.plus, b.minus))
        if rank(chosen + [diff]) > len(chosen):
            chosen.append(diff)
            ci.append(b.degree)
        if len(chosen) == codim:
            break
    return EmbeddingResult(gens, tuple(binoms), tuple(sorted(ci)))


def is_complete_intersection_of_degrees(e: EmbeddingResult, expected: Sequence[int] = (2, 2, 4)) -> bool:
    return tuple(sorted(expected)) == e.complete_intersection_degrees


def relation_lattice(e: EmbeddingResult) -> List[Tuple[int, ...]]:
    """Integer relations among the generators (kernel of the generator matrix)."""
    g = e.generators
    mat = [[g[i][c] for i in range(len(g))] for c in range(len(g[0]))]
    return kernel_lattice(mat)


# ----------------------------------------------------------------------------
# invariant rings of cyclic actions


def cyclic_invariant_generators(
    weights: Sequence[int], order: int, degrees: Optional[Sequence[int]] = None, degree_bound: int = 4
) -> List[Tuple[int, ...]]:
    """Minimal monomial generators (as exponent vectors) of the mu_order-invariants up to degree_bound."""
    n = len(weights)
    degs = list(degrees) if degrees is not None else [1] * n
    inv = [m for m in _monomials(degs, degree_bound) if sum(w * k for w, k in zip(weights, m)) % order == 0]
    inv.sort(key=lambda m: (sum(d * k for d, k in zip(degs, m)), tuple(-k for k in m)))
    members = set(inv)
    gens: List[Tuple[int, ...]] = []
    for m in inv:
        if not any(
            all(a >= b for a, b in zip(m, g)) and (tuple(a - b for a, b in zip(m, g)) in members)
            for g in gens
        ):
            gens.append(m)
    return gens


# ----------------------------------------------------------------------------
# dossier


@dataclass(frozen=True)
class Dossier:
    polytope: FanoPolytope
    kps: bool
    barycentre: Tuple[Fraction, ...]
    degree: Fraction
    polar_vertices: Tuple[Tuple[Fraction, ...], ...]
    class_group: ClassGroupResult
    curves: Tuple[ConeSingularityReport, ...]
    points: Tuple[ConeSingularityReport, ...]
    embedding: Optional[EmbeddingResult]
    quotient: Optional[QuotientWeights] = None

    def to_json(self) -> dict:
        out = {
            "polytope": self.polytope.to_json(),
            "kps": self.kps,
            "barycentre": [_fs(x) for x in self.barycentre],
            "degree": _fs(self.degree),
            "polar_vertices": [[_fs(x) for x in v] for v in self.polar_vertices],
            "class_group": {
                "free_rank": self.class_group.free_rank,
                "torsion": list(self.class_group.torsion),
                "text": str(self.class_group),
            },
            "cones": [c.to_json() for c in self.curves + self.points],
            "embedding": self.embedding.to_json() if self.embedding else None,
        }
        if self.quotient is not None:
            out["quotient"] = {
                "orders": list(self.quotient.orders),
                "weights": [list(w) for w in self.quotient.weights],
            }
        return out


def dossier(p: FanoPolytope, degree_bound: int = 4) -> Dossier:
    from .polytope import anticanonical_degree, kps_toric_check

    kps = kps_toric_check(p)
    q = polar(p)
    curves = tuple(analyze_2d_cone(p, e) for e in edges(p))
    points = tuple(analyze_3d_cone(p, c) for c in maximal_cones(p)) if p.dim == 3 else ()
    try:
        emb = wps_embedding(p, degree_bound)
    except ToricError:
        emb = None
    quot = quotient_weights(p) if len(p.vertices) == p.dim + 1 else None
    return Dossier(
        polytope=p,
        kps=kps.polystable,
        barycentre=kps.barycentre,
        degree=anticanonical_degree(p),
        polar_vertices=q.vertices,
        class_group=class_group(p),
        curves=curves,
        points=points,
        embedding=emb,
        quotient=quot,
    )
