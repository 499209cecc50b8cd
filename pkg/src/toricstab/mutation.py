"""Mutations of Laurent polynomials, classical periods and bounded mutation search.

A mutation is given by a primitive covector w and a factor F whose exponents
all have w-weight 0.  Writing f = sum_h f_h by w-weight, the mutation is
g = sum_h f_h * F^h, defined when F^(-h) divides f_h for every h < 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .laurent import LaurentPolynomial
from .lattice_core import dot, inverse_unimodular, primitive
from .polytope import (
    DegenerateError,
    FanoPolytope,
    NotFanoError,
    PolytopeError,
    RationalPolytope,
    gl_normal_form_data,
    hull_vertices_any_dim,
    kps_toric_check,
    _hull,
)

log = logging.getLogger(__name__)


class MutationError(ValueError):
    def __init__(self, message: str, level: Optional[int] = None):
        super().__init__(message)
        self.level = level


@dataclass(frozen=True)
class MutationData:
    weight: Tuple[int, ...]
    factor: LaurentPolynomial

    def __post_init__(self):
        w = tuple(int(x) for x in self.weight)
        if primitive(w) != w:
            raise MutationError(f"weight {w} is not primitive")
        for e in self.factor.terms:
            if dot(w, e) != 0:
                raise MutationError(f"factor exponent {e} has nonzero weight under {w}")
        object.__setattr__(self, "weight", w)

    @classmethod
    def binomial(cls, weight: Sequence[int], a: Sequence[int]) -> "MutationData":
        """Data (w, 1 + x^a)."""
        n = len(weight)
        f = LaurentPolynomial(n, {(0,) * n: 1, tuple(a): 1})
        return cls(tuple(weight), f)

    def inverse(self) -> "MutationData":
        return MutationData(tuple(-x for x in self.weight), self.factor)

    def binomial_direction(self) -> Optional[Tuple[int, ...]]:
        """a if the factor is exactly 1 + x^a with a primitive, else None."""
        t = self.factor.terms
        zero = (0,) * self.factor.dim
        if len(t) != 2 or t.get(zero) != 1:
            return None
        (a, c), = [(e, c) for e, c in t.items() if e != zero]
        if c != 1 or primitive(a) != a:
            return None
        return a

    def to_json(self) -> dict:
        return {"weight": list(self.weight), "factor": self.factor.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "MutationData":
        if "a" in obj:
            return cls.binomial(obj["weight"], obj["a"])
        return cls(tuple(obj["weight"]), LaurentPolynomial.from_json(obj["factor"]))


def newton_polytope(f: LaurentPolynomial):
    """Hull of the support; FanoPolytope when the origin is interior and vertices primitive."""
    if not f:
        raise MutationError("Newton polytope of the zero polynomial")
    pts = list(f.terms)
    try:
        h = _hull(pts)
    except DegenerateError:
        verts = hull_vertices_any_dim(pts)
        return FlatPolytope(tuple(tuple(int(x) for x in v) for v in verts), _affine_dim(verts))
    try:
        return FanoPolytope([tuple(int(x) for x in v) for v in h.vertices], _hull_data=h)
    except NotFanoError:
        return RationalPolytope(h.vertices, _hull_data=h)


@dataclass(frozen=True)
class FlatPolytope:
    """Hull of a point set spanning a proper affine subspace."""

    vertices: Tuple[Tuple[int, ...], ...]
    affine_dim: int


def _affine_dim(verts) -> int:
    from .lattice_core import rank

    if len(verts) <= 1:
        return 0
    return rank([[a - b for a, b in zip(v, verts[0])] for v in verts[1:]])


# ----------------------------------------------------------------------------
# periods


def classical_period_coeffs(f: LaurentPolynomial, n: int) -> List[Fraction]:
    """c_k = constant term of f^k for k = 0..n.

    Uses c_k = sum_e [f^i]_e [f^(k-i)]_(-e) with i = ceil(k/2), so only
    powers up to ceil(n/2) are expanded.
    """
    half = (n + 1) // 2
    powers = [LaurentPolynomial.constant(f.dim)]
    for _ in range(half):
        powers.append(powers[-1] * f)
    out = []
    for k in range(n + 1):
        i = (k + 1) // 2
        a, b = powers[i], powers[k - i]
        s = Fraction(0)
        small, big = (a, b) if len(a) <= len(b) else (b, a)
        for e, c in small.terms.items():
            c2 = big.terms.get(tuple(-x for x in e))
            if c2 is not None:
                s += c * c2
        out.append(s)
    return out


# ----------------------------------------------------------------------------
# mutation


def weight_levels(f: LaurentPolynomial, w: Sequence[int]) -> Dict[int, Dict[Tuple[int, ...], Fraction]]:
    levels: Dict[int, Dict[Tuple[int, ...], Fraction]] = {}
    for e, c in f.terms.items():
        levels.setdefault(dot(w, e), {})[e] = c
    return levels


def _line_split(terms: Dict[Tuple[int, ...], Fraction], a: Tuple[int, ...]):
    """Group exponents into lines e + Z·a; each line becomes {t: coeff} with e = base + t·a."""
    k = next(i for i, x in enumerate(a) if x)
    lines: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
    for e, c in terms.items():
        t = e[k] // a[k]
        base = tuple(x - t * y for x, y in zip(e, a))
        lines.setdefault(base, {})[t] = c
    return lines


def _divide_by_one_plus(poly: Dict[int, Fraction], times: int) -> Optional[Dict[int, Fraction]]:
    """Exact division of a univariate Laurent polynomial by (1+T)^times."""
    lo = min(poly)
    hi = max(poly)
    coeffs = [poly.get(t, Fraction(0)) for t in range(lo, hi + 1)]
    for _ in range(times):
        if len(coeffs) < 2:
            return None
        # p(T) = (1 + T) q(T), q has degree one less: solve from the top
        q = [Fraction(0)] * (len(coeffs) - 1)
        q[-1] = coeffs[-1]
        for i in range(len(coeffs) - 2, 0, -1):
            q[i - 1] = coeffs[i] - q[i]
        if coeffs[0] != q[0]:
            return None
        coeffs = q
    return {lo + i: c for i, c in enumerate(coeffs) if c}


def _multiply_by_one_plus(poly: Dict[int, Fraction], times: int) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    binom = [comb(times, j) for j in range(times + 1)]
    for t, c in poly.items():
        for j, b in enumerate(binom):
            out[t + j] = out.get(t + j, 0) + c * b
    return {t: c for t, c in out.items() if c}


def mutate(f: LaurentPolynomial, m: MutationData) -> LaurentPolynomial:
    """Apply the mutation; MutationError (with .level) when a negative level is not divisible."""
    a = m.binomial_direction()
    levels = weight_levels(f, m.weight)
    out: Dict[Tuple[int, ...], Fraction] = {}
    for h in sorted(levels):
        terms = levels[h]
        if h == 0:
            for e, c in terms.items():
                out[e] = out.get(e, 0) + c
            continue
        if a is not None:
            for base, line in _line_split(terms, a).items():
                if h < 0:
                    res = _divide_by_one_plus(line, -h)
                    if res is None:
                        raise MutationError(f"factor^{-h} does not divide the weight-{h} part", level=h)
                else:
                    res = _multiply_by_one_plus(line, h)
                for t, c in res.items():
                    e = tuple(x + t * y for x, y in zip(base, a))
                    out[e] = out.get(e, 0) + c
        else:
            part = LaurentPolynomial(f.dim, terms)
            if h < 0:
                q = part.divide(m.factor ** (-h))
                if q is None:
                    raise MutationError(f"factor^{-h} does not divide the weight-{h} part", level=h)
                res_poly = q
            else:
                res_poly = part * m.factor ** h
            for e, c in res_poly.terms.items():
                out[e] = out.get(e, 0) + c
    return LaurentPolynomial(f.dim, out)


def is_mutable(f: LaurentPolynomial, m: MutationData) -> bool:
    try:
        mutate(f, m)
    except MutationError:
        return False
    return True


def _quick_reject(levels, a: Tuple[int, ...]) -> bool:
    """True when the lowest level already fails divisibility (cheap prefilter)."""
    h = min(levels)
    if h >= 0:
        return False
    for line in _line_split(levels[h], a).values():
        if max(line) - min(line) < -h:
            return True
        if _divide_by_one_plus(line, -h) is None:
            return True
    return False


# ----------------------------------------------------------------------------
# search


def candidate_moves(dim: int, weight_bound: int = 3, factor_bound: int = 2) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """(w, a) pairs: w primitive with |w|_inf <= weight_bound, a primitive with first
    nonzero entry positive, <w, a> = 0 and |a|_inf <= factor_bound."""
    ws = [w for w in product(range(-weight_bound, weight_bound + 1), repeat=dim) if any(w) and _is_prim(w)]
    as_ = [
        a
        for a in product(range(-factor_bound, factor_bound + 1), repeat=dim)
        if any(a) and _is_prim(a) and next(x for x in a if x) > 0
    ]
    moves = [(w, a) for w in ws for a in as_ if dot(w, a) == 0]
    moves.sort(key=lambda wa: (max(map(abs, wa[0])), wa[0], max(map(abs, wa[1])), wa[1]))
    return moves


def _is_prim(v) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


@dataclass(frozen=True)
class SearchNode:
    key: Tuple[Tuple[int, ...], ...]
    polytope: FanoPolytope
    polynomial: LaurentPolynomial  # stored in normal-form coordinates
    depth: int
    barycentre_zero: bool

    def to_json(self) -> dict:
        return {
            "normal_form": [list(v) for v in self.key],
            "depth": self.depth,
            "barycentre_zero": self.barycentre_zero,
            "polynomial": self.polynomial.to_json(),
        }


@dataclass(frozen=True)
class SearchEdge:
    parent: Tuple[Tuple[int, ...], ...]
    child: Tuple[Tuple[int, ...], ...]
    mutation: MutationData  # in the parent's stored coordinates
    transform: Tuple[Tuple[int, ...], ...]  # child stored = mutate(parent stored).transform(W)

    def to_json(self) -> dict:
        return {
            "parent": [list(v) for v in self.parent],
            "child": [list(v) for v in self.child],
            "mutation": self.mutation.to_json(),
            "transform": [list(r) for r in self.transform],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SearchEdge":
        return cls(
            tuple(tuple(v) for v in obj["parent"]),
            tuple(tuple(v) for v in obj["child"]),
            MutationData.from_json(obj["mutation"]),
            tuple(tuple(r) for r in obj["transform"]),
        )


@dataclass
class SearchResult:
    nodes: List[SearchNode]
    edges: List[SearchEdge]
    complete: bool
    candidates_tried: int

    def keys(self) -> set:
        return {n.key for n in self.nodes}

    def node(self, key) -> SearchNode:
        return next(n for n in self.nodes if n.key == key)

    def path_to(self, key) -> List[SearchEdge]:
        by_child = {e.child: e for e in self.edges}
        path = []
        while key in by_child:
            e = by_child[key]
            path.append(e)
            key = e.parent
        return list(reversed(path))

    def to_json(self) -> dict:
        return {
            "complete": self.complete,
            "candidates_tried": self.candidates_tried,
            "nodes": [n.to_json() for n in self.nodes],
            "edges": [e.to_json() for e in self.edges],
        }


def canonical_form(g: LaurentPolynomial):
    """(normal-form key, polytope, canonical polynomial, transform) or None if Newt(g) is not Fano."""
    p = newton_polytope(g)
    if not isinstance(p, FanoPolytope):
        return None
    data = gl_normal_form_data(p)
    best = None
    for w in data.transforms:
        h = g.transform(w)
        k = h.sort_key()
        if best is None or k < best[0]:
            best = (k, h, w)
    return data.key, data, best[1], best[2]


def mutation_search(
    seed: LaurentPolynomial,
    depth: int,
    budget: int = 10 ** 6,
    moves: Optional[Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = None,
    targets: Optional[Iterable] = None,
) -> SearchResult:
    """Breadth-first search over binomial mutations, deduplicated by GL normal form.

    Each level is expanded completely before representatives are chosen: for a
    normal form reached several times, the stored polynomial is the least one
    (in canonical coordinates), so the outcome does not depend on move order.
    Stops after the level on which every target key has been seen.
    """
    if moves is None:
        moves = candidate_moves(seed.dim)
    root = canonical_form(seed)
    if root is None:
        raise MutationError("seed Newton polytope is not Fano")
    key, data, poly, _ = root
    poly_nf = data.polytope
    nodes = {key: SearchNode(key, poly_nf, poly, 0, kps_toric_check(poly_nf).polystable)}
    edges: List[SearchEdge] = []
    frontier = [key]
    tried = 0
    complete = True
    want = set(targets) if targets is not None else None
    for level in range(1, depth + 1):
        if want is not None and want <= set(nodes):
            break
        found: Dict[tuple, tuple] = {}
        for pkey in sorted(frontier):
            parent = nodes[pkey]
            f = parent.polynomial
            for w, a in moves:
                if tried >= budget:
                    complete = False
                    break
                tried += 1
                levels = weight_levels(f, w)
                if _quick_reject(levels, a):
                    continue
                m = MutationData.binomial(w, a)
                try:
                    g = mutate(f, m)
                except MutationError:
                    continue
                cf = canonical_form(g)
                if cf is None:
                    continue
                ckey, cdata, cpoly, tw = cf
                if ckey in nodes:
                    continue
                cand = (cpoly.sort_key(), pkey, w, a)
                if ckey not in found or cand[:4] < found[ckey][0][:4]:
                    found[ckey] = (cand, cdata, cpoly, SearchEdge(pkey, ckey, m, tw))
            if not complete:
                break
        for ckey in sorted(found):
            _, cdata, cpoly, edge = found[ckey]
            cpoly_nf = cdata.polytope
            nodes[ckey] = SearchNode(ckey, cpoly_nf, cpoly, level, kps_toric_check(cpoly_nf).polystable)
            edges.append(edge)
        log.info("depth %d: %d new normal forms, %d candidates tried", level, len(found), tried)
        frontier = list(found)
        if not complete or not frontier:
            break
    return SearchResult(list(nodes.values()), edges, complete, tried)


def reverse_edge(e: SearchEdge) -> SearchEdge:
    """Edge from e.child back to e.parent.

    With child = mutate(parent, (w, F)).transform(W), the inverse move is
    (-W^{-1}w, F(x^W)) in the child's coordinates followed by W^{-1}.
    """
    winv = inverse_unimodular([list(r) for r in e.transform])
    n = len(winv)
    w = tuple(-sum(winv[i][j] * e.mutation.weight[j] for j in range(n)) for i in range(n))
    return SearchEdge(e.child, e.parent, MutationData(w, e.mutation.factor.transform(e.transform)), tuple(map(tuple, winv)))


@dataclass(frozen=True)
class EdgeCheck:
    parent: Tuple[Tuple[int, ...], ...]
    child: Tuple[Tuple[int, ...], ...]
    periods_parent: Tuple[Fraction, ...]
    periods_child: Tuple[Fraction, ...]

    @property
    def ok(self) -> bool:
        return self.periods_parent == self.periods_child


def verify_chain(seed: LaurentPolynomial, edges: Sequence[SearchEdge], order: int = 8) -> List[EdgeCheck]:
    """Replay edges and compare period coefficients c_0..c_order across each one."""
    reached = replay(seed, edges)
    cache: Dict[tuple, Tuple[Fraction, ...]] = {}

    def per(key):
        if key not in cache:
            cache[key] = tuple(classical_period_coeffs(reached[key], order))
        return cache[key]

    return [EdgeCheck(e.parent, e.child, per(e.parent), per(e.child)) for e in edges]


def replay(seed: LaurentPolynomial, edges: Sequence[SearchEdge]) -> Dict[tuple, LaurentPolynomial]:
    """Re-run stored edges from the seed; returns the polynomial reached at each key."""
    root = canonical_form(seed)
    if root is None:
        raise MutationError("seed Newton polytope is not Fano")
    reached = {root[0]: root[2]}
    for e in edges:
        if e.parent not in reached:
            raise MutationError(f"edge parent {e.parent} not reached yet")
        g = mutate(reached[e.parent], e.mutation).transform(e.transform)
        p = newton_polytope(g)
        key = tuple(sorted(p.int_vertices)) if isinstance(p, FanoPolytope) else None
        if key != e.child:
            raise MutationError(f"edge to {e.child} lands on {key}")
        reached[e.child] = g
    return reached
