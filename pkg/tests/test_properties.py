"""Randomised invariants (hypothesis, 500 examples per property)."""

import math
from fractions import Fraction as Fr
from itertools import combinations

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from oracles import s_invariant_float
from toricstab.kstab import KStabError, SurfaceModel, s_invariant, volume_fn, zariski_decompose, volume
from toricstab.laurent import LaurentPolynomial as L
from toricstab.lattice_core import determinant, matmul, smith_normal_form
from toricstab.mutation import (
    MutationData,
    candidate_moves,
    classical_period_coeffs,
    mutate,
    mutation_search,
)
from toricstab.polytope import (
    DegenerateError,
    FanoPolytope,
    RationalPolytope,
    apply_linear,
    barycentre,
    kps_toric_check,
    normal_form_key,
    polar,
    volume as pvolume,
    volume_by_facets,
)

N = 500
PROFILE = settings(
    max_examples=N,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large],
)


# --------------------------------------------------------------- strategies


def unimodular(n):
    """Products of elementary row operations and sign flips."""
    op = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-2, 2), st.booleans())

    def build(ops):
        m = [[int(i == j) for j in range(n)] for i in range(n)]
        for i, j, k, flip in ops:
            if i != j:
                m[i] = [a + k * b for a, b in zip(m[i], m[j])]
            if flip:
                m[i] = [-a for a in m[i]]
        return m

    return st.lists(op, min_size=1, max_size=8).map(build)


int_matrix = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@st.composite
def polytope_around_origin(draw, dims=(2, 3)):
    d = draw(st.sampled_from(dims))
    extra = draw(st.lists(st.tuples(*[st.integers(-3, 3)] * d), min_size=1, max_size=6))
    axes = [tuple((1 if i == j else 0) * s for j in range(d)) for i in range(d) for s in (1, -1)]
    scale = draw(st.integers(1, 3))
    pts = [tuple(Fr(x, scale) for x in p) for p in axes] + [tuple(Fr(x) for x in p) for p in extra]
    return RationalPolytope(pts)


@st.composite
def rational_polytope(draw):
    d = draw(st.sampled_from((2, 3)))
    pts = draw(st.lists(st.tuples(*[st.fractions(-4, 4, max_denominator=3)] * d), min_size=d + 1, max_size=8))
    try:
        return RationalPolytope(pts)
    except DegenerateError:
        assume(False)


# random complete toric surfaces


def _det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


@st.composite
def toric_surface(draw):
    """Fan with rays (1,0), (0,1), (-1,-1) plus up to two extra primitive rays.

    Gram matrix of the toric divisors from the fan; the toric divisors
    generate the Mori cone and -K is their sum.
    """
    extra = draw(
        st.lists(
            st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(lambda v: v != (0, 0) and math.gcd(*v) == 1),
            max_size=2,
        )
    )
    rays = []
    for v in [(1, 0), (0, 1), (-1, -1)] + extra:
        if not any(_det2(v, w) == 0 and v[0] * w[0] + v[1] * w[1] > 0 for w in rays):
            rays.append(v)
    rays.sort(key=lambda v: math.atan2(v[1], v[0]))
    n = len(rays)
    g = [[Fr(0)] * n for _ in range(n)]
    for i in range(n):
        prv, cur, nxt = rays[i - 1], rays[i], rays[(i + 1) % n]
        g[i][(i + 1) % n] = g[(i + 1) % n][i] = Fr(1, _det2(cur, nxt))
        g[i][i] = Fr(-_det2(prv, nxt), _det2(prv, cur) * _det2(cur, nxt))
    names = [f"D{i}" for i in range(n)]
    antik = [Fr(1)] * n
    try:
        model = SurfaceModel(tuple(names), tuple(tuple(r) for r in g), tuple(names), tuple(antik))
    except KStabError:
        assume(False)
    return model


def gram_float(model):
    return [[float(x) for x in row] for row in model.gram]


# --------------------------------------------------------------- lattice


def determinantal_factors(a):
    rows, cols = len(a), len(a[0])
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = math.gcd(g, int(determinant([[a[r][c] for c in cs] for r in rs])))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


@PROFILE
@given(int_matrix, st.randoms(use_true_random=False))
def test_snf_reconstruction(a, rnd):
    r = smith_normal_form(a)
    assert matmul(matmul(r.U, a), r.V) == r.D
    assert abs(determinant(r.U)) == 1 and abs(determinant(r.V)) == 1
    d = r.invariant_factors
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert all(r.D[i][j] == 0 for i in range(len(a)) for j in range(len(a[0])) if i != j)
    assert nz == determinantal_factors(a)
    rows = [list(x) for x in a]
    rnd.shuffle(rows)
    cols = list(range(len(a[0])))
    rnd.shuffle(cols)
    permuted = [[row[c] for c in cols] for row in rows]
    assert smith_normal_form(permuted).invariant_factors == d


# --------------------------------------------------------------- polytopes


@PROFILE
@given(polytope_around_origin())
def test_polar_involution(q):
    assert polar(polar(q)).vertex_set() == q.vertex_set()


@PROFILE
@given(rational_polytope(), st.data())
def test_barycentre_equivariance(q, data):
    w = data.draw(unimodular(q.dim))
    b = barycentre(q)
    image = apply_linear(q, w)
    assert barycentre(image) == tuple(sum(b[i] * w[i][j] for i in range(q.dim)) for j in range(q.dim))
    assert pvolume(q) == volume_by_facets(q) == pvolume(image)


FANO_SAMPLES = [
    [(3, 2, 4), (1, 4, 0), (1, 0, 0), (-5, -6, -4)],
    [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -2)],
    [(1, 0), (0, 1), (-1, -1)],
    [(2, -1), (-1, 2), (-1, -1)],
    [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)],
]


@PROFILE
@given(st.sampled_from(FANO_SAMPLES).map(FanoPolytope), st.data())
def test_kps_and_normal_form_invariance(p, data):
    w = data.draw(unimodular(p.dim))
    image = apply_linear(p, w)
    assert kps_toric_check(image).polystable == kps_toric_check(p).polystable
    assert normal_form_key(image) == normal_form_key(p)


# --------------------------------------------------------------- surfaces


def negative_definite(m):
    """Sylvester: the k-th leading principal minor has sign (-1)^k."""
    return all((-1) ** k * determinant([row[:k] for row in m[:k]]) > 0 for k in range(1, len(m) + 1))


@PROFILE
@given(toric_surface(), st.data())
def test_zariski_invariants(model, data):
    n = len(model.curves)
    coeffs = data.draw(st.lists(st.fractions(0, 3, max_denominator=4), min_size=n, max_size=n))
    assume(any(coeffs))
    d = tuple(coeffs)
    z = zariski_decompose(model, d)
    p = z.positive
    neg = z.negative_class(model)
    assert model.numerically_equal(p + neg, d)
    names = [c for c, _ in z.negative]
    assert all(a > 0 for _, a in z.negative)
    for c in model.curves:
        pc = model.intersect(p, model.unit(c))
        assert pc == 0 if c in names else pc >= 0
    if names:
        idx = [model.index(c) for c in names]
        assert negative_definite([[model.gram[i][j] for j in idx] for i in idx])
    assert z.volume == model.intersect(p, p) == volume(model, d)


@PROFILE
@given(toric_surface(), st.data())
def test_s_invariant_against_quadrature(model, data):
    f = data.draw(st.sampled_from(model.curves))
    exact = s_invariant(model, model.antik, f)
    approx = s_invariant_float(gram_float(model), [float(x) for x in model.antik], [float(x) for x in model.unit(f)])
    assert abs(float(exact) - approx) < 1e-9


@PROFILE
@given(toric_surface(), st.data())
def test_volume_fn_matches_pointwise_zariski(model, data):
    f = data.draw(st.sampled_from(model.curves))
    v = volume_fn(model, model.antik, f)
    assert v.is_continuous()
    assert v(0) == volume(model, model.antik)
    assert v(v.breakpoints[-1]) == 0
    tau = v.breakpoints[-1]
    for k in range(9):
        t = tau * Fr(k, 8)
        d = tuple(a - t * b for a, b in zip(model.antik, model.unit(f)))
        assert v(t) == volume(model, d)


# --------------------------------------------------------------- mutation


@st.composite
def mutable_polynomial(draw):
    """f with (w, 1 + x^a) guaranteed mutable: terms below weight 0 carry (1 + x^a)^|h|."""
    dim = 2
    w = draw(st.sampled_from([w for w, _ in candidate_moves(dim, weight_bound=2, factor_bound=1)]))
    a = draw(st.sampled_from([a for ww, a in candidate_moves(dim, weight_bound=2, factor_bound=1) if ww == w]))
    factor = L(dim, {(0,) * dim: 1, a: 1})
    base = draw(
        st.lists(
            st.tuples(st.tuples(*[st.integers(-1, 1)] * dim), st.integers(-3, 3).filter(bool)),
            min_size=1,
            max_size=5,
            unique_by=lambda t: t[0],
        )
    )
    f = L(dim, {})
    for e, c in base:
        h = sum(x * y for x, y in zip(w, e))
        f = f + L.monomial(e, c) * factor ** max(0, -h)
    assume(len(f) > 0)
    return f, MutationData(w, factor)


@PROFILE
@given(mutable_polynomial())
def test_mutation_involution_and_periods(fm):
    f, m = fm
    g = mutate(f, m)
    assert mutate(g, m.inverse()) == f
    assert classical_period_coeffs(g, 8) == classical_period_coeffs(f, 8)


P2 = L(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1})
P2_TRIANGLE = L(2, {(2, -1): 1, (1, -1): 3, (0, -1): 3, (-1, -1): 1, (1, 0): 3, (0, 0): 6, (-1, 0): 3,
                    (0, 1): 3, (-1, 1): 3, (-1, 2): 1})
MOVES = candidate_moves(2)
_REFERENCE = {}


def _reference(seed):
    if seed not in _REFERENCE:
        _REFERENCE[seed] = mutation_search(seed, 2, moves=MOVES).to_json()
    return _REFERENCE[seed]


@PROFILE
@given(st.sampled_from([P2, P2_TRIANGLE]), st.permutations(MOVES))
def test_search_is_independent_of_move_order(seed, moves):
    assert mutation_search(seed, 2, moves=moves).to_json() == _reference(seed)
