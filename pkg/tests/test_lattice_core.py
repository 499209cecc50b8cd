from fractions import Fraction
from itertools import combinations, product
from math import gcd

import pytest

from toricstab.lattice_core import (
    LatticeError,
    determinant,
    kernel_lattice,
    matmul,
    primitive,
    smith_normal_form,
    sublattice_index,
)

X224_RAYS = [(3, 2, 4), (1, 4, 0), (1, 0, 0), (-5, -6, -4)]


def det_divisors(a):
    """d_k = gcd of k x k minors; the invariant factors are d_k / d_{k-1}."""
    rows, cols = len(a), len(a[0])
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, int(determinant([[a[r][c] for c in cs] for r in rs])))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def test_snf_identity():
    r = smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert r.invariant_factors == [1, 1, 1]
    assert r.D == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_snf_ray_matrix_cokernel():
    r = smith_normal_form(X224_RAYS)
    assert r.invariant_factors == [1, 2, 8]
    assert r.cokernel() == (1, [2, 8])
    assert matmul(matmul(r.U, X224_RAYS), r.V) == r.D


def test_snf_diag_2_3_against_determinantal_divisors():
    a = [[2, 0], [0, 3]]
    assert smith_normal_form(a).invariant_factors == [1, 6] == det_divisors(a)


def test_snf_deterministic():
    a = [[4, 6, 2], [2, 8, 10], [6, 2, 0]]
    assert smith_normal_form(a) == smith_normal_form(a)


@pytest.mark.parametrize(
    "v, expected",
    [((2, 4, 6), (1, 2, 3)), ((3, 2, 4), (3, 2, 4)), ((-10, -12, -8), (-5, -6, -4))],
)
def test_primitive(v, expected):
    assert primitive(v) == expected


def test_primitive_zero_rejected():
    with pytest.raises(LatticeError):
        primitive((0, 0, 0))


def _coeffs(gens, x):
    """c with x = sum c_i g_i, or None when x is off the rational span."""
    k, n = len(gens), len(gens[0])
    for cs in combinations(range(n), k):
        sub = [[Fraction(gens[i][j]) for i in range(k)] for j in cs]
        if determinant(sub) != 0:
            break
    # Cramer's rule on the chosen coordinates
    d = determinant(sub)
    c = []
    for i in range(k):
        m = [row[:] for row in sub]
        for r, j in enumerate(cs):
            m[r][i] = Fraction(x[j])
        c.append(determinant(m) / d)
    recon = [sum(c[i] * gens[i][j] for i in range(k)) for j in range(n)]
    return c if recon == list(x) else None


def _enumerate_index(gens):
    """Lattice points of the half-open parallelepiped spanned by gens, found by box search."""
    k, n = len(gens), len(gens[0])
    lo = [sum(min(0, g[j]) for g in gens) for j in range(n)]
    hi = [sum(max(0, g[j]) for g in gens) for j in range(n)]
    found = []
    for x in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        c = _coeffs(gens, x)
        if c is not None and all(0 <= ci < 1 for ci in c):
            found.append(x)
    return found


def test_sublattice_index_pair_of_rays():
    r = sublattice_index([(3, 2, 4), (1, 4, 0)])
    assert r.index == 2
    pts = {p for p, _ in r.cosets}
    assert (0, 0, 0) in pts
    (other,) = pts - {(0, 0, 0)}
    # same coset as (2,3,2) modulo the span
    diff = tuple(a - b for a, b in zip(other, (2, 3, 2)))
    c = _coeffs([(3, 2, 4), (1, 4, 0)], diff)
    assert c is not None and all(x.denominator == 1 for x in c)
    assert sorted(_enumerate_index([(3, 2, 4), (1, 4, 0)])) == sorted(pts)


def test_sublattice_index_trivial_and_four():
    assert sublattice_index([(1, 0, 0), (0, 1, 0)]).index == 1
    r = sublattice_index([(2, 0), (0, 2)])
    assert r.index == 4
    assert sorted(p for p, _ in r.cosets) == sorted(_enumerate_index([(2, 0), (0, 2)]))


def test_sublattice_dependent_rejected():
    with pytest.raises(LatticeError):
        sublattice_index([(1, 2), (2, 4)])


def test_kernel_lattice_examples():
    assert kernel_lattice([[1, 0], [0, 1]]) == []
    (k,) = kernel_lattice([[2, 3]])
    assert tuple(k) in {(3, -2), (-3, 2)}


def test_kernel_of_embedding_generators():
    gens = [(-1, 0, 1, 1), (-1, 1, 0, 1), (0, 0, 0, 1), (1, 0, -1, 1), (3, -1, -2, 1), (-2, 0, 1, 2), (-2, 0, 3, 2)]
    a = [list(r) for r in zip(*gens)]  # 4 x 7
    ker = kernel_lattice(a)
    assert len(ker) == 3
    for x in ker:
        assert all(sum(a[i][j] * x[j] for j in range(7)) == 0 for i in range(4))
    assert sublattice_index(ker).index == 1
    # x0^4 - y0*y1: 4*x0 - y0 - y1 lies in the kernel span
    rel = (4, 0, 0, 0, 0, -1, -1)
    from toricstab.lattice_core import rank

    assert rank([list(v) for v in ker] + [list(rel)]) == 3
