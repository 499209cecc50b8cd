"""Independent floating-point oracles: brute-force Zariski decomposition and quadrature."""

from itertools import combinations

import numpy as np
from scipy.integrate import quad

TOL = 1e-11


class FloatZariski:
    """Brute-force Zariski decomposition in floating point.

    Every curve subset (smallest first) is tried as the negative support. A
    subset is accepted when its Gram block is negative definite, the solved
    coefficients are >= 0 and the remainder is nef against every curve. By
    uniqueness the first accepted subset is the answer. Negative-definite
    blocks and their inverses are precomputed once per Gram matrix.
    """

    def __init__(self, gram, tol=TOL):
        self.g = np.asarray(gram, dtype=float)
        self.tol = tol
        n = len(self.g)
        self.subsets = [((), None)]
        for size in range(1, n + 1):
            for s in combinations(range(n), size):
                idx = list(s)
                block = self.g[np.ix_(idx, idx)]
                if np.linalg.eigvalsh(block).max() < -1e-12:
                    self.subsets.append((idx, np.linalg.inv(block)))

    def __call__(self, d):
        """(positive vector, {index: coefficient}) or None when d is not pseudo-effective."""
        d = np.asarray(d, dtype=float)
        gd = self.g @ d
        for idx, inv in self.subsets:
            p = d
            coeffs = {}
            if idx:
                a = inv @ gd[idx]
                if a.min() < -self.tol:
                    continue
                p = d.copy()
                p[idx] -= a
                coeffs = dict(zip(idx, a))
            if (self.g @ p).min() >= -self.tol:
                return p, coeffs
        return None


def zariski_float(gram, d, tol=TOL):
    return FloatZariski(gram, tol)(d)


def vol_float(z, d):
    r = z(d)
    if r is None:
        return 0.0
    p = r[0]
    return float(p @ z.g @ p)


def threshold_float(z, l, f):
    l = np.asarray(l, dtype=float)
    f = np.asarray(f, dtype=float)
    lo, hi = 0.0, 1.0
    while z(l - hi * f) is not None:
        lo, hi = hi, hi * 2
        if hi > 1e6:
            raise ValueError("unbounded threshold")
    for _ in range(55):
        mid = (lo + hi) / 2
        if z(l - mid * f) is None:
            hi = mid
        else:
            lo = mid
    return lo


def s_invariant_float(gram, l, f):
    z = FloatZariski(gram)
    g = z.g
    l = np.asarray(l, dtype=float)
    f = np.asarray(f, dtype=float)
    tau = threshold_float(z, l, f)
    val, _ = quad(lambda t: vol_float(z, l - t * f), 0, tau, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val / vol_float(z, l)


def _support(z, d):
    r = z(d)
    return None if r is None else frozenset(i for i, a in r[1].items() if a > 1e-9)


def support_breakpoints(z, base, direction, tau, grid=48):
    """Values of v in (0, tau) where the Zariski support of base - v*direction changes.

    Found by scanning a grid and bisecting every change; the support only
    grows with v, so a cell hidden between two grid points still shows up as
    a difference between their supports and is recovered recursively.
    """
    def sup(v):
        return _support(z, base - v * direction)

    def split(a, sa, b, sb, out):
        if sa == sb:
            return
        lo, hi = a, b
        for _ in range(60):
            mid = (lo + hi) / 2
            if sup(mid) == sa:
                lo = mid
            else:
                hi = mid
        if hi - lo > 1e-15 and (hi - a) < 1e-15:
            return
        out.append(hi)
        eps_r = min(hi + 1e-12, b)
        split(eps_r, sup(eps_r), b, sb, out)

    pts = np.linspace(0, tau, grid + 1)
    sups = [sup(v) for v in pts[:-1]] + [sup(tau * (1 - 1e-14))]
    out = []
    for k in range(grid):
        split(pts[k], sups[k], pts[k + 1], sups[k + 1], out)
    return sorted(out)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(3)


def gauss_pieces(f, cuts):
    """Sum of 3-point Gauss-Legendre rules over consecutive cuts (exact for degree <= 5)."""
    total = 0
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        mid, half = (a + b) / 2, (b - a) / 2
        total = total + half * sum(w * f(mid + half * x) for x, w in zip(_GL_X, _GL_W))
    return total


def flag_float(cfg):
    """S_L(B), S(W;C), F_x and S(W;x) of a flag configuration.

    Inner v-integrals: breakpoints located numerically from float Zariski
    supports, Gauss-Legendre on each piece. Outer u-integral: adaptive quad.
    """
    surf = cfg.surface
    z = FloatZariski([[float(x) for x in row] for row in surf.gram])
    g = z.g
    ci = surf.index(cfg.flag_curve)
    mult = np.zeros(len(surf.curves))
    if cfg.point is not None:
        for name, m in cfg.point.items():
            mult[surf.index(name)] = float(m)
    div = cfg.basis.index(cfg.divisor)
    res = np.array([[float(x) for x in row] for row in cfg.restriction])
    n = len(cfg.basis)
    tensor = np.zeros((n, n, n))
    for (i, j, k), val in cfg.tensor.items():
        for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            tensor[a, b, c] = float(val)

    def p_at(u):
        # P(u) = L - u*divisor - N(u), with N(u) = n0 + n1*u per basis element
        return np.array(
            [float(l) - u * (i == div) - float(n0) - float(n1) * u for i, (l, (n0, n1)) in enumerate(zip(cfg.L, cfg.N))]
        )

    def cube_at(u):
        p = p_at(u)
        return float(np.einsum("ijk,i,j,k->", tensor, p, p, p))

    e = np.zeros(len(surf.curves))
    e[ci] = 1.0

    def integrand(d):
        r = z(d)
        if r is None:
            return np.zeros(3)
        p, neg = r
        pc = float((g @ p)[ci])
        ordx = sum(a * mult[i] for i, a in neg.items())
        return np.array([float(p @ g @ p), pc * ordx, pc * pc])

    memo = {}

    def inner(u):
        if u in memo:
            return memo[u]
        base = p_at(u) @ res
        tau = threshold_float(z, base, e)
        cuts = [0.0] + support_breakpoints(z, base, e, tau) + [tau]
        memo[u] = gauss_pieces(lambda v: integrand(base - v * e), cuts)
        return memo[u]

    u_max = float(cfg.u_max)
    l_cubed = cube_at(0.0)
    s_div, _ = quad(cube_at, 0, u_max, epsabs=1e-13, epsrel=1e-13)
    parts = [quad(lambda u, k=k: inner(u)[k], 0, u_max, epsabs=1e-13, epsrel=1e-13, limit=200)[0] for k in range(3)]
    f_x = 6 * parts[1] / l_cubed
    return {
        "S_divisor": s_div / l_cubed,
        "S_curve": 3 * parts[0] / l_cubed,
        "F_point": f_x,
        "S_point": 3 * parts[2] / l_cubed + f_x,
    }
