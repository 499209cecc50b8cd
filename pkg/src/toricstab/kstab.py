"""Exact K-stability numerics on surfaces and on flags inside 3-folds.

Intersection theory lives in a SurfaceModel: named curves, their Gram matrix,
Mori-cone generators and the anticanonical class.  Divisor classes are
coefficient vectors over the curve list; everything is compared numerically
through intersection numbers, so redundant curve lists are fine.

The chamber engine walks D(u, v) = R0 + u·R1 - v·F for v from 0 up to the
pseudo-effective threshold, with u in an interval.  Inside a cell the Zariski
support is fixed and all coefficients are affine in (u, v), so volumes are
quadratic polynomials integrated symbolically.  Whenever a governing affine
function of u changes sign inside the current u-interval, the interval is cut
there and each half is walked again.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .lattice_core import inverse_rational, primitive_rational, rank, rational_kernel
from .piecewise import Aff, PiecewisePolynomial, Poly2, aff_sum

F0 = Fraction(0)
F1 = Fraction(1)

Vector = Tuple[Fraction, ...]


class KStabError(ValueError):
    pass


class NotPseudoEffectiveError(KStabError):
    """Carries a functional h on numerical classes with h(D) < 0 and h >= 0 on the effective cone."""

    def __init__(self, message: str, functional: Vector, value: Fraction):
        super().__init__(message)
        self.functional = functional
        self.value = value


class NoWallError(KStabError):
    pass


class IncidenceError(KStabError):
    pass


class UnsupportedInputError(KStabError):
    pass


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise KStabError("floats are not accepted, pass exact rationals")
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError):
        raise KStabError(f"not a rational number: {x!r}") from None


def fstr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- divisor classes


@dataclass(frozen=True)
class DivisorClass:
    """Coefficients over the curve basis, optionally affine in a parameter u: coeffs + u·slope."""

    coeffs: Vector
    slope: Optional[Vector] = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(frac(c) for c in self.coeffs))
        if self.slope is not None:
            if len(self.slope) != len(self.coeffs):
                raise KStabError("slope has the wrong length")
            s = tuple(frac(c) for c in self.slope)
            object.__setattr__(self, "slope", s if any(s) else None)

    @property
    def parametric(self) -> bool:
        return self.slope is not None

    def at(self, u) -> "DivisorClass":
        if self.slope is None:
            return self
        u = frac(u)
        return DivisorClass(tuple(c + u * s for c, s in zip(self.coeffs, self.slope)))

    def affine(self) -> Tuple[Aff, ...]:
        s = self.slope or (F0,) * len(self.coeffs)
        return tuple(Aff(c, d) for c, d in zip(self.coeffs, s))

    def __add__(self, o: "DivisorClass") -> "DivisorClass":
        return DivisorClass(
            tuple(a + b for a, b in zip(self.coeffs, o.coeffs)),
            _add_opt(self.slope, o.slope, len(self.coeffs)),
        )

    def __sub__(self, o: "DivisorClass") -> "DivisorClass":
        return self + o.scale(-1)

    def scale(self, k) -> "DivisorClass":
        k = frac(k)
        return DivisorClass(
            tuple(k * c for c in self.coeffs), None if self.slope is None else tuple(k * c for c in self.slope)
        )

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]


def _add_opt(a, b, n):
    if a is None and b is None:
        return None
    a = a or (F0,) * n
    b = b or (F0,) * n
    return tuple(x + y for x, y in zip(a, b))


ClassLike = Union[DivisorClass, Sequence, str, Mapping]


# ---------------------------------------------------------------- surface model


_TERM = re.compile(r"\s*([+-]?)\s*(?:\(?\s*(\d+(?:/\d+)?)\s*\)?)?\s*\*?\s*(-?K|[A-Za-z_][A-Za-z0-9_']*)\s*")


@dataclass(frozen=True)
class SurfaceModel:
    curves: Tuple[str, ...]
    gram: Tuple[Tuple[Fraction, ...], ...]
    mori: Tuple[str, ...]
    antik: Vector

    def __post_init__(self):
        n = len(self.curves)
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "mori", tuple(self.mori))
        object.__setattr__(self, "gram", tuple(tuple(frac(x) for x in row) for row in self.gram))
        object.__setattr__(self, "antik", tuple(frac(x) for x in self.antik))
        if len(set(self.curves)) != n:
            raise KStabError("curve names must be distinct")
        if len(self.gram) != n or any(len(r) != n for r in self.gram):
            raise KStabError(f"intersection matrix must be {n}x{n}")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(n) for j in range(i)):
            raise KStabError("intersection matrix is not symmetric")
        if len(self.antik) != n:
            raise KStabError("anticanonical vector has the wrong length")
        missing = [m for m in self.mori if m not in self.curves]
        if missing:
            raise KStabError(f"Mori generators not among the curves: {missing}")
        if not self.mori:
            raise KStabError("at least one Mori generator is required")
        if self.intersect(self.antik, self.antik) <= 0:
            raise KStabError("anticanonical class must have positive self-intersection")

    # basic intersection theory ------------------------------------------------
    def index(self, name: str) -> int:
        try:
            return self.curves.index(name)
        except ValueError:
            raise KStabError(f"unknown curve {name!r}") from None

    def unit(self, name: str) -> Vector:
        i = self.index(name)
        return tuple(F1 if j == i else F0 for j in range(len(self.curves)))

    def intersect(self, a: Sequence, b: Sequence) -> Fraction:
        g = self.gram
        return sum((a[i] * g[i][j] * b[j] for i in range(len(a)) if a[i] for j in range(len(b)) if b[j]), F0)

    def dot_curves(self, d: Sequence) -> Vector:
        """Intersection numbers of d with every curve."""
        return tuple(sum((row[j] * d[j] for j in range(len(d)) if d[j]), F0) for row in self.gram)

    @cached_property
    def _basis_rows(self) -> Tuple[int, ...]:
        rows: List[int] = []
        for i in range(len(self.curves)):
            if rank([self.gram[k] for k in rows + [i]]) > len(rows):
                rows.append(i)
        return tuple(rows)

    @property
    def picard_rank(self) -> int:
        return len(self._basis_rows)

    def numerical(self, d: Sequence) -> Vector:
        """Coordinates of d in N^1: intersection numbers against a fixed independent set of curves."""
        return tuple(sum((self.gram[i][j] * d[j] for j in range(len(d)) if d[j]), F0) for i in self._basis_rows)

    def numerically_equal(self, a: Sequence, b: Sequence) -> bool:
        return self.numerical(a) == self.numerical(b)

    # effective cone -------------------------------------------------------------
    @cached_property
    def effective_facets(self) -> Tuple[Vector, ...]:
        """Inequalities h·num(D) >= 0 cutting out the cone spanned by the Mori generators."""
        gens = [self.numerical(self.unit(m)) for m in self.mori]
        r = self.picard_rank
        if rank(gens) < r:
            raise KStabError("Mori generators do not span the Neron-Severi space")
        if r == 1:
            signs = {g[0] > 0 for g in gens if g[0]}
            if len(signs) != 1:
                raise KStabError("effective cone contains a line")
            return ((F1,),) if signs == {True} else ((-F1,),)
        facets = set()
        for sub in itertools.combinations(gens, r - 1):
            if rank(list(sub)) < r - 1:
                continue
            (h,) = rational_kernel([list(s) for s in sub])
            h = primitive_rational(h)
            vals = [sum(a * b for a, b in zip(h, g)) for g in gens]
            if all(v >= 0 for v in vals):
                facets.add(tuple(Fraction(x) for x in h))
            elif all(v <= 0 for v in vals):
                facets.add(tuple(-Fraction(x) for x in h))
        if not facets:
            raise KStabError("effective cone is not pointed")
        return tuple(sorted(facets))

    def _facet_values(self, d: Sequence) -> List[Fraction]:
        y = self.numerical(d)
        return [sum(a * b for a, b in zip(h, y)) for h in self.effective_facets]

    def is_pseudoeffective(self, d: Sequence) -> bool:
        return all(v >= 0 for v in self._facet_values(d))

    def check_pseudoeffective(self, d: Sequence) -> None:
        for h, v in zip(self.effective_facets, self._facet_values(d)):
            if v < 0:
                raise NotPseudoEffectiveError(f"class is not pseudo-effective (functional value {fstr(v)})", h, v)

    def is_nef(self, d: Sequence) -> bool:
        return all(self.intersect(d, self.unit(c)) >= 0 for c in self.curves)

    # parsing / io ---------------------------------------------------------------
    def as_class(self, d: ClassLike) -> DivisorClass:
        if isinstance(d, DivisorClass):
            if len(d) != len(self.curves):
                raise KStabError("divisor class has the wrong length")
            return d
        if isinstance(d, str):
            return self.parse_class(d)
        if isinstance(d, Mapping):
            out = [F0] * len(self.curves)
            for k, c in d.items():
                out[self.index(k)] += frac(c)
            return DivisorClass(tuple(out))
        d = tuple(frac(x) for x in d)
        if len(d) != len(self.curves):
            raise KStabError("divisor class has the wrong length")
        return DivisorClass(d)

    def parse_class(self, text: str) -> DivisorClass:
        """Parse combinations like `-K - 3/2 C`, `B+E2-C1`, `2B'`.  K is the canonical class."""
        s = text.strip()
        if not s:
            raise KStabError("empty divisor expression")
        out = [F0] * len(self.curves)
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            if not m or m.end() == pos:
                raise KStabError(f"cannot parse divisor expression {text!r} at position {pos}")
            sign = -1 if m.group(1) == "-" else 1
            coeff = frac(m.group(2)) if m.group(2) else F1
            name = m.group(3)
            if name in ("K", "-K"):
                vec = tuple(-a for a in self.antik) if name == "K" else self.antik
            else:
                vec = self.unit(name)
            for i, a in enumerate(vec):
                out[i] += sign * coeff * a
            pos = m.end()
        return DivisorClass(tuple(out))

    def to_json(self) -> dict:
        return {
            "curves": list(self.curves),
            "gram": [[fstr(x) for x in row] for row in self.gram],
            "mori": list(self.mori),
            "antik": [fstr(x) for x in self.antik],
        }

    @classmethod
    def from_json(cls, obj) -> "SurfaceModel":
        try:
            return cls(tuple(obj["curves"]), tuple(tuple(r) for r in obj["gram"]), tuple(obj["mori"]), tuple(obj["antik"]))
        except (KeyError, TypeError) as exc:
            raise KStabError(f"malformed surface model: missing or bad field {exc}") from None


# ---------------------------------------------------------------- Zariski decomposition


@dataclass(frozen=True)
class ZariskiDecomposition:
    positive: DivisorClass
    negative: Tuple[Tuple[str, Fraction], ...]
    volume: Fraction

    def negative_class(self, model: SurfaceModel) -> DivisorClass:
        out = [F0] * len(model.curves)
        for name, a in self.negative:
            out[model.index(name)] += a
        return DivisorClass(tuple(out))

    def to_json(self) -> dict:
        return {
            "positive": [fstr(x) for x in self.positive.coeffs],
            "negative": [[n, fstr(a)] for n, a in self.negative],
            "volume": fstr(self.volume),
        }


def zariski_decompose(model: SurfaceModel, d: ClassLike) -> ZariskiDecomposition:
    """Fujita's iteration: grow the support by every curve the current positive part meets negatively."""
    d = model.as_class(d)
    if d.parametric:
        raise KStabError("use the chamber engine for parametric classes")
    model.check_pseudoeffective(d.coeffs)
    n = len(model.curves)
    g = model.gram
    support: List[int] = []
    while True:
        a = _solve_support(g, support, [model.dot_curves(d.coeffs)[i] for i in support])
        p = list(d.coeffs)
        for i, ai in zip(support, a):
            p[i] -= ai
        dots = model.dot_curves(p)
        new = [i for i in range(n) if i not in support and dots[i] < 0]
        if not new:
            break
        support.extend(new)
    neg = tuple((model.curves[i], ai) for i, ai in sorted(zip(support, a)) if ai != 0)
    if any(ai < 0 for _, ai in neg):
        raise KStabError("negative part has a negative coefficient; Mori generators may be incomplete")
    pos = DivisorClass(tuple(p))
    return ZariskiDecomposition(pos, neg, model.intersect(p, p))


def _solve_support(g, support, rhs):
    if not support:
        return []
    m = [[g[i][j] for j in support] for i in support]
    try:
        inv = inverse_rational(m)
    except Exception:
        raise KStabError("negative-part curves have a singular intersection matrix") from None
    return [sum(inv[r][c] * rhs[c] for c in range(len(rhs))) for r in range(len(rhs))]


def pseff_threshold(model: SurfaceModel, l: ClassLike, f: ClassLike) -> Fraction:
    """sup{t : L - tF pseudo-effective}."""
    l, f = model.as_class(l), model.as_class(f)
    if not any(model.numerical(f.coeffs)):
        raise KStabError("F is numerically trivial")
    model.check_pseudoeffective(l.coeffs)
    yl, yf = model.numerical(l.coeffs), model.numerical(f.coeffs)
    best = None
    for h in model.effective_facets:
        hf = sum(a * b for a, b in zip(h, yf))
        if hf > 0:
            t = sum(a * b for a, b in zip(h, yl)) / hf
            best = t if best is None else min(best, t)
    if best is None:
        raise KStabError("L - tF stays pseudo-effective for every t > 0")
    return best


def volume(model: SurfaceModel, d: ClassLike) -> Fraction:
    d = model.as_class(d)
    if not model.is_pseudoeffective(d.coeffs):
        return F0
    return zariski_decompose(model, d).volume


# ---------------------------------------------------------------- chamber engine


@dataclass(frozen=True)
class Chamber:
    """u in [u_lo, u_hi], v between two affine functions of u; fixed Zariski support."""

    u_lo: Fraction
    u_hi: Fraction
    v_lo: Aff
    v_hi: Aff
    support: Tuple[str, ...]
    negative: Tuple[Aff, ...]
    positive: Tuple[Aff, ...]
    volume: Poly2

    def contains(self, u, v) -> bool:
        u, v = frac(u), frac(v)
        return self.u_lo <= u <= self.u_hi and self.v_lo(u) <= v <= self.v_hi(u)

    def integrate(self, integrand: Poly2) -> Fraction:
        return integrand.integrate_v(self.v_lo, self.v_hi).integrate_u(self.u_lo, self.u_hi)

    def area(self) -> Fraction:
        return self.integrate(Poly2({(0, 0): 1}))

    def intersection_with(self, model: SurfaceModel, name: str) -> Poly2:
        row = model.gram[model.index(name)]
        return aff_sum(p.scale(g) for p, g in zip(self.positive, row) if g).poly()

    def to_json(self) -> dict:
        return {
            "u": [fstr(self.u_lo), fstr(self.u_hi)],
            "v": [str(self.v_lo), str(self.v_hi)],
            "support": list(self.support),
            "negative": [str(a) for a in self.negative],
            "volume": str(self.volume),
        }


class _Split(Exception):
    def __init__(self, at: Fraction):
        self.at = at


def _sign_on(g: Aff, u0: Fraction, u1: Fraction) -> int:
    """Sign of an affine function of u on the open interval (u0, u1); requests a cut at an interior root."""
    if g.cu != 0:
        r = -g.c / g.cu
        if u0 < r < u1:
            raise _Split(r)
    val = g((u0 + u1) / 2)
    return (val > 0) - (val < 0)


def _germ_sign(f: Aff, v_lo: Aff, u0, u1) -> int:
    """Sign of f(u, v) for v slightly above v_lo(u), uniformly on (u0, u1)."""
    s = _sign_on(f.at_v(v_lo), u0, u1)
    if s:
        return s
    return (f.cv > 0) - (f.cv < 0)


def _min_of(cands: List[Aff], u0, u1) -> Aff:
    mid = (u0 + u1) / 2
    best = min(cands, key=lambda c: c(mid))
    for c in cands:
        _sign_on(c - best, u0, u1)
    return best


class ChamberEngine:
    def __init__(self, model: SurfaceModel, base: DivisorClass, f: DivisorClass):
        if f.parametric:
            raise UnsupportedInputError("the subtracted class must not depend on u")
        self.model = model
        self.d = tuple(a - Aff(0, 0, c) for a, c in zip(base.affine(), f.coeffs))
        self.f = f
        self.n = len(model.curves)
        yf = model.numerical(f.coeffs)
        if not any(yf):
            raise KStabError("F is numerically trivial")
        aff_num = [
            aff_sum(a.scale(model.gram[i][j]) for j, a in enumerate(base.affine()) if model.gram[i][j])
            for i in model._basis_rows
        ]
        self.thresholds: List[Aff] = []
        for h in model.effective_facets:
            hf = sum(a * b for a, b in zip(h, yf))
            hl = aff_sum(y.scale(c) for y, c in zip(aff_num, h) if c)
            if hf > 0:
                self.thresholds.append(hl.scale(1 / hf))
        if not self.thresholds:
            raise KStabError("L - tF stays pseudo-effective for every t > 0")
        self.base_facets = []
        for h in model.effective_facets:
            self.base_facets.append(aff_sum(y.scale(c) for y, c in zip(aff_num, h) if c))

    def run(self, u0: Fraction, u1: Fraction) -> List[Chamber]:
        out: List[Chamber] = []
        stack = [(frac(u0), frac(u1))]
        while stack:
            a, b = stack.pop()
            try:
                out.extend(self._walk(a, b))
            except _Split as s:
                stack.append((s.at, b))
                stack.append((a, s.at))
        out.sort(key=lambda c: (c.u_lo, c.v_lo((c.u_lo + c.u_hi) / 2)))
        return out

    def _walk(self, u0: Fraction, u1: Fraction) -> List[Chamber]:
        for g in self.base_facets:
            if _sign_on(g, u0, u1) < 0:
                raise KStabError("starting class is not pseudo-effective on the u-range")
        t = _min_of(self.thresholds, u0, u1)
        if _sign_on(t, u0, u1) < 0:
            raise KStabError("negative pseudo-effective threshold")
        cells: List[Chamber] = []
        v_lo = Aff()
        g = self.model.gram
        while True:
            gap = t - v_lo
            if _sign_on(gap, u0, u1) <= 0:
                break
            support, neg, pos = self._germ_decomposition(v_lo, u0, u1)
            cands = [t]
            for a in neg:
                if a.cv != 0:
                    cands.append(Aff(-a.c / a.cv, -a.cu / a.cv))
            dots = [aff_sum(p.scale(g[i][j]) for j, p in enumerate(pos) if g[i][j]) for i in range(self.n)]
            for i in range(self.n):
                if i in support:
                    continue
                dc = dots[i]
                if dc.cv != 0:
                    cands.append(Aff(-dc.c / dc.cv, -dc.cu / dc.cv))
            ahead = [c for c in cands if _sign_on(c - v_lo, u0, u1) > 0]
            v_hi = _min_of(ahead, u0, u1)
            vol = Poly2()
            for i in range(self.n):
                if pos[i].is_zero():
                    continue
                vol = vol + pos[i].poly() * dots[i].poly()
            cells.append(
                Chamber(
                    u0, u1, v_lo, v_hi,
                    tuple(self.model.curves[i] for i in support),
                    tuple(neg), tuple(pos), vol,
                )
            )
            v_lo = v_hi
        return cells

    def _germ_decomposition(self, v_lo: Aff, u0, u1):
        g = self.model.gram
        support: List[int] = []
        while True:
            if support:
                m = [[g[i][j] for j in support] for i in support]
                try:
                    inv = inverse_rational(m)
                except Exception:
                    raise KStabError("negative-part curves have a singular intersection matrix") from None
                rhs = [aff_sum(a.scale(g[i][j]) for j, a in enumerate(self.d) if g[i][j]) for i in support]
                neg = [aff_sum(r.scale(inv[k][c]) for c, r in enumerate(rhs) if inv[k][c]) for k in range(len(support))]
            else:
                neg = []
            pos = list(self.d)
            for i, a in zip(support, neg):
                pos[i] = pos[i] - a
            new = []
            for i in range(self.n):
                if i in support:
                    continue
                dc = aff_sum(p.scale(g[i][j]) for j, p in enumerate(pos) if g[i][j])
                if _germ_sign(dc, v_lo, u0, u1) < 0:
                    new.append(i)
            if not new:
                order = sorted(range(len(support)), key=lambda k: support[k])
                return [support[k] for k in order], [neg[k] for k in order], pos
            support.extend(new)


def chambers(
    model: SurfaceModel, base: ClassLike, f: ClassLike, u_range: Tuple = (0, 1)
) -> List[Chamber]:
    """Chamber decomposition of {(u, v): u in u_range, 0 <= v <= threshold(u)} for base(u) - vF."""
    base = model.as_class(base)
    f = model.as_class(f)
    return ChamberEngine(model, base, f).run(frac(u_range[0]), frac(u_range[1]))


def volume_fn(model: SurfaceModel, l: ClassLike, f: ClassLike) -> PiecewisePolynomial:
    """vol(L - tF) for t from 0 to the pseudo-effective threshold."""
    l = model.as_class(l)
    if l.parametric:
        raise UnsupportedInputError("L must not depend on u")
    cells = chambers(model, l, f, (0, 1))
    bps = [cells[0].v_lo.c] + [c.v_hi.c for c in cells]
    pieces = [tuple(c.volume.univariate("v")) for c in cells]
    return PiecewisePolynomial(tuple(bps), tuple(pieces))


def s_invariant(model: SurfaceModel, l: ClassLike, f: ClassLike) -> Fraction:
    """(1/vol L) ∫ vol(L - tF) dt; vol L = L² when L is nef."""
    vol_fn = volume_fn(model, l, f)
    return vol_fn.integral() / vol_fn(0)


# ---------------------------------------------------------------- valuations and walls


@dataclass(frozen=True)
class ValuationSpec:
    A: Fraction
    ord_delta: Optional[Fraction]
    S: Fraction
    name: str = ""

    @property
    def beta0(self) -> Fraction:
        return self.A - self.S

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "A": fstr(self.A),
            "ord": None if self.ord_delta is None else fstr(self.ord_delta),
            "S": fstr(self.S),
        }


def quasimonomial_combine(parts: Iterable[Sequence], ord_delta=None, name: str = "") -> ValuationSpec:
    """parts: (weight, A_i, beta_i).  A and beta combine linearly; S = A - beta."""
    a = b = F0
    parts = list(parts)
    if not parts:
        raise KStabError("no parts to combine")
    for w, ai, bi in parts:
        w = frac(w)
        if w <= 0:
            raise KStabError("weights must be positive")
        a += w * frac(ai)
        b += w * frac(bi)
    return ValuationSpec(a, None if ord_delta is None else frac(ord_delta), a - b, name)


def beta(c, coeff_slope, v: ValuationSpec) -> Fraction:
    """A - c·v(Delta) - (1 - slope·c)·S for a boundary Delta ~ -slope·K."""
    c = frac(c)
    if c < 0:
        raise KStabError("coefficient must be non-negative")
    ordv = F0 if v.ord_delta is None else v.ord_delta
    if c and v.ord_delta is None:
        raise KStabError("valuation of the boundary is required when c > 0")
    return v.A - c * ordv - (1 - frac(coeff_slope) * c) * v.S


def wall_solve(v: ValuationSpec, coeff_slope) -> Fraction:
    if v.ord_delta is None:
        raise KStabError("valuation of the boundary is required")
    den = v.ord_delta - frac(coeff_slope) * v.S
    if den == 0:
        raise NoWallError(f"no wall for {v.name or 'valuation'}: beta does not depend on c")
    return (v.A - v.S) / den


@dataclass(frozen=True)
class Wall:
    c: Fraction
    sources: Tuple[ValuationSpec, ...]

    def to_json(self) -> dict:
        return {"c": fstr(self.c), "valuations": [s.to_json() for s in self.sources]}


def walls(specs: Sequence[ValuationSpec], coeff_slope, lo=0, hi=None, include_lo: bool = False) -> List[Wall]:
    """Distinct walls c in (lo, hi] (or [lo, hi] with include_lo), sorted."""
    if not specs:
        raise KStabError("no valuation data given")
    lo = frac(lo)
    hi = None if hi is None else frac(hi)
    found: Dict[Fraction, List[ValuationSpec]] = {}
    for v in specs:
        try:
            c = wall_solve(v, coeff_slope)
        except NoWallError:
            continue
        if c < lo or (c == lo and not include_lo) or (hi is not None and c > hi):
            continue
        found.setdefault(c, []).append(v)
    return [Wall(c, tuple(found[c])) for c in sorted(found)]


def valuation_from_json(model: Optional[SurfaceModel], obj: Mapping, antik: Optional[ClassLike] = None) -> ValuationSpec:
    """Explicit {A, ord, S}; or {divisor, A?, ord} with S computed; or {combine: [{weight, divisor, A?}], ord}."""
    name = str(obj.get("name", ""))
    ordv = obj.get("ord")
    ordv = None if ordv is None else frac(ordv)
    if "combine" in obj:
        parts = []
        for p in obj["combine"]:
            sub = valuation_from_json(model, {k: v for k, v in p.items() if k != "weight"}, antik)
            parts.append((p.get("weight", 1), sub.A, sub.beta0))
        return quasimonomial_combine(parts, ordv, name)
    a = frac(obj.get("A", 1))
    if "S" in obj:
        return ValuationSpec(a, ordv, frac(obj["S"]), name)
    if "divisor" in obj:
        if model is None:
            raise KStabError("a surface model is needed to compute S")
        l = model.antik if antik is None else antik
        return ValuationSpec(a, ordv, s_invariant(model, l, obj["divisor"]), name or str(obj["divisor"]))
    raise KStabError("valuation needs S, divisor or combine")


# ---------------------------------------------------------------- local bounds


def local_volume_bound(c) -> int:
    """Largest |G| allowed by 4/|G| >= (16/9)(1-4c)^2 at a quotient point of a degree-4 pair."""
    c = frac(c)
    if c < 0 or c >= Fraction(1, 4):
        raise KStabError("c must lie in [0, 1/4)")
    return math.floor(Fraction(9) / (4 * (1 - 4 * c) ** 2))


def dp_plurianticanonical_dim(d: int, m: int) -> int:
    """h^0(-mK) on a del Pezzo surface of degree d, by Riemann-Roch."""
    if d < 1 or m < 0:
        raise KStabError("need d >= 1 and m >= 0")
    return 1 + m * (m + 1) * d // 2


# ---------------------------------------------------------------- flags in 3-folds


@dataclass(frozen=True)
class FlagConfig:
    basis: Tuple[str, ...]
    tensor: Mapping[Tuple[int, int, int], Fraction]
    L: Vector
    divisor: str
    N: Tuple[Tuple[Fraction, Fraction], ...]
    u_max: Fraction
    surface: SurfaceModel
    restriction: Tuple[Vector, ...]
    flag_curve: str
    point: Optional[Mapping[str, Fraction]] = None
    log_discrepancy: Fraction = F1

    def __post_init__(self):
        n = len(self.basis)
        if len(self.L) != n or len(self.N) != n or len(self.restriction) != n:
            raise KStabError("L, N and restriction must cover the divisor basis")
        if self.divisor not in self.basis:
            raise KStabError(f"unknown divisor {self.divisor!r}")
        self.surface.index(self.flag_curve)
        if self.point is not None:
            for k in self.point:
                self.surface.index(k)
        if self.cube(tuple(Aff(x) for x in self.L))(0) <= 0:
            raise KStabError("L^3 must be positive")
        if self.u_max <= 0:
            raise KStabError("u range must be non-empty")

    def t(self, i, j, k) -> Fraction:
        return self.tensor.get(tuple(sorted((i, j, k))), F0)

    def cube(self, p: Sequence[Aff]) -> Poly2:
        n = len(self.basis)
        polys = [a.poly() for a in p]
        out = Poly2()
        for i, j, k in itertools.combinations_with_replacement(range(n), 3):
            val = self.t(i, j, k)
            if not val:
                continue
            mult = (1, 3, 6)[len({i, j, k}) - 1]
            out = out + (polys[i] * polys[j] * polys[k]).scale(val * mult)
        return out

    def square_dot(self, p: Sequence[Aff], idx: int) -> Poly2:
        n = len(self.basis)
        polys = [a.poly() for a in p]
        out = Poly2()
        for i in range(n):
            for j in range(n):
                val = self.t(i, j, idx)
                if val:
                    out = out + (polys[i] * polys[j]).scale(val)
        return out

    def p_of_u(self) -> Tuple[Aff, ...]:
        b = self.basis.index(self.divisor)
        return tuple(
            Aff(l - n0, -(1 if i == b else 0) - n1) for i, (l, (n0, n1)) in enumerate(zip(self.L, self.N))
        )

    def restrict(self, vec: Sequence[Aff]) -> DivisorClass:
        m = len(self.surface.curves)
        c0 = [F0] * m
        c1 = [F0] * m
        for a, r in zip(vec, self.restriction):
            for j in range(m):
                if r[j]:
                    c0[j] += a.c * r[j]
                    c1[j] += a.cu * r[j]
        return DivisorClass(tuple(c0), tuple(c1))

    @classmethod
    def from_json(cls, obj) -> "FlagConfig":
        try:
            basis = tuple(obj["basis"])
            surface = SurfaceModel.from_json(obj["surface"])
            idx = {b: i for i, b in enumerate(basis)}

            def bvec(d):
                out = [F0] * len(basis)
                for k, v in d.items():
                    if k not in idx:
                        raise KStabError(f"unknown basis divisor {k!r}")
                    out[idx[k]] += frac(v)
                return tuple(out)

            tensor: Dict[Tuple[int, int, int], Fraction] = {}
            for entry in obj["tensor"]:
                if len(entry) != 4:
                    raise KStabError("tensor entries are [D1, D2, D3, value]")
                key = tuple(sorted(idx[x] if x in idx else _bad_basis(x) for x in entry[:3]))
                val = frac(entry[3])
                if key in tensor and tensor[key] != val:
                    raise KStabError(f"conflicting tensor entries for {entry[:3]}")
                tensor[key] = val
            n_raw = obj.get("N", {})
            nvec = [(F0, F0)] * len(basis)
            for k, coeffs in n_raw.items():
                if k not in idx:
                    _bad_basis(k)
                coeffs = [frac(c) for c in (coeffs if isinstance(coeffs, list) else [coeffs])]
                if any(coeffs[2:]):
                    raise UnsupportedInputError(f"N({k}) must be affine in u")
                coeffs = (coeffs + [F0, F0])[:2]
                nvec[idx[k]] = (coeffs[0], coeffs[1])
            restriction = []
            for b in basis:
                r = obj["restriction"].get(b, {})
                restriction.append(surface.as_class(r).coeffs)
            point = obj.get("point")
            if point is not None:
                point = {k: frac(v) for k, v in point.items()}
            return cls(
                basis=basis,
                tensor=tensor,
                L=bvec(obj["L"]),
                divisor=obj["divisor"],
                N=tuple(nvec),
                u_max=frac(obj.get("u_max", 1)),
                surface=surface,
                restriction=tuple(restriction),
                flag_curve=obj["flag_curve"],
                point=point,
                log_discrepancy=frac(obj.get("log_discrepancy", 1)),
            )
        except KeyError as exc:
            raise KStabError(f"malformed flag configuration: missing field {exc}") from None


def _bad_basis(x):
    raise KStabError(f"unknown basis divisor {x!r}")


def flag_volume_2d(cfg: FlagConfig) -> List[Chamber]:
    """Cells of vol(P(u)|_B - vC) over u in [0, u_max], v in [0, t(u)]."""
    base = cfg.restrict(cfg.p_of_u())
    f = cfg.surface.unit(cfg.flag_curve)
    return ChamberEngine(cfg.surface, base, DivisorClass(f)).run(F0, cfg.u_max)


@dataclass(frozen=True)
class FlagResult:
    volume: Tuple[Fraction, ...]
    L_cubed: Fraction
    S_divisor: Fraction
    beta_divisor: Fraction
    S_curve: Fraction
    F_point: Optional[Fraction]
    S_point: Optional[Fraction]
    delta_lower_bound: Fraction
    cells: Tuple[Chamber, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        o = lambda x: None if x is None else fstr(x)  # noqa: E731
        return {
            "volume": [fstr(c) for c in self.volume],
            "L_cubed": fstr(self.L_cubed),
            "S_divisor": fstr(self.S_divisor),
            "beta_divisor": fstr(self.beta_divisor),
            "S_curve": fstr(self.S_curve),
            "F_point": o(self.F_point),
            "S_point": o(self.S_point),
            "delta_lower_bound": fstr(self.delta_lower_bound),
        }


def flag_refine(cfg: FlagConfig) -> FlagResult:
    p = cfg.p_of_u()
    vol3 = cfg.cube(p)
    l3 = cfg.cube(tuple(Aff(x) for x in cfg.L))(0)
    s_b = vol3.integrate_u(0, cfg.u_max) / l3
    beta_b = cfg.log_discrepancy - s_b

    surf = cfg.surface
    cells = flag_volume_2d(cfg)
    ci = surf.index(cfg.flag_curve)
    for c in cells:
        if cfg.flag_curve in c.support:
            raise KStabError("flag curve lies in the negative part; refinement formula does not apply")

    # contribution of the flag curve sitting inside N(u)|_B
    n_restricted = cfg.restrict(tuple(Aff(n0, n1) for n0, n1 in cfg.N)).affine()
    ord_c = n_restricted[ci]
    s_curve = F0
    if not ord_c.is_zero():
        b = cfg.basis.index(cfg.divisor)
        s_curve += (cfg.square_dot(p, b) * ord_c.poly()).integrate_u(0, cfg.u_max)
    s_curve += sum((c.integrate(c.volume) for c in cells), F0)
    s_curve *= Fraction(3) / l3

    f_x = s_x = None
    if cfg.point is not None:
        sq = F0
        fx = F0
        for c in cells:
            pc = c.intersection_with(surf, cfg.flag_curve)
            sq += c.integrate(pc * pc)
            ordx = Aff()
            for name, a in zip(c.support, c.negative):
                ordx = ordx + a.scale(_mult(cfg, name))
            for j, a in enumerate(n_restricted):
                if j != ci and not a.is_zero():
                    ordx = ordx + a.scale(_mult(cfg, surf.curves[j]))
            if not ordx.is_zero():
                fx += c.integrate(pc * ordx.poly())
        f_x = Fraction(6) / l3 * fx
        s_x = Fraction(3) / l3 * sq + f_x
    cands = [1 / s_curve, cfg.log_discrepancy / s_b]
    if s_x is not None:
        cands.append(1 / s_x)
    return FlagResult(
        volume=tuple(vol3.univariate("u")),
        L_cubed=l3,
        S_divisor=s_b,
        beta_divisor=beta_b,
        S_curve=s_curve,
        F_point=f_x,
        S_point=s_x,
        delta_lower_bound=min(cands),
        cells=tuple(cells),
    )


def _mult(cfg: FlagConfig, name: str) -> Fraction:
    if name not in cfg.point:
        raise IncidenceError(f"no local multiplicity at the point given for curve {name}")
    return cfg.point[name]
