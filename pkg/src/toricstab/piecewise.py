"""Exact polynomials used by the chamber engine.

Aff: a + b·u + c·v.  Poly2: sparse bivariate polynomial {(i, j): coeff of u^i v^j}.
PiecewisePolynomial: univariate, breakpoints plus per-interval coefficient lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

F0 = Fraction(0)


@dataclass(frozen=True)
class Aff:
    c: Fraction = F0
    cu: Fraction = F0
    cv: Fraction = F0

    @staticmethod
    def const(x) -> "Aff":
        return Aff(Fraction(x))

    def __add__(self, o: "Aff") -> "Aff":
        return Aff(self.c + o.c, self.cu + o.cu, self.cv + o.cv)

    def __sub__(self, o: "Aff") -> "Aff":
        return Aff(self.c - o.c, self.cu - o.cu, self.cv - o.cv)

    def __neg__(self) -> "Aff":
        return Aff(-self.c, -self.cu, -self.cv)

    def scale(self, k) -> "Aff":
        return Aff(self.c * k, self.cu * k, self.cv * k)

    def __call__(self, u=0, v=0) -> Fraction:
        return self.c + self.cu * u + self.cv * v

    def at_v(self, g: "Aff") -> "Aff":
        """Substitute v = g(u) (g must not depend on v)."""
        return Aff(self.c + self.cv * g.c, self.cu + self.cv * g.cu)

    def is_zero(self) -> bool:
        return self.c == 0 and self.cu == 0 and self.cv == 0

    def poly(self) -> "Poly2":
        return Poly2({(0, 0): self.c, (1, 0): self.cu, (0, 1): self.cv})

    def __str__(self) -> str:
        return _fmt_poly({(0, 0): self.c, (1, 0): self.cu, (0, 1): self.cv})


def aff_sum(terms) -> Aff:
    out = Aff()
    for t in terms:
        out = out + t
    return out


class Poly2:
    __slots__ = ("t",)

    def __init__(self, terms: Dict[Tuple[int, int], Fraction] | None = None):
        self.t = {k: Fraction(c) for k, c in (terms or {}).items() if c != 0}

    def __add__(self, o: "Poly2") -> "Poly2":
        out = dict(self.t)
        for k, c in o.t.items():
            out[k] = out.get(k, F0) + c
        return Poly2(out)

    def __sub__(self, o: "Poly2") -> "Poly2":
        return self + o.scale(-1)

    def scale(self, k) -> "Poly2":
        return Poly2({e: c * k for e, c in self.t.items()})

    def __mul__(self, o: "Poly2") -> "Poly2":
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self.t.items():
            for (i2, j2), c2 in o.t.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, F0) + c1 * c2
        return Poly2(out)

    def __eq__(self, o) -> bool:
        return isinstance(o, Poly2) and self.t == o.t

    def __hash__(self):
        return hash(tuple(sorted(self.t.items())))

    def __call__(self, u=0, v=0) -> Fraction:
        return sum((c * Fraction(u) ** i * Fraction(v) ** j for (i, j), c in self.t.items()), F0)

    def pow(self, n: int) -> "Poly2":
        out = Poly2({(0, 0): 1})
        for _ in range(n):
            out = out * self
        return out

    def subs_v(self, g: Aff) -> "Poly2":
        """Substitute v = g(u)."""
        gp = Poly2({(0, 0): g.c, (1, 0): g.cu})
        out = Poly2()
        cache = {0: Poly2({(0, 0): 1})}
        for (i, j), c in self.t.items():
            if j not in cache:
                cache[j] = gp.pow(j)
            out = out + (cache[j] * Poly2({(i, 0): c}))
        return out

    def antiderivative_v(self) -> "Poly2":
        return Poly2({(i, j + 1): c / (j + 1) for (i, j), c in self.t.items()})

    def integrate_v(self, lo: Aff, hi: Aff) -> "Poly2":
        a = self.antiderivative_v()
        return a.subs_v(hi) - a.subs_v(lo)

    def integrate_u(self, lo, hi) -> Fraction:
        lo, hi = Fraction(lo), Fraction(hi)
        s = F0
        for (i, j), c in self.t.items():
            if j:
                raise ValueError("integrate_u needs a polynomial in u only")
            s += c * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1)
        return s

    def univariate(self, var: str = "v") -> List[Fraction]:
        """Coefficient list (ascending) when the polynomial depends on one variable."""
        idx = 1 if var == "v" else 0
        deg = max((k[idx] for k in self.t), default=0)
        out = [F0] * (deg + 1)
        for k, c in self.t.items():
            if k[1 - idx]:
                raise ValueError(f"polynomial depends on more than {var}")
            out[k[idx]] += c
        return out

    def __str__(self) -> str:
        return _fmt_poly(self.t)

    def __repr__(self) -> str:
        return f"Poly2({self})"


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_poly(t) -> str:
    parts = []
    for (i, j), c in sorted(t.items()):
        if c == 0:
            continue
        mono = "*".join(
            x for x in ((("u" if i == 1 else f"u^{i}") if i else ""), (("v" if j == 1 else f"v^{j}") if j else "")) if x
        )
        if not mono:
            parts.append(_fmt_frac(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{_fmt_frac(c)}*{mono}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


@dataclass(frozen=True)
class PiecewisePolynomial:
    """pieces[i] are ascending coefficients valid on [breakpoints[i], breakpoints[i+1]]."""

    breakpoints: Tuple[Fraction, ...]
    pieces: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.pieces) != len(self.breakpoints) - 1:
            raise ValueError("need one piece per interval")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must increase")

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        if t < self.breakpoints[0] or t > self.breakpoints[-1]:
            return F0
        for i in range(len(self.pieces)):
            if t <= self.breakpoints[i + 1]:
                return _horner(self.pieces[i], t)
        return F0

    def integral(self) -> Fraction:
        s = F0
        for (a, b), p in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            s += sum(c * (b ** (k + 1) - a ** (k + 1)) / (k + 1) for k, c in enumerate(p))
        return s

    def is_continuous(self) -> bool:
        return all(
            _horner(self.pieces[i], self.breakpoints[i + 1]) == _horner(self.pieces[i + 1], self.breakpoints[i + 1])
            for i in range(len(self.pieces) - 1)
        )

    def degree(self) -> int:
        return max(len(_trim(p)) - 1 for p in self.pieces)

    def merged(self) -> "PiecewisePolynomial":
        """Drop breakpoints between identical pieces."""
        bps = [self.breakpoints[0]]
        pieces: List[Tuple[Fraction, ...]] = []
        for i, p in enumerate(self.pieces):
            p = _trim(p)
            if pieces and pieces[-1] == p:
                bps[-1] = self.breakpoints[i + 1]
            else:
                pieces.append(p)
                bps.append(self.breakpoints[i + 1])
        return PiecewisePolynomial(tuple(bps), tuple(pieces))

    def to_json(self) -> dict:
        return {
            "breakpoints": [_fmt_frac(b) for b in self.breakpoints],
            "pieces": [[_fmt_frac(c) for c in p] for p in self.pieces],
        }

    def describe(self, var: str = "t") -> List[str]:
        out = []
        for (a, b), p in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            poly = _fmt_poly({(0, k): c for k, c in enumerate(p)}).replace("v", var)
            out.append(f"[{_fmt_frac(a)}, {_fmt_frac(b)}]: {poly}")
        return out


def _trim(p: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _horner(p: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = F0
    for c in reversed(p):
        acc = acc * t + c
    return acc
