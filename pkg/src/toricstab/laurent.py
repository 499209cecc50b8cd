"""Sparse Laurent polynomials with rational coefficients."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

Exponent = Tuple[int, ...]


class LaurentError(ValueError):
    pass


class LaurentPolynomial:
    """Finite map exponent -> nonzero Fraction. Immutable by convention."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], object] | Iterable = ()):
        self.dim = dim
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Exponent, Fraction] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != dim:
                raise LaurentError(f"exponent {e} has wrong length for dimension {dim}")
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        self.terms: Dict[Exponent, Fraction] = {e: c for e, c in sorted(acc.items()) if c != 0}
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, dim: int, c=1) -> "LaurentPolynomial":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, exponent: Sequence[int], c=1) -> "LaurentPolynomial":
        return cls(len(exponent), {tuple(exponent): c})

    @classmethod
    def variables(cls, dim: int):
        return [cls.monomial(tuple(int(i == j) for j in range(dim))) for i in range(dim)]

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPolynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise LaurentError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPolynomial(self.dim, {tuple(k * x for x in e): Fraction(1) / c ** (-k)})
        result = LaurentPolynomial.constant(self.dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            if other.dim != self.dim:
                raise LaurentError("dimension mismatch")
            return other
        return LaurentPolynomial.constant(self.dim, other)

    def __eq__(self, other):
        if isinstance(other, LaurentPolynomial):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPolynomial.constant(self.dim, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, tuple(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # queries ---------------------------------------------------------------
    def exponents(self):
        return list(self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.dim, Fraction(0))

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def transform(self, w: Sequence[Sequence[int]]) -> "LaurentPolynomial":
        """Substitute exponents e -> e·W (row-vector convention)."""
        n = len(w[0])
        return LaurentPolynomial(
            n, {tuple(sum(e[i] * w[i][j] for i in range(self.dim)) for j in range(n)): c for e, c in self.terms.items()}
        )

    def shift(self, s: Sequence[int]) -> "LaurentPolynomial":
        return LaurentPolynomial(self.dim, {tuple(a + b for a, b in zip(e, s)): c for e, c in self.terms.items()})

    def sort_key(self):
        return tuple((e, c) for e, c in self.terms.items())

    # exact division --------------------------------------------------------
    def divide(self, other: "LaurentPolynomial") -> Optional["LaurentPolynomial"]:
        """Exact quotient in the Laurent ring, or None if other does not divide self."""
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        if not self:
            return LaurentPolynomial(self.dim, {})
        lo_f = [min(e[i] for e in self.terms) for i in range(self.dim)]
        lo_g = [min(e[i] for e in other.terms) for i in range(self.dim)]
        f = {tuple(a - b for a, b in zip(e, lo_f)): c for e, c in self.terms.items()}
        g = {tuple(a - b for a, b in zip(e, lo_g)): c for e, c in other.terms.items()}
        q = _poly_divide(f, g)
        if q is None:
            return None
        shift = [a - b for a, b in zip(lo_f, lo_g)]
        return LaurentPolynomial(self.dim, {tuple(a + b for a, b in zip(e, shift)): c for e, c in q.items()})

    # io -------------------------------------------------------------------
    def to_json(self) -> list:
        return [{"exponents": list(e), "coeff": _fs(c)} for e, c in self.terms.items()]

    @classmethod
    def from_json(cls, obj) -> "LaurentPolynomial":
        if isinstance(obj, dict):
            obj = obj.get("terms", obj.get("polynomial"))
        if not isinstance(obj, list) or not obj:
            raise LaurentError("expected a non-empty list of {exponents, coeff} terms")
        dim = len(obj[0]["exponents"])
        try:
            return cls(dim, [(t["exponents"], Fraction(str(t["coeff"]))) for t in obj])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise LaurentError(f"malformed term: {exc}") from None

    def __repr__(self):
        return f"LaurentPolynomial({self.dim}, {len(self.terms)} terms)"

    def to_text(self, names: str = "xyzw") -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                (names[i] if k == 1 else f"{names[i]}^{k}") for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(_fs(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{_fs(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    @classmethod
    def parse(cls, text: str, names: str = "xyz") -> "LaurentPolynomial":
        """Parse sums of terms like `3x^2y/z`, `8/(xz)`, `56z/y`, `-24`, `x*y^-1`."""
        dim = len(names)
        s = text.replace(" ", "").replace("−", "-")
        if not s:
            raise LaurentError("empty polynomial")
        terms = re.findall(r"[+-]?(?:\^-|[^+-])+", s)
        out: Dict[Exponent, Fraction] = {}
        for t in terms:
            sign = -1 if t.startswith("-") else 1
            t = t.lstrip("+-")
            rat = re.match(r"^(\d+)/(\d+)(?:\*(.*))?$", t)
            if rat:  # p/q or p/q*monomial, as printed by to_text
                e = [0] * dim
                _accumulate(rat.group(3) or "", names, e, +1)
                key = tuple(e)
                out[key] = out.get(key, Fraction(0)) + sign * Fraction(int(rat.group(1)), int(rat.group(2)))
                continue
            num, _, den = t.partition("/")
            den = den.strip("()")
            m = re.match(r"^(\d+)?\*?(.*)$", num)
            coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            e = [0] * dim
            _accumulate(m.group(2), names, e, +1)
            if den:
                dm = re.match(r"^(\d+)?\*?(.*)$", den)
                if dm.group(1):
                    coeff /= int(dm.group(1))
                _accumulate(dm.group(2), names, e, -1)
            key = tuple(e)
            out[key] = out.get(key, Fraction(0)) + sign * coeff
        return cls(dim, out)


def _accumulate(s: str, names: str, e, sign: int):
    for var, power in re.findall(r"([a-z])(?:\^(-?\d+))?\*?", s):
        if var not in names:
            raise LaurentError(f"unknown variable {var!r}")
        e[names.index(var)] += sign * (int(power) if power else 1)
    rest = re.sub(r"([a-z])(?:\^(-?\d+))?\*?", "", s)
    if rest not in ("", "1"):
        raise LaurentError(f"cannot parse {s!r}")


def _fs(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_divide(f: Dict[Exponent, Fraction], g: Dict[Exponent, Fraction]) -> Optional[Dict[Exponent, Fraction]]:
    """Exact division of honest polynomials under lex order; None if it leaves a remainder."""
    lead_g = max(g)
    cg = g[lead_g]
    rem = dict(f)
    q: Dict[Exponent, Fraction] = {}
    while rem:
        lead = max(rem)
        diff = tuple(a - b for a, b in zip(lead, lead_g))
        if any(x < 0 for x in diff):
            return None
        c = rem[lead] / cg
        q[diff] = c
        for e, cc in g.items():
            k = tuple(a + b for a, b in zip(e, diff))
            v = rem.get(k, Fraction(0)) - c * cc
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return q
