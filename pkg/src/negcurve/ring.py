"""Exact arithmetic in a truncated two-chart overlap ring.

The total space of O(-k) over P^1 carries two affine charts, (z, u) and
(xi, v) = (z^-1, z^k u).  Functions on the overlap of the order-(m-1)
neighborhood of the zero section are finitely supported sums

    sum  c_{l,i} * z^l * u^i,      0 <= i <= m-1,  u^m = 0,

with exact rational coefficients.  A monomial z^l u^i is regular on the
first chart iff l >= 0 and on the second chart iff l <= k*i (because
z^l u^i = xi^(k*i - l) v^i).  Everything in this module is immutable and
pure; all arithmetic is exact over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping


class ConsistencyError(RuntimeError):
    """An internal exact identity failed; signals an implementation defect."""


@dataclass(frozen=True)
class RingParams:
    """Chart data: self-intersection -k and truncation modulus u^m = 0."""

    k: int
    m: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError("k must be a positive integer")
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError("m must be a positive integer")


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise ValueError(f"coefficient must be an exact rational, got {type(c).__name__}")


class RingElem:
    """A finitely supported exact-rational combination of monomials z^l u^i.

    Terms are stored as a mapping (l, i) -> Fraction with every stored
    coefficient nonzero and 0 <= i <= m-1.  Instances are immutable by
    convention: no method mutates ``terms`` after construction.
    """

    __slots__ = ("params", "terms")

    def __init__(self, params: RingParams, terms: Mapping[tuple[int, int], object]):
        clean: dict[tuple[int, int], Fraction] = {}
        m = params.m
        for (l, i), c in terms.items():
            if not isinstance(l, int) or not isinstance(i, int):
                raise ValueError("term exponents must be integers")
            if i < 0 or i >= m:
                raise ValueError(f"u-exponent {i} outside [0, {m - 1}]")
            c = _as_fraction(c)
            if c != 0:
                clean[(l, i)] = c
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, params: RingParams, terms: dict) -> "RingElem":
        # Trusted fast path: terms already clean (nonzero Fractions, valid i).
        self = object.__new__(cls)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "terms", terms)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, params: RingParams) -> "RingElem":
        return cls._raw(params, {})

    @classmethod
    def one(cls, params: RingParams) -> "RingElem":
        return cls._raw(params, {(0, 0): Fraction(1)})

    @classmethod
    def monomial(cls, params: RingParams, l: int, i: int, coeff=1) -> "RingElem":
        return cls(params, {(l, i): coeff})

    @classmethod
    def constant(cls, params: RingParams, coeff) -> "RingElem":
        return cls(params, {(0, 0): coeff})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, l: int, i: int) -> Fraction:
        return self.terms.get((l, i), Fraction(0))

    def canonical_terms(self) -> list[tuple[int, int, Fraction]]:
        """Terms as (l, i, coeff) sorted by (i, l); the serialization order."""
        return [(l, i, c) for (l, i), c in sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0]))]

    def layer(self, i: int) -> dict[int, Fraction]:
        """The coefficients of u^i as a map l -> coeff."""
        return {l: c for (l, ii), c in self.terms.items() if ii == i}

    def u_order(self) -> int:
        """Least u-exponent of a nonzero term; params.m if zero."""
        if not self.terms:
            return self.params.m
        return min(i for (_, i) in self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, RingElem)
            and self.params == other.params
            and self.terms == other.terms
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for l, i, c in self.canonical_terms():
                mono = "*".join(
                    ([] if l == 0 else [f"z^{l}" if l != 1 else "z"])
                    + ([] if i == 0 else [f"u^{i}" if i != 1 else "u"])
                )
                parts.append(f"{c}" + (f"*{mono}" if mono else ""))
            body = " + ".join(parts)
        return f"<{body} | k={self.params.k}, m={self.params.m}>"

    # -- ring operations ---------------------------------------------------

    def _check_same(self, other: "RingElem"):
        if self.params != other.params:
            raise ValueError("mismatched ring parameters")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check_same(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key)
            if s is None:
                out[key] = c
            else:
                s = s + c
                if s:
                    out[key] = s
                else:
                    del out[key]
        return RingElem._raw(self.params, out)

    def __neg__(self) -> "RingElem":
        return RingElem._raw(self.params, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "RingElem") -> "RingElem":
        return self + (-other)

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check_same(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        if not a:
            return RingElem._raw(self.params, {})
        if len(a) == 1:
            ((l0, i0), c0), = a.items()
            return RingElem._raw(self.params, _shifted(b, l0, i0, c0, self.params.m))
        m = self.params.m
        acc: dict[tuple[int, int], Fraction] = {}
        for (l1, i1), c1 in a.items():
            for (l2, i2), c2 in b.items():
                i = i1 + i2
                if i >= m:
                    continue
                key = (l1 + l2, i)
                s = acc.get(key)
                acc[key] = c1 * c2 if s is None else s + c1 * c2
        return RingElem._raw(self.params, {key: c for key, c in acc.items() if c})

    def scale(self, coeff) -> "RingElem":
        c0 = _as_fraction(coeff)
        if not c0:
            return RingElem._raw(self.params, {})
        return RingElem._raw(self.params, {key: c0 * c for key, c in self.terms.items()})

    def shift(self, dl: int, di: int = 0) -> "RingElem":
        """Multiply by the monomial z^dl u^di."""
        return RingElem._raw(self.params, _shifted(self.terms, dl, di, Fraction(1), self.params.m))

    # -- support projections -----------------------------------------------

    def select(self, pred: Callable[[int, int], bool]) -> "RingElem":
        """The partial sum over monomials with pred(l, i) true."""
        return RingElem._raw(self.params, {(l, i): c for (l, i), c in self.terms.items() if pred(l, i)})

    def u_regular_part(self) -> "RingElem":
        return self.select(lambda l, i: l >= 0)

    def v_regular_part(self) -> "RingElem":
        k = self.params.k
        return self.select(lambda l, i: l <= k * i)

    def is_u_regular(self) -> bool:
        return all(l >= 0 for (l, _) in self.terms)

    def is_v_regular(self) -> bool:
        k = self.params.k
        return all(l <= k * i for (l, i) in self.terms)

    def ell_layer(self) -> "RingElem":
        """The i = 0 layer, i.e. the restriction to the zero section."""
        return self.select(lambda l, i: i == 0)


def _shifted(terms: Mapping, dl: int, di: int, c0: Fraction, m: int) -> dict:
    if di == 0 and c0 == 1:
        if dl == 0:
            return dict(terms)
        return {(l + dl, i): c for (l, i), c in terms.items()}
    out = {}
    for (l, i), c in terms.items():
        i2 = i + di
        if i2 < m:
            out[(l + dl, i2)] = c0 * c
    return out


# -- named operations -------------------------------------------------------


def invert_unit(x: RingElem) -> RingElem:
    """Invert an element whose i = 0 layer is a nonzero constant.

    Writes x = c0*(1 - r) with r divisible by u, so r^m = 0 and
    x^-1 = c0^-1 * sum_{t < m} r^t exactly.
    """
    lay0 = x.layer(0)
    if set(lay0) != {0} or not lay0[0]:
        raise ValueError("not an ell-constant unit")
    c0 = lay0[0]
    params = x.params
    one = RingElem.one(params)
    r = one - x.scale(1 / c0)
    acc = one
    pw = one
    for _ in range(1, params.m):
        pw = pw * r
        if pw.is_zero():
            break
        acc = acc + pw
    return acc.scale(1 / c0)


@dataclass(frozen=True)
class SectorSplit:
    """Three-way split of a function vanishing on the zero section.

    succ holds the monomials with l >= j (z^-j times them is regular on
    the first chart), prec those with l + j <= k*i (z^j times them is
    regular on the second chart), and good the band k*i-j+1 <= l <= j-1.
    Monomials eligible for both succ and prec are assigned to succ.
    """

    succ: RingElem
    good: RingElem
    prec: RingElem


def sector_split(x: RingElem, j: int) -> SectorSplit:
    if j < 1:
        raise ValueError("j must be a positive integer")
    k = x.params.k
    succ: dict = {}
    good: dict = {}
    prec: dict = {}
    for (l, i), c in x.terms.items():
        if i == 0:
            raise ValueError("does not vanish on ell")
        if l >= j:
            succ[(l, i)] = c
        elif l + j <= k * i:
            prec[(l, i)] = c
        else:
            good[(l, i)] = c
    raw = RingElem._raw
    return SectorSplit(raw(x.params, succ), raw(x.params, good), raw(x.params, prec))


def plus_parts(x: RingElem, j: int) -> tuple[RingElem, RingElem, RingElem]:
    """Split off the part of x that is not regular on the second chart.

    Returns (x_plus, x_plus_high, x_plus_low): x_plus collects the
    monomials with l > k*i, x_plus_high those of them with l >= 2j, and
    x_plus_low the rest of x_plus.
    """
    if j < 1:
        raise ValueError("j must be a positive integer")
    k = x.params.k
    plus: dict = {}
    high: dict = {}
    low: dict = {}
    for (l, i), c in x.terms.items():
        if l > k * i:
            plus[(l, i)] = c
            if l >= 2 * j:
                high[(l, i)] = c
            else:
                low[(l, i)] = c
    raw = RingElem._raw
    return raw(x.params, plus), raw(x.params, high), raw(x.params, low)


def plus_part(x: RingElem) -> RingElem:
    """The monomials of x with l > k*i (not regular on the second chart)."""
    k = x.params.k
    return x.select(lambda l, i: l > k * i)


def truncate(x: RingElem, m_new: int) -> RingElem:
    """Project to the coarser truncation u^m_new = 0; a ring homomorphism."""
    if m_new < 1:
        raise ValueError("m must be a positive integer")
    if m_new > x.params.m:
        raise ValueError("cannot refine truncation")
    params = RingParams(x.params.k, m_new)
    return RingElem._raw(params, {(l, i): c for (l, i), c in x.terms.items() if i < m_new})


# -- serialization ----------------------------------------------------------


def elem_to_dict(x: RingElem) -> dict:
    return {
        "k": x.params.k,
        "m": x.params.m,
        "terms": [
            {"l": l, "i": i, "num": c.numerator, "den": c.denominator}
            for l, i, c in x.canonical_terms()
        ],
    }


def elem_from_dict(data: dict) -> RingElem:
    extra = set(data) - {"k", "m", "terms"}
    if extra:
        raise ValueError(f"unknown fields: {sorted(extra)}")
    try:
        params = RingParams(data["k"], data["m"])
        terms = {}
        for t in data["terms"]:
            t_extra = set(t) - {"l", "i", "num", "den"}
            if t_extra:
                raise ValueError(f"unknown fields: {sorted(t_extra)}")
            if not isinstance(t["num"], int) or not isinstance(t["den"], int):
                raise ValueError("coefficients must be exact integers num/den")
            key = (t["l"], t["i"])
            if key in terms:
                raise ValueError(f"duplicate term {key}")
            terms[key] = Fraction(t["num"], t["den"])
    except KeyError as exc:
        raise ValueError(f"missing field {exc}") from exc
    return RingElem(params, terms)
