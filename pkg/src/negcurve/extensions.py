"""Extension classes of O(j) by O(-j) and their transition matrices.

A rank-2 bundle splitting as O(j) + O(-j) on the zero section is glued
by an upper-triangular transition matrix (z^j, p; 0, z^-j).  The class
p has a unique normal form supported on the band of monomials z^l u^i
with k*i - j + 1 <= l <= j - 1 and i >= 1; the band is finite and stops
growing once k*i exceeds 2j - 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ring import RingElem, RingParams, sector_split, truncate


@dataclass(frozen=True)
class ModuliParams:
    """Ring parameters together with the splitting type j >= 1."""

    ring: RingParams
    j: int

    def __post_init__(self):
        if not isinstance(self.j, int) or self.j < 1:
            raise ValueError("j must be a positive integer")

    @property
    def k(self) -> int:
        return self.ring.k

    @property
    def m(self) -> int:
        return self.ring.m

    def i_cap(self) -> int:
        """Largest u-order carrying band monomials, capped by truncation."""
        return min((2 * self.j - 2) // self.k, self.m - 1)

    def band_rows(self, i: int) -> range:
        """The z-exponent band at u-order i (may be empty)."""
        return range(self.k * i - self.j + 1, self.j)

    def in_band(self, l: int, i: int) -> bool:
        return self.k * i - self.j + 1 <= l <= self.j - 1

    def restricted(self, m_new: int) -> "ModuliParams":
        if m_new > self.m:
            raise ValueError("cannot refine truncation")
        return ModuliParams(RingParams(self.k, m_new), self.j)


def basis_W(params: ModuliParams) -> list[tuple[int, int]]:
    """The (i, l) index set of the normal-form band, in canonical order."""
    return [(i, l) for i in range(1, params.i_cap() + 1) for l in params.band_rows(i)]


def ext1_band(params: ModuliParams) -> list[tuple[int, int]]:
    """Band monomials of Ext^1(O(j), O(-j)) over all u-orders, including i = 0."""
    return [(i, l) for i in range(params.m) for l in params.band_rows(i)]


def class_is_zero(y: RingElem, params: ModuliParams) -> bool:
    """Whether y is a coboundary: no monomials inside the band."""
    return not any(params.in_band(l, i) for (l, i) in y.terms)


def banded_part(y: RingElem, params: ModuliParams) -> RingElem:
    return y.select(lambda l, i: params.in_band(l, i))


class ExtClass:
    """An extension class in normal form: support inside the band, i >= 1."""

    __slots__ = ("params", "p")

    def __init__(self, params: ModuliParams, p: RingElem):
        if p.params != params.ring:
            raise ValueError("mismatched ring parameters")
        for (l, i) in p.terms:
            if i == 0 or not params.in_band(l, i):
                raise ValueError(f"term z^{l} u^{i} is outside the normal-form band")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("ExtClass is immutable")

    @classmethod
    def zero(cls, params: ModuliParams) -> "ExtClass":
        return cls(params, RingElem.zero(params.ring))

    @classmethod
    def from_vector(cls, params: ModuliParams, coeffs) -> "ExtClass":
        """Build from a coefficient vector in basis_W order."""
        basis = basis_W(params)
        if len(coeffs) != len(basis):
            raise ValueError(f"expected {len(basis)} coefficients, got {len(coeffs)}")
        return cls(params, RingElem(params.ring, {(l, i): c for (i, l), c in zip(basis, coeffs)}))

    def to_vector(self) -> list[Fraction]:
        return [self.p.coeff(l, i) for (i, l) in basis_W(self.params)]

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def __eq__(self, other):
        return isinstance(other, ExtClass) and self.params == other.params and self.p == other.p

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return f"ExtClass(j={self.params.j}, p={self.p!r})"

    def to_dict(self) -> dict:
        return {
            "k": self.params.k,
            "m": self.params.m,
            "j": self.params.j,
            "terms": [
                {"i": i, "l": l, "num": c.numerator, "den": c.denominator}
                for l, i, c in self.p.canonical_terms()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExtClass":
        extra = set(data) - {"k", "m", "j", "terms"}
        if extra:
            raise ValueError(f"unknown fields: {sorted(extra)}")
        try:
            params = ModuliParams(RingParams(data["k"], data["m"]), data["j"])
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
        return cls(params, RingElem(params.ring, terms))


def reduce_cocycle(y: RingElem, params: ModuliParams) -> tuple[ExtClass, RingElem, RingElem]:
    """Normal form of an extension cocycle: y = p + z^j f_U + z^-j f_V.

    f_U is regular on the first chart, f_V on the second, and p lies in
    the band.  Fails if y has an i = 0 monomial with |l| < j, since such
    a class does not split on the zero section.
    """
    j = params.j
    lay0 = y.ell_layer()
    for (l, _) in lay0.terms:
        if -j < l < j:
            raise ValueError("class does not vanish on ell")
    rest = y - lay0
    split = sector_split(rest, j)
    f_u = (split.succ + lay0.select(lambda l, i: l >= j)).shift(-j)
    f_v = (split.prec + lay0.select(lambda l, i: l <= -j)).shift(j)
    return ExtClass(params, split.good), f_u, f_v


def restrict_level(p: ExtClass, m_new: int) -> ExtClass:
    """Truncate to the coarser level u^m_new = 0."""
    return ExtClass(p.params.restricted(m_new), truncate(p.p, m_new))


# -- 2x2 matrices over the overlap ring --------------------------------------


class Mat2:
    """A 2x2 matrix of overlap-ring elements."""

    __slots__ = ("a11", "a12", "a21", "a22")

    def __init__(self, a11: RingElem, a12: RingElem, a21: RingElem, a22: RingElem):
        self.a11, self.a12, self.a21, self.a22 = a11, a12, a21, a22

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def __eq__(self, other):
        return (
            isinstance(other, Mat2)
            and self.a11 == other.a11
            and self.a12 == other.a12
            and self.a21 == other.a21
            and self.a22 == other.a22
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def entries(self) -> tuple[RingElem, RingElem, RingElem, RingElem]:
        return (self.a11, self.a12, self.a21, self.a22)

    def det(self) -> RingElem:
        return self.a11 * self.a22 - self.a12 * self.a21

    def inverse(self) -> "Mat2":
        """Adjugate inverse; the determinant must be an ell-constant unit."""
        from .ring import invert_unit

        inv_det = invert_unit(self.det())
        return Mat2(
            self.a22 * inv_det,
            (-self.a12) * inv_det,
            (-self.a21) * inv_det,
            self.a11 * inv_det,
        )

    @classmethod
    def identity(cls, ring: RingParams) -> "Mat2":
        one = RingElem.one(ring)
        zero = RingElem.zero(ring)
        return cls(one, zero, zero, one)


@dataclass(frozen=True)
class TransitionMatrix:
    """The upper-triangular gluing matrix (z^j, p; 0, z^-j) of a bundle."""

    params: ModuliParams
    p: ExtClass

    def matrix(self) -> Mat2:
        ring = self.params.ring
        j = self.params.j
        return Mat2(
            RingElem.monomial(ring, j, 0),
            self.p.p,
            RingElem.zero(ring),
            RingElem.monomial(ring, -j, 0),
        )

    def matrix_inverse(self) -> Mat2:
        # The determinant is 1, so the inverse is (z^-j, -p; 0, z^j).
        ring = self.params.ring
        j = self.params.j
        return Mat2(
            RingElem.monomial(ring, -j, 0),
            -self.p.p,
            RingElem.zero(ring),
            RingElem.monomial(ring, j, 0),
        )
