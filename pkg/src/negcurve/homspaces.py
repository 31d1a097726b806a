"""Isomorphism decision and Hom/Ext dimensions for glued rank-2 bundles.

Two bundles with classes p and p' are isomorphic exactly when some
automorphism datum (a, d, c) with a(0,0)*d(0,0) != 0 kills the band
obstruction

    a*p - d*p' + (z^-j p' c)_V * p - (z^-j c p)_+ * p',

where (.)_V keeps the second-chart-regular monomials and (.)_+ the
rest.  The obstruction is linear in (a, d, c), so the decision is an
exact nullspace computation.  The same two differentials organize
Hom(E_p, E_p') by a two-step filtration, and an independent brute-force
solver for intertwining matrix pairs cross-checks every dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .extensions import (ExtClass, Mat2, ModuliParams, class_is_zero, ext1_band)
from .groupoid import CocyclePair, GroupElem, act
from .ring import ConsistencyError, RingElem, plus_part
from .sections import h0_basis, h0_dim, h1_dim


def _c_differential(c_mono: tuple[int, int], p: ExtClass, p_target: ExtClass,
                    j: int) -> RingElem:
    """The band contribution of a unit c-monomial: (z^-j c p)_+ p' - (z^-j c p')_V p."""
    l, i = c_mono
    g_plus = plus_part(p.p.shift(l - j, i))
    f_v = p_target.p.shift(l - j, i).v_regular_part()
    return g_plus * p_target.p - f_v * p.p


def obstruction(a_rep: RingElem, d_rep: RingElem, c_rep: RingElem,
                p: ExtClass, p_target: ExtClass) -> RingElem:
    """The exact gluing obstruction of the datum (a, d, c) from p to p_target."""
    j = p.params.j
    f_v = (p_target.p * c_rep).shift(-j).v_regular_part()
    g_plus = plus_part((c_rep * p.p).shift(-j))
    return a_rep * p.p - d_rep * p_target.p + f_v * p.p - g_plus * p_target.p


def witness_condition(g: GroupElem, p: ExtClass, p_target: ExtClass) -> bool:
    """Whether the datum of g glues E_p to E_{p_target}.

    True exactly when the obstruction class vanishes, which is
    equivalent to act(g, p) == p_target; the equivalence is asserted.
    """
    if g.params != p.params or g.params != p_target.params:
        raise ValueError("mismatched moduli parameters")
    ok = class_is_zero(obstruction(g.a.rep, g.d.rep, g.c.rep, p, p_target), p.params)
    if ok and act(g, p) != p_target:
        raise ConsistencyError("vanishing obstruction but act(g, p) != target")
    return ok


@dataclass(frozen=True)
class LinearSystem:
    """The band obstruction as a linear system in the (a, d, c) coefficients.

    Unknowns are ordered a-basis, then d-basis (both h0_basis(0)), then
    c-basis (h0_basis(2j)); rows follow ext1_band order.  ``matrix`` is
    row-major with exact rational entries.
    """

    params: ModuliParams
    unknowns: list[tuple[str, tuple[int, int]]]
    rows: list[tuple[int, int]]
    matrix: list[list[Fraction]]

    def sparse_rows(self) -> list[dict]:
        return [
            {c: v for c, v in enumerate(row) if v}
            for row in self.matrix
        ]


def build_linear_system(p: ExtClass, p_target: ExtClass) -> LinearSystem:
    params = p.params
    j = params.j
    ring = params.ring
    basis0 = h0_basis(0, ring)
    basis2j = h0_basis(2 * j, ring)
    unknowns = ([("a", t) for t in basis0] + [("d", t) for t in basis0]
                + [("c", t) for t in basis2j])
    band = ext1_band(params)
    band_index = {li: r for r, li in enumerate(band)}
    matrix = [[Fraction(0)] * len(unknowns) for _ in band]

    def deposit(col: int, elem: RingElem):
        for (l, i), coeff in elem.terms.items():
            r = band_index.get((i, l))
            if r is not None:
                matrix[r][col] = coeff

    col = 0
    for (l, i) in basis0:
        deposit(col, p.p.shift(l, i))
        col += 1
    for (l, i) in basis0:
        deposit(col, p_target.p.shift(l, i).scale(-1))
        col += 1
    for mono in basis2j:
        deposit(col, _c_differential(mono, p, p_target, j).scale(-1))
        col += 1
    return LinearSystem(params, unknowns, band, matrix)


def isom_decide(p: ExtClass, p_target: ExtClass) -> GroupElem | None:
    """An explicit gluing isomorphism from E_p to E_{p_target}, or None.

    Solves the band obstruction for (a, d, c), then looks for a solution
    with a(0,0)*d(0,0) != 0.  Over the rationals such a solution exists
    unless one of the two coordinate functionals vanishes on the whole
    solution space, so finitely many combinations of nullspace basis
    vectors settle it.  A found witness (with b = 0) is verified by
    applying the action before it is returned.
    """
    if p.params != p_target.params:
        raise ValueError("mismatched moduli parameters")
    params = p.params
    system = build_linear_system(p, p_target)
    ncols = len(system.unknowns)
    basis = linalg.nullspace(system.sparse_rows(), ncols)
    if not basis:
        return None
    idx_a = system.unknowns.index(("a", (0, 0)))
    idx_d = system.unknowns.index(("d", (0, 0)))
    if all(v[idx_a] == 0 for v in basis) or all(v[idx_d] == 0 for v in basis):
        return None

    # Both coordinate functionals are nonzero somewhere, so along the
    # curve t -> sum t^i * basis[i] their product is a nonzero polynomial
    # of degree < 2*len(basis); enough sample points must hit a unit.
    vec = None
    for t in range(2 * len(basis) + 1):
        cand = [Fraction(0)] * ncols
        scale = Fraction(1)
        for bv in basis:
            if scale:
                for c in range(ncols):
                    if bv[c]:
                        cand[c] += scale * bv[c]
            scale *= t
        if cand[idx_a] and cand[idx_d]:
            vec = cand
            break
    if vec is None:
        raise ConsistencyError("no unit-determinant point found on the solution space")

    ring = params.ring
    a_terms, d_terms, c_terms = {}, {}, {}
    for (kind, (l, i)), coeff in zip(system.unknowns, vec):
        if coeff:
            {"a": a_terms, "d": d_terms, "c": c_terms}[kind][(l, i)] = coeff
    witness = GroupElem.from_reps(params, RingElem(ring, a_terms), RingElem.zero(ring),
                                  RingElem(ring, c_terms), RingElem(ring, d_terms))
    if act(witness, p) != p_target:
        raise ConsistencyError("isomorphism witness fails to act correctly")
    return witness


# -- spectral bookkeeping of Hom dimensions ----------------------------------


@dataclass(frozen=True)
class SpectralDifferentials:
    """Exact matrices of the two Hom differentials, row-major over ext1_band.

    d1 columns follow the a-basis then the d-basis of global functions;
    d1(a, d) is the class of d*p' - a*p.  d2 columns follow the c-basis
    of O(2j)-sections; d2(c) is the class of (z^-j c p)_+ p' - (z^-j c p')_V p.
    d2_reduced is d2 with each column reduced modulo the column space of
    d1 against a fixed pivot order, so the result is canonical.
    """

    params: ModuliParams
    rows: list[tuple[int, int]]
    d1: list[list[Fraction]]
    d2: list[list[Fraction]]
    d2_reduced: list[list[Fraction]]

    def rank_d1(self) -> int:
        return linalg.rank(_columns_as_rows(self.d1))

    def rank_d2_reduced(self) -> int:
        return linalg.rank(_columns_as_rows(self.d2_reduced))


def _columns_as_rows(matrix: list[list[Fraction]]) -> list[dict]:
    if not matrix:
        return []
    ncols = len(matrix[0])
    out = []
    for c in range(ncols):
        row = {r: matrix[r][c] for r in range(len(matrix)) if matrix[r][c]}
        out.append(row)
    return out


def spectral_differentials(p: ExtClass, p_target: ExtClass) -> SpectralDifferentials:
    if p.params != p_target.params:
        raise ValueError("mismatched moduli parameters")
    params = p.params
    j = params.j
    ring = params.ring
    band = ext1_band(params)
    band_index = {li: r for r, li in enumerate(band)}
    basis0 = h0_basis(0, ring)
    basis2j = h0_basis(2 * j, ring)

    def column(elem: RingElem) -> list[Fraction]:
        col = [Fraction(0)] * len(band)
        for (l, i), coeff in elem.terms.items():
            r = band_index.get((i, l))
            if r is not None:
                col[r] = coeff
        return col

    d1_cols = [column(p.p.shift(l, i).scale(-1)) for (l, i) in basis0]
    d1_cols += [column(p_target.p.shift(l, i)) for (l, i) in basis0]
    d2_cols = [column(_c_differential(mono, p, p_target, j)) for mono in basis2j]

    # Reduce d2 columns against an echelon basis of the image of d1.
    pivots = linalg.echelon([{r: v for r, v in enumerate(col) if v} for col in d1_cols])
    d2_red_cols = []
    for col in d2_cols:
        red = linalg._reduce_row({r: v for r, v in enumerate(col) if v}, pivots)
        dense = [Fraction(0)] * len(band)
        for r, v in red.items():
            dense[r] = v
        d2_red_cols.append(dense)

    def transpose(cols):
        return [[cols[c][r] for c in range(len(cols))] for r in range(len(band))]

    return SpectralDifferentials(params, band, transpose(d1_cols), transpose(d2_cols),
                                 transpose(d2_red_cols))


@dataclass(frozen=True)
class HomProfile:
    """Dimension bookkeeping for Hom(E_p, E_p') and Ext^1(E_p, E_p')."""

    dim_hom: int
    dim_ext1: int
    dim_ker_d1: int
    dim_ker_d2: int
    dim_hom_L2L1: int

    def __post_init__(self):
        if self.dim_hom != self.dim_hom_L2L1 + self.dim_ker_d1 + self.dim_ker_d2:
            raise ConsistencyError("Hom filtration dimensions do not add up")
        if self.dim_ext1 < 0:
            raise ConsistencyError("negative Ext dimension")

    def to_dict(self) -> dict:
        return {
            "dim_hom": self.dim_hom,
            "dim_ext1": self.dim_ext1,
            "dim_ker_d1": self.dim_ker_d1,
            "dim_ker_d2": self.dim_ker_d2,
            "dim_hom_L2L1": self.dim_hom_L2L1,
        }


def hom_ext_dims(p: ExtClass, p_target: ExtClass) -> HomProfile:
    """Hom/Ext dimensions via the filtration differentials.

    dim_hom = h0(-2j) + dim ker d1 + dim ker d2, and dim_ext1 closes the
    four-term exact sequence relating Hom and Ext of the glued bundles
    to those of the split bundle:
    dim_hom - dim End(split) + dim Ext^1(split) - dim_ext1 = 0.
    """
    params = p.params
    ring = params.ring
    j = params.j
    spectral = spectral_differentials(p, p_target)
    rank_d1 = spectral.rank_d1()
    rank_d2 = spectral.rank_d2_reduced()
    dim_b = h0_dim(-2 * j, ring)
    dim_ker_d1 = 2 * h0_dim(0, ring) - rank_d1
    dim_ker_d2 = h0_dim(2 * j, ring) - rank_d2
    dim_hom = dim_b + dim_ker_d1 + dim_ker_d2
    dim_end_split = 2 * h0_dim(0, ring) + h0_dim(2 * j, ring) + dim_b
    dim_ext1_split = h1_dim(-2 * j, ring)
    dim_ext1 = dim_hom - dim_end_split + dim_ext1_split
    return HomProfile(dim_hom, dim_ext1, dim_ker_d1, dim_ker_d2, dim_b)


# -- brute-force oracle -------------------------------------------------------


def default_degree_bound(params: ModuliParams) -> int:
    return params.k * (params.m - 1) + 2 * params.j + 1


def _hom_space(p: ExtClass, p_target: ExtClass, degree: int):
    """Nullspace of the chart-regularity system for intertwining pairs.

    Unknowns are the coefficients of the four entries of A on monomials
    z^l u^i with 0 <= l <= degree; the second-chart matrix
    B = T(p') A T(p)^-1 is linear in them, and each of its monomials
    with l > k*i must vanish.
    """
    params = p.params
    j = params.j
    k = params.k
    ring = params.ring
    monos = [(l, i) for i in range(params.m) for l in range(degree + 1)]
    ncols = 4 * len(monos)

    pp = p.p
    ptp = p_target.p
    pp_ptp = pp * ptp
    one = RingElem.one(ring)

    # Contribution of a unit coefficient of each A entry to each B entry.
    # B11 = A11 + z^-j p' A21            B12 = z^2j A12 + z^j p' A22
    # B21 = z^-2j A21                          - z^j A11 p - p p' A21
    # B22 = A22 - z^-j A21 p
    def contributions(entry: int, l: int, i: int):
        if entry == 0:  # A11
            return ((0, one.shift(l, i)), (1, pp.shift(l + j, i).scale(-1)))
        if entry == 1:  # A12
            return ((1, one.shift(l + 2 * j, i)),)
        if entry == 2:  # A21
            return ((0, ptp.shift(l - j, i)), (1, pp_ptp.shift(l, i).scale(-1)),
                    (2, one.shift(l - 2 * j, i)), (3, pp.shift(l - j, i).scale(-1)))
        return ((1, ptp.shift(l + j, i)), (3, one.shift(l, i)))  # A22

    rows: dict[tuple[int, int, int], dict[int, Fraction]] = {}
    for entry in range(4):
        base = entry * len(monos)
        for idx, (l, i) in enumerate(monos):
            col = base + idx
            for b_entry, elem in contributions(entry, l, i):
                for (ll, ii), coeff in elem.terms.items():
                    if ll > k * ii:
                        row = rows.setdefault((b_entry, ll, ii), {})
                        row[col] = row.get(col, Fraction(0)) + coeff
    row_list = [r for r in rows.values() if r]
    basis = linalg.nullspace(row_list, ncols)
    return basis, monos


def brute_force_hom(p: ExtClass, p_target: ExtClass,
                    degree: int | None = None) -> tuple[int, list[CocyclePair]]:
    """Dimension and basis of Hom(E_p, E_p') by direct linear algebra.

    Solves for matrix pairs with A supported in z-degrees 0..degree and
    requires the dimension to be unchanged at degree+1; otherwise the
    degree bound was too small to have stabilized.
    """
    if p.params != p_target.params:
        raise ValueError("mismatched moduli parameters")
    params = p.params
    if degree is None:
        degree = default_degree_bound(params)
    if degree < 1:
        raise ValueError("degree bound must be at least 1")
    basis, monos = _hom_space(p, p_target, degree)
    basis_next, _ = _hom_space(p, p_target, degree + 1)
    if len(basis) != len(basis_next):
        raise ValueError("degree bound too small")

    ring = params.ring
    pairs = []
    from .extensions import TransitionMatrix

    t_source = TransitionMatrix(params, p)
    t_target = TransitionMatrix(params, p_target)
    for vec in basis:
        entries = []
        for entry in range(4):
            terms = {}
            base = entry * len(monos)
            for idx, (l, i) in enumerate(monos):
                coeff = vec[base + idx]
                if coeff:
                    terms[(l, i)] = coeff
            entries.append(RingElem(ring, terms))
        a_mat = Mat2(*entries)
        b_mat = t_target.matrix() * a_mat * t_source.matrix_inverse()
        pairs.append(CocyclePair(params, a_mat, b_mat))
    return len(basis), pairs
