"""Bundle automorphisms acting on extension classes, as a groupoid.

An automorphism of O(j) + O(-j) is a matrix g = (a, b; c, d) of twisted
sections with nonvanishing determinant on the zero section.  Acting on
a normal-form extension class p, it produces the unique band-supported
class g.p whose bundle is glued to p's by a pair of chart-regular
matrices (A, B) with

    B * (z^j, p; 0, z^-j) = (z^j, g.p; 0, z^-j) * A,

where A and B are built from g by canonical Cech corrections.  Because
g.p depends on the base point, composing two automorphisms relative to
p gives a base-point-dependent product, and the whole structure is a
groupoid rather than a group action.  ``verify_groupoid`` checks the
groupoid laws exactly on seeded random samples.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .extensions import ExtClass, Mat2, ModuliParams, TransitionMatrix, basis_W
from .ring import ConsistencyError, RingElem, invert_unit, plus_part, sector_split, truncate
from .sections import TwistedSection, h0_basis


class GroupElem:
    """An automorphism g = (a, b; c, d) of O(j) + O(-j).

    a and d are global functions, c a section of O(2j), b a section of
    O(-2j) stored by its first-chart representative.  Invertibility is
    certified by det0 = a(0,0) * d(0,0) != 0, the determinant restricted
    to the zero section (b vanishes there for j >= 1).
    """

    __slots__ = ("params", "a", "b", "c", "d")

    def __init__(self, params: ModuliParams, a: TwistedSection, b: TwistedSection,
                 c: TwistedSection, d: TwistedSection):
        j = params.j
        for sec, twist, name in ((a, 0, "a"), (b, -2 * j, "b"), (c, 2 * j, "c"), (d, 0, "d")):
            if sec.s != twist:
                raise ValueError(f"section {name} must have twist {twist}, got {sec.s}")
            if sec.rep.params != params.ring:
                raise ValueError("mismatched ring parameters")
        if a.rep.coeff(0, 0) * d.rep.coeff(0, 0) == 0:
            raise ValueError("not invertible")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElem is immutable")

    @classmethod
    def from_reps(cls, params: ModuliParams, a: RingElem, b: RingElem, c: RingElem,
                  d: RingElem) -> "GroupElem":
        j = params.j
        return cls(params, TwistedSection(0, a), TwistedSection(-2 * j, b),
                   TwistedSection(2 * j, c), TwistedSection(0, d))

    @classmethod
    def identity(cls, params: ModuliParams) -> "GroupElem":
        one = RingElem.one(params.ring)
        zero = RingElem.zero(params.ring)
        return cls.from_reps(params, one, zero, zero, one)

    @classmethod
    def diagonal(cls, params: ModuliParams, lam, mu) -> "GroupElem":
        ring = params.ring
        return cls.from_reps(params, RingElem.constant(ring, lam), RingElem.zero(ring),
                             RingElem.zero(ring), RingElem.constant(ring, mu))

    def det0(self) -> Fraction:
        return self.a.rep.coeff(0, 0) * self.d.rep.coeff(0, 0)

    def is_identity(self) -> bool:
        one = RingElem.one(self.params.ring)
        return (self.a.rep == one and self.d.rep == one
                and self.b.rep.is_zero() and self.c.rep.is_zero())

    def matrix(self) -> Mat2:
        """First-chart matrix (a, b_U; c_U, d)."""
        return Mat2(self.a.rep, self.b.rep, self.c.rep, self.d.rep)

    def matrix_product(self, other: "GroupElem") -> "GroupElem":
        """Plain 2x2 matrix product, ignoring any base point."""
        m = self.matrix() * other.matrix()
        return GroupElem.from_reps(self.params, m.a11, m.a12, m.a21, m.a22)

    def truncated(self, m_new: int) -> "GroupElem":
        params = self.params.restricted(m_new)
        return GroupElem.from_reps(params, truncate(self.a.rep, m_new),
                                   truncate(self.b.rep, m_new),
                                   truncate(self.c.rep, m_new),
                                   truncate(self.d.rep, m_new))

    def __eq__(self, other):
        return (isinstance(other, GroupElem) and self.params == other.params
                and self.a == other.a and self.b == other.b
                and self.c == other.c and self.d == other.d)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return (f"GroupElem(a={self.a.rep!r}, b={self.b.rep!r}, "
                f"c={self.c.rep!r}, d={self.d.rep!r})")

    def to_dict(self) -> dict:
        return {"a": self.a.to_dict(), "b": self.b.to_dict(),
                "c": self.c.to_dict(), "d": self.d.to_dict()}

    @classmethod
    def from_dict(cls, data: dict, params: ModuliParams) -> "GroupElem":
        extra = set(data) - {"a", "b", "c", "d"}
        if extra:
            raise ValueError(f"unknown fields: {sorted(extra)}")
        try:
            secs = {name: TwistedSection.from_dict(data[name]) for name in "abcd"}
        except KeyError as exc:
            raise ValueError(f"missing field {exc}") from exc
        return cls(params, secs["a"], secs["b"], secs["c"], secs["d"])


@dataclass(frozen=True)
class CocyclePair:
    """Chart-regular matrices (A, B) intertwining two transition matrices."""

    params: ModuliParams
    A: Mat2
    B: Mat2

    def compose(self, other: "CocyclePair") -> "CocyclePair":
        """self after other: entrywise matrix products."""
        return CocyclePair(self.params, self.A * other.A, self.B * other.B)

    def inverse(self) -> "CocyclePair":
        # det B = det A since the transition matrices have determinant 1,
        # so one unit inversion serves both adjugates.
        inv_det = invert_unit(self.A.det())
        a, b = self.A, self.B
        ainv = Mat2(a.a22 * inv_det, (-a.a12) * inv_det, (-a.a21) * inv_det, a.a11 * inv_det)
        binv = Mat2(b.a22 * inv_det, (-b.a12) * inv_det, (-b.a21) * inv_det, b.a11 * inv_det)
        return CocyclePair(self.params, ainv, binv)

    def intertwines(self, p: ExtClass, p_target: ExtClass) -> bool:
        lhs = self.B * TransitionMatrix(self.params, p).matrix()
        rhs = TransitionMatrix(self.params, p_target).matrix() * self.A
        return lhs == rhs

    def is_chart_regular(self) -> bool:
        return (all(e.is_u_regular() for e in self.A.entries())
                and all(e.is_v_regular() for e in self.B.entries()))

    def det0(self) -> Fraction:
        det = self.A.det()
        lay0 = det.layer(0)
        if set(lay0) <= {0}:
            return lay0.get(0, Fraction(0))
        return Fraction(0)


def act(g: GroupElem, p: ExtClass) -> ExtClass:
    """The corrected fractional-linear action of g on the class p.

    Returns the unique band-supported class p' for which the canonical
    cocycle pair of g intertwines the transition matrices of p and p'.
    Since the band equations are triangular in the u-order with constant
    diagonal d(0,0), p' is found by forward substitution layer by layer;
    to leading order it is the familiar quotient (a*p - z^j b)/(d - z^-j p c).
    """
    if g.params != p.params:
        raise ValueError("mismatched moduli parameters")
    params = g.params
    j = params.j
    ring = params.ring
    i_cap = params.i_cap()
    a_rep, d_rep, c_rep = g.a.rep, g.d.rep, g.c.rep
    d00 = d_rep.coeff(0, 0)
    g_plus = plus_part((c_rep * p.p).shift(-j))
    residual = a_rep * p.p
    sol_terms: dict[tuple[int, int], Fraction] = {}
    for i in range(1, i_cap + 1):
        layer_terms = {}
        for l in params.band_rows(i):
            coeff = residual.coeff(l, i)
            if coeff:
                layer_terms[(l, i)] = coeff / d00
        if not layer_terms:
            continue
        delta = RingElem._raw(ring, layer_terms)
        sol_terms.update(layer_terms)
        # Knock out this layer's band and propagate to higher u-orders.
        f_delta = (delta * c_rep).shift(-j).v_regular_part()
        residual = residual - d_rep * delta - g_plus * delta + f_delta * p.p
    return ExtClass(params, RingElem(ring, sol_terms))


def _build_pair(g: GroupElem, p: ExtClass, target: ExtClass, check: bool) -> CocyclePair:
    """The canonical cocycle pair of g from p to target = act(g, p)."""
    params = g.params
    j = params.j
    a_rep, b_rep, c_rep, d_rep = g.a.rep, g.b.rep, g.c.rep, g.d.rep

    f = (target.p * c_rep).shift(-j)
    f_plus = plus_part(f)
    a11 = a_rep - f_plus
    b11 = a11 + f

    gg = (c_rep * p.p).shift(-j)
    g_plus = plus_part(gg)
    a22 = d_rep + g_plus
    b22 = a22 - gg

    r = b11 * p.p - target.p * a22
    split = sector_split(r, j)
    if not split.good.is_zero():
        raise ConsistencyError("cocycle target does not match the action")
    a12 = b_rep + split.succ.shift(-j)
    b12 = b_rep.shift(2 * j) - split.prec.shift(j)

    pair = CocyclePair(params, Mat2(a11, a12, c_rep, a22),
                       Mat2(b11, b12, c_rep.shift(-2 * j), b22))
    if check:
        if not pair.is_chart_regular():
            raise ConsistencyError("cocycle pair is not chart regular")
        if not pair.intertwines(p, target):
            raise ConsistencyError("cocycle pair fails the intertwining identity")
    return pair


def cocycle_matrices(g: GroupElem, p: ExtClass, check: bool = True) -> CocyclePair:
    """The canonical pair (A, B) with B * T(p) = T(act(g, p)) * A.

    With check on (the default), chart regularity and the intertwining
    identity are verified exactly before returning.
    """
    return _build_pair(g, p, act(g, p), check)


def _global_part(x: RingElem) -> RingElem:
    k = x.params.k
    return x.select(lambda l, i: 0 <= l <= k * i)


def extract_group_elem(pair: CocyclePair, p: ExtClass, p_target: ExtClass) -> GroupElem:
    """Recover the unique automorphism underlying an intertwining pair.

    Splits each entry of A into its global part and the canonical Cech
    correction recomputed from (p, p_target), and insists the residuals
    match exactly.
    """
    params = pair.params
    j = params.j
    A, B = pair.A, pair.B

    c_rep = A.a21
    try:
        c_sec = TwistedSection(2 * j, c_rep)
    except ValueError as exc:
        raise ValueError("not a normalized cocycle pair") from exc

    f_plus = plus_part((p_target.p * c_rep).shift(-j))
    a_rep = _global_part(A.a11)
    if A.a11 - a_rep != -f_plus:
        raise ValueError("not a normalized cocycle pair")

    g_plus = plus_part((c_rep * p.p).shift(-j))
    d_rep = _global_part(A.a22)
    if A.a22 - d_rep != g_plus:
        raise ValueError("not a normalized cocycle pair")

    r = B.a11 * p.p - p_target.p * A.a22
    split = sector_split(r, j)
    if not split.good.is_zero():
        raise ValueError("not a normalized cocycle pair")
    b_rep = A.a12 - split.succ.shift(-j)
    try:
        b_sec = TwistedSection(-2 * j, b_rep)
    except ValueError as exc:
        raise ValueError("not a normalized cocycle pair") from exc

    if a_rep.coeff(0, 0) * d_rep.coeff(0, 0) == 0:
        raise ValueError("not invertible")
    return GroupElem(params, TwistedSection(0, a_rep), b_sec, c_sec, TwistedSection(0, d_rep))


def induced_product(g1: GroupElem, g2: GroupElem, p: ExtClass,
                    check: bool = True) -> GroupElem:
    """The base-point product g1 *_p g2: compose cocycle pairs and extract."""
    if g1.params != g2.params or g1.params != p.params:
        raise ValueError("mismatched moduli parameters")
    q = act(g2, p)
    pair2 = _build_pair(g2, p, q, check)
    q2 = act(g1, q)
    pair1 = _build_pair(g1, q, q2, check)
    return extract_group_elem(pair1.compose(pair2), p, q2)


def induced_inverse(g: GroupElem, p: ExtClass, check: bool = True) -> GroupElem:
    """The base-point inverse of g at p: invert the pair and extract."""
    if g.params != p.params:
        raise ValueError("mismatched moduli parameters")
    q = act(g, p)
    pair = _build_pair(g, p, q, check)
    return extract_group_elem(pair.inverse(), q, p)


# -- seeded sampling ---------------------------------------------------------

_MIX1 = 0x9E3779B97F4A7C15
_MIX2 = 0xBF58476D1CE4E5B9
_MASK = (1 << 63) - 1


def substream(seed: int, index: int) -> random.Random:
    """A deterministic per-sample random stream derived from (seed, index)."""
    return random.Random(((seed * _MIX1) ^ (index * _MIX2)) & _MASK)


def _rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.choice((1, 2, 3)))


def _nonzero_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 9) * rng.choice((-1, 1)), rng.choice((1, 2, 3)))


def _sparse_terms(basis, rng: random.Random, max_terms: int) -> dict:
    count = min(len(basis), rng.randint(0, max_terms))
    terms = {}
    for (l, i) in rng.sample(basis, count):
        c = _nonzero_rational(rng)
        terms[(l, i)] = c
    return terms


def sample_ext_class(params: ModuliParams, rng: random.Random,
                     max_terms: int = 3) -> ExtClass:
    basis = [(l, i) for (i, l) in basis_W(params)]
    return ExtClass(params, RingElem(params.ring, _sparse_terms(basis, rng, max_terms)))


def sample_group_elem(params: ModuliParams, rng: random.Random,
                      max_terms: int = 2) -> GroupElem:
    """A random automorphism: sparse sections, diagonal constants nonzero."""
    ring = params.ring
    j = params.j
    basis0 = [t for t in h0_basis(0, ring) if t != (0, 0)]
    a_terms = _sparse_terms(basis0, rng, max_terms)
    a_terms[(0, 0)] = _nonzero_rational(rng)
    d_terms = _sparse_terms(basis0, rng, max_terms)
    d_terms[(0, 0)] = _nonzero_rational(rng)
    b_terms = _sparse_terms(h0_basis(-2 * j, ring), rng, max_terms)
    c_terms = _sparse_terms(h0_basis(2 * j, ring), rng, max_terms)
    return GroupElem.from_reps(params, RingElem(ring, a_terms), RingElem(ring, b_terms),
                               RingElem(ring, c_terms), RingElem(ring, d_terms))


# -- randomized exact verification -------------------------------------------

_FAMILIES = ("identity_action", "compatibility", "associativity", "identity_laws",
             "inverse_laws", "intertwining", "roundtrip", "truncation")


def _check_sample(params: ModuliParams, rng: random.Random,
                  with_truncation: bool) -> dict[str, bool]:
    e = GroupElem.identity(params)
    g1 = sample_group_elem(params, rng)
    g2 = sample_group_elem(params, rng)
    g3 = sample_group_elem(params, rng)
    p = sample_ext_class(params, rng)
    out = {}

    out["identity_action"] = act(e, p) == p

    q1 = act(g1, p)
    pair1 = _build_pair(g1, p, q1, check=False)
    out["intertwining"] = pair1.is_chart_regular() and pair1.intertwines(p, q1)
    out["roundtrip"] = extract_group_elem(pair1, p, q1) == g1

    # Compatibility: acting by g1 *_p g2 equals acting by g2 then g1.
    q3 = act(g3, p)
    h23 = induced_product(g2, g3, p, check=False)
    q23 = act(g2, q3)
    out["compatibility"] = act(h23, p) == q23

    # Associativity of the base-point product.
    h12 = induced_product(g1, g2, q3, check=False)
    lhs = induced_product(h12, g3, p, check=False)
    h23b = induced_product(g2, g3, p, check=False)
    rhs = induced_product(g1, h23b, p, check=False)
    out["associativity"] = lhs == rhs

    out["identity_laws"] = (induced_product(e, g1, p, check=False) == g1
                            and induced_product(g1, e, p, check=False) == g1)

    ginv = induced_inverse(g1, p, check=False)
    out["inverse_laws"] = (induced_product(ginv, g1, p, check=False) == e
                           and induced_product(g1, ginv, q1, check=False) == e
                           and act(ginv, q1) == p)

    if with_truncation and params.m > 1:
        from .extensions import restrict_level

        m_new = params.m - 1
        tg1, tg2 = g1.truncated(m_new), g2.truncated(m_new)
        tp = restrict_level(p, m_new)
        ok = act(tg1, tp) == restrict_level(q1, m_new)
        ok = ok and induced_product(tg1, tg2, tp, check=False) == \
            induced_product(g1, g2, p, check=False).truncated(m_new)
        ok = ok and induced_inverse(tg1, tp, check=False) == ginv.truncated(m_new)
        out["truncation"] = ok
    return out


def _verify_chunk(args) -> dict:
    k, j, m, seed, start, stop, truncation_samples = args
    from .ring import RingParams

    params = ModuliParams(RingParams(k, m), j)
    counts = {name: 0 for name in _FAMILIES}
    passed = {name: 0 for name in _FAMILIES}
    first_failure = {}
    for idx in range(start, stop):
        rng = substream(seed, idx)
        results = _check_sample(params, rng, with_truncation=idx < truncation_samples)
        for name, ok in results.items():
            counts[name] += 1
            if ok:
                passed[name] += 1
            elif name not in first_failure:
                first_failure[name] = idx
    return {"counts": counts, "passed": passed, "first_failure": first_failure}


def verify_groupoid(params: ModuliParams, samples: int, seed: int,
                    truncation_samples: int = 0, workers: int = 1) -> dict:
    """Check the groupoid laws exactly on seeded random samples.

    Runs ``samples`` independent draws of (g1, g2, g3, p) and verifies
    the identity action, the compatibility of the base-point product
    with composition of actions, associativity, identity and inverse
    laws, the intertwining identity, and the pair-to-element round
    trip.  The first ``truncation_samples`` draws additionally check
    that everything commutes with truncation to level m-1.  Sample
    streams are derived per index, so the report does not depend on the
    number of workers.
    """
    jobs = []
    if workers > 1 and samples >= 2 * workers:
        chunk = (samples + 2 * workers - 1) // (2 * workers)
        starts = list(range(0, samples, chunk))
        args = [(params.k, params.j, params.m, seed, s, min(s + chunk, samples),
                 truncation_samples) for s in starts]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = list(pool.map(_verify_chunk, args))
    else:
        jobs = [_verify_chunk((params.k, params.j, params.m, seed, 0, samples,
                               truncation_samples))]

    counts = {name: 0 for name in _FAMILIES}
    passed = {name: 0 for name in _FAMILIES}
    first_failure: dict[str, int] = {}
    for job in jobs:
        for name in _FAMILIES:
            counts[name] += job["counts"][name]
            passed[name] += job["passed"][name]
        for name, idx in job["first_failure"].items():
            if name not in first_failure or idx < first_failure[name]:
                first_failure[name] = idx

    families = {}
    for name in _FAMILIES:
        if counts[name] == 0:
            continue
        families[name] = {
            "checked": counts[name],
            "passed": passed[name],
            "first_failure_sample": first_failure.get(name),
        }
    return {
        "k": params.k,
        "j": params.j,
        "m": params.m,
        "samples": samples,
        "seed": seed,
        "dim_W": len(basis_W(params)),
        "families": families,
        "all_passed": all(f["passed"] == f["checked"] for f in families.values()),
    }
