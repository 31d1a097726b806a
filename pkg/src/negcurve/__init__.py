"""Exact symbolic toolkit for rank-2 bundles on truncated neighborhoods
of a rational curve of self-intersection -k.

The package computes normal forms of extension classes, the corrected
fractional-linear action of bundle automorphisms on them, explicit
chart-regular isomorphism pairs, an exact isomorphism decision, and
Hom/Ext dimensions, all over the rationals with zero tolerance.
"""

from .ring import (ConsistencyError, RingElem, RingParams, SectorSplit, invert_unit,
                   plus_part, plus_parts, sector_split, truncate)
from .sections import TwistedSection, cone_check, h0_basis, h0_dim, h1_dim, restrict_to_ell
from .extensions import (ExtClass, Mat2, ModuliParams, TransitionMatrix, basis_W,
                         class_is_zero, ext1_band, reduce_cocycle, restrict_level)
from .groupoid import (CocyclePair, GroupElem, act, cocycle_matrices, extract_group_elem,
                       induced_inverse, induced_product, sample_ext_class,
                       sample_group_elem, substream, verify_groupoid)
from .homspaces import (HomProfile, LinearSystem, SpectralDifferentials, brute_force_hom,
                        build_linear_system, hom_ext_dims, isom_decide, obstruction,
                        spectral_differentials, witness_condition)

__all__ = [
    "ConsistencyError", "RingElem", "RingParams", "SectorSplit", "invert_unit",
    "plus_part", "plus_parts", "sector_split", "truncate",
    "TwistedSection", "cone_check", "h0_basis", "h0_dim", "h1_dim", "restrict_to_ell",
    "ExtClass", "Mat2", "ModuliParams", "TransitionMatrix", "basis_W", "class_is_zero",
    "ext1_band", "reduce_cocycle", "restrict_level",
    "CocyclePair", "GroupElem", "act", "cocycle_matrices", "extract_group_elem",
    "induced_inverse", "induced_product", "sample_ext_class", "sample_group_elem",
    "substream", "verify_groupoid",
    "HomProfile", "LinearSystem", "SpectralDifferentials", "brute_force_hom",
    "build_linear_system", "hom_ext_dims", "isom_decide", "obstruction",
    "spectral_differentials", "witness_condition",
]

__version__ = "0.1.0"
