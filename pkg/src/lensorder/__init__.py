"""Filtered chain models for equivariant ball homology in lens-space quotients,
with closed-form oracles, squeezing verdicts and contact-geometry checks."""

from .chain import GradedChainComplex, HomologyTable, homology, window_subquotient
from .exact_algebra import ExactMatrix, rank_mod, smith_normal_form
from .group_ring import GroupRingElement, norm, tpow_minus_one
from .morse_bott import LensData, Profile, critical_data, stabilized_homology
from .oracles import balls_homology, balls_homology_eq, prequantize
from .squeeze import SqueezeVerdict, equivariant_verdict, nonequivariant_verdict

__version__ = "0.1.0"

__all__ = [
    "ExactMatrix", "GradedChainComplex", "GroupRingElement", "HomologyTable", "LensData",
    "Profile", "SqueezeVerdict", "balls_homology", "balls_homology_eq", "critical_data",
    "equivariant_verdict", "homology", "nonequivariant_verdict", "norm", "prequantize",
    "rank_mod", "smith_normal_form", "stabilized_homology", "tpow_minus_one",
    "window_subquotient",
]
