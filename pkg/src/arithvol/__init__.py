"""arithvol: exact counting and convex-body experiments for divisor pairs
on the projective line over the rationals."""

from .flags import FlagSpec, GoodFlagReport, ValuationVector, valuation, \
    valuation_cloud, validate_good_flag
from .geometry import RationalPolytope, convex_hull, hyperplane_slice, \
    minkowski_sum, polytope_volume
from .models import PairSpec, SectionBasisReport, arch_norm_eval, \
    build_section_space, height, restriction_to_Y
from .reports import DerivativeReport, DiscrepancyReport, VolumeEstimate
from .scaling import ScaleExp, cmp_frac_exp
from .spaces import AdelicSpace, ArchNorm, CountInterval, LinearMap, cl_hull, \
    enumerate_small_sections, image_count, quotient_norm_sections, rescale, \
    subspace, verify_counting_inequality

__all__ = [
    "AdelicSpace", "ArchNorm", "CountInterval", "DerivativeReport",
    "DiscrepancyReport", "FlagSpec", "GoodFlagReport", "LinearMap",
    "PairSpec", "RationalPolytope", "ScaleExp", "SectionBasisReport",
    "ValuationVector", "VolumeEstimate", "arch_norm_eval",
    "build_section_space", "cl_hull", "cmp_frac_exp", "convex_hull",
    "enumerate_small_sections", "height", "hyperplane_slice", "image_count",
    "minkowski_sum", "polytope_volume", "quotient_norm_sections", "rescale",
    "restriction_to_Y", "subspace", "valuation", "valuation_cloud",
    "validate_good_flag", "verify_counting_inequality",
]

__version__ = "0.1.0"
