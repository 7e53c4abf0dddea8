"""Nonlocal capacities, potentials and Hausdorff contents on finite metric measure spaces."""
from .capacity import (CapacityCertificate, CapacityError, CapacityParams, cap_relative, cap_riesz,
                       cap_tl_dual, cap_tl_primal, validate_certificate)
from .content import ContentParams, ContentResult, content_exact, content_greedy
from .operators import (GradientSequence, PointMeasure, ScaleSequence, canonical_gradient,
                        frac_max, hdual_sequence, is_fractional_gradient, mixed_norm,
                        potential_H, potential_L, riesz_I)
from .space import (MetricMeasureSpace, PointSet, ball, build_cantor, build_grid, estimate_stats,
                    make_space, scale_window, three_chain, two_point_space, validate_metric)
from .verify import CheckResult, run_check, run_suite

__version__ = "0.1.0"
