"""Relative metrics |x - y| / M(|x|, |y|), their geometry and hyperbolic-type relatives."""

from .balls import BallTrace, convexity_check, find_corners, infty_q_corner, isotropy_check, \
    small_radius, star_shaped_check, trace_sphere
from .fuzz import FuzzReport, triangle_fuzz
from .hyperbolic import DomainSpec, MobiusMap, ball_self_map, chordal, cross_ratio, hyperbolic_ball, \
    mobius_invariance_test, rho_G, rho_G_closed_form, rho_G_p, rho_G_properties_test, rho_prime, \
    seittenranta
from .means import is_moderately_increasing, log_mean, power_mean, s_quasimean
from .quasiconvexity import QuasiconvexityEstimate, c_M_estimate, c_M_homogeneous, c_pq_bounds, \
    ff_path_length_bound, one_quasiconvex_classification_test
from .quasihyperbolic import geodesic, inequality_chain, k_alpha, k_one, path_length
from .relative import MetricDescriptor, bilipschitz_estimate, metric_criterion_quasimean, pq_is_metric, \
    rho_M, rho_pq
from .weights import WeightFunction

__version__ = "0.1.0"
