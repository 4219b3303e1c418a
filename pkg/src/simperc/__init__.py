"""Simultaneous percolation of two coupled Gilbert disk networks.

A primary network links nodes within ``D_t``; a secondary network links
active nodes within ``d_t``, where a secondary node is active only if no
primary node lies within the guard radius ``D_f``.
"""

from .bounds import (
    DEFAULT_CRITICAL,
    BoundReport,
    CriticalConstant,
    NotApplicable,
    bound_report,
    lambda_c_scaled,
    necessary_site_bound,
    necessary_site_bound_printed_cor,
    necessary_vacancy_bound,
    peierls_q_bound,
    peierls_threshold,
    sufficient_condition_check,
    sufficient_p_tilde,
    sufficient_simple_bound,
)
from .experiments import (
    CrossingEstimate,
    GuardZoneCertificate,
    GuardZoneSearchFailed,
    estimate_crossing_prob,
    estimate_lambda_c,
    estimate_simultaneous,
    guard_zone_search,
    pdf_check,
    phase_diagram,
    uniqueness_ratio_experiment,
)
from .geometry import QuadratureError, integrate, lens_area, pair_distance_pdf
from .model import (
    ClusterLabeling,
    Direction,
    HeteroParams,
    Realization,
    build_clusters,
    component_stats,
    filter_active_secondary,
    has_crossing,
    realize,
    simultaneous_crossing,
)
from .pointprocess import PointSet, SeededStream, Window, sample_coupled_ppp, sample_ppp

__version__ = "0.1.0"
