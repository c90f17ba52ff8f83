"""expanderlab: exact-arithmetic instrumentation for the growth of A(A+1).

Sumset and energy computations over prime fields and exact rationals, a
registry of certified inequality instances, executable proof constructions,
incidence counting over the rationals, and extremal search for sets with a
small expander image.  No floating point participates in any verdict.
"""

__version__ = "0.1.0"

from .field import Elem, FieldCtx, elem_arith, is_prime
from .sets import (
    FSet,
    PairGraph,
    affine_image,
    combine,
    expander_set,
    kfold_sum,
    load_set,
    partial_combine,
    save_set,
)
from .energy import (
    EnergyValue,
    MultiplicityHistogram,
    additive_energy,
    energy,
    energy_of,
    histogram,
    multiplicative_energy,
    rich_products,
    twisted_energy,
)
from .intervals import RatInterval, log_ratio_interval, pow_interval, root_interval
from .constructions import (
    CoverResult,
    InjectionResult,
    PartialTriangleResult,
    PlunneckeResult,
    PopularRatioResult,
    dense_degree_subset,
    greedy_cover,
    injection_witness,
    partial_ruzsa,
    plunnecke_witness,
    popular_ratio_graph,
)
from .incidence import (
    Line,
    LineFamily,
    count_incidences,
    expander_line_family,
    rich_points,
    st_lower_bound_check,
)
from .verify import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    SLACK_ONLY,
    InequalityReport,
    PipelineTrace,
    REGISTRY,
    check,
    finite_field_pipeline,
    real_pipeline,
)
from .search import (
    ExtremalRecord,
    SearchConfig,
    exhaustive_min,
    exponent_table,
    stochastic_search,
)
