"""Evolution families and extremal maps on the unit polydisc.

Truncated-jet arithmetic, infinitesimal generators with grid-certified
admissibility, piecewise-constant field evolution, sharp coefficient and
growth bound reports, and a budgeted coefficient search.  Hot kernels
run under numba when available; set POLYLOEWNER_NO_NUMBA=1 (or pass
backend="numpy") for the pure-numpy fallback.
"""

__version__ = "0.1.0"

from .jets import (
    DomainError,
    JetMap,
    JetShapeError,
    MultiJet,
    Normalization,
    SingularityError,
    analytic_jet,
    compose,
    identity_map,
    jacobian,
    jet_distance,
    jet_from_json,
    jet_to_json,
    map_distance,
    map_from_json,
    map_to_json,
    matrix_solve,
    minus_identity_map,
    multiindices,
    rotate_map,
    series_in_var,
    variable_jet,
)
from .kernels import available_backends, basis_tables, default_backend
from .fourier import ring_jacobian, torus_coefficients, torus_jet
from .generators import (
    MEMBERSHIP_TOL,
    REFERENCE_GRID,
    AtomicMeasure,
    BisectionSpec,
    Generator,
    GridSpec,
    MembershipCertificate,
    MembershipError,
    convex_combination,
    dilation_generator,
    from_starlike,
    membership_check,
    perturb_starlike_delta,
    product_form,
    rotate_generator,
    shear_linear,
    shear_quadratic,
)
from .catalog import (
    CatalogReport,
    NamedMap,
    catalog_generator,
    catalog_get,
    catalog_names,
    minimal_dimension,
    verify_catalog,
)
from .bounds import (
    EQUALITY_TOL_CLOSED_FORM,
    EQUALITY_TOL_EVOLVED,
    BoundCheck,
    BoundReport,
    bieberbach_degree2_check,
    caratheodory_check,
    coeff_bound_report,
    generator_coeff_report,
    koebe_check,
    koebe_envelope,
    sample_rays,
)
from .evolution import (
    EvolutionResult,
    HerglotzField,
    IntegrationError,
    LimitResult,
    evolve_jet,
    evolve_point,
    evolve_report,
    limit_evaluator,
    parametric_limit,
    scaled_transition,
)
from .search import (
    FAMILIES,
    ProbeOutcome,
    SearchResult,
    SearchSpace,
    bang_bang_probe,
    decode_field,
    maximize,
    objective,
)
from .descriptions import field_from_json, generator_from_json, load_field, load_generator

__all__ = [
    "__version__",
    # jets
    "DomainError", "JetMap", "JetShapeError", "MultiJet", "Normalization",
    "SingularityError", "analytic_jet", "compose", "identity_map", "jacobian",
    "jet_distance", "jet_from_json", "jet_to_json", "map_distance",
    "map_from_json", "map_to_json", "matrix_solve", "minus_identity_map",
    "multiindices", "rotate_map", "series_in_var", "variable_jet",
    # kernels / fourier
    "available_backends", "basis_tables", "default_backend",
    "ring_jacobian", "torus_coefficients", "torus_jet",
    # generators
    "MEMBERSHIP_TOL", "REFERENCE_GRID", "AtomicMeasure", "BisectionSpec",
    "Generator", "GridSpec", "MembershipCertificate", "MembershipError",
    "convex_combination", "dilation_generator", "from_starlike",
    "membership_check", "perturb_starlike_delta", "product_form",
    "rotate_generator", "shear_linear", "shear_quadratic",
    # catalog
    "CatalogReport", "NamedMap", "catalog_generator", "catalog_get",
    "catalog_names", "minimal_dimension", "verify_catalog",
    # bounds
    "EQUALITY_TOL_CLOSED_FORM", "EQUALITY_TOL_EVOLVED",
    "BoundCheck", "BoundReport", "bieberbach_degree2_check",
    "caratheodory_check", "coeff_bound_report", "generator_coeff_report",
    "koebe_check", "koebe_envelope", "sample_rays",
    # evolution
    "EvolutionResult", "HerglotzField", "IntegrationError", "LimitResult",
    "evolve_jet", "evolve_point", "evolve_report", "limit_evaluator", "parametric_limit",
    "scaled_transition",
    # search
    "FAMILIES", "ProbeOutcome", "SearchResult", "SearchSpace",
    "bang_bang_probe", "decode_field", "maximize", "objective",
    # descriptions
    "field_from_json", "generator_from_json", "load_field", "load_generator",
]
