"""Torsion functions of knot and link exteriors from group presentations,
via Fox calculus and Fuglede-Kadison determinant estimation."""

from .words import Word, free_reduce, commutator, parse_word
from .presentations import (
    CohomologyClass,
    GroupPresentation,
    dehn_fill,
    has_infinite_abelian_image,
    parse_presentation_text,
    format_presentation_text,
    validate_class,
)
from .catalog import catalog_get, catalog_names
from .quotients import (
    FiniteQuotient,
    congruence_quotients,
    cyclic_quotient,
    quotient_search,
)
from .wordproblem import (
    AbelianOracle,
    FreeOracle,
    IdentityVerdict,
    QuotientOracle,
    Verdict,
    has_infinite_order,
    oracle_abelian,
    oracle_free,
    oracle_quotients,
)
from .groupring import (
    GroupRingElement,
    GroupRingMatrix,
    TwistParameters,
    fox_derivative,
    fox_matrix,
    neumann_inverse,
    opnorm_bound,
)
from .fkdet import (
    DeterminantEstimate,
    det_quotient,
    det_quotient_family,
    det_rules,
    det_rules_product,
    det_schur,
    det_series,
    verify_u0v0_tables,
)
from .torsion import (
    EstimatorConfig,
    TorsionCurve,
    TorsionSpec,
    chain_torsion,
    lemma_torsion,
    log_grid,
    torsion_at,
    torsion_curve,
    write_curve,
)
from .asymptotics import (
    BoundsRecord,
    FitReport,
    bounds_report,
    degree_fit,
    leading_fit,
    scaling_defect,
    symmetry_fit,
    volume_bound,
)
from .data import (
    ResultRecord,
    VolumeRecord,
    census_volumes,
    load_result,
    load_volumes,
    store_result,
)

__version__ = "0.1.0"
