"""Discrete Bakry-Emery curvature, spectral gaps and hypercube rigidity diagnostics.

The library verifies CD(K,N) on finite weighted graphs, computes spectra in
the measure-weighted inner product, detects hypercube structure, measures
Frobenius distance to canonical weighted cubes, and quantifies how close
eigenfunction combinations come to distance functions.
"""

from .curvature import (
    CDReport,
    LocalCurvatureForm,
    cd_check,
    curvature,
    curvature_at,
    gamma,
    gamma2,
    laplacian_apply,
    laplacian_matrix,
    local_forms,
)
from .errors import (
    CubeRigidityError,
    DegreeExceedsLevel,
    DisconnectedGraph,
    DomainMismatch,
    DuplicateEdge,
    DuplicateVertex,
    GraphTooLarge,
    IndexOutOfRange,
    InvalidParameter,
    MalformedGraph,
    NegativeWeight,
    NonpositiveK,
    NonpositiveMeasure,
    NonUnitMeasure,
    NotAHypercube,
    NotAnEdge,
    NotDistanceTwo,
    RefusalError,
    SelfLoop,
    SingularRestrictionMap,
    SpectralMismatch,
    TooLargeForExact,
    UnknownVertex,
    ValidationError,
)
from .graphs import (
    ClassMembership,
    WeightedGraph,
    ball,
    build_graph,
    cartesian_product,
    class_membership,
    degrees,
    diameter,
    directional_degrees,
    distances_from,
    edge_degree,
    graph_from_json_dict,
    graph_to_json_dict,
    hypercube,
    max_vertices,
    perturb,
    sphere,
    vertex_function,
)
from .obata import (
    DegreeMeasureMaxima,
    ObataReport,
    RestrictionMap,
    degree_measure_report,
    extension_residual,
    generalized_obata,
    gradient_deviation,
    is_distance_composed,
    lift_distance,
    obata_report,
    obata_residual,
    restriction_map,
)
from .rigidity import (
    BonnetMyersReport,
    HypercubeLabeling,
    RigidityReport,
    almost_rigidity_report,
    bonnet_myers_check,
    detect_hypercube,
    edge_degree_matrix,
    enumerate_isomorphisms,
    frobenius_distance_exact,
    frobenius_distance_to_cube,
)
from .spectral import (
    LichnerowiczReport,
    SpectralData,
    eigenspace_basis,
    gap_deficit,
    lichnerowicz_check,
    m_inner,
    m_norm,
    project,
    spectrum,
)
from .sweep import CSV_COLUMNS, SweepRow, rows_to_csv, run_sweep, sweep_instance

__version__ = "0.1.0"
