"""croftonlab: Monte Carlo integral geometry.

Crofton-type volume estimators on spheres and complex projective space,
deformation-coefficient estimation and maximization over Grassmannians, and
exact intersection experiments, all driven by seeded splittable randomness.
"""

from .errors import (
    ConfigError,
    CroftonLabError,
    DegenerateLine,
    DegenerateVector,
    DimensionMismatch,
    IdenticallyZero,
    NotUnit,
    RankDeficient,
)
from .estimate import McEstimate
from .frames import (
    ComplexStructure,
    InterleaveOperator,
    KahlerAngle,
    OrthoFrame,
    ProjectionForm,
    batch_projection_volume,
    block_form,
    interleaved_wedge,
    kahler_angle,
    orthonormalize,
    pairing,
    projection_volume,
    trace_identity,
)
from .sampling import (
    RandomStream,
    TorusPoint,
    random_frame,
    sample_cp_point,
    sample_rotation,
    sample_sphere,
    sample_torus_s3,
    sample_unitary,
)
from .crofton import (
    SphericalPolyline,
    calibrate_zeta,
    count_great_hypersphere,
    crofton_area_cp2,
    crofton_length,
    latitude_polyline,
    polyline_length,
    read_polyline,
    write_polyline,
)
from .deformation import (
    FamilySpec,
    ScanResult,
    StructureDiagnosis,
    cp_tau_coefficient,
    cp_tau_grid,
    deformation_coefficient,
    diagnose_structure,
    eigenvalue_bound,
    interleaved_objective,
    interleaved_objective_bounds,
    interleaved_objective_complex,
    maximizer_scan,
    product_plane,
    structure_test_complex,
    structure_test_product,
    tasaki_plane,
    wirtinger_objective,
)
from .intersections import (
    EquidistributionResult,
    HomogeneousCurve,
    LinearSubspace,
    degeneracy_volume,
    equidistribution_experiment,
    grassmann_meet,
    intersection_dim,
    line_curve_count,
    read_curve,
    su_circle_intersections,
    swap_rotation,
    tangent_line,
    write_curve,
)
from .reports import RunConfig, RunReport, emit, parse_report, run

__version__ = "0.1.0"
