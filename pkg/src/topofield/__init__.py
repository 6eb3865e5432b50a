"""Phase-field perimeter minimization with connectedness penalties.

A 2-D solver for the gradient flow of an interface (perimeter) energy plus
a geodesic-distance connectedness penalty and an optional image fidelity
term, together with sharp-interface reference values (mask perimeters and
Steiner lengths) for verification.
"""

from .energetics import (
    C0,
    FidelityData,
    MMParams,
    double_well,
    double_well_prime,
    fidelity_energy,
    fidelity_gradient,
    g_primitive,
    mm_energy,
    mm_energy_matched,
    mm_gradient,
)
from .flow import (
    DivergenceError,
    EnergyBreakdown,
    ExperimentConfig,
    FlowResult,
    InitMode,
    PenaltyMode,
    TopologyCache,
    initial_field,
    run,
    step,
    total_energy,
)
from .grid import (
    BinaryMask,
    BoundaryMode,
    DimensionMismatchError,
    Grid2D,
    ScalarField,
    clamp01,
    integrate,
    laplacian,
)
from .oracle import (
    SharpReference,
    SteinerResult,
    UnsupportedCardinalityError,
    connected_perimeter_reference,
    mask_contours,
    mst_length,
    perimeter_of_mask,
    sharp_reference,
    steiner_length,
)
from .pgm import PgmParseError, load_pgm, save_pgm
from .presets import Preset, make_preset
from .topology import (
    ComponentLabeling,
    ConsistencyError,
    GeodesicTable,
    ProfileParams,
    WeightedGraph,
    beta_prime,
    beta_profile,
    build_weighted_graph,
    complement_connectedness_energy,
    complement_connectedness_gradient,
    connectedness_energy,
    connectedness_gradient,
    label_components,
    pairwise_geodesics,
    simply_connected_energy,
    weight_prime,
    weight_profile,
)

__version__ = "0.1.0"
