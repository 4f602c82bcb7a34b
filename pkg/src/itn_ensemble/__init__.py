"""Maximum-entropy network ensembles of the international trade network."""
__version__ = "0.1.0"

from .binary import (
    BinaryModel,
    binary_graph_log_probability,
    binary_hamiltonian,
    binary_log_partition,
    expected_degrees,
    fit_delta,
    link_probability,
)
from .core import (
    BinarySnapshot,
    CountryRecord,
    DataError,
    FitError,
    RelativeSnapshot,
    TradeSnapshot,
    binarize,
    relative_quantities,
    strengths,
    symmetrize_flows,
)
from .weighted import (
    WeightedModel,
    build_model_from_snapshot,
    expected_strengths,
    expected_weight_matrix,
    theta_parameters,
    weight_log_density,
    weighted_hamiltonian,
    weighted_hamiltonian_relative,
    weighted_log_partition,
)
from .sampling import (
    EnsembleSample,
    SamplerConfig,
    metropolis_binary,
    metropolis_weighted,
    sample_binary_direct,
    sample_weighted_direct,
    sampler_diagnostics,
)
from .response import (
    evaluate_prediction,
    predict_relative_changes,
    predict_response,
    project_next_snapshot,
)
from .analytics import (
    censor_below_threshold,
    global_series,
    ks_distance,
    log_binned_curve,
    weight_distribution,
)
from .tables import assemble_snapshot, parse_gdp_table, parse_trade_table
