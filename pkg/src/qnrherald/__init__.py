"""Click statistics and mode-count optima for quasi-number-resolving heralding."""
from .closed_form import (
    ClickStatistics,
    DegenerateHeraldError,
    HeraldedState,
    click_probability,
    click_probability_ideal,
    click_statistics,
    fidelity_large_M_limit,
    heralded_distribution,
    single_click_probability,
    single_photon_fidelity,
    stirling2,
    xi,
)
from .model import (
    DetectorParams,
    NumberDistribution,
    QnrConfig,
    SourceParams,
    multinomial_weight,
    thermal_distribution,
    truncation_cutoff,
)
from .optimizer import (
    OptimaReport,
    SearchBoundWarning,
    approx_fidelity_opt,
    approx_prob_local_max,
    find_fidelity_opt,
    find_prob_local_max,
    optimize,
)

__version__ = "0.1.0"
