"""Performance metrics of RIS-assisted links over Nakagami-m fading."""

from .channel import (
    ChannelParams,
    LaguerreParams,
    SnrPoint,
    db_to_linear,
    laguerre_params,
    linear_to_db,
    per_element_shape,
    product_moments,
    snr_cdf,
    snr_pdf,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NoRootError,
    PoleError,
    PoleProximityError,
    QuadratureError,
    RisError,
)
from .metrics import (
    BPSK,
    AsymptoticGains,
    ModulationParams,
    asep_closed_form,
    asep_quadrature,
    asymptotic_gains,
    asymptotic_outage,
    capacity_closed_form,
    capacity_quadrature,
    log_outage_probability,
    outage_probability,
)
from .montecarlo import (
    McConfig,
    McEstimate,
    clt_baseline_cdf,
    mc_asep,
    mc_capacity,
    mc_outage,
    simulate_snr_samples,
)
from .optimizer import (
    OptProblem,
    OptResult,
    n_from_a,
    optimal_n_exact,
    optimal_n_log,
    optimal_n_quadratic,
)

__version__ = "0.1.0"
