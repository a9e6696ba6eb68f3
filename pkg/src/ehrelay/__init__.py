"""Outage analysis of energy-harvesting amplify-and-forward relay networks over Rayleigh fading."""

from .analytic import (
    DiversityFit,
    FitError,
    coop_outage_closed_form,
    coop_outage_exact,
    direct_outage_approx,
    direct_outage_exact,
    diversity_fit,
    diversity_predicted,
    multiplicative_gain,
    relay_cdf,
    relay_outage_approx,
    relay_outage_exact,
    relay_snr,
)
from .model import (
    ChannelDraw,
    EnergyModel,
    OutageEstimate,
    RangeError,
    Scenario,
    SystemParams,
    ValidationError,
    validate,
)
from .simulate import estimate_outage, plan_trials, sample_channel, trial_outcome
from .special import DomainError, bessel_k1

__version__ = "0.1.0"
