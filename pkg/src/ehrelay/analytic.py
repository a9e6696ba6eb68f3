"""Closed-form outage probabilities, the two-hop SNR distribution and diversity fitting."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import EnergyModel, Scenario, validate
from .special import DomainError, bessel_k1, one_minus_x_k1

__all__ = [
    "DiversityFit",
    "FitError",
    "bessel_k1",
    "clamp_probability",
    "coop_outage_closed_form",
    "coop_outage_exact",
    "direct_outage_approx",
    "direct_outage_exact",
    "diversity_fit",
    "diversity_predicted",
    "multiplicative_gain",
    "relay_cdf",
    "relay_outage_approx",
    "relay_outage_exact",
    "relay_snr",
]

log = logging.getLogger(__name__)


class FitError(ValueError):
    pass


def clamp_probability(value: float, label: str = "probability") -> float:
    """Clip to [0, 1]; clipping is logged since it flags a formula used outside its regime."""
    if value > 1.0:
        log.info("%s = %.6g exceeds 1, clamped (high-SNR approximation out of regime)", label, value)
        return 1.0
    if value < 0.0:
        log.info("%s = %.6g below 0, clamped", label, value)
        return 0.0
    return value


def _scenario(params, energy=None) -> Scenario:
    if isinstance(params, Scenario) and energy is None:
        return params
    return validate(params, energy if energy is not None else EnergyModel(1.0))


def direct_outage_exact(params) -> float:
    """P[g_sd * rho_s < g1] = 1 - exp(-g1/rho_s) for a unit-mean exponential gain."""
    sc = _scenario(params)
    return -math.expm1(-sc.g1 / sc.rho_s)


def direct_outage_approx(params) -> float:
    sc = _scenario(params)
    return clamp_probability(sc.g1 / sc.rho_s, "direct_outage_approx")


def relay_snr(g_sr, g_rd, params):
    """End-to-end SNR x*y/(x+y+1) of the amplify-and-forward link, x = g_sr*rho_s, y = g_rd*rho_r.

    Accepts scalars or numpy arrays.
    """
    sc = _scenario(params)
    x = np.multiply(g_sr, sc.rho_s)
    y = np.multiply(g_rd, sc.rho_r)
    f = x * y / (x + y + 1.0)
    return float(f) if np.ndim(f) == 0 else f


def relay_cdf(z: float, params) -> float:
    """P[f < z] for the two-hop SNR f under independent Rayleigh fading.

    Evaluated as (1 - e^-a) + e^-a * (1 - b K1(b)) with
    a = (1/rho_s + 1/rho_r) z and b = sqrt(4 z (z+1) / (rho_s rho_r)),
    which keeps full relative precision when both a and b are tiny.
    """
    z = float(z)
    if math.isnan(z) or z < 0.0:
        raise DomainError(f"z must be non-negative, got {z!r}")
    if math.isinf(z):
        return 1.0
    sc = _scenario(params)
    a = (1.0 / sc.rho_s + 1.0 / sc.rho_r) * z
    b = 2.0 * math.sqrt(z * (z + 1.0) / (sc.rho_s * sc.rho_r))
    if math.isinf(b):
        return 1.0
    p = -math.expm1(-a) + math.exp(-a) * one_minus_x_k1(b)
    return min(max(p, 0.0), 1.0)


def relay_outage_exact(params) -> float:
    """Outage of the relay link given the relay has energy: P[f < g2]."""
    sc = _scenario(params)
    return relay_cdf(sc.g2, sc)


def relay_outage_approx(params) -> float:
    sc = _scenario(params)
    return clamp_probability((1.0 / sc.rho_s + 1.0 / sc.rho_r) * sc.g2, "relay_outage_approx")


def coop_outage_exact(params, energy=None) -> float:
    """Outage of the protocol: direct fails, and the relay is either silent or in outage."""
    sc = _scenario(params, energy)
    p_ex = sc.p_ex
    return direct_outage_exact(sc) * (p_ex + (1.0 - p_ex) * relay_outage_exact(sc))


def _gain(sc: Scenario) -> float:
    p_ex = sc.p_ex
    return p_ex + (1.0 - p_ex) * (1.0 / sc.rho_s + 1.0 / sc.rho_r) * sc.g2


def _closed_form_unclamped(sc: Scenario) -> float:
    return (sc.g1 / sc.rho_s) * _gain(sc)


def coop_outage_closed_form(params, energy=None) -> float:
    """High-SNR closed form (g1/rho_s) [p_ex + (1/rho_s + 1/rho_r) g2 (1 - p_ex)], clamped."""
    sc = _scenario(params, energy)
    return clamp_probability(_closed_form_unclamped(sc), "coop_outage_closed_form")


def coop_outage_closed_form_equal_power(rho: float, g1: float, g2: float, p_ex: float) -> float:
    """Equal-power form g1 p_ex / rho + 2 g1 g2 (1 - p_ex) / rho^2, unclamped."""
    return g1 * p_ex / rho + 2.0 * g1 * g2 * (1.0 - p_ex) / rho**2


def diversity_predicted(energy) -> int:
    """Diversity order of the protocol: 2 with an always-on relay, otherwise 1."""
    p_ex = energy.p_ex if isinstance(energy, (EnergyModel, Scenario)) else EnergyModel(energy).p_ex
    return 2 if p_ex == 0.0 else 1


def multiplicative_gain(params, energy=None) -> float:
    """Ratio of cooperative to direct outage in the high-SNR forms.

    Evaluated as p_ex + (1 - p_ex)(1/rho_s + 1/rho_r) g2, which is the
    unclamped closed form divided by g1/rho_s at any SNR. Tends to p_ex as
    the SNR grows.
    """
    return _gain(_scenario(params, energy))


@dataclass(frozen=True)
class DiversityFit:
    """Least-squares fit of log10(p_out) = intercept - slope * log10(rho)."""

    slope: float
    intercept: float
    points_used: int
    residual_rms: float


def diversity_fit(points: Iterable[Sequence[float]]) -> DiversityFit:
    """Estimate the diversity order from (rho, p_out) pairs by unweighted least squares."""
    pts = [(float(r), float(p)) for r, p in points]
    if len(pts) < 2:
        raise FitError(f"need at least 2 points, got {len(pts)}")
    for rho, p in pts:
        if not rho > 0.0:
            raise FitError(f"SNR must be positive, got {rho}")
        if not 0.0 < p < 1.0:
            raise FitError(
                f"outage probability {p} at rho={rho} is outside (0, 1); "
                "with Monte Carlo input, raise the trial count"
            )
    x = np.log10([r for r, _ in pts])
    y = np.log10([p for _, p in pts])
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 0.0:
        raise FitError("all SNR values are identical; the fit is singular")
    fitted_slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - fitted_slope * x.mean())
    resid = y - (intercept + fitted_slope * x)
    return DiversityFit(
        slope=-fitted_slope,
        intercept=intercept,
        points_used=len(pts),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
    )
