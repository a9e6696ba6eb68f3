"""Domain types for the energy-harvesting relay network and their validation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional


class ValidationError(ValueError):
    """A user-supplied parameter is out of range.

    ``field`` names the offending parameter.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class RangeError(ValidationError):
    """A probability lies outside [0, 1]."""


def _require_positive(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a number, got {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(name, f"must be strictly positive and finite, got {value!r}")
    return value


def _pow2_minus_one(exponent: float) -> float:
    try:
        return math.expm1(exponent * math.log(2.0))
    except OverflowError:
        return math.inf


def db_to_linear(db: float) -> float:
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SystemParams:
    """Transmit powers (W), noise variance (W), bandwidth (Hz) and target rate (bit/s)."""

    p_s: float
    p_r: float
    noise: float
    bandwidth: float
    rate_min: float

    def __post_init__(self) -> None:
        for name in ("p_s", "p_r", "noise", "bandwidth", "rate_min"):
            object.__setattr__(self, name, _require_positive(name, getattr(self, name)))

    @classmethod
    def from_snr_db(
        cls,
        snr_db: float,
        *,
        noise: float = 1.0,
        bandwidth: float = 2e6,
        rate_min: float = 2e5,
    ) -> "SystemParams":
        """Equal source and relay power giving a per-receiver SNR of ``snr_db``."""
        power = db_to_linear(snr_db) * noise
        return cls(p_s=power, p_r=power, noise=noise, bandwidth=bandwidth, rate_min=rate_min)

    @property
    def rho_s(self) -> float:
        return self.p_s / self.noise

    @property
    def rho_r(self) -> float:
        return self.p_r / self.noise

    @property
    def spectral_rate(self) -> float:
        return self.rate_min / self.bandwidth

    @property
    def g1(self) -> float:
        """SNR threshold of the direct link, 2^(R0/W) - 1."""
        return _pow2_minus_one(self.spectral_rate)

    @property
    def g2(self) -> float:
        """SNR threshold of the two-hop link, 2^(2 R0/W) - 1 (half-duplex penalty)."""
        return _pow2_minus_one(2.0 * self.spectral_rate)


@dataclass(frozen=True)
class EnergyModel:
    """On-off harvested energy model, summarised by the exhausted probability.

    ``p_av`` and ``t_block`` are carried for bookkeeping and never enter a
    computation.
    """

    p_ex: float
    p_av: Optional[float] = None
    t_block: Optional[float] = None

    def __post_init__(self) -> None:
        try:
            p_ex = float(self.p_ex)
        except (TypeError, ValueError):
            raise RangeError("p_ex", f"expected a probability, got {self.p_ex!r}") from None
        if not 0.0 <= p_ex <= 1.0:
            raise RangeError("p_ex", f"must lie in [0, 1], got {self.p_ex!r}")
        object.__setattr__(self, "p_ex", p_ex)
        for name in ("p_av", "t_block"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _require_positive(name, value))


@dataclass(frozen=True)
class ChannelDraw:
    """One block: the three channel power gains and the relay energy flag."""

    g_sd: float
    g_sr: float
    g_rd: float
    energy_ok: bool


@dataclass(frozen=True)
class Scenario:
    """Validated parameter bundle with derived SNRs and thresholds."""

    params: SystemParams
    energy: EnergyModel
    rho_s: float
    rho_r: float
    g1: float
    g2: float

    @property
    def p_ex(self) -> float:
        return self.energy.p_ex

    def with_p_ex(self, p_ex: float) -> "Scenario":
        return validate(self.params, EnergyModel(p_ex, self.energy.p_av, self.energy.t_block))


def validate(params, energy: Optional[EnergyModel] = None) -> Scenario:
    """Check raw inputs and return a :class:`Scenario`.

    ``params`` may be a :class:`SystemParams`, a mapping of its fields, or an
    existing :class:`Scenario` (returned re-derived, hence equal). ``energy``
    may be an :class:`EnergyModel`, a mapping, or a bare ``p_ex`` float.
    """
    if isinstance(params, Scenario):
        if energy is None:
            energy = params.energy
        params = params.params
    if isinstance(params, dict):
        params = SystemParams(**params)
    elif not isinstance(params, SystemParams):
        raise TypeError(f"expected SystemParams, got {type(params).__name__}")
    if energy is None:
        raise ValidationError("energy", "an energy model is required")
    if isinstance(energy, dict):
        energy = EnergyModel(**energy)
    elif not isinstance(energy, EnergyModel):
        energy = EnergyModel(energy)
    return Scenario(
        params=params,
        energy=energy,
        rho_s=params.rho_s,
        rho_r=params.rho_r,
        g1=params.g1,
        g2=params.g2,
    )


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo outage fraction with a normal-approximation interval."""

    p_hat: float
    trials: int
    std_err: float
    ci_lo: float
    ci_hi: float
    seed: int
    outages: int = 0
    confidence: float = 0.95

    @classmethod
    def from_counts(
        cls, outages: int, trials: int, seed: int, confidence: float = 0.95
    ) -> "OutageEstimate":
        if trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0.0 < confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
        p_hat = outages / trials
        std_err = math.sqrt(p_hat * (1.0 - p_hat) / trials)
        z = z_value(confidence)
        return cls(
            p_hat=p_hat,
            trials=trials,
            std_err=std_err,
            ci_lo=max(0.0, p_hat - z * std_err),
            ci_hi=min(1.0, p_hat + z * std_err),
            seed=seed,
            outages=outages,
            confidence=confidence,
        )

    def null_std_err(self, p_true: float) -> float:
        """Standard error of the estimator if the true outage probability is ``p_true``."""
        return math.sqrt(p_true * (1.0 - p_true) / self.trials)

    def agrees_with(self, p_true: float, k: float = 4.0) -> bool:
        """Two-sided score test: |p_hat - p_true| <= k standard errors under p_true.

        The plug-in ``std_err`` collapses to zero when no outage is observed,
        which would reject any positive ``p_true``; the standard error at the
        hypothesised value does not.
        """
        return abs(self.p_hat - p_true) <= k * self.null_std_err(p_true)


def z_value(confidence: float) -> float:
    return NormalDist().inv_cdf(0.5 + 0.5 * confidence)
