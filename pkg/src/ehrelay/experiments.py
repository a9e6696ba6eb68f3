"""Sweep experiments over SNR and exhausted probability, and diversity fitting runs."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Any, Optional, Sequence

import numpy as np

from . import analytic
from .analytic import DiversityFit, FitError, diversity_fit, diversity_predicted
from .model import SystemParams, ValidationError, linear_to_db, validate
from .simulate import estimate_outage_many

log = logging.getLogger(__name__)

MODES = ("single_point", "snr_sweep", "pex_sweep", "diversity")

CSV_HEADER = (
    "snr_db",
    "p_ex",
    "p_direct_exact",
    "p_coop_exact",
    "p_coop_closed",
    "p_mc",
    "mc_se",
    "mc_ci_lo",
    "mc_ci_hi",
    "trials",
    "seed",
)

DEFAULT_SNR_RANGE = (5.0, 40.0, 5.0)
DEFAULT_DIVERSITY_RANGE = (30.0, 50.0, 5.0)
DEFAULT_FIG2_PEX = (1.0, 0.1, 0.01, 0.0)
# reference p_ex = 0 followed by a log grid 1e-4 .. 1 (two points per decade)
DEFAULT_FIG3_PEX = (0.0,) + tuple(float(v) for v in np.logspace(-4, 0, 9))


@dataclass(frozen=True)
class SweepSpec:
    mode: str = "snr_sweep"
    snr_db_range: Optional[tuple[float, float, float]] = None
    pex_values: Optional[tuple[float, ...]] = None
    fixed_snr_db: float = 20.0
    trials: int = 1_000_000
    seed: int = 2014
    confidence: float = 0.95
    outputs: tuple[str, ...] = ("csv", "svg")
    workers: int = 1
    diversity_source: str = "exact"
    noise: float = 1.0
    bandwidth: float = 2e6
    rate_min: float = 2e5

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValidationError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if self.snr_db_range is not None:
            start, stop, step = (float(v) for v in self.snr_db_range)
            if not step > 0:
                raise ValidationError("snr_db_range", f"step must be positive, got {step}")
            if stop < start:
                raise ValidationError("snr_db_range", f"empty range {start}:{stop}")
            object.__setattr__(self, "snr_db_range", (start, stop, step))
        if self.pex_values is not None:
            values = tuple(float(v) for v in self.pex_values)
            if not values:
                raise ValidationError("pex_values", "must not be empty")
            for v in values:
                if not 0.0 <= v <= 1.0:
                    raise ValidationError("pex_values", f"{v} is outside [0, 1]")
            object.__setattr__(self, "pex_values", values)
        if int(self.trials) < 1:
            raise ValidationError("trials", f"must be >= 1, got {self.trials}")
        if int(self.seed) < 0:
            raise ValidationError("seed", f"must be non-negative, got {self.seed}")
        if int(self.workers) < 1:
            raise ValidationError("workers", f"must be >= 1, got {self.workers}")
        if not 0.0 < float(self.confidence) < 1.0:
            raise ValidationError("confidence", f"must lie in (0, 1), got {self.confidence}")
        if self.diversity_source not in ("exact", "mc"):
            raise ValidationError("diversity_source", "must be 'exact' or 'mc'")
        unknown = set(self.outputs) - {"csv", "svg", "png", "script"}
        if unknown:
            raise ValidationError("outputs", f"unknown output kinds {sorted(unknown)}")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "workers", int(self.workers))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        # base system must be valid before any sweep starts
        SystemParams(1.0, 1.0, self.noise, self.bandwidth, self.rate_min)

    @property
    def snr_points(self) -> list[float]:
        default = DEFAULT_DIVERSITY_RANGE if self.mode == "diversity" else DEFAULT_SNR_RANGE
        start, stop, step = self.snr_db_range or default
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(n)]

    @property
    def pex_points(self) -> tuple[float, ...]:
        if self.pex_values is not None:
            return self.pex_values
        return DEFAULT_FIG3_PEX if self.mode == "pex_sweep" else DEFAULT_FIG2_PEX

    def system_at(self, snr_db: float) -> SystemParams:
        return SystemParams.from_snr_db(
            snr_db, noise=self.noise, bandwidth=self.bandwidth, rate_min=self.rate_min
        )


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    p_ex: float
    p_direct_exact: float
    p_coop_exact: float
    p_coop_closed: float
    p_mc: float
    mc_se: float
    mc_ci_lo: float
    mc_ci_hi: float
    trials: int
    seed: int
    outages: int = field(default=0, compare=False)
    closed_clamped: bool = field(default=False, compare=False)

    def csv_values(self) -> list[str]:
        out = []
        for name in CSV_HEADER:
            value = getattr(self, name)
            out.append(str(value) if isinstance(value, int) else format(value, ".17g"))
        return out

    def mc_agrees(self, k: float = 4.0) -> bool:
        """MC value within k standard errors of the exact analytic value (SE at the exact value)."""
        se = math.sqrt(self.p_coop_exact * (1.0 - self.p_coop_exact) / self.trials)
        return abs(self.p_mc - self.p_coop_exact) <= k * se


@dataclass
class SweepResult:
    mode: str
    rows: list[SweepRow]
    fits: list["DiversityReport"] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def curve(self, p_ex: float, column: str = "p_coop_exact") -> list[tuple[float, float]]:
        return [(r.snr_db, getattr(r, column)) for r in self.rows if r.p_ex == p_ex]

    def failed_checks(self, k: float = 4.0) -> list[SweepRow]:
        return [r for r in self.rows if not r.mc_agrees(k)]


@dataclass(frozen=True)
class DiversityReport:
    p_ex: float
    source: str
    fit: DiversityFit
    predicted: int


def _rows_at(params: SystemParams, snr_db: float, pex: Sequence[float], spec: SweepSpec):
    estimates = estimate_outage_many(
        params, pex, spec.trials, spec.seed, spec.workers, spec.confidence
    )
    rows = []
    for p_ex, est in zip(pex, estimates):
        sc = validate(params, p_ex)
        raw_closed = analytic._closed_form_unclamped(sc)
        rows.append(
            SweepRow(
                snr_db=snr_db,
                p_ex=p_ex,
                p_direct_exact=analytic.direct_outage_exact(sc),
                p_coop_exact=analytic.coop_outage_exact(sc),
                p_coop_closed=analytic.coop_outage_closed_form(sc),
                p_mc=est.p_hat,
                mc_se=est.std_err,
                mc_ci_lo=est.ci_lo,
                mc_ci_hi=est.ci_hi,
                trials=est.trials,
                seed=est.seed,
                outages=est.outages,
                closed_clamped=raw_closed > 1.0,
            )
        )
    return rows


def run_single_point(spec: SweepSpec, params: Optional[SystemParams] = None) -> SweepResult:
    """Evaluate every p_ex of the spec at one operating point.

    ``params`` defaults to equal powers at ``spec.fixed_snr_db``; with unequal
    powers the ``snr_db`` column reports the source SNR.
    """
    if params is None:
        params = spec.system_at(spec.fixed_snr_db)
        snr_db = spec.fixed_snr_db
    else:
        snr_db = linear_to_db(params.rho_s)
    return SweepResult("single_point", _rows_at(params, snr_db, spec.pex_points, spec))


def run_snr_sweep(spec: SweepSpec) -> SweepResult:
    """One row per (SNR, p_ex): outage against SNR for each exhausted probability."""
    rows: list[SweepRow] = []
    pex = spec.pex_points
    by_snr = [_rows_at(spec.system_at(s), s, pex, spec) for s in spec.snr_points]
    # ordered by curve, then SNR
    for i in range(len(pex)):
        rows.extend(block[i] for block in by_snr)
    return SweepResult("snr_sweep", rows)


def run_pex_sweep(spec: SweepSpec) -> SweepResult:
    """Outage against p_ex at a fixed SNR; p_ex = 0 and p_ex = 1 are the two reference systems."""
    return SweepResult(
        "pex_sweep",
        _rows_at(spec.system_at(spec.fixed_snr_db), spec.fixed_snr_db, spec.pex_points, spec),
    )


def run_diversity(spec: SweepSpec) -> SweepResult:
    """Fit the diversity order of each p_ex curve over the spec's SNR window."""
    result = run_snr_sweep(spec)
    result.mode = "diversity"
    column = "p_coop_exact" if spec.diversity_source == "exact" else "p_mc"
    for p_ex in spec.pex_points:
        pts = [(10.0 ** (s / 10.0), p) for s, p in result.curve(p_ex, column)]
        try:
            fit = diversity_fit(pts)
        except FitError as exc:
            if spec.diversity_source == "mc":
                raise FitError(
                    f"p_ex={p_ex}: {exc}. Monte Carlo found no outages at some SNR; "
                    "raise --trials or narrow the window"
                ) from exc
            raise
        result.fits.append(
            DiversityReport(p_ex, spec.diversity_source, fit, diversity_predicted(p_ex))
        )
    return result


RUNNERS = {
    "single_point": run_single_point,
    "snr_sweep": run_snr_sweep,
    "pex_sweep": run_pex_sweep,
    "diversity": run_diversity,
}


def run(spec: SweepSpec) -> SweepResult:
    return RUNNERS[spec.mode](spec)


# --- CSV --------------------------------------------------------------------


def table_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def read_csv(path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for rec in reader:
            values: dict[str, Any] = {}
            for name, text in zip(CSV_HEADER, rec):
                values[name] = int(text) if name in ("trials", "seed") else float(text)
            rows.append(SweepRow(**values))
    return rows


# --- config -----------------------------------------------------------------


def _parse_range(value) -> tuple[float, float, float]:
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ValidationError("snr_db_range", f"expected start:stop:step, got {value!r}")
        try:
            return tuple(float(p) for p in parts)  # type: ignore[return-value]
        except ValueError:
            raise ValidationError("snr_db_range", f"non-numeric range {value!r}") from None
    if len(value) != 3:
        raise ValidationError("snr_db_range", f"expected three numbers, got {value!r}")
    return tuple(float(v) for v in value)  # type: ignore[return-value]


def load_config(path) -> dict:
    """Read a JSON experiment file with top-level ``system``, ``energy`` and ``sweep`` keys."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValidationError("config", "top level must be a JSON object")
    unknown = set(doc) - {"system", "energy", "sweep"}
    if unknown:
        raise ValidationError("config", f"unknown top-level keys {sorted(unknown)}")
    return {k: dict(doc.get(k) or {}) for k in ("system", "energy", "sweep")}


def spec_from_config(config: dict, mode: str, overrides: Optional[dict] = None) -> SweepSpec:
    """Build a SweepSpec from a loaded config, letting non-None ``overrides`` win."""
    system = dict(config.get("system", {}))
    energy = dict(config.get("energy", {}))
    sweep = dict(config.get("sweep", {}))
    allowed = {f.name for f in fields(SweepSpec)}
    unknown = set(sweep) - allowed
    if unknown:
        raise ValidationError("sweep", f"unknown keys {sorted(unknown)}")
    for key in ("noise", "bandwidth", "rate_min"):
        if key in system:
            sweep[key] = system[key]
    if "p_ex" in energy and "pex_values" not in sweep:
        sweep["pex_values"] = [energy["p_ex"]]
    for key, value in (overrides or {}).items():
        if value is not None:
            sweep[key] = value
    sweep["mode"] = mode
    if "snr_db_range" in sweep and sweep["snr_db_range"] is not None:
        sweep["snr_db_range"] = _parse_range(sweep["snr_db_range"])
    if "pex_values" in sweep and sweep["pex_values"] is not None:
        sweep["pex_values"] = tuple(sweep["pex_values"])
    if "outputs" in sweep:
        sweep["outputs"] = tuple(sweep["outputs"])
    try:
        return SweepSpec(**sweep)
    except TypeError as exc:
        raise ValidationError("sweep", str(exc)) from None
