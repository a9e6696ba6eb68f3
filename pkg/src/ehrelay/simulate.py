"""Seeded Monte Carlo over the cooperative protocol, block by block.

Every trial owns a counter-based substream: trial ``i`` under seed ``s`` reads
the four uniforms produced by Philox with key derived from ``s`` at counter
``i``. The uniforms are, in order, the S-D, S-R and R-D gains and the relay
energy flag. Chunked vector evaluation reads the same uniforms, so estimates
depend only on ``(seed, trials)`` and never on how trials are split across
workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from .analytic import relay_snr
from .model import ChannelDraw, OutageEstimate, Scenario, validate

CHUNK_TRIALS = 1 << 18
UNIFORMS_PER_TRIAL = 4


def _key(seed: int) -> np.ndarray:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Generator positioned at the substream of trial ``trial`` under ``seed``."""
    return np.random.Generator(np.random.Philox(key=_key(seed), counter=trial))


def _gain(u):
    # U in [0, 1) -> 1 - U in (0, 1]; inverse transform of the unit-mean exponential
    return -np.log1p(-u)


def sample_channel(stream: np.random.Generator, p_ex: float = 0.0) -> ChannelDraw:
    """Draw one block: three independent unit-mean exponential gains, then the energy flag.

    The relay has energy with probability ``1 - p_ex``; the flag is decided by
    the fourth uniform alone, so it is independent of the gains.
    """
    u = stream.random(UNIFORMS_PER_TRIAL)
    g = _gain(u[:3])
    return ChannelDraw(
        g_sd=float(g[0]), g_sr=float(g[1]), g_rd=float(g[2]), energy_ok=bool(u[3] >= p_ex)
    )


def trial_outcome(draw: ChannelDraw, params, energy=None) -> bool:
    """True when the block is in outage under the protocol.

    The direct link is used whenever it supports R0; otherwise the relay
    forwards if it has energy, and the block fails iff the two-hop rate is
    below R0. Rates equal to R0 succeed.
    """
    sc = params if isinstance(params, Scenario) and energy is None else validate(params, energy)
    if draw.g_sd * sc.rho_s >= sc.g1:
        return False
    if not draw.energy_ok:
        return True
    return bool(relay_snr(draw.g_sr, draw.g_rd, sc) < sc.g2)


def _chunk_outage_counts(
    key: np.ndarray,
    start: int,
    n: int,
    rho_s: float,
    rho_r: float,
    g1: float,
    g2: float,
    p_ex_values: tuple[float, ...],
) -> list[int]:
    u = np.random.Generator(np.random.Philox(key=key, counter=start)).random(
        (n, UNIFORMS_PER_TRIAL)
    )
    g_sd = _gain(u[:, 0])
    direct_fail = g_sd * rho_s < g1
    sub = u[direct_fail]
    x = _gain(sub[:, 1]) * rho_s
    y = _gain(sub[:, 2]) * rho_r
    relay_fail = x * y / (x + y + 1.0) < g2
    u_energy = sub[:, 3]
    return [int(np.count_nonzero(relay_fail | (u_energy < p))) for p in p_ex_values]


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(s, min(CHUNK_TRIALS, trials - s)) for s in range(0, trials, CHUNK_TRIALS)]


def estimate_outage_many(
    params,
    p_ex_values: Sequence[float],
    trials: int,
    seed: int = 0,
    workers: int = 1,
    confidence: float = 0.95,
) -> list[OutageEstimate]:
    """Estimates for several exhausted probabilities from one set of common random numbers.

    Each returned estimate equals what :func:`estimate_outage` gives for that
    ``p_ex`` alone with the same seed and trial count.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    p_ex_values = tuple(validate(params, p).p_ex for p in p_ex_values)
    sc = validate(params, p_ex_values[0] if p_ex_values else 1.0)
    key = _key(seed)
    args = [
        (key, start, n, sc.rho_s, sc.rho_r, sc.g1, sc.g2, p_ex_values)
        for start, n in _chunks(trials)
    ]
    totals = [0] * len(p_ex_values)
    if workers == 1 or len(args) == 1:
        results = (_chunk_outage_counts(*a) for a in args)
        for counts in results:
            totals = [t + c for t, c in zip(totals, counts)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for counts in pool.map(_chunk_outage_counts, *zip(*args)):
                totals = [t + c for t, c in zip(totals, counts)]
    return [OutageEstimate.from_counts(c, trials, seed, confidence) for c in totals]


def estimate_outage(
    params,
    energy=None,
    trials: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
    confidence: float = 0.95,
) -> OutageEstimate:
    """Fraction of outage blocks over ``trials`` seeded protocol trials."""
    sc = params if isinstance(params, Scenario) and energy is None else validate(params, energy)
    return estimate_outage_many(sc.params, [sc.p_ex], trials, seed, workers, confidence)[0]


def plan_trials(p_out: float, rel_se: float = 0.1) -> int:
    """Trials needed for the standard error to be ``rel_se`` times ``p_out``.

    From SE/p = sqrt((1 - p)/(n p)): n = (1 - p) / (p rel_se^2).
    """
    if not 0.0 < p_out < 1.0:
        raise ValueError(f"p_out must lie in (0, 1), got {p_out}")
    if rel_se <= 0.0:
        raise ValueError(f"rel_se must be positive, got {rel_se}")
    return max(1, math.ceil((1.0 - p_out) / (p_out * rel_se**2)))
