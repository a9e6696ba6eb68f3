"""Figures and output files for a finished sweep.

SVG is written by hand (see :mod:`ehrelay.svg`); PNG rendering goes through
matplotlib, imported lazily so the library and CSV path do not need it.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from . import svg
from .experiments import SweepResult, SweepRow, SweepSpec, table_to_csv

log = logging.getLogger(__name__)

BASENAMES = {
    "single_point": "eval",
    "snr_sweep": "sweep_snr",
    "pex_sweep": "sweep_pex",
    "diversity": "diversity",
}


def _pex_order(rows: Sequence[SweepRow]) -> list[float]:
    seen: list[float] = []
    for r in rows:
        if r.p_ex not in seen:
            seen.append(r.p_ex)
    return seen


def _snr_chart(result: SweepResult, title: str) -> str:
    series = []
    for i, p_ex in enumerate(_pex_order(result.rows)):
        rows = [r for r in result.rows if r.p_ex == p_ex]
        c = svg.color(i)
        series.append(svg.Series(svg.label_pex(p_ex, "exact"), [(r.snr_db, r.p_coop_exact) for r in rows], c))
        series.append(
            svg.Series(
                svg.label_pex(p_ex, "closed"),
                [(r.snr_db, r.p_coop_closed) for r in rows],
                c,
                dashed=True,
            )
        )
        series.append(
            svg.Series(
                svg.label_pex(p_ex, "MC"),
                [(r.snr_db, r.p_mc) for r in rows],
                c,
                markers=True,
                line=False,
                errors=[(r.snr_db, r.mc_ci_lo, r.mc_ci_hi) for r in rows],
            )
        )
    return svg.line_chart(series, title, "SNR (dB)", "outage probability")


def _pex_chart(result: SweepResult) -> str:
    rows = sorted(result.rows, key=lambda r: r.p_ex)
    positive = [r for r in rows if r.p_ex > 0]
    snr = rows[0].snr_db
    hlines = [svg.HLine("direct transmission", rows[0].p_direct_exact, "#333333")]
    zero = [r for r in rows if r.p_ex == 0.0]
    if zero:
        hlines.append(svg.HLine("constant-power relay", zero[0].p_coop_exact, "#999999"))
    series = [
        svg.Series("exact", [(r.p_ex, r.p_coop_exact) for r in positive], svg.color(0)),
        svg.Series("closed form", [(r.p_ex, r.p_coop_closed) for r in positive], svg.color(1), dashed=True),
        svg.Series(
            "Monte Carlo",
            [(r.p_ex, r.p_mc) for r in positive],
            svg.color(2),
            markers=True,
            line=False,
            errors=[(r.p_ex, r.mc_ci_lo, r.mc_ci_hi) for r in positive],
        ),
    ]
    return svg.line_chart(
        series,
        f"Outage vs energy-exhausted probability at {snr:g} dB",
        "energy-exhausted probability p_ex",
        "outage probability",
        log_x=True,
        hlines=hlines,
    )


def render_svg(result: SweepResult) -> str:
    if result.mode == "pex_sweep":
        return _pex_chart(result)
    title = "Diversity window" if result.mode == "diversity" else "Outage vs SNR"
    return _snr_chart(result, title)


def render_png(result: SweepResult, path: Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    if result.mode == "pex_sweep":
        rows = sorted((r for r in result.rows if r.p_ex > 0), key=lambda r: r.p_ex)
        x = [r.p_ex for r in rows]
        ax.loglog(x, [r.p_coop_exact for r in rows], "-", label="exact")
        ax.loglog(x, [r.p_coop_closed for r in rows], "--", label="closed form")
        ax.plot(x, [r.p_mc for r in rows], "o", mfc="none", label="Monte Carlo")
        ax.axhline(result.rows[0].p_direct_exact, color="k", ls=":", label="direct transmission")
        zero = [r for r in result.rows if r.p_ex == 0.0]
        if zero:
            ax.axhline(zero[0].p_coop_exact, color="grey", ls=":", label="constant-power relay")
        ax.set_xlabel("energy-exhausted probability $p_{ex}$")
    else:
        for i, p_ex in enumerate(_pex_order(result.rows)):
            rows = [r for r in result.rows if r.p_ex == p_ex]
            c = f"C{i}"
            x = [r.snr_db for r in rows]
            ax.semilogy(x, [r.p_coop_exact for r in rows], "-", color=c, label=f"$p_{{ex}}$={p_ex:g}")
            ax.semilogy(x, [r.p_coop_closed for r in rows], "--", color=c)
            mc = [(r.snr_db, r.p_mc) for r in rows if r.p_mc > 0]
            if mc:
                ax.semilogy(*zip(*mc), "o", color=c, mfc="none")
        ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("outage probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


_SCRIPT = '''"""Plot {csv} (generated alongside it). Requires pandas and matplotlib."""
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv("{csv}")
fig, ax = plt.subplots()
{body}
ax.set_ylabel("outage probability")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.savefig("{png}", dpi=150)
'''

_SNR_BODY = '''for i, (p_ex, g) in enumerate(df.groupby("p_ex", sort=False)):
    ax.semilogy(g.snr_db, g.p_coop_exact, "-", color=f"C{i}", label=f"p_ex={p_ex:g}")
    ax.semilogy(g.snr_db, g.p_coop_closed, "--", color=f"C{i}")
    ax.semilogy(g.snr_db, g.p_mc.where(g.p_mc > 0), "o", color=f"C{i}", mfc="none")
ax.set_xlabel("SNR (dB)")'''

_PEX_BODY = '''g = df[df.p_ex > 0].sort_values("p_ex")
ax.loglog(g.p_ex, g.p_coop_exact, "-", label="exact")
ax.loglog(g.p_ex, g.p_coop_closed, "--", label="closed form")
ax.loglog(g.p_ex, g.p_mc.where(g.p_mc > 0), "o", mfc="none", label="Monte Carlo")
ax.axhline(df.p_direct_exact.iloc[0], color="k", ls=":", label="direct")
ax.axhline(df[df.p_ex == 0].p_coop_exact.min(), color="grey", ls=":", label="constant-power relay")
ax.set_xlabel("p_ex")'''


def plotting_script(result: SweepResult, csv_name: str, png_name: str) -> str:
    body = _PEX_BODY if result.mode == "pex_sweep" else _SNR_BODY
    return _SCRIPT.format(csv=csv_name, png=png_name, body=body)


def emit_outputs(result: SweepResult, spec: SweepSpec, out_dir: Path) -> list[Path]:
    """Write the CSV and whichever figure files ``spec.outputs`` requests.

    Everything is rendered in memory first so a failure leaves no partial set.
    """
    if not result.rows:
        raise ValueError("empty result table; nothing written")
    out_dir = Path(out_dir)
    base = BASENAMES[result.mode]
    payloads: list[tuple[Path, str]] = []
    if "csv" in spec.outputs or "script" in spec.outputs:
        payloads.append((out_dir / f"{base}.csv", table_to_csv(result.rows)))
    if "svg" in spec.outputs:
        payloads.append((out_dir / f"{base}.svg", render_svg(result)))
    if "script" in spec.outputs:
        payloads.append(
            (out_dir / f"plot_{base}.py", plotting_script(result, f"{base}.csv", f"{base}.png"))
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for path, text in payloads:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)
    if "png" in spec.outputs:
        written.append(render_png(result, out_dir / f"{base}.png"))
    for path in written:
        log.info("wrote %s", path)
    return written
