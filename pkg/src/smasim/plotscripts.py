"""Generate standalone matplotlib scripts that redraw a figure from CSV output."""

from pprint import pformat

__all__ = ["FIGURE_FOR_EXPERIMENT", "emit_plot_script"]

FIGURE_FOR_EXPERIMENT = {"ber": "fig2", "sum_rate": "fig3", "outage": "fig4"}

_YLABEL = {"fig2": "BER", "fig3": "Ergodic sum rate (bit/s/Hz)", "fig4": "Outage probability"}
_TITLE = {"fig2": "BER: SMA vs NOMA", "fig3": "Sum rate: SMA vs NOMA",
          "fig4": "Outage: SMA vs NOMA"}

_TEMPLATE = '''\
"""Redraw {figure} from the CSV files next to this script.

Generated by smasim; run with ``python {script_name}``.
"""
import csv
import math
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
LOG_Y = {log_y}
CLAMP_ANALYTIC = {clamp}
CURVES = {curves}
NOTES = {notes}


def read(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {{k: [float(r[k]) for r in rows] for k in rows[0]}}


def keep(x, y):
    pts = [(a, b) for a, b in zip(x, y) if math.isfinite(b) and (b > 0 or not LOG_Y)]
    return [p[0] for p in pts], [p[1] for p in pts]


fig, ax = plt.subplots(figsize=(6, 4.2))
for curve in CURVES:
    data = read(curve["file"])
    x, y = keep(data["snr_db"], data["estimate"])
    line, = ax.plot(x, y, curve["marker"], linestyle="none", label=curve["label"] + " (sim.)")
    if curve["analytic"]:
        ana = data["analytic"]
        if CLAMP_ANALYTIC.get(curve["file"]):
            ana = [min(v, 0.5) for v in ana]
        xa, ya = keep(data["snr_db"], ana)
        if ya:
            ax.plot(xa, ya, "-", color=line.get_color(), label=curve["label"] + " (" + curve["analytic"] + ")")
if LOG_Y:
    ax.set_yscale("log")
ax.set_xlabel("Average transmitted SNR (dB)")
ax.set_ylabel({ylabel!r})
ax.set_title({title!r})
for k, note in enumerate(NOTES):
    ax.text(0.02, 0.04 + 0.06 * k, note, transform=ax.transAxes, fontsize=8)
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png!r}), dpi=150)
'''

_MARKERS = ["o", "s", "^", "v", "D", "x", "+", "*"]


def emit_plot_script(series_files, figure: str) -> str:
    """Return the source of a plot script for ``figure``.

    Parameters
    ----------
    series_files : list of dict
        One entry per CSV with keys ``file``, ``scheme``, ``metric`` (a
        :class:`~smasim.montecarlo.Metric` value string), ``label`` and
        ``has_analytic``.
    figure : {"fig2", "fig3", "fig4"}
        Figure convention: log-y BER, linear-y sum rate, log-y outage.
    """
    if figure not in _YLABEL:
        raise ValueError(f"unknown figure {figure!r}")
    if not series_files:
        raise ValueError(f"no series to plot for {figure}")
    curves = []
    notes = []
    clamp = {}
    for k, entry in enumerate(series_files):
        if figure == "fig4" and entry["scheme"] == "SMA" and entry["metric"] == "outage_ue2":
            notes.append(f"{entry['label']}: not shown, P_out = 0 (target <= log2 Nt)")
            continue
        analytic = ""
        if entry.get("has_analytic"):
            if entry["metric"] == "ber_ue2" and entry["scheme"] == "SMA":
                analytic = "union bound"
                clamp[entry["file"]] = True
            else:
                analytic = "analytic"
        curves.append({"file": entry["file"], "label": entry["label"],
                       "marker": _MARKERS[k % len(_MARKERS)], "analytic": analytic})
    if not curves:
        raise ValueError(f"no plottable series for {figure}")
    return _TEMPLATE.format(
        figure=figure,
        script_name=f"plot_{figure}.py",
        log_y=figure != "fig3",
        clamp=repr(clamp),
        curves=pformat(curves, sort_dicts=False),
        notes=repr(notes),
        ylabel=_YLABEL[figure],
        title=_TITLE[figure],
        png=f"{figure}.png",
    )
