"""Figure rendering for harness results.

PNG files land next to the CSV output; the CSV stays the canonical record
and the figures are a convenience view of the same arrays.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIG_SIZE = (7.5, 4.5)
DPI = 150

SINR_PNG = "sinr_trace.png"
PD_PNG = "pd_curve.png"


def render_figures(result, out_dir) -> list:
    """Render the SINR-vs-snapshot and detection-curve figures; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=FIG_SIZE)
    snapshots = range(1, result.snapshot_count + 1)
    for name in result.algorithms:
        ax.plot(snapshots, result.sinr_db[name], label=name, linewidth=1.2)
    ax.axhline(
        result.optimum_sinr_db, color="black", linestyle="--", linewidth=1.0,
        label="optimum",
    )
    ax.set_xlabel("snapshot")
    ax.set_ylabel("output SINR (dB)")
    ax.set_title(f"mean output SINR over {result.num_trials} trials")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = out / SINR_PNG
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for name in result.algorithms:
        ax.plot(result.pd_grid_db, result.pd[name], label=name, linewidth=1.2)
    ax.set_xlabel("normalized SINR (dB)")
    ax.set_ylabel("probability of detection")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("detection probability vs normalized SINR")
    ax.grid(True, alpha=0.4)
    if result.algorithms:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = out / PD_PNG
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    paths.append(path)
    return paths
