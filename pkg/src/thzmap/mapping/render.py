"""Map cloud exports: CSV table and SVG plot."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MultipleLocator  # noqa: E402

from thzmap.mapping.points import MapCloud
from thzmap.scene.models import Scene

logger = logging.getLogger(__name__)

CLOUD_COLUMNS = ("x_m", "y_m", "power_db", "tau_ns", "theta_deg", "spurious")
SVG_HASH_SALT = "thzmap"
GRID_SPACING_M = 1.0


def save_cloud_csv(cloud: MapCloud, path: str | Path) -> Path:
    csv_path = Path(path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with csv_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CLOUD_COLUMNS)
        for point in cloud.points:
            writer.writerow(
                (
                    f"{point.position.x:.6f}",
                    f"{point.position.y:.6f}",
                    f"{point.source.power_db:.3f}",
                    f"{point.source.tau * 1e9:.6f}",
                    f"{math.degrees(point.source.theta):.4f}",
                    int(point.spurious),
                )
            )
    logger.info("wrote %d map points to %s", len(cloud), csv_path)
    return csv_path


def render_cloud_svg(cloud: MapCloud, scene: Scene, path: str | Path, title: str | None = None) -> Path:
    """Plot retained and spurious points over the ground-truth walls; output is byte-stable."""
    svg_path = Path(path)
    svg_path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, 6.0))
        for wall in scene.walls:
            ax.plot([wall.a.x, wall.b.x], [wall.a.y, wall.b.y], color="0.3", linewidth=1.5)
        positions = cloud.positions()
        flags = cloud.spurious_mask()
        if positions.size:
            ax.scatter(positions[~flags, 0], positions[~flags, 1], s=6, color="tab:blue", label="map")
            if flags.any():
                ax.scatter(
                    positions[flags, 0], positions[flags, 1], s=10, marker="x", color="tab:red", label="spurious"
                )
        ax.plot([scene.trx.position.x], [scene.trx.position.y], marker="^", color="black", label="TRx")
        ax.xaxis.set_major_locator(MultipleLocator(GRID_SPACING_M))
        ax.yaxis.set_major_locator(MultipleLocator(GRID_SPACING_M))
        ax.grid(True, linewidth=0.4)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper right", fontsize="small")
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info("rendered map %s", svg_path)
    return svg_path
