"""Political map: groups on a regular polygon, voters at DNA-weighted convex combinations."""

from __future__ import annotations

import io
import logging
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from .constants import MAP_MARKERS, MAP_PALETTE, MAP_SVG_HASHSALT, ROUNDTRIP_FORMAT
from .models import DnaVector, PoliticalMapPoint, PolytopeLayout
from .utils import (
    InvalidParameter,
    InvalidPermutation,
    IoError,
    MalformedRecord,
    OrderMismatch,
    format_percent,
    save_text_safely,
)

logger = logging.getLogger(__name__)

MAP_COLUMNS = ["voter_id", "gamma_x", "gamma_y", "nominal_group"]
DNA_COLUMN_PREFIX = "pi_"


def layout_groups(groups: list[str] | tuple[str, ...], order: list[str] | None = None) -> PolytopeLayout:
    """Vertices on the unit circle, the first at 90 degrees, going counter-clockwise."""
    groups = tuple(groups)
    if not groups:
        raise InvalidParameter("map: at least one group is required")
    if order is not None:
        order = tuple(order)
        if len(order) != len(groups) or set(order) != set(groups) or len(set(order)) != len(order):
            raise InvalidPermutation(
                f"map: order {list(order)} is not a permutation of {list(groups)}"
            )
        groups = order
    n = len(groups)
    angles = np.pi / 2.0 + 2.0 * np.pi * np.arange(n) / n
    vertices = np.column_stack([np.cos(angles), np.sin(angles)])
    return PolytopeLayout(groups=groups, vertices=vertices)


def _aligned_weights(layout: PolytopeLayout, dna: DnaVector) -> np.ndarray:
    if tuple(dna.groups) == layout.groups:
        return np.asarray(dna.weights, dtype=np.float64)
    if set(dna.groups) != set(layout.groups) or len(dna.groups) != len(layout.groups):
        raise OrderMismatch(
            f"map: DNA groups {list(dna.groups)} do not match layout groups {list(layout.groups)}"
        )
    # same groups, different order: follow the layout
    return np.array([dna.weight(group) for group in layout.groups])


def map_point(layout: PolytopeLayout, dna: DnaVector, nominal_group: str = "") -> PoliticalMapPoint:
    """gamma = sum_l pi_l * a_l."""
    weights = _aligned_weights(layout, dna)
    gamma = weights @ layout.vertices
    marker = layout.groups.index(nominal_group) if nominal_group in layout.groups else len(layout.groups)
    return PoliticalMapPoint(
        voter_id=dna.voter_id,
        gamma=gamma,
        nominal_group=nominal_group,
        marker=marker,
        dna=dna,
    )


def map_points(
    layout: PolytopeLayout, vectors: list[DnaVector], nominal: dict[str, str]
) -> list[PoliticalMapPoint]:
    return [map_point(layout, dna, nominal.get(dna.voter_id, "")) for dna in vectors]


def map_caption(description: str, expressed_variance: float | None) -> str:
    """Caption stamped under the map, e.g. ``Sparse PCA, k=2, p=10 (E-Var 41.20%)``."""
    if expressed_variance is None:
        return description
    return f"{description} (E-Var {format_percent(expressed_variance)})"


def build_map_figure(
    points: list[PoliticalMapPoint], layout: PolytopeLayout, caption: str = ""
) -> Figure:
    """Matplotlib figure of the map; one scatter collection per nominal group, in layout order."""
    if not points:
        raise InvalidParameter("map: nothing to render, the point list is empty")

    fig = Figure(figsize=(7.0, 7.5))
    ax = fig.add_axes((0.05, 0.08, 0.9, 0.87))
    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)

    outline = np.vstack([layout.vertices, layout.vertices[:1]])
    ax.plot(outline[:, 0], outline[:, 1], color="#444444", linewidth=0.8, zorder=1)
    for group, (x, y) in zip(layout.groups, layout.vertices, strict=True):
        ax.text(1.12 * x, 1.12 * y, group, ha="center", va="center", fontsize=10)

    n_markers = len(layout.groups) + 1
    for marker in range(n_markers):
        members = [point for point in points if point.marker == marker]
        if not members:
            continue
        gamma = np.array([point.gamma for point in members])
        label = layout.groups[marker] if marker < len(layout.groups) else "other"
        ax.scatter(
            gamma[:, 0],
            gamma[:, 1],
            marker=MAP_MARKERS[marker % len(MAP_MARKERS)],
            color=MAP_PALETTE[marker % len(MAP_PALETTE)],
            s=28,
            linewidths=0.4,
            edgecolors="black",
            label=label,
            zorder=2,
        )
    ax.legend(loc="lower right", fontsize=8, frameon=False)
    if caption:
        fig.text(0.5, 0.03, caption, ha="center", va="center", fontsize=10)
    return fig


def map_to_svg(points: list[PoliticalMapPoint], layout: PolytopeLayout, caption: str = "") -> str:
    fig = build_map_figure(points, layout, caption)
    buffer = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": MAP_SVG_HASHSALT, "svg.fonttype": "none"}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def map_to_csv(points: list[PoliticalMapPoint], layout: PolytopeLayout) -> str:
    """voter_id, gamma_x, gamma_y, nominal_group, then the full DNA as pi_<group> columns."""
    if not points:
        raise InvalidParameter("map: nothing to render, the point list is empty")
    rows = []
    for point in points:
        row = {
            "voter_id": point.voter_id,
            "gamma_x": float(point.gamma[0]),
            "gamma_y": float(point.gamma[1]),
            "nominal_group": point.nominal_group,
        }
        if point.dna is not None:
            weights = _aligned_weights(layout, point.dna)
            for group, weight in zip(layout.groups, weights, strict=True):
                row[f"{DNA_COLUMN_PREFIX}{group}"] = float(weight)
        rows.append(row)
    columns = MAP_COLUMNS + [
        f"{DNA_COLUMN_PREFIX}{group}" for group in layout.groups if any(p.dna is not None for p in points)
    ]
    frame = pd.DataFrame(rows, columns=columns)
    return frame.to_csv(index=False, float_format=ROUNDTRIP_FORMAT, lineterminator="\n")


def render_map(
    points: list[PoliticalMapPoint],
    layout: PolytopeLayout,
    out: Path,
    format: str = "svg",
    caption: str = "",
) -> Path:
    """Write the map as an SVG figure or as a coordinate CSV."""
    out = Path(out)
    if format == "svg":
        content = map_to_svg(points, layout, caption)
    elif format == "csv":
        content = map_to_csv(points, layout)
    else:
        raise InvalidParameter(f"map: unknown format '{format}' (expected svg or csv)")
    save_text_safely(content, out)
    logger.debug("map: wrote %d points to %s", len(points), out)
    return out


def read_map_csv(path: Path) -> list[PoliticalMapPoint]:
    """Parse a map CSV written by ``render_map(..., format="csv")``."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={"voter_id": str, "nominal_group": str}, keep_default_na=False)
    except FileNotFoundError:
        raise IoError(f"map: no such file {path}") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedRecord(f"cannot parse map CSV: {e}", source=str(path)) from e

    missing = [column for column in MAP_COLUMNS if column not in frame.columns]
    if missing:
        raise MalformedRecord(f"map CSV lacks column(s) {', '.join(missing)}", source=str(path))

    dna_columns = [column for column in frame.columns if column.startswith(DNA_COLUMN_PREFIX)]
    groups = tuple(column[len(DNA_COLUMN_PREFIX):] for column in dna_columns)
    if not groups:
        groups = tuple(dict.fromkeys(frame["nominal_group"]))

    points = []
    for record in frame.to_dict(orient="records"):
        dna = None
        if dna_columns:
            dna = DnaVector(
                voter_id=record["voter_id"],
                groups=groups,
                weights=np.array([float(record[column]) for column in dna_columns]),
            )
        nominal = record["nominal_group"]
        points.append(
            PoliticalMapPoint(
                voter_id=record["voter_id"],
                gamma=np.array([float(record["gamma_x"]), float(record["gamma_y"])]),
                nominal_group=nominal,
                marker=groups.index(nominal) if nominal in groups else len(groups),
                dna=dna,
            )
        )
    return points
