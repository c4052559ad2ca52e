"""Artifact emission: CSV / JSON grids and static SVG heatmaps.

Every grid artifact carries a provenance block (config hash, package
version, seed) and round-trips through its serialized form: numeric cells
are pinned to 12 significant digits at artifact-construction time, so
parse(emit(x)) == x and re-emission is byte-identical.  SVG output is a
pure function of the artifact — no timestamps — with the provenance
embedded as metadata text and a fixed, documented color ramp.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .advantage import LABEL_NONE, LABEL_PEC, LABEL_RAW, RegimeGrid
from .errors import ValidationError

# Fixed color ramp for continuous [0, 1] heatmaps: dark blue -> yellow,
# linearly interpolated between these RGB stops.
COLOR_RAMP = (
    (0.00, (13, 8, 135)),
    (0.25, (126, 3, 168)),
    (0.50, (204, 71, 120)),
    (0.75, (248, 149, 64)),
    (1.00, (240, 249, 33)),
)

REGIME_COLORS = {LABEL_PEC: "#2a788e", LABEL_RAW: "#7ad151", LABEL_NONE: "#440154"}


def _pin(value: float) -> float:
    """Round to 12 significant digits (the serialized precision)."""
    if not math.isfinite(value):
        return value
    return float(f"{value:.11e}")


def _format(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return f"{value:.11e}"


def _parse_token(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


@dataclass(frozen=True)
class GridArtifact:
    """A 2-D sweep result plus provenance, in serialization-ready form.

    columns maps a column name to a row-major tuple-of-tuples grid; cell
    values are strings or floats already pinned to emission precision.
    """

    kind: str
    row_name: str
    row_values: tuple
    col_name: str
    col_values: tuple
    columns: dict
    provenance: dict

    def __post_init__(self):
        for key in ("config_hash", "version", "seed"):
            if key not in self.provenance:
                raise ValidationError(f"provenance block is missing {key!r}")
        shape = (len(self.row_values), len(self.col_values))
        for name, grid in self.columns.items():
            got = (len(grid), len(grid[0]) if grid else 0)
            if got != shape:
                raise ValidationError(f"column {name!r} has shape {got}, expected {shape}")


def make_provenance(config_hash: str, seed: int) -> dict:
    return {"config_hash": config_hash, "version": __version__, "seed": int(seed)}


def phase_artifact(grid: RegimeGrid, provenance: dict) -> GridArtifact:
    pec = tuple(tuple(_pin(v) for v in row) for row in grid.pec_success)
    raw = tuple(tuple(_pin(v) for v in row) for row in grid.raw_success)
    lab = tuple(tuple(str(v) for v in row) for row in grid.label)
    return GridArtifact(
        kind="phase-diagram",
        row_name="p", row_values=tuple(_pin(float(v)) for v in grid.p_values),
        col_name="n_shots", col_values=tuple(int(v) for v in grid.shot_values),
        columns={"pec_success": pec, "raw_success": raw, "label": lab},
        provenance=provenance,
    )


def centering_artifact(shift_axis, width_axis, true_grid, proxy_grid, error_grid,
                       provenance: dict) -> GridArtifact:
    return GridArtifact(
        kind="centering",
        row_name="rel_shift", row_values=tuple(_pin(float(v)) for v in shift_axis),
        col_name="rel_width", col_values=tuple(_pin(float(v)) for v in width_axis),
        columns={
            "true_success": tuple(tuple(_pin(float(v)) for v in row) for row in true_grid),
            "proxy_success": tuple(tuple(_pin(float(v)) for v in row) for row in proxy_grid),
            "relative_error": tuple(tuple(_pin(float(v)) for v in row) for row in error_grid),
        },
        provenance=provenance,
    )


# --- CSV ---------------------------------------------------------------

def grid_to_csv(artifact: GridArtifact) -> str:
    lines = [f"# kind={artifact.kind}"]
    for key in sorted(artifact.provenance):
        lines.append(f"# {key}={artifact.provenance[key]}")
    names = list(artifact.columns)
    lines.append(",".join([artifact.row_name, artifact.col_name] + names))
    for i, rv in enumerate(artifact.row_values):
        for j, cv in enumerate(artifact.col_values):
            cells = [_format(rv), _format(cv)]
            cells += [_format(artifact.columns[name][i][j]) for name in names]
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_grid_csv(text: str) -> GridArtifact:
    meta = {}
    header = None
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        else:
            rows.append([_parse_token(tok) for tok in line.split(",")])
    if header is None or not rows:
        raise ValidationError("CSV grid has no data rows")
    kind = meta.pop("kind", "grid")
    if "seed" in meta:
        meta["seed"] = int(meta["seed"])
    row_name, col_name, *names = header
    row_values, col_values = [], []
    for row in rows:
        if row[0] not in row_values:
            row_values.append(row[0])
        if row[1] not in col_values:
            col_values.append(row[1])
    shape = (len(row_values), len(col_values))
    if shape[0] * shape[1] != len(rows):
        raise ValidationError("CSV grid is ragged or out of order")
    columns = {}
    for k, name in enumerate(names):
        grid = [[row[2 + k] for row in rows[i * shape[1]:(i + 1) * shape[1]]]
                for i in range(shape[0])]
        columns[name] = tuple(tuple(r) for r in grid)
    return GridArtifact(kind=kind, row_name=row_name, row_values=tuple(row_values),
                        col_name=col_name, col_values=tuple(col_values),
                        columns=columns, provenance=meta)


# --- JSON --------------------------------------------------------------

def grid_to_json(artifact: GridArtifact) -> str:
    doc = {
        "kind": artifact.kind,
        "axes": {
            "row": {"name": artifact.row_name, "values": list(artifact.row_values)},
            "col": {"name": artifact.col_name, "values": list(artifact.col_values)},
        },
        "columns": {name: [list(row) for row in grid]
                    for name, grid in artifact.columns.items()},
        "provenance": artifact.provenance,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_grid_json(text: str) -> GridArtifact:
    doc = json.loads(text)
    return GridArtifact(
        kind=doc["kind"],
        row_name=doc["axes"]["row"]["name"],
        row_values=tuple(doc["axes"]["row"]["values"]),
        col_name=doc["axes"]["col"]["name"],
        col_values=tuple(doc["axes"]["col"]["values"]),
        columns={name: tuple(tuple(row) for row in grid)
                 for name, grid in doc["columns"].items()},
        provenance=doc["provenance"],
    )


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# --- SVG ---------------------------------------------------------------

def _ramp_color(value: float) -> str:
    if not math.isfinite(value):
        return "#bbbbbb"
    v = min(1.0, max(0.0, value))
    for (lo, c0), (hi, c1) in zip(COLOR_RAMP, COLOR_RAMP[1:]):
        if v <= hi:
            f = 0.0 if hi == lo else (v - lo) / (hi - lo)
            rgb = [round(a + f * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*COLOR_RAMP[-1][1])


def _cell_color(name: str, value) -> str:
    if name == "label":
        return REGIME_COLORS.get(str(value), "#bbbbbb")
    return _ramp_color(float(value))


def grid_to_svg(artifact: GridArtifact, cell: int = 8) -> str:
    """One panel per column, drawn as a grid of colored rects.

    Deterministic: depends only on the artifact contents; the provenance
    block is embedded as a <metadata> element.
    """
    names = list(artifact.columns)
    n_rows = len(artifact.row_values)
    n_cols = len(artifact.col_values)
    margin, gap, title_h = 40, 30, 18
    panel_w = n_cols * cell
    panel_h = n_rows * cell
    width = margin * 2 + len(names) * panel_w + (len(names) - 1) * gap
    height = margin * 2 + panel_h + title_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        "<metadata>"
        + " ".join(f"{k}={artifact.provenance[k]}" for k in sorted(artifact.provenance))
        + f" kind={artifact.kind}</metadata>",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for k, name in enumerate(names):
        x0 = margin + k * (panel_w + gap)
        y0 = margin + title_h
        parts.append(
            f'<text x="{x0}" y="{margin + 12}" font-family="monospace" '
            f'font-size="12">{name}</text>')
        grid = artifact.columns[name]
        for i in range(n_rows):
            # row 0 at the bottom so both axes increase up/right
            y = y0 + (n_rows - 1 - i) * cell
            for j in range(n_cols):
                color = _cell_color(name, grid[i][j])
                parts.append(
                    f'<rect x="{x0 + j * cell}" y="{y}" width="{cell}" '
                    f'height="{cell}" fill="{color}"/>')
        parts.append(
            f'<text x="{x0}" y="{y0 + panel_h + 14}" font-family="monospace" '
            f'font-size="10">{artifact.col_name}: {_format(artifact.col_values[0])}'
            f' .. {_format(artifact.col_values[-1])}</text>')
    parts.append(
        f'<text x="{margin}" y="{height - 8}" font-family="monospace" '
        f'font-size="10">{artifact.row_name}: {_format(artifact.row_values[0])} .. '
        f'{_format(artifact.row_values[-1])} (bottom to top)</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
