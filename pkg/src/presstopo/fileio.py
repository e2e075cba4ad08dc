"""File interfaces: VTK voxel export, history CSV, checkpoints, config files.

Density fields are written as legacy-ASCII structured-points VTK with
CELL_DATA (and optional nodal pressure/displacement as POINT_DATA), the
format every standard voxel viewer reads.  Half-domain runs can be mirrored
at export time so they render as full domains.  Run configuration is parsed
from INI-style files plus flag overrides.
"""

from __future__ import annotations

import configparser
import dataclasses
import json

import numpy as np

from .driver import RunConfig, RunHistory

RECOMMENDED_ISOVALUE = 0.3

_AXES = {"x": 0, "y": 1, "z": 2}


def _cell_grid(values: np.ndarray, dims) -> np.ndarray:
    # flat order is y fastest, then z, then x -> axes (x, z, y)
    nx, ny, nz = dims
    return np.asarray(values, dtype=float).reshape(nx, nz, ny)


def _point_grid(values: np.ndarray, dims) -> np.ndarray:
    nx, ny, nz = dims
    return np.asarray(values, dtype=float).reshape(nx + 1, nz + 1, ny + 1)


def _mirror_cells(grid: np.ndarray, axis: str) -> np.ndarray:
    ax = {"x": 0, "z": 1, "y": 2}[axis]
    return np.concatenate([np.flip(grid, axis=ax), grid], axis=ax)


def _mirror_points(grid: np.ndarray, axis: str, negate: bool = False) -> np.ndarray:
    ax = {"x": 0, "z": 1, "y": 2}[axis]
    reflected = np.flip(grid, axis=ax)
    if negate:
        reflected = -reflected
    # drop the shared symmetry-plane layer from the reflected half
    sel = [slice(None)] * grid.ndim
    sel[ax] = slice(0, grid.shape[ax] - 1)
    return np.concatenate([reflected[tuple(sel)], grid], axis=ax)


def _vtk_order_cells(grid: np.ndarray) -> np.ndarray:
    # (x, z, y) layout -> VTK wants x fastest, then y, then z
    return grid.transpose(1, 2, 0).ravel()


def _fmt(values: np.ndarray) -> str:
    flat = np.asarray(values, dtype=float).ravel()
    lines = []
    for start in range(0, len(flat), 9):
        lines.append(" ".join(f"{v:.9g}" for v in flat[start:start + 9]))
    return "\n".join(lines)


def export_vtk(
    path,
    dims,
    density: np.ndarray,
    pressure: np.ndarray | None = None,
    displacement: np.ndarray | None = None,
    mirror_axes=(),
    comment: str = "",
) -> None:
    """Write a legacy-ASCII structured-points file.

    Parameters
    ----------
    dims : (nelx, nely, nelz)
        Element counts of the (unmirrored) field.
    density : (nel,) array
        Cell densities in the mesh's flat element order.
    pressure : (nno,) array, optional
        Nodal scalar, exported as POINT_DATA.
    displacement : (3*nno,) array, optional
        Nodal vector (x/y/z interleaved), exported as POINT_DATA vectors.
    mirror_axes : iterable of {"x", "y", "z"}
        Axes to reflect so half-domain runs export as full domains.
    """
    for ax in mirror_axes:
        if ax not in _AXES:
            raise ValueError(f"unknown mirror axis {ax!r}")

    cells = _cell_grid(density, dims)
    for ax in mirror_axes:
        cells = _mirror_cells(cells, ax)
    ncx, ncz, ncy = cells.shape

    point_blocks = []
    if pressure is not None:
        grid = _point_grid(pressure, dims)
        for ax in mirror_axes:
            grid = _mirror_points(grid, ax)
        point_blocks.append(
            ("SCALARS pressure double 1\nLOOKUP_TABLE default", _fmt(_vtk_order_cells(grid)))
        )
    if displacement is not None:
        displacement = np.asarray(displacement, dtype=float).reshape(-1, 3)
        comps = []
        for c, name in enumerate("xyz"):
            grid = _point_grid(displacement[:, c], dims)
            for ax in mirror_axes:
                grid = _mirror_points(grid, ax, negate=(name == ax))
            comps.append(_vtk_order_cells(grid))
        vec = np.column_stack(comps)
        point_blocks.append(("VECTORS displacement double", _fmt(vec)))

    header = comment or "density field"
    lines = [
        "# vtk DataFile Version 3.0",
        f"{header}; recommended isovalue {RECOMMENDED_ISOVALUE}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {ncx + 1} {ncy + 1} {ncz + 1}",
        "ORIGIN 0 0 0",
        "SPACING 1 1 1",
        f"CELL_DATA {cells.size}",
        "SCALARS density double 1",
        "LOOKUP_TABLE default",
        _fmt(_vtk_order_cells(cells)),
    ]
    if point_blocks:
        lines.append(f"POINT_DATA {(ncx + 1) * (ncy + 1) * (ncz + 1)}")
        for head, body in point_blocks:
            lines.append(head)
            lines.append(body)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_vtk_cell_density(path):
    """Parse back the density CELL_DATA of a file written by :func:`export_vtk`.

    Returns ``(dims, values)`` with dims in cell counts and values in VTK
    order (x fastest).  Intended for round-trip tests and re-imports.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    dims = None
    values = []
    in_scalars = False
    expected = None
    for i, line in enumerate(lines):
        if line.startswith("DIMENSIONS"):
            nx, ny, nz = (int(t) for t in line.split()[1:4])
            dims = (nx - 1, ny - 1, nz - 1)
        elif line.startswith("CELL_DATA"):
            expected = int(line.split()[1])
        elif line.startswith("LOOKUP_TABLE") and expected is not None and not values:
            in_scalars = True
        elif in_scalars:
            if line and line[0].isalpha() or line.startswith("POINT_DATA"):
                break
            values.extend(float(t) for t in line.split())
            if len(values) >= expected:
                break
    if dims is None or expected is None or len(values) != expected:
        raise ValueError(f"{path} is not a structured-points density export")
    return dims, np.array(values)


def export_history(history: RunHistory, path) -> None:
    """Write the run history as CSV (full float precision)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iter,compliance,compliance_normalized,volfrac,change,seconds\n")
        for it, obj, obj_n, vol, ch, sec in history.rows():
            fh.write(f"{it},{obj!r},{obj_n!r},{vol!r},{ch!r},{sec!r}\n")


def save_checkpoint(path, result) -> None:
    """Persist a finished (or partial) run for later re-export."""
    cfg = dataclasses.asdict(result.config)
    np.savez(
        path,
        xphys=result.xphys,
        design=result.design,
        pressure=result.pressure,
        displacement=result.displacement,
        dims=np.array([result.config.nelx, result.config.nely, result.config.nelz]),
        mirror_axes=np.array(result.problem.mirror_axes, dtype="U1"),
        config_json=np.array(json.dumps(cfg)),
    )


def load_checkpoint(path) -> dict:
    """Load a checkpoint written by :func:`save_checkpoint`."""
    with np.load(path, allow_pickle=False) as data:
        out = {
            "xphys": data["xphys"],
            "design": data["design"],
            "pressure": data["pressure"],
            "displacement": data["displacement"],
            "dims": tuple(int(v) for v in data["dims"]),
            "mirror_axes": tuple(str(a) for a in data["mirror_axes"]),
            "config": json.loads(str(data["config_json"])),
        }
    return out


# configuration files ------------------------------------------------------

_CONFIG_SECTIONS = {
    "run": (
        "preset", "nelx", "nely", "nelz", "volfrac", "penal", "rmin", "etaf",
        "betaf", "lst", "maxit", "pin", "move_limit", "change_tol",
        "normalization_target", "backend",
    ),
    "flow": ("kv", "epsf", "r", "dels"),
    "elastic": ("e1", "emin_rel", "nu"),
    "output": ("history", "vtk", "checkpoint"),
}

_INT_FIELDS = {"nelx", "nely", "nelz", "lst", "maxit"}
_STR_FIELDS = {"preset", "backend", "history", "vtk", "checkpoint"}


class ConfigError(ValueError):
    """A config file or flag set could not be turned into a RunConfig."""


def read_config_file(path) -> dict:
    """Read an INI config file into a flat field mapping.

    Unknown sections or keys raise :class:`ConfigError` naming the offender.
    """
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    fields = {}
    for section in parser.sections():
        if section not in _CONFIG_SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _CONFIG_SECTIONS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            fields[key] = _convert(key, raw)
    return fields


def _convert(key: str, raw: str):
    if key in _STR_FIELDS:
        return raw
    try:
        if key in _INT_FIELDS:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "integer" if key in _INT_FIELDS else "number"
        raise ConfigError(f"field '{key}': expected {kind}, got {raw!r}") from None


def build_config(fields: dict) -> tuple[RunConfig, dict]:
    """Turn a flat field mapping into ``(RunConfig, output_paths)``.

    Every failure names the offending field.
    """
    fields = dict(fields)
    outputs = {
        "history": fields.pop("history", None),
        "vtk": fields.pop("vtk", None),
        "checkpoint": fields.pop("checkpoint", None),
    }
    required = ("preset", "nelx", "nely", "nelz", "volfrac")
    missing = [k for k in required if fields.get(k) is None]
    if missing:
        raise ConfigError(f"missing required fields: {', '.join(missing)}")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = [k for k in fields if k not in known]
    if unknown:
        raise ConfigError(f"unknown fields: {', '.join(sorted(unknown))}")
    try:
        config = RunConfig(
            history_path=outputs["history"],
            vtk_path=outputs["vtk"],
            checkpoint_path=outputs["checkpoint"],
            **{k: v for k, v in fields.items() if v is not None},
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config, outputs
