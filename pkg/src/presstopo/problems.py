"""Benchmark problem presets: pressure/displacement BCs and passive regions.

Four presets are provided.  ``lid`` pressurizes the top face of a box whose
top edges are clamped.  ``extpress`` is the right symmetric half of an
externally pressurized block (symmetry plane at x = 0).  ``dam`` holds back
pressure on one vertical face, fixed at bottom and one side, with an x = 0
symmetry plane.  ``hull`` is pressurized from all six sides around a clamped
interior void block.  Half-domain presets record which axes to mirror when
exporting the full domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linsolve import DisplacementBC, PressureBC
from .mesh import FaceSets, GridMesh, face_sets, passive_block

PRESET_NAMES = ("lid", "extpress", "dam", "hull")

HULL_VOID_BOX = ((8 / 18, 8 / 18, 8 / 18), (10 / 18, 10 / 18, 10 / 18))


@dataclass(frozen=True)
class ProblemPreset:
    """Declarative problem setup over a given mesh."""

    name: str
    pressure_bc: PressureBC
    displacement_bc: DisplacementBC
    passive_solid: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    passive_void: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    mirror_axes: tuple[str, ...] = ()

    def __post_init__(self):
        if np.intersect1d(self.passive_solid, self.passive_void).size:
            raise ValueError("passive solid and void element sets overlap")

    def active_elements(self, nel: int) -> np.ndarray:
        """Design-variable element indices (everything not passive)."""
        passive = np.union1d(self.passive_solid, self.passive_void)
        return np.setdiff1d(np.arange(nel), passive)


def _all_dofs(nodes: np.ndarray) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=np.int64)
    return np.concatenate([3 * nodes, 3 * nodes + 1, 3 * nodes + 2])


def _pressure_bc(nno: int, assignments) -> PressureBC:
    # later assignments override earlier ones, mirroring sequential BC setup
    values = np.full(nno, np.nan)
    for nodes, value in assignments:
        values[np.asarray(nodes, dtype=np.int64)] = value
    fixed = np.flatnonzero(~np.isnan(values))
    return PressureBC(fixed_dofs=fixed, fixed_values=values[fixed])


def _lid(mesh: GridMesh, faces: FaceSets, pin: float) -> ProblemPreset:
    top_edges = np.unique(np.concatenate([
        np.intersect1d(faces.top, faces.left),
        np.intersect1d(faces.top, faces.right),
        np.intersect1d(faces.top, faces.front),
        np.intersect1d(faces.top, faces.back),
    ]))
    return ProblemPreset(
        name="lid",
        pressure_bc=_pressure_bc(mesh.nno, [(faces.bottom, 0.0), (faces.top, pin)]),
        displacement_bc=DisplacementBC(_all_dofs(top_edges)),
    )


def _extpress(mesh: GridMesh, faces: FaceSets, pin: float) -> ProblemPreset:
    bottom_right = np.intersect1d(faces.bottom, faces.right)
    fixed = np.concatenate([
        _all_dofs(bottom_right),
        3 * faces.left,          # x on the symmetry plane
        3 * faces.right + 1,     # y on the outer face
        3 * faces.right,         # x on the outer face
    ])
    return ProblemPreset(
        name="extpress",
        pressure_bc=_pressure_bc(mesh.nno, [(faces.bottom, 0.0), (faces.top, pin)]),
        displacement_bc=DisplacementBC(fixed),
        mirror_axes=("x",),
    )


def _dam(mesh: GridMesh, faces: FaceSets, pin: float) -> ProblemPreset:
    clamped = np.union1d(faces.bottom, faces.right)
    fixed = np.concatenate([_all_dofs(clamped), 3 * faces.left])
    return ProblemPreset(
        name="dam",
        pressure_bc=_pressure_bc(mesh.nno, [(faces.front, 0.0), (faces.back, pin)]),
        displacement_bc=DisplacementBC(fixed),
        mirror_axes=("x",),
    )


def _hull(mesh: GridMesh, faces: FaceSets, pin: float) -> ProblemPreset:
    void = passive_block(mesh, HULL_VOID_BOX[0], HULL_VOID_BOX[1])
    if void.size == 0:
        raise ValueError("hull void block is empty on this mesh")
    void_nodes = np.unique(mesh.elem_pressure_dofs[void])
    return ProblemPreset(
        name="hull",
        pressure_bc=_pressure_bc(
            mesh.nno, [(faces.all_boundary(), pin), (void_nodes, 0.0)]
        ),
        displacement_bc=DisplacementBC(_all_dofs(void_nodes)),
        passive_void=void,
    )


_BUILDERS = {"lid": _lid, "extpress": _extpress, "dam": _dam, "hull": _hull}


def preset(name: str, mesh: GridMesh, pin: float = 1.0) -> ProblemPreset:
    """Build the named benchmark preset on ``mesh``."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; expected one of {PRESET_NAMES}"
        ) from None
    return builder(mesh, face_sets(mesh), pin)


def initial_design(preset_: ProblemPreset, nel: int, volfrac: float) -> np.ndarray:
    """Uniform initial design honoring passive regions.

    Active elements receive the value that makes the total material equal
    ``volfrac * (nel - n_void)`` after accounting for the passive solid.
    """
    x = np.zeros(nel)
    act = preset_.active_elements(nel)
    n_void = preset_.passive_void.size
    n_solid = preset_.passive_solid.size
    if act.size == 0:
        raise ValueError("preset leaves no active design variables")
    x[act] = (volfrac * (nel - n_void) - n_solid) / act.size
    x[preset_.passive_solid] = 1.0
    return x
