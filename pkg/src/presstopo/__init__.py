"""3D topology optimization under design-dependent fluidic pressure loads.

The pressure field is modeled by Darcy flow with a drainage term so that it
follows the evolving solid-void boundary, converted to consistent nodal
loads, and the resulting compliance is minimized under a volume constraint
with adjoint sensitivities and MMA updates.
"""

from .driver import RunConfig, RunHistory, RunResult, run
from .material import ElasticModel, FlowModel
from .mesh import GridMesh, build_mesh, face_sets, passive_block
from .problems import ProblemPreset, preset

__version__ = "0.1.0"

__all__ = [
    "ElasticModel",
    "FlowModel",
    "GridMesh",
    "ProblemPreset",
    "RunConfig",
    "RunHistory",
    "RunResult",
    "build_mesh",
    "face_sets",
    "passive_block",
    "preset",
    "run",
    "__version__",
]
