"""Extended elliptic formulation of Maxwell transmission problems on box-in-box domains."""
from .assembly import ExtendedState, ProblemData, SparseLSSystem, WeightPolicy, assemble, residual
from .data_map import (CompatibilityReport, MaxwellData, check_compatibility, maxwell_to_elliptic,
                       source_traces)
from .discrete_ops import (GridField, SurfaceField, curl_fd, div_fd, grad_fd, jump,
                           normal_component, tangential, tangential_div, trace)
from .geometry import DomainSpec, Grid, build_grid
from .media import MaterialTensor, MediumField, check_admissibility, eval_medium
from .oracles import ManufacturedCase, general_mms, layered_wave, plane_wave
from .solver import SolveReport, SolverConfig, solve, verify_equivalence
from .symbol_check import (SymbolProblem, lopatinsky_test, media_sweep, principal_symbol_det)

__all__ = [
    "DomainSpec", "Grid", "build_grid",
    "MaterialTensor", "MediumField", "check_admissibility", "eval_medium",
    "GridField", "SurfaceField", "curl_fd", "div_fd", "grad_fd", "jump", "normal_component",
    "tangential", "tangential_div", "trace",
    "ExtendedState", "ProblemData", "SparseLSSystem", "WeightPolicy", "assemble", "residual",
    "CompatibilityReport", "MaxwellData", "check_compatibility", "maxwell_to_elliptic",
    "source_traces",
    "SolveReport", "SolverConfig", "solve", "verify_equivalence",
    "SymbolProblem", "lopatinsky_test", "media_sweep", "principal_symbol_det",
    "ManufacturedCase", "general_mms", "layered_wave", "plane_wave",
]
