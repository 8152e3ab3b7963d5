"""Oscillation numbers, comparative index and Maslov index of continuous Lagrangian paths.

Modules
-------
matlib      tolerance-aware ranks, inertia, pseudoinverses
lagrangian  frames, sampled paths and the path file format
compidx     comparative index mu and its dual mu*
lidskii     Lidskii angles of symplectic matrices and their branches
oscnum      oscillation numbers N, N* by three independent routes
maslov      Maslov index Mas, Mas* and the crossing-arc oracle
hamgen      Hamiltonian flows, principal paths, prescribed paths, random instances
suites      randomized identity checks used by the CLI and the tests
"""

from .compidx import ComparativeIndexBreakdown, comparative_index, mu, mu_star
from .lagrangian import SampledLagrangianPath, load_path, path_from_function, save_path
from .maslov import dual_maslov_index, maslov_crossing_oracle, maslov_index, maslov_pair
from .matlib import DEFAULT_TOL, Tolerances
from .oscnum import (
    dual_oscillation_number,
    oscillation_number,
    oscillation_number_partition,
    oscillation_pair,
    rank_drop_pair,
)

__version__ = "0.1.0"

__all__ = [
    "ComparativeIndexBreakdown", "comparative_index", "mu", "mu_star",
    "SampledLagrangianPath", "load_path", "save_path", "path_from_function",
    "maslov_index", "dual_maslov_index", "maslov_pair", "maslov_crossing_oracle",
    "Tolerances", "DEFAULT_TOL",
    "oscillation_number", "dual_oscillation_number", "oscillation_pair",
    "oscillation_number_partition", "rank_drop_pair",
]
