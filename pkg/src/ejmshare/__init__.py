"""Exact simulation of network-nonlocality sharing in an extended bilocal network.

Two singlet or Werner sources feed a middle party performing the generalized
elegant joint measurement (EJM); two observers on each side measure
sequentially (weak then strong).  Correlations are scored against the
ternary-input bilocal inequality ``S/3 - T <= 3 + 5 Z``.
"""

__version__ = "0.1.0"

from .kernel import HAVE_COMPILED, get_backend, set_backend
from .measmodel import PointerKind, ejm_basis, pointer_pair, projector, triad
from .scenario import (CorrelationTensor, NumericInvariantError, ScenarioConfig, SourceSpec,
                       make_source, run)
from .tbg import TbgReport, evaluate, evaluate_pairs, marginalize
from .sweep import find_critical_visibility, find_z_onset, sweep_g, theta_scan

__all__ = [
    "HAVE_COMPILED", "get_backend", "set_backend",
    "PointerKind", "ejm_basis", "pointer_pair", "projector", "triad",
    "CorrelationTensor", "NumericInvariantError", "ScenarioConfig", "SourceSpec",
    "make_source", "run",
    "TbgReport", "evaluate", "evaluate_pairs", "marginalize",
    "find_critical_visibility", "find_z_onset", "sweep_g", "theta_scan",
]
