"""Method-of-lines solver for the coupled plasma, vacuum and front problem."""
from .basic_state import BasicState, build_basic_state
from .config import SolverConfig, load_config
from .ibvp import Discretization, SimState, run

__all__ = ["BasicState", "Discretization", "SimState", "SolverConfig", "build_basic_state", "load_config", "run"]
