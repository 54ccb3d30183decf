"""Decentralized runtime enforcers for multi-agent systems on labeled graphs."""
from .environment import Environment, GridSpec, build_grid
from .simulator import AgentSpec, SimConfig, run

__version__ = "0.1.0"

__all__ = ["Environment", "GridSpec", "build_grid", "AgentSpec", "SimConfig", "run", "__version__"]
