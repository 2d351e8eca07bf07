"""Exception types shared across the toolkit."""


class GmrdError(Exception):
    """Base class for all toolkit errors."""


class MeshError(GmrdError):
    """Invalid mesh topology or geometry."""


class MeshResourceError(MeshError):
    """Requested resolution exceeds the node budget."""

    def __init__(self, message, estimated_nodes, max_nodes):
        super().__init__(message)
        self.estimated_nodes = estimated_nodes
        self.max_nodes = max_nodes


class ConfigError(GmrdError):
    """Malformed or inconsistent experiment configuration."""


class SimulationError(GmrdError):
    """Time integration failed (NaN/overflow or solver breakdown)."""

    def __init__(self, message, t=None, norm=None, residual_history=None):
        super().__init__(message)
        self.t = t
        self.norm = norm
        self.residual_history = residual_history


class SolverError(GmrdError):
    """Iterative solver did not converge."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = residual_history or []
