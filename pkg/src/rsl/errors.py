"""Exception types raised by the library (CLI maps these to exit code 2)."""


class RslError(Exception):
    """Base class for all library errors."""


class GraphError(RslError):
    """Malformed graph input (self-loop, duplicate edge, bad ids)."""


class NotATreeError(GraphError):
    """A tree-only operation received a graph with cycles or several components."""


class DisconnectedError(GraphError):
    """Operation requires a connected graph."""


class ParameterError(RslError, ValueError):
    """Invalid distribution / generator / stop-rule parameters."""


class ExhaustedGraphError(RslError):
    """Stop rule asked for more infections than the reachable component holds."""


class SimulationCapError(RslError):
    """Event budget exceeded (runaway supercritical process)."""


class ConstructionError(RslError):
    """A generator could not realize the requested specification."""
