class ResourceError(RuntimeError):
    """An enumeration or simulation would exceed its configured budget."""


class NotFound(Exception):
    """A search ended without a marked element (empty marked set or cutoff hit)."""


class InstanceInfeasible(Exception):
    """A solver's marked set is empty (or too small) for this instance."""


class StateError(RuntimeError):
    """An oracle operation was applied to a state in the wrong mode."""
