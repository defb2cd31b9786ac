"""Runtime failures of a simulated machine, as distinct from bad inputs.

Bad arguments raise ValueError at the call site.  These exceptions mean
the inputs were legal but the machine cannot proceed: the ground refused
the spikes, or the commanded load would tip the chassis.
"""


class SimulationError(Exception):
    """Base class for in-simulation failures."""


class VehicleStuck(SimulationError):
    """No spike engagement strong enough to react the required draft."""


class FlipInstability(SimulationError):
    """Drawbar lift on the anchored frame exceeds the weight holding it down."""
