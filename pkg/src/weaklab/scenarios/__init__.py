"""The six experiments, each returning a :class:`ScenarioReport`."""
from .common import Coupling, ScenarioReport, fixed, scaled
from .cyclic import end_only_trajectory, return_probability, run_cyclic, run_multiport
from .michelson import path_state, run_michelson_weak, run_transmission_delayed_choice
from .spin import run_spin_sequence
from .well import ground_density, run_well

SCENARIOS = {
    "run_michelson_weak": run_michelson_weak,
    "run_transmission_delayed_choice": run_transmission_delayed_choice,
    "run_spin_sequence": run_spin_sequence,
    "run_cyclic": run_cyclic,
    "run_multiport": run_multiport,
    "run_well": run_well,
}

__all__ = [
    "Coupling", "ScenarioReport", "fixed", "scaled", "SCENARIOS",
    "run_michelson_weak", "run_transmission_delayed_choice", "run_spin_sequence",
    "run_cyclic", "run_multiport", "run_well",
    "end_only_trajectory", "return_probability", "path_state", "ground_density",
]
