"""Joint task offloading and radio/compute resource allocation for multi-cell
mobile edge computing."""

from .baselines import (
    SchemeId,
    SearchTooLarge,
    dora_schedule,
    exhaustive_schedule,
    gojra_schedule,
    iojra_schedule,
    run_scheme,
)
from .compute import CraInstance, allocate, optimal_value, solve_cra
from .experiment import ExperimentSpec, ResultRow, Sweep, emit_csv, fig6_gap, preset, run
from .model import (
    Assignment,
    EdgeServer,
    GroundElement,
    NetworkScenario,
    RadioConfig,
    TaskProfile,
    UserDevice,
    system_utility,
)
from .power import UpaCoefficients, bisect_power, solve_upa
from .scenario import ConfigError, ScenarioConfig, generate, load_config
from .search import JStarEvaluator, Schedule, heuristic_schedule, j_star

__version__ = "0.1.0"
