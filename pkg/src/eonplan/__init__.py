"""Multi-period spectrum planning for elastic optical networks.

Turns multi-step-ahead traffic forecasts into routing and spectrum-allocation
decisions (mmd / mad / ssd heuristics) and replays true traffic fluctuations
against them, measuring blocking, service disruptions, and overprovisioning.
"""

from .errors import (
    ConfigError,
    CoverageError,
    DatasetSizeError,
    EonPlanError,
    HorizonError,
    NormalizationError,
    ParseError,
    ValidationError,
)
from .planner import (
    Connection,
    Metrics,
    PlanDecision,
    SimulationConfig,
    SimulationResult,
    apply_plan,
    plan_mad,
    plan_mmd,
    plan_ssd,
    simulate,
    slots_matrix,
)
from .predictors import (
    FilePredictor,
    OraclePredictor,
    PersistencePredictor,
    PredictionMatrix,
    PredictorGateway,
)
from .spectrum import Lightpath, SpectrumGrid, expand, first_fit, reallocate, reduce
from .topology import (
    ModulationTable,
    Topology,
    k_shortest_paths,
    required_slots,
    select_modulation,
)
from .traces import TrafficTrace, parse_trace_file
from .windowing import Normalizer, WindowSample, build_dataset, fit_normalizer, split

__version__ = "0.1.0"
