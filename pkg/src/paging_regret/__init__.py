"""Online paging with several next-arrival-time predictors.

Offline optimum (FitF, exact DP), the prediction-following Sim policy, two
ways of combining predictors (S-C&S under bandit access, a multiplexer under
full information), prediction-error metrics and an experiment harness.
"""
from .bandit import Exp3Learner, InfLearner, make_learner
from .combiners import EpochCostRecord, EpochSchedule, multiplexer_run, scs_run
from .core import (AccessViolation, CacheState, ContractViolation, NatTable, RequestTrace, RunReport,
                   ValidationError, augment_sequence, build_nat_table, default_cache, make_cache,
                   serve)
from .experiment import (ExperimentConfig, ResultRow, lower_bound_experiment, run_experiment)
from .generators import TraceSpec, gen_trace
from .metrics import MetricsReport, compute_explicit_error, compute_metrics, refined_eta
from .offline import dp_opt, fitf_opt, fitf_run, lru_run
from .predictors import (BANDIT, FULL_INFORMATION, ErrorInjection, ExplicitPredictionStream,
                         NatPredictionStream, PredictorPool, derive_consistent_nat, inject_errors,
                         perfect_nat, uniform_noise)
from .sim import RemedyTable, remedy_step, sim_run

__version__ = "0.1.0"

__all__ = [
    "AccessViolation", "BANDIT", "CacheState", "ContractViolation", "EpochCostRecord",
    "EpochSchedule", "ErrorInjection", "Exp3Learner", "ExperimentConfig", "ExplicitPredictionStream",
    "FULL_INFORMATION", "InfLearner", "MetricsReport", "NatPredictionStream", "NatTable",
    "PredictorPool", "RemedyTable", "RequestTrace", "ResultRow", "RunReport", "TraceSpec",
    "ValidationError", "augment_sequence", "build_nat_table", "compute_explicit_error",
    "compute_metrics", "default_cache", "derive_consistent_nat", "dp_opt", "fitf_opt", "fitf_run",
    "gen_trace", "inject_errors", "lower_bound_experiment", "lru_run", "make_cache", "make_learner",
    "multiplexer_run", "perfect_nat", "refined_eta", "remedy_step", "run_experiment", "scs_run",
    "serve", "sim_run", "uniform_noise",
]
