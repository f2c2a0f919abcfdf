"""Best-group identification in multi-objective bandits: Pareto-set and
linear-scalarization algorithms, baselines, instance generators, sample
complexity calculators, and a reproducible experiment harness."""

__version__ = "0.1.0"

from .baselines import (TEL_EPSILON, run_age, run_ge, run_tel, run_unis,
                        unis_pull_count)
from .bounds import (BoundReport, brute_pareto, eecb_upper_bound,
                     gap_bisection_oracle, gpsi_lower_bound, lbgi_lower_bound,
                     te_upper_bound)
from .core import (ArmMeansTensor, Dominance, GpsiGapReport, LbgiGapReport,
                   beta, beta_array, big_m_gap, dominance, efficiency,
                   gpsi_gaps, lbgi_gaps, m_gap, overtake_alpha, pareto_set)
from .environment import (GENERATOR_VERSION, Instance, NoiseModel, RngStream,
                          gen_hard_gpsi, gen_random_gpsi, gen_random_lbgi,
                          instance_from_dict, instance_to_dict,
                          kl_fully_dependent, load_instance, sample,
                          sample_block, save_instance)
from .errors import (DimensionMismatchError, GenerationBudgetError,
                     NonUniqueOptimumError, NoThresholdError, RoundBudgetError)
from .gpsi import GpsiResult, TeState, run_te, te_round_invariant_check
from .harness import (CSV_COLUMNS, GPSI_ALGORITHMS, LBGI_ALGORITHMS,
                      PAPER_WEIGHT_VECTORS, ExperimentConfig, ExperimentRecord,
                      records_to_csv, run_sweep, stream_index,
                      write_records_csv)
from .lbgi import EecbState, LbgiResult, eecb_schedule_property, run_eecb

__all__ = [
    "ArmMeansTensor", "BoundReport", "CSV_COLUMNS", "DimensionMismatchError",
    "Dominance", "EecbState", "ExperimentConfig", "ExperimentRecord",
    "GENERATOR_VERSION", "GPSI_ALGORITHMS", "GenerationBudgetError",
    "GpsiGapReport", "GpsiResult", "Instance", "LBGI_ALGORITHMS",
    "LbgiGapReport", "LbgiResult", "NoThresholdError", "NoiseModel",
    "NonUniqueOptimumError", "PAPER_WEIGHT_VECTORS", "RngStream",
    "RoundBudgetError", "TEL_EPSILON", "TeState", "beta", "beta_array",
    "big_m_gap", "brute_pareto", "dominance", "eecb_schedule_property",
    "eecb_upper_bound", "efficiency", "gap_bisection_oracle", "gen_hard_gpsi",
    "gen_random_gpsi", "gen_random_lbgi", "gpsi_gaps", "gpsi_lower_bound",
    "instance_from_dict", "instance_to_dict", "kl_fully_dependent",
    "lbgi_gaps", "lbgi_lower_bound", "load_instance", "m_gap",
    "overtake_alpha", "pareto_set", "records_to_csv", "run_age", "run_eecb",
    "run_ge", "run_sweep", "run_te", "run_tel", "run_unis", "sample",
    "sample_block", "save_instance", "stream_index", "te_round_invariant_check",
    "te_upper_bound", "unis_pull_count", "write_records_csv",
]
