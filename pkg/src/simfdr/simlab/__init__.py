"""Simulation laboratory: generators, replication engine and oracles."""
from .config import PROCEDURES, SimConfig
from .engine import (RECORD_FIELDS, SimSummary, aggregate, dumps_json, fdp_power, records_to_csv,
                     replicate, run_procedure, run_replication)
from .generators import (contaminate, example3_clusters, gen_example1, gen_example2, gen_example3,
                         gen_example4, generate, nonnull_mask)
from .oracles import (RectangleFdr, SingularityError, delta_power_ratio, example1_models,
                      fdr_rectangle_mc, power_oracle, theta0_oracle_normal, threshold_oracle)

__all__ = [
    "PROCEDURES", "SimConfig", "SimSummary", "RECORD_FIELDS", "aggregate", "dumps_json",
    "fdp_power", "records_to_csv", "replicate", "run_procedure", "run_replication",
    "contaminate", "example3_clusters", "gen_example1", "gen_example2", "gen_example3",
    "gen_example4", "generate", "nonnull_mask", "RectangleFdr", "SingularityError",
    "delta_power_ratio", "example1_models", "fdr_rectangle_mc", "power_oracle",
    "theta0_oracle_normal", "threshold_oracle",
]
