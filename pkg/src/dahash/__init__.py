"""Distribution-aware password hashing: per-strength hash costs chosen against a rational attacker."""
from .adversary import AttackPlan, best_response, order_by_ratio, success_rate, utility
from .corpus import (Distribution, EquivalenceSet, FrequencyCorpus, GoodTuringProfile, f_epsilon,
                     gen_zipf_corpus, good_turing, ingest_frequency_list, ingest_passwords,
                     monte_carlo_distribution, to_empirical_distribution)
from .stackelberg import FeasibleRegion, OptResult, evaluate_defender, opt_hash_cost_vec, project_feasible
from .strength import (CostedDistribution, CostVector, Grouping, assign_costs, partition_by_mass,
                       server_cost)

__version__ = "0.1.0"
