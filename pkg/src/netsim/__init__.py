"""
Agent-based temporal network simulator with recommender feedback
"""

from src.netsim.policies import (
    BUILTIN_POLICY_NAMES,
    CosineRefitPolicy,
    CosineStaticPolicy,
    CrossBoostPolicy,
    GroupBlindRandomPolicy,
    HomophilyBoostPolicy,
    RecommenderPolicy,
    builtin_policies,
    get_policy,
    spectral_embedding,
)
from src.netsim.simulator import (
    RecommendationAudit,
    generate_pre_network,
    initial_graph,
    phase_seeds,
    run_lp_phase,
    run_step,
)
