import logging

import numpy as np

from src.bias.metrics import parity_gap_from_counts
from src.errors import ValidationError
from src.hawkes.simulation import make_rng
from src.models.temporal_graph import TemporalGraph
from src.numerics.linalg import cosine_similarity, normalize_rows, softmax

logger = logging.getLogger(__name__)

N_RECOMMENDED = 3


def phase_seeds(seed):
    """Independent seed sequences for the pre-network phase, the recommender phase and random policies"""
    return np.random.SeedSequence(seed).spawn(3)


class RecommendationAudit:
    """
    Record of every recommendation decision of the recommender phase

    The positive outcome of a candidate pair is "recommended and accepted". Parity
    counts run over all legal candidates of each decision.
    """

    def __init__(self):
        self._rows = []
        self._same = [0, 0]
        self._cross = [0, 0]

    @property
    def rows(self):
        """(t, u, candidates, scores, accepted) per decision"""
        return list(self._rows)

    def __len__(self):
        return len(self._rows)

    def record(self, t, u, candidate_groups, u_group, recommended, scores, accepted):
        """
        Args:
            t: Step of the decision
            u: Active node
            candidate_groups: Group of every legal candidate
            u_group: Group of u
            recommended: Recommended candidates in rank order
            scores: Their policy scores
            accepted: Acceptance flag per recommended candidate, paired with its group
        """
        same = int(np.sum(candidate_groups == u_group))
        self._same[1] += same
        self._cross[1] += candidate_groups.size - same
        for (v_group, ok) in accepted:
            if ok:
                bucket = self._same if v_group == u_group else self._cross
                bucket[0] += 1
        self._rows.append((t, u, tuple(int(v) for v in recommended), tuple(float(s) for s in scores),
                           tuple(bool(ok) for _, ok in accepted)))

    def counts(self):
        """(same positive, same total, cross positive, cross total)"""
        return self._same[0], self._same[1], self._cross[0], self._cross[1]

    def parity_gap(self):
        return parity_gap_from_counts(*self.counts())


def initial_graph(config, rng):
    """
    Nodes with latent-cluster embeddings, balanced groups and static popularity

    Embeddings come from cluster centres plus noise and are independent of the groups.
    """
    n, d = config.n_nodes, config.embedding_dim
    centres = normalize_rows(rng.normal(size=(config.n_clusters, d)))
    clusters = rng.integers(config.n_clusters, size=n)
    embeddings = normalize_rows(centres[clusters] + config.cluster_noise * rng.normal(size=(n, d)))
    groups = rng.permutation(np.arange(n) * config.n_groups // n + 1)
    popularity = rng.uniform(config.popularity_low, config.popularity_high, size=n)
    return TemporalGraph(groups, embeddings, popularity, n_groups=config.n_groups)


def _legal_candidates(graph, u, pending, exclude_adjacent):
    mask = np.ones(graph.n_nodes, dtype=bool)
    mask[u] = False
    if exclude_adjacent:
        mask[graph.neighbors(u)] = False
        for a, b in pending:
            if a == u:
                mask[b] = False
            elif b == u:
                mask[a] = False
    return np.flatnonzero(mask)


def run_step(graph, step, score, temperature, rng, config, audit=None):
    """
    One step of the link-formation loop

    Every active node samples up to three candidates without replacement from the
    softmax of its shifted candidate scores and links to each with probability
    (prob_matrix[g_u, g_v] + top_probs[rank]) * popularity[v]. Accepted links of the
    step are stamped step + k / (n + 1) in acceptance order.

    Returns:
        int: Number of links formed
    """
    prob_matrix = config.prob_matrix_array
    active = np.flatnonzero(rng.random(graph.n_nodes) < config.activity_rate)
    pending = []
    for u in active:
        candidates = _legal_candidates(graph, u, pending, config.exclude_adjacent)
        if candidates.size == 0:
            continue
        scores = score(u, candidates)
        probs = softmax(scores - scores.min(), temperature)
        k = min(N_RECOMMENDED, int(np.count_nonzero(probs)))
        chosen = rng.choice(candidates.size, size=k, replace=False, p=probs)
        accepted = []
        for rank, index in enumerate(chosen):
            v = int(candidates[index])
            p = (prob_matrix[graph.groups[u] - 1, graph.groups[v] - 1] + config.top_probs[rank]) * graph.popularity[v]
            ok = bool(rng.random() < p)
            accepted.append((graph.groups[v], ok))
            if ok:
                pending.append((int(u), v))
        if audit is not None:
            audit.record(step, int(u), graph.groups[candidates], graph.groups[u], candidates[chosen],
                         scores[chosen], accepted)

    for k, (u, v) in enumerate(pending, start=1):
        graph.add_edge(step + k / (len(pending) + 1), u, v)
    return len(pending)


def generate_pre_network(config):
    """
    Grow the pre-network with cosine similarity of the latent embeddings

    Args:
        config: SimConfig

    Returns:
        tuple: (TemporalGraph, EventLog over [0, horizon_pre))
    """
    if config.n_nodes - 1 < N_RECOMMENDED:
        raise ValidationError("at least three candidates per node are required")
    pre_seed, _, _ = phase_seeds(config.seed)
    rng = make_rng(pre_seed)
    graph = initial_graph(config, rng)
    embeddings = graph.embeddings

    def score(u, candidates):
        return cosine_similarity(embeddings[u], embeddings[candidates])

    for step in range(config.horizon_pre):
        run_step(graph, step, score, config.pre_temperature, rng, config)
    logger.info("Pre-network: %d interactions over %d steps", graph.n_edges, config.horizon_pre)
    horizon = max(config.horizon_pre, 1)
    return graph, graph.to_event_log(horizon)


def run_lp_phase(graph, policy, config):
    """
    Continue the graph with candidate scoring delegated to a recommender policy

    The policy is refit at the start of the phase and then every retrain_period steps
    when that period is positive.

    Args:
        graph: TemporalGraph from generate_pre_network (extended in place)
        policy: RecommenderPolicy
        config: SimConfig

    Returns:
        tuple: (TemporalGraph, EventLog over [0, horizon_pre + horizon_lp), RecommendationAudit)
    """
    _, lp_seed, _ = phase_seeds(config.seed)
    rng = make_rng(lp_seed)
    audit = RecommendationAudit()
    start = config.horizon_pre
    policy.refit(graph, start)

    for offset in range(config.horizon_lp):
        step = start + offset
        if offset > 0 and config.retrain_period > 0 and offset % config.retrain_period == 0:
            policy.refit(graph, step)

        def score(u, candidates):
            return policy.score_candidates(u, candidates, graph, step)

        run_step(graph, step, score, config.softmax_temperature, rng, config, audit)

    logger.info("Recommender phase with %s: %d interactions in total, %d decisions",
                policy.name, graph.n_edges, len(audit))
    return graph, graph.to_event_log(config.horizon), audit
