import logging

import numpy as np

from src.errors import PolicyError, UsageError
from src.hawkes.simulation import make_rng
from src.numerics.linalg import normalize_rows

logger = logging.getLogger(__name__)

FAIRNESS_MODES = ("none", "cross-group-boost", "group-blind")


def spectral_embedding(adjacency, dim):
    """
    Truncated spectral embedding of an undirected adjacency matrix

    Keeps the dim eigenpairs of largest |eigenvalue| and scales each eigenvector by
    sqrt(|eigenvalue|).

    Args:
        adjacency: (n, n) symmetric 0/1 matrix
        dim: Embedding dimension

    Returns:
        ndarray: (n, min(dim, n)) embedding
    """
    matrix = np.asarray(adjacency, dtype=float)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    order = np.argsort(-np.abs(eigenvalues), kind="stable")[:min(dim, matrix.shape[0])]
    return eigenvectors[:, order] * np.sqrt(np.abs(eigenvalues[order]))


class RecommenderPolicy:
    """
    Base class for candidate-scoring recommenders

    Subclasses implement _scores. refit() is called at the start of the recommender
    phase and then every retrain period.
    """

    def __init__(self, name, fairness_mode="none"):
        if fairness_mode not in FAIRNESS_MODES:
            raise UsageError(f"fairness_mode must be one of {FAIRNESS_MODES}, got {fairness_mode!r}")
        self._name = name
        self._fairness_mode = fairness_mode
        self._n_refits = 0

    @property
    def name(self):
        return self._name

    @property
    def fairness_mode(self):
        return self._fairness_mode

    @property
    def n_refits(self):
        return self._n_refits

    def refit(self, graph, t):
        """Update internal state from the current graph"""
        self._n_refits += 1
        logger.debug("Refitting policy %s at t=%g (%d edges)", self._name, t, graph.n_edges)

    def score_candidates(self, u, candidates, graph, t):
        """
        Scores of the candidates of node u

        Args:
            u: Source node
            candidates: Array of candidate nodes
            graph: TemporalGraph
            t: Current time

        Returns:
            ndarray: One finite score per candidate

        Raises:
            PolicyError: A score is not finite
        """
        candidates = np.asarray(candidates, dtype=np.int64)
        scores = np.asarray(self._scores(u, candidates, graph, t), dtype=float)
        if scores.shape != candidates.shape or not np.all(np.isfinite(scores)):
            raise PolicyError(f"policy {self._name} produced invalid scores for node {u} at t={t}")
        return scores

    def score(self, u, v, graph, t):
        return float(self.score_candidates(u, [v], graph, t)[0])

    def _scores(self, u, candidates, graph, t):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(name={self._name!r})"


def _cosine(embedding, u, candidates):
    return embedding[candidates] @ embedding[u]


class CosineStaticPolicy(RecommenderPolicy):
    """Cosine similarity of the latent pre-network embeddings, never refit"""

    def __init__(self, name="cosine-static", fairness_mode="none"):
        super().__init__(name, fairness_mode)

    def refit(self, graph, t):
        pass

    def _scores(self, u, candidates, graph, t):
        return _cosine(normalize_rows(graph.embeddings), u, candidates)


class CosineRefitPolicy(RecommenderPolicy):
    """Cosine similarity of a spectral embedding of the adjacency at the last refit"""

    def __init__(self, embedding_dim=16, name="cosine-refit"):
        super().__init__(name)
        self._embedding_dim = embedding_dim
        self._embedding = None

    @property
    def embedding(self):
        return self._embedding

    def refit(self, graph, t):
        super().refit(graph, t)
        self._embedding = normalize_rows(spectral_embedding(graph.adjacency, self._embedding_dim))

    def _scores(self, u, candidates, graph, t):
        if self._embedding is None:
            return _cosine(normalize_rows(graph.embeddings), u, candidates)
        return _cosine(self._embedding, u, candidates)


class HomophilyBoostPolicy(CosineRefitPolicy):
    """Refit cosine plus an additive bonus for same-group candidates"""

    def __init__(self, bonus=0.1, embedding_dim=16, name="homophily-boost"):
        super().__init__(embedding_dim, name)
        self._bonus = bonus

    def _scores(self, u, candidates, graph, t):
        same = graph.groups[candidates] == graph.groups[u]
        return super()._scores(u, candidates, graph, t) + self._bonus * same


class CrossBoostPolicy(CosineStaticPolicy):
    """Latent cosine plus an additive bonus for cross-group candidates"""

    def __init__(self, bonus=0.1, name="cross-boost"):
        super().__init__(name, "cross-group-boost")
        self._bonus = bonus

    def _scores(self, u, candidates, graph, t):
        cross = graph.groups[candidates] != graph.groups[u]
        return super()._scores(u, candidates, graph, t) + self._bonus * cross


class GroupBlindRandomPolicy(RecommenderPolicy):
    """Uniform random scores from the policy's own generator"""

    def __init__(self, seed=0, name="group-blind-random"):
        super().__init__(name, "group-blind")
        self._rng = make_rng(seed)

    def refit(self, graph, t):
        pass

    def _scores(self, u, candidates, graph, t):
        return self._rng.random(candidates.size)


def builtin_policies(config=None, seed=0):
    """
    The built-in recommender policies keyed by name

    Args:
        config: Optional SimConfig supplying bonuses and the embedding dimension
        seed: Seed of the random policy

    Returns:
        dict: name -> RecommenderPolicy
    """
    dim = 16 if config is None else config.embedding_dim
    homophily_bonus = 0.1 if config is None else config.homophily_bonus
    cross_bonus = 0.1 if config is None else config.cross_bonus
    policies = [
        CosineStaticPolicy(),
        CosineRefitPolicy(dim),
        HomophilyBoostPolicy(homophily_bonus, dim),
        CrossBoostPolicy(cross_bonus),
        GroupBlindRandomPolicy(seed),
    ]
    return {policy.name: policy for policy in policies}


BUILTIN_POLICY_NAMES = tuple(builtin_policies())


def get_policy(name, config=None, seed=0):
    """Fresh built-in policy by name, UsageError listing the builtins otherwise"""
    policies = builtin_policies(config, seed)
    if name not in policies:
        raise UsageError(f"unknown policy {name!r}; built-in policies: {', '.join(policies)}")
    return policies[name]
