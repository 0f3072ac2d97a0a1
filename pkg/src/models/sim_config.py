from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from src.errors import ValidationError


def default_prob_matrix(n_groups, within=0.3, cross=0.05):
    """K x K link-formation matrix with `within` on the diagonal and `cross` elsewhere"""
    matrix = np.full((n_groups, n_groups), cross, dtype=float)
    np.fill_diagonal(matrix, within)
    return matrix


@dataclass(frozen=True)
class SimConfig:
    """
    Hyperparameters of the temporal network simulator

    Time is counted in discrete steps. The pre-network phase runs for horizon_pre steps,
    the recommender phase for horizon_lp further steps.
    """
    n_nodes: int = 300
    n_groups: int = 3
    prob_matrix: tuple = None
    activity_rate: float = 0.1
    top_probs: tuple = (0.3, 0.2, 0.1)
    popularity_low: float = 0.5
    popularity_high: float = 1.0
    n_clusters: int = 4
    cluster_noise: float = 0.5
    embedding_dim: int = 16
    retrain_period: int = 0
    horizon_pre: int = 200
    horizon_lp: int = 400
    pre_temperature: float = 1.0
    softmax_temperature: float = 0.1
    exclude_adjacent: bool = True
    homophily_bonus: float = 0.1
    cross_bonus: float = 0.1
    beta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.prob_matrix is None:
            matrix = default_prob_matrix(self.n_groups)
        else:
            matrix = np.asarray(self.prob_matrix, dtype=float)
        # Stored as nested tuples so the config stays hashable and frozen
        object.__setattr__(self, "prob_matrix", tuple(tuple(float(x) for x in row) for row in matrix))
        object.__setattr__(self, "top_probs", tuple(float(x) for x in self.top_probs))
        self._validate()

    def _validate(self):
        matrix = self.prob_matrix_array
        if self.n_groups < 1:
            raise ValidationError(f"n_groups must be >= 1, got {self.n_groups}")
        if matrix.shape != (self.n_groups, self.n_groups):
            raise ValidationError(f"prob_matrix must be {self.n_groups}x{self.n_groups}, got {matrix.shape}")
        if np.any(matrix < 0) or np.any(matrix > 1):
            raise ValidationError("prob_matrix entries must lie in [0, 1]")
        if not np.allclose(matrix, matrix.T):
            raise ValidationError("prob_matrix must be symmetric")
        if len(self.top_probs) != 3:
            raise ValidationError(f"top_probs must have length 3, got {len(self.top_probs)}")
        if self.n_nodes < self.n_groups:
            raise ValidationError("every group needs at least one node")
        if self.n_nodes < 4:
            raise ValidationError("at least 4 nodes are needed so that 3 candidates can exist")
        if not 0.0 <= self.activity_rate <= 1.0:
            raise ValidationError(f"activity_rate must lie in [0, 1], got {self.activity_rate}")
        if not 0.0 <= self.popularity_low <= self.popularity_high <= 1.0:
            raise ValidationError("popularity bounds must satisfy 0 <= low <= high <= 1")
        if self.embedding_dim < 1 or self.n_clusters < 1:
            raise ValidationError("embedding_dim and n_clusters must be >= 1")
        if self.retrain_period < 0:
            raise ValidationError("retrain_period must be >= 0")
        if self.horizon_pre < 0 or self.horizon_lp < 0 or self.horizon_pre + self.horizon_lp == 0:
            raise ValidationError("phase horizons must be >= 0 and not both zero")
        if self.pre_temperature <= 0 or self.softmax_temperature <= 0:
            raise ValidationError("softmax temperatures must be > 0")
        if self.beta <= 0:
            raise ValidationError("beta must be > 0")

    @property
    def prob_matrix_array(self):
        return np.array(self.prob_matrix, dtype=float)

    @property
    def horizon(self):
        """Total number of steps over both phases"""
        return self.horizon_pre + self.horizon_lp

    def copy_with(self, **overrides):
        return replace(self, **overrides)

    def to_dict(self):
        data = asdict(self)
        data["prob_matrix"] = [list(row) for row in self.prob_matrix]
        data["top_probs"] = list(self.top_probs)
        return data

    @classmethod
    def from_dict(cls, data):
        """
        Create a config from a flat dictionary

        Args:
            data: Mapping of SimConfig field names to values

        Returns:
            SimConfig: Validated config

        Raises:
            ValidationError: On unknown keys or invalid values
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown SimConfig keys: {', '.join(unknown)}")
        return cls(**data)
