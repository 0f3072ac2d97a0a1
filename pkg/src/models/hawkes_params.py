import numpy as np

from src.errors import ValidationError
from src.models.group_pair import GroupPair, all_pairs, n_pairs


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


class HawkesParams:
    """
    Parameters of the group-pair Hawkes process with exponential kernels

    The kernel from source pair (k,l) to target pair (i,j) is A[(i,j),(k,l)] * exp(-beta t).
    Rows of A are target pairs, columns are source pairs, both in GroupPair flat order.
    Instances are immutable.
    """

    def __init__(self, n_groups, mu, A, beta):
        """
        Initialize Hawkes parameters

        Args:
            n_groups: Group count K
            mu: Baseline intensities, length G = K(K+1)/2 (events per unit time)
            A: G x G excitation matrix
            beta: Decay rate (per unit time)
        """
        self._n_groups = int(n_groups)
        size = n_pairs(self._n_groups)
        self._mu = _frozen(mu).reshape(-1)
        self._A = _frozen(A)
        self._beta = float(beta)

        if self._mu.shape != (size,):
            raise ValidationError(f"mu must have length G = {size}, got shape {self._mu.shape}")
        if self._A.shape != (size, size):
            raise ValidationError(f"A must be {size}x{size}, got shape {self._A.shape}")
        if not np.all(np.isfinite(self._mu)) or np.any(self._mu < 0):
            raise ValidationError("baseline intensities must be finite and nonnegative")
        if not np.all(np.isfinite(self._A)) or np.any(self._A < 0):
            raise ValidationError("excitation strengths must be finite and nonnegative")
        if not np.isfinite(self._beta) or self._beta <= 0:
            raise ValidationError(f"decay rate beta must be > 0, got {beta}")

    @property
    def n_groups(self):
        return self._n_groups

    @property
    def n_pairs(self):
        return self._mu.shape[0]

    @property
    def mu(self):
        return self._mu

    @property
    def A(self):
        return self._A

    @property
    def beta(self):
        return self._beta

    def with_matrix(self, A):
        """Copy with a different excitation matrix"""
        return HawkesParams(self._n_groups, self._mu, A, self._beta)

    def with_mu(self, mu):
        """Copy with a different baseline vector"""
        return HawkesParams(self._n_groups, mu, self._A, self._beta)

    def is_diagonal(self):
        """True when all cross-pair excitations are zero"""
        return not np.any(self._A - np.diag(np.diag(self._A)))

    @classmethod
    def diagonal(cls, n_groups, mu, alpha, beta):
        """Parameters with a diagonal excitation matrix diag(alpha)"""
        return cls(n_groups, mu, np.diag(np.asarray(alpha, dtype=float)), beta)

    @classmethod
    def from_entries(cls, n_groups, mu, entries, beta):
        """
        Build parameters from named excitation entries

        Args:
            n_groups: Group count K
            mu: Mapping pair tuple -> baseline, or a G-vector
            entries: Mapping ((i, j), (k, l)) -> alpha, target pair first
            beta: Decay rate

        Returns:
            HawkesParams: Parameters with all unnamed entries zero
        """
        size = n_pairs(n_groups)
        if isinstance(mu, dict):
            mu_vector = np.zeros(size)
            for pair, value in mu.items():
                mu_vector[GroupPair(*pair).index(n_groups)] = value
        else:
            mu_vector = np.asarray(mu, dtype=float)

        A = np.zeros((size, size))
        for (target, source), value in entries.items():
            A[GroupPair(*target).index(n_groups), GroupPair(*source).index(n_groups)] = value
        return cls(n_groups, mu_vector, A, beta)

    def to_dict(self):
        """
        Convert parameters to a dictionary for serialization

        Returns:
            dict: Parameter data
        """
        return {
            "K": self._n_groups,
            "mu": self._mu.tolist(),
            "A": self._A.tolist(),
            "beta": self._beta,
        }

    @classmethod
    def from_dict(cls, data):
        """
        Create parameters from a dictionary

        Args:
            data: Dictionary with K, mu, A and beta

        Returns:
            HawkesParams: Created parameters
        """
        return cls(data["K"], data["mu"], data["A"], data.get("beta", 1.0))

    def __repr__(self):
        return f"HawkesParams(K={self._n_groups}, mu={self._mu.tolist()}, beta={self._beta})"


def neighbourhood_mask(n_groups):
    """
    Sparse neighbourhood structure of the excitation matrix

    Entry [(i,j),(k,l)] is True when the two pairs share at least one group index,
    the only entries allowed to be nonzero under the sparse neighbourhood assumption.
    """
    pairs = all_pairs(n_groups)
    size = len(pairs)
    mask = np.zeros((size, size), dtype=bool)
    for a, target in enumerate(pairs):
        for b, source in enumerate(pairs):
            mask[a, b] = bool({target.i, target.j} & {source.i, source.j})
    return mask
