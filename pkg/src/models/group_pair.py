from functools import lru_cache

import numpy as np

from src.errors import ValidationError


class GroupPair:
    """
    Unordered pair of node groups used as an event mark.

    Groups are numbered 1..K. The pair is stored canonically with i <= j.
    """
    __slots__ = ("_i", "_j")

    def __init__(self, i, j):
        """
        Initialize a group pair

        Args:
            i: First group index (1-based)
            j: Second group index (1-based)
        """
        i, j = int(i), int(j)
        if i < 1 or j < 1:
            raise ValidationError(f"group indices are 1-based, got ({i}, {j})")
        # Canonical ordering
        self._i, self._j = (i, j) if i <= j else (j, i)

    @property
    def i(self):
        return self._i

    @property
    def j(self):
        return self._j

    def is_within(self):
        """True for within-group pairs (i, i)"""
        return self._i == self._j

    def index(self, n_groups):
        """
        Flat index of this pair among the G = K(K+1)/2 pairs of K groups

        Within pairs (1,1)..(K,K) come first, then cross pairs in lexicographic order.

        Args:
            n_groups: Group count K

        Returns:
            int: Flat index in 0..G-1
        """
        if self._j > n_groups:
            raise ValidationError(f"pair {self} does not exist for K = {n_groups}")
        return _index_table(n_groups)[(self._i, self._j)]

    @classmethod
    def from_index(cls, index, n_groups):
        """Inverse of index()"""
        pairs = all_pairs(n_groups)
        if not 0 <= index < len(pairs):
            raise ValidationError(f"pair index {index} out of range for K = {n_groups}")
        return pairs[index]

    def __eq__(self, other):
        return isinstance(other, GroupPair) and (self._i, self._j) == (other._i, other._j)

    def __hash__(self):
        return hash((self._i, self._j))

    def __iter__(self):
        yield self._i
        yield self._j

    def __repr__(self):
        return f"GroupPair({self._i}, {self._j})"

    def __str__(self):
        return f"({self._i},{self._j})"


def n_pairs(n_groups):
    """G = K(K+1)/2"""
    return n_groups * (n_groups + 1) // 2


@lru_cache(maxsize=None)
def all_pairs(n_groups):
    """
    All canonical pairs of K groups in flat-index order

    Args:
        n_groups: Group count K

    Returns:
        tuple: GroupPair objects, position = flat index
    """
    if n_groups < 1:
        raise ValidationError(f"group count must be >= 1, got {n_groups}")
    within = [GroupPair(g, g) for g in range(1, n_groups + 1)]
    cross = [GroupPair(a, b) for a in range(1, n_groups + 1) for b in range(a + 1, n_groups + 1)]
    return tuple(within + cross)


@lru_cache(maxsize=None)
def _index_table(n_groups):
    return {(p.i, p.j): k for k, p in enumerate(all_pairs(n_groups))}


def pair_index(i, j, n_groups):
    """Flat index of the canonical pair of groups i and j"""
    return GroupPair(i, j).index(n_groups)


def within_mask(n_groups):
    """Boolean G-vector, True at within-group pairs"""
    return np.array([p.is_within() for p in all_pairs(n_groups)], dtype=bool)


def group_count_for(n_pairs_value):
    """Recover K from G = K(K+1)/2, rejecting sizes that are not triangular"""
    k = int(round((np.sqrt(8 * n_pairs_value + 1) - 1) / 2))
    if k < 1 or n_pairs(k) != n_pairs_value:
        raise ValidationError(f"{n_pairs_value} is not a valid pair count K(K+1)/2")
    return k


def aggregate_within_cross(values, n_groups):
    """
    Sum a G-vector (or an (n, G) array) over within pairs and over cross pairs

    Args:
        values: Array whose last axis is indexed by pair
        n_groups: Group count K

    Returns:
        tuple: (within total, cross total), scalars or arrays over leading axes
    """
    values = np.asarray(values, dtype=float)
    mask = within_mask(n_groups)
    return values[..., mask].sum(axis=-1), values[..., ~mask].sum(axis=-1)


def to_group_matrix(values, n_groups):
    """
    Lay a G-vector out as the symmetric K x K group matrix

    Entry [i-1, j-1] = [j-1, i-1] holds the value of pair (i, j).
    """
    values = np.asarray(values, dtype=float)
    matrix = np.zeros((n_groups, n_groups))
    for k, pair in enumerate(all_pairs(n_groups)):
        matrix[pair.i - 1, pair.j - 1] = values[k]
        matrix[pair.j - 1, pair.i - 1] = values[k]
    return matrix
