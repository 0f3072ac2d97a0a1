import numpy as np

from src.errors import ValidationError
from src.models.group_pair import GroupPair, all_pairs, n_pairs, within_mask


class EventLog:
    """
    Time-ordered marked events on the observation interval [0, horizon)

    Each event carries a time and a group-pair mark (stored as the pair's flat index).
    Times are nondecreasing globally and strictly increasing within each mark stream.
    Instances are immutable.
    """

    def __init__(self, n_groups, times, marks, horizon):
        """
        Initialize an event log

        Args:
            n_groups: Group count K
            times: Event times, nondecreasing
            marks: Flat pair index of each event
            horizon: Observation end time T
        """
        self._n_groups = int(n_groups)
        self._horizon = float(horizon)
        self._times = np.array(times, dtype=float).reshape(-1)
        self._marks = np.array(marks, dtype=np.int64).reshape(-1)
        self._times.setflags(write=False)
        self._marks.setflags(write=False)
        self._validate()

    def _validate(self):
        size = n_pairs(self._n_groups)
        if not np.isfinite(self._horizon) or self._horizon <= 0:
            raise ValidationError(f"horizon must be > 0, got {self._horizon}")
        if self._times.shape != self._marks.shape:
            raise ValidationError("times and marks must have the same length")
        if self._times.size == 0:
            return
        if np.any(self._marks < 0) or np.any(self._marks >= size):
            raise ValidationError(f"marks must be flat pair indices in 0..{size - 1}")
        if not np.all(np.isfinite(self._times)):
            raise ValidationError("event times must be finite")
        if self._times[0] < 0 or self._times[-1] >= self._horizon:
            raise ValidationError(f"event times must lie in [0, {self._horizon})")
        if np.any(np.diff(self._times) < 0):
            raise ValidationError("event times must be nondecreasing")
        # Strictly increasing within each mark stream
        order = np.lexsort((self._times, self._marks))
        same_mark = np.diff(self._marks[order]) == 0
        if np.any(same_mark & (np.diff(self._times[order]) <= 0)):
            raise ValidationError("event times must be strictly increasing within each mark stream")

    @classmethod
    def from_events(cls, n_groups, events, horizon, sort=False):
        """
        Build a log from (time, pair) tuples

        Args:
            n_groups: Group count K
            events: Iterable of (t, GroupPair) or (t, (i, j))
            horizon: Observation end time
            sort: Sort by time (ties by flat mark index) instead of keeping insertion order

        Returns:
            EventLog: Created log
        """
        times, marks = [], []
        for t, pair in events:
            if not isinstance(pair, GroupPair):
                pair = GroupPair(*pair)
            times.append(float(t))
            marks.append(pair.index(n_groups))
        times = np.asarray(times, dtype=float)
        marks = np.asarray(marks, dtype=np.int64)
        if sort and times.size:
            order = np.lexsort((marks, times))
            times, marks = times[order], marks[order]
        return cls(n_groups, times, marks, horizon)

    @classmethod
    def empty(cls, n_groups, horizon):
        return cls(n_groups, [], [], horizon)

    @property
    def n_groups(self):
        return self._n_groups

    @property
    def n_pairs(self):
        return n_pairs(self._n_groups)

    @property
    def horizon(self):
        return self._horizon

    @property
    def times(self):
        return self._times

    @property
    def marks(self):
        return self._marks

    def __len__(self):
        return self._times.size

    def __iter__(self):
        pairs = all_pairs(self._n_groups)
        for t, m in zip(self._times, self._marks):
            yield float(t), pairs[m]

    def __eq__(self, other):
        return (
            isinstance(other, EventLog)
            and self._n_groups == other._n_groups
            and self._horizon == other._horizon
            and np.array_equal(self._times, other._times)
            and np.array_equal(self._marks, other._marks)
        )

    def stream(self, pair_index, start=0.0, end=None):
        """Times of the events of one pair inside [start, end)"""
        end = self._horizon if end is None else end
        keep = (self._marks == pair_index) & (self._times >= start) & (self._times < end)
        return self._times[keep]

    def counts(self, start=0.0, end=None):
        """Per-pair event counts in [start, end)"""
        end = self._horizon if end is None else end
        keep = (self._times >= start) & (self._times < end)
        return np.bincount(self._marks[keep], minlength=self.n_pairs)

    def cumulative_counts(self, grid, inclusive=True):
        """
        Per-pair counting processes evaluated on a time grid

        Args:
            grid: Query times
            inclusive: Count events at s <= t (right-continuous) rather than s < t

        Returns:
            ndarray: (len(grid), G) counts
        """
        grid = np.asarray(grid, dtype=float)
        side = "right" if inclusive else "left"
        result = np.zeros((grid.size, self.n_pairs), dtype=np.int64)
        for p in range(self.n_pairs):
            result[:, p] = np.searchsorted(self._times[self._marks == p], grid, side=side)
        return result

    def within_cross_counts(self, grid, inclusive=True):
        """N_w(t) and N_c(t) on a grid"""
        counts = self.cumulative_counts(grid, inclusive=inclusive)
        mask = within_mask(self._n_groups)
        return counts[:, mask].sum(axis=1), counts[:, ~mask].sum(axis=1)

    def restrict(self, start, end):
        """Events in [start, end), keeping absolute times and horizon `end`"""
        keep = (self._times >= start) & (self._times < end)
        return EventLog(self._n_groups, self._times[keep], self._marks[keep], end)

    def __repr__(self):
        return f"EventLog(K={self._n_groups}, events={len(self)}, horizon={self._horizon})"
