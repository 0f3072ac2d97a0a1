import numpy as np

from src.errors import ValidationError


class RegimeSchedule:
    """
    Piecewise-constant excitation matrix A(t)

    Breakpoints tau_0 = 0 < tau_1 < ... < tau_m delimit m intervals [tau_k, tau_k+1),
    the last one being [tau_m-1, tau_m). Each interval carries its own G x G matrix.
    Past the last breakpoint the last matrix stays in force.
    """

    def __init__(self, breakpoints, matrices):
        """
        Initialize a schedule

        Args:
            breakpoints: Sorted times starting at 0, one more than the number of matrices
            matrices: Sequence of G x G nonnegative excitation matrices
        """
        self._breakpoints = np.array(breakpoints, dtype=float).reshape(-1)
        self._matrices = tuple(np.array(m, dtype=float) for m in matrices)
        for m in self._matrices:
            m.setflags(write=False)
        self._breakpoints.setflags(write=False)
        self._validate()

    def _validate(self):
        if len(self._matrices) == 0:
            raise ValidationError("a regime schedule needs at least one matrix")
        if self._breakpoints.size != len(self._matrices) + 1:
            raise ValidationError(
                f"expected {len(self._matrices) + 1} breakpoints for {len(self._matrices)} matrices, "
                f"got {self._breakpoints.size}"
            )
        if self._breakpoints[0] != 0.0:
            raise ValidationError("the first breakpoint must be 0")
        if not np.all(np.isfinite(self._breakpoints)) or np.any(np.diff(self._breakpoints) <= 0):
            raise ValidationError("breakpoints must be finite and strictly increasing")

        shape = self._matrices[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValidationError(f"excitation matrices must be square, got shape {shape}")
        for k, m in enumerate(self._matrices):
            if m.shape != shape:
                raise ValidationError(f"matrix {k} has shape {m.shape}, expected {shape}")
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ValidationError(f"matrix {k} must be finite and nonnegative")

    @classmethod
    def constant(cls, A, horizon):
        """Single-regime schedule covering [0, horizon)"""
        return cls([0.0, horizon], [A])

    @property
    def breakpoints(self):
        return self._breakpoints

    @property
    def matrices(self):
        return self._matrices

    @property
    def n_regimes(self):
        return len(self._matrices)

    @property
    def dimension(self):
        return self._matrices[0].shape[0]

    @property
    def end(self):
        return float(self._breakpoints[-1])

    def interior_breakpoints(self):
        """Regime switch times tau_1..tau_m-1"""
        return self._breakpoints[1:-1].copy()

    def intervals(self):
        """List of (start, end) tuples, one per regime"""
        return [(float(a), float(b)) for a, b in zip(self._breakpoints[:-1], self._breakpoints[1:])]

    def regime_index(self, t):
        """Index of the regime in force at time t"""
        k = int(np.searchsorted(self._breakpoints, t, side="right")) - 1
        return min(max(k, 0), self.n_regimes - 1)

    def matrix_at(self, t):
        return self._matrices[self.regime_index(t)]

    def check_horizon(self, horizon):
        """Reject schedules whose last breakpoint lies beyond the observation horizon"""
        if self.end > horizon:
            raise ValidationError(f"schedule ends at {self.end}, beyond horizon {horizon}")

    def to_dict(self):
        return {
            "breakpoints": self._breakpoints.tolist(),
            "matrices": [m.tolist() for m in self._matrices],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["breakpoints"], data["matrices"])

    def __repr__(self):
        return f"RegimeSchedule(breakpoints={self._breakpoints.tolist()})"
