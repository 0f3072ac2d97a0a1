import numpy as np

from src.errors import ValidationError


class StreamStatistics:
    """
    Sufficient statistics of one mark stream for the exponential-kernel likelihood

    Times are shifted so that the window starts at 0 and history before it is ignored.
    """

    def __init__(self, times, start, end, beta):
        """
        Args:
            times: Sorted event times of the stream inside [start, end)
            start: Window start
            end: Window end
            beta: Kernel decay rate
        """
        if end <= start:
            raise ValidationError(f"empty window [{start}, {end})")
        if beta <= 0:
            raise ValidationError(f"beta must be > 0, got {beta}")
        times = np.asarray(times, dtype=float) - start
        self._length = float(end - start)
        self._beta = float(beta)
        self._recursion = recursion_terms(times, beta)
        self._compensator = float(np.sum(-np.expm1(-beta * (self._length - times))))

    @property
    def n_events(self):
        return self._recursion.size

    @property
    def length(self):
        return self._length

    @property
    def beta(self):
        return self._beta

    @property
    def recursion(self):
        """R_i = sum over earlier events of exp(-beta (t_i - t_j))"""
        return self._recursion

    @property
    def compensator(self):
        """S = sum_i (1 - exp(-beta (T - t_i)))"""
        return self._compensator

    def log_likelihood(self, mu, alpha):
        """L(mu, alpha) = sum log(mu + alpha R_i) - mu T - (alpha / beta) S"""
        rates = mu + alpha * self._recursion
        with np.errstate(divide="ignore"):
            log_terms = np.log(rates).sum() if rates.size else 0.0
        return float(log_terms - mu * self._length - alpha / self._beta * self._compensator)

    def gradient(self, mu, alpha):
        """(dL/dmu, dL/dalpha)"""
        inverse = 1.0 / (mu + alpha * self._recursion)
        return np.array([
            inverse.sum() - self._length,
            (self._recursion * inverse).sum() - self._compensator / self._beta,
        ])

    def hessian(self, mu, alpha):
        inverse_sq = 1.0 / (mu + alpha * self._recursion) ** 2
        r = self._recursion
        off = -(r * inverse_sq).sum()
        return np.array([
            [-inverse_sq.sum(), off],
            [off, -(r * r * inverse_sq).sum()],
        ])

    def poisson_log_likelihood(self):
        """Likelihood of the pure-Poisson fit mu = N/T, alpha = 0"""
        n = self.n_events
        if n == 0:
            return 0.0
        return n * np.log(n / self._length) - n


def recursion_terms(times, beta):
    """
    R_1 = 0, R_i = exp(-beta (t_i - t_{i-1})) (1 + R_{i-1})

    Args:
        times: Sorted event times
        beta: Decay rate

    Returns:
        ndarray: R_i per event
    """
    times = np.asarray(times, dtype=float)
    out = np.zeros(times.size)
    if times.size < 2:
        return out
    decay = np.exp(-beta * np.diff(times))
    running = 0.0
    for k, factor in enumerate(decay, start=1):
        running = factor * (1.0 + running)
        out[k] = running
    return out
