import logging

import numpy as np

from src.errors import SpectralConvergenceError, ValidationError

logger = logging.getLogger(__name__)


def normalize(vector):
    """Normalize a vector"""
    norm = np.linalg.norm(vector)
    if norm < 1e-10:  # Avoid division by zero
        return vector
    return vector / norm


def normalize_rows(matrix):
    """Normalize every row of a matrix, leaving (near) zero rows untouched"""
    matrix = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return np.where(norms < 1e-10, matrix, matrix / np.maximum(norms, 1e-10))


def cosine_similarity(vector, matrix):
    """
    Cosine similarity of one vector against every row of a matrix

    Zero vectors have similarity 0 with everything.
    """
    vector = np.asarray(vector, dtype=float)
    matrix = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(vector)
    dots = matrix @ vector
    out = np.zeros(matrix.shape[0])
    nonzero = norms >= 1e-10
    out[nonzero] = dots[nonzero] / norms[nonzero]
    return out


def softmax(scores, temperature=1.0):
    """
    Softmax of scores / temperature

    Args:
        scores: Real scores
        temperature: Positive temperature, smaller values sharpen the distribution

    Returns:
        ndarray: Probabilities summing to 1
    """
    if temperature <= 0:
        raise ValidationError(f"softmax temperature must be > 0, got {temperature}")
    z = np.asarray(scores, dtype=float) / temperature
    z = z - z.max()
    weights = np.exp(z)
    return weights / weights.sum()


def _is_triangular(matrix):
    return not np.any(np.triu(matrix, 1)) or not np.any(np.tril(matrix, -1))


def _power_iteration(matrix, start, rtol, max_iter):
    # Iterate on M + I: the Perron root becomes strictly dominant in modulus
    shifted = matrix + np.eye(matrix.shape[0])
    floor = 1e4 * np.finfo(float).eps * np.linalg.norm(matrix)
    x = normalize(start)
    for iteration in range(1, max_iter + 1):
        y = matrix @ x
        q = float(x @ y)
        residual = np.linalg.norm(y - q * x)
        if residual <= 1e-2 * rtol * max(abs(q), floor):
            return q, iteration
        x = normalize(shifted @ x)
    return None, max_iter


def spectral_radius_nonnegative(matrix, rtol=1e-10, max_iter=10_000, seed=0):
    """
    Spectral radius of a nonnegative square matrix

    Triangular matrices (diagonal ones included) read the radius off the diagonal and
    nilpotent matrices return 0. Otherwise power iteration from the all-ones vector,
    restarted once from a random positive vector when it stagnates.

    Args:
        matrix: Nonnegative square matrix
        rtol: Relative tolerance of the Rayleigh-quotient residual
        max_iter: Iteration cap per attempt
        seed: Seed of the restart vector

    Returns:
        float: Dominant eigenvalue

    Raises:
        SpectralConvergenceError: Both attempts stagnated
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {matrix.shape}")
    if np.any(matrix < 0):
        raise ValidationError("spectral radius via power iteration needs a nonnegative matrix")

    size = matrix.shape[0]
    if size == 0 or not np.any(matrix):
        return 0.0
    if _is_triangular(matrix):
        return float(np.max(np.diag(matrix)))
    if not np.any(np.linalg.matrix_power(matrix, size)):
        return 0.0

    value, iterations = _power_iteration(matrix, np.ones(size), rtol, max_iter)
    if value is None:
        logger.debug("Power iteration stagnated after %d iterations, restarting", iterations)
        rng = np.random.Generator(np.random.Philox(seed))
        value, iterations = _power_iteration(matrix, rng.uniform(0.5, 1.5, size), rtol, max_iter)
    if value is None:
        raise SpectralConvergenceError(f"power iteration did not converge in {max_iter} iterations")
    return max(value, 0.0)
