import numpy as np


def rk4_linear_map(J, c, h):
    """
    Affine map performed by one RK4 step on y' = J y + c

    For a constant Jacobian the four RK4 stages collapse to y -> P y + q with
    P = sum_{n<=4} (hJ)^n / n! and q = h * sum_{n<=3} (hJ)^n / (n+1)! c.

    Args:
        J: Constant square Jacobian
        c: Constant forcing vector
        h: Step size

    Returns:
        tuple: (P, q)
    """
    J = np.asarray(J, dtype=float)
    hJ = h * J
    identity = np.eye(J.shape[0])
    hJ2 = hJ @ hJ
    hJ3 = hJ2 @ hJ
    P = identity + hJ + hJ2 / 2 + hJ3 / 6 + hJ3 @ hJ / 24
    q = h * (identity + hJ / 2 + hJ2 / 6 + hJ3 / 24) @ np.asarray(c, dtype=float)
    return P, q
