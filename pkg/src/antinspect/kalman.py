"""Linear Kalman filter primitives used by the tracker.

These are plain functions over numpy arrays so the box-filter wiring and
the filter algebra can be tested separately. The update uses the Joseph
form, which keeps the posterior covariance symmetric positive
semidefinite under roundoff.
"""

from __future__ import annotations

import numpy as np


def kf_predict(
    mean: np.ndarray,
    cov: np.ndarray,
    transition: np.ndarray,
    process_noise: np.ndarray,
    control: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Time update: mean' = F x (+ u), cov' = F P F^T + Q.

    `control` is the already-formed additive control vector (B u); pass
    None when there is no control input.
    """
    new_mean = transition @ mean
    if control is not None:
        new_mean = new_mean + control
    new_cov = transition @ cov @ transition.T + process_noise
    return new_mean, 0.5 * (new_cov + new_cov.T)


def kf_update(
    mean: np.ndarray,
    cov: np.ndarray,
    measurement: np.ndarray,
    observation: np.ndarray,
    measurement_noise: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Measurement update with Joseph-stabilized covariance.

    K = P H^T S^-1 with S = H P H^T + R, obtained through a linear solve
    rather than an explicit inverse.
    """
    H = observation
    R = measurement_noise
    innovation_cov = H @ cov @ H.T + R
    # S K^T = H P  (P symmetric), so K = solve(S, H P)^T
    gain = np.linalg.solve(innovation_cov, H @ cov).T
    innovation = measurement - H @ mean
    new_mean = mean + gain @ innovation
    identity_kh = np.eye(mean.shape[0]) - gain @ H
    new_cov = identity_kh @ cov @ identity_kh.T + gain @ R @ gain.T
    return new_mean, 0.5 * (new_cov + new_cov.T)
