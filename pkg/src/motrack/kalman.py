"""Constant-velocity Kalman filtering in image coordinates.

The state is the 8-vector (u, v, a, h, du, dv, da, dh): bounding-box centre,
aspect ratio, height, and their per-frame velocities.  Observations are the
4-vector (u, v, a, h).  The time step is one frame, and both process and
observation noise scale with the current box height, so uncertainty tracks
apparent object size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, SingularInnovationError

STATE_DIM = 8
MEASUREMENT_DIM = 4

# 95th percentile of the chi-square distribution with 4 degrees of freedom:
# the gate applied to squared Mahalanobis distances between a track's
# projected state and a 4-dimensional measurement.
CHI2_GATE_95 = 9.4877

# Spread of the aspect-ratio component, which does not scale with height.
_ASPECT_STD = 1e-2
_ASPECT_VELOCITY_STD = 1e-5
_ASPECT_OBSERVATION_STD = 1e-1


@dataclass(frozen=True)
class StateDistribution:
    """Gaussian belief over the 8-dimensional box state."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        covariance = np.asarray(self.covariance, dtype=np.float64)
        if mean.shape != (STATE_DIM,) or covariance.shape != (STATE_DIM, STATE_DIM):
            raise DimensionMismatchError(
                "state distribution must be an 8-vector with an 8x8 covariance"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", covariance)


@dataclass(frozen=True)
class ProjectedDistribution:
    """Belief projected into measurement space, observation noise included."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        covariance = np.asarray(self.covariance, dtype=np.float64)
        if mean.shape != (MEASUREMENT_DIM,) or covariance.shape != (
            MEASUREMENT_DIM,
            MEASUREMENT_DIM,
        ):
            raise DimensionMismatchError(
                "projected distribution must be a 4-vector with a 4x4 covariance"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", covariance)


def innovation_cholesky(covariance: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor(s) of one or more innovation covariances.

    Accepts a (4, 4) matrix or a stacked (T, 4, 4) array and raises
    :class:`SingularInnovationError` when any factorisation fails.
    """
    try:
        return np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError as exc:
        raise SingularInnovationError(
            "innovation covariance is not positive definite"
        ) from exc


class KalmanFilter:
    """Predict/update machinery shared by every track.

    The filter itself is stateless: each method maps a ``StateDistribution``
    (and possibly a measurement) to a new distribution, so a single instance
    serves any number of tracks.
    """

    def __init__(
        self,
        std_weight_position: float = 1.0 / 20,
        std_weight_velocity: float = 1.0 / 160,
    ):
        self.std_weight_position = float(std_weight_position)
        self.std_weight_velocity = float(std_weight_velocity)

        self._motion_mat = np.eye(STATE_DIM)
        for i in range(MEASUREMENT_DIM):
            self._motion_mat[i, MEASUREMENT_DIM + i] = 1.0
        self._update_mat = np.eye(MEASUREMENT_DIM, STATE_DIM)

    def initiate(self, measurement: np.ndarray) -> StateDistribution:
        """Start a new track from an unassociated measurement.

        Velocities start at zero with a deliberately wide prior so the first
        few updates dominate the estimate.
        """
        measurement = np.asarray(measurement, dtype=np.float64)
        if measurement.shape != (MEASUREMENT_DIM,):
            raise DimensionMismatchError("measurement must be a 4-vector (u, v, a, h)")
        mean = np.concatenate([measurement, np.zeros(MEASUREMENT_DIM)])

        h = measurement[3]
        std = np.array(
            [
                2 * self.std_weight_position * h,
                2 * self.std_weight_position * h,
                _ASPECT_STD,
                2 * self.std_weight_position * h,
                10 * self.std_weight_velocity * h,
                10 * self.std_weight_velocity * h,
                _ASPECT_VELOCITY_STD,
                10 * self.std_weight_velocity * h,
            ]
        )
        return StateDistribution(mean, np.diag(std * std))

    def predict(self, state: StateDistribution) -> StateDistribution:
        """Advance the belief by one frame under the constant-velocity model."""
        h = state.mean[3]
        std = np.array(
            [
                self.std_weight_position * h,
                self.std_weight_position * h,
                _ASPECT_STD,
                self.std_weight_position * h,
                self.std_weight_velocity * h,
                self.std_weight_velocity * h,
                _ASPECT_VELOCITY_STD,
                self.std_weight_velocity * h,
            ]
        )
        motion_cov = np.diag(std * std)
        mean = self._motion_mat @ state.mean
        covariance = (
            self._motion_mat @ state.covariance @ self._motion_mat.T + motion_cov
        )
        return StateDistribution(mean, covariance)

    def project(self, state: StateDistribution) -> ProjectedDistribution:
        """Map the belief into measurement space and add observation noise."""
        h = state.mean[3]
        std = np.array(
            [
                self.std_weight_position * h,
                self.std_weight_position * h,
                _ASPECT_OBSERVATION_STD,
                self.std_weight_position * h,
            ]
        )
        mean = self._update_mat @ state.mean
        covariance = (
            self._update_mat @ state.covariance @ self._update_mat.T
            + np.diag(std * std)
        )
        return ProjectedDistribution(mean, covariance)

    def update(
        self, state: StateDistribution, measurement: np.ndarray
    ) -> StateDistribution:
        """Fold one measurement into the belief."""
        measurement = np.asarray(measurement, dtype=np.float64)
        if measurement.shape != (MEASUREMENT_DIM,):
            raise DimensionMismatchError("measurement must be a 4-vector (u, v, a, h)")
        projected = self.project(state)
        innovation_cholesky(projected.covariance)

        # Kalman gain K = P H' S^-1, obtained by solving S K' = H P.
        gain = np.linalg.solve(
            projected.covariance, self._update_mat @ state.covariance
        ).T
        innovation = measurement - projected.mean
        mean = state.mean + gain @ innovation
        covariance = state.covariance - gain @ projected.covariance @ gain.T
        return StateDistribution(mean, covariance)

    def gating_distance(
        self, state: StateDistribution, measurements: np.ndarray
    ) -> np.ndarray:
        """Squared Mahalanobis distance from the projected belief to each row.

        ``measurements`` is (M, 4); the result is a length-M vector suitable
        for thresholding against :data:`CHI2_GATE_95`.
        """
        measurements = np.asarray(measurements, dtype=np.float64)
        if measurements.ndim != 2 or measurements.shape[1] != MEASUREMENT_DIM:
            raise DimensionMismatchError("measurements must be an (M, 4) array")
        projected = self.project(state)
        chol = innovation_cholesky(projected.covariance)
        return _kernels.mahalanobis_batch(
            chol[None, :, :], projected.mean[None, :], measurements
        )[0]
