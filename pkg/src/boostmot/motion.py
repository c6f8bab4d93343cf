"""Constant-velocity Kalman filter over box observations [u, v, h, r].

State is an 8-vector [u, v, h, r, du, dv, dh, dr]: box center, height,
width/height ratio, and their per-frame velocities. The transition matrix is
the block form [[I, I], [0, I]] and the observation matrix picks the first
four components. Observation and process noise scale with object height for
u, v, h and use small constants for the ratio, with zero-noise settings
allowed so covariance-growth behaviour can be tested exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, NumericError
from .geometry import BBox, validate_box

DIM = 8
OBS_DIM = 4

F = np.eye(DIM)
F[:OBS_DIM, OBS_DIM:] = np.eye(OBS_DIM)

H = np.zeros((OBS_DIM, DIM))
H[:, :OBS_DIM] = np.eye(OBS_DIM)


@dataclass(frozen=True)
class NoiseConfig:
    """Noise generator scales; all must be >= 0.

    Position-like stds (u, v, h) are fractions of the current box height;
    ratio stds are absolute. ``init_vel_var_mult`` sets the initial velocity
    variance as a multiple of the initial position variance.
    """

    obs_pos_weight: float = 1.0 / 20
    obs_ratio_std: float = 0.1
    proc_pos_weight: float = 1.0 / 20
    proc_ratio_std: float = 1e-2
    proc_vel_weight: float = 1.0 / 160
    proc_ratio_vel_std: float = 1e-4
    init_vel_var_mult: float = 10.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0:
                raise ValueError(f"noise scale {name} must be >= 0")

    @classmethod
    def zero_process(cls, **kwargs) -> "NoiseConfig":
        """Observation noise only; Q = 0 so prediction variance growth is exact."""
        return cls(proc_pos_weight=0.0, proc_ratio_std=0.0,
                   proc_vel_weight=0.0, proc_ratio_vel_std=0.0, **kwargs)

    def observation_cov(self, height: float) -> np.ndarray:
        s = self.obs_pos_weight * height
        return np.diag([s * s, s * s, s * s, self.obs_ratio_std ** 2])

    def process_cov(self, height: float) -> np.ndarray:
        p = self.proc_pos_weight * height
        v = self.proc_vel_weight * height
        return np.diag([p * p, p * p, p * p, self.proc_ratio_std ** 2,
                        v * v, v * v, v * v, self.proc_ratio_vel_std ** 2])


@dataclass
class KalmanState:
    """Mean (8,) and symmetric positive-semidefinite covariance (8, 8)."""

    mean: np.ndarray
    cov: np.ndarray


def _check_finite(state: KalmanState) -> None:
    if not (np.isfinite(state.mean).all() and np.isfinite(state.cov).all()):
        raise NumericError("Kalman state contains non-finite values")


def _symmetrize(cov: np.ndarray) -> np.ndarray:
    return (cov + cov.T) / 2.0


def bbox_to_observation(b: BBox) -> np.ndarray:
    """Box -> [center x, center y, height, width/height ratio]."""
    validate_box(b)
    return np.array([b.x + b.w / 2.0, b.y + b.h / 2.0, b.h, b.w / b.h])


def observation_to_bbox(z: np.ndarray) -> BBox:
    """Inverse of bbox_to_observation; requires positive height and ratio."""
    u, v, h, r = float(z[0]), float(z[1]), float(z[2]), float(z[3])
    if not (h > 0 and r > 0):
        raise GeometryError(f"observation needs h > 0 and r > 0, got h={h}, r={r}")
    w = r * h
    return BBox(u - w / 2.0, v - h / 2.0, w, h)


def state_to_bbox(state: KalmanState) -> BBox:
    return observation_to_bbox(state.mean[:OBS_DIM])


def init_state(b: BBox, noise: NoiseConfig) -> KalmanState:
    """New-tracklet state: observed box, zero velocities, uninformative velocity prior."""
    z = bbox_to_observation(b)
    mean = np.zeros(DIM)
    mean[:OBS_DIM] = z
    pos_var = np.diag(noise.observation_cov(b.h))
    cov = np.zeros((DIM, DIM))
    cov[:OBS_DIM, :OBS_DIM] = np.diag(pos_var)
    cov[OBS_DIM:, OBS_DIM:] = np.diag(noise.init_vel_var_mult * pos_var)
    return KalmanState(mean, cov)


def predict(state: KalmanState, noise: NoiseConfig) -> KalmanState:
    """One transition step: mean' = F mean, cov' = F cov F^T + Q."""
    _check_finite(state)
    mean = F @ state.mean
    cov = _symmetrize(F @ state.cov @ F.T + noise.process_cov(state.mean[2]))
    return KalmanState(mean, cov)


def innovation_covariance(state: KalmanState, noise: NoiseConfig) -> np.ndarray:
    """Covariance of the predicted observation: H P H^T + R."""
    return H @ state.cov @ H.T + noise.observation_cov(state.mean[2])


def update(state: KalmanState, obs: BBox, noise: NoiseConfig) -> KalmanState:
    """Kalman update with the observed box, Joseph-form covariance for PSD robustness."""
    _check_finite(state)
    z = bbox_to_observation(obs)
    r_cov = noise.observation_cov(state.mean[2])
    s_innov = H @ state.cov @ H.T + r_cov
    try:
        gain = np.linalg.solve(s_innov, H @ state.cov).T
    except np.linalg.LinAlgError as exc:
        raise NumericError("singular innovation covariance") from exc
    mean = state.mean + gain @ (z - H @ state.mean)
    i_kh = np.eye(DIM) - gain @ H
    cov = _symmetrize(i_kh @ state.cov @ i_kh.T + gain @ r_cov @ gain.T)
    new = KalmanState(mean, cov)
    _check_finite(new)
    return new
