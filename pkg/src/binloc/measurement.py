"""Binary-sensor likelihood.

A reading is 1 when the sensor met at least one particle during its sensing
interval. With Poisson encounter counts of mean mu, that happens with
probability ``q = 1 - exp(-mu)``; readings are conditionally independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from binloc.dispersion import Environment, ParameterVector, encounter_rate_array
from binloc.errors import DomainError, ValidationError
from binloc.geometry import Point, to_wind_frame_xy


@dataclass(frozen=True)
class Reading:
    position: Point
    b: int

    def __post_init__(self):
        if not isinstance(self.position, Point):
            object.__setattr__(self, "position", Point(*map(float, self.position)))
        if self.b not in (0, 1):
            raise ValidationError(f"binary reading must be 0 or 1, got {self.b!r}")


@dataclass(frozen=True)
class ReadingSet:
    readings: tuple[Reading, ...]

    def __post_init__(self):
        object.__setattr__(self, "readings", tuple(self.readings))

    @classmethod
    def from_arrays(cls, xy: Sequence[Sequence[float]], b: Iterable[int]) -> ReadingSet:
        return cls(tuple(Reading(Point(float(x), float(y)), int(bi)) for (x, y), bi in zip(xy, b)))

    def __len__(self):
        return len(self.readings)

    def __iter__(self):
        return iter(self.readings)

    @property
    def positions(self) -> np.ndarray:
        return np.array([[r.position.x, r.position.y] for r in self.readings]).reshape(-1, 2)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.b for r in self.readings], dtype=int)

    @property
    def n_positive(self) -> int:
        return int(self.values.sum())


def detection_prob(mu):
    """Probability of at least one encounter, ``1 - exp(-mu)``."""
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0) or np.any(np.isnan(mu)):
        raise DomainError("mean count must be >= 0")
    q = -np.expm1(-mu)
    return float(q) if q.ndim == 0 else q


def log_likelihood_terms(mu: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-reading log-probabilities from mean counts (broadcast over leading axes).

    ``ln(1 - q)`` is taken as ``-mu`` exactly; ``ln q`` is ``-inf`` when mu is 0.
    """
    with np.errstate(divide="ignore"):
        log_q = np.log(-np.expm1(-mu))
    return np.where(b == 1, log_q, -mu)


def log_likelihood_matrix(xy_wind: np.ndarray, b: np.ndarray, params: np.ndarray, env: Environment) -> np.ndarray:
    """Log-likelihood of every parameter row.

    ``xy_wind`` holds the M sensor positions already in the wind frame,
    ``params`` is an ``(N, 4)`` array of ``(x0, y0, q0, v)`` also in the wind
    frame. Returns shape ``(N,)``.
    """
    if len(b) == 0:
        return np.zeros(len(params))
    p = params[:, :, None]
    rate = encounter_rate_array(xy_wind[:, 0], xy_wind[:, 1], p[:, 0], p[:, 1], p[:, 2], p[:, 3], env)
    mu = env.sensing_interval * rate
    return log_likelihood_terms(mu, b).sum(axis=1)


def log_likelihood(
    readings: ReadingSet,
    theta: ParameterVector,
    env: Environment,
    origin: tuple[float, float] = (0.0, 0.0),
) -> float:
    """``ln p(b | theta)`` for site-frame readings and source position.

    Returns ``-inf`` (not an error) when a detection sits where the model
    predicts exactly zero encounters.
    """
    if len(readings) == 0:
        return 0.0
    xy = to_wind_frame_xy(readings.positions, origin, env.wind_direction)
    src = to_wind_frame_xy((theta.x0, theta.y0), origin, env.wind_direction)[0]
    params = np.array([[src[0], src[1], theta.q0, theta.v]])
    value = float(log_likelihood_matrix(xy, readings.values, params, env)[0])
    return value if not math.isnan(value) else -math.inf
