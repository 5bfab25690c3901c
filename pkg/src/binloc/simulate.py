"""Synthetic binary readings from a known source.

Each sensor position gets a Poisson encounter count with the model mean, and
reads 1 when that count is at least one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binloc.dispersion import Environment, ParameterVector, encounter_rate_array, mean_count
from binloc.errors import DomainError
from binloc.geometry import Point, to_wind_frame_xy
from binloc.measurement import ReadingSet
from binloc.rng import SIMULATE, RandomStream, random_stream

INVERSION_MAX_MU = 30.0


@dataclass(frozen=True)
class GroundTruth:
    theta_true: ParameterVector
    sensor_positions: tuple[Point, ...]
    seed: int = 0

    def __post_init__(self):
        pts = tuple(p if isinstance(p, Point) else Point(*map(float, p)) for p in self.sensor_positions)
        object.__setattr__(self, "sensor_positions", pts)

    @property
    def positions(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.sensor_positions]).reshape(-1, 2)


@dataclass(frozen=True)
class SimulatedReadings:
    readings: ReadingSet
    counts: np.ndarray
    mu: np.ndarray


def _poisson_inversion(mu: float, u: float) -> int:
    k = 0
    p = math.exp(-mu)
    cdf = p
    while u > cdf:
        k += 1
        p *= mu / k
        cdf += p
        if p == 0.0:  # cdf has saturated below u through rounding
            break
    return k


def _poisson_ptrs(mu: float, rng: RandomStream) -> int:
    """Hormann's transformed rejection with squeeze, for mu >= 10."""
    slam = math.sqrt(mu)
    loglam = math.log(mu)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + mu + 0.43)
        if us >= 0.07 and v <= v_r:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b) <= -mu + k * loglam - math.lgamma(k + 1):
            return int(k)


def poisson_sample(mu, rng: RandomStream):
    """Poisson variates with mean ``mu`` (scalar or array).

    Inversion by sequential CDF search for ``mu <= 30``, transformed rejection
    above. Elements are drawn in index order so the output depends only on the
    stream state.
    """
    arr = np.asarray(mu, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError("Poisson mean must be >= 0")
    flat = arr.reshape(-1)
    out = np.empty(flat.shape, dtype=np.int64)
    if np.all(flat <= INVERSION_MAX_MU):
        u = rng.random(len(flat))
        for m in np.unique(flat):
            sel = flat == m
            out[sel] = _inversion_vector(m, u[sel])
    else:
        for i, m in enumerate(flat):
            out[i] = _poisson_inversion(m, rng.random()) if m <= INVERSION_MAX_MU else _poisson_ptrs(m, rng)
    out = out.reshape(arr.shape)
    return int(out) if out.ndim == 0 else out


def _inversion_vector(mu: float, u: np.ndarray) -> np.ndarray:
    # shared-mean inversion: compare every u against one CDF table
    if mu == 0.0:
        return np.zeros(len(u), dtype=np.int64)
    probs = [math.exp(-mu)]
    cdf = [probs[0]]
    while cdf[-1] < u.max() and probs[-1] > 0.0:
        k = len(probs)
        probs.append(probs[-1] * mu / k)
        cdf.append(cdf[-1] + probs[-1])
    return np.minimum(np.searchsorted(np.array(cdf), u, side="left"), len(cdf) - 1).astype(np.int64)


def expected_counts(
    positions: np.ndarray, theta: ParameterVector, env: Environment, origin=(0.0, 0.0)
) -> np.ndarray:
    """Mean encounter counts at site-frame ``positions`` under ``theta``."""
    xy = to_wind_frame_xy(positions, origin, env.wind_direction)
    src = to_wind_frame_xy((theta.x0, theta.y0), origin, env.wind_direction)[0]
    rate = encounter_rate_array(xy[:, 0], xy[:, 1], src[0], src[1], theta.q0, theta.v, env)
    return mean_count(rate, env)


def simulate_readings(gt: GroundTruth, env: Environment, origin=(0.0, 0.0), rng: RandomStream | None = None):
    """Like :func:`generate_readings` but also returns counts and means."""
    if rng is None:
        rng = random_stream(gt.seed, SIMULATE)
    positions = gt.positions
    mu = expected_counts(positions, gt.theta_true, env, origin)
    z = np.asarray(poisson_sample(mu, rng)).reshape(-1)
    b = (z >= 1).astype(int)
    return SimulatedReadings(ReadingSet.from_arrays(positions, b), z, mu)


def generate_readings(gt: GroundTruth, env: Environment, origin=(0.0, 0.0)) -> ReadingSet:
    """Binary readings at every sensor position, deterministic in ``gt.seed``."""
    return simulate_readings(gt, env, origin).readings
