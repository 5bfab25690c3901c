"""Factorised prior over (x0, y0, Q0, V).

Position is uniform over the prior region, the normalised release rate is
Gamma(k, eta) and wind speed is Normal(V bar, sigma_V) truncated to V > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binloc.dispersion import ParameterVector
from binloc.errors import ValidationError
from binloc.geometry import Disc, Point, PriorRegion, sample_region_uniform
from binloc.measurement import ReadingSet
from binloc.rng import RandomStream

DEFAULT_DISC_RADIUS = 150.0


@dataclass(frozen=True)
class PriorSpec:
    region: PriorRegion
    gamma_shape: float = 3.0
    gamma_scale: float = 7.0
    wind_mean: float = 1.0
    wind_sd: float = 0.2
    # pins V to a known value (point-mass prior); used for fixed-wind studies
    fixed_wind: float | None = None

    def __post_init__(self):
        for name in ("gamma_shape", "gamma_scale", "wind_mean", "wind_sd"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be finite and > 0, got {value}")
        if self.fixed_wind is not None and not self.fixed_wind > 0:
            raise ValidationError(f"fixed_wind must be > 0, got {self.fixed_wind}")


def auto_disc(readings: ReadingSet, radius: float = DEFAULT_DISC_RADIUS) -> Disc:
    """Disc centred on the mean position of the positive readings.

    With no detections at all the disc instead circumscribes the bounding box
    of every sensor position grown by ``radius`` on each side.
    """
    if len(readings) == 0:
        raise ValidationError("cannot build a prior disc from an empty reading set")
    xy = readings.positions
    pos = xy[readings.values == 1]
    if len(pos):
        cx, cy = pos.mean(axis=0)
        return Disc(Point(float(cx), float(cy)), radius)
    lo, hi = xy.min(axis=0) - radius, xy.max(axis=0) + radius
    cx, cy = (lo + hi) / 2
    return Disc(Point(float(cx), float(cy)), float(np.hypot(*(hi - lo)) / 2))


def sample_gamma(shape: float, scale: float, rng: RandomStream, size: int) -> np.ndarray:
    """Marsaglia-Tsang squeeze/rejection sampler (shape < 1 via the u^(1/k) boost)."""
    boost = shape < 1.0
    k = shape + 1.0 if boost else shape
    d = k - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = max(16, int(1.1 * (size - filled)) + 8)
        x = rng.standard_normal(m)
        u = rng.random(m)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            logv = np.log(np.where(ok, v, 1.0))
            accept = ok & ((u < 1.0 - 0.0331 * x**4) | (np.log(u) < 0.5 * x * x + d * (1.0 - v + logv)))
        got = d * v[accept]
        take = min(len(got), size - filled)
        out[filled : filled + take] = got[:take]
        filled += take
    if boost:
        out *= rng.random(size) ** (1.0 / shape)
    return out * scale


def sample_truncated_normal(mean: float, sd: float, rng: RandomStream, size: int) -> np.ndarray:
    """Normal(mean, sd) conditioned on being > 0, by plain rejection."""
    out = np.empty(size)
    filled = 0
    accept_rate = max(0.5 * math.erfc(-mean / (sd * math.sqrt(2.0))), 1e-3)
    while filled < size:
        m = int((size - filled) / accept_rate * 1.1) + 8
        z = mean + sd * rng.standard_normal(m)
        z = z[z > 0]
        take = min(len(z), size - filled)
        out[filled : filled + take] = z[:take]
        filled += take
    return out


def sample_prior(spec: PriorSpec, rng: RandomStream, size: int | None = None):
    """Independent draws of (x0, y0, Q0, V).

    Returns a :class:`ParameterVector` for ``size=None``, else an ``(size, 4)``
    array. Draw order (positions, then rates, then winds) is fixed so results
    depend only on the stream state.
    """
    n = 1 if size is None else int(size)
    xy = sample_region_uniform(spec.region, rng, n)
    q0 = sample_gamma(spec.gamma_shape, spec.gamma_scale, rng, n)
    if spec.fixed_wind is not None:
        v = np.full(n, float(spec.fixed_wind))
    else:
        v = sample_truncated_normal(spec.wind_mean, spec.wind_sd, rng, n)
    out = np.column_stack((xy, q0, v))
    if size is None:
        return ParameterVector(*map(float, out[0]))
    return out


def gamma_logpdf(q, shape: float, scale: float):
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = (shape - 1.0) * np.log(q) - q / scale - math.lgamma(shape) - shape * math.log(scale)
    return np.where(q > 0, lp, -np.inf)


def truncated_normal_logpdf(v, mean: float, sd: float):
    v = np.asarray(v, dtype=float)
    log_mass = math.log(0.5 * math.erfc(-mean / (sd * math.sqrt(2.0))))
    lp = -0.5 * ((v - mean) / sd) ** 2 - math.log(sd * math.sqrt(2.0 * math.pi)) - log_mass
    return np.where(v > 0, lp, -np.inf)


def prior_logpdf_array(params: np.ndarray, spec: PriorSpec) -> np.ndarray:
    """Row-wise log prior density of an ``(N, 4)`` site-frame parameter array."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    inside = spec.region.contains(params[:, :2])
    lp = np.where(inside, -math.log(spec.region.support_area()), -np.inf)
    lp = lp + gamma_logpdf(params[:, 2], spec.gamma_shape, spec.gamma_scale)
    if spec.fixed_wind is not None:
        lp = lp + np.where(params[:, 3] == spec.fixed_wind, 0.0, -np.inf)
    else:
        lp = lp + truncated_normal_logpdf(params[:, 3], spec.wind_mean, spec.wind_sd)
    return lp


def prior_logpdf(theta: ParameterVector, spec: PriorSpec) -> float:
    """``ln pi(theta)``; ``-inf`` outside the support."""
    return float(prior_logpdf_array(theta.as_array(), spec)[0])
