"""Importance-sampling posterior over the source parameters.

The prior is used as the importance distribution, so the unnormalised weight
of each draw is just its likelihood. Weights are normalised in the log domain,
then an optional systematic resampling step produces an equally weighted
ensemble for plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binloc.dispersion import Environment, ParameterVector
from binloc.errors import DegeneratePosteriorError, ValidationError
from binloc.geometry import in_convex_hull, to_wind_frame_xy
from binloc.measurement import ReadingSet, log_likelihood_matrix
from binloc.prior import PriorSpec, sample_prior
from binloc.rng import RandomStream

PARAM_NAMES = ("x0", "y0", "q0", "v")
CREDIBLE_MASS = 0.95
_CHUNK_ROWS = 20_000


@dataclass(frozen=True)
class WeightedEnsemble:
    """N site-frame parameter samples ``(x0, y0, q0, v)`` with normalised weights."""

    samples: np.ndarray
    weights: np.ndarray
    log_evidence: float = math.nan

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "weights", w)
        if s.shape[1] != 4 or len(s) != len(w) or len(w) < 1:
            raise ValidationError(f"ensemble needs matching (N, 4) samples and N weights, got {s.shape}, {w.shape}")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValidationError("ensemble weights must be nonnegative and sum to 1")

    def __len__(self):
        return len(self.weights)

    def parameter(self, n: int) -> ParameterVector:
        return ParameterVector(*map(float, self.samples[n]))


@dataclass(frozen=True)
class PosteriorSummary:
    mean: ParameterVector
    sd: dict[str, float]
    map_sample: ParameterVector
    ess: float
    log_evidence: float
    credible_indices: np.ndarray
    credible_mass: float
    position_credible_points: np.ndarray

    def to_dict(self) -> dict:
        return {
            "mean": dict(zip(PARAM_NAMES, self.mean.as_array().tolist())),
            "sd": dict(self.sd),
            "map_sample": dict(zip(PARAM_NAMES, self.map_sample.as_array().tolist())),
            "ess": self.ess,
            "log_evidence": self.log_evidence,
            "credible_mass": self.credible_mass,
            "credible_count": int(len(self.credible_indices)),
        }


def normalize_log_weights(log_w: np.ndarray) -> tuple[np.ndarray, float]:
    """Self-normalise log weights; returns ``(weights, log mean unnormalised weight)``."""
    log_w = np.asarray(log_w, dtype=float)
    top = np.max(log_w)
    if not np.isfinite(top):
        raise DegeneratePosteriorError(
            f"all {len(log_w)} importance weights are zero: no prior sample can explain the readings; "
            f"increase the sample size or widen the prior"
        )
    shifted = np.exp(log_w - top)
    total = shifted.sum()
    return shifted / total, float(top + math.log(total) - math.log(len(log_w)))


def _wind_frame_params(params: np.ndarray, env: Environment, origin) -> np.ndarray:
    out = params.copy()
    out[:, :2] = to_wind_frame_xy(params[:, :2], origin, env.wind_direction)
    return out


def log_likelihoods(
    readings: ReadingSet,
    params: np.ndarray,
    env: Environment,
    origin=(0.0, 0.0),
) -> np.ndarray:
    """``ln p(b | theta_n)`` for each row of a site-frame ``(N, 4)`` array."""
    xy = to_wind_frame_xy(readings.positions, origin, env.wind_direction)
    b = readings.values
    wp = _wind_frame_params(np.atleast_2d(params), env, origin)
    out = np.empty(len(wp))
    for start in range(0, len(wp), _CHUNK_ROWS):
        out[start : start + _CHUNK_ROWS] = log_likelihood_matrix(xy, b, wp[start : start + _CHUNK_ROWS], env)
    return np.where(np.isnan(out), -np.inf, out)


def importance_sample(
    readings: ReadingSet,
    spec: PriorSpec,
    env: Environment,
    n: int,
    rng: RandomStream,
    origin=(0.0, 0.0),
) -> WeightedEnsemble:
    """Weighted posterior sample using the prior as the importance distribution."""
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    if len(readings) == 0:
        raise ValidationError("at least one reading is required for inference")
    params = sample_prior(spec, rng, n)
    # prior proposal: log(pi / rho) is identically zero
    log_w = log_likelihoods(readings, params, env, origin)
    weights, log_z = normalize_log_weights(log_w)
    return WeightedEnsemble(params, weights, log_z)


def effective_sample_size(e: WeightedEnsemble) -> float:
    return float(1.0 / np.sum(e.weights**2))


def systematic_indices(weights: np.ndarray, rng: RandomStream) -> np.ndarray:
    n = len(weights)
    positions = (rng.random() + np.arange(n)) / n
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, positions, side="right")


def resample(e: WeightedEnsemble, rng: RandomStream) -> WeightedEnsemble:
    """Systematic resampling to N equally weighted samples."""
    idx = systematic_indices(e.weights, rng)
    n = len(e)
    return WeightedEnsemble(e.samples[idx], np.full(n, 1.0 / n), e.log_evidence)


def weighted_mean_and_sd(e: WeightedEnsemble) -> tuple[np.ndarray, np.ndarray]:
    mean = e.weights @ e.samples
    var = e.weights @ (e.samples - mean) ** 2
    return mean, np.sqrt(np.maximum(var, 0.0))


def mean_standard_error(e: WeightedEnsemble) -> np.ndarray:
    """Delta-method standard error of the self-normalised posterior mean, per parameter."""
    mean = e.weights @ e.samples
    return np.sqrt(e.weights**2 @ (e.samples - mean) ** 2)


def credible_indices(weights: np.ndarray, mass: float = CREDIBLE_MASS) -> np.ndarray:
    """Smallest highest-weight prefix reaching ``mass`` (ties keep index order)."""
    order = np.argsort(-weights, kind="stable")
    cum = np.cumsum(weights[order])
    count = min(int(np.searchsorted(cum, mass, side="left")) + 1, len(weights))
    return order[:count]


def summarize(e: WeightedEnsemble, mass: float = CREDIBLE_MASS) -> PosteriorSummary:
    mean, sd = weighted_mean_and_sd(e)
    idx = credible_indices(e.weights, mass)
    return PosteriorSummary(
        mean=ParameterVector(*map(float, mean)),
        sd=dict(zip(PARAM_NAMES, map(float, sd))),
        map_sample=e.parameter(int(np.argmax(e.weights))),
        ess=effective_sample_size(e),
        log_evidence=e.log_evidence,
        credible_indices=idx,
        credible_mass=float(e.weights[idx].sum()),
        position_credible_points=e.samples[idx, :2],
    )


def credible_region_contains(summary: PosteriorSummary, point) -> bool:
    """Whether ``point`` lies in the convex hull of the credible position samples."""
    return in_convex_hull(point, summary.position_credible_points)
