"""Particle-encounter dispersion model.

A small spherical sensor of radius ``a`` at distance ``d`` from a continuous
source meets released particles at the rate

    R = Q0 / ln(lambda/a) * exp((x0 - x) V / (2 D)) * K0(d / lambda)

    lambda = sqrt(D tau / (1 + V^2 tau / (4 D)))

with all coordinates in the wind-aligned frame. Note the sign of the advection
term: the encounter field extends towards -x of that frame, so
``wind_direction_deg`` is the bearing the wind blows *from*.

Q0 is only meaningful relative to the (unknown) detection threshold of the
binary sensor: the data constrain the product ``Q0 * t0`` and nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binloc.bessel import log_bessel_k0
from binloc.errors import ModelValidityError, ValidationError


@dataclass(frozen=True)
class Environment:
    """Known physical and sensor constants plus the wind prior parameters."""

    diffusivity: float = 1.0  # D, m^2/s
    particle_lifetime: float = 1000.0  # tau, s
    sensor_radius: float = 0.2  # a, m
    sensing_interval: float = 1.0  # t0, s
    wind_direction: float = 0.0  # alpha, degrees anticlockwise from site +x
    wind_mean: float = 1.0  # V bar, m/s
    wind_sd: float = 0.2  # sigma_V, m/s

    def __post_init__(self):
        positive = {
            "diffusivity": self.diffusivity,
            "particle_lifetime": self.particle_lifetime,
            "sensor_radius": self.sensor_radius,
            "sensing_interval": self.sensing_interval,
            "wind_mean": self.wind_mean,
            "wind_sd": self.wind_sd,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be finite and > 0, got {value}")
        if not math.isfinite(self.wind_direction):
            raise ValidationError("wind_direction must be finite")
        plume_lambda(self, self.wind_mean)

    @property
    def max_wind_speed(self) -> float:
        """Largest V for which lambda > a."""
        D, tau, a = self.diffusivity, self.particle_lifetime, self.sensor_radius
        return math.sqrt(max(0.0, (D * tau / a**2 - 1.0) * 4.0 * D / tau))


@dataclass(frozen=True)
class ParameterVector:
    """Source position (m), threshold-normalised release rate, wind speed (m/s)."""

    x0: float
    y0: float
    q0: float
    v: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x0, self.y0, self.q0, self.v)):
            raise ValidationError("parameter vector components must be finite")
        if self.q0 <= 0:
            raise ValidationError(f"q0 must be > 0, got {self.q0}")
        if self.v <= 0:
            raise ValidationError(f"v must be > 0, got {self.v}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.y0, self.q0, self.v])


@dataclass(frozen=True)
class EncounterRateContext:
    lam: float
    log_norm: float


def _lambda(D, tau, v):
    return np.sqrt(D * tau / (1.0 + np.square(v) * tau / (4.0 * D)))


def plume_lambda(env: Environment, v: float) -> EncounterRateContext:
    """Plume length scale for wind speed ``v`` and the ``ln(lambda/a)`` normaliser."""
    if not v > 0:
        raise ValidationError(f"wind speed must be > 0, got {v}")
    lam = float(_lambda(env.diffusivity, env.particle_lifetime, v))
    if lam <= env.sensor_radius:
        raise ModelValidityError(
            f"lambda = {lam:.4g} m does not exceed sensor radius a = {env.sensor_radius} m "
            f"at V = {v} m/s (the model needs V < {env.max_wind_speed:.4g} m/s)"
        )
    return EncounterRateContext(lam, math.log(lam / env.sensor_radius))


def encounter_rate_array(xs, ys, x0, y0, q0, v, env: Environment) -> np.ndarray:
    """Broadcasting form of :func:`encounter_rate`.

    Sensor coordinates ``xs, ys`` and source parameters ``x0, y0, q0, v`` are
    broadcast against each other, e.g. sensors of shape ``(M,)`` with
    parameters of shape ``(N, 1)`` give an ``(N, M)`` rate matrix. Everything
    is in the wind-aligned frame.
    """
    D, a = env.diffusivity, env.sensor_radius
    v = np.asarray(v, dtype=float)
    lam = _lambda(D, env.particle_lifetime, v)
    if np.any(lam <= a):
        bad = float(np.max(v))
        raise ModelValidityError(
            f"lambda <= a for wind speed {bad:.4g} m/s (the model needs V < {env.max_wind_speed:.4g} m/s)"
        )
    dx = np.asarray(x0, dtype=float) - xs
    d = np.maximum(np.hypot(dx, np.asarray(y0, dtype=float) - ys), a)
    log_shape = dx * v / (2.0 * D) + log_bessel_k0(d / lam)
    return np.asarray(q0, dtype=float) / np.log(lam / a) * np.exp(log_shape)


def encounter_rate(sensor, theta: ParameterVector, env: Environment) -> float:
    """Expected particle encounters per second at ``sensor`` (wind frame).

    Distances below the sensor radius are clamped to ``a``, so a sensor sitting
    on the source gets a finite rate.
    """
    sx, sy = sensor
    return float(encounter_rate_array(sx, sy, theta.x0, theta.y0, theta.q0, theta.v, env))


def mean_count(rate, env: Environment):
    """Expected encounters in one sensing interval."""
    return env.sensing_interval * rate
