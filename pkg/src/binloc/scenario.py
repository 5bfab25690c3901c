"""Scenario JSON and the CSV formats for readings and ensembles.

Scenario layout (units are carried in the key names)::

    {
      "seed": 1,
      "frame_origin_m": [0, 0],
      "environment": {
        "wind_direction_deg": 195, "wind_mean_mps": 0.28,
        "wind_sd_mps": 0.2, "diffusivity_m2_per_s": 1, "particle_lifetime_s": 1000,
        "sensor_radius_m": 0.2, "sensing_interval_s": 1
      },
      "prior": {
        "polygons": [{"name": "depot", "vertices_m": [[0, 0], [40, 0], [40, 30], [0, 30]]}],
        "disc": "auto",             # or null, or {"center_m": [x, y], "radius_m": r}
        "disc_radius_m": 150,
        "gamma_shape": 3, "gamma_scale": 7,
        "fixed_wind_mps": null
      },
      "ground_truth": {"x0_m": 10, "y0_m": 12, "q0": 20, "v_mps": 0.28,
                       "sensor_positions_m": [[x, y], ...]},
      "inference": {"samples": 5000}
    }

Only ``environment.wind_direction_deg``, ``environment.wind_mean_mps`` and
``prior.polygons`` are required; everything else has a default.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from binloc.dispersion import Environment, ParameterVector
from binloc.errors import ModelValidityError, ValidationError
from binloc.geometry import Disc, Point, Polygon, PriorRegion
from binloc.inference import WeightedEnsemble
from binloc.measurement import ReadingSet
from binloc.prior import DEFAULT_DISC_RADIUS, PriorSpec, auto_disc
from binloc.simulate import GroundTruth

DEFAULT_SAMPLES = 5000
DEFAULT_SEED = 0

ENV_DEFAULTS = {
    "diffusivity_m2_per_s": 1.0,
    "particle_lifetime_s": 1000.0,
    "sensor_radius_m": 0.2,
    "sensing_interval_s": 1.0,
    "wind_sd_mps": 0.2,
}

READINGS_HEADER = ("x_m", "y_m", "b")
ENSEMBLE_HEADER = ("x0_m", "y0_m", "q0", "v_mps", "weight")


@dataclass(frozen=True)
class Scenario:
    environment: Environment
    polygons: tuple[Polygon, ...]
    disc: Disc | None = None
    auto_disc: bool = True
    disc_radius: float = DEFAULT_DISC_RADIUS
    gamma_shape: float = 3.0
    gamma_scale: float = 7.0
    fixed_wind: float | None = None
    ground_truth: GroundTruth | None = None
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    origin: tuple[float, float] = (0.0, 0.0)

    def with_overrides(self, seed: int | None = None, samples: int | None = None) -> Scenario:
        out = self
        if seed is not None:
            gt = None if self.ground_truth is None else replace(self.ground_truth, seed=seed)
            out = replace(out, seed=seed, ground_truth=gt)
        if samples is not None:
            if samples < 1:
                raise ValidationError(f"--samples must be >= 1, got {samples}")
            out = replace(out, samples=samples)
        return out

    def prior_spec(self, readings: ReadingSet | None = None) -> PriorSpec:
        """PriorSpec for this scenario; an automatic disc is built from ``readings``."""
        disc = self.disc
        if self.auto_disc:
            if readings is None or len(readings) == 0:
                raise ValidationError("prior.disc is 'auto' but no readings were supplied")
            disc = auto_disc(readings, self.disc_radius)
        return PriorSpec(
            region=PriorRegion(self.polygons, disc),
            gamma_shape=self.gamma_shape,
            gamma_scale=self.gamma_scale,
            wind_mean=self.environment.wind_mean,
            wind_sd=self.environment.wind_sd,
            fixed_wind=self.fixed_wind,
        )


class _Checker:
    """Collects every problem in a scenario document, each tagged with its field path."""

    def __init__(self):
        self.errors: list[str] = []

    def fail(self, path: str, msg: str):
        self.errors.append(f"{path}: {msg}")

    def number(self, obj: dict, key: str, path: str, default=None, positive=False, required=False):
        if key not in obj or obj[key] is None:
            if required:
                self.fail(f"{path}.{key}", "required")
            return default
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.fail(f"{path}.{key}", f"expected a finite number, got {value!r}")
            return default
        if positive and value <= 0:
            self.fail(f"{path}.{key}", f"must be > 0, got {value}")
            return default
        return float(value)

    def point(self, value, path: str):
        try:
            x, y = value
            return Point(float(x), float(y))
        except (TypeError, ValueError) as exc:
            self.fail(path, f"expected [x, y], got {value!r} ({exc})")
            return None


def _section(doc: dict, key: str, chk: _Checker, required=False) -> dict:
    value = doc.get(key)
    if value is None:
        if required:
            chk.fail(key, "required section missing")
        return {}
    if not isinstance(value, dict):
        chk.fail(key, "expected an object")
        return {}
    return value


def _parse_polygons(raw, chk: _Checker) -> list[Polygon]:
    if not isinstance(raw, list) or not raw:
        chk.fail("prior.polygons", "expected a non-empty list of polygons")
        return []
    polygons = []
    for i, item in enumerate(raw):
        path = f"prior.polygons[{i}]"
        name = ""
        verts = item
        if isinstance(item, dict):
            name = str(item.get("name", ""))
            verts = item.get("vertices_m")
            if name:
                path = f"{path} ({name!r})"
        if not isinstance(verts, list):
            chk.fail(path, "expected a list of [x, y] vertices")
            continue
        pts = [chk.point(v, f"{path}.vertices_m[{j}]") for j, v in enumerate(verts)]
        if any(p is None for p in pts):
            continue
        try:
            polygons.append(Polygon(tuple(pts), name=name))
        except ValidationError as exc:
            chk.fail(path, str(exc))
    return polygons


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document, reporting every violation at once."""
    if not isinstance(doc, dict):
        raise ValidationError("scenario must be a JSON object")
    chk = _Checker()

    env_doc = _section(doc, "environment", chk, required=True)
    env_vals = {
        "diffusivity": chk.number(env_doc, "diffusivity_m2_per_s", "environment", ENV_DEFAULTS["diffusivity_m2_per_s"], True),
        "particle_lifetime": chk.number(env_doc, "particle_lifetime_s", "environment", ENV_DEFAULTS["particle_lifetime_s"], True),
        "sensor_radius": chk.number(env_doc, "sensor_radius_m", "environment", ENV_DEFAULTS["sensor_radius_m"], True),
        "sensing_interval": chk.number(env_doc, "sensing_interval_s", "environment", ENV_DEFAULTS["sensing_interval_s"], True),
        "wind_direction": chk.number(env_doc, "wind_direction_deg", "environment", required=True),
        "wind_mean": chk.number(env_doc, "wind_mean_mps", "environment", positive=True, required=True),
        "wind_sd": chk.number(env_doc, "wind_sd_mps", "environment", ENV_DEFAULTS["wind_sd_mps"], True),
    }
    environment = None
    if all(v is not None for v in env_vals.values()):
        try:
            environment = Environment(**env_vals)
        except ModelValidityError as exc:
            chk.fail("environment.wind_mean_mps", f"model validity rule lambda > a violated: {exc}")
        except ValidationError as exc:
            chk.fail("environment", str(exc))

    origin = (0.0, 0.0)
    if doc.get("frame_origin_m") is not None:
        p = chk.point(doc["frame_origin_m"], "frame_origin_m")
        if p is not None:
            origin = (p.x, p.y)

    prior_doc = _section(doc, "prior", chk, required=True)
    polygons = _parse_polygons(prior_doc.get("polygons"), chk) if prior_doc else []
    disc_radius = chk.number(prior_doc, "disc_radius_m", "prior", DEFAULT_DISC_RADIUS, True)
    disc_raw = prior_doc.get("disc", "auto")
    disc, is_auto = None, False
    if disc_raw == "auto":
        is_auto = True
    elif isinstance(disc_raw, dict):
        center = chk.point(disc_raw.get("center_m"), "prior.disc.center_m")
        radius = chk.number(disc_raw, "radius_m", "prior.disc", positive=True, required=True)
        if center is not None and radius is not None:
            disc = Disc(center, radius)
    elif disc_raw is not None:
        chk.fail("prior.disc", f"expected 'auto', null or an object, got {disc_raw!r}")
    gamma_shape = chk.number(prior_doc, "gamma_shape", "prior", 3.0, True)
    gamma_scale = chk.number(prior_doc, "gamma_scale", "prior", 7.0, True)
    fixed_wind = chk.number(prior_doc, "fixed_wind_mps", "prior", None, True)
    if polygons and disc is not None:
        try:
            PriorRegion(tuple(polygons), disc)
        except ValidationError as exc:
            chk.fail("prior.disc", str(exc))

    inf_doc = _section(doc, "inference", chk)
    samples = inf_doc.get("samples", DEFAULT_SAMPLES)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        chk.fail("inference.samples", f"expected an integer >= 1, got {samples!r}")
        samples = DEFAULT_SAMPLES
    seed = doc.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        chk.fail("seed", f"expected a nonnegative integer, got {seed!r}")
        seed = DEFAULT_SEED

    ground_truth = None
    gt_doc = _section(doc, "ground_truth", chk)
    if gt_doc:
        vals = [chk.number(gt_doc, k, "ground_truth", required=True) for k in ("x0_m", "y0_m", "q0", "v_mps")]
        raw_pos = gt_doc.get("sensor_positions_m")
        positions = []
        if not isinstance(raw_pos, list):
            chk.fail("ground_truth.sensor_positions_m", "expected a list of [x, y]")
        else:
            positions = [chk.point(p, f"ground_truth.sensor_positions_m[{i}]") for i, p in enumerate(raw_pos)]
        if all(v is not None for v in vals) and all(p is not None for p in positions):
            try:
                theta = ParameterVector(*vals)
                ground_truth = GroundTruth(theta, tuple(positions), seed)
            except ValidationError as exc:
                chk.fail("ground_truth", str(exc))

    if chk.errors:
        raise ValidationError("invalid scenario:\n  " + "\n  ".join(chk.errors))
    return Scenario(
        environment=environment,
        polygons=tuple(polygons),
        disc=disc,
        auto_disc=is_auto,
        disc_radius=disc_radius,
        gamma_shape=gamma_shape,
        gamma_scale=gamma_scale,
        fixed_wind=fixed_wind,
        ground_truth=ground_truth,
        samples=samples,
        seed=seed,
        origin=origin,
    )


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario {path} is not valid JSON: {exc}") from exc
    return parse_scenario(doc)


def format_readings(readings: ReadingSet, counts=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(READINGS_HEADER + (("z",) if counts is not None else ()))
    for i, r in enumerate(readings):
        row = [repr(r.position.x), repr(r.position.y), r.b]
        if counts is not None:
            row.append(int(counts[i]))
        w.writerow(row)
    return buf.getvalue()


def write_readings(path, readings: ReadingSet, counts=None):
    Path(path).write_text(format_readings(readings, counts))


def read_readings(path) -> ReadingSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read readings {path}: {exc}") from exc
    rows = csv.DictReader(io.StringIO(text))
    if rows.fieldnames is None or not set(READINGS_HEADER) <= set(rows.fieldnames):
        raise ValidationError(f"{path}: readings header must contain {','.join(READINGS_HEADER)}")
    xy, b = [], []
    for line, row in enumerate(rows, start=2):
        try:
            x, y = float(row["x_m"]), float(row["y_m"])
            bit = int(row["b"])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{path}:{line}: {exc}") from exc
        if bit not in (0, 1) or not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError(f"{path}:{line}: expected finite position and b in {{0, 1}}")
        xy.append((x, y))
        b.append(bit)
    return ReadingSet.from_arrays(xy, b)


def format_ensemble(e: WeightedEnsemble) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ENSEMBLE_HEADER)
    for row, weight in zip(e.samples, e.weights):
        w.writerow([repr(float(c)) for c in row] + [repr(float(weight))])
    return buf.getvalue()


def write_ensemble(path, e: WeightedEnsemble):
    Path(path).write_text(format_ensemble(e))


def read_ensemble(path) -> WeightedEnsemble:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read ensemble {path}: {exc}") from exc
    if data.shape[1] != len(ENSEMBLE_HEADER) or len(data) == 0:
        raise ValidationError(f"{path}: expected columns {','.join(ENSEMBLE_HEADER)}")
    w = data[:, 4]
    return WeightedEnsemble(data[:, :4], w / w.sum())
