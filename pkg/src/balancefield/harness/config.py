"""
Flat ``key = value`` experiment configuration.

One key per line, ``#`` starts a comment, blank lines are ignored.  Keys:

=============  ==============================================================
experiment     gl-shrink | balanced-stasis | profile-recovery | reinit-bench |
               oracle-report | compare
dims           extents, e.g. ``64,64,64`` (2 or 3 values)
spacing        grid step h (default 1)
boundary       mirror | periodic (default mirror)
shape          sphere | torus | plane (default sphere)
radius         sphere radius
major, minor   torus radii
center         shape centre ``x,y,z`` (default: grid centre)
normal         plane normal (default ``1,0,0``), plane passes through ``center``
width          transition width W
duration       simulated time; alternatively ``steps``
steps          explicit step count (overrides duration)
dt             step override, must not exceed the stable step
record_every   metrics cadence in simulated time (default 1.0)
reinit_n       reinitialization iterations (default 10)
input          profile-recovery input: step | relaxed (default step)
perturbation   amplitude of uniform noise added to the initial field (default 0)
seed           RNG seed for the perturbation (default 0)
output         output directory (the CLI ``--out`` wins)
=============  ==============================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from ..grid import GridSpec
from ..model import ModelWeights, gl_weights_for_width, stable_dt, weights_from_width
from ..profile import check_fits
from ..surfaces import Plane, Sphere, Torus

EXPERIMENTS = ("gl-shrink", "balanced-stasis", "profile-recovery", "reinit-bench", "oracle-report", "compare")
KNOWN_KEYS = {
    "experiment", "dims", "spacing", "boundary", "shape", "radius", "major", "minor", "center",
    "normal", "width", "duration", "steps", "dt", "record_every", "reinit_n", "input",
    "perturbation", "seed", "output",
}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.replace(" ", "").split(",") if x)


@dataclass
class ExperimentConfig:
    experiment: str
    grid: GridSpec
    shape: object
    width: float = 6.0
    duration: float | None = 24.0
    steps: int | None = None
    dt: float | None = None
    record_every: float = 1.0
    reinit_n: int = 10
    input: str = "step"
    perturbation: float = 0.0
    seed: int = 0
    output: Path | None = None
    extra: dict = field(default_factory=dict)

    def weights(self, kind: str | None = None) -> ModelWeights:
        kind = kind or ("gl" if self.experiment == "gl-shrink" else "balanced")
        return gl_weights_for_width(self.width) if kind == "gl" else weights_from_width(self.width)

    def step_size(self, weights: ModelWeights) -> float:
        limit = stable_dt(self.grid, weights)
        if self.dt is None:
            return limit
        if self.dt > limit * (1 + 1e-12):
            raise ConfigError(f"dt override {self.dt:g} exceeds the stable step {limit:g}")
        return self.dt

    def n_steps(self, dt: float) -> int:
        if self.steps is not None:
            return self.steps
        return max(1, int(round(self.duration / dt)))

    def record_stride(self, dt: float) -> int:
        return max(1, int(round(self.record_every / dt)))


def build_config(values: dict[str, str]) -> ExperimentConfig:
    try:
        return _build(values)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _build(v: dict[str, str]) -> ExperimentConfig:
    exp = v.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    dims = tuple(int(x) for x in _floats(v.get("dims", "64,64,64")))
    grid = GridSpec(dims, float(v.get("spacing", 1.0)), v.get("boundary", "mirror"))
    center = _floats(v["center"]) if "center" in v else grid.center
    if len(center) != grid.ndim:
        raise ConfigError(f"center has {len(center)} coordinates for a {grid.ndim}D grid")
    kind = v.get("shape", "sphere")
    if kind == "sphere":
        shape = Sphere(float(v.get("radius", 16.0)), center)
    elif kind == "torus":
        shape = Torus(float(v.get("major", 18.0)), float(v.get("minor", 6.0)), center)
    elif kind == "plane":
        normal = _floats(v.get("normal", ",".join(["1"] + ["0"] * (grid.ndim - 1))))
        if len(normal) != grid.ndim:
            raise ConfigError("plane normal must match the grid dimension")
        n = [c / math.sqrt(sum(x * x for x in normal)) for c in normal]
        shape = Plane(tuple(normal), sum(a * b for a, b in zip(n, center)))
    else:
        raise ConfigError(f"unknown shape {kind!r}")
    width = float(v.get("width", 6.0))
    if width < 4 * grid.spacing - 1e-12:
        raise ConfigError(f"width {width:g} must be at least 4h = {4 * grid.spacing:g}")
    if exp != "oracle-report":
        try:
            check_fits(grid, shape, width)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    cfg = ExperimentConfig(
        experiment=exp,
        grid=grid,
        shape=shape,
        width=width,
        duration=float(v["duration"]) if "duration" in v else 24.0,
        steps=int(v["steps"]) if "steps" in v else None,
        dt=float(v["dt"]) if "dt" in v else None,
        record_every=float(v.get("record_every", 1.0)),
        reinit_n=int(v.get("reinit_n", 10)),
        input=v.get("input", "step"),
        perturbation=float(v.get("perturbation", 0.0)),
        seed=int(v.get("seed", 0)),
        output=Path(v["output"]) if "output" in v else None,
    )
    if cfg.steps is not None and cfg.steps < 1:
        raise ConfigError("steps must be >= 1")
    if cfg.duration is not None and cfg.duration <= 0:
        raise ConfigError("duration must be positive")
    if cfg.reinit_n < 1:
        raise ConfigError("reinit_n must be >= 1")
    if cfg.input not in ("step", "relaxed"):
        raise ConfigError("input must be 'step' or 'relaxed'")
    if cfg.dt is not None:
        kinds = ("gl", "balanced") if exp == "compare" else (None,)
        for k in kinds:
            cfg.step_size(cfg.weights(k))
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build_config(parse_config_text(text))


def format_config(values: dict[str, str]) -> str:
    return "".join(f"{k} = {values[k]}\n" for k in values)
