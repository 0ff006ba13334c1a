"""Scenario configuration: a flat, human-writable file with dotted keys.

Example::

    space.kind = euclidean
    space.dim = 1
    family.kind = identity
    schedule.preset = harmonic
    run.u = 0
    run.x0 = 1
    run.steps = 1000

Euclidean points are comma-separated coordinates, disk points a pair
"a,b", tripod points "leg:length".
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import rates
from .geometry import (
    Euclidean,
    GeometryError,
    PoincareDisk,
    Point,
    SpaceModel,
    Tripod,
    make_model,
)
from .mappings import (
    BallSet,
    ConstantFamily,
    HalfSquaredNorm,
    IdentityFamily,
    IndicatorOfBall,
    MappingFamily,
    MetricProjectionFamily,
    ProximalFamily,
    ResolventFamily,
    RotationFamily,
)
from .rates import Counterfunction, monotonize, parse_counterfunction
from .schedules import ScheduleBundle, ScheduleError, preset


class ConfigError(ValueError):
    """Rejected configuration, with a line/field diagnostic."""


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text, source=path)


@dataclass
class Scenario:
    space: SpaceModel
    family: MappingFamily
    bundle: ScheduleBundle
    u: Point
    x0: Point
    p: Point
    M: float
    K: int
    steps: int
    seed: int
    tol: float
    bit_cap: int
    scenario_hash: str
    chi_T_fn: Callable[[int], int] = field(default=lambda k: 0)

    def bounds(self) -> rates.ScenarioBounds:
        return rates.ScenarioBounds(K=self.K, M=self.M)


def _parse_point(space: SpaceModel, text: str, key: str) -> Point:
    try:
        if isinstance(space, Tripod):
            leg_s, _, len_s = text.partition(":")
            return Point.tripod(int(leg_s), float(len_s))
        coords = [float(t) for t in text.split(",")]
        if isinstance(space, Euclidean):
            if len(coords) != space.dim:
                raise ConfigError(
                    f"field {key!r}: expected {space.dim} coordinates"
                )
            return Point.euclidean(*coords)
        if len(coords) != 2:
            raise ConfigError(f"field {key!r}: disk points need two coordinates")
        return Point.disk(*coords)
    except (ValueError, GeometryError) as exc:
        raise ConfigError(f"field {key!r}: {exc}") from exc


def _get(cfg, key, default=None, required=False):
    if key in cfg:
        return cfg[key]
    if required:
        raise ConfigError(f"missing required field {key!r}")
    return default


def _build_family(cfg: dict, space: SpaceModel, bundle: ScheduleBundle):
    kind = _get(cfg, "family.kind", required=True).lower()
    if kind == "identity":
        fp = cfg.get("family.fixed_point")
        point = _parse_point(space, fp, "family.fixed_point") if fp else None
        return IdentityFamily(space, point)
    if kind == "rotation":
        angle = float(_get(cfg, "family.angle", default="1.5707963267948966"))
        return RotationFamily(space, angle)
    if kind == "constant":
        # one fixed nonexpansive map repeated at every index; angle 0 means
        # the identity map (usable in any model and dimension)
        angle = float(_get(cfg, "family.angle", default="0.0"))
        if angle == 0.0:
            return ConstantFamily(space, lambda pt: pt, space.base_point())
        rot = RotationFamily(space, angle)
        return ConstantFamily(
            space, lambda pt: rot.apply(0, pt), rot.fixed_point
        )
    if kind == "projection":
        center = _parse_point(
            space, _get(cfg, "family.center", required=True), "family.center"
        )
        radius = float(_get(cfg, "family.radius", required=True))
        return MetricProjectionFamily(space, BallSet(center, radius))
    if kind == "proximal":
        fn = _get(cfg, "family.function", default="half-squared-norm").lower()
        center = _parse_point(
            space, _get(cfg, "family.center", required=True), "family.center"
        )
        if fn == "half-squared-norm":
            descriptor = HalfSquaredNorm(center)
        elif fn == "ball-indicator":
            descriptor = IndicatorOfBall(
                center, float(_get(cfg, "family.radius", required=True))
            )
        else:
            raise ConfigError(f"unknown convex function {fn!r}")
        return ProximalFamily(space, descriptor, bundle.gamma)
    if kind == "resolvent":
        base_kind = _get(cfg, "family.base.kind", default="rotation").lower()
        if base_kind == "rotation":
            base = RotationFamily(
                space, float(_get(cfg, "family.base.angle", default="1.0"))
            )
        elif base_kind == "projection":
            center = _parse_point(
                space,
                _get(cfg, "family.base.center", required=True),
                "family.base.center",
            )
            base = MetricProjectionFamily(
                space,
                BallSet(center, float(_get(cfg, "family.base.radius", required=True))),
            )
        else:
            raise ConfigError(f"unknown resolvent base {base_kind!r}")
        return ResolventFamily(
            space,
            base_map=lambda pt: base.apply(0, pt),
            base_fixed_point=base.fixed_point,
            gammas=bundle.gamma,
            inner_tol=float(_get(cfg, "family.inner_tol", default="1e-12")),
            max_iterations=int(_get(cfg, "family.max_iterations", default="10000")),
        )
    raise ConfigError(f"unknown family kind {kind!r}")


def _build_bundle(cfg: dict) -> ScheduleBundle:
    name = _get(cfg, "schedule.preset", default="harmonic")
    try:
        bundle = preset(name)
    except ScheduleError as exc:
        raise ConfigError(str(exc)) from exc
    # inline modulus overrides, given in the counterfunction mini-grammar
    overrides = {
        "schedule.chi_beta": "chi_beta",
        "schedule.chi_lambda": "chi_lambda",
        "schedule.chi_gamma": "chi_gamma",
        "schedule.eta": "eta",
        "schedule.B": "B",
    }
    for key, attr in overrides.items():
        if key in cfg:
            try:
                setattr(bundle, attr, monotonize(parse_counterfunction(cfg[key])))
            except rates.RateError as exc:
                raise ConfigError(f"field {key!r}: {exc}") from exc
    for key, attr in (
        ("schedule.Gamma", "Gamma"),
        ("schedule.N_Gamma", "N_Gamma"),
        ("schedule.G", "G"),
        ("schedule.Lambda", "Lambda"),
        ("schedule.N_Lambda", "N_Lambda"),
    ):
        if key in cfg:
            setattr(bundle, attr, int(cfg[key]))
    return bundle


def build_scenario(cfg: dict) -> Scenario:
    space_kind = _get(cfg, "space.kind", required=True)
    dim = int(_get(cfg, "space.dim", default="2"))
    try:
        space = make_model(space_kind, dim)
    except GeometryError as exc:
        raise ConfigError(str(exc)) from exc

    bundle = _build_bundle(cfg)
    family = _build_family(cfg, space, bundle)
    p = family.fixed_point

    u = _parse_point(space, _get(cfg, "run.u", required=True), "run.u")
    x0 = _parse_point(space, _get(cfg, "run.x0", required=True), "run.x0")
    steps = int(_get(cfg, "run.steps", default="100"))
    if steps < 1:
        raise ConfigError("field 'run.steps': must be >= 1")
    seed = int(_get(cfg, "run.seed", default="0"))
    tol = float(_get(cfg, "run.tol", default="1e-9"))
    bit_cap = int(_get(cfg, "run.bit_cap", default=str(rates.DEFAULT_BIT_CAP)))

    M = max(space.dist(x0, p), space.dist(u, p))
    k_raw = _get(cfg, "run.K")
    if k_raw is not None:
        K = int(k_raw)
        if K < math.ceil(M):
            raise ConfigError(
                f"field 'run.K': K={K} below ceil(M)={math.ceil(M)}"
            )
    else:
        K = max(1, math.ceil(M))

    digest = hashlib.sha256(
        "\n".join(f"{k}={v}" for k, v in sorted(cfg.items())).encode()
    ).hexdigest()[:12]

    return Scenario(
        space=space,
        family=family,
        bundle=bundle,
        u=u,
        x0=x0,
        p=p,
        M=M,
        K=K,
        steps=steps,
        seed=seed,
        tol=tol,
        bit_cap=bit_cap,
        scenario_hash=digest,
        chi_T_fn=family.chi_T_fn(bundle, K),
    )


def scenario_from_text(text: str) -> Scenario:
    return build_scenario(parse_config_text(text))
