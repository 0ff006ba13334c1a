"""Concrete CAT(0) space models and empirical checkers for their axioms.

Three models are shipped: Euclidean(d), the Poincare disk, and the tripod
(three half-lines glued at a common center).  Each model provides the
distance, the geodesic convex combination, and quasilinearization; the
checkers sample pseudo-random tuples and report the worst violation of
each axiom.
"""

from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

EQ_TOL = 1e-12
DISK_MARGIN = 1e-12


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """A model-tagged point: euclidean coordinates, a disk pair, or a
    (leg, arm length) pair for the tripod."""

    kind: str  # "euclidean" | "disk" | "tripod"
    data: tuple

    @staticmethod
    def euclidean(*coords: float) -> "Point":
        return Point("euclidean", tuple(float(c) for c in coords))

    @staticmethod
    def disk(a: float, b: float) -> "Point":
        if a * a + b * b >= 1.0 - DISK_MARGIN:
            raise GeometryError(f"disk point ({a}, {b}) too close to the boundary")
        return Point("disk", (float(a), float(b)))

    @staticmethod
    def tripod(leg: int, length: float) -> "Point":
        if length < 0 or not math.isfinite(length):
            raise GeometryError("tripod arm length must be finite and >= 0")
        if leg not in (0, 1, 2):
            raise GeometryError("tripod leg must be 0, 1 or 2")
        if length == 0.0:
            leg = 0  # all legs share the center
        return Point("tripod", (leg, float(length)))


@dataclass(frozen=True)
class SampleSpec:
    seed: int
    count: int
    radius: float = 2.0

    def __post_init__(self):
        if self.count < 1:
            raise GeometryError("sample count must be >= 1")
        if self.radius <= 0:
            raise GeometryError("sample radius must be positive")


@dataclass
class AxiomReport:
    axiom: str
    samples: int
    max_violation: float
    worst_case_inputs: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    tol: float = 1e-9

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "worst_case_inputs": self.worst_case_inputs,
            "pass": self.passed,
        }

    def __str__(self) -> str:
        return json.dumps(self.to_json())


class SpaceModel:
    """Common interface of the shipped models; immutable after construction."""

    kind: str
    tolerance: float = 1e-12

    def dist(self, x: Point, y: Point) -> float:
        raise NotImplementedError

    def comb(self, x: Point, y: Point, lam: float) -> Point:
        """The geodesic point (1 - lam) x + lam y."""
        raise NotImplementedError

    def sample(self, rng: random.Random, radius: float) -> Point:
        """A pseudo-random point in the ball of the given radius around the
        model's base point."""
        raise NotImplementedError

    def sample_near(self, rng: random.Random, center: Point, radius: float) -> Point:
        raise NotImplementedError

    def base_point(self) -> Point:
        raise NotImplementedError

    # -- generic pieces -----------------------------------------------------

    def _require(self, *pts: Point):
        for p in pts:
            if p.kind != self.kind:
                raise GeometryError(
                    f"point of model {p.kind!r} used in model {self.kind!r}"
                )

    def _check_lambda(self, lam: float):
        if not (0.0 <= lam <= 1.0):
            raise GeometryError(f"combination parameter {lam} outside [0, 1]")

    def midpoint(self, x: Point, y: Point) -> Point:
        return self.comb(x, y, 0.5)

    def equal(self, x: Point, y: Point) -> bool:
        return self.dist(x, y) <= EQ_TOL

    def quasilin(self, x: Point, y: Point, u: Point, v: Point) -> float:
        """<xy, uv> = (d2(x,v) + d2(y,u) - d2(x,u) - d2(y,v)) / 2."""
        self._require(x, y, u, v)
        return quasilin_from_distances(
            self.dist(x, v), self.dist(y, u), self.dist(x, u), self.dist(y, v)
        )

    def describe(self) -> str:
        return self.kind


def quasilin_from_distances(dxv, dyu, dxu, dyv) -> float:
    return 0.5 * (dxv * dxv + dyu * dyu - dxu * dxu - dyv * dyv)


class Euclidean(SpaceModel):
    def __init__(self, dim: int):
        if dim < 1:
            raise GeometryError("dimension must be >= 1")
        self.dim = dim
        self.kind = "euclidean"

    def describe(self) -> str:
        return f"euclidean({self.dim})"

    def point(self, *coords: float) -> Point:
        if len(coords) != self.dim:
            raise GeometryError("wrong coordinate count")
        return Point.euclidean(*coords)

    def base_point(self) -> Point:
        return Point.euclidean(*([0.0] * self.dim))

    def dist(self, x: Point, y: Point) -> float:
        self._require(x, y)
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(x.data, y.data)))

    def comb(self, x: Point, y: Point, lam: float) -> Point:
        self._require(x, y)
        self._check_lambda(lam)
        return Point(
            "euclidean",
            tuple((1.0 - lam) * a + lam * b for a, b in zip(x.data, y.data)),
        )

    def quasilin(self, x: Point, y: Point, u: Point, v: Point) -> float:
        # fast path: the coordinate dot product (y - x) . (v - u)
        self._require(x, y, u, v)
        return sum(
            (b - a) * (d - c)
            for a, b, c, d in zip(x.data, y.data, u.data, v.data)
        )

    def sample(self, rng: random.Random, radius: float) -> Point:
        return self.sample_near(rng, self.base_point(), radius)

    def sample_near(self, rng: random.Random, center: Point, radius: float) -> Point:
        vec = [rng.gauss(0.0, 1.0) for _ in range(self.dim)]
        norm = math.sqrt(sum(c * c for c in vec)) or 1.0
        r = radius * rng.random() ** (1.0 / self.dim)
        return Point(
            "euclidean",
            tuple(c + r * v / norm for c, v in zip(center.data, vec)),
        )


class PoincareDisk(SpaceModel):
    """The open unit disk with the hyperbolic metric d(z, w) =
    2 artanh |(z - w) / (1 - conj(w) z)|."""

    def __init__(self):
        self.kind = "disk"

    def point(self, a: float, b: float) -> Point:
        return Point.disk(a, b)

    def base_point(self) -> Point:
        return Point("disk", (0.0, 0.0))

    @staticmethod
    def _z(p: Point) -> complex:
        return complex(p.data[0], p.data[1])

    @staticmethod
    def _pt(z: complex) -> Point:
        return Point("disk", (z.real, z.imag))

    def dist(self, x: Point, y: Point) -> float:
        self._require(x, y)
        zx, zy = self._z(x), self._z(y)
        num = abs(zx - zy)
        den = abs(1.0 - zy.conjugate() * zx)
        return 2.0 * math.atanh(num / den)

    def comb(self, x: Point, y: Point, lam: float) -> Point:
        # Moebius-translate x to the origin, walk along the resulting
        # diameter by lam times the hyperbolic distance, translate back
        self._require(x, y)
        self._check_lambda(lam)
        zx, zy = self._z(x), self._z(y)
        w = (zy - zx) / (1.0 - zx.conjugate() * zy)
        r = abs(w)
        if r == 0.0:
            return x
        total = 2.0 * math.atanh(r)
        step = math.tanh(0.5 * lam * total)
        w2 = w / r * step
        z = (w2 + zx) / (1.0 + zx.conjugate() * w2)
        return self._pt(z)

    def sample(self, rng: random.Random, radius: float) -> Point:
        return self.sample_near(rng, self.base_point(), radius)

    def sample_near(self, rng: random.Random, center: Point, radius: float) -> Point:
        ang = rng.uniform(0.0, 2.0 * math.pi)
        hyp = radius * rng.random()
        w = math.tanh(0.5 * hyp) * cmath.exp(1j * ang)
        zc = self._z(center)
        z = (w + zc) / (1.0 + zc.conjugate() * w)
        # clamp just inside the margin; only reachable for extreme radii
        if abs(z) >= 1.0 - 2.0 * DISK_MARGIN:
            z *= (1.0 - 2.0 * DISK_MARGIN) / abs(z)
        return self._pt(z)


class Tripod(SpaceModel):
    """Three half-lines glued at a center: the simplest non-Hilbert CAT(0)
    model.  Intra-leg distance |s - t|, inter-leg distance s + t."""

    def __init__(self):
        self.kind = "tripod"

    def point(self, leg: int, length: float) -> Point:
        return Point.tripod(leg, length)

    def base_point(self) -> Point:
        return Point("tripod", (0, 0.0))

    def dist(self, x: Point, y: Point) -> float:
        self._require(x, y)
        (lx, sx), (ly, sy) = x.data, y.data
        if lx == ly or sx == 0.0 or sy == 0.0:
            return abs(sx - sy)
        return sx + sy

    def comb(self, x: Point, y: Point, lam: float) -> Point:
        self._require(x, y)
        self._check_lambda(lam)
        (lx, sx), (ly, sy) = x.data, y.data
        if lx == ly or sx == 0.0 or sy == 0.0:
            leg = ly if sx == 0.0 else lx
            return Point.tripod(leg, (1.0 - lam) * sx + lam * sy)
        # path through the center, total length sx + sy
        delta = lam * (sx + sy)
        if delta <= sx:
            return Point.tripod(lx, sx - delta)
        return Point.tripod(ly, delta - sx)

    def sample(self, rng: random.Random, radius: float) -> Point:
        return Point.tripod(rng.randrange(3), radius * rng.random())

    def sample_near(self, rng: random.Random, center: Point, radius: float) -> Point:
        leg, s = center.data
        delta = rng.uniform(-radius, radius)
        if s + delta >= 0.0:
            return Point.tripod(leg, s + delta)
        return Point.tripod(rng.randrange(3), -(s + delta))


def make_model(kind: str, dim: int = 2) -> SpaceModel:
    kind = kind.lower()
    if kind in ("euclidean", "euclid"):
        return Euclidean(dim)
    if kind in ("disk", "poincare-disk", "poincare"):
        return PoincareDisk()
    if kind == "tripod":
        return Tripod()
    raise GeometryError(f"unknown space kind {kind!r}")


# ---------------------------------------------------------------------------
# Axiom checkers
# ---------------------------------------------------------------------------


def _rng_for(spec: SampleSpec) -> random.Random:
    return random.Random(spec.seed)


def _collect(name, samples, tol, records) -> AxiomReport:
    worst = max(records, key=lambda r: r[0]) if records else (0.0, None)
    return AxiomReport(
        axiom=name,
        samples=samples,
        max_violation=worst[0],
        worst_case_inputs=worst[1],
        tol=tol,
    )


def check_w_axioms(space: SpaceModel, spec: SampleSpec, tol: float = 1e-9):
    """Sample tuples (x, y, z, w, lam, theta) and measure the worst violation
    of each convexity axiom of the combination operation."""
    rng = _rng_for(spec)
    rows = {name: (0.0, None) for name in ("W1", "W2", "W3", "W4")}

    def note(name, v, inputs):
        if v > rows[name][0]:
            rows[name] = (v, inputs)

    R = spec.radius
    for _ in range(spec.count):
        x, y, z, w = (space.sample(rng, R) for _ in range(4))
        lam, theta = rng.random(), rng.random()
        desc = {
            "x": x.data, "y": y.data, "z": z.data, "w": w.data,
            "lambda": lam, "theta": theta,
        }
        cxy = space.comb(x, y, lam)
        note("W1", space.dist(z, cxy)
             - ((1 - lam) * space.dist(z, x) + lam * space.dist(z, y)), desc)
        note("W2", abs(space.dist(cxy, space.comb(x, y, theta))
                       - abs(lam - theta) * space.dist(x, y)), desc)
        note("W3", space.dist(cxy, space.comb(y, x, 1.0 - lam)), desc)
        note("W4", space.dist(space.comb(x, z, lam), space.comb(y, w, lam))
             - ((1 - lam) * space.dist(x, y) + lam * space.dist(z, w)), desc)

    return [
        _collect(name, spec.count, tol, [rows[name]]) for name in rows
    ]


def check_cn(space: SpaceModel, spec: SampleSpec, tol: float = 1e-9):
    """Check the midpoint inequality (CN-) and its lambda-weighted form
    (CN+); a positive violation means the inequality failed.  For flat
    models an extra "CN- equality" entry records the absolute residual of
    the midpoint inequality, which is an identity there (in the curved
    models the inequality is strict, so no equality claim is made)."""
    rng = _rng_for(spec)
    worst_minus = (0.0, None)
    worst_plus = (0.0, None)
    worst_eq = (0.0, None)
    R = spec.radius
    for _ in range(spec.count):
        x, y, z = (space.sample(rng, R) for _ in range(3))
        lam = rng.random()
        desc = {"x": x.data, "y": y.data, "z": z.data, "lambda": lam}
        m = space.midpoint(x, y)
        d2 = lambda a, b: space.dist(a, b) ** 2
        res_minus = d2(z, m) - (0.5 * d2(z, x) + 0.5 * d2(z, y) - 0.25 * d2(x, y))
        if res_minus > worst_minus[0]:
            worst_minus = (res_minus, desc)
        if abs(res_minus) > worst_eq[0]:
            worst_eq = (abs(res_minus), desc)
        c = space.comb(x, y, lam)
        res_plus = d2(z, c) - (
            (1 - lam) * d2(z, x) + lam * d2(z, y) - lam * (1 - lam) * d2(x, y)
        )
        if res_plus > worst_plus[0]:
            worst_plus = (res_plus, desc)
    reports = [
        _collect("CN-", spec.count, tol, [worst_minus]),
        _collect("CN+", spec.count, tol, [worst_plus]),
    ]
    if space.kind == "euclidean":
        reports.append(_collect("CN- equality", spec.count, tol, [worst_eq]))
    return reports


def check_uniform_convexity(space: SpaceModel, spec: SampleSpec, tol: float = 1e-9):
    """Sample (r, a, x, y) with x, y in the ball of radius r around a and
    check d(a, midpoint) <= (1 - eps^2/8) r for eps = d(x, y)/r."""
    rng = _rng_for(spec)
    worst = (0.0, None)
    R = spec.radius
    for _ in range(spec.count):
        a = space.sample(rng, R)
        r = rng.uniform(0.05 * R, R)
        x = space.sample_near(rng, a, r)
        y = space.sample_near(rng, a, r)
        dxy = space.dist(x, y)
        eps = dxy / r
        if eps > 2.0:
            continue  # cannot happen inside the ball; numerical safety
        m = space.midpoint(x, y)
        v = space.dist(a, m) - (1.0 - eps * eps / 8.0) * r
        if v > worst[0]:
            worst = (v, {"a": a.data, "x": x.data, "y": y.data, "r": r, "eps": eps})
    return [_collect("uniform convexity eps^2/8", spec.count, tol, [worst])]


def check_quasilin_axioms(space: SpaceModel, spec: SampleSpec, tol: float = 1e-9):
    """Check the four characterizing identities of quasilinearization and
    the Cauchy-Schwarz inequality."""
    rng = _rng_for(spec)
    names = ("ql-square", "ql-symmetry", "ql-antisymmetry",
             "ql-additivity", "cauchy-schwarz")
    rows = {n: (0.0, None) for n in names}

    def note(name, v, inputs):
        if v > rows[name][0]:
            rows[name] = (v, inputs)

    R = spec.radius
    ql = space.quasilin
    for _ in range(spec.count):
        x, y, u, v, w = (space.sample(rng, R) for _ in range(5))
        desc = {"x": x.data, "y": y.data, "u": u.data, "v": v.data, "w": w.data}
        note("ql-square", abs(ql(x, y, x, y) - space.dist(x, y) ** 2), desc)
        note("ql-symmetry", abs(ql(x, y, u, v) - ql(u, v, x, y)), desc)
        note("ql-antisymmetry", abs(ql(x, y, u, v) + ql(y, x, u, v)), desc)
        note("ql-additivity",
             abs(ql(x, y, u, v) + ql(x, y, v, w) - ql(x, y, u, w)), desc)
        note("cauchy-schwarz",
             ql(x, y, u, v) - space.dist(x, y) * space.dist(u, v), desc)

    return [_collect(n, spec.count, tol, [rows[n]]) for n in names]


def run_all_geometry_checks(space: SpaceModel, spec: SampleSpec, tol: float = 1e-9):
    reports = []
    reports += check_w_axioms(space, spec, tol)
    reports += check_cn(space, spec, tol)
    reports += check_uniform_convexity(space, spec, tol)
    reports += check_quasilin_axioms(space, spec, tol)
    return reports
