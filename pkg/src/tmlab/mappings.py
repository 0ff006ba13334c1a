"""Nonexpansive mapping families over the geometry models.

Every family is an indexed collection (T_n) of 1-Lipschitz self-maps with a
known common fixed point, plus empirical checkers for nonexpansiveness, for
the step-size compatibility inequality
    d(T_n x, T_m x) <= (|gamma_m - gamma_n| / gamma_n) d(T_n x, x)
and for approximate-fixed-point membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .geometry import (
    AxiomReport,
    Euclidean,
    GeometryError,
    PoincareDisk,
    Point,
    SampleSpec,
    SpaceModel,
    Tripod,
    _rng_for,
)


class SolverFailure(RuntimeError):
    """Inner fixed-point solve did not reach its tolerance."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"resolvent solve stalled at residual {residual:.3e} "
            f"after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


class MappingFamily:
    """Base class: an indexed family of nonexpansive self-maps."""

    name = "family"

    def __init__(self, space: SpaceModel, fixed_point: Point):
        self.space = space
        self.fixed_point = fixed_point
        self.gammas: Optional[Callable[[int], float]] = None

    def apply(self, n: int, x: Point) -> Point:
        raise NotImplementedError

    def chi_T_fn(self, bundle, K: int) -> Callable[[int], int]:
        """Cauchy modulus for the series sum_n d(T_{n+1} u_n, T_n u_n).

        Families whose members all coincide have a zero series; families
        driven by a step-size sequence inherit the modulus built from the
        schedule's gamma data.
        """
        from .schedules import chi_T

        if self.gammas is None:
            return lambda k: 0
        return lambda k: chi_T(bundle, K, k)


class IdentityFamily(MappingFamily):
    name = "identity"

    def __init__(self, space: SpaceModel, fixed_point: Optional[Point] = None):
        super().__init__(space, fixed_point or space.base_point())

    def apply(self, n, x):
        return x


class ConstantFamily(MappingFamily):
    """T_n = T for a single nonexpansive map T."""

    name = "constant"

    def __init__(self, space, single_map: Callable[[Point], Point], fixed_point: Point):
        super().__init__(space, fixed_point)
        self.single_map = single_map

    def apply(self, n, x):
        return self.single_map(x)


class RotationFamily(MappingFamily):
    """A rotation fixing the base point: a plane rotation on Euclidean(2),
    a rotation about the origin of the disk, and a cyclic leg permutation
    on the tripod.  All are isometries fixing the base point."""

    name = "rotation"

    def __init__(self, space: SpaceModel, angle: float):
        if isinstance(space, Euclidean) and space.dim != 2:
            raise GeometryError("rotation requires a two-dimensional model")
        super().__init__(space, space.base_point())
        self.angle = float(angle)
        self._cos = math.cos(self.angle)
        self._sin = math.sin(self.angle)
        # tripod analogue: shift legs by the nearest third of a full turn
        self._shift = round(3.0 * self.angle / (2.0 * math.pi)) % 3

    def apply(self, n, x):
        if isinstance(self.space, Tripod):
            leg, s = x.data
            return Point.tripod((leg + self._shift) % 3, s)
        a, b = x.data
        return Point(x.kind, (a * self._cos - b * self._sin,
                              a * self._sin + b * self._cos))


@dataclass(frozen=True)
class BallSet:
    """Descriptor of a closed geodesic ball."""

    center: Point
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError("ball radius must be positive")


class MetricProjectionFamily(MappingFamily):
    """Metric projection onto a closed geodesic ball, realized by moving
    along the geodesic toward the center; nonexpansive in any CAT(0) model."""

    name = "projection"

    def __init__(self, space: SpaceModel, ball: BallSet):
        super().__init__(space, ball.center)
        self.ball = ball

    def apply(self, n, x):
        d = self.space.dist(x, self.ball.center)
        if d <= self.ball.radius:
            return x
        return self.space.comb(self.ball.center, x, self.ball.radius / d)


@dataclass(frozen=True)
class HalfSquaredNorm:
    """The function z -> d^2(z, center) / 2."""

    center: Point


@dataclass(frozen=True)
class IndicatorOfBall:
    center: Point
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError("ball radius must be positive")


class ProximalFamily(MappingFamily):
    """Proximal maps T_n = prox_{gamma_n f} of a convex function f.

    For f = d^2(., c)/2 the prox moves x toward c by the fraction
    gamma/(1 + gamma) of the geodesic; for a ball indicator it is the
    metric projection (step-size independent).
    """

    name = "proximal"

    def __init__(self, space, descriptor, gammas: Callable[[int], float]):
        if isinstance(descriptor, (HalfSquaredNorm, IndicatorOfBall)):
            center = descriptor.center
        else:
            raise GeometryError(f"unsupported convex function {descriptor!r}")
        super().__init__(space, center)
        self.descriptor = descriptor
        self.gammas = gammas

    def apply(self, n, x):
        if isinstance(self.descriptor, HalfSquaredNorm):
            g = self.gammas(n)
            return self.space.comb(x, self.descriptor.center, g / (1.0 + g))
        # indicator of a ball: projection
        d = self.space.dist(x, self.descriptor.center)
        if d <= self.descriptor.radius:
            return x
        return self.space.comb(
            self.descriptor.center, x, self.descriptor.radius / d
        )


class ResolventFamily(MappingFamily):
    """Resolvents J_n of a nonexpansive base map T: the fixed point z of
    z -> (1 - c) x + c T(z) with c = gamma_n / (1 + gamma_n), solved by
    Banach iteration (contraction factor c < 1)."""

    name = "resolvent"

    def __init__(
        self,
        space,
        base_map: Callable[[Point], Point],
        base_fixed_point: Point,
        gammas: Callable[[int], float],
        inner_tol: float = 1e-12,
        max_iterations: int = 10_000,
    ):
        super().__init__(space, base_fixed_point)
        self.base_map = base_map
        self.gammas = gammas
        self.inner_tol = inner_tol
        self.max_iterations = max_iterations

    def apply(self, n, x):
        g = self.gammas(n)
        c = g / (1.0 + g)
        z = x
        for it in range(self.max_iterations):
            z_next = self.space.comb(x, self.base_map(z), c)
            if self.space.dist(z, z_next) <= self.inner_tol:
                return z_next
            z = z_next
        residual = self.space.dist(z, self.space.comb(x, self.base_map(z), c))
        raise SolverFailure(residual, self.max_iterations)


# ---------------------------------------------------------------------------
# Empirical checks
# ---------------------------------------------------------------------------


def check_nonexpansive(
    family: MappingFamily,
    n_max: int,
    spec: SampleSpec,
    tol: float = 1e-9,
) -> AxiomReport:
    """d(T_n x, T_n y) <= d(x, y) for sampled pairs and all n <= n_max."""
    rng = _rng_for(spec)
    space = family.space
    worst = (0.0, None)
    for _ in range(spec.count):
        x = space.sample(rng, spec.radius)
        y = space.sample(rng, spec.radius)
        dxy = space.dist(x, y)
        for n in range(n_max + 1):
            slack = space.dist(family.apply(n, x), family.apply(n, y)) - dxy
            if slack > worst[0]:
                worst = (slack, {"x": x.data, "y": y.data, "n": n})
    return AxiomReport(
        axiom=f"nonexpansive[{family.name}]",
        samples=spec.count,
        max_violation=worst[0],
        worst_case_inputs=worst[1],
        tol=tol,
    )


def check_condition_c1(
    family: MappingFamily,
    gammas: Callable[[int], float],
    n_max: int,
    spec: SampleSpec,
    tol: float = 1e-9,
) -> AxiomReport:
    """d(T_n x, T_m x) <= (|gamma_m - gamma_n| / gamma_n) d(T_n x, x)."""
    for n in range(n_max + 1):
        if gammas(n) <= 0:
            raise GeometryError(f"gamma_{n} must be positive")
    rng = _rng_for(spec)
    space = family.space
    worst = (0.0, None)
    for _ in range(spec.count):
        x = space.sample(rng, spec.radius)
        images = [family.apply(n, x) for n in range(n_max + 1)]
        for n in range(n_max + 1):
            gn = gammas(n)
            dref = space.dist(images[n], x)
            for m in range(n_max + 1):
                lhs = space.dist(images[n], images[m])
                rhs = abs(gammas(m) - gn) / gn * dref
                if lhs - rhs > worst[0]:
                    worst = (lhs - rhs, {"x": x.data, "n": n, "m": m})
    return AxiomReport(
        axiom=f"condition-c1[{family.name}]",
        samples=spec.count,
        max_violation=worst[0],
        worst_case_inputs=worst[1],
        tol=tol,
    )


def check_afp_membership(
    family: MappingFamily,
    x: Point,
    p: Point,
    K: int,
    k: int,
    n_max: int,
) -> bool:
    """x is a common 1/k-approximate fixed point (up to index n_max) lying
    in the closed ball of radius K around p."""
    if k < 1:
        raise GeometryError("k must be >= 1")
    space = family.space
    if space.dist(x, p) > K + 1e-9:
        return False
    bound = 1.0 / k
    return all(
        space.dist(x, family.apply(n, x)) <= bound for n in range(n_max + 1)
    )
